use field_core::{apply_s, Error, Result, Vec3C, Vec3R, C64};
use spectral::fourier::{jacobian, vec_to_k};
use spectral::{polarization_triad, synthesize, GridSpec, HelicitySpectrum, SixField};

use crate::densities::k_power;
use crate::direct::direct_scalar_product;

/// Expectation values of the generators: E, P, M (angular momentum) and N (moment of energy).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Observables {
    pub energy: f64,
    pub momentum: Vec3R,
    pub angular_momentum: Vec3R,
    pub moment_of_energy: Vec3R,
}

/// How to evaluate the coordinate-space scalar product.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProductMethod {
    Spectral,
    Direct,
}

/// Σ_λ Σ_k (1/V)/|k| · a*(k,λ) b(k,λ).
pub fn scalar_product_momentum(a: &HelicitySpectrum, b: &HelicitySpectrum) -> Result<C64> {
    a.check_same_grid(b)?;
    let spec = a.spec;
    let w = spec.k_weight();
    let mut acc = C64::new(0.0, 0.0);
    for i in 1..spec.len() {
        let k = spec.wavevector(i).norm();
        acc += (a.plus[i].conj() * b.plus[i] + a.minus[i].conj() * b.minus[i]) * (w / k);
    }
    Ok(acc)
}

/// (1/2π²)∬ a†(r)|r−r′|⁻²b(r′) d³r d³r′.
///
/// The spectral path evaluates (1/V)Σ â†b̂/|k| over both blocks; the direct path
/// convolves with a periodized lattice kernel (see [`crate::direct`]).
pub fn scalar_product_coordinate(a: &SixField, b: &SixField, method: ProductMethod) -> Result<C64> {
    a.check_same_grid(b)?;
    match method {
        ProductMethod::Spectral => {
            let spec = a.spec;
            let (au, al) = a.to_k();
            let (bu, bl) = b.to_k();
            let w = spec.k_weight();
            let mut acc = C64::new(0.0, 0.0);
            for i in 1..spec.len() {
                let k = spec.wavevector(i).norm();
                acc += (au[i].dotc(&bu[i]) + al[i].dotc(&bl[i])) * (w / k);
            }
            Ok(acc)
        }
        ProductMethod::Direct => direct_scalar_product(a, b),
    }
}

/// N = Σ_λ Σ_k (1/V)|φ(k,λ)|²/|k|.
pub fn photon_number(spec: &HelicitySpectrum) -> f64 {
    let g = spec.spec;
    let w = g.k_weight();
    (1..g.len()).map(|i| (spec.plus[i].norm_sqr() + spec.minus[i].norm_sqr()) * w / g.wavevector(i).norm()).sum()
}

fn block_field(spectrum: &HelicitySpectrum, lambda: i32) -> Result<Vec<Vec3C>> {
    let mut only = HelicitySpectrum::zeros(spectrum.spec);
    if lambda > 0 {
        only.plus.clone_from(&spectrum.plus);
        Ok(synthesize(&only, 0.0)?.upper())
    } else {
        only.minus.clone_from(&spectrum.minus);
        Ok(synthesize(&only, 0.0)?.lower())
    }
}

fn times_position(spec: &GridSpec, v: &[Vec3C], axis: usize, factor: C64) -> Vec<Vec3C> {
    v.iter().enumerate().map(|(i, x)| x * (factor * spec.position(i)[axis])).collect()
}

/// E, P, M, N from the helicity amplitudes.
///
/// E and P are diagonal (weights |k| and k over |k|). M and N use the covariant
/// derivative D_k f = e†(k,λ)·∂_k(e f), with ∂_k of the lattice spectrum taken
/// as the Fourier image of multiplication by −i r.
pub fn observables_momentum(spectrum: &HelicitySpectrum) -> Result<Observables> {
    let spec = spectrum.spec;
    if !spectrum.is_finite() {
        return Err(Error::Domain("helicity spectrum contains non-finite amplitudes".into()));
    }
    let w = spec.k_weight();
    let mi = C64::new(0.0, -1.0);
    let mut obs =
        Observables { energy: 0.0, momentum: Vec3R::zeros(), angular_momentum: Vec3R::zeros(), moment_of_energy: Vec3R::zeros() };
    for lambda in [1, -1] {
        let amps = if lambda > 0 { &spectrum.plus } else { &spectrum.minus };
        if amps.iter().all(|z| z.norm_sqr() == 0.0) {
            continue;
        }
        let blk = block_field(spectrum, lambda)?;
        let d: Vec<Vec<Vec3C>> = (0..3).map(|a| vec_to_k(&spec, &times_position(&spec, &blk, a, mi))).collect();
        for i in 1..spec.len() {
            let f = amps[i];
            let k = spec.wavevector(i);
            let kk = k.norm();
            let t = polarization_triad(&k)?;
            let ev = t.e_lambda(lambda);
            let df = Vec3C::from_fn(|a, _| ev.dotc(&d[a][i]));
            let p = f.norm_sqr();
            obs.energy += w * p;
            obs.momentum += t.n_hat * (w * p);
            let orbital = field_core::to_complex(&k).cross(&(df * mi)) * f.conj();
            obs.angular_momentum += (orbital.map(|z| z.re) + t.n_hat * (lambda as f64 * p)) * (w / kk);
            obs.moment_of_energy += (df * (C64::new(0.0, 1.0) * f.conj())).map(|z| z.re) * w;
        }
    }
    Ok(obs)
}

/// Same observables from Ψ(r): Ĥ⁻¹ (division by |k|) followed by the local operators.
///
/// Requires the energy-product norm to be 1 within 1e-8.
pub fn observables_coordinate(psi: &SixField) -> Result<Observables> {
    let spec = psi.spec;
    let norm = scalar_product_coordinate(psi, psi, ProductMethod::Spectral)?.re;
    if !norm.is_finite() || (norm - 1.0).abs() > 1e-8 {
        return Err(Error::Normalization { norm });
    }
    let phi = k_power(psi, -1.0)?;
    let dv = spec.cell_volume();
    let mi = C64::new(0.0, -1.0);
    let mut energy = 0.0;
    let mut momentum = Vec3R::zeros();
    let mut angular = Vec3R::zeros();
    let mut moment = Vec3R::zeros();
    let hpsi = crate::generators::generator_apply(crate::generators::GeneratorTag::H, psi);
    let blocks = [(phi.upper(), psi.upper()), (phi.lower(), psi.lower())];
    for (b, (ph, ps)) in blocks.iter().enumerate() {
        let jac = jacobian(&spec, ps);
        for i in 0..spec.len() {
            let r = spec.position(i);
            let hv = if b == 0 { hpsi.data[i].upper } else { hpsi.data[i].lower };
            energy += ph[i].dotc(&hv).re * dv;
            let p = Vec3C::from_fn(|a, _| ph[i].dotc(&jac[a][i]) * mi);
            momentum += p.map(|z| z.re) * dv;
            let rc = field_core::to_complex(&r);
            let l = rc.cross(&p);
            let s = Vec3C::from_fn(|a, _| ph[i].dotc(&apply_s(a, &ps[i])));
            angular += (l + s).map(|z| z.re) * dv;
            moment += r * (ps[i].norm_squared() * dv);
        }
    }
    Ok(Observables { energy, momentum, angular_momentum: angular, moment_of_energy: moment })
}

/// Classical integrals of one Riemann–Silberstein vector F on the lattice:
/// E = ∫F*·F, P = ∫(1/i)F*×F, M = ∫r×(1/i)F*×F, N = ∫r F*·F.
pub fn classical_observables(spec: &GridSpec, f: &[Vec3C]) -> Result<Observables> {
    if f.len() != spec.len() {
        return Err(Error::Shape(format!("field of length {} on a grid of {}", f.len(), spec.len())));
    }
    let dv = spec.cell_volume();
    let mut o =
        Observables { energy: 0.0, momentum: Vec3R::zeros(), angular_momentum: Vec3R::zeros(), moment_of_energy: Vec3R::zeros() };
    for (i, v) in f.iter().enumerate() {
        let r = spec.position(i);
        let rho = v.norm_squared();
        let g = (v.map(|z| z.conj()).cross(v) * C64::new(0.0, -1.0)).map(|z| z.re);
        o.energy += rho * dv;
        o.momentum += g * dv;
        o.angular_momentum += r.cross(&g) * dv;
        o.moment_of_energy += r * (rho * dv);
    }
    Ok(o)
}
