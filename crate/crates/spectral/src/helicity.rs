use field_core::{dot_u, norm_sqr, to_complex, Error, Result, Vec3C, Vec3R, C64};
use log::{debug, warn};

use crate::field::SixField;
use crate::grid::GridSpec;

/// Half-angle of the cone around the polar axis where the spherical gauge is singular.
pub const POLE_CONE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarizationTriad {
    pub l1: Vec3R,
    pub l2: Vec3R,
    pub n_hat: Vec3R,
    pub e: Vec3C,
}

impl PolarizationTriad {
    /// e(k, λ): e for λ = +1, e* for λ = −1.
    pub fn e_lambda(&self, lambda: i32) -> Vec3C {
        if lambda > 0 {
            self.e
        } else {
            self.e.map(|z| z.conj())
        }
    }
}

/// Spherical-gauge triad: l1 = θ̂, l2 = φ̂; x̂, ŷ on the +z axis and x̂, −ŷ on the −z axis.
pub fn polarization_triad(k: &Vec3R) -> Result<PolarizationTriad> {
    let kk = k.norm();
    if !(kk > 0.0) || !kk.is_finite() {
        return Err(Error::Domain(format!("polarization triad needs a nonzero finite k, got {k:?}")));
    }
    let n_hat = k / kk;
    let rho = (k.x * k.x + k.y * k.y).sqrt();
    let (l1, l2) = if rho == 0.0 {
        if k.z > 0.0 {
            (Vec3R::x(), Vec3R::y())
        } else {
            (Vec3R::x(), -Vec3R::y())
        }
    } else {
        let (ct, st) = (k.z / kk, rho / kk);
        let (cp, sp) = (k.x / rho, k.y / rho);
        (Vec3R::new(ct * cp, ct * sp, -st), Vec3R::new(-sp, cp, 0.0))
    };
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let e = Vec3C::from_fn(|i, _| C64::new(l1[i] * s, l2[i] * s));
    Ok(PolarizationTriad { l1, l2, n_hat, e })
}

/// α(k) = l1·∂_k l2 in the spherical gauge, equal to −cot θ/|k| φ̂.
///
/// Its curl is +n/|k|² given the orientation l1 × l2 = n.
pub fn berry_connection(k: &Vec3R) -> Result<Vec3R> {
    let kk = k.norm();
    if !(kk > 0.0) {
        return Err(Error::Domain("Berry connection needs k != 0".into()));
    }
    let theta = (k.x * k.x + k.y * k.y).sqrt().atan2(k.z);
    if theta < POLE_CONE || std::f64::consts::PI - theta < POLE_CONE {
        return Err(Error::GaugeSingularity(format!(
            "k = {k:?} lies within {POLE_CONE:e} rad of the polar axis"
        )));
    }
    let t = polarization_triad(k)?;
    Ok(t.l2 * (-theta.cos() / (theta.sin() * kk)))
}

/// Helicity amplitudes φ(k, λ) on the dual lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct HelicitySpectrum {
    pub spec: GridSpec,
    pub plus: Vec<C64>,
    pub minus: Vec<C64>,
}

fn check_lambda(lambda: i32) -> Result<()> {
    if lambda == 1 || lambda == -1 {
        Ok(())
    } else {
        Err(Error::Domain(format!("helicity must be +1 or -1, got {lambda}")))
    }
}

impl HelicitySpectrum {
    pub fn zeros(spec: GridSpec) -> Self {
        HelicitySpectrum { spec, plus: vec![C64::new(0.0, 0.0); spec.len()], minus: vec![C64::new(0.0, 0.0); spec.len()] }
    }

    pub fn get(&self, idx: usize, lambda: i32) -> C64 {
        if lambda > 0 {
            self.plus[idx]
        } else {
            self.minus[idx]
        }
    }

    /// Set one amplitude; the k = 0 mode carries no helicity and is rejected.
    pub fn set(&mut self, idx: usize, lambda: i32, value: C64) -> Result<()> {
        check_lambda(lambda)?;
        if idx == 0 {
            return Err(Error::Domain("the k = 0 mode cannot carry a helicity amplitude".into()));
        }
        if lambda > 0 {
            self.plus[idx] = value;
        } else {
            self.minus[idx] = value;
        }
        Ok(())
    }

    pub fn check_same_grid(&self, other: &HelicitySpectrum) -> Result<()> {
        if self.spec != other.spec {
            return Err(Error::Shape(format!("grids differ: {:?} vs {:?}", self.spec, other.spec)));
        }
        Ok(())
    }

    pub fn is_finite(&self) -> bool {
        self.plus.iter().chain(&self.minus).all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn add(&self, other: &HelicitySpectrum) -> HelicitySpectrum {
        HelicitySpectrum {
            spec: self.spec,
            plus: self.plus.iter().zip(&other.plus).map(|(a, b)| a + b).collect(),
            minus: self.minus.iter().zip(&other.minus).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn scale(&self, a: C64) -> HelicitySpectrum {
        HelicitySpectrum {
            spec: self.spec,
            plus: self.plus.iter().map(|z| z * a).collect(),
            minus: self.minus.iter().map(|z| z * a).collect(),
        }
    }
}

fn dc_energy_check(upper: &[Vec3C], lower: &[Vec3C]) {
    let total: f64 = upper.iter().chain(lower).map(norm_sqr).sum();
    let dc = norm_sqr(&upper[0]) + norm_sqr(&lower[0]);
    if total > 0.0 && dc > 1e-12 * total {
        warn!("input field carries a DC fraction {:.3e} of its energy; it is discarded", dc / total);
    }
}

/// Helicity amplitudes of a field: φ(k,+1) = e*·Û, φ(k,−1) = e·L̂.
pub fn decompose(field: &SixField) -> HelicitySpectrum {
    let spec = field.spec;
    let (u, l) = field.to_k();
    dc_energy_check(&u, &l);
    let mut out = HelicitySpectrum::zeros(spec);
    let mut longitudinal = 0.0;
    let mut total = 0.0;
    for i in 1..spec.len() {
        let t = polarization_triad(&spec.wavevector(i)).expect("k != 0 off the origin");
        out.plus[i] = t.e.dotc(&u[i]);
        out.minus[i] = dot_u(&t.e, &l[i]);
        let n = to_complex(&t.n_hat);
        longitudinal += dot_u(&n, &u[i]).norm_sqr() + dot_u(&n, &l[i]).norm_sqr();
        total += norm_sqr(&u[i]) + norm_sqr(&l[i]);
    }
    if total > 0.0 {
        debug!("decompose: longitudinal fraction {:.3e}", (longitudinal / total).sqrt());
    }
    out
}

/// Ψ(r,t) = (1/V) Σ_k (e φ₊, e* φ₋) e^{−i|k|t + ik·r}.
pub fn synthesize(spectrum: &HelicitySpectrum, t: f64) -> Result<SixField> {
    let spec = spectrum.spec;
    if !spectrum.is_finite() {
        return Err(Error::Domain("helicity spectrum contains non-finite amplitudes".into()));
    }
    if spectrum.plus[0] != C64::new(0.0, 0.0) || spectrum.minus[0] != C64::new(0.0, 0.0) {
        return Err(Error::Domain("the k = 0 mode cannot carry a helicity amplitude".into()));
    }
    let mut u = vec![Vec3C::zeros(); spec.len()];
    let mut l = vec![Vec3C::zeros(); spec.len()];
    for i in 1..spec.len() {
        let k = spec.wavevector(i);
        let tr = polarization_triad(&k)?;
        let ph = C64::from_polar(1.0, -k.norm() * t);
        u[i] = tr.e * (spectrum.plus[i] * ph);
        l[i] = tr.e.map(|z| z.conj()) * (spectrum.minus[i] * ph);
    }
    Ok(SixField::from_k(spec, &u, &l))
}

/// Keep the positive-frequency, transverse content: e e†Û in the upper block and e* eᵀL̂ in the lower.
pub fn positive_frequency_project(field: &SixField) -> SixField {
    let spec = field.spec;
    let (u, l) = field.to_k();
    dc_energy_check(&u, &l);
    let mut nu = vec![Vec3C::zeros(); spec.len()];
    let mut nl = vec![Vec3C::zeros(); spec.len()];
    for i in 1..spec.len() {
        let t = polarization_triad(&spec.wavevector(i)).expect("k != 0 off the origin");
        let ec = t.e.map(|z| z.conj());
        nu[i] = t.e * t.e.dotc(&u[i]);
        nl[i] = ec * dot_u(&t.e, &l[i]);
    }
    SixField::from_k(spec, &nu, &nl)
}

/// Remove the longitudinal n(n·F) part of both blocks (DC dropped).
pub fn transverse_project(field: &SixField) -> SixField {
    field.k_map(|i, u, l| {
        if i == 0 {
            return (Vec3C::zeros(), Vec3C::zeros());
        }
        let k = field.spec.wavevector(i);
        let n = to_complex(&(k / k.norm()));
        (u - n * dot_u(&n, u), l - n * dot_u(&n, l))
    })
}

/// Relative size of the longitudinal content ‖n·F̂‖/‖F̂‖ over both blocks.
pub fn longitudinal_residual(field: &SixField) -> f64 {
    let spec = field.spec;
    let (u, l) = field.to_k();
    let mut lon = 0.0;
    let mut tot = 0.0;
    for i in 0..spec.len() {
        tot += norm_sqr(&u[i]) + norm_sqr(&l[i]);
        if i > 0 {
            let k = spec.wavevector(i);
            let n = to_complex(&(k / k.norm()));
            lon += dot_u(&n, &u[i]).norm_sqr() + dot_u(&n, &l[i]).norm_sqr();
        }
    }
    if tot == 0.0 {
        0.0
    } else {
        (lon / tot).sqrt()
    }
}

/// amp′(k,λ) = e^{−i|k|t₀ + ik·r₀} amp(k,λ).
pub fn translate(spectrum: &HelicitySpectrum, r0: &Vec3R, t0: f64) -> HelicitySpectrum {
    let spec = spectrum.spec;
    let mut out = spectrum.clone();
    for i in 0..spec.len() {
        let k = spec.wavevector(i);
        let ph = C64::from_polar(1.0, -k.norm() * t0 + k.dot(r0));
        out.plus[i] *= ph;
        out.minus[i] *= ph;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn pole_and_equator_triads() {
        let t = polarization_triad(&Vec3R::new(0.0, 0.0, 1.0)).unwrap();
        assert_eq!((t.l1, t.l2), (Vec3R::x(), Vec3R::y()));
        assert!((t.e - Vec3C::new(C64::new(FRAC_1_SQRT_2, 0.0), C64::new(0.0, FRAC_1_SQRT_2), C64::new(0.0, 0.0))).norm() < 1e-16);
        let t = polarization_triad(&Vec3R::new(0.0, 0.0, -2.0)).unwrap();
        assert_eq!((t.l1, t.l2), (Vec3R::x(), -Vec3R::y()));
        assert!((t.l1.cross(&t.l2) - t.n_hat).norm() < 1e-16);
        let k = Vec3R::new(1.0, 0.0, 0.0);
        let t = polarization_triad(&k).unwrap();
        assert!((t.l1 - Vec3R::new(0.0, 0.0, -1.0)).norm() < 1e-16);
        assert!((t.l2 - Vec3R::y()).norm() < 1e-16);
        let lhs = to_complex(&k).cross(&t.e) * C64::new(0.0, 1.0);
        assert!((lhs - t.e * C64::new(k.norm(), 0.0)).norm() < 1e-15);
        assert!(polarization_triad(&Vec3R::zeros()).is_err());
    }

    #[test]
    fn berry_connection_closed_form_values() {
        // equator: cot θ = 0
        let a = berry_connection(&Vec3R::new(0.3, -1.1, 0.0)).unwrap();
        assert!(a.norm() < 1e-16);
        // θ = π/4, φ = 0, |k| = √2: α = −1/√2 ŷ
        let a = berry_connection(&Vec3R::new(1.0, 0.0, 1.0)).unwrap();
        assert!((a - Vec3R::new(0.0, -FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!(matches!(berry_connection(&Vec3R::new(1e-9, 0.0, 1.0)), Err(Error::GaugeSingularity(_))));
        assert!(matches!(berry_connection(&Vec3R::new(0.0, 1e-8, -3.0)), Err(Error::GaugeSingularity(_))));
    }

    #[test]
    fn spectrum_rejects_dc_and_bad_helicity() {
        let g = GridSpec::cubic(4, 1.0).unwrap();
        let mut s = HelicitySpectrum::zeros(g);
        assert!(s.set(0, 1, C64::new(1.0, 0.0)).is_err());
        assert!(s.set(3, 0, C64::new(1.0, 0.0)).is_err());
        assert!(s.set(3, -1, C64::new(1.0, 0.0)).is_ok());
        assert_eq!(s.get(3, -1), C64::new(1.0, 0.0));
    }
}
