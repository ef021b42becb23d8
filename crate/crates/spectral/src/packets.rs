//! Named initial states: helicity plane waves and curl-of-Gaussian packets.

use field_core::{to_complex, Result, Vec3C, Vec3R, C64};

use crate::field::SixField;
use crate::grid::GridSpec;
use crate::helicity::polarization_triad;

/// Minimum-image displacement r − c on the periodic box.
pub fn wrap_displacement(spec: &GridSpec, r: &Vec3R, c: &Vec3R) -> Vec3R {
    Vec3R::from_fn(|a, _| {
        let l = spec.length[a];
        let d = r[a] - c[a];
        d - l * (d / l).round()
    })
}

/// Helicity plane wave at mode numbers `m`: upper e(k)e^{ik·r} for λ = +1, lower e*(k)e^{ik·r} for λ = −1.
pub fn helicity_plane_wave(spec: &GridSpec, m: [i64; 3], lambda: i32, amplitude: C64) -> Result<SixField> {
    let idx = spec.index_of_modes(m);
    let k = spec.wavevector(idx);
    let t = polarization_triad(&k)?;
    let pol = t.e_lambda(lambda);
    Ok(SixField::from_fn(*spec, |i| {
        let v = pol * (amplitude * C64::from_polar(1.0, k.dot(&spec.position(i))));
        if lambda > 0 {
            field_core::SixVector::new(v, Vec3C::zeros())
        } else {
            field_core::SixVector::new(Vec3C::zeros(), v)
        }
    }))
}

/// Vector potential A = pol·exp(−|r−c|²/2w²)·e^{ik₀·r}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianPacket {
    pub center: Vec3R,
    pub width: f64,
    pub k0: Vec3R,
    pub pol: Vec3C,
}

/// ∇×A for a Gaussian vector potential, evaluated analytically on the lattice (divergence-free).
pub fn curl_gaussian(spec: &GridSpec, p: &GaussianPacket) -> Vec<Vec3C> {
    (0..spec.len())
        .map(|i| {
            let r = spec.position(i);
            let d = wrap_displacement(spec, &r, &p.center);
            let g = (-d.norm_squared() / (2.0 * p.width * p.width)).exp();
            let ph = C64::from_polar(g, p.k0.dot(&r));
            let grad = to_complex(&p.k0) * C64::new(0.0, 1.0) - to_complex(&(d / (p.width * p.width)));
            grad.cross(&p.pol) * ph
        })
        .collect()
}

/// Six-field with independent curl-Gaussian packets in each block.
pub fn packet_field(spec: &GridSpec, upper: &GaussianPacket, lower: Option<&GaussianPacket>) -> SixField {
    let u = curl_gaussian(spec, upper);
    let l = match lower {
        Some(p) => curl_gaussian(spec, p),
        None => vec![Vec3C::zeros(); spec.len()],
    };
    SixField::from_blocks(*spec, &u, &l).expect("lengths follow the grid")
}

/// Zero every mode with |m_a| > n_a/3 on some axis.
pub fn band_limit_two_thirds(field: &SixField) -> SixField {
    let spec = field.spec;
    field.k_map(|i, u, l| if spec.in_lower_two_thirds(i) { (*u, *l) } else { (Vec3C::zeros(), Vec3C::zeros()) })
}
