use field_core::{Vec3C, Vec3R, C64};
use spectral::SixField;

/// exp(−iτ A) f for A f = i k × f. A has eigenvalues |k|, 0, −|k| and A³ = |k|²A, so
/// exp(−iτA) = 1 − i sin(τ|k|) Â + (cos(τ|k|) − 1) Â² with Â = A/|k|.
pub(crate) fn curl_exponential(k: &Vec3R, tau: f64, f: &Vec3C) -> Vec3C {
    let kn = k.norm();
    if kn == 0.0 {
        return *f;
    }
    let n = k.map(|x| C64::new(x / kn, 0.0));
    let i = C64::new(0.0, 1.0);
    let a1 = n.cross(f) * i;
    let a2 = n.cross(&a1) * i;
    let (s, c) = (tau * kn).sin_cos();
    f - a1 * (i * s) + a2 * C64::new(c - 1.0, 0.0)
}

/// Exact free evolution: i∂ₜF₊ = ∇×F₊, i∂ₜF₋ = −∇×F₋, solved mode by mode.
///
/// Uses the full lattice wave vector, so helicity modes advance by e^{∓i|k|t} exactly as in
/// `synthesize`. Longitudinal and k = 0 content is static.
pub fn propagate_free(psi: &SixField, t: f64) -> SixField {
    if t == 0.0 {
        return psi.clone();
    }
    let spec = psi.spec;
    psi.k_map(|i, u, l| {
        let k = spec.wavevector(i);
        (curl_exponential(&k, t, u), curl_exponential(&k, -t, l))
    })
}
