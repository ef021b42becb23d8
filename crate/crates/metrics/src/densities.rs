use field_core::{apply_s, norm_sqr, Error, Result, Vec3C, Vec3R, C64};
use log::warn;
use spectral::SixField;

/// Relative DC energy above which |k|^p multipliers with p < 0 refuse the input.
pub const DC_THRESHOLD: f64 = 1e-12;

/// Multiply both blocks by |k|^p per Fourier mode. For p < 0 the k = 0 mode is
/// dropped, and a DC fraction above [`DC_THRESHOLD`] is a domain error.
pub fn k_power(field: &SixField, p: f64) -> Result<SixField> {
    let spec = field.spec;
    let (u, l) = field.to_k();
    if p < 0.0 {
        let total: f64 = u.iter().chain(&l).map(norm_sqr).sum();
        let dc = norm_sqr(&u[0]) + norm_sqr(&l[0]);
        if total > 0.0 && dc > DC_THRESHOLD * total {
            return Err(Error::Domain(format!(
                "field has DC energy fraction {:.3e}; |k|^{p} is undefined there",
                dc / total
            )));
        }
    }
    let mut nu = vec![Vec3C::zeros(); spec.len()];
    let mut nl = vec![Vec3C::zeros(); spec.len()];
    for i in 1..spec.len() {
        let f = spec.wavevector(i).norm().powf(p);
        nu[i] = u[i] * C64::new(f, 0.0);
        nl[i] = l[i] * C64::new(f, 0.0);
    }
    if p == 0.0 {
        nu[0] = u[0];
        nl[0] = l[0];
    }
    Ok(SixField::from_k(spec, &nu, &nl))
}

/// Landau–Peierls function Φ = (−Δ)^{−1/4}Ψ, so that ∫Φ₁†Φ₂ equals the energy product.
pub fn landau_peierls(psi: &SixField) -> Result<SixField> {
    k_power(psi, -0.5)
}

/// ρ_E = Ψ†Ψ/⟨E⟩ and j_E = Ψ†ρ₃sΨ/⟨E⟩ with ⟨E⟩ = ∫Ψ†Ψ.
pub fn energy_density(psi: &SixField) -> Result<(Vec<f64>, Vec<Vec3R>)> {
    let e = psi.norm_sqr();
    if !(e > 0.0) || !e.is_finite() {
        return Err(Error::UndefinedDensity(format!("total energy is {e}")));
    }
    let rho = psi.data.iter().map(|s| s.norm_sqr() / e).collect();
    let j = psi
        .data
        .iter()
        .map(|s| {
            Vec3R::from_fn(|a, _| (s.upper.dotc(&apply_s(a, &s.upper)) - s.lower.dotc(&apply_s(a, &s.lower))).re / e)
        })
        .collect();
    Ok((rho, j))
}

/// Axis-aligned box [lo, hi] in the box-centered coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub lo: Vec3R,
    pub hi: Vec3R,
}

/// p_E(Ω) = ∫_Ω Ψ†Ψ / ⟨E⟩.
///
/// Sites on a face of Ω carry weight 1/2 per axis (trapezoid), so that complementary
/// half-boxes add to 1. An axis spanning at least the box length is taken whole.
pub fn energy_probability(psi: &SixField, region: &Region) -> Result<f64> {
    let spec = psi.spec;
    let e = psi.norm_sqr();
    if !(e > 0.0) {
        return Err(Error::UndefinedDensity(format!("total energy is {e}")));
    }
    if (0..3).any(|a| !(region.hi[a] >= region.lo[a])) {
        return Err(Error::Domain(format!("region {region:?} has hi < lo")));
    }
    let d = spec.spacing();
    let face_weight = |a: usize, x: f64| -> f64 {
        let tol = 1e-9 * d[a];
        if (x - region.lo[a]).abs() <= tol || (x - region.hi[a]).abs() <= tol {
            if region.hi[a] - region.lo[a] <= tol {
                0.0
            } else {
                0.5
            }
        } else if x > region.lo[a] && x < region.hi[a] {
            1.0
        } else {
            0.0
        }
    };
    // periodic images count too: the face at −L/2 is the face at +L/2
    let axis_weight = |a: usize, x: f64| -> f64 {
        let l = spec.length[a];
        if region.hi[a] - region.lo[a] >= l {
            return 1.0;
        }
        (face_weight(a, x - l) + face_weight(a, x) + face_weight(a, x + l)).min(1.0)
    };
    let mut acc = 0.0;
    let mut any = false;
    for (i, s) in psi.data.iter().enumerate() {
        let r = spec.position(i);
        let w = axis_weight(0, r.x) * axis_weight(1, r.y) * axis_weight(2, r.z);
        if w > 0.0 {
            any = true;
            acc += w * s.norm_sqr();
        }
    }
    if !any {
        warn!("region {region:?} contains no lattice sites");
        return Ok(0.0);
    }
    Ok(acc * spec.cell_volume() / e)
}
