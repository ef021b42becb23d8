use std::f64::consts::PI;
use std::num::NonZeroUsize;

use field_core::special::bessel_k;
use field_core::{Error, Result, Vec3R};
use gauss_quad::GaussLegendre;

/// Γ(1/4).
const GAMMA_QUARTER: f64 = 3.625_609_908_221_908;

/// Composite Gauss–Legendre rule: `panels` subintervals of `order` nodes on each axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KernelQuadrature {
    pub order: usize,
    pub panels: usize,
}

impl Default for KernelQuadrature {
    fn default() -> Self {
        KernelQuadrature { order: 16, panels: 8 }
    }
}

fn composite(rule: &GaussLegendre, panels: usize, a: f64, b: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let h = (b - a) / panels as f64;
    (0..panels).map(|p| rule.integrate(a + p as f64 * h, a + (p + 1) as f64 * h, &mut f)).sum()
}

/// ∫ w₁(r) |r|^{−5/2} |r − d ẑ|^{−5/2} d³r, centered on the first point, with the
/// partition of unity w₁ = |r−dẑ|⁶ / (|r|⁶ + |r−dẑ|⁶).
fn centered_piece(d: f64, q: &KernelQuadrature, rule: &GaussLegendre) -> f64 {
    let angular = |rho: f64| -> f64 {
        composite(rule, q.panels, -1.0, 1.0, |mu| {
            let d2sq = rho * rho + d * d - 2.0 * rho * d * mu;
            let d2 = d2sq.max(0.0).sqrt();
            let w1 = d2.powi(6) / (rho.powi(6) + d2.powi(6));
            w1 * d2.powf(-2.5)
        })
    };
    let r_split = 2.0 * d;
    // ρ = s² on [0, R]: ρ² ρ^{−5/2} dρ = 2 ds
    let inner = composite(rule, q.panels, 0.0, r_split.sqrt(), |s| 2.0 * angular(s * s));
    // ρ = R/t on [R, ∞): ρ^{−1/2} dρ = R^{1/2} t^{−3/2} dt
    let outer = composite(rule, q.panels, 0.0, 1.0, |t| {
        if t == 0.0 {
            return 0.0;
        }
        let rho = r_split / t;
        rho.powf(-0.5) * angular(rho) * r_split / (t * t)
    });
    2.0 * PI * (inner + outer)
}

/// lhs = (1/16π)∫|r−r₁|^{−5/2}|r−r₂|^{−5/2} d³r by quadrature, rhs = |r₁−r₂|⁻².
pub fn kernel_identity_check(r1: &Vec3R, r2: &Vec3R, quadrature: &KernelQuadrature) -> Result<(f64, f64)> {
    let d = (r1 - r2).norm();
    if !(d > 0.0) || !d.is_finite() {
        return Err(Error::SingularConfiguration(format!("points coincide or are not finite: {r1:?}, {r2:?}")));
    }
    let order = NonZeroUsize::new(quadrature.order)
        .ok_or_else(|| Error::Domain("quadrature order must be positive".into()))?;
    if quadrature.panels == 0 {
        return Err(Error::Domain("quadrature needs at least one panel".into()));
    }
    let rule = GaussLegendre::new(order);
    // the piece centered on r₂ is the mirror image of this one
    let piece = centered_piece(d, quadrature, &rule);
    Ok((2.0 * piece / (16.0 * PI), 1.0 / (d * d)))
}

/// Kernel of (k² + m²)^{−1/4}: (2^{3/4} / ((2π)^{3/2} Γ(1/4))) (m/r)^{5/4} K_{5/4}(m r).
///
/// As m → 0 it tends to π/(2πr)^{5/2}, the Landau–Peierls kernel of |k|^{−1/2}.
pub fn newton_wigner_kernel(r: f64, m: f64) -> Result<f64> {
    if !(r > 0.0) || !(m > 0.0) || !r.is_finite() || !m.is_finite() {
        return Err(Error::Domain(format!("kernel needs r > 0 and m > 0, got r = {r}, m = {m}")));
    }
    let pref = 2f64.powf(0.75) / ((2.0 * PI).powf(1.5) * GAMMA_QUARTER);
    Ok(pref * (m / r).powf(1.25) * bessel_k(1.25, m * r))
}
