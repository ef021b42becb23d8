use std::num::NonZeroUsize;

use field_core::special;
use field_core::{Error, Result, Vec3C, C64};
use gauss_quad::GaussLegendre;

/// K_{iκ}(x) = ∫₀^∞ e^{−x cosh t} cos(κt) dt for x > 0. Even in κ.
pub fn macdonald_imag(kappa: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() || !kappa.is_finite() {
        return Err(Error::Domain(format!("K_iκ(x) needs finite κ and x > 0, got κ = {kappa}, x = {x}")));
    }
    Ok(special::macdonald_imag(kappa, x))
}

/// Eigenfunction of K_z with eigenvalue κ and transverse momentum (k_x, k_y), upper block:
/// Ψ = e^{i(k_x x + k_y y)}(ψ_x, ψ_y, ψ_z)(z) on z > 0 with ψ_z = K_{iκ}(k⊥z).
/// The lower block solves the same equations with κ → −κ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoostEigenfunction {
    pub kappa: f64,
    pub kx: f64,
    pub ky: f64,
}

pub fn boost_eigenfunction(kappa: f64, kx: f64, ky: f64) -> Result<BoostEigenfunction> {
    let kp = kx.hypot(ky);
    if !(kp > 0.0) || !kp.is_finite() || !kappa.is_finite() {
        return Err(Error::DegenerateTransverse(format!("k⊥ = {kp} (k_x = {kx}, k_y = {ky}); the profile needs k⊥ > 0")));
    }
    Ok(BoostEigenfunction { kappa, kx, ky })
}

fn positive(z: f64) -> Result<()> {
    if z > 0.0 && z.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("boost eigenfunctions are evaluated on z > 0, got z = {z}")))
    }
}

impl BoostEigenfunction {
    pub fn k_perp(&self) -> f64 {
        self.kx.hypot(self.ky)
    }

    pub fn psi_z(&self, z: f64) -> Result<f64> {
        positive(z)?;
        Ok(special::macdonald_imag(self.kappa, self.k_perp() * z))
    }

    /// (ψ_z, ψ_z′, ψ_z″), derivatives from differentiating under the integral.
    pub fn psi_z_jet(&self, z: f64) -> Result<[f64; 3]> {
        positive(z)?;
        let kp = self.k_perp();
        let x = kp * z;
        Ok([
            special::macdonald_imag(self.kappa, x),
            kp * special::macdonald_imag_deriv(self.kappa, x),
            kp * kp * special::macdonald_imag_deriv2(self.kappa, x),
        ])
    }

    /// (ψ_x, ψ_y, ψ_z) with ψ_x = i(k_yκψ_z/z + k_xψ_z′)/k⊥², ψ_y = i(−k_xκψ_z/z + k_yψ_z′)/k⊥².
    pub fn components(&self, z: f64) -> Result<Vec3C> {
        let [p, dp, _] = self.psi_z_jet(z)?;
        let k2 = self.k_perp().powi(2);
        let c = |a: f64, b: f64| C64::new(0.0, (a * p / z + b * dp) / k2);
        Ok(Vec3C::new(c(self.ky * self.kappa, self.kx), c(-self.kx * self.kappa, self.ky), C64::new(p, 0.0)))
    }

    /// d/dz of [`components`](Self::components).
    pub fn component_derivatives(&self, z: f64) -> Result<Vec3C> {
        let [p, dp, ddp] = self.psi_z_jet(z)?;
        let k2 = self.k_perp().powi(2);
        // d/dz [aψ/z + bψ′]
        let d = |a: f64, b: f64| C64::new(0.0, (a * (dp / z - p / (z * z)) + b * ddp) / k2);
        Ok(Vec3C::new(d(self.ky * self.kappa, self.kx), d(-self.kx * self.kappa, self.ky), C64::new(dp, 0.0)))
    }

    /// Relative residual of ∇×(zΨ) = κΨ (the upper-block form of −iρ₃(s·∇)z Ψ = κΨ) on the given z samples.
    pub fn eigen_residual(&self, zs: &[f64]) -> Result<f64> {
        let i = C64::new(0.0, 1.0);
        let (kx, ky) = (C64::new(self.kx, 0.0), C64::new(self.ky, 0.0));
        let (mut res, mut lhs, mut rhs) = (0.0, 0.0, 0.0);
        for &z in zs {
            let f = self.components(z)?;
            let df = self.component_derivatives(z)?;
            let zc = C64::new(z, 0.0);
            // (zψ)′ = ψ + zψ′
            let dzf = f + df * zc;
            let curl = Vec3C::new(i * ky * zc * f.z - dzf.y, dzf.x - i * kx * zc * f.z, i * zc * (kx * f.y - ky * f.x));
            let target = f * C64::new(self.kappa, 0.0);
            res += (curl - target).norm_squared();
            lhs += curl.norm_squared();
            rhs += target.norm_squared();
        }
        let scale = lhs.max(rhs).sqrt();
        Ok(if scale > 0.0 { res.sqrt() / scale } else { res.sqrt() })
    }

    /// |z²ψ″ + zψ′ + (κ² − k⊥²z²)ψ| with fourth-order central differences of step h, relative to the
    /// largest of the four terms.
    pub fn ode_residual(&self, z: f64, h: f64) -> Result<f64> {
        positive(z - 2.0 * h)?;
        let f = |t: f64| self.psi_z(t);
        let (m2, m1, c, p1, p2) = (f(z - 2.0 * h)?, f(z - h)?, f(z)?, f(z + h)?, f(z + 2.0 * h)?);
        let d1 = (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h);
        let d2 = (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * h * h);
        let terms = [z * z * d2, z * d1, self.kappa * self.kappa * c, -(self.k_perp() * z).powi(2) * c];
        let scale = terms.iter().fold(0.0f64, |m, t| m.max(t.abs()));
        Ok(terms.iter().sum::<f64>().abs() / scale)
    }

    /// ∫_{z_min}^{z_max} |ψ(z)|² dz (per unit transverse area), Gauss–Legendre on log-spaced panels.
    pub fn z_norm(&self, z_min: f64, z_max: f64) -> Result<f64> {
        positive(z_min)?;
        if !(z_max > z_min) {
            return Err(Error::Domain(format!("empty interval [{z_min}, {z_max}]")));
        }
        let rule = GaussLegendre::new(NonZeroUsize::new(20).expect("nonzero"));
        let panels = 16 + (z_max / z_min).log2().ceil() as usize * 4;
        let (la, lb) = (z_min.ln(), z_max.ln());
        let h = (lb - la) / panels as f64;
        let mut acc = 0.0;
        let mut err = None;
        for p in 0..panels {
            acc += rule.integrate(la + p as f64 * h, la + (p + 1) as f64 * h, |s| {
                let z = s.exp();
                match self.components(z) {
                    Ok(v) => v.norm_squared() * z,
                    Err(e) => {
                        err = Some(e);
                        0.0
                    }
                }
            });
        }
        match err {
            Some(e) => Err(e),
            None => Ok(acc),
        }
    }
}
