//! Bound photon states of an infinite step-index fiber (μ = 1 on both sides).
//!
//! In each uniform region the upper block solves ∇×f = (ω/v)f with
//! f = e^{ik_z z + iMφ}(f_ρ e_ρ + f_φ e_φ + f_z e_z) and
//!   f_z = g(ρ),  f_ρ = i(kM g/ρ + k_z g′)/k⊥²,  f_φ = −(k_z M g/ρ + k g′)/k⊥²,
//! where k = ω/v, k⊥² = k² − k_z², g = J_M(k⊥ρ) inside and g = β K_M(κρ) outside (κ² = −k⊥²).
//! The interior and exterior fields are matched at ρ = a through the two tangential
//! components f_z and f_φ, which carry the tangential magnetic field when μ is continuous.

use std::f64::consts::PI;
use std::fmt::Write as _;

use field_core::special::{bessel_j, bessel_j_deriv, bessel_k, bessel_k_deriv};
use field_core::{Error, Result, Vec3C, Vec3R, C64};
use log::warn;
use spectral::fourier::jacobian;
use spectral::{GridSpec, SixField};

use crate::roots::scan_roots;

/// Scan density used by [`fiber_modes`].
const SCAN_SAMPLES: usize = 4000;
const ROOT_TOL: f64 = 1e-13;
/// Exterior tail length required by [`fiber_mode_field`], in decay lengths.
const TAIL_DECAY_LENGTHS: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberSpec {
    /// Matching radius ρ = a.
    pub radius: f64,
    pub eps_in: f64,
    pub eps_out: f64,
    pub m_angular: i32,
    pub k_z: f64,
}

impl FiberSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.radius > 0.0) || !self.radius.is_finite() {
            return Err(Error::Domain(format!("fiber radius must be positive, got {}", self.radius)));
        }
        if !(self.eps_out > 0.0) || !(self.eps_in > self.eps_out) || !self.eps_in.is_finite() {
            return Err(Error::Domain(format!(
                "need ε_in > ε_out > 0, got ε_in = {}, ε_out = {}",
                self.eps_in, self.eps_out
            )));
        }
        if !self.k_z.is_finite() {
            return Err(Error::Domain(format!("k_z must be finite, got {}", self.k_z)));
        }
        Ok(())
    }

    /// Open bound-state window (|k_z|/√ε_in, |k_z|/√ε_out); None when it is empty (k_z = 0).
    pub fn window(&self) -> Option<(f64, f64)> {
        let kz = self.k_z.abs();
        if kz == 0.0 {
            return None;
        }
        Some((kz / self.eps_in.sqrt(), kz / self.eps_out.sqrt()))
    }

    /// (u, w) = a·(√(ε_in ω² − k_z²), √(k_z² − ε_out ω²)), after checking the window.
    fn uw(&self, omega: f64) -> Result<(f64, f64)> {
        self.validate()?;
        let (lo, hi) = self
            .window()
            .ok_or_else(|| Error::Window("k_z = 0: a bound state needs a nonvanishing k_z".into()))?;
        if !(omega > lo) {
            return Err(Error::Window(format!(
                "ω = {omega} ≤ |k_z|/√ε_in = {lo}: k⊥ is not real inside the core"
            )));
        }
        if !(omega < hi) {
            return Err(Error::Window(format!(
                "ω = {omega} ≥ |k_z|/√ε_out = {hi}: k⊥ is not imaginary outside the core"
            )));
        }
        let a = self.radius;
        let kz2 = self.k_z * self.k_z;
        Ok((a * (self.eps_in * omega * omega - kz2).sqrt(), a * (kz2 - self.eps_out * omega * omega).sqrt()))
    }
}

/// f_ρ, f_φ, f_z for profile value g, derivative g′ in a region with wave number k and signed k⊥².
fn components(spec: &FiberSpec, k: f64, kp2: f64, rho: f64, g: f64, dg: f64) -> Vec3C {
    let m = spec.m_angular as f64;
    let kz = spec.k_z;
    Vec3C::new(
        C64::new(0.0, (k * m * g / rho + kz * dg) / kp2),
        C64::new(-(kz * m * g / rho + k * dg) / kp2, 0.0),
        C64::new(g, 0.0),
    )
}

/// Radial profile (f_ρ, f_φ, f_z) at ω with exterior amplitude β relative to a unit J_M interior.
fn radial_profile(spec: &FiberSpec, omega: f64, beta: f64, rho: f64, outside: bool) -> Result<Vec3C> {
    let (u, w) = spec.uw(omega)?;
    let a = spec.radius;
    let mi = spec.m_angular;
    // the axis is approached from ρ > 0; every term is regular there
    let rho = rho.max(1e-6 * a);
    if outside {
        let kap = w / a;
        let g = beta * bessel_k(mi as f64, kap * rho);
        let dg = beta * kap * bessel_k_deriv(mi as f64, kap * rho);
        Ok(components(spec, omega * spec.eps_out.sqrt(), -kap * kap, rho, g, dg))
    } else {
        let kp = u / a;
        let g = bessel_j(mi, kp * rho);
        let dg = kp * bessel_j_deriv(mi, kp * rho);
        Ok(components(spec, omega * spec.eps_in.sqrt(), kp * kp, rho, g, dg))
    }
}

/// Matching determinant for the interior J_M and exterior K_M amplitudes from continuity of f_z
/// and f_φ at ρ = a, scaled by u²w² so that it stays finite across the window.
pub fn fiber_matching_determinant(spec: &FiberSpec, omega: f64) -> Result<f64> {
    let (u, w) = spec.uw(omega)?;
    let inner = radial_profile(spec, omega, 1.0, spec.radius, false)?;
    let outer = radial_profile(spec, omega, 1.0, spec.radius, true)?;
    // columns: interior and exterior amplitude; rows: f_z, f_φ
    let det = inner.z.re * (-outer.y.re) - (-outer.z.re) * inner.y.re;
    Ok(det * u * u * w * w / spec.radius.powi(2))
}

/// Step-index HE/EH characteristic function, in the pole-free form
/// (J′wK + K′uJ)(ε_in J′wK + ε_out K′uJ) − M²(k_z/ω)²((u² + w²)/(uw))² J²K².
/// Used only as a cross-scan next to [`fiber_matching_determinant`].
pub fn classical_dispersion_determinant(spec: &FiberSpec, omega: f64) -> Result<f64> {
    let (u, w) = spec.uw(omega)?;
    let mi = spec.m_angular;
    let (j, dj) = (bessel_j(mi, u), bessel_j_deriv(mi, u));
    let (k, dk) = (bessel_k(mi as f64, w), bessel_k_deriv(mi as f64, w));
    let a = dj * w * k + dk * u * j;
    let b = spec.eps_in * dj * w * k + spec.eps_out * dk * u * j;
    let m = mi as f64;
    let c = m * m * (spec.k_z / omega).powi(2) * ((u * u + w * w) / (u * w)).powi(2) * j * j * k * k;
    Ok(a * b - c)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialSample {
    pub rho: f64,
    /// (f_ρ, f_φ, f_z)
    pub f: Vec3C,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiberMode {
    pub omega: f64,
    /// Exterior K_M amplitude relative to the unit interior J_M amplitude.
    pub amp_ratio: C64,
    pub k_perp_in: f64,
    pub kappa_out: f64,
    pub profile: Vec<RadialSample>,
}

impl FiberMode {
    /// (f_ρ, f_φ, f_z) at radius ρ.
    pub fn radial(&self, spec: &FiberSpec, rho: f64) -> Result<Vec3C> {
        radial_profile(spec, self.omega, self.amp_ratio.re, rho, rho > spec.radius)
    }

    pub fn decay_length(&self) -> f64 {
        1.0 / self.kappa_out
    }
}

fn build_mode(spec: &FiberSpec, omega: f64) -> Result<FiberMode> {
    let (u, w) = spec.uw(omega)?;
    let a = spec.radius;
    let mi = spec.m_angular;
    // f_z continuity fixes the ratio; f_φ continuity holds at the root
    let beta = bessel_j(mi, u) / bessel_k(mi as f64, w);
    let mut mode = FiberMode {
        omega,
        amp_ratio: C64::new(beta, 0.0),
        k_perp_in: u / a,
        kappa_out: w / a,
        profile: Vec::new(),
    };
    let n = 161;
    for s in 0..n {
        let rho = 4.0 * a * s as f64 / (n - 1) as f64;
        mode.profile.push(RadialSample { rho, f: mode.radial(spec, rho)? });
    }
    Ok(mode)
}

/// Bound modes in `window` (defaults to the full bound-state window), ascending in ω.
/// An empty window (k_z = 0) or a window without sign changes gives an empty list.
pub fn fiber_modes(spec: &FiberSpec, window: Option<(f64, f64)>, max_modes: usize) -> Result<Vec<FiberMode>> {
    spec.validate()?;
    let Some((lo, hi)) = spec.window() else {
        return Ok(Vec::new());
    };
    let (wlo, whi) = window.unwrap_or((lo, hi));
    if wlo < lo || whi > hi || !(whi > wlo) {
        return Err(Error::Window(format!("requested window ({wlo}, {whi}) is not inside the bound window ({lo}, {hi})")));
    }
    let margin = 1e-9 * whi;
    let (s0, s1) = (wlo.max(lo + margin), whi.min(hi - margin));
    let f = |om: f64| fiber_matching_determinant(spec, om).unwrap_or(f64::NAN);
    scan_roots(f, s0, s1, SCAN_SAMPLES, ROOT_TOL)
        .into_iter()
        .take(max_modes)
        .map(|om| build_mode(spec, om))
        .collect()
}

/// max(|Δf_z|, |Δf_φ|) across ρ = a, relative to the largest component there.
pub fn interface_jump(spec: &FiberSpec, mode: &FiberMode) -> Result<f64> {
    let a = spec.radius;
    let inner = radial_profile(spec, mode.omega, mode.amp_ratio.re, a, false)?;
    let outer = radial_profile(spec, mode.omega, mode.amp_ratio.re, a, true)?;
    let scale = inner.iter().chain(outer.iter()).map(|z| z.norm()).fold(0.0, f64::max);
    Ok((inner.z - outer.z).norm().max((inner.y - outer.y).norm()) / scale)
}

/// Secant slope of ln|f_z| between two exterior radii.
pub fn exterior_log_slope(spec: &FiberSpec, mode: &FiberMode, r1: f64, r2: f64) -> Result<f64> {
    if !(r1 > spec.radius && r2 > r1) {
        return Err(Error::Domain(format!("need a < r1 < r2, got a = {}, r1 = {r1}, r2 = {r2}", spec.radius)));
    }
    let f1 = mode.radial(spec, r1)?.z.norm();
    let f2 = mode.radial(spec, r2)?.z.norm();
    Ok((f2.ln() - f1.ln()) / (r2 - r1))
}

/// Comma-separated mode table with columns M, k_z, omega, decay_length.
pub fn mode_table_csv(spec: &FiberSpec, modes: &[FiberMode]) -> String {
    let mut s = String::from("M,k_z,omega,decay_length\n");
    for m in modes {
        let _ = writeln!(s, "{},{},{:.15e},{:.15e}", spec.m_angular, spec.k_z, m.omega, m.decay_length());
    }
    s
}

/// Cartesian upper-block field e^{ik_z z + iMφ}(f_ρ e_ρ + f_φ e_φ + f_z e_z) at a point.
fn mode_value(spec: &FiberSpec, mode: &FiberMode, r: &Vec3R) -> Result<Vec3C> {
    let rho = r.x.hypot(r.y);
    let phi = if rho > 0.0 { r.y.atan2(r.x) } else { 0.0 };
    let f = mode.radial(spec, rho)?;
    let (s, c) = phi.sin_cos();
    let e_rho = Vec3C::new(C64::new(c, 0.0), C64::new(s, 0.0), C64::new(0.0, 0.0));
    let e_phi = Vec3C::new(C64::new(-s, 0.0), C64::new(c, 0.0), C64::new(0.0, 0.0));
    let e_z = Vec3C::new(C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0));
    let ph = C64::from_polar(1.0, spec.k_z * r.z + spec.m_angular as f64 * phi);
    Ok((e_rho * f.x + e_phi * f.y + e_z * f.z) * ph)
}

fn check_box(spec: &FiberSpec, mode: &FiberMode, grid: &GridSpec) -> Result<()> {
    let need = spec.radius + TAIL_DECAY_LENGTHS * mode.decay_length();
    let half = 0.5 * grid.length[0].min(grid.length[1]);
    if half < need {
        return Err(Error::Truncation(format!(
            "transverse half-width {half} is below a + {TAIL_DECAY_LENGTHS} decay lengths = {need}"
        )));
    }
    let periods = spec.k_z * grid.length[2] / (2.0 * PI);
    if (periods - periods.round()).abs() > 1e-9 {
        warn!("k_z·L_z/2π = {periods} is not an integer; the sampled mode is not periodic along z");
    }
    Ok(())
}

/// Sample the mode onto the grid as an upper-block field (lower block zero).
pub fn fiber_mode_field(mode: &FiberMode, spec: &FiberSpec, grid: &GridSpec) -> Result<SixField> {
    spec.validate()?;
    check_box(spec, mode, grid)?;
    let mut u = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        u.push(mode_value(spec, mode, &grid.position(i))?);
    }
    SixField::from_blocks(*grid, &u, &vec![Vec3C::zeros(); grid.len()])
}

/// Relative residuals of the three eigenvalue equations and of ∇·f = 0 for a sampled mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberResiduals {
    /// ‖(−i∂_z − k_z)ψ‖/(|k_z|‖ψ‖) with the spectral z-derivative, whole grid.
    pub eigen1: f64,
    /// ‖(−i∂_φ + s_z − M)ψ‖/(max(|M|,1)‖ψ‖), sites outside the interface shell.
    pub eigen2: f64,
    /// ‖(∇× − ω/v)ψ‖/‖(ω/v)ψ‖, sites outside the interface shell.
    pub eigen3: f64,
    /// ‖∇·ψ‖/‖ψ‖, sites outside the interface shell.
    pub divergence: f64,
    /// Number of sites outside the shell.
    pub sites: usize,
}

/// Residuals of the sampled mode. Away from ρ = a (a shell 2Δ thick is skipped) the operators act
/// on the analytic mode through sixth-order central differences of step 1e-3·a.
pub fn fiber_mode_residuals(mode: &FiberMode, spec: &FiberSpec, grid: &GridSpec) -> Result<FiberResiduals> {
    let field = fiber_mode_field(mode, spec, grid)?;
    let psi = field.upper();
    let dz = &jacobian(grid, &psi)[2];
    let mi = C64::new(0.0, -1.0);
    let kz = C64::new(spec.k_z, 0.0);
    let (mut r1, mut n1) = (0.0, 0.0);
    for (p, d) in psi.iter().zip(dz) {
        r1 += (d * mi - p * kz).norm_squared();
        n1 += p.norm_squared();
    }
    let eigen1 = (r1 / n1).sqrt() / spec.k_z.abs().max(f64::MIN_POSITIVE);

    let a = spec.radius;
    let shell = 2.0 * grid.min_spacing();
    let h = 1e-3 * a;
    let weights = [(1, 45.0), (2, -9.0), (3, 1.0)];
    let i = C64::new(0.0, 1.0);
    let m = spec.m_angular as f64;
    let (mut e2, mut e3, mut dv, mut nn, mut sites) = (0.0, 0.0, 0.0, 0.0, 0usize);
    for idx in 0..grid.len() {
        let r = grid.position(idx);
        let rho = r.x.hypot(r.y);
        if (rho - a).abs() <= shell {
            continue;
        }
        let f = mode_value(spec, mode, &r)?;
        let mut jac = [Vec3C::zeros(); 3];
        for (ax, j) in jac.iter_mut().enumerate() {
            for &(s, w) in &weights {
                let mut rp = r;
                let mut rm = r;
                rp[ax] += s as f64 * h;
                rm[ax] -= s as f64 * h;
                *j += (mode_value(spec, mode, &rp)? - mode_value(spec, mode, &rm)?) * C64::new(w / (60.0 * h), 0.0);
            }
        }
        let curl = Vec3C::new(jac[1].z - jac[2].y, jac[2].x - jac[0].z, jac[0].y - jac[1].x);
        let div = jac[0].x + jac[1].y + jac[2].z;
        let eps = if rho < a { spec.eps_in } else { spec.eps_out };
        let k = C64::new(mode.omega * eps.sqrt(), 0.0);
        // −i∂_φ = −i(x∂_y − y∂_x); s_z f = i e_z × f
        let lz = (jac[1] * C64::new(r.x, 0.0) - jac[0] * C64::new(r.y, 0.0)) * mi;
        let sz = Vec3C::new(-i * f.y, i * f.x, C64::new(0.0, 0.0));
        e2 += (lz + sz - f * C64::new(m, 0.0)).norm_squared();
        e3 += (curl - f * k).norm_squared() / k.norm_sqr();
        dv += div.norm_sqr();
        nn += f.norm_squared();
        sites += 1;
    }
    if sites == 0 || nn == 0.0 {
        return Err(Error::Truncation("no grid sites outside the interface shell carry the mode".into()));
    }
    Ok(FiberResiduals {
        eigen1,
        eigen2: (e2 / nn).sqrt() / m.abs().max(1.0),
        eigen3: (e3 / nn).sqrt(),
        divergence: (dv / nn).sqrt(),
        sites,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(m: i32, kz: f64) -> FiberSpec {
        FiberSpec { radius: 1.0, eps_in: 2.25, eps_out: 1.0, m_angular: m, k_z: kz }
    }

    #[test]
    fn window_errors_name_the_bound() {
        let s = spec(0, 5.0);
        let (lo, hi) = s.window().unwrap();
        assert!((lo - 5.0 / 1.5).abs() < 1e-15 && hi == 5.0);
        match fiber_matching_determinant(&s, 3.0) {
            Err(Error::Window(msg)) => assert!(msg.contains("inside")),
            other => panic!("{other:?}"),
        }
        match fiber_matching_determinant(&s, 5.5) {
            Err(Error::Window(msg)) => assert!(msg.contains("outside")),
            other => panic!("{other:?}"),
        }
        assert!(fiber_matching_determinant(&s, 4.0).unwrap().is_finite());
        assert!(spec(0, 0.0).window().is_none());
        let bad = FiberSpec { eps_in: 1.0, ..s };
        assert!(matches!(bad.validate(), Err(Error::Domain(_))));
    }

    #[test]
    fn profile_is_regular_on_the_axis() {
        // the (x − iy) circular component must vanish at ρ = 0 for M = 1
        let s = spec(1, 5.0);
        let m = &fiber_modes(&s, None, 1).unwrap()[0];
        let f = m.radial(&s, 0.0).unwrap();
        assert!((f.x + C64::new(0.0, 1.0) * f.y).norm() < 1e-9 * f.norm(), "{f:?} {}", m.omega);
    }
}
