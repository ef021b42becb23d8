use nalgebra::Rotation3;

use crate::error::{Error, Result};
use crate::types::{dot_u, norm_sqr, to_complex, FieldInvariants, RSPair, SixVector, Vec3C, Vec3R, C64};

pub fn rs_from_fields(d: &Vec3R, b: &Vec3R, eps: f64, mu: f64) -> Result<RSPair> {
    if !(eps > 0.0) || !(mu > 0.0) {
        return Err(Error::Domain(format!("eps and mu must be positive, got eps={eps}, mu={mu}")));
    }
    let a = 1.0 / (2.0 * eps).sqrt();
    let bb = 1.0 / (2.0 * mu).sqrt();
    let f_plus = Vec3C::from_fn(|i, _| C64::new(d[i] * a, b[i] * bb));
    Ok(RSPair { f_plus, f_minus: f_plus.map(|z| z.conj()) })
}

/// Inverse of [`rs_from_fields`]; requires f₋ = conj(f₊).
pub fn fields_from_rs(pair: &RSPair, eps: f64, mu: f64) -> Result<(Vec3R, Vec3R)> {
    if !(eps > 0.0) || !(mu > 0.0) {
        return Err(Error::Domain(format!("eps and mu must be positive, got eps={eps}, mu={mu}")));
    }
    let scale = (norm_sqr(&pair.f_plus) + norm_sqr(&pair.f_minus)).sqrt();
    let mismatch = (pair.f_minus - pair.f_plus.map(|z| z.conj())).norm();
    if mismatch > 1e-12 * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Inconsistency(format!(
            "f_minus is not the conjugate of f_plus (mismatch {mismatch:.3e})"
        )));
    }
    let se = (2.0 * eps).sqrt();
    let sm = (2.0 * mu).sqrt();
    let d = pair.f_plus.map(|z| z.re * se);
    let b = pair.f_plus.map(|z| z.im * sm);
    Ok((d, b))
}

pub fn invariants(f: &Vec3C) -> FieldInvariants {
    let sq = dot_u(f, f);
    FieldInvariants { s_scalar: sq.re, p_pseudo: sq.im }
}

pub fn duality_rotate(f: &Vec3C, alpha: f64) -> Vec3C {
    f * C64::from_polar(1.0, alpha)
}

/// Charge conjugation ρ₁ψ*.
pub fn conjugate(psi: &SixVector) -> SixVector {
    SixVector { upper: psi.lower.map(|z| z.conj()), lower: psi.upper.map(|z| z.conj()) }
}

/// F′ = γ(F ∓ i v×F) − γ²/(γ+1) v(v·F); `sign = +1` for F₊, `-1` for F₋.
pub fn lorentz_boost(f: &Vec3C, v: &Vec3R, sign: i32) -> Result<Vec3C> {
    let v2 = v.norm_squared();
    if !(v2 < 1.0) {
        return Err(Error::Domain(format!("boost speed |v| = {} must be below 1", v2.sqrt())));
    }
    if sign != 1 && sign != -1 {
        return Err(Error::Domain(format!("branch sign must be +1 or -1, got {sign}")));
    }
    let gamma = 1.0 / (1.0 - v2).sqrt();
    let vc = to_complex(v);
    let cross = vc.cross(f);
    let s = C64::new(0.0, -(sign as f64));
    let vf = dot_u(&vc, f);
    Ok((f + cross * s) * C64::new(gamma, 0.0) - vc * (vf * (gamma * gamma / (gamma + 1.0))))
}

/// Rotation by the axis-angle vector (direction = axis, length = angle) applied to both blocks.
pub fn rotate(psi: &SixVector, axis_angle: &Vec3R) -> SixVector {
    let r = Rotation3::from_scaled_axis(*axis_angle);
    let m = r.matrix().map(|x| C64::new(x, 0.0));
    SixVector { upper: m * psi.upper, lower: m * psi.lower }
}
