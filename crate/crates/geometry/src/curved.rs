use evolve::{Scheme, StepperConfig};
use field_core::{Error, Result, Vec3C, C64};
use spectral::fourier::{curl, divergence};
use spectral::SixField;

use crate::metric::MetricField;

fn check(field: &SixField, metric: &MetricField) -> Result<()> {
    if field.spec != metric.spec {
        return Err(Error::Shape(format!("field grid {:?} differs from metric grid {:?}", field.spec, metric.spec)));
    }
    Ok(())
}

/// 𝒢(𝓕) at every site.
pub fn constitutive_apply(field: &SixField, metric: &MetricField) -> Result<SixField> {
    check(field, metric)?;
    let (u, l) = metric.apply_g(&field.upper(), &field.lower());
    SixField::from_blocks(field.spec, &u, &l)
}

/// ρ₃∇×𝒢(𝓕) with spectral curl. Block diagonal for every metric.
pub fn curved_generator(field: &SixField, metric: &MetricField) -> Result<SixField> {
    check(field, metric)?;
    let spec = field.spec;
    let (u, l) = metric.apply_g(&field.upper(), &field.lower());
    let cu = curl(&spec, &u);
    let cl: Vec<Vec3C> = curl(&spec, &l).into_iter().map(|x| -x).collect();
    SixField::from_blocks(spec, &cu, &cl)
}

/// dt ≤ safety·Δ/c_max, with c_max the largest local light-speed bound.
pub fn validate_curved(cfg: &StepperConfig, metric: &MetricField) -> Result<()> {
    if cfg.scheme != Scheme::Rk4 {
        return Err(Error::Domain(format!("curved evolution supports rk4 only, not {}", cfg.scheme)));
    }
    if !(cfg.cfl_safety > 0.0 && cfg.cfl_safety <= 1.0) {
        return Err(Error::Domain(format!("CFL safety factor {} is outside (0, 1]", cfg.cfl_safety)));
    }
    if !(cfg.dt > 0.0) || !cfg.dt.is_finite() {
        return Err(Error::Domain(format!("time step {} must be positive", cfg.dt)));
    }
    let limit = cfg.cfl_safety * metric.spec.min_spacing() / metric.max_light_speed();
    if cfg.dt > limit {
        return Err(Error::Stability(format!(
            "dt = {} exceeds the CFL limit {limit:.6e} for local light speed {:.6}",
            cfg.dt,
            metric.max_light_speed()
        )));
    }
    Ok(())
}

/// Integrate i∂ₜ𝓕 = ρ₃∇×𝒢(𝓕) with RK4 for |steps| steps; negative `steps` runs backward.
pub fn step_curved(field: &SixField, metric: &MetricField, cfg: &StepperConfig, steps: i64) -> Result<SixField> {
    check(field, metric)?;
    validate_curved(cfg, metric)?;
    let dt = cfg.dt * if steps < 0 { -1.0 } else { 1.0 };
    let mi = C64::new(0.0, -1.0);
    let rhs = |x: &SixField| -> Result<SixField> { Ok(curved_generator(x, metric)?.scale(mi)) };
    let h = |a: f64| C64::new(a, 0.0);
    let mut f = field.clone();
    for _ in 0..steps.unsigned_abs() {
        let k1 = rhs(&f)?;
        let k2 = rhs(&f.axpy(h(dt / 2.0), &k1))?;
        let k3 = rhs(&f.axpy(h(dt / 2.0), &k2))?;
        let k4 = rhs(&f.axpy(h(dt), &k3))?;
        let sum = k1.add(&k4).axpy(h(2.0), &k2.add(&k3));
        f = f.axpy(h(dt / 6.0), &sum);
    }
    if !f.is_finite() {
        return Err(Error::Stability("curved evolution produced non-finite values".into()));
    }
    Ok(f)
}

/// ‖∇·𝓕‖ over both blocks, in units of ‖𝓕‖ (inverse length). Zero for a zero field.
pub fn divergence_norm(field: &SixField) -> f64 {
    let n = field.norm();
    if n == 0.0 {
        return 0.0;
    }
    let spec = field.spec;
    let s: f64 = [field.upper(), field.lower()]
        .iter()
        .flat_map(|b| divergence(&spec, b))
        .map(|z| z.norm_sqr())
        .sum();
    (s * spec.cell_volume()).sqrt() / n
}
