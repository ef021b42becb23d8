//! One function per scenario kind. Each returns its artifacts in memory so that nothing is
//! written when a precondition fails part-way.

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use eigen::{boost_eigenfunction, fiber_modes, interface_jump, mode_table_csv, FiberSpec};
use evolve::{propagate_free, step_medium, MediumMap, Scheme, StepperConfig};
use field_core::C64;
use geometry::{divergence_norm, step_curved, validate_curved, MetricField};
use metrics::{
    classical_observables, commutator_residual, observables_coordinate, observables_momentum, scalar_product_coordinate,
    GeneratorTag, Observables, ProductMethod,
};
use phasespace::{
    hydro_from_field, hydro_identity_residuals, quantization_integral, quarter_band_limit, wigner_build,
    wigner_decompose, wigner_fiber, wigner_subsidiary_residual, LatticePatch,
};
use spectral::{decompose, positive_frequency_project, GridSpec, SixField};

use crate::config::{ensure, Config};
use crate::error::{CliError, CliResult};
use crate::gridfile::GridFile;
use crate::state::state_from_config;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    EvolveFree,
    EvolveMedium,
    EvolveCurved,
    FiberModes,
    BoostEigen,
    Wigner,
    Hydro,
    Observables,
    Commutators,
}

impl Kind {
    pub const ALL: [Kind; 9] = [
        Kind::EvolveFree,
        Kind::EvolveMedium,
        Kind::EvolveCurved,
        Kind::FiberModes,
        Kind::BoostEigen,
        Kind::Wigner,
        Kind::Hydro,
        Kind::Observables,
        Kind::Commutators,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Kind::EvolveFree => "evolve-free",
            Kind::EvolveMedium => "evolve-medium",
            Kind::EvolveCurved => "evolve-curved",
            Kind::FiberModes => "fiber-modes",
            Kind::BoostEigen => "boost-eigen",
            Kind::Wigner => "wigner",
            Kind::Hydro => "hydro",
            Kind::Observables => "observables",
            Kind::Commutators => "commutators",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Kind::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| format!("unknown scenario kind '{s}'"))
    }
}

/// A named check reported in the summary and the manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn new(name: &str, value: f64, tolerance: f64) -> Self {
        Check { name: name.to_string(), value, tolerance }
    }

    pub fn pass(&self) -> bool {
        self.value <= self.tolerance
    }
}

#[derive(Debug, Default)]
pub struct Outcome {
    /// (file name, contents), written in order.
    pub artifacts: Vec<(String, Vec<u8>)>,
    pub checks: Vec<Check>,
    pub summary: Vec<String>,
    pub inputs: Vec<PathBuf>,
}

/// Optional SI scaling applied to CSV outputs only; lengths are then read as metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Units {
    pub hbar: f64,
    pub c: f64,
    pub eps0: f64,
}

impl Units {
    pub fn from_config(cfg: &Config) -> CliResult<Option<Units>> {
        let h: Option<f64> = cfg.get("units", "hbar_si")?;
        let c: Option<f64> = cfg.get("units", "c_si")?;
        let e: Option<f64> = cfg.get("units", "eps0_si")?;
        if h.is_none() && c.is_none() && e.is_none() {
            return Ok(None);
        }
        let u = Units { hbar: h.unwrap_or(1.054_571_817e-34), c: c.unwrap_or(299_792_458.0), eps0: e.unwrap_or(8.854_187_812_8e-12) };
        for (k, v) in [("hbar_si", u.hbar), ("c_si", u.c), ("eps0_si", u.eps0)] {
            ensure(cfg, "units", k, v > 0.0 && v.is_finite(), "must be positive")?;
        }
        Ok(Some(u))
    }

    fn time(&self) -> f64 {
        1.0 / self.c
    }

    fn energy(&self) -> f64 {
        self.hbar * self.c
    }
}

pub struct Context<'a> {
    pub cfg: &'a Config,
    pub base: &'a Path,
    pub seed: u64,
    pub units: Option<Units>,
    pub verbose: bool,
}

impl Context<'_> {
    fn log(&self, msg: impl AsRef<str>) {
        if self.verbose {
            eprintln!("pwfn: {}", msg.as_ref());
        }
    }
}

fn e(x: f64) -> String {
    format!("{x:.15e}")
}

fn csv_line(cols: &[String]) -> String {
    let mut s = cols.join(",");
    s.push('\n');
    s
}

pub fn run_kind(kind: Kind, ctx: &Context) -> CliResult<Outcome> {
    match kind {
        Kind::EvolveFree => evolve_free(ctx),
        Kind::EvolveMedium => evolve_medium(ctx),
        Kind::EvolveCurved => evolve_curved(ctx),
        Kind::FiberModes => fiber(ctx),
        Kind::BoostEigen => boost(ctx),
        Kind::Wigner => wigner(ctx),
        Kind::Hydro => hydro(ctx),
        Kind::Observables => observables(ctx),
        Kind::Commutators => commutators(ctx),
    }
}

struct Schedule {
    dt: f64,
    steps: u64,
    every: u64,
}

fn schedule(cfg: &Config) -> CliResult<Schedule> {
    let dt: f64 = cfg.require("evolve", "dt")?;
    let steps: u64 = cfg.require("evolve", "steps")?;
    let every: u64 = cfg.get_or("evolve", "sample_every", steps.clamp(1, 10))?;
    ensure(cfg, "evolve", "dt", dt > 0.0 && dt.is_finite(), "must be positive")?;
    ensure(cfg, "evolve", "steps", steps >= 1, "must be at least 1")?;
    ensure(cfg, "evolve", "sample_every", every >= 1 && every <= steps, "must be in 1..=steps")?;
    Ok(Schedule { dt, steps, every })
}

fn stepper(cfg: &Config, dt: f64) -> CliResult<StepperConfig> {
    let scheme: Scheme = cfg
        .str_or("evolve", "scheme", "rk4")
        .parse()
        .map_err(|e: field_core::Error| CliError::Config { line: cfg.line_of("evolve", "scheme"), msg: e.to_string() })?;
    let cfl_safety: f64 = cfg.get_or("evolve", "cfl_safety", 0.5)?;
    Ok(StepperConfig { dt, scheme, cfl_safety })
}

/// Running drift tracker: max over samples of |q − q₀|/scale.
struct Drift {
    start: Vec<f64>,
    scale: Vec<f64>,
    max: f64,
}

impl Drift {
    fn new(start: Vec<f64>, scale: Vec<f64>) -> Self {
        Drift { start, scale, max: 0.0 }
    }

    fn update(&mut self, q: &[f64]) -> f64 {
        for ((a, b), s) in q.iter().zip(&self.start).zip(&self.scale) {
            self.max = self.max.max((a - b).abs() / s);
        }
        self.max
    }
}

/// Run `advance` in chunks, sampling quantities into a CSV after each chunk.
fn sampled_run(
    ctx: &Context,
    sched: &Schedule,
    field: SixField,
    header: &[&str],
    si_header: &[(&str, f64)],
    quantities: impl Fn(&SixField) -> CliResult<Vec<f64>>,
    scales: impl Fn(&[f64]) -> Vec<f64>,
    mut advance: impl FnMut(&SixField, u64) -> CliResult<SixField>,
) -> CliResult<(SixField, String, f64)> {
    let mut csv = String::new();
    let mut cols: Vec<String> = vec!["step".into(), "t".into()];
    cols.extend(header.iter().map(|s| s.to_string()));
    cols.push("max_drift".into());
    if ctx.units.is_some() {
        cols.push("t_si".into());
        cols.extend(si_header.iter().map(|(n, _)| format!("{n}_si")));
    }
    csv.push_str(&csv_line(&cols));
    let q0 = quantities(&field)?;
    let mut drift = Drift::new(q0.clone(), scales(&q0));
    let row = |step: u64, q: &[f64], d: f64| -> String {
        let t = step as f64 * sched.dt;
        let mut c = vec![step.to_string(), e(t)];
        c.extend(q.iter().map(|&x| e(x)));
        c.push(e(d));
        if let Some(u) = ctx.units {
            c.push(e(t * u.time()));
            for (name, factor) in si_header {
                let i = header.iter().position(|h| h == name).expect("SI column names a quantity");
                c.push(e(q[i] * factor));
            }
        }
        csv_line(&c)
    };
    csv.push_str(&row(0, &q0, 0.0));
    let mut f = field;
    let mut done = 0;
    while done < sched.steps {
        let n = sched.every.min(sched.steps - done);
        f = advance(&f, n)?;
        done += n;
        let q = quantities(&f)?;
        let d = drift.update(&q);
        csv.push_str(&row(done, &q, d));
        ctx.log(format!("step {done}/{}: drift {d:.3e}", sched.steps));
    }
    Ok((f, csv, drift.max))
}

fn evolve_free(ctx: &Context) -> CliResult<Outcome> {
    let cfg = ctx.cfg;
    let st = state_from_config(cfg, ctx.base, ctx.seed)?;
    let sched = schedule(cfg)?;
    cfg.check_all_used()?;
    let spec = st.field.spec;
    let quantities = |f: &SixField| -> CliResult<Vec<f64>> {
        let a = classical_observables(&spec, &f.upper())?;
        let b = classical_observables(&spec, &f.lower())?;
        Ok(vec![a.energy, b.energy, a.momentum.x, a.momentum.y, a.momentum.z, b.momentum.x, b.momentum.y, b.momentum.z])
    };
    let kmin = 2.0 * std::f64::consts::PI / spec.length.iter().cloned().fold(0.0, f64::max);
    let scales = |q: &[f64]| {
        let n = (q[0] + q[1]).max(f64::MIN_POSITIVE);
        let p = (q[2].hypot(q[3]).hypot(q[4]) + q[5].hypot(q[6]).hypot(q[7])).max(n * kmin);
        vec![n, n, p, p, p, p, p, p]
    };
    let e_si = ctx.units.map(|u| u.energy()).unwrap_or(1.0);
    let p_si = ctx.units.map(|u| u.hbar).unwrap_or(1.0);
    let header = ["norm_plus", "norm_minus", "p_plus_x", "p_plus_y", "p_plus_z", "p_minus_x", "p_minus_y", "p_minus_z"];
    let si = [("norm_plus", e_si), ("norm_minus", e_si), ("p_plus_x", p_si), ("p_plus_y", p_si), ("p_plus_z", p_si)];
    let (f, csv, drift) = sampled_run(ctx, &sched, st.field, &header, &si, quantities, scales, |f, n| {
        Ok(propagate_free(f, n as f64 * sched.dt))
    })?;
    Ok(Outcome {
        artifacts: vec![("field.pwfn".into(), GridFile::from_six(&f).encode()), ("conserved.csv".into(), csv.into_bytes())],
        checks: vec![Check::new("free evolution conserved-quantity drift", drift, 1e-10)],
        summary: vec![format!("evolved {} steps of dt = {} exactly per mode", sched.steps, sched.dt)],
        inputs: st.inputs,
    })
}

fn medium_from_config(cfg: &Config, spec: GridSpec) -> CliResult<MediumMap> {
    let eps: f64 = cfg.get_or("medium", "eps", 1.0)?;
    let mu: f64 = cfg.get_or("medium", "mu", 1.0)?;
    let ea: f64 = cfg.get_or("medium", "eps_amp", 0.0)?;
    let ma: f64 = cfg.get_or("medium", "mu_amp", 0.0)?;
    ensure(cfg, "medium", "eps", eps > 0.0, "must be positive")?;
    ensure(cfg, "medium", "mu", mu > 0.0, "must be positive")?;
    ensure(cfg, "medium", "eps_amp", ea.abs() < 1.0, "must satisfy |eps_amp| < 1")?;
    ensure(cfg, "medium", "mu_amp", ma.abs() < 1.0, "must satisfy |mu_amp| < 1")?;
    let (wx, wy) = (2.0 * std::f64::consts::PI / spec.length[0], 2.0 * std::f64::consts::PI / spec.length[1]);
    Ok(MediumMap::from_fn(spec, |r| (eps * (1.0 + ea * (wx * r.x).cos()), mu * (1.0 + ma * (wy * r.y).cos())))?)
}

fn evolve_medium(ctx: &Context) -> CliResult<Outcome> {
    let cfg = ctx.cfg;
    let st = state_from_config(cfg, ctx.base, ctx.seed)?;
    let sched = schedule(cfg)?;
    let scfg = stepper(cfg, sched.dt)?;
    let medium = medium_from_config(cfg, st.field.spec)?;
    cfg.check_all_used()?;
    scfg.validate(&medium)?;
    let quantities = |f: &SixField| -> CliResult<Vec<f64>> {
        let up: f64 = f.data.iter().map(|s| s.upper.norm_squared()).sum::<f64>() * f.spec.cell_volume();
        let lo: f64 = f.data.iter().map(|s| s.lower.norm_squared()).sum::<f64>() * f.spec.cell_volume();
        Ok(vec![up + lo, up, lo])
    };
    let scales = |q: &[f64]| vec![q[0].max(f64::MIN_POSITIVE), f64::INFINITY, f64::INFINITY];
    let e_si = ctx.units.map(|u| u.energy()).unwrap_or(1.0);
    let (f, csv, drift) = sampled_run(ctx, &sched, st.field, &["norm", "norm_plus", "norm_minus"], &[("norm", e_si)], quantities, scales, |f, n| {
        Ok(step_medium(f, &medium, &scfg, n as i64)?)
    })?;
    Ok(Outcome {
        artifacts: vec![("field.pwfn".into(), GridFile::from_six(&f).encode()), ("conserved.csv".into(), csv.into_bytes())],
        checks: vec![Check::new("medium evolution norm drift", drift, 1e-8 * (sched.steps as f64 / 1000.0).max(1.0))],
        summary: vec![format!("evolved {} {} steps of dt = {} in a medium with max v = {:.6}", sched.steps, scfg.scheme, sched.dt, medium.max_v())],
        inputs: st.inputs,
    })
}

fn metric_from_config(cfg: &Config, spec: GridSpec, base: &Path, inputs: &mut Vec<PathBuf>) -> CliResult<MetricField> {
    match cfg.str_or("metric", "preset", "minkowski") {
        "minkowski" => Ok(MetricField::minkowski(spec)),
        "optical" | "conformal" => {
            let v0: f64 = cfg.get_or("metric", "v0", 1.0)?;
            let va: f64 = cfg.get_or("metric", "v_amp", 0.0)?;
            ensure(cfg, "metric", "v0", v0 > 0.0, "must be positive")?;
            ensure(cfg, "metric", "v_amp", va.abs() < 1.0, "must satisfy |v_amp| < 1")?;
            let w = 2.0 * std::f64::consts::PI / spec.length[0];
            let v: Vec<f64> = (0..spec.len()).map(|i| v0 * (1.0 + va * (w * spec.position(i).x).cos())).collect();
            Ok(MetricField::optical(spec, &v)?)
        }
        "table" => {
            let rel: String = cfg.require("metric", "path")?;
            let path = base.join(rel);
            let text = std::fs::read_to_string(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            inputs.push(path);
            Ok(MetricField::parse_table(spec, &text)?)
        }
        other => Err(CliError::Config {
            line: cfg.line_of("metric", "preset"),
            msg: format!("metric.preset '{other}' is not one of minkowski, optical, table"),
        }),
    }
}

fn curved_energy(f: &SixField, m: &MetricField) -> f64 {
    let s: f64 = f
        .data
        .iter()
        .zip(&m.points)
        .map(|(x, p)| {
            let g = p.g_matrix();
            x.upper.dotc(&(g * x.upper)).re + x.lower.dotc(&(g.conjugate() * x.lower)).re
        })
        .sum();
    s * f.spec.cell_volume()
}

fn evolve_curved(ctx: &Context) -> CliResult<Outcome> {
    let cfg = ctx.cfg;
    let mut st = state_from_config(cfg, ctx.base, ctx.seed)?;
    let sched = schedule(cfg)?;
    let scfg = stepper(cfg, sched.dt)?;
    let metric = metric_from_config(cfg, st.field.spec, ctx.base, &mut st.inputs)?;
    cfg.check_all_used()?;
    validate_curved(&scfg, &metric)?;
    let d0 = divergence_norm(&st.field);
    let quantities = |f: &SixField| -> CliResult<Vec<f64>> { Ok(vec![curved_energy(f, &metric), divergence_norm(f)]) };
    let scales = |q: &[f64]| vec![q[0].abs().max(f64::MIN_POSITIVE), f64::INFINITY];
    let e_si = ctx.units.map(|u| u.energy()).unwrap_or(1.0);
    let (f, csv, drift) = sampled_run(ctx, &sched, st.field, &["energy", "divergence"], &[("energy", e_si)], quantities, scales, |f, n| {
        Ok(step_curved(f, &metric, &scfg, n as i64)?)
    })?;
    let d1 = divergence_norm(&f);
    Ok(Outcome {
        artifacts: vec![("field.pwfn".into(), GridFile::from_six(&f).encode()), ("conserved.csv".into(), csv.into_bytes())],
        checks: vec![
            Check::new("curved evolution energy drift", drift, 1e-6),
            Check::new("divergence growth factor", d1 / d0.max(1e-14), 10.0),
        ],
        summary: vec![format!("evolved {} rk4 steps of dt = {} with max light speed {:.6}", sched.steps, sched.dt, metric.max_light_speed())],
        inputs: st.inputs,
    })
}

fn fiber(ctx: &Context) -> CliResult<Outcome> {
    let cfg = ctx.cfg;
    let radius: f64 = cfg.get_or("fiber", "radius", 1.0)?;
    let eps_in: f64 = cfg.get_or("fiber", "eps_in", 2.25)?;
    let eps_out: f64 = cfg.get_or("fiber", "eps_out", 1.0)?;
    let ms = cfg.list::<i32>("fiber", "m")?.unwrap_or(vec![0, 1]);
    let kzs = cfg.list::<f64>("fiber", "k_z")?.unwrap_or(vec![5.0]);
    let max_modes: usize = cfg.get_or("fiber", "max_modes", 32)?;
    cfg.check_all_used()?;
    let mut header = "M,k_z,omega,decay_length".to_string();
    if ctx.units.is_some() {
        header.push_str(",omega_si");
    }
    let mut csv = header + "\n";
    let mut summary = Vec::new();
    let mut jump: f64 = 0.0;
    for &m in &ms {
        for &kz in &kzs {
            let spec = FiberSpec { radius, eps_in, eps_out, m_angular: m, k_z: kz };
            let modes = fiber_modes(&spec, None, max_modes)?;
            ctx.log(format!("M = {m}, k_z = {kz}: {} modes", modes.len()));
            let table = mode_table_csv(&spec, &modes);
            for (line, mode) in table.lines().skip(1).zip(&modes) {
                csv.push_str(line);
                if let Some(u) = ctx.units {
                    csv.push_str(&format!(",{}", e(mode.omega * u.c)));
                }
                csv.push('\n');
                jump = jump.max(interface_jump(&spec, mode)?);
            }
            let roots: Vec<String> = modes.iter().map(|md| format!("{:.12}", md.omega)).collect();
            summary.push(format!("M = {m}, k_z = {kz}: {} bound modes [{}]", modes.len(), roots.join(", ")));
        }
    }
    Ok(Outcome {
        artifacts: vec![("modes.csv".into(), csv.into_bytes())],
        checks: vec![Check::new("matched-component jump", jump, 1e-9)],
        summary,
        inputs: Vec::new(),
    })
}

fn boost(ctx: &Context) -> CliResult<Outcome> {
    let cfg = ctx.cfg;
    let kappa: f64 = cfg.require("boost", "kappa")?;
    let kx: f64 = cfg.get_or("boost", "kx", 1.0)?;
    let ky: f64 = cfg.get_or("boost", "ky", 0.0)?;
    let z_min: f64 = cfg.get_or("boost", "z_min", 0.1)?;
    let z_max: f64 = cfg.get_or("boost", "z_max", 10.0)?;
    let samples: usize = cfg.get_or("boost", "samples", 200)?;
    ensure(cfg, "boost", "z_min", z_min > 0.0, "must be positive")?;
    ensure(cfg, "boost", "z_max", z_max > z_min, "must exceed z_min")?;
    ensure(cfg, "boost", "samples", samples >= 2, "must be at least 2")?;
    cfg.check_all_used()?;
    let bf = boost_eigenfunction(kappa, kx, ky)?;
    let zs: Vec<f64> = (0..samples).map(|i| z_min * (z_max / z_min).powf(i as f64 / (samples - 1) as f64)).collect();
    let mut csv = String::from("z,psi_z,psi_x_re,psi_x_im,psi_y_re,psi_y_im\n");
    let mut ode: f64 = 0.0;
    for &z in &zs {
        let c = bf.components(z)?;
        csv.push_str(&csv_line(&[e(z), e(c.z.re), e(c.x.re), e(c.x.im), e(c.y.re), e(c.y.im)]));
        ode = ode.max(bf.ode_residual(z, 1e-3 * z)?);
    }
    let eig = bf.eigen_residual(&zs)?;
    Ok(Outcome {
        artifacts: vec![("boost.csv".into(), csv.into_bytes())],
        checks: vec![Check::new("Bessel-type ODE residual", ode, 1e-7), Check::new("boost eigen-residual", eig, 1e-6)],
        summary: vec![format!("κ = {kappa}, k⊥ = {:.6} on {samples} log-spaced samples in [{z_min}, {z_max}]", bf.k_perp())],
        inputs: Vec::new(),
    })
}

fn wigner(ctx: &Context) -> CliResult<Outcome> {
    let cfg = ctx.cfg;
    let st = state_from_config(cfg, ctx.base, ctx.seed)?;
    let k = cfg.triple_or::<i64>("wigner", "k", [0, 0, 0])?;
    let want_marginals: Option<bool> = cfg.get("wigner", "marginals")?;
    cfg.check_all_used()?;
    let g = st.field.spec;
    let half = g.n.map(|x| x as i64 / 2);
    ensure(cfg, "wigner", "k", (0..3).all(|a| k[a] >= -half[a] && k[a] < half[a]), "lattice index out of range")?;
    let psi = quarter_band_limit(&g, &st.field.upper());
    let fiber = wigner_fiber(&g, &psi, g.index_of_modes(k))?;
    let dec = wigner_decompose(&fiber)?;
    let (s1, s2) = wigner_subsidiary_residual(&dec);
    let mut csv = String::from("quantity,value\n");
    for (n, v) in [("k_x", fiber.k.x), ("k_y", fiber.k.y), ("k_z", fiber.k.z), ("hermiticity_defect", fiber.hermiticity_defect()), ("sub1", s1), ("sub2", s2)] {
        csv.push_str(&format!("{n},{}\n", e(v)));
    }
    let mut checks = vec![Check::new("subsidiary condition 1", s1, 1e-8), Check::new("subsidiary condition 2", s2, 1e-8)];
    let small = g.len() * g.len() <= 1 << 21;
    if want_marginals.unwrap_or(small) {
        let full = wigner_build(&g, &psi)?;
        let pm = full.position_marginal();
        let scale = psi.iter().map(|v| v.norm_squared()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
        let err = pm.iter().zip(&psi).map(|(a, v)| (a - v.norm_squared()).abs()).fold(0.0, f64::max) / scale;
        let total: f64 = full.momentum_marginal().iter().sum::<f64>() * g.k_weight();
        let norm: f64 = psi.iter().map(|v| v.norm_squared()).sum::<f64>() * g.cell_volume();
        let nerr = (total - norm).abs() / norm.max(f64::MIN_POSITIVE);
        csv.push_str(&format!("position_marginal_error,{}\nmomentum_marginal_norm_error,{}\n", e(err), e(nerr)));
        checks.push(Check::new("position marginal", err, 1e-10));
        checks.push(Check::new("momentum marginal normalization", nerr, 1e-10));
    }
    let w = GridFile::from_components(&g, 9, |s, c| fiber.w[s][(c / 3, c % 3)]);
    Ok(Outcome {
        artifacts: vec![("wigner_fiber.pwfn".into(), w.encode()), ("wigner.csv".into(), csv.into_bytes())],
        checks,
        summary: vec![format!("Wigner fiber at k = ({:.6}, {:.6}, {:.6}) of the quarter-band-limited upper block", fiber.k.x, fiber.k.y, fiber.k.z)],
        inputs: st.inputs,
    })
}

fn hydro(ctx: &Context) -> CliResult<Outcome> {
    let cfg = ctx.cfg;
    let st = state_from_config(cfg, ctx.base, ctx.seed)?;
    let patch = match cfg.get::<usize>("hydro", "patch_normal")? {
        None => None,
        Some(normal) => {
            let level: usize = cfg.require("hydro", "patch_level")?;
            let lo = cfg.list::<usize>("hydro", "patch_lo")?.unwrap_or_default();
            let hi = cfg.list::<usize>("hydro", "patch_hi")?.unwrap_or_default();
            ensure(cfg, "hydro", "patch_lo", lo.len() == 2, "needs two indices")?;
            ensure(cfg, "hydro", "patch_hi", hi.len() == 2, "needs two indices")?;
            Some(LatticePatch { normal, level, lo: [lo[0], lo[1]], hi: [hi[0], hi[1]] })
        }
    };
    cfg.check_all_used()?;
    let g = st.field.spec;
    let hs = hydro_from_field(&g, &st.field.upper())?;
    let id = hydro_identity_residuals(&hs);
    let mut csv = String::from("quantity,value\n");
    for (n, v) in [("trace", id.trace), ("transversality", id.transversality), ("square", id.square), ("defined_sites", id.sites as f64)] {
        csv.push_str(&format!("{n},{}\n", e(v)));
    }
    let mut summary = vec![format!("{} of {} sites carry a defined velocity", id.sites, g.len())];
    if let Some(p) = patch {
        let q = quantization_integral(&hs, &p)?;
        csv.push_str(&format!("quantization,{}\n", e(q)));
        summary.push(format!("quantization integral over {p:?}: {q:.6}"));
    }
    let col = |f: &dyn Fn(usize) -> f64| -> Vec<f64> { (0..g.len()).map(f).collect() };
    let cols = [
        hs.rho.clone(),
        col(&|s| hs.v[s].x),
        col(&|s| hs.v[s].y),
        col(&|s| hs.v[s].z),
        col(&|s| hs.u[s].x),
        col(&|s| hs.u[s].y),
        col(&|s| hs.u[s].z),
    ];
    let refs: Vec<&[f64]> = cols.iter().map(|c| c.as_slice()).collect();
    Ok(Outcome {
        artifacts: vec![("hydro.pwfn".into(), GridFile::from_real(&g, &refs).encode()), ("hydro.csv".into(), csv.into_bytes())],
        checks: vec![Check::new("hydrodynamic identities", id.max(), 1e-10)],
        summary,
        inputs: st.inputs,
    })
}

fn obs_row(label: &str, o: &Observables, scale: [f64; 4]) -> String {
    let mut c = vec![label.to_string(), e(o.energy * scale[0])];
    c.extend(o.momentum.iter().map(|x| e(x * scale[1])));
    c.extend(o.angular_momentum.iter().map(|x| e(x * scale[2])));
    c.extend(o.moment_of_energy.iter().map(|x| e(x * scale[3])));
    csv_line(&c)
}

/// Positive-frequency part of the state, normalized in the energy scalar product.
fn normalized_psi(ctx: &Context) -> CliResult<(SixField, Vec<PathBuf>, f64)> {
    let st = state_from_config(ctx.cfg, ctx.base, ctx.seed)?;
    let psi = positive_frequency_project(&st.field);
    let kept = psi.norm_sqr() / st.field.norm_sqr().max(f64::MIN_POSITIVE);
    let n = scalar_product_coordinate(&psi, &psi, ProductMethod::Spectral)?.re;
    if !(n > 0.0) {
        return Err(CliError::Precondition("state has no positive-frequency content".into()));
    }
    Ok((psi.scale(C64::new(1.0 / n.sqrt(), 0.0)), st.inputs, kept))
}

fn observables(ctx: &Context) -> CliResult<Outcome> {
    let cfg = ctx.cfg;
    let (psi, inputs, kept) = normalized_psi(ctx)?;
    cfg.check_all_used()?;
    let oc = observables_coordinate(&psi)?;
    let om = observables_momentum(&decompose(&psi))?;
    let mut csv = String::from("path,energy,px,py,pz,jx,jy,jz,nx,ny,nz\n");
    csv.push_str(&obs_row("coordinate", &oc, [1.0; 4]));
    csv.push_str(&obs_row("momentum", &om, [1.0; 4]));
    if let Some(u) = ctx.units {
        let s = [u.energy(), u.hbar, u.hbar, u.energy()];
        csv.push_str(&obs_row("coordinate_si", &oc, s));
        csv.push_str(&obs_row("momentum_si", &om, s));
    }
    let diff = (oc.energy - om.energy).abs()
        + (oc.momentum - om.momentum).norm()
        + (oc.angular_momentum - om.angular_momentum).norm()
        + (oc.moment_of_energy - om.moment_of_energy).norm();
    let scale = oc.energy.abs() + oc.momentum.norm() + oc.angular_momentum.norm() + oc.moment_of_energy.norm();
    Ok(Outcome {
        artifacts: vec![("observables.csv".into(), csv.into_bytes())],
        checks: vec![Check::new("coordinate vs momentum observables", diff / scale.max(f64::MIN_POSITIVE), 1e-8)],
        summary: vec![format!(
            "E = {:.10e}, P = ({:.6e}, {:.6e}, {:.6e}); positive-frequency fraction {kept:.6}",
            oc.energy, oc.momentum.x, oc.momentum.y, oc.momentum.z
        )],
        inputs,
    })
}

/// Generators act linearly, so the commutators use the state as given: a positive-frequency
/// projection would add slowly decaying tails that wrap around the box.
fn commutators(ctx: &Context) -> CliResult<Outcome> {
    let cfg = ctx.cfg;
    let st = state_from_config(cfg, ctx.base, ctx.seed)?;
    cfg.check_all_used()?;
    let (psi, inputs) = (st.field, st.inputs);
    let mut csv = String::from("a,b,residual,uses_position\n");
    let (mut deriv, mut pos): (f64, f64) = (0.0, 0.0);
    let all = GeneratorTag::ALL;
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            let (a, b) = (all[i], all[j]);
            let r = commutator_residual(a, b, &psi)?;
            let p = a.uses_position() || b.uses_position();
            if p {
                pos = pos.max(r);
            } else {
                deriv = deriv.max(r);
            }
            let _ = writeln!(csv, "{a},{b},{},{p}", e(r));
        }
        ctx.log(format!("commutators with {} done", all[i]));
    }
    Ok(Outcome {
        artifacts: vec![("commutators.csv".into(), csv.into_bytes())],
        checks: vec![Check::new("derivative-only pairs", deriv, 1e-8), Check::new("pairs with position", pos, 1e-6)],
        summary: vec![format!("45 generator pairs: derivative-only max {deriv:.3e}, with position max {pos:.3e}")],
        inputs,
    })
}
