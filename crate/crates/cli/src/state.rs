//! Grid and initial-state sections shared by the field scenarios.
//!
//! ```text
//! [grid]
//! n = 16
//! length = 16.0
//!
//! [state]
//! kind = gaussian      # gaussian | plane-wave | random | file
//! center = 0 0 0
//! width = 2.5
//! k0 = 0 0 0.5
//! pol = 1 0 0          # real part of the vector-potential polarization
//! pol_im = 0 1 0       # imaginary part (default 0)
//! block = upper        # upper | lower | classical (lower = conjugate of upper)
//! band_limit = true    # keep the lower two thirds of the spectrum
//! ```
//!
//! Gaussian packets are projected onto their transverse part, which removes the small
//! longitudinal content left by wrapping the analytic curl onto the periodic box.
//!
//! `plane-wave` reads `mode` (three integers), `helicity` (+1 or −1) and `amplitude` (re im).
//! `random` fills every helicity mode with |m_a| ≤ `max_mode` from the run seed.
//! `file` reads `path` (relative to the config file) holding 3 or 6 components.

use std::path::{Path, PathBuf};

use field_core::{SixVector, Vec3C, Vec3R, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use spectral::packets::{band_limit_two_thirds, helicity_plane_wave, packet_field, GaussianPacket};
use spectral::{synthesize, transverse_project, GridSpec, HelicitySpectrum, SixField};

use crate::config::{ensure, Config};
use crate::error::{CliError, CliResult};
use crate::gridfile::GridFile;

pub fn grid_from_config(cfg: &Config) -> CliResult<GridSpec> {
    let n = cfg.triple::<usize>("grid", "n")?.ok_or(CliError::Config { line: None, msg: "missing required key grid.n".into() })?;
    let length = cfg.triple::<f64>("grid", "length")?.unwrap_or(n.map(|x| x as f64));
    ensure(cfg, "grid", "n", n.iter().all(|&x| (2..=256).contains(&x)), "each size must be in 2..=256")?;
    ensure(cfg, "grid", "length", length.iter().all(|&l| l > 0.0 && l.is_finite()), "lengths must be positive")?;
    GridSpec::new(n, length).map_err(|e| CliError::Config { line: cfg.line_of("grid", "n"), msg: e.to_string() })
}

fn c3(re: [f64; 3], im: [f64; 3]) -> Vec3C {
    Vec3C::new(C64::new(re[0], im[0]), C64::new(re[1], im[1]), C64::new(re[2], im[2]))
}

/// An initial state and the input files it was read from.
pub struct InitialState {
    pub field: SixField,
    pub inputs: Vec<PathBuf>,
}

pub fn state_from_config(cfg: &Config, base: &Path, seed: u64) -> CliResult<InitialState> {
    let kind = cfg.str_or("state", "kind", "gaussian").to_string();
    let line = cfg.line_of("state", "kind");
    let mut inputs = Vec::new();
    let field = match kind.as_str() {
        "gaussian" => {
            let g = grid_from_config(cfg)?;
            let width: f64 = cfg.get_or("state", "width", 2.5)?;
            ensure(cfg, "state", "width", width > 0.0, "width must be positive")?;
            let p = GaussianPacket {
                center: Vec3R::from(cfg.triple_or("state", "center", [0.0; 3])?),
                width,
                k0: Vec3R::from(cfg.triple_or("state", "k0", [0.0; 3])?),
                pol: c3(cfg.triple_or("state", "pol", [1.0, 0.0, 0.0])?, cfg.triple_or("state", "pol_im", [0.0; 3])?),
            };
            let f = match cfg.str_or("state", "block", "upper") {
                "upper" => packet_field(&g, &p, None),
                "lower" => packet_field(&g, &p, None).map(|_, s| SixVector::new(Vec3C::zeros(), s.upper)),
                "classical" => packet_field(&g, &p, None).map(|_, s| SixVector::new(s.upper, s.upper.map(|z| z.conj()))),
                other => {
                    return Err(CliError::Config {
                        line: cfg.line_of("state", "block"),
                        msg: format!("state.block '{other}' is not one of upper, lower, classical"),
                    })
                }
            };
            let f = transverse_project(&f);
            if cfg.get_or("state", "band_limit", true)? {
                band_limit_two_thirds(&f)
            } else {
                f
            }
        }
        "plane-wave" => {
            let g = grid_from_config(cfg)?;
            let m = cfg.triple::<i64>("state", "mode")?.ok_or(CliError::Config { line, msg: "plane-wave needs state.mode".into() })?;
            let lambda: i32 = cfg.get_or("state", "helicity", 1)?;
            ensure(cfg, "state", "helicity", lambda == 1 || lambda == -1, "helicity must be +1 or -1")?;
            let amp = cfg.list::<f64>("state", "amplitude")?.unwrap_or(vec![1.0, 0.0]);
            ensure(cfg, "state", "amplitude", amp.len() == 2, "amplitude needs 're im'")?;
            let half = g.n.map(|x| x as i64 / 2);
            ensure(cfg, "state", "mode", (0..3).all(|a| m[a] >= -half[a] && m[a] < half[a]) && m != [0; 3], "mode must be a nonzero lattice mode")?;
            helicity_plane_wave(&g, m, lambda, C64::new(amp[0], amp[1]))?
        }
        "random" => {
            let g = grid_from_config(cfg)?;
            let max_mode: i64 = cfg.get_or("state", "max_mode", 2)?;
            ensure(cfg, "state", "max_mode", max_mode >= 1, "max_mode must be at least 1")?;
            let helicity = cfg.str_or("state", "helicity", "+1");
            let lambdas: &[i32] = match helicity {
                "+1" | "1" => &[1],
                "-1" => &[-1],
                "both" => &[1, -1],
                other => {
                    return Err(CliError::Config {
                        line: cfg.line_of("state", "helicity"),
                        msg: format!("state.helicity '{other}' is not +1, -1 or both"),
                    })
                }
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut sp = HelicitySpectrum::zeros(g);
            let half = g.n.map(|x| x as i64 / 2);
            for i in 1..g.len() {
                let m = g.modes(i);
                if (0..3).any(|a| m[a].abs() > max_mode || m[a] == -half[a]) {
                    continue;
                }
                for &l in lambdas {
                    let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    sp.set(i, l, z)?;
                }
            }
            synthesize(&sp, 0.0)?
        }
        "file" => {
            let rel: String = cfg.require("state", "path")?;
            let path = base.join(&rel);
            let gf = GridFile::read(&path)?;
            let f = gf.to_six()?;
            if cfg.has_section("grid") && (cfg.str("grid", "n").is_some() || cfg.str("grid", "length").is_some()) {
                let g = grid_from_config(cfg)?;
                if g != f.spec {
                    return Err(CliError::Precondition(format!("grid in {} is {:?}, config asks for {:?}", path.display(), f.spec, g)));
                }
            }
            inputs.push(path);
            f
        }
        other => return Err(CliError::Config { line, msg: format!("unknown state.kind '{other}'") }),
    };
    if !field.is_finite() {
        return Err(CliError::Precondition("initial state has non-finite values".into()));
    }
    Ok(InitialState { field, inputs })
}
