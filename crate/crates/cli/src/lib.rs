//! Scenario driver: config parsing, dispatch to the solver crates, artifacts and run manifests.

pub mod config;
pub mod error;
pub mod gridfile;
pub mod report;
pub mod scenario;
pub mod state;

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::json;
use sha2::{Digest, Sha256};

pub use config::Config;
pub use error::{CliError, CliResult};
pub use gridfile::GridFile;
pub use scenario::{Check, Kind, Outcome, Units};

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub config: PathBuf,
    pub out: PathBuf,
    pub threads: usize,
    pub verbose: bool,
}

/// What a successful run produced.
#[derive(Debug)]
pub struct RunReport {
    pub checks: Vec<Check>,
    pub summary: Vec<String>,
    pub outputs: Vec<PathBuf>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

fn hash_file(p: &Path) -> CliResult<String> {
    std::fs::read(p).map(|b| sha256_hex(&b)).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))
}

struct Prepared {
    cfg_hash: String,
    seed: u64,
    outcome: Outcome,
}

fn prepare(kind: Kind, opts: &RunOptions, seed_out: &mut Option<u64>, cfg_hash_out: &mut Option<String>) -> CliResult<Prepared> {
    let text = std::fs::read(&opts.config).map_err(|e| CliError::Io(format!("{}: {e}", opts.config.display())))?;
    let cfg_hash = sha256_hex(&text);
    *cfg_hash_out = Some(cfg_hash.clone());
    let text = String::from_utf8(text).map_err(|_| CliError::Config { line: None, msg: "config is not UTF-8".into() })?;
    let cfg = Config::parse(&text)?;
    let seed: u64 = cfg.get_or("run", "seed", 0)?;
    *seed_out = Some(seed);
    if let Some(k) = cfg.str("run", "kind") {
        if k != kind.name() {
            return Err(CliError::Config { line: cfg.line_of("run", "kind"), msg: format!("run.kind '{k}' does not match subcommand {kind}") });
        }
    }
    let units = Units::from_config(&cfg)?;
    let base = opts.config.parent().map(Path::to_path_buf).unwrap_or_default();
    let ctx = scenario::Context { cfg: &cfg, base: &base, seed, units, verbose: opts.verbose };
    let outcome = scenario::run_kind(kind, &ctx)?;
    Ok(Prepared { cfg_hash, seed, outcome })
}

fn write_outputs(out: &Path, artifacts: &[(String, Vec<u8>)]) -> CliResult<Vec<PathBuf>> {
    let mut written = Vec::new();
    for (name, bytes) in artifacts {
        let p = out.join(name);
        if let Err(e) = std::fs::write(&p, bytes) {
            for w in &written {
                let _ = std::fs::remove_file(w);
            }
            return Err(CliError::Io(format!("{}: {e}", p.display())));
        }
        written.push(p);
    }
    Ok(written)
}

/// Run one scenario. The manifest is written whether or not the run succeeds; data files only on success.
pub fn run(kind: Kind, opts: &RunOptions) -> CliResult<RunReport> {
    let start = Instant::now();
    std::fs::create_dir_all(&opts.out).map_err(|e| CliError::Io(format!("{}: {e}", opts.out.display())))?;
    let (mut seed, mut cfg_hash) = (None, None);
    let result = prepare(kind, opts, &mut seed, &mut cfg_hash).and_then(|p| {
        let files = write_outputs(&opts.out, &p.outcome.artifacts)?;
        Ok((p, files))
    });
    let mut manifest = json!({
        "kind": kind.name(),
        "config": opts.config.display().to_string(),
        "config_sha256": cfg_hash,
        "seed": seed,
        "threads": opts.threads,
        "versions": { "pwfn": env!("CARGO_PKG_VERSION"), "grid_format": gridfile::VERSION },
    });
    let report = match &result {
        Ok((p, files)) => {
            let inputs: Vec<_> = p
                .outcome
                .inputs
                .iter()
                .map(|f| Ok(json!({ "file": f.display().to_string(), "sha256": hash_file(f)? })))
                .collect::<CliResult<_>>()?;
            let outputs: Vec<_> = p
                .outcome
                .artifacts
                .iter()
                .map(|(n, b)| json!({ "file": n, "sha256": sha256_hex(b), "bytes": b.len() }))
                .collect();
            let checks: Vec<_> = p
                .outcome
                .checks
                .iter()
                .map(|c| json!({ "name": c.name, "value": c.value, "tolerance": c.tolerance, "pass": c.pass() }))
                .collect();
            manifest["status"] = json!("ok");
            manifest["exit_code"] = json!(0);
            manifest["seed"] = json!(p.seed);
            manifest["config_sha256"] = json!(p.cfg_hash);
            manifest["inputs"] = json!(inputs);
            manifest["outputs"] = json!(outputs);
            manifest["checks"] = json!(checks);
            Some(RunReport { checks: p.outcome.checks.clone(), summary: p.outcome.summary.clone(), outputs: files.clone() })
        }
        Err(e) => {
            manifest["status"] = json!("error");
            manifest["exit_code"] = json!(e.exit_code());
            manifest["error"] = json!({ "class": e.class(), "message": e.to_string() });
            manifest["outputs"] = json!([]);
            None
        }
    };
    manifest["wall_time_s"] = json!(start.elapsed().as_secs_f64());
    let text = serde_json::to_string_pretty(&manifest).expect("manifest serializes") + "\n";
    let mpath = opts.out.join(MANIFEST);
    std::fs::write(&mpath, text).map_err(|e| CliError::Io(format!("{}: {e}", mpath.display())))?;
    match (report, result) {
        (Some(r), _) => Ok(r),
        (None, Err(e)) => Err(e),
        (None, Ok(_)) => unreachable!("report is built for every success"),
    }
}

/// Concatenated summaries of several artifacts.
pub fn report(paths: &[PathBuf]) -> CliResult<String> {
    let mut s = String::new();
    for p in paths {
        s.push_str(&report::report_file(p)?);
    }
    Ok(s)
}
