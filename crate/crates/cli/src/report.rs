//! Text summaries of artifacts. Output depends only on file contents, so re-running is stable.

use std::fmt::Write as _;
use std::path::Path;

use metrics::classical_observables;

use crate::error::{CliError, CliResult};
use crate::gridfile::{GridFile, MAGIC};

fn g(x: f64) -> String {
    format!("{x:.12e}")
}

pub fn report_grid(name: &str, gf: &GridFile) -> CliResult<String> {
    let mut s = String::new();
    let spec = gf.grid()?;
    let _ = writeln!(s, "{name}: grid file v{}", crate::gridfile::VERSION);
    let _ = writeln!(s, "  dims {} x {} x {}, box {} x {} x {}", gf.dims[0], gf.dims[1], gf.dims[2], gf.lengths[0], gf.lengths[1], gf.lengths[2]);
    let _ = writeln!(s, "  components {}", gf.components);
    let dv = spec.cell_volume();
    for c in 0..gf.components as usize {
        let (mut n2, mut mx) = (0.0f64, 0.0f64);
        for site in 0..gf.sites() {
            let z = gf.component(site, c);
            n2 += z.norm_sqr();
            mx = mx.max(z.norm());
        }
        let _ = writeln!(s, "  component {c}: L2 norm {}, max {}", g((n2 * dv).sqrt()), g(mx));
    }
    if gf.components == 3 || gf.components == 6 {
        let f = gf.to_six()?;
        let blocks: &[(&str, Vec<_>)] = if gf.components == 6 { &[("upper", f.upper()), ("lower", f.lower())] } else { &[("upper", f.upper())] };
        for (label, b) in blocks {
            let o = classical_observables(&spec, b)?;
            let _ = writeln!(s, "  {label} energy {}", g(o.energy));
            let _ = writeln!(s, "  {label} momentum {} {} {}", g(o.momentum.x), g(o.momentum.y), g(o.momentum.z));
            let _ = writeln!(
                s,
                "  {label} angular momentum {} {} {}",
                g(o.angular_momentum.x),
                g(o.angular_momentum.y),
                g(o.angular_momentum.z)
            );
            let _ = writeln!(
                s,
                "  {label} moment of energy {} {} {}",
                g(o.moment_of_energy.x),
                g(o.moment_of_energy.y),
                g(o.moment_of_energy.z)
            );
        }
    }
    Ok(s)
}

pub fn report_csv(name: &str, text: &str) -> CliResult<String> {
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().ok_or_else(|| CliError::Format(format!("{name}: empty CSV")))?.split(',').collect();
    let rows: Vec<Vec<&str>> = lines.filter(|l| !l.trim().is_empty()).map(|l| l.split(',').collect()).collect();
    for (i, r) in rows.iter().enumerate() {
        if r.len() != header.len() {
            return Err(CliError::Format(format!("{name}: row {} has {} fields, header has {}", i + 2, r.len(), header.len())));
        }
    }
    let mut s = String::new();
    let _ = writeln!(s, "{name}: {} rows, {} columns", rows.len(), header.len());
    for (c, h) in header.iter().enumerate() {
        let nums: Vec<f64> = rows.iter().filter_map(|r| r[c].parse::<f64>().ok()).collect();
        if nums.len() == rows.len() && !nums.is_empty() {
            let lo = nums.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = nums.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let _ = writeln!(s, "  {h}: min {} max {} last {}", g(lo), g(hi), g(*nums.last().expect("nonempty")));
        } else if let Some(r) = rows.last() {
            let _ = writeln!(s, "  {h}: last {}", r[c]);
        }
    }
    Ok(s)
}

pub fn report_manifest(name: &str, text: &str) -> CliResult<String> {
    let v: serde_json::Value = serde_json::from_str(text).map_err(|e| CliError::Format(format!("{name}: {e}")))?;
    let field = |k: &str| v.get(k).map(|x| x.to_string()).unwrap_or_else(|| "-".into());
    let mut s = String::new();
    let _ = writeln!(s, "{name}: run manifest");
    for k in ["kind", "status", "exit_code", "error", "seed"] {
        let _ = writeln!(s, "  {k}: {}", field(k));
    }
    if let Some(checks) = v.get("checks").and_then(|c| c.as_array()) {
        for c in checks {
            let _ = writeln!(s, "  check {}: {} (tolerance {}, pass {})", c["name"], c["value"], c["tolerance"], c["pass"]);
        }
    }
    if let Some(outs) = v.get("outputs").and_then(|c| c.as_array()) {
        for o in outs {
            let _ = writeln!(s, "  output {} sha256 {}", o["file"], o["sha256"]);
        }
    }
    Ok(s)
}

/// Summary of one artifact, chosen by content (grid magic) or extension.
pub fn report_file(path: &Path) -> CliResult<String> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let name = path.display().to_string();
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("");
    if bytes.starts_with(MAGIC) || ext == "pwfn" {
        let gf = GridFile::decode(&bytes).map_err(|e| match e {
            CliError::Format(m) => CliError::Format(format!("{name}: {m}")),
            other => other,
        })?;
        return report_grid(&name, &gf);
    }
    let text = String::from_utf8(bytes).map_err(|_| CliError::Format(format!("{name}: neither a grid file nor text")))?;
    match ext {
        "json" => report_manifest(&name, &text),
        _ => report_csv(&name, &text),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_summary_tracks_ranges() {
        let s = report_csv("x.csv", "a,b\n1,foo\n3,bar\n2,baz\n").unwrap();
        assert!(s.contains("a: min 1.000000000000e0 max 3.000000000000e0 last 2.000000000000e0"), "{s}");
        assert!(s.contains("b: last baz"));
        assert!(matches!(report_csv("x.csv", "a,b\n1\n"), Err(CliError::Format(_))));
    }
}
