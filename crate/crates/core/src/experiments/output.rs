//! CSV writers. Each file starts with a `#`-prefixed block echoing the
//! configuration, followed by a header row and the data rows.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::engine::{EnsembleSummary, RunResult};
use crate::error::{Error, Result};

use super::config::ExperimentConfig;
use super::SweepRow;

pub const TOOL_VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

/// Decimal rendering rounded to 6 significant digits.
pub fn sig6(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    if x == 0.0 {
        return "0".into();
    }
    let rounded: f64 = format!("{x:.5e}").parse().expect("formatted float parses");
    rounded.to_string()
}

fn opt(x: Option<f64>) -> String {
    x.map(sig6).unwrap_or_default()
}

/// Output sink: a file, or stdout when no path is given.
pub fn open(path: Option<&Path>) -> Result<Box<dyn Write>> {
    match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| Error::io(p, e))?;
            Ok(Box::new(BufWriter::new(f)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout()))),
    }
}

fn io_err(path: Option<&Path>) -> impl Fn(io::Error) -> Error + '_ {
    move |e| Error::io(path.map_or_else(|| "<stdout>".into(), Path::to_path_buf), e)
}

fn write_preamble(out: &mut dyn Write, kind: &str, cfg_echo: &str, extra: &[String]) -> io::Result<()> {
    writeln!(out, "# {TOOL_VERSION}")?;
    writeln!(out, "# output: {kind}")?;
    for line in cfg_echo.lines().filter(|l| !l.trim().is_empty()) {
        writeln!(out, "# {line}")?;
    }
    for line in extra {
        writeln!(out, "# {line}")?;
    }
    Ok(())
}

fn finish(out: Box<dyn Write>, path: Option<&Path>) -> Result<()> {
    let mut out = out;
    out.flush().map_err(io_err(path))
}

/// Per-step compartment counts of a single realization.
pub fn write_run(path: Option<&Path>, cfg_echo: &str, result: &RunResult) -> Result<()> {
    let mut out = open(path)?;
    let extra = vec![
        format!("total_damage_per_node: {}", sig6(result.total_damage_per_node)),
        format!("ever_infected: {}", result.ever_infected),
        format!(
            "awareness_onset: {}",
            result.awareness_onset.map(|t| t.to_string()).unwrap_or_else(|| "none".into())
        ),
        format!("absorbed: {}", result.absorbed),
        format!("steps: {}", result.steps),
    ];
    write_preamble(&mut out, "run", cfg_echo, &extra).map_err(io_err(path))?;
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(["t", "Su", "Sa", "Iu", "Ia", "Ha"])?;
        for (t, c) in result.series.iter().enumerate() {
            let mut rec = vec![t.to_string()];
            rec.extend(c.0.iter().map(ToString::to_string));
            w.write_record(&rec)?;
        }
        w.flush().map_err(io_err(path))?;
    }
    finish(out, path)
}

/// Ensemble-mean compartment series of a cycle experiment.
pub fn write_cycle(path: Option<&Path>, cfg: &ExperimentConfig, summary: &EnsembleSummary) -> Result<()> {
    let mut out = open(path)?;
    let averaged = summary.mean_series_phases();
    let fmt_t = |t: Option<usize>| t.map(|t| t.to_string()).unwrap_or_else(|| "none".into());
    let extra = vec![
        format!("realizations: {} truncated: {}", summary.realizations, summary.truncated),
        format!(
            "mean_DN: {} std_DN: {} mean_ever_infected_fraction: {}",
            sig6(summary.mean_dn),
            sig6(summary.std_dn),
            sig6(summary.mean_ever_infected_fraction)
        ),
        format!(
            "phases (per-realization mean): onset_t: {} peak_Iu_t: {} peak_Ia_t: {} end_t: {}",
            opt(summary.mean_onset_t),
            opt(summary.mean_peak_iu_t),
            opt(summary.mean_peak_ia_t),
            sig6(summary.mean_end_t)
        ),
        format!(
            "phases (averaged series): onset_t: {} peak_Iu_t: {} peak_Ia_t: {} end_t: {}",
            fmt_t(averaged.onset_t),
            fmt_t(averaged.peak_iu_t),
            fmt_t(averaged.peak_ia_t),
            averaged.end_t
        ),
    ];
    write_preamble(&mut out, "cycle", &cfg.to_toml(), &extra).map_err(io_err(path))?;
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(["t", "mean_Su", "mean_Sa", "mean_Iu", "mean_Ia", "mean_Ha"])?;
        for (t, row) in summary.mean_series.iter().enumerate() {
            let mut rec = vec![t.to_string()];
            rec.extend(row.iter().map(|&x| sig6(x)));
            w.write_record(&rec)?;
        }
        w.flush().map_err(io_err(path))?;
    }
    finish(out, path)
}

pub const SWEEP_COLUMNS: [&str; 23] = [
    "experiment",
    "family",
    "n",
    "mean_degree",
    "theta",
    "kind",
    "x",
    "d0",
    "tau",
    "aware_infection_factor",
    "nu",
    "mu0",
    "gamma",
    "rho0",
    "realizations",
    "base_seed",
    "mean_DN",
    "std_DN",
    "stderr_DN",
    "mean_ever_infected_fraction",
    "truncated",
    "const_max_DN",
    "const_argmax_d",
];

/// One row per sweep point, each echoing its full parameter tuple.
pub fn write_sweep(path: Option<&Path>, cfg: &ExperimentConfig, kind: &str, rows: &[SweepRow]) -> Result<()> {
    let mut out = open(path)?;
    write_preamble(&mut out, kind, &cfg.to_toml(), &[]).map_err(io_err(path))?;
    {
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(SWEEP_COLUMNS)?;
        for row in rows {
            let p = &row.params;
            w.write_record([
                cfg.name.clone(),
                row.family.tag().to_string(),
                row.n.to_string(),
                sig6(row.mean_degree),
                sig6(p.theta),
                row.kind.tag().to_string(),
                sig6(row.point.x),
                if row.kind == crate::DamageKind::Constant {
                    String::new()
                } else {
                    sig6(row.d0)
                },
                sig6(p.tau),
                sig6(p.aware_infection_factor),
                sig6(p.nu),
                sig6(p.mu0),
                sig6(p.gamma),
                sig6(p.rho0),
                row.point.realizations.to_string(),
                row.base_seed.to_string(),
                sig6(row.point.mean_dn),
                sig6(row.point.std_dn),
                sig6(row.point.std_error()),
                sig6(row.point.mean_ever_infected_fraction),
                row.truncated.to_string(),
                row.reference.map(|r| sig6(r.max_dn)).unwrap_or_default(),
                row.reference.map(|r| sig6(r.argmax_d)).unwrap_or_default(),
            ])?;
        }
        w.flush().map_err(io_err(path))?;
    }
    finish(out, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(sig6(0.160505999999), "0.160506");
        assert_eq!(sig6(1000.0), "1000");
        assert_eq!(sig6(0.0), "0");
        assert_eq!(sig6(0.1), "0.1");
        assert_eq!(sig6(123456789.0), "123457000");
        assert_eq!(sig6(0.000012345678), "0.0000123457");
    }
}
