//! Deterministic artifact formatting: identical inputs and seeds must
//! produce byte-identical files, so every writer here formats values
//! itself instead of relying on locale- or platform-dependent code.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use skellam_core::analytics::{PmfBackend, PmfTable};
use skellam_core::samplers::{SamplePath, SubordinatorPath};

pub fn backend_name(backend: PmfBackend) -> &'static str {
    match backend {
        PmfBackend::Convolution => "convolution",
        PmfBackend::Bessel => "bessel",
        PmfBackend::MittagLeffler => "mittag_leffler",
        PmfBackend::MonteCarlo => "monte_carlo",
    }
}

/// Event times and states, with the start state as the first row so a
/// zero-event path still plots.
pub fn path_csv(path: &SamplePath) -> String {
    let mut out = String::from("t,state\n0,0\n");
    for (t, state) in path.times.iter().zip(&path.states) {
        let _ = writeln!(out, "{t},{state}");
    }
    out
}

pub fn subordinator_csv(path: &SubordinatorPath) -> String {
    let mut out = String::from("t,Y\n");
    for (i, y) in path.values.iter().enumerate() {
        let _ = writeln!(out, "{},{y}", path.time(i));
    }
    out
}

/// Pmf rows at a fixed 12-decimal resolution. The header comment carries
/// the evaluation time, backend, and the mass left outside the window;
/// probabilities below the printed resolution round to zero, which is the
/// point: two backends that agree analytically produce identical files.
pub fn pmf_csv(table: &PmfTable) -> String {
    let mut out = format!(
        "# t={} backend={} tail_bound={:.3e}\nn,p\n",
        table.t,
        backend_name(table.backend),
        table.tail_bound
    );
    for (n, p) in table.iter() {
        let _ = writeln!(out, "{n},{p:.12}");
    }
    out
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value).context("serializing report")?;
    text.push('\n');
    Ok(text)
}

/// Write into `dir`, creating it first.
pub fn write_artifact(dir: &Path, name: &str, content: &str) -> Result<()> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("creating output directory {}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, content).with_context(|| format!("writing {}", path.display()))
}

/// Write a report to a file when a path is given, otherwise to stdout.
pub fn emit_report(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                std::fs::create_dir_all(parent)
                    .with_context(|| format!("creating output directory {}", parent.display()))?;
            }
            std::fs::write(path, content).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            print!("{content}");
            Ok(())
        }
    }
}
