//! Path simulation to CSV artifacts plus a JSON run manifest.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Result};
use clap::Args;
use rayon::prelude::*;
use serde::Serialize;
use skellam_core::samplers::{
    sample_gfsp, sample_inverse_subordinator, sample_ngfsp, sample_ngsp, sample_nhgfsp,
    sample_running_avg, ClockMode, NgspMethod, RngStream,
};
use skellam_core::{ProcessSpec, Variant};

use crate::emit;
use crate::specio::{resolve_seed, SpecArgs};

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Simulation horizon (time units of the rate functions)
    #[arg(long)]
    pub t_end: f64,
    /// Number of independent paths; path i draws from RNG stream i
    #[arg(long, default_value_t = 1)]
    pub paths: usize,
    /// RNG seed (default: SKELLAM_SEED, then 0)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Grid step for the fractional grid-composed variants and the
    /// subordinator (default: t_end / 16384)
    #[arg(long)]
    pub grid_step: Option<f64>,
    /// Replicate the published simulation recipe (shared clock, cumulative
    /// waits) instead of the exact samplers
    #[arg(long)]
    pub paper_exact: bool,
    /// Output directory for the CSVs and manifest.json
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

/// Run manifest. `wall_time_ms` varies run to run; every other field and
/// every data artifact is byte-stable for fixed flags and seed.
#[derive(Serialize)]
struct Manifest<'a> {
    version: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    spec: Option<&'a ProcessSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    seed: u64,
    t_end: f64,
    paths: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    grid_step: Option<f64>,
    method: &'static str,
    wall_time_ms: u128,
}

pub fn run(args: SimulateArgs) -> Result<ExitCode> {
    let start = Instant::now();
    if !(args.t_end > 0.0 && args.t_end.is_finite()) {
        bail!("--t-end must be positive and finite");
    }
    if args.paths == 0 {
        bail!("--paths must be at least 1");
    }
    let seed = resolve_seed(args.seed)?;
    let h = args.grid_step.unwrap_or(args.t_end / 16384.0);
    if !(h > 0.0) || h > args.t_end {
        bail!("--grid-step must lie in (0, t_end]");
    }

    // the inverse-subordinator clock is not a process variant; it gets its
    // own branch with (t, Y) artifacts
    if args.spec.variant.as_deref() == Some("subordinator") {
        let Some(alpha) = args.spec.alpha else {
            bail!("--variant subordinator needs --alpha");
        };
        let csvs = (0..args.paths)
            .into_par_iter()
            .map(|i| {
                let mut rng = RngStream::new(seed, i as u64);
                let path = sample_inverse_subordinator(alpha, args.t_end, h, &mut rng)?;
                Ok(emit::subordinator_csv(&path))
            })
            .collect::<Result<Vec<_>, skellam_core::Error>>()?;
        for (i, csv) in csvs.iter().enumerate() {
            emit::write_artifact(&args.out, &format!("subordinator_{i:04}.csv"), csv)?;
        }
        let manifest = Manifest {
            version: env!("CARGO_PKG_VERSION"),
            spec: None,
            alpha: Some(alpha),
            seed,
            t_end: args.t_end,
            paths: args.paths,
            grid_step: Some(h),
            method: "inverse_subordinator",
            wall_time_ms: start.elapsed().as_millis(),
        };
        emit::write_artifact(&args.out, "manifest.json", &emit::to_json_pretty(&manifest)?)?;
        return Ok(ExitCode::SUCCESS);
    }

    let spec = args.spec.load()?;
    let mode = if args.paper_exact {
        ClockMode::PaperExact
    } else {
        ClockMode::Independent
    };
    let method = if args.paper_exact {
        NgspMethod::Paper
    } else {
        NgspMethod::Thinning
    };

    let (method_name, grid): (&'static str, Option<f64>) = match spec.variant {
        Variant::Gcp | Variant::Gfcp | Variant::Gsp | Variant::Gfsp => (
            if args.paper_exact { "paper_exact" } else { "independent_clocks" },
            None,
        ),
        Variant::Ngcp | Variant::Ngsp => (
            if args.paper_exact { "paper" } else { "thinning" },
            None,
        ),
        Variant::Ngfcp | Variant::Ngfsp => (
            if args.paper_exact { "paper_exact" } else { "independent_clocks" },
            Some(h),
        ),
        Variant::Nhgfcp | Variant::Nhgfsp => (
            if args.paper_exact { "paper_exact" } else { "independent_clocks" },
            None,
        ),
        Variant::RunAvgGcp | Variant::RunAvgGsp => ("running_average", None),
    };

    match spec.variant {
        // real-valued draws: one CSV, one row per path
        Variant::RunAvgGcp | Variant::RunAvgGsp => {
            let values = (0..args.paths)
                .into_par_iter()
                .map(|i| {
                    let mut rng = RngStream::new(seed, i as u64);
                    sample_running_avg(&spec, args.t_end, &mut rng)
                })
                .collect::<Result<Vec<_>, skellam_core::Error>>()?;
            let mut csv = String::from("path,value\n");
            for (i, v) in values.iter().enumerate() {
                csv.push_str(&format!("{i},{v}\n"));
            }
            emit::write_artifact(&args.out, "running_avg.csv", &csv)?;
        }
        _ => {
            let csvs = (0..args.paths)
                .into_par_iter()
                .map(|i| {
                    let mut rng = RngStream::new(seed, i as u64);
                    let path = match spec.variant {
                        Variant::Gcp | Variant::Gfcp | Variant::Gsp | Variant::Gfsp => {
                            sample_gfsp(&spec, args.t_end, &mut rng, mode)?
                        }
                        Variant::Ngcp | Variant::Ngsp => {
                            sample_ngsp(&spec, args.t_end, &mut rng, method)?
                        }
                        Variant::Ngfcp | Variant::Ngfsp => {
                            sample_ngfsp(&spec, args.t_end, h, &mut rng, mode)?
                        }
                        _ => sample_nhgfsp(&spec, args.t_end, &mut rng, mode)?,
                    };
                    Ok(emit::path_csv(&path))
                })
                .collect::<Result<Vec<_>, skellam_core::Error>>()?;
            for (i, csv) in csvs.iter().enumerate() {
                emit::write_artifact(&args.out, &format!("path_{i:04}.csv"), csv)?;
            }
        }
    }

    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION"),
        spec: Some(&spec),
        alpha: None,
        seed,
        t_end: args.t_end,
        paths: args.paths,
        grid_step: grid,
        method: method_name,
        wall_time_ms: start.elapsed().as_millis(),
    };
    emit::write_artifact(&args.out, "manifest.json", &emit::to_json_pretty(&manifest)?)?;
    Ok(ExitCode::SUCCESS)
}
