//! JSON report commands: moments, dependence classification, and
//! level-occupancy probabilities.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::Args;
use serde::Serialize;
use skellam_core::analytics::{
    arrival_time_cdf, classify_dependence_ngsp, classify_dependence_nhgfsp,
    classify_dependence_runavg, first_passage_survival, ngfsp_moments, ngsp_covariance,
    ngsp_moments, nhgfsp_moments, running_avg_moments, DependenceClass, McControl, MomentSummary,
    PmfBackend,
};
use skellam_core::{ProcessSpec, Variant};

use crate::emit;
use crate::specio::{resolve_seed, SpecArgs};

#[derive(Args, Debug)]
pub struct MomentsArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Evaluation time
    #[arg(long)]
    pub t: f64,
    /// Earlier time for the covariance entry (must not exceed --t)
    #[arg(long)]
    pub s: Option<f64>,
    /// Monte Carlo sample count for the fractional variants without a
    /// closed form under non-constant rates
    #[arg(long, default_value_t = 100_000)]
    pub mc_samples: usize,
    /// RNG seed for the Monte Carlo fallback (default: SKELLAM_SEED, then 0)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Report file (default: stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn moments_of(spec: &ProcessSpec, args: &MomentsArgs) -> Result<MomentSummary> {
    let summary = match spec.variant {
        Variant::Gcp | Variant::Ngcp | Variant::Gsp | Variant::Ngsp => {
            let mut m = ngsp_moments(spec, args.t)?;
            if let Some(s) = args.s {
                m.covariance = Some(ngsp_covariance(spec, s, args.t)?);
            }
            m
        }
        Variant::Gfcp | Variant::Ngfcp | Variant::Gfsp | Variant::Ngfsp => {
            let mc = McControl {
                samples: args.mc_samples,
                seed: resolve_seed(args.seed)?,
            };
            ngfsp_moments(spec, args.t, args.s, &mc)?
        }
        Variant::Nhgfcp | Variant::Nhgfsp => nhgfsp_moments(spec, args.t, args.s)?,
        Variant::RunAvgGcp | Variant::RunAvgGsp => running_avg_moments(spec, args.t, args.s)?,
    };
    Ok(summary)
}

pub fn run_moments(args: MomentsArgs) -> Result<ExitCode> {
    let spec = args.spec.load()?;
    let summary = moments_of(&spec, &args)?;
    emit::emit_report(args.out.as_deref(), &emit::to_json_pretty(&summary)?)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Earlier time of the correlation pair; the decay is reported in the
    /// later time
    #[arg(long, default_value_t = 1.0)]
    pub s: f64,
    /// Report file (default: stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct ClassifyReport {
    /// decay exponent of Corr(s, t) in t
    theta: f64,
    class: &'static str,
    c_of_s: f64,
}

pub fn run_classify(args: ClassifyArgs) -> Result<ExitCode> {
    let spec = args.spec.load()?;
    let report = match spec.variant {
        Variant::Ngsp => classify_dependence_ngsp(&spec, args.s)?,
        Variant::Nhgfsp => classify_dependence_nhgfsp(&spec, args.s)?,
        Variant::RunAvgGcp | Variant::RunAvgGsp => classify_dependence_runavg(),
        other => bail!(
            "variant {} has no correlation-decay classification; use ngsp, \
             nhgfsp, or the running averages",
            other.name()
        ),
    };
    let report = ClassifyReport {
        theta: report.theta,
        class: match report.class {
            DependenceClass::Lrd => "LRD",
            DependenceClass::Srd => "SRD",
            DependenceClass::Neither => "neither",
        },
        c_of_s: report.c_of_s,
    };
    emit::emit_report(args.out.as_deref(), &emit::to_json_pretty(&report)?)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Args, Debug)]
pub struct HittingArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Level whose occupancy probabilities are reported
    #[arg(long)]
    pub n: i64,
    /// Evaluation time
    #[arg(long)]
    pub t: f64,
    /// auto, convolution, bessel, or mittag_leffler
    #[arg(long, default_value = "auto")]
    pub backend: String,
    /// Report file (default: stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct HittingReport {
    n: i64,
    t: f64,
    backend: &'static str,
    /// P(X(t) >= n): the arrival-time cdf for counting variants
    arrival_cdf: f64,
    /// sum_{0 <= x < n} P(X(t) = x): first-passage survival for counting
    /// variants
    first_passage_survival: f64,
}

pub fn run_hitting(args: HittingArgs) -> Result<ExitCode> {
    let spec = args.spec.load()?;
    let backend = match args.backend.as_str() {
        "auto" => match spec.variant {
            Variant::Nhgfcp | Variant::Nhgfsp => PmfBackend::MittagLeffler,
            _ => PmfBackend::Convolution,
        },
        "convolution" => PmfBackend::Convolution,
        "bessel" => PmfBackend::Bessel,
        "mittag_leffler" => PmfBackend::MittagLeffler,
        other => bail!("unknown backend '{other}'"),
    };
    let report = HittingReport {
        n: args.n,
        t: args.t,
        backend: emit::backend_name(backend),
        arrival_cdf: arrival_time_cdf(&spec, args.n, args.t, backend)?,
        first_passage_survival: first_passage_survival(&spec, args.n, args.t, backend)?,
    };
    emit::emit_report(args.out.as_deref(), &emit::to_json_pretty(&report)?)?;
    Ok(ExitCode::SUCCESS)
}
