//! Verification front end: named catalog checks, or the full battery plus
//! the documented-discrepancy comparisons that live outside the catalog.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::Args;
use rayon::prelude::*;
use skellam_core::analytics::nhgfsp_mgf;
use skellam_core::samplers::{sample_ngsp, sample_nhgfsp, ClockMode, NgspMethod, RngStream};
use skellam_core::verify::{
    ks_two_sample, run_check, ReportMeta, VerificationReport, Verdict, CHECK_CATALOG,
};
use skellam_core::{ProcessSpec, RateFunction, Variant};

use crate::emit;
use crate::specio::{resolve_seed, SpecArgs};

/// The cutoff check costs O(rate) per draw at its large canonical rate, so
/// its draw count is capped independently of --budget.
const CUTOFF_DRAWS: usize = 2_000;

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Run one named check (see --help for the catalog)
    #[arg(long, conflicts_with = "all", value_name = "NAME")]
    pub check: Option<String>,
    /// Run the whole catalog plus the documented-discrepancy comparisons
    /// paper_vs_thinning and mgf_sign
    #[arg(long)]
    pub all: bool,
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Jump-size count for the built-in default specs (constant rates 1/j
    /// up, 0.6/j down); ignored when --spec or --variant is given
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    /// Monte Carlo paths per check
    #[arg(long, default_value_t = 100_000)]
    pub budget: usize,
    /// RNG seed (default: SKELLAM_SEED, then 0)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the reports as a JSON array to this file
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn constant(rate: f64) -> RateFunction {
    RateFunction::Constant { rate }
}

fn gm(a: f64, b: f64, mu: f64) -> RateFunction {
    RateFunction::GompertzMakeham { a, b, mu }
}

fn spec_of(variant: Variant, up: Vec<RateFunction>, down: Vec<RateFunction>, alpha: f64) -> ProcessSpec {
    ProcessSpec {
        variant,
        k: up.len(),
        up,
        down,
        alpha,
    }
}

/// The three-rate Gompertz-Makeham difference set used by the figure-style
/// demos; down is a cyclic shift of up.
fn gm_figure_spec(variant: Variant, alpha: f64) -> ProcessSpec {
    spec_of(
        variant,
        vec![gm(0.6, 0.1, 5.0), gm(0.7, 0.2, 4.0), gm(0.4, 0.3, 7.0)],
        vec![gm(0.7, 0.2, 4.0), gm(0.4, 0.3, 7.0), gm(0.6, 0.1, 5.0)],
        alpha,
    )
}

/// Plain difference spec with k constant components, rates 1/j up and
/// 0.6/j down.
fn k_spec(k: usize) -> ProcessSpec {
    let up = (1..=k).map(|j| constant(1.0 / j as f64)).collect();
    let down = (1..=k).map(|j| constant(0.6 / j as f64)).collect();
    spec_of(Variant::Gsp, up, down, 1.0)
}

/// Default spec per catalog check, sized by `k` where the check is about
/// the jump-size structure.
fn canonical_spec(name: &str, k: usize) -> ProcessSpec {
    match name {
        "moments" | "martingale" | "weighted_sum" => gm_figure_spec(Variant::Ngsp, 1.0),
        "pmf_tv" | "bessel_vs_convolution" | "transition_rates" => k_spec(k),
        // concentration holds in the plain large-rate regime; the
        // fractional regime's non-concentration is pinned elsewhere
        "cutoff" => spec_of(Variant::Gcp, vec![constant(1e4)], vec![], 1.0),
        "dispersion" => spec_of(
            Variant::Nhgfsp,
            vec![constant(0.8)],
            vec![constant(0.5)],
            0.7,
        ),
        "running_avg_ratios" => spec_of(
            Variant::RunAvgGsp,
            vec![constant(1.0), constant(0.5)],
            vec![constant(0.2), constant(0.3)],
            1.0,
        ),
        "waiting_time" => spec_of(Variant::Nhgfcp, vec![constant(0.6), constant(0.3)], vec![], 0.7),
        _ => k_spec(k),
    }
}

fn check_budget(name: &str, budget: usize) -> usize {
    if name == "cutoff" {
        budget.min(CUTOFF_DRAWS)
    } else {
        budget
    }
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// KS distance between the exact thinning sampler and the published
/// recipe on the figure's rate set. The recipe freezes waits at the
/// cumulative rate of the running clock, so the laws differ by design;
/// the gap is reported, never judged.
fn paper_vs_thinning(budget: usize, seed: u64) -> Result<VerificationReport> {
    let spec = gm_figure_spec(Variant::Ngsp, 1.0);
    let n = budget.clamp(1_000, 20_000);
    let t_end = 1.0;
    let mut exact = Vec::with_capacity(n);
    let mut paper = Vec::with_capacity(n);
    for i in 0..n {
        let mut rng = RngStream::new(seed, i as u64);
        exact.push(sample_ngsp(&spec, t_end, &mut rng, NgspMethod::Thinning)?.state_at(t_end) as f64);
        let mut rng = RngStream::new(seed ^ 0x9e37_79b9_7f4a_7c15, i as u64);
        paper.push(sample_ngsp(&spec, t_end, &mut rng, NgspMethod::Paper)?.state_at(t_end) as f64);
    }
    let ks = ks_two_sample(&exact, &paper);
    Ok(VerificationReport {
        name: String::from("paper_vs_thinning"),
        analytic: 0.0,
        estimate: ks,
        std_error: None,
        // 1% two-sample critical value; the reported gap dwarfs it
        tolerance: 1.628 * (2.0 / n as f64).sqrt(),
        verdict: Verdict::DiscrepancyDocumented,
        metadata: ReportMeta {
            spec,
            seed,
            samples: n,
        },
    })
}

/// Printed mgf of the compound time-changed difference versus Monte Carlo.
/// The printed form applies the up-side tilt e^{s j} - 1 to the down
/// component as well (a sign slip: the down marks enter negated), so the
/// formula overshoots; the gap is reported, never judged.
fn mgf_sign_gap(budget: usize, seed: u64) -> Result<VerificationReport> {
    let spec = spec_of(
        Variant::Nhgfsp,
        vec![constant(0.8)],
        vec![constant(0.5)],
        0.7,
    );
    let (s_arg, t_end) = (0.25, 1.0);
    let printed = nhgfsp_mgf(&spec, s_arg, t_end)?;
    let n = budget.clamp(1_000, 20_000);
    let mut xs = Vec::with_capacity(n);
    for i in 0..n {
        let mut rng = RngStream::new(seed, i as u64);
        let path = sample_nhgfsp(&spec, t_end, &mut rng, ClockMode::Independent)?;
        xs.push((s_arg * path.state_at(t_end) as f64).exp());
    }
    let (mean, se) = mean_and_se(&xs);
    Ok(VerificationReport {
        name: String::from("mgf_sign"),
        analytic: printed,
        estimate: mean,
        std_error: Some(se),
        tolerance: 4.0 * se,
        verdict: Verdict::DiscrepancyDocumented,
        metadata: ReportMeta {
            spec,
            seed,
            samples: n,
        },
    })
}

fn verdict_name(verdict: Verdict) -> &'static str {
    match verdict {
        Verdict::Pass => "pass",
        Verdict::Fail => "fail",
        Verdict::DiscrepancyDocumented => "discrepancy_documented",
    }
}

fn print_table(reports: &[VerificationReport]) {
    println!(
        "{:<22} {:<24} {:>14} {:>14} {:>14}",
        "check", "verdict", "analytic", "estimate", "tolerance"
    );
    for r in reports {
        println!(
            "{:<22} {:<24} {:>14.6e} {:>14.6e} {:>14.6e}",
            r.name,
            verdict_name(r.verdict),
            r.analytic,
            r.estimate,
            r.tolerance
        );
    }
}

pub fn run(args: VerifyArgs) -> Result<ExitCode> {
    let seed = resolve_seed(args.seed)?;
    let explicit_spec = args.spec.spec.is_some() || args.spec.variant.is_some();

    let reports: Vec<VerificationReport> = if args.all {
        let mut reports = CHECK_CATALOG
            .par_iter()
            .map(|name| {
                let spec = canonical_spec(name, args.k);
                run_check(name, &spec, check_budget(name, args.budget), seed)
                    .with_context(|| format!("check {name}"))
            })
            .collect::<Result<Vec<_>>>()?;
        reports.push(paper_vs_thinning(args.budget, seed)?);
        reports.push(mgf_sign_gap(args.budget, seed)?);
        reports
    } else {
        let Some(name) = &args.check else {
            anyhow::bail!("pass --check NAME or --all; catalog: {}", CHECK_CATALOG.join(", "));
        };
        let report = match name.as_str() {
            "paper_vs_thinning" => paper_vs_thinning(args.budget, seed)?,
            "mgf_sign" => mgf_sign_gap(args.budget, seed)?,
            _ => {
                let spec = if explicit_spec {
                    args.spec.load()?
                } else {
                    canonical_spec(name, args.k)
                };
                run_check(name, &spec, check_budget(name, args.budget), seed)
                    .with_context(|| format!("check {name}"))?
            }
        };
        vec![report]
    };

    print_table(&reports);
    if let Some(out) = &args.out {
        emit::emit_report(Some(out), &emit::to_json_pretty(&reports)?)?;
    }
    let failures = reports.iter().filter(|r| r.verdict == Verdict::Fail).count();
    if failures > 0 {
        eprintln!("{failures} check(s) failed");
        Ok(ExitCode::from(2))
    } else {
        Ok(ExitCode::SUCCESS)
    }
}
