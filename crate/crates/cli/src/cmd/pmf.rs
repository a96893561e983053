//! Pmf tabulation: one CSV per requested time.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, ensure, Context, Result};
use clap::Args;
use skellam_core::analytics::{
    ngcp_pmf, ngsp_moments, ngsp_pmf_bessel, ngsp_pmf_convolution, nhgfcp_pmf, nhgfsp_moments,
    nhgfsp_pmf, PmfBackend, PmfTable,
};
use skellam_core::{ProcessSpec, Variant};

use crate::emit;
use crate::specio::SpecArgs;

/// Tail tolerance handed to the convolution backend.
const TAIL_TOL: f64 = 1e-12;

#[derive(Args, Debug)]
pub struct PmfArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Evaluation time; repeat for several tables (one CSV per value)
    #[arg(long = "t", required = true, value_name = "TIME")]
    pub times: Vec<f64>,
    /// auto, convolution, bessel, or mittag_leffler; auto picks the
    /// variant's analytic backend
    #[arg(long, default_value = "auto")]
    pub backend: String,
    /// Lower edge of the tabulated window (default: mean - 12 sd, floored
    /// at 0 for counting variants)
    #[arg(long)]
    pub n_min: Option<i64>,
    /// Upper edge of the tabulated window (default: mean + 12 sd)
    #[arg(long)]
    pub n_max: Option<i64>,
    /// Output directory
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

fn auto_window(spec: &ProcessSpec, t: f64) -> Result<(i64, i64)> {
    let m = match spec.variant {
        Variant::Gcp | Variant::Ngcp | Variant::Gsp | Variant::Ngsp => ngsp_moments(spec, t)?,
        Variant::Nhgfcp | Variant::Nhgfsp => nhgfsp_moments(spec, t, None)?,
        other => bail!(
            "variant {} has no analytic pmf; only the plain and compound \
             time-changed families are tabulated",
            other.name()
        ),
    };
    let sd = m.variance.max(0.0).sqrt();
    let hi = (m.mean + 12.0 * sd).ceil() as i64 + 20;
    let lo = if spec.variant.is_difference() {
        (m.mean - 12.0 * sd).floor() as i64 - 20
    } else {
        0
    };
    Ok((lo, hi.max(1)))
}

fn build_table(spec: &ProcessSpec, t: f64, backend: &str, lo: i64, hi: i64) -> Result<PmfTable> {
    let table = match (spec.variant, backend) {
        (Variant::Gcp | Variant::Ngcp, "auto" | "convolution") => {
            ngcp_pmf(&spec.up, t, hi.max(0) as usize)?
        }
        (Variant::Gsp | Variant::Ngsp, "auto" | "convolution") => {
            ngsp_pmf_convolution(spec, t, lo, hi, TAIL_TOL)?
        }
        (Variant::Gsp | Variant::Ngsp, "bessel") => ngsp_pmf_bessel(spec, t, lo, hi)?,
        (Variant::Nhgfcp, "auto" | "mittag_leffler") => {
            nhgfcp_pmf(&spec.up, spec.alpha, t, hi.max(0) as usize)?
        }
        (Variant::Nhgfsp, "auto" | "mittag_leffler") => nhgfsp_pmf(spec, t, lo, hi)?,
        (variant, "auto" | "convolution" | "bessel" | "mittag_leffler") => bail!(
            "backend '{backend}' is not defined for variant {}",
            variant.name()
        ),
        (_, other) => bail!("unknown backend '{other}'"),
    };
    Ok(table)
}

/// Mirror-symmetry self-check: equal up and down rate sets make the signed
/// law even, so the table must satisfy p(n) = p(-n) to rounding.
fn check_symmetry(table: &PmfTable) -> Result<()> {
    let half = (-table.n_min).min(table.n_max);
    for n in 1..=half {
        let gap = (table.prob(n) - table.prob(-n)).abs();
        ensure!(
            gap < 1e-10,
            "symmetric spec produced an asymmetric table: |p({n}) - p({}) | = {gap:.3e}",
            -n
        );
    }
    Ok(())
}

pub fn run(args: PmfArgs) -> Result<ExitCode> {
    let spec = args.spec.load()?;
    let symmetric = spec.variant.is_difference() && spec.up == spec.down;
    for &t in &args.times {
        if !(t >= 0.0) || !t.is_finite() {
            bail!("--t must be finite and nonnegative, got {t}");
        }
        let (auto_lo, auto_hi) = match (args.n_min, args.n_max) {
            (Some(_), Some(_)) => (0, 0), // both given; no moments needed
            _ => auto_window(&spec, t)?,
        };
        let lo = args.n_min.unwrap_or(auto_lo);
        let hi = args.n_max.unwrap_or(auto_hi);
        ensure!(lo <= hi, "--n-min must not exceed --n-max");
        let table = build_table(&spec, t, args.backend.as_str(), lo, hi)?;
        if let Err(err) = table.check_normalization() {
            // the collapsed Bessel form at k > 1 misallocates mass by design;
            // it is kept for comparison, so report instead of refusing
            if table.backend == PmfBackend::Bessel && spec.k > 1 {
                eprintln!("note: Bessel backend at k = {} is a documented approximation ({err})", spec.k);
            } else {
                return Err(err).with_context(|| format!("pmf at t = {t} failed its mass check"));
            }
        }
        if symmetric {
            check_symmetry(&table)?;
        }
        emit::write_artifact(&args.out, &format!("pmf_t{t}.csv"), &emit::pmf_csv(&table))?;
    }
    Ok(ExitCode::SUCCESS)
}
