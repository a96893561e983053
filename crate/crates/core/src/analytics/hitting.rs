//! Level-occupancy distribution functions summed from the pmf tables.
//!
//! `arrival_time_cdf` evaluates `F(n, t) = sum_{x >= n} p(x, t)` and
//! `first_passage_survival` evaluates `sum_{x = 0}^{n - 1} p(x, t)`. For
//! counting variants these are exactly the arrival-time cdf of state `n`
//! and the survival function of the first upcrossing. For difference
//! variants a path may cross the level and return, so both quantities
//! describe where the process sits at time `t`, not whether the level was
//! ever touched; the sampler checks in the test suite pin that reading.

#[allow(unused_imports)] // trait needed only in pure no_std builds
use num_traits::Float;

use super::fractional::{nhgfcp_pmf, nhgfsp_pmf, nhgfsp_moments};
use super::moments::ngsp_moments;
use super::pmf::{ngcp_pmf, ngsp_pmf_bessel, ngsp_pmf_convolution, DEFAULT_TAIL_TOL};
use super::{PmfBackend, PmfTable};
use crate::error::{Error, Result};
use crate::rates::{ProcessSpec, Variant};

/// Widest level the table machinery will enumerate towards.
const LEVEL_CAP: i64 = 100_000;

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain("time must be finite and nonnegative"))
    }
}

/// Window that carries all but a negligible sliver of the law's mass:
/// twelve standard deviations plus a flat margin, floored at zero for
/// counting variants.
fn support_bounds(spec: &ProcessSpec, t: f64) -> Result<(i64, i64)> {
    let m = match spec.variant {
        Variant::Gcp | Variant::Ngcp | Variant::Gsp | Variant::Ngsp => ngsp_moments(spec, t)?,
        Variant::Nhgfcp | Variant::Nhgfsp => nhgfsp_moments(spec, t, None)?,
        _ => {
            return Err(Error::UnsupportedVariant(
                "level probabilities need an analytic pmf backend",
            ))
        }
    };
    let sd = m.variance.max(0.0).sqrt();
    let hi = (m.mean + 12.0 * sd).ceil() as i64 + 20;
    let lo = if spec.variant.is_difference() {
        (m.mean - 12.0 * sd).floor() as i64 - 20
    } else {
        0
    };
    Ok((lo, hi.max(0)))
}

/// Pmf table on `[lo, hi]` from the requested backend.
fn pmf_window(
    spec: &ProcessSpec,
    t: f64,
    backend: PmfBackend,
    lo: i64,
    hi: i64,
) -> Result<PmfTable> {
    match (spec.variant, backend) {
        (Variant::Gcp | Variant::Ngcp, PmfBackend::Convolution) => {
            ngcp_pmf(&spec.up, t, hi.max(0) as usize)
        }
        (Variant::Gsp | Variant::Ngsp, PmfBackend::Convolution) => {
            ngsp_pmf_convolution(spec, t, lo, hi, DEFAULT_TAIL_TOL)
        }
        (Variant::Gsp | Variant::Ngsp, PmfBackend::Bessel) => ngsp_pmf_bessel(spec, t, lo, hi),
        (Variant::Nhgfcp, PmfBackend::MittagLeffler) => {
            nhgfcp_pmf(&spec.up, spec.alpha, t, hi.max(0) as usize)
        }
        (Variant::Nhgfsp, PmfBackend::MittagLeffler) => nhgfsp_pmf(spec, t, lo, hi),
        _ => Err(Error::Domain(
            "this pmf backend is not defined for the given variant",
        )),
    }
}

/// `P(X(t) >= n)` from the chosen pmf backend.
///
/// For counting variants this is the distribution function of the arrival
/// time of state `n` evaluated at `t`.
pub fn arrival_time_cdf(spec: &ProcessSpec, n: i64, t: f64, backend: PmfBackend) -> Result<f64> {
    spec.validate()?;
    check_time(t)?;
    if n.abs() > LEVEL_CAP {
        return Err(Error::Domain("level is outside the supported range"));
    }
    let (lo, hi) = support_bounds(spec, t)?;
    if n > hi {
        return Ok(0.0);
    }
    if n <= lo {
        return Ok(1.0);
    }
    let table = pmf_window(spec, t, backend, n.max(lo), hi)?;
    let mut total = 0.0;
    for (x, p) in table.iter() {
        if x >= n {
            total += p;
        }
    }
    Ok(total.min(1.0))
}

/// `sum_{x = 0}^{n - 1} P(X(t) = x)` from the chosen pmf backend; zero for
/// `n <= 0`.
///
/// For counting variants this is the survival function of the first time
/// the process reaches `n`.
pub fn first_passage_survival(
    spec: &ProcessSpec,
    n: i64,
    t: f64,
    backend: PmfBackend,
) -> Result<f64> {
    spec.validate()?;
    check_time(t)?;
    if n <= 0 {
        return Ok(0.0);
    }
    if n > LEVEL_CAP {
        return Err(Error::Domain("level is outside the supported range"));
    }
    let (_, hi) = support_bounds(spec, t)?;
    let upper = (n - 1).min(hi);
    let table = pmf_window(spec, t, backend, 0, upper)?;
    let mut total = 0.0;
    for (x, p) in table.iter() {
        if (0..n).contains(&x) {
            total += p;
        }
    }
    Ok(total.min(1.0))
}
