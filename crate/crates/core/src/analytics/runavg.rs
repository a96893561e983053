//! Characteristic function and moments of the running average
//! `(1/t) integral of X(s) ds over [0, t]` for constant-rate processes.

use num_complex::Complex64;
#[allow(unused_imports)] // trait needed only in pure no_std builds
use num_traits::Float;

use super::MomentSummary;
use crate::error::{Error, Result};
use crate::rates::{ProcessSpec, RateFunction, Variant};

fn require_run_avg(spec: &ProcessSpec) -> Result<()> {
    match spec.variant {
        Variant::RunAvgGcp | Variant::RunAvgGsp => Ok(()),
        _ => Err(Error::UnsupportedVariant(
            "running-average analytics cover only the run_avg variants",
        )),
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain("time must be finite and nonnegative"))
    }
}

fn constant_rates(side: &[RateFunction]) -> Result<alloc::vec::Vec<f64>> {
    side.iter()
        .map(|rf| match rf {
            RateFunction::Constant { rate } => Ok(*rate),
            _ => Err(Error::Domain("running averages need constant rates")),
        })
        .collect()
}

/// `(e^{iz} - 1) / (iz) - 1` evaluated without cancellation trouble away
/// from `z = 0`; the `z = 0` case is handled by the caller.
fn up_kernel(z: f64) -> Complex64 {
    Complex64::new(z.cos() - 1.0, z.sin()) / Complex64::new(0.0, z) - 1.0
}

/// `(1 - e^{-iz}) / (iz) - 1`.
fn down_kernel(z: f64) -> Complex64 {
    Complex64::new(1.0 - z.cos(), z.sin()) / Complex64::new(0.0, z) - 1.0
}

/// Characteristic function of the running average at argument `u`.
///
/// The average over `[0, t]` of a constant-rate process is infinitely
/// divisible with exponent `t * sum over jump sizes` of the kernels above;
/// each arrival at time `s` contributes `(t - s) / t` of its jump.
pub fn running_avg_cf(spec: &ProcessSpec, u: f64, t: f64) -> Result<Complex64> {
    spec.validate()?;
    require_run_avg(spec)?;
    check_time(t)?;
    if !u.is_finite() {
        return Err(Error::Domain("cf argument must be finite"));
    }
    if u == 0.0 {
        return Ok(Complex64::new(1.0, 0.0));
    }
    let up = constant_rates(&spec.up)?;
    let down = constant_rates(&spec.down)?;
    let mut exponent = Complex64::new(0.0, 0.0);
    for (idx, &rate) in up.iter().enumerate() {
        let z = u * (idx + 1) as f64;
        exponent += rate * up_kernel(z);
    }
    for (idx, &rate) in down.iter().enumerate() {
        let z = u * (idx + 1) as f64;
        exponent += rate * down_kernel(z);
    }
    let value = (exponent * t).exp();
    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(Error::Overflow("running-average cf overflowed"))
    }
}

/// Mean, variance, and optional covariance of the running average.
///
/// Averaging scales the underlying mean by 1/2 and the variance by 1/3;
/// the covariance is reported as the variance at the earlier time.
pub fn running_avg_moments(spec: &ProcessSpec, t: f64, s: Option<f64>) -> Result<MomentSummary> {
    spec.validate()?;
    require_run_avg(spec)?;
    check_time(t)?;
    let up = constant_rates(&spec.up)?;
    let down = constant_rates(&spec.down)?;
    let mut drift = 0.0;
    let mut spread = 0.0;
    for (idx, &rate) in up.iter().enumerate() {
        let j = (idx + 1) as f64;
        drift += j * rate;
        spread += j * j * rate;
    }
    for (idx, &rate) in down.iter().enumerate() {
        let j = (idx + 1) as f64;
        drift -= j * rate;
        spread += j * j * rate;
    }
    let covariance = match s {
        Some(s) => {
            check_time(s)?;
            Some(s.min(t) / 3.0 * spread)
        }
        None => None,
    };
    Ok(MomentSummary::new(
        t / 2.0 * drift,
        t / 3.0 * spread,
        covariance,
    ))
}
