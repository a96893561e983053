//! Generating functions and moments of the `alpha = 1` Skellam family.

use alloc::vec::Vec;
#[allow(unused_imports)] // trait needed only in pure no_std builds
use num_traits::Float;

use super::MomentSummary;
use crate::error::{Error, Result};
use crate::rates::{ProcessSpec, Variant};

fn require_plain(spec: &ProcessSpec) -> Result<()> {
    match spec.variant {
        Variant::Gcp | Variant::Gsp | Variant::Ngcp | Variant::Ngsp => Ok(()),
        _ => Err(Error::UnsupportedVariant(
            "generating functions and moments here cover the alpha = 1 variants",
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

/// Probability generating function `E[u^{S(t)}]` for `u` in `(0, 1]`.
/// `u = 0` is excluded because the down-side contributes `u^{-j}` factors.
pub fn ngsp_pgf(spec: &ProcessSpec, u: f64, t: f64) -> Result<f64> {
    spec.validate()?;
    require_plain(spec)?;
    check_time(t)?;
    if !(u > 0.0 && u <= 1.0) {
        return Err(Error::Domain("pgf argument must lie in (0, 1]"));
    }
    let up = spec.up_cumulative(t)?;
    let down = spec.down_cumulative(t)?;
    let mut exponent = 0.0;
    for (idx, &w) in up.iter().enumerate() {
        let j = (idx + 1) as i32;
        exponent += w * (u.powi(j) - 1.0);
    }
    for (idx, &w) in down.iter().enumerate() {
        let j = (idx + 1) as i32;
        exponent += w * (u.powi(-j) - 1.0);
    }
    Ok(exponent.exp())
}

/// Moment generating function `E[exp(u S(t))]`, defined for every real `u`.
pub fn ngsp_mgf(spec: &ProcessSpec, u: f64, t: f64) -> Result<f64> {
    spec.validate()?;
    require_plain(spec)?;
    check_time(t)?;
    if !u.is_finite() {
        return Err(Error::Domain("mgf argument must be finite"));
    }
    let up = spec.up_cumulative(t)?;
    let down = spec.down_cumulative(t)?;
    let mut exponent = 0.0;
    for (idx, &w) in up.iter().enumerate() {
        let j = (idx + 1) as f64;
        exponent += w * ((u * j).exp() - 1.0);
    }
    for (idx, &w) in down.iter().enumerate() {
        let j = (idx + 1) as f64;
        exponent += w * ((-u * j).exp() - 1.0);
    }
    let value = exponent.exp();
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Overflow("mgf overflowed"))
    }
}

/// Mean and variance at time `t`:
/// `E = sum_j j (L_j - T_j)`, `V = sum_j j^2 (L_j + T_j)`.
pub fn ngsp_moments(spec: &ProcessSpec, t: f64) -> Result<MomentSummary> {
    spec.validate()?;
    require_plain(spec)?;
    check_time(t)?;
    let up = spec.up_cumulative(t)?;
    let down = spec.down_cumulative(t)?;
    let mut mean = 0.0;
    let mut variance = 0.0;
    for (idx, &w) in up.iter().enumerate() {
        let j = (idx + 1) as f64;
        mean += j * w;
        variance += j * j * w;
    }
    for (idx, &w) in down.iter().enumerate() {
        let j = (idx + 1) as f64;
        mean -= j * w;
        variance += j * j * w;
    }
    Ok(MomentSummary::new(mean, variance, None))
}

/// Covariance `Cov[S(s), S(t)] = V(s min t)`, from independent increments.
pub fn ngsp_covariance(spec: &ProcessSpec, s: f64, t: f64) -> Result<f64> {
    check_time(s)?;
    check_time(t)?;
    Ok(ngsp_moments(spec, s.min(t))?.variance)
}

/// Falling factorial `x (x-1) ... (x-i+1)` with `ff(x, 0) = 1`.
fn falling_factorial(x: f64, i: usize) -> f64 {
    let mut acc = 1.0;
    for step in 0..i {
        acc *= x - step as f64;
    }
    acc
}

/// `r`-th factorial moment `E[S (S-1) ... (S-r+1)]` by the recursion
/// `psi(r) = sum_{m=0}^{r-1} C(r-1, m) psi(m) phi(r-m)` with
/// `phi(i) = sum_j (L_j ff(j, i) + T_j ff(-j, i))` and `psi(0) = 1`.
pub fn factorial_moment(spec: &ProcessSpec, r: usize, t: f64) -> Result<f64> {
    spec.validate()?;
    require_plain(spec)?;
    check_time(t)?;
    if r == 0 {
        return Ok(1.0);
    }
    let up = spec.up_cumulative(t)?;
    let down = spec.down_cumulative(t)?;
    let phi = |i: usize| -> f64 {
        let mut acc = 0.0;
        for (idx, &w) in up.iter().enumerate() {
            acc += w * falling_factorial((idx + 1) as f64, i);
        }
        for (idx, &w) in down.iter().enumerate() {
            acc += w * falling_factorial(-((idx + 1) as f64), i);
        }
        acc
    };
    let mut psi = Vec::with_capacity(r + 1);
    psi.push(1.0);
    // Pascal row of C(i-1, m) maintained incrementally
    for i in 1..=r {
        let mut binom = 1.0;
        let mut acc = 0.0;
        for (m, &psi_m) in psi.iter().enumerate().take(i) {
            acc += binom * psi_m * phi(i - m);
            binom *= (i - 1 - m) as f64 / (m + 1) as f64;
        }
        psi.push(acc);
    }
    Ok(psi[r])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::pmf::ngsp_pmf_convolution;
    use crate::rates::RateFunction;
    use approx::assert_relative_eq;

    fn constant_spec(variant: Variant, up: &[f64], down: &[f64]) -> ProcessSpec {
        ProcessSpec {
            variant,
            k: up.len().max(down.len()),
            up: up
                .iter()
                .map(|&rate| RateFunction::Constant { rate })
                .collect(),
            down: down
                .iter()
                .map(|&rate| RateFunction::Constant { rate })
                .collect(),
            alpha: 1.0,
        }
    }

    #[test]
    fn pgf_boundary_values() {
        let spec = constant_spec(Variant::Ngsp, &[0.4, 0.3], &[0.2, 0.5]);
        assert_relative_eq!(ngsp_pgf(&spec, 1.0, 2.0).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(ngsp_pgf(&spec, 0.5, 0.0).unwrap(), 1.0, max_relative = 1e-14);
        assert!(ngsp_pgf(&spec, 0.0, 1.0).is_err());
        assert!(ngsp_pgf(&spec, 1.5, 1.0).is_err());
    }

    #[test]
    fn pgf_matches_pmf_summation() {
        let spec = constant_spec(Variant::Ngsp, &[0.6, 0.2], &[0.3, 0.4]);
        let t = 1.0;
        let u = 0.5_f64;
        let table = ngsp_pmf_convolution(&spec, t, -60, 60, 1e-15).unwrap();
        // sum u^n p(n); negative n contribute u^{-|n|}, finite because the
        // down-side tail decays factorially against the geometric growth
        let mut total = 0.0;
        for (n, p) in table.iter() {
            total += u.powi(n as i32) * p;
        }
        assert_relative_eq!(ngsp_pgf(&spec, u, t).unwrap(), total, max_relative = 1e-9);
    }

    #[test]
    fn mgf_at_log_u_equals_pgf() {
        let spec = constant_spec(Variant::Ngsp, &[0.7, 0.1, 0.2], &[0.3, 0.2, 0.4]);
        for &u in &[0.3, 0.6, 0.9] {
            let via_mgf = ngsp_mgf(&spec, f64::ln(u), 1.7).unwrap();
            let via_pgf = ngsp_pgf(&spec, u, 1.7).unwrap();
            assert_relative_eq!(via_mgf, via_pgf, max_relative = 1e-12);
        }
    }

    #[test]
    fn mgf_at_zero_is_one() {
        let spec = constant_spec(Variant::Gsp, &[1.0], &[2.0]);
        assert_relative_eq!(ngsp_mgf(&spec, 0.0, 3.0).unwrap(), 1.0, max_relative = 1e-14);
    }

    #[test]
    fn moments_of_k1_skellam() {
        let spec = constant_spec(Variant::Gsp, &[1.2], &[0.8]);
        let m = ngsp_moments(&spec, 2.0).unwrap();
        assert_relative_eq!(m.mean, 2.0 * (1.2 - 0.8), max_relative = 1e-14);
        assert_relative_eq!(m.variance, 2.0 * (1.2 + 0.8), max_relative = 1e-14);
        assert_relative_eq!(m.dispersion_index, m.variance - m.mean, max_relative = 1e-14);
        let zero = ngsp_moments(&spec, 0.0).unwrap();
        assert_eq!(zero.mean, 0.0);
        assert_eq!(zero.variance, 0.0);
    }

    #[test]
    fn moments_match_pmf_table() {
        let spec = constant_spec(Variant::Ngsp, &[0.5, 0.3], &[0.4, 0.1]);
        let t = 1.4;
        let m = ngsp_moments(&spec, t).unwrap();
        let table = ngsp_pmf_convolution(&spec, t, -40, 40, 1e-15).unwrap();
        assert_relative_eq!(table.mean(), m.mean, max_relative = 1e-9);
        assert_relative_eq!(table.variance(), m.variance, max_relative = 1e-9);
    }

    #[test]
    fn covariance_is_variance_at_earlier_time() {
        let spec = constant_spec(Variant::Ngsp, &[0.5, 0.3], &[0.4, 0.1]);
        let c = ngsp_covariance(&spec, 2.0, 5.0).unwrap();
        let v = ngsp_moments(&spec, 2.0).unwrap().variance;
        assert_relative_eq!(c, v, max_relative = 1e-14);
        assert_relative_eq!(
            ngsp_covariance(&spec, 5.0, 2.0).unwrap(),
            c,
            max_relative = 1e-14
        );
    }

    #[test]
    fn first_factorial_moment_is_the_mean() {
        let spec = constant_spec(Variant::Ngsp, &[0.5, 0.3, 0.7], &[0.4, 0.1, 0.2]);
        let t = 1.9;
        assert_relative_eq!(
            factorial_moment(&spec, 1, t).unwrap(),
            ngsp_moments(&spec, t).unwrap().mean,
            max_relative = 1e-12
        );
    }

    #[test]
    fn second_factorial_moment_matches_pmf() {
        let spec = constant_spec(Variant::Ngsp, &[0.5, 0.3], &[0.4, 0.1]);
        let t = 1.1;
        let table = ngsp_pmf_convolution(&spec, t, -40, 40, 1e-15).unwrap();
        let mut expect = 0.0;
        for (n, p) in table.iter() {
            expect += (n as f64) * (n as f64 - 1.0) * p;
        }
        assert_relative_eq!(
            factorial_moment(&spec, 2, t).unwrap(),
            expect,
            max_relative = 1e-8
        );
    }

    #[test]
    fn factorial_moments_vanish_at_time_zero() {
        let spec = constant_spec(Variant::Ngsp, &[0.5], &[0.4]);
        assert_eq!(factorial_moment(&spec, 0, 0.0).unwrap(), 1.0);
        for r in 1..=4 {
            assert_eq!(factorial_moment(&spec, r, 0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn exponential_rates_match_frozen_figure_values() {
        // three GM pairs; at t = 1 both aggregates equal 17.872413572115818,
        // mean 0.979337046754160 and variance 177.249022683659217
        let up = [
            RateFunction::GompertzMakeham {
                a: 0.6,
                b: 0.1,
                mu: 5.0,
            },
            RateFunction::GompertzMakeham {
                a: 0.7,
                b: 0.2,
                mu: 4.0,
            },
            RateFunction::GompertzMakeham {
                a: 0.4,
                b: 0.3,
                mu: 7.0,
            },
        ];
        let down = [
            RateFunction::GompertzMakeham {
                a: 0.7,
                b: 0.2,
                mu: 4.0,
            },
            RateFunction::GompertzMakeham {
                a: 0.4,
                b: 0.3,
                mu: 7.0,
            },
            RateFunction::GompertzMakeham {
                a: 0.6,
                b: 0.1,
                mu: 5.0,
            },
        ];
        let spec = ProcessSpec {
            variant: Variant::Ngsp,
            k: 3,
            up: up.to_vec(),
            down: down.to_vec(),
            alpha: 1.0,
        };
        let agg = spec.aggregate(1.0).unwrap();
        assert_relative_eq!(agg.a, 17.872413572115818, max_relative = 1e-12);
        assert_relative_eq!(agg.b, 17.872413572115818, max_relative = 1e-12);
        let m = ngsp_moments(&spec, 1.0).unwrap();
        assert_relative_eq!(m.mean, 0.979337046754160, max_relative = 1e-12);
        assert_relative_eq!(m.variance, 177.249022683659217, max_relative = 1e-12);
    }

    #[test]
    fn fractional_variant_is_rejected() {
        let spec = ProcessSpec {
            variant: Variant::Gfsp,
            k: 1,
            up: alloc::vec![RateFunction::Constant { rate: 1.0 }],
            down: alloc::vec![RateFunction::Constant { rate: 1.0 }],
            alpha: 0.7,
        };
        assert!(ngsp_moments(&spec, 1.0).is_err());
        assert!(ngsp_pgf(&spec, 0.5, 1.0).is_err());
    }
}
