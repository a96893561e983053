//! State probabilities of the counting and Skellam laws at `alpha = 1`.

use alloc::vec::Vec;
#[allow(unused_imports)] // trait needed only in pure no_std builds
use num_traits::Float;

use super::{PmfBackend, PmfTable};
use crate::error::{Error, Result};
use crate::rates::{ProcessSpec, RateFunction, Variant};
use crate::specfun::{bessel_i, ln_gamma, SeriesControl};

/// Convolution truncation default when the operation takes no tolerance.
pub(crate) const DEFAULT_TAIL_TOL: f64 = 1e-12;

/// Truncation growth cap for the adaptive convolution support.
const CONV_TERM_CAP: usize = 1_000_000;

fn require_skellam_plain(spec: &ProcessSpec) -> Result<()> {
    match spec.variant {
        Variant::Gsp | Variant::Ngsp => Ok(()),
        _ => Err(Error::UnsupportedVariant(
            "pmf backends handle the alpha = 1 Skellam variants gsp, ngsp",
        )),
    }
}

pub(crate) fn cumulative_weights(side: &[RateFunction], t: f64) -> Result<Vec<f64>> {
    side.iter().map(|rf| rf.cumulative(t)).collect()
}

/// Counting pmf q(0..=n_max) from per-size cumulative weights, by the
/// recurrence n q(n) = sum_j j w_j q(n - j) seeded with q(0) = exp(-sum w).
pub(crate) fn counting_pmf_from_weights(weights: &[f64], n_max: usize) -> Vec<f64> {
    let total: f64 = weights.iter().sum();
    let mut q = alloc::vec![0.0; n_max + 1];
    q[0] = (-total).exp();
    for n in 1..=n_max {
        let mut acc = 0.0;
        for (idx, &w) in weights.iter().enumerate() {
            let j = idx + 1;
            if j > n {
                break;
            }
            acc += j as f64 * w * q[n - j];
        }
        q[n] = acc / n as f64;
    }
    q
}

/// Counting-process pmf on `0..=n_max` built by the jump-size recurrence.
pub fn ngcp_pmf(up: &[RateFunction], t: f64, n_max: usize) -> Result<PmfTable> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain("pmf time must be finite and nonnegative"));
    }
    for rf in up {
        rf.validate()?;
    }
    let weights = cumulative_weights(up, t)?;
    let probs = counting_pmf_from_weights(&weights, n_max);
    let sum: f64 = probs.iter().sum();
    Ok(PmfTable {
        t,
        n_min: 0,
        n_max: n_max as i64,
        probs,
        tail_bound: (1.0 - sum).max(0.0),
        backend: PmfBackend::Convolution,
        poisson_limit: false,
    })
}

/// Shared convolution pipeline: difference of two counting pmfs built from
/// cumulative weight vectors.
pub(crate) fn skellam_convolution_from_weights(
    up: &[f64],
    down: &[f64],
    t_label: f64,
    n_min: i64,
    n_max: i64,
    tail_tol: f64,
) -> Result<PmfTable> {
    if n_min > n_max {
        return Err(Error::Domain("pmf window has n_min > n_max"));
    }
    if !(tail_tol > 0.0) {
        return Err(Error::Domain("tail tolerance must be positive"));
    }
    // grow the one-sided supports until both counting tails are inside tol
    let pad = n_max.unsigned_abs().max(n_min.unsigned_abs()) as usize;
    let mut m = 32;
    let (q_up, q_down) = loop {
        let q_up = counting_pmf_from_weights(up, m + pad);
        let q_down = counting_pmf_from_weights(down, m + pad);
        let tail_up = 1.0 - q_up.iter().sum::<f64>();
        let tail_down = 1.0 - q_down.iter().sum::<f64>();
        if tail_up < tail_tol && tail_down < tail_tol {
            break (q_up, q_down);
        }
        m *= 2;
        if m + pad > CONV_TERM_CAP {
            return Err(Error::NonConvergence {
                partial: tail_up.max(tail_down),
                terms: m as u32,
            });
        }
    };
    let mut probs = Vec::with_capacity((n_max - n_min + 1) as usize);
    for n in n_min..=n_max {
        let mut p = 0.0;
        for (mm, &qd) in q_down.iter().enumerate() {
            let idx = mm as i64 + n;
            if idx < 0 {
                continue;
            }
            let idx = idx as usize;
            if idx >= q_up.len() {
                break;
            }
            p += q_up[idx] * qd;
        }
        probs.push(p);
    }
    let sum: f64 = probs.iter().sum();
    Ok(PmfTable {
        t: t_label,
        n_min,
        n_max,
        probs,
        tail_bound: (1.0 - sum).max(0.0),
        backend: PmfBackend::Convolution,
        poisson_limit: false,
    })
}

/// Skellam pmf as the discrete convolution of the two counting pmfs. The
/// trusted backend: exact up to the reported tail bound for every `k`.
pub fn ngsp_pmf_convolution(
    spec: &ProcessSpec,
    t: f64,
    n_min: i64,
    n_max: i64,
    tail_tol: f64,
) -> Result<PmfTable> {
    spec.validate()?;
    require_skellam_plain(spec)?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain("pmf time must be finite and nonnegative"));
    }
    let up = cumulative_weights(&spec.up, t)?;
    let down = cumulative_weights(&spec.down, t)?;
    skellam_convolution_from_weights(&up, &down, t, n_min, n_max, tail_tol)
}

/// Poisson mass `exp(-a) a^n / n!` in log space.
fn poisson_prob(a: f64, n: u64) -> f64 {
    if a == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    // ln_gamma cannot fail for finite positive arguments
    let ln_fact = ln_gamma(n as f64 + 1.0).unwrap_or(f64::INFINITY);
    (-a + n as f64 * a.ln() - ln_fact).exp()
}

/// Skellam pmf in the collapsed Bessel form
/// `exp(-(A+B)) (A/B)^{n/2} I_{|n|}(2 sqrt(AB))` over the aggregates.
///
/// Exact for `k = 1`; for larger `k` it is a different law than the
/// convolution backend (its variance is `A + B`, not the jump-weighted sum)
/// and the verification suite reports that discrepancy. A zero aggregate on
/// either side degenerates to the Poisson limit, flagged by `poisson_limit`.
pub fn ngsp_pmf_bessel(spec: &ProcessSpec, t: f64, n_min: i64, n_max: i64) -> Result<PmfTable> {
    spec.validate()?;
    require_skellam_plain(spec)?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain("pmf time must be finite and nonnegative"));
    }
    if n_min > n_max {
        return Err(Error::Domain("pmf window has n_min > n_max"));
    }
    let agg = spec.aggregate(t)?;
    let (a, b) = (agg.a, agg.b);
    let mut probs = Vec::with_capacity((n_max - n_min + 1) as usize);
    let poisson_limit = a == 0.0 || b == 0.0;
    if poisson_limit {
        for n in n_min..=n_max {
            let p = if b == 0.0 {
                if n >= 0 {
                    poisson_prob(a, n as u64)
                } else {
                    0.0
                }
            } else if n <= 0 {
                poisson_prob(b, (-n) as u64)
            } else {
                0.0
            };
            probs.push(p);
        }
    } else {
        let ctl = SeriesControl::default();
        let front = -(a + b);
        let half_log_ratio = 0.5 * (a.ln() - b.ln());
        let z = 2.0 * (a * b).sqrt();
        for n in n_min..=n_max {
            let order = n.unsigned_abs().min(i32::MAX as u64) as i32;
            let bessel = bessel_i(order, z, ctl)?;
            let p = (front + n as f64 * half_log_ratio).exp() * bessel;
            if !p.is_finite() {
                return Err(Error::Overflow("Bessel-form pmf entry overflowed"));
            }
            probs.push(p);
        }
    }
    let sum: f64 = probs.iter().sum();
    Ok(PmfTable {
        t,
        n_min,
        n_max,
        probs,
        tail_bound: (1.0 - sum).max(0.0),
        backend: PmfBackend::Bessel,
        poisson_limit,
    })
}

/// Pmf of the increment over `(v, v+t]`, i.e. the same convolution law with
/// every cumulative weight replaced by its increment on that interval.
/// `v = 0` reproduces the time-`t` pmf; constant rates make the table
/// independent of `v` (stationary increments).
pub fn increment_pmf(
    spec: &ProcessSpec,
    t: f64,
    v: f64,
    n_min: i64,
    n_max: i64,
) -> Result<PmfTable> {
    spec.validate()?;
    require_skellam_plain(spec)?;
    if !(t >= 0.0) || !(v >= 0.0) {
        return Err(Error::Domain("increment pmf needs t >= 0 and v >= 0"));
    }
    let up: Vec<f64> = spec
        .up
        .iter()
        .map(|rf| rf.increment(v, t + v))
        .collect::<Result<_>>()?;
    let down: Vec<f64> = spec
        .down
        .iter()
        .map(|rf| rf.increment(v, t + v))
        .collect::<Result<_>>()?;
    skellam_convolution_from_weights(&up, &down, t, n_min, n_max, DEFAULT_TAIL_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn constant_spec(variant: Variant, up: &[f64], down: &[f64]) -> ProcessSpec {
        ProcessSpec {
            variant,
            k: up.len(),
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
    fn counting_at_time_zero_is_point_mass() {
        let up = [RateFunction::Constant { rate: 0.7 }];
        let table = ngcp_pmf(&up, 0.0, 5).unwrap();
        assert_eq!(table.prob(0), 1.0);
        assert_eq!(table.tail_bound, 0.0);
        table.check_normalization().unwrap();
    }

    #[test]
    fn counting_k1_is_poisson() {
        let up = [RateFunction::Constant { rate: 1.3 }];
        let table = ngcp_pmf(&up, 2.0, 25).unwrap();
        let lam = 2.6_f64;
        for n in 0..=25u64 {
            let expect = (-lam + n as f64 * lam.ln() - ln_gamma(n as f64 + 1.0).unwrap()).exp();
            assert_relative_eq!(table.prob(n as i64), expect, max_relative = 1e-12);
        }
        table.check_normalization().unwrap();
    }

    #[test]
    fn counting_matches_direct_enumeration() {
        // brute force over occupation vectors (x1, x2, x3) with
        // 1 x1 + 2 x2 + 3 x3 = n: q(n) = e^{-L} prod L_j^{x_j} / x_j!
        let rates = [0.1, 0.3, 0.2];
        let up: Vec<RateFunction> = rates
            .iter()
            .map(|&rate| RateFunction::Constant { rate })
            .collect();
        let table = ngcp_pmf(&up, 1.0, 8).unwrap();
        let total: f64 = rates.iter().sum();
        let fact = |x: usize| (1..=x).map(|i| i as f64).product::<f64>();
        for n in 0..=8usize {
            let mut q = 0.0;
            for x3 in 0..=n / 3 {
                for x2 in 0..=(n - 3 * x3) / 2 {
                    let rem = n - 3 * x3 - 2 * x2;
                    let x1 = rem;
                    q += rates[0].powi(x1 as i32) / fact(x1)
                        * rates[1].powi(x2 as i32)
                        / fact(x2)
                        * rates[2].powi(x3 as i32)
                        / fact(x3);
                }
            }
            q *= (-total).exp();
            assert_relative_eq!(table.prob(n as i64), q, max_relative = 1e-12);
        }
    }

    #[test]
    fn convolution_point_mass_at_time_zero() {
        let spec = constant_spec(Variant::Gsp, &[1.0, 0.5], &[0.5, 1.0]);
        let table = ngsp_pmf_convolution(&spec, 0.0, -5, 5, 1e-12).unwrap();
        assert_eq!(table.prob(0), 1.0);
        table.check_normalization().unwrap();
    }

    #[test]
    fn convolution_symmetric_spec_is_symmetric() {
        let spec = constant_spec(Variant::Gsp, &[0.4, 0.7], &[0.4, 0.7]);
        let table = ngsp_pmf_convolution(&spec, 1.5, -12, 12, 1e-13).unwrap();
        for n in 0..=12 {
            assert_relative_eq!(table.prob(n), table.prob(-n), max_relative = 1e-12);
        }
        table.check_normalization().unwrap();
    }

    #[test]
    fn backends_agree_at_k1() {
        let spec = constant_spec(Variant::Ngsp, &[1.2], &[0.8]);
        let conv = ngsp_pmf_convolution(&spec, 1.0, -10, 10, 1e-14).unwrap();
        let bessel = ngsp_pmf_bessel(&spec, 1.0, -10, 10).unwrap();
        for n in -10..=10 {
            assert!(
                (conv.prob(n) - bessel.prob(n)).abs() < 1e-10,
                "n = {n}: {} vs {}",
                conv.prob(n),
                bessel.prob(n)
            );
        }
        assert!(!bessel.poisson_limit);
    }

    #[test]
    fn bessel_center_value_at_unit_aggregates() {
        // p(0) = exp(-2) I_0(2) for A = B = 1
        let spec = constant_spec(Variant::Ngsp, &[1.0], &[1.0]);
        let table = ngsp_pmf_bessel(&spec, 1.0, -8, 8).unwrap();
        let expect = (-2.0_f64).exp() * bessel_i(0, 2.0, SeriesControl::default()).unwrap();
        assert_relative_eq!(table.prob(0), expect, max_relative = 1e-13);
        assert_relative_eq!(table.prob(0), 0.30851, max_relative = 1e-4);
        for n in 0..=8 {
            assert_relative_eq!(table.prob(n), table.prob(-n), max_relative = 1e-12);
        }
    }

    #[test]
    fn bessel_degenerates_to_poisson_when_one_side_is_zero() {
        let spec = constant_spec(Variant::Ngsp, &[1.5], &[0.0]);
        let table = ngsp_pmf_bessel(&spec, 2.0, -3, 15).unwrap();
        assert!(table.poisson_limit);
        assert_eq!(table.prob(-1), 0.0);
        let lam = 3.0_f64;
        for n in 0..=15u64 {
            let expect = (-lam + n as f64 * lam.ln() - ln_gamma(n as f64 + 1.0).unwrap()).exp();
            assert_relative_eq!(table.prob(n as i64), expect, max_relative = 1e-12);
        }
        table.check_normalization().unwrap();
    }

    #[test]
    fn recurrence_holds_on_convolution_table() {
        // n p(n) = sum_j j (L_j p(n-j) - T_j p(n+j)) for n >= 1
        let spec = constant_spec(Variant::Ngsp, &[0.5, 0.3, 0.4], &[0.2, 0.6, 0.1]);
        let t = 1.3;
        let table = ngsp_pmf_convolution(&spec, t, -30, 30, 1e-14).unwrap();
        for n in 1..=12i64 {
            let mut rhs = 0.0;
            for j in 1..=3i64 {
                let lam = spec.up[(j - 1) as usize].cumulative(t).unwrap();
                let tau = spec.down[(j - 1) as usize].cumulative(t).unwrap();
                rhs += j as f64 * (lam * table.prob(n - j) - tau * table.prob(n + j));
            }
            assert!(
                (n as f64 * table.prob(n) - rhs).abs() < 1e-8,
                "n = {n}: {} vs {}",
                n as f64 * table.prob(n),
                rhs
            );
        }
    }

    #[test]
    fn increment_with_zero_offset_matches_pmf() {
        let spec = constant_spec(Variant::Ngsp, &[1.0, 0.2], &[0.3, 0.5]);
        let a = increment_pmf(&spec, 1.0, 0.0, -9, 9).unwrap();
        let b = ngsp_pmf_convolution(&spec, 1.0, -9, 9, DEFAULT_TAIL_TOL).unwrap();
        for n in -9..=9 {
            assert_relative_eq!(a.prob(n), b.prob(n), max_relative = 1e-12);
        }
    }

    #[test]
    fn increments_are_stationary_for_constant_rates() {
        let spec = constant_spec(Variant::Ngsp, &[1.0, 0.2], &[0.3, 0.5]);
        let a = increment_pmf(&spec, 1.0, 3.0, -9, 9).unwrap();
        let b = increment_pmf(&spec, 1.0, 0.0, -9, 9).unwrap();
        for n in -9..=9 {
            assert_relative_eq!(a.prob(n), b.prob(n), max_relative = 1e-12);
        }
    }

    #[test]
    fn increment_pmf_time_zero_is_point_mass() {
        let spec = constant_spec(Variant::Ngsp, &[1.0], &[0.3]);
        let table = increment_pmf(&spec, 0.0, 2.0, -4, 4).unwrap();
        assert_relative_eq!(table.prob(0), 1.0, max_relative = 1e-12);
    }

    #[test]
    fn counting_variant_is_rejected_by_skellam_backends() {
        let spec = constant_spec(Variant::Ngcp, &[1.0], &[]);
        assert!(ngsp_pmf_convolution(&spec, 1.0, -2, 2, 1e-12).is_err());
        assert!(ngsp_pmf_bessel(&spec, 1.0, -2, 2).is_err());
    }
}
