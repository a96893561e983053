//! Fractional-family analytics: inverse-subordinator moments, the
//! fractional Poisson backbone, and the time-changed Skellam laws.
//!
//! Everything with a closed form is evaluated in f64 with the special
//! functions from this crate; the one operation without a closed form
//! (moments under a general rate function composed with the random clock)
//! falls back to Monte Carlo over exact clock marginals and reports
//! standard errors alongside the estimates.

use alloc::vec;
use alloc::vec::Vec;
#[allow(unused_imports)] // trait needed only in pure no_std builds
use num_traits::Float;

use super::pmf::cumulative_weights;
use super::{MomentSummary, PmfBackend, PmfTable};
use crate::error::{Error, Result};
use crate::rates::{ProcessSpec, RateFunction, Variant};
use crate::samplers::{sample_inverse_subordinator, RngStream};
use crate::specfun::{incomplete_beta, ln_gamma, mittag_leffler, recip_gamma, SeriesControl};

/// Monte Carlo budget for moments that have no closed form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct McControl {
    /// Number of independent clock draws (or clock paths for covariances).
    pub samples: usize,
    /// Base seed for the dedicated sampling stream.
    pub seed: u64,
}

impl Default for McControl {
    fn default() -> Self {
        McControl {
            samples: 100_000,
            seed: 0,
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::Domain("alpha must lie in (0, 1]"))
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain("time must be finite and nonnegative"))
    }
}

/// Mean of the inverse stable clock: `E[Y(t)] = t^alpha / Gamma(1 + alpha)`.
pub fn subordinator_mean(alpha: f64, t: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_time(t)?;
    Ok(t.powf(alpha) * recip_gamma(1.0 + alpha))
}

/// Variance of the inverse stable clock:
/// `V[Y(t)] = t^{2 alpha} (2 / Gamma(1 + 2 alpha) - 1 / Gamma(1 + alpha)^2)`.
pub fn subordinator_variance(alpha: f64, t: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_time(t)?;
    let rg1 = recip_gamma(1.0 + alpha);
    let v = 2.0 * recip_gamma(1.0 + 2.0 * alpha) - rg1 * rg1;
    // the coefficient is >= 0 but cancels to rounding noise as alpha -> 1
    Ok(t.powf(2.0 * alpha) * v.max(0.0))
}

/// Covariance of the inverse stable clock at two times: with `a <= b`,
///
/// ```text
/// Cov[Y(a), Y(b)] = ( alpha a^{2a} B(a, a+1)
///                   + alpha b^{2a} B(a, a+1; a/b) - (ab)^a ) / Gamma(1+a)^2
/// ```
///
/// where `B(.,.; x)` is the lower incomplete beta function.
pub fn subordinator_covariance(alpha: f64, s: f64, t: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_time(s)?;
    check_time(t)?;
    if s == 0.0 || t == 0.0 {
        return Ok(0.0);
    }
    if s == t {
        return subordinator_variance(alpha, t);
    }
    let (a, b) = if s < t { (s, t) } else { (t, s) };
    let beta_complete = incomplete_beta(alpha, alpha + 1.0, 1.0)?;
    let beta_partial = incomplete_beta(alpha, alpha + 1.0, a / b)?;
    let rg1 = recip_gamma(1.0 + alpha);
    let core = alpha * a.powf(2.0 * alpha) * beta_complete
        + alpha * b.powf(2.0 * alpha) * beta_partial
        - (a * b).powf(alpha);
    Ok((core * rg1 * rg1).max(0.0))
}

/// Absolute error a pmf entry may carry before the series is rejected.
const NTFPP_ABS_TOL: f64 = 1e-9;
/// Extra series terms allowed past each target state.
const NTFPP_J_EXTRA: usize = 2000;

/// Fractional Poisson pmf on `0..=n_max` by the absorbed alternating series
///
/// ```text
/// p(n) = sum_{j>=n} (-1)^{j-n} C(j, n) x^j / Gamma(alpha j + 1),  x = L^alpha
/// ```
///
/// Terms are built in log space and summed with compensation. The series
/// cancels catastrophically once `x` is large; each entry's absolute error
/// is bounded by the largest term times machine epsilon, and the whole
/// table is rejected with `NonConvergence` when that bound exceeds 1e-9.
pub fn ntfpp_pmf(lambda_t: f64, alpha: f64, n_max: usize) -> Result<PmfTable> {
    check_alpha(alpha)?;
    if !lambda_t.is_finite() || lambda_t < 0.0 {
        return Err(Error::Domain("cumulative rate must be finite and nonnegative"));
    }
    let mut probs = vec![0.0; n_max + 1];
    if lambda_t == 0.0 {
        probs[0] = 1.0;
        return Ok(PmfTable {
            t: lambda_t,
            n_min: 0,
            n_max: n_max as i64,
            probs,
            tail_bound: 0.0,
            backend: PmfBackend::MittagLeffler,
            poisson_limit: false,
        });
    }
    let x = lambda_t.powf(alpha);
    let ln_x = x.ln();
    let j_end = n_max + NTFPP_J_EXTRA;
    // ln j! and ln Gamma(alpha j + 1) tables shared by every state
    let mut ln_fact = vec![0.0; j_end + 1];
    for j in 1..=j_end {
        ln_fact[j] = ln_fact[j - 1] + (j as f64).ln();
    }
    let mut ln_gam = vec![0.0; j_end + 1];
    for (j, slot) in ln_gam.iter_mut().enumerate() {
        *slot = ln_gamma(alpha * j as f64 + 1.0)?;
    }
    for (n, slot) in probs.iter_mut().enumerate() {
        let mut sum = 0.0;
        let mut comp = 0.0;
        let mut max_abs = 0.0f64;
        let mut small_streak = 0;
        let mut terms = 0u32;
        for j in n..=j_end {
            let ln_t = ln_fact[j] - ln_fact[n] - ln_fact[j - n] + j as f64 * ln_x - ln_gam[j];
            let mut term = if ln_t < -745.0 { 0.0 } else { ln_t.exp() };
            if (j - n) % 2 == 1 {
                term = -term;
            }
            max_abs = max_abs.max(term.abs());
            let y = term - comp;
            let s = sum + y;
            comp = (s - sum) - y;
            sum = s;
            terms += 1;
            if term.abs() <= 1e-16 * sum.abs().max(f64::MIN_POSITIVE) {
                small_streak += 1;
                if small_streak >= 2 && j > n {
                    break;
                }
            } else {
                small_streak = 0;
            }
        }
        if max_abs * 1e-14 > NTFPP_ABS_TOL {
            return Err(Error::NonConvergence {
                partial: sum,
                terms,
            });
        }
        *slot = sum.max(0.0);
    }
    let total: f64 = probs.iter().sum();
    Ok(PmfTable {
        t: lambda_t,
        n_min: 0,
        n_max: n_max as i64,
        probs,
        tail_bound: (1.0 - total).max(0.0),
        backend: PmfBackend::MittagLeffler,
        poisson_limit: false,
    })
}

/// Fractional Poisson pgf `E[u^N] = E_alpha(L^alpha (u - 1))` for u in [0, 1].
pub fn ntfpp_pgf(lambda_t: f64, alpha: f64, u: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if !lambda_t.is_finite() || lambda_t < 0.0 {
        return Err(Error::Domain("cumulative rate must be finite and nonnegative"));
    }
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::Domain("pgf argument must lie in [0, 1]"));
    }
    let z = lambda_t.powf(alpha) * (u - 1.0);
    mittag_leffler(alpha, 1.0, z, SeriesControl::default())
}

fn all_constant(rates: &[RateFunction]) -> bool {
    rates
        .iter()
        .all(|rf| matches!(rf, RateFunction::Constant { .. }))
}

/// Jump-weighted sums at clock value `u`:
/// `m(u) = sum_j j (L_j(u) - T_j(u))`, `v(u) = sum_j j^2 (L_j(u) + T_j(u))`.
fn weighted_sums_at(spec: &ProcessSpec, u: f64) -> Result<(f64, f64)> {
    let up = spec.up_cumulative(u)?;
    let down = spec.down_cumulative(u)?;
    let mut m = 0.0;
    let mut v = 0.0;
    for (idx, &w) in up.iter().enumerate() {
        let j = (idx + 1) as f64;
        m += j * w;
        v += j * j * w;
    }
    for (idx, &w) in down.iter().enumerate() {
        let j = (idx + 1) as f64;
        m -= j * w;
        v += j * j * w;
    }
    if m.is_finite() && v.is_finite() {
        Ok((m, v))
    } else {
        Err(Error::Overflow("cumulative rate overflowed at subordinated time"))
    }
}

fn require_time_changed(spec: &ProcessSpec) -> Result<()> {
    match spec.variant {
        Variant::Gfcp | Variant::Gfsp | Variant::Ngfcp | Variant::Ngfsp => Ok(()),
        _ => Err(Error::UnsupportedVariant(
            "clock-composed moments cover gfcp, gfsp, ngfcp, ngfsp",
        )),
    }
}

/// Mean, variance, and (optionally) `Cov[S(s), S(t)]` of the time-changed
/// process.
///
/// The non-homogeneous difference runs on one clock shared by both
/// components, `S(Y(t))`; the homogeneous difference is built from two
/// components with independent clocks, so its drift term splits into
/// per-side squares instead of the squared net drift. One-sided variants
/// coincide under either reading.
///
/// Constant rates have closed forms through the clock moments. With
/// `alpha = 1` the clock is the identity and the plain formulas apply to
/// any rate function. Every other case is estimated by Monte Carlo:
/// marginals use exact clock draws `Y(t) =d (t / S_alpha)^alpha`, the
/// covariance uses discretized clock paths, and the summary carries
/// standard errors for the estimated fields.
pub fn ngfsp_moments(
    spec: &ProcessSpec,
    t: f64,
    s: Option<f64>,
    mc: &McControl,
) -> Result<MomentSummary> {
    spec.validate()?;
    require_time_changed(spec)?;
    check_time(t)?;
    if let Some(s_val) = s {
        check_time(s_val)?;
    }
    let alpha = spec.alpha;

    if alpha == 1.0 {
        let (m, v) = weighted_sums_at(spec, t)?;
        let cov = match s {
            Some(s_val) => Some(weighted_sums_at(spec, s_val.min(t))?.1),
            None => None,
        };
        return Ok(MomentSummary::new(m, v, cov));
    }

    if all_constant(&spec.up) && all_constant(&spec.down) {
        // per-unit-time weights: S(u) has mean m u and variance v u, so
        // E = m E[Y], V = v E[Y] + d V[Y], Cov = v E[Y(min)] + d Cov[Y,Y],
        // where d is the squared net drift under a shared clock but the sum
        // of squared per-side drifts when the components run their own
        let (m, v) = weighted_sums_at(spec, 1.0)?;
        let drift_sq = if spec.variant == Variant::Gfsp {
            let side_drift = |side: &[RateFunction]| -> Result<f64> {
                let mut total = 0.0;
                for (idx, rf) in side.iter().enumerate() {
                    total += (idx + 1) as f64 * rf.cumulative(1.0)?;
                }
                Ok(total)
            };
            let up = side_drift(&spec.up)?;
            let down = side_drift(&spec.down)?;
            up * up + down * down
        } else {
            m * m
        };
        let ey = subordinator_mean(alpha, t)?;
        let vy = subordinator_variance(alpha, t)?;
        let cov = match s {
            Some(s_val) => {
                let ey_min = subordinator_mean(alpha, s_val.min(t))?;
                let cy = subordinator_covariance(alpha, s_val, t)?;
                Some(v * ey_min + drift_sq * cy)
            }
            None => None,
        };
        return Ok(MomentSummary::new(m * ey, v * ey + drift_sq * vy, cov));
    }

    if mc.samples < 2 {
        return Err(Error::Domain("Monte Carlo moments need at least 2 samples"));
    }
    let n = mc.samples;
    let nf = n as f64;
    let mut rng = RngStream::new(mc.seed, 0);

    // means and variances of m(Y) and v(Y) over exact clock marginals
    let mut ms = Vec::with_capacity(n);
    let mut vs = Vec::with_capacity(n);
    for _ in 0..n {
        let y = if t == 0.0 {
            0.0
        } else {
            (t / rng.stable_standard(alpha)?).powf(alpha)
        };
        let (m_i, v_i) = weighted_sums_at(spec, y)?;
        ms.push(m_i);
        vs.push(v_i);
    }
    let m_bar = ms.iter().sum::<f64>() / nf;
    let v_bar = vs.iter().sum::<f64>() / nf;
    let mut m_var = 0.0;
    for &m_i in &ms {
        m_var += (m_i - m_bar) * (m_i - m_bar);
    }
    m_var /= nf - 1.0;
    let mean = m_bar;
    let mean_se = (m_var / nf).sqrt();
    let variance = v_bar + m_var;

    // delta-method error for the estimator z_bar - m_bar^2, z = v + m^2
    let z_bar = ms.iter().zip(&vs).map(|(&m_i, &v_i)| v_i + m_i * m_i).sum::<f64>() / nf;
    let mut z_var = 0.0;
    let mut zm_cov = 0.0;
    for (&m_i, &v_i) in ms.iter().zip(&vs) {
        let z_i = v_i + m_i * m_i;
        z_var += (z_i - z_bar) * (z_i - z_bar);
        zm_cov += (z_i - z_bar) * (m_i - m_bar);
    }
    z_var /= nf - 1.0;
    zm_cov /= nf - 1.0;
    let var_of_var =
        (z_var + 4.0 * m_bar * m_bar * m_var - 4.0 * m_bar * zm_cov).max(0.0) / nf;
    let variance_se = var_of_var.sqrt();

    let covariance = match s {
        Some(s_val) => Some(mc_covariance(spec, s_val, t, mc)?),
        None => None,
    };

    let mut summary = MomentSummary::new(mean, variance, covariance);
    summary.mean_se = Some(mean_se);
    summary.variance_se = Some(variance_se);
    Ok(summary)
}

/// `Cov[S(Y(s)), S(Y(t))]` by simulating discretized clock paths:
/// `Cov = E[v(Y(min))] + Cov[m(Y(s)), m(Y(t))]`.
fn mc_covariance(spec: &ProcessSpec, s: f64, t: f64, mc: &McControl) -> Result<f64> {
    let horizon = s.max(t);
    if horizon == 0.0 {
        return Ok(0.0);
    }
    let h = horizon / 1024.0;
    let n = mc.samples;
    let nf = n as f64;
    let mut rng = RngStream::new(mc.seed, 1);
    let mut m_lo = Vec::with_capacity(n);
    let mut m_hi = Vec::with_capacity(n);
    let mut v_lo_sum = 0.0;
    let lo = s.min(t);
    for _ in 0..n {
        let path = sample_inverse_subordinator(spec.alpha, horizon, h, &mut rng)?;
        let y_at = |u: f64| -> f64 {
            let idx = ((u / h) as usize).min(path.values.len() - 1);
            path.values[idx]
        };
        let (m_a, v_a) = weighted_sums_at(spec, y_at(lo))?;
        let (m_b, _) = weighted_sums_at(spec, y_at(horizon))?;
        m_lo.push(m_a);
        m_hi.push(m_b);
        v_lo_sum += v_a;
    }
    let a_bar = m_lo.iter().sum::<f64>() / nf;
    let b_bar = m_hi.iter().sum::<f64>() / nf;
    let mut cov = 0.0;
    for (&a, &b) in m_lo.iter().zip(&m_hi) {
        cov += (a - a_bar) * (b - b_bar);
    }
    cov /= nf - 1.0;
    Ok(v_lo_sum / nf + cov)
}

/// Largest mark-sum support the compound pmf will enumerate.
const NHGFCP_J_CAP: usize = 2048;

/// Pmf of the one-sided time-changed counting process on `0..=j_max`,
/// through its compound representation: a fractional Poisson number of
/// events whose sizes are i.i.d. with `P{X = j} = L_j(t) / L(t)`.
pub fn nhgfcp_pmf(side: &[RateFunction], alpha: f64, t: f64, j_max: usize) -> Result<PmfTable> {
    check_alpha(alpha)?;
    check_time(t)?;
    if j_max > NHGFCP_J_CAP {
        return Err(Error::Domain("compound pmf support is capped at 2048"));
    }
    for rf in side {
        rf.validate()?;
    }
    let weights = cumulative_weights(side, t)?;
    let total: f64 = weights.iter().sum();
    let mut probs = vec![0.0; j_max + 1];
    if total == 0.0 {
        probs[0] = 1.0;
        return Ok(PmfTable {
            t,
            n_min: 0,
            n_max: j_max as i64,
            probs,
            tail_bound: 0.0,
            backend: PmfBackend::MittagLeffler,
            poisson_limit: false,
        });
    }
    let event_count = ntfpp_pmf(total, alpha, j_max)?;
    let marks: Vec<f64> = weights.iter().map(|&w| w / total).collect();
    // r-fold mark-sum convolutions, truncated at j_max; r events reach at
    // least state r, so r > j_max contributes nothing
    let mut w_r = vec![0.0; j_max + 1];
    w_r[0] = 1.0;
    probs[0] = event_count.prob(0);
    for r in 1..=j_max {
        let mut next = vec![0.0; j_max + 1];
        for (n, &mass) in w_r.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            for (idx, &wj) in marks.iter().enumerate() {
                let target = n + idx + 1;
                if target > j_max {
                    break;
                }
                next[target] += mass * wj;
            }
        }
        w_r = next;
        let p_r = event_count.prob(r as i64);
        if p_r != 0.0 {
            for (slot, &mass) in probs.iter_mut().zip(&w_r) {
                *slot += p_r * mass;
            }
        }
    }
    let sum: f64 = probs.iter().sum();
    Ok(PmfTable {
        t,
        n_min: 0,
        n_max: j_max as i64,
        probs,
        tail_bound: (1.0 - sum).max(0.0),
        backend: PmfBackend::MittagLeffler,
        poisson_limit: false,
    })
}

/// Difference pmf of the two-sided time-changed law on `n_min..=n_max`,
/// the convolution of two independent one-sided tables. The one-sided
/// supports grow until both tails drop below 1e-10 or the support cap is
/// reached, which fails with `NonConvergence`.
pub fn nhgfsp_pmf(spec: &ProcessSpec, t: f64, n_min: i64, n_max: i64) -> Result<PmfTable> {
    spec.validate()?;
    if spec.variant != Variant::Nhgfsp {
        return Err(Error::UnsupportedVariant(
            "difference pmf of the time-changed family covers nhgfsp",
        ));
    }
    check_time(t)?;
    if n_min > n_max {
        return Err(Error::Domain("pmf window has n_min > n_max"));
    }
    const TAIL_TOL: f64 = 1e-10;
    let pad = n_max.unsigned_abs().max(n_min.unsigned_abs()) as usize;
    let mut support = 64;
    let (up, down) = loop {
        let j_max = (support + pad).min(NHGFCP_J_CAP);
        let up = nhgfcp_pmf(&spec.up, spec.alpha, t, j_max)?;
        let down = nhgfcp_pmf(&spec.down, spec.alpha, t, j_max)?;
        if up.tail_bound < TAIL_TOL && down.tail_bound < TAIL_TOL {
            break (up, down);
        }
        if j_max == NHGFCP_J_CAP {
            return Err(Error::NonConvergence {
                partial: up.tail_bound.max(down.tail_bound),
                terms: j_max as u32,
            });
        }
        support *= 2;
    };
    let mut probs = Vec::with_capacity((n_max - n_min + 1) as usize);
    for n in n_min..=n_max {
        let mut p = 0.0;
        for (m, &qd) in down.probs.iter().enumerate() {
            let idx = m as i64 + n;
            if idx < 0 {
                continue;
            }
            if idx > up.n_max {
                break;
            }
            p += up.probs[idx as usize] * qd;
        }
        probs.push(p);
    }
    let sum: f64 = probs.iter().sum();
    Ok(PmfTable {
        t,
        n_min,
        n_max,
        probs,
        tail_bound: (1.0 - sum).max(0.0),
        backend: PmfBackend::MittagLeffler,
        poisson_limit: false,
    })
}

/// Moment generating function of the two-sided time-changed law,
///
/// ```text
/// E[exp(s S(t))] = E_alpha( sum_j L_j(t) (e^{s j} - 1) L(t)^{alpha - 1} )
///                * E_alpha( sum_j T_j(t) (e^{s j} - 1) T(t)^{alpha - 1} )
/// ```
///
/// Both aggregate rates must be positive for the scaling factors to be
/// defined.
pub fn nhgfsp_mgf(spec: &ProcessSpec, s_arg: f64, t: f64) -> Result<f64> {
    spec.validate()?;
    if spec.variant != Variant::Nhgfsp {
        return Err(Error::UnsupportedVariant(
            "the time-changed difference mgf covers nhgfsp",
        ));
    }
    check_time(t)?;
    if !s_arg.is_finite() {
        return Err(Error::Domain("mgf argument must be finite"));
    }
    let up = spec.up_cumulative(t)?;
    let down = spec.down_cumulative(t)?;
    let lam: f64 = up.iter().sum();
    let tau: f64 = down.iter().sum();
    if lam == 0.0 || tau == 0.0 {
        return Err(Error::Domain(
            "the mgf needs both aggregate cumulative rates positive",
        ));
    }
    let mut z_up = 0.0;
    for (idx, &w) in up.iter().enumerate() {
        let j = (idx + 1) as f64;
        z_up += w * ((s_arg * j).exp() - 1.0);
    }
    z_up *= lam.powf(spec.alpha - 1.0);
    let mut z_down = 0.0;
    for (idx, &w) in down.iter().enumerate() {
        let j = (idx + 1) as f64;
        z_down += w * ((s_arg * j).exp() - 1.0);
    }
    z_down *= tau.powf(spec.alpha - 1.0);
    let ctl = SeriesControl::default();
    let value = mittag_leffler(spec.alpha, 1.0, z_up, ctl)?
        * mittag_leffler(spec.alpha, 1.0, z_down, ctl)?;
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::Overflow("mgf overflowed"))
    }
}

/// One-sided compound moments: mean and variance of the time-changed
/// counting process with aggregate `L`, mark moments `m1`, `m2`.
fn compound_side_moments(weights: &[f64], alpha: f64) -> (f64, f64) {
    let total: f64 = weights.iter().sum();
    if total == 0.0 {
        return (0.0, 0.0);
    }
    let mut m1 = 0.0;
    let mut m2 = 0.0;
    for (idx, &w) in weights.iter().enumerate() {
        let j = (idx + 1) as f64;
        m1 += j * w;
        m2 += j * j * w;
    }
    m1 /= total;
    m2 /= total;
    let q = total.powf(alpha) * recip_gamma(1.0 + alpha);
    // 2 Gamma(1+alpha)^2 / Gamma(1+2alpha), the event-count dispersion factor
    let ln_g1 = ln_gamma(1.0 + alpha).unwrap_or(f64::INFINITY);
    let ln_g2 = ln_gamma(1.0 + 2.0 * alpha).unwrap_or(f64::INFINITY);
    let factor = 2.0 * (2.0 * ln_g1 - ln_g2).exp();
    let mean = q * m1;
    let variance = q * (m2 + m1 * m1 * q * (factor - 1.0));
    (mean, variance)
}

/// Mean, variance, and (optionally) covariance of the compound
/// time-changed counting law and its two-sided difference. Covariance is
/// the variance at the earlier time.
pub fn nhgfsp_moments(spec: &ProcessSpec, t: f64, s: Option<f64>) -> Result<MomentSummary> {
    spec.validate()?;
    if !matches!(spec.variant, Variant::Nhgfcp | Variant::Nhgfsp) {
        return Err(Error::UnsupportedVariant(
            "compound time-changed moments cover nhgfcp and nhgfsp",
        ));
    }
    check_time(t)?;
    let at = |u: f64| -> Result<(f64, f64)> {
        let up = compound_side_moments(&spec.up_cumulative(u)?, spec.alpha);
        let down = compound_side_moments(&spec.down_cumulative(u)?, spec.alpha);
        Ok((up.0 - down.0, up.1 + down.1))
    };
    let (mean, variance) = at(t)?;
    let cov = match s {
        Some(s_val) => {
            check_time(s_val)?;
            Some(at(s_val.min(t))?.1)
        }
        None => None,
    };
    Ok(MomentSummary::new(mean, variance, cov))
}

/// Distribution function of the first event of size `j` (1-based) in the
/// time-changed counting process:
///
/// ```text
/// P(H_j <= t) = x E_{alpha, alpha+1}(-x),  x = L_j(t) L(t)^{alpha - 1}
/// ```
///
/// The identity `x E_{alpha,alpha+1}(-x) = 1 - E_alpha(-x)` keeps the
/// value inside [0, 1); the clamp below only absorbs rounding noise.
pub fn waiting_time_cdf(side: &[RateFunction], alpha: f64, j: usize, t: f64) -> Result<f64> {
    check_alpha(alpha)?;
    check_time(t)?;
    if j == 0 || j > side.len() {
        return Err(Error::Domain("jump size index is 1-based and at most k"));
    }
    for rf in side {
        rf.validate()?;
    }
    let weights = cumulative_weights(side, t)?;
    let total: f64 = weights.iter().sum();
    if total == 0.0 {
        return Ok(0.0);
    }
    let x = weights[j - 1] * total.powf(alpha - 1.0);
    if x == 0.0 {
        return Ok(0.0);
    }
    let value = x * mittag_leffler(alpha, alpha + 1.0, -x, SeriesControl::default())?;
    Ok(value.clamp(0.0, 1.0))
}
