//! Rate functions: pointwise intensities lambda_j(t), their cumulatives
//! Lambda_j(t), and the process specification that bundles k up-jump and
//! k down-jump rate functions with the fractional order alpha.

use crate::error::{Error, Result};
use alloc::format;
use alloc::vec::Vec;
#[allow(unused_imports)] // trait needed only in pure no_std builds
use num_traits::Float;

/// A nonnegative intensity with closed-form cumulative.
///
/// `Tabulated` interpolates strictly increasing (t, Lambda) knots
/// linearly; its intensity is the forward-difference slope, which is all
/// the thinning sampler needs.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum RateFunction {
    /// lambda(t) = rate
    Constant { rate: f64 },
    /// Lambda(t) = (t/scale)^shape
    Weibull { scale: f64, shape: f64 },
    /// lambda(t) = a e^{bt} + mu
    GompertzMakeham { a: f64, b: f64, mu: f64 },
    /// piecewise-linear cumulative through (t, Lambda) knots
    Tabulated { knots: Vec<(f64, f64)> },
}

impl RateFunction {
    pub fn validate(&self) -> Result<()> {
        match self {
            RateFunction::Constant { rate } => {
                if !rate.is_finite() || *rate < 0.0 {
                    return Err(Error::InvalidRate("constant rate must be finite and >= 0"));
                }
            }
            RateFunction::Weibull { scale, shape } => {
                // shape = 0 would give Lambda(0) = 1, breaking Lambda(0) = 0
                if !(scale.is_finite() && *scale > 0.0) {
                    return Err(Error::InvalidRate("weibull scale must be finite and > 0"));
                }
                if !(shape.is_finite() && *shape > 0.0) {
                    return Err(Error::InvalidRate("weibull shape must be finite and > 0"));
                }
            }
            RateFunction::GompertzMakeham { a, b, mu } => {
                if !(a.is_finite() && *a > 0.0)
                    || !(b.is_finite() && *b > 0.0)
                    || !(mu.is_finite() && *mu > 0.0)
                {
                    return Err(Error::InvalidRate(
                        "gompertz_makeham requires finite a > 0, b > 0, mu > 0",
                    ));
                }
            }
            RateFunction::Tabulated { knots } => {
                if knots.len() < 2 {
                    return Err(Error::InvalidRate("tabulated rate needs at least 2 knots"));
                }
                if knots[0] != (0.0, 0.0) {
                    return Err(Error::InvalidRate("tabulated rate must start at (0, 0)"));
                }
                for w in knots.windows(2) {
                    let ((t0, v0), (t1, v1)) = (w[0], w[1]);
                    if !(t1.is_finite() && v1.is_finite() && t1 > t0 && v1 > v0) {
                        return Err(Error::InvalidRate(
                            "tabulated knots must be finite and strictly increasing in both coordinates",
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Cumulative rate Lambda(t) = int_0^t lambda(u) du.
    pub fn cumulative(&self, t: f64) -> Result<f64> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::OutOfRange("cumulative requires finite t >= 0"));
        }
        match self {
            RateFunction::Constant { rate } => Ok(rate * t),
            RateFunction::Weibull { scale, shape } => Ok((t / scale).powf(*shape)),
            RateFunction::GompertzMakeham { a, b, mu } => {
                Ok(a * (b * t).exp_m1() / b + mu * t)
            }
            RateFunction::Tabulated { knots } => {
                let (last_t, _) = knots[knots.len() - 1];
                if t > last_t {
                    return Err(Error::OutOfRange("tabulated rate queried beyond its last knot"));
                }
                // binary search for the bracketing segment
                let i = knots.partition_point(|&(kt, _)| kt <= t);
                if i == 0 {
                    return Ok(0.0); // t == 0 handled by first knot
                }
                if i == knots.len() {
                    return Ok(knots[i - 1].1);
                }
                let (t0, v0) = knots[i - 1];
                let (t1, v1) = knots[i];
                Ok(v0 + (v1 - v0) * (t - t0) / (t1 - t0))
            }
        }
    }

    /// Increment Lambda(t) - Lambda(s) for 0 <= s <= t.
    pub fn increment(&self, s: f64, t: f64) -> Result<f64> {
        if !(s >= 0.0) || s > t {
            return Err(Error::OutOfRange("increment requires 0 <= s <= t"));
        }
        // closed forms subtract exactly; max guards the tabulated kind's
        // interpolation rounding
        Ok((self.cumulative(t)? - self.cumulative(s)?).max(0.0))
    }

    /// Pointwise intensity lambda(t). May be infinite (Weibull with
    /// shape < 1 at t = 0); the tabulated kind returns the slope of the
    /// segment containing t (forward difference at knots).
    pub fn intensity(&self, t: f64) -> Result<f64> {
        if !t.is_finite() || t < 0.0 {
            return Err(Error::OutOfRange("intensity requires finite t >= 0"));
        }
        match self {
            RateFunction::Constant { rate } => Ok(*rate),
            RateFunction::Weibull { scale, shape } => {
                if t == 0.0 {
                    return Ok(match shape.partial_cmp(&1.0).unwrap() {
                        core::cmp::Ordering::Less => f64::INFINITY,
                        core::cmp::Ordering::Equal => 1.0 / scale,
                        core::cmp::Ordering::Greater => 0.0,
                    });
                }
                Ok(shape / scale * (t / scale).powf(shape - 1.0))
            }
            RateFunction::GompertzMakeham { a, b, mu } => Ok(a * (b * t).exp() + mu),
            RateFunction::Tabulated { knots } => {
                let (last_t, _) = knots[knots.len() - 1];
                if t >= last_t {
                    return Err(Error::OutOfRange("tabulated rate queried beyond its last knot"));
                }
                let i = knots.partition_point(|&(kt, _)| kt <= t).max(1);
                let (t0, v0) = knots[i - 1];
                let (t1, v1) = knots[i];
                Ok((v1 - v0) / (t1 - t0))
            }
        }
    }

    /// Smallest t with Lambda(t) >= s (exact for constant and Weibull,
    /// bisection + Newton polish for Gompertz-Makeham, inverse linear
    /// interpolation for tabulated).
    pub fn inverse_cumulative(&self, s: f64) -> Result<f64> {
        if !s.is_finite() || s < 0.0 {
            return Err(Error::OutOfRange("inverse_cumulative requires finite s >= 0"));
        }
        if s == 0.0 {
            return Ok(0.0);
        }
        match self {
            RateFunction::Constant { rate } => {
                if *rate == 0.0 {
                    Err(Error::InvalidRate("zero rate has no finite inverse cumulative"))
                } else {
                    Ok(s / rate)
                }
            }
            RateFunction::Weibull { scale, shape } => Ok(scale * s.powf(1.0 / shape)),
            RateFunction::GompertzMakeham { a, b: _, mu } => {
                // lambda >= a + mu > 0, so the root lies in (0, s/(a+mu)]
                let mut hi = s / (a + mu);
                while self.cumulative(hi)? < s {
                    hi *= 2.0;
                }
                let mut lo = 0.0;
                let mut t = hi;
                for _ in 0..200 {
                    let f = self.cumulative(t)? - s;
                    // relative residual, or a bracket already at f64 resolution
                    if f.abs() <= 1e-13 * s || (hi - lo) <= 4.0 * f64::EPSILON * hi {
                        break;
                    }
                    if f > 0.0 {
                        hi = t;
                    } else {
                        lo = t;
                    }
                    let next = t - f / self.intensity(t)?;
                    t = if next > lo && next < hi { next } else { 0.5 * (lo + hi) };
                }
                Ok(t)
            }
            RateFunction::Tabulated { knots } => {
                let (_, last_v) = knots[knots.len() - 1];
                if s > last_v {
                    return Err(Error::OutOfRange("tabulated rate queried beyond its last knot"));
                }
                let i = knots.partition_point(|&(_, v)| v < s);
                let (t1, v1) = knots[i];
                if v1 == s {
                    return Ok(t1);
                }
                let (t0, v0) = knots[i - 1];
                Ok(t0 + (t1 - t0) * (s - v0) / (v1 - v0))
            }
        }
    }

    /// Upper bound for the intensity on [t0, t1], or None when unbounded.
    /// All supported kinds are monotone in t, so the bound sits at an
    /// endpoint.
    pub fn intensity_bound(&self, t0: f64, t1: f64) -> Result<Option<f64>> {
        if !(t0 >= 0.0) || t0 > t1 || !t1.is_finite() {
            return Err(Error::OutOfRange("intensity_bound requires 0 <= t0 <= t1 finite"));
        }
        match self {
            RateFunction::Constant { rate } => Ok(Some(*rate)),
            RateFunction::Weibull { scale: _, shape } => {
                if *shape < 1.0 {
                    // decreasing; unbounded at 0
                    if t0 == 0.0 {
                        return Ok(None);
                    }
                    Ok(Some(self.intensity(t0)?))
                } else {
                    Ok(Some(self.intensity(t1)?))
                }
            }
            RateFunction::GompertzMakeham { .. } => Ok(Some(self.intensity(t1)?)),
            RateFunction::Tabulated { knots } => {
                let (last_t, _) = knots[knots.len() - 1];
                if t1 > last_t {
                    return Err(Error::OutOfRange("tabulated rate queried beyond its last knot"));
                }
                // max slope over overlapping segments
                let mut best: f64 = 0.0;
                for w in knots.windows(2) {
                    let ((a0, v0), (a1, v1)) = (w[0], w[1]);
                    if a1 > t0 && a0 < t1 {
                        best = best.max((v1 - v0) / (a1 - a0));
                    }
                }
                Ok(Some(best))
            }
        }
    }
}

/// Componentwise sums of the up and down cumulatives at a given time.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct AggregateRates {
    /// A = sum_j Lambda_j(t)
    pub a: f64,
    /// B = sum_j T_j(t)
    pub b: f64,
    pub t: f64,
}

/// Process family selector.
///
/// Counting variants carry only up rates; Skellam variants subtract an
/// independent down process; `RunAvg*` are the path running averages.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Gcp,
    Gfcp,
    Ngcp,
    Ngfcp,
    Nhgfcp,
    Gsp,
    Gfsp,
    Ngsp,
    Ngfsp,
    Nhgfsp,
    RunAvgGcp,
    RunAvgGsp,
}

impl Variant {
    /// Variants whose down-rate vector must be present.
    pub fn is_difference(self) -> bool {
        matches!(
            self,
            Variant::Gsp
                | Variant::Gfsp
                | Variant::Ngsp
                | Variant::Ngfsp
                | Variant::Nhgfsp
                | Variant::RunAvgGsp
        )
    }

    /// Variants with an inverse-stable time change (alpha < 1 allowed).
    pub fn is_fractional(self) -> bool {
        matches!(
            self,
            Variant::Gfcp | Variant::Ngfcp | Variant::Nhgfcp | Variant::Gfsp | Variant::Ngfsp | Variant::Nhgfsp
        )
    }

    /// Homogeneous variants: every rate must be constant in time.
    pub fn is_homogeneous(self) -> bool {
        matches!(
            self,
            Variant::Gcp | Variant::Gfcp | Variant::Gsp | Variant::Gfsp | Variant::RunAvgGcp | Variant::RunAvgGsp
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            Variant::Gcp => "gcp",
            Variant::Gfcp => "gfcp",
            Variant::Ngcp => "ngcp",
            Variant::Ngfcp => "ngfcp",
            Variant::Nhgfcp => "nhgfcp",
            Variant::Gsp => "gsp",
            Variant::Gfsp => "gfsp",
            Variant::Ngsp => "ngsp",
            Variant::Ngfsp => "ngfsp",
            Variant::Nhgfsp => "nhgfsp",
            Variant::RunAvgGcp => "run_avg_gcp",
            Variant::RunAvgGsp => "run_avg_gsp",
        }
    }
}

/// Full description of one process: family, max jump size k, per-size
/// rate functions, and fractional order.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessSpec {
    pub variant: Variant,
    pub k: usize,
    pub up: Vec<RateFunction>,
    #[serde(default)]
    pub down: Vec<RateFunction>,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

fn default_alpha() -> f64 {
    1.0
}

impl ProcessSpec {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidSpec(format!("k must be >= 1, got {}", self.k)));
        }
        if self.up.len() != self.k {
            return Err(Error::InvalidSpec(format!(
                "up has {} rate functions, expected k = {}",
                self.up.len(),
                self.k
            )));
        }
        if self.variant.is_difference() {
            if self.down.len() != self.k {
                return Err(Error::InvalidSpec(format!(
                    "down has {} rate functions, expected k = {} for variant {}",
                    self.down.len(),
                    self.k,
                    self.variant.name()
                )));
            }
        } else if !self.down.is_empty() {
            return Err(Error::InvalidSpec(format!(
                "variant {} is a counting process; down must be empty",
                self.variant.name()
            )));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidSpec(format!(
                "alpha must lie in (0, 1], got {}",
                self.alpha
            )));
        }
        if !self.variant.is_fractional() && self.alpha != 1.0 {
            return Err(Error::InvalidSpec(format!(
                "variant {} is not fractional; alpha must be 1",
                self.variant.name()
            )));
        }
        for rf in self.up.iter().chain(self.down.iter()) {
            rf.validate()?;
            if self.variant.is_homogeneous() && !matches!(rf, RateFunction::Constant { .. }) {
                return Err(Error::InvalidSpec(format!(
                    "variant {} is homogeneous; every rate must be constant",
                    self.variant.name()
                )));
            }
        }
        Ok(())
    }

    /// Componentwise cumulative sums A = sum Lambda_j(t), B = sum T_j(t).
    pub fn aggregate(&self, t: f64) -> Result<AggregateRates> {
        let mut a = 0.0;
        for rf in &self.up {
            a += rf.cumulative(t)?;
        }
        let mut b = 0.0;
        for rf in &self.down {
            b += rf.cumulative(t)?;
        }
        Ok(AggregateRates { a, b, t })
    }

    /// Per-size cumulatives (Lambda_1(t), ..., Lambda_k(t)).
    pub fn up_cumulative(&self, t: f64) -> Result<Vec<f64>> {
        self.up.iter().map(|rf| rf.cumulative(t)).collect()
    }

    /// Per-size cumulatives (T_1(t), ..., T_k(t)).
    pub fn down_cumulative(&self, t: f64) -> Result<Vec<f64>> {
        self.down.iter().map(|rf| rf.cumulative(t)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use approx::assert_relative_eq;

    fn gm(a: f64, b: f64, mu: f64) -> RateFunction {
        RateFunction::GompertzMakeham { a, b, mu }
    }

    // Simpson quadrature of a pointwise intensity, used as the oracle for
    // every closed-form cumulative below.
    fn quad_cumulative(rf: &RateFunction, t: f64, n: usize) -> f64 {
        let h = t / n as f64;
        let f = |u: f64| rf.intensity(u).unwrap();
        let mut s = f(0.0) + f(t);
        for i in 1..n {
            s += f(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    #[test]
    fn weibull_linear_case() {
        let rf = RateFunction::Weibull { scale: 1.0, shape: 1.0 };
        assert_relative_eq!(rf.cumulative(3.0).unwrap(), 3.0, epsilon = 1e-15);
    }

    #[test]
    fn gm_zero_at_zero() {
        assert_eq!(gm(0.6, 0.1, 5.0).cumulative(0.0).unwrap(), 0.0);
    }

    #[test]
    fn gm_closed_form_matches_quadrature() {
        let rf = gm(0.6, 0.1, 5.0);
        let closed = rf.cumulative(2.0).unwrap();
        assert_relative_eq!(closed, 6.0 * (0.2f64.exp() - 1.0) + 10.0, epsilon = 1e-12);
        assert_relative_eq!(closed, quad_cumulative(&rf, 2.0, 2_000), epsilon = 1e-10);
    }

    #[test]
    fn weibull_cumulative_matches_quadrature() {
        // smooth shape >= 1 cases where Simpson applies cleanly
        for &(scale, shape) in &[(1.0, 4.0), (2.0, 2.0), (0.5, 1.0)] {
            let rf = RateFunction::Weibull { scale, shape };
            assert_relative_eq!(
                rf.cumulative(1.7).unwrap(),
                quad_cumulative(&rf, 1.7, 2_000),
                max_relative = 1e-9
            );
        }
    }

    #[test]
    fn increment_basics() {
        let rf = RateFunction::Weibull { scale: 2.0, shape: 2.0 };
        assert_eq!(rf.increment(1.3, 1.3).unwrap(), 0.0);
        // (3/2)^2 - (1/2)^2 = 2
        assert_relative_eq!(rf.increment(1.0, 3.0).unwrap(), 2.0, epsilon = 1e-14);
        assert!(rf.increment(3.0, 1.0).is_err());
        // increment(0, t) == cumulative(t)
        for &t in &[0.0, 0.4, 2.0, 57.0] {
            assert_relative_eq!(
                rf.increment(0.0, t).unwrap(),
                rf.cumulative(t).unwrap(),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn tabulated_tracks_sampled_gm() {
        // sample the closed form onto knots, then compare increments
        let src = gm(0.6, 0.1, 5.0);
        let mut knots = vec![];
        for i in 0..=2_000 {
            let t = i as f64 * 0.001;
            knots.push((t, src.cumulative(t).unwrap()));
        }
        let tab = RateFunction::Tabulated { knots };
        tab.validate().unwrap();
        let got = tab.increment(0.5, 1.5).unwrap();
        let want = src.increment(0.5, 1.5).unwrap();
        assert!((got - want).abs() < 1e-3, "{got} vs {want}");
        // inverse round trip within the table
        let s = tab.cumulative(1.234).unwrap();
        assert_relative_eq!(tab.inverse_cumulative(s).unwrap(), 1.234, epsilon = 1e-9);
        // beyond the last knot is an error, not an extrapolation
        assert!(tab.cumulative(2.5).is_err());
        assert!(matches!(tab.cumulative(2.5), Err(Error::OutOfRange(_))));
    }

    #[test]
    fn cumulative_nondecreasing_on_grid() {
        let kinds = [
            RateFunction::Constant { rate: 0.7 },
            RateFunction::Weibull { scale: 1.5, shape: 0.6 },
            RateFunction::Weibull { scale: 1.0, shape: 4.0 },
            gm(0.6, 0.1, 5.0),
            RateFunction::Tabulated {
                knots: (0..=100).map(|i| (i as f64, (i as f64).sqrt() * 3.0)).collect(),
            },
        ];
        for rf in &kinds {
            rf.validate().unwrap();
            let mut prev = -1.0;
            for i in 0..=1_000 {
                let t = i as f64 * 0.1;
                let v = rf.cumulative(t).unwrap();
                assert!(v >= prev, "{rf:?} decreased at t = {t}");
                prev = v;
            }
        }
    }

    #[test]
    fn inverse_cumulative_round_trips() {
        let cases = [
            RateFunction::Constant { rate: 2.5 },
            RateFunction::Weibull { scale: 1.5, shape: 0.6 },
            RateFunction::Weibull { scale: 1.0, shape: 4.0 },
            gm(0.6, 0.1, 5.0),
            gm(5.0, 0.5, 20.0),
        ];
        for rf in &cases {
            for &s in &[1e-6, 0.3, 1.0, 7.7, 142.0] {
                let t = rf.inverse_cumulative(s).unwrap();
                assert_relative_eq!(rf.cumulative(t).unwrap(), s, max_relative = 1e-10);
            }
            assert_eq!(rf.inverse_cumulative(0.0).unwrap(), 0.0);
        }
    }

    #[test]
    fn intensity_bounds_follow_monotonicity() {
        let dec = RateFunction::Weibull { scale: 1.5, shape: 0.6 };
        assert_eq!(dec.intensity_bound(0.0, 1.0).unwrap(), None);
        let b = dec.intensity_bound(0.5, 1.0).unwrap().unwrap();
        assert_relative_eq!(b, dec.intensity(0.5).unwrap(), epsilon = 1e-14);
        let inc = gm(0.6, 0.1, 5.0);
        let b = inc.intensity_bound(0.0, 2.0).unwrap().unwrap();
        assert_relative_eq!(b, inc.intensity(2.0).unwrap(), epsilon = 1e-14);
    }

    #[test]
    fn validation_rejects_bad_parameters() {
        assert!(RateFunction::Constant { rate: -1.0 }.validate().is_err());
        assert!(RateFunction::Weibull { scale: 0.0, shape: 1.0 }.validate().is_err());
        // shape = 0 would violate Lambda(0) = 0
        assert!(RateFunction::Weibull { scale: 1.0, shape: 0.0 }.validate().is_err());
        assert!(RateFunction::GompertzMakeham { a: 0.0, b: 0.1, mu: 5.0 }.validate().is_err());
        assert!(RateFunction::Tabulated { knots: vec![(0.0, 0.0)] }.validate().is_err());
        assert!(RateFunction::Tabulated { knots: vec![(0.5, 0.0), (1.0, 1.0)] }
            .validate()
            .is_err());
        assert!(RateFunction::Tabulated { knots: vec![(0.0, 0.0), (1.0, 1.0), (1.0, 2.0)] }
            .validate()
            .is_err());
    }

    #[test]
    fn aggregate_trivial_and_arithmetic() {
        let zero = ProcessSpec {
            variant: Variant::Gsp,
            k: 2,
            up: vec![RateFunction::Constant { rate: 0.0 }; 2],
            down: vec![RateFunction::Constant { rate: 0.0 }; 2],
            alpha: 1.0,
        };
        let agg = zero.aggregate(3.0).unwrap();
        assert_eq!((agg.a, agg.b), (0.0, 0.0));

        let spec = ProcessSpec {
            variant: Variant::Gsp,
            k: 2,
            up: vec![
                RateFunction::Constant { rate: 1.0 },
                RateFunction::Constant { rate: 2.0 },
            ],
            down: vec![RateFunction::Constant { rate: 0.5 }; 2],
            alpha: 1.0,
        };
        spec.validate().unwrap();
        let agg = spec.aggregate(2.0).unwrap();
        assert_relative_eq!(agg.a, 6.0, epsilon = 1e-14);
        assert_relative_eq!(agg.b, 2.0, epsilon = 1e-14);
    }

    #[test]
    fn aggregate_gm_figure_set() {
        // three Gompertz-Makeham pairs; the down set is the same three
        // rate functions permuted, so A(1) = B(1)
        let spec = ProcessSpec {
            variant: Variant::Ngfsp,
            k: 3,
            up: vec![gm(0.6, 0.1, 5.0), gm(0.7, 0.2, 4.0), gm(0.4, 0.3, 7.0)],
            down: vec![gm(0.7, 0.2, 4.0), gm(0.4, 0.3, 7.0), gm(0.6, 0.1, 5.0)],
            alpha: 0.7,
        };
        spec.validate().unwrap();
        let agg = spec.aggregate(1.0).unwrap();
        // quadrature-backed reference value
        let mut want = 0.0;
        for rf in &spec.up {
            want += quad_cumulative(rf, 1.0, 2_000);
        }
        assert_relative_eq!(agg.a, want, max_relative = 1e-10);
        // extended-precision value of the same sum
        assert_relative_eq!(agg.a, 17.872_413_572_115_818, epsilon = 1e-12);
        assert_relative_eq!(agg.b, agg.a, epsilon = 1e-12);
    }

    #[test]
    fn spec_validation_rules() {
        let c = |r| RateFunction::Constant { rate: r };
        let base = ProcessSpec {
            variant: Variant::Gsp,
            k: 2,
            up: vec![c(1.0), c(0.5)],
            down: vec![c(0.2), c(0.3)],
            alpha: 1.0,
        };
        base.validate().unwrap();

        let mut bad = base.clone();
        bad.k = 3;
        assert!(bad.validate().is_err());

        // counting variant must not carry down rates
        let mut bad = base.clone();
        bad.variant = Variant::Gcp;
        assert!(bad.validate().is_err());
        bad.down = vec![];
        bad.validate().unwrap();

        // non-fractional variant with alpha < 1
        let mut bad = base.clone();
        bad.alpha = 0.7;
        assert!(bad.validate().is_err());

        // fractional difference variant accepts alpha in (0, 1]
        let mut ok = base.clone();
        ok.variant = Variant::Gfsp;
        ok.alpha = 0.7;
        ok.validate().unwrap();

        // homogeneous variant rejects time-varying rates
        let mut bad = base.clone();
        bad.up = vec![c(1.0), gm(0.6, 0.1, 5.0)];
        assert!(bad.validate().is_err());
        bad.variant = Variant::Ngsp;
        bad.validate().unwrap();
    }

    #[test]
    fn spec_json_round_trip() {
        let spec = ProcessSpec {
            variant: Variant::Nhgfsp,
            k: 2,
            up: vec![
                RateFunction::GompertzMakeham { a: 5.0, b: 0.5, mu: 20.0 },
                RateFunction::Weibull { scale: 1.0, shape: 4.0 },
            ],
            down: vec![
                RateFunction::Constant { rate: 1.0 },
                RateFunction::Tabulated { knots: vec![(0.0, 0.0), (1.0, 2.0)] },
            ],
            alpha: 0.6,
        };
        let json = serde_json::to_string(&spec).unwrap();
        assert!(json.contains("\"variant\":\"nhgfsp\""));
        assert!(json.contains("\"kind\":\"gompertz_makeham\""));
        let back: ProcessSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        // unknown fields are rejected
        let bad = json.replace("\"alpha\":0.6", "\"alpha\":0.6,\"extra\":1");
        assert!(serde_json::from_str::<ProcessSpec>(&bad).is_err());
        // alpha defaults to 1 when omitted
        let no_alpha = r#"{"variant":"gsp","k":1,"up":[{"kind":"constant","params":{"rate":1.0}}],"down":[{"kind":"constant","params":{"rate":1.0}}]}"#;
        let spec: ProcessSpec = serde_json::from_str(no_alpha).unwrap();
        assert_eq!(spec.alpha, 1.0);
        spec.validate().unwrap();
    }
}
