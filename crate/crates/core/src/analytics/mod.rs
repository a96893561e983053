//! Closed-form distributional quantities: pmfs, generating functions,
//! moments, correlation decay classification, and hitting-time laws.
//!
//! The trusted pmf backend is the convolution of recurrence-built counting
//! pmfs. The collapsed Bessel form is implemented verbatim as a second
//! backend and compared against the convolution by the verification checks;
//! the two agree only at `k = 1`, and the discrepancy at larger `k` is
//! reported, never papered over.

mod dependence;
mod fractional;
mod hitting;
mod moments;
mod pmf;
mod runavg;

pub use dependence::{
    classify_dependence_ngsp, classify_dependence_nhgfsp, classify_dependence_runavg,
};
pub use fractional::{
    ngfsp_moments, nhgfcp_pmf, nhgfsp_mgf, nhgfsp_moments, nhgfsp_pmf, ntfpp_pgf, ntfpp_pmf,
    subordinator_covariance, subordinator_mean, subordinator_variance, waiting_time_cdf, McControl,
};
pub use hitting::{arrival_time_cdf, first_passage_survival};
pub use moments::{factorial_moment, ngsp_covariance, ngsp_mgf, ngsp_moments, ngsp_pgf};
pub use pmf::{increment_pmf, ngcp_pmf, ngsp_pmf_bessel, ngsp_pmf_convolution};
pub use runavg::{running_avg_cf, running_avg_moments};

use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How a [`PmfTable`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PmfBackend {
    Convolution,
    Bessel,
    MittagLeffler,
    MonteCarlo,
}

/// Probability mass on the integer window `[n_min, n_max]`.
///
/// `probs[i]` is `P(X = n_min + i)`; `tail_bound` bounds the mass outside
/// the window, so the entries plus the tail account for 1 up to rounding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PmfTable {
    pub t: f64,
    pub n_min: i64,
    pub n_max: i64,
    pub probs: Vec<f64>,
    pub tail_bound: f64,
    pub backend: PmfBackend,
    /// Set when a degenerate aggregate (A = 0 or B = 0) forced the Bessel
    /// form into its Poisson limit.
    #[serde(default)]
    pub poisson_limit: bool,
}

impl PmfTable {
    /// `P(X = n)`, zero outside the stored window.
    pub fn prob(&self, n: i64) -> f64 {
        if n < self.n_min || n > self.n_max {
            0.0
        } else {
            self.probs[(n - self.n_min) as usize]
        }
    }

    /// Iterate `(n, p)` pairs over the window.
    pub fn iter(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(move |(i, &p)| (self.n_min + i as i64, p))
    }

    /// Mass check: entries nonnegative, total plus tail within `1e-9` of 1.
    pub fn check_normalization(&self) -> Result<()> {
        if self.probs.len() != (self.n_max - self.n_min + 1) as usize {
            return Err(Error::Domain("pmf window does not match probs length"));
        }
        let mut sum = 0.0;
        for &p in &self.probs {
            if !(p >= 0.0) {
                return Err(Error::Domain("negative pmf entry"));
            }
            sum += p;
        }
        if (sum + self.tail_bound - 1.0).abs() > 1e-9 {
            return Err(Error::Domain("pmf mass plus tail bound is not 1"));
        }
        Ok(())
    }

    /// Mean of the tabled mass (tail ignored).
    pub fn mean(&self) -> f64 {
        self.iter().map(|(n, p)| n as f64 * p).sum()
    }

    /// Variance of the tabled mass (tail ignored).
    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.iter()
            .map(|(n, p)| {
                let d = n as f64 - m;
                d * d * p
            })
            .sum()
    }
}

/// First two moments, with the covariance for a queried time pair when one
/// was requested, and standard errors when Monte Carlo produced the values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentSummary {
    pub mean: f64,
    pub variance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub covariance: Option<f64>,
    /// `variance - mean`; positive means over-dispersion relative to Poisson.
    pub dispersion_index: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean_se: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variance_se: Option<f64>,
}

impl MomentSummary {
    pub fn new(mean: f64, variance: f64, covariance: Option<f64>) -> Self {
        Self {
            mean,
            variance,
            covariance,
            dispersion_index: variance - mean,
            mean_se: None,
            variance_se: None,
        }
    }
}

/// Correlation decay class per the `Corr(s, t) ~ c(s) t^{-theta}` bands:
/// long-range dependence for `theta` in (0, 1), short-range for (1, 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DependenceClass {
    Lrd,
    Srd,
    Neither,
}

/// Result of a correlation-decay classification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DependenceReport {
    /// Decay exponent of `Corr(., t)` in `t`.
    pub theta: f64,
    pub class: DependenceClass,
    /// Prefactor `c(s)` of the correlation bound at the queried `s`.
    pub c_of_s: f64,
}

impl DependenceReport {
    pub(crate) fn from_theta(theta: f64, c_of_s: f64) -> Self {
        let class = if theta > 0.0 && theta < 1.0 {
            DependenceClass::Lrd
        } else if theta > 1.0 && theta < 2.0 {
            DependenceClass::Srd
        } else {
            DependenceClass::Neither
        };
        Self {
            theta,
            class,
            c_of_s,
        }
    }
}
