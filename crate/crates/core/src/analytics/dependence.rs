//! Correlation-decay classification for power-law (Weibull) rate growth.
//!
//! All three classifiers read the decay exponent `theta` of
//! `Corr(X(s), X(t)) ~ c(s) t^{-theta}` straight off the rate shapes. For
//! the plain difference process the correlation is
//! `sqrt(V(s) / V(t))` and `V(t)` grows at the fastest shape `c*`, so
//! `theta = c* / 2`; the time-changed compound family decays at
//! `alpha (a min c)`; running averages always decay at `1/2`.

#[allow(unused_imports)] // trait needed only in pure no_std builds
use num_traits::Float;

use super::fractional::nhgfsp_moments;
use super::moments::ngsp_moments;
use super::{DependenceClass, DependenceReport};
use crate::error::{Error, Result};
use crate::rates::{ProcessSpec, RateFunction, Variant};

fn check_query_time(s: f64) -> Result<()> {
    if s.is_finite() && s >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain("query time must be finite and nonnegative"))
    }
}

/// (scale, shape) pairs of an all-Weibull side.
fn weibull_params(side: &[RateFunction]) -> Result<alloc::vec::Vec<(f64, f64)>> {
    side.iter()
        .map(|rf| match rf {
            RateFunction::Weibull { scale, shape } => Ok((*scale, *shape)),
            _ => Err(Error::Domain(
                "decay classification needs Weibull rates throughout",
            )),
        })
        .collect()
}

/// Classify the plain non-homogeneous difference process under Weibull
/// rates `(t/b)^shape` on every component.
///
/// The variance `V(t) = sum_j j^2 [(t/b_{j})^{a_j} + (t/d_j)^{c_j}]` is
/// dominated by its fastest shape `c*`, giving
/// `Corr(s, t) = sqrt(V(s)/V(t)) ~ c(s) t^{-c*/2}` with
/// `c(s) = sqrt(V(s) / K)`, `K` the summed `j^2 b^{-c*}` coefficients of
/// the dominant terms. In the decay order `d = c*` the process is
/// long-range dependent for `d` in (0, 2) and short-range dependent for
/// `d` above 2; `d = 2` sits on neither side.
pub fn classify_dependence_ngsp(spec: &ProcessSpec, s: f64) -> Result<DependenceReport> {
    spec.validate()?;
    if spec.variant != Variant::Ngsp {
        return Err(Error::UnsupportedVariant(
            "power-law decay classification covers ngsp",
        ));
    }
    check_query_time(s)?;
    let mut params = weibull_params(&spec.up)?;
    params.extend(weibull_params(&spec.down)?);
    let c_star = params
        .iter()
        .map(|&(_, shape)| shape)
        .fold(0.0f64, f64::max);
    let theta = 0.5 * c_star;
    // both sides contribute k entries; jump size is index mod k plus 1
    let mut dominant_coef = 0.0;
    for (idx, &(scale, shape)) in params.iter().enumerate() {
        if shape == c_star {
            let j = (idx % spec.k + 1) as f64;
            dominant_coef += j * j * scale.powf(-c_star);
        }
    }
    let v_s = ngsp_moments(spec, s)?.variance;
    let c_of_s = (v_s / dominant_coef).sqrt();
    let class = if theta < 1.0 {
        DependenceClass::Lrd
    } else if theta > 1.0 {
        DependenceClass::Srd
    } else {
        DependenceClass::Neither
    };
    Ok(DependenceReport {
        theta,
        class,
        c_of_s,
    })
}

/// Classify the time-changed compound difference process under Weibull
/// aggregates `L(t) = (t/b)^a`, `T(t) = (t/d)^c`: every up component must
/// share the shape `a` and every down component the shape `c`.
///
/// The decay exponent is `theta = alpha (a min c)`; the process is
/// long-range dependent when `a min c < 1/alpha` and short-range dependent
/// when `1/alpha < a min c < 2/alpha`, anything else being neither. The
/// reported prefactor is `sqrt(V(s))` of the process variance.
pub fn classify_dependence_nhgfsp(spec: &ProcessSpec, s: f64) -> Result<DependenceReport> {
    spec.validate()?;
    if spec.variant != Variant::Nhgfsp {
        return Err(Error::UnsupportedVariant(
            "compound decay classification covers nhgfsp",
        ));
    }
    check_query_time(s)?;
    let up = weibull_params(&spec.up)?;
    let down = weibull_params(&spec.down)?;
    let a = up[0].1;
    let c = down[0].1;
    if up.iter().any(|&(_, shape)| shape != a) || down.iter().any(|&(_, shape)| shape != c) {
        return Err(Error::Domain(
            "aggregate classification needs one common shape per side",
        ));
    }
    let theta = spec.alpha * a.min(c);
    let c_of_s = nhgfsp_moments(spec, s, None)?.variance.max(0.0).sqrt();
    Ok(DependenceReport::from_theta(theta, c_of_s))
}

/// The running average of a homogeneous process: correlation
/// `Corr(S_A(s), S_A(t)) = sqrt(s/t)` decays at `theta = 1/2` with unit
/// prefactor, so the class is always long-range dependence.
pub fn classify_dependence_runavg() -> DependenceReport {
    DependenceReport {
        theta: 0.5,
        class: DependenceClass::Lrd,
        c_of_s: 1.0,
    }
}
