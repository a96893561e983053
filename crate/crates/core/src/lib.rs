//! Generalized Skellam counting processes: closed-form distributions,
//! exact and approximate samplers, and a Monte Carlo verification harness.
//!
//! The crate covers five process families built from up-jumps of size
//! `1..=k` against down-jumps of size `1..=k`:
//!
//! * `gsp`: homogeneous difference of two generalized counting processes
//! * `ngsp`: the same with time-varying intensities
//! * `gfsp`: homogeneous, time-changed by an inverse stable subordinator
//! * `ngfsp`: time-varying intensities, outer fractional time change
//! * `nhgfsp`: fractional time change applied inside the cumulative
//!   intensity, which yields a compound fractional Poisson structure
//!
//! Everything here is `no_std + alloc`; IO, file formats, and the CLI
//! live in the companion `skellam-cli` crate.

#![no_std]
#![deny(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analytics;
pub mod error;
pub mod rates;
pub mod samplers;
pub mod specfun;
pub mod tickdata;
pub mod verify;

pub use error::{Error, Result};
pub use rates::{AggregateRates, ProcessSpec, RateFunction, Variant};

