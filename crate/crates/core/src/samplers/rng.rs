//! Seeded, splittable randomness for the samplers.

#[allow(unused_imports)] // trait needed only in pure no_std builds
use num_traits::Float;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

const TWO_POW_NEG53: f64 = 1.0 / 9007199254740992.0;

/// One independent randomness stream, addressed by `(seed, stream_id)`.
///
/// The same pair always replays the same draws. Distinct `stream_id`s under
/// one seed are statistically independent, which is how Monte Carlo drivers
/// parallelize: one stream per path, `stream_id` = path index.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_id: u64,
    chacha: ChaCha8Rng,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        // Expand the 64-bit seed into a full ChaCha key so that nearby seeds
        // do not share keystream structure.
        let mut state = seed;
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut chacha = ChaCha8Rng::from_seed(key);
        chacha.set_stream(stream_id);
        Self {
            seed,
            stream_id,
            chacha,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Uniform draw on the open interval (0, 1).
    ///
    /// 53-bit mantissa centered half a step off the lattice ends, so callers
    /// may take logarithms of either `u` or `1 - u` without guards.
    pub fn uniform(&mut self) -> f64 {
        ((self.chacha.next_u64() >> 11) as f64 + 0.5) * TWO_POW_NEG53
    }

    /// Uniform draw on (lo, hi).
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Standard exponential draw by inversion.
    pub fn exp(&mut self) -> f64 {
        -self.uniform().ln()
    }

    /// Poisson draw by counting standard exponentials (multiplicative form).
    ///
    /// Means above 500 are split recursively into independent halves to keep
    /// `exp(-mean)` away from underflow; the consumption order stays
    /// deterministic either way.
    pub fn poisson(&mut self, mean: f64) -> Result<u64> {
        if !mean.is_finite() || mean < 0.0 {
            return Err(Error::Domain("poisson mean must be finite and nonnegative"));
        }
        if mean == 0.0 {
            return Ok(0);
        }
        if mean > 500.0 {
            let half = mean / 2.0;
            return Ok(self.poisson(half)? + self.poisson(mean - half)?);
        }
        let floor = (-mean).exp();
        let mut product = 1.0;
        let mut count = 0u64;
        loop {
            product *= self.uniform();
            if product <= floor {
                return Ok(count);
            }
            count += 1;
        }
    }

    /// Index draw proportional to nonnegative `weights`.
    pub fn pick_weighted(&mut self, weights: &[f64]) -> Result<usize> {
        let mut total = 0.0;
        for &w in weights {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::Domain("weights must be finite and nonnegative"));
            }
            total += w;
        }
        if total <= 0.0 {
            return Err(Error::Domain("weights sum to zero"));
        }
        let mut target = self.uniform() * total;
        for (i, &w) in weights.iter().enumerate() {
            target -= w;
            if target < 0.0 {
                return Ok(i);
            }
        }
        // Rounding pushed the target past the last positive weight.
        Ok(weights.iter().rposition(|&w| w > 0.0).unwrap())
    }

    /// One-sided stable draw `S_alpha` with Laplace transform
    /// `E[exp(-s S)] = exp(-s^alpha)`, by the Kanter/Chambers-Mallows-Stuck
    /// construction from one uniform on (0, pi) and one exponential.
    pub fn stable_standard(&mut self, alpha: f64) -> Result<f64> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain("stable index must lie in (0, 1)"));
        }
        let u = self.uniform() * core::f64::consts::PI;
        let v = self.exp();
        let ratio = (1.0 - alpha) / alpha;
        Ok((alpha * u).sin() * ((1.0 - alpha) * u).sin().powf(ratio)
            / (u.sin().powf(1.0 / alpha) * v.powf(ratio)))
    }

    /// Mittag-Leffler waiting time with survival `P(W > t) = E_alpha(-scale t^alpha)`,
    /// drawn as `E^{1/alpha} S_alpha / scale^{1/alpha}`. At `alpha = 1` this
    /// degenerates to the exponential `E / scale`, consuming one uniform
    /// instead of three.
    pub fn ml_wait(&mut self, alpha: f64, scale: f64) -> Result<f64> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::InvalidRate("waiting-time scale must be positive"));
        }
        if alpha == 1.0 {
            return Ok(self.exp() / scale);
        }
        let e = self.exp();
        let s = self.stable_standard(alpha)?;
        Ok(e.powf(1.0 / alpha) * s / scale.powf(1.0 / alpha))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replay_is_exact() {
        let mut a = RngStream::new(42, 7);
        let mut b = RngStream::new(42, 7);
        for _ in 0..1000 {
            assert_eq!(a.uniform().to_bits(), b.uniform().to_bits());
        }
    }

    #[test]
    fn streams_differ() {
        let mut a = RngStream::new(42, 0);
        let mut b = RngStream::new(42, 1);
        let same = (0..64).filter(|_| a.uniform() == b.uniform()).count();
        assert_eq!(same, 0);
    }

    #[test]
    fn seeds_differ() {
        let mut a = RngStream::new(1, 0);
        let mut b = RngStream::new(2, 0);
        let same = (0..64).filter(|_| a.uniform() == b.uniform()).count();
        assert_eq!(same, 0);
    }

    #[test]
    fn uniform_stays_open() {
        let mut rng = RngStream::new(3, 0);
        for _ in 0..100_000 {
            let u = rng.uniform();
            assert!(u > 0.0 && u < 1.0);
        }
    }

    #[test]
    fn exp_mean_is_about_one() {
        let mut rng = RngStream::new(4, 0);
        let n = 200_000;
        let mean = (0..n).map(|_| rng.exp()).sum::<f64>() / n as f64;
        // SE = 1/sqrt(n) ~ 0.0022; allow 4 SE.
        assert!((mean - 1.0).abs() < 0.009, "mean {mean}");
    }

    #[test]
    fn poisson_matches_mean_and_variance() {
        let mut rng = RngStream::new(5, 0);
        let mean = 7.3;
        let n = 100_000;
        let draws: alloc::vec::Vec<u64> = (0..n).map(|_| rng.poisson(mean).unwrap()).collect();
        let m = draws.iter().map(|&x| x as f64).sum::<f64>() / n as f64;
        let v = draws.iter().map(|&x| (x as f64 - m).powi(2)).sum::<f64>() / n as f64;
        assert!((m - mean).abs() < 4.0 * (mean / n as f64).sqrt(), "mean {m}");
        assert!((v / mean - 1.0).abs() < 0.05, "variance {v}");
    }

    #[test]
    fn poisson_large_mean_splits() {
        let mut rng = RngStream::new(6, 0);
        let mean = 2000.0;
        let n = 2_000;
        let m = (0..n).map(|_| rng.poisson(mean).unwrap() as f64).sum::<f64>() / n as f64;
        assert!((m - mean).abs() < 4.0 * (mean / n as f64).sqrt(), "mean {m}");
    }

    #[test]
    fn poisson_zero_mean() {
        let mut rng = RngStream::new(6, 1);
        assert_eq!(rng.poisson(0.0).unwrap(), 0);
    }

    #[test]
    fn pick_weighted_frequencies() {
        let mut rng = RngStream::new(7, 0);
        let weights = [1.0, 0.0, 3.0];
        let mut hits = [0u32; 3];
        let n = 40_000;
        for _ in 0..n {
            hits[rng.pick_weighted(&weights).unwrap()] += 1;
        }
        assert_eq!(hits[1], 0);
        let p0 = hits[0] as f64 / n as f64;
        assert!((p0 - 0.25).abs() < 0.01, "p0 {p0}");
    }

    #[test]
    fn pick_weighted_rejects_zero_total() {
        let mut rng = RngStream::new(7, 1);
        assert!(rng.pick_weighted(&[0.0, 0.0]).is_err());
    }

    #[test]
    fn ml_wait_alpha_one_is_exponential() {
        let mut a = RngStream::new(8, 0);
        let mut b = RngStream::new(8, 0);
        let w = a.ml_wait(1.0, 2.5).unwrap();
        let e = b.exp() / 2.5;
        assert_eq!(w.to_bits(), e.to_bits());
    }

    #[test]
    fn stable_standard_rejects_alpha_one() {
        let mut rng = RngStream::new(8, 1);
        assert!(rng.stable_standard(1.0).is_err());
        assert!(rng.stable_standard(0.0).is_err());
    }

    #[test]
    fn stable_draws_are_positive_finite() {
        let mut rng = RngStream::new(9, 0);
        for _ in 0..50_000 {
            let s = rng.stable_standard(0.7).unwrap();
            assert!(s > 0.0 && s.is_finite());
        }
    }
}
