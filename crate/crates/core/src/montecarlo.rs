//! Seeded, batch-parallel Monte Carlo estimation of per-server payoffs.
//!
//! Samples are split into fixed-size batches; batch `k` draws from the ChaCha8
//! stream `k` of the caller's seed and the per-batch moments are merged in
//! batch order. The result is therefore bit-identical whatever the number of
//! worker threads.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Real;

pub const BATCH_SIZE: u64 = 1 << 15;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Estimate<T> {
    pub mean: Vec<T>,
    pub std_error: Vec<T>,
    pub samples: u64,
}

impl<T: Real> Estimate<T> {
    /// `|mean_i − expected_i| ≤ k·SE_i + slack` for every server.
    pub fn agrees_with(&self, expected: &[T], k: T, slack: T) -> bool {
        self.z_scores(expected, slack)
            .into_iter()
            .all(|z| z <= k)
    }

    /// Standardised deviations, with `slack` absorbing rounding when SE = 0.
    pub fn z_scores(&self, expected: &[T], slack: T) -> Vec<T> {
        self.mean
            .iter()
            .zip(&self.std_error)
            .zip(expected)
            .map(|((&m, &se), &e)| {
                let dev = ((m - e).abs() - slack).max(T::zero());
                if dev == T::zero() {
                    T::zero()
                } else if se == T::zero() {
                    T::infinity()
                } else {
                    dev / se
                }
            })
            .collect()
    }
}

/// Running sums of a per-server quantity.
pub(crate) struct Moments<T> {
    sum: Vec<T>,
    sum_sq: Vec<T>,
}

impl<T: Real> Moments<T> {
    fn new(n: usize) -> Self {
        Self {
            sum: vec![T::zero(); n],
            sum_sq: vec![T::zero(); n],
        }
    }

    #[inline]
    pub(crate) fn add(&mut self, i: usize, value: T) {
        self.sum[i] = self.sum[i] + value;
        self.sum_sq[i] = self.sum_sq[i] + value * value;
    }

    fn merge(mut self, other: Self) -> Self {
        for i in 0..self.sum.len() {
            self.sum[i] = self.sum[i] + other.sum[i];
            self.sum_sq[i] = self.sum_sq[i] + other.sum_sq[i];
        }
        self
    }
}

/// Runs `draw` once per sample. `draw` records, per server, the sample's
/// deviation from `baseline` (servers it does not touch contribute zero).
pub(crate) fn estimate<T, F>(baseline: &[T], samples: u64, seed: u64, draw: F) -> Result<Estimate<T>>
where
    T: Real,
    F: Fn(&mut ChaCha8Rng, &mut Moments<T>) + Sync,
{
    if samples == 0 {
        return Err(Error::ParamOutOfRange("Monte Carlo needs at least one sample".into()));
    }
    let n = baseline.len();
    let batches = samples.div_ceil(BATCH_SIZE);
    let parts: Vec<Moments<T>> = (0..batches)
        .into_par_iter()
        .map(|batch| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(batch);
            let size = BATCH_SIZE.min(samples - batch * BATCH_SIZE);
            let mut moments = Moments::new(n);
            for _ in 0..size {
                draw(&mut rng, &mut moments);
            }
            moments
        })
        .collect();
    let total = parts.into_iter().fold(Moments::new(n), Moments::merge);

    let count = T::from_u64(samples).expect("sample count");
    let mut mean = Vec::with_capacity(n);
    let mut std_error = Vec::with_capacity(n);
    for ((&base, &sum), &sum_sq) in baseline.iter().zip(&total.sum).zip(&total.sum_sq) {
        let m = sum / count;
        mean.push(base + m);
        let se = if samples < 2 {
            T::zero()
        } else {
            let var = (sum_sq / count - m * m).max(T::zero());
            (var / (count - T::one())).sqrt()
        };
        std_error.push(se);
    }
    Ok(Estimate {
        mean,
        std_error,
        samples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn uniform_mean_and_error() {
        let est = estimate(&[0.0f64], 200_000, 3, |rng, m| m.add(0, rng.random::<f64>())).unwrap();
        assert!((est.mean[0] - 0.5).abs() < 4.0 * est.std_error[0]);
        // SE of U(0,1) mean is sqrt(1/12 / N).
        let expected_se = (1.0f64 / 12.0 / 200_000.0).sqrt();
        assert!((est.std_error[0] / expected_se - 1.0).abs() < 0.01);
    }

    #[test]
    fn result_is_independent_of_thread_count() {
        let run = || estimate(&[0.0f64, 1.0], 100_000, 11, |rng, m| {
            m.add(0, rng.random::<f64>());
            m.add(1, rng.random::<f64>() * 2.0);
        });
        let single = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap()
            .install(run)
            .unwrap();
        let many = rayon::ThreadPoolBuilder::new()
            .num_threads(4)
            .build()
            .unwrap()
            .install(run)
            .unwrap();
        assert_eq!(single, many);
    }

    #[test]
    fn zero_samples_rejected() {
        assert!(estimate(&[0.0f64], 0, 1, |_, _| {}).is_err());
    }
}
