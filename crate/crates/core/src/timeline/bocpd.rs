//! Bayesian online changepoint detection over monthly revision counts.
//!
//! Run-length recursion with a constant hazard and a conjugate
//! Gamma-Poisson observation model. Here the run length after observing
//! `x[t]` counts the observations of the current segment that precede
//! `x[t]`, so run length 0 means `x[t]` opens a new segment and is scored
//! under the prior predictive rather than the old segment's predictive.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

pub const DEFAULT_HAZARD_LAMBDA: f64 = 100.0;

/// Modal run length must exceed this before a reset counts as a change.
const ARMING_RUN_LENGTH: usize = 3;
/// A modal run length below this counts as a reset.
const RESET_RUN_LENGTH: usize = 2;

/// Gamma(shape, rate) prior on the Poisson rate.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GammaPoissonPrior {
    pub shape: f64,
    pub rate: f64,
}

impl Default for GammaPoissonPrior {
    fn default() -> Self {
        Self { shape: 1.0, rate: 1.0 }
    }
}

impl GammaPoissonPrior {
    /// Log negative-binomial posterior predictive of count `x` after
    /// observing `n` counts summing to `sum`.
    pub fn ln_predictive(&self, x: u64, sum: u64, n: u64) -> f64 {
        let a = self.shape + sum as f64;
        let b = self.rate + n as f64;
        let x = x as f64;
        libm::lgamma(a + x) - libm::lgamma(a) - libm::lgamma(x + 1.0) + a * libm::log(b / (b + 1.0))
            - x * libm::log1p(b)
    }
}

/// Detected changepoints and the per-step modal run length.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ChangepointSet {
    /// Indices where a new segment starts, ascending, all in `1..len`.
    pub positions: Vec<usize>,
    /// Most probable run length after each observation.
    pub run_length_map: Vec<usize>,
    /// Posterior probability that each observation opens a new segment.
    pub reset_probability: Vec<f64>,
}

fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + libm::log(values.iter().map(|v| libm::exp(v - max)).sum::<f64>())
}

/// Runs the recursion over `counts`. When the modal run length falls
/// below 2 after having exceeded 3 since the previous report, a changepoint
/// is reported at the first observation of the modal segment, `t - mode`.
pub fn bocpd(counts: &[u64], hazard_lambda: f64, prior: GammaPoissonPrior) -> Result<ChangepointSet> {
    if !hazard_lambda.is_finite() || hazard_lambda <= 1.0 {
        return Err(Error::argument(format!("hazard lambda must be finite and > 1, got {hazard_lambda}")));
    }
    if !(prior.shape.is_finite() && prior.rate.is_finite() && prior.shape > 0.0 && prior.rate > 0.0) {
        return Err(Error::argument(format!(
            "prior shape and rate must be finite and positive, got ({}, {})",
            prior.shape, prior.rate
        )));
    }
    if counts.len() < 2 {
        return Err(Error::argument(format!("series needs at least 2 months, got {}", counts.len())));
    }

    let ln_h = libm::log(1.0 / hazard_lambda);
    let ln_1mh = libm::log1p(-1.0 / hazard_lambda);

    // log P(r_t = r | x_0..x_t); segment_sum[r] is the sum of the r + 1
    // observations of the segment implied by run length r.
    let mut log_r: Vec<f64> = vec![0.0];
    let mut segment_sum: Vec<u64> = vec![counts[0]];
    let mut run_length_map = vec![0usize];
    let mut reset_probability = vec![1.0];
    let mut positions = Vec::new();
    let mut armed = false;

    for (t, &x) in counts.iter().enumerate().skip(1) {
        let mut next = Vec::with_capacity(log_r.len() + 1);
        next.push(ln_h + prior.ln_predictive(x, 0, 0));
        for (r, &lr) in log_r.iter().enumerate() {
            next.push(lr + ln_1mh + prior.ln_predictive(x, segment_sum[r], r as u64 + 1));
        }
        let evidence = log_sum_exp(&next);
        next.iter_mut().for_each(|v| *v -= evidence);

        segment_sum.insert(0, 0);
        segment_sum.iter_mut().for_each(|s| *s += x);
        log_r = next;

        let mode = log_r
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (r, &v)| if v > best.1 { (r, v) } else { best })
            .0;
        run_length_map.push(mode);
        reset_probability.push(libm::exp(log_r[0]));

        if mode > ARMING_RUN_LENGTH {
            armed = true;
        } else if mode < RESET_RUN_LENGTH && armed {
            positions.push(t - mode);
            armed = false;
        }
    }

    Ok(ChangepointSet {
        positions,
        run_length_map,
        reset_probability,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn predictive_is_a_distribution() {
        let prior = GammaPoissonPrior::default();
        for (sum, n) in [(0, 0), (10, 5), (300, 12)] {
            let total: f64 = (0..2000).map(|x| libm::exp(prior.ln_predictive(x, sum, n))).sum();
            assert!((total - 1.0).abs() < 1e-9, "sum={sum} n={n} total={total}");
        }
        // prior predictive with shape 1, rate 1 is geometric(1/2)
        assert!((prior.ln_predictive(3, 0, 0) - libm::log(1.0 / 16.0)).abs() < 1e-12);
    }

    #[test]
    fn constant_series_has_no_changepoints() {
        let cps = bocpd(&[5; 100], 100.0, GammaPoissonPrior::default()).unwrap();
        assert!(cps.positions.is_empty());
        assert_eq!(cps.run_length_map[0], 0);
        assert_eq!(cps.run_length_map.len(), 100);
        assert_eq!(*cps.run_length_map.last().unwrap(), 99);
    }

    #[test]
    fn step_change_detected_at_the_step() {
        let mut counts = [2u64; 40].to_vec();
        counts.extend([20u64; 40]);
        let cps = bocpd(&counts, 100.0, GammaPoissonPrior::default()).unwrap();
        assert_eq!(cps.positions, [40]);
        assert!(cps.run_length_map[40] < 2);
    }

    #[test]
    fn rejects_bad_parameters() {
        let p = GammaPoissonPrior::default();
        assert!(bocpd(&[1, 2], 1.0, p).is_err());
        assert!(bocpd(&[1, 2], f64::NAN, p).is_err());
        assert!(bocpd(&[1], 100.0, p).is_err());
        assert!(bocpd(&[1, 2], 100.0, GammaPoissonPrior { shape: f64::INFINITY, rate: 1.0 }).is_err());
    }
}
