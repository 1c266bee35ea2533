//! Linear SVM trained by stochastic subgradient descent on the primal
//! (Pegasos step size `1 / (lambda * t)` with ball projection).
//!
//! The bias is learned as the weight of an always-on extra feature and is
//! regularized together with the other weights. The returned model is the
//! average of the iterates visited during the final epoch.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::SparseVector;
use crate::corpus::Label;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct TrainConfig {
    /// Regularization constant; `lambda = 1 / (c * n)`.
    pub c: f64,
    pub epochs: usize,
    pub seed: u64,
    /// Weight each example by `n / (2 * n_class)`.
    pub class_weighting: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            c: 1.0,
            epochs: 200,
            seed: 0,
            class_weighting: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub config: TrainConfig,
}

fn sign(label: Label) -> f64 {
    match label {
        Label::Hoax => 1.0,
        Label::Legitimate => -1.0,
    }
}

fn example_weights(ys: &[Label], class_weighting: bool) -> Vec<f64> {
    if !class_weighting {
        return vec![1.0; ys.len()];
    }
    let n = ys.len() as f64;
    let pos = ys.iter().filter(|&&y| y == Label::Hoax).count() as f64;
    let neg = n - pos;
    ys.iter()
        .map(|&y| if y == Label::Hoax { n / (2.0 * pos) } else { n / (2.0 * neg) })
        .collect()
}

fn validate(xs: &[SparseVector], ys: &[Label], config: &TrainConfig) -> Result<usize> {
    if xs.len() != ys.len() {
        return Err(Error::argument(format!("{} examples but {} labels", xs.len(), ys.len())));
    }
    if xs.len() < 2 {
        return Err(Error::argument("need at least 2 training examples"));
    }
    if !ys.contains(&Label::Hoax) || !ys.contains(&Label::Legitimate) {
        return Err(Error::argument("training data must contain both classes"));
    }
    if !(config.c.is_finite() && config.c > 0.0) {
        return Err(Error::argument(format!("C must be finite and positive, got {}", config.c)));
    }
    if config.epochs == 0 {
        return Err(Error::argument("epochs must be at least 1"));
    }
    let dim = xs[0].dim;
    for (i, x) in xs.iter().enumerate() {
        if x.dim != dim {
            return Err(Error::argument(format!("example {i} has dimension {}, expected {dim}", x.dim)));
        }
        if x.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::argument(format!("example {i} has a non-finite feature")));
        }
        if x.indices.iter().any(|&j| j >= dim) {
            return Err(Error::argument(format!("example {i} has an index out of range")));
        }
    }
    Ok(dim)
}

/// `lambda/2 * (|w|^2 + b^2) + mean_i(c_i * max(0, 1 - y_i (w.x_i + b)))`.
pub fn objective(model: &LinearModel, xs: &[SparseVector], ys: &[Label]) -> f64 {
    let n = xs.len() as f64;
    let lambda = 1.0 / (model.config.c * n);
    let weights = example_weights(ys, model.config.class_weighting);
    let reg = model.weights.iter().map(|w| w * w).sum::<f64>() + model.bias * model.bias;
    let loss: f64 = xs
        .iter()
        .zip(ys)
        .zip(&weights)
        .map(|((x, &y), c)| c * (1.0 - sign(y) * (x.dot_dense(&model.weights) + model.bias)).max(0.0))
        .sum();
    lambda / 2.0 * reg + loss / n
}

/// Trains and also returns the objective of each epoch's averaged iterate.
pub fn train_svm_traced(xs: &[SparseVector], ys: &[Label], config: &TrainConfig) -> Result<(LinearModel, Vec<f64>)> {
    let dim = validate(xs, ys, config)?;
    let n = xs.len();
    let lambda = 1.0 / (config.c * n as f64);
    // every optimum satisfies lambda/2 |w|^2 <= objective(0) = 1
    let radius = libm::sqrt(2.0 / lambda);
    let weights = example_weights(ys, config.class_weighting);
    let signs: Vec<f64> = ys.iter().map(|&y| sign(y)).collect();

    // w[dim] is the bias
    let mut w = vec![0.0; dim + 1];
    let mut avg = vec![0.0; dim + 1];
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut trace = Vec::with_capacity(config.epochs);
    let mut model = LinearModel {
        weights: vec![0.0; dim],
        bias: 0.0,
        config: *config,
    };
    let mut t = 0u64;

    for _ in 0..config.epochs {
        order.shuffle(&mut rng);
        avg.iter_mut().for_each(|a| *a = 0.0);
        for &i in &order {
            t += 1;
            let eta = 1.0 / (lambda * t as f64);
            let margin = signs[i] * (xs[i].dot_dense(&w) + w[dim]);
            let shrink = 1.0 - 1.0 / t as f64;
            w.iter_mut().for_each(|v| *v *= shrink);
            if margin < 1.0 {
                let step = eta * weights[i] * signs[i];
                for (j, v) in xs[i].iter() {
                    w[j] += step * v;
                }
                w[dim] += step;
            }
            let norm = libm::sqrt(w.iter().map(|v| v * v).sum());
            if norm > radius {
                let s = radius / norm;
                w.iter_mut().for_each(|v| *v *= s);
            }
            for (a, v) in avg.iter_mut().zip(&w) {
                *a += v;
            }
        }
        for (m, a) in model.weights.iter_mut().zip(&avg) {
            *m = a / n as f64;
        }
        model.bias = avg[dim] / n as f64;
        trace.push(objective(&model, xs, ys));
    }
    Ok((model, trace))
}

/// Minimizes the L2-regularized hinge loss. Deterministic for a given
/// `config.seed`.
pub fn train_svm(xs: &[SparseVector], ys: &[Label], config: &TrainConfig) -> Result<LinearModel> {
    train_svm_traced(xs, ys, config).map(|(m, _)| m)
}

/// Decision value `w.x + b`.
pub fn score(model: &LinearModel, x: &SparseVector) -> Result<f64> {
    if x.dim != model.weights.len() {
        return Err(Error::argument(format!(
            "feature dimension {} does not match model dimension {}",
            x.dim,
            model.weights.len()
        )));
    }
    Ok(x.dot_dense(&model.weights) + model.bias)
}

/// Hoax when the decision value is strictly positive.
pub fn predict(model: &LinearModel, x: &SparseVector) -> Result<Label> {
    Ok(if score(model, x)? > 0.0 { Label::Hoax } else { Label::Legitimate })
}
