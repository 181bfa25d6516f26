//! Exact (O(n²)) t-SNE to two dimensions.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const MIN_POINTS: usize = 5;
/// Iterations between KL checkpoints.
pub const KL_EVERY: usize = 50;
const MOMENTUM_SWITCH: usize = 250;
const INITIAL_MOMENTUM: f64 = 0.5;
const FINAL_MOMENTUM: f64 = 0.8;
const INIT_STD: f64 = 1e-4;
const ENTROPY_TOL_BITS: f64 = 1e-5;
const MAX_SEARCH_STEPS: usize = 50;
const MIN_GAIN: f64 = 0.01;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ProjectionError {
    #[error("perplexity search did not converge for row {row} (entropy {entropy_bits:.6} bits, target {target_bits:.6})")]
    Calibration {
        row: usize,
        entropy_bits: f64,
        target_bits: f64,
    },
    #[error("t-SNE needs at least {MIN_POINTS} points, got {0}")]
    TooFewPoints(usize),
    #[error("row {row} has {found} columns, expected {expected}")]
    Dimension {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("input contains a non-finite value at row {0}")]
    NonFinite(usize),
    #[error("invalid configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TsneConfig {
    pub perplexity: f64,
    pub iterations: usize,
    pub learning_rate: f64,
    pub early_exaggeration: f64,
    pub exaggeration_iters: usize,
    pub seed: u64,
}

impl Default for TsneConfig {
    fn default() -> Self {
        TsneConfig {
            perplexity: 30.0,
            iterations: 1000,
            learning_rate: 200.0,
            early_exaggeration: 12.0,
            exaggeration_iters: 250,
            seed: 42,
        }
    }
}

impl TsneConfig {
    /// Perplexity actually used for `n` points: kept strictly below `(n-1)/3`.
    pub fn effective_perplexity(&self, n: usize) -> f64 {
        let cap = (n.saturating_sub(1)) as f64 / 3.0 - 1e-3;
        self.perplexity.min(cap)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Embedding2D {
    pub coords: Vec<[f64; 2]>,
    /// `(iteration, KL(P || Q))` checkpoints, measured against the
    /// un-exaggerated P.
    pub kl_trace: Vec<(usize, f64)>,
    pub perplexity: f64,
}

pub fn pairwise_squared_distances(points: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v: f64 = points[i]
                .iter()
                .zip(&points[j])
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    d
}

/// Shannon entropy in bits of a probability row.
pub fn entropy_bits(row: &[f64]) -> f64 {
    -row.iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| p * p.log2())
        .sum::<f64>()
}

/// Conditional probabilities `p(j|i)` under a Gaussian kernel whose
/// precision is found per row by bisection so the row entropy equals
/// `log2(perplexity)`. A row whose off-diagonal distances are all equal has
/// no bandwidth dependence and is returned uniform.
pub fn perplexity_calibration(
    distances: &[Vec<f64>],
    perplexity: f64,
) -> Result<Vec<Vec<f64>>, ProjectionError> {
    let n = distances.len();
    let target_bits = perplexity.log2();
    let mut out = vec![vec![0.0; n]; n];
    let mut work = vec![0.0; n];
    for i in 0..n {
        let others = || (0..n).filter(move |&j| j != i);
        if n < 2 {
            break;
        }
        let dmin = others().map(|j| distances[i][j]).fold(f64::INFINITY, f64::min);
        let dmax = others().map(|j| distances[i][j]).fold(f64::NEG_INFINITY, f64::max);
        if dmax - dmin <= 0.0 {
            let u = 1.0 / (n - 1) as f64;
            for j in others() {
                out[i][j] = u;
            }
            continue;
        }
        let mean_shift = others().map(|j| distances[i][j] - dmin).sum::<f64>() / (n - 1) as f64;

        let mut beta = 1.0 / mean_shift;
        let (mut lo, mut hi) = (0.0f64, f64::INFINITY);
        let mut entropy = f64::NAN;
        let mut converged = false;
        for _ in 0..MAX_SEARCH_STEPS {
            let mut sum = 0.0;
            let mut weighted = 0.0;
            for j in others() {
                let shifted = distances[i][j] - dmin;
                let w = (-beta * shifted).exp();
                work[j] = w;
                sum += w;
                weighted += w * shifted;
            }
            // H = ln(sum) + beta * E[d], converted to bits
            entropy = (sum.ln() + beta * weighted / sum) / std::f64::consts::LN_2;
            if (entropy - target_bits).abs() < ENTROPY_TOL_BITS {
                converged = true;
                for j in others() {
                    out[i][j] = work[j] / sum;
                }
                break;
            }
            if entropy > target_bits {
                lo = beta;
                beta = if hi.is_finite() { (beta + hi) / 2.0 } else { beta * 2.0 };
            } else {
                hi = beta;
                beta = (beta + lo) / 2.0;
            }
        }
        if !converged {
            return Err(ProjectionError::Calibration {
                row: i,
                entropy_bits: entropy,
                target_bits,
            });
        }
    }
    Ok(out)
}

/// `P_ij = (p(j|i) + p(i|j)) / 2n`.
pub fn joint_probabilities(conditional: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = conditional.len();
    let mut p = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                p[i][j] = (conditional[i][j] + conditional[j][i]) / (2.0 * n as f64);
            }
        }
    }
    p
}

/// Student-t kernel values `1 / (1 + |y_i - y_j|²)` (zero diagonal) and their sum.
fn student_kernel(y: &[[f64; 2]]) -> (Vec<Vec<f64>>, f64) {
    let n = y.len();
    let mut num = vec![vec![0.0; n]; n];
    let mut sum = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let dx = y[i][0] - y[j][0];
            let dy = y[i][1] - y[j][1];
            let v = 1.0 / (1.0 + dx * dx + dy * dy);
            num[i][j] = v;
            num[j][i] = v;
            sum += 2.0 * v;
        }
    }
    (num, sum)
}

pub fn kl_divergence(p: &[Vec<f64>], y: &[[f64; 2]]) -> f64 {
    let (num, sum) = student_kernel(y);
    let mut kl = 0.0;
    for (i, row) in p.iter().enumerate() {
        for (j, &pij) in row.iter().enumerate() {
            if i != j && pij > 0.0 {
                let q = (num[i][j] / sum).max(f64::MIN_POSITIVE);
                kl += pij * (pij / q).ln();
            }
        }
    }
    kl.max(0.0)
}

/// `dKL/dy_i = 4 Σ_j (P_ij − Q_ij)(y_i − y_j) / (1 + |y_i − y_j|²)`.
pub fn kl_gradient(p: &[Vec<f64>], y: &[[f64; 2]]) -> Vec<[f64; 2]> {
    let (num, sum) = student_kernel(y);
    gradient_with_kernel(p, y, &num, sum, 1.0)
}

fn gradient_with_kernel(
    p: &[Vec<f64>],
    y: &[[f64; 2]],
    num: &[Vec<f64>],
    sum: f64,
    p_scale: f64,
) -> Vec<[f64; 2]> {
    let n = y.len();
    let mut grad = vec![[0.0; 2]; n];
    for i in 0..n {
        let mut g = [0.0; 2];
        for j in 0..n {
            if i == j {
                continue;
            }
            let m = (p_scale * p[i][j] - num[i][j] / sum) * num[i][j];
            g[0] += m * (y[i][0] - y[j][0]);
            g[1] += m * (y[i][1] - y[j][1]);
        }
        grad[i] = [4.0 * g[0], 4.0 * g[1]];
    }
    grad
}

fn validate(points: &[Vec<f64>]) -> Result<(), ProjectionError> {
    let dim = points.first().map_or(0, Vec::len);
    for (row, p) in points.iter().enumerate() {
        if p.len() != dim {
            return Err(ProjectionError::Dimension {
                row,
                found: p.len(),
                expected: dim,
            });
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(ProjectionError::NonFinite(row));
        }
    }
    Ok(())
}

/// Projects `points` to 2-D. Gradient descent with momentum (0.5, then 0.8
/// from iteration 250) and per-coordinate adaptive gains; P is multiplied by
/// `early_exaggeration` for the first `exaggeration_iters` iterations.
pub fn tsne(points: &[Vec<f64>], config: &TsneConfig) -> Result<Embedding2D, ProjectionError> {
    validate(points)?;
    let n = points.len();
    if n < MIN_POINTS {
        return Err(ProjectionError::TooFewPoints(n));
    }
    let valid = config.learning_rate > 0.0
        && config.early_exaggeration >= 1.0
        && config.perplexity > 0.0;
    if !valid {
        return Err(ProjectionError::Config(format!("{config:?}")));
    }
    let perplexity = config.effective_perplexity(n);
    let conditional = perplexity_calibration(&pairwise_squared_distances(points), perplexity)?;
    let p = joint_probabilities(&conditional);

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let normal = Normal::new(0.0, INIT_STD).expect("positive std");
    let mut y: Vec<[f64; 2]> = (0..n)
        .map(|_| [normal.sample(&mut rng), normal.sample(&mut rng)])
        .collect();
    let mut velocity = vec![[0.0; 2]; n];
    let mut gains = vec![[1.0f64; 2]; n];
    let mut kl_trace = Vec::new();

    for iter in 0..config.iterations {
        let exaggeration = if iter < config.exaggeration_iters {
            config.early_exaggeration
        } else {
            1.0
        };
        let momentum = if iter < MOMENTUM_SWITCH {
            INITIAL_MOMENTUM
        } else {
            FINAL_MOMENTUM
        };
        let (num, sum) = student_kernel(&y);
        let grad = gradient_with_kernel(&p, &y, &num, sum, exaggeration);
        for i in 0..n {
            for d in 0..2 {
                let g = grad[i][d];
                let v = velocity[i][d];
                gains[i][d] = if (g > 0.0) != (v > 0.0) {
                    gains[i][d] + 0.2
                } else {
                    (gains[i][d] * 0.8).max(MIN_GAIN)
                };
                velocity[i][d] = momentum * v - config.learning_rate * gains[i][d] * g;
                y[i][d] += velocity[i][d];
            }
        }
        let mean = y
            .iter()
            .fold([0.0; 2], |acc, c| [acc[0] + c[0], acc[1] + c[1]]);
        let mean = [mean[0] / n as f64, mean[1] / n as f64];
        for c in &mut y {
            c[0] -= mean[0];
            c[1] -= mean[1];
        }
        if (iter + 1) % KL_EVERY == 0 || iter + 1 == config.iterations {
            kl_trace.push((iter + 1, kl_divergence(&p, &y)));
        }
    }
    Ok(Embedding2D {
        coords: y,
        kl_trace,
        perplexity,
    })
}
