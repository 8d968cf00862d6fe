//! L2-regularized logistic regression trained by deterministic full-batch
//! accelerated gradient descent.
//!
//! The loss is the mean negative log-likelihood plus `l2 / (2n) * ||w||^2`
//! with the intercept unpenalized. Features are standardized with train-set
//! statistics stored in the model.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;

/// Column standardizer; zero-spread columns map to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
}

impl Standardizer {
    pub fn fit(matrix: &FeatureMatrix, rows: &[usize]) -> Standardizer {
        let d = matrix.n_cols();
        let n = rows.len() as f64;
        let mut means = vec![0.0; d];
        for &i in rows {
            for (m, v) in means.iter_mut().zip(matrix.row(i)) {
                *m += v;
            }
        }
        for m in &mut means {
            *m /= n;
        }
        let mut stds = vec![0.0; d];
        for &i in rows {
            for (s, (v, m)) in stds.iter_mut().zip(matrix.row(i).iter().zip(&means)) {
                *s += (v - m) * (v - m);
            }
        }
        for s in &mut stds {
            *s = (*s / n).sqrt();
        }
        Standardizer { means, stds }
    }

    pub fn transform_into(&self, raw: &[f64], out: &mut [f64]) {
        for (o, ((v, m), s)) in out
            .iter_mut()
            .zip(raw.iter().zip(&self.means).zip(&self.stds))
        {
            *o = if *s > 0.0 { (v - m) / s } else { 0.0 };
        }
    }

    pub fn transform(&self, raw: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; raw.len()];
        self.transform_into(raw, &mut out);
        out
    }
}

/// Intercept plus weights on the standardized scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogRegCore {
    pub bias: f64,
    pub weights: Vec<f64>,
}

impl LogRegCore {
    pub fn decision(&self, standardized: &[f64]) -> f64 {
        self.bias
            + self
                .weights
                .iter()
                .zip(standardized)
                .map(|(w, x)| w * x)
                .sum::<f64>()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LogRegModel {
    pub l2: f64,
    pub core: LogRegCore,
    pub scaler: Standardizer,
    pub iterations: usize,
    pub converged: bool,
}

impl LogRegModel {
    pub fn score(&self, raw_row: &[f64]) -> f64 {
        sigmoid(self.core.decision(&self.scaler.transform(raw_row)))
    }
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// ln(1 + e^f) - y * f, computed without overflow.
fn nll(f: f64, y: f64) -> f64 {
    f.max(0.0) - y * f + (-f.abs()).exp().ln_1p()
}

/// Flat row-major design used by the inner training loop.
pub(crate) struct Design {
    pub n: usize,
    pub d: usize,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
}

impl Design {
    pub(crate) fn standardized(
        matrix: &FeatureMatrix,
        rows: &[usize],
        scaler: &Standardizer,
    ) -> Design {
        let d = matrix.n_cols();
        let mut x = vec![0.0; rows.len() * d];
        for (k, &i) in rows.iter().enumerate() {
            scaler.transform_into(matrix.row(i), &mut x[k * d..(k + 1) * d]);
        }
        let y = rows
            .iter()
            .map(|&i| if matrix.label(i) { 1.0 } else { 0.0 })
            .collect();
        Design {
            n: rows.len(),
            d,
            x,
            y,
        }
    }
}

const PAR_CHUNK_ROWS: usize = 2048;

/// Loss and gradient of the weighted objective at `params = [bias, w...]`.
/// Partial sums are combined in fixed chunk order so the result does not
/// depend on the worker count.
fn loss_grad_flat(
    design: &Design,
    sample_weights: Option<&[f64]>,
    params: &[f64],
    l2: f64,
) -> (f64, Vec<f64>) {
    let d = design.d;
    let total_weight = match sample_weights {
        Some(w) => w.iter().sum::<f64>(),
        None => design.n as f64,
    };
    let chunks: Vec<(f64, Vec<f64>)> = design
        .x
        .par_chunks(PAR_CHUNK_ROWS * d)
        .enumerate()
        .map(|(chunk_idx, xs)| {
            let row0 = chunk_idx * PAR_CHUNK_ROWS;
            let mut grad = vec![0.0; d + 1];
            let mut loss = 0.0;
            for (r, row) in xs.chunks_exact(d).enumerate() {
                let i = row0 + r;
                let w = sample_weights.map_or(1.0, |sw| sw[i]);
                let f = params[0]
                    + params[1..]
                        .iter()
                        .zip(row)
                        .map(|(p, x)| p * x)
                        .sum::<f64>();
                let y = design.y[i];
                loss += w * nll(f, y);
                let residual = w * (sigmoid(f) - y);
                grad[0] += residual;
                for (g, x) in grad[1..].iter_mut().zip(row) {
                    *g += residual * x;
                }
            }
            (loss, grad)
        })
        .collect();

    let mut loss = 0.0;
    let mut grad = vec![0.0; d + 1];
    for (l, g) in chunks {
        loss += l;
        for (acc, v) in grad.iter_mut().zip(g) {
            *acc += v;
        }
    }
    loss /= total_weight;
    for g in &mut grad {
        *g /= total_weight;
    }
    for (g, p) in grad[1..].iter_mut().zip(&params[1..]) {
        *g += l2 / total_weight * p;
    }
    let penalty = params[1..].iter().map(|p| p * p).sum::<f64>();
    loss += l2 / (2.0 * total_weight) * penalty;
    (loss, grad)
}

/// Loss and gradient over raw feature rows; the oracle surface used by the
/// finite-difference checks. `params[0]` is the intercept.
pub fn loss_and_gradient(
    rows: &[Vec<f64>],
    labels: &[bool],
    params: &[f64],
    l2: f64,
) -> (f64, Vec<f64>) {
    let d = rows[0].len();
    assert_eq!(params.len(), d + 1);
    let design = Design {
        n: rows.len(),
        d,
        x: rows.iter().flatten().copied().collect(),
        y: labels.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
    };
    loss_grad_flat(&design, None, params, l2)
}

pub(crate) struct FitOptions {
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            max_iters: 600,
            tol: 1e-7,
        }
    }
}

pub(crate) struct FitResult {
    pub params: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// Nesterov-accelerated full-batch descent with periodic restart checks.
/// Everything is deterministic: fixed initial step from the smoothness
/// bound, fixed restart rule, fixed iteration cap.
pub(crate) fn fit_logistic(
    design: &Design,
    sample_weights: Option<&[f64]>,
    l2: f64,
    opts: &FitOptions,
) -> Result<FitResult> {
    let d = design.d;
    let n = design.n.max(1) as f64;
    // smoothness bound for standardized columns: tr(X'X / 4n) <= d / 4
    let lipschitz = 0.25 * d as f64 + l2 / n + 0.25;
    let step = 1.0 / lipschitz;

    let mut theta = vec![0.0; d + 1];
    let mut lookahead = theta.clone();
    let mut momentum = 1.0f64;
    let mut last_checked_loss = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;

    for iter in 0..opts.max_iters {
        iterations = iter + 1;
        let (loss_at_v, grad) = loss_grad_flat(design, sample_weights, &lookahead, l2);
        if !loss_at_v.is_finite() {
            return Err(Error::numerical(
                "non-finite logistic loss; input matrix is corrupt",
            ));
        }
        let grad_max = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
        if grad_max < opts.tol {
            theta = lookahead.clone();
            converged = true;
            break;
        }
        let next: Vec<f64> = lookahead
            .iter()
            .zip(&grad)
            .map(|(v, g)| v - step * g)
            .collect();
        let momentum_next = 0.5 * (1.0 + (1.0 + 4.0 * momentum * momentum).sqrt());
        let beta = (momentum - 1.0) / momentum_next;
        for j in 0..=d {
            lookahead[j] = next[j] + beta * (next[j] - theta[j]);
        }
        theta = next;
        momentum = momentum_next;

        // periodic restart keeps the momentum sequence from overshooting
        if iter % 16 == 15 {
            let (loss_now, _) = loss_grad_flat(design, sample_weights, &theta, l2);
            if loss_now > last_checked_loss {
                lookahead = theta.clone();
                momentum = 1.0;
            }
            last_checked_loss = loss_now;
        }
    }
    Ok(FitResult {
        params: theta,
        iterations,
        converged,
    })
}

/// Train on the given matrix rows. Standardization statistics come from
/// these rows only.
pub fn train_logreg(matrix: &FeatureMatrix, rows: &[usize], l2: f64) -> Result<LogRegModel> {
    if rows.is_empty() {
        return Err(Error::config("empty training set"));
    }
    if l2 < 0.0 {
        return Err(Error::config("negative l2 strength"));
    }
    let scaler = Standardizer::fit(matrix, rows);
    let design = Design::standardized(matrix, rows, &scaler);
    let fit = fit_logistic(&design, None, l2, &FitOptions::default())?;
    Ok(LogRegModel {
        l2,
        core: LogRegCore {
            bias: fit.params[0],
            weights: fit.params[1..].to_vec(),
        },
        scaler,
        iterations: fit.iterations,
        converged: fit.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{Block, FeatureRegistry};
    use rand::Rng;
    use rand::SeedableRng;

    pub(crate) fn toy_matrix(rows: Vec<Vec<f64>>, labels: Vec<bool>) -> FeatureMatrix {
        let d = rows[0].len();
        let names: Vec<String> = (0..d).map(|j| format!("x{j}")).collect();
        let registry = FeatureRegistry::ad_hoc(&names).unwrap();
        assert_eq!(registry.block(0), Block::Custom);
        FeatureMatrix::from_parts(
            (0..rows.len()).map(|i| format!("r{i:04}")).collect(),
            registry,
            rows.into_iter().flatten().collect(),
            labels,
        )
        .unwrap()
    }

    #[test]
    fn gradient_matches_central_finite_differences() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        let rows: Vec<Vec<f64>> = (0..50)
            .map(|_| (0..10).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect())
            .collect();
        let labels: Vec<bool> = (0..50).map(|_| rng.gen::<bool>()).collect();
        let l2 = 0.37;
        let h = 1e-6;
        for _ in 0..20 {
            let params: Vec<f64> = (0..11).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
            let (_, grad) = loss_and_gradient(&rows, &labels, &params, l2);
            for j in 0..params.len() {
                let mut plus = params.clone();
                plus[j] += h;
                let mut minus = params.clone();
                minus[j] -= h;
                let (lp, _) = loss_and_gradient(&rows, &labels, &plus, l2);
                let (lm, _) = loss_and_gradient(&rows, &labels, &minus, l2);
                let fd = (lp - lm) / (2.0 * h);
                let rel = (grad[j] - fd).abs() / grad[j].abs().max(fd.abs()).max(1e-8);
                assert!(rel < 1e-5, "param {j}: analytic {} vs fd {fd}", grad[j]);
            }
        }
    }

    #[test]
    fn balanced_data_has_zero_bias_gradient_at_origin() {
        let rows = vec![vec![1.0, -2.0], vec![-0.5, 0.5], vec![2.0, 2.0], vec![0.3, 0.1]];
        let labels = vec![true, false, true, false];
        let (_, grad) = loss_and_gradient(&rows, &labels, &[0.0, 0.0, 0.0], 1.0);
        assert!(grad[0].abs() < 1e-15, "bias gradient {}", grad[0]);
    }

    #[test]
    fn separable_toy_data_reaches_full_training_accuracy() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for i in 0..80 {
            let y = i % 2 == 0;
            let shift = if y { 2.0 } else { -2.0 };
            rows.push(vec![shift + 0.3 * rng.gen::<f64>(), rng.gen::<f64>()]);
            labels.push(y);
        }
        let matrix = toy_matrix(rows, labels);
        let rows_idx: Vec<usize> = (0..matrix.n_rows()).collect();
        let model = train_logreg(&matrix, &rows_idx, 1e-6).unwrap();
        let correct = rows_idx
            .iter()
            .filter(|&&i| (model.score(matrix.row(i)) >= 0.5) == matrix.label(i))
            .count();
        assert_eq!(correct, matrix.n_rows());
    }

    #[test]
    fn probabilities_survive_affine_feature_rescaling() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        let rows: Vec<Vec<f64>> = (0..120)
            .map(|_| vec![rng.gen::<f64>(), rng.gen::<f64>(), rng.gen::<f64>()])
            .collect();
        let labels: Vec<bool> = rows.iter().map(|r| r[0] + 0.5 * r[1] > 0.9).collect();
        let scaled_rows: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| vec![r[0] * 250.0 + 3.0, r[1], r[2]])
            .collect();
        let m1 = toy_matrix(rows, labels.clone());
        let m2 = toy_matrix(scaled_rows, labels);
        let idx: Vec<usize> = (0..m1.n_rows()).collect();
        let a = train_logreg(&m1, &idx, 0.5).unwrap();
        let b = train_logreg(&m2, &idx, 0.5).unwrap();
        for &i in &idx {
            let pa = a.score(m1.row(i));
            let pb = b.score(m2.row(i));
            assert!((pa - pb).abs() < 1e-6, "row {i}: {pa} vs {pb}");
        }
    }
}
