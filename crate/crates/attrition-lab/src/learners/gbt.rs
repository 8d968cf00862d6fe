//! Gradient-boosted decision trees with logistic loss: stagewise regression
//! trees on the loss gradient, Newton leaf values, probability through the
//! logistic link. Supports validation-based early stopping on fold loss.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::learners::logreg::sigmoid;
use crate::learners::tree::{grow_tree, BinnedData, GrowParams, Tree};
use crate::learners::TreeEnsembleParams;

const EARLY_STOP_PATIENCE: usize = 20;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GbtModel {
    pub init_score: f64,
    pub learning_rate: f64,
    pub trees: Vec<Tree>,
    pub max_depth: Option<u32>,
    pub min_leaf: usize,
    pub seed: u64,
    /// Stage count after early stopping, if a validation set was used.
    pub stopped_early: bool,
}

impl GbtModel {
    pub fn decision(&self, row: &[f64]) -> f64 {
        self.init_score
            + self.learning_rate * self.trees.iter().map(|t| t.predict(row)).sum::<f64>()
    }

    pub fn score(&self, row: &[f64]) -> f64 {
        sigmoid(self.decision(row))
    }
}

fn log_loss(decisions: &[f64], labels: &[bool]) -> f64 {
    let mut total = 0.0;
    for (&f, &y) in decisions.iter().zip(labels) {
        let yv = if y { 1.0 } else { 0.0 };
        total += f.max(0.0) - yv * f + (-f.abs()).exp().ln_1p();
    }
    total / decisions.len() as f64
}

/// Train on `rows`; when `valid_rows` is given, stage count is chosen by
/// early stopping on validation log-loss.
pub fn train_gbt(
    matrix: &FeatureMatrix,
    rows: &[usize],
    params: &TreeEnsembleParams,
    seed: u64,
    valid_rows: Option<&[usize]>,
) -> Result<GbtModel> {
    params.validate()?;
    if rows.is_empty() {
        return Err(Error::config("empty training set"));
    }
    let n = rows.len();
    let labels: Vec<f64> = rows
        .iter()
        .map(|&i| if matrix.label(i) { 1.0 } else { 0.0 })
        .collect();
    let base_rate = (labels.iter().sum::<f64>() / n as f64).clamp(1e-6, 1.0 - 1e-6);
    let init_score = (base_rate / (1.0 - base_rate)).ln();

    let binned = BinnedData::from_matrix(matrix, rows);
    let grow = GrowParams {
        max_depth: params.max_depth,
        min_leaf: params.min_leaf,
        feature_subsample: params.feature_subsample,
    };
    let local: Vec<u32> = (0..n as u32).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut decisions = vec![init_score; n];
    let mut grad = vec![0.0; n];
    let mut hess = vec![0.0; n];
    let mut trees: Vec<Tree> = Vec::new();

    let valid_labels: Vec<bool> = valid_rows
        .map(|v| v.iter().map(|&i| matrix.label(i)).collect())
        .unwrap_or_default();
    let mut valid_decisions: Vec<f64> = vec![init_score; valid_labels.len()];
    let mut best_loss = f64::INFINITY;
    let mut best_stage = 0usize;
    let mut stopped_early = false;

    for stage in 0..params.trees {
        for k in 0..n {
            let p = sigmoid(decisions[k]);
            grad[k] = labels[k] - p;
            hess[k] = (p * (1.0 - p)).max(1e-9);
        }
        let tree = grow_tree(&binned, &local, &grad, &hess, &grow, &mut rng);
        // a gainless stump adds nothing further
        if tree.nodes.len() == 1 && tree.nodes[0].value.abs() < 1e-12 {
            break;
        }
        for (k, &i) in rows.iter().enumerate() {
            decisions[k] += params.learning_rate * tree.predict(matrix.row(i));
        }
        if let Some(valid) = valid_rows {
            for (slot, &i) in valid.iter().enumerate() {
                valid_decisions[slot] += params.learning_rate * tree.predict(matrix.row(i));
            }
        }
        trees.push(tree);

        if valid_rows.is_some() {
            let loss = log_loss(&valid_decisions, &valid_labels);
            if loss < best_loss - 1e-9 {
                best_loss = loss;
                best_stage = stage + 1;
            } else if stage + 1 - best_stage >= EARLY_STOP_PATIENCE {
                stopped_early = true;
                break;
            }
        }
    }
    if valid_rows.is_some() && best_stage > 0 {
        trees.truncate(best_stage);
    }

    Ok(GbtModel {
        init_score,
        learning_rate: params.learning_rate,
        trees,
        max_depth: params.max_depth,
        min_leaf: params.min_leaf,
        seed,
        stopped_early,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::FeatureRegistry;
    use crate::learners::logreg::train_logreg;

    /// The four-point XOR pattern, replicated with slight jitter.
    fn xor_matrix() -> FeatureMatrix {
        let mut values = Vec::new();
        let mut labels = Vec::new();
        for rep in 0..10 {
            let eps = rep as f64 * 1e-3;
            for (a, b) in [(0.0, 0.0), (0.0, 1.0), (1.0, 0.0), (1.0, 1.0)] {
                values.extend([a + eps, b - eps]);
                labels.push((a > 0.5) != (b > 0.5));
            }
        }
        FeatureMatrix::from_parts(
            (0..labels.len()).map(|i| format!("r{i:02}")).collect(),
            FeatureRegistry::ad_hoc(&["a".into(), "b".into()]).unwrap(),
            values,
            labels,
        )
        .unwrap()
    }

    #[test]
    fn gbt_solves_xor_where_logreg_cannot() {
        let matrix = xor_matrix();
        let rows: Vec<usize> = (0..matrix.n_rows()).collect();
        let params = TreeEnsembleParams {
            trees: 50,
            max_depth: Some(2),
            learning_rate: 0.5,
            ..TreeEnsembleParams::default_gbt()
        };
        let gbt = train_gbt(&matrix, &rows, &params, 1, None).unwrap();
        let gbt_acc = rows
            .iter()
            .filter(|&&i| (gbt.score(matrix.row(i)) >= 0.5) == matrix.label(i))
            .count() as f64
            / rows.len() as f64;
        assert_eq!(gbt_acc, 1.0);

        let lr = train_logreg(&matrix, &rows, 1e-4).unwrap();
        let lr_acc = rows
            .iter()
            .filter(|&&i| (lr.score(matrix.row(i)) >= 0.5) == matrix.label(i))
            .count() as f64
            / rows.len() as f64;
        assert!(lr_acc <= 0.75, "logistic regression scored {lr_acc} on xor");
    }

    #[test]
    fn early_stopping_truncates_to_the_best_stage() {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let n = 400;
        let mut values = Vec::new();
        let mut labels = Vec::new();
        for _ in 0..n {
            let x: f64 = rng.gen();
            let noise: f64 = rng.gen();
            values.extend([x, noise]);
            labels.push(x + 0.8 * noise > 0.9);
        }
        let matrix = FeatureMatrix::from_parts(
            (0..n).map(|i| format!("r{i:04}")).collect(),
            FeatureRegistry::ad_hoc(&["x".into(), "noise".into()]).unwrap(),
            values,
            labels,
        )
        .unwrap();
        let train: Vec<usize> = (0..300).collect();
        let valid: Vec<usize> = (300..400).collect();
        let params = TreeEnsembleParams {
            trees: 400,
            max_depth: Some(3),
            learning_rate: 0.3,
            ..TreeEnsembleParams::default_gbt()
        };
        let model = train_gbt(&matrix, &train, &params, 2, Some(&valid)).unwrap();
        assert!(model.trees.len() < 400, "early stop never fired");
    }
}
