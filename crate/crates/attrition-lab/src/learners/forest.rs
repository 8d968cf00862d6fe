//! Random forest: bagged CART trees on bootstrap samples, probability is
//! the mean of leaf class rates. Deterministic under a fixed seed: each
//! tree derives its own stream from (seed, tree index), so the forest is
//! identical no matter how many workers build it.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::learners::tree::{grow_tree, BinnedData, GrowParams, Tree};
use crate::learners::TreeEnsembleParams;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForestModel {
    pub trees: Vec<Tree>,
    pub max_depth: Option<u32>,
    pub feature_subsample: f64,
    pub min_leaf: usize,
    pub bootstrap: bool,
    pub seed: u64,
}

impl ForestModel {
    pub fn score(&self, row: &[f64]) -> f64 {
        let sum: f64 = self.trees.iter().map(|t| t.predict(row)).sum();
        sum / self.trees.len() as f64
    }
}

fn tree_rng(seed: u64, tree_idx: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (tree_idx as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

pub fn train_forest(
    matrix: &FeatureMatrix,
    rows: &[usize],
    params: &TreeEnsembleParams,
    seed: u64,
) -> Result<ForestModel> {
    params.validate()?;
    if rows.is_empty() {
        return Err(Error::config("empty training set"));
    }
    let binned = BinnedData::from_matrix(matrix, rows);
    let targets: Vec<f64> = rows
        .iter()
        .map(|&i| if matrix.label(i) { 1.0 } else { 0.0 })
        .collect();
    let hess = vec![1.0; rows.len()];
    let subsample = params
        .feature_subsample
        .unwrap_or_else(|| (matrix.n_cols() as f64).sqrt() / matrix.n_cols() as f64);
    let grow = GrowParams {
        max_depth: params.max_depth,
        min_leaf: params.min_leaf,
        feature_subsample: Some(subsample),
    };

    let n = rows.len();
    let trees: Vec<Tree> = (0..params.trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = tree_rng(seed, t);
            let local: Vec<u32> = if params.bootstrap {
                (0..n).map(|_| rng.gen_range(0..n) as u32).collect()
            } else {
                (0..n as u32).collect()
            };
            grow_tree(&binned, &local, &targets, &hess, &grow, &mut rng)
        })
        .collect();

    Ok(ForestModel {
        trees,
        max_depth: params.max_depth,
        feature_subsample: subsample,
        min_leaf: params.min_leaf,
        bootstrap: params.bootstrap,
        seed,
    })
}
