//! Histogram-binned CART regression trees.
//!
//! One builder serves both ensembles: random forests grow trees on 0/1
//! targets with unit hessians (variance splitting on binary targets orders
//! splits exactly like Gini), while gradient boosting passes logistic
//! gradients and hessians and reads Newton leaf values.

use rand::seq::index::sample;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::features::FeatureMatrix;

const MAX_BINS: usize = 256;
const MIN_GAIN: f64 = 1e-12;
const MIN_HESSIAN: f64 = 1e-12;

/// Bin codes for the training rows plus the cut values that translate a bin
/// boundary back into a raw threshold.
pub(crate) struct BinnedData {
    n_features: usize,
    /// row-major codes, one per (training row, feature)
    codes: Vec<u16>,
    /// per feature: ascending upper edges; bin b holds x <= cuts[b] (last
    /// bin open)
    cuts: Vec<Vec<f64>>,
}

impl BinnedData {
    pub(crate) fn from_matrix(matrix: &FeatureMatrix, rows: &[usize]) -> BinnedData {
        let d = matrix.n_cols();
        let mut cuts = Vec::with_capacity(d);
        for f in 0..d {
            let mut values: Vec<f64> = rows.iter().map(|&i| matrix.row(i)[f]).collect();
            values.sort_by(|a, b| a.partial_cmp(b).expect("finite features"));
            values.dedup();
            let edges: Vec<f64> = if values.len() <= MAX_BINS {
                // split between every pair of adjacent distinct values
                values[..values.len().saturating_sub(1)].to_vec()
            } else {
                let k = MAX_BINS - 1;
                let mut e: Vec<f64> = (1..=k)
                    .map(|i| values[i * values.len() / (k + 1)])
                    .collect();
                e.dedup();
                e
            };
            cuts.push(edges);
        }
        let mut codes = vec![0u16; rows.len() * d];
        for (r, &i) in rows.iter().enumerate() {
            let row = matrix.row(i);
            for f in 0..d {
                codes[r * d + f] = cuts[f].partition_point(|c| *c < row[f]) as u16;
            }
        }
        BinnedData {
            n_features: d,
            codes,
            cuts,
        }
    }

    fn code(&self, row: usize, feature: usize) -> usize {
        self.codes[row * self.n_features + feature] as usize
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeNode {
    pub feature: u32,
    pub threshold: f64,
    /// Child indices; `-1` marks a leaf.
    pub left: i32,
    pub right: i32,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Tree {
    pub nodes: Vec<TreeNode>,
}

impl Tree {
    pub fn predict(&self, row: &[f64]) -> f64 {
        let mut at = 0usize;
        loop {
            let node = &self.nodes[at];
            if node.left < 0 {
                return node.value;
            }
            at = if row[node.feature as usize] <= node.threshold {
                node.left as usize
            } else {
                node.right as usize
            };
        }
    }

    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| n.left < 0).count()
    }
}

pub(crate) struct GrowParams {
    pub max_depth: Option<u32>,
    pub min_leaf: usize,
    /// Fraction of features examined per split; `None` means all.
    pub feature_subsample: Option<f64>,
}

struct NodeWork {
    node_idx: usize,
    /// range into the shared row-permutation buffer
    start: usize,
    end: usize,
    depth: u32,
}

/// Grow one tree over `local_rows` (indices into the binned data). `grad`
/// and `hess` are indexed the same way; pass unit hessians for plain
/// mean-leaf trees.
pub(crate) fn grow_tree(
    binned: &BinnedData,
    local_rows: &[u32],
    grad: &[f64],
    hess: &[f64],
    params: &GrowParams,
    rng: &mut ChaCha8Rng,
) -> Tree {
    let mut order: Vec<u32> = local_rows.to_vec();
    let mut nodes = Vec::new();
    nodes.push(TreeNode {
        feature: 0,
        threshold: 0.0,
        left: -1,
        right: -1,
        value: 0.0,
    });
    let mut stack = vec![NodeWork {
        node_idx: 0,
        start: 0,
        end: order.len(),
        depth: 0,
    }];

    while let Some(work) = stack.pop() {
        let rows = &order[work.start..work.end];
        let (g_total, h_total) = rows.iter().fold((0.0, 0.0), |(g, h), &r| {
            (g + grad[r as usize], h + hess[r as usize])
        });
        let leaf_value = g_total / h_total.max(MIN_HESSIAN);
        nodes[work.node_idx].value = leaf_value;

        let depth_capped = params.max_depth.is_some_and(|d| work.depth >= d);
        if depth_capped || rows.len() < 2 * params.min_leaf {
            continue;
        }

        let Some(split) = best_split(binned, rows, grad, hess, g_total, h_total, params, rng)
        else {
            continue;
        };

        // partition the permutation buffer around the split
        let slice = &mut order[work.start..work.end];
        let mut left_count = 0usize;
        for i in 0..slice.len() {
            if binned.code(slice[i] as usize, split.feature) <= split.bin {
                slice.swap(i, left_count);
                left_count += 1;
            }
        }
        let mid = work.start + left_count;

        let left_idx = nodes.len();
        let right_idx = nodes.len() + 1;
        nodes[work.node_idx].feature = split.feature as u32;
        nodes[work.node_idx].threshold = split.threshold;
        nodes[work.node_idx].left = left_idx as i32;
        nodes[work.node_idx].right = right_idx as i32;
        for _ in 0..2 {
            nodes.push(TreeNode {
                feature: 0,
                threshold: 0.0,
                left: -1,
                right: -1,
                value: 0.0,
            });
        }
        stack.push(NodeWork {
            node_idx: left_idx,
            start: work.start,
            end: mid,
            depth: work.depth + 1,
        });
        stack.push(NodeWork {
            node_idx: right_idx,
            start: mid,
            end: work.end,
            depth: work.depth + 1,
        });
    }
    Tree { nodes }
}

struct Split {
    feature: usize,
    bin: usize,
    threshold: f64,
    gain: f64,
}

#[allow(clippy::too_many_arguments)]
fn best_split(
    binned: &BinnedData,
    rows: &[u32],
    grad: &[f64],
    hess: &[f64],
    g_total: f64,
    h_total: f64,
    params: &GrowParams,
    rng: &mut ChaCha8Rng,
) -> Option<Split> {
    let d = binned.n_features;
    let features: Vec<usize> = match params.feature_subsample {
        Some(frac) if frac < 1.0 => {
            let m = ((frac * d as f64).ceil() as usize).clamp(1, d);
            let mut picked: Vec<usize> = sample(rng, d, m).into_iter().collect();
            picked.sort_unstable();
            picked
        }
        _ => (0..d).collect(),
    };

    let base_score = g_total * g_total / h_total.max(MIN_HESSIAN);
    let mut best: Option<Split> = None;
    let mut hist_g = vec![0.0f64; MAX_BINS];
    let mut hist_h = vec![0.0f64; MAX_BINS];
    let mut hist_n = vec![0u32; MAX_BINS];

    for &f in &features {
        let n_cuts = binned.cuts[f].len();
        if n_cuts == 0 {
            continue;
        }
        let n_bins = n_cuts + 1;
        hist_g[..n_bins].fill(0.0);
        hist_h[..n_bins].fill(0.0);
        hist_n[..n_bins].fill(0);
        for &r in rows {
            let b = binned.code(r as usize, f);
            hist_g[b] += grad[r as usize];
            hist_h[b] += hess[r as usize];
            hist_n[b] += 1;
        }
        let total_n: u32 = rows.len() as u32;
        let mut gl = 0.0;
        let mut hl = 0.0;
        let mut nl = 0u32;
        for b in 0..n_cuts {
            gl += hist_g[b];
            hl += hist_h[b];
            nl += hist_n[b];
            let nr = total_n - nl;
            if (nl as usize) < params.min_leaf || (nr as usize) < params.min_leaf {
                continue;
            }
            let gr = g_total - gl;
            let hr = h_total - hl;
            let gain =
                gl * gl / hl.max(MIN_HESSIAN) + gr * gr / hr.max(MIN_HESSIAN) - base_score;
            let better = match &best {
                Some(s) => gain > s.gain + MIN_GAIN,
                None => gain > MIN_GAIN,
            };
            if better {
                best = Some(Split {
                    feature: f,
                    bin: b,
                    threshold: binned.cuts[f][b],
                    gain,
                });
            }
        }
    }
    best
}
