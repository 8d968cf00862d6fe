//! Adaptive boosting with logistic-regression weak learners.
//!
//! Training follows the discrete recipe: each stage fits a weighted
//! logistic regression, takes its 0.5-thresholded sign as the weak
//! hypothesis, sets the stage weight from the weighted error, and reweights
//! the samples. A weighted error of zero keeps the stage and stops; an
//! error at or above one half discards it and stops.
//!
//! Scoring combines the stage-weighted average of the weak learners'
//! decision values through the logistic link, so a single-stage model
//! reduces exactly to its plain logistic regression.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::learners::logreg::{
    fit_logistic, sigmoid, Design, FitOptions, LogRegCore, Standardizer,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdaStage {
    pub alpha: f64,
    pub core: LogRegCore,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdaLogRegModel {
    pub l2: f64,
    pub stages: Vec<AdaStage>,
    pub scaler: Standardizer,
}

impl AdaLogRegModel {
    pub fn score(&self, raw_row: &[f64]) -> f64 {
        let x = self.scaler.transform(raw_row);
        let total_alpha: f64 = self.stages.iter().map(|s| s.alpha).sum();
        let combined: f64 = self
            .stages
            .iter()
            .map(|s| s.alpha * s.core.decision(&x))
            .sum::<f64>()
            / total_alpha.max(1e-12);
        sigmoid(combined)
    }
}

pub fn train_ada_logreg(
    matrix: &FeatureMatrix,
    rows: &[usize],
    stages: usize,
    l2: f64,
) -> Result<AdaLogRegModel> {
    if stages == 0 {
        return Err(Error::config("ada-boost needs at least one stage"));
    }
    if rows.is_empty() {
        return Err(Error::config("empty training set"));
    }
    let scaler = Standardizer::fit(matrix, rows);
    let design = Design::standardized(matrix, rows, &scaler);
    let n = rows.len();
    let mut weights = vec![1.0 / n as f64; n];
    let mut out = Vec::new();

    for _ in 0..stages {
        let fit = fit_logistic(&design, Some(&weights), l2, &FitOptions::default())?;
        let core = LogRegCore {
            bias: fit.params[0],
            weights: fit.params[1..].to_vec(),
        };
        let mut error = 0.0;
        let mut hard: Vec<bool> = Vec::with_capacity(n);
        for k in 0..n {
            let f = core.decision(&design.x[k * design.d..(k + 1) * design.d]);
            let predicted = f >= 0.0;
            hard.push(predicted);
            if predicted != (design.y[k] > 0.5) {
                error += weights[k];
            }
        }
        if error >= 0.5 {
            // degenerate stage: no better than coin flipping under the
            // current weights
            break;
        }
        let clamped = error.max(1e-8);
        let alpha = 0.5 * ((1.0 - clamped) / clamped).ln();
        out.push(AdaStage { alpha, core });
        if error == 0.0 {
            break;
        }
        let mut total = 0.0;
        for k in 0..n {
            let agrees = hard[k] == (design.y[k] > 0.5);
            weights[k] *= if agrees { (-alpha).exp() } else { alpha.exp() };
            total += weights[k];
        }
        for w in &mut weights {
            *w /= total;
        }
    }

    if out.is_empty() {
        // even the first learner was degenerate; keep it anyway so scoring
        // is defined, with a neutral stage weight
        let fit = fit_logistic(&design, Some(&weights), l2, &FitOptions::default())?;
        out.push(AdaStage {
            alpha: 1.0,
            core: LogRegCore {
                bias: fit.params[0],
                weights: fit.params[1..].to_vec(),
            },
        });
    }

    Ok(AdaLogRegModel {
        l2,
        stages: out,
        scaler,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::FeatureRegistry;
    use crate::learners::logreg::train_logreg;
    use rand::Rng;
    use rand::SeedableRng;

    fn signal_matrix(n: usize, seed: u64) -> FeatureMatrix {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut values = Vec::new();
        let mut labels = Vec::new();
        for _ in 0..n {
            let x0: f64 = rng.gen::<f64>() * 2.0 - 1.0;
            let x1: f64 = rng.gen::<f64>() * 2.0 - 1.0;
            values.extend([x0, x1]);
            labels.push(x0 + 0.3 * x1 + 0.4 * (rng.gen::<f64>() - 0.5) > 0.0);
        }
        FeatureMatrix::from_parts(
            (0..n).map(|i| format!("r{i:04}")).collect(),
            FeatureRegistry::ad_hoc(&["x0".into(), "x1".into()]).unwrap(),
            values,
            labels,
        )
        .unwrap()
    }

    #[test]
    fn single_stage_ranks_exactly_like_plain_logreg() {
        let matrix = signal_matrix(150, 3);
        let rows: Vec<usize> = (0..matrix.n_rows()).collect();
        let ada = train_ada_logreg(&matrix, &rows, 1, 0.1).unwrap();
        let plain = train_logreg(&matrix, &rows, 0.1).unwrap();
        // identical ranking: the single-stage score is a monotone transform
        // of the plain probability (numerically they coincide)
        for &i in &rows {
            let pa = ada.score(matrix.row(i));
            let pp = plain.score(matrix.row(i));
            assert!((pa - pp).abs() < 1e-9, "row {i}: {pa} vs {pp}");
        }
    }

    #[test]
    fn perfect_weak_learner_stops_boosting() {
        // linearly separable: stage one has weighted error zero
        let mut values = Vec::new();
        let mut labels = Vec::new();
        for i in 0..60 {
            let y = i % 2 == 0;
            values.push(if y { 1.0 + 0.01 * i as f64 } else { -1.0 - 0.01 * i as f64 });
            labels.push(y);
        }
        let matrix = FeatureMatrix::from_parts(
            (0..60).map(|i| format!("r{i:02}")).collect(),
            FeatureRegistry::ad_hoc(&["x".into()]).unwrap(),
            values,
            labels,
        )
        .unwrap();
        let rows: Vec<usize> = (0..60).collect();
        let ada = train_ada_logreg(&matrix, &rows, 10, 1e-6).unwrap();
        assert_eq!(ada.stages.len(), 1, "boosting should stop at the perfect stage");
        // and that learner dominates the vote by construction
        assert!(ada.stages[0].alpha > 5.0);
    }
}
