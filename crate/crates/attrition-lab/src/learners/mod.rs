//! Supervised attrition classifiers: four model families behind one
//! probability-scoring artifact, an 80/20 split with 10-fold
//! cross-validated tuning, test-set evaluation, and the per-feature
//! regression scan.

mod adaboost;
mod forest;
mod gbt;
pub mod logreg;
pub mod metrics;
mod split;
mod tree;

pub use adaboost::{train_ada_logreg, AdaLogRegModel, AdaStage};
pub use forest::{train_forest, ForestModel};
pub use gbt::{train_gbt, GbtModel};
pub use logreg::{loss_and_gradient, train_logreg, LogRegModel, Standardizer};
pub use metrics::{
    auroc_from_points, concordance_auroc, evaluate_scores, roc_points, Confusion, EvalReport,
    DECISION_THRESHOLD,
};
pub use split::{make_split, SplitPlan, N_FOLDS, TEST_FRACTION};
pub use tree::{Tree, TreeNode};

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureMatrix;
use crate::learners::logreg::{fit_logistic, sigmoid, Design, FitOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    Logreg,
    RandomForest,
    Gbt,
    AdaLogreg,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [
        ModelKind::Logreg,
        ModelKind::RandomForest,
        ModelKind::Gbt,
        ModelKind::AdaLogreg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Logreg => "logreg",
            ModelKind::RandomForest => "random_forest",
            ModelKind::Gbt => "gbt",
            ModelKind::AdaLogreg => "ada_logreg",
        }
    }

    pub fn parse(s: &str) -> Result<ModelKind> {
        match s.trim().to_ascii_lowercase().as_str() {
            "logreg" => Ok(ModelKind::Logreg),
            "random_forest" => Ok(ModelKind::RandomForest),
            "gbt" => Ok(ModelKind::Gbt),
            "ada_logreg" => Ok(ModelKind::AdaLogreg),
            other => Err(Error::config(format!("unknown model kind {other:?}"))),
        }
    }
}

/// Shared knobs for the tree ensembles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeEnsembleParams {
    pub trees: usize,
    pub max_depth: Option<u32>,
    pub learning_rate: f64,
    pub feature_subsample: Option<f64>,
    pub min_leaf: usize,
    pub bootstrap: bool,
}

impl TreeEnsembleParams {
    pub fn default_rf() -> TreeEnsembleParams {
        TreeEnsembleParams {
            trees: 200,
            max_depth: None,
            learning_rate: 1.0,
            feature_subsample: None, // sqrt(d) / d
            min_leaf: 5,
            bootstrap: true,
        }
    }

    pub fn default_gbt() -> TreeEnsembleParams {
        TreeEnsembleParams {
            trees: 500,
            max_depth: Some(3),
            learning_rate: 0.1,
            feature_subsample: Some(1.0),
            min_leaf: 5,
            bootstrap: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trees == 0 {
            return Err(Error::config("tree count must be positive"));
        }
        if self.max_depth == Some(0) {
            return Err(Error::config("tree depth must be positive"));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::config("learning rate must be positive"));
        }
        if self.min_leaf == 0 {
            return Err(Error::config("min_leaf must be positive"));
        }
        Ok(())
    }
}

/// One hyperparameter setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HyperPoint {
    Logreg { l2: f64 },
    RandomForest { max_depth: Option<u32>, trees: usize },
    Gbt { max_depth: u32, learning_rate: f64, max_trees: usize },
    AdaLogreg { stages: usize, l2: f64 },
}

impl HyperPoint {
    pub fn kind(&self) -> ModelKind {
        match self {
            HyperPoint::Logreg { .. } => ModelKind::Logreg,
            HyperPoint::RandomForest { .. } => ModelKind::RandomForest,
            HyperPoint::Gbt { .. } => ModelKind::Gbt,
            HyperPoint::AdaLogreg { .. } => ModelKind::AdaLogreg,
        }
    }

    /// Whether `self` wins a tied comparison: stronger regularization and
    /// smaller capacity are preferred.
    fn preferred_over(&self, other: &HyperPoint) -> bool {
        match (self, other) {
            (HyperPoint::Logreg { l2: a }, HyperPoint::Logreg { l2: b }) => a > b,
            (
                HyperPoint::RandomForest { max_depth: d1, trees: t1 },
                HyperPoint::RandomForest { max_depth: d2, trees: t2 },
            ) => {
                let depth = |d: &Option<u32>| d.unwrap_or(u32::MAX);
                (depth(d1), t1) < (depth(d2), t2)
            }
            (
                HyperPoint::Gbt { max_depth: d1, learning_rate: r1, max_trees: t1 },
                HyperPoint::Gbt { max_depth: d2, learning_rate: r2, max_trees: t2 },
            ) => (d1, r1, t1) < (d2, r2, t2),
            (
                HyperPoint::AdaLogreg { stages: s1, l2: a },
                HyperPoint::AdaLogreg { stages: s2, l2: b },
            ) => s1 < s2 || (s1 == s2 && a > b),
            _ => false,
        }
    }
}

/// The default search grids. The data gives no guidance beyond these.
pub fn default_grid(kind: ModelKind) -> Vec<HyperPoint> {
    match kind {
        ModelKind::Logreg => log_spaced(1e-3, 1e2, 7)
            .into_iter()
            .map(|l2| HyperPoint::Logreg { l2 })
            .collect(),
        ModelKind::RandomForest => [Some(4), Some(8), Some(16), None]
            .into_iter()
            .map(|max_depth| HyperPoint::RandomForest {
                max_depth,
                trees: 200,
            })
            .collect(),
        ModelKind::Gbt => {
            let mut grid = Vec::new();
            for max_depth in [2, 3, 4] {
                for learning_rate in [0.05, 0.1, 0.3] {
                    grid.push(HyperPoint::Gbt {
                        max_depth,
                        learning_rate,
                        max_trees: 500,
                    });
                }
            }
            grid
        }
        ModelKind::AdaLogreg => [2, 5, 10]
            .into_iter()
            .map(|stages| HyperPoint::AdaLogreg { stages, l2: 1.0 })
            .collect(),
    }
}

/// Ada-boost grid reusing an already-tuned weak-learner regularization.
pub fn ada_grid(l2: f64) -> Vec<HyperPoint> {
    [2, 5, 10]
        .into_iter()
        .map(|stages| HyperPoint::AdaLogreg { stages, l2 })
        .collect()
}

pub fn log_spaced(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    let (llo, lhi) = (lo.ln(), hi.ln());
    (0..points)
        .map(|i| (llo + (lhi - llo) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelParams {
    Logreg(LogRegModel),
    RandomForest(ForestModel),
    Gbt(GbtModel),
    AdaLogreg(AdaLogRegModel),
}

/// A trained attrition model with a uniform probability-scoring contract.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassifierArtifact {
    pub kind: ModelKind,
    pub hyperparameters: HyperPoint,
    pub params: ModelParams,
    pub registry_fingerprint: String,
    pub seed: u64,
}

impl ClassifierArtifact {
    pub fn score_row(&self, row: &[f64]) -> f64 {
        match &self.params {
            ModelParams::Logreg(m) => m.score(row),
            ModelParams::RandomForest(m) => m.score(row),
            ModelParams::Gbt(m) => m.score(row),
            ModelParams::AdaLogreg(m) => m.score(row),
        }
    }

    /// Score matrix rows after checking the registry fingerprint.
    pub fn score_matrix(&self, matrix: &FeatureMatrix, rows: &[usize]) -> Result<Vec<f64>> {
        if matrix.registry.fingerprint() != self.registry_fingerprint {
            return Err(Error::config(
                "feature registry fingerprint does not match the model artifact",
            ));
        }
        Ok(rows.iter().map(|&i| self.score_row(matrix.row(i))).collect())
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        let body = serde_json::to_string_pretty(self).map_err(|e| Error::Json {
            path: path.display().to_string(),
            source: e,
        })?;
        std::fs::write(path, body + "\n").map_err(|e| Error::io(path.display().to_string(), e))
    }

    pub fn load_json(path: &Path) -> Result<ClassifierArtifact> {
        let body =
            std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        serde_json::from_str(&body).map_err(|e| Error::Json {
            path: path.display().to_string(),
            source: e,
        })
    }
}

/// Train one model at a fixed hyperparameter point.
pub fn train_artifact(
    matrix: &FeatureMatrix,
    rows: &[usize],
    point: &HyperPoint,
    seed: u64,
) -> Result<ClassifierArtifact> {
    let params = match point {
        HyperPoint::Logreg { l2 } => ModelParams::Logreg(train_logreg(matrix, rows, *l2)?),
        HyperPoint::RandomForest { max_depth, trees } => {
            let p = TreeEnsembleParams {
                trees: *trees,
                max_depth: *max_depth,
                ..TreeEnsembleParams::default_rf()
            };
            ModelParams::RandomForest(train_forest(matrix, rows, &p, seed)?)
        }
        HyperPoint::Gbt {
            max_depth,
            learning_rate,
            max_trees,
        } => {
            let p = TreeEnsembleParams {
                trees: *max_trees,
                max_depth: Some(*max_depth),
                learning_rate: *learning_rate,
                ..TreeEnsembleParams::default_gbt()
            };
            ModelParams::Gbt(train_gbt(matrix, rows, &p, seed, None)?)
        }
        HyperPoint::AdaLogreg { stages, l2 } => {
            ModelParams::AdaLogreg(train_ada_logreg(matrix, rows, *stages, *l2)?)
        }
    };
    Ok(ClassifierArtifact {
        kind: point.kind(),
        hyperparameters: point.clone(),
        params,
        registry_fingerprint: matrix.registry.fingerprint(),
        seed,
    })
}

/// Evaluate an artifact on held-out matrix rows.
pub fn evaluate(
    artifact: &ClassifierArtifact,
    matrix: &FeatureMatrix,
    rows: &[usize],
) -> Result<EvalReport> {
    let scores = artifact.score_matrix(matrix, rows)?;
    let labels: Vec<bool> = rows.iter().map(|&i| matrix.label(i)).collect();
    evaluate_scores(&scores, &labels)
}

#[derive(Debug, Clone, Serialize)]
pub struct TunePoint {
    pub point: HyperPoint,
    pub fold_aurocs: Vec<f64>,
    pub mean_auroc: f64,
    /// GBT only: mean stage count found by per-fold early stopping.
    pub mean_best_stages: Option<f64>,
    /// Per fold: `(student_id, score, label)` on the held-out fold.
    #[serde(skip)]
    pub fold_predictions: Vec<Vec<(String, f64, bool)>>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TuneReport {
    pub kind: ModelKind,
    pub best: HyperPoint,
    /// The point to train the final model with; equals `best` except that
    /// GBT carries the early-stopped stage count forward.
    pub recommended: HyperPoint,
    pub points: Vec<TunePoint>,
}

fn rows_of_ids(matrix: &FeatureMatrix, ids: &[String]) -> Result<Vec<usize>> {
    ids.iter()
        .map(|id| {
            matrix
                .row_of_student(id)
                .ok_or_else(|| Error::integrity(format!("student {id:?} missing from matrix")))
        })
        .collect()
}

/// Grid search by 10-fold cross-validated AUROC over the training side of
/// the split. Ties go to the stronger-regularization / smaller-capacity
/// point.
pub fn tune(
    matrix: &FeatureMatrix,
    split: &SplitPlan,
    grid: &[HyperPoint],
    seed: u64,
) -> Result<TuneReport> {
    if grid.is_empty() {
        return Err(Error::config("empty hyperparameter grid"));
    }
    let kind = grid[0].kind();
    if grid.iter().any(|p| p.kind() != kind) {
        return Err(Error::config("mixed model kinds in one grid"));
    }

    // fold -> (train rows, valid rows with ids)
    let mut fold_sets: Vec<(Vec<usize>, Vec<usize>)> = Vec::new();
    for fold in 1..=N_FOLDS {
        let mut train = Vec::new();
        let mut valid = Vec::new();
        for id in &split.train_ids {
            let row = matrix
                .row_of_student(id)
                .ok_or_else(|| Error::integrity(format!("student {id:?} missing from matrix")))?;
            if split.fold_of(id) == Some(fold) {
                valid.push(row);
            } else {
                train.push(row);
            }
        }
        if valid.is_empty() {
            return Err(Error::config(format!("fold {fold} is empty")));
        }
        fold_sets.push((train, valid));
    }

    let points: Vec<TunePoint> = grid
        .par_iter()
        .enumerate()
        .map(|(gi, point)| -> Result<TunePoint> {
            let mut fold_aurocs = Vec::with_capacity(fold_sets.len());
            let mut fold_predictions = Vec::with_capacity(fold_sets.len());
            let mut stages_sum = 0.0;
            let mut stages_n = 0usize;
            for (fi, (train, valid)) in fold_sets.iter().enumerate() {
                let fit_seed = seed
                    .wrapping_add(1_000_003u64.wrapping_mul(gi as u64 + 1))
                    .wrapping_add(fi as u64);
                let scores: Vec<f64> = match point {
                    HyperPoint::Gbt {
                        max_depth,
                        learning_rate,
                        max_trees,
                    } => {
                        let p = TreeEnsembleParams {
                            trees: *max_trees,
                            max_depth: Some(*max_depth),
                            learning_rate: *learning_rate,
                            ..TreeEnsembleParams::default_gbt()
                        };
                        let model = train_gbt(matrix, train, &p, fit_seed, Some(valid))?;
                        stages_sum += model.trees.len() as f64;
                        stages_n += 1;
                        valid.iter().map(|&i| model.score(matrix.row(i))).collect()
                    }
                    _ => {
                        let artifact = train_artifact(matrix, train, point, fit_seed)?;
                        valid
                            .iter()
                            .map(|&i| artifact.score_row(matrix.row(i)))
                            .collect()
                    }
                };
                let labels: Vec<bool> = valid.iter().map(|&i| matrix.label(i)).collect();
                fold_aurocs.push(evaluate_scores(&scores, &labels)?.auroc);
                fold_predictions.push(
                    valid
                        .iter()
                        .zip(&scores)
                        .map(|(&i, &s)| (matrix.student_ids[i].clone(), s, matrix.label(i)))
                        .collect(),
                );
            }
            let mean_auroc = fold_aurocs.iter().sum::<f64>() / fold_aurocs.len() as f64;
            Ok(TunePoint {
                point: point.clone(),
                fold_aurocs,
                mean_auroc,
                mean_best_stages: (stages_n > 0).then(|| stages_sum / stages_n as f64),
                fold_predictions,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut best = &points[0];
    for p in &points[1..] {
        if p.mean_auroc > best.mean_auroc
            || (p.mean_auroc == best.mean_auroc && p.point.preferred_over(&best.point))
        {
            best = p;
        }
    }
    let recommended = match (&best.point, best.mean_best_stages) {
        (
            HyperPoint::Gbt {
                max_depth,
                learning_rate,
                ..
            },
            Some(stages),
        ) => HyperPoint::Gbt {
            max_depth: *max_depth,
            learning_rate: *learning_rate,
            max_trees: (stages.round() as usize).max(1),
        },
        (p, _) => p.clone(),
    };
    Ok(TuneReport {
        kind,
        best: best.point.clone(),
        recommended,
        points,
    })
}

/// One row of the single-feature regression scan.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScanRow {
    pub feature: String,
    pub accuracy: f64,
    pub auroc: f64,
    pub f1: f64,
    pub rank: usize,
    pub constant: bool,
}

/// Univariate logistic regression of the label on each feature in
/// isolation, trained on the split's training rows and evaluated on its
/// test rows, ranked by test AUROC. Constant features score 0.5 and are
/// flagged.
pub fn single_feature_scan(matrix: &FeatureMatrix, split: &SplitPlan) -> Result<Vec<ScanRow>> {
    let train = rows_of_ids(matrix, &split.train_ids)?;
    let test = rows_of_ids(matrix, &split.test_ids)?;
    let train_labels: Vec<f64> = train
        .iter()
        .map(|&i| if matrix.label(i) { 1.0 } else { 0.0 })
        .collect();
    let test_labels: Vec<bool> = test.iter().map(|&i| matrix.label(i)).collect();
    let base_rate = train_labels.iter().sum::<f64>() / train.len() as f64;

    let mut rows: Vec<ScanRow> = (0..matrix.n_cols())
        .into_par_iter()
        .map(|j| -> Result<ScanRow> {
            let column: Vec<f64> = train.iter().map(|&i| matrix.row(i)[j]).collect();
            let mean = column.iter().sum::<f64>() / column.len() as f64;
            let var = column.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>()
                / column.len() as f64;
            let std = var.sqrt();
            let (scores, constant) = if std > 0.0 {
                let design = Design {
                    n: column.len(),
                    d: 1,
                    x: column.iter().map(|x| (x - mean) / std).collect(),
                    y: train_labels.clone(),
                };
                let fit = fit_logistic(&design, None, 1e-8, &FitOptions::default())?;
                let scores = test
                    .iter()
                    .map(|&i| {
                        let x = (matrix.row(i)[j] - mean) / std;
                        sigmoid(fit.params[0] + fit.params[1] * x)
                    })
                    .collect();
                (scores, false)
            } else {
                (vec![base_rate; test.len()], true)
            };
            let report = evaluate_scores(&scores, &test_labels)?;
            Ok(ScanRow {
                feature: matrix.registry.name(j).to_string(),
                accuracy: report.accuracy,
                auroc: report.auroc,
                f1: report.f1,
                rank: 0,
                constant,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    rows.sort_by(|a, b| {
        b.auroc
            .partial_cmp(&a.auroc)
            .expect("finite auroc")
            .then_with(|| a.feature.cmp(&b.feature))
    });
    for (i, row) in rows.iter_mut().enumerate() {
        row.rank = i + 1;
    }
    Ok(rows)
}

pub fn write_scan_csv(path: &Path, rows: &[ScanRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| Error::Csv {
            path: path.display().to_string(),
            source: e,
        })?;
    w.write_record(["feature", "accuracy", "auroc", "f1", "rank", "constant"])
        .map_err(|e| Error::Csv {
            path: path.display().to_string(),
            source: e,
        })?;
    for r in rows {
        w.write_record([
            r.feature.as_str(),
            &format!("{:.12}", r.accuracy),
            &format!("{:.12}", r.auroc),
            &format!("{:.12}", r.f1),
            &r.rank.to_string(),
            if r.constant { "1" } else { "0" },
        ])
        .map_err(|e| Error::Csv {
            path: path.display().to_string(),
            source: e,
        })?;
    }
    w.flush().map_err(|e| Error::io(path.display().to_string(), e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::FeatureRegistry;
    use rand::Rng;
    use rand::SeedableRng;

    fn planted_matrix(n: usize, seed: u64) -> FeatureMatrix {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut values = Vec::new();
        let mut labels = Vec::new();
        for _ in 0..n {
            let signal: f64 = rng.gen::<f64>() * 2.0 - 1.0;
            let weak: f64 = 0.4 * signal + 0.6 * (rng.gen::<f64>() * 2.0 - 1.0);
            let noise: f64 = rng.gen::<f64>() * 2.0 - 1.0;
            values.extend([signal, weak, noise, 1.0]);
            labels.push(signal + 0.25 * (rng.gen::<f64>() - 0.5) > 0.0);
        }
        FeatureMatrix::from_parts(
            (0..n).map(|i| format!("s{i:05}")).collect(),
            FeatureRegistry::ad_hoc(&[
                "signal".into(),
                "weak".into(),
                "noise".into(),
                "always_one".into(),
            ])
            .unwrap(),
            values,
            labels,
        )
        .unwrap()
    }

    fn split_of(matrix: &FeatureMatrix, seed: u64) -> SplitPlan {
        let cohort: Vec<(String, bool)> = matrix
            .student_ids
            .iter()
            .cloned()
            .zip(matrix.labels.iter().copied())
            .collect();
        make_split(&cohort, seed, true).unwrap()
    }

    #[test]
    fn tune_single_point_grid_returns_it() {
        let matrix = planted_matrix(200, 1);
        let split = split_of(&matrix, 1);
        let grid = vec![HyperPoint::Logreg { l2: 0.25 }];
        let report = tune(&matrix, &split, &grid, 5).unwrap();
        assert_eq!(report.best, HyperPoint::Logreg { l2: 0.25 });
    }

    #[test]
    fn tune_rejects_a_crushing_regularizer() {
        let matrix = planted_matrix(400, 2);
        let split = split_of(&matrix, 2);
        let grid = vec![
            HyperPoint::Logreg { l2: 1e6 },
            HyperPoint::Logreg { l2: 0.1 },
        ];
        let report = tune(&matrix, &split, &grid, 5).unwrap();
        assert_eq!(report.best, HyperPoint::Logreg { l2: 0.1 });
    }

    #[test]
    fn fold_mean_recomputes_from_stored_predictions() {
        let matrix = planted_matrix(300, 3);
        let split = split_of(&matrix, 3);
        let report = tune(&matrix, &split, &[HyperPoint::Logreg { l2: 1.0 }], 5).unwrap();
        let point = &report.points[0];
        let mut mean = 0.0;
        for (fold, preds) in point.fold_predictions.iter().enumerate() {
            let scores: Vec<f64> = preds.iter().map(|(_, s, _)| *s).collect();
            let labels: Vec<bool> = preds.iter().map(|(_, _, y)| *y).collect();
            let auroc = evaluate_scores(&scores, &labels).unwrap().auroc;
            assert_eq!(auroc, point.fold_aurocs[fold]);
            mean += auroc;
        }
        mean /= point.fold_predictions.len() as f64;
        assert!((mean - point.mean_auroc).abs() < 1e-15);
    }

    #[test]
    fn scan_flags_constants_and_finds_the_planted_signal() {
        let matrix = planted_matrix(500, 4);
        let split = split_of(&matrix, 4);
        let rows = single_feature_scan(&matrix, &split).unwrap();
        assert_eq!(rows[0].feature, "signal");
        assert_eq!(rows[0].rank, 1);
        let constant = rows.iter().find(|r| r.feature == "always_one").unwrap();
        assert!(constant.constant);
        assert_eq!(constant.auroc, 0.5);
    }

    #[test]
    fn deleting_test_rows_changes_no_trained_parameter() {
        let matrix = planted_matrix(260, 6);
        let split = split_of(&matrix, 6);
        let train_rows = rows_of_ids(&matrix, &split.train_ids).unwrap();
        let test_rows = rows_of_ids(&matrix, &split.test_ids).unwrap();

        let mut garbled = matrix.clone();
        for &i in &test_rows {
            garbled
                .overwrite_row(i, vec![1234.5; matrix.n_cols()])
                .unwrap();
        }

        for point in [
            HyperPoint::Logreg { l2: 0.5 },
            HyperPoint::RandomForest {
                max_depth: Some(4),
                trees: 10,
            },
            HyperPoint::Gbt {
                max_depth: 2,
                learning_rate: 0.3,
                max_trees: 10,
            },
            HyperPoint::AdaLogreg { stages: 2, l2: 0.5 },
        ] {
            let a = train_artifact(&matrix, &train_rows, &point, 9).unwrap();
            let b = train_artifact(&garbled, &train_rows, &point, 9).unwrap();
            assert_eq!(
                serde_json::to_string(&a).unwrap(),
                serde_json::to_string(&b).unwrap(),
                "{point:?} read held-out rows"
            );
        }
    }

    #[test]
    fn ada_tracks_plain_logreg_on_planted_signal() {
        let matrix = planted_matrix(600, 7);
        let split = split_of(&matrix, 7);
        let train_rows = rows_of_ids(&matrix, &split.train_ids).unwrap();
        let test_rows = rows_of_ids(&matrix, &split.test_ids).unwrap();
        let plain = train_artifact(&matrix, &train_rows, &HyperPoint::Logreg { l2: 0.1 }, 1)
            .unwrap();
        let ada = train_artifact(
            &matrix,
            &train_rows,
            &HyperPoint::AdaLogreg { stages: 5, l2: 0.1 },
            1,
        )
        .unwrap();
        let plain_auroc = evaluate(&plain, &matrix, &test_rows).unwrap().auroc;
        let ada_auroc = evaluate(&ada, &matrix, &test_rows).unwrap().auroc;
        assert!(
            (plain_auroc - ada_auroc).abs() <= 0.03,
            "plain {plain_auroc} vs ada {ada_auroc}"
        );
    }

    #[test]
    fn artifact_refuses_a_mismatched_registry() {
        let matrix = planted_matrix(100, 8);
        let rows: Vec<usize> = (0..matrix.n_rows()).collect();
        let artifact =
            train_artifact(&matrix, &rows, &HyperPoint::Logreg { l2: 1.0 }, 1).unwrap();
        let other = FeatureMatrix::from_parts(
            matrix.student_ids.clone(),
            FeatureRegistry::ad_hoc(&["different".into()]).unwrap(),
            vec![0.0; matrix.n_rows()],
            matrix.labels.clone(),
        )
        .unwrap();
        assert!(artifact.score_matrix(&other, &rows).is_err());
    }
}
