//! Classification metrics: ROC curve with tie merging, trapezoidal AUROC,
//! accuracy and F1 at the 0.5 threshold.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Probability threshold for the hard STEM-graduate prediction.
pub const DECISION_THRESHOLD: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    pub fn_: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    pub auroc: f64,
    pub f1: f64,
    /// `(fpr, tpr)` from (0,0) to (1,1); tied scores are merged into single
    /// steps so the curve is monotone in both coordinates.
    pub roc_points: Vec<(f64, f64)>,
    pub confusion: Confusion,
}

/// ROC curve over scores. Requires both classes present.
pub fn roc_points(scores: &[f64], labels: &[bool]) -> Result<Vec<(f64, f64)>> {
    let (points, _) = roc_with_area(scores, labels)?;
    Ok(points)
}

fn roc_with_area(scores: &[f64], labels: &[bool]) -> Result<(Vec<(f64, f64)>, f64)> {
    debug_assert_eq!(scores.len(), labels.len());
    let pos = labels.iter().filter(|&&y| y).count() as u64;
    let neg = labels.len() as u64 - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::numerical(
            "AUROC undefined: evaluation set has a single class",
        ));
    }
    if let Some(bad) = scores.iter().find(|s| !s.is_finite()) {
        return Err(Error::numerical(format!("non-finite score {bad}")));
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .expect("finite scores")
            .then(a.cmp(&b))
    });

    // integer tp/fp counts; one point per distinct score value
    let mut points = vec![(0.0, 0.0)];
    let mut tp: u64 = 0;
    let mut fp: u64 = 0;
    let mut area2: f64 = 0.0; // twice the raw area in count units
    let mut i = 0;
    while i < order.len() {
        let score = scores[order[i]];
        let (prev_tp, prev_fp) = (tp, fp);
        while i < order.len() && scores[order[i]] == score {
            if labels[order[i]] {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        area2 += (fp - prev_fp) as f64 * (tp + prev_tp) as f64;
        points.push((fp as f64 / neg as f64, tp as f64 / pos as f64));
    }
    let auroc = area2 / (2.0 * pos as f64 * neg as f64);
    Ok((points, auroc))
}

/// Trapezoidal area under a `(fpr, tpr)` polyline.
pub fn auroc_from_points(points: &[(f64, f64)]) -> f64 {
    let mut area = 0.0;
    for w in points.windows(2) {
        let (x1, y1) = w[0];
        let (x2, y2) = w[1];
        area += (x2 - x1) * (y1 + y2) / 2.0;
    }
    area
}

/// O(n^2) pairwise-concordance statistic: the probability a random positive
/// outscores a random negative, ties counting one half. Oracle for the
/// trapezoidal AUROC.
pub fn concordance_auroc(scores: &[f64], labels: &[bool]) -> Result<f64> {
    let pos: Vec<f64> = scores
        .iter()
        .zip(labels)
        .filter(|(_, &y)| y)
        .map(|(s, _)| *s)
        .collect();
    let neg: Vec<f64> = scores
        .iter()
        .zip(labels)
        .filter(|(_, &y)| !y)
        .map(|(s, _)| *s)
        .collect();
    if pos.is_empty() || neg.is_empty() {
        return Err(Error::numerical(
            "concordance undefined: single-class labels",
        ));
    }
    let mut twice: f64 = 0.0;
    for &p in &pos {
        for &n in &neg {
            if p > n {
                twice += 2.0;
            } else if p == n {
                twice += 1.0;
            }
        }
    }
    Ok(twice / (2.0 * pos.len() as f64 * neg.len() as f64))
}

/// Full evaluation of probability scores against labels.
pub fn evaluate_scores(scores: &[f64], labels: &[bool]) -> Result<EvalReport> {
    let (points, auroc) = roc_with_area(scores, labels)?;
    let mut c = Confusion {
        tp: 0,
        fp: 0,
        tn: 0,
        fn_: 0,
    };
    for (&s, &y) in scores.iter().zip(labels) {
        let predicted = s >= DECISION_THRESHOLD;
        match (predicted, y) {
            (true, true) => c.tp += 1,
            (true, false) => c.fp += 1,
            (false, false) => c.tn += 1,
            (false, true) => c.fn_ += 1,
        }
    }
    let n = labels.len() as f64;
    let accuracy = (c.tp + c.tn) as f64 / n;
    let f1_den = 2 * c.tp + c.fp + c.fn_;
    let f1 = if f1_den == 0 {
        0.0
    } else {
        2.0 * c.tp as f64 / f1_den as f64
    };
    Ok(EvalReport {
        accuracy,
        auroc,
        f1,
        roc_points: points,
        confusion: c,
    })
}
