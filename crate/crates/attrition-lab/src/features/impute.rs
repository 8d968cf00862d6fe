//! Missing-score imputation for SAT and ACT.
//!
//! Missing values are predicted by ordinary least squares fit on complete
//! cases over dummy-coded demographics, high-school GPA, and the other score
//! where present, then clamped to the legal score range. With fewer than 30
//! complete cases the imputer falls back to mean imputation and logs a
//! warning.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::features::categories;
use crate::registrar::{StudentId, StudentRecord};

pub const SAT_RANGE: (f64, f64) = (400.0, 1600.0);
pub const ACT_RANGE: (f64, f64) = (1.0, 36.0);
const MIN_COMPLETE_CASES: usize = 30;

/// Which scores were filled in for each student.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ImputedFlags {
    pub sat: bool,
    pub act: bool,
}

#[derive(Debug, Clone)]
pub struct ImputeOutcome {
    pub students: Vec<StudentRecord>,
    pub flags: BTreeMap<StudentId, ImputedFlags>,
}

/// Solve `a x = b` for a small dense symmetric system by Gaussian
/// elimination with partial pivoting. `a` is row-major `n x n`.
fn solve_dense(mut a: Vec<f64>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    debug_assert_eq!(a.len(), n * n);
    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r1, &r2| {
                a[r1 * n + col]
                    .abs()
                    .partial_cmp(&a[r2 * n + col].abs())
                    .expect("finite")
            })
            .expect("non-empty range");
        if a[pivot_row * n + col].abs() < 1e-12 {
            return Err(Error::numerical("singular system in imputation fit"));
        }
        if pivot_row != col {
            for k in 0..n {
                a.swap(col * n + k, pivot_row * n + k);
            }
            b.swap(col, pivot_row);
        }
        let pivot = a[col * n + col];
        for row in (col + 1)..n {
            let factor = a[row * n + col] / pivot;
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row * n + k] -= factor * a[col * n + k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in (row + 1)..n {
            acc -= a[row * n + k] * x[k];
        }
        x[row] = acc / a[row * n + row];
    }
    Ok(x)
}

/// OLS via normal equations with a tiny ridge term for rank safety.
fn ols_fit(rows: &[Vec<f64>], targets: &[f64]) -> Result<Vec<f64>> {
    let n = rows.len();
    let d = rows[0].len();
    let mut xtx = vec![0.0; d * d];
    let mut xty = vec![0.0; d];
    for (row, &y) in rows.iter().zip(targets) {
        for i in 0..d {
            xty[i] += row[i] * y;
            for j in i..d {
                xtx[i * d + j] += row[i] * row[j];
            }
        }
    }
    for i in 0..d {
        for j in 0..i {
            xtx[i * d + j] = xtx[j * d + i];
        }
        xtx[i * d + i] += 1e-8 * n as f64;
    }
    solve_dense(xtx, xty)
}

fn dummy_block(out: &mut Vec<f64>, list: &[&str], value: &str) {
    let idx = categories::bucket_index(list, value);
    for i in 0..list.len() {
        out.push(if i == idx { 1.0 } else { 0.0 });
    }
}

/// Regression design row for one student. `other` is the score not being
/// imputed, filled with `other_mean` when absent.
fn design_row(
    student: &StudentRecord,
    hs_gpa_mean: f64,
    other: Option<f64>,
    other_mean: f64,
) -> Vec<f64> {
    let mut row = vec![1.0];
    dummy_block(&mut row, &categories::GENDER, &student.gender);
    dummy_block(&mut row, &categories::RACE, &student.race);
    dummy_block(&mut row, &categories::ETHNICITY, &student.ethnicity);
    dummy_block(&mut row, &categories::RESIDENCY, &student.residency);
    dummy_block(&mut row, &categories::PARENT_EDU, &student.parent_education);
    row.push(student.hs_gpa.unwrap_or(hs_gpa_mean));
    row.push(if student.hs_gpa.is_some() { 1.0 } else { 0.0 });
    row.push(other.unwrap_or(other_mean));
    row.push(if other.is_some() { 1.0 } else { 0.0 });
    row
}

fn mean_of(values: impl Iterator<Item = f64>) -> Option<f64> {
    let mut sum = 0.0;
    let mut n = 0usize;
    for v in values {
        sum += v;
        n += 1;
    }
    (n > 0).then(|| sum / n as f64)
}

struct ScoreModel {
    /// None means mean-imputation fallback.
    weights: Option<Vec<f64>>,
    mean: f64,
    range: (f64, f64),
}

impl ScoreModel {
    fn predict(&self, row: &[f64]) -> f64 {
        let raw = match &self.weights {
            Some(w) => w.iter().zip(row).map(|(wi, xi)| wi * xi).sum(),
            None => self.mean,
        };
        raw.clamp(self.range.0, self.range.1)
    }
}

fn fit_score_model(
    students: &[StudentRecord],
    target: impl Fn(&StudentRecord) -> Option<f64>,
    other: impl Fn(&StudentRecord) -> Option<f64>,
    range: (f64, f64),
    label: &str,
    hs_gpa_mean: f64,
    other_mean: f64,
) -> Result<ScoreModel> {
    let complete: Vec<&StudentRecord> = students.iter().filter(|s| target(s).is_some()).collect();
    if complete.is_empty() {
        return Err(Error::config(format!(
            "cannot impute {label}: no observed values at all"
        )));
    }
    let mean = mean_of(complete.iter().filter_map(|s| target(s))).expect("non-empty");
    if complete.len() < MIN_COMPLETE_CASES {
        log::warn!(
            "only {} complete cases for {label}; falling back to mean imputation",
            complete.len()
        );
        return Ok(ScoreModel {
            weights: None,
            mean,
            range,
        });
    }
    let rows: Vec<Vec<f64>> = complete
        .iter()
        .map(|s| design_row(s, hs_gpa_mean, other(s), other_mean))
        .collect();
    let targets: Vec<f64> = complete.iter().map(|s| target(s).expect("complete")).collect();
    let weights = ols_fit(&rows, &targets)?;
    Ok(ScoreModel {
        weights: Some(weights),
        mean,
        range,
    })
}

/// Fill missing SAT and ACT scores, returning updated records plus per-score
/// imputed flags. Students with both scores present pass through unchanged.
pub fn impute_scores(students: &[StudentRecord]) -> Result<ImputeOutcome> {
    let hs_gpa_mean = mean_of(students.iter().filter_map(|s| s.hs_gpa)).unwrap_or(0.0);
    let sat_mean = mean_of(students.iter().filter_map(|s| s.sat_score.map(f64::from)));
    let act_mean = mean_of(students.iter().filter_map(|s| s.act_score.map(f64::from)));
    let (Some(sat_mean), Some(act_mean)) = (sat_mean, act_mean) else {
        return Err(Error::config(
            "cannot impute scores: a score column is entirely missing",
        ));
    };

    let sat_model = fit_score_model(
        students,
        |s| s.sat_score.map(f64::from),
        |s| s.act_score.map(f64::from),
        SAT_RANGE,
        "sat",
        hs_gpa_mean,
        act_mean,
    )?;
    let act_model = fit_score_model(
        students,
        |s| s.act_score.map(f64::from),
        |s| s.sat_score.map(f64::from),
        ACT_RANGE,
        "act",
        hs_gpa_mean,
        sat_mean,
    )?;

    let mut out = Vec::with_capacity(students.len());
    let mut flags = BTreeMap::new();
    for s in students {
        let mut filled = s.clone();
        let mut f = ImputedFlags::default();
        if s.sat_score.is_none() {
            let row = design_row(s, hs_gpa_mean, s.act_score.map(f64::from), act_mean);
            filled.sat_score = Some(sat_model.predict(&row).round() as u32);
            f.sat = true;
        }
        if s.act_score.is_none() {
            let row = design_row(s, hs_gpa_mean, s.sat_score.map(f64::from), sat_mean);
            filled.act_score = Some(act_model.predict(&row).round() as u32);
            f.act = true;
        }
        flags.insert(s.student_id.clone(), f);
        out.push(filled);
    }
    Ok(ImputeOutcome {
        students: out,
        flags,
    })
}
