//! Deterministic 80/20 train/test split with 10-fold assignments over the
//! training side. Stratified by label so train and test label rates stay
//! within a point of each other; stratification can be disabled.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const TEST_FRACTION: f64 = 0.2;
pub const N_FOLDS: u8 = 10;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitPlan {
    pub seed: u64,
    pub stratified: bool,
    pub train_ids: Vec<String>,
    pub test_ids: Vec<String>,
    /// Fold assignment 1..=10, train ids only.
    pub folds: BTreeMap<String, u8>,
}

impl SplitPlan {
    pub fn fold_of(&self, id: &str) -> Option<u8> {
        self.folds.get(id).copied()
    }
}

/// Split labelled cohort ids into train/test and assign folds.
pub fn make_split(cohort: &[(String, bool)], seed: u64, stratified: bool) -> Result<SplitPlan> {
    if cohort.len() < 50 {
        return Err(Error::config(format!(
            "need at least 50 students to split, got {}",
            cohort.len()
        )));
    }
    let positives = cohort.iter().filter(|(_, y)| *y).count();
    if positives == 0 || positives == cohort.len() {
        return Err(Error::config(
            "cohort has a single outcome class; nothing to learn",
        ));
    }

    // canonical order first so the plan is independent of input ordering
    let mut sorted: Vec<(String, bool)> = cohort.to_vec();
    sorted.sort();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut train_ids = Vec::new();
    let mut test_ids = Vec::new();
    if stratified {
        for class in [true, false] {
            let mut ids: Vec<&String> = sorted
                .iter()
                .filter(|(_, y)| *y == class)
                .map(|(id, _)| id)
                .collect();
            ids.shuffle(&mut rng);
            let n_test = (TEST_FRACTION * ids.len() as f64).round() as usize;
            for (i, id) in ids.into_iter().enumerate() {
                if i < n_test {
                    test_ids.push(id.clone());
                } else {
                    train_ids.push(id.clone());
                }
            }
        }
    } else {
        let mut ids: Vec<&String> = sorted.iter().map(|(id, _)| id).collect();
        ids.shuffle(&mut rng);
        let n_test = (TEST_FRACTION * ids.len() as f64).round() as usize;
        for (i, id) in ids.into_iter().enumerate() {
            if i < n_test {
                test_ids.push(id.clone());
            } else {
                train_ids.push(id.clone());
            }
        }
    }
    train_ids.sort();
    test_ids.sort();

    // stratified round-robin fold assignment over the training side
    let label_of: BTreeMap<&str, bool> = sorted.iter().map(|(id, y)| (id.as_str(), *y)).collect();
    let mut folds = BTreeMap::new();
    for class in [true, false] {
        let mut ids: Vec<&String> = train_ids
            .iter()
            .filter(|id| label_of[id.as_str()] == class)
            .collect();
        ids.shuffle(&mut rng);
        for (i, id) in ids.into_iter().enumerate() {
            folds.insert(id.clone(), (i % N_FOLDS as usize) as u8 + 1);
        }
    }

    Ok(SplitPlan {
        seed,
        stratified,
        train_ids,
        test_ids,
        folds,
    })
}
