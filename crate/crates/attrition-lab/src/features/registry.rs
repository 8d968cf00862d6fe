//! The canonical feature catalog: names, blocks, and fixed ordering.
//!
//! Block sizes are structural: 52 demographic/pre-entry features, 116
//! first-year summary features, one dummy per catalog major, 60 course-group
//! features, and 5 per eligible course prefix. The registry total must equal
//! `52 + 116 + |majors| + 60 + 5 * P` exactly; construction fails loudly
//! otherwise.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::features::categories;
use crate::features::perf::PERF_MEASURES;

pub const DEMOGRAPHIC_BLOCK_SIZE: usize = 52;
pub const FIRST_YEAR_BLOCK_SIZE: usize = 116;
pub const COURSE_GROUP_BLOCK_SIZE: usize = 60;
pub const PREFIX_FEATURES_EACH: usize = 5;

/// A prefix qualifies for its own feature block once this many distinct
/// students have taken a course under it.
pub const PREFIX_MIN_STUDENTS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Block {
    Demographic,
    FirstYearSummary,
    MajorDummy,
    CourseGroup,
    Prefix,
    /// Free-form columns for matrices not built from registrar data
    /// (synthetic experiments, tests). Never emitted by the pipeline.
    Custom,
}

pub const FIRST_YEAR_SCOPES: [&str; 6] = ["year", "q1", "q2", "q3", "q4", "lastq"];
pub const DELTA_PAIRS: [(&str, &str); 4] =
    [("q2", "q1"), ("q3", "q2"), ("q4", "q3"), ("lastq", "q1")];
pub const COURSE_GROUPS: [&str; 10] = [
    "remedial",
    "level100",
    "level200",
    "level300",
    "level400",
    "gk_calculus",
    "gk_biology",
    "gk_chemistry",
    "gk_physics",
    "gk_all",
];

fn demographic_names() -> Vec<String> {
    let mut names: Vec<String> = vec![
        "sat_score".into(),
        "sat_imputed".into(),
        "act_score".into(),
        "act_imputed".into(),
        "hs_gpa".into(),
        "hs_gpa_missing".into(),
        "birth_year".into(),
        "age_at_entry".into(),
        "entry_year".into(),
    ];
    for season in ["winter", "spring", "summer", "autumn"] {
        names.push(format!("entry_season_{season}"));
    }
    names.extend([
        "zip_avg_income".into(),
        "zip_pct_hs_grads".into(),
        "zip_pct_college_grads".into(),
        "zip_campus_distance_km".into(),
        "zip_missing".into(),
    ]);
    for g in categories::GENDER {
        names.push(format!("gender_{g}"));
    }
    for r in categories::RACE {
        names.push(format!("race_{r}"));
    }
    for e in categories::ETHNICITY {
        names.push(format!("ethnicity_{e}"));
    }
    for r in categories::RESIDENCY {
        names.push(format!("residency_{r}"));
    }
    for p in categories::PARENT_EDU {
        names.push(format!("parent_edu_{p}"));
    }
    names.extend([
        "took_both_exams".into(),
        "entrance_exam_any".into(),
        "first_generation".into(),
        "entry_age_under_18".into(),
        "entry_age_over_19".into(),
        "entry_mid_year".into(),
    ]);
    names
}

fn first_year_names() -> Vec<String> {
    let mut names = Vec::new();
    for scope in FIRST_YEAR_SCOPES {
        for m in PERF_MEASURES {
            names.push(format!("{scope}_{m}"));
        }
        names.push(format!("{scope}_present"));
        names.push(format!("{scope}_failed_courses"));
        names.push(format!("{scope}_withdrawals"));
        names.push(format!("{scope}_passed_courses"));
    }
    for (to, from) in DELTA_PAIRS {
        for m in PERF_MEASURES {
            names.push(format!("delta_{to}_{from}_{m}"));
        }
    }
    for scope in FIRST_YEAR_SCOPES {
        names.push(format!("{scope}_mean_course_size"));
        names.push(format!("{scope}_min_course_size"));
        names.push(format!("{scope}_max_course_size"));
    }
    for scope in FIRST_YEAR_SCOPES {
        names.push(format!("{scope}_mean_offering_grade"));
        names.push(format!("{scope}_offering_grade_std"));
        names.push(format!("{scope}_mean_offering_max"));
        names.push(format!("{scope}_max_grade_diff"));
    }
    names
}

fn course_group_names() -> Vec<String> {
    let mut names = Vec::new();
    for group in COURSE_GROUPS {
        for m in PERF_MEASURES {
            names.push(format!("{group}_{m}"));
        }
        names.push(format!("{group}_present"));
    }
    names
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FeatureRegistry {
    features: Vec<(String, Block)>,
    #[serde(skip)]
    by_name: BTreeMap<String, usize>,
}

impl FeatureRegistry {
    /// Build the registry for a catalog of majors (sorted codes) and the
    /// eligible course prefixes (sorted).
    pub fn build(major_codes: &[String], eligible_prefixes: &[String]) -> Result<FeatureRegistry> {
        let mut features: Vec<(String, Block)> = Vec::new();
        for name in demographic_names() {
            features.push((name, Block::Demographic));
        }
        for name in first_year_names() {
            features.push((name, Block::FirstYearSummary));
        }
        for code in major_codes {
            features.push((format!("major_{code}"), Block::MajorDummy));
        }
        for name in course_group_names() {
            features.push((name, Block::CourseGroup));
        }
        for prefix in eligible_prefixes {
            for m in PERF_MEASURES {
                features.push((format!("prefix_{prefix}_{m}"), Block::Prefix));
            }
        }

        let expected = DEMOGRAPHIC_BLOCK_SIZE
            + FIRST_YEAR_BLOCK_SIZE
            + major_codes.len()
            + COURSE_GROUP_BLOCK_SIZE
            + PREFIX_FEATURES_EACH * eligible_prefixes.len();
        if features.len() != expected {
            return Err(Error::config(format!(
                "feature registry size {} does not match the block formula {} \
                 (52 + 116 + {} + 60 + 5 * {})",
                features.len(),
                expected,
                major_codes.len(),
                eligible_prefixes.len()
            )));
        }
        let by_name: BTreeMap<String, usize> = features
            .iter()
            .enumerate()
            .map(|(i, (n, _))| (n.clone(), i))
            .collect();
        if by_name.len() != features.len() {
            return Err(Error::config("duplicate feature names in registry"));
        }
        Ok(FeatureRegistry { features, by_name })
    }

    /// Registry over arbitrary column names, outside the block formula.
    pub fn ad_hoc(names: &[String]) -> Result<FeatureRegistry> {
        let features: Vec<(String, Block)> =
            names.iter().map(|n| (n.clone(), Block::Custom)).collect();
        let by_name: BTreeMap<String, usize> = features
            .iter()
            .enumerate()
            .map(|(i, (n, _))| (n.clone(), i))
            .collect();
        if by_name.len() != features.len() {
            return Err(Error::config("duplicate feature names in registry"));
        }
        Ok(FeatureRegistry { features, by_name })
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn name(&self, index: usize) -> &str {
        &self.features[index].0
    }

    pub fn block(&self, index: usize) -> Block {
        self.features[index].1
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.features.iter().map(|(n, _)| n.as_str())
    }

    /// SHA-256 over the ordered `(name, block)` listing; artifacts carry it
    /// so a model can refuse a mismatched matrix.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        for (name, block) in &self.features {
            hasher.update(name.as_bytes());
            hasher.update([b'\x1f', block_tag(*block), b'\x1e']);
        }
        hex::encode(hasher.finalize())
    }

    pub fn write_json(&self, path: &std::path::Path) -> Result<()> {
        let rows: Vec<serde_json::Value> = self
            .features
            .iter()
            .enumerate()
            .map(|(i, (name, block))| {
                serde_json::json!({ "name": name, "block": block, "index": i })
            })
            .collect();
        let body = serde_json::to_string_pretty(&rows).map_err(|e| Error::Json {
            path: path.display().to_string(),
            source: e,
        })?;
        std::fs::write(path, body + "\n").map_err(|e| Error::io(path.display().to_string(), e))
    }
}

fn block_tag(block: Block) -> u8 {
    match block {
        Block::Demographic => b'd',
        Block::FirstYearSummary => b'f',
        Block::MajorDummy => b'm',
        Block::CourseGroup => b'g',
        Block::Prefix => b'p',
        Block::Custom => b'c',
    }
}
