//! Canonical demographic category vocabularies.
//!
//! The dummy-encoded feature columns use these lists in this order. Values
//! outside a list fall into its final bucket. The weights are the sampling
//! distribution used by the synthetic generator, kept next to the lists so
//! the two cannot drift apart.

pub const GENDER: [&str; 3] = ["female", "male", "other_unknown"];
pub const GENDER_WEIGHTS: [(&str, f64); 3] =
    [("female", 0.49), ("male", 0.49), ("other_unknown", 0.02)];

pub const RACE: [&str; 8] = [
    "african_american",
    "american_indian",
    "asian",
    "caucasian",
    "hawaiian_pacific_islander",
    "multiracial",
    "other",
    "unknown",
];
pub const RACE_WEIGHTS: [(&str, f64); 8] = [
    ("african_american", 0.05),
    ("american_indian", 0.02),
    ("asian", 0.25),
    ("caucasian", 0.50),
    ("hawaiian_pacific_islander", 0.01),
    ("multiracial", 0.06),
    ("other", 0.05),
    ("unknown", 0.06),
];

pub const ETHNICITY: [&str; 3] = ["hispanic", "not_hispanic", "unknown"];
pub const ETHNICITY_WEIGHTS: [(&str, f64); 3] =
    [("hispanic", 0.08), ("not_hispanic", 0.88), ("unknown", 0.04)];

pub const RESIDENCY: [&str; 4] = ["state_resident", "nonresident", "international", "unknown"];
pub const RESIDENCY_WEIGHTS: [(&str, f64); 4] = [
    ("state_resident", 0.78),
    ("nonresident", 0.15),
    ("international", 0.05),
    ("unknown", 0.02),
];

pub const PARENT_EDU: [&str; 10] = [
    "no_high_school",
    "some_high_school",
    "high_school_diploma",
    "some_college",
    "associates_degree",
    "bachelors_degree",
    "masters_degree",
    "doctoral_degree",
    "professional_degree",
    "unknown",
];
pub const PARENT_EDU_WEIGHTS: [(&str, f64); 10] = [
    ("no_high_school", 0.03),
    ("some_high_school", 0.04),
    ("high_school_diploma", 0.18),
    ("some_college", 0.17),
    ("associates_degree", 0.08),
    ("bachelors_degree", 0.28),
    ("masters_degree", 0.14),
    ("doctoral_degree", 0.04),
    ("professional_degree", 0.03),
    ("unknown", 0.01),
];

/// Parent-education levels at or above a bachelor's degree; everything else
/// marks a first-generation student.
pub const PARENT_EDU_DEGREE_LEVELS: [&str; 4] = [
    "bachelors_degree",
    "masters_degree",
    "doctoral_degree",
    "professional_degree",
];

/// Index of `value` in `list`, falling back to the final bucket.
pub fn bucket_index(list: &[&str], value: &str) -> usize {
    list.iter()
        .position(|v| *v == value)
        .unwrap_or(list.len() - 1)
}
