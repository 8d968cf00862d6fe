//! Per-offering grade statistics and the z-score / percentile transforms.
//!
//! An offering is a specific course in a specific quarter; it is the unit
//! over which grades are normalized. Statistics cover numeric grades only:
//! an offering where everyone withdrew has no entry.

use std::collections::BTreeMap;

use crate::registrar::{Quarter, TranscriptEntry};

pub type OfferingKey = (String, u32, Quarter);

#[derive(Debug, Clone, PartialEq)]
pub struct OfferingStats {
    pub mean_grade: f64,
    /// Population standard deviation.
    pub std_grade: f64,
    pub max_grade: f64,
    /// Numeric grades, ascending; `len()` is the multiset size.
    pub grades_sorted: Vec<f64>,
}

impl OfferingStats {
    pub fn n(&self) -> usize {
        self.grades_sorted.len()
    }
}

pub fn offering_key(entry: &TranscriptEntry) -> OfferingKey {
    (entry.course_prefix.clone(), entry.course_number, entry.quarter)
}

/// One stats entry per offering with at least one numeric grade.
pub fn offering_stats(transcripts: &[TranscriptEntry]) -> BTreeMap<OfferingKey, OfferingStats> {
    let mut grades: BTreeMap<OfferingKey, Vec<f64>> = BTreeMap::new();
    for entry in transcripts {
        if let Some(points) = entry.grade.points() {
            grades.entry(offering_key(entry)).or_default().push(points);
        }
    }
    grades
        .into_iter()
        .map(|(key, mut gs)| {
            gs.sort_by(|a, b| a.partial_cmp(b).expect("grades are finite"));
            let n = gs.len() as f64;
            let mean = gs.iter().sum::<f64>() / n;
            let var = gs.iter().map(|g| (g - mean) * (g - mean)).sum::<f64>() / n;
            let stats = OfferingStats {
                mean_grade: mean,
                std_grade: var.sqrt(),
                max_grade: *gs.last().expect("non-empty"),
                grades_sorted: gs,
            };
            (key, stats)
        })
        .collect()
}

/// Class sizes per offering, counting every entry regardless of grade kind.
pub fn offering_sizes(transcripts: &[TranscriptEntry]) -> BTreeMap<OfferingKey, usize> {
    let mut sizes: BTreeMap<OfferingKey, usize> = BTreeMap::new();
    for entry in transcripts {
        *sizes.entry(offering_key(entry)).or_default() += 1;
    }
    sizes
}

/// z-score and midrank percentile of a numeric grade within its offering.
///
/// Zero-spread offerings map to z = 0; the percentile uses the midrank
/// convention `100 * (below + 0.5 * equal) / n`, so a singleton offering
/// sits at the 50th percentile. Returns `None` for non-numeric grades.
pub fn grade_transforms(entry: &TranscriptEntry, stats: &OfferingStats) -> Option<(f64, f64)> {
    let g = entry.grade.points()?;
    let z = if stats.std_grade > 0.0 {
        (g - stats.mean_grade) / stats.std_grade
    } else {
        0.0
    };
    let below = stats.grades_sorted.partition_point(|&x| x < g);
    let at_or_below = stats.grades_sorted.partition_point(|&x| x <= g);
    let equal = at_or_below - below;
    let percentile = 100.0 * (below as f64 + 0.5 * equal as f64) / stats.n() as f64;
    Some((z, percentile))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registrar::{GradeKind, GradeValue, Season};

    fn entry(id: &str, grade: GradeValue) -> TranscriptEntry {
        TranscriptEntry {
            student_id: id.to_string(),
            course_prefix: "MATH".into(),
            course_number: 124,
            quarter: Quarter::new(2004, Season::Autumn),
            credits: 5.0,
            grade,
            declared_major: "PRE-ENG".into(),
        }
    }

    #[test]
    fn stats_match_hand_arithmetic() {
        let entries = vec![
            entry("a", GradeValue::numeric(3.0).unwrap()),
            entry("b", GradeValue::numeric(3.5).unwrap()),
            entry("c", GradeValue::numeric(4.0).unwrap()),
        ];
        let stats = offering_stats(&entries);
        let s = stats.values().next().unwrap();
        assert!((s.mean_grade - 3.5).abs() < 1e-12);
        // population std of {3.0, 3.5, 4.0} = sqrt(((0.5)^2 + 0 + (0.5)^2) / 3)
        let expected_std = (0.5f64 / 3.0).sqrt();
        assert!((s.std_grade - expected_std).abs() < 1e-12);
        assert!((s.std_grade - 0.4082).abs() < 1e-4);
        assert_eq!(s.max_grade, 4.0);
    }

    #[test]
    fn singleton_offering_has_zero_std() {
        let entries = vec![entry("a", GradeValue::numeric(2.7).unwrap())];
        let stats = offering_stats(&entries);
        let s = stats.values().next().unwrap();
        assert_eq!(s.mean_grade, 2.7);
        assert_eq!(s.std_grade, 0.0);

        let (z, pct) = grade_transforms(&entries[0], s).unwrap();
        assert_eq!(z, 0.0);
        assert_eq!(pct, 50.0);
    }

    #[test]
    fn withdrawal_only_offering_has_no_entry() {
        let entries = vec![
            entry("a", GradeValue::non_numeric(GradeKind::Withdrawal).unwrap()),
            entry("b", GradeValue::non_numeric(GradeKind::Withdrawal).unwrap()),
        ];
        assert!(offering_stats(&entries).is_empty());
        // but it still has a class size
        assert_eq!(offering_sizes(&entries).values().next(), Some(&2));
    }

    #[test]
    fn z_and_percentile_for_a_two_grade_offering() {
        let entries = vec![
            entry("a", GradeValue::numeric(2.0).unwrap()),
            entry("b", GradeValue::numeric(4.0).unwrap()),
        ];
        let stats = offering_stats(&entries);
        let s = stats.values().next().unwrap();
        let (z, pct) = grade_transforms(&entries[1], s).unwrap();
        assert!((z - 1.0).abs() < 1e-12);
        assert!((pct - 75.0).abs() < 1e-12);
        let (z, pct) = grade_transforms(&entries[0], s).unwrap();
        assert!((z + 1.0).abs() < 1e-12);
        assert!((pct - 25.0).abs() < 1e-12);
    }

    #[test]
    fn grade_at_the_mean_of_a_symmetric_offering() {
        let entries = vec![
            entry("a", GradeValue::numeric(2.0).unwrap()),
            entry("b", GradeValue::numeric(3.0).unwrap()),
            entry("c", GradeValue::numeric(4.0).unwrap()),
        ];
        let stats = offering_stats(&entries);
        let s = stats.values().next().unwrap();
        let (z, pct) = grade_transforms(&entries[1], s).unwrap();
        assert!(z.abs() < 1e-12);
        assert!((pct - 50.0).abs() < 1e-12);
    }
}
