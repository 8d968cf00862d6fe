//! The five-measure student "performance" summary used across scopes:
//! course count, credits earned, mean GPA, mean z-score, mean percentile.

use std::collections::BTreeMap;

use crate::features::offering::{grade_transforms, offering_key, OfferingKey, OfferingStats};
use crate::registrar::{GradeKind, TranscriptEntry};

/// Numeric grades at or above this earn their credits.
pub const PASSING_FLOOR: f64 = 0.7;

pub const PERF_MEASURES: [&str; 5] = ["courses", "credits_earned", "gpa", "z_score", "percentile"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerformanceBlock {
    pub courses: f64,
    pub credits_earned: f64,
    pub gpa: f64,
    pub z_score: f64,
    pub percentile: f64,
}

/// The declared empty-scope convention: no courses, no credits, zero GPA and
/// z-score, 50th percentile. Presence flags let models tell "no courses"
/// from "average performance".
pub const EMPTY_SCOPE: PerformanceBlock = PerformanceBlock {
    courses: 0.0,
    credits_earned: 0.0,
    gpa: 0.0,
    z_score: 0.0,
    percentile: 50.0,
};

impl PerformanceBlock {
    pub fn values(&self) -> [f64; 5] {
        [
            self.courses,
            self.credits_earned,
            self.gpa,
            self.z_score,
            self.percentile,
        ]
    }

    pub fn delta(&self, from: &PerformanceBlock) -> [f64; 5] {
        let a = self.values();
        let b = from.values();
        [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3], a[4] - b[4]]
    }
}

pub fn earns_credit(entry: &TranscriptEntry) -> bool {
    match entry.grade.kind {
        GradeKind::Pass => true,
        GradeKind::Numeric => entry.grade.points().is_some_and(|g| g >= PASSING_FLOOR),
        _ => false,
    }
}

/// Performance over one scope (a quarter, the year, a course grouping).
/// GPA, z-score, and percentile average over numeric grades only and are
/// credit-unweighted; an entirely non-numeric scope keeps the numeric
/// measures at their empty-scope defaults.
pub fn performance_block(
    entries: &[&TranscriptEntry],
    stats: &BTreeMap<OfferingKey, OfferingStats>,
) -> PerformanceBlock {
    if entries.is_empty() {
        return EMPTY_SCOPE;
    }
    let mut credits = 0.0;
    let mut gpa_sum = 0.0;
    let mut z_sum = 0.0;
    let mut pct_sum = 0.0;
    let mut numeric = 0usize;
    for entry in entries {
        if earns_credit(entry) {
            credits += entry.credits;
        }
        if let Some(points) = entry.grade.points() {
            numeric += 1;
            gpa_sum += points;
            let s = &stats[&offering_key(entry)];
            let (z, pct) = grade_transforms(entry, s).expect("numeric grade");
            z_sum += z;
            pct_sum += pct;
        }
    }
    let n = numeric as f64;
    PerformanceBlock {
        courses: entries.len() as f64,
        credits_earned: credits,
        gpa: if numeric > 0 { gpa_sum / n } else { 0.0 },
        z_score: if numeric > 0 { z_sum / n } else { 0.0 },
        percentile: if numeric > 0 { pct_sum / n } else { 50.0 },
    }
}

pub fn count_failed(entries: &[&TranscriptEntry]) -> usize {
    entries
        .iter()
        .filter(|e| e.grade.points() == Some(0.0))
        .count()
}

pub fn count_withdrawals(entries: &[&TranscriptEntry]) -> usize {
    entries
        .iter()
        .filter(|e| e.grade.kind == GradeKind::Withdrawal)
        .count()
}

pub fn count_passed(entries: &[&TranscriptEntry]) -> usize {
    entries.iter().filter(|e| earns_credit(e)).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::offering::offering_stats;
    use crate::registrar::{GradeValue, Quarter, Season};

    fn entry(course: u32, credits: f64, grade: GradeValue) -> TranscriptEntry {
        TranscriptEntry {
            student_id: "a".into(),
            course_prefix: "MATH".into(),
            course_number: course,
            quarter: Quarter::new(2004, Season::Autumn),
            credits,
            grade,
            declared_major: "PRE-ENG".into(),
        }
    }

    #[test]
    fn empty_scope_convention() {
        let stats = BTreeMap::new();
        let block = performance_block(&[], &stats);
        assert_eq!(block, EMPTY_SCOPE);
        assert_eq!(block.values(), [0.0, 0.0, 0.0, 0.0, 50.0]);
    }

    #[test]
    fn sole_enrollee_with_a_perfect_grade() {
        let entries = vec![entry(124, 5.0, GradeValue::numeric(4.0).unwrap())];
        let stats = offering_stats(&entries);
        let refs: Vec<&TranscriptEntry> = entries.iter().collect();
        let block = performance_block(&refs, &stats);
        assert_eq!(block.values(), [1.0, 5.0, 4.0, 0.0, 50.0]);
    }

    #[test]
    fn three_courses_match_a_brute_force_recompute() {
        // three planted courses, each its own offering with known classmates
        let mut all = vec![
            entry(124, 5.0, GradeValue::numeric(3.1).unwrap()),
            entry(125, 4.0, GradeValue::numeric(0.0).unwrap()),
            entry(126, 3.0, GradeValue::numeric(3.8).unwrap()),
        ];
        // classmates shaping each offering's distribution
        for (course, grade) in [(124, 2.1), (124, 4.0), (125, 3.0), (126, 3.8), (126, 2.0)] {
            let mut e = entry(course, 5.0, GradeValue::numeric(grade).unwrap());
            e.student_id = format!("peer{course}{grade}");
            all.push(e);
        }
        let stats = offering_stats(&all);
        let mine: Vec<&TranscriptEntry> = all.iter().take(3).collect();
        let block = performance_block(&mine, &stats);

        // spreadsheet-style recompute from the raw rows
        let expect_gpa = (3.1 + 0.0 + 3.8) / 3.0;
        let z = |g: f64, grades: &[f64]| {
            let n = grades.len() as f64;
            let m = grades.iter().sum::<f64>() / n;
            let sd = (grades.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / n).sqrt();
            if sd > 0.0 {
                (g - m) / sd
            } else {
                0.0
            }
        };
        let pct = |g: f64, grades: &[f64]| {
            let below = grades.iter().filter(|&&x| x < g).count() as f64;
            let equal = grades.iter().filter(|&&x| x == g).count() as f64;
            100.0 * (below + 0.5 * equal) / grades.len() as f64
        };
        let o124 = [3.1, 2.1, 4.0];
        let o125 = [0.0, 3.0];
        let o126 = [3.8, 3.8, 2.0];
        let expect_z = (z(3.1, &o124) + z(0.0, &o125) + z(3.8, &o126)) / 3.0;
        let expect_pct = (pct(3.1, &o124) + pct(0.0, &o125) + pct(3.8, &o126)) / 3.0;

        assert_eq!(block.courses, 3.0);
        assert_eq!(block.credits_earned, 5.0 + 3.0); // the 0.0 grade earns nothing
        assert!((block.gpa - expect_gpa).abs() < 1e-12);
        assert!((block.z_score - expect_z).abs() < 1e-12);
        assert!((block.percentile - expect_pct).abs() < 1e-12);

        let refs = mine;
        assert_eq!(count_failed(&refs), 1);
        assert_eq!(count_passed(&refs), 2);
        assert_eq!(count_withdrawals(&refs), 0);
    }
}
