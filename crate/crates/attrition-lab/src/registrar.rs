//! Core registrar data model: students, transcripts, majors, and degrees,
//! plus cohort selection and graduation labelling.
//!
//! The discrete time axis is the quarter index `4 * year + season ordinal`.
//! A student "graduates" when some degree is awarded within 24 calendar
//! quarters (inclusive) of first enrollment; STEM graduates additionally hold
//! a degree in a major classified as STEM by the half-tracks rule.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Graduation window: a degree counts if awarded at most this many quarters
/// after the quarter of first enrollment (inclusive).
pub const GRADUATION_WINDOW_QUARTERS: u32 = 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Season {
    Winter,
    Spring,
    Summer,
    Autumn,
}

impl Season {
    pub const ALL: [Season; 4] = [Season::Winter, Season::Spring, Season::Summer, Season::Autumn];

    pub fn ordinal(self) -> u32 {
        match self {
            Season::Winter => 0,
            Season::Spring => 1,
            Season::Summer => 2,
            Season::Autumn => 3,
        }
    }

    pub fn from_ordinal(ord: u32) -> Season {
        match ord % 4 {
            0 => Season::Winter,
            1 => Season::Spring,
            2 => Season::Summer,
            _ => Season::Autumn,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Season::Winter => "winter",
            Season::Spring => "spring",
            Season::Summer => "summer",
            Season::Autumn => "autumn",
        }
    }

    pub fn parse(s: &str) -> Result<Season> {
        match s.trim().to_ascii_lowercase().as_str() {
            "winter" => Ok(Season::Winter),
            "spring" => Ok(Season::Spring),
            "summer" => Ok(Season::Summer),
            "autumn" | "fall" => Ok(Season::Autumn),
            other => Err(Error::integrity(format!("unknown season {other:?}"))),
        }
    }
}

impl fmt::Display for Season {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One academic quarter. Total order via the index `4 * year + ordinal`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Quarter {
    pub year: u32,
    pub season: Season,
}

impl Quarter {
    pub fn new(year: u32, season: Season) -> Quarter {
        Quarter { year, season }
    }

    pub fn index(self) -> u32 {
        4 * self.year + self.season.ordinal()
    }

    pub fn from_index(index: u32) -> Quarter {
        Quarter {
            year: index / 4,
            season: Season::from_ordinal(index % 4),
        }
    }

    /// The quarter `n` index steps later.
    pub fn plus(self, n: u32) -> Quarter {
        Quarter::from_index(self.index() + n)
    }
}

impl fmt::Display for Quarter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.season, self.year)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradeKind {
    Numeric,
    Withdrawal,
    Pass,
    FailNonnumeric,
    Incomplete,
}

impl GradeKind {
    pub fn name(self) -> &'static str {
        match self {
            GradeKind::Numeric => "numeric",
            GradeKind::Withdrawal => "withdrawal",
            GradeKind::Pass => "pass",
            GradeKind::FailNonnumeric => "fail_nonnumeric",
            GradeKind::Incomplete => "incomplete",
        }
    }

    pub fn parse(s: &str) -> Result<GradeKind> {
        match s.trim().to_ascii_lowercase().as_str() {
            "numeric" => Ok(GradeKind::Numeric),
            "withdrawal" => Ok(GradeKind::Withdrawal),
            "pass" => Ok(GradeKind::Pass),
            "fail_nonnumeric" => Ok(GradeKind::FailNonnumeric),
            "incomplete" => Ok(GradeKind::Incomplete),
            other => Err(Error::integrity(format!("unknown grade kind {other:?}"))),
        }
    }
}

/// A transcript grade. Numeric grades carry grade points in `[0.0, 4.0]`
/// at 0.1 resolution; the other kinds carry no value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GradeValue {
    pub kind: GradeKind,
    pub value: Option<f64>,
}

impl GradeValue {
    pub fn numeric(points: f64) -> Result<GradeValue> {
        if !(0.0..=4.0).contains(&points) {
            return Err(Error::integrity(format!(
                "numeric grade {points} outside [0.0, 4.0]"
            )));
        }
        // snap to the 0.1 grid
        let snapped = (points * 10.0).round() / 10.0;
        Ok(GradeValue {
            kind: GradeKind::Numeric,
            value: Some(snapped),
        })
    }

    pub fn non_numeric(kind: GradeKind) -> Result<GradeValue> {
        if kind == GradeKind::Numeric {
            return Err(Error::integrity(
                "numeric grade kind requires a value".to_string(),
            ));
        }
        Ok(GradeValue { kind, value: None })
    }

    pub fn points(&self) -> Option<f64> {
        match self.kind {
            GradeKind::Numeric => self.value,
            _ => None,
        }
    }
}

pub type StudentId = String;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StudentRecord {
    pub student_id: StudentId,
    pub gender: String,
    pub race: String,
    pub ethnicity: String,
    pub residency: String,
    pub birth_year: u32,
    pub first_enrollment: Quarter,
    pub sat_score: Option<u32>,
    pub act_score: Option<u32>,
    pub hs_gpa: Option<f64>,
    pub parent_education: String,
    pub application_zip: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub student_id: StudentId,
    pub course_prefix: String,
    pub course_number: u32,
    pub quarter: Quarter,
    pub credits: f64,
    pub grade: GradeValue,
    pub declared_major: String,
}

impl TranscriptEntry {
    /// Course level: 0 for remedial (sub-100), 1 for 100-level, and so on.
    pub fn course_level(&self) -> u32 {
        self.course_number / 100
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PremajorFamily {
    PreEngineering,
    PreHealthSciences,
    PrePhysicalSciences,
    OtherStemPremajor,
    NonStem,
}

impl PremajorFamily {
    pub fn is_stem(self) -> bool {
        !matches!(self, PremajorFamily::NonStem)
    }

    pub fn name(self) -> &'static str {
        match self {
            PremajorFamily::PreEngineering => "pre-engineering",
            PremajorFamily::PreHealthSciences => "pre-health-sciences",
            PremajorFamily::PrePhysicalSciences => "pre-physical-sciences",
            PremajorFamily::OtherStemPremajor => "other-stem-premajor",
            PremajorFamily::NonStem => "non-stem",
        }
    }

    pub fn parse(s: &str) -> Result<PremajorFamily> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pre-engineering" => Ok(PremajorFamily::PreEngineering),
            "pre-health-sciences" => Ok(PremajorFamily::PreHealthSciences),
            "pre-physical-sciences" => Ok(PremajorFamily::PrePhysicalSciences),
            "other-stem-premajor" => Ok(PremajorFamily::OtherStemPremajor),
            "non-stem" => Ok(PremajorFamily::NonStem),
            other => Err(Error::integrity(format!(
                "unknown premajor family {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MajorInfo {
    pub major_code: String,
    pub display_name: String,
    /// `(track_name, is_stem_track)`; empty only for premajor designations.
    pub tracks: Vec<(String, bool)>,
    pub is_premajor: bool,
    pub premajor_family: Option<PremajorFamily>,
}

/// Whether a degree-granting major counts as STEM: at least half of its
/// tracks are STEM tracks.
pub fn classify_major_stem(major: &MajorInfo) -> Result<bool> {
    if major.tracks.is_empty() {
        return Err(Error::integrity(format!(
            "major {:?} has no tracks in the catalog",
            major.major_code
        )));
    }
    let stem = major.tracks.iter().filter(|(_, s)| *s).count();
    Ok(2 * stem >= major.tracks.len())
}

/// Major catalog keyed by upper-cased code; lookups are case-insensitive and
/// unknown codes are hard errors so catalog drift surfaces immediately.
#[derive(Debug, Clone, Default)]
pub struct MajorCatalog {
    majors: BTreeMap<String, MajorInfo>,
}

impl MajorCatalog {
    pub fn new(majors: Vec<MajorInfo>) -> MajorCatalog {
        let mut map = BTreeMap::new();
        for m in majors {
            map.insert(m.major_code.to_ascii_uppercase(), m);
        }
        MajorCatalog { majors: map }
    }

    pub fn get(&self, code: &str) -> Result<&MajorInfo> {
        self.majors
            .get(&code.to_ascii_uppercase())
            .ok_or_else(|| Error::integrity(format!("unknown major code {code:?}")))
    }

    /// Major codes in sorted order (the canonical dummy-column order).
    pub fn codes(&self) -> impl Iterator<Item = &str> {
        self.majors.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.majors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.majors.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &MajorInfo> {
        self.majors.values()
    }

    /// Whether declaring this major marks a student as STEM-intending:
    /// a STEM-classified degree major, or a premajor in a STEM family.
    pub fn is_stem_designation(&self, code: &str) -> Result<bool> {
        let major = self.get(code)?;
        if major.is_premajor {
            Ok(major.premajor_family.map(|f| f.is_stem()).unwrap_or(false))
        } else {
            classify_major_stem(major)
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DegreeAward {
    pub student_id: StudentId,
    pub major_code: String,
    pub quarter_awarded: Quarter,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohortLabel {
    pub student_id: StudentId,
    pub is_stem_student: bool,
    pub is_graduate: bool,
    pub is_stem_graduate: bool,
    /// Minimum quarter gap to a qualifying degree; present iff `is_graduate`.
    pub quarters_to_degree: Option<u32>,
}

/// Students who carried a STEM designation in any transcript entry of their
/// first calendar year (first enrollment quarter plus the next 3 indices).
///
/// Idempotent and independent of transcript ordering.
pub fn select_stem_students(
    students: &[StudentRecord],
    transcripts: &[TranscriptEntry],
    majors: &MajorCatalog,
) -> Result<BTreeSet<StudentId>> {
    let enroll: BTreeMap<&str, u32> = students
        .iter()
        .map(|s| (s.student_id.as_str(), s.first_enrollment.index()))
        .collect();

    let mut selected = BTreeSet::new();
    for entry in transcripts {
        let Some(&start) = enroll.get(entry.student_id.as_str()) else {
            continue;
        };
        let idx = entry.quarter.index();
        if idx < start || idx > start + 3 {
            continue;
        }
        if majors.is_stem_designation(&entry.declared_major)? {
            selected.insert(entry.student_id.clone());
        }
    }
    Ok(selected)
}

/// Graduation label for one cohort student given their degree awards.
///
/// Callers pass only awards belonging to the student; the student is already
/// known to be in the STEM cohort.
pub fn label_outcome(
    student: &StudentRecord,
    degrees: &[DegreeAward],
    majors: &MajorCatalog,
) -> Result<CohortLabel> {
    label_outcome_with_window(student, degrees, majors, GRADUATION_WINDOW_QUARTERS)
}

/// Same as [`label_outcome`] with an explicit window, which exists so the
/// shrink-the-window monotonicity property can be checked directly.
pub fn label_outcome_with_window(
    student: &StudentRecord,
    degrees: &[DegreeAward],
    majors: &MajorCatalog,
    window: u32,
) -> Result<CohortLabel> {
    let start = student.first_enrollment.index();
    let mut min_gap: Option<u32> = None;
    let mut stem = false;
    for award in degrees {
        debug_assert_eq!(award.student_id, student.student_id);
        let awarded = award.quarter_awarded.index();
        if awarded < start {
            return Err(Error::integrity(format!(
                "degree awarded {} precedes first enrollment {} for student {}",
                award.quarter_awarded, student.first_enrollment, student.student_id
            )));
        }
        let gap = awarded - start;
        if gap > window {
            continue;
        }
        min_gap = Some(min_gap.map_or(gap, |g| g.min(gap)));
        if classify_major_stem(majors.get(&award.major_code)?)? {
            stem = true;
        }
    }
    Ok(CohortLabel {
        student_id: student.student_id.clone(),
        is_stem_student: true,
        is_graduate: min_gap.is_some(),
        is_stem_graduate: stem,
        quarters_to_degree: min_gap,
    })
}

/// A first-year transcript entry tagged with its relative quarter (1–4).
#[derive(Debug, Clone, Copy)]
pub struct FirstYearEntry<'a> {
    pub relative_quarter: u8,
    pub entry: &'a TranscriptEntry,
}

/// Entries from the student's first calendar year: quarter index within
/// `[start, start + 3]`, tagged with relative quarter 1–4. Quarters the
/// student skipped are simply absent.
pub fn first_year_slice<'a>(
    student: &StudentRecord,
    transcripts: &'a [TranscriptEntry],
) -> Vec<FirstYearEntry<'a>> {
    let start = student.first_enrollment.index();
    transcripts
        .iter()
        .filter(|e| e.student_id == student.student_id)
        .filter_map(|e| {
            let idx = e.quarter.index();
            if idx >= start && idx <= start + 3 {
                Some(FirstYearEntry {
                    relative_quarter: (idx - start + 1) as u8,
                    entry: e,
                })
            } else {
                None
            }
        })
        .collect()
}

/// One row of the demographic summary.
#[derive(Debug, Clone, Serialize)]
pub struct DemographicRow {
    pub group: String,
    pub category: String,
    pub stem_grads: u64,
    pub stem_ncs: u64,
    /// `grads / (grads + ncs)`, in percent.
    pub grad_rate_pct: f64,
}

/// Demographic table of STEM graduates vs non-completions, with an `all` row
/// and one row per observed category of gender, race, ethnicity, and
/// residency. Categories with zero members are omitted.
pub fn cohort_summary(labels: &[CohortLabel], students: &[StudentRecord]) -> Vec<DemographicRow> {
    let by_id: BTreeMap<&str, &StudentRecord> = students
        .iter()
        .map(|s| (s.student_id.as_str(), s))
        .collect();

    // (group, category) -> (grads, ncs)
    let mut counts: BTreeMap<(String, String), (u64, u64)> = BTreeMap::new();
    let mut bump = |group: &str, category: &str, grad: bool, counts: &mut BTreeMap<(String, String), (u64, u64)>| {
        let slot = counts
            .entry((group.to_string(), category.to_string()))
            .or_insert((0, 0));
        if grad {
            slot.0 += 1;
        } else {
            slot.1 += 1;
        }
    };

    for label in labels {
        let Some(student) = by_id.get(label.student_id.as_str()) else {
            continue;
        };
        let grad = label.is_stem_graduate;
        bump("all", "all", grad, &mut counts);
        bump("gender", &student.gender, grad, &mut counts);
        bump("race", &student.race, grad, &mut counts);
        bump("ethnicity", &student.ethnicity, grad, &mut counts);
        bump("residency", &student.residency, grad, &mut counts);
    }

    counts
        .into_iter()
        .filter(|(_, (g, n))| g + n > 0)
        .map(|((group, category), (grads, ncs))| DemographicRow {
            group,
            category,
            stem_grads: grads,
            stem_ncs: ncs,
            grad_rate_pct: 100.0 * grads as f64 / (grads + ncs) as f64,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn major(code: &str, stem_tracks: usize, total_tracks: usize) -> MajorInfo {
        let tracks = (0..total_tracks)
            .map(|i| (format!("track{i}"), i < stem_tracks))
            .collect();
        MajorInfo {
            major_code: code.to_string(),
            display_name: code.to_string(),
            tracks,
            is_premajor: false,
            premajor_family: None,
        }
    }

    fn premajor(code: &str, family: PremajorFamily) -> MajorInfo {
        MajorInfo {
            major_code: code.to_string(),
            display_name: code.to_string(),
            tracks: Vec::new(),
            is_premajor: true,
            premajor_family: Some(family),
        }
    }

    fn student(id: &str, first: Quarter) -> StudentRecord {
        StudentRecord {
            student_id: id.to_string(),
            gender: "female".into(),
            race: "asian".into(),
            ethnicity: "not_hispanic".into(),
            residency: "state_resident".into(),
            birth_year: 1986,
            first_enrollment: first,
            sat_score: Some(1200),
            act_score: None,
            hs_gpa: Some(3.5),
            parent_education: "bachelors_degree".into(),
            application_zip: Some("98105".into()),
        }
    }

    fn entry(id: &str, prefix: &str, number: u32, quarter: Quarter, major: &str) -> TranscriptEntry {
        TranscriptEntry {
            student_id: id.to_string(),
            course_prefix: prefix.to_string(),
            course_number: number,
            quarter,
            credits: 5.0,
            grade: GradeValue::numeric(3.0).unwrap(),
            declared_major: major.to_string(),
        }
    }

    #[test]
    fn half_tracks_rule() {
        // math: 4 tracks, 3 STEM -> STEM
        assert!(classify_major_stem(&major("MATH", 3, 4)).unwrap());
        // design: 4 tracks, 1 STEM -> not STEM
        assert!(!classify_major_stem(&major("DESIGN", 1, 4)).unwrap());
        // boundary: exactly half counts
        assert!(classify_major_stem(&major("X", 1, 2)).unwrap());
        assert!(!classify_major_stem(&major("Y", 1, 3)).unwrap());
    }

    #[test]
    fn empty_track_list_is_an_error() {
        let m = major("BROKEN", 0, 0);
        assert!(classify_major_stem(&m).is_err());
    }

    #[test]
    fn quarter_index_round_trip() {
        for year in [1998, 2004, 2010] {
            for season in Season::ALL {
                let q = Quarter::new(year, season);
                assert_eq!(Quarter::from_index(q.index()), q);
            }
        }
        let q1 = Quarter::new(2004, Season::Autumn);
        let q2 = Quarter::new(2005, Season::Winter);
        assert_eq!(q2.index() - q1.index(), 1);
    }

    #[test]
    fn stem_selection_includes_premajors_and_excludes_non_stem() {
        let majors = MajorCatalog::new(vec![
            major("MATH", 3, 4),
            major("DESIGN", 1, 4),
            premajor("PRE-ENG", PremajorFamily::PreEngineering),
            premajor("PRE-ART", PremajorFamily::NonStem),
        ]);
        let q0 = Quarter::new(2004, Season::Autumn);
        let students = vec![student("a", q0), student("b", q0), student("c", q0)];
        let transcripts = vec![
            // a declares pre-engineering in relative quarter 2 of year 1
            entry("a", "ENGL", 101, q0.plus(1), "PRE-ENG"),
            // b carries only a non-STEM premajor all year
            entry("b", "ART", 101, q0, "PRE-ART"),
            entry("b", "ART", 102, q0.plus(3), "PRE-ART"),
            // c declares math, but only after year 1 ends
            entry("c", "MATH", 124, q0.plus(4), "MATH"),
            entry("c", "HIST", 101, q0, "DESIGN"),
        ];
        let selected = select_stem_students(&students, &transcripts, &majors).unwrap();
        assert!(selected.contains("a"));
        assert!(!selected.contains("b"));
        assert!(!selected.contains("c"));

        // order independence
        let mut reversed = transcripts.clone();
        reversed.reverse();
        assert_eq!(
            select_stem_students(&students, &reversed, &majors).unwrap(),
            selected
        );
    }

    #[test]
    fn unknown_major_code_names_the_code() {
        let majors = MajorCatalog::new(vec![major("MATH", 3, 4)]);
        let q0 = Quarter::new(2004, Season::Autumn);
        let students = vec![student("a", q0)];
        let transcripts = vec![entry("a", "MATH", 124, q0, "BOGUS")];
        let err = select_stem_students(&students, &transcripts, &majors).unwrap_err();
        assert!(err.to_string().contains("BOGUS"), "{err}");
    }

    #[test]
    fn outcome_window_is_inclusive_at_24() {
        let majors = MajorCatalog::new(vec![major("MATH", 3, 4), major("PSYCH", 0, 1)]);
        let q0 = Quarter::new(2004, Season::Autumn);
        let s = student("a", q0);

        let at_24 = vec![DegreeAward {
            student_id: "a".into(),
            major_code: "MATH".into(),
            quarter_awarded: q0.plus(24),
        }];
        let label = label_outcome(&s, &at_24, &majors).unwrap();
        assert!(label.is_graduate);
        assert!(label.is_stem_graduate);
        assert_eq!(label.quarters_to_degree, Some(24));

        let at_25 = vec![DegreeAward {
            student_id: "a".into(),
            major_code: "MATH".into(),
            quarter_awarded: q0.plus(25),
        }];
        let label = label_outcome(&s, &at_25, &majors).unwrap();
        assert!(!label.is_graduate);
        assert!(!label.is_stem_graduate);
        assert_eq!(label.quarters_to_degree, None);
    }

    #[test]
    fn stem_nc_can_still_be_a_graduate() {
        let majors = MajorCatalog::new(vec![major("PSYCH", 0, 1)]);
        let q0 = Quarter::new(2004, Season::Autumn);
        let s = student("a", q0);
        let degrees = vec![DegreeAward {
            student_id: "a".into(),
            major_code: "PSYCH".into(),
            quarter_awarded: q0.plus(12),
        }];
        let label = label_outcome(&s, &degrees, &majors).unwrap();
        assert!(label.is_graduate);
        assert!(!label.is_stem_graduate);
        assert_eq!(label.quarters_to_degree, Some(12));
    }

    #[test]
    fn award_before_enrollment_is_an_error() {
        let majors = MajorCatalog::new(vec![major("MATH", 3, 4)]);
        let s = student("a", Quarter::new(2004, Season::Autumn));
        let degrees = vec![DegreeAward {
            student_id: "a".into(),
            major_code: "MATH".into(),
            quarter_awarded: Quarter::new(2004, Season::Spring),
        }];
        assert!(label_outcome(&s, &degrees, &majors).is_err());
    }

    #[test]
    fn shrinking_the_window_never_adds_graduates() {
        let majors = MajorCatalog::new(vec![major("MATH", 3, 4)]);
        let q0 = Quarter::new(2004, Season::Autumn);
        let s = student("a", q0);
        for gap in [0u32, 5, 12, 24, 25, 30] {
            let degrees = vec![DegreeAward {
                student_id: "a".into(),
                major_code: "MATH".into(),
                quarter_awarded: q0.plus(gap),
            }];
            let mut prev = true;
            for window in (0..=24).rev() {
                let grad = label_outcome_with_window(&s, &degrees, &majors, window)
                    .unwrap()
                    .is_graduate;
                // once a graduate stops qualifying it must stay disqualified
                assert!(prev || !grad, "gap {gap} window {window}");
                prev = grad;
            }
        }
    }

    #[test]
    fn first_year_slice_tags_relative_quarters() {
        let q0 = Quarter::new(2004, Season::Autumn);
        let s = student("a", q0);
        let transcripts = vec![
            entry("a", "MATH", 124, q0, "MATH"),
            entry("a", "MATH", 125, q0.plus(1), "MATH"),
            entry("a", "MATH", 126, q0.plus(3), "MATH"),
            entry("a", "MATH", 224, q0.plus(4), "MATH"), // outside year 1
            entry("b", "MATH", 124, q0, "MATH"),         // other student
        ];
        let slice = first_year_slice(&s, &transcripts);
        let rel: Vec<u8> = slice.iter().map(|e| e.relative_quarter).collect();
        assert_eq!(rel, vec![1, 2, 4]);
        // last enrolled quarter of year 1 is relative quarter 4
        assert_eq!(slice.iter().map(|e| e.relative_quarter).max(), Some(4));
    }

    #[test]
    fn summary_omits_empty_categories_and_counts_rates() {
        let q0 = Quarter::new(2004, Season::Autumn);
        let mut a = student("a", q0);
        a.gender = "female".into();
        let mut b = student("b", q0);
        b.gender = "male".into();
        let labels = vec![
            CohortLabel {
                student_id: "a".into(),
                is_stem_student: true,
                is_graduate: true,
                is_stem_graduate: true,
                quarters_to_degree: Some(12),
            },
            CohortLabel {
                student_id: "b".into(),
                is_stem_student: true,
                is_graduate: true,
                is_stem_graduate: false,
                quarters_to_degree: Some(12),
            },
        ];
        let rows = cohort_summary(&labels, &[a, b]);
        let all = rows
            .iter()
            .find(|r| r.group == "all")
            .expect("all row present");
        assert_eq!((all.stem_grads, all.stem_ncs), (1, 1));
        assert!((all.grad_rate_pct - 50.0).abs() < 1e-12);
        // no "other" gender row since nobody carries it
        assert!(!rows
            .iter()
            .any(|r| r.group == "gender" && r.category == "other"));
    }
}
