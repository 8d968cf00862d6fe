//! Seeded generator of registrar-shaped datasets with planted ground truth.
//!
//! Every quantity is drawn from one ChaCha8 stream seeded with the config
//! seed, so identical `(config, seed)` produce byte-identical files. The
//! draw order is fixed: first the ZIP table, then per student (in id order):
//!
//! 1. demographics (gender, race, ethnicity, residency, parent education,
//!    entry age, ZIP),
//! 2. latent ability,
//! 3. pre-entry scores (high-school GPA, SAT, ACT, each with planted
//!    missingness),
//! 4. first-enrollment season,
//! 5. graduation coin and enrolled duration,
//! 6. per-quarter enrollment flags,
//! 7. the quarterly STEM-intention chain,
//! 8. premajor family and target majors,
//! 9. per enrolled quarter: course count, course picks (rejecting
//!    duplicates within the quarter), grade kind and grade value,
//! 10. extra-degree coin.
//!
//! Course picks inside a quarter use rejection of duplicates, so the number
//! of draws can vary — determinism comes from the fixed stream, not from a
//! fixed draw count. Conformance across refactors is checked against golden
//! digests recorded in the tests.

use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::features::categories;
use crate::features::ZipAttributes;
use crate::io::{self, GroundTruthRow};
use crate::registrar::{
    CohortLabel, DegreeAward, GradeKind, GradeValue, MajorCatalog, MajorInfo, PremajorFamily,
    Quarter, Season, StudentRecord, TranscriptEntry,
};

/// Elevated switch-out hazard over a window of relative quarters, used to
/// plant an attrition wave with a known peak.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AttritionWave {
    /// First relative quarter of the wave (1-based).
    pub start_quarter: u32,
    /// Last relative quarter of the wave, inclusive.
    pub end_quarter: u32,
    /// Switch-out probability inside the window (replaces the base rate).
    pub switch_out: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_students: usize,
    /// Courses per catalog side (STEM and non-STEM each).
    pub n_courses: usize,
    /// P(initial intention = STEM).
    pub stem_prior: f64,
    /// Base per-quarter hazard of leaving a STEM trajectory (scaled by
    /// ability; see module docs).
    pub quarterly_switch_out: f64,
    /// Per-quarter probability of switching into a STEM trajectory.
    pub quarterly_switch_in: f64,
    /// Effect size of latent ability on math-course grades.
    pub grade_signal_strength: f64,
    /// Baseline probability of completing any degree.
    pub graduation_base_rate: f64,
    pub seed: u64,
    /// Graduation window in quarters; keep at 24 to match the labeller.
    #[serde(default = "default_quarters_max")]
    pub quarters_max: u32,
    /// Calendar year of first enrollment for the whole cohort.
    #[serde(default = "default_cohort_year")]
    pub cohort_year: u32,
    #[serde(default)]
    pub attrition_wave: Option<AttritionWave>,
}

fn default_quarters_max() -> u32 {
    24
}

fn default_cohort_year() -> u32 {
    2004
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            n_students: 2_000,
            n_courses: 60,
            stem_prior: 0.5,
            quarterly_switch_out: 0.04,
            quarterly_switch_in: 0.02,
            grade_signal_strength: 0.8,
            graduation_base_rate: 0.785,
            seed: 42,
            quarters_max: 24,
            cohort_year: 2004,
            attrition_wave: None,
        }
    }
}

impl SynthConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_students == 0 || self.n_courses == 0 {
            return Err(Error::config("n_students and n_courses must be >= 1"));
        }
        for (name, p) in [
            ("stem_prior", self.stem_prior),
            ("quarterly_switch_out", self.quarterly_switch_out),
            ("quarterly_switch_in", self.quarterly_switch_in),
            ("graduation_base_rate", self.graduation_base_rate),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::config(format!("{name} = {p} outside [0, 1]")));
            }
        }
        if let Some(w) = &self.attrition_wave {
            if w.start_quarter == 0 || w.end_quarter < w.start_quarter {
                return Err(Error::config("attrition wave window is empty"));
            }
            if !(0.0..=1.0).contains(&w.switch_out) {
                return Err(Error::config("attrition wave switch_out outside [0, 1]"));
            }
        }
        Ok(())
    }
}

/// Planted truth for one student.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StudentTruth {
    pub student_id: String,
    pub ability: f64,
    /// `(relative calendar quarter, intent)` for each enrolled quarter.
    pub intention_path: Vec<(u32, bool)>,
    pub true_outcome: CohortLabel,
    /// `(relative quarter t, switched_out)` wherever intent_t != intent_{t-1},
    /// over the full calendar chain.
    pub planted_switch_quarters: Vec<(u32, bool)>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct GroundTruth {
    pub students: Vec<StudentTruth>,
}

pub struct SynthDataset {
    pub students: Vec<StudentRecord>,
    pub transcripts: Vec<TranscriptEntry>,
    pub majors: MajorCatalog,
    pub degrees: Vec<DegreeAward>,
    pub zip_attrs: Vec<ZipAttributes>,
    pub ground_truth: GroundTruth,
}

const STEM_PREFIXES: [&str; 10] = [
    "MATH", "CHEM", "PHYS", "BIOL", "CSE", "STAT", "AMATH", "BIOEN", "EE", "MECHE",
];
const NONSTEM_PREFIXES: [&str; 10] = [
    "PSYCH", "ECON", "POLS", "SOC", "COMM", "ENGL", "ANTH", "ACCTG", "FIN", "HIST",
];

/// Degree majors a STEM-intending student may land in (all classify STEM).
const STEM_TARGETS: [&str; 8] = [
    "MATH", "CHEM", "PHYS", "BIOL", "CSE", "STAT", "BIOEN", "EE",
];
/// Destination weights for non-STEM degrees; psychology dominates.
const NONSTEM_TARGETS: [(&str, f64); 10] = [
    ("PSYCH", 0.26),
    ("ECON", 0.13),
    ("POLS", 0.11),
    ("SOC", 0.10),
    ("COMM", 0.09),
    ("ENGL", 0.08),
    ("ANTH", 0.07),
    ("ACCTG", 0.06),
    ("FIN", 0.05),
    ("HIST", 0.05),
];
/// Pre-engineering leavers skew toward economics and business fields.
const NONSTEM_TARGETS_PRE_ENG: [(&str, f64); 10] = [
    ("ECON", 0.30),
    ("ACCTG", 0.14),
    ("FIN", 0.13),
    ("PSYCH", 0.11),
    ("POLS", 0.08),
    ("SOC", 0.07),
    ("COMM", 0.06),
    ("ENGL", 0.04),
    ("ANTH", 0.04),
    ("HIST", 0.03),
];

const STEM_PREMAJORS: [(&str, PremajorFamily); 4] = [
    ("PRE-ENG", PremajorFamily::PreEngineering),
    ("PRE-HSCI", PremajorFamily::PreHealthSciences),
    ("PRE-PSCI", PremajorFamily::PrePhysicalSciences),
    ("PRE-STEM", PremajorFamily::OtherStemPremajor),
];
const NONSTEM_PREMAJOR: &str = "PRE-ARTS";

#[derive(Debug, Clone)]
struct SynthCourse {
    prefix: &'static str,
    number: u32,
    credits: f64,
    /// Mean grade for an average-ability student.
    base_grade: f64,
    /// Ability loading relative to `grade_signal_strength`.
    loading: f64,
}

impl SynthCourse {
    fn level(&self) -> u32 {
        self.number / 100
    }
}

/// The year-long gatekeeper series analogs.
const GATEKEEPERS: [(&str, u32); 16] = [
    ("MATH", 124),
    ("MATH", 125),
    ("MATH", 126),
    ("CHEM", 142),
    ("CHEM", 152),
    ("CHEM", 162),
    ("CHEM", 237),
    ("CHEM", 238),
    ("CHEM", 239),
    ("PHYS", 121),
    ("PHYS", 122),
    ("PHYS", 123),
    ("BIOL", 180),
    ("BIOL", 200),
    ("BIOL", 220),
    ("MATH", 98), // remedial analog
];

/// Ability loading per course: math carries the full planted signal, the
/// other gatekeeper series a reduced one, everything else background noise.
fn course_loading(prefix: &str, number: u32, stem: bool) -> f64 {
    if prefix == "MATH" {
        1.0
    } else if GATEKEEPERS.iter().any(|(p, n)| *p == prefix && *n == number) {
        0.45
    } else if stem {
        0.3
    } else {
        0.2
    }
}

fn build_courses(n: usize, stem: bool, rng: &mut ChaCha8Rng) -> Vec<SynthCourse> {
    let mut courses = Vec::with_capacity(n);
    if stem {
        for (prefix, number) in GATEKEEPERS {
            if courses.len() == n {
                break;
            }
            courses.push(SynthCourse {
                prefix,
                number,
                credits: 5.0,
                base_grade: 2.4 + rng.gen::<f64>() * 0.5,
                loading: course_loading(prefix, number, true),
            });
        }
    }
    let prefixes: &[&'static str] = if stem { &STEM_PREFIXES } else { &NONSTEM_PREFIXES };
    let mut per_prefix_counter = vec![0u32; prefixes.len()];
    let mut i = 0usize;
    while courses.len() < n {
        let p = i % prefixes.len();
        let k = per_prefix_counter[p];
        per_prefix_counter[p] += 1;
        let level = 1 + (k % 4);
        let number = level * 100 + 10 + 3 * (k / 4);
        // skip collisions with the fixed gatekeeper numbers
        if stem && GATEKEEPERS.iter().any(|(gp, gn)| *gp == prefixes[p] && *gn == number) {
            i += 1;
            continue;
        }
        courses.push(SynthCourse {
            prefix: prefixes[p],
            number,
            credits: [5.0, 5.0, 4.0, 3.0][(k % 4) as usize],
            base_grade: 2.6 + rng.gen::<f64>() * 0.6,
            loading: course_loading(prefixes[p], number, stem),
        });
        i += 1;
    }
    courses
}

fn build_major_catalog() -> MajorCatalog {
    let mut majors = Vec::new();
    let degree = |code: &str, name: &str, tracks: Vec<(&str, bool)>| MajorInfo {
        major_code: code.to_string(),
        display_name: name.to_string(),
        tracks: tracks
            .into_iter()
            .map(|(t, s)| (t.to_string(), s))
            .collect(),
        is_premajor: false,
        premajor_family: None,
    };
    // math analog: 4 tracks, one non-STEM teaching track -> STEM overall
    majors.push(degree(
        "MATH",
        "Mathematics",
        vec![
            ("comprehensive", true),
            ("applied", true),
            ("theoretical", true),
            ("teaching_prep", false),
        ],
    ));
    // design analog: 4 tracks, only interaction design is STEM -> non-STEM
    majors.push(degree(
        "DESIGN",
        "Design",
        vec![
            ("visual_communication", false),
            ("industrial", false),
            ("interaction", true),
            ("studio", false),
        ],
    ));
    for (code, name) in [
        ("CHEM", "Chemistry"),
        ("PHYS", "Physics"),
        ("BIOL", "Biology"),
        ("CSE", "Computer Science"),
        ("STAT", "Statistics"),
        ("BIOEN", "Bioengineering"),
        ("EE", "Electrical Engineering"),
    ] {
        majors.push(degree(code, name, vec![("standard", true)]));
    }
    for (code, name) in [
        ("PSYCH", "Psychology"),
        ("ECON", "Economics"),
        ("POLS", "Political Science"),
        ("SOC", "Sociology"),
        ("COMM", "Communications"),
        ("ENGL", "English"),
        ("ANTH", "Anthropology"),
        ("ACCTG", "Accounting"),
        ("FIN", "Finance"),
        ("HIST", "History"),
    ] {
        majors.push(degree(code, name, vec![("standard", false)]));
    }
    for (code, family) in STEM_PREMAJORS {
        majors.push(MajorInfo {
            major_code: code.to_string(),
            display_name: code.to_string(),
            tracks: Vec::new(),
            is_premajor: true,
            premajor_family: Some(family),
        });
    }
    majors.push(MajorInfo {
        major_code: NONSTEM_PREMAJOR.to_string(),
        display_name: "Pre-Arts".to_string(),
        tracks: Vec::new(),
        is_premajor: true,
        premajor_family: Some(PremajorFamily::NonStem),
    });
    MajorCatalog::new(majors)
}

fn pick_weighted<'a>(rng: &mut ChaCha8Rng, table: &[(&'a str, f64)]) -> &'a str {
    let total: f64 = table.iter().map(|(_, w)| w).sum();
    let mut u = rng.gen::<f64>() * total;
    for (code, w) in table {
        u -= w;
        if u <= 0.0 {
            return code;
        }
    }
    table.last().expect("non-empty weight table").0
}

fn pick_categorical<'a>(rng: &mut ChaCha8Rng, values: &[(&'a str, f64)]) -> &'a str {
    pick_weighted(rng, values)
}

fn build_zip_table(campus: (f64, f64), rng: &mut ChaCha8Rng) -> Vec<ZipAttributes> {
    let mut out = Vec::new();
    for i in 0..24 {
        out.push(ZipAttributes {
            zip: format!("98{:03}", i + 1),
            avg_income: 38_000.0 + rng.gen::<f64>() * 85_000.0,
            pct_hs_grads: 72.0 + rng.gen::<f64>() * 26.0,
            pct_college_grads: 18.0 + rng.gen::<f64>() * 55.0,
            latitude: campus.0 + (rng.gen::<f64>() - 0.5) * 8.0,
            longitude: campus.1 + (rng.gen::<f64>() - 0.5) * 16.0,
        });
    }
    out
}

/// Campus centroid used for the synthetic ZIP table and distance features.
pub const CAMPUS_COORDS: (f64, f64) = (47.65, -122.31);

const DURATION_WEIGHTS: [(u32, f64); 10] = [
    (9, 0.03),
    (10, 0.07),
    (11, 0.13),
    (12, 0.26),
    (13, 0.21),
    (14, 0.11),
    (15, 0.07),
    (16, 0.04),
    (17, 0.02),
    (18, 0.02),
];

fn draw_duration(rng: &mut ChaCha8Rng, quarters_max: u32) -> u32 {
    let u = rng.gen::<f64>();
    // small planted mass at the window boundary: gap == quarters_max is a
    // boundary graduate, gap == quarters_max + 1 falls just outside
    if u < 0.02 {
        return quarters_max + 1;
    }
    if u < 0.04 {
        return quarters_max + 2;
    }
    if u < 0.08 {
        return 19 + (rng.gen::<u32>() % quarters_max.saturating_sub(19).max(1)).min(4);
    }
    let total: f64 = DURATION_WEIGHTS.iter().map(|(_, w)| w).sum();
    let mut v = rng.gen::<f64>() * total;
    for (d, w) in DURATION_WEIGHTS {
        v -= w;
        if v <= 0.0 {
            return d;
        }
    }
    12
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Generate a full synthetic dataset. Single-threaded by contract: the draw
/// order defines the output.
pub fn generate(config: &SynthConfig) -> Result<SynthDataset> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let normal = Normal::new(0.0, 1.0).expect("unit normal");

    let zip_attrs = build_zip_table(CAMPUS_COORDS, &mut rng);
    let stem_courses = build_courses(config.n_courses, true, &mut rng);
    let nonstem_courses = build_courses(config.n_courses, false, &mut rng);
    let majors = build_major_catalog();

    let mut students = Vec::with_capacity(config.n_students);
    let mut transcripts = Vec::new();
    let mut degrees = Vec::new();
    let mut truths = Vec::with_capacity(config.n_students);

    for idx in 0..config.n_students {
        let student_id = format!("S{idx:07}");

        // 1. demographics
        let gender = pick_categorical(&mut rng, &categories::GENDER_WEIGHTS).to_string();
        let race = pick_categorical(&mut rng, &categories::RACE_WEIGHTS).to_string();
        let ethnicity = pick_categorical(&mut rng, &categories::ETHNICITY_WEIGHTS).to_string();
        let residency = pick_categorical(&mut rng, &categories::RESIDENCY_WEIGHTS).to_string();
        let parent_education =
            pick_categorical(&mut rng, &categories::PARENT_EDU_WEIGHTS).to_string();
        let entry_age = *[17u32, 18, 18, 18, 18, 18, 19, 19, 19, 20]
            .get(rng.gen_range(0..10))
            .unwrap();
        let application_zip = if rng.gen::<f64>() < 0.03 {
            None
        } else {
            Some(zip_attrs[rng.gen_range(0..zip_attrs.len())].zip.clone())
        };

        // 2. latent ability
        let ability: f64 = normal.sample(&mut rng);

        // 3. pre-entry scores
        let hs_gpa = if rng.gen::<f64>() < 0.97 {
            let g: f64 = 3.3 + 0.3 * ability + 0.25 * normal.sample(&mut rng);
            Some(((g.clamp(1.5, 4.0)) * 100.0).round() / 100.0)
        } else {
            None
        };
        let sat_score = if rng.gen::<f64>() < 0.94 {
            let s = 1000.0 + 180.0 * ability + 120.0 * normal.sample(&mut rng);
            Some(((s / 10.0).round() * 10.0).clamp(400.0, 1600.0) as u32)
        } else {
            None
        };
        let act_score = if rng.gen::<f64>() < 0.27 {
            let s = 21.0 + 4.0 * ability + 3.0 * normal.sample(&mut rng);
            Some(s.round().clamp(1.0, 36.0) as u32)
        } else {
            None
        };

        // 4. first enrollment within the cohort calendar year
        let season_draw = rng.gen::<f64>();
        let season = if season_draw < 0.80 {
            Season::Autumn
        } else if season_draw < 0.90 {
            Season::Winter
        } else if season_draw < 0.97 {
            Season::Spring
        } else {
            Season::Summer
        };
        let first_enrollment = Quarter::new(config.cohort_year, season);
        let birth_year = config.cohort_year - entry_age;

        // 5. graduation coin and duration
        let p_grad = (config.graduation_base_rate + 0.12 * ability).clamp(0.02, 0.995);
        let has_degree = rng.gen::<f64>() < p_grad;
        let duration = if has_degree {
            draw_duration(&mut rng, config.quarters_max)
        } else {
            3 + rng.gen_range(0..10)
        };

        // 6. enrollment flags per relative calendar quarter
        let mut enrolled = vec![false; duration as usize];
        for t in 0..duration as usize {
            let q = first_enrollment.plus(t as u32);
            enrolled[t] = if t == 0 || t + 1 == duration as usize {
                true
            } else if q.season == Season::Summer {
                rng.gen::<f64>() < 0.2
            } else {
                rng.gen::<f64>() < 0.97
            };
        }

        // 7. intention chain over calendar quarters
        let mut intent = vec![false; duration as usize];
        intent[0] = rng.gen::<f64>() < config.stem_prior;
        for t in 1..duration as usize {
            let rel_quarter = (t + 1) as u32;
            let base_out = match &config.attrition_wave {
                Some(w) if rel_quarter >= w.start_quarter && rel_quarter <= w.end_quarter => {
                    w.switch_out
                }
                _ => config.quarterly_switch_out,
            };
            intent[t] = if intent[t - 1] {
                // lower ability leaves STEM trajectories faster
                let hazard = (base_out * 2.0 * sigmoid(-1.5 * ability)).min(0.95);
                !(rng.gen::<f64>() < hazard)
            } else {
                rng.gen::<f64>() < config.quarterly_switch_in
            };
        }

        // 8. premajor family and target majors
        let stem_premajor = STEM_PREMAJORS[rng.gen_range(0..STEM_PREMAJORS.len())].0;
        let stem_target = STEM_TARGETS[rng.gen_range(0..STEM_TARGETS.len())];
        let nonstem_table: &[(&str, f64)] = if stem_premajor == "PRE-ENG" {
            &NONSTEM_TARGETS_PRE_ENG
        } else {
            &NONSTEM_TARGETS
        };
        let nonstem_target = pick_weighted(&mut rng, nonstem_table);

        // 9. courses and grades per enrolled quarter
        let mut intention_path = Vec::new();
        for t in 0..duration as usize {
            if !enrolled[t] {
                continue;
            }
            let rel_quarter = (t + 1) as u32;
            intention_path.push((rel_quarter, intent[t]));
            let quarter = first_enrollment.plus(t as u32);
            let year_of_study = 1 + t / 4;
            let declared_major = if intent[t] {
                if rel_quarter <= 5 {
                    stem_premajor
                } else {
                    stem_target
                }
            } else if rel_quarter <= 5 {
                NONSTEM_PREMAJOR
            } else {
                nonstem_target
            };

            let n_courses_q = 3 + rng.gen_range(0..3);
            let mut taken: Vec<(usize, bool)> = Vec::new(); // (index, stem side)
            let mut slot = 0;
            while taken.len() < n_courses_q {
                slot += 1;
                if slot > 40 {
                    break; // tiny catalogs can exhaust a level pool
                }
                let course_idx;
                let stem_side;
                // STEM-intent first-year students work through the gatekeeper series
                if intent[t] && rel_quarter <= 3 && taken.is_empty() && rng.gen::<f64>() < 0.85 {
                    let number = [124, 125, 126][(rel_quarter - 1) as usize];
                    match stem_courses
                        .iter()
                        .position(|c| c.prefix == "MATH" && c.number == number)
                    {
                        Some(i) => {
                            course_idx = i;
                            stem_side = true;
                        }
                        None => continue,
                    }
                } else {
                    let p_stem = if intent[t] { 0.75 } else { 0.12 };
                    stem_side = rng.gen::<f64>() < p_stem;
                    let pool: &[SynthCourse] = if stem_side {
                        &stem_courses
                    } else {
                        &nonstem_courses
                    };
                    let max_level = (year_of_study + 1).min(4) as u32;
                    let candidates: Vec<usize> = pool
                        .iter()
                        .enumerate()
                        .filter(|(_, c)| c.level() <= max_level)
                        .map(|(i, _)| i)
                        .collect();
                    if candidates.is_empty() {
                        course_idx = rng.gen_range(0..pool.len());
                    } else {
                        course_idx = candidates[rng.gen_range(0..candidates.len())];
                    }
                }
                if taken.contains(&(course_idx, stem_side)) {
                    continue;
                }
                taken.push((course_idx, stem_side));
            }

            for (course_idx, stem_side) in taken {
                let course = if stem_side {
                    &stem_courses[course_idx]
                } else {
                    &nonstem_courses[course_idx]
                };
                let kind_draw = rng.gen::<f64>();
                let grade = if kind_draw < 0.93 {
                    let noise = 0.55 * normal.sample(&mut rng);
                    let signal = course.loading * config.grade_signal_strength * ability;
                    let g = (course.base_grade + signal + noise).clamp(0.0, 4.0);
                    GradeValue::numeric((g * 10.0).round() / 10.0)?
                } else if kind_draw < 0.96 {
                    GradeValue::non_numeric(GradeKind::Withdrawal)?
                } else if kind_draw < 0.98 {
                    GradeValue::non_numeric(GradeKind::Pass)?
                } else if kind_draw < 0.99 {
                    GradeValue::non_numeric(GradeKind::Incomplete)?
                } else {
                    GradeValue::non_numeric(GradeKind::FailNonnumeric)?
                };
                transcripts.push(TranscriptEntry {
                    student_id: student_id.clone(),
                    course_prefix: course.prefix.to_string(),
                    course_number: course.number,
                    quarter,
                    credits: course.credits,
                    grade,
                    declared_major: declared_major.to_string(),
                });
            }
        }

        // 10. degrees
        let final_intent = intent[duration as usize - 1];
        let mut awarded: Vec<&str> = Vec::new();
        if has_degree {
            let primary = if final_intent { stem_target } else { nonstem_target };
            awarded.push(primary);
            // occasional double degree of the opposite kind
            if rng.gen::<f64>() < 0.03 {
                let secondary = if final_intent { nonstem_target } else { stem_target };
                if secondary != primary {
                    awarded.push(secondary);
                }
            }
            let award_quarter = first_enrollment.plus(duration - 1);
            for code in &awarded {
                degrees.push(DegreeAward {
                    student_id: student_id.clone(),
                    major_code: code.to_string(),
                    quarter_awarded: award_quarter,
                });
            }
        }

        // planted truth, by construction rather than via the labeller
        let gap = duration - 1;
        let within_window = has_degree && gap <= config.quarters_max;
        let has_stem_degree = awarded.iter().any(|c| STEM_TARGETS.contains(c));
        let is_stem_student = intention_path
            .iter()
            .any(|(rel, stem)| *rel <= 4 && *stem);
        let mut planted_switch_quarters = Vec::new();
        for t in 1..duration as usize {
            if intent[t] != intent[t - 1] {
                planted_switch_quarters.push(((t + 1) as u32, intent[t - 1]));
            }
        }
        truths.push(StudentTruth {
            student_id: student_id.clone(),
            ability,
            intention_path,
            true_outcome: CohortLabel {
                student_id: student_id.clone(),
                is_stem_student,
                is_graduate: within_window,
                is_stem_graduate: within_window && has_stem_degree,
                quarters_to_degree: within_window.then_some(gap),
            },
            planted_switch_quarters,
        });

        students.push(StudentRecord {
            student_id,
            gender,
            race,
            ethnicity,
            residency,
            birth_year,
            first_enrollment,
            sat_score,
            act_score,
            hs_gpa,
            parent_education,
            application_zip,
        });
    }

    Ok(SynthDataset {
        students,
        transcripts,
        majors,
        degrees,
        zip_attrs,
        ground_truth: GroundTruth { students: truths },
    })
}

/// Write the five registrar CSVs plus `ground_truth.csv` and a manifest that
/// echoes the config and seed.
pub fn write_dataset(dir: &Path, dataset: &SynthDataset, config: &SynthConfig) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    io::write_students(&dir.join("students.csv"), &dataset.students)?;
    io::write_transcripts(&dir.join("transcripts.csv"), &dataset.transcripts)?;
    io::write_majors(&dir.join("majors.csv"), &dataset.majors)?;
    io::write_degrees(&dir.join("degrees.csv"), &dataset.degrees)?;
    io::write_zip_attrs(&dir.join("zip_attrs.csv"), &dataset.zip_attrs)?;
    let rows: Vec<GroundTruthRow> = dataset
        .ground_truth
        .students
        .iter()
        .flat_map(|t| {
            t.intention_path.iter().map(|(rel, stem)| GroundTruthRow {
                student_id: t.student_id.clone(),
                quarter_rel: *rel,
                intent_stem: *stem,
            })
        })
        .collect();
    io::write_ground_truth(&dir.join("ground_truth.csv"), &rows)?;

    let manifest = serde_json::json!({
        "generator": "attrition-lab synthetic registrar",
        "rng": "chacha8",
        "seed": config.seed,
        "config": config,
    });
    let path = dir.join("synth_manifest.json");
    let body = serde_json::to_string_pretty(&manifest).map_err(|e| Error::Json {
        path: path.display().to_string(),
        source: e,
    })?;
    std::fs::write(&path, body + "\n").map_err(|e| Error::io(path.display().to_string(), e))
}

/// SHA-256 digest over the generated files, in fixed filename order. Used by
/// the golden determinism tests and recorded in run manifests.
pub fn dataset_digest(dir: &Path) -> Result<String> {
    let mut hasher = Sha256::new();
    for name in [
        "students.csv",
        "transcripts.csv",
        "majors.csv",
        "degrees.csv",
        "zip_attrs.csv",
        "ground_truth.csv",
    ] {
        let path = dir.join(name);
        let bytes =
            std::fs::read(&path).map_err(|e| Error::io(path.display().to_string(), e))?;
        hasher.update(name.as_bytes());
        hasher.update(bytes);
    }
    Ok(hex::encode(hasher.finalize()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registrar::label_outcome;
    use std::collections::BTreeMap;

    fn small_config() -> SynthConfig {
        SynthConfig {
            n_students: 300,
            n_courses: 50,
            seed: 17,
            ..SynthConfig::default()
        }
    }

    #[test]
    fn rejects_zero_students_or_courses() {
        let mut c = small_config();
        c.n_students = 0;
        assert!(generate(&c).is_err());
        let mut c = small_config();
        c.n_courses = 0;
        assert!(generate(&c).is_err());
    }

    #[test]
    fn identical_config_and_seed_give_identical_files() {
        let config = small_config();
        let d1 = tempfile::tempdir().unwrap();
        let d2 = tempfile::tempdir().unwrap();
        write_dataset(d1.path(), &generate(&config).unwrap(), &config).unwrap();
        write_dataset(d2.path(), &generate(&config).unwrap(), &config).unwrap();
        assert_eq!(
            dataset_digest(d1.path()).unwrap(),
            dataset_digest(d2.path()).unwrap()
        );
        // and different seeds do not
        let other = SynthConfig {
            seed: 18,
            ..small_config()
        };
        let d3 = tempfile::tempdir().unwrap();
        write_dataset(d3.path(), &generate(&other).unwrap(), &other).unwrap();
        assert_ne!(
            dataset_digest(d1.path()).unwrap(),
            dataset_digest(d3.path()).unwrap()
        );
    }

    #[test]
    fn degenerate_chain_is_all_stem() {
        let config = SynthConfig {
            stem_prior: 1.0,
            quarterly_switch_out: 0.0,
            n_students: 200,
            ..small_config()
        };
        let ds = generate(&config).unwrap();
        for truth in &ds.ground_truth.students {
            assert!(truth.intention_path.iter().all(|(_, stem)| *stem));
            assert!(truth.planted_switch_quarters.is_empty());
        }
    }

    #[test]
    fn stem_share_of_graduates_tracks_the_prior() {
        let config = SynthConfig {
            n_students: 4_000,
            stem_prior: 0.235,
            quarterly_switch_out: 0.005,
            quarterly_switch_in: 0.005,
            seed: 7,
            ..SynthConfig::default()
        };
        let ds = generate(&config).unwrap();
        let grads: Vec<_> = ds
            .ground_truth
            .students
            .iter()
            .filter(|t| t.true_outcome.is_graduate)
            .collect();
        let stem = grads.iter().filter(|t| t.true_outcome.is_stem_graduate).count();
        let share = 100.0 * stem as f64 / grads.len() as f64;
        assert!(
            (share - 23.5).abs() <= 3.0,
            "stem share of graduates {share:.2}% not within 3 points of 23.5%"
        );
    }

    #[test]
    fn labeller_reproduces_planted_outcomes() {
        let config = SynthConfig {
            n_students: 1_500,
            seed: 99,
            ..small_config()
        };
        let ds = generate(&config).unwrap();
        let mut by_student: BTreeMap<&str, Vec<DegreeAward>> = BTreeMap::new();
        for d in &ds.degrees {
            by_student
                .entry(d.student_id.as_str())
                .or_default()
                .push(d.clone());
        }
        let empty = Vec::new();
        let mut saw_boundary_in = false;
        let mut saw_boundary_out = false;
        for (student, truth) in ds.students.iter().zip(&ds.ground_truth.students) {
            let degrees = by_student.get(student.student_id.as_str()).unwrap_or(&empty);
            let label = label_outcome(student, degrees, &ds.majors).unwrap();
            assert_eq!(label.is_graduate, truth.true_outcome.is_graduate);
            assert_eq!(label.is_stem_graduate, truth.true_outcome.is_stem_graduate);
            assert_eq!(
                label.quarters_to_degree,
                truth.true_outcome.quarters_to_degree
            );
            match truth.true_outcome.quarters_to_degree {
                Some(24) => saw_boundary_in = true,
                None if !degrees.is_empty() => saw_boundary_out = true,
                _ => {}
            }
        }
        assert!(saw_boundary_in, "no graduate planted exactly at the window edge");
        assert!(saw_boundary_out, "no degree planted just outside the window");
    }

    #[test]
    fn planted_cohort_flag_matches_the_selector() {
        use crate::registrar::select_stem_students;
        let config = SynthConfig {
            n_students: 800,
            stem_prior: 0.5,
            seed: 3,
            ..small_config()
        };
        let ds = generate(&config).unwrap();
        let selected = select_stem_students(&ds.students, &ds.transcripts, &ds.majors).unwrap();
        for truth in &ds.ground_truth.students {
            assert_eq!(
                selected.contains(&truth.student_id),
                truth.true_outcome.is_stem_student,
                "selector disagrees with planted flag for {}",
                truth.student_id
            );
        }
    }

    #[test]
    fn math_grades_separate_stem_grads_from_ncs() {
        let config = SynthConfig {
            n_students: 2_000,
            seed: 5,
            ..SynthConfig::default()
        };
        let ds = generate(&config).unwrap();
        let outcome: BTreeMap<&str, &CohortLabel> = ds
            .ground_truth
            .students
            .iter()
            .map(|t| (t.student_id.as_str(), &t.true_outcome))
            .collect();
        let mut grad_sum = (0.0, 0u32);
        let mut nc_sum = (0.0, 0u32);
        for e in &ds.transcripts {
            if e.course_prefix != "MATH" {
                continue;
            }
            let Some(points) = e.grade.points() else { continue };
            let label = outcome[e.student_id.as_str()];
            if !label.is_stem_student {
                continue;
            }
            if label.is_stem_graduate {
                grad_sum = (grad_sum.0 + points, grad_sum.1 + 1);
            } else {
                nc_sum = (nc_sum.0 + points, nc_sum.1 + 1);
            }
        }
        let grad_avg = grad_sum.0 / grad_sum.1 as f64;
        let nc_avg = nc_sum.0 / nc_sum.1 as f64;
        assert!(
            grad_avg > nc_avg,
            "planted signal missing: grads {grad_avg:.3} vs ncs {nc_avg:.3}"
        );
    }
}
