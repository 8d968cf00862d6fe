//! First-year feature engineering: grade normalization, score imputation,
//! ZIP-derived features, and assembly of the dense student-by-feature matrix.

pub mod categories;
mod impute;
mod offering;
mod perf;
mod registry;
mod zip;

pub use impute::{impute_scores, ImputeOutcome, ImputedFlags, ACT_RANGE, SAT_RANGE};
pub use offering::{
    grade_transforms, offering_key, offering_sizes, offering_stats, OfferingKey, OfferingStats,
};
pub use perf::{
    count_failed, count_passed, count_withdrawals, earns_credit, performance_block,
    PerformanceBlock, EMPTY_SCOPE, PASSING_FLOOR, PERF_MEASURES,
};
pub use registry::{
    Block, FeatureRegistry, COURSE_GROUPS, COURSE_GROUP_BLOCK_SIZE, DELTA_PAIRS,
    DEMOGRAPHIC_BLOCK_SIZE, FIRST_YEAR_BLOCK_SIZE, FIRST_YEAR_SCOPES, PREFIX_FEATURES_EACH,
    PREFIX_MIN_STUDENTS,
};
pub use zip::{haversine_km, ZipAttributes, ZipFeatureValues, ZipTable, EARTH_RADIUS_KM};

use std::collections::{BTreeMap, BTreeSet};
use std::ops::RangeInclusive;
use std::path::Path;

use crate::error::{Error, Result};
use crate::registrar::{
    first_year_slice, CohortLabel, FirstYearEntry, MajorCatalog, Season, StudentRecord,
    TranscriptEntry,
};

/// Membership rules for the gatekeeper course series.
#[derive(Debug, Clone)]
pub struct GatekeeperSpec {
    /// `(series name, prefix, course-number range)`; series names must match
    /// the `gk_*` course groups.
    rules: Vec<(&'static str, String, RangeInclusive<u32>)>,
}

impl Default for GatekeeperSpec {
    fn default() -> Self {
        GatekeeperSpec {
            rules: vec![
                ("gk_calculus", "MATH".into(), 100..=199),
                ("gk_biology", "BIOL".into(), 100..=299),
                // inorganic and organic series pooled together
                ("gk_chemistry", "CHEM".into(), 100..=299),
                ("gk_physics", "PHYS".into(), 100..=199),
            ],
        }
    }
}

impl GatekeeperSpec {
    pub fn series_of(&self, prefix: &str, number: u32) -> Option<&'static str> {
        self.rules
            .iter()
            .find(|(_, p, range)| p.eq_ignore_ascii_case(prefix) && range.contains(&number))
            .map(|(series, _, _)| *series)
    }
}

#[derive(Debug, Clone)]
pub struct FeatureConfig {
    pub campus: (f64, f64),
    pub gatekeepers: GatekeeperSpec,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            campus: crate::synth::CAMPUS_COORDS,
            gatekeepers: GatekeeperSpec::default(),
        }
    }
}

/// Dense student-by-feature matrix with the binary STEM-graduate label.
/// No missing values: imputation and the zero-fill conventions are complete
/// by construction.
#[derive(Debug, Clone)]
pub struct FeatureMatrix {
    pub student_ids: Vec<String>,
    pub registry: FeatureRegistry,
    values: Vec<f64>,
    pub labels: Vec<bool>,
}

impl FeatureMatrix {
    /// Assemble a matrix from raw parts. Dimensions must agree; used for
    /// synthetic experiment matrices and leakage checks.
    pub fn from_parts(
        student_ids: Vec<String>,
        registry: FeatureRegistry,
        values: Vec<f64>,
        labels: Vec<bool>,
    ) -> Result<FeatureMatrix> {
        if values.len() != student_ids.len() * registry.len() || labels.len() != student_ids.len()
        {
            return Err(Error::config("feature matrix dimension mismatch"));
        }
        Ok(FeatureMatrix {
            student_ids,
            registry,
            values,
            labels,
        })
    }

    /// Overwrite one row in place (dimension-checked). Exists so leakage
    /// tests can prove training never reads held-out rows.
    pub fn overwrite_row(&mut self, i: usize, row: Vec<f64>) -> Result<()> {
        if row.len() != self.n_cols() {
            return Err(Error::config("row width mismatch"));
        }
        let w = self.n_cols();
        self.values[i * w..(i + 1) * w].copy_from_slice(&row);
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.student_ids.len()
    }

    pub fn n_cols(&self) -> usize {
        self.registry.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let w = self.n_cols();
        &self.values[i * w..(i + 1) * w]
    }

    pub fn label(&self, i: usize) -> bool {
        self.labels[i]
    }

    pub fn row_of_student(&self, student_id: &str) -> Option<usize> {
        self.student_ids
            .binary_search_by(|id| id.as_str().cmp(student_id))
            .ok()
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_path(path)
            .map_err(|e| Error::Csv {
                path: path.display().to_string(),
                source: e,
            })?;
        let mut header = vec!["student_id".to_string(), "label".to_string()];
        header.extend(self.registry.names().map(String::from));
        w.write_record(&header).map_err(|e| Error::Csv {
            path: path.display().to_string(),
            source: e,
        })?;
        for i in 0..self.n_rows() {
            let mut rec = Vec::with_capacity(2 + self.n_cols());
            rec.push(self.student_ids[i].clone());
            rec.push(if self.labels[i] { "1" } else { "0" }.to_string());
            rec.extend(self.row(i).iter().map(|v| v.to_string()));
            w.write_record(&rec).map_err(|e| Error::Csv {
                path: path.display().to_string(),
                source: e,
            })?;
        }
        w.flush().map_err(|e| Error::io(path.display().to_string(), e))
    }
}

/// Read back a `features.csv` produced by [`FeatureMatrix::write_csv`],
/// rebuilding the registry against the given catalog description.
pub fn read_matrix_csv(path: &Path, registry: FeatureRegistry) -> Result<FeatureMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::Csv {
            path: path.display().to_string(),
            source: e,
        })?;
    {
        let headers = rdr.headers().map_err(|e| Error::Csv {
            path: path.display().to_string(),
            source: e,
        })?;
        let expected: Vec<&str> = ["student_id", "label"]
            .into_iter()
            .chain(registry.names())
            .collect();
        let actual: Vec<&str> = headers.iter().collect();
        if actual != expected {
            return Err(Error::integrity(format!(
                "{}: header does not match the feature registry",
                path.display()
            )));
        }
    }
    let mut student_ids = Vec::new();
    let mut labels = Vec::new();
    let mut values = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| Error::Csv {
            path: path.display().to_string(),
            source: e,
        })?;
        student_ids.push(rec[0].to_string());
        labels.push(&rec[1] == "1");
        for v in rec.iter().skip(2) {
            values.push(v.parse::<f64>().map_err(|_| {
                Error::integrity(format!("{}: non-numeric feature value {v:?}", path.display()))
            })?);
        }
    }
    Ok(FeatureMatrix {
        student_ids,
        registry,
        values,
        labels,
    })
}

struct ScopeCounts {
    perf: PerformanceBlock,
    present: bool,
    failed: usize,
    withdrawals: usize,
    passed: usize,
}

fn scope_counts(
    entries: &[&TranscriptEntry],
    stats: &BTreeMap<OfferingKey, OfferingStats>,
) -> ScopeCounts {
    ScopeCounts {
        perf: performance_block(entries, stats),
        present: !entries.is_empty(),
        failed: count_failed(entries),
        withdrawals: count_withdrawals(entries),
        passed: count_passed(entries),
    }
}

fn size_summary(
    entries: &[&TranscriptEntry],
    sizes: &BTreeMap<OfferingKey, usize>,
) -> (f64, f64, f64) {
    if entries.is_empty() {
        return (0.0, 0.0, 0.0);
    }
    let mut sum = 0.0;
    let mut min = f64::INFINITY;
    let mut max: f64 = 0.0;
    for entry in entries {
        let s = sizes[&offering_key(entry)] as f64;
        sum += s;
        min = min.min(s);
        max = max.max(s);
    }
    (sum / entries.len() as f64, min, max)
}

fn grade_distribution_summary(
    entries: &[&TranscriptEntry],
    stats: &BTreeMap<OfferingKey, OfferingStats>,
) -> (f64, f64, f64, f64) {
    let mut mean_sum = 0.0;
    let mut std_sum = 0.0;
    let mut max_sum = 0.0;
    let mut with_stats = 0usize;
    let mut diff_sum = 0.0;
    let mut numeric = 0usize;
    for entry in entries {
        if let Some(s) = stats.get(&offering_key(entry)) {
            mean_sum += s.mean_grade;
            std_sum += s.std_grade;
            max_sum += s.max_grade;
            with_stats += 1;
            if let Some(g) = entry.grade.points() {
                diff_sum += s.max_grade - g;
                numeric += 1;
            }
        }
    }
    let d = with_stats.max(1) as f64;
    (
        mean_sum / d,
        std_sum / d,
        max_sum / d,
        diff_sum / numeric.max(1) as f64,
    )
}

/// Distinct-student counts per course prefix over the given first-year
/// slices; prefixes with at least [`PREFIX_MIN_STUDENTS`] qualify.
pub fn eligible_prefixes(slices: &BTreeMap<String, Vec<FirstYearEntry<'_>>>) -> Vec<String> {
    let mut students_per_prefix: BTreeMap<String, BTreeSet<&str>> = BTreeMap::new();
    for (student, slice) in slices {
        for fe in slice {
            students_per_prefix
                .entry(fe.entry.course_prefix.to_ascii_uppercase())
                .or_default()
                .insert(student.as_str());
        }
    }
    students_per_prefix
        .into_iter()
        .filter(|(_, students)| students.len() >= PREFIX_MIN_STUDENTS)
        .map(|(prefix, _)| prefix)
        .collect()
}

/// Assemble the full feature matrix for the labelled cohort.
///
/// Offering statistics are computed over every transcript entry passed in
/// (cohort-level normalization); all other feature assembly is per student.
pub fn build_matrix(
    students: &[StudentRecord],
    transcripts: &[TranscriptEntry],
    majors: &MajorCatalog,
    zip_attrs: &[ZipAttributes],
    labels: &[CohortLabel],
    config: &FeatureConfig,
) -> Result<FeatureMatrix> {
    let by_id: BTreeMap<&str, &StudentRecord> = students
        .iter()
        .map(|s| (s.student_id.as_str(), s))
        .collect();
    let mut label_map: BTreeMap<&str, bool> = BTreeMap::new();
    for label in labels {
        if !by_id.contains_key(label.student_id.as_str()) {
            return Err(Error::integrity(format!(
                "label for unknown student {:?}",
                label.student_id
            )));
        }
        label_map.insert(label.student_id.as_str(), label.is_stem_graduate);
    }

    // cohort rows in sorted student order
    let cohort: Vec<&StudentRecord> = label_map.keys().map(|id| by_id[id]).collect();

    let imputed = impute_scores(&cohort.iter().map(|s| (*s).clone()).collect::<Vec<_>>())?;
    let imputed_by_id: BTreeMap<&str, &StudentRecord> = imputed
        .students
        .iter()
        .map(|s| (s.student_id.as_str(), s))
        .collect();

    let stats = offering_stats(transcripts);
    let sizes = offering_sizes(transcripts);
    let zip_table = ZipTable::new(zip_attrs, config.campus);

    // cohort means for the missing-ZIP and missing-GPA fallbacks
    let mut zip_mean = [0.0f64; 4];
    let mut zip_n = 0usize;
    for s in &cohort {
        if let Some(vals) = zip_table.features(s.application_zip.as_deref()) {
            for (acc, v) in zip_mean.iter_mut().zip(vals) {
                *acc += v;
            }
            zip_n += 1;
        }
    }
    if zip_n > 0 {
        for v in &mut zip_mean {
            *v /= zip_n as f64;
        }
    }
    let gpa_values: Vec<f64> = cohort.iter().filter_map(|s| s.hs_gpa).collect();
    let hs_gpa_mean = if gpa_values.is_empty() {
        0.0
    } else {
        gpa_values.iter().sum::<f64>() / gpa_values.len() as f64
    };

    let slices: BTreeMap<String, Vec<FirstYearEntry<'_>>> = cohort
        .iter()
        .map(|s| (s.student_id.clone(), first_year_slice(s, transcripts)))
        .collect();

    let prefixes = eligible_prefixes(&slices);
    let major_codes: Vec<String> = majors.codes().map(String::from).collect();
    let registry = FeatureRegistry::build(&major_codes, &prefixes)?;

    let mut values = Vec::with_capacity(cohort.len() * registry.len());
    let mut student_ids = Vec::with_capacity(cohort.len());
    let mut out_labels = Vec::with_capacity(cohort.len());

    for student in &cohort {
        let id = student.student_id.as_str();
        let slice = &slices[id];
        let row_start = values.len();

        push_demographic_block(
            &mut values,
            student,
            imputed_by_id[id],
            &imputed.flags[id],
            &zip_table,
            &zip_mean,
            zip_n > 0,
            hs_gpa_mean,
        );
        push_first_year_block(&mut values, slice, &stats, &sizes);
        push_major_dummies(&mut values, slice, &major_codes);
        push_course_group_block(&mut values, slice, &stats, &config.gatekeepers);
        push_prefix_block(&mut values, slice, &stats, &prefixes);

        let row = &values[row_start..];
        if row.len() != registry.len() {
            return Err(Error::config(format!(
                "assembled {} values for student {id} but the registry has {}",
                row.len(),
                registry.len()
            )));
        }
        if let Some(bad) = row.iter().position(|v| !v.is_finite()) {
            return Err(Error::numerical(format!(
                "non-finite feature {:?} for student {id}",
                registry.name(bad)
            )));
        }
        student_ids.push(student.student_id.clone());
        out_labels.push(label_map[id]);
    }

    Ok(FeatureMatrix {
        student_ids,
        registry,
        values,
        labels: out_labels,
    })
}

#[allow(clippy::too_many_arguments)]
fn push_demographic_block(
    out: &mut Vec<f64>,
    original: &StudentRecord,
    imputed: &StudentRecord,
    flags: &ImputedFlags,
    zip_table: &ZipTable,
    zip_mean: &[f64; 4],
    any_zip: bool,
    hs_gpa_mean: f64,
) {
    let flag = |b: bool| if b { 1.0 } else { 0.0 };
    out.push(imputed.sat_score.map(f64::from).unwrap_or(0.0));
    out.push(flag(flags.sat));
    out.push(imputed.act_score.map(f64::from).unwrap_or(0.0));
    out.push(flag(flags.act));
    out.push(original.hs_gpa.unwrap_or(hs_gpa_mean));
    out.push(flag(original.hs_gpa.is_none()));
    out.push(original.birth_year as f64);
    let entry_year = original.first_enrollment.year;
    let age = entry_year.saturating_sub(original.birth_year);
    out.push(age as f64);
    out.push(entry_year as f64);
    for season in Season::ALL {
        out.push(flag(original.first_enrollment.season == season));
    }
    match zip_table.features(original.application_zip.as_deref()) {
        Some(vals) => {
            out.extend(vals);
            out.push(0.0);
        }
        None => {
            // missing ZIP: cohort means plus the missing flag
            out.extend(if any_zip { *zip_mean } else { [0.0; 4] });
            out.push(1.0);
        }
    }
    for (list, value) in [
        (&categories::GENDER[..], original.gender.as_str()),
        (&categories::RACE[..], original.race.as_str()),
        (&categories::ETHNICITY[..], original.ethnicity.as_str()),
        (&categories::RESIDENCY[..], original.residency.as_str()),
        (&categories::PARENT_EDU[..], original.parent_education.as_str()),
    ] {
        let idx = categories::bucket_index(list, value);
        for i in 0..list.len() {
            out.push(flag(i == idx));
        }
    }
    let had_sat = original.sat_score.is_some();
    let had_act = original.act_score.is_some();
    out.push(flag(had_sat && had_act));
    out.push(flag(had_sat || had_act));
    out.push(flag(!categories::PARENT_EDU_DEGREE_LEVELS.contains(&original.parent_education.as_str())));
    out.push(flag(age < 18));
    out.push(flag(age > 19));
    out.push(flag(original.first_enrollment.season != Season::Autumn));
}

fn push_first_year_block(
    out: &mut Vec<f64>,
    slice: &[FirstYearEntry<'_>],
    stats: &BTreeMap<OfferingKey, OfferingStats>,
    sizes: &BTreeMap<OfferingKey, usize>,
) {
    let scope_entries = |scope: &str| -> Vec<&TranscriptEntry> {
        match scope {
            "year" => slice.iter().map(|fe| fe.entry).collect(),
            "lastq" => {
                let last = slice.iter().map(|fe| fe.relative_quarter).max();
                match last {
                    Some(q) => slice
                        .iter()
                        .filter(|fe| fe.relative_quarter == q)
                        .map(|fe| fe.entry)
                        .collect(),
                    None => Vec::new(),
                }
            }
            _ => {
                let q: u8 = scope[1..].parse().expect("scope q1..q4");
                slice
                    .iter()
                    .filter(|fe| fe.relative_quarter == q)
                    .map(|fe| fe.entry)
                    .collect()
            }
        }
    };

    let mut perf_by_scope: BTreeMap<&str, PerformanceBlock> = BTreeMap::new();
    for scope in FIRST_YEAR_SCOPES {
        let entries = scope_entries(scope);
        let counts = scope_counts(&entries, stats);
        out.extend(counts.perf.values());
        out.push(if counts.present { 1.0 } else { 0.0 });
        out.push(counts.failed as f64);
        out.push(counts.withdrawals as f64);
        out.push(counts.passed as f64);
        perf_by_scope.insert(scope, counts.perf);
    }
    for (to, from) in DELTA_PAIRS {
        out.extend(perf_by_scope[to].delta(&perf_by_scope[from]));
    }
    for scope in FIRST_YEAR_SCOPES {
        let entries = scope_entries(scope);
        let (mean, min, max) = size_summary(&entries, sizes);
        out.extend([mean, min, max]);
    }
    for scope in FIRST_YEAR_SCOPES {
        let entries = scope_entries(scope);
        let (mean_grade, grade_std, mean_max, max_diff) =
            grade_distribution_summary(&entries, stats);
        out.extend([mean_grade, grade_std, mean_max, max_diff]);
    }
}

fn push_major_dummies(out: &mut Vec<f64>, slice: &[FirstYearEntry<'_>], major_codes: &[String]) {
    let declared: BTreeSet<String> = slice
        .iter()
        .map(|fe| fe.entry.declared_major.to_ascii_uppercase())
        .collect();
    for code in major_codes {
        out.push(if declared.contains(code) { 1.0 } else { 0.0 });
    }
}

fn push_course_group_block(
    out: &mut Vec<f64>,
    slice: &[FirstYearEntry<'_>],
    stats: &BTreeMap<OfferingKey, OfferingStats>,
    gatekeepers: &GatekeeperSpec,
) {
    for group in COURSE_GROUPS {
        let entries: Vec<&TranscriptEntry> = slice
            .iter()
            .map(|fe| fe.entry)
            .filter(|e| match group {
                "remedial" => e.course_number < 100,
                "level100" => e.course_level() == 1,
                "level200" => e.course_level() == 2,
                "level300" => e.course_level() == 3,
                "level400" => e.course_level() == 4,
                "gk_all" => gatekeepers.series_of(&e.course_prefix, e.course_number).is_some(),
                series => gatekeepers.series_of(&e.course_prefix, e.course_number) == Some(series),
            })
            .collect();
        let perf = performance_block(&entries, stats);
        out.extend(perf.values());
        out.push(if entries.is_empty() { 0.0 } else { 1.0 });
    }
}

fn push_prefix_block(
    out: &mut Vec<f64>,
    slice: &[FirstYearEntry<'_>],
    stats: &BTreeMap<OfferingKey, OfferingStats>,
    prefixes: &[String],
) {
    for prefix in prefixes {
        let entries: Vec<&TranscriptEntry> = slice
            .iter()
            .map(|fe| fe.entry)
            .filter(|e| e.course_prefix.eq_ignore_ascii_case(prefix))
            .collect();
        out.extend(performance_block(&entries, stats).values());
    }
}
