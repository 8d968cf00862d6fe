//! CSV readers and writers for the registrar-shaped file interfaces.
//!
//! All files are UTF-8 with a header row. Empty strings mean "missing" for
//! optional fields. Schemas:
//!
//! - `students.csv`: student_id, gender, race, ethnicity, residency,
//!   birth_year, first_enroll_year, first_enroll_season, sat, act, hs_gpa,
//!   parent_edu, zip
//! - `transcripts.csv`: student_id, prefix, number, year, season, credits,
//!   grade_kind, grade_value, declared_major
//! - `majors.csv`: major_code, name, track_name, is_stem_track, is_premajor,
//!   premajor_family (one row per track; premajors carry an empty track_name)
//! - `degrees.csv`: student_id, major_code, year, season
//! - `zip_attrs.csv`: zip, avg_income, pct_hs, pct_college, lat, lon
//! - `ground_truth.csv`: student_id, quarter_rel, intent

use std::collections::BTreeMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::features::ZipAttributes;
use crate::registrar::{
    DegreeAward, GradeKind, GradeValue, MajorCatalog, MajorInfo, PremajorFamily, Quarter, Season,
    StudentRecord, TranscriptEntry,
};

fn reader(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::Csv {
            path: path.display().to_string(),
            source: e,
        })
}

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(|e| Error::Csv {
            path: path.display().to_string(),
            source: e,
        })
}

fn csv_err(path: &Path, e: csv::Error) -> Error {
    Error::Csv {
        path: path.display().to_string(),
        source: e,
    }
}

fn field<'a>(rec: &'a csv::StringRecord, idx: usize, name: &str, path: &Path) -> Result<&'a str> {
    rec.get(idx).ok_or_else(|| {
        Error::integrity(format!(
            "{}: missing column {name:?} in row {:?}",
            path.display(),
            rec.position().map(|p| p.line()).unwrap_or(0)
        ))
    })
}

fn parse_num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim()
        .parse::<T>()
        .map_err(|_| Error::integrity(format!("cannot parse {what} from {s:?}")))
}

fn opt_num<T: std::str::FromStr>(s: &str, what: &str) -> Result<Option<T>> {
    let t = s.trim();
    if t.is_empty() {
        Ok(None)
    } else {
        parse_num::<T>(t, what).map(Some)
    }
}

pub fn read_students(path: &Path) -> Result<Vec<StudentRecord>> {
    let mut rdr = reader(path)?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let year: u32 = parse_num(field(&rec, 6, "first_enroll_year", path)?, "year")?;
        let season = Season::parse(field(&rec, 7, "first_enroll_season", path)?)?;
        let zip = field(&rec, 12, "zip", path)?.trim();
        out.push(StudentRecord {
            student_id: field(&rec, 0, "student_id", path)?.to_string(),
            gender: field(&rec, 1, "gender", path)?.to_string(),
            race: field(&rec, 2, "race", path)?.to_string(),
            ethnicity: field(&rec, 3, "ethnicity", path)?.to_string(),
            residency: field(&rec, 4, "residency", path)?.to_string(),
            birth_year: parse_num(field(&rec, 5, "birth_year", path)?, "birth_year")?,
            first_enrollment: Quarter::new(year, season),
            sat_score: opt_num(field(&rec, 8, "sat", path)?, "sat")?,
            act_score: opt_num(field(&rec, 9, "act", path)?, "act")?,
            hs_gpa: opt_num(field(&rec, 10, "hs_gpa", path)?, "hs_gpa")?,
            parent_education: field(&rec, 11, "parent_edu", path)?.to_string(),
            application_zip: if zip.is_empty() {
                None
            } else {
                Some(zip.to_string())
            },
        });
    }
    Ok(out)
}

pub fn write_students(path: &Path, students: &[StudentRecord]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record([
        "student_id",
        "gender",
        "race",
        "ethnicity",
        "residency",
        "birth_year",
        "first_enroll_year",
        "first_enroll_season",
        "sat",
        "act",
        "hs_gpa",
        "parent_edu",
        "zip",
    ])
    .map_err(|e| csv_err(path, e))?;
    for s in students {
        w.write_record([
            s.student_id.as_str(),
            s.gender.as_str(),
            s.race.as_str(),
            s.ethnicity.as_str(),
            s.residency.as_str(),
            &s.birth_year.to_string(),
            &s.first_enrollment.year.to_string(),
            s.first_enrollment.season.name(),
            &s.sat_score.map(|v| v.to_string()).unwrap_or_default(),
            &s.act_score.map(|v| v.to_string()).unwrap_or_default(),
            &s.hs_gpa.map(|v| format!("{v:.2}")).unwrap_or_default(),
            s.parent_education.as_str(),
            s.application_zip.as_deref().unwrap_or(""),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path.display().to_string(), e))
}

pub fn read_transcripts(path: &Path) -> Result<Vec<TranscriptEntry>> {
    let mut rdr = reader(path)?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let year: u32 = parse_num(field(&rec, 3, "year", path)?, "year")?;
        let season = Season::parse(field(&rec, 4, "season", path)?)?;
        let kind = GradeKind::parse(field(&rec, 6, "grade_kind", path)?)?;
        let value: Option<f64> = opt_num(field(&rec, 7, "grade_value", path)?, "grade_value")?;
        let grade = match (kind, value) {
            (GradeKind::Numeric, Some(v)) => GradeValue::numeric(v)?,
            (GradeKind::Numeric, None) => {
                return Err(Error::integrity(format!(
                    "{}: numeric grade without a value",
                    path.display()
                )))
            }
            (k, _) => GradeValue::non_numeric(k)?,
        };
        out.push(TranscriptEntry {
            student_id: field(&rec, 0, "student_id", path)?.to_string(),
            course_prefix: field(&rec, 1, "prefix", path)?.to_string(),
            course_number: parse_num(field(&rec, 2, "number", path)?, "number")?,
            quarter: Quarter::new(year, season),
            credits: parse_num(field(&rec, 5, "credits", path)?, "credits")?,
            grade,
            declared_major: field(&rec, 8, "declared_major", path)?.to_string(),
        });
    }
    Ok(out)
}

pub fn write_transcripts(path: &Path, transcripts: &[TranscriptEntry]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record([
        "student_id",
        "prefix",
        "number",
        "year",
        "season",
        "credits",
        "grade_kind",
        "grade_value",
        "declared_major",
    ])
    .map_err(|e| csv_err(path, e))?;
    for t in transcripts {
        w.write_record([
            t.student_id.as_str(),
            t.course_prefix.as_str(),
            &t.course_number.to_string(),
            &t.quarter.year.to_string(),
            t.quarter.season.name(),
            &format!("{:.1}", t.credits),
            t.grade.kind.name(),
            &t.grade.points().map(|v| format!("{v:.1}")).unwrap_or_default(),
            t.declared_major.as_str(),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path.display().to_string(), e))
}

pub fn read_majors(path: &Path) -> Result<MajorCatalog> {
    let mut rdr = reader(path)?;
    // code -> (name, tracks, is_premajor, family)
    let mut partial: BTreeMap<String, MajorInfo> = BTreeMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let code = field(&rec, 0, "major_code", path)?.to_ascii_uppercase();
        let name = field(&rec, 1, "name", path)?.to_string();
        let track_name = field(&rec, 2, "track_name", path)?.trim().to_string();
        let is_stem_track: bool = parse_num(field(&rec, 3, "is_stem_track", path)?, "bool")?;
        let is_premajor: bool = parse_num(field(&rec, 4, "is_premajor", path)?, "bool")?;
        let family = field(&rec, 5, "premajor_family", path)?.trim().to_string();
        let info = partial.entry(code.clone()).or_insert_with(|| MajorInfo {
            major_code: code,
            display_name: name,
            tracks: Vec::new(),
            is_premajor,
            premajor_family: None,
        });
        if !track_name.is_empty() {
            info.tracks.push((track_name, is_stem_track));
        }
        if !family.is_empty() {
            info.premajor_family = Some(PremajorFamily::parse(&family)?);
        }
    }
    Ok(MajorCatalog::new(partial.into_values().collect()))
}

pub fn write_majors(path: &Path, catalog: &MajorCatalog) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record([
        "major_code",
        "name",
        "track_name",
        "is_stem_track",
        "is_premajor",
        "premajor_family",
    ])
    .map_err(|e| csv_err(path, e))?;
    for m in catalog.iter() {
        let family = m.premajor_family.map(|f| f.name()).unwrap_or("");
        if m.tracks.is_empty() {
            w.write_record([
                m.major_code.as_str(),
                m.display_name.as_str(),
                "",
                "false",
                if m.is_premajor { "true" } else { "false" },
                family,
            ])
            .map_err(|e| csv_err(path, e))?;
        } else {
            for (track, stem) in &m.tracks {
                w.write_record([
                    m.major_code.as_str(),
                    m.display_name.as_str(),
                    track.as_str(),
                    if *stem { "true" } else { "false" },
                    if m.is_premajor { "true" } else { "false" },
                    family,
                ])
                .map_err(|e| csv_err(path, e))?;
            }
        }
    }
    w.flush().map_err(|e| Error::io(path.display().to_string(), e))
}

pub fn read_degrees(path: &Path) -> Result<Vec<DegreeAward>> {
    let mut rdr = reader(path)?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        let year: u32 = parse_num(field(&rec, 2, "year", path)?, "year")?;
        let season = Season::parse(field(&rec, 3, "season", path)?)?;
        out.push(DegreeAward {
            student_id: field(&rec, 0, "student_id", path)?.to_string(),
            major_code: field(&rec, 1, "major_code", path)?.to_string(),
            quarter_awarded: Quarter::new(year, season),
        });
    }
    Ok(out)
}

pub fn write_degrees(path: &Path, degrees: &[DegreeAward]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["student_id", "major_code", "year", "season"])
        .map_err(|e| csv_err(path, e))?;
    for d in degrees {
        w.write_record([
            d.student_id.as_str(),
            d.major_code.as_str(),
            &d.quarter_awarded.year.to_string(),
            d.quarter_awarded.season.name(),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path.display().to_string(), e))
}

pub fn read_zip_attrs(path: &Path) -> Result<Vec<ZipAttributes>> {
    let mut rdr = reader(path)?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        out.push(ZipAttributes {
            zip: field(&rec, 0, "zip", path)?.to_string(),
            avg_income: parse_num(field(&rec, 1, "avg_income", path)?, "avg_income")?,
            pct_hs_grads: parse_num(field(&rec, 2, "pct_hs", path)?, "pct_hs")?,
            pct_college_grads: parse_num(field(&rec, 3, "pct_college", path)?, "pct_college")?,
            latitude: parse_num(field(&rec, 4, "lat", path)?, "lat")?,
            longitude: parse_num(field(&rec, 5, "lon", path)?, "lon")?,
        });
    }
    Ok(out)
}

pub fn write_zip_attrs(path: &Path, attrs: &[ZipAttributes]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["zip", "avg_income", "pct_hs", "pct_college", "lat", "lon"])
        .map_err(|e| csv_err(path, e))?;
    for z in attrs {
        w.write_record([
            z.zip.as_str(),
            &format!("{:.2}", z.avg_income),
            &format!("{:.2}", z.pct_hs_grads),
            &format!("{:.2}", z.pct_college_grads),
            &format!("{:.6}", z.latitude),
            &format!("{:.6}", z.longitude),
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path.display().to_string(), e))
}

/// One planted-intent row of `ground_truth.csv`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTruthRow {
    pub student_id: String,
    /// Relative calendar quarter, 1-based from first enrollment.
    pub quarter_rel: u32,
    pub intent_stem: bool,
}

pub fn read_ground_truth(path: &Path) -> Result<Vec<GroundTruthRow>> {
    let mut rdr = reader(path)?;
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| csv_err(path, e))?;
        out.push(GroundTruthRow {
            student_id: field(&rec, 0, "student_id", path)?.to_string(),
            quarter_rel: parse_num(field(&rec, 1, "quarter_rel", path)?, "quarter_rel")?,
            intent_stem: field(&rec, 2, "intent", path)?.trim() == "stem",
        });
    }
    Ok(out)
}

pub fn write_ground_truth(path: &Path, rows: &[GroundTruthRow]) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["student_id", "quarter_rel", "intent"])
        .map_err(|e| csv_err(path, e))?;
    for r in rows {
        w.write_record([
            r.student_id.as_str(),
            &r.quarter_rel.to_string(),
            if r.intent_stem { "stem" } else { "non_stem" },
        ])
        .map_err(|e| csv_err(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path.display().to_string(), e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registrar::GradeKind;

    #[test]
    fn round_trip_students_and_transcripts() {
        let dir = tempfile::tempdir().unwrap();
        let students = vec![StudentRecord {
            student_id: "s1".into(),
            gender: "male".into(),
            race: "caucasian".into(),
            ethnicity: "not_hispanic".into(),
            residency: "state_resident".into(),
            birth_year: 1986,
            first_enrollment: Quarter::new(2004, Season::Autumn),
            sat_score: None,
            act_score: Some(28),
            hs_gpa: Some(3.75),
            parent_education: "masters_degree".into(),
            application_zip: None,
        }];
        let p = dir.path().join("students.csv");
        write_students(&p, &students).unwrap();
        let back = read_students(&p).unwrap();
        assert_eq!(back.len(), 1);
        assert_eq!(back[0].student_id, "s1");
        assert_eq!(back[0].sat_score, None);
        assert_eq!(back[0].act_score, Some(28));
        assert_eq!(back[0].application_zip, None);
        assert_eq!(back[0].first_enrollment, Quarter::new(2004, Season::Autumn));

        let transcripts = vec![TranscriptEntry {
            student_id: "s1".into(),
            course_prefix: "MATH".into(),
            course_number: 124,
            quarter: Quarter::new(2004, Season::Autumn),
            credits: 5.0,
            grade: GradeValue::non_numeric(GradeKind::Withdrawal).unwrap(),
            declared_major: "PRE-ENG".into(),
        }];
        let p = dir.path().join("transcripts.csv");
        write_transcripts(&p, &transcripts).unwrap();
        let back = read_transcripts(&p).unwrap();
        assert_eq!(back[0].grade.kind, GradeKind::Withdrawal);
        assert_eq!(back[0].grade.points(), None);
    }

    #[test]
    fn majors_round_trip_preserves_tracks_and_families() {
        let dir = tempfile::tempdir().unwrap();
        let catalog = MajorCatalog::new(vec![
            MajorInfo {
                major_code: "MATH".into(),
                display_name: "Mathematics".into(),
                tracks: vec![
                    ("comprehensive".into(), true),
                    ("applied".into(), true),
                    ("standard".into(), true),
                    ("teaching".into(), false),
                ],
                is_premajor: false,
                premajor_family: None,
            },
            MajorInfo {
                major_code: "PRE-ENG".into(),
                display_name: "Pre-Engineering".into(),
                tracks: vec![],
                is_premajor: true,
                premajor_family: Some(PremajorFamily::PreEngineering),
            },
        ]);
        let p = dir.path().join("majors.csv");
        write_majors(&p, &catalog).unwrap();
        let back = read_majors(&p).unwrap();
        assert_eq!(back.len(), 2);
        assert_eq!(back.get("math").unwrap().tracks.len(), 4);
        assert!(back.get("PRE-ENG").unwrap().is_premajor);
        assert_eq!(
            back.get("PRE-ENG").unwrap().premajor_family,
            Some(PremajorFamily::PreEngineering)
        );
    }
}
