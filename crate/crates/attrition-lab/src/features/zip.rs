//! ZIP-code census attributes and the great-circle distance to campus.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZipAttributes {
    pub zip: String,
    pub avg_income: f64,
    pub pct_hs_grads: f64,
    pub pct_college_grads: f64,
    pub latitude: f64,
    pub longitude: f64,
}

pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// Great-circle distance in kilometers via the haversine formula.
pub fn haversine_km(lat1: f64, lon1: f64, lat2: f64, lon2: f64) -> f64 {
    let phi1 = lat1.to_radians();
    let phi2 = lat2.to_radians();
    let dphi = (lat2 - lat1).to_radians();
    let dlambda = (lon2 - lon1).to_radians();
    let h = (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlambda / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * h.sqrt().atan2((1.0 - h).sqrt())
}

/// The four ZIP-derived feature values: average income, percent high-school
/// graduates, percent college graduates, and distance to campus in km.
pub type ZipFeatureValues = [f64; 4];

#[derive(Debug, Clone)]
pub struct ZipTable {
    by_zip: BTreeMap<String, ZipAttributes>,
    campus: (f64, f64),
}

impl ZipTable {
    pub fn new(attrs: &[ZipAttributes], campus: (f64, f64)) -> ZipTable {
        ZipTable {
            by_zip: attrs.iter().map(|z| (z.zip.clone(), z.clone())).collect(),
            campus,
        }
    }

    /// Feature values for one application ZIP. Malformed or unknown ZIPs are
    /// treated as missing.
    pub fn features(&self, zip: Option<&str>) -> Option<ZipFeatureValues> {
        let zip = zip?.trim();
        if zip.len() != 5 || !zip.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        let attrs = self.by_zip.get(zip)?;
        Some([
            attrs.avg_income,
            attrs.pct_hs_grads,
            attrs.pct_college_grads,
            haversine_km(attrs.latitude, attrs.longitude, self.campus.0, self.campus.1),
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_distance_at_campus() {
        assert_eq!(haversine_km(47.65, -122.31, 47.65, -122.31), 0.0);
    }

    #[test]
    fn quarter_great_circle() {
        // (0, 0) to (0, 90): a quarter of the equator, pi * R / 2
        let d = haversine_km(0.0, 0.0, 0.0, 90.0);
        let expected = std::f64::consts::PI * EARTH_RADIUS_KM / 2.0;
        assert!((d - expected).abs() < 1e-9, "{d} vs {expected}");
        assert!((d - 10_007.5).abs() < 0.1);
    }

    #[test]
    fn malformed_zips_are_missing() {
        let table = ZipTable::new(
            &[ZipAttributes {
                zip: "98001".into(),
                avg_income: 52_000.0,
                pct_hs_grads: 90.0,
                pct_college_grads: 40.0,
                latitude: 47.65,
                longitude: -122.31,
            }],
            (47.65, -122.31),
        );
        assert!(table.features(Some("98001")).is_some());
        assert_eq!(table.features(Some("98001")).unwrap()[3], 0.0);
        assert!(table.features(Some("9800")).is_none());
        assert!(table.features(Some("98o01")).is_none());
        assert!(table.features(Some("99999")).is_none());
        assert!(table.features(None).is_none());
    }
}
