//! Positions on and around a spherical Earth.
//!
//! All positions live in one Earth-centred Cartesian frame measured in km.
//! Earth rotation is not modelled, so ground nodes keep fixed coordinates and
//! satellite tracks are exactly periodic.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::model::GeoPoint;

pub const EARTH_RADIUS_KM: f64 = 6371.0;
/// Standard gravitational parameter of Earth, km^3/s^2.
pub const EARTH_MU_KM3_S2: f64 = 398_600.441_8;
pub const SPEED_OF_LIGHT_KM_S: f64 = 299_792.458;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeoPosition(pub Vector3<f64>);

impl GeoPosition {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        GeoPosition(Vector3::new(x, y, z))
    }

    pub fn from_geodetic(p: &GeoPoint) -> Self {
        let lat = p.lat_deg.to_radians();
        let lon = p.lon_deg.to_radians();
        let r = EARTH_RADIUS_KM + p.alt_km;
        GeoPosition::new(r * lat.cos() * lon.cos(), r * lat.cos() * lon.sin(), r * lat.sin())
    }

    pub fn x(&self) -> f64 {
        self.0.x
    }
    pub fn y(&self) -> f64 {
        self.0.y
    }
    pub fn z(&self) -> f64 {
        self.0.z
    }

    pub fn radius_km(&self) -> f64 {
        self.0.norm()
    }

    pub fn lat_deg(&self) -> f64 {
        let r = self.radius_km();
        if r == 0.0 {
            return 0.0;
        }
        (self.0.z / r).clamp(-1.0, 1.0).asin().to_degrees()
    }

    pub fn lon_deg(&self) -> f64 {
        self.0.y.atan2(self.0.x).to_degrees()
    }

    pub fn alt_km(&self) -> f64 {
        self.radius_km() - EARTH_RADIUS_KM
    }

    pub fn to_geodetic(&self) -> GeoPoint {
        GeoPoint::new(self.lat_deg(), self.lon_deg(), self.alt_km())
    }

    pub fn distance_km(&self, other: &GeoPosition) -> f64 {
        (self.0 - other.0).norm()
    }

    /// Great-circle distance between the sub-points of two positions,
    /// measured on the Earth's surface.
    pub fn surface_distance_km(&self, other: &GeoPosition) -> f64 {
        let (a, b) = (self.0.norm(), other.0.norm());
        if a == 0.0 || b == 0.0 {
            return 0.0;
        }
        let cos = (self.0.dot(&other.0) / (a * b)).clamp(-1.0, 1.0);
        EARTH_RADIUS_KM * cos.acos()
    }

    /// Elevation of `target` above the local horizon of `self`, in degrees.
    pub fn elevation_deg(&self, target: &GeoPosition) -> f64 {
        let d = target.0 - self.0;
        let n = d.norm();
        if n == 0.0 {
            return 90.0;
        }
        let up = self.0.normalize();
        (d.dot(&up) / n).clamp(-1.0, 1.0).asin().to_degrees()
    }

    /// True when the straight segment to `other` stays at least `margin_km`
    /// above the Earth's surface.
    pub fn line_of_sight(&self, other: &GeoPosition, margin_km: f64) -> bool {
        let d = other.0 - self.0;
        let len2 = d.norm_squared();
        let t = if len2 == 0.0 {
            0.0
        } else {
            (-self.0.dot(&d) / len2).clamp(0.0, 1.0)
        };
        let closest = self.0 + d * t;
        closest.norm() >= EARTH_RADIUS_KM + margin_km
    }

    /// One-way propagation delay of a straight link in milliseconds.
    pub fn light_delay_ms(&self, other: &GeoPosition) -> f64 {
        self.distance_km(other) / SPEED_OF_LIGHT_KM_S * 1000.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geodetic_round_trip() {
        let p = GeoPoint::new(37.0, -120.0, 0.5);
        let g = GeoPosition::from_geodetic(&p).to_geodetic();
        assert!((g.lat_deg - 37.0).abs() < 1e-9);
        assert!((g.lon_deg + 120.0).abs() < 1e-9);
        assert!((g.alt_km - 0.5).abs() < 1e-9);
    }

    #[test]
    fn zenith_elevation() {
        let ground = GeoPosition::from_geodetic(&GeoPoint::new(10.0, 20.0, 0.0));
        let sat = GeoPosition::from_geodetic(&GeoPoint::new(10.0, 20.0, 550.0));
        assert!((ground.elevation_deg(&sat) - 90.0).abs() < 1e-9);
    }

    #[test]
    fn antipodal_segment_blocked() {
        let a = GeoPosition::new(EARTH_RADIUS_KM + 550.0, 0.0, 0.0);
        let b = GeoPosition::new(-(EARTH_RADIUS_KM + 550.0), 0.0, 0.0);
        assert!(!a.line_of_sight(&b, 0.0));
        let c = GeoPosition::new(0.0, EARTH_RADIUS_KM + 550.0, 0.0);
        assert!(!a.line_of_sight(&c, 0.0));
        let near = GeoPosition::from_geodetic(&GeoPoint::new(0.0, 5.0, 550.0));
        assert!(a.line_of_sight(&near, 80.0));
    }

    #[test]
    fn thousand_km_light_delay() {
        let a = GeoPosition::new(0.0, 0.0, 0.0);
        let b = GeoPosition::new(1000.0, 0.0, 0.0);
        // 1000 km / 299792.458 km/s
        assert!((a.light_delay_ms(&b) - 3.335_640_951_981_52).abs() < 1e-9);
    }
}
