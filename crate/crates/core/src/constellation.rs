//! Walker-style LEO constellation generator with circular two-body
//! propagation, a cylindrical Earth-shadow sun model and line-of-sight
//! visibility checks.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;
use crate::geo::{GeoPosition, EARTH_MU_KM3_S2, EARTH_RADIUS_KM};
use crate::model::GeoPoint;

/// Simulation time index; multiply by the clock step to get seconds.
pub type TimeIndex = u64;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimClock {
    pub step_s: f64,
}

impl Default for SimClock {
    fn default() -> Self {
        SimClock { step_s: 10.0 }
    }
}

impl SimClock {
    pub fn seconds(&self, t: TimeIndex) -> f64 {
        t as f64 * self.step_s
    }

    /// Smallest index whose time is at or after `seconds`.
    pub fn index_at_or_after(&self, seconds: f64) -> TimeIndex {
        (seconds / self.step_s - 1e-9).ceil().max(0.0) as TimeIndex
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstellationSpec {
    pub planes: u32,
    pub sats_per_plane: u32,
    pub altitude_km: f64,
    pub inclination_deg: f64,
    /// In-plane phase shift between adjacent planes.
    #[serde(default)]
    pub phasing_offset_deg: f64,
}

impl ConstellationSpec {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.planes < 1 {
            return Err(ConfigError::invalid("constellation.planes", "must be >= 1"));
        }
        if self.sats_per_plane < 1 {
            return Err(ConfigError::invalid("constellation.sats_per_plane", "must be >= 1"));
        }
        if !(self.altitude_km > 0.0) {
            return Err(ConfigError::invalid("constellation.altitude_km", "must be > 0"));
        }
        if !(0.0..=180.0).contains(&self.inclination_deg) {
            return Err(ConfigError::invalid(
                "constellation.inclination_deg",
                "must lie in [0, 180]",
            ));
        }
        if !self.phasing_offset_deg.is_finite() {
            return Err(ConfigError::invalid("constellation.phasing_offset_deg", "must be finite"));
        }
        Ok(())
    }

    pub fn satellite_count(&self) -> usize {
        self.planes as usize * self.sats_per_plane as usize
    }
}

/// Circular orbit described by radius, inclination, RAAN and the argument of
/// latitude at t = 0.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CircularOrbit {
    pub radius_km: f64,
    pub inclination_rad: f64,
    pub raan_rad: f64,
    pub arg_latitude_epoch_rad: f64,
}

impl CircularOrbit {
    pub fn period_s(&self) -> f64 {
        TAU * (self.radius_km.powi(3) / EARTH_MU_KM3_S2).sqrt()
    }

    pub fn mean_motion_rad_s(&self) -> f64 {
        (EARTH_MU_KM3_S2 / self.radius_km.powi(3)).sqrt()
    }

    pub fn position_at(&self, t_s: f64) -> GeoPosition {
        // Reduce the phase before the trig calls so positions one period
        // apart agree to rounding error.
        let phase = (self.mean_motion_rad_s() * t_s).rem_euclid(TAU);
        let u = self.arg_latitude_epoch_rad + phase;
        let (su, cu) = u.sin_cos();
        let (so, co) = self.raan_rad.sin_cos();
        let (si, ci) = self.inclination_rad.sin_cos();
        let r = self.radius_km;
        GeoPosition::new(
            r * (co * cu - so * su * ci),
            r * (so * cu + co * su * ci),
            r * su * si,
        )
    }

    /// Orbit whose ascending pass crosses over `subpoint` at time `t_s`.
    pub fn through_subpoint(
        altitude_km: f64,
        inclination_deg: f64,
        subpoint: &GeoPoint,
        t_s: f64,
    ) -> Result<CircularOrbit, ConfigError> {
        let inc = inclination_deg.to_radians();
        let lat = subpoint.lat_deg.to_radians();
        let s = lat.sin() / inc.sin();
        if !(-1.0..=1.0).contains(&s) || inc.sin() == 0.0 {
            return Err(ConfigError::invalid(
                "eo_source",
                format!(
                    "latitude {} unreachable with inclination {}",
                    subpoint.lat_deg, inclination_deg
                ),
            ));
        }
        let u = s.asin();
        let raan = subpoint.lon_deg.to_radians() - (inc.cos() * u.sin()).atan2(u.cos());
        let mut orbit = CircularOrbit {
            radius_km: EARTH_RADIUS_KM + altitude_km,
            inclination_rad: inc,
            raan_rad: raan,
            arg_latitude_epoch_rad: 0.0,
        };
        orbit.arg_latitude_epoch_rad = (u - orbit.mean_motion_rad_s() * t_s).rem_euclid(TAU);
        Ok(orbit)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Satellite {
    pub plane: u32,
    pub slot: u32,
    pub orbit: CircularOrbit,
}

/// Generates `planes x sats_per_plane` satellites, evenly spaced in RAAN
/// across planes and in phase within a plane. Output is plane-major.
pub fn build_constellation(spec: &ConstellationSpec) -> Result<Vec<Satellite>, ConfigError> {
    spec.validate()?;
    let radius_km = EARTH_RADIUS_KM + spec.altitude_km;
    let inclination_rad = spec.inclination_deg.to_radians();
    let mut sats = Vec::with_capacity(spec.satellite_count());
    for plane in 0..spec.planes {
        let raan_rad = TAU * plane as f64 / spec.planes as f64;
        for slot in 0..spec.sats_per_plane {
            let phase = TAU * slot as f64 / spec.sats_per_plane as f64
                + (plane as f64 * spec.phasing_offset_deg).to_radians();
            sats.push(Satellite {
                plane,
                slot,
                orbit: CircularOrbit {
                    radius_km,
                    inclination_rad,
                    raan_rad,
                    arg_latitude_epoch_rad: phase.rem_euclid(TAU),
                },
            });
        }
    }
    Ok(sats)
}

pub fn propagate(sat: &Satellite, t: TimeIndex, clock: &SimClock) -> GeoPosition {
    sat.orbit.position_at(clock.seconds(t))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SunState {
    pub sunlit: bool,
    pub fraction_of_orbit_in_sun: f64,
}

/// Sun direction rotating once per day in the equatorial plane, with a
/// cylindrical Earth shadow.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SunModel {
    /// Longitude of the sub-solar point at t = 0.
    #[serde(default)]
    pub initial_longitude_deg: f64,
    #[serde(default = "SunModel::default_day")]
    pub day_length_s: f64,
}

impl Default for SunModel {
    fn default() -> Self {
        SunModel {
            initial_longitude_deg: 0.0,
            day_length_s: Self::default_day(),
        }
    }
}

impl SunModel {
    fn default_day() -> f64 {
        86_400.0
    }

    pub fn direction(&self, t_s: f64) -> nalgebra::Vector3<f64> {
        let theta = self.initial_longitude_deg.to_radians() + TAU * t_s / self.day_length_s;
        nalgebra::Vector3::new(theta.cos(), theta.sin(), 0.0)
    }

    pub fn is_sunlit(&self, pos: &GeoPosition, t_s: f64) -> bool {
        let s = self.direction(t_s);
        let along = pos.0.dot(&s);
        if along >= 0.0 {
            return true;
        }
        (pos.0 - s * along).norm() > EARTH_RADIUS_KM
    }

    /// Current illumination plus the sunlit share of the orbit starting at
    /// `t_s`, sampled every `sample_step_s`.
    pub fn sun_state(&self, orbit: &CircularOrbit, t_s: f64, sample_step_s: f64) -> SunState {
        let period = orbit.period_s();
        let samples = (period / sample_step_s).ceil().max(1.0) as usize;
        let lit = (0..samples)
            .filter(|k| {
                let t = t_s + *k as f64 * sample_step_s;
                self.is_sunlit(&orbit.position_at(t), t)
            })
            .count();
        SunState {
            sunlit: self.is_sunlit(&orbit.position_at(t_s), t_s),
            fraction_of_orbit_in_sun: lit as f64 / samples as f64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VisibilityConfig {
    #[serde(default = "VisibilityConfig::default_mask")]
    pub min_elevation_deg: f64,
    /// Clearance above the surface required for satellite-to-satellite links.
    #[serde(default = "VisibilityConfig::default_margin")]
    pub grazing_margin_km: f64,
}

impl Default for VisibilityConfig {
    fn default() -> Self {
        VisibilityConfig {
            min_elevation_deg: Self::default_mask(),
            grazing_margin_km: Self::default_margin(),
        }
    }
}

impl VisibilityConfig {
    fn default_mask() -> f64 {
        25.0
    }
    fn default_margin() -> f64 {
        80.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Site {
    Ground(GeoPosition),
    Orbit(GeoPosition),
}

pub fn visible(a: Site, b: Site, cfg: &VisibilityConfig) -> bool {
    match (a, b) {
        (Site::Ground(g), Site::Orbit(s)) | (Site::Orbit(s), Site::Ground(g)) => {
            g.elevation_deg(&s) >= cfg.min_elevation_deg
        }
        (Site::Orbit(p), Site::Orbit(q)) => p.line_of_sight(&q, cfg.grazing_margin_km),
        (Site::Ground(_), Site::Ground(_)) => false,
    }
}
