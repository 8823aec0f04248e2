//! Satellite temperature model and the temperature scoring plugin.
//!
//! The environmental temperature follows a first-order lag of the sunlit
//! boolean, mapped onto the enclosure's internal range. Computation adds a
//! linear heat term capped at a saturation ceiling.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constellation::{CircularOrbit, SunModel};
use crate::model::{NodeKind, WorkflowTask};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThermalError {
    #[error("temp_rec ({rec}) must be below temp_max ({max})")]
    InvalidLimits { rec: f64, max: f64 },
    #[error("duration must be positive, got {0}")]
    NonPositiveDuration(f64),
    #[error("resource request must be non-negative")]
    NegativeRequest,
}

/// Per-node thermal limits and heat rates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalSpec {
    pub temp_max_c: f64,
    pub temp_rec_c: f64,
    /// Degrees per core-second of CPU load.
    pub cpu_heat_rate: f64,
    /// Degrees per core-second of GPU load.
    pub gpu_heat_rate: f64,
    /// Decay of accumulated execution heat, degrees per second.
    pub passive_cooling_rate: f64,
    /// Saturation ceiling for the computational increase.
    pub heat_ceiling_c: f64,
}

impl Default for ThermalSpec {
    fn default() -> Self {
        ThermalSpec {
            temp_max_c: 75.0,
            temp_rec_c: 55.0,
            cpu_heat_rate: 0.002,
            gpu_heat_rate: 0.005,
            passive_cooling_rate: 0.01,
            heat_ceiling_c: 30.0,
        }
    }
}

impl ThermalSpec {
    pub fn validate(&self) -> Result<(), ThermalError> {
        if !(self.temp_rec_c < self.temp_max_c) {
            return Err(ThermalError::InvalidLimits {
                rec: self.temp_rec_c,
                max: self.temp_max_c,
            });
        }
        if !(self.cpu_heat_rate >= 0.0
            && self.gpu_heat_rate >= 0.0
            && self.passive_cooling_rate >= 0.0
            && self.heat_ceiling_c >= 0.0)
        {
            return Err(ThermalError::NegativeRequest);
        }
        Ok(())
    }
}

/// Dynamic thermal state, updated on clock ticks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThermalState {
    pub current_temp_c: f64,
    /// Sum of execution heat from placed tasks, decaying passively.
    pub accumulated_exec_heat_c: f64,
    pub updated_at_s: f64,
}

/// Orbit environment shared by all satellites.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermalEnvironment {
    #[serde(default)]
    pub sun: SunModel,
    #[serde(default = "defaults::external_shade")]
    pub external_shade_c: f64,
    #[serde(default = "defaults::external_sun")]
    pub external_sun_c: f64,
    #[serde(default = "defaults::internal_shade")]
    pub internal_shade_c: f64,
    #[serde(default = "defaults::internal_sun")]
    pub internal_sun_c: f64,
    #[serde(default = "defaults::lag")]
    pub lag_time_constant_s: f64,
    /// Sampling step of orbit sweeps.
    #[serde(default = "defaults::step")]
    pub sweep_step_s: f64,
    /// History integrated before `t_now` to settle the lag filter.
    #[serde(default = "defaults::warmup")]
    pub warmup_s: f64,
}

mod defaults {
    pub fn external_shade() -> f64 {
        -120.0
    }
    pub fn external_sun() -> f64 {
        120.0
    }
    pub fn internal_shade() -> f64 {
        -20.0
    }
    pub fn internal_sun() -> f64 {
        60.0
    }
    pub fn lag() -> f64 {
        600.0
    }
    pub fn step() -> f64 {
        10.0
    }
    pub fn warmup() -> f64 {
        3000.0
    }
}

impl Default for ThermalEnvironment {
    fn default() -> Self {
        ThermalEnvironment {
            sun: SunModel::default(),
            external_shade_c: defaults::external_shade(),
            external_sun_c: defaults::external_sun(),
            internal_shade_c: defaults::internal_shade(),
            internal_sun_c: defaults::internal_sun(),
            lag_time_constant_s: defaults::lag(),
            sweep_step_s: defaults::step(),
            warmup_s: defaults::warmup(),
        }
    }
}

/// Whether a body is in sunlight at a given time.
pub trait Illumination {
    fn sunlit(&self, t_s: f64) -> bool;
}

impl<F: Fn(f64) -> bool> Illumination for F {
    fn sunlit(&self, t_s: f64) -> bool {
        self(t_s)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct OrbitIllumination<'a> {
    pub orbit: &'a CircularOrbit,
    pub sun: &'a SunModel,
}

impl Illumination for OrbitIllumination<'_> {
    fn sunlit(&self, t_s: f64) -> bool {
        self.sun.is_sunlit(&self.orbit.position_at(t_s), t_s)
    }
}

impl ThermalEnvironment {
    /// Internal temperature for a smoothed sun exposure in `[0, 1]`.
    pub fn enclosure_temp(&self, exposure: f64) -> f64 {
        self.internal_shade_c + (self.internal_sun_c - self.internal_shade_c) * exposure
    }

    /// Maps an external temperature onto the enclosure's internal range.
    pub fn attenuate(&self, external_c: f64) -> f64 {
        let span = self.external_sun_c - self.external_shade_c;
        self.enclosure_temp((external_c - self.external_shade_c) / span)
    }

    fn smoothing(&self) -> f64 {
        if self.lag_time_constant_s <= 0.0 {
            1.0
        } else {
            1.0 - (-self.sweep_step_s / self.lag_time_constant_s).exp()
        }
    }

    /// Lag-filtered sun exposure at `t_s`, settled over the warm-up window.
    pub fn exposure_at(&self, illum: &dyn Illumination, t_s: f64) -> f64 {
        let n = (self.warmup_s / self.sweep_step_s).ceil() as u64;
        let start = t_s - n as f64 * self.sweep_step_s;
        let alpha = self.smoothing();
        let mut s = if illum.sunlit(start) { 1.0 } else { 0.0 };
        for k in 0..n {
            let t = start + k as f64 * self.sweep_step_s;
            let target = if illum.sunlit(t) { 1.0 } else { 0.0 };
            s += alpha * (target - s);
        }
        s
    }

    pub fn environment_temp(&self, illum: &dyn Illumination, t_s: f64) -> f64 {
        self.enclosure_temp(self.exposure_at(illum, t_s))
    }

    /// Highest environmental temperature over `[t_now, t_now + d_t]`.
    pub fn estimate_max_orbit_temp(&self, illum: &dyn Illumination, t_now_s: f64, d_t: f64) -> f64 {
        let alpha = self.smoothing();
        let mut s = self.exposure_at(illum, t_now_s);
        let mut max_s = s;
        let steps = (d_t / self.sweep_step_s).ceil().max(0.0) as u64;
        for k in 0..steps {
            let t = t_now_s + k as f64 * self.sweep_step_s;
            let target = if illum.sunlit(t) { 1.0 } else { 0.0 };
            s += alpha * (target - s);
            max_s = max_s.max(s);
        }
        self.enclosure_temp(max_s)
    }
}

/// Temperature increase caused by running `cpu_cores` and `gpu_cores` for `d_t` seconds.
pub fn estimate_comp_temp_increase(
    spec: &ThermalSpec,
    d_t: f64,
    cpu_cores: f64,
    gpu_cores: f64,
) -> Result<f64, ThermalError> {
    if !(d_t > 0.0) {
        return Err(ThermalError::NonPositiveDuration(d_t));
    }
    if cpu_cores < 0.0 || gpu_cores < 0.0 {
        return Err(ThermalError::NegativeRequest);
    }
    let cpu = spec.cpu_heat_rate * cpu_cores * d_t;
    let gpu = spec.gpu_heat_rate * gpu_cores * d_t;
    Ok((cpu + gpu).min(spec.heat_ceiling_c))
}

/// 100 at or below the recommended temperature, 0 above the maximum, and a
/// floored linear interpolation in between.
pub fn calc_score(temp_exp: f64, temp_rec: f64, temp_max: f64) -> Result<u32, ThermalError> {
    if !(temp_rec < temp_max) {
        return Err(ThermalError::InvalidLimits {
            rec: temp_rec,
            max: temp_max,
        });
    }
    if temp_exp <= temp_rec {
        return Ok(100);
    }
    if temp_exp > temp_max {
        return Ok(0);
    }
    let range = temp_max - temp_rec;
    let over_rec = temp_exp - temp_rec;
    // The epsilon absorbs representation error such as 0.29 * 100 = 28.999...
    let raw = ((1.0 - over_rec / range) * 100.0 + 1e-9).floor();
    Ok(raw.clamp(0.0, 100.0) as u32)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TemperatureEstimate {
    /// Highest temperature expected while the task runs; `None` for
    /// terrestrial nodes.
    pub predicted_c: Option<f64>,
    pub score: u32,
}

/// What the temperature plugin needs to know about a node.
#[derive(Clone, Copy, Debug)]
pub struct ThermalView<'a> {
    pub kind: NodeKind,
    pub spec: Option<&'a ThermalSpec>,
    pub state: Option<&'a ThermalState>,
    pub orbit: Option<&'a CircularOrbit>,
}

/// Temperature score of placing `task` on a node at `t_now_s`.
///
/// Terrestrial nodes always score 100. Satellites without a duration
/// estimate are scored on their current temperature; otherwise on the peak
/// orbit temperature over the task's duration plus its computational heat.
pub fn score_node_temperature(
    task: &WorkflowTask,
    node: &ThermalView<'_>,
    t_now_s: f64,
    env: &ThermalEnvironment,
) -> Result<TemperatureEstimate, ThermalError> {
    if node.kind != NodeKind::Satellite {
        return Ok(TemperatureEstimate {
            predicted_c: None,
            score: 100,
        });
    }
    let default_spec = ThermalSpec::default();
    let spec = node.spec.unwrap_or(&default_spec);
    let predicted = match task.estimated_duration_s() {
        None => match node.state {
            Some(s) => s.current_temp_c,
            None => match node.orbit {
                Some(orbit) => env.environment_temp(&OrbitIllumination { orbit, sun: &env.sun }, t_now_s),
                None => env.internal_shade_c,
            },
        },
        Some(d_t) => {
            let increase = estimate_comp_temp_increase(
                spec,
                d_t,
                task.resources.amounts.cpu_cores(),
                task.resources.amounts.gpu_cores as f64,
            )?;
            let orbit_max = match node.orbit {
                Some(orbit) => env.estimate_max_orbit_temp(&OrbitIllumination { orbit, sun: &env.sun }, t_now_s, d_t),
                None => node.state.map_or(env.internal_shade_c, |s| s.current_temp_c - s.accumulated_exec_heat_c),
            };
            orbit_max + increase
        }
    };
    Ok(TemperatureEstimate {
        predicted_c: Some(predicted),
        score: calc_score(predicted, spec.temp_rec_c, spec.temp_max_c)?,
    })
}
