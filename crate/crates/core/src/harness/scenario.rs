//! Scenario files: everything a run needs, loaded from TOML.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::constellation::{ConstellationSpec, VisibilityConfig};
use crate::error::ConfigError;
use crate::model::{EdgeSource, GeoPoint, ResourceVector, WorkflowDag};
use crate::scheduler::HyperDriveConfig;
use crate::thermal::{ThermalEnvironment, ThermalSpec};
use crate::topology::LinkDefaults;

/// The bundled wildfire-detection scenario.
pub const WILDFIRE_TOML: &str = include_str!("../../scenarios/wildfire.toml");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchedulerKind {
    Hyperdrive,
    FirstFit,
    RoundRobin,
    Random,
}

impl SchedulerKind {
    pub const ALL: [SchedulerKind; 4] = [
        SchedulerKind::Hyperdrive,
        SchedulerKind::FirstFit,
        SchedulerKind::RoundRobin,
        SchedulerKind::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchedulerKind::Hyperdrive => "hyperdrive",
            SchedulerKind::FirstFit => "first_fit",
            SchedulerKind::RoundRobin => "round_robin",
            SchedulerKind::Random => "random",
        }
    }
}

impl fmt::Display for SchedulerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchedulerKind {
    type Err = ConfigError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = s.trim().to_ascii_lowercase().replace('-', "_");
        SchedulerKind::ALL
            .into_iter()
            .find(|k| k.name() == norm || (norm == "firstfit" && *k == SchedulerKind::FirstFit) || (norm == "rrobin" && *k == SchedulerKind::RoundRobin))
            .ok_or_else(|| ConfigError::invalid("schedulers", format!("unknown scheduler `{s}`")))
    }
}

/// Per-kind node template.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeTemplateConfig {
    pub cpu_arch: String,
    pub capacity: ResourceVector,
    /// Share of CPU and memory already in use, drawn uniformly per node.
    #[serde(default)]
    pub background_load: [f64; 2],
    /// Battery charge range; absent for mains-powered nodes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub battery_charge: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thermal: Option<ThermalSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Templates {
    pub satellite: NodeTemplateConfig,
    pub edge: NodeTemplateConfig,
    pub cloud: NodeTemplateConfig,
}

/// Terrestrial part of one infrastructure unit and its wiring.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TerrestrialConfig {
    pub edge_per_unit: usize,
    pub cloud_per_unit: usize,
    /// Edges and clouds are scattered within these distances of the drone.
    pub edge_spread_km: f64,
    pub cloud_spread_km: f64,
    /// Each edge links to its nearest edges and nearest clouds.
    pub edge_neighbours: usize,
    pub edge_cloud_links: usize,
    pub edge_edge_latency_ms: [f64; 2],
    pub edge_cloud_latency_ms: [f64; 2],
    /// Clouds are fully meshed.
    pub cloud_cloud_latency_ms: [f64; 2],
    pub access_latency_ms: [f64; 2],
    pub bandwidth_bps: f64,
    #[serde(default)]
    pub jitter_ms: f64,
    #[serde(default)]
    pub packet_drop: f64,
}

/// The drone running the pinned ingest function, modelled as a ground station.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DroneConfig {
    pub name: String,
    pub location: GeoPoint,
    /// Edges within this distance get a direct access link (the nearest edge always does).
    pub access_radius_km: f64,
}

/// Earth-observation satellite acting as a data source.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EoSourceConfig {
    pub name: String,
    pub altitude_km: f64,
    pub inclination_deg: f64,
    /// The satellite passes over this point when the workflow is triggered.
    pub pass_over: GeoPoint,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub seeds: Vec<u64>,
    /// Total node counts; each must be a multiple of the unit size.
    pub sizes: Vec<usize>,
    pub schedulers: Vec<SchedulerKind>,
    pub time_step_s: f64,
    /// The workflow is triggered at a seeded time in `[0, start_window_s)`.
    pub start_window_s: f64,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Probability that a rival claims the target node at commit time.
    #[serde(default)]
    pub conflict_probability: f64,
    /// Constellation of one unit; `sats_per_plane` scales with the size multiplier.
    pub constellation: ConstellationSpec,
    pub terrestrial: TerrestrialConfig,
    pub drone: DroneConfig,
    pub eo_source: EoSourceConfig,
    pub templates: Templates,
    #[serde(default)]
    pub links: LinkDefaults,
    #[serde(default)]
    pub visibility: VisibilityConfig,
    #[serde(default)]
    pub environment: ThermalEnvironment,
    #[serde(default)]
    pub hyperdrive: HyperDriveConfig,
    pub workflow: WorkflowDag,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("results")
}

/// One row of the size table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeRow {
    pub multiplier: u32,
    pub satellites: usize,
    pub edges: usize,
    pub clouds: usize,
    pub total: usize,
}

impl ScenarioConfig {
    pub fn wildfire() -> Self {
        parse_scenario(WILDFIRE_TOML, Path::new("<bundled wildfire.toml>")).expect("bundled scenario is valid")
    }

    pub fn unit_size(&self) -> usize {
        self.constellation.satellite_count() + self.terrestrial.edge_per_unit + self.terrestrial.cloud_per_unit
    }

    /// Node counts for a requested total. Satellites grow by adding slots to
    /// every plane, so the plane count stays fixed.
    pub fn expand_size(&self, total: usize) -> Result<SizeRow, ConfigError> {
        let unit = self.unit_size();
        if total == 0 || total % unit != 0 {
            return Err(ConfigError::invalid(
                "sizes",
                format!("{total} is not a positive multiple of the unit size {unit}"),
            ));
        }
        let m = total / unit;
        Ok(SizeRow {
            multiplier: m as u32,
            satellites: self.constellation.satellite_count() * m,
            edges: self.terrestrial.edge_per_unit * m,
            clouds: self.terrestrial.cloud_per_unit * m,
            total,
        })
    }

    pub fn constellation_for(&self, row: &SizeRow) -> ConstellationSpec {
        ConstellationSpec {
            sats_per_plane: self.constellation.sats_per_plane * row.multiplier,
            ..self.constellation
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.seeds.is_empty() {
            return Err(ConfigError::invalid("seeds", "must not be empty"));
        }
        if self.sizes.is_empty() {
            return Err(ConfigError::invalid("sizes", "must not be empty"));
        }
        for s in &self.sizes {
            self.expand_size(*s)?;
        }
        if self.schedulers.is_empty() {
            return Err(ConfigError::invalid("schedulers", "must not be empty"));
        }
        let mut seen = self.schedulers.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.schedulers.len() {
            return Err(ConfigError::invalid("schedulers", "duplicate entry"));
        }
        if !(self.time_step_s > 0.0) {
            return Err(ConfigError::invalid("time_step_s", "must be > 0"));
        }
        if !(self.start_window_s >= self.time_step_s) {
            return Err(ConfigError::invalid("start_window_s", "must be at least one time step"));
        }
        if !(0.0..=1.0).contains(&self.conflict_probability) {
            return Err(ConfigError::invalid("conflict_probability", "must lie in [0, 1]"));
        }
        self.constellation.validate()?;
        for (name, t) in [
            ("satellite", &self.templates.satellite),
            ("edge", &self.templates.edge),
            ("cloud", &self.templates.cloud),
        ] {
            let [lo, hi] = t.background_load;
            if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
                return Err(ConfigError::invalid(format!("templates.{name}.background_load"), "need 0 <= lo <= hi <= 1"));
            }
            if let Some([lo, hi]) = t.battery_charge {
                if !(0.0 <= lo && lo <= hi && hi <= 1.0) {
                    return Err(ConfigError::invalid(format!("templates.{name}.battery_charge"), "need 0 <= lo <= hi <= 1"));
                }
            }
            if let Some(spec) = &t.thermal {
                spec.validate()
                    .map_err(|e| ConfigError::invalid(format!("templates.{name}.thermal"), e.to_string()))?;
            }
        }
        let t = &self.terrestrial;
        for (field, [lo, hi]) in [
            ("edge_edge_latency_ms", t.edge_edge_latency_ms),
            ("edge_cloud_latency_ms", t.edge_cloud_latency_ms),
            ("cloud_cloud_latency_ms", t.cloud_cloud_latency_ms),
            ("access_latency_ms", t.access_latency_ms),
        ] {
            if !(0.0 <= lo && lo <= hi) {
                return Err(ConfigError::invalid(format!("terrestrial.{field}"), "need 0 <= lo <= hi"));
            }
        }
        if !(t.edge_spread_km >= 0.0 && t.cloud_spread_km >= 0.0 && t.bandwidth_bps > 0.0) {
            return Err(ConfigError::invalid("terrestrial", "spreads must be >= 0 and bandwidth > 0"));
        }
        if self.drone.name == self.eo_source.name {
            return Err(ConfigError::invalid("eo_source.name", "clashes with the drone name"));
        }
        if !(self.environment.sweep_step_s > 0.0 && self.environment.sun.day_length_s > 0.0) {
            return Err(ConfigError::invalid("environment", "sweep step and day length must be > 0"));
        }
        self.hyperdrive.vicinity.validate()?;
        if self.hyperdrive.commit.attempts == 0 {
            return Err(ConfigError::invalid("hyperdrive.commit.attempts", "must be >= 1"));
        }

        let report = self.workflow.validate();
        if let Some(v) = report.violations.first() {
            return Err(ConfigError::invalid("workflow", v.to_string()));
        }
        let known_host = |h: &str| h == self.drone.name || h == self.eo_source.name;
        for task in &self.workflow.tasks {
            if let Some(host) = &task.pinned_to {
                if !known_host(host) {
                    return Err(ConfigError::invalid(
                        format!("workflow.tasks.{}.pinned_to", task.id),
                        format!("unknown node `{host}`"),
                    ));
                }
            }
        }
        for ds in &self.workflow.data_sources {
            if !known_host(&ds.host) {
                return Err(ConfigError::invalid(
                    format!("workflow.data_sources.{}.host", ds.id),
                    format!("unknown node `{}`", ds.host),
                ));
            }
        }
        // Tasks downstream of nothing need a location to sample around.
        for task in &self.workflow.tasks {
            let has_task_pred = self
                .workflow
                .incoming(&task.id)
                .any(|e| matches!(self.workflow.source_of(e), Some(EdgeSource::Task(_))));
            if task.pinned_to.is_none() && task.preferred_location.is_none() && !has_task_pred {
                return Err(ConfigError::invalid(
                    format!("workflow.tasks.{}", task.id),
                    "needs pinned_to, preferred_location or a predecessor task",
                ));
            }
        }
        Ok(())
    }
}

/// Parses and validates a scenario held in memory.
pub fn parse_scenario(text: &str, origin: &Path) -> Result<ScenarioConfig, ConfigError> {
    if text.trim().is_empty() {
        return Err(ConfigError::Parse {
            path: origin.to_path_buf(),
            message: "scenario file is empty".into(),
        });
    }
    let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| ConfigError::Parse {
        path: origin.to_path_buf(),
        message: e.to_string(),
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_scenario(path: &Path) -> Result<ScenarioConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_scenario(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_wildfire() {
        let cfg = ScenarioConfig::wildfire();
        assert_eq!(cfg.workflow.tasks.len(), 4);
        let pinned: Vec<_> = cfg.workflow.tasks.iter().filter(|t| t.pinned_to.is_some()).collect();
        assert_eq!(pinned.len(), 1);
        assert_eq!(pinned[0].id.as_str(), "Ingest");
        assert_eq!(pinned[0].pinned_to.as_deref(), Some(cfg.drone.name.as_str()));
        assert_eq!(cfg.schedulers.len() * cfg.sizes.len() * cfg.seeds.len(), 80);
    }

    #[test]
    fn size_table() {
        let cfg = ScenarioConfig::wildfire();
        assert_eq!(cfg.unit_size(), 1118);
        let rows: Vec<_> = [1118, 2236, 3354, 4472]
            .iter()
            .map(|s| {
                let r = cfg.expand_size(*s).unwrap();
                (r.satellites, r.edges, r.clouds, r.total)
            })
            .collect();
        assert_eq!(
            rows,
            vec![(1008, 100, 10, 1118), (2016, 200, 20, 2236), (3024, 300, 30, 3354), (4032, 400, 40, 4472)]
        );
        let row = cfg.expand_size(4472).unwrap();
        let c = cfg.constellation_for(&row);
        assert_eq!((c.planes, c.sats_per_plane), (72, 56));
        assert!(cfg.expand_size(1000).is_err());
    }

    #[test]
    fn empty_and_unknown_keys_rejected() {
        assert!(matches!(parse_scenario("", Path::new("x")), Err(ConfigError::Parse { .. })));
        let bad = format!("{WILDFIRE_TOML}\nbogus = 1\n");
        let err = parse_scenario(&bad, Path::new("x")).unwrap_err().to_string();
        assert!(err.contains("bogus"), "{err}");
    }

    #[test]
    fn scheduler_names() {
        assert_eq!("first-fit".parse::<SchedulerKind>().unwrap(), SchedulerKind::FirstFit);
        assert_eq!("HyperDrive".parse::<SchedulerKind>().unwrap(), SchedulerKind::Hyperdrive);
        assert!("greedy".parse::<SchedulerKind>().is_err());
    }
}
