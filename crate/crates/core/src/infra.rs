//! Static description of the compute infrastructure.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::constellation::CircularOrbit;
use crate::error::LookupError;
use crate::geo::GeoPosition;
use crate::model::{NodeId, NodeKind, NodeResources};
use crate::thermal::{ThermalSpec, ThermalState, ThermalView};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PositionSource {
    Fixed(GeoPosition),
    Orbit(CircularOrbit),
}

impl PositionSource {
    pub fn position_at(&self, t_s: f64) -> GeoPosition {
        match self {
            PositionSource::Fixed(p) => *p,
            PositionSource::Orbit(o) => o.position_at(t_s),
        }
    }

    pub fn orbit(&self) -> Option<&CircularOrbit> {
        match self {
            PositionSource::Orbit(o) => Some(o),
            PositionSource::Fixed(_) => None,
        }
    }
}

/// Slot of a satellite in the +grid ISL pattern.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridSlot {
    pub plane: u32,
    pub slot: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeRecord {
    pub id: NodeId,
    pub name: String,
    pub kind: NodeKind,
    pub resources: NodeResources,
    pub position: PositionSource,
    pub grid: Option<GridSlot>,
    pub thermal: Option<ThermalSpec>,
    /// Data-source hosts and pinned-only nodes are not offered to schedulers.
    pub schedulable: bool,
}

/// Node set with dense ids in insertion order.
#[derive(Clone, Debug, Default)]
pub struct Infrastructure {
    nodes: Vec<Arc<NodeRecord>>,
    by_name: HashMap<String, NodeId>,
}

/// Fields of a node before it receives an id.
#[derive(Clone, Debug)]
pub struct NodeTemplate {
    pub name: String,
    pub kind: NodeKind,
    pub resources: NodeResources,
    pub position: PositionSource,
    pub grid: Option<GridSlot>,
    pub thermal: Option<ThermalSpec>,
    pub schedulable: bool,
}

impl NodeTemplate {
    pub fn new(name: impl Into<String>, kind: NodeKind, resources: NodeResources, position: PositionSource) -> Self {
        NodeTemplate {
            name: name.into(),
            kind,
            resources,
            position,
            grid: None,
            thermal: None,
            schedulable: true,
        }
    }
}

impl Infrastructure {
    pub fn new() -> Self {
        Self::default()
    }

    /// Appends a node; names must be unique.
    pub fn add(&mut self, t: NodeTemplate) -> NodeId {
        let id = NodeId(self.nodes.len() as u32);
        assert!(
            self.by_name.insert(t.name.clone(), id).is_none(),
            "duplicate node name {}",
            t.name
        );
        self.nodes.push(Arc::new(NodeRecord {
            id,
            name: t.name,
            kind: t.kind,
            resources: t.resources,
            position: t.position,
            grid: t.grid,
            thermal: t.thermal,
            schedulable: t.schedulable,
        }));
        id
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Arc<NodeRecord>] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> Result<&Arc<NodeRecord>, LookupError> {
        self.nodes.get(id.index()).ok_or(LookupError::Node(id))
    }

    pub fn by_name(&self, name: &str) -> Result<NodeId, LookupError> {
        self.by_name
            .get(name)
            .copied()
            .ok_or_else(|| LookupError::NodeName(name.to_owned()))
    }

    pub fn count_kind(&self, kind: NodeKind) -> usize {
        self.nodes.iter().filter(|n| n.kind == kind).count()
    }
}

/// Point-in-time view of a node. Later state changes never alter a snapshot.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeSnapshot {
    pub record: Arc<NodeRecord>,
    pub resources: NodeResources,
    pub position: GeoPosition,
    pub thermal: Option<ThermalState>,
}

impl NodeSnapshot {
    pub fn id(&self) -> NodeId {
        self.record.id
    }

    pub fn kind(&self) -> NodeKind {
        self.record.kind
    }

    pub fn thermal_view(&self) -> ThermalView<'_> {
        ThermalView {
            kind: self.record.kind,
            spec: self.record.thermal.as_ref(),
            state: self.thermal.as_ref(),
            orbit: self.record.position.orbit(),
        }
    }
}
