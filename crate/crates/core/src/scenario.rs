//! Immutable description of a simulated world.

use alloc::string::String;
use alloc::vec::Vec;

use crate::cluster::{ClusterSpec, RandomClusterParams};
use crate::geometry::Vec3;
use crate::metrics::MetricsConfig;
use crate::propagation::{GroundReflection, ObstacleSpec, RfConfig};

/// A transmission-reception point.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Trp {
    pub id: u32,
    pub position: Vec3,
}

/// Axis-aligned box the scene lives in.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Hall {
    pub min: Vec3,
    pub max: Vec3,
}

impl Hall {
    pub fn contains(&self, p: Vec3) -> bool {
        (self.min.x..=self.max.x).contains(&p.x)
            && (self.min.y..=self.max.y).contains(&p.y)
            && (self.min.z..=self.max.z).contains(&p.z)
    }

    pub fn size(&self) -> Vec3 {
        self.max - self.min
    }
}

/// UE positions over the snapshots.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum UeTrack {
    Static { position: Vec3 },
    /// Straight line from `start` (first snapshot) to `end` (last snapshot).
    Linear { start: Vec3, end: Vec3 },
    /// One position per snapshot.
    Waypoints { positions: Vec<Vec3> },
}

impl UeTrack {
    pub fn positions(&self, snapshots: usize) -> Vec<Vec3> {
        match self {
            UeTrack::Static { position } => alloc::vec![*position; snapshots],
            UeTrack::Linear { start, end } => (0..snapshots)
                .map(|s| {
                    let t = if snapshots > 1 { s as f64 / (snapshots - 1) as f64 } else { 0.0 };
                    start.lerp(*end, t)
                })
                .collect(),
            UeTrack::Waypoints { positions } => positions.clone(),
        }
    }
}

/// Spatially consistent shadowing of the random clusters.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SpatialConsistency {
    /// Decorrelation distance, meters.
    pub decorrelation_distance: f64,
    /// Number of sinusoids of the correlated field.
    pub sinusoids: usize,
    /// Standard deviation of the random-cluster power offset, dB.
    pub shadowing_std_db: f64,
}

impl Default for SpatialConsistency {
    fn default() -> Self {
        SpatialConsistency { decorrelation_distance: 10.0, sinusoids: 128, shadowing_std_db: 0.0 }
    }
}

/// Segmentation of UE tracks.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DriftingConfig {
    pub segment_length_wavelengths: f64,
    /// Overlap of adjacent segments as a fraction of the segment length.
    pub overlap_fraction: f64,
}

impl Default for DriftingConfig {
    fn default() -> Self {
        DriftingConfig { segment_length_wavelengths: 20.0, overlap_fraction: 0.25 }
    }
}

/// Everything needed to simulate all links of a scene.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct Scenario {
    pub name: String,
    #[cfg_attr(feature = "serde", serde(default))]
    pub description: String,
    pub seed: u64,
    pub snapshots: usize,
    pub rf: RfConfig,
    pub hall: Hall,
    pub trps: Vec<Trp>,
    pub ue: UeTrack,
    #[cfg_attr(feature = "serde", serde(default))]
    pub obstacle: Option<ObstacleSpec>,
    #[cfg_attr(feature = "serde", serde(default))]
    pub sdcs: Vec<ClusterSpec>,
    pub random_clusters: RandomClusterParams,
    pub spatial_consistency: SpatialConsistency,
    pub ground_reflection: GroundReflection,
    #[cfg_attr(feature = "serde", serde(default))]
    pub drifting: DriftingConfig,
    #[cfg_attr(feature = "serde", serde(default))]
    pub metrics: MetricsConfig,
}

impl Scenario {
    pub fn trp_index(&self, id: u32) -> Option<usize> {
        self.trps.iter().position(|t| t.id == id)
    }

    pub fn ue_positions(&self) -> Vec<Vec3> {
        self.ue.positions(self.snapshots)
    }
}
