//! Built-in reference scenario: an industrial hall with six TRPs, a static
//! UE and a 2 m x 4 m obstacle driving past it.
//!
//! The TRP coordinates and the obstacle trajectory are placeholders chosen so
//! that the obstacle, 2.5 m in front of the UE, blocks the TRP 3 direct path
//! between snapshots 721 and 770; they are not surveyed positions.

use sdcsim_core::cluster::{ClusterGeometry, ClusterSpec, EdgePoint, Frame, PowerRule, RandomClusterParams};
use sdcsim_core::metrics::MetricsConfig;
use sdcsim_core::propagation::{GroundReflection, ObstacleSpec, Polarization, RfConfig};
use sdcsim_core::scenario::{DriftingConfig, Hall, Scenario, SpatialConsistency, Trp, UeTrack};
use sdcsim_core::{RectPlane, Vec3};

pub const HALL: [f64; 3] = [30.0, 45.0, 10.0];
pub const UE: Vec3 = Vec3::new(15.0, 20.0, 1.5);
pub const SNAPSHOTS: usize = 1000;
pub const OBSTACLE_WIDTH: f64 = 2.0;
pub const OBSTACLE_HEIGHT: f64 = 4.0;

/// TRP ids and positions.
pub const TRPS: [(u32, Vec3); 6] = [
    (1, Vec3::new(1.0, 1.0, 6.0)),
    (2, Vec3::new(29.0, 1.5, 7.5)),
    (3, Vec3::new(21.0, 44.0, 6.0)),
    (4, Vec3::new(1.5, 43.5, 8.0)),
    (5, Vec3::new(15.0, 0.5, 9.0)),
    (6, Vec3::new(29.0, 28.0, 5.0)),
];

const WALL_LOSS_DB: f64 = 3.0;
const CEILING_LOSS_DB: f64 = 9.0;
const EDGE_LOSS_DB: f64 = 6.0;

/// Cluster-count keyed azimuth scaling constants.
const AZIMUTH_SCALING: [(usize, f64); 12] = [
    (4, 0.779),
    (5, 0.860),
    (8, 1.018),
    (10, 1.090),
    (11, 1.123),
    (12, 1.146),
    (14, 1.190),
    (15, 1.211),
    (16, 1.226),
    (19, 1.273),
    (20, 1.289),
    (25, 1.358),
];

/// Cluster-count keyed zenith scaling constants.
const ZENITH_SCALING: [(usize, f64); 8] =
    [(8, 0.889), (10, 0.957), (11, 1.031), (12, 1.104), (15, 1.1088), (19, 1.184), (20, 1.178), (25, 1.282)];

fn wall(name: &str, center: Vec3, normal: Vec3, u: Vec3, half: (f64, f64), loss: f64) -> ClusterSpec {
    ClusterSpec {
        name: name.to_string(),
        geometry: ClusterGeometry::SpecularReflector {
            plane: RectPlane::new(center, normal, u, half.0, half.1).expect("valid wall"),
            frame: Frame::World,
        },
        power: PowerRule::RelativeToFspl { extra_loss_db: loss },
    }
}

fn edge(name: &str, along: f64, up: f64) -> ClusterSpec {
    ClusterSpec {
        name: name.to_string(),
        geometry: ClusterGeometry::DiffractionEdge { edge: EdgePoint { along, up } },
        power: PowerRule::KnifeEdge { extra_loss_db: EDGE_LOSS_DB },
    }
}

pub fn reference_sdcs() -> Vec<ClusterSpec> {
    let [lx, ly, lz] = HALL;
    let (hw, h) = (OBSTACLE_WIDTH / 2.0, OBSTACLE_HEIGHT);
    vec![
        wall("wall_west", Vec3::new(0.0, ly / 2.0, lz / 2.0), Vec3::X, Vec3::Y, (ly / 2.0, lz / 2.0), WALL_LOSS_DB),
        wall("wall_east", Vec3::new(lx, ly / 2.0, lz / 2.0), -Vec3::X, Vec3::Y, (ly / 2.0, lz / 2.0), WALL_LOSS_DB),
        wall("wall_south", Vec3::new(lx / 2.0, 0.0, lz / 2.0), Vec3::Y, Vec3::X, (lx / 2.0, lz / 2.0), WALL_LOSS_DB),
        wall("wall_north", Vec3::new(lx / 2.0, ly, lz / 2.0), -Vec3::Y, Vec3::X, (lx / 2.0, lz / 2.0), WALL_LOSS_DB),
        wall("ceiling", Vec3::new(lx / 2.0, ly / 2.0, lz), -Vec3::Z, Vec3::X, (lx / 2.0, ly / 2.0), CEILING_LOSS_DB),
        edge("edge_left_bottom", -hw, 0.0),
        edge("edge_left_middle", -hw, h / 2.0),
        edge("edge_left_top", -hw, h),
        edge("edge_right_bottom", hw, 0.0),
        edge("edge_right_middle", hw, h / 2.0),
        edge("edge_right_top", hw, h),
    ]
}

pub fn reference_obstacle() -> ObstacleSpec {
    ObstacleSpec {
        width: OBSTACLE_WIDTH,
        height: OBSTACLE_HEIGHT,
        facing: Vec3::new(0.0, -1.0, 0.0),
        start: Vec3::new(9.8, 22.5, 0.0),
        end: Vec3::new(25.8, 22.5, 0.0),
        move_start: 600,
        move_end: SNAPSHOTS,
        block_loss_db: 30.0,
    }
}

/// Random-cluster statistics of a line-of-sight factory hall.
pub fn reference_random_clusters() -> RandomClusterParams {
    RandomClusterParams {
        count: 25,
        subpaths: 20,
        delay_spread: 44e-9,
        delay_scaling: 2.7,
        cluster_shadowing_db: 4.0,
        k_factor_db: Some(7.0),
        asd_deg: 36.0,
        asa_deg: 46.0,
        zsd_deg: 22.0,
        zsa_deg: 23.0,
        cluster_asd_deg: 5.0,
        cluster_asa_deg: 8.0,
        cluster_zsd_deg: 3.0,
        cluster_zsa_deg: 9.0,
        azimuth_scaling: AZIMUTH_SCALING.to_vec(),
        zenith_scaling: ZENITH_SCALING.to_vec(),
        min_excess_length: 0.3,
    }
}

pub fn reference_scenario() -> Scenario {
    let [lx, ly, lz] = HALL;
    Scenario {
        name: "reference-hall".to_string(),
        description: "30 m x 45 m x 10 m hall, 6 TRPs, static UE, moving 2 m x 4 m obstacle. \
                      TRP coordinates and the obstacle trajectory are placeholders, not surveyed positions."
            .to_string(),
        seed: 20240601,
        snapshots: SNAPSHOTS,
        rf: RfConfig { carrier_hz: 3.75e9, bandwidth_hz: 100e6 },
        hall: Hall { min: Vec3::ZERO, max: Vec3::new(lx, ly, lz) },
        trps: TRPS.iter().map(|&(id, position)| Trp { id, position }).collect(),
        ue: UeTrack::Static { position: UE },
        obstacle: Some(reference_obstacle()),
        sdcs: reference_sdcs(),
        random_clusters: reference_random_clusters(),
        spatial_consistency: SpatialConsistency { decorrelation_distance: 10.0, sinusoids: 128, shadowing_std_db: 0.0 },
        ground_reflection: GroundReflection { enabled: true, permittivity: 5.0, polarization: Polarization::Perpendicular },
        drifting: DriftingConfig::default(),
        metrics: MetricsConfig::default(),
    }
}
