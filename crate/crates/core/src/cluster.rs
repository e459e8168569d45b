//! Cluster declarations, random cluster generation and per-snapshot
//! resolution of every cluster to concrete scatterer positions.
//!
//! Each path follows the dual-bounce layout: the transmitter reaches a first
//! bounce scatterer (FBS) along vector `b`, travels to the last bounce
//! scatterer (LBS) along `c`, and `a` points from the receiver to the LBS.
//! Single-bounce paths have `FBS == LBS`. The arrival direction is stored as
//! the direction of `a` (receiver towards the LBS).

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::TAU;

#[allow(unused_imports)]
use num_traits::Float;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{config, degenerate, domain, Error, Result};
use crate::geometry::{specular_reflection_point, vector_to_angles, DirectionAngles, RectPlane, Vec3};
use crate::propagation::ObstaclePose;
use crate::rng::{StreamId, StreamPurpose};
use crate::SPEED_OF_LIGHT;

/// What a relative cluster is attached to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Anchor {
    Ue,
    Trp,
}

/// Coordinate frame a reflector is expressed in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Frame {
    #[default]
    World,
    /// Obstacle frame: origin at the bottom center of the obstacle, x along
    /// its width, y along its reflective-face normal, z up. Obstacle-frame
    /// reflectors only reflect on the side their normal points to.
    Obstacle,
}

/// A point on the obstacle outline, in obstacle coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EdgePoint {
    /// Offset along the width, in `[-width/2, width/2]`.
    pub along: f64,
    /// Height above the obstacle base, in `[0, height]`.
    pub up: f64,
}

/// Geometry payload of a semi-deterministic cluster.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case"))]
pub enum ClusterGeometry {
    /// Scatterer at a world position shared by all links.
    Fixed { point: Vec3 },
    /// Planar reflector; the reflection point follows the endpoints.
    SpecularReflector {
        plane: RectPlane,
        #[cfg_attr(feature = "serde", serde(default))]
        frame: Frame,
    },
    /// Scatterer rigidly attached to the UE or the TRP.
    Relative { anchor: Anchor, offset: Vec3 },
    /// Diffracting point on the obstacle outline.
    DiffractionEdge { edge: EdgePoint },
}

/// How the power of a semi-deterministic path is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "rule", rename_all = "snake_case"))]
pub enum PowerRule {
    /// Free-space loss of the path length plus `extra_loss_db`.
    RelativeToFspl { extra_loss_db: f64 },
    /// Free-space loss plus single knife-edge loss plus `extra_loss_db`.
    KnifeEdge { extra_loss_db: f64 },
}

impl PowerRule {
    pub fn extra_loss_db(&self) -> f64 {
        match *self {
            PowerRule::RelativeToFspl { extra_loss_db } | PowerRule::KnifeEdge { extra_loss_db } => extra_loss_db,
        }
    }
}

/// Kind tag of a cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClusterKind {
    Random,
    Fixed,
    SpecularReflector,
    Relative,
    DiffractionEdge,
}

/// A named semi-deterministic cluster.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ClusterSpec {
    pub name: String,
    #[cfg_attr(feature = "serde", serde(flatten))]
    pub geometry: ClusterGeometry,
    pub power: PowerRule,
}

impl ClusterSpec {
    pub fn kind(&self) -> ClusterKind {
        match self.geometry {
            ClusterGeometry::Fixed { .. } => ClusterKind::Fixed,
            ClusterGeometry::SpecularReflector { .. } => ClusterKind::SpecularReflector,
            ClusterGeometry::Relative { .. } => ClusterKind::Relative,
            ClusterGeometry::DiffractionEdge { .. } => ClusterKind::DiffractionEdge,
        }
    }

    /// Whether the cluster moves with the obstacle.
    pub fn is_obstacle_attached(&self) -> bool {
        matches!(
            self.geometry,
            ClusterGeometry::DiffractionEdge { .. } | ClusterGeometry::SpecularReflector { frame: Frame::Obstacle, .. }
        )
    }

    pub fn validate(&self) -> Result<()> {
        let extra = self.power.extra_loss_db();
        if !(extra >= 0.0 && extra.is_finite()) {
            return Err(config!("cluster `{}`: extra loss must be finite and >= 0 dB, got {extra}", self.name));
        }
        let knife = matches!(self.power, PowerRule::KnifeEdge { .. });
        let edge = matches!(self.geometry, ClusterGeometry::DiffractionEdge { .. });
        if knife != edge {
            return Err(config!(
                "cluster `{}`: the knife-edge power rule is used by diffraction edges and only by them",
                self.name
            ));
        }
        Ok(())
    }
}

/// Where a path comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PathOrigin {
    Los,
    GroundReflection,
    /// Semi-deterministic cluster, by index into the scenario's cluster list.
    Sdc { index: usize, kind: ClusterKind },
    /// Random cluster of the segment the path was generated in.
    Random { segment: u32 },
}

impl PathOrigin {
    pub fn is_random(&self) -> bool {
        matches!(self, PathOrigin::Random { .. })
    }
}

/// TRP/UE pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LinkId {
    pub trp: u32,
    pub ue: u32,
}

/// One propagation path at one snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedPath {
    pub link: LinkId,
    /// Path index `l`.
    pub path: usize,
    /// Sub-path index `m`.
    pub subpath: usize,
    pub snapshot: usize,
    pub fbs: Vec3,
    pub lbs: Vec3,
    /// TX → FBS.
    pub b: Vec3,
    /// FBS → LBS.
    pub c: Vec3,
    /// RX → LBS.
    pub a: Vec3,
    pub departure: DirectionAngles,
    pub arrival: DirectionAngles,
    /// Absolute delay in seconds.
    pub delay: f64,
    /// Linear amplitude magnitude.
    pub magnitude: f64,
    /// Phase in radians, in `[0, 2π)`.
    pub phase: f64,
    pub origin: PathOrigin,
    pub blocked: bool,
}

impl ResolvedPath {
    /// Builds the geometric part of a path through `fbs` and `lbs`.
    pub fn through(tx: Vec3, rx: Vec3, fbs: Vec3, lbs: Vec3, origin: PathOrigin, link: LinkId) -> Result<Self> {
        let b = fbs - tx;
        let c = lbs - fbs;
        let a = lbs - rx;
        let departure = vector_to_angles(b).map_err(|_| degenerate!("first-bounce scatterer coincides with the transmitter"))?;
        let arrival = vector_to_angles(a).map_err(|_| degenerate!("last-bounce scatterer coincides with the receiver"))?;
        let length = b.norm() + c.norm() + a.norm();
        Ok(ResolvedPath {
            link,
            path: 0,
            subpath: 0,
            snapshot: 0,
            fbs,
            lbs,
            b,
            c,
            a,
            departure,
            arrival,
            delay: length / SPEED_OF_LIGHT,
            magnitude: 0.0,
            phase: 0.0,
            origin,
            blocked: false,
        })
    }

    /// Direct path. The scatterer pair is placed at the midpoint so that `b`
    /// and `a` carry the line-of-sight directions.
    pub fn line_of_sight(tx: Vec3, rx: Vec3, link: LinkId) -> Result<Self> {
        if tx.distance(rx) == 0.0 {
            return Err(degenerate!("TRP and UE coincide"));
        }
        let mid = tx.lerp(rx, 0.5);
        Self::through(tx, rx, mid, mid, PathOrigin::Los, link)
    }

    pub fn with_indices(mut self, path: usize, subpath: usize, snapshot: usize) -> Self {
        self.path = path;
        self.subpath = subpath;
        self.snapshot = snapshot;
        self
    }

    pub fn tx(&self) -> Vec3 {
        self.fbs - self.b
    }

    pub fn rx(&self) -> Vec3 {
        self.lbs - self.a
    }

    /// `|b| + |c| + |a|` in meters.
    pub fn length(&self) -> f64 {
        self.b.norm() + self.c.norm() + self.a.norm()
    }

    pub fn amplitude(&self) -> num_complex::Complex64 {
        num_complex::Complex64::from_polar(self.magnitude, self.phase)
    }

    pub fn power_db(&self) -> f64 {
        20.0 * self.magnitude.log10()
    }
}

/// State of the world needed to place clusters at one snapshot.
#[derive(Debug, Clone, Copy)]
pub struct ResolveContext<'a> {
    pub link: LinkId,
    pub snapshot: usize,
    pub trp: Vec3,
    pub ue: Vec3,
    pub obstacle: Option<&'a ObstaclePose>,
}

/// Places one semi-deterministic cluster. Returns `None` when the cluster is
/// not visible on this link (reflection point outside the reflector, or the
/// endpoints are behind a one-sided reflector).
pub fn resolve_cluster(spec: &ClusterSpec, index: usize, ctx: &ResolveContext<'_>) -> Result<Option<ResolvedPath>> {
    let origin = PathOrigin::Sdc { index, kind: spec.kind() };
    let single = |point: Vec3| ResolvedPath::through(ctx.trp, ctx.ue, point, point, origin, ctx.link);
    let path = match &spec.geometry {
        ClusterGeometry::Fixed { point } => single(*point)?,
        ClusterGeometry::Relative { anchor, offset } => {
            let base = match anchor {
                Anchor::Ue => ctx.ue,
                Anchor::Trp => ctx.trp,
            };
            single(base + *offset)?
        }
        ClusterGeometry::SpecularReflector { plane, frame: Frame::World } => {
            match specular_reflection_point(ctx.trp, ctx.ue, plane)? {
                Some(q) => single(q)?,
                None => return Ok(None),
            }
        }
        ClusterGeometry::SpecularReflector { plane, frame: Frame::Obstacle } => {
            let pose = ctx.obstacle.ok_or_else(|| config!("cluster `{}` needs an obstacle", spec.name))?;
            let world = pose.plane_to_world(plane)?;
            if world.signed_distance(ctx.trp) <= 0.0 || world.signed_distance(ctx.ue) <= 0.0 {
                return Ok(None);
            }
            match specular_reflection_point(ctx.trp, ctx.ue, &world)? {
                Some(q) => single(q)?,
                None => return Ok(None),
            }
        }
        ClusterGeometry::DiffractionEdge { edge } => {
            let pose = ctx.obstacle.ok_or_else(|| config!("cluster `{}` needs an obstacle", spec.name))?;
            single(pose.edge_to_world(*edge))?
        }
    };
    Ok(Some(path.with_indices(0, 0, ctx.snapshot)))
}

/// Ground reflection on the plane `z = 0`.
pub fn ground_reflection_path(trp: Vec3, ue: Vec3, link: LinkId) -> Result<ResolvedPath> {
    if !(trp.z > 0.0 && ue.z > 0.0) {
        return Err(domain!("ground reflection needs both endpoints above z = 0 (got {} and {})", trp.z, ue.z));
    }
    let floor = RectPlane::infinite(Vec3::ZERO, Vec3::Z)?;
    let q = specular_reflection_point(trp, ue, &floor)?.ok_or_else(|| degenerate!("no ground reflection point"))?;
    ResolvedPath::through(trp, ue, q, q, PathOrigin::GroundReflection, link)
}

/// Scatterer pair for a path leaving `tx` along `departure`, arriving at `rx`
/// from `arrival` (receiver-to-scatterer direction), with total delay
/// `delay`. Both scatterers sit at the same distance `d` from their endpoint.
pub fn positions_from_angles_delay(
    tx: Vec3,
    rx: Vec3,
    departure: DirectionAngles,
    arrival: DirectionAngles,
    delay: f64,
) -> Result<(Vec3, Vec3)> {
    positions_from_angles_length(tx, rx, departure, arrival, delay * SPEED_OF_LIGHT)
}

/// Same as [`positions_from_angles_delay`] with the path length in meters.
pub fn positions_from_angles_length(
    tx: Vec3,
    rx: Vec3,
    departure: DirectionAngles,
    arrival: DirectionAngles,
    length: f64,
) -> Result<(Vec3, Vec3)> {
    let direct = tx.distance(rx);
    if !(length.is_finite()) || length < direct * (1.0 - 1e-12) {
        return Err(Error::InfeasibleDelay { length, direct });
    }
    if length <= direct {
        return Ok((tx, rx));
    }
    let u_dep = departure.unit_vector();
    let u_arr = arrival.unit_vector();
    let total = |d: f64| 2.0 * d + (tx + u_dep * d).distance(rx + u_arr * d);
    // total(0) = direct <= length <= total(length / 2), and total is
    // nondecreasing, so bisection always brackets the root.
    let (mut lo, mut hi) = (0.0, length / 2.0);
    for _ in 0..200 {
        if hi - lo <= 1e-12 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if total(mid) < length {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let d = 0.5 * (lo + hi);
    Ok((tx + u_dep * d, rx + u_arr * d))
}

/// Statistical parameters of the random clusters.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RandomClusterParams {
    /// Number of clusters `N`.
    pub count: usize,
    /// Sub-paths per cluster `M`.
    pub subpaths: usize,
    /// Delay spread in seconds.
    pub delay_spread: f64,
    /// Delay proportionality factor `r_τ`.
    pub delay_scaling: f64,
    /// Per-cluster shadowing standard deviation, dB.
    pub cluster_shadowing_db: f64,
    /// Ricean K-factor in dB; `None` for a non-line-of-sight link.
    pub k_factor_db: Option<f64>,
    /// Azimuth/elevation spreads of departure and arrival, degrees.
    pub asd_deg: f64,
    pub asa_deg: f64,
    pub zsd_deg: f64,
    pub zsa_deg: f64,
    /// Intra-cluster spreads, degrees.
    pub cluster_asd_deg: f64,
    pub cluster_asa_deg: f64,
    pub cluster_zsd_deg: f64,
    pub cluster_zsa_deg: f64,
    /// Azimuth scaling constants keyed by cluster count.
    #[cfg_attr(feature = "serde", serde(default))]
    pub azimuth_scaling: Vec<(usize, f64)>,
    /// Zenith scaling constants keyed by cluster count.
    #[cfg_attr(feature = "serde", serde(default))]
    pub zenith_scaling: Vec<(usize, f64)>,
    /// Smallest excess path length used when placing scatterers, meters.
    /// A cluster at zero excess delay would sit on the direct line.
    #[cfg_attr(feature = "serde", serde(default = "default_min_excess_length"))]
    pub min_excess_length: f64,
}

fn default_min_excess_length() -> f64 {
    0.3
}

impl Default for RandomClusterParams {
    fn default() -> Self {
        RandomClusterParams {
            count: 20,
            subpaths: 20,
            delay_spread: 50e-9,
            delay_scaling: 2.7,
            cluster_shadowing_db: 4.0,
            k_factor_db: Some(7.0),
            asd_deg: 30.0,
            asa_deg: 40.0,
            zsd_deg: 20.0,
            zsa_deg: 20.0,
            cluster_asd_deg: 5.0,
            cluster_asa_deg: 8.0,
            cluster_zsd_deg: 3.0,
            cluster_zsa_deg: 9.0,
            azimuth_scaling: Vec::new(),
            zenith_scaling: Vec::new(),
            min_excess_length: default_min_excess_length(),
        }
    }
}

/// Offsets of the 20 sub-paths within a cluster, in units of the
/// intra-cluster spread.
const SUBPATH_OFFSETS_20: [f64; 20] = [
    0.0447, -0.0447, 0.1413, -0.1413, 0.2492, -0.2492, 0.3715, -0.3715, 0.5129, -0.5129, 0.6797, -0.6797,
    0.8844, -0.8844, 1.1481, -1.1481, 1.5195, -1.5195, 2.1551, -2.1551,
];

fn subpath_offset(m: usize, count: usize) -> f64 {
    match count {
        20 => SUBPATH_OFFSETS_20[m],
        1 => 0.0,
        _ => {
            let span = SUBPATH_OFFSETS_20[18];
            -span + 2.0 * span * m as f64 / (count - 1) as f64
        }
    }
}

impl RandomClusterParams {
    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(config!("random cluster count must be >= 1"));
        }
        if self.subpaths == 0 {
            return Err(config!("sub-path count must be >= 1"));
        }
        if !(self.delay_spread > 0.0 && self.delay_spread.is_finite()) {
            return Err(config!("delay spread must be > 0, got {}", self.delay_spread));
        }
        if !(self.delay_scaling > 1.0 && self.delay_scaling.is_finite()) {
            return Err(config!("delay scaling r_tau must be > 1, got {}", self.delay_scaling));
        }
        if !(self.cluster_shadowing_db >= 0.0) {
            return Err(config!("cluster shadowing must be >= 0 dB"));
        }
        if let Some(k) = self.k_factor_db {
            if !k.is_finite() {
                return Err(config!("K-factor must be finite"));
            }
        }
        let spreads = [
            self.asd_deg,
            self.asa_deg,
            self.zsd_deg,
            self.zsa_deg,
            self.cluster_asd_deg,
            self.cluster_asa_deg,
            self.cluster_zsd_deg,
            self.cluster_zsa_deg,
        ];
        if spreads.iter().any(|s| !(*s >= 0.0 && s.is_finite())) {
            return Err(config!("angular spreads must be finite and >= 0"));
        }
        if self.azimuth_scaling.iter().chain(&self.zenith_scaling).any(|(_, c)| !(*c > 0.0)) {
            return Err(config!("angle scaling constants must be > 0"));
        }
        if !(self.min_excess_length > 0.0) {
            return Err(config!("minimum excess length must be > 0"));
        }
        Ok(())
    }

    fn lookup(table: &[(usize, f64)], n: usize) -> f64 {
        table.iter().find(|(k, _)| *k == n).map(|(_, c)| *c).unwrap_or(1.0)
    }

    /// Azimuth scaling constant for `count` clusters, including the K-factor
    /// correction for line-of-sight links.
    pub fn azimuth_constant(&self) -> f64 {
        let c = Self::lookup(&self.azimuth_scaling, self.count);
        match self.k_factor_db {
            Some(k) => c * (1.1035 - 0.028 * k - 0.002 * k * k + 0.0001 * k * k * k),
            None => c,
        }
    }

    pub fn zenith_constant(&self) -> f64 {
        let c = Self::lookup(&self.zenith_scaling, self.count);
        match self.k_factor_db {
            Some(k) => c * (1.3086 + 0.0339 * k - 0.0077 * k * k + 0.0002 * k * k * k),
            None => c,
        }
    }
}

/// One random sub-path.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomSubPath {
    pub departure: DirectionAngles,
    pub arrival: DirectionAngles,
    /// Initial phase, radians in `[0, 2π)`.
    pub phase: f64,
    pub fbs: Vec3,
    pub lbs: Vec3,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RandomCluster {
    /// Excess delay over the direct path, seconds.
    pub excess_delay: f64,
    /// Linear power share.
    pub power: f64,
    pub departure: DirectionAngles,
    pub arrival: DirectionAngles,
    pub subpaths: Vec<RandomSubPath>,
}

/// Random clusters of one link and segment.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomClusterState {
    /// Power share of the direct path, `K / (K + 1)`, or 0 without K-factor.
    pub los_power: f64,
    pub clusters: Vec<RandomCluster>,
}

impl RandomClusterState {
    pub fn total_power(&self) -> f64 {
        self.los_power + self.clusters.iter().map(|c| c.power).sum::<f64>()
    }
}

fn normal(rng: &mut impl Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn sign(rng: &mut impl Rng) -> f64 {
    if rng.gen::<bool>() {
        1.0
    } else {
        -1.0
    }
}

/// Power-coupled angle offsets of every cluster, degrees. `scale(p)` maps a
/// power ratio to the unsigned offset.
fn cluster_offsets(
    rng: &mut impl Rng,
    ratios: &[f64],
    spread: f64,
    los: bool,
    scale: impl Fn(f64) -> f64,
) -> Vec<f64> {
    let mut offsets: Vec<f64> = ratios.iter().map(|&r| sign(rng) * scale(r) + normal(rng) * spread / 7.0).collect();
    if los {
        let first = offsets[0];
        offsets.iter_mut().for_each(|o| *o -= first);
    }
    offsets
}

/// Draws the random clusters of one link segment between `tx` and `rx`.
///
/// The center directions are the direct-path directions. Everything depends
/// only on `params`, the endpoints and `stream`.
pub fn generate_random_clusters(
    params: &RandomClusterParams,
    tx: Vec3,
    rx: Vec3,
    stream: StreamId,
) -> Result<RandomClusterState> {
    params.validate()?;
    let mut rng = stream.rng(StreamPurpose::RandomClusters);
    let n = params.count;

    let mut delays: Vec<f64> = (0..n)
        .map(|_| {
            // open interval keeps ln finite
            let u: f64 = 1.0 - rng.gen::<f64>();
            -params.delay_scaling * params.delay_spread * u.ln()
        })
        .collect();
    delays.sort_by(f64::total_cmp);
    let first = delays[0];
    delays.iter_mut().for_each(|d| *d -= first);

    let decay = (params.delay_scaling - 1.0) / (params.delay_scaling * params.delay_spread);
    let raw: Vec<f64> = delays
        .iter()
        .map(|tau| {
            let zeta = normal(&mut rng) * params.cluster_shadowing_db;
            (-tau * decay).exp() * 10f64.powf(-zeta / 10.0)
        })
        .collect();
    let sum: f64 = raw.iter().sum();
    let nlos_powers: Vec<f64> = raw.iter().map(|p| p / sum).collect();

    let (los_power, scatter_share) = match params.k_factor_db {
        Some(k) => {
            let k = 10f64.powf(k / 10.0);
            (k / (k + 1.0), 1.0 / (k + 1.0))
        }
        None => (0.0, 1.0),
    };

    let max_p = nlos_powers.iter().copied().fold(0.0, f64::max);
    let ratios: Vec<f64> = nlos_powers.iter().map(|p| p / max_p).collect();
    let los = params.k_factor_db.is_some();
    let c_az = params.azimuth_constant();
    let c_el = params.zenith_constant();
    let az = |spread: f64| move |r: f64| 2.0 * (spread / 1.4) * (-r.ln()).sqrt() / c_az;
    let el = |spread: f64| move |r: f64| -spread * r.ln() / c_el;
    let aoa = cluster_offsets(&mut rng, &ratios, params.asa_deg, los, az(params.asa_deg));
    let aod = cluster_offsets(&mut rng, &ratios, params.asd_deg, los, az(params.asd_deg));
    let zoa = cluster_offsets(&mut rng, &ratios, params.zsa_deg, los, el(params.zsa_deg));
    let zod = cluster_offsets(&mut rng, &ratios, params.zsd_deg, los, el(params.zsd_deg));

    let dep_center = vector_to_angles(rx - tx).map_err(|_| degenerate!("TRP and UE coincide"))?;
    let arr_center = vector_to_angles(tx - rx).map_err(|_| degenerate!("TRP and UE coincide"))?;
    let direct = tx.distance(rx);
    let m_count = params.subpaths;

    let mut clusters = Vec::with_capacity(n);
    for i in 0..n {
        let departure = DirectionAngles::new(
            dep_center.azimuth() + aod[i].to_radians(),
            dep_center.elevation() + zod[i].to_radians(),
        );
        let arrival = DirectionAngles::new(
            arr_center.azimuth() + aoa[i].to_radians(),
            arr_center.elevation() + zoa[i].to_radians(),
        );
        // random coupling of departure and arrival sub-path offsets
        let mut arrival_order: Vec<usize> = (0..m_count).collect();
        arrival_order.shuffle(&mut rng);
        let mut elevation_order: Vec<usize> = (0..m_count).collect();
        elevation_order.shuffle(&mut rng);
        let length = direct + (delays[i] * SPEED_OF_LIGHT).max(params.min_excess_length);
        let mut subpaths = Vec::with_capacity(m_count);
        for m in 0..m_count {
            let alpha_d = subpath_offset(m, m_count);
            let alpha_a = subpath_offset(arrival_order[m], m_count);
            let alpha_z = subpath_offset(elevation_order[m], m_count);
            let sub_dep = DirectionAngles::new(
                departure.azimuth() + (params.cluster_asd_deg * alpha_d).to_radians(),
                departure.elevation() + (params.cluster_zsd_deg * alpha_z).to_radians(),
            );
            let sub_arr = DirectionAngles::new(
                arrival.azimuth() + (params.cluster_asa_deg * alpha_a).to_radians(),
                arrival.elevation() + (params.cluster_zsa_deg * alpha_z).to_radians(),
            );
            let phase = rng.gen::<f64>() * TAU;
            let (fbs, lbs) = positions_from_angles_length(tx, rx, sub_dep, sub_arr, length)?;
            subpaths.push(RandomSubPath { departure: sub_dep, arrival: sub_arr, phase, fbs, lbs });
        }
        clusters.push(RandomCluster {
            excess_delay: delays[i],
            power: nlos_powers[i] * scatter_share,
            departure,
            arrival,
            subpaths,
        });
    }
    Ok(RandomClusterState { los_power, clusters })
}
