//! Channel evolution along a UE track.
//!
//! The track is cut into overlapping segments. Random clusters are drawn at
//! the first snapshot of each segment and their scatterers stay put while the
//! UE moves; only the last leg, delay, arrival direction and phase change.
//! Geometry-driven paths (direct path, ground reflection, semi-deterministic
//! clusters) are placed again at every snapshot. Adjacent segments are
//! blended over their overlap.

use alloc::vec::Vec;
use core::f64::consts::TAU;

#[allow(unused_imports)]
use num_traits::Float;

use crate::cluster::{
    generate_random_clusters, ground_reflection_path, resolve_cluster, LinkId, PathOrigin, ResolveContext,
    ResolvedPath,
};
use crate::error::{config, degenerate, Result};
use crate::geometry::{vector_to_angles, Vec3};
use crate::propagation::{fspl_db, path_amplitude, wrap_phase, AmplitudeRule, CorrelatedField, ObstaclePose};
use crate::rng::{StreamId, StreamPurpose};
use crate::scenario::Scenario;
use crate::SPEED_OF_LIGHT;

/// Snapshot range `[start, start + len)` of one segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub start: usize,
    pub len: usize,
}

impl Segment {
    pub fn end(&self) -> usize {
        self.start + self.len
    }

    pub fn contains(&self, snapshot: usize) -> bool {
        (self.start..self.end()).contains(&snapshot)
    }
}

/// UE positions per snapshot and their segmentation. The last `overlaps[k]`
/// snapshots of segment `k` are the first snapshots of segment `k + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    positions: Vec<Vec3>,
    segments: Vec<Segment>,
    overlaps: Vec<usize>,
}

impl Track {
    pub fn new(positions: Vec<Vec3>, segments: Vec<Segment>, overlaps: Vec<usize>) -> Result<Self> {
        if positions.is_empty() {
            return Err(config!("a track needs at least one snapshot"));
        }
        if segments.is_empty() || segments[0].start != 0 || segments.iter().any(|s| s.len == 0) {
            return Err(config!("segments must start at snapshot 0 and be nonempty"));
        }
        if overlaps.len() + 1 != segments.len() {
            return Err(config!("one overlap per segment boundary is required"));
        }
        for (k, w) in segments.windows(2).enumerate() {
            let o = overlaps[k];
            if o >= w[0].len.min(w[1].len) {
                return Err(config!("overlap {o} at boundary {k} is not shorter than both adjacent segments"));
            }
            if w[1].start + o != w[0].end() {
                return Err(config!("segments {k} and {} are not contiguous", k + 1));
            }
        }
        if segments.last().map(Segment::end) != Some(positions.len()) {
            return Err(config!("segments do not cover the track"));
        }
        Ok(Track { positions, segments, overlaps })
    }

    /// Cuts `positions` into segments of `segment_length` meters of travel,
    /// overlapping by `overlap_fraction` of a segment. A static track is a
    /// single segment.
    pub fn segmented(positions: Vec<Vec3>, segment_length: f64, overlap_fraction: f64) -> Result<Self> {
        if !(segment_length > 0.0) || !(0.0..1.0).contains(&overlap_fraction) {
            return Err(config!("segment length must be > 0 and overlap fraction in [0, 1)"));
        }
        if positions.is_empty() {
            return Err(config!("a track needs at least one snapshot"));
        }
        let mut cores = alloc::vec![0usize];
        let mut travelled = 0.0;
        for s in 1..positions.len() {
            travelled += positions[s].distance(positions[s - 1]);
            if travelled >= segment_length {
                cores.push(s);
                travelled = 0.0;
            }
        }
        cores.push(positions.len());
        // a short tail joins the previous segment
        if cores.len() > 2 && cores[cores.len() - 1] - cores[cores.len() - 2] < 2 {
            cores.remove(cores.len() - 2);
        }
        let n = cores.len() - 1;
        let mut segments = Vec::with_capacity(n);
        let mut overlaps = Vec::with_capacity(n.saturating_sub(1));
        for k in 0..n {
            let core_len = cores[k + 1] - cores[k];
            let overlap = if k + 1 < n {
                let next_core = cores[k + 2] - cores[k + 1];
                let o = (overlap_fraction * core_len as f64).round() as usize;
                o.min(next_core.saturating_sub(1)).min(core_len.saturating_sub(1))
            } else {
                0
            };
            segments.push(Segment { start: cores[k], len: core_len + overlap });
            if k + 1 < n {
                overlaps.push(overlap);
            }
        }
        Track::new(positions, segments, overlaps)
    }

    pub fn positions(&self) -> &[Vec3] {
        &self.positions
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn overlaps(&self) -> &[usize] {
        &self.overlaps
    }

    /// Blend weight of segment `k + 1` at `snapshot`, for a snapshot inside
    /// the overlap after segment `k`. Rises linearly across the overlap.
    pub fn crossfade_weight(&self, k: usize, snapshot: usize) -> Option<f64> {
        let o = *self.overlaps.get(k)?;
        let start = self.segments[k + 1].start;
        (o > 0 && (start..start + o).contains(&snapshot)).then(|| (snapshot - start + 1) as f64 / (o + 1) as f64)
    }
}

/// All paths of one link at one snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct SnapshotChannel {
    pub snapshot: usize,
    pub link: LinkId,
    pub paths: Vec<ResolvedPath>,
}

impl SnapshotChannel {
    pub fn los(&self) -> Option<&ResolvedPath> {
        self.paths.iter().find(|p| p.origin == PathOrigin::Los)
    }

    /// Number of distinct paths (sub-paths of one cluster count once).
    pub fn path_count(&self) -> usize {
        self.paths.iter().filter(|p| p.subpath == 0).count()
    }

    pub fn random_paths(&self) -> impl Iterator<Item = &ResolvedPath> {
        self.paths.iter().filter(|p| p.origin.is_random())
    }
}

/// Moves the receiver of a path with fixed scatterers to `rx`. The phase
/// follows the change of the total length.
pub fn update_path(path: &ResolvedPath, rx: Vec3, wavelength: f64) -> Result<ResolvedPath> {
    let a = path.lbs - rx;
    let arrival = vector_to_angles(a).map_err(|_| degenerate!("receiver moved onto the last-bounce scatterer"))?;
    let old = path.length();
    let mut next = path.clone();
    next.a = a;
    next.arrival = arrival;
    let new = next.length();
    next.delay = new / SPEED_OF_LIGHT;
    next.phase = wrap_phase(path.phase - TAU * (new - old) / wavelength);
    Ok(next)
}

/// Blends the random paths of two overlapping segments at one snapshot.
/// Deterministic paths come from `a` unchanged; random paths of `a` are
/// scaled by `sqrt(1 - w)` and those of `b` by `sqrt(w)`.
pub fn cross_fade(a: &SnapshotChannel, b: &SnapshotChannel, w: f64) -> SnapshotChannel {
    let w = w.clamp(0.0, 1.0);
    let (ga, gb) = ((1.0 - w).sqrt(), w.sqrt());
    let mut paths: Vec<ResolvedPath> = a.paths.iter().filter(|p| !p.origin.is_random()).cloned().collect();
    if ga > 0.0 {
        paths.extend(a.random_paths().map(|p| ResolvedPath { magnitude: p.magnitude * ga, ..p.clone() }));
    }
    if gb > 0.0 {
        paths.extend(b.random_paths().map(|p| ResolvedPath { magnitude: p.magnitude * gb, ..p.clone() }));
    }
    SnapshotChannel { snapshot: a.snapshot, link: a.link, paths }
}

/// Track of the scenario's UE, segmented per its drifting settings.
pub fn scenario_track(scenario: &Scenario) -> Result<Track> {
    let length = scenario.drifting.segment_length_wavelengths * scenario.rf.wavelength();
    Track::segmented(scenario.ue_positions(), length, scenario.drifting.overlap_fraction)
}

struct DriftingRandomPath {
    path: ResolvedPath,
    power_db: f64,
}

fn link_of(scenario: &Scenario, trp_index: usize) -> Result<(LinkId, Vec3)> {
    let trp = scenario.trps.get(trp_index).ok_or_else(|| config!("no TRP at index {trp_index}"))?;
    Ok((LinkId { trp: trp.id, ue: 0 }, trp.position))
}

fn obstacle_pose(scenario: &Scenario, snapshot: usize) -> Result<Option<ObstaclePose>> {
    scenario.obstacle.as_ref().map(|o| o.pose_at(snapshot)).transpose()
}

/// Direct path, ground reflection and semi-deterministic clusters at one
/// snapshot, with gains applied.
pub fn deterministic_paths(
    scenario: &Scenario,
    link: LinkId,
    trp: Vec3,
    ue: Vec3,
    snapshot: usize,
    obstacle: Option<&ObstaclePose>,
) -> Result<Vec<ResolvedPath>> {
    let rf = &scenario.rf;
    let mut paths = Vec::with_capacity(scenario.sdcs.len() + 2);
    let mut los = ResolvedPath::line_of_sight(trp, ue, link)?.with_indices(0, 0, snapshot);
    path_amplitude(&los, AmplitudeRule::Los, rf, obstacle)?.apply(&mut los);
    paths.push(los);
    if scenario.ground_reflection.enabled {
        let mut gr = ground_reflection_path(trp, ue, link)?.with_indices(1, 0, snapshot);
        path_amplitude(&gr, AmplitudeRule::GroundReflection(&scenario.ground_reflection), rf, obstacle)?.apply(&mut gr);
        paths.push(gr);
    }
    let ctx = ResolveContext { link, snapshot, trp, ue, obstacle };
    for (i, spec) in scenario.sdcs.iter().enumerate() {
        if let Some(path) = resolve_cluster(spec, i, &ctx)? {
            let mut path = path.with_indices(2 + i, 0, snapshot);
            path_amplitude(&path, AmplitudeRule::Sdc(spec), rf, obstacle)?.apply(&mut path);
            paths.push(path);
        }
    }
    Ok(paths)
}

/// Power in dB of the random scattered component relative to which the
/// cluster shares are applied: the free-space power of the direct path
/// divided by its K-factor share, plus the spatially consistent shadowing.
fn random_reference_power_db(scenario: &Scenario, link: LinkId, trp: Vec3, ue: Vec3, los_share: f64) -> Result<f64> {
    let direct = trp.distance(ue);
    let mut reference = -fspl_db(direct, scenario.rf.carrier_hz)?;
    if los_share > 0.0 {
        reference -= 10.0 * los_share.log10();
    }
    let sc = &scenario.spatial_consistency;
    if sc.shadowing_std_db > 0.0 {
        let seed = StreamId::new(scenario.seed, link.trp, 0).derive_seed(StreamPurpose::SpatialField);
        let field = CorrelatedField::new(seed, sc.decorrelation_distance, sc.sinusoids)?;
        reference += sc.shadowing_std_db * field.value(ue);
    }
    Ok(reference)
}

/// Channels of one segment of one link, without cross-fading.
pub fn simulate_segment(scenario: &Scenario, trp_index: usize, track: &Track, segment: usize) -> Result<Vec<SnapshotChannel>> {
    let mut out = Vec::new();
    segment_channels(scenario, trp_index, track, segment, |c| {
        out.push(c);
        Ok(())
    })?;
    Ok(out)
}

fn segment_channels(
    scenario: &Scenario,
    trp_index: usize,
    track: &Track,
    segment: usize,
    mut emit: impl FnMut(SnapshotChannel) -> Result<()>,
) -> Result<()> {
    let (link, trp) = link_of(scenario, trp_index)?;
    let seg = *track.segments().get(segment).ok_or_else(|| config!("no segment {segment}"))?;
    let positions = track.positions();
    let wavelength = scenario.rf.wavelength();
    let ue0 = positions[seg.start];

    let stream = StreamId::new(scenario.seed, link.trp, segment as u32);
    let state = generate_random_clusters(&scenario.random_clusters, trp, ue0, stream)?;
    let reference_db = random_reference_power_db(scenario, link, trp, ue0, state.los_power)?;
    let first_random = 2 + scenario.sdcs.len();
    let origin = PathOrigin::Random { segment: segment as u32 };
    let mut random: Vec<DriftingRandomPath> = Vec::new();
    for (n, cluster) in state.clusters.iter().enumerate() {
        let share_db = 10.0 * (cluster.power / cluster.subpaths.len() as f64).log10();
        for (m, sp) in cluster.subpaths.iter().enumerate() {
            let mut path =
                ResolvedPath::through(trp, ue0, sp.fbs, sp.lbs, origin, link)?.with_indices(first_random + n, m, seg.start);
            path.phase = sp.phase;
            random.push(DriftingRandomPath { path, power_db: reference_db + share_db });
        }
    }

    for s in seg.start..seg.end() {
        let ue = positions[s];
        if s > seg.start {
            for r in &mut random {
                if ue != positions[s - 1] {
                    r.path = update_path(&r.path, ue, wavelength)?;
                }
                r.path.snapshot = s;
            }
        }
        let pose = obstacle_pose(scenario, s)?;
        let mut paths = deterministic_paths(scenario, link, trp, ue, s, pose.as_ref())?;
        paths.reserve(random.len());
        for r in &random {
            let mut p = r.path.clone();
            path_amplitude(&p, AmplitudeRule::Random { power_db: r.power_db }, &scenario.rf, pose.as_ref())?.apply(&mut p);
            paths.push(p);
        }
        emit(SnapshotChannel { snapshot: s, link, paths })?;
    }
    Ok(())
}

/// Channels of one link over the whole track, segments blended over their
/// overlaps.
pub fn simulate_link(scenario: &Scenario, trp_index: usize) -> Result<Vec<SnapshotChannel>> {
    let track = scenario_track(scenario)?;
    simulate_track(scenario, trp_index, &track)
}

pub fn simulate_track(scenario: &Scenario, trp_index: usize, track: &Track) -> Result<Vec<SnapshotChannel>> {
    let mut out = Vec::with_capacity(track.positions().len());
    for_each_snapshot(scenario, trp_index, track, |c| {
        out.push(c);
        Ok(())
    })?;
    Ok(out)
}

/// Streams the channels of one link in snapshot order. Only the snapshots of
/// one overlap are held in memory at a time.
pub fn for_each_snapshot(
    scenario: &Scenario,
    trp_index: usize,
    track: &Track,
    mut f: impl FnMut(SnapshotChannel) -> Result<()>,
) -> Result<()> {
    let count = track.segments().len();
    let mut pending: Vec<SnapshotChannel> = Vec::new();
    for k in 0..count {
        let seg = track.segments()[k];
        let overlap_in = if k > 0 { track.overlaps()[k - 1] } else { 0 };
        let overlap_out = if k + 1 < count { track.overlaps()[k] } else { 0 };
        let held_from = seg.end() - overlap_out;
        let incoming = core::mem::take(&mut pending);
        let mut incoming = incoming.into_iter();
        segment_channels(scenario, trp_index, track, k, |ch| {
            let out = if ch.snapshot < seg.start + overlap_in {
                let prev = incoming.next().filter(|p| p.snapshot == ch.snapshot).ok_or_else(|| config!("overlap misaligned"))?;
                let w = track.crossfade_weight(k - 1, ch.snapshot).unwrap_or(1.0);
                cross_fade(&prev, &ch, w)
            } else {
                ch
            };
            if out.snapshot >= held_from {
                pending.push(out);
                Ok(())
            } else {
                f(out)
            }
        })?;
    }
    pending.into_iter().try_for_each(f)
}

/// Channel of one link at one snapshot.
pub fn simulate_snapshot(scenario: &Scenario, trp_index: usize, snapshot: usize) -> Result<SnapshotChannel> {
    let track = scenario_track(scenario)?;
    if snapshot >= track.positions().len() {
        return Err(config!("snapshot {snapshot} is out of range (0..{})", track.positions().len()));
    }
    let mut found = None;
    for_each_snapshot(scenario, trp_index, &track, |c| {
        if c.snapshot == snapshot {
            found = Some(c);
        }
        Ok(())
    })?;
    found.ok_or_else(|| config!("snapshot {snapshot} was not produced"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cluster::{ClusterGeometry, ClusterSpec, PowerRule, RandomClusterParams};
    use crate::geometry::DirectionAngles;
    use crate::metrics::MetricsConfig;
    use crate::propagation::{GroundReflection, RfConfig};
    use crate::scenario::{DriftingConfig, Hall, SpatialConsistency, Trp, UeTrack};

    const LAMBDA: f64 = SPEED_OF_LIGHT / 3.75e9;

    fn fixed_path(rx: Vec3) -> ResolvedPath {
        let p = Vec3::new(10.0, 5.0, 2.0);
        let mut path = ResolvedPath::through(Vec3::new(0.0, 0.0, 3.0), rx, p, p, PathOrigin::Random { segment: 0 }, LinkId { trp: 0, ue: 0 }).unwrap();
        path.phase = 0.4;
        path
    }

    #[test]
    fn zero_displacement_is_identity() {
        let rx = Vec3::new(4.0, 4.0, 1.5);
        let p = fixed_path(rx);
        assert_eq!(update_path(&p, rx, LAMBDA).unwrap(), p);
    }

    #[test]
    fn moving_one_wavelength_away() {
        let rx = Vec3::new(4.0, 4.0, 1.5);
        let p = fixed_path(rx);
        let away = (rx - p.lbs).normalized().unwrap();
        let q = update_path(&p, rx + away * LAMBDA, LAMBDA).unwrap();
        assert!(((q.delay - p.delay) - LAMBDA / SPEED_OF_LIGHT).abs() < 1e-18);
        assert!(((q.delay - p.delay) * 1e9 - 0.2667).abs() < 1e-4);
        let dphi = wrap_phase(q.phase - p.phase);
        assert!(dphi.min(TAU - dphi) < 1e-9);
    }

    #[test]
    fn perpendicular_step_is_second_order() {
        let rx = Vec3::new(4.0, 4.0, 1.5);
        let p = fixed_path(rx);
        let a = p.a.norm();
        let perp = p.a.cross(Vec3::Z).normalized().unwrap();
        for delta in [1e-3, 3e-3, 1e-2] {
            let q = update_path(&p, rx + perp * delta, LAMBDA).unwrap();
            // finite-difference oracle: exact leg length against the quadratic term
            let exact = (a * a + delta * delta).sqrt() - a;
            let change = q.length() - p.length();
            assert!((change - exact).abs() < 1e-12);
            assert!((change - delta * delta / (2.0 * a)).abs() < delta.powi(4) / a.powi(3));
        }
    }

    #[test]
    fn receiver_on_scatterer_is_degenerate() {
        let p = fixed_path(Vec3::new(4.0, 4.0, 1.5));
        assert!(update_path(&p, p.lbs, LAMBDA).is_err());
    }

    #[test]
    fn phase_increments_integrate() {
        let rx = Vec3::new(4.0, 4.0, 1.5);
        let p = fixed_path(rx);
        let step = Vec3::new(0.013, -0.021, 0.004);
        let mut fine = p.clone();
        for i in 1..=100 {
            fine = update_path(&fine, rx + step * (i as f64 / 100.0 * 37.0), LAMBDA).unwrap();
        }
        let coarse = update_path(&p, rx + step * 37.0, LAMBDA).unwrap();
        let moved = (step * 37.0).norm();
        let d = wrap_phase(fine.phase - coarse.phase);
        assert!(d.min(TAU - d) < 1e-9 * moved.max(1.0) * 100.0);
    }

    fn path_with(origin: PathOrigin, magnitude: f64, phase: f64) -> ResolvedPath {
        let mut p = ResolvedPath::line_of_sight(Vec3::ZERO, Vec3::X, LinkId { trp: 0, ue: 0 }).unwrap();
        p.origin = origin;
        p.magnitude = magnitude;
        p.phase = phase;
        p
    }

    fn channel(paths: Vec<ResolvedPath>) -> SnapshotChannel {
        SnapshotChannel { snapshot: 0, link: LinkId { trp: 0, ue: 0 }, paths }
    }

    #[test]
    fn crossfade_boundaries() {
        let a = channel(alloc::vec![path_with(PathOrigin::Los, 1.0, 0.0), path_with(PathOrigin::Random { segment: 0 }, 0.5, 1.0)]);
        let b = channel(alloc::vec![path_with(PathOrigin::Los, 1.0, 0.0), path_with(PathOrigin::Random { segment: 1 }, 0.7, 2.0)]);
        let pure_a = cross_fade(&a, &b, 0.0);
        assert_eq!(pure_a.paths, a.paths);
        let pure_b = cross_fade(&a, &b, 1.0);
        assert_eq!(pure_b.paths.len(), 2);
        assert_eq!(pure_b.paths[1].origin, PathOrigin::Random { segment: 1 });
        assert_eq!(pure_b.paths[1].magnitude, 0.7);
        let mid = cross_fade(&a, &b, 0.5);
        assert_eq!(mid.paths.iter().filter(|p| p.origin == PathOrigin::Los).count(), 1);
        assert_eq!(mid.paths[0], a.paths[0]);
    }

    #[test]
    fn track_segmentation() {
        let positions: Vec<Vec3> = (0..100).map(|i| Vec3::new(i as f64 * 0.1, 0.0, 1.0)).collect();
        let t = Track::segmented(positions, 2.0, 0.25).unwrap();
        assert_eq!(t.segments()[0], Segment { start: 0, len: 25 });
        assert_eq!(t.segments()[1].start, 20);
        assert_eq!(t.overlaps()[0], 5);
        assert_eq!(t.segments().last().unwrap().end(), 100);
        assert_eq!(t.crossfade_weight(0, 19), None);
        assert!((t.crossfade_weight(0, 20).unwrap() - 1.0 / 6.0).abs() < 1e-12);
        let static_track = Track::segmented(alloc::vec![Vec3::Z; 50], 2.0, 0.25).unwrap();
        assert_eq!(static_track.segments(), &[Segment { start: 0, len: 50 }]);
        assert!(Track::new(alloc::vec![Vec3::Z; 10], alloc::vec![Segment { start: 0, len: 6 }, Segment { start: 5, len: 5 }], alloc::vec![0]).is_err());
    }

    pub(crate) fn small_scenario(ue: UeTrack, snapshots: usize) -> Scenario {
        Scenario {
            name: "test".into(),
            description: Default::default(),
            seed: 5,
            snapshots,
            rf: RfConfig::new(3.75e9, 100e6).unwrap(),
            hall: Hall { min: Vec3::ZERO, max: Vec3::new(30.0, 45.0, 10.0) },
            trps: alloc::vec![Trp { id: 1, position: Vec3::new(2.0, 3.0, 4.0) }],
            ue,
            obstacle: None,
            sdcs: alloc::vec![ClusterSpec {
                name: "pillar".into(),
                geometry: ClusterGeometry::Fixed { point: Vec3::new(20.0, 30.0, 2.0) },
                power: PowerRule::RelativeToFspl { extra_loss_db: 3.0 },
            }],
            random_clusters: RandomClusterParams { count: 6, subpaths: 4, ..Default::default() },
            spatial_consistency: SpatialConsistency::default(),
            ground_reflection: GroundReflection::default(),
            drifting: DriftingConfig::default(),
            metrics: MetricsConfig::default(),
        }
    }

    #[test]
    fn static_scene_gives_identical_snapshots() {
        let sc = small_scenario(UeTrack::Static { position: Vec3::new(15.0, 20.0, 1.5) }, 8);
        let chans = simulate_link(&sc, 0).unwrap();
        assert_eq!(chans.len(), 8);
        for c in &chans[1..] {
            assert_eq!(c.paths.len(), chans[0].paths.len());
            for (p, q) in c.paths.iter().zip(&chans[0].paths) {
                assert_eq!(p.amplitude(), q.amplitude());
                assert_eq!(p.delay, q.delay);
            }
        }
        assert_eq!(chans[0].path_count(), 1 + 1 + 1 + 6);
    }

    #[test]
    fn los_delay_follows_geometry_and_scatterers_stay_fixed() {
        let sc = small_scenario(UeTrack::Linear { start: Vec3::new(10.0, 10.0, 1.5), end: Vec3::new(13.0, 14.0, 1.5) }, 200);
        let track = scenario_track(&sc).unwrap();
        assert!(track.segments().len() > 1);
        let chans = simulate_track(&sc, 0, &track).unwrap();
        assert_eq!(chans.len(), 200);
        let trp = sc.trps[0].position;
        for (s, c) in chans.iter().enumerate() {
            let los = c.los().unwrap();
            let expected = trp.distance(track.positions()[s]) / SPEED_OF_LIGHT;
            assert!((los.delay - expected).abs() <= 1e-12 * expected);
            assert_eq!(c.snapshot, s);
        }
        // inside the first segment, before any overlap, random scatterers never move
        let first = &track.segments()[0];
        let start = &chans[first.start];
        for s in first.start..first.end() - track.overlaps()[0] {
            for (p, q) in chans[s].random_paths().zip(start.random_paths()) {
                assert_eq!(p.fbs, q.fbs);
                assert_eq!(p.lbs, q.lbs);
            }
        }
    }

    #[test]
    fn doppler_rate_towards_fixed_cluster() {
        // UE walks at 1 m/s straight at a fixed scatterer; snapshots 1 ms apart
        let target = Vec3::new(20.0, 30.0, 2.0);
        let start = Vec3::new(12.0, 18.0, 2.0);
        let dir = (target - start).normalized().unwrap();
        let dt = 1e-3;
        let positions: Vec<Vec3> = (0..101).map(|i| start + dir * (i as f64 * dt)).collect();
        let mut sc = small_scenario(UeTrack::Waypoints { positions: positions.clone() }, 101);
        sc.ground_reflection.enabled = false;
        let chans = simulate_link(&sc, 0).unwrap();
        let sdc = |c: &SnapshotChannel| c.paths.iter().find(|p| matches!(p.origin, PathOrigin::Sdc { .. })).unwrap().phase;
        let mut total = 0.0;
        for w in chans.windows(2) {
            let d = wrap_phase(sdc(&w[1]) - sdc(&w[0]));
            total += if d > core::f64::consts::PI { d - TAU } else { d };
        }
        let rate_hz = total / TAU / (100.0 * dt);
        let expected = 1.0 / LAMBDA;
        assert!((rate_hz - expected).abs() < 0.01 * expected, "rate {rate_hz} vs {expected}");
        let _ = DirectionAngles::new(0.0, 0.0);
    }
}
