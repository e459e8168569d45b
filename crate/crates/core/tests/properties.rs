use core::f64::consts::{FRAC_PI_2, PI, TAU};

use proptest::prelude::*;
use sdcsim_core::cluster::{positions_from_angles_length, LinkId, PathOrigin, ResolvedPath};
use sdcsim_core::drifting::{update_path, SnapshotChannel};
use sdcsim_core::geometry::{mirror_point, specular_path_length, specular_reflection_point, vector_to_angles};
use sdcsim_core::metrics::{band_limited_profile, MetricsConfig, PulseShape};
use sdcsim_core::positioning::{ls_position, RangeMeasurement, SolveMode};
use sdcsim_core::propagation::{knife_edge_loss_db, wrap_phase, RfConfig};
use sdcsim_core::{DirectionAngles, RectPlane, Vec3};

const LINK: LinkId = LinkId { trp: 1, ue: 0 };

fn coord() -> impl Strategy<Value = f64> {
    -50.0..50.0f64
}

fn point() -> impl Strategy<Value = Vec3> {
    (coord(), coord(), coord()).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn direction() -> impl Strategy<Value = Vec3> {
    point().prop_filter("nonzero", |v| v.norm() > 1e-3).prop_map(|v| v.normalized().unwrap())
}

fn angles() -> impl Strategy<Value = DirectionAngles> {
    (-PI..PI, -FRAC_PI_2 + 1e-6..FRAC_PI_2 - 1e-6).prop_map(|(a, e)| DirectionAngles::new(a, e))
}

proptest! {
    #[test]
    fn angles_round_trip(a in angles()) {
        let back = vector_to_angles(a.unit_vector()).unwrap();
        prop_assert!((back.elevation() - a.elevation()).abs() < 1e-9);
        let d = wrap_phase(back.azimuth() - a.azimuth());
        prop_assert!(d.min(TAU - d) < 1e-9);
    }

    #[test]
    fn mirror_is_an_involution(p in point(), c in point(), n in direction()) {
        let plane = RectPlane::infinite(c, n).unwrap();
        let twice = mirror_point(mirror_point(p, &plane), &plane);
        prop_assert!(twice.distance(p) < 1e-9 * (1.0 + p.norm() + c.norm()));
    }

    #[test]
    fn specular_point_has_image_length(tx in point(), rx in point(), c in point(), n in direction()) {
        let plane = RectPlane::infinite(c, n).unwrap();
        let (dt, dr) = (plane.signed_distance(tx), plane.signed_distance(rx));
        prop_assume!(dt * dr > 0.0 && dt.abs() > 1e-3 && dr.abs() > 1e-3);
        let q = specular_reflection_point(tx, rx, &plane).unwrap().unwrap();
        let len = tx.distance(q) + q.distance(rx);
        prop_assert!((len - specular_path_length(tx, rx, &plane)).abs() < 1e-9 * len);
        prop_assert!(plane.signed_distance(q).abs() < 1e-9 * (1.0 + q.norm()));
    }

    #[test]
    fn dual_bounce_reconstructs_length(tx in point(), rx in point(), dep in angles(), arr in angles(), excess in 0.0..200.0f64) {
        let direct = tx.distance(rx);
        let length = direct + excess;
        let (fbs, lbs) = positions_from_angles_length(tx, rx, dep, arr, length).unwrap();
        let total = tx.distance(fbs) + fbs.distance(lbs) + lbs.distance(rx);
        prop_assert!((total - length).abs() <= 1e-9 * length.max(1e-3));
        // both scatterers at the same distance from their endpoint
        prop_assert!((tx.distance(fbs) - rx.distance(lbs)).abs() < 1e-9 * (1.0 + length));
        prop_assert!(positions_from_angles_length(tx, rx, dep, arr, direct * 0.99 - 1e-3).is_err());
    }

    #[test]
    fn dual_bounce_distance_grows_with_length(tx in point(), rx in point(), dep in angles(), arr in angles(), e1 in 0.0..100.0f64, e2 in 0.0..100.0f64) {
        let direct = tx.distance(rx);
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let (f1, _) = positions_from_angles_length(tx, rx, dep, arr, direct + lo).unwrap();
        let (f2, _) = positions_from_angles_length(tx, rx, dep, arr, direct + hi).unwrap();
        prop_assert!(tx.distance(f2) + 1e-9 >= tx.distance(f1));
    }

    #[test]
    fn knife_edge_is_monotone(a in -3.0..10.0f64, b in -3.0..10.0f64) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(knife_edge_loss_db(hi) + 1e-12 >= knife_edge_loss_db(lo));
        prop_assert!(knife_edge_loss_db(lo) >= 0.0);
    }

    #[test]
    fn phase_update_tracks_length(rx in point(), lbs in point(), step in point()) {
        prop_assume!(lbs.distance(rx) > 0.1 && lbs.distance(rx + step * 0.01) > 0.1);
        let lambda = 0.08;
        let fbs = Vec3::new(0.0, 0.0, 60.0);
        let mut p = ResolvedPath::through(Vec3::new(0.0, 0.0, 70.0), rx, fbs, lbs, PathOrigin::Random { segment: 0 }, LINK).unwrap();
        p.phase = 1.0;
        let q = update_path(&p, rx + step * 0.01, lambda).unwrap();
        let expected = wrap_phase(1.0 - TAU * (q.length() - p.length()) / lambda);
        let d = wrap_phase(q.phase - expected);
        prop_assert!(d.min(TAU - d) < 1e-6);
        prop_assert_eq!(q.fbs, p.fbs);
        prop_assert_eq!(q.b, p.b);
    }

    #[test]
    fn profile_is_linear(
        first in prop::collection::vec((10e-9..400e-9f64, 0.01..1.0f64, 0.0..TAU), 1..6),
        second in prop::collection::vec((10e-9..400e-9f64, 0.01..1.0f64, 0.0..TAU), 1..6),
        sinc in any::<bool>(),
    ) {
        let rf = RfConfig::new(3.75e9, 100e6).unwrap();
        let cfg = MetricsConfig { pulse: if sinc { PulseShape::Sinc } else { PulseShape::RaisedCosine { roll_off: 0.5 } }, ..Default::default() };
        let make = |set: &[(f64, f64, f64)]| -> Vec<ResolvedPath> {
            set.iter().map(|&(d, m, ph)| {
                let mut p = ResolvedPath::line_of_sight(Vec3::ZERO, Vec3::X, LINK).unwrap();
                p.delay = d;
                p.magnitude = m;
                p.phase = ph;
                p
            }).collect()
        };
        let (a, b) = (make(&first), make(&second));
        let both: Vec<ResolvedPath> = a.iter().chain(&b).cloned().collect();
        let ch = |paths: Vec<ResolvedPath>| SnapshotChannel { snapshot: 0, link: LINK, paths };
        let pa = band_limited_profile(&ch(a), &rf, &cfg).unwrap();
        let pb = band_limited_profile(&ch(b), &rf, &cfg).unwrap();
        let pab = band_limited_profile(&ch(both), &rf, &cfg).unwrap();
        // each profile ends 4 pulse widths after its own last path; compare on the common grid
        let n = pa.len().min(pb.len());
        for k in 0..n {
            prop_assert!((pab.samples[k] - (pa.samples[k] + pb.samples[k])).norm() < 1e-9);
        }
    }

    #[test]
    fn positioning_is_translation_equivariant(truth in point(), shift in point(), bias in -2.0..2.0f64) {
        let trps = [
            Vec3::new(-60.0, -60.0, 5.0),
            Vec3::new(60.0, -60.0, 20.0),
            Vec3::new(60.0, 60.0, -10.0),
            Vec3::new(-60.0, 60.0, 0.0),
            Vec3::new(0.0, -70.0, 40.0),
            Vec3::new(0.0, 70.0, -35.0),
        ];
        let ranges = |offset: Vec3| -> Vec<RangeMeasurement> {
            trps.iter().enumerate().map(|(i, &t)| RangeMeasurement {
                trp_id: i as u32,
                trp: t + offset,
                range: t.distance(truth) + if i == 0 { bias } else { 0.0 },
                olos: false,
            }).collect()
        };
        let start = Vec3::new(1.0, -2.0, 3.0);
        let a = ls_position(&ranges(Vec3::ZERO), start, SolveMode::Full3d).unwrap();
        let b = ls_position(&ranges(shift), start + shift, SolveMode::Full3d).unwrap();
        let gap = (b.position - shift).distance(a.position);
        // iterations stop at a 1e-6 m step, so only rounding separates the runs
        prop_assert!(gap < 1e-9 * (1.0 + shift.norm() + truth.norm()), "gap {} after {} / {} iterations", gap, a.iterations, b.iterations);
    }
}
