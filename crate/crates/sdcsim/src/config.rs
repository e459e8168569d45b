//! Scenario files: parsing, validation and canonical serialization.

use std::collections::HashSet;
use std::fmt;

use sdcsim_core::cluster::ClusterGeometry;
use sdcsim_core::scenario::{Scenario, UeTrack};
use sdcsim_core::Vec3;
use sha2::{Digest, Sha256};

/// A problem with a scenario file, addressed by the JSON path of the
/// offending key.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScenarioError {
    pub path: String,
    pub message: String,
}

impl ScenarioError {
    fn new(path: impl Into<String>, message: impl fmt::Display) -> Self {
        ScenarioError { path: path.into(), message: message.to_string() }
    }
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.path.is_empty() || self.path == "." {
            write!(f, "{}", self.message)
        } else {
            write!(f, "{}: {}", self.path, self.message)
        }
    }
}

impl std::error::Error for ScenarioError {}

/// Parses and validates a JSON scenario.
pub fn parse_scenario(text: &str) -> Result<Scenario, ScenarioError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let scenario: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        ScenarioError::new(path, e.into_inner())
    })?;
    validate_scenario(&scenario)?;
    Ok(scenario)
}

/// Pretty JSON with a stable key order.
pub fn to_json(scenario: &Scenario) -> String {
    serde_json::to_string_pretty(scenario).expect("scenario serialization cannot fail")
}

/// SHA-256 of the compact canonical JSON, hex encoded.
pub fn scenario_hash(scenario: &Scenario) -> String {
    let compact = serde_json::to_vec(scenario).expect("scenario serialization cannot fail");
    Sha256::digest(&compact).iter().map(|b| format!("{b:02x}")).collect()
}

fn check(ok: bool, path: impl Into<String>, message: impl fmt::Display) -> Result<(), ScenarioError> {
    if ok {
        Ok(())
    } else {
        Err(ScenarioError::new(path, message))
    }
}

fn core_check(result: sdcsim_core::Result<()>, path: &str) -> Result<(), ScenarioError> {
    result.map_err(|e| ScenarioError::new(path, e))
}

fn fmt_point(p: Vec3) -> String {
    format!("[{}, {}, {}]", p.x, p.y, p.z)
}

/// Checks every invariant a scenario must satisfy before simulation.
pub fn validate_scenario(s: &Scenario) -> Result<(), ScenarioError> {
    check(!s.name.trim().is_empty(), "name", "must not be empty")?;
    check(s.snapshots >= 1, "snapshots", "must be at least 1")?;
    core_check(s.rf.validate(), "rf")?;

    let hall = &s.hall;
    check(
        hall.min.is_finite() && hall.max.is_finite() && hall.min.x < hall.max.x && hall.min.y < hall.max.y && hall.min.z < hall.max.z,
        "hall",
        "`min` must be below `max` on every axis",
    )?;

    check(!s.trps.is_empty(), "trps", "at least one TRP is required")?;
    let mut ids = HashSet::new();
    for (i, trp) in s.trps.iter().enumerate() {
        check(ids.insert(trp.id), format!("trps[{i}].id"), format_args!("TRP id {} is used twice", trp.id))?;
        check(
            hall.contains(trp.position),
            format!("trps[{i}].position"),
            format_args!("TRP {} at {} is outside the hall", trp.id, fmt_point(trp.position)),
        )?;
    }

    match &s.ue {
        UeTrack::Static { position } => {
            check(hall.contains(*position), "ue.position", format_args!("UE at {} is outside the hall", fmt_point(*position)))?;
        }
        UeTrack::Linear { start, end } => {
            check(hall.contains(*start), "ue.start", "UE track starts outside the hall")?;
            check(hall.contains(*end), "ue.end", "UE track ends outside the hall")?;
        }
        UeTrack::Waypoints { positions } => {
            check(
                positions.len() == s.snapshots,
                "ue.positions",
                format_args!("{} waypoints for {} snapshots", positions.len(), s.snapshots),
            )?;
            for (i, p) in positions.iter().enumerate() {
                check(hall.contains(*p), format!("ue.positions[{i}]"), "waypoint is outside the hall")?;
            }
        }
    }
    let ue = s.ue_positions();
    check(ue.iter().all(|p| p.z > 0.0), "ue", "the UE must stay above the floor")?;
    for (i, trp) in s.trps.iter().enumerate() {
        check(
            ue.iter().all(|p| p.distance(trp.position) > 0.0),
            format!("trps[{i}].position"),
            format_args!("TRP {} coincides with the UE", trp.id),
        )?;
    }

    if let Some(obstacle) = &s.obstacle {
        core_check(obstacle.validate(), "obstacle")?;
        check(hall.contains(obstacle.start), "obstacle.start", "obstacle starts outside the hall")?;
        check(hall.contains(obstacle.end), "obstacle.end", "obstacle ends outside the hall")?;
    }

    let mut names = HashSet::new();
    for (i, sdc) in s.sdcs.iter().enumerate() {
        let path = format!("sdcs[{i}]");
        check(!sdc.name.is_empty(), format!("{path}.name"), "must not be empty")?;
        check(names.insert(sdc.name.as_str()), format!("{path}.name"), format_args!("cluster name `{}` is used twice", sdc.name))?;
        core_check(sdc.validate(), &path)?;
        if sdc.is_obstacle_attached() {
            check(s.obstacle.is_some(), &path, format_args!("cluster `{}` is attached to the obstacle but none is defined", sdc.name))?;
        }
        match &sdc.geometry {
            ClusterGeometry::Fixed { point } => {
                check(hall.contains(*point), format!("{path}.point"), format_args!("cluster `{}` is outside the hall", sdc.name))?;
            }
            ClusterGeometry::DiffractionEdge { edge } => {
                if let Some(o) = &s.obstacle {
                    check(
                        sdcsim_core::propagation::ObstaclePose::is_on_outline(o.width, o.height, *edge),
                        format!("{path}.edge"),
                        format_args!("cluster `{}` does not lie on the obstacle outline", sdc.name),
                    )?;
                }
            }
            ClusterGeometry::Relative { offset, .. } => {
                check(offset.is_finite(), format!("{path}.offset"), "must be finite")?;
            }
            ClusterGeometry::SpecularReflector { .. } => {}
        }
    }

    core_check(s.random_clusters.validate(), "random_clusters")?;
    let sc = &s.spatial_consistency;
    check(
        sc.decorrelation_distance > 0.0 && sc.decorrelation_distance.is_finite(),
        "spatial_consistency.decorrelation_distance",
        "must be > 0",
    )?;
    check(sc.sinusoids >= 1, "spatial_consistency.sinusoids", "must be at least 1")?;
    check(sc.shadowing_std_db >= 0.0 && sc.shadowing_std_db.is_finite(), "spatial_consistency.shadowing_std_db", "must be >= 0")?;
    let gr = &s.ground_reflection;
    check(gr.permittivity >= 1.0 && gr.permittivity.is_finite(), "ground_reflection.permittivity", "must be >= 1")?;
    if gr.enabled {
        check(s.trps.iter().all(|t| t.position.z > 0.0), "ground_reflection", "ground reflection needs every TRP above the floor")?;
    }
    let d = &s.drifting;
    check(d.segment_length_wavelengths > 0.0, "drifting.segment_length_wavelengths", "must be > 0")?;
    check((0.0..1.0).contains(&d.overlap_fraction), "drifting.overlap_fraction", "must be in [0, 1)")?;
    core_check(s.metrics.validate(), "metrics")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::reference_scenario;

    #[test]
    fn reference_round_trips() {
        let s = reference_scenario();
        let text = to_json(&s);
        let back = parse_scenario(&text).unwrap();
        assert_eq!(to_json(&back), text);
        assert_eq!(scenario_hash(&back), scenario_hash(&s));
    }

    #[test]
    fn trp_outside_hall_names_the_trp() {
        let mut s = reference_scenario();
        s.trps[2].position = Vec3::new(-5.0, 1.0, 2.0);
        let err = parse_scenario(&to_json(&s)).unwrap_err();
        assert_eq!(err.path, "trps[2].position");
        assert!(err.message.contains(&format!("TRP {}", s.trps[2].id)), "{err}");
    }

    #[test]
    fn missing_seed_is_reported() {
        let mut v: serde_json::Value = serde_json::from_str(&to_json(&reference_scenario())).unwrap();
        v.as_object_mut().unwrap().remove("seed");
        let err = parse_scenario(&v.to_string()).unwrap_err();
        assert!(err.message.contains("seed"), "{err}");
    }

    #[test]
    fn type_mismatch_names_the_key() {
        let mut v: serde_json::Value = serde_json::from_str(&to_json(&reference_scenario())).unwrap();
        v["rf"]["carrier_hz"] = serde_json::json!("fast");
        let err = parse_scenario(&v.to_string()).unwrap_err();
        assert_eq!(err.path, "rf.carrier_hz");
    }

    #[test]
    fn duplicate_cluster_names_are_rejected() {
        let mut s = reference_scenario();
        let first = s.sdcs[0].name.clone();
        s.sdcs[1].name = first;
        let err = validate_scenario(&s).unwrap_err();
        assert_eq!(err.path, "sdcs[1].name");
    }

    #[test]
    fn zero_snapshots_are_rejected() {
        let mut s = reference_scenario();
        s.snapshots = 0;
        assert_eq!(validate_scenario(&s).unwrap_err().path, "snapshots");
    }

    #[test]
    fn hash_depends_on_content() {
        let a = reference_scenario();
        let mut b = a.clone();
        b.seed += 1;
        assert_ne!(scenario_hash(&a), scenario_hash(&b));
        assert_eq!(scenario_hash(&a).len(), 64);
    }
}
