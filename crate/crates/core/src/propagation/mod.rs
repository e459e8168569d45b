//! Path gains: free-space loss, ground reflection, knife-edge diffraction,
//! obstacle blockage and phases.

use core::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::cluster::{ClusterGeometry, ClusterSpec, PathOrigin, PowerRule, ResolvedPath};
use crate::error::{config, domain, Result};
use crate::geometry::{segment_intersects_rect, Vec3};
use crate::SPEED_OF_LIGHT;

mod field;
mod obstacle;

pub use field::{correlated_gaussian, CorrelatedField};
pub use obstacle::{ObstaclePose, ObstacleSpec};

/// Carrier and bandwidth.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RfConfig {
    pub carrier_hz: f64,
    pub bandwidth_hz: f64,
}

impl RfConfig {
    pub fn new(carrier_hz: f64, bandwidth_hz: f64) -> Result<Self> {
        let rf = RfConfig { carrier_hz, bandwidth_hz };
        rf.validate()?;
        Ok(rf)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.carrier_hz > 0.0 && self.carrier_hz.is_finite()) {
            return Err(config!("carrier frequency must be > 0"));
        }
        if !(self.bandwidth_hz > 0.0 && self.bandwidth_hz < self.carrier_hz) {
            return Err(config!("bandwidth must be > 0 and below the carrier frequency"));
        }
        Ok(())
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_hz
    }
}

/// Free-space path loss in dB.
pub fn fspl_db(distance: f64, carrier_hz: f64) -> Result<f64> {
    if !(distance > 0.0) {
        return Err(domain!("free-space loss needs a positive distance, got {distance}"));
    }
    Ok(20.0 * (4.0 * PI * distance * carrier_hz / SPEED_OF_LIGHT).log10())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Polarization {
    #[default]
    Perpendicular,
    Parallel,
}

/// Fresnel reflection coefficient of a lossless dielectric half-space for a
/// wave at `grazing` radians above the surface. Both polarizations tend to
/// -1 at grazing incidence.
pub fn fresnel_reflection(grazing: f64, permittivity: f64, polarization: Polarization) -> Complex64 {
    let (s, c) = grazing.clamp(0.0, FRAC_PI_2).sin_cos();
    let root = (permittivity - c * c).max(0.0).sqrt();
    let r = match polarization {
        Polarization::Perpendicular => (s - root) / (s + root),
        Polarization::Parallel => (permittivity * s - root) / (permittivity * s + root),
    };
    Complex64::new(if r.is_nan() { 0.0 } else { r }, 0.0)
}

/// Fresnel-Kirchhoff diffraction parameter for an edge `h` meters into the
/// direct path (negative for clearance), `d1`/`d2` from the endpoints.
pub fn fresnel_parameter(h: f64, d1: f64, d2: f64, wavelength: f64) -> Result<f64> {
    if !(d1 > 0.0 && d2 > 0.0 && wavelength > 0.0) {
        return Err(domain!("distances and wavelength must be positive"));
    }
    Ok(h * (2.0 * (d1 + d2) / (wavelength * d1 * d2)).sqrt())
}

/// Single knife-edge diffraction loss in dB.
pub fn knife_edge_loss_db(nu: f64) -> f64 {
    if nu <= -0.78 {
        return 0.0;
    }
    let x = nu - 0.1;
    6.9 + 20.0 * ((x * x + 1.0).sqrt() + x).log10()
}

/// Fresnel parameter of a diffraction edge for the direct path `tx → rx`.
///
/// The edge height is measured in the obstacle plane, from the point where
/// the direct path crosses that plane to the edge, positive when the crossing
/// lies on the obstacle side of the edge. `d1`/`d2` come from projecting the
/// edge onto the direct path. Returns `None` when the obstacle plane is not
/// between the endpoints, i.e. the edge does not obstruct the direct path.
pub fn edge_fresnel_parameter(tx: Vec3, rx: Vec3, edge: Vec3, outward: Vec3, pose: &ObstaclePose, wavelength: f64) -> Option<f64> {
    let dt = pose.face.signed_distance(tx);
    let dr = pose.face.signed_distance(rx);
    if dt == 0.0 || dr == 0.0 || dt.signum() == dr.signum() {
        return None;
    }
    let crossing = tx.lerp(rx, dt / (dt - dr));
    let h = (edge - crossing).dot(outward);
    let los = rx - tx;
    let direct = los.norm();
    let t = (edge - tx).dot(los) / (direct * direct);
    if !(t > 0.0 && t < 1.0) {
        return None;
    }
    fresnel_parameter(h, t * direct, (1.0 - t) * direct, wavelength).ok()
}

/// Attenuation applied to `path` by the obstacle: the blockage loss when any
/// of its segments crosses the obstacle, else 0.
pub fn blockage_attenuation_db(path: &ResolvedPath, obstacle: &ObstaclePose) -> f64 {
    if is_blocked(path, obstacle) {
        obstacle.block_loss_db
    } else {
        0.0
    }
}

pub fn is_blocked(path: &ResolvedPath, obstacle: &ObstaclePose) -> bool {
    let (tx, rx) = (path.tx(), path.rx());
    if path.origin == PathOrigin::Los {
        return segment_intersects_rect(tx, rx, &obstacle.face);
    }
    let segments = [(tx, path.fbs), (path.fbs, path.lbs), (path.lbs, rx)];
    segments
        .iter()
        .filter(|(p, q)| p.distance(*q) > 0.0)
        .any(|(p, q)| segment_intersects_rect(*p, *q, &obstacle.face))
}

/// Ground-reflection settings.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GroundReflection {
    pub enabled: bool,
    /// Relative permittivity of the floor.
    pub permittivity: f64,
    #[cfg_attr(feature = "serde", serde(default))]
    pub polarization: Polarization,
}

impl Default for GroundReflection {
    fn default() -> Self {
        GroundReflection { enabled: true, permittivity: 5.0, polarization: Polarization::Perpendicular }
    }
}

/// How the gain of a path is computed.
#[derive(Debug, Clone, Copy)]
pub enum AmplitudeRule<'a> {
    Los,
    GroundReflection(&'a GroundReflection),
    Sdc(&'a ClusterSpec),
    /// Random sub-path of the given power (dB, before blockage). Its phase is
    /// the one carried by the path.
    Random { power_db: f64 },
}

/// Magnitude, phase and blockage state of a path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathGain {
    pub magnitude: f64,
    pub phase: f64,
    pub blocked: bool,
}

impl PathGain {
    pub fn amplitude(&self) -> Complex64 {
        Complex64::from_polar(self.magnitude, self.phase)
    }

    pub fn apply(&self, path: &mut ResolvedPath) {
        path.magnitude = self.magnitude;
        path.phase = self.phase;
        path.blocked = self.blocked;
    }
}

/// Phase of a path of `length` meters, in `[0, 2π)`.
pub fn propagation_phase(length: f64, wavelength: f64) -> f64 {
    wrap_phase(-TAU * length / wavelength)
}

pub fn wrap_phase(phase: f64) -> f64 {
    let w = phase - TAU * (phase / TAU).floor();
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Gain of one path.
///
/// Deterministic paths get `-FSPL(length) - extra loss - blockage - knife
/// edge loss + reflection gain` and a phase from their length; random paths
/// keep their own power and phase and only see blockage.
pub fn path_amplitude(
    path: &ResolvedPath,
    rule: AmplitudeRule<'_>,
    rf: &RfConfig,
    obstacle: Option<&ObstaclePose>,
) -> Result<PathGain> {
    let blocked = obstacle.is_some_and(|o| is_blocked(path, o));
    let blockage = if blocked { obstacle.map_or(0.0, |o| o.block_loss_db) } else { 0.0 };
    let wavelength = rf.wavelength();
    let length = path.length();

    let (gain_db, phase) = match rule {
        AmplitudeRule::Random { power_db } => (power_db - blockage, path.phase),
        AmplitudeRule::Los => (-fspl_db(length, rf.carrier_hz)? - blockage, propagation_phase(length, wavelength)),
        AmplitudeRule::GroundReflection(ground) => {
            let grazing = (path.b.z.abs() / path.b.norm()).asin();
            let r = fresnel_reflection(grazing, ground.permittivity, ground.polarization);
            let gain = -fspl_db(length, rf.carrier_hz)? - blockage + 20.0 * r.norm().log10();
            (gain, wrap_phase(propagation_phase(length, wavelength) + r.arg()))
        }
        AmplitudeRule::Sdc(spec) => {
            let mut gain = -fspl_db(length, rf.carrier_hz)? - spec.power.extra_loss_db() - blockage;
            if let (PowerRule::KnifeEdge { .. }, ClusterGeometry::DiffractionEdge { edge }) = (spec.power, &spec.geometry) {
                let pose = obstacle.ok_or_else(|| config!("cluster `{}` needs an obstacle", spec.name))?;
                let nu = edge_fresnel_parameter(
                    path.tx(),
                    path.rx(),
                    pose.edge_to_world(*edge),
                    pose.edge_outward(*edge),
                    pose,
                    wavelength,
                );
                gain -= nu.map_or(0.0, knife_edge_loss_db);
            }
            (gain, propagation_phase(length, wavelength))
        }
    };
    Ok(PathGain { magnitude: 10f64.powf(gain_db / 20.0), phase, blocked })
}
