//! Vector and angle algebra, image-method reflections and segment/rectangle
//! intersection.
//!
//! Directions use geographic angles: azimuth measured counter-clockwise from
//! the x axis in the horizontal plane, elevation measured up from the
//! horizontal plane.

use core::f64::consts::{FRAC_PI_2, PI, TAU};
use core::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{degenerate, domain, Result};

/// Numerical slack used when classifying points against planes and extents.
const PLANE_EPS: f64 = 1e-12;

/// A point or displacement in meters.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(from = "[f64; 3]", into = "[f64; 3]"))]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);
    pub const X: Vec3 = Vec3::new(1.0, 0.0, 0.0);
    pub const Y: Vec3 = Vec3::new(0.0, 1.0, 0.0);
    pub const Z: Vec3 = Vec3::new(0.0, 0.0, 1.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Vec3) -> Vec3 {
        Vec3::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn distance(self, other: Vec3) -> f64 {
        (self - other).norm()
    }

    /// Unit vector in the same direction, or `None` for a zero vector.
    pub fn normalized(self) -> Option<Vec3> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self / n)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Linear interpolation, `t = 0` gives `self`.
    pub fn lerp(self, other: Vec3, t: f64) -> Vec3 {
        self + (other - self) * t
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from([x, y, z]: [f64; 3]) -> Self {
        Vec3::new(x, y, z)
    }
}

impl From<Vec3> for [f64; 3] {
    fn from(v: Vec3) -> Self {
        [v.x, v.y, v.z]
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        *self = *self + o;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    fn div(self, s: f64) -> Vec3 {
        Vec3::new(self.x / s, self.y / s, self.z / s)
    }
}

/// A direction as azimuth in (-π, π] and elevation in [-π/2, π/2].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionAngles {
    azimuth: f64,
    elevation: f64,
}

impl DirectionAngles {
    /// Builds a direction from arbitrary angles, folding them into the
    /// canonical ranges. Elevations past a pole continue over it.
    pub fn new(azimuth: f64, elevation: f64) -> Self {
        if (-FRAC_PI_2..=FRAC_PI_2).contains(&elevation) {
            let azimuth = if elevation.abs() == FRAC_PI_2 { 0.0 } else { wrap_azimuth(azimuth) };
            DirectionAngles { azimuth, elevation }
        } else {
            let v = unit_vector_raw(azimuth, elevation);
            // unit_vector_raw never yields a zero vector
            vector_to_angles(v).unwrap_or(DirectionAngles { azimuth: 0.0, elevation: 0.0 })
        }
    }

    pub fn from_degrees(azimuth_deg: f64, elevation_deg: f64) -> Self {
        Self::new(azimuth_deg.to_radians(), elevation_deg.to_radians())
    }

    pub fn azimuth(&self) -> f64 {
        self.azimuth
    }

    pub fn elevation(&self) -> f64 {
        self.elevation
    }

    pub fn unit_vector(&self) -> Vec3 {
        angles_to_unit_vector(*self)
    }
}

/// Wraps an angle into (-π, π].
pub fn wrap_azimuth(a: f64) -> f64 {
    let w = a - TAU * ((a + PI) / TAU).floor();
    if w <= -PI {
        w + TAU
    } else {
        w
    }
}

fn unit_vector_raw(azimuth: f64, elevation: f64) -> Vec3 {
    let (sa, ca) = azimuth.sin_cos();
    let (se, ce) = elevation.sin_cos();
    Vec3::new(ce * ca, ce * sa, se)
}

pub fn angles_to_unit_vector(d: DirectionAngles) -> Vec3 {
    unit_vector_raw(d.azimuth, d.elevation)
}

/// Direction of `v`. The azimuth of a vertical vector is 0.
pub fn vector_to_angles(v: Vec3) -> Result<DirectionAngles> {
    if !(v.norm() > 0.0) {
        return Err(domain!("cannot take the direction of a zero vector"));
    }
    let horizontal = v.x.hypot(v.y);
    let elevation = v.z.atan2(horizontal);
    let azimuth = if horizontal == 0.0 { 0.0 } else { wrap_azimuth(v.y.atan2(v.x)) };
    Ok(DirectionAngles { azimuth, elevation })
}

/// A planar rectangle, or an unbounded plane when `infinite` is set.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(try_from = "RectPlaneDef", into = "RectPlaneDef"))]
pub struct RectPlane {
    center: Vec3,
    normal: Vec3,
    u_axis: Vec3,
    v_axis: Vec3,
    half_u: f64,
    half_v: f64,
    infinite: bool,
}

impl RectPlane {
    /// Rectangle centred at `center`. `u_hint` is projected into the plane to
    /// give the first in-plane axis; the second is `normal × u`.
    pub fn new(center: Vec3, normal: Vec3, u_hint: Vec3, half_u: f64, half_v: f64) -> Result<Self> {
        if !(half_u > 0.0 && half_v > 0.0) {
            return Err(domain!("rectangle half-extents must be positive, got {half_u} and {half_v}"));
        }
        let (normal, u_axis, v_axis) = frame(normal, u_hint)?;
        if !center.is_finite() {
            return Err(domain!("rectangle center is not finite"));
        }
        Ok(RectPlane { center, normal, u_axis, v_axis, half_u, half_v, infinite: false })
    }

    /// Unbounded plane through `point`.
    pub fn infinite(point: Vec3, normal: Vec3) -> Result<Self> {
        let n = normal.normalized().ok_or_else(|| domain!("plane normal must be nonzero"))?;
        let hint = if n.x.abs() < 0.9 { Vec3::X } else { Vec3::Y };
        let (normal, u_axis, v_axis) = frame(n, hint)?;
        Ok(RectPlane { center: point, normal, u_axis, v_axis, half_u: f64::INFINITY, half_v: f64::INFINITY, infinite: true })
    }

    pub fn center(&self) -> Vec3 {
        self.center
    }
    pub fn normal(&self) -> Vec3 {
        self.normal
    }
    pub fn u_axis(&self) -> Vec3 {
        self.u_axis
    }
    pub fn v_axis(&self) -> Vec3 {
        self.v_axis
    }
    pub fn half_extents(&self) -> (f64, f64) {
        (self.half_u, self.half_v)
    }
    pub fn is_infinite(&self) -> bool {
        self.infinite
    }

    /// Same rectangle moved so that its center lies at `center`.
    pub fn with_center(mut self, center: Vec3) -> Self {
        self.center = center;
        self
    }

    pub fn signed_distance(&self, p: Vec3) -> f64 {
        (p - self.center).dot(self.normal)
    }

    /// In-plane coordinates of `p` along the `u` and `v` axes.
    pub fn local_coords(&self, p: Vec3) -> (f64, f64) {
        let d = p - self.center;
        (d.dot(self.u_axis), d.dot(self.v_axis))
    }

    /// Whether the projection of `p` onto the plane lies within the extent.
    pub fn within_extent(&self, p: Vec3) -> bool {
        if self.infinite {
            return true;
        }
        let (u, v) = self.local_coords(p);
        let tol = PLANE_EPS * (1.0 + self.half_u.max(self.half_v));
        u.abs() <= self.half_u + tol && v.abs() <= self.half_v + tol
    }

    fn on_plane_tolerance(&self, p: Vec3) -> f64 {
        1e-9 * (1.0 + (p - self.center).norm())
    }
}

/// Serialized form of [`RectPlane`]; missing half-extents mean an unbounded
/// plane.
#[cfg(feature = "serde")]
#[derive(serde::Serialize, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct RectPlaneDef {
    center: Vec3,
    normal: Vec3,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    u_axis: Option<Vec3>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    half_extents: Option<[f64; 2]>,
}

#[cfg(feature = "serde")]
impl TryFrom<RectPlaneDef> for RectPlane {
    type Error = crate::Error;
    fn try_from(d: RectPlaneDef) -> Result<Self> {
        match (d.half_extents, d.u_axis) {
            (None, _) => RectPlane::infinite(d.center, d.normal),
            (Some([hu, hv]), Some(u)) => RectPlane::new(d.center, d.normal, u, hu, hv),
            (Some(_), None) => Err(domain!("a bounded rectangle needs `u_axis`")),
        }
    }
}

#[cfg(feature = "serde")]
impl From<RectPlane> for RectPlaneDef {
    fn from(r: RectPlane) -> Self {
        RectPlaneDef {
            center: r.center,
            normal: r.normal,
            u_axis: (!r.infinite).then_some(r.u_axis),
            half_extents: (!r.infinite).then_some([r.half_u, r.half_v]),
        }
    }
}

fn frame(normal: Vec3, u_hint: Vec3) -> Result<(Vec3, Vec3, Vec3)> {
    let n = normal.normalized().ok_or_else(|| domain!("plane normal must be nonzero"))?;
    let u = (u_hint - n * u_hint.dot(n))
        .normalized()
        .ok_or_else(|| domain!("in-plane axis hint is parallel to the normal"))?;
    let v = n.cross(u);
    Ok((n, u, v))
}

/// Reflection of `p` across the infinite extension of `plane`.
pub fn mirror_point(p: Vec3, plane: &RectPlane) -> Vec3 {
    p - plane.normal * (2.0 * plane.signed_distance(p))
}

/// Specular reflection point of the path `tx → plane → rx`, or `None` when the
/// point falls outside the rectangle.
pub fn specular_reflection_point(tx: Vec3, rx: Vec3, plane: &RectPlane) -> Result<Option<Vec3>> {
    let dt = plane.signed_distance(tx);
    let dr = plane.signed_distance(rx);
    if dt.abs() <= plane.on_plane_tolerance(tx) || dr.abs() <= plane.on_plane_tolerance(rx) {
        return Err(degenerate!("reflection endpoint lies on the reflecting plane"));
    }
    if dt.signum() != dr.signum() {
        return Err(domain!("reflection endpoints lie on opposite sides of the plane"));
    }
    let image = mirror_point(tx, plane);
    // The image sits at -dt; the segment image→rx crosses the plane at t.
    let t = dt / (dt + dr);
    let q = image.lerp(rx, t);
    // Snap onto the plane to remove rounding drift.
    let q = q - plane.normal * plane.signed_distance(q);
    Ok(plane.within_extent(q).then_some(q))
}

/// Length of the specular path `tx → plane → rx` via the image method.
pub fn specular_path_length(tx: Vec3, rx: Vec3, plane: &RectPlane) -> f64 {
    mirror_point(tx, plane).distance(rx)
}

/// Whether the open segment `p1 → p2` crosses `rect` inside its extent.
/// Segments lying in the plane never intersect.
pub fn segment_intersects_rect(p1: Vec3, p2: Vec3, rect: &RectPlane) -> bool {
    let d1 = rect.signed_distance(p1);
    let d2 = rect.signed_distance(p2);
    let eps = PLANE_EPS * (1.0 + p1.norm().max(p2.norm()));
    if d1.abs() <= eps || d2.abs() <= eps || d1.signum() == d2.signum() {
        return false;
    }
    let t = d1 / (d1 - d2);
    rect.within_extent(p1.lerp(p2, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_PI_4;

    fn close(a: Vec3, b: Vec3, tol: f64) -> bool {
        a.distance(b) <= tol
    }

    fn floor() -> RectPlane {
        RectPlane::infinite(Vec3::ZERO, Vec3::Z).unwrap()
    }

    #[test]
    fn unit_vector_axis_and_diagonal_cases() {
        assert!(close(angles_to_unit_vector(DirectionAngles::new(0.0, 0.0)), Vec3::X, 1e-15));
        assert!(close(angles_to_unit_vector(DirectionAngles::new(FRAC_PI_2, 0.0)), Vec3::Y, 1e-15));
        let v = angles_to_unit_vector(DirectionAngles::new(FRAC_PI_4, FRAC_PI_4));
        assert!(close(v, Vec3::new(0.5, 0.5, core::f64::consts::FRAC_1_SQRT_2), 1e-12));
        assert!((v.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn angles_of_pole_diagonal_and_zero() {
        let pole = vector_to_angles(Vec3::Z).unwrap();
        assert_eq!(pole.azimuth(), 0.0);
        assert!((pole.elevation() - FRAC_PI_2).abs() < 1e-15);
        let diag = vector_to_angles(Vec3::new(1.0, 1.0, 0.0)).unwrap();
        assert!((diag.azimuth() - FRAC_PI_4).abs() < 1e-15);
        assert_eq!(diag.elevation(), 0.0);
        let d = vector_to_angles(Vec3::new(0.5, 0.5, core::f64::consts::FRAC_1_SQRT_2)).unwrap();
        assert!((d.azimuth() - FRAC_PI_4).abs() < 1e-9 && (d.elevation() - FRAC_PI_4).abs() < 1e-9);
        assert!(vector_to_angles(Vec3::ZERO).is_err());
    }

    #[test]
    fn azimuth_range_is_half_open() {
        let a = vector_to_angles(Vec3::new(-1.0, -0.0, 0.0)).unwrap();
        assert_eq!(a.azimuth(), PI);
        assert_eq!(wrap_azimuth(-PI), PI);
        assert!((wrap_azimuth(3.0 * PI / 2.0) + FRAC_PI_2).abs() < 1e-15);
        let over = DirectionAngles::new(0.0, 2.0);
        assert!(over.elevation() <= FRAC_PI_2);
        assert!((over.azimuth() - PI).abs() < 1e-12);
    }

    #[test]
    fn mirror_examples() {
        assert_eq!(mirror_point(Vec3::new(0.0, 0.0, 1.5), &floor()), Vec3::new(0.0, 0.0, -1.5));
        let wall = RectPlane::infinite(Vec3::new(5.0, 0.0, 0.0), Vec3::X).unwrap();
        assert!(close(mirror_point(Vec3::new(1.0, 2.0, 3.0), &wall), Vec3::new(9.0, 2.0, 3.0), 1e-12));
        let on = Vec3::new(5.0, -3.0, 7.0);
        assert!(close(mirror_point(on, &wall), on, 1e-12));
    }

    #[test]
    fn specular_point_examples() {
        let f = floor();
        let (tx, rx) = (Vec3::new(0.0, 0.0, 2.0), Vec3::new(10.0, 0.0, 2.0));
        let q = specular_reflection_point(tx, rx, &f).unwrap().unwrap();
        assert!(close(q, Vec3::new(5.0, 0.0, 0.0), 1e-12));
        assert!((specular_path_length(tx, rx, &f) - 2.0 * 29f64.sqrt()).abs() < 1e-12);

        let rx2 = Vec3::new(10.0, 0.0, 4.0);
        let q2 = specular_reflection_point(tx, rx2, &f).unwrap().unwrap();
        assert!(close(q2, Vec3::new(10.0 / 3.0, 0.0, 0.0), 1e-12));
        assert!((specular_path_length(tx, rx2, &f) - 136f64.sqrt()).abs() < 1e-12);
        assert!((tx.distance(q2) + q2.distance(rx2) - 136f64.sqrt()).abs() < 1e-12);

        let wall = RectPlane::new(Vec3::new(50.0, 0.0, 2.0), Vec3::X, Vec3::Y, 1.0, 1.0).unwrap();
        assert_eq!(specular_reflection_point(tx, Vec3::new(1.0, 10.0, 2.0), &wall).unwrap(), None);
    }

    #[test]
    fn specular_point_errors() {
        let f = floor();
        assert!(matches!(
            specular_reflection_point(Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.0, 0.0, 1.0), &f),
            Err(crate::Error::DegenerateGeometry(_))
        ));
        assert!(matches!(
            specular_reflection_point(Vec3::new(0.0, 0.0, -1.0), Vec3::new(1.0, 0.0, 1.0), &f),
            Err(crate::Error::Domain(_))
        ));
    }

    #[test]
    fn specular_point_has_equal_angles() {
        let f = floor();
        let (tx, rx) = (Vec3::new(-3.0, 1.0, 2.5), Vec3::new(7.0, -2.0, 0.7));
        let q = specular_reflection_point(tx, rx, &f).unwrap().unwrap();
        let incidence = ((tx - q).normalized().unwrap().dot(Vec3::Z)).acos();
        let reflection = ((rx - q).normalized().unwrap().dot(Vec3::Z)).acos();
        assert!((incidence - reflection).abs() < 1e-9);
    }

    #[test]
    fn segment_rect_examples() {
        let rect = RectPlane::new(Vec3::new(0.0, 0.0, 1.0), Vec3::X, Vec3::Y, 1.0, 1.0).unwrap();
        assert!(segment_intersects_rect(Vec3::new(-1.0, 0.0, 1.0), Vec3::new(1.0, 0.0, 1.0), &rect));
        assert!(!segment_intersects_rect(Vec3::new(-1.0, 0.0, 5.0), Vec3::new(1.0, 0.0, 5.0), &rect));
        assert!(!segment_intersects_rect(Vec3::new(0.0, -0.5, 1.0), Vec3::new(0.0, 0.5, 1.0), &rect));
        // endpoint touching the plane is not an open crossing
        assert!(!segment_intersects_rect(Vec3::new(-1.0, 0.0, 1.0), Vec3::new(0.0, 0.0, 1.0), &rect));
    }

    #[test]
    fn rect_rejects_bad_extent_and_parallel_hint() {
        assert!(RectPlane::new(Vec3::ZERO, Vec3::Z, Vec3::X, 0.0, 1.0).is_err());
        assert!(RectPlane::new(Vec3::ZERO, Vec3::Z, Vec3::Z, 1.0, 1.0).is_err());
        let r = RectPlane::new(Vec3::ZERO, Vec3::new(0.0, 0.0, 3.0), Vec3::new(1.0, 0.0, 0.2), 1.0, 2.0).unwrap();
        assert!(r.normal().dot(r.u_axis()).abs() < 1e-12);
        assert!(r.normal().dot(r.v_axis()).abs() < 1e-12);
        assert!((r.v_axis().norm() - 1.0).abs() < 1e-12);
    }
}
