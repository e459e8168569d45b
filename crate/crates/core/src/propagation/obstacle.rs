use crate::cluster::EdgePoint;
use crate::error::{config, Result};
use crate::geometry::{RectPlane, Vec3};

/// A vertical rectangular obstacle moving on a straight line.
///
/// The face whose normal is `facing` is reflective, the opposite face is
/// absorbing. `start`/`end` are positions of the bottom center; the obstacle
/// sits at `start` up to snapshot `move_start`, at `end` from `move_end` on,
/// and moves linearly in between.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ObstacleSpec {
    pub width: f64,
    pub height: f64,
    /// Horizontal normal of the reflective face.
    pub facing: Vec3,
    pub start: Vec3,
    pub end: Vec3,
    pub move_start: usize,
    pub move_end: usize,
    /// Attenuation of a path crossing the obstacle, dB.
    pub block_loss_db: f64,
}

impl ObstacleSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0 && self.height > 0.0) {
            return Err(config!("obstacle width and height must be > 0"));
        }
        if !(self.block_loss_db > 0.0 && self.block_loss_db.is_finite()) {
            return Err(config!("obstacle blockage loss must be > 0 dB"));
        }
        if self.facing.z != 0.0 || self.facing.normalized().is_none() {
            return Err(config!("obstacle facing must be a nonzero horizontal vector"));
        }
        if self.move_end < self.move_start {
            return Err(config!("obstacle movement ends before it starts"));
        }
        if !(self.start.is_finite() && self.end.is_finite()) {
            return Err(config!("obstacle trajectory must be finite"));
        }
        Ok(())
    }

    /// Interpolation weight of the trajectory at snapshot `s`.
    pub fn progress(&self, snapshot: usize) -> f64 {
        if self.move_end == self.move_start {
            return if snapshot >= self.move_end { 1.0 } else { 0.0 };
        }
        let t = (snapshot as f64 - self.move_start as f64) / (self.move_end - self.move_start) as f64;
        t.clamp(0.0, 1.0)
    }

    pub fn pose_at(&self, snapshot: usize) -> Result<ObstaclePose> {
        self.validate()?;
        let normal = self.facing.normalized().unwrap_or(Vec3::Y);
        let width_axis = normal.cross(Vec3::Z);
        let base = self.start.lerp(self.end, self.progress(snapshot));
        let face = RectPlane::new(base + Vec3::Z * (self.height / 2.0), normal, width_axis, self.width / 2.0, self.height / 2.0)?;
        Ok(ObstaclePose { snapshot, base, face, width: self.width, height: self.height, block_loss_db: self.block_loss_db })
    }
}

/// Obstacle placed at one snapshot.
#[derive(Debug, Clone, PartialEq)]
pub struct ObstaclePose {
    pub snapshot: usize,
    /// Bottom center.
    pub base: Vec3,
    /// Obstacle rectangle; its normal points out of the reflective face and
    /// its `u` axis runs along the width.
    pub face: RectPlane,
    pub width: f64,
    pub height: f64,
    pub block_loss_db: f64,
}

impl ObstaclePose {
    fn width_axis(&self) -> Vec3 {
        self.face.u_axis()
    }

    /// Obstacle coordinates (width, normal, up) to world coordinates.
    pub fn local_to_world(&self, p: Vec3) -> Vec3 {
        self.base + self.width_axis() * p.x + self.face.normal() * p.y + Vec3::Z * p.z
    }

    fn direction_to_world(&self, d: Vec3) -> Vec3 {
        self.width_axis() * d.x + self.face.normal() * d.y + Vec3::Z * d.z
    }

    pub fn edge_to_world(&self, edge: EdgePoint) -> Vec3 {
        self.local_to_world(Vec3::new(edge.along, 0.0, edge.up))
    }

    /// Unit in-plane direction pointing away from the obstacle at `edge`:
    /// sideways on the vertical edges, up or down on the horizontal ones,
    /// diagonal at corners.
    pub fn edge_outward(&self, edge: EdgePoint) -> Vec3 {
        let tol = 1e-9 * (1.0 + self.width.max(self.height));
        let du = edge.along;
        let dv = edge.up - self.height / 2.0;
        let side = if du.abs() >= self.width / 2.0 - tol { du.signum() } else { 0.0 };
        let cap = if dv.abs() >= self.height / 2.0 - tol { dv.signum() } else { 0.0 };
        (self.width_axis() * side + Vec3::Z * cap).normalized().unwrap_or(Vec3::Z)
    }

    /// Whether `edge` lies on the outline of the obstacle.
    pub fn is_on_outline(width: f64, height: f64, edge: EdgePoint) -> bool {
        let tol = 1e-9 * (1.0 + width.max(height));
        let inside = edge.along.abs() <= width / 2.0 + tol && edge.up >= -tol && edge.up <= height + tol;
        let boundary = (edge.along.abs() - width / 2.0).abs() <= tol || edge.up.abs() <= tol || (edge.up - height).abs() <= tol;
        inside && boundary
    }

    /// Maps a plane given in obstacle coordinates to the world.
    pub fn plane_to_world(&self, local: &RectPlane) -> Result<RectPlane> {
        let center = self.local_to_world(local.center());
        let normal = self.direction_to_world(local.normal());
        if local.is_infinite() {
            return RectPlane::infinite(center, normal);
        }
        let (hu, hv) = local.half_extents();
        RectPlane::new(center, normal, self.direction_to_world(local.u_axis()), hu, hv)
    }
}
