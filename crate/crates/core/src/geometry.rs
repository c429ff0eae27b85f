//! Vectors, reflector poses and the angular bookkeeping consumed by the
//! power equations.
//!
//! The world frame is fixed per scenario with `z` pointing up. Azimuth is
//! measured in the horizontal plane from `+x` towards `+y`; elevation is the
//! angle above the horizontal plane. All angles handed to the power model are
//! in degrees, because the orientation-loss bases are calibrated per degree.

use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
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

    /// Unit vector pointing at the given azimuth and elevation (degrees).
    pub fn from_az_el_deg(azimuth_deg: f64, elevation_deg: f64) -> Self {
        let (az, el) = (azimuth_deg.to_radians(), elevation_deg.to_radians());
        Vec3::new(el.cos() * az.cos(), el.cos() * az.sin(), el.sin())
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

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn distance(self, other: Vec3) -> f64 {
        (self - other).norm()
    }

    /// Returns the unit vector in the same direction.
    ///
    /// Vectors that are already unit-norm to within a couple of ulps are
    /// returned unchanged, so normalizing twice is bit-stable.
    pub fn normalized(self) -> Result<Vec3> {
        let n2 = self.norm_squared();
        if !(n2 > 0.0) || !n2.is_finite() {
            return Err(Error::ZeroVector);
        }
        if (n2 - 1.0).abs() <= 4.0 * f64::EPSILON {
            return Ok(self);
        }
        Ok(self / n2.sqrt())
    }

    /// Unit direction from `self` towards `target`.
    pub fn direction_to(self, target: Vec3) -> Result<Vec3> {
        (target - self)
            .normalized()
            .map_err(|_| Error::CoincidentPoints("direction between identical points"))
    }

    /// Azimuth in degrees, in (-180, 180].
    pub fn azimuth_deg(self) -> f64 {
        self.y.atan2(self.x).to_degrees()
    }

    /// Elevation above the horizontal plane in degrees, in [-90, 90].
    pub fn elevation_deg(self) -> f64 {
        let n = self.norm();
        if n == 0.0 {
            return 0.0;
        }
        (self.z / n).clamp(-1.0, 1.0).asin().to_degrees()
    }

    /// Angle between two vectors in radians, in [0, π].
    pub fn angle_to(self, other: Vec3) -> f64 {
        // atan2 form stays accurate near 0 and π.
        self.cross(other).norm().atan2(self.dot(other))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, rhs: Vec3) {
        *self = *self + rhs;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, rhs: f64) -> Vec3 {
        Vec3::new(self.x * rhs, self.y * rhs, self.z * rhs)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, rhs: Vec3) -> Vec3 {
        rhs * self
    }
}

impl Div<f64> for Vec3 {
    type Output = Vec3;
    fn div(self, rhs: f64) -> Vec3 {
        Vec3::new(self.x / rhs, self.y / rhs, self.z / rhs)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl From<[f64; 3]> for Vec3 {
    fn from(v: [f64; 3]) -> Self {
        Vec3::new(v[0], v[1], v[2])
    }
}

impl From<Vec3> for [f64; 3] {
    fn from(v: Vec3) -> Self {
        [v.x, v.y, v.z]
    }
}

/// Position plus unit surface normal of a reflector.
///
/// For flat sheets `normal` is the surface normal on the illuminated side.
/// For curved reflectors it is the nominal facing normal that fixes the
/// optimum reflection direction; cylinders are always vertical.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub position: Vec3,
    pub normal: Vec3,
}

impl Pose {
    pub fn new(position: Vec3, normal: Vec3) -> Result<Self> {
        Ok(Pose {
            position,
            normal: normal.normalized()?,
        })
    }

    /// Pose whose normal bisects the directions towards `from` and `to`,
    /// i.e. a reflector that mirrors a ray from `from` exactly onto `to`.
    pub fn bisecting(position: Vec3, from: Vec3, to: Vec3) -> Result<Self> {
        let a = position.direction_to(from)?;
        let b = position.direction_to(to)?;
        Pose::new(position, a + b)
    }

    /// Normal pointing at azimuth `azimuth_deg` in the horizontal plane.
    pub fn horizontal(position: Vec3, azimuth_deg: f64) -> Self {
        Pose {
            position,
            normal: Vec3::from_az_el_deg(azimuth_deg, 0.0),
        }
    }
}

/// Azimuth and elevation deviation from the optimum reflection direction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleDeviation {
    pub delta_theta_deg: f64,
    pub delta_phi_deg: f64,
}

impl AngleDeviation {
    pub const ZERO: AngleDeviation = AngleDeviation {
        delta_theta_deg: 0.0,
        delta_phi_deg: 0.0,
    };
}

/// Wraps an angle in degrees into (-180, 180].
pub fn wrap_degrees(angle: f64) -> f64 {
    let mut a = angle % 360.0;
    if a > 180.0 {
        a -= 360.0;
    } else if a <= -180.0 {
        a += 360.0;
    }
    a
}

/// Mirrors `incident` about the plane with unit normal `normal`.
pub fn specular_reflect(incident: Vec3, normal: Vec3) -> Vec3 {
    incident - normal * (2.0 * incident.dot(normal))
}

/// Deviation between the receiver bearing and the optimum reflection
/// direction at a reflector.
///
/// The optimum direction is the specular image of the transmitter-to-reflector
/// ray about the reflector normal. The deviation is split into its azimuth and
/// elevation components in the world frame.
pub fn angle_deviation(tx_pos: Vec3, reflector: &Pose, rx_pos: Vec3) -> Result<AngleDeviation> {
    let incident = tx_pos
        .direction_to(reflector.position)
        .map_err(|_| Error::CoincidentPoints("transmitter at reflector position"))?;
    let actual = reflector
        .position
        .direction_to(rx_pos)
        .map_err(|_| Error::CoincidentPoints("receiver at reflector position"))?;
    let optimum = specular_reflect(incident, reflector.normal);
    Ok(AngleDeviation {
        delta_theta_deg: wrap_degrees(optimum.azimuth_deg() - actual.azimuth_deg()).abs(),
        delta_phi_deg: (optimum.elevation_deg() - actual.elevation_deg()).abs(),
    })
}

/// `β^(1 − |n_rp·n_rx|²)`: loss from misalignment between the reflected
/// wavefront normal and the receiver boresight.
pub fn plane_wave_mismatch_factor(n_rp: Vec3, n_rx: Vec3, beta: f64) -> f64 {
    let c = n_rp.dot(n_rx).abs().min(1.0);
    beta.powf(1.0 - c * c)
}
