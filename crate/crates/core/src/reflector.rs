//! Reflector shapes, effective areas and the RCS values that make the
//! reflected-power equations collapse to free space.

use std::f64::consts::PI;

use crate::error::{Error, Result, ValidationErrors};
use crate::geometry::{plane_wave_mismatch_factor, Pose, Vec3};
use crate::units::db_to_linear;

/// Per-degree orientation-loss base for flat sheets.
pub const ALPHA_FLAT: f64 = 0.72;
/// Per-degree orientation-loss base for cylinders and spheres.
pub const ALPHA_CURVED: f64 = 0.85;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Flat { width: f64, height: f64 },
    /// Vertical cylinder.
    Cylinder { radius: f64, height: f64 },
    Sphere { radius: f64 },
}

impl Shape {
    pub fn name(&self) -> &'static str {
        match self {
            Shape::Flat { .. } => "flat",
            Shape::Cylinder { .. } => "cylinder",
            Shape::Sphere { .. } => "sphere",
        }
    }

    pub fn is_curved(&self) -> bool {
        !matches!(self, Shape::Flat { .. })
    }
}

/// How the wavefront-orientation loss `β^(1−|n̂_rp·n̂_rx|²)` is obtained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WavefrontMismatch {
    /// Raw β in (0, 1]; the exponent is evaluated from geometry.
    Beta(f64),
    /// Measured aggregate loss in dB (≤ 0), applied as is.
    AggregateDb(f64),
}

impl Default for WavefrontMismatch {
    fn default() -> Self {
        WavefrontMismatch::Beta(1.0)
    }
}

impl WavefrontMismatch {
    pub fn factor(&self, n_rp: Vec3, n_rx: Vec3) -> f64 {
        match *self {
            WavefrontMismatch::Beta(beta) => plane_wave_mismatch_factor(n_rp, n_rx, beta),
            WavefrontMismatch::AggregateDb(db) => db_to_linear(db),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reflector {
    pub shape: Shape,
    pub pose: Pose,
    /// Reflection efficiency Γ of the surface material.
    pub gamma: f64,
    /// Orientation-loss base α (per degree).
    pub alpha: f64,
    pub mismatch: WavefrontMismatch,
    /// Normal of the reflected wavefront; the specular direction when absent.
    pub reflected_normal: Option<Vec3>,
    /// Polarization after reflection; the incident polarization when absent.
    pub reflected_polarization: Option<Vec3>,
    /// Azimuth width of the illuminated target region, radians.
    pub delta_psi_rad: Option<f64>,
    /// Elevation width of the illuminated target region, radians.
    pub delta_omega_rad: Option<f64>,
}

impl Reflector {
    pub fn new(shape: Shape, pose: Pose) -> Self {
        Reflector {
            shape,
            pose,
            gamma: 1.0,
            alpha: if shape.is_curved() { ALPHA_CURVED } else { ALPHA_FLAT },
            mismatch: WavefrontMismatch::default(),
            reflected_normal: None,
            reflected_polarization: None,
            delta_psi_rad: None,
            delta_omega_rad: None,
        }
    }

    pub fn flat(width: f64, height: f64, pose: Pose) -> Self {
        Reflector::new(Shape::Flat { width, height }, pose)
    }

    pub fn cylinder(radius: f64, height: f64, pose: Pose) -> Self {
        Reflector::new(Shape::Cylinder { radius, height }, pose)
    }

    pub fn sphere(radius: f64, pose: Pose) -> Self {
        Reflector::new(Shape::Sphere { radius }, pose)
    }

    pub fn with_mismatch(mut self, mismatch: WavefrontMismatch) -> Self {
        self.mismatch = mismatch;
        self
    }

    pub fn with_gamma(mut self, gamma: f64) -> Self {
        self.gamma = gamma;
        self
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn position(&self) -> Vec3 {
        self.pose.position
    }

    pub fn validate(&self, field: &str, errors: &mut ValidationErrors) {
        match self.shape {
            Shape::Flat { width, height } => {
                errors.check(width > 0.0, format!("{field}.shape.width"), "> 0");
                errors.check(height > 0.0, format!("{field}.shape.height"), "> 0");
            }
            Shape::Cylinder { radius, height } => {
                errors.check(radius > 0.0, format!("{field}.shape.radius"), "> 0");
                errors.check(height > 0.0, format!("{field}.shape.height"), "> 0");
            }
            Shape::Sphere { radius } => {
                errors.check(radius > 0.0, format!("{field}.shape.radius"), "> 0");
            }
        }
        errors.check(
            (self.pose.normal.norm() - 1.0).abs() < 1e-9,
            format!("{field}.normal"),
            "is unit-norm",
        );
        errors.check(
            self.gamma > 0.0 && self.gamma <= 1.0,
            format!("{field}.gamma"),
            "in (0, 1]",
        );
        errors.check(
            self.alpha > 0.0 && self.alpha < 1.0,
            format!("{field}.alpha"),
            "in (0, 1)",
        );
        match self.mismatch {
            WavefrontMismatch::Beta(b) => {
                errors.check(b > 0.0 && b <= 1.0, format!("{field}.beta"), "in (0, 1]")
            }
            WavefrontMismatch::AggregateDb(db) => {
                errors.check(db <= 0.0 && db.is_finite(), format!("{field}.beta_loss_db"), "<= 0")
            }
        }
        for (name, v) in [
            ("delta_psi_deg", self.delta_psi_rad),
            ("delta_omega_deg", self.delta_omega_rad),
        ] {
            if let Some(v) = v {
                errors.check(v > 0.0, format!("{field}.{name}"), "> 0");
            }
        }
    }
}

/// Geometry of the region a reflector redirects power into.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveAreaContext {
    /// Area of the incident plane wave at the reflector, m².
    pub a_pw: f64,
    /// Azimuth width ΔΨ of the target region seen from the reflector, rad.
    pub delta_psi_rad: f64,
    /// Elevation width ΔΩ of the target region, rad.
    pub delta_omega_rad: f64,
    /// Minimum reflector-to-receiver distance R_m, m.
    pub r_min: f64,
}

impl EffectiveAreaContext {
    /// Context for a flat sheet, whose effective area ignores the target region.
    pub fn for_plane_wave(a_pw: f64) -> Self {
        EffectiveAreaContext {
            a_pw,
            delta_psi_rad: 0.0,
            delta_omega_rad: 0.0,
            r_min: 0.0,
        }
    }
}

/// Area that captures the incident wave and redirects it to the target region.
///
/// * flat: `w·h`
/// * cylinder: `ΔΨ·r·√A_pw` (height limited to the wavefront height)
/// * sphere: `ΔΨ·ΔΩ·R_m²`
pub fn effective_area(reflector: &Reflector, ctx: &EffectiveAreaContext) -> f64 {
    match reflector.shape {
        Shape::Flat { width, height } => width * height,
        Shape::Cylinder { radius, .. } => ctx.delta_psi_rad * radius * ctx.a_pw.sqrt(),
        Shape::Sphere { .. } => ctx.delta_psi_rad * ctx.delta_omega_rad * ctx.r_min * ctx.r_min,
    }
}

fn positive(name: &'static str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(Error::invalid(name, format!("must be > 0, got {v}")))
    }
}

/// RCS at which a single bounce over `r1 + r2` equals free-space power:
/// `4π(r1·r2)²/(r1+r2)²`.
pub fn sigma_prime(r1: f64, r2: f64) -> Result<f64> {
    let (r1, r2) = (positive("r1", r1)?, positive("r2", r2)?);
    Ok(4.0 * PI * (r1 * r2).powi(2) / (r1 + r2).powi(2))
}

/// Two-bounce counterpart of [`sigma_prime`]: `(4π·r1·r2·r3)²/(r1+r2+r3)²`.
pub fn sigma_double_prime(r1: f64, r2: f64, r3: f64) -> Result<f64> {
    let (r1, r2, r3) = (positive("r1", r1)?, positive("r2", r2)?, positive("r3", r3)?);
    Ok((4.0 * PI * r1 * r2 * r3).powi(2) / (r1 + r2 + r3).powi(2))
}

/// Fraction of the incident plane wave intercepted: `min(A_refl, A_pw)/A_pw`.
pub fn area_capture_ratio(a_refl: f64, a_pw: f64) -> f64 {
    a_refl.min(a_pw) / a_pw
}
