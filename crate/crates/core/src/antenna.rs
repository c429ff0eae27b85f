//! Horn antenna pattern and the effective plane-wave area.

use crate::error::{Error, Result, ValidationErrors};
use crate::geometry::{wrap_degrees, Vec3};
use crate::units::db_to_linear;

pub const DEFAULT_PEAK_GAIN_DBI: f64 = 17.0;
pub const DEFAULT_HPBW_AZ_DEG: f64 = 26.0;
pub const DEFAULT_HPBW_EL_DEG: f64 = 24.0;
pub const DEFAULT_SIDELOBE_FLOOR_DB: f64 = 30.0;

/// Saturation point of the reflector-size experiment: a 0.25 m square sheet
/// 3.6 m from the horns captures the whole wavefront.
pub const CALIBRATION_DISTANCE_M: f64 = 3.6;
pub const CALIBRATION_AREA_M2: f64 = 0.0625;

/// Directional antenna with a separable Gaussian main lobe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Antenna {
    pub peak_gain_dbi: f64,
    pub hpbw_az_deg: f64,
    pub hpbw_el_deg: f64,
    /// Pattern floor, in dB below the peak.
    pub sidelobe_floor_db: f64,
    pub position: Vec3,
    pub boresight: Vec3,
    /// Linear polarization unit vector, perpendicular to the boresight.
    pub polarization: Vec3,
}

impl Default for Antenna {
    fn default() -> Self {
        Antenna {
            peak_gain_dbi: DEFAULT_PEAK_GAIN_DBI,
            hpbw_az_deg: DEFAULT_HPBW_AZ_DEG,
            hpbw_el_deg: DEFAULT_HPBW_EL_DEG,
            sidelobe_floor_db: DEFAULT_SIDELOBE_FLOOR_DB,
            position: Vec3::ZERO,
            boresight: Vec3::X,
            polarization: Vec3::Z,
        }
    }
}

impl Antenna {
    /// Vertically polarized 17 dBi / 26°×24° horn at `position`.
    pub fn horn(position: Vec3, boresight: Vec3) -> Result<Self> {
        Antenna {
            position,
            ..Antenna::default()
        }
        .with_boresight(boresight)
    }

    /// Same antenna with a new boresight; the polarization is carried over by
    /// projecting it onto the plane perpendicular to the new boresight.
    pub fn with_boresight(&self, boresight: Vec3) -> Result<Self> {
        let boresight = boresight.normalized()?;
        let polarization = perpendicular_polarization(self.polarization, boresight);
        Ok(Antenna {
            boresight,
            polarization,
            ..*self
        })
    }

    pub fn aimed_at(&self, target: Vec3) -> Result<Self> {
        let dir = self
            .position
            .direction_to(target)
            .map_err(|_| Error::CoincidentPoints("antenna aimed at its own position"))?;
        self.with_boresight(dir)
    }

    pub fn at(&self, position: Vec3) -> Self {
        Antenna { position, ..*self }
    }

    pub fn validate(&self, field: &str, errors: &mut ValidationErrors) {
        errors.check(
            self.peak_gain_dbi >= 0.0,
            format!("{field}.peak_gain_dbi"),
            ">= 0",
        );
        for (name, v) in [("hpbw_az_deg", self.hpbw_az_deg), ("hpbw_el_deg", self.hpbw_el_deg)] {
            errors.check(v > 0.0 && v < 180.0, format!("{field}.{name}"), "in (0, 180)");
        }
        errors.check(
            self.sidelobe_floor_db >= 0.0,
            format!("{field}.sidelobe_floor_db"),
            ">= 0",
        );
        errors.check(
            (self.boresight.norm() - 1.0).abs() < 1e-9,
            format!("{field}.boresight"),
            "is unit-norm",
        );
        errors.check(
            (self.polarization.norm() - 1.0).abs() < 1e-9,
            format!("{field}.polarization"),
            "is unit-norm",
        );
        errors.check(
            self.polarization.dot(self.boresight).abs() < 1e-6,
            format!("{field}.polarization"),
            "is perpendicular to boresight",
        );
    }

    /// Gain in dBi towards `direction` (need not be normalized).
    ///
    /// `G = peak − 3[(θ/(hpbw_az/2))² + (φ/(hpbw_el/2))²]`, floored at
    /// `peak − sidelobe_floor_db`, where θ and φ are the azimuth and
    /// elevation offsets from the boresight.
    pub fn gain_dbi(&self, direction: Vec3) -> f64 {
        let az_off = wrap_degrees(direction.azimuth_deg() - self.boresight.azimuth_deg());
        let el_off = direction.elevation_deg() - self.boresight.elevation_deg();
        let rolloff = 3.0
            * ((az_off / (self.hpbw_az_deg / 2.0)).powi(2)
                + (el_off / (self.hpbw_el_deg / 2.0)).powi(2));
        self.peak_gain_dbi - rolloff.min(self.sidelobe_floor_db)
    }

    /// Linear gain towards `direction`.
    pub fn gain(&self, direction: Vec3) -> f64 {
        db_to_linear(self.gain_dbi(direction))
    }

    pub fn peak_gain(&self) -> f64 {
        db_to_linear(self.peak_gain_dbi)
    }

    /// Linear gain towards a point in space.
    pub fn gain_toward(&self, point: Vec3) -> Result<f64> {
        Ok(self.gain(self.position.direction_to(point)?))
    }

    /// Effective aperture `Gλ²/4π` at peak gain, m².
    pub fn effective_aperture(&self, wavelength_m: f64) -> f64 {
        self.peak_gain() * wavelength_m * wavelength_m / (4.0 * std::f64::consts::PI)
    }
}

fn perpendicular_polarization(previous: Vec3, boresight: Vec3) -> Vec3 {
    let project = |v: Vec3| (v - boresight * v.dot(boresight)).normalized().ok();
    project(previous)
        .or_else(|| project(Vec3::Z))
        .or_else(|| project(Vec3::X))
        .expect("boresight cannot be parallel to both z and x")
}

/// `|ρ_a·ρ_b|²` for unit linear polarization vectors.
pub fn polarization_mismatch(rho_a: Vec3, rho_b: Vec3) -> f64 {
    let c = rho_a.dot(rho_b);
    (c * c).min(1.0)
}

/// Area of the transmitted wavefront that carries essentially all of the
/// directed power.
///
/// The footprint grows as `Ω·d²` for a fixed solid angle `Ω`, optionally
/// capped at `max_area_m2` to represent a wavefront that stops spreading.
#[derive(Debug, Clone, PartialEq)]
pub struct PlaneWaveModel {
    pub solid_angle_sr: f64,
    /// (distance m, saturating reflector area m²) measurements Ω was fitted to.
    pub calibration_points: Vec<(f64, f64)>,
    pub max_area_m2: Option<f64>,
}

impl Default for PlaneWaveModel {
    fn default() -> Self {
        PlaneWaveModel::from_calibration(&[(CALIBRATION_DISTANCE_M, CALIBRATION_AREA_M2)])
            .expect("built-in calibration point is valid")
    }
}

impl PlaneWaveModel {
    /// Least-squares fit of `area = Ω·d²` through the given points.
    pub fn from_calibration(points: &[(f64, f64)]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Empty("plane-wave calibration points"));
        }
        if points.iter().any(|&(d, a)| !(d > 0.0) || !(a > 0.0)) {
            return Err(Error::invalid(
                "calibration_points",
                "distances and areas must be positive",
            ));
        }
        let num: f64 = points.iter().map(|&(d, a)| a * d * d).sum();
        let den: f64 = points.iter().map(|&(d, _)| d.powi(4)).sum();
        Ok(PlaneWaveModel {
            solid_angle_sr: num / den,
            calibration_points: points.to_vec(),
            max_area_m2: None,
        })
    }

    pub fn with_solid_angle(solid_angle_sr: f64) -> Self {
        PlaneWaveModel {
            solid_angle_sr,
            calibration_points: Vec::new(),
            max_area_m2: None,
        }
    }

    pub fn capped(mut self, max_area_m2: f64) -> Self {
        self.max_area_m2 = Some(max_area_m2);
        self
    }

    pub fn validate(&self, errors: &mut ValidationErrors) {
        errors.check(
            self.solid_angle_sr > 0.0 && self.solid_angle_sr.is_finite(),
            "plane_wave.solid_angle_sr",
            "> 0",
        );
        if let Some(cap) = self.max_area_m2 {
            errors.check(cap > 0.0, "plane_wave.max_area_m2", "> 0");
        }
    }

    /// Plane-wave area at `distance` metres from the source.
    pub fn area(&self, distance: f64) -> Result<f64> {
        if !(distance > 0.0) {
            return Err(Error::invalid("distance", format!("must be > 0, got {distance}")));
        }
        let area = self.solid_angle_sr * distance * distance;
        Ok(match self.max_area_m2 {
            Some(cap) => area.min(cap),
            None => area,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn horn() -> Antenna {
        Antenna::horn(Vec3::ZERO, Vec3::X).unwrap()
    }

    #[test]
    fn boresight_gain_is_peak() {
        let g = horn().gain(Vec3::X);
        assert!((g - 50.118_723_362_727_23).abs() < 1e-9);
    }

    #[test]
    fn half_beamwidth_is_3db_down() {
        let a = horn();
        assert!((a.gain_dbi(Vec3::from_az_el_deg(13.0, 0.0)) - 14.0).abs() < 1e-12);
        assert!((a.gain_dbi(Vec3::from_az_el_deg(0.0, 12.0)) - 14.0).abs() < 1e-12);
        let ratio = a.gain(Vec3::from_az_el_deg(-13.0, 0.0)) / a.peak_gain();
        assert!((ratio - 10f64.powf(-0.3)).abs() < 1e-12);
    }

    #[test]
    fn full_beamwidth_off_axis() {
        // 17 − 3·(26/13)² = 5 dBi
        assert!((horn().gain_dbi(Vec3::from_az_el_deg(26.0, 0.0)) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn floor_applies_behind_the_antenna() {
        assert_eq!(horn().gain_dbi(-Vec3::X), 17.0 - 30.0);
    }

    #[test]
    fn polarization_follows_reaim() {
        let a = horn().aimed_at(Vec3::new(0.0, 5.0, 0.0)).unwrap();
        assert!((a.boresight - Vec3::Y).norm() < 1e-15);
        assert_eq!(a.polarization, Vec3::Z);
        let up = horn().with_boresight(Vec3::Z).unwrap();
        assert!(up.polarization.dot(Vec3::Z).abs() < 1e-12);
        let mut errors = ValidationErrors::default();
        up.validate("rx", &mut errors);
        assert!(errors.is_empty(), "{errors}");
    }

    #[test]
    fn validation_names_fields() {
        let a = Antenna {
            hpbw_az_deg: 0.0,
            polarization: Vec3::X,
            ..horn()
        };
        let mut errors = ValidationErrors::default();
        a.validate("tx", &mut errors);
        let text = errors.to_string();
        assert!(text.contains("tx.hpbw_az_deg"), "{text}");
        assert!(text.contains("perpendicular"), "{text}");
    }

    #[test]
    fn plane_wave_area_calibration() {
        let m = PlaneWaveModel::default();
        assert!((m.solid_angle_sr - 4.822_530_864_197_531e-3).abs() < 1e-15);
        assert!((m.area(3.6).unwrap() - 0.0625).abs() < 1e-15);
        assert!((m.area(7.2).unwrap() - 0.25).abs() < 1e-15);
        assert!(m.area(1e-9).unwrap() < 1e-20);
        assert!(m.area(0.0).is_err());
        assert!(m.area(-1.0).is_err());
    }

    #[test]
    fn capped_area_saturates() {
        let m = PlaneWaveModel::default().capped(0.0625);
        assert_eq!(m.area(45.0).unwrap(), 0.0625);
        assert!((m.area(1.2).unwrap() - 0.0625 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn least_squares_fit_of_exact_points() {
        let m = PlaneWaveModel::from_calibration(&[(1.0, 0.01), (2.0, 0.04)]).unwrap();
        assert!((m.solid_angle_sr - 0.01).abs() < 1e-15);
        assert!(PlaneWaveModel::from_calibration(&[]).is_err());
    }

    #[test]
    fn polarization_cases() {
        assert_eq!(polarization_mismatch(Vec3::Z, Vec3::Z), 1.0);
        assert_eq!(polarization_mismatch(Vec3::Z, Vec3::Y), 0.0);
        let rotated = Vec3::new(0.0, 1.0, 1.0).normalized().unwrap();
        assert!((polarization_mismatch(Vec3::Z, rotated) - 0.5).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn gain_non_increasing_off_axis(a in 0.0f64..180.0, b in 0.0f64..180.0) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            let h = horn();
            prop_assert!(h.gain(Vec3::from_az_el_deg(hi, 0.0)) <= h.gain(Vec3::from_az_el_deg(lo, 0.0)));
            prop_assert!(h.gain(Vec3::from_az_el_deg(0.0, hi.min(89.0))) <= h.gain(Vec3::from_az_el_deg(0.0, lo.min(89.0))));
        }

        #[test]
        fn area_quadratic_law(d in 0.01f64..500.0) {
            let m = PlaneWaveModel::default();
            let ratio = m.area(2.0 * d).unwrap() / m.area(d).unwrap();
            prop_assert!((ratio - 4.0).abs() < 1e-12);
            prop_assert!(m.area(d * 1.001).unwrap() > m.area(d).unwrap());
        }

        #[test]
        fn polarization_symmetric(x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0) {
            prop_assume!(x * x + y * y + z * z > 1e-3);
            let v = Vec3::new(x, y, z).normalized().unwrap();
            let w = Vec3::new(y, z, x).normalized().unwrap();
            prop_assert_eq!(polarization_mismatch(v, w), polarization_mismatch(w, v));
        }
    }
}
