//! TOML scenario documents.
//!
//! The document layer mirrors the file one-to-one; conversion to
//! [`Scenario`] applies defaults, unit conversions and validation.
//! Serialization writes the canonical form (explicit vectors, radians for
//! region angles, linear η) so that a reloaded scenario compares equal.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Evaluation, Olos, RxPolicy, Scenario};
use crate::antenna::{
    Antenna, PlaneWaveModel, DEFAULT_HPBW_AZ_DEG, DEFAULT_HPBW_EL_DEG, DEFAULT_PEAK_GAIN_DBI,
    DEFAULT_SIDELOBE_FLOOR_DB,
};
use crate::error::{Error, Result, ValidationErrors};
use crate::geometry::{Pose, Vec3};
use crate::gridsim::{GridSpec, SampleRange, SweepSpec};
use crate::linkbudget::{
    LinkConstants, DEFAULT_AMBIENT_DBM, DEFAULT_FREQUENCY_HZ, DEFAULT_TX_POWER_DBM,
};
use crate::raytrace::{Axis, Environment, Facet, Material};
use crate::reflector::{Reflector, Shape, WavefrontMismatch, ALPHA_CURVED, ALPHA_FLAT};
use crate::units::db_to_linear;

pub const SCHEMA_VERSION: u32 = 1;

type V3 = [f64; 3];

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    schema_version: Option<u32>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ambient_floor_dbm: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    second_order: Vec<[usize; 2]>,
    #[serde(default)]
    link: LinkDoc,
    #[serde(default)]
    tx: AntennaDoc,
    #[serde(default)]
    rx: AntennaDoc,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    reflector: Vec<ReflectorDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    grid: Option<GridDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sweep: Option<SweepDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    olos: Option<OlosDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    plane_wave: Option<PlaneWaveDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    environment: Option<EnvironmentDoc>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LinkDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    frequency_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tx_power_dbm: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AntennaDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    position: Option<V3>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    boresight: Option<V3>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    boresight_azimuth_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    boresight_elevation_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    aim_at: Option<V3>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    polarization: Option<V3>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    peak_gain_dbi: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hpbw_az_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hpbw_el_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sidelobe_floor_db: Option<f64>,
    /// Receiver only: `reflector`, `point` or `bearing`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    aim: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    aim_reflector: Option<usize>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReflectorDoc {
    shape: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    height: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    diameter: Option<f64>,
    position: V3,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    normal: Option<V3>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    normal_azimuth_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    normal_elevation_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    beta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    beta_loss_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reflected_normal: Option<V3>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reflected_polarization: Option<V3>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delta_psi_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delta_psi_rad: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delta_omega_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    delta_omega_rad: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GridDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    origin: Option<V3>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    x_extent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    y_extent: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cell: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rx_height: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SweepDoc {
    rx_position: V3,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    reference_azimuth_deg: Option<f64>,
    /// `[start, stop, step]`, degrees.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    azimuth: Option<V3>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    elevation: Option<V3>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OlosDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    distance_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    eta_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    arrival_azimuth_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    arrival_elevation_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tx_gain_dbi: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlaneWaveDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    solid_angle_sr: Option<f64>,
    /// `[distance m, area m²]` pairs.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    calibration: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max_area_m2: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnvironmentDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max_order: Option<usize>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    material: BTreeMap<String, MaterialDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    facet: Vec<FacetDoc>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MaterialDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    loss_db: Option<f64>,
    /// `[frequency Hz, loss dB]` pairs.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    table: Vec<[f64; 2]>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FacetDoc {
    material: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    axis: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    at: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    min: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    center: Option<V3>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    u: Option<V3>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    v: Option<V3>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    half_u: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    half_v: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    normal: Option<V3>,
}

/// Parses and validates a scenario document.
pub fn load_scenario(text: &str) -> Result<Scenario> {
    let doc: ScenarioDoc = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let scenario = Converter::default().scenario(doc)?;
    scenario.validate()?;
    Ok(scenario)
}

pub fn load_scenario_file(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let mut scenario = load_scenario(&text)?;
    if scenario.name.is_empty() {
        if let Some(stem) = path.file_stem() {
            scenario.name = stem.to_string_lossy().into_owned();
        }
    }
    Ok(scenario)
}

/// Canonical document for `scenario`; loading it yields an equal scenario.
pub fn to_toml(scenario: &Scenario) -> Result<String> {
    toml::to_string(&document(scenario)).map_err(|e| Error::Parse(e.to_string()))
}

/// Collects field-level problems found while converting a document.
#[derive(Default)]
struct Converter {
    errors: ValidationErrors,
}

impl Converter {
    fn require<T>(&mut self, value: Option<T>, field: String) -> Option<T> {
        if value.is_none() {
            self.errors.push(field, "is required");
        }
        value
    }

    fn unit(&mut self, v: V3, field: String) -> Vec3 {
        match Vec3::from(v).normalized() {
            Ok(n) => n,
            Err(_) => {
                self.errors.push(field, "is a nonzero vector");
                Vec3::X
            }
        }
    }

    fn scenario(mut self, doc: ScenarioDoc) -> Result<Scenario> {
        let version = doc.schema_version.unwrap_or(SCHEMA_VERSION);
        if version != SCHEMA_VERSION {
            self.errors
                .push("schema_version", format!("== {SCHEMA_VERSION} (got {version})"));
        }
        let frequency_hz = doc.link.frequency_hz.unwrap_or(DEFAULT_FREQUENCY_HZ);
        let tx_power_dbm = doc.link.tx_power_dbm.unwrap_or(DEFAULT_TX_POWER_DBM);
        let constants = LinkConstants::new(frequency_hz, tx_power_dbm).unwrap_or_else(|e| {
            self.errors.push("link", e);
            LinkConstants::default()
        });

        let reflectors: Vec<Reflector> = doc
            .reflector
            .into_iter()
            .enumerate()
            .map(|(i, r)| self.reflector(i, r))
            .collect();

        let tx = self.antenna("tx", &doc.tx, &reflectors, true);
        let rx_template = self.antenna("rx", &doc.rx, &reflectors, false);
        let rx_policy = self.rx_policy(&doc.rx);

        let evaluation = match (doc.grid, doc.sweep) {
            (Some(_), Some(_)) => {
                self.errors.push("grid/sweep", "exactly one evaluation section");
                Evaluation::Grid(GridSpec::default())
            }
            (g, None) => Evaluation::Grid(grid(g.unwrap_or_default())),
            (None, Some(s)) => self.sweep(s),
        };

        let olos = doc.olos.map(|o| self.olos(o));
        let plane_wave = doc
            .plane_wave
            .map(|p| self.plane_wave(p))
            .unwrap_or_default();
        let environment = doc.environment.map(|e| self.environment(e));

        self.errors.into_result()?;
        Ok(Scenario {
            name: doc.name,
            constants,
            tx,
            rx_template,
            rx_policy,
            reflectors,
            second_order: doc.second_order.iter().map(|p| (p[0], p[1])).collect(),
            evaluation,
            ambient_floor_dbm: doc.ambient_floor_dbm.unwrap_or(DEFAULT_AMBIENT_DBM),
            olos,
            plane_wave,
            environment,
        })
    }

    fn antenna(
        &mut self,
        field: &str,
        doc: &AntennaDoc,
        reflectors: &[Reflector],
        is_tx: bool,
    ) -> Antenna {
        let position = doc.position.map(Vec3::from).unwrap_or(Vec3::ZERO);
        if !is_tx {
            for (name, set) in [
                ("position", doc.position.is_some()),
                ("boresight", doc.boresight.is_some()),
            ] {
                self.errors.check(
                    !set,
                    format!("rx.{name}"),
                    "is not allowed (set by the evaluation and rx.aim)",
                );
            }
        } else {
            self.errors.check(
                doc.aim.is_none() && doc.aim_reflector.is_none(),
                "tx.aim",
                "is receiver-only",
            );
        }
        let given = [
            doc.boresight.is_some(),
            doc.boresight_azimuth_deg.is_some() || doc.boresight_elevation_deg.is_some(),
            doc.aim_at.is_some(),
        ];
        if is_tx && given.iter().filter(|&&g| g).count() > 1 {
            self.errors.push(
                format!("{field}.boresight"),
                "is given once (boresight, boresight_azimuth_deg or aim_at)",
            );
        }
        let boresight = if !is_tx {
            Vec3::X
        } else if let Some(b) = doc.boresight {
            self.unit(b, format!("{field}.boresight"))
        } else if let Some(target) = doc.aim_at {
            match position.direction_to(target.into()) {
                Ok(d) => d,
                Err(_) => {
                    self.errors
                        .push(format!("{field}.aim_at"), "differs from the antenna position");
                    Vec3::X
                }
            }
        } else if doc.boresight_azimuth_deg.is_some() || doc.boresight_elevation_deg.is_some() {
            Vec3::from_az_el_deg(
                doc.boresight_azimuth_deg.unwrap_or(0.0),
                doc.boresight_elevation_deg.unwrap_or(0.0),
            )
        } else if is_tx {
            match reflectors.first() {
                Some(r) => position.direction_to(r.position()).unwrap_or(Vec3::X),
                None => Vec3::X,
            }
        } else {
            Vec3::X
        };
        let base = Antenna {
            peak_gain_dbi: doc.peak_gain_dbi.unwrap_or(DEFAULT_PEAK_GAIN_DBI),
            hpbw_az_deg: doc.hpbw_az_deg.unwrap_or(DEFAULT_HPBW_AZ_DEG),
            hpbw_el_deg: doc.hpbw_el_deg.unwrap_or(DEFAULT_HPBW_EL_DEG),
            sidelobe_floor_db: doc.sidelobe_floor_db.unwrap_or(DEFAULT_SIDELOBE_FLOOR_DB),
            position,
            ..Antenna::default()
        };
        match doc.polarization {
            Some(p) => Antenna {
                boresight,
                polarization: self.unit(p, format!("{field}.polarization")),
                ..base
            },
            None => base.with_boresight(boresight).unwrap_or(base),
        }
    }

    fn rx_policy(&mut self, doc: &AntennaDoc) -> RxPolicy {
        match doc.aim.as_deref() {
            None | Some("reflector") => {
                self.errors.check(
                    doc.boresight_azimuth_deg.is_none() && doc.boresight_elevation_deg.is_none(),
                    "rx.boresight_azimuth_deg",
                    "requires rx.aim = \"bearing\"",
                );
                RxPolicy::AimAtReflector(doc.aim_reflector.unwrap_or(0))
            }
            Some("bearing") => RxPolicy::FixedBearing {
                azimuth_deg: doc.boresight_azimuth_deg.unwrap_or(0.0),
                elevation_deg: doc.boresight_elevation_deg.unwrap_or(0.0),
            },
            Some("point") => match self.require(doc.aim_at, "rx.aim_at".into()) {
                Some(p) => RxPolicy::AimAtPoint(p.into()),
                None => RxPolicy::default(),
            },
            Some(other) => {
                self.errors
                    .push("rx.aim", format!("is one of reflector|point|bearing (got `{other}`)"));
                RxPolicy::default()
            }
        }
    }

    fn reflector(&mut self, i: usize, doc: ReflectorDoc) -> Reflector {
        let field = format!("reflector[{i}]");
        let shape = match doc.shape.as_str() {
            "flat" => Shape::Flat {
                width: self.require(doc.width, format!("{field}.shape.width")).unwrap_or(1.0),
                height: self.require(doc.height, format!("{field}.shape.height")).unwrap_or(1.0),
            },
            "cylinder" => Shape::Cylinder {
                radius: self.require(doc.radius, format!("{field}.shape.radius")).unwrap_or(1.0),
                height: self.require(doc.height, format!("{field}.shape.height")).unwrap_or(1.0),
            },
            "sphere" => {
                let radius = match (doc.radius, doc.diameter) {
                    (Some(_), Some(_)) => {
                        self.errors
                            .push(format!("{field}.shape"), "has radius or diameter, not both");
                        1.0
                    }
                    (Some(r), None) => r,
                    (None, Some(d)) => d / 2.0,
                    (None, None) => {
                        self.errors.push(format!("{field}.shape.radius"), "is required");
                        1.0
                    }
                };
                Shape::Sphere { radius }
            }
            other => {
                self.errors.push(
                    format!("{field}.shape"),
                    format!("is one of flat|cylinder|sphere (got `{other}`)"),
                );
                Shape::Flat {
                    width: 1.0,
                    height: 1.0,
                }
            }
        };
        let position = Vec3::from(doc.position);
        let normal = match (doc.normal, doc.normal_azimuth_deg) {
            (Some(n), None) => self.unit(n, format!("{field}.normal")),
            (None, Some(az)) => Vec3::from_az_el_deg(az, doc.normal_elevation_deg.unwrap_or(0.0)),
            _ => {
                self.errors
                    .push(format!("{field}.normal"), "is given once (normal or normal_azimuth_deg)");
                Vec3::X
            }
        };
        let mut r = Reflector::new(shape, Pose { position, normal });
        r.gamma = doc.gamma.unwrap_or(1.0);
        r.alpha = doc
            .alpha
            .unwrap_or(if shape.is_curved() { ALPHA_CURVED } else { ALPHA_FLAT });
        r.mismatch = match (doc.beta, doc.beta_loss_db) {
            (Some(_), Some(_)) => {
                self.errors
                    .push(format!("{field}.beta"), "is given once (beta or beta_loss_db)");
                WavefrontMismatch::default()
            }
            (Some(b), None) => WavefrontMismatch::Beta(b),
            (None, Some(db)) => WavefrontMismatch::AggregateDb(db),
            (None, None) => WavefrontMismatch::default(),
        };
        if shape.is_curved() && (doc.beta.is_some() || doc.beta_loss_db.is_some()) {
            self.errors
                .push(format!("{field}.beta"), "applies to flat reflectors only");
        }
        r.reflected_normal = doc
            .reflected_normal
            .map(|n| self.unit(n, format!("{field}.reflected_normal")));
        r.reflected_polarization = doc
            .reflected_polarization
            .map(|n| self.unit(n, format!("{field}.reflected_polarization")));
        r.delta_psi_rad = self.angle(doc.delta_psi_deg, doc.delta_psi_rad, &field, "delta_psi");
        r.delta_omega_rad =
            self.angle(doc.delta_omega_deg, doc.delta_omega_rad, &field, "delta_omega");
        r
    }

    fn angle(&mut self, deg: Option<f64>, rad: Option<f64>, field: &str, name: &str) -> Option<f64> {
        match (deg, rad) {
            (Some(_), Some(_)) => {
                self.errors
                    .push(format!("{field}.{name}_deg"), format!("is given once ({name}_deg or {name}_rad)"));
                None
            }
            (Some(d), None) => Some(d.to_radians()),
            (None, r) => r,
        }
    }

    fn sweep(&mut self, doc: SweepDoc) -> Evaluation {
        let defaults = SweepSpec::default();
        let range = |v: Option<V3>, d: SampleRange| v.map_or(d, |v| SampleRange::new(v[0], v[1], v[2]));
        Evaluation::Sweep {
            rx_position: doc.rx_position.into(),
            reference_azimuth_deg: doc.reference_azimuth_deg.unwrap_or(0.0),
            sweep: SweepSpec {
                azimuth: range(doc.azimuth, defaults.azimuth),
                elevation: range(doc.elevation, defaults.elevation),
            },
        }
    }

    fn olos(&mut self, doc: OlosDoc) -> Olos {
        let eta = match (doc.eta, doc.eta_db) {
            (Some(_), Some(_)) => {
                self.errors.push("olos.eta_db", "is given once (eta or eta_db)");
                1.0
            }
            (Some(e), None) => e,
            (None, Some(db)) => db_to_linear(db),
            (None, None) => 1.0,
        };
        Olos {
            distance_m: doc.distance_m,
            eta,
            arrival_azimuth_deg: doc.arrival_azimuth_deg,
            arrival_elevation_deg: doc.arrival_elevation_deg,
            tx_gain_dbi: doc.tx_gain_dbi,
        }
    }

    fn plane_wave(&mut self, doc: PlaneWaveDoc) -> PlaneWaveModel {
        let mut model = match (doc.solid_angle_sr, doc.calibration.is_empty()) {
            (Some(_), false) => {
                self.errors.push(
                    "plane_wave.solid_angle_sr",
                    "is given once (solid_angle_sr or calibration)",
                );
                PlaneWaveModel::default()
            }
            (Some(omega), true) => PlaneWaveModel::with_solid_angle(omega),
            (None, false) => {
                let points: Vec<(f64, f64)> = doc.calibration.iter().map(|p| (p[0], p[1])).collect();
                PlaneWaveModel::from_calibration(&points).unwrap_or_else(|e| {
                    self.errors.push("plane_wave.calibration", e);
                    PlaneWaveModel::default()
                })
            }
            (None, true) => PlaneWaveModel::default(),
        };
        model.max_area_m2 = doc.max_area_m2;
        model
    }

    fn environment(&mut self, doc: EnvironmentDoc) -> Environment {
        let mut env = Environment {
            max_order: doc.max_order.unwrap_or(2),
            ..Environment::default()
        };
        for (name, m) in doc.material {
            let field = format!("environment.material.{name}");
            let material = match (m.loss_db, m.table.is_empty()) {
                (Some(db), true) => Material::constant(db),
                (None, false) => Material::table(m.table.iter().map(|p| (p[0], p[1])).collect()),
                _ => {
                    self.errors.push(field, "has exactly one of loss_db or table");
                    Material::constant(0.0)
                }
            };
            env.materials.insert(name, material);
        }
        for (i, f) in doc.facet.into_iter().enumerate() {
            let field = format!("environment.facet[{i}]");
            if let Some(facet) = self.facet(&field, f) {
                env.facets.push(facet);
            }
        }
        env
    }

    fn facet(&mut self, field: &str, f: FacetDoc) -> Option<Facet> {
        if let Some(axis) = f.axis.as_deref() {
            let axis = match axis {
                "x" => Axis::X,
                "y" => Axis::Y,
                "z" => Axis::Z,
                other => {
                    self.errors
                        .push(format!("{field}.axis"), format!("is one of x|y|z (got `{other}`)"));
                    return None;
                }
            };
            let at = self.require(f.at, format!("{field}.at"))?;
            let min = self.require(f.min, format!("{field}.min"))?;
            let max = self.require(f.max, format!("{field}.max"))?;
            return Some(Facet::axis_aligned(axis, at, min, max, &f.material));
        }
        let center = self.require(f.center, format!("{field}.center"))?;
        let u = self.require(f.u, format!("{field}.u"))?;
        let v = self.require(f.v, format!("{field}.v"))?;
        let (u, v) = (self.unit(u, format!("{field}.u")), self.unit(v, format!("{field}.v")));
        let normal = match f.normal {
            Some(n) => self.unit(n, format!("{field}.normal")),
            None => u.cross(v).normalized().unwrap_or_else(|_| {
                self.errors.push(format!("{field}.v"), "is not parallel to u");
                Vec3::Z
            }),
        };
        Some(Facet {
            center: center.into(),
            u,
            v,
            half_u: self.require(f.half_u, format!("{field}.half_u"))?,
            half_v: self.require(f.half_v, format!("{field}.half_v"))?,
            normal,
            material: f.material,
        })
    }
}

fn grid(doc: GridDoc) -> GridSpec {
    let d = GridSpec::default();
    GridSpec {
        origin: doc.origin.map(Vec3::from).unwrap_or(d.origin),
        x_extent: doc.x_extent.unwrap_or(d.x_extent),
        y_extent: doc.y_extent.unwrap_or(d.y_extent),
        cell: doc.cell.unwrap_or(d.cell),
        rx_height: doc.rx_height.unwrap_or(d.rx_height),
    }
}

fn antenna_doc(a: &Antenna, with_pose: bool) -> AntennaDoc {
    AntennaDoc {
        position: with_pose.then(|| a.position.into()),
        boresight: with_pose.then(|| a.boresight.into()),
        polarization: Some(a.polarization.into()),
        peak_gain_dbi: Some(a.peak_gain_dbi),
        hpbw_az_deg: Some(a.hpbw_az_deg),
        hpbw_el_deg: Some(a.hpbw_el_deg),
        sidelobe_floor_db: Some(a.sidelobe_floor_db),
        ..AntennaDoc::default()
    }
}

fn document(s: &Scenario) -> ScenarioDoc {
    let mut rx = antenna_doc(&s.rx_template, false);
    // the receiver boresight is always re-derived from the policy
    rx.polarization = None;
    match s.rx_policy {
        RxPolicy::AimAtReflector(i) => {
            rx.aim = Some("reflector".into());
            rx.aim_reflector = Some(i);
        }
        RxPolicy::FixedBearing {
            azimuth_deg,
            elevation_deg,
        } => {
            rx.aim = Some("bearing".into());
            rx.boresight_azimuth_deg = Some(azimuth_deg);
            rx.boresight_elevation_deg = Some(elevation_deg);
        }
        RxPolicy::AimAtPoint(p) => {
            rx.aim = Some("point".into());
            rx.aim_at = Some(p.into());
        }
    }
    let reflector = s.reflectors.iter().map(reflector_doc).collect();
    let (grid, sweep) = match &s.evaluation {
        Evaluation::Grid(g) => (
            Some(GridDoc {
                origin: Some(g.origin.into()),
                x_extent: Some(g.x_extent),
                y_extent: Some(g.y_extent),
                cell: Some(g.cell),
                rx_height: Some(g.rx_height),
            }),
            None,
        ),
        Evaluation::Sweep {
            rx_position,
            reference_azimuth_deg,
            sweep,
        } => {
            let r = |r: SampleRange| Some([r.start, r.stop, r.step]);
            (
                None,
                Some(SweepDoc {
                    rx_position: (*rx_position).into(),
                    reference_azimuth_deg: Some(*reference_azimuth_deg),
                    azimuth: r(sweep.azimuth),
                    elevation: r(sweep.elevation),
                }),
            )
        }
    };
    let plane_wave = PlaneWaveDoc {
        solid_angle_sr: s
            .plane_wave
            .calibration_points
            .is_empty()
            .then_some(s.plane_wave.solid_angle_sr),
        calibration: s
            .plane_wave
            .calibration_points
            .iter()
            .map(|&(d, a)| [d, a])
            .collect(),
        max_area_m2: s.plane_wave.max_area_m2,
    };
    ScenarioDoc {
        schema_version: Some(SCHEMA_VERSION),
        name: s.name.clone(),
        ambient_floor_dbm: Some(s.ambient_floor_dbm),
        second_order: s.second_order.iter().map(|&(a, b)| [a, b]).collect(),
        link: LinkDoc {
            frequency_hz: Some(s.constants.frequency_hz),
            tx_power_dbm: Some(s.constants.tx_power_dbm),
        },
        tx: antenna_doc(&s.tx, true),
        rx,
        reflector,
        grid,
        sweep,
        olos: s.olos.map(|o| OlosDoc {
            distance_m: o.distance_m,
            eta: Some(o.eta),
            arrival_azimuth_deg: o.arrival_azimuth_deg,
            arrival_elevation_deg: o.arrival_elevation_deg,
            tx_gain_dbi: o.tx_gain_dbi,
            ..OlosDoc::default()
        }),
        plane_wave: Some(plane_wave),
        environment: s.environment.as_ref().map(environment_doc),
    }
}

fn reflector_doc(r: &Reflector) -> ReflectorDoc {
    let mut doc = ReflectorDoc {
        position: r.position().into(),
        normal: Some(r.pose.normal.into()),
        gamma: Some(r.gamma),
        alpha: Some(r.alpha),
        reflected_normal: r.reflected_normal.map(Into::into),
        reflected_polarization: r.reflected_polarization.map(Into::into),
        delta_psi_rad: r.delta_psi_rad,
        delta_omega_rad: r.delta_omega_rad,
        ..ReflectorDoc::default()
    };
    match r.shape {
        Shape::Flat { width, height } => {
            doc.shape = "flat".into();
            doc.width = Some(width);
            doc.height = Some(height);
        }
        Shape::Cylinder { radius, height } => {
            doc.shape = "cylinder".into();
            doc.radius = Some(radius);
            doc.height = Some(height);
        }
        Shape::Sphere { radius } => {
            doc.shape = "sphere".into();
            doc.radius = Some(radius);
        }
    }
    if !r.shape.is_curved() {
        match r.mismatch {
            WavefrontMismatch::Beta(b) => doc.beta = Some(b),
            WavefrontMismatch::AggregateDb(db) => doc.beta_loss_db = Some(db),
        }
    }
    doc
}

fn environment_doc(env: &Environment) -> EnvironmentDoc {
    EnvironmentDoc {
        max_order: Some(env.max_order),
        material: env
            .materials
            .iter()
            .map(|(name, m)| {
                let doc = MaterialDoc {
                    loss_db: None,
                    table: m.losses.iter().map(|&(f, l)| [f, l]).collect(),
                };
                (name.clone(), doc)
            })
            .collect(),
        facet: env
            .facets
            .iter()
            .map(|f| FacetDoc {
                material: f.material.clone(),
                center: Some(f.center.into()),
                u: Some(f.u.into()),
                v: Some(f.v.into()),
                half_u: Some(f.half_u),
                half_v: Some(f.half_v),
                normal: Some(f.normal.into()),
                ..FacetDoc::default()
            })
            .collect(),
    }
}

/// Every default applied when a key is omitted, with its physical origin.
pub fn explain_defaults() -> String {
    let omega = PlaneWaveModel::default().solid_angle_sr;
    let rows: [(&str, String, &str); 14] = [
        ("schema_version", SCHEMA_VERSION.to_string(), "current document format"),
        ("link.frequency_hz", format!("{DEFAULT_FREQUENCY_HZ:e}"), "28 GHz carrier of the horn-antenna channel sounder used in the corridor and outdoor measurements"),
        ("link.tx_power_dbm", format!("{DEFAULT_TX_POWER_DBM}"), "transmit power of the measurement runs"),
        ("tx/rx.peak_gain_dbi", format!("{DEFAULT_PEAK_GAIN_DBI}"), "boresight gain of the standard-gain horns at both ends"),
        ("tx/rx.hpbw_az_deg", format!("{DEFAULT_HPBW_AZ_DEG}"), "horn half-power beamwidth, azimuth plane"),
        ("tx/rx.hpbw_el_deg", format!("{DEFAULT_HPBW_EL_DEG}"), "horn half-power beamwidth, elevation plane"),
        ("tx/rx.sidelobe_floor_db", format!("{DEFAULT_SIDELOBE_FLOOR_DB}"), "pattern floor of the Gaussian main-lobe model below peak"),
        ("ambient_floor_dbm", format!("{DEFAULT_AMBIENT_DBM}"), "uniform power left in the reflector-free corridor by weak higher-order wall reflections"),
        ("reflector.alpha (flat)", format!("{ALPHA_FLAT}"), "per-degree orientation loss fitted to the decay across the flat-sheet corridor grids"),
        ("reflector.alpha (cylinder, sphere)", format!("{ALPHA_CURVED}"), "per-degree orientation loss fitted to the curved-reflector corridor grids"),
        ("reflector.gamma", "1".into(), "polished metal sheet reflects all incident power"),
        ("reflector.beta", "1".into(), "no wavefront mismatch loss unless measured; small sheets use beta_loss_db = -3"),
        ("plane_wave.solid_angle_sr", format!("{omega:.6e}"), "0.0625 m^2 wavefront area at 3.6 m: the reflector size beyond which received power stops growing"),
        ("grid", "1.5 m x 15 m, 0.3 m cells".into(), "receiver grid of the corridor measurements"),
    ];
    let mut out = String::new();
    for (key, value, why) in rows {
        out.push_str(&format!("{key} = {value}\n    {why}\n"));
    }
    out.push_str("sweep = azimuth -168..168 step 10, elevation -30..30 step 10\n    rotation range of the outdoor receiver horn\n");
    out.push_str("rx.aim = reflector\n    the receiving horn faces the reflector during grid measurements\n");
    out
}
