//! Scenario description, file format and result serialization.

pub mod csv;
mod schema;

use std::path::{Path, PathBuf};

use crate::antenna::{Antenna, PlaneWaveModel};
use crate::error::{Error, Result, ValidationErrors};
use crate::geometry::Vec3;
use crate::gridsim::{
    breakdown, cdf, simulate, CdfResult, EvaluationPoint, GridSpec, PowerMap, SweepSpec,
    DEFAULT_OUTAGE_DBM,
};
use crate::linkbudget::{LinkConstants, PathContribution};
use crate::raytrace::Environment;
use crate::reflector::Reflector;

pub use schema::{explain_defaults, load_scenario, load_scenario_file, to_toml};

/// Where a receiver points while power is evaluated on a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RxPolicy {
    /// Aim at the reflector with this index; at the transmitter when the
    /// scenario has no reflectors.
    AimAtReflector(usize),
    AimAtPoint(Vec3),
    FixedBearing { azimuth_deg: f64, elevation_deg: f64 },
}

impl Default for RxPolicy {
    fn default() -> Self {
        RxPolicy::AimAtReflector(0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Evaluation {
    Grid(GridSpec),
    /// Fixed receiver rotated through a sweep. Sweep azimuths are offsets
    /// from `reference_azimuth_deg`.
    Sweep {
        rx_position: Vec3,
        reference_azimuth_deg: f64,
        sweep: SweepSpec,
    },
}

/// Obstructed direct path between transmitter and receiver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Olos {
    /// Effective path length; the straight TX–RX distance when absent.
    pub distance_m: Option<f64>,
    /// Linear obstruction coefficient in (0, 1].
    pub eta: f64,
    /// Bearing of the arriving wave at the receiver; the direction of the
    /// transmitter when absent.
    pub arrival_azimuth_deg: Option<f64>,
    pub arrival_elevation_deg: Option<f64>,
    /// Transmit gain along the path; the transmitter peak when absent.
    pub tx_gain_dbi: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub constants: LinkConstants,
    pub tx: Antenna,
    /// Receiver template; position and boresight are set per evaluation point.
    pub rx_template: Antenna,
    pub rx_policy: RxPolicy,
    pub reflectors: Vec<Reflector>,
    /// Ordered reflector index pairs evaluated as two-bounce cascades.
    pub second_order: Vec<(usize, usize)>,
    pub evaluation: Evaluation,
    pub ambient_floor_dbm: f64,
    pub olos: Option<Olos>,
    pub plane_wave: PlaneWaveModel,
    pub environment: Option<Environment>,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            name: String::new(),
            constants: LinkConstants::default(),
            tx: Antenna::default(),
            rx_template: Antenna::default(),
            rx_policy: RxPolicy::default(),
            reflectors: Vec::new(),
            second_order: Vec::new(),
            evaluation: Evaluation::Grid(GridSpec::default()),
            ambient_floor_dbm: crate::linkbudget::DEFAULT_AMBIENT_DBM,
            olos: None,
            plane_wave: PlaneWaveModel::default(),
            environment: None,
        }
    }
}

impl Scenario {
    /// Checks every component, collecting all violations.
    pub fn validate(&self) -> Result<()> {
        let mut errors = ValidationErrors::default();
        self.constants.validate(&mut errors);
        self.tx.validate("tx", &mut errors);
        self.rx_template.validate("rx", &mut errors);
        self.plane_wave.validate(&mut errors);
        for (i, r) in self.reflectors.iter().enumerate() {
            let field = format!("reflector[{i}]");
            r.validate(&field, &mut errors);
            errors.check(
                r.position().distance(self.tx.position) > 0.0,
                format!("{field}.position"),
                "is distinct from tx.position",
            );
        }
        let n = self.reflectors.len();
        for (k, &(a, b)) in self.second_order.iter().enumerate() {
            errors.check(a < n && b < n, format!("second_order[{k}]"), "has indices in range");
            errors.check(a != b, format!("second_order[{k}]"), "uses distinct reflectors");
            if a < n && b < n {
                for idx in [a, b] {
                    errors.check(
                        !self.reflectors[idx].shape.is_curved(),
                        format!("second_order[{k}]"),
                        "references flat reflectors only",
                    );
                }
            }
        }
        if let RxPolicy::AimAtReflector(i) = self.rx_policy {
            errors.check(
                n == 0 || i < n,
                "rx.aim_at_reflector",
                "is in range",
            );
        }
        match &self.evaluation {
            Evaluation::Grid(g) => g.validate(&mut errors),
            Evaluation::Sweep {
                rx_position, sweep, ..
            } => {
                sweep.validate(&mut errors);
                errors.check(
                    rx_position.distance(self.tx.position) > 0.0,
                    "sweep.rx_position",
                    "is distinct from tx.position",
                );
            }
        }
        errors.check(
            self.ambient_floor_dbm.is_finite(),
            "ambient_floor_dbm",
            "is finite",
        );
        if let Some(o) = &self.olos {
            errors.check(o.eta > 0.0 && o.eta <= 1.0, "olos.eta_db", "<= 0");
            if let Some(d) = o.distance_m {
                errors.check(d > 0.0, "olos.distance_m", "> 0");
            }
        }
        if let Some(env) = &self.environment {
            env.validate(&mut errors);
        }
        errors.into_result()
    }

    pub fn is_grid(&self) -> bool {
        matches!(self.evaluation, Evaluation::Grid(_))
    }

    /// Copy of the scenario with all reflectors removed.
    pub fn without_reflectors(&self) -> Scenario {
        Scenario {
            reflectors: Vec::new(),
            second_order: Vec::new(),
            ..self.clone()
        }
    }

    /// Copy of the scenario at another carrier frequency.
    pub fn at_frequency(&self, frequency_hz: f64) -> Result<Scenario> {
        Ok(Scenario {
            constants: LinkConstants::new(frequency_hz, self.constants.tx_power_dbm)?,
            ..self.clone()
        })
    }
}

/// Writes `contents` to `path` through a temporary file in the same
/// directory, so readers never observe a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let io = |e: std::io::Error| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let file_name = path
        .file_name()
        .ok_or_else(|| Error::Io {
            path: path.display().to_string(),
            message: "not a file path".into(),
        })?
        .to_string_lossy();
    let tmp = dir.join(format!(".{file_name}.tmp{}", std::process::id()));
    std::fs::write(&tmp, contents).map_err(io)?;
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        io(e)
    })
}

/// Everything a simulation run writes out.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultBundle {
    pub name: String,
    pub map: PowerMap,
    pub cdf: CdfResult,
    pub breakdown: Option<Vec<(EvaluationPoint, Vec<PathContribution>)>>,
}

impl ResultBundle {
    /// Simulates `scenario`; `verbose` also keeps every path contribution.
    pub fn run(scenario: &Scenario, verbose: bool) -> Result<Self> {
        let map = simulate(scenario)?;
        let cdf = cdf(&map.samples())?;
        let breakdown = if verbose {
            Some(breakdown(scenario)?)
        } else {
            None
        };
        Ok(ResultBundle {
            name: scenario.name.clone(),
            map,
            cdf,
            breakdown,
        })
    }

    /// Writes `grid.csv` or `sweep.csv`, `cdf.csv`, `summary.txt` and, when
    /// present, `breakdown.csv` into `dir`. Returns the written paths.
    pub fn write_to(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir).map_err(|e| Error::Io {
            path: dir.display().to_string(),
            message: e.to_string(),
        })?;
        let mut files = match &self.map {
            PowerMap::Grid(g) => vec![("grid.csv", csv::grid_csv(g))],
            PowerMap::Sweep(s) => vec![("sweep.csv", csv::sweep_csv(s))],
        };
        files.push(("cdf.csv", csv::cdf_csv(&self.cdf)));
        files.push(("summary.txt", csv::summary(&self.name, &self.cdf, DEFAULT_OUTAGE_DBM)));
        if let Some(rows) = &self.breakdown {
            files.push(("breakdown.csv", csv::breakdown_csv(rows)));
        }
        files
            .into_iter()
            .map(|(name, text)| {
                let path = dir.join(name);
                write_atomic(&path, &text)?;
                Ok(path)
            })
            .collect()
    }
}
