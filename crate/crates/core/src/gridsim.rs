//! Received power over receiver grids and antenna-rotation sweeps, plus the
//! CDF statistics used to compare deployments.

use std::str::FromStr;

use ndarray::Array2;

use crate::antenna::Antenna;
use crate::error::{Error, Result, ValidationErrors};
use crate::geometry::Vec3;
use crate::linkbudget::{
    ambient, first_order, olos_power, second_order, total_power, PathContribution, PathKind,
};
use crate::reflector::{EffectiveAreaContext, Reflector, Shape};
use crate::scenario_io::{Evaluation, RxPolicy, Scenario};
use crate::units::db_to_linear;

/// Default outage threshold, dBm.
pub const DEFAULT_OUTAGE_DBM: f64 = -75.0;

/// Rectangular receiver grid in the horizontal plane. Cells are centred at
/// `origin + ((i + ½)·cell, (j + ½)·cell, rx_height)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub origin: Vec3,
    pub x_extent: f64,
    pub y_extent: f64,
    pub cell: f64,
    pub rx_height: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            origin: Vec3::ZERO,
            x_extent: 1.5,
            y_extent: 15.0,
            cell: 0.3,
            rx_height: 1.3,
        }
    }
}

impl GridSpec {
    pub fn validate(&self, errors: &mut ValidationErrors) {
        errors.check(self.cell > 0.0, "grid.cell", "> 0");
        for (name, extent) in [("grid.x_extent", self.x_extent), ("grid.y_extent", self.y_extent)] {
            errors.check(extent > 0.0, name, "> 0");
            if self.cell > 0.0 && extent > 0.0 {
                let n = (extent / self.cell).round();
                errors.check(
                    n >= 1.0 && (n * self.cell - extent).abs() < 1e-9,
                    name,
                    "is a positive multiple of grid.cell",
                );
            }
        }
        errors.check(self.origin.is_finite(), "grid.origin", "is finite");
    }

    /// Number of cells along x and y.
    pub fn dims(&self) -> (usize, usize) {
        (
            (self.x_extent / self.cell).round() as usize,
            (self.y_extent / self.cell).round() as usize,
        )
    }

    pub fn cell_center(&self, i: usize, j: usize) -> Vec3 {
        self.origin
            + Vec3::new(
                (i as f64 + 0.5) * self.cell,
                (j as f64 + 0.5) * self.cell,
                self.rx_height,
            )
    }

    /// Corner points of the grid at receiver height.
    pub fn corners(&self) -> [Vec3; 4] {
        let base = self.origin + Vec3::new(0.0, 0.0, self.rx_height);
        [
            base,
            base + Vec3::new(self.x_extent, 0.0, 0.0),
            base + Vec3::new(0.0, self.y_extent, 0.0),
            base + Vec3::new(self.x_extent, self.y_extent, 0.0),
        ]
    }

    pub fn cell_centers(&self) -> impl Iterator<Item = (usize, usize, Vec3)> + '_ {
        let (nx, ny) = self.dims();
        (0..ny).flat_map(move |j| (0..nx).map(move |i| (i, j, self.cell_center(i, j))))
    }
}

/// Power per grid cell in dBm, indexed `[i_x, j_y]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerGrid {
    pub spec: GridSpec,
    pub values: Array2<f64>,
}

impl PowerGrid {
    /// Values in row-major order by y, then x.
    pub fn samples(&self) -> Vec<f64> {
        let (nx, ny) = self.values.dim();
        (0..ny)
            .flat_map(|j| (0..nx).map(move |i| (i, j)))
            .map(|idx| self.values[idx])
            .collect()
    }

    /// Index of the strongest cell; the first one in y-then-x order on ties.
    pub fn argmax(&self) -> (usize, usize) {
        let (nx, ny) = self.values.dim();
        let mut best = (0, 0);
        for j in 0..ny {
            for i in 0..nx {
                if self.values[[i, j]] > self.values[best] {
                    best = (i, j);
                }
            }
        }
        best
    }

    pub fn max(&self) -> f64 {
        self.values[self.argmax()]
    }
}

/// Samples `start, start + step, …` up to and including `stop`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl SampleRange {
    pub const fn new(start: f64, stop: f64, step: f64) -> Self {
        SampleRange { start, stop, step }
    }

    pub fn validate(&self, field: &str, errors: &mut ValidationErrors) {
        errors.check(self.step > 0.0, format!("{field}.step"), "> 0");
        errors.check(self.stop >= self.start, format!("{field}.stop"), ">= start");
        errors.check(
            self.start.is_finite() && self.stop.is_finite(),
            field.to_string(),
            "has finite bounds",
        );
    }

    pub fn samples(&self) -> Vec<f64> {
        if !(self.step > 0.0) || self.stop < self.start {
            return Vec::new();
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|k| self.start + k as f64 * self.step).collect()
    }
}

impl FromStr for SampleRange {
    type Err = Error;

    /// Parses `start:stop:step`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::Parse(format!("expected start:stop:step, got `{s}`"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let mut v = [0.0; 3];
        for (slot, p) in v.iter_mut().zip(&parts) {
            *slot = p.trim().parse().map_err(|_| bad())?;
        }
        let range = SampleRange::new(v[0], v[1], v[2]);
        let mut errors = ValidationErrors::default();
        range.validate("range", &mut errors);
        errors.into_result()?;
        Ok(range)
    }
}

/// Receiver rotations, degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub azimuth: SampleRange,
    pub elevation: SampleRange,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            azimuth: SampleRange::new(-168.0, 168.0, 10.0),
            elevation: SampleRange::new(-30.0, 30.0, 10.0),
        }
    }
}

impl SweepSpec {
    pub fn validate(&self, errors: &mut ValidationErrors) {
        self.azimuth.validate("sweep.azimuth", errors);
        self.elevation.validate("sweep.elevation", errors);
        errors.check(
            self.elevation.start >= -90.0 && self.elevation.stop <= 90.0,
            "sweep.elevation",
            "lies within [-90, 90]",
        );
    }
}

/// Power per receiver orientation in dBm, indexed `[azimuth, elevation]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularSweep {
    pub azimuths_deg: Vec<f64>,
    pub elevations_deg: Vec<f64>,
    pub values: Array2<f64>,
}

impl AngularSweep {
    /// `(azimuth, elevation, power)` of the strongest orientation.
    pub fn peak(&self) -> (f64, f64, f64) {
        let mut best = (0, 0);
        for ((a, e), &v) in self.values.indexed_iter() {
            if v > self.values[best] {
                best = (a, e);
            }
        }
        (
            self.azimuths_deg[best.0],
            self.elevations_deg[best.1],
            self.values[best],
        )
    }

    /// Power at the sampled orientation nearest to `(azimuth, elevation)`.
    pub fn value_at(&self, azimuth_deg: f64, elevation_deg: f64) -> f64 {
        let nearest = |xs: &[f64], x: f64| {
            xs.iter()
                .enumerate()
                .min_by(|a, b| (a.1 - x).abs().total_cmp(&(b.1 - x).abs()))
                .map(|(i, _)| i)
                .unwrap_or(0)
        };
        self.values[[
            nearest(&self.azimuths_deg, azimuth_deg),
            nearest(&self.elevations_deg, elevation_deg),
        ]]
    }

    /// Values ordered by elevation, then azimuth.
    pub fn samples(&self) -> Vec<f64> {
        let (na, ne) = self.values.dim();
        (0..ne)
            .flat_map(|e| (0..na).map(move |a| (a, e)))
            .map(|idx| self.values[idx])
            .collect()
    }
}

/// Output of a simulation run in either evaluation mode.
#[derive(Debug, Clone, PartialEq)]
pub enum PowerMap {
    Grid(PowerGrid),
    Sweep(AngularSweep),
}

impl PowerMap {
    pub fn samples(&self) -> Vec<f64> {
        match self {
            PowerMap::Grid(g) => g.samples(),
            PowerMap::Sweep(s) => s.samples(),
        }
    }

    pub fn max(&self) -> f64 {
        self.samples().into_iter().fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Empirical distribution of power samples.
#[derive(Debug, Clone, PartialEq)]
pub struct CdfResult {
    /// Ascending.
    pub samples: Vec<f64>,
}

impl CdfResult {
    /// Lower-interpolated percentile: the sample at index `floor(q·(n−1))`.
    pub fn percentile(&self, q: f64) -> f64 {
        let q = q.clamp(0.0, 1.0);
        let idx = (q * (self.samples.len() - 1) as f64 + 1e-9).floor() as usize;
        self.samples[idx]
    }

    pub fn median(&self) -> f64 {
        self.percentile(0.5)
    }

    pub fn min(&self) -> f64 {
        self.samples[0]
    }

    pub fn max(&self) -> f64 {
        self.samples[self.samples.len() - 1]
    }

    /// `(value, fraction of samples ≤ value)` for each sample.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let n = self.samples.len() as f64;
        self.samples
            .iter()
            .enumerate()
            .map(|(i, &v)| (v, (i + 1) as f64 / n))
            .collect()
    }

    /// Fraction of samples strictly below `threshold_dbm`.
    pub fn fraction_below(&self, threshold_dbm: f64) -> f64 {
        let below = self.samples.partition_point(|&v| v < threshold_dbm);
        below as f64 / self.samples.len() as f64
    }
}

pub fn cdf(samples: &[f64]) -> Result<CdfResult> {
    if samples.is_empty() {
        return Err(Error::Empty("cdf samples"));
    }
    let mut samples = samples.to_vec();
    samples.sort_by(f64::total_cmp);
    Ok(CdfResult { samples })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainReport {
    pub median_gain_db: f64,
    /// Gain between the strongest samples of each field.
    pub max_gain_db: f64,
    pub median_with_dbm: f64,
    pub median_without_dbm: f64,
    pub range_with_dbm: (f64, f64),
    pub range_without_dbm: (f64, f64),
    pub outage_threshold_dbm: f64,
    pub outage_with: f64,
    pub outage_without: f64,
}

pub fn gain_report(with: &CdfResult, without: &CdfResult, outage_threshold_dbm: f64) -> GainReport {
    GainReport {
        median_gain_db: with.median() - without.median(),
        max_gain_db: with.max() - without.max(),
        median_with_dbm: with.median(),
        median_without_dbm: without.median(),
        range_with_dbm: (with.min(), with.max()),
        range_without_dbm: (without.min(), without.max()),
        outage_threshold_dbm,
        outage_with: with.fraction_below(outage_threshold_dbm),
        outage_without: without.fraction_below(outage_threshold_dbm),
    }
}

/// Receiver pose at which power is evaluated, with its output coordinates:
/// `(x, y)` for grid cells, `(azimuth, elevation)` for sweep orientations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluationPoint {
    pub coords: (f64, f64),
    pub index: (usize, usize),
    pub rx: Antenna,
}

/// Target-region angles per reflector, derived once from the evaluation.
struct Prepared<'a> {
    scenario: &'a Scenario,
    regions: Vec<Region>,
}

#[derive(Clone, Copy)]
struct Region {
    delta_psi: f64,
    delta_omega: f64,
    r_min: f64,
}

impl<'a> Prepared<'a> {
    fn new(scenario: &'a Scenario) -> Prepared<'a> {
        let aperture_side = scenario
            .rx_template
            .effective_aperture(scenario.constants.wavelength_m)
            .sqrt();
        let subtended = |r: f64| 2.0 * (aperture_side / 2.0 / r).atan();
        let regions = scenario
            .reflectors
            .iter()
            .map(|refl| {
                let p = refl.position();
                let (r_min, psi) = match &scenario.evaluation {
                    Evaluation::Grid(g) => {
                        let r_min = g
                            .cell_centers()
                            .map(|(_, _, c)| c.distance(p))
                            .fold(f64::INFINITY, f64::min);
                        (r_min, azimuth_span(p, &g.corners()))
                    }
                    Evaluation::Sweep { rx_position, .. } => {
                        let r = rx_position.distance(p);
                        (r, subtended(r))
                    }
                };
                Region {
                    delta_psi: refl.delta_psi_rad.unwrap_or(psi),
                    delta_omega: refl.delta_omega_rad.unwrap_or_else(|| subtended(r_min)),
                    r_min,
                }
            })
            .collect();
        Prepared { scenario, regions }
    }

    fn context(&self, idx: usize, incident_distance: f64) -> Result<EffectiveAreaContext> {
        let region = self.regions[idx];
        Ok(EffectiveAreaContext {
            a_pw: self.scenario.plane_wave.area(incident_distance)?,
            delta_psi_rad: region.delta_psi,
            delta_omega_rad: region.delta_omega,
            r_min: region.r_min,
        })
    }

    fn first_order(&self, idx: usize, rx: &Antenna) -> Result<Option<PathContribution>> {
        let s = self.scenario;
        let refl = &s.reflectors[idx];
        if !illuminated(refl, s.tx.position, rx.position) {
            return Ok(None);
        }
        let r1 = s.tx.position.distance(refl.position());
        let r2 = refl.position().distance(rx.position);
        let ctx = self.context(idx, r1)?;
        first_order(&s.constants, &s.tx, rx, refl, &ctx, r1, r2).map(Some)
    }

    fn contributions(&self, rx: &Antenna) -> Result<Vec<PathContribution>> {
        let s = self.scenario;
        let mut out = Vec::new();
        for idx in 0..s.reflectors.len() {
            if let Some(c) = self.first_order(idx, rx)? {
                out.push(c);
            }
        }
        for &(a, b) in &s.second_order {
            let (ra, rb) = (&s.reflectors[a], &s.reflectors[b]);
            if !illuminated(ra, s.tx.position, rb.position())
                || !illuminated(rb, ra.position(), rx.position)
            {
                continue;
            }
            let r1 = s.tx.position.distance(ra.position());
            let r2 = ra.position().distance(rb.position());
            let r3 = rb.position().distance(rx.position);
            let ctx1 = self.context(a, r1)?;
            let ctx2 = self.context(b, r1 + r2)?;
            out.push(second_order(
                &s.constants, &s.tx, rx, ra, rb, &ctx1, &ctx2, r1, r2, r3,
            )?);
        }
        if let Some(o) = &s.olos {
            let r = o.distance_m.unwrap_or_else(|| s.tx.position.distance(rx.position));
            let arrival = match o.arrival_azimuth_deg {
                Some(az) => Vec3::from_az_el_deg(az, o.arrival_elevation_deg.unwrap_or(0.0)),
                None => rx
                    .position
                    .direction_to(s.tx.position)
                    .map_err(|_| Error::CoincidentPoints("receiver at transmitter position"))?,
            };
            let g_tx = o.tx_gain_dbi.map(db_to_linear).unwrap_or(s.tx.peak_gain());
            out.push(olos_power(&s.constants, g_tx, rx.gain(arrival), r, o.eta)?);
        }
        out.push(ambient(s.ambient_floor_dbm));
        Ok(out)
    }
}

/// A flat sheet reflects only towards the side it faces.
fn illuminated(refl: &Reflector, from: Vec3, to: Vec3) -> bool {
    match refl.shape {
        Shape::Flat { .. } => {
            let n = refl.pose.normal;
            (from - refl.position()).dot(n) > 0.0 && (to - refl.position()).dot(n) > 0.0
        }
        _ => true,
    }
}

/// Azimuth width, in radians, spanned by `points` as seen from `apex`.
fn azimuth_span(apex: Vec3, points: &[Vec3]) -> f64 {
    let bearings: Vec<f64> = points
        .iter()
        .map(|&p| (p - apex).y.atan2((p - apex).x))
        .collect();
    let reference = bearings[0];
    let offsets = bearings.iter().map(|b| {
        let d = b - reference;
        d.sin().atan2(d.cos())
    });
    let (lo, hi) = offsets.fold((0.0f64, 0.0f64), |(lo, hi), d| (lo.min(d), hi.max(d)));
    hi - lo
}

/// Receiver antenna at `position`, pointed according to `policy`.
pub fn grid_receiver(scenario: &Scenario, position: Vec3) -> Result<Antenna> {
    let rx = scenario.rx_template.at(position);
    match scenario.rx_policy {
        RxPolicy::AimAtReflector(i) => {
            let target = scenario
                .reflectors
                .get(i)
                .map(|r| r.position())
                .unwrap_or(scenario.tx.position);
            rx.aimed_at(target)
        }
        RxPolicy::AimAtPoint(p) => rx.aimed_at(p),
        RxPolicy::FixedBearing {
            azimuth_deg,
            elevation_deg,
        } => rx.with_boresight(Vec3::from_az_el_deg(azimuth_deg, elevation_deg)),
    }
}

/// Every receiver pose of the scenario's evaluation, in output order.
pub fn evaluation_points(scenario: &Scenario) -> Result<Vec<EvaluationPoint>> {
    match &scenario.evaluation {
        Evaluation::Grid(g) => g
            .cell_centers()
            .map(|(i, j, c)| {
                Ok(EvaluationPoint {
                    coords: (c.x, c.y),
                    index: (i, j),
                    rx: grid_receiver(scenario, c)?,
                })
            })
            .collect(),
        Evaluation::Sweep {
            rx_position,
            reference_azimuth_deg,
            sweep,
        } => sweep_points(scenario, *rx_position, *reference_azimuth_deg, sweep),
    }
}

fn sweep_points(
    scenario: &Scenario,
    rx_position: Vec3,
    reference_azimuth_deg: f64,
    sweep: &SweepSpec,
) -> Result<Vec<EvaluationPoint>> {
    let rx = scenario.rx_template.at(rx_position);
    let (azs, els) = (sweep.azimuth.samples(), sweep.elevation.samples());
    let mut points = Vec::with_capacity(azs.len() * els.len());
    for (e, &el) in els.iter().enumerate() {
        for (a, &az) in azs.iter().enumerate() {
            points.push(EvaluationPoint {
                coords: (az, el),
                index: (a, e),
                rx: rx.with_boresight(Vec3::from_az_el_deg(reference_azimuth_deg + az, el))?,
            });
        }
    }
    Ok(points)
}

/// All path contributions reaching `rx`, ambient floor last.
pub fn contributions_at(scenario: &Scenario, rx: &Antenna) -> Result<Vec<PathContribution>> {
    Prepared::new(scenario).contributions(rx)
}

/// Path contributions at every evaluation point.
pub fn breakdown(scenario: &Scenario) -> Result<Vec<(EvaluationPoint, Vec<PathContribution>)>> {
    scenario.validate()?;
    let prepared = Prepared::new(scenario);
    evaluation_points(scenario)?
        .into_iter()
        .map(|p| Ok((p, prepared.contributions(&p.rx)?)))
        .collect()
}

pub fn simulate_grid(scenario: &Scenario) -> Result<PowerGrid> {
    let Evaluation::Grid(spec) = scenario.evaluation else {
        return Err(Error::invalid("evaluation", "grid evaluation required"));
    };
    let mut values = Array2::from_elem(spec.dims(), f64::NEG_INFINITY);
    for (p, contribs) in breakdown(scenario)? {
        values[p.index] = total_power(&contribs);
    }
    Ok(PowerGrid { spec, values })
}

/// Sweeps the receiver of a sweep-mode scenario through `sweep`.
pub fn simulate_sweep(scenario: &Scenario, sweep: &SweepSpec) -> Result<AngularSweep> {
    let Evaluation::Sweep {
        rx_position,
        reference_azimuth_deg,
        ..
    } = scenario.evaluation
    else {
        return Err(Error::invalid("evaluation", "sweep evaluation required"));
    };
    scenario.validate()?;
    let mut errors = ValidationErrors::default();
    sweep.validate(&mut errors);
    errors.into_result()?;
    let (azs, els) = (sweep.azimuth.samples(), sweep.elevation.samples());
    let mut values = Array2::from_elem((azs.len(), els.len()), f64::NEG_INFINITY);
    let prepared = Prepared::new(scenario);
    for p in sweep_points(scenario, rx_position, reference_azimuth_deg, sweep)? {
        values[p.index] = total_power(&prepared.contributions(&p.rx)?);
    }
    Ok(AngularSweep {
        azimuths_deg: azs,
        elevations_deg: els,
        values,
    })
}

/// Runs the scenario's own evaluation.
pub fn simulate(scenario: &Scenario) -> Result<PowerMap> {
    match &scenario.evaluation {
        Evaluation::Grid(_) => simulate_grid(scenario).map(PowerMap::Grid),
        Evaluation::Sweep { sweep, .. } => simulate_sweep(scenario, sweep).map(PowerMap::Sweep),
    }
}

/// First-order power through reflector 0 resized to square sheets of each
/// side length in `sides`, at a fixed reference receiver.
///
/// The reference receiver is the sweep receiver aimed at the reflector, or
/// for grids the cell where the configured reflector delivers most power.
pub fn reflector_size_curve(scenario: &Scenario, sides: &[f64]) -> Result<Vec<(f64, f64)>> {
    scenario.validate()?;
    let base = scenario
        .reflectors
        .first()
        .ok_or(Error::Empty("scenario has no reflector to resize"))?;
    if base.shape.is_curved() {
        return Err(Error::ShapeMismatch {
            expected: "flat",
            found: base.shape.name(),
        });
    }
    let prepared = Prepared::new(scenario);
    let rx = match &scenario.evaluation {
        Evaluation::Sweep { rx_position, .. } => {
            scenario.rx_template.at(*rx_position).aimed_at(base.position())?
        }
        Evaluation::Grid(_) => {
            let mut best: Option<(f64, Antenna)> = None;
            for p in evaluation_points(scenario)? {
                if let Some(c) = prepared.first_order(0, &p.rx)? {
                    if best.is_none_or(|(v, _)| c.power_dbm > v) {
                        best = Some((c.power_dbm, p.rx));
                    }
                }
            }
            best.ok_or(Error::Empty("no grid cell sees the reflector"))?.1
        }
    };
    let mut resized = scenario.clone();
    sides
        .iter()
        .map(|&side| {
            resized.reflectors[0].shape = Shape::Flat {
                width: side,
                height: side,
            };
            let prepared = Prepared::new(&resized);
            let power = prepared
                .first_order(0, &rx)?
                .map_or(f64::NEG_INFINITY, |c| c.power_dbm);
            Ok((side, power))
        })
        .collect()
}

/// First-order contributions only, used where ambient and OLOS terms would
/// mask the reflected path.
pub fn reflected_only(contribs: &[PathContribution]) -> Vec<PathContribution> {
    contribs
        .iter()
        .filter(|c| matches!(c.kind, PathKind::FirstOrder | PathKind::SecondOrder))
        .cloned()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Pose;
    use proptest::prelude::*;

    fn corridor(reflectors: Vec<Reflector>) -> Scenario {
        Scenario {
            tx: Antenna::horn(Vec3::new(-3.0, 0.0, 1.3), Vec3::X).unwrap(),
            reflectors,
            evaluation: Evaluation::Grid(GridSpec {
                origin: Vec3::new(-1.35, 1.0, 0.0),
                ..GridSpec::default()
            }),
            plane_wave: crate::antenna::PlaneWaveModel::default().capped(0.0625),
            ..Scenario::default()
        }
    }

    fn sheet(side: f64) -> Reflector {
        Reflector::flat(side, side, Pose::horizontal(Vec3::new(0.0, 0.0, 1.3), 135.0))
    }

    #[test]
    fn empty_scenario_is_uniform_floor() {
        let grid = simulate_grid(&corridor(vec![])).unwrap();
        assert_eq!(grid.values.dim(), (5, 50));
        assert!(grid.values.iter().all(|&v| v == -70.0));
    }

    #[test]
    fn specular_column_is_near_friis() {
        let s = corridor(vec![sheet(0.61)]);
        let grid = simulate_grid(&s).unwrap();
        let g = db_to_linear(17.0);
        for j in [0, 10, 49] {
            let c = grid.spec.cell_center(4, j);
            let d = 3.0 + c.distance(Vec3::new(0.0, 0.0, 1.3));
            let f = crate::linkbudget::friis(&s.constants, g, g, d).unwrap();
            // only the ambient floor is added on top
            let expected = 10.0 * (10f64.powf(f / 10.0) + 1e-7).log10();
            assert!((grid.values[[4, j]] - expected).abs() < 1e-9);
        }
    }

    #[test]
    fn reflector_never_lowers_power() {
        let without = simulate_grid(&corridor(vec![])).unwrap();
        let with = simulate_grid(&corridor(vec![sheet(0.3)])).unwrap();
        assert!(with.values.iter().zip(without.values.iter()).all(|(a, b)| a >= b));
    }

    #[test]
    fn deterministic() {
        let s = corridor(vec![sheet(0.61)]);
        assert_eq!(simulate_grid(&s).unwrap(), simulate_grid(&s).unwrap());
    }

    #[test]
    fn sample_ranges() {
        assert_eq!(SampleRange::new(-30.0, 30.0, 10.0).samples().len(), 7);
        let az = SampleRange::new(-168.0, 168.0, 10.0).samples();
        assert_eq!(az.len(), 34);
        assert_eq!(*az.last().unwrap(), 162.0);
        let sizes: SampleRange = "0.1:0.9:0.05".parse().unwrap();
        assert_eq!(sizes.samples().len(), 17);
        assert!("0.1:0.9".parse::<SampleRange>().is_err());
        assert!("0.1:0.9:-1".parse::<SampleRange>().is_err());
    }

    #[test]
    fn cdf_basics() {
        let c = cdf(&[3.0, 1.0, 2.0, 4.0]).unwrap();
        assert_eq!(c.samples, vec![1.0, 2.0, 3.0, 4.0]);
        assert_eq!(c.median(), 2.0);
        assert_eq!(c.points()[3], (4.0, 1.0));
        assert_eq!(c.fraction_below(2.5), 0.5);
        assert!(cdf(&[]).is_err());
        assert_eq!(cdf(&[-70.0; 9]).unwrap().median(), -70.0);
    }

    #[test]
    fn gain_report_identities() {
        let a = cdf(&[-80.0, -60.0, -50.0]).unwrap();
        assert_eq!(gain_report(&a, &a, -75.0).median_gain_db, 0.0);
        let shifted = cdf(&[-70.0, -50.0, -40.0]).unwrap();
        let r = gain_report(&shifted, &a, -75.0);
        assert_eq!(r.median_gain_db, 10.0);
        assert_eq!(r.max_gain_db, 10.0);
        assert!((r.outage_without - 1.0 / 3.0).abs() < 1e-12);
        assert_eq!(r.outage_with, 0.0);
    }

    #[test]
    fn azimuth_span_of_corridor() {
        let g = GridSpec {
            origin: Vec3::new(-1.5, 1.0, 0.0),
            ..GridSpec::default()
        };
        let span = azimuth_span(Vec3::new(0.0, 0.0, 1.3), &g.corners());
        // from atan2(1, 0) = 90° to atan2(1, -1.5)
        let expected = (1.0f64).atan2(-1.5) - std::f64::consts::FRAC_PI_2;
        assert!((span - expected).abs() < 1e-12);
    }

    #[test]
    fn size_curve_saturates() {
        let s = corridor(vec![sheet(0.61)]);
        let curve = reflector_size_curve(&s, &[0.1, 0.2, 0.25, 0.3, 0.6]).unwrap();
        assert!(curve.windows(2).all(|w| w[1].1 >= w[0].1));
        assert_eq!(curve[2].1, curve[4].1);
        assert!(curve[0].1 < curve[2].1);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn power_falls_off_the_specular_line(j in 0usize..50) {
            let grid = simulate_grid(&corridor(vec![sheet(0.61)])).unwrap();
            // same row, moving away from the specular column
            for i in 1..5 {
                prop_assert!(grid.values[[i - 1, j]] <= grid.values[[i, j]] + 1e-9);
            }
        }
    }
}
