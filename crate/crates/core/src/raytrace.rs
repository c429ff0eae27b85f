//! Specular image-method ray tracer over rectangular facets.
//!
//! Paths up to second order are enumerated by mirroring the source through
//! facet planes. A bounce is accepted only if its reflection point lies
//! inside the facet rectangle and no other facet blocks any segment.

use std::collections::BTreeMap;

use ndarray::Array2;

use crate::antenna::Antenna;
use crate::error::{Error, Result, ValidationErrors};
use crate::geometry::Vec3;
use crate::gridsim::{grid_receiver, PowerGrid};
use crate::linkbudget::LinkConstants;
use crate::reflector::{Reflector, Shape};
use crate::scenario_io::{Evaluation, Scenario};
use crate::units::{dbm_to_mw, linear_to_db, mw_to_dbm};

const EPS: f64 = 1e-9;

/// Reflection loss of a surface material versus frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct Material {
    /// `(frequency Hz, loss dB)` points, ascending in frequency.
    pub losses: Vec<(f64, f64)>,
}

impl Material {
    pub fn constant(loss_db: f64) -> Self {
        Material {
            losses: vec![(1.0, loss_db)],
        }
    }

    pub fn table(mut points: Vec<(f64, f64)>) -> Self {
        points.sort_by(|a, b| a.0.total_cmp(&b.0));
        Material { losses: points }
    }

    /// Loss in dB, interpolated linearly in log-frequency and held constant
    /// outside the table.
    pub fn loss_db(&self, frequency_hz: f64) -> f64 {
        let pts = &self.losses;
        let first = pts[0];
        let last = pts[pts.len() - 1];
        if frequency_hz <= first.0 {
            return first.1;
        }
        if frequency_hz >= last.0 {
            return last.1;
        }
        let k = pts.partition_point(|p| p.0 <= frequency_hz);
        let (lo, hi) = (pts[k - 1], pts[k]);
        let t = (frequency_hz / lo.0).ln() / (hi.0 / lo.0).ln();
        lo.1 + t * (hi.1 - lo.1)
    }

    fn validate(&self, field: &str, errors: &mut ValidationErrors) {
        errors.check(!self.losses.is_empty(), field, "has at least one loss entry");
        for &(f, l) in &self.losses {
            errors.check(f > 0.0, format!("{field}.frequency_hz"), "> 0");
            errors.check(l >= 0.0 && l.is_finite(), format!("{field}.loss_db"), ">= 0");
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Planar rectangle `center + a·u + b·v` with `|a| ≤ half_u`, `|b| ≤ half_v`.
/// Both faces reflect.
#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub center: Vec3,
    pub u: Vec3,
    pub v: Vec3,
    pub half_u: f64,
    pub half_v: f64,
    pub normal: Vec3,
    pub material: String,
}

impl Facet {
    /// Rectangle in the plane `axis = at`, spanning `min..max` in the other
    /// two coordinates taken in cyclic order (y,z for X; z,x for Y; x,y for Z).
    pub fn axis_aligned(axis: Axis, at: f64, min: [f64; 2], max: [f64; 2], material: &str) -> Self {
        let (c0, c1) = ((min[0] + max[0]) / 2.0, (min[1] + max[1]) / 2.0);
        let (center, u, v, normal) = match axis {
            Axis::X => (Vec3::new(at, c0, c1), Vec3::Y, Vec3::Z, Vec3::X),
            Axis::Y => (Vec3::new(c1, at, c0), Vec3::Z, Vec3::X, Vec3::Y),
            Axis::Z => (Vec3::new(c0, c1, at), Vec3::X, Vec3::Y, Vec3::Z),
        };
        Facet {
            center,
            u,
            v,
            half_u: (max[0] - min[0]).abs() / 2.0,
            half_v: (max[1] - min[1]).abs() / 2.0,
            normal,
            material: material.to_string(),
        }
    }

    /// Facet occupying a flat reflector; `u` is horizontal.
    pub fn from_reflector(refl: &Reflector, material: &str) -> Result<Self> {
        let Shape::Flat { width, height } = refl.shape else {
            return Err(Error::ShapeMismatch {
                expected: "flat",
                found: refl.shape.name(),
            });
        };
        let n = refl.pose.normal;
        let u = Vec3::Z.cross(n).normalized().or_else(|_| Vec3::X.cross(n).normalized())?;
        let v = n.cross(u);
        Ok(Facet {
            center: refl.position(),
            u,
            v,
            half_u: width / 2.0,
            half_v: height / 2.0,
            normal: n,
            material: material.to_string(),
        })
    }

    pub fn area(&self) -> f64 {
        4.0 * self.half_u * self.half_v
    }

    /// Mirror image of `p` through the facet plane.
    pub fn mirror(&self, p: Vec3) -> Vec3 {
        p - self.normal * (2.0 * (p - self.center).dot(self.normal))
    }

    fn signed_distance(&self, p: Vec3) -> f64 {
        (p - self.center).dot(self.normal)
    }

    fn contains(&self, p: Vec3) -> bool {
        let d = p - self.center;
        d.dot(self.u).abs() <= self.half_u + EPS && d.dot(self.v).abs() <= self.half_v + EPS
    }

    /// Parameter `t` in (0, 1) where segment `a → b` crosses the facet plane
    /// inside the rectangle.
    fn crossing(&self, a: Vec3, b: Vec3) -> Option<f64> {
        let (da, db) = (self.signed_distance(a), self.signed_distance(b));
        if da * db >= 0.0 {
            return None;
        }
        let t = da / (da - db);
        let p = a + (b - a) * t;
        self.contains(p).then_some(t)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    pub facets: Vec<Facet>,
    pub materials: BTreeMap<String, Material>,
    pub max_order: usize,
}

impl Default for Environment {
    fn default() -> Self {
        Environment {
            facets: Vec::new(),
            materials: BTreeMap::new(),
            max_order: 2,
        }
    }
}

impl Environment {
    pub fn validate(&self, errors: &mut ValidationErrors) {
        errors.check(self.max_order <= 2, "environment.max_order", "<= 2");
        for (name, m) in &self.materials {
            m.validate(&format!("environment.material.{name}"), errors);
        }
        for (i, f) in self.facets.iter().enumerate() {
            let field = format!("environment.facet[{i}]");
            errors.check(f.area() > 0.0, format!("{field}.area"), "> 0");
            errors.check(
                self.materials.contains_key(&f.material),
                format!("{field}.material"),
                "is defined in environment.material",
            );
        }
    }

    pub fn with_facet(mut self, facet: Facet) -> Self {
        self.facets.push(facet);
        self
    }

    pub fn with_material(mut self, name: &str, material: Material) -> Self {
        self.materials.insert(name.to_string(), material);
        self
    }

    /// Adds every flat reflector as a facet whose loss is `-10·log10(Γ)`.
    pub fn with_reflectors(mut self, reflectors: &[Reflector]) -> Result<Self> {
        for (i, r) in reflectors.iter().enumerate() {
            if r.shape.is_curved() {
                continue;
            }
            let name = format!("reflector[{i}]");
            self.facets.push(Facet::from_reflector(r, &name)?);
            self.materials
                .insert(name, Material::constant(-linear_to_db(r.gamma)));
        }
        Ok(self)
    }

    fn loss_db(&self, facet: usize, frequency_hz: f64) -> f64 {
        self.materials
            .get(&self.facets[facet].material)
            .map_or(0.0, |m| m.loss_db(frequency_hz))
    }

    fn blocked(&self, a: Vec3, b: Vec3, skip: &[usize]) -> bool {
        self.facets.iter().enumerate().any(|(k, f)| {
            !skip.contains(&k) && f.crossing(a, b).is_some_and(|t| t > EPS && t < 1.0 - EPS)
        })
    }
}

/// Specular path from transmitter to receiver.
#[derive(Debug, Clone, PartialEq)]
pub struct RayPath {
    /// Transmitter, reflection points, receiver.
    pub points: Vec<Vec3>,
    /// Facet index of each reflection point.
    pub facets: Vec<usize>,
    pub length: f64,
    /// Unit direction leaving the transmitter.
    pub departure: Vec3,
    /// Unit direction from the receiver back along the arriving ray.
    pub arrival: Vec3,
}

impl RayPath {
    fn new(points: Vec<Vec3>, facets: Vec<usize>) -> Result<Self> {
        let length = points.windows(2).map(|w| w[0].distance(w[1])).sum();
        let n = points.len();
        Ok(RayPath {
            departure: points[0].direction_to(points[1])?,
            arrival: points[n - 1].direction_to(points[n - 2])?,
            length,
            points,
            facets,
        })
    }

    pub fn order(&self) -> usize {
        self.facets.len()
    }

    /// Sum of the material losses of every bounce, dB (≥ 0).
    pub fn bounce_losses_db(&self, env: &Environment, frequency_hz: f64) -> f64 {
        self.facets.iter().map(|&f| env.loss_db(f, frequency_hz)).sum()
    }
}

/// Enumerates unobstructed specular paths up to `max_order` bounces.
pub fn trace(env: &Environment, tx: Vec3, rx: Vec3, max_order: usize) -> Result<Vec<RayPath>> {
    if max_order > 2 {
        return Err(Error::invalid("max_order", format!("must be <= 2, got {max_order}")));
    }
    if let Some(k) = env.facets.iter().position(|f| !(f.area() > 0.0)) {
        let mut errors = ValidationErrors::default();
        errors.push(format!("environment.facet[{k}].area"), "> 0");
        return Err(Error::Validation(errors));
    }
    if tx.distance(rx) == 0.0 {
        return Err(Error::CoincidentPoints("transmitter at receiver position"));
    }
    let mut paths = Vec::new();
    if !env.blocked(tx, rx, &[]) {
        paths.push(RayPath::new(vec![tx, rx], vec![])?);
    }
    if max_order == 0 {
        return Ok(paths);
    }
    for (i, f) in env.facets.iter().enumerate() {
        let image = f.mirror(tx);
        let Some(t) = f.crossing(image, rx) else { continue };
        let q = image + (rx - image) * t;
        if env.blocked(tx, q, &[i]) || env.blocked(q, rx, &[i]) {
            continue;
        }
        paths.push(RayPath::new(vec![tx, q, rx], vec![i])?);
    }
    if max_order == 1 {
        return Ok(paths);
    }
    for (i, f1) in env.facets.iter().enumerate() {
        let image1 = f1.mirror(tx);
        for (j, f2) in env.facets.iter().enumerate() {
            if i == j {
                continue;
            }
            let image2 = f2.mirror(image1);
            let Some(t2) = f2.crossing(image2, rx) else { continue };
            let q2 = image2 + (rx - image2) * t2;
            let Some(t1) = f1.crossing(image1, q2) else { continue };
            let q1 = image1 + (q2 - image1) * t1;
            if env.blocked(tx, q1, &[i])
                || env.blocked(q1, q2, &[i, j])
                || env.blocked(q2, rx, &[j])
            {
                continue;
            }
            paths.push(RayPath::new(vec![tx, q1, q2, rx], vec![i, j])?);
        }
    }
    Ok(paths)
}

/// Friis over the unfolded length with the antenna gains along the departing
/// and arriving rays, less the bounce losses. dBm.
pub fn path_power(
    consts: &LinkConstants,
    tx: &Antenna,
    rx: &Antenna,
    path: &RayPath,
    env: &Environment,
) -> f64 {
    let fspl = consts.wavelength_m / (4.0 * std::f64::consts::PI * path.length);
    let mw = dbm_to_mw(consts.tx_power_dbm)
        * tx.gain(path.departure)
        * rx.gain(path.arrival)
        * fspl
        * fspl;
    mw_to_dbm(mw) - path.bounce_losses_db(env, consts.frequency_hz)
}

/// Non-coherent sum of all traced paths per grid cell. The scenario's flat
/// reflectors are added to `env` as facets. Cells without paths hold −∞.
pub fn rt_grid(env: &Environment, scenario: &Scenario) -> Result<PowerGrid> {
    let Evaluation::Grid(spec) = scenario.evaluation else {
        return Err(Error::invalid("evaluation", "grid evaluation required"));
    };
    scenario.validate()?;
    let env = env.clone().with_reflectors(&scenario.reflectors)?;
    let mut errors = ValidationErrors::default();
    env.validate(&mut errors);
    errors.into_result()?;
    let mut values = Array2::from_elem(spec.dims(), f64::NEG_INFINITY);
    for (i, j, c) in spec.cell_centers() {
        let rx = grid_receiver(scenario, c)?;
        let mw: f64 = trace(&env, scenario.tx.position, c, env.max_order)?
            .iter()
            .map(|p| dbm_to_mw(path_power(&scenario.constants, &scenario.tx, &rx, p, &env)))
            .sum();
        values[[i, j]] = mw_to_dbm(mw);
    }
    Ok(PowerGrid { spec, values })
}
