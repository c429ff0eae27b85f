//! Received-power equations for the free-space, reflected, obstructed and
//! ambient terms, and their non-coherent sum.
//!
//! Every reflected-path function returns a [`PathContribution`] whose
//! `loss_breakdown` lists each multiplicative factor in dB relative to Friis
//! at the unfolded path length with peak antenna gains. The breakdown entries
//! sum to `power_dbm - reference_dbm`.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::antenna::{polarization_mismatch, Antenna};
use crate::error::{Error, Result, ValidationErrors};
use crate::geometry::{angle_deviation, specular_reflect, AngleDeviation, Vec3};
use crate::reflector::{
    area_capture_ratio, effective_area, sigma_double_prime, sigma_prime, EffectiveAreaContext,
    Reflector,
};
use crate::units::{db_to_linear, dbm_to_mw, linear_to_db, mw_to_dbm, wavelength};

pub const DEFAULT_FREQUENCY_HZ: f64 = 28e9;
pub const DEFAULT_TX_POWER_DBM: f64 = 0.0;
pub const DEFAULT_AMBIENT_DBM: f64 = -70.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkConstants {
    pub frequency_hz: f64,
    pub wavelength_m: f64,
    pub tx_power_dbm: f64,
}

impl Default for LinkConstants {
    fn default() -> Self {
        LinkConstants {
            frequency_hz: DEFAULT_FREQUENCY_HZ,
            wavelength_m: wavelength(DEFAULT_FREQUENCY_HZ),
            tx_power_dbm: DEFAULT_TX_POWER_DBM,
        }
    }
}

impl LinkConstants {
    pub fn new(frequency_hz: f64, tx_power_dbm: f64) -> Result<Self> {
        if !(frequency_hz > 0.0 && frequency_hz.is_finite()) {
            return Err(Error::invalid("frequency_hz", format!("must be > 0, got {frequency_hz}")));
        }
        if !tx_power_dbm.is_finite() {
            return Err(Error::invalid("tx_power_dbm", "must be finite"));
        }
        Ok(LinkConstants {
            frequency_hz,
            wavelength_m: wavelength(frequency_hz),
            tx_power_dbm,
        })
    }

    pub fn validate(&self, errors: &mut ValidationErrors) {
        errors.check(
            self.frequency_hz > 0.0 && self.frequency_hz.is_finite(),
            "link.frequency_hz",
            "> 0",
        );
        errors.check(
            ((self.wavelength_m - wavelength(self.frequency_hz)) / self.wavelength_m).abs() < 1e-9,
            "link.wavelength_m",
            "is consistent with frequency",
        );
        errors.check(self.tx_power_dbm.is_finite(), "link.tx_power_dbm", "is finite");
    }

    fn tx_power_mw(&self) -> f64 {
        dbm_to_mw(self.tx_power_dbm)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PathKind {
    FirstOrder,
    SecondOrder,
    Olos,
    Ambient,
}

impl PathKind {
    pub fn name(&self) -> &'static str {
        match self {
            PathKind::FirstOrder => "first_order",
            PathKind::SecondOrder => "second_order",
            PathKind::Olos => "olos",
            PathKind::Ambient => "ambient",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathContribution {
    pub kind: PathKind,
    pub power_dbm: f64,
    /// Power the same path would carry with no losses at all.
    pub reference_dbm: f64,
    /// Hop lengths along the unfolded path, m.
    pub segment_distances: Vec<f64>,
    /// Named factors in dB; sums to `power_dbm - reference_dbm`.
    pub loss_breakdown: BTreeMap<String, f64>,
}

impl PathContribution {
    pub fn power_mw(&self) -> f64 {
        dbm_to_mw(self.power_dbm)
    }

    pub fn total_distance(&self) -> f64 {
        self.segment_distances.iter().sum()
    }

    /// Sum of the breakdown entries, dB.
    pub fn total_loss_db(&self) -> f64 {
        self.loss_breakdown.values().sum()
    }
}

/// Product of linear factors, each recorded in dB under its name.
struct Chain {
    product: f64,
    breakdown: BTreeMap<String, f64>,
}

impl Chain {
    fn new() -> Self {
        Chain {
            product: 1.0,
            breakdown: BTreeMap::new(),
        }
    }

    fn factor(&mut self, name: &str, linear: f64) -> &mut Self {
        self.product *= linear;
        self.breakdown.insert(name.to_string(), linear_to_db(linear));
        self
    }

    fn orientation(&mut self, suffix: &str, alpha: f64, dev: AngleDeviation) -> &mut Self {
        self.factor(&format!("azimuth_orientation{suffix}"), alpha.powf(dev.delta_theta_deg));
        self.factor(&format!("elevation_orientation{suffix}"), alpha.powf(dev.delta_phi_deg))
    }

    fn finish(
        self,
        kind: PathKind,
        base_mw: f64,
        reference_dbm: f64,
        segment_distances: Vec<f64>,
    ) -> PathContribution {
        PathContribution {
            kind,
            power_dbm: mw_to_dbm(base_mw * self.product),
            reference_dbm,
            segment_distances,
            loss_breakdown: self.breakdown,
        }
    }
}

fn check_distance(name: &'static str, r: f64) -> Result<f64> {
    if r > 0.0 && r.is_finite() {
        Ok(r)
    } else {
        Err(Error::invalid(name, format!("must be > 0, got {r}")))
    }
}

fn friis_mw(consts: &LinkConstants, g_tx: f64, g_rx: f64, r: f64) -> f64 {
    let path = consts.wavelength_m / (4.0 * PI * r);
    consts.tx_power_mw() * g_tx * g_rx * path * path
}

/// Free-space received power in dBm:
/// `P_tx + 10log10(G_tx·G_rx) − 20log10(4πr/λ)`.
pub fn friis(consts: &LinkConstants, g_tx: f64, g_rx: f64, r: f64) -> Result<f64> {
    let r = check_distance("r", r)?;
    Ok(mw_to_dbm(friis_mw(consts, g_tx, g_rx, r)))
}

/// Incident power density at the reflector, `P_tx·G_tx/(4π·r1²)`, in W/m².
pub fn density_at_reflector(consts: &LinkConstants, g_tx: f64, r1: f64) -> Result<f64> {
    let r1 = check_distance("r1", r1)?;
    Ok(consts.tx_power_mw() * 1e-3 * g_tx / (4.0 * PI * r1 * r1))
}

fn dir(from: Vec3, to: Vec3, what: &'static str) -> Result<Vec3> {
    from.direction_to(to).map_err(|_| Error::CoincidentPoints(what))
}

/// Normal of the wavefront leaving `refl` for a wave arriving from `source`.
fn reflected_wavefront_normal(refl: &Reflector, source: Vec3) -> Result<Vec3> {
    match refl.reflected_normal {
        Some(n) => Ok(n),
        None => {
            let incident = dir(source, refl.position(), "source at reflector position")?;
            Ok(specular_reflect(incident, refl.pose.normal))
        }
    }
}

/// Antenna gains towards the first and last bounce, linear.
fn end_gains(tx: &Antenna, rx: &Antenna, first: Vec3, last: Vec3) -> Result<(f64, f64)> {
    let g_tx = tx.gain(dir(tx.position, first, "transmitter at reflector position")?);
    let g_rx = rx.gain(dir(rx.position, last, "receiver at reflector position")?);
    Ok((g_tx, g_rx))
}

fn gain_factors(chain: &mut Chain, tx: &Antenna, rx: &Antenna, g_tx: f64, g_rx: f64) {
    chain.factor("tx_gain", g_tx / tx.peak_gain());
    chain.factor("rx_gain", g_rx / rx.peak_gain());
}

/// First-order power via a flat reflector.
///
/// `r1` and `r2` set the spreading loss; the antenna and reflector positions
/// set the pointing gains and the orientation deviation.
pub fn first_order_flat(
    consts: &LinkConstants,
    tx: &Antenna,
    rx: &Antenna,
    refl: &Reflector,
    ctx: &EffectiveAreaContext,
    r1: f64,
    r2: f64,
) -> Result<PathContribution> {
    if refl.shape.is_curved() {
        return Err(Error::ShapeMismatch {
            expected: "flat",
            found: refl.shape.name(),
        });
    }
    let r1 = check_distance("r1", r1)?;
    let r2 = check_distance("r2", r2)?;
    let sigma = sigma_prime(r1, r2)?;
    let (g_tx, g_rx) = end_gains(tx, rx, refl.position(), refl.position())?;
    let dev = angle_deviation(tx.position, &refl.pose, rx.position)?;
    let n_rp = reflected_wavefront_normal(refl, tx.position)?;
    let rho_refl = refl.reflected_polarization.unwrap_or(tx.polarization);

    let mut chain = Chain::new();
    gain_factors(&mut chain, tx, rx, g_tx, g_rx);
    chain
        .orientation("", refl.alpha, dev)
        .factor("wavefront_mismatch", refl.mismatch.factor(n_rp, rx.boresight))
        .factor("area_capture", area_capture_ratio(effective_area(refl, ctx), ctx.a_pw))
        .factor("reflection_efficiency", refl.gamma)
        .factor("polarization", polarization_mismatch(tx.polarization, rho_refl));

    let (pt, pr) = (tx.peak_gain(), rx.peak_gain());
    let lambda = consts.wavelength_m;
    let base = consts.tx_power_mw() * pt * pr * lambda * lambda * sigma
        / (4.0 * PI * (4.0 * PI * r1 * r2).powi(2));
    let reference = mw_to_dbm(friis_mw(consts, pt, pr, r1 + r2));
    Ok(chain.finish(PathKind::FirstOrder, base, reference, vec![r1, r2]))
}

/// First-order power via a cylinder or sphere. Curved surfaces carry no
/// wavefront-mismatch or polarization term.
pub fn first_order_curved(
    consts: &LinkConstants,
    tx: &Antenna,
    rx: &Antenna,
    refl: &Reflector,
    ctx: &EffectiveAreaContext,
    r1: f64,
    r2: f64,
) -> Result<PathContribution> {
    if !refl.shape.is_curved() {
        return Err(Error::ShapeMismatch {
            expected: "curved",
            found: refl.shape.name(),
        });
    }
    let r1 = check_distance("r1", r1)?;
    let r2 = check_distance("r2", r2)?;
    let sigma = sigma_prime(r1, r2)?;
    let (g_tx, g_rx) = end_gains(tx, rx, refl.position(), refl.position())?;
    let dev = angle_deviation(tx.position, &refl.pose, rx.position)?;

    let mut chain = Chain::new();
    gain_factors(&mut chain, tx, rx, g_tx, g_rx);
    chain
        .orientation("", refl.alpha, dev)
        .factor("area_capture", area_capture_ratio(effective_area(refl, ctx), ctx.a_pw))
        .factor("reflection_efficiency", refl.gamma);

    let (pt, pr) = (tx.peak_gain(), rx.peak_gain());
    let lambda = consts.wavelength_m;
    let base = consts.tx_power_mw() * pt * pr * lambda * lambda * sigma
        / (4.0 * PI * (4.0 * PI * r1 * r2).powi(2));
    let reference = mw_to_dbm(friis_mw(consts, pt, pr, r1 + r2));
    Ok(chain.finish(PathKind::FirstOrder, base, reference, vec![r1, r2]))
}

/// Dispatches on the reflector shape.
pub fn first_order(
    consts: &LinkConstants,
    tx: &Antenna,
    rx: &Antenna,
    refl: &Reflector,
    ctx: &EffectiveAreaContext,
    r1: f64,
    r2: f64,
) -> Result<PathContribution> {
    if refl.shape.is_curved() {
        first_order_curved(consts, tx, rx, refl, ctx, r1, r2)
    } else {
        first_order_flat(consts, tx, rx, refl, ctx, r1, r2)
    }
}

/// Power over the cascade TX → `refl1` → `refl2` → RX, both reflectors flat.
///
/// `ctx1` holds the plane-wave area at `r1`, `ctx2` the area at `r1 + r2`.
/// Breakdown keys of per-bounce factors carry a `_1` or `_2` suffix.
#[allow(clippy::too_many_arguments)]
pub fn second_order(
    consts: &LinkConstants,
    tx: &Antenna,
    rx: &Antenna,
    refl1: &Reflector,
    refl2: &Reflector,
    ctx1: &EffectiveAreaContext,
    ctx2: &EffectiveAreaContext,
    r1: f64,
    r2: f64,
    r3: f64,
) -> Result<PathContribution> {
    for refl in [refl1, refl2] {
        if refl.shape.is_curved() {
            return Err(Error::ShapeMismatch {
                expected: "flat",
                found: refl.shape.name(),
            });
        }
    }
    let r1 = check_distance("r1", r1)?;
    let r2 = check_distance("r2", r2)?;
    let r3 = check_distance("r3", r3)?;
    let sigma = sigma_double_prime(r1, r2, r3)?;
    let (p1, p2) = (refl1.position(), refl2.position());
    let (g_tx, g_rx) = end_gains(tx, rx, p1, p2)?;

    let dev1 = angle_deviation(tx.position, &refl1.pose, p2)?;
    let dev2 = angle_deviation(p1, &refl2.pose, rx.position)?;
    let n_rp1 = reflected_wavefront_normal(refl1, tx.position)?;
    let n_rp2 = reflected_wavefront_normal(refl2, p1)?;
    let towards_second = dir(p1, p2, "coincident reflectors")?;
    let rho1 = refl1.reflected_polarization.unwrap_or(tx.polarization);
    let rho2 = refl2.reflected_polarization.unwrap_or(rho1);

    let mut chain = Chain::new();
    gain_factors(&mut chain, tx, rx, g_tx, g_rx);
    chain
        .orientation("_1", refl1.alpha, dev1)
        .orientation("_2", refl2.alpha, dev2)
        .factor("wavefront_mismatch_1", refl1.mismatch.factor(n_rp1, towards_second))
        .factor("wavefront_mismatch_2", refl2.mismatch.factor(n_rp2, rx.boresight))
        .factor(
            "area_capture_1",
            area_capture_ratio(effective_area(refl1, ctx1), ctx1.a_pw),
        )
        .factor(
            "area_capture_2",
            area_capture_ratio(effective_area(refl2, ctx2), ctx2.a_pw),
        )
        .factor("reflection_efficiency_1", refl1.gamma)
        .factor("reflection_efficiency_2", refl2.gamma)
        .factor("polarization_1", polarization_mismatch(tx.polarization, rho1))
        .factor("polarization_2", polarization_mismatch(rho1, rho2));

    let (pt, pr) = (tx.peak_gain(), rx.peak_gain());
    let lambda = consts.wavelength_m;
    let base = consts.tx_power_mw() * pt * pr * lambda * lambda * sigma
        / ((4.0 * PI).powi(4) * (r1 * r2 * r3).powi(2));
    let reference = mw_to_dbm(friis_mw(consts, pt, pr, r1 + r2 + r3));
    Ok(chain.finish(PathKind::SecondOrder, base, reference, vec![r1, r2, r3]))
}

/// Obstructed direct path: Friis at `r` scaled by the obstruction
/// coefficient `eta` in (0, 1]. The reference is Friis with the given gains.
pub fn olos_power(
    consts: &LinkConstants,
    g_tx: f64,
    g_rx: f64,
    r: f64,
    eta: f64,
) -> Result<PathContribution> {
    let r = check_distance("r", r)?;
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::invalid("eta", format!("must lie in (0, 1], got {eta}")));
    }
    let mut chain = Chain::new();
    chain.factor("obstruction", eta);
    let base = friis_mw(consts, g_tx, g_rx, r);
    Ok(chain.finish(PathKind::Olos, base, mw_to_dbm(base), vec![r]))
}

/// Uniform floor from weak higher-order environmental reflections.
pub fn ambient(power_dbm: f64) -> PathContribution {
    PathContribution {
        kind: PathKind::Ambient,
        power_dbm,
        reference_dbm: power_dbm,
        segment_distances: Vec::new(),
        loss_breakdown: BTreeMap::new(),
    }
}

/// Non-coherent sum in dBm; an empty list gives negative infinity.
pub fn total_power(contributions: &[PathContribution]) -> f64 {
    mw_to_dbm(contributions.iter().map(PathContribution::power_mw).sum())
}

/// Converts a dB obstruction loss (≤ 0) to the linear coefficient.
pub fn eta_from_db(eta_db: f64) -> f64 {
    db_to_linear(eta_db)
}
