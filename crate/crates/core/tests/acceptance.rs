//! Exit criteria. Prints one PASS/FAIL line per criterion and exits nonzero
//! if any fails.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use passive_reflector::antenna::Antenna;
use passive_reflector::geometry::{specular_reflect, Pose, Vec3};
use passive_reflector::gridsim::{
    cdf, contributions_at, gain_report, reflector_size_curve, simulate, simulate_grid, PowerMap,
    SampleRange, DEFAULT_OUTAGE_DBM,
};
use passive_reflector::linkbudget::{
    first_order_curved, first_order_flat, friis, second_order, LinkConstants, PathKind,
};
use passive_reflector::raytrace::{path_power, trace, Environment};
use passive_reflector::reflector::{EffectiveAreaContext, Reflector};
use passive_reflector::scenario_io::{load_scenario_file, Scenario};
use passive_reflector::units::db_to_linear;
use rand::{Rng, SeedableRng};
use rand::rngs::StdRng as ChaCha8Rng;

const HORN_DBI: f64 = 17.0;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn scenario(name: &str) -> Scenario {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "scenarios", name]
        .iter()
        .collect();
    load_scenario_file(&path).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn horn_friis(consts: &LinkConstants, r: f64) -> f64 {
    let g = db_to_linear(HORN_DBI);
    friis(consts, g, g, r).unwrap()
}

/// Horns aimed at a large sheet with the receiver on the specular ray.
fn ideal_corner(rng: &mut ChaCha8Rng, r1: f64, r2: f64) -> (Antenna, Antenna, Reflector) {
    let p = Vec3::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(0.5..3.0));
    let normal = Vec3::from_az_el_deg(rng.gen_range(-180.0..180.0), rng.gen_range(-20.0..20.0));
    // incidence within 70 degrees of the normal
    let incidence = loop {
        let d = Vec3::from_az_el_deg(rng.gen_range(-180.0..180.0), rng.gen_range(-60.0..60.0));
        if d.dot(normal) > 0.35 {
            break d;
        }
    };
    let tx_pos = p + incidence * r1;
    let out = specular_reflect(-incidence, normal);
    let rx_pos = p + out * r2;
    let tx = Antenna::horn(tx_pos, -incidence).unwrap();
    let rx = Antenna::horn(rx_pos, -out).unwrap();
    let refl = Reflector::flat(2.0, 2.0, Pose::new(p, normal).unwrap());
    (tx, rx, refl)
}

fn friis_limit_identity() -> Outcome {
    let consts = LinkConstants::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let ctx = EffectiveAreaContext::for_plane_wave(0.0625);
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let r1 = rng.gen_range(0.1..100.0);
        let r2 = rng.gen_range(0.1..100.0);
        let (tx, rx, refl) = ideal_corner(&mut rng, r1, r2);
        let p = first_order_flat(&consts, &tx, &rx, &refl, &ctx, r1, r2).unwrap();
        worst = worst.max((p.power_dbm - horn_friis(&consts, r1 + r2)).abs());
    }
    let elapsed = start.elapsed();
    outcome(
        worst <= 1e-9 && elapsed < Duration::from_secs(1),
        format!("max |error| = {worst:.2e} dB over 1000 pairs in {elapsed:.2?}"),
    )
}

fn cascade_equals_free_space() -> Outcome {
    let s = scenario("basement_cascade.scn");
    let consts = s.constants;
    let (a, b) = (&s.reflectors[0], &s.reflectors[1]);
    let rx_pos = Vec3::new(51.0, 4.5, 1.5);
    let rx = s.rx_template.at(rx_pos).aimed_at(b.position()).unwrap();
    let (r1, r2, r3) = (
        s.tx.position.distance(a.position()),
        a.position().distance(b.position()),
        b.position().distance(rx_pos),
    );
    let ctx1 = EffectiveAreaContext::for_plane_wave(s.plane_wave.area(r1).unwrap());
    let ctx2 = EffectiveAreaContext::for_plane_wave(s.plane_wave.area(r1 + r2).unwrap());
    let direct = second_order(&consts, &s.tx, &rx, a, b, &ctx1, &ctx2, r1, r2, r3).unwrap();
    let via_scenario = contributions_at(&s, &rx)
        .unwrap()
        .into_iter()
        .find(|c| c.kind == PathKind::SecondOrder)
        .map(|c| c.power_dbm)
        .unwrap_or(f64::NEG_INFINITY);
    let target = -62.27;
    let err = (direct.power_dbm - target).abs().max((via_scenario - target).abs());
    outcome(
        err <= 0.01,
        format!(
            "cascade {:.4} dBm (scenario {:.4} dBm), Friis at 55.5 m {:.4} dBm",
            direct.power_dbm,
            via_scenario,
            horn_friis(&consts, 55.5)
        ),
    )
}

fn small_reflector_deficit() -> Outcome {
    let small = simulate_grid(&scenario("indoor_flat_030.scn")).unwrap().max();
    let large = simulate_grid(&scenario("indoor_flat_061.scn")).unwrap().max();
    let deficit = large - small;
    outcome(
        (deficit - 3.0).abs() <= 0.01,
        format!("peaks {large:.3} / {small:.3} dBm, deficit {deficit:.4} dB"),
    )
}

fn indoor_median_gain() -> Outcome {
    let start = Instant::now();
    let with = simulate_grid(&scenario("indoor_flat_061.scn")).unwrap();
    let elapsed = start.elapsed();
    let without = simulate_grid(&scenario("indoor_no_reflector.scn")).unwrap();
    let report = gain_report(
        &cdf(&with.samples()).unwrap(),
        &cdf(&without.samples()).unwrap(),
        DEFAULT_OUTAGE_DBM,
    );
    outcome(
        (report.median_gain_db - 20.0).abs() <= 3.0 && elapsed < Duration::from_secs(1),
        format!(
            "median gain {:.2} dB (target 20 +/- 3), range [{:.1}, {:.1}] dBm, 5x50 grid in {elapsed:.2?}",
            report.median_gain_db, report.range_with_dbm.0, report.range_with_dbm.1
        ),
    )
}

fn orientation_decay() -> Outcome {
    let consts = LinkConstants::default();
    let pose = Pose::horizontal(Vec3::ZERO, 135.0);
    let tx = Antenna::horn(Vec3::new(-3.0, 0.0, 0.0), Vec3::X).unwrap();
    // two receivers at the same range, 10 and 20 degrees off the specular line
    let rx_at = |az: f64| {
        let pos = Vec3::from_az_el_deg(az, 0.0) * 6.0;
        Antenna::horn(pos, -pos).unwrap()
    };
    let ctx = EffectiveAreaContext {
        a_pw: 0.0625,
        delta_psi_rad: 1.0,
        delta_omega_rad: 1.0,
        r_min: 1.0,
    };
    let flat = Reflector::flat(0.61, 0.61, pose);
    let cyl = Reflector::cylinder(0.11, 0.46, pose);
    let drop = |f: &dyn Fn(&Antenna) -> f64| f(&rx_at(100.0)) - f(&rx_at(110.0));
    let flat_drop = drop(&|rx| {
        first_order_flat(&consts, &tx, rx, &flat, &ctx, 3.0, 6.0).unwrap().power_dbm
    });
    let curved_drop = drop(&|rx| {
        first_order_curved(&consts, &tx, rx, &cyl, &ctx, 3.0, 6.0).unwrap().power_dbm
    });
    outcome(
        (flat_drop - 14.3).abs() <= 0.1 && (curved_drop - 7.05).abs() <= 0.1,
        format!("10 degree step: flat {flat_drop:.3} dB, curved {curved_drop:.3} dB"),
    )
}

fn sweep_of(name: &str) -> (Scenario, passive_reflector::gridsim::AngularSweep) {
    let s = scenario(name);
    match simulate(&s).unwrap() {
        PowerMap::Sweep(sw) => (s, sw),
        PowerMap::Grid(_) => panic!("{name} is not a sweep scenario"),
    }
}

fn outdoor_sweep() -> Outcome {
    let (_, baseline) = sweep_of("outdoor_no_reflector.scn");
    let (s, large) = sweep_of("outdoor_flat_061.scn");
    let (olos_az, olos_el, olos_peak) = baseline.peak();
    let (az, el, peak) = large.peak();
    let refl = s.reflectors[0].position();
    let rx_pos = Vec3::new(0.0, 0.0, 1.5);
    let friis_path = horn_friis(&s.constants, s.tx.position.distance(refl) + refl.distance(rx_pos));
    let gain = peak - olos_peak;
    let pass = (olos_peak - -65.6).abs() <= 0.1
        && (olos_az, olos_el) == (81.0, 0.0)
        && (az, el) == (0.0, 0.0)
        && (peak - friis_path).abs() <= 0.1
        && (gain - 11.0).abs() <= 2.0;
    outcome(
        pass,
        format!(
            "OLOS peak {olos_peak:.3} dBm at ({olos_az}, {olos_el}); reflector peak {peak:.3} dBm at ({az}, {el}) vs Friis {friis_path:.3}; max gain {gain:.2} dB"
        ),
    )
}

fn size_saturation() -> Outcome {
    let s = scenario("lab_reflector_size.scn");
    let sides = SampleRange::new(0.1, 0.9, 0.05).samples();
    let curve = reflector_size_curve(&s, &sides).unwrap();
    let refl = s.reflectors[0].position();
    let (r1, r2) = (
        s.tx.position.distance(refl),
        refl.distance(Vec3::new(0.5, 0.0, 1.3)),
    );
    let a_pw = s.plane_wave.area(r1).unwrap();
    let free_space = horn_friis(&s.constants, r1 + r2);
    let monotone = curve.windows(2).all(|w| w[1].1 >= w[0].1);
    let saturated: Vec<f64> = curve
        .iter()
        .filter(|(side, _)| side * side >= a_pw)
        .map(|&(_, p)| p)
        .collect();
    let constant = saturated.windows(2).all(|w| w[0] == w[1]);
    let at_friis = saturated.iter().all(|p| (p - free_space).abs() <= 1e-6);
    let knee = curve
        .iter()
        .find(|(side, _)| side * side >= a_pw)
        .map_or(f64::NAN, |c| c.0);
    outcome(
        monotone && constant && at_friis && !saturated.is_empty(),
        format!(
            "{} sizes, flat from {knee:.2} m at {:.6} dBm (Friis {free_space:.6})",
            curve.len(),
            saturated.first().copied().unwrap_or(f64::NAN)
        ),
    )
}

fn raytrace_oracle() -> Outcome {
    let consts = LinkConstants::default();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let ctx = EffectiveAreaContext::for_plane_wave(0.0625);
    let mut worst: f64 = 0.0;
    let mut missing = 0;
    for _ in 0..100 {
        let r1 = rng.gen_range(1.0..30.0);
        let r2 = rng.gen_range(1.0..30.0);
        let (tx, rx, refl) = ideal_corner(&mut rng, r1, r2);
        let env = Environment::default().with_reflectors(std::slice::from_ref(&refl)).unwrap();
        let analytic = first_order_flat(&consts, &tx, &rx, &refl, &ctx, r1, r2).unwrap();
        match trace(&env, tx.position, rx.position, 1)
            .unwrap()
            .iter()
            .find(|p| p.order() == 1)
        {
            Some(path) => {
                let traced = path_power(&consts, &tx, &rx, path, &env);
                worst = worst.max((traced - analytic.power_dbm).abs());
            }
            None => missing += 1,
        }
    }
    outcome(
        worst <= 1e-9 && missing == 0,
        format!("max |error| = {worst:.2e} dB over 100 geometries, {missing} untraced"),
    )
}

fn frequency_flat_gain() -> Outcome {
    let with = scenario("outdoor_flat_061.scn");
    let without = scenario("outdoor_no_reflector.scn");
    let gains: Vec<f64> = [1.8e9, 2.4e9, 28e9, 38e9, 60e9]
        .iter()
        .map(|&f| {
            let a = simulate(&with.at_frequency(f).unwrap()).unwrap().max();
            let b = simulate(&without.at_frequency(f).unwrap()).unwrap().max();
            a - b
        })
        .collect();
    let spread = gains.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - gains.iter().cloned().fold(f64::INFINITY, f64::min);
    outcome(
        spread < 1.0,
        format!(
            "gains {} dB, spread {spread:.4} dB",
            gains.iter().map(|g| format!("{g:.3}")).collect::<Vec<_>>().join(" / ")
        ),
    )
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("friis-limit identity", friis_limit_identity),
        ("second-order cascade", cascade_equals_free_space),
        ("small-reflector deficit", small_reflector_deficit),
        ("indoor median gain", indoor_median_gain),
        ("grid decay structure", orientation_decay),
        ("outdoor sweep", outdoor_sweep),
        ("size saturation", size_saturation),
        ("ray-trace oracle equivalence", raytrace_oracle),
        ("frequency-flat gain", frequency_flat_gain),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let result = run();
        let tag = if result.pass { "PASS" } else { "FAIL" };
        println!("{tag} [{}] {name}: {}", n + 1, result.detail);
        if !result.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
