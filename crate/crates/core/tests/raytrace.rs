use std::path::PathBuf;

use passive_reflector::gridsim::{cdf, grid_receiver, reflected_only, contributions_at};
use passive_reflector::raytrace::{path_power, rt_grid, trace, Environment};
use passive_reflector::scenario_io::{load_scenario_file, Scenario};

fn load(name: &str) -> Scenario {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "scenarios", &format!("{name}.scn")]
        .iter()
        .collect();
    load_scenario_file(&p).unwrap()
}

#[test]
fn corner_reflection_length_is_segment_sum() {
    let s = load("indoor_flat_061");
    let env = Environment::default().with_reflectors(&s.reflectors).unwrap();
    let refl = s.reflectors[0].position();
    let rx = refl + passive_reflector::geometry::Vec3::new(0.0, 6.0, 0.0);
    let paths = trace(&env, s.tx.position, rx, 1).unwrap();
    let first = paths.iter().find(|p| p.order() == 1).expect("corner path");
    let expected = s.tx.position.distance(refl) + refl.distance(rx);
    assert!((first.length - expected).abs() < 1e-12);
}

#[test]
fn specular_cell_matches_analytic_first_order() {
    let s = load("indoor_flat_061");
    let env = Environment::default().with_reflectors(&s.reflectors).unwrap();
    // rightmost column sits on the specular line
    let pos = passive_reflector::geometry::Vec3::new(0.0, 4.0, 1.3);
    let rx = grid_receiver(&s, pos).unwrap();
    let analytic = reflected_only(&contributions_at(&s, &rx).unwrap());
    let path = trace(&env, s.tx.position, pos, 1)
        .unwrap()
        .into_iter()
        .find(|p| p.order() == 1)
        .unwrap();
    let traced = path_power(&s.constants, &s.tx, &rx, &path, &env);
    assert!((traced - analytic[0].power_dbm).abs() < 1e-9, "{traced} vs {}", analytic[0].power_dbm);
}

#[test]
fn wall_reflections_lose_more_at_higher_frequency() {
    let base = load("indoor_no_reflector");
    let env = base.environment.clone().unwrap();
    let excess = |f: f64| {
        let s = base.at_frequency(f).unwrap();
        let grid = rt_grid(&env, &s).unwrap();
        // remove the λ² scaling common to every path
        grid.max() - 20.0 * (s.constants.wavelength_m).log10()
    };
    let rel: Vec<f64> = [2.4e9, 28e9, 60e9].iter().map(|&f| excess(f)).collect();
    assert!(rel[0] > rel[1] && rel[1] > rel[2], "{rel:?}");
}

#[test]
fn reflector_corridor_beats_bare_corridor() {
    let with = load("indoor_flat_061");
    let without = load("indoor_no_reflector");
    let env = without.environment.clone().unwrap();
    let m = |s: &Scenario| cdf(&rt_grid(&env, s).unwrap().samples()).unwrap().median();
    assert!(m(&with) > m(&without));
}
