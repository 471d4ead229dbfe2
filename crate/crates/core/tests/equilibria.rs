//! Equilibrium constructors, the non-existence results and the four-server
//! deviation tables, checked through the generic deviation search.

use hotelling_core::line_failure::{
    five_server_hinterland, five_server_hinterland_closed, five_server_printed_root,
    five_server_residual, four_server_hinterland, DeviationRegion,
};
use hotelling_core::{
    br_dynamics, classic_equilibrium, el_check, grid_scan, is_nash, lf_appendix_tables,
    lf_condition_check, lf_cut_scenario, lf_equilibrium, lf_family_interval, lf_payoffs,
    pf_nonexistence_probe, Configuration, DynamicsOptions, Error, GameVariant, Outcome, Segment,
};
use hotelling_core::dynamics::random_configuration;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const DELTA: f64 = 1e-9;

#[test]
fn classic_constructors_are_equilibria() {
    for seg in [Segment::unit(), Segment::new(-3.0, 4.5).unwrap()] {
        for n in [1, 2, 4, 5] {
            let c = classic_equilibrium(n, seg, None).unwrap();
            if n > 1 {
                assert!(el_check(&c).unwrap().equilibrium, "n = {n}");
            }
            assert!(is_nash(&c, GameVariant::Classic, DELTA).unwrap().verdict, "n = {n}");
        }
        for x in [0.125, 0.14, 1.0 / 6.0 - 1e-6] {
            let c = classic_equilibrium(6, seg, Some(x)).unwrap();
            assert!(el_check(&c).unwrap().equilibrium);
            assert!(is_nash(&c, GameVariant::Classic, DELTA).unwrap().verdict, "x = {x}");
        }
    }
    assert!(matches!(
        classic_equilibrium(3, Segment::unit(), None::<f64>),
        Err(Error::NoEquilibrium { n: 3 })
    ));
}

#[test]
fn classic_three_servers_have_no_grid_equilibrium() {
    let scan = grid_scan(3, GameVariant::Classic, Segment::unit(), 60, DELTA, 1).unwrap();
    assert!(scan.configurations_scanned > 10_000);
    assert!(scan.equilibria.is_empty(), "{:?}", scan.equilibria);
}

#[test]
fn line_failure_constructors_are_equilibria() {
    for r in [0.05, 0.25, 0.5, 0.75, 0.99] {
        let variant = GameVariant::LineFailure { r };
        for n in [2, 4, 5] {
            let c = lf_equilibrium(n, r, None).unwrap();
            assert!(lf_condition_check(&c, r).unwrap().equilibrium, "n = {n} r = {r}");
            assert!(is_nash(&c, variant, DELTA).unwrap().verdict, "n = {n} r = {r}");
        }
        for n in 6..=9 {
            let (lo, hi) = lf_family_interval(n, r).unwrap();
            for t in [0.0, 0.5, 0.999] {
                let c = lf_equilibrium(n, r, Some(lo + t * (hi - lo))).unwrap();
                assert!(is_nash(&c, variant, DELTA).unwrap().verdict, "n = {n} r = {r} t = {t}");
            }
            assert!(lf_equilibrium(n, r, Some(lo * 0.9)).is_err());
        }
    }
}

#[test]
fn line_failure_three_servers_have_no_grid_equilibrium() {
    for r in [0.25, 0.5, 0.75] {
        let variant = GameVariant::LineFailure { r };
        let scan = grid_scan(3, variant, Segment::unit(), 60, DELTA, 1).unwrap();
        assert!(scan.equilibria.is_empty(), "r = {r}: {:?}", scan.equilibria);
    }
}

#[test]
fn four_server_equilibrium_pays_everyone_the_same() {
    let x = four_server_hinterland(0.5f64);
    assert!((x - 0.2583426).abs() < 1e-7);
    for k in 1..100 {
        let r = k as f64 / 100.0;
        let x = four_server_hinterland(r);
        // The root of r x² − 4x + 1 = 0.
        assert!((r * x * x - 4.0 * x + 1.0).abs() < 1e-14);
        let c = lf_equilibrium(4, r, None).unwrap();
        for p in lf_payoffs(&c, r).unwrap() {
            assert!((p - (0.5 - x)).abs() <= 1e-12, "r = {r}");
        }
    }
}

#[test]
fn five_server_hinterland_solves_its_condition() {
    for k in 1..100 {
        let r = k as f64 / 100.0;
        let x = five_server_hinterland(r);
        assert!(five_server_residual(x, r).abs() <= 1e-12);
        assert!((x - five_server_hinterland_closed(r)).abs() <= 1e-12);
    }
    assert!((five_server_hinterland(1e-6f64) - 1.0 / 6.0).abs() < 1e-5);
    let printed = five_server_printed_root(0.5f64);
    assert!(five_server_residual(printed, 0.5).abs() > 0.1);
}

#[test]
fn line_failure_equilibria_tend_to_classic_ones() {
    let r = 1e-6f64;
    for n in [2, 4, 5] {
        let lf = lf_equilibrium(n, r, None).unwrap();
        let classic = classic_equilibrium(n, Segment::unit(), None).unwrap();
        for (a, b) in lf.positions().iter().zip(classic.positions()) {
            assert!((a - b).abs() < 1e-5, "n = {n}");
        }
    }
    let x = 0.14f64;
    let lf = lf_equilibrium(6, r, Some(x)).unwrap();
    let classic = classic_equilibrium(6, Segment::unit(), Some(x)).unwrap();
    for (a, b) in lf.positions().iter().zip(classic.positions()) {
        assert!((a - b).abs() < 1e-5);
    }
}

/// Composite midpoint average of one server's cut-scenario payoff over `(lo, hi)`.
fn cut_average(config: &Configuration<f64>, player: usize, lo: f64, hi: f64) -> f64 {
    let m = 4000;
    let mut total = 0.0;
    for k in 0..m {
        let f = lo + (hi - lo) * (k as f64 + 0.5) / m as f64;
        total += lf_cut_scenario(config, f).unwrap()[player];
    }
    total / m as f64
}

#[test]
fn deviation_tables_match_direct_evaluation() {
    for r in [0.25, 0.5, 0.75] {
        let x = four_server_hinterland(r);
        for y in [0.0, 0.3 * x, 0.9 * x, x + 0.01, 0.4, 0.49] {
            let table = lf_appendix_tables(r, y).unwrap();
            let i = table.player();
            let (eq, dev) = (table.equilibrium(), table.deviated());
            let mass: f64 = table.rows.iter().map(|row| row.prob_mass).sum();
            assert!((mass - 1.0).abs() < 1e-12);
            assert!((table.expected_incumbent - lf_payoffs(&eq, r).unwrap()[i]).abs() < 1e-12);
            assert!((table.expected_deviator - lf_payoffs(&dev, r).unwrap()[i]).abs() < 1e-12);
            for row in &table.rows {
                let Some((lo, hi)) = row.f_interval else {
                    continue;
                };
                if hi - lo < 1e-9 {
                    continue;
                }
                assert!((row.payoff_incumbent - cut_average(&eq, i, lo, hi)).abs() < 1e-6);
                assert!((row.payoff_deviator - cut_average(&dev, i, lo, hi)).abs() < 1e-6);
            }
        }
    }
}

#[test]
fn deviation_tables_favour_the_incumbent() {
    for r in [0.25, 0.5, 0.75] {
        let x = four_server_hinterland(r);
        for k in 0..50 {
            let t = (k as f64 + 0.5) / 50.0;
            let hinter = lf_appendix_tables(r, t * x).unwrap();
            assert_eq!(hinter.region, DeviationRegion::Hinterland);
            assert!(hinter.difference() >= -1e-12);
            let y = x + t * (0.5 - x);
            let interior = lf_appendix_tables(r, y).unwrap();
            assert_eq!(interior.region, DeviationRegion::Interior);
            assert!(interior.difference() >= -1e-12);
            assert_eq!(interior.expected_deviator, 0.5 - x);
        }
        // The difference in closed form at y = x/2.
        let y = x / 2.0;
        let table = lf_appendix_tables(r, y).unwrap();
        let d = (1.0 - r) * (x - y) / 2.0 + r * (x - y) / 2.0 * (1.0 - y - x);
        assert!((table.difference() - d).abs() < 1e-12);
    }
}

#[test]
fn player_failure_dynamics_never_settle() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let options = DynamicsOptions {
        max_iters: 400,
        ..DynamicsOptions::default()
    };
    for k in 0..24 {
        let n = 3 + k % 3;
        let r = [0.25, 0.5, 0.75][k % 3];
        let start = random_configuration(n, Segment::unit(), &mut rng).unwrap();
        let trace = br_dynamics(&start, GameVariant::PlayerFailure { r }, &options).unwrap();
        assert_ne!(trace.outcome, Outcome::Equilibrium, "{:?}", start.positions());
    }
}

#[test]
fn player_failure_probe_small_grids() {
    for n in [3, 4] {
        let report = pf_nonexistence_probe(n, 0.5, 24).unwrap();
        assert_eq!(report.equilibria_found, 0, "n = {n}");
        assert!(report.min_max_gain.unwrap() > DELTA);
        assert!(!report.witnesses.is_empty());
    }
    let control = pf_nonexistence_probe(2, 0.3, 40).unwrap();
    assert_eq!(control.equilibria, vec![vec![0.5, 0.5]]);
}
