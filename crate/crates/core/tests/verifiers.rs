//! The closed-form equilibrium characterisations against the deviation search,
//! and the deviation search against a brute-force grid.

use hotelling_core::{
    best_response, classic_equilibrium, el_check, grid_best_response_oracle, is_nash,
    lf_condition_check, lf_equilibrium, lf_equiv_segment, lf_family_interval, Configuration,
    GameVariant, Segment,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DELTA: f64 = 1e-9;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Positions drawn from a coarse grid so that pairs, equal spacings and
/// equilibria occur often. Drops triples by redrawing.
fn grid_config(rng: &mut ChaCha8Rng, n: usize, res: u32) -> Configuration<f64> {
    loop {
        let xs: Vec<f64> = (0..n)
            .map(|_| rng.random_range(0..=res) as f64 / res as f64)
            .collect();
        if let Ok(c) = Configuration::on_unit(xs) {
            return c;
        }
    }
}

fn uniform_config(rng: &mut ChaCha8Rng, n: usize) -> Configuration<f64> {
    Configuration::on_unit((0..n).map(|_| rng.random::<f64>()).collect()).unwrap()
}

/// A known equilibrium with one coordinate stack nudged.
fn nudged(rng: &mut ChaCha8Rng, base: &Configuration<f64>) -> Configuration<f64> {
    let xs = base.positions();
    let target = xs[rng.random_range(0..xs.len())];
    let shift = rng.random_range(-1e-3..1e-3);
    let moved: Vec<f64> = xs
        .iter()
        .map(|&x| if x == target { (x + shift).clamp(0.0, 1.0) } else { x })
        .collect();
    Configuration::on_unit(moved).unwrap()
}

fn classic_pool(seed: u64) -> Vec<Configuration<f64>> {
    let mut rng = rng(seed);
    let mut pool = Vec::new();
    for n in 2..=7 {
        for _ in 0..150 {
            pool.push(grid_config(&mut rng, n, 24));
        }
        for _ in 0..50 {
            pool.push(uniform_config(&mut rng, n));
        }
    }
    let mut known: Vec<Configuration<f64>> = [2, 4, 5]
        .iter()
        .map(|&n| classic_equilibrium(n, Segment::unit(), None).unwrap())
        .collect();
    for x in [0.125, 0.14, 1.0 / 6.0 - 1e-6] {
        known.push(classic_equilibrium(6, Segment::unit(), Some(x)).unwrap());
    }
    for _ in 0..30 {
        let x = rng.random_range(0.125..1.0 / 6.0);
        pool.push(classic_equilibrium(6, Segment::unit(), Some(x)).unwrap());
    }
    for base in &known {
        pool.push(base.clone());
        for _ in 0..40 {
            pool.push(nudged(&mut rng, base));
        }
    }
    pool
}

#[test]
fn classic_verdicts_match_eaton_lipsey() {
    let mut equilibria = 0;
    for config in classic_pool(1) {
        let el = el_check(&config).unwrap().equilibrium;
        let nash = is_nash(&config, GameVariant::Classic, DELTA).unwrap();
        assert_eq!(el, nash.verdict, "{:?}: {nash:?}", config.positions());
        equilibria += el as usize;
    }
    assert!(equilibria > 30, "pool has only {equilibria} equilibria");
}

fn lf_pool(seed: u64, r: f64) -> Vec<Configuration<f64>> {
    let mut rng = rng(seed);
    let mut pool = Vec::new();
    for n in 2..=7 {
        for _ in 0..80 {
            pool.push(grid_config(&mut rng, n, 24));
        }
        for _ in 0..30 {
            pool.push(uniform_config(&mut rng, n));
        }
    }
    let mut known: Vec<Configuration<f64>> = [2, 4, 5]
        .iter()
        .map(|&n| lf_equilibrium(n, r, None).unwrap())
        .collect();
    for n in 6..=7 {
        let (lo, hi) = lf_family_interval(n, r).unwrap();
        for t in [0.0, 0.3, 0.7] {
            known.push(lf_equilibrium(n, r, Some(lo + t * (hi - lo))).unwrap());
        }
    }
    for n in 6..=8 {
        let (lo, hi) = lf_family_interval(n, r).unwrap();
        for _ in 0..10 {
            pool.push(lf_equilibrium(n, r, Some(rng.random_range(lo..hi))).unwrap());
        }
    }
    for base in &known {
        pool.push(base.clone());
        for _ in 0..25 {
            pool.push(nudged(&mut rng, base));
        }
    }
    pool
}

#[test]
fn line_failure_verdicts_match_condition_check() {
    for (seed, r) in [(2, 0.25), (3, 0.5), (4, 0.8)] {
        let variant = GameVariant::LineFailure { r };
        let mut equilibria = 0;
        for config in lf_pool(seed, r) {
            let cond = lf_condition_check(&config, r).unwrap().equilibrium;
            let nash = is_nash(&config, variant, DELTA).unwrap();
            assert_eq!(cond, nash.verdict, "r = {r}, {:?}: {nash:?}", config.positions());
            equilibria += cond as usize;
        }
        assert!(equilibria >= 35, "r = {r}: only {equilibria} equilibria");
    }
}

#[test]
fn line_failure_equivalent_classic_game_has_the_same_equilibria() {
    let mut checked = 0;
    for (seed, r) in [(5, 0.3), (6, 0.6)] {
        for config in lf_pool(seed, r) {
            let seg = lf_equiv_segment(&config, r).unwrap();
            let shrunk = config.rehomed(seg).unwrap();
            let lf = is_nash(&config, GameVariant::LineFailure { r }, DELTA).unwrap();
            let classic = is_nash(&shrunk, GameVariant::Classic, DELTA).unwrap();
            assert_eq!(lf.verdict, classic.verdict, "r = {r}, {:?}", config.positions());
            checked += 1;
        }
    }
    assert!(checked >= 500);
}

#[test]
fn best_response_dominates_grid_oracle() {
    const RES: usize = 1000;
    let slack = 2.0 / RES as f64;
    let mut rng = rng(7);
    for trial in 0..1000 {
        let n = rng.random_range(1..=6);
        let config = if trial % 2 == 0 {
            grid_config(&mut rng, n, 20)
        } else {
            uniform_config(&mut rng, n)
        };
        let r = [0.2, 0.5, 0.9][trial % 3];
        let variant = match trial % 3 {
            0 => GameVariant::Classic,
            1 => GameVariant::LineFailure { r },
            _ => GameVariant::PlayerFailure { r },
        };
        let player = rng.random_range(0..n);
        let br = best_response(player, &config, variant).unwrap();
        let (y, grid) = grid_best_response_oracle(player, &config, variant, RES).unwrap();
        assert!(
            br.payoff >= grid - slack,
            "{variant:?} player {player} of {:?}: best {br:?}, grid {grid} at {y}",
            config.positions()
        );
        // Grid points are feasible deviations, so the exact candidate set
        // should never lose to them by more than the approach offset.
        assert!(br.payoff >= grid - 1e-9, "{variant:?} {:?}", config.positions());
    }
}
