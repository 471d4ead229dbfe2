//! The line-failure game: with probability `r` the unit line is cut at a
//! uniformly random point and clients cannot cross the cut.
//!
//! A cut only ever changes the market of the (at most two) servers adjacent to
//! it, so every half-market toward a neighbour keeps its classic expected
//! length and only the two hinterlands shrink: a hinterland of length `h` is
//! worth `h − r·h²/2` in expectation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{
    classic_markets, classic_payoffs, half_markets_at, unpaired_peripheral, Condition,
    ConditionReport, Configuration, Lineup, Segment, Violation,
};
use crate::montecarlo::{self, Estimate};
use crate::scalar::{Real, Scalar};

pub(crate) fn check_probability<T: Scalar>(r: T, closed: bool) -> Result<()> {
    let ok = if closed {
        T::zero() <= r && r <= T::one()
    } else {
        T::zero() < r && r < T::one()
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidProbability {
            value: r.to_f64_lossy(),
            range: if closed { "[0, 1]" } else { "(0, 1)" },
        })
    }
}

fn require_unit<T: Scalar>(config: &Configuration<T>) -> Result<()> {
    let seg = config.segment();
    if seg.is_unit() {
        Ok(())
    } else {
        let (a, b) = seg.describe();
        Err(Error::UnitSegmentRequired { a, b })
    }
}

/// Expected value of a hinterland of length `h`.
fn shrunk<T: Scalar>(h: T, r: T) -> T {
    h - r * h * h / T::two()
}

/// Expected payoff of server `i` of a lineup on `[0, 1]`.
pub fn lf_payoff_at<T: Scalar, L: Lineup<T> + ?Sized>(lineup: &L, r: T, i: usize) -> T {
    let (mut left, mut right) = half_markets_at(lineup, &Segment::unit(), i);
    if i == 0 {
        left = shrunk(left, r);
    }
    if i + 1 == lineup.count() {
        right = shrunk(right, r);
    }
    left + right
}

pub fn lf_payoffs<T: Scalar>(config: &Configuration<T>, r: T) -> Result<Vec<T>> {
    require_unit(config)?;
    check_probability(r, true)?;
    let xs = config.positions();
    Ok((0..xs.len()).map(|i| lf_payoff_at(xs, r, i)).collect())
}

/// Payoffs after a cut at `f`: each side is an independent classic market and
/// a side without servers loses its clients.
pub fn lf_cut_scenario<T: Scalar>(config: &Configuration<T>, f: T) -> Result<Vec<T>> {
    require_unit(config)?;
    if !(T::zero() < f && f < T::one()) {
        return Err(Error::ParamOutOfRange(format!(
            "cut location {} not in (0, 1)",
            f.to_f64_lossy()
        )));
    }
    let xs = config.positions();
    if xs.contains(&f) {
        return Err(Error::CutOnServer { f: f.to_f64_lossy() });
    }
    let split = xs.partition_point(|&x| x < f);
    let mut out = Vec::with_capacity(xs.len());
    if split > 0 {
        let left = Configuration::packed(xs[..split].to_vec(), Segment::new(T::zero(), f)?)?;
        out.extend(classic_payoffs(&left));
    }
    if split < xs.len() {
        let right = Configuration::packed(xs[split..].to_vec(), Segment::new(f, T::one())?)?;
        out.extend(classic_payoffs(&right));
    }
    Ok(out)
}

/// Integration oracle. Scenario payoffs are linear in `f` between consecutive
/// distinct coordinates, so the two-point rule at 1/4 and 3/4 of each piece is
/// exact there (and never evaluates a cut on a server).
pub fn lf_payoffs_quadrature<T: Scalar>(config: &Configuration<T>, r: T) -> Result<Vec<T>> {
    require_unit(config)?;
    check_probability(r, true)?;
    let n = config.n();
    let mut breaks = vec![T::zero()];
    breaks.extend(config.stacks().map(|(x, _)| x));
    breaks.push(T::one());

    let quarter = T::ratio(1, 4);
    let three_quarters = T::ratio(3, 4);
    let mut integral = vec![T::zero(); n];
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let width = hi - lo;
        if width <= T::zero() {
            continue;
        }
        let p = lf_cut_scenario(config, lo + width * quarter)?;
        let q = lf_cut_scenario(config, lo + width * three_quarters)?;
        for i in 0..n {
            integral[i] = integral[i] + (p[i] + q[i]) / T::two() * width;
        }
    }
    let classic = classic_payoffs(config);
    Ok((0..n)
        .map(|i| (T::one() - r) * classic[i] + r * integral[i])
        .collect())
}

/// Change in each affected server's payoff when the line is cut at `f`,
/// relative to the intact line. At most two servers are affected.
fn cut_deltas<T: Scalar>(xs: &[T], f: T) -> [(usize, T); 2] {
    let n = xs.len();
    let k = xs.partition_point(|&x| x <= f);
    if k == 0 {
        [(0, T::zero() - f), (0, T::zero())]
    } else if k == n {
        [(n - 1, f - T::one()), (0, T::zero())]
    } else {
        let (l, rr) = (xs[k - 1], xs[k]);
        let half = (rr - l) / T::two();
        [(k - 1, f - l - half), (k, rr - f - half)]
    }
}

pub fn lf_payoffs_montecarlo<T: Real>(
    config: &Configuration<T>,
    r: T,
    samples: u64,
    seed: u64,
) -> Result<Estimate<T>> {
    require_unit(config)?;
    check_probability(r, true)?;
    let xs = config.positions();
    let classic = classic_payoffs(config);
    montecarlo::estimate(&classic, samples, seed, |rng, acc| {
        let u = T::from_f64(rand::Rng::random::<f64>(rng)).expect("uniform draw");
        if u < r {
            let f = u / r;
            for (i, d) in cut_deltas(xs, f) {
                acc.add(i, d);
            }
        }
    })
}

/// Payoff-maximising position of a left peripheral server whose neighbour
/// sits at `neighbor_x`: the hinterland optimum `1/(2r)`, or a pairing with
/// the neighbour when that optimum lies beyond it.
pub fn lf_best_hinterland<T: Scalar>(neighbor_x: T, r: T) -> Result<T> {
    check_probability(r, false)?;
    if !(T::zero() < neighbor_x && neighbor_x <= T::one()) {
        return Err(Error::ParamOutOfRange(format!(
            "neighbour {} not in (0, 1]",
            neighbor_x.to_f64_lossy()
        )));
    }
    Ok((T::one() / (T::two() * r)).min_of(neighbor_x))
}

/// Mirror image of [`lf_best_hinterland`] for a right peripheral server.
pub fn lf_best_right_hinterland<T: Scalar>(neighbor_x: T, r: T) -> Result<T> {
    if !(T::zero() <= neighbor_x && neighbor_x < T::one()) {
        return Err(Error::ParamOutOfRange(format!(
            "neighbour {} not in [0, 1)",
            neighbor_x.to_f64_lossy()
        )));
    }
    Ok(T::one() - lf_best_hinterland(T::one() - neighbor_x, r)?)
}

/// Hinterland of the four-server equilibrium: the root in (0, 1) of
/// `r x² − 4x + 1 = 0`, written in the cancellation-free form.
pub fn four_server_hinterland<T: Real>(r: T) -> T {
    let four = T::from_f64(4.0).expect("literal");
    T::one() / (T::two() + (four - r).sqrt())
}

/// `(1/2 − x) − 2(x − r x²/2)`: zero at the five-server hinterland.
pub fn five_server_residual<T: Scalar>(x: T, r: T) -> T {
    (T::half() - x) - T::two() * shrunk(x, r)
}

/// Hinterland of the five-server equilibrium, found by bisection of
/// [`five_server_residual`] (strictly decreasing on `[0, 1/2]`).
pub fn five_server_hinterland<T: Real>(r: T) -> T {
    let (mut lo, mut hi) = (T::zero(), T::half());
    loop {
        let mid = (lo + hi) / T::two();
        if mid <= lo || mid >= hi {
            return mid;
        }
        if five_server_residual(mid, r) > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Closed form of the same root, `1 / (3 + √(9 − 2r))`.
pub fn five_server_hinterland_closed<T: Real>(r: T) -> T {
    let three = T::from_f64(3.0).expect("literal");
    let nine = T::from_f64(9.0).expect("literal");
    T::one() / (three + (nine - T::two() * r).sqrt())
}

/// The root `(3 − √(9 − 4r)) / (2r)` of `r x² − 3x + 1 = 0`, which is sometimes
/// quoted for the five-server case. It does not satisfy the five-server
/// condition; kept for comparison.
pub fn five_server_printed_root<T: Real>(r: T) -> T {
    let three = T::from_f64(3.0).expect("literal");
    let four = T::from_f64(4.0).expect("literal");
    let nine = T::from_f64(9.0).expect("literal");
    (three - (nine - four * r).sqrt()) / (T::two() * r)
}

/// Root in (0, 1/2) of `1 − 2x − c·(x − r x²/2) = 0`.
fn family_root<T: Real>(c: T, r: T) -> T {
    let s = T::two() + c;
    T::two() / (s + (s * s - T::two() * c * r).sqrt())
}

/// Admissible hinterlands of the symmetric `n ≥ 6` construction used by
/// [`lf_equilibrium`]. For `n = 6` the upper end is excluded (the flanks would
/// merge); for `n ≥ 7` both ends are included. `r = 0` gives the classic
/// family.
pub fn lf_family_interval<T: Real>(n: usize, r: T) -> Result<(T, T)> {
    if !(T::zero() <= r && r < T::one()) {
        return Err(Error::InvalidProbability {
            value: r.to_f64_lossy(),
            range: "[0, 1)",
        });
    }
    if n < 6 {
        return Err(Error::NotApplicable(format!(
            "the hinterland family starts at n = 6, got {n}"
        )));
    }
    let k = T::from_usize(n - 6).expect("count");
    let two = T::two();
    let four = two * two;
    // Middle gap g = (1 − 2x − 4h)/(k+1) must satisfy g ≤ 2h, and g > 0
    // (k = 0) or g ≥ h (k ≥ 1).
    let lower = family_root(four + two * (k + T::one()), r);
    let upper = if n == 6 {
        family_root(four, r)
    } else {
        family_root(four + k + T::one(), r)
    };
    Ok((lower, upper))
}

/// Equilibria of the line-failure game on `[0, 1]`.
///
/// For `n ≥ 6`, `family_param` is the hinterland `x`: pairs sit at `x` and
/// `1 − x`, flank servers at distance `2(x − r x²/2)` inside each pair, and the
/// remaining servers are spread evenly between the flanks.
pub fn lf_equilibrium<T: Real>(n: usize, r: T, family_param: Option<T>) -> Result<Configuration<T>> {
    check_probability(r, false)?;
    let one = T::one();
    let positions = match n {
        0 => return Err(Error::NoServers),
        1 => vec![T::half()],
        2 => vec![T::half(), T::half()],
        3 => return Err(Error::NoEquilibrium { n }),
        4 => {
            let x = four_server_hinterland(r);
            vec![x, x, one - x, one - x]
        }
        5 => {
            let x = five_server_hinterland(r);
            vec![x, x, T::half(), one - x, one - x]
        }
        _ => {
            let x = family_param.ok_or_else(|| {
                Error::ParamOutOfRange(format!("n = {n} needs the hinterland length x"))
            })?;
            if !(T::zero() < x && x < T::half()) {
                return Err(Error::ParamOutOfRange(format!(
                    "hinterland {} not in (0, 1/2)",
                    x.to_f64_lossy()
                )));
            }
            let h = shrunk(x, r);
            let lo = x + T::two() * h;
            let hi = one - lo;
            if !(lo < hi) {
                return Err(Error::ParamOutOfRange(format!(
                    "hinterland {} leaves no room between the flanks",
                    x.to_f64_lossy()
                )));
            }
            let k = n - 6;
            let gap = (hi - lo) / T::from_usize(k + 1).expect("count");
            let mut xs = vec![x, x, lo];
            xs.extend((1..=k).map(|j| lo + gap * T::from_usize(j).expect("count")));
            xs.extend([hi, one - x, one - x]);
            xs
        }
    };
    let config = Configuration::on_unit(positions)?;
    if n >= 6 && !lf_condition_check(&config, r)?.equilibrium {
        return Err(Error::ParamOutOfRange(format!(
            "hinterland {} outside the equilibrium family for n = {n}",
            family_param.map_or(f64::NAN, |x| x.to_f64_lossy())
        )));
    }
    Ok(config)
}

/// Equilibrium conditions of the line-failure game (`n ≥ 2`):
/// 1. peripheral servers are paired, at the same distance `x` from their ends;
/// 2. no interior server's whole market is below `x − r x²/2`;
/// 3. no interior server's half-market exceeds `x − r x²/2`.
pub fn lf_condition_check<T: Scalar>(config: &Configuration<T>, r: T) -> Result<ConditionReport<T>> {
    require_unit(config)?;
    check_probability(r, false)?;
    let n = config.n();
    if n < 2 {
        return Err(Error::NotApplicable(
            "a single server's unique optimum is the midpoint".into(),
        ));
    }
    let tol = T::formula_tol();
    let xs = config.positions();
    let (left, right) = (xs[0], T::one() - xs[n - 1]);

    let c1 = unpaired_peripheral(config).or_else(|| {
        (left.abs_diff(right) > tol).then_some(Violation::UnequalHinterlands { left, right })
    });

    let threshold = shrunk(left, r);
    let markets = classic_markets(config);
    let c2 = (1..n - 1).find_map(|i| {
        let market = markets.whole(i);
        (market + tol < threshold).then_some(Violation::InteriorMarketTooSmall {
            server: i,
            market,
            threshold,
        })
    });
    let c3 = (1..n - 1).find_map(|i| {
        let half_market = markets.larger_half(i);
        (half_market > threshold + tol).then_some(Violation::InteriorHalfMarketTooLarge {
            server: i,
            half_market,
            threshold,
        })
    });

    Ok(ConditionReport::from_conditions(vec![
        Condition::check("paired_equal_hinterlands", c1),
        Condition::check("interior_market", c2),
        Condition::check("interior_half_market", c3),
    ]))
}

/// The segment `[r x₁²/2, 1 − r (1 − xₙ)²/2]` on which the classic game pays
/// exactly the line-failure expected payoffs.
pub fn lf_equiv_segment<T: Scalar>(config: &Configuration<T>, r: T) -> Result<Segment<T>> {
    require_unit(config)?;
    check_probability(r, true)?;
    let xs = config.positions();
    let (left, right) = (xs[0], T::one() - xs[xs.len() - 1]);
    Segment::new(r * left * left / T::two(), T::one() - r * right * right / T::two())
}

/// Which single-server deviation from the four-server equilibrium a
/// [`ScenarioTable`] describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DeviationRegion {
    /// The left pair's outer member moves into its hinterland, `y ∈ [0, x)`.
    Hinterland,
    /// The left pair's inner member moves toward the centre, `y ∈ (x, 1/2)`.
    Interior,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioRow<T> {
    /// Failure interval; `None` for the no-failure scenario.
    pub f_interval: Option<(T, T)>,
    pub prob_mass: T,
    pub payoff_incumbent: T,
    pub payoff_deviator: T,
}

/// Scenario-by-scenario comparison between a server of the four-server
/// line-failure equilibrium and the same server after moving to `y`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioTable<T> {
    pub r: T,
    pub x: T,
    pub y: T,
    pub region: DeviationRegion,
    pub rows: Vec<ScenarioRow<T>>,
    pub expected_incumbent: T,
    pub expected_deviator: T,
}

impl<T: Real> ScenarioTable<T> {
    pub fn difference(&self) -> T {
        self.expected_incumbent - self.expected_deviator
    }

    /// Index of the server under comparison (same before and after the move).
    pub fn player(&self) -> usize {
        match self.region {
            DeviationRegion::Hinterland => 0,
            DeviationRegion::Interior => 1,
        }
    }

    pub fn equilibrium(&self) -> Configuration<T> {
        let one = T::one();
        Configuration::from_sorted(
            vec![self.x, self.x, one - self.x, one - self.x],
            Segment::unit(),
        )
    }

    pub fn deviated(&self) -> Configuration<T> {
        let one = T::one();
        let (x, y) = (self.x, self.y);
        let positions = match self.region {
            DeviationRegion::Hinterland => vec![y, x, one - x, one - x],
            DeviationRegion::Interior => vec![x, y, one - x, one - x],
        };
        Configuration::from_sorted(positions, Segment::unit())
    }
}

pub fn lf_appendix_tables<T: Real>(r: T, y: T) -> Result<ScenarioTable<T>> {
    check_probability(r, false)?;
    let x = four_server_hinterland(r);
    let (one, two, half) = (T::one(), T::two(), T::half());
    if !(T::zero() <= y && y < half) || y == x {
        return Err(Error::ParamOutOfRange(format!(
            "deviation {} not in [0, 1/2) minus the hinterland {}",
            y.to_f64_lossy(),
            x.to_f64_lossy()
        )));
    }
    let row = |interval: Option<(T, T)>, prob_mass: T, inc: T, dev: T| ScenarioRow {
        f_interval: interval,
        prob_mass,
        payoff_incumbent: inc,
        payoff_deviator: dev,
    };
    let (region, rows) = if y < x {
        let moved = (x + y) / two;
        (
            DeviationRegion::Hinterland,
            vec![
                row(None, one - r, x, moved),
                row(Some((T::zero(), y)), r * y, x - y / two, x / two),
                row(Some((y, x)), r * (x - y), (x - y) / two, moved),
                row(Some((x, one)), r * (one - x), x, moved),
            ],
        )
    } else {
        let stay = half - x;
        (
            DeviationRegion::Interior,
            vec![
                row(None, one - r, stay, stay),
                row(Some((T::zero(), x)), r * x, stay, stay),
                row(Some((x, y)), r * (y - x), (y - x) / two, stay),
                row(
                    Some((y, one - x)),
                    r * (one - x - y),
                    (one + y - T::from_f64(3.0).expect("literal") * x) / two,
                    stay,
                ),
                row(Some((one - x, one)), r * x, stay, stay),
            ],
        )
    };
    // A payoff shared by every row is its own expectation; summing the
    // masses would only add rounding.
    let expect = |pick: fn(&ScenarioRow<T>) -> T| {
        let first = pick(&rows[0]);
        if rows.iter().all(|row| pick(row) == first) {
            return first;
        }
        rows.iter()
            .fold(T::zero(), |acc, row| acc + row.prob_mass * pick(row))
    };
    let expected_incumbent = expect(|row| row.payoff_incumbent);
    let expected_deviator = expect(|row| row.payoff_deviator);
    Ok(ScenarioTable {
        r,
        x,
        y,
        region,
        rows,
        expected_incumbent,
        expected_deviator,
    })
}
