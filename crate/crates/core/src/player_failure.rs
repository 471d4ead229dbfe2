//! The player-failure game: every server crashes independently with
//! probability `r` and the survivors re-partition the whole line.
//!
//! Server `i`'s expected payoff only depends on its nearest *surviving*
//! neighbour on each side. The `t`-th neighbour to the left is the nearest
//! survivor with probability `(1 − r)·r^(t−1)`, and with probability `r^i`
//! nobody survives on the left and the whole hinterland is taken. That gives
//! an O(n) closed form per server; [`pf_payoffs_exact`] is the brute-force
//! subset enumeration it is checked against.

use rand::Rng;

use crate::error::{Error, Result};
use crate::line_failure::check_probability;
use crate::model::{classic_payoffs, half_markets_at, Configuration, Lineup, Segment};
use crate::montecarlo::{self, Estimate};
use crate::scalar::{Real, Scalar};

/// Largest `n` accepted by [`pf_payoffs_exact`].
pub const MAX_ENUMERATION: usize = 20;

/// Expected payoff of server `i` of a lineup on `seg`.
pub fn pf_payoff_at<T: Scalar, L: Lineup<T> + ?Sized>(
    lineup: &L,
    seg: &Segment<T>,
    r: T,
    i: usize,
) -> T {
    let n = lineup.count();
    let x = lineup.at(i);
    let alive = T::one() - r;

    let mut left = T::zero();
    let mut none_yet = T::one();
    for j in (0..i).rev() {
        left = left + alive * none_yet * (x - lineup.at(j)) / T::two();
        none_yet = none_yet * r;
    }
    left = left + none_yet * (x - seg.a);

    let mut right = T::zero();
    let mut none_yet = T::one();
    for j in i + 1..n {
        right = right + alive * none_yet * (lineup.at(j) - x) / T::two();
        none_yet = none_yet * r;
    }
    right = right + none_yet * (seg.b - x);

    alive * (left + right)
}

pub fn pf_payoffs<T: Scalar>(config: &Configuration<T>, r: T) -> Result<Vec<T>> {
    check_probability(r, true)?;
    let seg = config.segment();
    let xs = config.positions();
    Ok((0..xs.len()).map(|i| pf_payoff_at(xs, &seg, r, i)).collect())
}

/// The servers of one crash scenario, as a lineup.
struct Survivors<'a, T> {
    xs: &'a [T],
    alive: &'a [usize],
}

impl<T: Copy> Lineup<T> for Survivors<'_, T> {
    fn count(&self) -> usize {
        self.alive.len()
    }

    fn at(&self, k: usize) -> T {
        self.xs[self.alive[k]]
    }
}

/// Classic payoffs of the survivors, scattered back to server indices
/// (crashed servers get zero).
fn survivor_payoffs<T: Scalar>(xs: &[T], seg: &Segment<T>, alive: &[usize], out: &mut [T]) {
    let view = Survivors { xs, alive };
    for (k, &i) in alive.iter().enumerate() {
        let (l, r) = half_markets_at(&view, seg, k);
        out[i] = l + r;
    }
}

/// Expected payoffs by enumerating all `2ⁿ` crash scenarios.
pub fn pf_payoffs_exact<T: Scalar>(config: &Configuration<T>, r: T) -> Result<Vec<T>> {
    check_probability(r, true)?;
    let n = config.n();
    if n > MAX_ENUMERATION {
        return Err(Error::TooManyServers {
            n,
            max: MAX_ENUMERATION,
        });
    }
    let seg = config.segment();
    let xs = config.positions();
    let alive_p = T::one() - r;
    let up: Vec<T> = (0..=n).map(|k| alive_p.powu(k)).collect();
    let down: Vec<T> = (0..=n).map(|k| r.powu(k)).collect();

    let mut total = vec![T::zero(); n];
    let mut scenario = vec![T::zero(); n];
    let mut alive = Vec::with_capacity(n);
    for mask in 1u32..(1u32 << n) {
        alive.clear();
        alive.extend((0..n).filter(|&i| mask & (1 << i) != 0));
        let weight = up[alive.len()] * down[n - alive.len()];
        if weight == T::zero() {
            continue;
        }
        survivor_payoffs(xs, &seg, &alive, &mut scenario);
        for &i in &alive {
            total[i] = total[i] + weight * scenario[i];
        }
    }
    Ok(total)
}

pub fn pf_payoffs_montecarlo<T: Real>(
    config: &Configuration<T>,
    r: T,
    samples: u64,
    seed: u64,
) -> Result<Estimate<T>> {
    check_probability(r, true)?;
    let seg = config.segment();
    let xs = config.positions();
    let n = xs.len();
    let classic = classic_payoffs(config);
    let r = r.to_f64_lossy();
    montecarlo::estimate(&classic, samples, seed, |rng, acc| {
        let alive: Vec<usize> = (0..n).filter(|_| rng.random::<f64>() >= r).collect();
        if alive.len() == n {
            return;
        }
        let mut scenario = vec![T::zero(); n];
        survivor_payoffs(xs, &seg, &alive, &mut scenario);
        for i in 0..n {
            acc.add(i, scenario[i] - classic[i]);
        }
    })
}

/// Payoff advantage of the outer member over the inner member of a pair at
/// the centre with a third server co-located: `(1 − r)³/2`, zero only at
/// `r = 1`.
pub fn pf_three_server_gap<T: Scalar>(r: T) -> Result<T> {
    if !(T::zero() < r && r <= T::one()) {
        return Err(Error::InvalidProbability {
            value: r.to_f64_lossy(),
            range: "(0, 1]",
        });
    }
    let q = T::one() - r;
    Ok(q * q * q / T::two())
}

fn check_pairing_args<T: Scalar>(n: usize, r: T, x1: T, x3: T) -> Result<()> {
    check_probability(r, false)?;
    if n < 3 {
        return Err(Error::ParamOutOfRange(format!("pairing gain needs n >= 3, got {n}")));
    }
    if !(x1 < x3) {
        return Err(Error::ParamOutOfRange(format!(
            "pairing gain needs x1 < x3, got {} and {}",
            x1.to_f64_lossy(),
            x3.to_f64_lossy()
        )));
    }
    Ok(())
}

/// Expected gain of `s₂` when it leaves its partner `s₁` at `x1` and pairs
/// with `s₃` at `x3` instead (attaching on `s₃`'s left):
/// `(1 − r)(r − r^(n−2))(x3 − x1)/2`. Positive for `n ≥ 4`, zero for `n = 3`.
pub fn pf_pairing_gain<T: Scalar>(n: usize, r: T, x1: T, x3: T) -> Result<T> {
    check_pairing_args(n, r, x1, x3)?;
    Ok((T::one() - r) * (r - r.powu(n - 2)) * (x3 - x1) / T::two())
}

/// `(r − r^(n−2))(1 − r)²(x3 − x1)/2`: an often-quoted form of the same gain
/// with one factor `(1 − r)` too many. Kept to document the discrepancy; it
/// does not match the exact payoff difference.
pub fn pf_pairing_gain_printed<T: Scalar>(n: usize, r: T, x1: T, x3: T) -> Result<T> {
    check_pairing_args(n, r, x1, x3)?;
    let q = T::one() - r;
    Ok((r - r.powu(n - 2)) * q * q * (x3 - x1) / T::two())
}
