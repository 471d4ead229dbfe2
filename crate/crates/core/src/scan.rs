//! Exhaustive equilibrium search over grid configurations.
//!
//! Positions are restricted to `a + (b − a)·k/resolution`, at most two servers
//! per grid point, and each configuration is visited once up to the
//! reflection `x ↦ a + b − x` (payoffs of all three variants are
//! reflection-covariant).

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{is_nash, GameVariant};
use crate::error::{Error, Result};
use crate::line_failure::check_probability;
use crate::model::{Configuration, Segment};
use crate::scalar::Real;

/// A scanned configuration that is not an equilibrium, with its strongest
/// profitable deviation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanWitness<T> {
    pub config: Vec<T>,
    pub player: usize,
    pub deviation: T,
    pub gain: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport<T> {
    pub configurations_scanned: u64,
    pub equilibria: Vec<Vec<T>>,
    /// Smallest best-response gain among the non-equilibria: how close the
    /// grid comes to an equilibrium.
    pub min_max_gain: Option<T>,
    /// The non-equilibria closest to being equilibria, closest first.
    pub nearest: Vec<ScanWitness<T>>,
}

struct Partial<T> {
    scanned: u64,
    equilibria: Vec<Vec<T>>,
    nearest: Vec<ScanWitness<T>>,
}

impl<T: Real> Partial<T> {
    fn new() -> Self {
        Self {
            scanned: 0,
            equilibria: Vec::new(),
            nearest: Vec::new(),
        }
    }

    fn keep(&mut self, witness: ScanWitness<T>, cap: usize) {
        if cap == 0 {
            return;
        }
        if self.nearest.len() == cap && witness.gain >= self.nearest[cap - 1].gain {
            return;
        }
        let at = self.nearest.partition_point(|w| w.gain <= witness.gain);
        self.nearest.insert(at, witness);
        self.nearest.truncate(cap);
    }

    fn absorb(mut self, other: Self, cap: usize) -> Self {
        self.scanned += other.scanned;
        self.equilibria.extend(other.equilibria);
        for w in other.nearest {
            self.keep(w, cap);
        }
        self
    }
}

/// Non-decreasing index sequences with multiplicity at most two that are
/// lexicographically no larger than their mirror image, starting with `first`.
fn for_each_sequence(n: usize, res: usize, first: usize, visit: &mut impl FnMut(&[usize])) {
    fn rec(seq: &mut Vec<usize>, n: usize, res: usize, visit: &mut impl FnMut(&[usize])) {
        if seq.len() == n {
            let mirror = seq.iter().rev().map(|&i| res - i);
            if seq.iter().copied().le(mirror) {
                visit(seq);
            }
            return;
        }
        let last = *seq.last().expect("non-empty prefix");
        let tripled = seq.len() >= 2 && seq[seq.len() - 2] == last;
        let start = if tripled { last + 1 } else { last };
        for next in start..=res {
            seq.push(next);
            rec(seq, n, res, visit);
            seq.pop();
        }
    }
    let mut seq = vec![first];
    rec(&mut seq, n, res, visit);
}

/// Runs [`is_nash`] on every grid configuration of `n` servers.
pub fn grid_scan<T: Real>(
    n: usize,
    variant: GameVariant<T>,
    seg: Segment<T>,
    resolution: usize,
    delta: T,
    keep: usize,
) -> Result<ScanReport<T>> {
    if n == 0 {
        return Err(Error::NoServers);
    }
    if resolution == 0 {
        return Err(Error::ParamOutOfRange("grid resolution must be positive".into()));
    }
    variant.check(&seg)?;
    let res = T::from_usize(resolution).expect("resolution");
    let grid: Vec<T> = (0..=resolution)
        .map(|k| seg.a + seg.len() * T::from_usize(k).expect("index") / res)
        .collect();

    let parts: Vec<Partial<T>> = (0..=resolution)
        .into_par_iter()
        .map(|first| {
            let mut part = Partial::new();
            let mut failure = None;
            for_each_sequence(n, resolution, first, &mut |seq| {
                if failure.is_some() {
                    return;
                }
                let positions: Vec<T> = seq.iter().map(|&k| grid[k]).collect();
                let config = Configuration::from_sorted(positions, seg);
                match is_nash(&config, variant, delta) {
                    Ok(report) => {
                        part.scanned += 1;
                        if report.verdict {
                            part.equilibria.push(config.into_positions());
                        } else if let Some(w) = report.strongest() {
                            let witness = ScanWitness {
                                config: config.into_positions(),
                                player: w.player,
                                deviation: w.position,
                                gain: w.gain,
                            };
                            part.keep(witness, keep.max(1));
                        }
                    }
                    Err(e) => failure = Some(e),
                }
            });
            match failure {
                Some(e) => Err(e),
                None => Ok(part),
            }
        })
        .collect::<Result<_>>()?;

    let total = parts
        .into_iter()
        .fold(Partial::new(), |acc, p| acc.absorb(p, keep.max(1)));
    let min_max_gain = total.nearest.first().map(|w| w.gain);
    let mut nearest = total.nearest;
    nearest.truncate(keep);
    Ok(ScanReport {
        configurations_scanned: total.scanned,
        equilibria: total.equilibria,
        min_max_gain,
        nearest,
    })
}

/// Grid evidence that the player-failure game has no pure equilibrium.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport<T> {
    pub n: usize,
    pub r: T,
    pub resolution: usize,
    pub configurations_scanned: u64,
    pub equilibria_found: usize,
    /// Smallest best-response gain over all scanned configurations.
    pub min_max_gain: Option<T>,
    pub equilibria: Vec<Vec<T>>,
    /// Profitable deviations from the configurations closest to equilibrium.
    pub witnesses: Vec<ScanWitness<T>>,
}

/// Number of witnesses a [`ProbeReport`] lists.
pub const PROBE_WITNESSES: usize = 10;

pub fn pf_nonexistence_probe<T: Real>(n: usize, r: T, resolution: usize) -> Result<ProbeReport<T>> {
    check_probability(r, false)?;
    let scan = grid_scan(
        n,
        GameVariant::PlayerFailure { r },
        Segment::unit(),
        resolution,
        T::nash_delta(),
        PROBE_WITNESSES,
    )?;
    Ok(ProbeReport {
        n,
        r,
        resolution,
        configurations_scanned: scan.configurations_scanned,
        equilibria_found: scan.equilibria.len(),
        min_max_gain: scan.min_max_gain,
        equilibria: scan.equilibria,
        witnesses: scan.nearest,
    })
}
