//! Best responses over finite candidate sets, ε-Nash verification and
//! best-response dynamics for all three game variants.
//!
//! For fixed opponents a server's payoff is piecewise simple in its own
//! position: constant on interior slots (classic and line failure), affine on
//! every slot (player failure), and a concave quadratic on the hinterland slots
//! of the line-failure game. The supremum over the line is therefore attained
//! (or approached) at a finite set of points, which [`candidate_set`] lists.

use std::collections::HashMap;

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::line_failure::{check_probability, lf_payoff_at};
use crate::model::{classic_payoff_at, Configuration, Lineup, Segment};
use crate::player_failure::pf_payoff_at;
use crate::scalar::{Real, Scalar};

/// Which payoff law is in force.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum GameVariant<T> {
    /// Classic game on the configuration's own segment.
    Classic,
    /// Random cut with probability `r`; unit segment only.
    LineFailure { r: T },
    /// Independent crashes with probability `r`.
    PlayerFailure { r: T },
}

impl<T: Scalar> GameVariant<T> {
    pub fn check(&self, seg: &Segment<T>) -> Result<()> {
        match *self {
            GameVariant::Classic => Ok(()),
            GameVariant::LineFailure { r } => {
                check_probability(r, true)?;
                if seg.is_unit() {
                    Ok(())
                } else {
                    let (a, b) = seg.describe();
                    Err(Error::UnitSegmentRequired { a, b })
                }
            }
            GameVariant::PlayerFailure { r } => check_probability(r, true),
        }
    }

    /// Payoff of server `i` of `lineup`; the caller has already run [`check`](Self::check).
    pub fn payoff_at<L: Lineup<T> + ?Sized>(&self, lineup: &L, seg: &Segment<T>, i: usize) -> T {
        match *self {
            GameVariant::Classic => classic_payoff_at(lineup, seg, i),
            GameVariant::LineFailure { r } => lf_payoff_at(lineup, r, i),
            GameVariant::PlayerFailure { r } => pf_payoff_at(lineup, seg, r, i),
        }
    }

    pub fn payoffs(&self, config: &Configuration<T>) -> Result<Vec<T>> {
        let seg = config.segment();
        self.check(&seg)?;
        let xs = config.positions();
        Ok((0..xs.len()).map(|i| self.payoff_at(xs, &seg, i)).collect())
    }
}

/// `base` with `copies` servers at `x` inserted at index `k`.
struct Spliced<'a, T> {
    base: &'a [T],
    k: usize,
    x: T,
    copies: usize,
}

impl<T: Copy> Lineup<T> for Spliced<'_, T> {
    fn count(&self) -> usize {
        self.base.len() + self.copies
    }

    fn at(&self, i: usize) -> T {
        if i < self.k {
            self.base[i]
        } else if i < self.k + self.copies {
            self.x
        } else {
            self.base[i - self.copies]
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CandidateKind {
    /// Pair with a lone server, as the left member.
    AttachLeftOf { server: usize },
    /// Pair with a lone server, as the right member.
    AttachRightOf { server: usize },
    /// Sit just beside an existing pair (a third server cannot join it).
    Approach { server: usize, side: Side },
    /// Midpoint of an open slot between consecutive coordinates.
    SlotInterior { slot: usize },
    /// Vertex of the line-failure hinterland payoff.
    HinterlandOptimum { side: Side },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeviationCandidate<T> {
    #[serde(flatten)]
    pub kind: CandidateKind,
    pub position: T,
    /// Index the deviator takes in the resulting configuration.
    #[serde(skip)]
    index: usize,
}

/// One player's deviation problem: the opponents are fixed.
struct Deviation<T> {
    others: Vec<T>,
    player: usize,
    seg: Segment<T>,
    variant: GameVariant<T>,
}

impl<T: Real> Deviation<T> {
    fn new(config: &Configuration<T>, player: usize, variant: GameVariant<T>) -> Result<Self> {
        let n = config.n();
        if player >= n {
            return Err(Error::NoSuchPlayer { player, n });
        }
        let seg = config.segment();
        variant.check(&seg)?;
        Ok(Self {
            others: config.others(player),
            player,
            seg,
            variant,
        })
    }

    /// Server index in the original configuration of opponent `j`.
    fn original(&self, j: usize) -> usize {
        if j < self.player {
            j
        } else {
            j + 1
        }
    }

    fn payoff(&self, position: T, index: usize) -> T {
        let view = Spliced {
            base: &self.others,
            k: index,
            x: position,
            copies: 1,
        };
        self.variant.payoff_at(&view, &self.seg, index)
    }

    fn candidates(&self) -> Vec<DeviationCandidate<T>> {
        let others = &self.others;
        let m = others.len();
        let Segment { a, b } = self.seg;
        let eta = T::approach_gap() * T::one().max(a.abs()).max(b.abs());
        let mut out = Vec::with_capacity(3 * m + 3);
        let mut push = |kind, position, index| {
            out.push(DeviationCandidate {
                kind,
                position,
                index,
            })
        };

        let mut slot = 0;
        let mut prev = a;
        let mut j = 0;
        loop {
            let hi = if j < m { others[j] } else { b };
            if hi > prev {
                push(CandidateKind::SlotInterior { slot }, (prev + hi) / T::two(), j);
            }
            slot += 1;
            if j == m {
                break;
            }
            let c = others[j];
            let mut e = j;
            while e < m && others[e] == c {
                e += 1;
            }
            if e - j == 1 {
                let server = self.original(j);
                push(CandidateKind::AttachLeftOf { server }, c, j);
                push(CandidateKind::AttachRightOf { server }, c, j + 1);
            } else {
                let left = c - eta;
                if (j == 0 && left >= a) || (j > 0 && left > prev) {
                    let server = self.original(j);
                    push(CandidateKind::Approach { server, side: Side::Left }, left, j);
                }
                let right = c + eta;
                if (e == m && right <= b) || (e < m && right < others[e]) {
                    let server = self.original(e - 1);
                    push(CandidateKind::Approach { server, side: Side::Right }, right, e);
                }
            }
            prev = c;
            j = e;
        }

        if let GameVariant::LineFailure { r } = self.variant {
            if r > T::zero() {
                let vertex = T::one() / (T::two() * r);
                if m == 0 {
                    push(CandidateKind::HinterlandOptimum { side: Side::Left }, T::half(), 0);
                } else {
                    if vertex < others[0] {
                        push(CandidateKind::HinterlandOptimum { side: Side::Left }, vertex, 0);
                    }
                    let mirrored = T::one() - vertex;
                    if mirrored > others[m - 1] {
                        push(CandidateKind::HinterlandOptimum { side: Side::Right }, mirrored, m);
                    }
                }
            }
        }
        out
    }

    fn best(&self, current: T) -> BestResponse<T> {
        let tol = T::formula_tol();
        let mut best: Option<(DeviationCandidate<T>, T)> = None;
        for cand in self.candidates() {
            let payoff = self.payoff(cand.position, cand.index);
            let better = match best {
                None => true,
                Some((b, p)) => {
                    payoff > p + tol || ((payoff - p).abs() <= tol && cand.position < b.position)
                }
            };
            if better {
                best = Some((cand, payoff));
            }
        }
        // Every segment has at least one non-empty slot, so a candidate exists.
        let (candidate, payoff) = best.expect("candidate set is never empty");
        BestResponse {
            player: self.player,
            candidate,
            payoff,
            current,
            gain: payoff - current,
        }
    }
}

/// Every candidate deviation of `player` against the other servers.
pub fn candidate_set<T: Real>(
    player: usize,
    config: &Configuration<T>,
    variant: GameVariant<T>,
) -> Result<Vec<DeviationCandidate<T>>> {
    Ok(Deviation::new(config, player, variant)?.candidates())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BestResponse<T> {
    pub player: usize,
    pub candidate: DeviationCandidate<T>,
    pub payoff: T,
    pub current: T,
    pub gain: T,
}

impl<T: Copy> BestResponse<T> {
    pub fn position(&self) -> T {
        self.candidate.position
    }
}

/// Highest-payoff candidate for `player`; ties go to the smallest position.
pub fn best_response<T: Real>(
    player: usize,
    config: &Configuration<T>,
    variant: GameVariant<T>,
) -> Result<BestResponse<T>> {
    let dev = Deviation::new(config, player, variant)?;
    let current = variant.payoff_at(config.positions(), &config.segment(), player);
    Ok(dev.best(current))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness<T> {
    pub player: usize,
    pub position: T,
    #[serde(flatten)]
    pub kind: CandidateKind,
    pub gain: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NashReport<T> {
    pub verdict: bool,
    pub delta: T,
    /// Largest best-response gain over all players.
    pub max_gain: T,
    /// Every player whose best response gains more than zero.
    pub witnesses: Vec<Witness<T>>,
}

impl<T: Copy + PartialOrd> NashReport<T> {
    /// The witness with the largest gain.
    pub fn strongest(&self) -> Option<&Witness<T>> {
        self.witnesses
            .iter()
            .fold(None, |acc: Option<&Witness<T>>, w| match acc {
                Some(best) if best.gain >= w.gain => Some(best),
                _ => Some(w),
            })
    }
}

/// ε-Nash check: no player gains more than `delta` by moving.
pub fn is_nash<T: Real>(
    config: &Configuration<T>,
    variant: GameVariant<T>,
    delta: T,
) -> Result<NashReport<T>> {
    if !(delta >= T::zero()) {
        return Err(Error::ParamOutOfRange(format!(
            "tolerance {} must be non-negative",
            delta.to_f64_lossy()
        )));
    }
    variant.check(&config.segment())?;
    let mut max_gain = T::neg_infinity();
    let mut witnesses = Vec::new();
    for player in 0..config.n() {
        let br = best_response(player, config, variant)?;
        max_gain = max_gain.max(br.gain);
        if br.gain > T::zero() {
            witnesses.push(Witness {
                player,
                position: br.position(),
                kind: br.candidate.kind,
                gain: br.gain,
            });
        }
    }
    Ok(NashReport {
        verdict: max_gain <= delta,
        delta,
        max_gain,
        witnesses,
    })
}

/// Brute-force best response over the grid `a + (b − a)·k/resolution`,
/// trying both sides of every lone opponent and skipping coordinates already
/// holding a pair. Returns `(position, payoff)`.
pub fn grid_best_response_oracle<T: Real>(
    player: usize,
    config: &Configuration<T>,
    variant: GameVariant<T>,
    resolution: usize,
) -> Result<(T, T)> {
    if resolution == 0 {
        return Err(Error::ParamOutOfRange("grid resolution must be positive".into()));
    }
    let dev = Deviation::new(config, player, variant)?;
    let seg = dev.seg;
    let res = T::from_usize(resolution).expect("resolution");
    let mut best: Option<(T, T)> = None;
    for k in 0..=resolution {
        let y = seg.a + seg.len() * T::from_usize(k).expect("index") / res;
        let lo = dev.others.partition_point(|&x| x < y);
        let hi = dev.others.partition_point(|&x| x <= y);
        let slots: &[usize] = match hi - lo {
            0 => &[lo],
            1 => &[lo, hi],
            _ => &[],
        };
        for &index in slots {
            let p = dev.payoff(y, index);
            if best.is_none_or(|(_, bp)| p > bp) {
                best = Some((y, p));
            }
        }
    }
    best.ok_or_else(|| Error::ParamOutOfRange("every grid point is occupied by a pair".into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    RoundRobin,
    LargestGain,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicsOptions<T> {
    pub schedule: Schedule,
    pub max_iters: usize,
    /// Grid used to recognise revisited configurations.
    pub quantum: T,
    pub delta: T,
}

impl<T: Real> Default for DynamicsOptions<T> {
    fn default() -> Self {
        Self {
            schedule: Schedule::RoundRobin,
            max_iters: 10_000,
            quantum: T::from_f64(1e-6).expect("literal"),
            delta: T::nash_delta(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StepKind {
    /// The player moved to its best response.
    Relocate,
    /// The player's best response was to swap sides within its pair. In the
    /// ε-separated game such swaps walk the pair along the line; this step is
    /// their limit (see [`br_dynamics`]).
    PairDrift,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Step<T> {
    pub iteration: usize,
    pub player: usize,
    pub from: T,
    pub to: T,
    pub gain: T,
    pub kind: StepKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Outcome {
    Equilibrium,
    Cycle { period: usize },
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DynamicsTrace<T> {
    pub steps: Vec<Step<T>>,
    pub outcome: Outcome,
    pub final_configuration: Configuration<T>,
    /// Best-response evaluations performed.
    pub evaluations: usize,
    /// Distinct quantised states seen.
    pub states_visited: usize,
}

fn quantize<T: Real>(xs: &[T], quantum: T) -> Vec<i64> {
    xs.iter()
        .map(|&x| (x / quantum).round().to_i64().unwrap_or(i64::MAX))
        .collect()
}

/// A pair one of whose members wants to swap sides.
struct Drift<T> {
    /// Index of the pair's left member.
    left: usize,
    rightward: bool,
    player: usize,
    gain: T,
}

fn is_noop<T: Real>(config: &Configuration<T>, br: &BestResponse<T>) -> bool {
    let mut xs = config.others(br.player);
    xs.insert(br.candidate.index, br.position());
    xs == config.positions()
}

fn drifting_pairs<T: Real>(
    config: &Configuration<T>,
    variant: GameVariant<T>,
    delta: T,
) -> Result<Vec<Drift<T>>> {
    let xs = config.positions();
    let mut out = Vec::new();
    let mut i = 0;
    while i + 1 < xs.len() {
        if xs[i] != xs[i + 1] || config.partner(i) != Some(i + 1) {
            i += 1;
            continue;
        }
        let seg = config.segment();
        for (player, partner) in [(i, i + 1), (i + 1, i)] {
            // Swapping sides hands the player its partner's current payoff.
            let swap = variant.payoff_at(xs, &seg, partner) - variant.payoff_at(xs, &seg, player);
            if swap <= delta {
                continue;
            }
            let br = best_response(player, config, variant)?;
            if swap + T::formula_tol() >= br.gain {
                out.push(Drift {
                    left: i,
                    rightward: player == i,
                    player,
                    gain: swap,
                });
                break;
            }
        }
        i += 2;
    }
    Ok(out)
}

fn shifted<T: Real>(xs: &[T], drifts: &[Drift<T>], t: T) -> Vec<T> {
    let mut out = xs.to_vec();
    for d in drifts {
        let x = if d.rightward { xs[d.left] + t } else { xs[d.left] - t };
        out[d.left] = x;
        out[d.left + 1] = x;
    }
    out
}

/// Moves every drifting pair by the same distance `t`, as far as every one of
/// them still profits from swapping. Returns the moved positions, or `None`
/// if no pair can move.
fn joint_drift<T: Real>(
    config: &Configuration<T>,
    variant: GameVariant<T>,
    drifts: &[Drift<T>],
) -> Option<Vec<T>> {
    let xs = config.positions();
    let seg = config.segment();
    let n = xs.len();
    let eta = T::approach_gap() * T::one().max(seg.a.abs()).max(seg.b.abs());
    let moving = |i: usize| drifts.iter().any(|d| d.left == i || d.left + 1 == i);

    let mut room = T::infinity();
    for d in drifts {
        let (gap, toward) = if d.rightward {
            match xs.get(d.left + 2) {
                Some(&next) => {
                    let toward = moving(d.left + 2)
                        && drifts.iter().any(|e| e.left == d.left + 2 && !e.rightward);
                    (next - xs[d.left] - eta, toward)
                }
                None => (seg.b - xs[d.left], false),
            }
        } else if d.left > 0 {
            let toward = moving(d.left - 1)
                && drifts.iter().any(|e| e.left + 1 == d.left - 1 && e.rightward);
            (xs[d.left] - xs[d.left - 1] - eta, toward)
        } else {
            (xs[d.left] - seg.a, false)
        };
        room = room.min(if toward { gap / T::two() } else { gap });
    }
    if !(room > T::zero()) {
        return None;
    }

    let all_gain = |t: T| {
        let ys = shifted(xs, drifts, t);
        drifts.iter().all(|d| {
            let left = variant.payoff_at(&ys[..], &seg, d.left);
            let right = variant.payoff_at(&ys[..], &seg, d.left + 1);
            let g = if d.rightward { right - left } else { left - right };
            g > T::zero()
        })
    };
    let t = if all_gain(room) {
        room
    } else {
        let (mut good, mut bad) = (T::zero(), room);
        loop {
            let mid = (good + bad) / T::two();
            if mid == good || mid == bad {
                break good;
            }
            if all_gain(mid) {
                good = mid;
            } else {
                bad = mid;
            }
        }
    };
    let ys = shifted(xs, drifts, t);
    (ys != xs && ys.windows(2).all(|w| w[0] <= w[1]) && n == ys.len()).then_some(ys)
}

/// A move's resulting configuration and the steps that produced it.
type Moved<T> = (Configuration<T>, Vec<Step<T>>);

/// Applies `br` to `config`, returning the new configuration and the steps.
fn apply<T: Real>(
    config: &Configuration<T>,
    br: &BestResponse<T>,
    variant: GameVariant<T>,
    delta: T,
    iteration: usize,
) -> Result<Option<Moved<T>>> {
    let seg = config.segment();
    let xs = config.positions();
    if !is_noop(config, br) {
        let mut moved = config.others(br.player);
        moved.insert(br.candidate.index, br.position());
        let step = Step {
            iteration,
            player: br.player,
            from: xs[br.player],
            to: br.position(),
            gain: br.gain,
            kind: StepKind::Relocate,
        };
        return Ok(Some((Configuration::from_sorted(moved, seg), vec![step])));
    }
    let drifts = drifting_pairs(config, variant, delta)?;
    let Some(moved) = joint_drift(config, variant, &drifts) else {
        return Ok(None);
    };
    let steps = drifts
        .iter()
        .map(|d| Step {
            iteration,
            player: d.player,
            from: xs[d.left],
            to: moved[d.left],
            gain: d.gain,
            kind: StepKind::PairDrift,
        })
        .collect();
    Ok(Some((Configuration::from_sorted(moved, seg), steps)))
}

/// Best-response iteration from `start`.
///
/// Round-robin ends in equilibrium after `n` consecutive players decline to
/// move; largest-gain ends as soon as no player gains more than `delta`.
///
/// When the scheduled player's best response is to swap sides with its pair
/// partner, the configuration would not change. In the ε-separated game each
/// such swap shifts the pair by ε, and over a round every pair that wants to
/// swap does so once, so in the limit all those pairs slide together at the
/// same speed. The step moves them jointly until one of them no longer gains
/// from swapping (or would run into a neighbour).
///
/// A
/// cycle is reported when a quantised state recurs after at least one move of
/// size `quantum` or more (smaller moves are convergence, not cycling).
pub fn br_dynamics<T: Real>(
    start: &Configuration<T>,
    variant: GameVariant<T>,
    options: &DynamicsOptions<T>,
) -> Result<DynamicsTrace<T>> {
    if options.max_iters == 0 {
        return Err(Error::ParamOutOfRange("max_iters must be at least 1".into()));
    }
    if !(options.quantum > T::zero()) {
        return Err(Error::ParamOutOfRange("quantum must be positive".into()));
    }
    variant.check(&start.segment())?;
    let n = start.n();
    let mut config = start.clone();
    let mut steps: Vec<Step<T>> = Vec::new();
    let mut seen: HashMap<(Vec<i64>, usize), usize> = HashMap::new();
    let mut pointer = 0;
    let mut calm = 0;
    let mut evaluations = 0;

    let outcome = loop {
        if evaluations >= options.max_iters {
            break Outcome::BudgetExhausted;
        }
        let turn = match options.schedule {
            Schedule::RoundRobin => pointer,
            Schedule::LargestGain => 0,
        };
        let key = (quantize(config.positions(), options.quantum), turn);
        if let Some(prev) = seen.insert(key, evaluations) {
            let moved = steps
                .iter()
                .rev()
                .take_while(|s| s.iteration >= prev)
                .any(|s| (s.to - s.from).abs() >= options.quantum);
            if moved {
                break Outcome::Cycle {
                    period: evaluations - prev,
                };
            }
        }
        let iteration = evaluations;
        evaluations += 1;

        let br = match options.schedule {
            Schedule::RoundRobin => best_response(pointer, &config, variant)?,
            Schedule::LargestGain => {
                let mut best: Option<BestResponse<T>> = None;
                for player in 0..n {
                    let br = best_response(player, &config, variant)?;
                    if best.is_none_or(|b| br.gain > b.gain) {
                        best = Some(br);
                    }
                }
                best.expect("at least one server")
            }
        };

        if br.gain > options.delta {
            if let Some((next, moves)) = apply(&config, &br, variant, options.delta, iteration)? {
                config = next;
                steps.extend(moves);
                calm = 0;
            }
        } else {
            calm += 1;
            if options.schedule == Schedule::LargestGain || calm >= n {
                break Outcome::Equilibrium;
            }
        }
        pointer = (pointer + 1) % n;
    };

    Ok(DynamicsTrace {
        steps,
        outcome,
        final_configuration: config,
        evaluations,
        states_visited: seen.len(),
    })
}

/// `n` independent uniform positions on `seg`.
pub fn random_configuration<T: Real, R: Rng + ?Sized>(
    n: usize,
    seg: Segment<T>,
    rng: &mut R,
) -> Result<Configuration<T>> {
    let positions = (0..n)
        .map(|_| seg.from_unit(T::from_f64(rng.random::<f64>()).expect("uniform draw")))
        .collect();
    Configuration::new(positions, seg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::line_failure::lf_equilibrium;
    use crate::model::classic_equilibrium;

    fn unit(xs: &[f64]) -> Configuration<f64> {
        Configuration::on_unit(xs.to_vec()).unwrap()
    }

    const CLASSIC: GameVariant<f64> = GameVariant::Classic;

    #[test]
    fn candidates_for_four_server_equilibrium() {
        let c = unit(&[0.25, 0.25, 0.75, 0.75]);
        let cands = candidate_set(3, &c, CLASSIC).unwrap();
        let kinds: Vec<CandidateKind> = cands.iter().map(|c| c.kind).collect();
        assert_eq!(
            kinds,
            vec![
                CandidateKind::SlotInterior { slot: 0 },
                CandidateKind::Approach { server: 0, side: Side::Left },
                CandidateKind::Approach { server: 1, side: Side::Right },
                CandidateKind::SlotInterior { slot: 1 },
                CandidateKind::AttachLeftOf { server: 2 },
                CandidateKind::AttachRightOf { server: 2 },
                CandidateKind::SlotInterior { slot: 2 },
            ]
        );
        assert_eq!(cands[4].position, 0.75);
    }

    #[test]
    fn hinterland_candidates() {
        let lf = GameVariant::LineFailure { r: 0.6 };
        let c = unit(&[0.25, 0.25, 0.75, 0.75]);
        let cands = candidate_set(3, &c, lf).unwrap();
        assert!(!cands
            .iter()
            .any(|c| matches!(c.kind, CandidateKind::HinterlandOptimum { side: Side::Left })));

        let c = unit(&[0.9, 0.95]);
        let cands = candidate_set(1, &c, lf).unwrap();
        let h = cands
            .iter()
            .find(|c| c.kind == CandidateKind::HinterlandOptimum { side: Side::Left })
            .unwrap();
        assert!((h.position - 1.0 / 1.2).abs() < 1e-15);
    }

    #[test]
    fn classic_two_server_best_response() {
        let c = unit(&[0.2, 0.7]);
        let br = best_response(0, &c, CLASSIC).unwrap();
        assert_eq!(br.candidate.kind, CandidateKind::AttachLeftOf { server: 1 });
        assert_eq!(br.payoff, 0.7);
        assert!((br.gain - 0.25).abs() < 1e-15);
    }

    #[test]
    fn line_failure_two_server_best_response() {
        let r = 0.6f64;
        let c = unit(&[0.2, 0.9]);
        let br = best_response(0, &c, GameVariant::LineFailure { r }).unwrap();
        let x = 1.0 / (2.0 * r);
        assert!((br.position() - x).abs() < 1e-15);
        assert!((br.payoff - ((0.9 + x) / 2.0 - r * x * x / 2.0)).abs() < 1e-15);
        assert!((br.payoff - 0.6583).abs() < 1e-4);
    }

    #[test]
    fn nash_checks() {
        assert!(is_nash(&unit(&[0.25, 0.25, 0.75, 0.75]), CLASSIC, 1e-9).unwrap().verdict);
        let report = is_nash(&unit(&[0.3, 0.5, 0.7]), CLASSIC, 1e-9).unwrap();
        assert!(!report.verdict);
        assert!(!report.witnesses.is_empty());
        let r = 0.5f64;
        let five = lf_equilibrium(5, r, None).unwrap();
        let report = is_nash(&five, GameVariant::LineFailure { r }, 1e-9).unwrap();
        assert!(report.verdict, "{report:?}");
        assert!(is_nash(&unit(&[0.5]), CLASSIC, -1.0).is_err());
    }

    #[test]
    fn single_server_optima() {
        let lf = GameVariant::LineFailure { r: 0.5 };
        assert!(is_nash(&unit(&[0.5]), lf, 1e-9).unwrap().verdict);
        assert!(!is_nash(&unit(&[0.3]), lf, 1e-9).unwrap().verdict);
        assert!(is_nash(&unit(&[0.3]), CLASSIC, 1e-9).unwrap().verdict);
        assert!(is_nash(&unit(&[0.3]), GameVariant::PlayerFailure { r: 0.5 }, 1e-9).unwrap().verdict);
    }

    #[test]
    fn grid_oracle_agrees_on_two_servers() {
        let r = 0.6f64;
        let c = unit(&[0.2, 0.9]);
        let (y, p) = grid_best_response_oracle(0, &c, GameVariant::LineFailure { r }, 100_000).unwrap();
        assert!((y - 1.0 / (2.0 * r)).abs() < 2e-5);
        let br = best_response(0, &c, GameVariant::LineFailure { r }).unwrap();
        assert!(br.payoff >= p - 1e-12);
    }

    #[test]
    fn classic_dynamics_pair_at_center() {
        let c = unit(&[0.1, 0.8]);
        let trace = br_dynamics(&c, CLASSIC, &DynamicsOptions::default()).unwrap();
        assert_eq!(trace.outcome, Outcome::Equilibrium);
        let xs = trace.final_configuration.positions();
        assert!((xs[0] - 0.5).abs() < 1e-9 && (xs[1] - 0.5).abs() < 1e-9, "{xs:?}");
    }

    #[test]
    fn line_failure_dynamics_from_classic_equilibrium() {
        let r = 0.5f64;
        let start = classic_equilibrium(4, Segment::unit(), None).unwrap();
        let trace = br_dynamics(&start, GameVariant::LineFailure { r }, &DynamicsOptions::default())
            .unwrap();
        assert_eq!(trace.outcome, Outcome::Equilibrium);
        let target = lf_equilibrium(4, r, None).unwrap();
        for (a, b) in trace.final_configuration.positions().iter().zip(target.positions()) {
            assert!((a - b).abs() < 1e-6, "{:?}", trace.final_configuration);
        }
    }

    #[test]
    fn player_failure_three_servers_never_settle() {
        let pf = GameVariant::PlayerFailure { r: 0.5 };
        let trace = br_dynamics(&unit(&[0.2, 0.5, 0.8]), pf, &DynamicsOptions::default()).unwrap();
        assert_ne!(trace.outcome, Outcome::Equilibrium);
    }

    #[test]
    fn dynamics_are_deterministic() {
        let pf = GameVariant::PlayerFailure { r: 0.3 };
        let c = unit(&[0.05, 0.4, 0.6, 0.61]);
        let opts = DynamicsOptions {
            schedule: Schedule::LargestGain,
            ..DynamicsOptions::default()
        };
        assert_eq!(br_dynamics(&c, pf, &opts).unwrap(), br_dynamics(&c, pf, &opts).unwrap());
    }
}
