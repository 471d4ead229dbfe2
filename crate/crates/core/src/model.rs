//! Configurations, Voronoi markets and the classic Hotelling game.
//!
//! Paired servers are stored as two entries with the *same* coordinate; the
//! lower index is the left member. All payoffs are the limit of the model in
//! which paired servers sit an infinitesimal distance apart, so the boundary
//! between two co-located servers is their common coordinate and the left
//! member's right half-market (and the right member's left half-market) is
//! empty.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// The market line `[a, b]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Segment<T> {
    pub a: T,
    pub b: T,
}

impl<T: Scalar> Segment<T> {
    pub fn new(a: T, b: T) -> Result<Self> {
        // `!(a < b)` also rejects NaN endpoints.
        if !(a < b) {
            return Err(Error::InvalidSegment {
                a: a.to_f64_lossy(),
                b: b.to_f64_lossy(),
            });
        }
        Ok(Self { a, b })
    }

    pub fn unit() -> Self {
        Self {
            a: T::zero(),
            b: T::one(),
        }
    }

    pub fn len(&self) -> T {
        self.b - self.a
    }

    pub fn is_unit(&self) -> bool {
        self.a == T::zero() && self.b == T::one()
    }

    pub fn contains(&self, x: T) -> bool {
        self.a <= x && x <= self.b
    }

    /// Affine image of `u ∈ [0, 1]`.
    pub fn from_unit(&self, u: T) -> T {
        self.a + self.len() * u
    }

    pub fn to_unit(&self, x: T) -> T {
        (x - self.a) / self.len()
    }

    pub(crate) fn describe(&self) -> (f64, f64) {
        (self.a.to_f64_lossy(), self.b.to_f64_lossy())
    }
}

/// Read access to an ordered list of server coordinates.
///
/// Implemented for slices and for the "one server relocated" views used by the
/// deviation search, so payoffs of a hypothetical move can be evaluated
/// without materialising a new configuration.
pub trait Lineup<T> {
    fn count(&self) -> usize;
    fn at(&self, i: usize) -> T;
}

impl<T: Copy> Lineup<T> for [T] {
    fn count(&self) -> usize {
        self.len()
    }

    fn at(&self, i: usize) -> T {
        self[i]
    }
}

/// Left and right half-markets of server `i` in the classic game on `seg`.
pub fn half_markets_at<T: Scalar, L: Lineup<T> + ?Sized>(
    lineup: &L,
    seg: &Segment<T>,
    i: usize,
) -> (T, T) {
    let x = lineup.at(i);
    let left = if i == 0 {
        x - seg.a
    } else {
        (x - lineup.at(i - 1)) / T::two()
    };
    let right = if i + 1 == lineup.count() {
        seg.b - x
    } else {
        (lineup.at(i + 1) - x) / T::two()
    };
    (left, right)
}

/// Classic payoff (market length) of server `i`.
pub fn classic_payoff_at<T: Scalar, L: Lineup<T> + ?Sized>(
    lineup: &L,
    seg: &Segment<T>,
    i: usize,
) -> T {
    let (left, right) = half_markets_at(lineup, seg, i);
    left + right
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Peripheral,
    Interior,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Pairing {
    Paired,
    Isolated,
    /// Part of a stack of three or more; only reachable through
    /// [`Configuration::packed`].
    Packed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RoleTags {
    pub role: Vec<Role>,
    pub pairing: Vec<Pairing>,
}

/// Ordered server positions on a segment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Configuration<T> {
    positions: Vec<T>,
    segment: Segment<T>,
}

impl<T: Scalar> Configuration<T> {
    /// Sorts and validates raw positions. At most two servers may share a
    /// coordinate.
    pub fn new(positions: Vec<T>, segment: Segment<T>) -> Result<Self> {
        let config = Self::packed(positions, segment)?;
        if let Some((position, count)) = config.stacks().find(|&(_, count)| count > 2) {
            return Err(Error::TripleOverlap {
                position: position.to_f64_lossy(),
                count,
            });
        }
        Ok(config)
    }

    pub fn on_unit(positions: Vec<T>) -> Result<Self> {
        Self::new(positions, Segment::unit())
    }

    /// Like [`Configuration::new`] but accepts stacks of three or more
    /// servers at one coordinate (the limit of an ε-spaced chain). Only the
    /// payoff engines accept such configurations meaningfully.
    pub fn packed(mut positions: Vec<T>, segment: Segment<T>) -> Result<Self> {
        Segment::new(segment.a, segment.b)?;
        if positions.is_empty() {
            return Err(Error::NoServers);
        }
        if let Some(&x) = positions.iter().find(|x| x.partial_cmp(x).is_none()) {
            return Err(Error::NotANumber {
                position: x.to_f64_lossy(),
            });
        }
        positions.sort_by(|p, q| p.partial_cmp(q).expect("NaN filtered above"));
        if let Some((index, &x)) = positions
            .iter()
            .enumerate()
            .find(|(_, &x)| !segment.contains(x))
        {
            let (a, b) = segment.describe();
            return Err(Error::OutOfSegment {
                index,
                position: x.to_f64_lossy(),
                a,
                b,
            });
        }
        Ok(Self { positions, segment })
    }

    /// Builds a configuration from positions that are already sorted and
    /// respect every invariant.
    pub(crate) fn from_sorted(positions: Vec<T>, segment: Segment<T>) -> Self {
        debug_assert!(positions.windows(2).all(|w| w[0] <= w[1]));
        Self { positions, segment }
    }

    pub fn n(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[T] {
        &self.positions
    }

    pub fn segment(&self) -> Segment<T> {
        self.segment
    }

    pub fn into_positions(self) -> Vec<T> {
        self.positions
    }

    /// `(coordinate, multiplicity)` for each distinct coordinate, left to right.
    pub fn stacks(&self) -> impl Iterator<Item = (T, usize)> + '_ {
        let mut i = 0;
        std::iter::from_fn(move || {
            let x = *self.positions.get(i)?;
            let start = i;
            while i < self.positions.len() && self.positions[i] == x {
                i += 1;
            }
            Some((x, i - start))
        })
    }

    fn multiplicity(&self, i: usize) -> usize {
        let x = self.positions[i];
        self.positions.iter().filter(|&&y| y == x).count()
    }

    /// Index of the server co-located with `i`, if `i` is paired.
    pub fn partner(&self, i: usize) -> Option<usize> {
        if self.multiplicity(i) != 2 {
            return None;
        }
        if i > 0 && self.positions[i - 1] == self.positions[i] {
            Some(i - 1)
        } else {
            Some(i + 1)
        }
    }

    pub fn is_paired(&self, i: usize) -> bool {
        self.partner(i).is_some()
    }

    pub fn roles(&self) -> RoleTags {
        let n = self.n();
        let role = (0..n)
            .map(|i| {
                if i == 0 || i + 1 == n {
                    Role::Peripheral
                } else {
                    Role::Interior
                }
            })
            .collect();
        let pairing = (0..n)
            .map(|i| match self.multiplicity(i) {
                1 => Pairing::Isolated,
                2 => Pairing::Paired,
                _ => Pairing::Packed,
            })
            .collect();
        RoleTags { role, pairing }
    }

    /// The same coordinates on another segment.
    pub fn rehomed(&self, segment: Segment<T>) -> Result<Self> {
        Self::packed(self.positions.clone(), segment)
    }

    /// Affine image of this configuration on `target`.
    pub fn rescaled(&self, target: Segment<T>) -> Result<Self> {
        let positions = self
            .positions
            .iter()
            .map(|&x| target.from_unit(self.segment.to_unit(x)))
            .collect();
        Self::packed(positions, target)
    }

    /// Reflection `x ↦ a + b − x`.
    pub fn mirrored(&self) -> Self {
        let Segment { a, b } = self.segment;
        let positions = self.positions.iter().rev().map(|&x| a + b - x).collect();
        Self::from_sorted(positions, self.segment)
    }

    /// Positions of every server except `player`.
    pub fn others(&self, player: usize) -> Vec<T> {
        let mut rest = self.positions.clone();
        rest.remove(player);
        rest
    }
}

/// Same as [`Configuration::new`], as a free function.
pub fn validate<T: Scalar>(positions: Vec<T>, segment: Segment<T>) -> Result<Configuration<T>> {
    Configuration::new(positions, segment)
}

/// Per-server half-market lengths.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Markets<T> {
    pub left: Vec<T>,
    pub right: Vec<T>,
}

impl<T: Scalar> Markets<T> {
    pub fn payoffs(&self) -> Vec<T> {
        self.left
            .iter()
            .zip(&self.right)
            .map(|(&l, &r)| l + r)
            .collect()
    }

    pub fn total(&self) -> T {
        self.payoffs().into_iter().fold(T::zero(), |acc, p| acc + p)
    }

    pub fn whole(&self, i: usize) -> T {
        self.left[i] + self.right[i]
    }

    pub fn larger_half(&self, i: usize) -> T {
        self.left[i].max_of(self.right[i])
    }
}

pub fn classic_markets<T: Scalar>(config: &Configuration<T>) -> Markets<T> {
    let seg = config.segment();
    let (left, right) = (0..config.n())
        .map(|i| half_markets_at(config.positions(), &seg, i))
        .unzip();
    Markets { left, right }
}

pub fn classic_payoffs<T: Scalar>(config: &Configuration<T>) -> Vec<T> {
    classic_markets(config).payoffs()
}

/// Why an equilibrium condition failed.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation<T> {
    UnpairedPeripheral {
        server: usize,
    },
    MarketBelowHalfMarket {
        server: usize,
        market: T,
        other: usize,
        half_market: T,
    },
    UnequalHinterlands {
        left: T,
        right: T,
    },
    InteriorMarketTooSmall {
        server: usize,
        market: T,
        threshold: T,
    },
    InteriorHalfMarketTooLarge {
        server: usize,
        half_market: T,
        threshold: T,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Condition<T> {
    pub name: &'static str,
    pub holds: bool,
    pub violation: Option<Violation<T>>,
}

impl<T> Condition<T> {
    pub(crate) fn check(name: &'static str, violation: Option<Violation<T>>) -> Self {
        Self {
            name,
            holds: violation.is_none(),
            violation,
        }
    }
}

/// Outcome of a closed-form equilibrium characterisation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport<T> {
    pub conditions: Vec<Condition<T>>,
    pub equilibrium: bool,
}

impl<T> ConditionReport<T> {
    pub(crate) fn from_conditions(conditions: Vec<Condition<T>>) -> Self {
        let equilibrium = conditions.iter().all(|c| c.holds);
        Self {
            conditions,
            equilibrium,
        }
    }

    pub fn condition(&self, name: &str) -> Option<&Condition<T>> {
        self.conditions.iter().find(|c| c.name == name)
    }
}

pub(crate) fn unpaired_peripheral<T: Scalar>(config: &Configuration<T>) -> Option<Violation<T>> {
    [0, config.n() - 1]
        .into_iter()
        .find(|&i| !config.is_paired(i))
        .map(|server| Violation::UnpairedPeripheral { server })
}

/// Eaton–Lipsey conditions: peripheral servers are paired, and no server's
/// whole market is smaller than another server's half-market.
pub fn el_check<T: Scalar>(config: &Configuration<T>) -> Result<ConditionReport<T>> {
    let n = config.n();
    if n < 2 {
        return Err(Error::NotApplicable(
            "a single server is in equilibrium anywhere in the classic game".into(),
        ));
    }
    let tol = T::formula_tol();
    let markets = classic_markets(config);

    // Two largest half-markets, so "any other server" is O(1) per server.
    let none = (usize::MAX, T::zero() - T::one());
    let mut top: [(usize, T); 2] = [none, none];
    for j in 0..n {
        let h = markets.larger_half(j);
        if h > top[0].1 {
            top[1] = top[0];
            top[0] = (j, h);
        } else if h > top[1].1 {
            top[1] = (j, h);
        }
    }
    let el2 = (0..n).find_map(|i| {
        let (other, half_market) = if top[0].0 == i { top[1] } else { top[0] };
        let market = markets.whole(i);
        (market + tol < half_market).then_some(Violation::MarketBelowHalfMarket {
            server: i,
            market,
            other,
            half_market,
        })
    });

    Ok(ConditionReport::from_conditions(vec![
        Condition::check("EL1", unpaired_peripheral(config)),
        Condition::check("EL2", el2),
    ]))
}

/// Known classic equilibria, rescaled from `[0, 1]` onto `seg`.
///
/// `family_param` is the hinterland length `x ∈ [1/8, 1/6)` of the six-server
/// family and is ignored otherwise.
pub fn classic_equilibrium<T: Scalar>(
    n: usize,
    seg: Segment<T>,
    family_param: Option<T>,
) -> Result<Configuration<T>> {
    let r = T::ratio;
    let unit: Vec<T> = match n {
        0 => return Err(Error::NoServers),
        1 => vec![T::half()],
        2 => vec![T::half(), T::half()],
        3 => return Err(Error::NoEquilibrium { n }),
        4 => vec![r(1, 4), r(1, 4), r(3, 4), r(3, 4)],
        5 => vec![r(1, 6), r(1, 6), T::half(), r(5, 6), r(5, 6)],
        6 => {
            let x = family_param.ok_or_else(|| {
                Error::ParamOutOfRange("n = 6 needs the hinterland length x".into())
            })?;
            if !(r(1, 8) <= x && x < r(1, 6)) {
                return Err(Error::ParamOutOfRange(format!(
                    "six-server hinterland x = {} not in [1/8, 1/6)",
                    x.to_f64_lossy()
                )));
            }
            let three = T::from_i64(3).expect("literal");
            let one = T::one();
            vec![x, x, three * x, one - three * x, one - x, one - x]
        }
        _ => {
            return Err(Error::NotApplicable(format!(
                "no closed-form constructor for n = {n}; check candidates with el_check"
            )))
        }
    };
    let positions = unit.into_iter().map(|u| seg.from_unit(u)).collect();
    Configuration::new(positions, seg)
}

/// On-disk configuration: `{"segment": [a, b], "positions": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigFile {
    #[serde(default = "unit_segment")]
    pub segment: [f64; 2],
    pub positions: Vec<f64>,
}

fn unit_segment() -> [f64; 2] {
    [0.0, 1.0]
}

impl ConfigFile {
    pub fn to_configuration(&self) -> Result<Configuration<f64>> {
        Configuration::new(self.positions.clone(), self.segment()?)
    }

    pub fn to_packed(&self) -> Result<Configuration<f64>> {
        Configuration::packed(self.positions.clone(), self.segment()?)
    }

    fn segment(&self) -> Result<Segment<f64>> {
        Segment::new(self.segment[0], self.segment[1])
    }
}

impl From<&Configuration<f64>> for ConfigFile {
    fn from(config: &Configuration<f64>) -> Self {
        let seg = config.segment();
        Self {
            segment: [seg.a, seg.b],
            positions: config.positions().to_vec(),
        }
    }
}
