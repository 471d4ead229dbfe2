//! Counting equilibria per variant for small `n`.
//!
//! Each cell collects the verified equilibria from two sources: the known
//! constructors and an exhaustive grid scan. The count is infinite when
//! several members of a constructor family verify, or when two equilibria
//! are joined by a segment of equilibria (a lone server whose payoff does not
//! depend on its position).

use std::fmt;

use hotelling_core::{
    classic_equilibrium, grid_scan, is_nash, lf_equilibrium, lf_family_interval, Config,
    Configuration, Segment, Variant,
};

pub const DEFAULT_RESOLUTION: usize = 24;

/// Failure probability used for the line- and player-failure columns.
pub const TABLE_R: f64 = 0.5;

const DELTA: f64 = 1e-9;
const SAME: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Count {
    Finite(usize),
    Infinite,
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Count::Finite(k) => write!(f, "{k}"),
            Count::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Row {
    pub n: usize,
    pub server_crashes: Count,
    pub line_disconnect: Count,
    pub no_faults: Count,
}

pub fn table1(resolution: usize) -> hotelling_core::Result<Vec<Row>> {
    (1..=6)
        .map(|n| {
            Ok(Row {
                n,
                server_crashes: count(n, Variant::PlayerFailure { r: TABLE_R }, resolution)?,
                line_disconnect: count(n, Variant::LineFailure { r: TABLE_R }, resolution)?,
                no_faults: count(n, Variant::Classic, resolution)?,
            })
        })
        .collect()
}

fn same(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= SAME)
}

fn verified(config: &Config, variant: Variant) -> hotelling_core::Result<bool> {
    Ok(is_nash(config, variant, DELTA)?.verdict)
}

/// Constructor outputs for `n`, including a few members of any family.
fn constructed(n: usize, variant: Variant) -> Vec<Config> {
    let unit = Segment::unit();
    let family = |lo: f64, hi: f64| [0.0, 0.5, 0.9].map(|t| lo + t * (hi - lo));
    match variant {
        Variant::Classic if n == 6 => {
            let (lo, hi) = lf_family_interval(6, 0.0).expect("classic family");
            family(lo, hi)
                .into_iter()
                .filter_map(|x| classic_equilibrium(n, unit, Some(x)).ok())
                .collect()
        }
        Variant::Classic => classic_equilibrium(n, unit, None).into_iter().collect(),
        Variant::LineFailure { r } if n >= 6 => {
            let (lo, hi) = lf_family_interval(n, r).expect("line-failure family");
            family(lo, hi)
                .into_iter()
                .filter_map(|x| lf_equilibrium(n, r, Some(x)).ok())
                .collect()
        }
        Variant::LineFailure { r } => lf_equilibrium(n, r, None).into_iter().collect(),
        // No constructor: the player-failure column rests on the scan alone.
        Variant::PlayerFailure { .. } => Vec::new(),
    }
}

fn count(n: usize, variant: Variant, resolution: usize) -> hotelling_core::Result<Count> {
    let mut found: Vec<Vec<f64>> = Vec::new();
    let mut add = |xs: Vec<f64>| {
        if !found.iter().any(|f| same(f, &xs)) {
            found.push(xs);
        }
    };
    let mut members = 0;
    for config in constructed(n, variant) {
        if verified(&config, variant)? {
            members += 1;
            add(config.into_positions());
        }
    }
    // Distinct verified members of a one-parameter family.
    if n >= 6 && members >= 2 {
        return Ok(Count::Infinite);
    }
    let scan = grid_scan(n, variant, Segment::unit(), resolution, DELTA, 0)?;
    for xs in scan.equilibria {
        let mirror: Vec<f64> = xs.iter().rev().map(|x| 1.0 - x).collect();
        add(xs);
        add(mirror);
    }
    if continuum(&found, variant)? {
        Ok(Count::Infinite)
    } else {
        Ok(Count::Finite(found.len()))
    }
}

/// Whether two of the equilibria are joined by a segment of equilibria.
fn continuum(found: &[Vec<f64>], variant: Variant) -> hotelling_core::Result<bool> {
    let head = &found[..found.len().min(8)];
    for (i, a) in head.iter().enumerate() {
        for b in &head[i + 1..] {
            let mut all = true;
            for t in [0.25, 0.5, 0.75] {
                let mid: Vec<f64> = a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect();
                match Configuration::on_unit(mid) {
                    Ok(c) if verified(&c, variant)? => {}
                    _ => {
                        all = false;
                        break;
                    }
                }
            }
            if all {
                return Ok(true);
            }
        }
    }
    Ok(false)
}
