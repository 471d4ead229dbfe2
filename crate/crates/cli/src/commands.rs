use std::fs;

use anyhow::{bail, Context, Result};
use hotelling_core::dynamics::{random_configuration, CandidateKind, Side};
use hotelling_core::line_failure::{
    five_server_hinterland_closed, five_server_printed_root, five_server_residual,
    four_server_hinterland,
};
use hotelling_core::{
    br_dynamics, classic_equilibrium, el_check, is_nash, lf_appendix_tables, lf_condition_check,
    lf_equilibrium, lf_family_interval, lf_payoffs_montecarlo, lf_payoffs_quadrature,
    pf_nonexistence_probe, pf_payoffs_exact, pf_payoffs_montecarlo, Config, ConfigFile,
    DynamicsOptions, Outcome, Schedule, Segment, Variant,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::args::*;
use crate::numfmt::num;
use crate::table1::table1;

/// Exact oracles may differ from the closed forms by rounding only.
const ORACLE_TOL: f64 = 1e-10;

/// Slack for the incumbent-versus-deviator comparison.
const TABLE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    /// A verification came out negative.
    Rejected,
    /// Two exact computations of the same quantity disagree.
    OracleMismatch,
}

impl Status {
    pub fn code(self) -> i32 {
        match self {
            Status::Success => 0,
            Status::Rejected => 2,
            Status::OracleMismatch => 3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Output {
    pub text: String,
    pub status: Status,
    /// Short note for stderr.
    pub note: Option<String>,
}

impl Output {
    fn ok(text: String) -> Self {
        Self {
            text,
            status: Status::Success,
            note: None,
        }
    }
}

pub fn run(command: Command) -> Result<Output> {
    match command {
        Command::Payoff(a) => payoff(a),
        Command::Verify(a) => verify(a),
        Command::Construct(a) => construct(a),
        Command::Dynamics(a) => dynamics(a),
        Command::Sweep(a) => sweep(a),
        Command::Table1(a) => table1_csv(a.resolution).map(Output::ok),
        Command::AppendixA(a) => appendix(a),
        Command::Probe(a) => probe(a),
    }
}

impl GameArgs {
    fn variant(&self) -> Result<Variant> {
        match (self.variant, self.r) {
            (VariantArg::Classic, None) => Ok(Variant::Classic),
            (VariantArg::Classic, Some(_)) => bail!("--r applies to the lf and pf variants only"),
            (_, None) => bail!("the lf and pf variants need --r"),
            (VariantArg::Lf, Some(r)) => Ok(Variant::LineFailure { r }),
            (VariantArg::Pf, Some(r)) => Ok(Variant::PlayerFailure { r }),
        }
    }
}

fn parse_segment(raw: &Option<Vec<f64>>) -> Result<Segment<f64>> {
    Ok(match raw.as_deref() {
        None => Segment::unit(),
        Some(&[a, b]) => Segment::new(a, b)?,
        Some(other) => bail!("--segment takes two numbers, got {}", other.len()),
    })
}

impl ConfigArgs {
    fn given(&self) -> bool {
        !self.positions.is_empty() || self.config.is_some()
    }

    fn file(&self) -> Result<ConfigFile> {
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            return serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", path.display()));
        }
        if self.positions.is_empty() {
            bail!("give the servers with --positions or --config");
        }
        let seg = parse_segment(&self.segment)?;
        Ok(ConfigFile {
            segment: [seg.a, seg.b],
            positions: self.positions.clone(),
        })
    }

    fn load(&self) -> Result<Config> {
        Ok(self.file()?.to_configuration()?)
    }
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(&row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn json_text<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn max_delta(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn segment_pair(seg: Segment<f64>) -> [f64; 2] {
    [seg.a, seg.b]
}

#[derive(Serialize)]
struct Oracle {
    name: &'static str,
    payoffs: Vec<f64>,
    max_delta: f64,
}

#[derive(Serialize)]
struct MonteCarlo {
    seed: u64,
    samples: u64,
    mean: Vec<f64>,
    std_error: Vec<f64>,
    z: Vec<f64>,
}

fn payoff(a: PayoffArgs) -> Result<Output> {
    let variant = a.game.variant()?;
    // Stacks of three or more are allowed here: they are off-equilibrium but
    // their payoffs are well defined.
    let config = a.config.file()?.to_packed()?;
    let payoffs = variant.payoffs(&config)?;
    let seg = config.segment();

    let oracle = if a.oracles {
        match variant {
            Variant::Classic => None,
            Variant::LineFailure { r } => Some(("quadrature", lf_payoffs_quadrature(&config, r)?)),
            Variant::PlayerFailure { r } => Some(("enumeration", pf_payoffs_exact(&config, r)?)),
        }
    } else {
        None
    }
    .map(|(name, values)| Oracle {
        name,
        max_delta: max_delta(&payoffs, &values),
        payoffs: values,
    });

    let mc = match (a.samples, a.seed) {
        (None, _) => None,
        (Some(_), None) => bail!("--samples needs an explicit --seed"),
        (Some(samples), Some(seed)) => {
            let est = match variant {
                Variant::Classic => bail!("the classic game has no randomness to sample"),
                Variant::LineFailure { r } => lf_payoffs_montecarlo(&config, r, samples, seed)?,
                Variant::PlayerFailure { r } => pf_payoffs_montecarlo(&config, r, samples, seed)?,
            };
            let z = est.z_scores(&payoffs, 0.0);
            Some(MonteCarlo {
                seed,
                samples,
                mean: est.mean,
                std_error: est.std_error,
                z,
            })
        }
    };

    let mismatch = oracle
        .as_ref()
        .filter(|o| o.max_delta > ORACLE_TOL * seg.len().max(1.0));
    let (status, note) = match mismatch {
        Some(o) => (
            Status::OracleMismatch,
            Some(format!("{} oracle differs by {}", o.name, num(o.max_delta))),
        ),
        None => (Status::Success, None),
    };

    let text = match a.output.format.unwrap_or(Format::Csv) {
        Format::Json => json_text(&json!({
            "variant": variant,
            "segment": segment_pair(seg),
            "positions": config.positions(),
            "payoffs": payoffs,
            "total": payoffs.iter().sum::<f64>(),
            "oracle": oracle,
            "montecarlo": mc,
        }))?,
        Format::Csv => {
            let mut header = vec!["server", "position", "payoff"];
            if let Some(o) = &oracle {
                header.extend([o.name, "oracle_delta"]);
            }
            if mc.is_some() {
                header.extend(["mc_mean", "mc_se", "mc_z"]);
            }
            let rows = (0..config.n()).map(|i| {
                let mut row = vec![i.to_string(), num(config.positions()[i]), num(payoffs[i])];
                if let Some(o) = &oracle {
                    row.extend([num(o.payoffs[i]), num(o.payoffs[i] - payoffs[i])]);
                }
                if let Some(m) = &mc {
                    row.extend([num(m.mean[i]), num(m.std_error[i]), num(m.z[i])]);
                }
                row
            });
            csv_text(&header, rows)?
        }
    };
    Ok(Output { text, status, note })
}

fn kind_label(kind: &CandidateKind) -> String {
    let side = |s: &Side| match s {
        Side::Left => "left",
        Side::Right => "right",
    };
    match kind {
        CandidateKind::AttachLeftOf { server } => format!("attach_left_of:{server}"),
        CandidateKind::AttachRightOf { server } => format!("attach_right_of:{server}"),
        CandidateKind::Approach { server, side: s } => format!("approach_{}:{server}", side(s)),
        CandidateKind::SlotInterior { slot } => format!("slot_interior:{slot}"),
        CandidateKind::HinterlandOptimum { side: s } => format!("hinterland_optimum:{}", side(s)),
    }
}

fn verify(a: VerifyArgs) -> Result<Output> {
    let variant = a.game.variant()?;
    let config = a.config.load()?;
    let report = is_nash(&config, variant, a.delta)?;
    // The closed-form characterisations cover n >= 2.
    let conditions = match variant {
        _ if config.n() < 2 => None,
        Variant::Classic => Some(el_check(&config)?),
        Variant::LineFailure { r } => Some(lf_condition_check(&config, r)?),
        Variant::PlayerFailure { .. } => None,
    };

    let (status, note) = match &conditions {
        Some(c) if c.equilibrium != report.verdict => (
            Status::OracleMismatch,
            format!(
                "deviation search says {} but the equilibrium conditions say {}",
                report.verdict, c.equilibrium
            ),
        ),
        _ if report.verdict => (Status::Success, "equilibrium".to_string()),
        _ => {
            let w = report.strongest().expect("a rejected configuration has a witness");
            (
                Status::Rejected,
                format!(
                    "not an equilibrium: server {} gains {} by moving to {}",
                    w.player,
                    num(w.gain),
                    num(w.position)
                ),
            )
        }
    };

    let text = match a.output.format.unwrap_or(Format::Json) {
        Format::Json => json_text(&json!({
            "variant": variant,
            "segment": segment_pair(config.segment()),
            "positions": config.positions(),
            "nash": report,
            "conditions": conditions,
        }))?,
        Format::Csv => {
            let head = |r: &hotelling_core::NashReport<f64>| {
                vec![r.verdict.to_string(), num(r.max_gain)]
            };
            let mut rows: Vec<Vec<String>> = report
                .witnesses
                .iter()
                .map(|w| {
                    let mut row = head(&report);
                    row.extend([
                        w.player.to_string(),
                        num(w.position),
                        kind_label(&w.kind),
                        num(w.gain),
                    ]);
                    row
                })
                .collect();
            if rows.is_empty() {
                let mut row = head(&report);
                row.extend(std::iter::repeat_n(String::new(), 4));
                rows.push(row);
            }
            csv_text(&["verdict", "max_gain", "player", "position", "kind", "gain"], rows)?
        }
    };
    Ok(Output {
        text,
        status,
        note: Some(note),
    })
}

fn construct(a: ConstructArgs) -> Result<Output> {
    let variant = a.game.variant()?;
    let seg = parse_segment(&a.segment)?;
    let config = match variant {
        Variant::Classic => classic_equilibrium(a.n, seg, a.family_param)?,
        Variant::LineFailure { r } => {
            if !seg.is_unit() {
                bail!("the line-failure game lives on [0, 1]; drop --segment");
            }
            lf_equilibrium(a.n, r, a.family_param)?
        }
        // One server anywhere, or a pair at the centre; nothing beyond.
        Variant::PlayerFailure { r } => {
            if !(0.0 < r && r < 1.0) {
                bail!("r = {r} not in (0, 1)");
            }
            if a.n >= 3 {
                return Err(hotelling_core::Error::NoEquilibrium { n: a.n }.into());
            }
            classic_equilibrium(a.n, seg, None)?
        }
    };
    let text = match a.output.format.unwrap_or(Format::Json) {
        Format::Json => json_text(&ConfigFile::from(&config))?,
        Format::Csv => csv_text(
            &["server", "position"],
            config
                .positions()
                .iter()
                .enumerate()
                .map(|(i, &x)| vec![i.to_string(), num(x)]),
        )?,
    };
    Ok(Output::ok(text))
}

#[derive(Serialize)]
struct Summary<'a> {
    #[serde(flatten)]
    outcome: Outcome,
    final_positions: &'a [f64],
    steps: usize,
    evaluations: usize,
    states_visited: usize,
}

fn dynamics(a: DynamicsArgs) -> Result<Output> {
    let variant = a.game.variant()?;
    let start = if a.config.given() {
        a.config.load()?
    } else {
        let Some(n) = a.n else {
            bail!("give a start with --positions, --config, or --n with --seed");
        };
        let Some(seed) = a.seed else {
            bail!("a random start needs an explicit --seed");
        };
        let seg = parse_segment(&a.config.segment)?;
        random_configuration(n, seg, &mut ChaCha8Rng::seed_from_u64(seed))?
    };
    let options = DynamicsOptions {
        schedule: match a.schedule {
            ScheduleArg::RoundRobin => Schedule::RoundRobin,
            ScheduleArg::LargestGain => Schedule::LargestGain,
        },
        max_iters: a.max_iters,
        quantum: a.quantum,
        delta: a.delta,
    };
    let trace = br_dynamics(&start, variant, &options)?;

    let mut lines = vec![serde_json::to_string(&json!({
        "start": start.positions(),
        "segment": segment_pair(start.segment()),
        "variant": variant,
        "seed": a.seed,
    }))?];
    for step in &trace.steps {
        lines.push(serde_json::to_string(step)?);
    }
    lines.push(serde_json::to_string(&Summary {
        outcome: trace.outcome,
        final_positions: trace.final_configuration.positions(),
        steps: trace.steps.len(),
        evaluations: trace.evaluations,
        states_visited: trace.states_visited,
    })?);
    Ok(Output::ok(lines.join("\n") + "\n"))
}

fn sweep_points(a: &SweepArgs) -> Result<Vec<f64>> {
    if !(0.0 < a.r_min && a.r_min <= a.r_max && a.r_max < 1.0) {
        bail!("need 0 < r-min <= r-max < 1, got {} and {}", a.r_min, a.r_max);
    }
    if a.r_step.is_nan() || a.r_step <= 0.0 {
        bail!("--r-step must be positive");
    }
    let steps = ((a.r_max - a.r_min) / a.r_step + 1e-9).floor() as usize;
    Ok((0..=steps).map(|k| a.r_min + k as f64 * a.r_step).collect())
}

fn sweep(a: SweepArgs) -> Result<Output> {
    let rs = sweep_points(&a)?;
    let n = a.n;
    if n >= 6 {
        let (c_lo, c_hi) = lf_family_interval(n, 0.0)?;
        let rows = rs
            .iter()
            .map(|&r| {
                let (lo, hi) = lf_family_interval(n, r)?;
                Ok(vec![num(r), num(lo), num(hi), num(c_lo), num(c_hi)])
            })
            .collect::<Result<Vec<_>>>()?;
        let text = csv_text(&["r", "family_lo", "family_hi", "classic_lo", "classic_hi"], rows)?;
        return Ok(Output::ok(text));
    }
    let classic_x = match n {
        1 | 2 => 0.5,
        4 => four_server_hinterland(0.0),
        5 => five_server_hinterland_closed(0.0),
        _ => return Err(hotelling_core::Error::NoEquilibrium { n }.into()),
    };
    let mut header: Vec<String> = ["r", "x", "classic_x"].map(String::from).to_vec();
    header.extend((1..=n).map(|i| format!("x{i}")));
    header.extend((1..=n).map(|i| format!("payoff{i}")));
    if n == 5 {
        header.extend(["residual", "printed_root", "printed_residual"].map(String::from));
    }
    let mut rows = Vec::new();
    for &r in &rs {
        let config = lf_equilibrium(n, r, None)?;
        let payoffs = Variant::LineFailure { r }.payoffs(&config)?;
        let xs = config.positions();
        let mut row = vec![num(r), num(xs[0]), num(classic_x)];
        row.extend(xs.iter().map(|&x| num(x)));
        row.extend(payoffs.iter().map(|&p| num(p)));
        if n == 5 {
            let printed = five_server_printed_root(r);
            row.extend([
                num(five_server_residual(xs[0], r)),
                num(printed),
                num(five_server_residual(printed, r)),
            ]);
        }
        rows.push(row);
    }
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    Ok(Output::ok(csv_text(&header, rows)?))
}

pub fn table1_csv(resolution: usize) -> Result<String> {
    let rows = table1(resolution)?.into_iter().map(|row| {
        vec![
            row.n.to_string(),
            row.server_crashes.to_string(),
            row.line_disconnect.to_string(),
            row.no_faults.to_string(),
        ]
    });
    csv_text(&["n", "server_crashes", "line_disconnect", "no_faults"], rows)
}

/// Deviation points: `points` in `[0, x)` and `points` strictly inside `(x, 1/2)`.
fn appendix_points(x: f64, points: usize) -> Vec<f64> {
    let k = points as f64;
    let hinterland = (0..points).map(|i| x * i as f64 / k);
    let interior = (1..=points).map(|i| x + (0.5 - x) * i as f64 / (k + 1.0));
    hinterland.chain(interior).collect()
}

fn appendix(a: AppendixArgs) -> Result<Output> {
    if !(0.0 < a.r && a.r < 1.0) {
        bail!("r = {} not in (0, 1)", a.r);
    }
    let x = four_server_hinterland(a.r);
    let ys = match a.y {
        Some(y) => vec![y],
        None if a.points == 0 => bail!("--points must be positive"),
        None => appendix_points(x, a.points),
    };
    let mut rows = Vec::new();
    let mut worst: Option<(f64, f64)> = None;
    for y in ys {
        let table = lf_appendix_tables(a.r, y)?;
        let region = serde_json::to_value(table.region)?;
        let region = region.as_str().expect("unit variant").to_string();
        for row in &table.rows {
            let (scenario, lo, hi) = match row.f_interval {
                None => ("no_failure", String::new(), String::new()),
                Some((lo, hi)) => ("cut", num(lo), num(hi)),
            };
            rows.push(vec![
                num(y),
                region.clone(),
                scenario.into(),
                lo,
                hi,
                num(row.prob_mass),
                num(row.payoff_incumbent),
                num(row.payoff_deviator),
            ]);
        }
        let mass: f64 = table.rows.iter().map(|row| row.prob_mass).sum();
        rows.push(vec![
            num(y),
            region,
            "expected".into(),
            String::new(),
            String::new(),
            num(mass),
            num(table.expected_incumbent),
            num(table.expected_deviator),
        ]);
        let d = table.difference();
        if worst.is_none_or(|(_, w)| d < w) {
            worst = Some((y, d));
        }
    }
    let text = csv_text(
        &[
            "y",
            "region",
            "scenario",
            "f_interval_lo",
            "f_interval_hi",
            "prob_mass",
            "payoff_incumbent",
            "payoff_deviator",
        ],
        rows,
    )?;
    let (y, d) = worst.expect("at least one deviation point");
    let (status, note) = if d >= -TABLE_TOL {
        (Status::Success, format!("incumbent ahead everywhere; smallest margin {} at y = {}", num(d), num(y)))
    } else {
        (Status::Rejected, format!("deviator ahead by {} at y = {}", num(-d), num(y)))
    };
    Ok(Output {
        text,
        status,
        note: Some(note),
    })
}

fn probe(a: ProbeArgs) -> Result<Output> {
    let report = pf_nonexistence_probe(a.n, a.r, a.resolution)?;
    let (status, note) = if report.equilibria_found == 0 {
        (
            Status::Success,
            format!("no equilibrium among {} configurations", report.configurations_scanned),
        )
    } else {
        (Status::Rejected, format!("{} grid equilibria found", report.equilibria_found))
    };
    let text = match a.output.format.unwrap_or(Format::Json) {
        Format::Json => json_text(&report)?,
        Format::Csv => csv_text(
            &["config", "player", "deviation", "gain"],
            report.witnesses.iter().map(|w| {
                let config: Vec<String> = w.config.iter().map(|&x| num(x)).collect();
                vec![config.join(" "), w.player.to_string(), num(w.deviation), num(w.gain)]
            }),
        )?,
    };
    Ok(Output {
        text,
        status,
        note: Some(note),
    })
}
