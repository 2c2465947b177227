//! File formats, run configuration, batch runs and the property suites
//! behind the `verify` command.
//!
//! Every scalar on the wire is a decimal string.

use std::fmt;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::algorithms::{lemma4_dedicated, linear_cow_walk, planar_cow_walk, AlgorithmError, PluginRegistry};
use crate::geometry::{earliest_contact, AgentId, Chirality, Frame, Rotation, TimedSegment, Vec2};
use crate::instance::{validate, CoverageKind, Instance, RawInstance, ValidationError};
use crate::kinematics::{compile, stream_of, total_duration, Label, TimedPolyline};
use crate::numerics::{parse_rational, Angle, BigFloat, Field, NumericsError, Precision, Real, Tolerance};
use crate::simulator::{mirror_check, simulate, Horizon, Outcome, Program, RendezvousReport, SimError};

pub const PRECISION_ENV: &str = "RV_PRECISION_BITS";
pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid instance: {0}")]
    Validation(#[from] ValidationError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
    #[error(transparent)]
    Algorithm(#[from] AlgorithmError),
    #[error(transparent)]
    Simulation(#[from] SimError),
}

impl HarnessError {
    /// Whether the error is the user's input rather than a failed run.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, HarnessError::Simulation(SimError::Kinematics(_) | SimError::Geometry(_)))
    }
}

fn read_file(path: &Path) -> Result<String, HarnessError> {
    std::fs::read_to_string(path).map_err(|source| HarnessError::Io { path: path.display().to_string(), source })
}

pub fn parse_instance(text: &str) -> Result<Instance, HarnessError> {
    let raw: RawInstance = serde_json::from_str(text)?;
    Ok(validate(&raw)?)
}

pub fn read_instance(path: &Path) -> Result<Instance, HarnessError> {
    parse_instance(&read_file(path)?)
}

pub fn instance_json(instance: &Instance) -> String {
    serde_json::to_string_pretty(&instance.to_raw()).expect("plain data serializes")
}

/// Precision from `RV_PRECISION_BITS`, or the default.
pub fn precision_from_env() -> Result<Precision, HarnessError> {
    match std::env::var(PRECISION_ENV) {
        Ok(v) => {
            let bits = v.trim().parse::<u32>().map_err(|_| HarnessError::Config(format!("{PRECISION_ENV}={v:?} is not an integer")))?;
            Ok(Precision::new(bits)?)
        }
        Err(_) => Ok(Precision::DEFAULT),
    }
}

#[derive(Debug, Serialize, PartialEq)]
pub struct Classification {
    pub feasible: bool,
    pub verdict: crate::instance::Verdict,
    pub clause: crate::instance::Clause,
    pub coverage: CoverageKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub margin: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase_bound: Option<u32>,
}

pub fn classify(instance: &Instance, prec: Precision) -> Classification {
    let v = instance.classify_feasibility::<BigFloat>(prec);
    let coverage = instance.classify_coverage();
    let phase_bound = match coverage {
        CoverageKind::Type1 => instance.type1_phase_bound::<BigFloat>(prec).ok(),
        CoverageKind::Type3 => instance.type3_phase_bound::<BigFloat>(prec).ok(),
        _ => None,
    };
    Classification {
        feasible: v.is_feasible(),
        verdict: v.verdict,
        clause: v.clause,
        coverage,
        margin: v.margin.as_ref().map(|m| m.to_decimal()),
        phase_bound,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AlgorithmChoice {
    Aurv,
    Lemma4,
    /// The rendezvous stream with the named procedure in both plugin roles.
    Plugin(String),
}

impl FromStr for AlgorithmChoice {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self, HarnessError> {
        match s {
            "aurv" => Ok(AlgorithmChoice::Aurv),
            "lemma4" => Ok(AlgorithmChoice::Lemma4),
            other => match other.strip_prefix("plugin:") {
                Some(name) if !name.is_empty() => Ok(AlgorithmChoice::Plugin(name.to_owned())),
                _ => Err(HarnessError::Config(format!("unknown algorithm {other:?}; expected aurv, lemma4 or plugin:<name>"))),
            },
        }
    }
}

impl fmt::Display for AlgorithmChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlgorithmChoice::Aurv => write!(f, "aurv"),
            AlgorithmChoice::Lemma4 => write!(f, "lemma4"),
            AlgorithmChoice::Plugin(n) => write!(f, "plugin:{n}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self, HarnessError> {
        match s {
            "json" => Ok(ReportFormat::Json),
            "csv" => Ok(ReportFormat::Csv),
            other => Err(HarnessError::Config(format!("unknown report format {other:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub algorithm: AlgorithmChoice,
    pub max_phase: Option<u32>,
    /// Decimal string.
    pub max_time: Option<String>,
    pub max_segments: Option<usize>,
    pub precision: Precision,
    pub eps_abs: Option<String>,
    pub eps_rel: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            algorithm: AlgorithmChoice::Aurv,
            max_phase: None,
            max_time: None,
            max_segments: None,
            precision: Precision::DEFAULT,
            eps_abs: None,
            eps_rel: None,
        }
    }
}

impl RunConfig {
    fn horizon(&self) -> Result<Horizon<BigFloat>, HarnessError> {
        let p = self.precision;
        let max_abs_time = self.max_time.as_deref().map(|s| BigFloat::parse_decimal(p, s)).transpose()?;
        let mut h = Horizon { max_phase: self.max_phase, max_abs_time, max_segments: self.max_segments };
        if h.max_phase.is_none() && h.max_abs_time.is_none() && h.max_segments.is_none() {
            // Dedicated programs are finite; bound them by their own length.
            if self.algorithm == AlgorithmChoice::Lemma4 {
                h.max_segments = Some(1 << 20);
            } else {
                return Err(HarnessError::Simulation(SimError::NoHorizon));
            }
        }
        Ok(h)
    }

    fn tolerance(&self) -> Result<Tolerance<BigFloat>, HarnessError> {
        let p = self.precision;
        let std = Tolerance::<BigFloat>::standard(p);
        let get = |v: &Option<String>, d: BigFloat| -> Result<BigFloat, HarnessError> {
            match v {
                Some(s) => {
                    let x = BigFloat::parse_decimal(p, s)?;
                    if x.is_negative() {
                        return Err(HarnessError::Config(format!("tolerance {s} is negative")));
                    }
                    Ok(x)
                }
                None => Ok(d),
            }
        };
        Ok(Tolerance::new(get(&self.eps_abs, std.eps_abs.clone())?, get(&self.eps_rel, std.eps_rel)?))
    }

    pub fn program(&self, instance: &Instance) -> Result<Program<BigFloat>, HarnessError> {
        let registry = PluginRegistry::<BigFloat>::default();
        Ok(match &self.algorithm {
            AlgorithmChoice::Aurv => Program::aurv(registry.plugins("default")?),
            AlgorithmChoice::Plugin(name) => Program::aurv(registry.plugins(name)?),
            AlgorithmChoice::Lemma4 => Program::Dedicated(lemma4_dedicated(instance, self.precision)?),
        })
    }
}

pub fn run(instance: &Instance, config: &RunConfig) -> Result<RendezvousReport<BigFloat>, HarnessError> {
    let program = config.program(instance)?;
    Ok(simulate(instance, &program, &config.horizon()?, &config.tolerance()?, config.precision)?)
}

fn point_json(p: &Vec2<BigFloat>) -> Value {
    json!([p.x.to_decimal(), p.y.to_decimal()])
}

fn label_json(l: &Label) -> Value {
    json!({ "phase": l.phase, "block": l.block, "epoch": l.epoch, "step": l.step, "tag": l.tag })
}

pub fn report_json(report: &RendezvousReport<BigFloat>) -> Value {
    let stats = json!({
        "segments_a": report.stats.segments_a,
        "segments_b": report.stats.segments_b,
        "pairs_checked": report.stats.pairs_checked,
    });
    match &report.outcome {
        Outcome::Rendezvous { time, pos_a, pos_b, label_a, label_b } => json!({
            "outcome": "Rendezvous",
            "time": time.to_decimal(),
            "pos_a": point_json(pos_a),
            "pos_b": point_json(pos_b),
            "distance": pos_a.dist(pos_b).to_decimal(),
            "label_a": label_json(label_a),
            "label_b": label_json(label_b),
            "stats": stats,
        }),
        Outcome::NoContactWithinHorizon { min_distance, argmin_time } => json!({
            "outcome": "NoContactWithinHorizon",
            "min_distance": min_distance.to_decimal(),
            "argmin_time": argmin_time.to_decimal(),
            "stats": stats,
        }),
    }
}

pub const REPORT_CSV_HEADER: &str = "outcome,time,distance,phase,block,epoch,min_distance,argmin_time,segments_a,segments_b";

pub fn report_csv_row(report: &RendezvousReport<BigFloat>) -> String {
    let s = &report.stats;
    match &report.outcome {
        Outcome::Rendezvous { time, pos_a, pos_b, label_a, .. } => format!(
            "Rendezvous,{},{},{},{},{},,,{},{}",
            time.to_decimal(),
            pos_a.dist(pos_b).to_decimal(),
            label_a.phase,
            label_a.block,
            label_a.epoch,
            s.segments_a,
            s.segments_b
        ),
        Outcome::NoContactWithinHorizon { min_distance, argmin_time } => format!(
            "NoContactWithinHorizon,,,,,,{},{},{},{}",
            min_distance.to_decimal(),
            argmin_time.to_decimal(),
            s.segments_a,
            s.segments_b
        ),
    }
}

fn agent_name(a: AgentId) -> &'static str {
    match a {
        AgentId::A => "A",
        AgentId::B => "B",
    }
}

pub fn trace_json(trace: &TimedPolyline<BigFloat>) -> Value {
    let segments: Vec<Value> = trace
        .segments
        .iter()
        .map(|s| {
            json!({
                "t0": s.t0.to_decimal(), "t1": s.t1.to_decimal(),
                "x0": s.p0.x.to_decimal(), "y0": s.p0.y.to_decimal(),
                "x1": s.p1.x.to_decimal(), "y1": s.p1.y.to_decimal(),
                "phase": s.label.phase, "block": s.label.block, "epoch": s.label.epoch, "tag": s.label.tag,
            })
        })
        .collect();
    json!({ "agent": agent_name(trace.agent), "segments": segments })
}

/// Both traces as a JSON array `[A, B]`.
pub fn traces_json(report: &RendezvousReport<BigFloat>) -> Value {
    json!([trace_json(&report.trace_a), trace_json(&report.trace_b)])
}

pub const BATCH_HEADER: &str = "index,feasible,verdict,coverage,outcome,contact_time,phase,block,min_distance,wall_ms,error";

fn batch_row(index: usize, raw: &Value, config: &RunConfig) -> String {
    let started = Instant::now();
    let result = (|| -> Result<(Classification, RendezvousReport<BigFloat>), HarnessError> {
        let raw: RawInstance = serde_json::from_value(raw.clone())?;
        let instance = validate(&raw)?;
        let class = classify(&instance, config.precision);
        let report = run(&instance, config)?;
        Ok((class, report))
    })();
    let wall = started.elapsed().as_millis();
    match result {
        Ok((c, rep)) => {
            let (outcome, time, phase, block, min) = match &rep.outcome {
                Outcome::Rendezvous { time, label_a, .. } => (
                    "Rendezvous",
                    time.to_decimal(),
                    label_a.phase.to_string(),
                    label_a.block.to_string(),
                    String::new(),
                ),
                Outcome::NoContactWithinHorizon { min_distance, .. } => {
                    ("NoContactWithinHorizon", String::new(), String::new(), String::new(), min_distance.to_decimal())
                }
            };
            format!("{index},{},{:?},{:?},{outcome},{time},{phase},{block},{min},{wall},", c.feasible, c.verdict, c.coverage)
        }
        Err(e) => format!("{index},,,,,,,,,{wall},{}", csv_field(&e.to_string())),
    }
}

fn csv_field(s: &str) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record([s]).expect("in-memory write");
    let mut out = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input");
    out.pop();
    out
}

/// One CSV row per instance, in input order; rows run in parallel.
pub fn batch(instances_json: &str, config: &RunConfig) -> Result<String, HarnessError> {
    let items: Vec<Value> = serde_json::from_str(instances_json)?;
    let rows: Vec<String> = items.par_iter().enumerate().map(|(i, raw)| batch_row(i, raw, config)).collect();
    let mut out = String::from(BATCH_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r);
        out.push('\n');
    }
    Ok(out)
}

pub fn batch_file(path: &Path, config: &RunConfig) -> Result<String, HarnessError> {
    batch(&read_file(path)?, config)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Coverage,
    Mirror,
    ContactOracle,
    Durations,
    RotNorth,
}

impl Suite {
    pub const ALL: [Suite; 5] = [Suite::Coverage, Suite::Mirror, Suite::ContactOracle, Suite::Durations, Suite::RotNorth];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Coverage => "coverage",
            Suite::Mirror => "mirror",
            Suite::ContactOracle => "contact-oracle",
            Suite::Durations => "durations",
            Suite::RotNorth => "rot-north",
        }
    }
}

impl FromStr for Suite {
    type Err = HarnessError;
    fn from_str(s: &str) -> Result<Self, HarnessError> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown suite {s:?}")))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: &'static str,
    pub seed: u64,
    pub checks: usize,
    pub failures: Vec<String>,
}

impl SuiteReport {
    fn new(suite: Suite, seed: u64) -> Self {
        SuiteReport { suite: suite.name(), seed, checks: 0, failures: Vec::new() }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok && self.failures.len() < 20 {
            self.failures.push(what());
        }
    }
}

impl fmt::Display for SuiteReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        writeln!(f, "{status} {} (seed {}, {} checks, {} failures)", self.suite, self.seed, self.checks, self.failures.len())?;
        for c in &self.failures {
            writeln!(f, "  counterexample: {c}")?;
        }
        Ok(())
    }
}

pub fn run_suite(suite: Suite, seed: u64) -> SuiteReport {
    let mut rep = SuiteReport::new(suite, seed);
    match suite {
        Suite::Durations => durations_suite(&mut rep),
        Suite::Coverage => coverage_suite(&mut rep, seed, 1000),
        Suite::Mirror => mirror_suite(&mut rep, seed),
        Suite::ContactOracle => contact_oracle_suite(&mut rep, seed, 1000),
        Suite::RotNorth => rot_north_suite(&mut rep, seed, 100),
    }
    rep
}

fn pow2q(e: u32) -> BigRational {
    <BigRational as Field>::pow2((), i64::from(e))
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(v.into())
}

/// `2^{i+3} − 8`.
pub fn lcw_duration(i: u32) -> BigRational {
    pow2q(i + 3) - int(8)
}

/// `(2^{i+3} − 8)(1 + 2^{2i+1}) + 2^{i+2}`.
pub fn pcw_duration(i: u32) -> BigRational {
    lcw_duration(i) * (int(1) + pow2q(2 * i + 1)) + pow2q(i + 2)
}

fn durations_suite(rep: &mut SuiteReport) {
    for i in 1..=10u32 {
        let (l, p) = (lcw_duration(i), pcw_duration(i));
        rep.check(l < pow2q(i + 3), || format!("LCW({i}) = {l} is not below 2^{}", i + 3));
        rep.check(p <= pow2q(3 * i + 5), || format!("PCW({i}) = {p} exceeds 2^{}", 3 * i + 5));
        let summed_l = linear_cow_walk::<BigRational>((), i).map(|w| total_duration((), &w));
        rep.check(summed_l.as_ref() == Ok(&l), || format!("LCW({i}) sums to {summed_l:?}, closed form {l}"));
        if i <= 5 {
            let summed_p = planar_cow_walk::<BigRational>((), i).map(|w| total_duration((), &w));
            rep.check(summed_p.as_ref() == Ok(&p), || format!("PCW({i}) sums to {summed_p:?}, closed form {p}"));
        }
    }
    rep.check(pcw_duration(1) == int(80), || format!("PCW(1) = {}", pcw_duration(1)));
}

/// Minimum distance from `p` to the polyline, screened in `f64` and
/// confirmed at full precision near the bound.
fn polyline_distance(p: &Vec2<BigFloat>, segs: &[(Vec2<BigFloat>, Vec2<BigFloat>)], fast: &[([f64; 2], [f64; 2])], bound: f64) -> BigFloat {
    let (px, py) = (p.x.to_f64(), p.y.to_f64());
    let mut best = f64::INFINITY;
    for (a, b) in fast {
        best = best.min(seg_dist_f64([px, py], *a, *b));
    }
    let ctx = p.context();
    if best < bound * (1.0 - 1e-9) {
        return BigFloat::from_f64(ctx, best);
    }
    segs.iter().map(|(a, b)| seg_dist(p, a, b)).fold(BigFloat::from_f64(ctx, f64::MAX), |m, d| m.min_of(d))
}

fn seg_dist_f64(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    let t = if len2 == 0.0 { 0.0 } else { ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0) };
    ((ap[0] - t * ab[0]).powi(2) + (ap[1] - t * ab[1]).powi(2)).sqrt()
}

fn seg_dist<S: Real>(p: &Vec2<S>, a: &Vec2<S>, b: &Vec2<S>) -> S {
    let ctx = p.context();
    let ab = b.clone() - a.clone();
    let len2 = ab.norm2();
    let t = if len2.is_zero() {
        S::zero(ctx)
    } else {
        ((p.clone() - a.clone()).dot(&ab) / len2).max_of(S::zero(ctx)).min_of(S::one(ctx))
    };
    (a.clone() + ab.scale(&t)).dist(p)
}

/// Points sampled uniformly in the disk of radius `2^i` are within
/// `√2·2^{-(i+1)} + 2^-64` of the compiled planar walk.
pub fn coverage_suite(rep: &mut SuiteReport, seed: u64, samples: usize) {
    let p = Precision::DEFAULT;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 1..=3u32 {
        let walk = planar_cow_walk::<BigFloat>(p, i).expect("valid index");
        let line = compile(stream_of(walk), &Frame::absolute(p), AgentId::A, None).expect("finite walk compiles");
        let segs: Vec<_> = line.segments.iter().filter(|s| !s.is_wait()).map(|s| (s.p0.clone(), s.p1.clone())).collect();
        let fast: Vec<_> = segs.iter().map(|(a, b)| ([a.x.to_f64(), a.y.to_f64()], [b.x.to_f64(), b.y.to_f64()])).collect();
        let bound = BigFloat::from_i64(p, 2).sqrt() * BigFloat::pow2(p, -(i64::from(i) + 1)) + BigFloat::pow2(p, -64);
        let radius = f64::from(1u32 << i);
        for _ in 0..samples {
            let (u, v): (f64, f64) = (rng.gen(), rng.gen());
            let (rho, theta) = (radius * u.sqrt(), v * std::f64::consts::TAU);
            let pt = Vec2::from_f64(p, rho * theta.cos(), rho * theta.sin());
            let d = polyline_distance(&pt, &segs, &fast, bound.to_f64());
            rep.check(d <= bound, || format!("i={i} point ({}, {}) at distance {}", pt.x.to_decimal(), pt.y.to_decimal(), d.to_decimal()));
        }
    }
}

fn mirror_suite(rep: &mut SuiteReport, seed: u64) {
    let p = Precision::DEFAULT;
    let limit = BigFloat::pow2(p, -40);
    let registry = PluginRegistry::<BigFloat>::default();
    let program = Program::aurv(registry.plugins("default").expect("default plugin"));
    let tol = Tolerance::standard(p);
    let mut cases = vec![(Instance::from_strs("1", "1.5", "0", Angle::zero(), "1", "1", "1", Chirality::Mirrored).expect("valid"), 2)];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..4 {
        let x = format!("{:.3}", rng.gen_range(-3.0..3.0));
        let y = format!("{:.3}", rng.gen_range(0.5..3.0));
        let t = format!("{:.3}", rng.gen_range(0.0..2.0));
        let phi = Angle::pi_ratio(rng.gen_range(0..16), 8).expect("positive denominator");
        if let Ok(i) = Instance::from_strs("0.25", &x, &y, phi, "1", "1", &t, Chirality::Mirrored) {
            cases.push((i, 1));
        }
    }
    for (instance, phases) in cases {
        let raw = serde_json::to_string(&instance.to_raw()).unwrap_or_default();
        match simulate(&instance, &program, &Horizon::phases(phases), &tol, p) {
            Ok(report) => match mirror_check(&instance, &report, 1000, seed, p) {
                Ok(dev) => rep.check(dev <= limit, || format!("{raw}: deviation {}", dev.to_decimal())),
                Err(e) => rep.check(false, || format!("{raw}: {e}")),
            },
            Err(e) => rep.check(false, || format!("{raw}: {e}")),
        }
    }
}

/// First time in `[0, len]` at which two affine motions come within `r`,
/// found by stepping with `step` and bisecting to `2^-20`. Positions are
/// `p + v·s`.
fn stepped_contact(d0: [f64; 2], w: [f64; 2], len: f64, r: f64, step: f64, from: f64) -> Option<f64> {
    let dist = |s: f64| ((d0[0] + w[0] * s).powi(2) + (d0[1] + w[1] * s).powi(2)).sqrt();
    if dist(from) <= r {
        return Some(from);
    }
    let mut prev = from;
    let mut s = from;
    while s < len {
        s = (s + step).min(len);
        if dist(s) <= r {
            let (mut lo, mut hi) = (prev, s);
            while hi - lo > 2f64.powi(-20) {
                let mid = 0.5 * (lo + hi);
                if dist(mid) <= r {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            return Some(hi);
        }
        prev = s;
    }
    None
}

/// The kernel against brute-force stepping on random segment pairs.
pub fn contact_oracle_suite(rep: &mut SuiteReport, seed: u64, pairs: usize) {
    let p = Precision::DEFAULT;
    let tol = Tolerance::standard(p);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let coarse = 2f64.powi(-12);
    let fine = 2f64.powi(-20);
    for k in 0..pairs {
        let len = f64::from(rng.gen_range(1u32..=32)) / 8.0;
        let mut pt = || [f64::from(rng.gen_range(-40i32..=40)) / 8.0, f64::from(rng.gen_range(-40i32..=40)) / 8.0];
        let (a0, a1, b0, b1) = (pt(), pt(), pt(), pt());
        let r = f64::from(rng.gen_range(1u32..=24)) / 8.0;
        let seg = |agent, q0: [f64; 2], q1: [f64; 2]| TimedSegment {
            agent,
            t0: BigFloat::zero(p),
            t1: BigFloat::from_f64(p, len),
            p0: Vec2::from_f64(p, q0[0], q0[1]),
            p1: Vec2::from_f64(p, q1[0], q1[1]),
            label: Label::default(),
        };
        let kernel = earliest_contact(&seg(AgentId::A, a0, a1), &seg(AgentId::B, b0, b1), &BigFloat::from_f64(p, r), &tol)
            .expect("segments overlap")
            .map(|t| t.to_f64());
        let d0 = [b0[0] - a0[0], b0[1] - a0[1]];
        let w = [(b1[0] - b0[0] - a1[0] + a0[0]) / len, (b1[1] - b0[1] - a1[1] + a0[1]) / len];
        let oracle = stepped_contact(d0, w, len, r, coarse, 0.0);
        let case = || format!("pair {k}: A {a0:?}->{a1:?}, B {b0:?}->{b1:?}, len {len}, r {r}");
        match (kernel, oracle) {
            (Some(tk), Some(to)) => rep.check((tk - to).abs() <= 2f64.powi(-10), || format!("{}: kernel {tk}, oracle {to}", case())),
            (None, Some(to)) => rep.check(false, || format!("{}: kernel missed contact at {to}", case())),
            (Some(tk), None) => {
                // A dip between coarse steps: refine around the reported time.
                let refined = stepped_contact(d0, w, len, r * (1.0 + 1e-12), fine, (tk - coarse).max(0.0));
                rep.check(refined.is_some_and(|t| (t - tk).abs() <= 2f64.powi(-10)), || format!("{}: spurious contact at {tk}", case()));
            }
            (None, None) => rep.check(true, String::new),
        }
    }
}

/// Local North in the context rotated by `φ/2 + π/2` points at absolute
/// angle `φ/2 + π` for A and for a mirrored B rotated by φ.
pub fn rot_north_suite(rep: &mut SuiteReport, seed: u64, samples: usize) {
    let p = Precision::DEFAULT;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let limit = BigFloat::pow2(p, -60);
    let two = BigFloat::from_i64(p, 2);
    for _ in 0..samples {
        let text = format!("{:.15}", rng.gen_range(1e-6..std::f64::consts::TAU - 1e-6));
        let phi = BigFloat::from_rational(p, &parse_rational(&text).expect("formatted decimal"));
        let alpha = phi.clone() / two.clone() + BigFloat::pi(p) / two.clone();
        let (sa, ca) = alpha.sin_cos();
        let turn = Rotation::from_cos_sin((ca, sa));
        let (sp, cp) = phi.sin_cos();
        let origin = Vec2::zero(p);
        let one = BigFloat::one(p);
        let a = Frame::absolute(p).rot_context(&turn);
        let b = Frame::agent(origin, Rotation::from_cos_sin((cp, sp)), Chirality::Mirrored, one.clone(), one.clone(), BigFloat::zero(p))
            .rot_context(&turn);
        let target = phi / two.clone() + BigFloat::pi(p);
        let (st, ct) = target.sin_cos();
        let expected = Vec2::new(ct, st);
        let north = Vec2::new(BigFloat::zero(p), one);
        for (who, frame) in [("A", &a), ("B", &b)] {
            let dev = frame.to_abs_dir(&north).dist(&expected);
            rep.check(dev <= limit, || format!("phi = {text}: agent {who} deviates by {}", dev.to_decimal()));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classify_examples() {
        let p = Precision::DEFAULT;
        let s1 = Instance::from_strs("1", "3", "0", Angle::zero(), "1", "1", "2", Chirality::Same).unwrap();
        let v = serde_json::to_value(classify(&s1, p)).unwrap();
        assert_eq!((v["feasible"].clone(), v["coverage"].clone(), v["margin"].clone()), (json!(true), json!("ExceptionS1"), json!("0")));
        let t3 = Instance::from_strs("1", "3", "0", Angle::zero(), "2", "1", "0", Chirality::Same).unwrap();
        let v = serde_json::to_value(classify(&t3, p)).unwrap();
        assert_eq!((v["feasible"].clone(), v["coverage"].clone()), (json!(true), json!("Type3")));
        assert!(v.get("margin").is_none());
    }

    #[test]
    fn instance_round_trip() {
        let text = r#"{"r":"1","x":"3.10","y":"-0.5","phi":{"num":3,"den":4},"tau":"1","v":"1","t":"2.25","chi":-1}"#;
        let i = parse_instance(text).unwrap();
        let again = parse_instance(&instance_json(&i)).unwrap();
        assert_eq!(i, again);
        assert_eq!(classify(&i, Precision::DEFAULT), classify(&again, Precision::DEFAULT));
        let bad = r#"{"r":"1","x":"3","y":"0","phi":{"num":0,"den":1},"tau":"1","v":"1","t":"2","chi":0}"#;
        assert!(matches!(parse_instance(bad), Err(HarnessError::Validation(ValidationError::InvalidChirality(0)))));
        let float = r#"{"r":1.0,"x":"3","y":"0","phi":{"num":0,"den":1},"tau":"1","v":"1","t":"2","chi":1}"#;
        assert!(matches!(parse_instance(float), Err(HarnessError::Json(_))));
    }

    #[test]
    fn algorithm_selector() {
        assert_eq!("aurv".parse::<AlgorithmChoice>().unwrap(), AlgorithmChoice::Aurv);
        assert_eq!("plugin:default".parse::<AlgorithmChoice>().unwrap(), AlgorithmChoice::Plugin("default".into()));
        assert!("plugin:".parse::<AlgorithmChoice>().is_err());
        let i = Instance::from_strs("1", "3", "0", Angle::zero(), "1", "1", "2", Chirality::Same).unwrap();
        let cfg = RunConfig { algorithm: AlgorithmChoice::Lemma4, ..RunConfig::default() };
        assert!(matches!(cfg.program(&i), Err(HarnessError::Algorithm(_))));
        let cfg = RunConfig { algorithm: AlgorithmChoice::Plugin("nope".into()), max_phase: Some(1), ..RunConfig::default() };
        assert!(matches!(run(&i, &cfg), Err(HarnessError::Algorithm(AlgorithmError::UnknownPlugin(_)))));
    }

    #[test]
    fn batch_examples() {
        let cfg = RunConfig { max_phase: Some(1), ..RunConfig::default() };
        assert_eq!(batch("[]", &cfg).unwrap(), format!("{BATCH_HEADER}\n"));
        let one = r#"{"r":"1","x":"3","y":"0","phi":{"num":0,"den":1},"tau":"1","v":"1","t":"1","chi":1}"#;
        let bad = r#"{"r":"0","x":"3","y":"0","phi":{"num":0,"den":1},"tau":"1","v":"1","t":"1","chi":1}"#;
        let out = batch(&format!("[{one},{bad},{one}]"), &cfg).unwrap();
        let rows: Vec<_> = out.lines().collect();
        assert_eq!(rows.len(), 4);
        assert!(rows[2].starts_with("1,") && rows[2].contains("radius"));
        let strip = |r: &str| r.split(',').skip(1).take(8).collect::<Vec<_>>().join(",");
        assert_eq!(strip(rows[1]), strip(rows[3]));
    }

    #[test]
    fn quick_suites_pass() {
        for s in [Suite::Durations, Suite::RotNorth] {
            let r = run_suite(s, DEFAULT_SEED);
            assert!(r.passed(), "{r}");
        }
        let mut r = SuiteReport::new(Suite::ContactOracle, 3);
        contact_oracle_suite(&mut r, 3, 100);
        assert!(r.passed(), "{r}");
        let mut r = SuiteReport::new(Suite::Coverage, 3);
        coverage_suite(&mut r, 3, 50);
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn suite_names_parse() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("speed".parse::<Suite>().is_err());
    }
}
