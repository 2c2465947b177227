//! Two-agent simulation with stop-on-sight.
//!
//! Both instruction streams are compiled lazily and merged in absolute time.
//! Every overlapping pair of segments is checked once for first contact; the
//! closest approach of each pair feeds the no-contact report.

use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::algorithms::{almost_universal_rv, DedicatedPrograms, Plugins};
use crate::geometry::{closest_approach, earliest_contact, AgentId, Chirality, Frame, GeometryError, Point, TimedSegment};
use crate::instance::Instance;
use crate::kinematics::{stream_of, Compiler, InstructionStream, KinematicsError, Label, TimedPolyline};
use crate::numerics::{Field, Real, Tolerance};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error("a horizon needs at least one of max_phase, max_abs_time, max_segments")]
    NoHorizon,
    #[error(transparent)]
    Kinematics(#[from] KinematicsError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("{0}")]
    WrongInstance(&'static str),
}

/// Where to stop if no contact happens.
#[derive(Clone, Debug, PartialEq)]
pub struct Horizon<S> {
    /// Last phase of a common algorithm to run.
    pub max_phase: Option<u32>,
    pub max_abs_time: Option<S>,
    /// Per agent.
    pub max_segments: Option<usize>,
}

impl<S> Horizon<S> {
    pub fn phases(n: u32) -> Self {
        Horizon { max_phase: Some(n), max_abs_time: None, max_segments: None }
    }

    pub fn time(t: S) -> Self {
        Horizon { max_phase: None, max_abs_time: Some(t), max_segments: None }
    }

    fn check(&self) -> Result<(), SimError> {
        if self.max_phase.is_none() && self.max_abs_time.is_none() && self.max_segments.is_none() {
            return Err(SimError::NoHorizon);
        }
        Ok(())
    }
}

pub type StreamFactory<S> = Arc<dyn Fn(<S as Field>::Context) -> InstructionStream<S> + Send + Sync>;

/// What the agents run.
#[derive(Clone)]
pub enum Program<S: Field> {
    /// The same unbounded algorithm for both agents.
    Common(StreamFactory<S>),
    /// Instance-specific finite lists; an agent idles at its last position
    /// once its list is done.
    Dedicated(DedicatedPrograms<S>),
}

impl<S: Field> Program<S> {
    pub fn aurv(plugins: Plugins<S>) -> Self {
        Program::Common(Arc::new(move |ctx| almost_universal_rv(ctx, plugins.clone())))
    }

    fn is_dedicated(&self) -> bool {
        matches!(self, Program::Dedicated(_))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome<S> {
    Rendezvous { time: S, pos_a: Point<S>, pos_b: Point<S>, label_a: Label, label_b: Label },
    NoContactWithinHorizon { min_distance: S, argmin_time: S },
}

impl<S> Outcome<S> {
    pub fn is_rendezvous(&self) -> bool {
        matches!(self, Outcome::Rendezvous { .. })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SimStats {
    pub segments_a: usize,
    pub segments_b: usize,
    pub pairs_checked: usize,
}

#[derive(Clone, Debug)]
pub struct RendezvousReport<S> {
    pub outcome: Outcome<S>,
    pub trace_a: TimedPolyline<S>,
    pub trace_b: TimedPolyline<S>,
    pub stats: SimStats,
    /// Not part of the deterministic content.
    pub wall_time: Duration,
}

impl<S: Real> RendezvousReport<S> {
    /// Last simulated instant.
    pub fn end_time(&self) -> S {
        match &self.outcome {
            Outcome::Rendezvous { time, .. } => time.clone(),
            Outcome::NoContactWithinHorizon { .. } => self.trace_a.end_time().min_of(self.trace_b.end_time()),
        }
    }

    /// Equality of everything except the wall time.
    pub fn same_content(&self, other: &Self) -> bool {
        self.outcome == other.outcome
            && self.trace_a == other.trace_a
            && self.trace_b == other.trace_b
            && self.stats == other.stats
    }
}

type SegmentSource<S> = Box<dyn Iterator<Item = Result<TimedSegment<S>, KinematicsError>> + Send>;

struct Cursor<S: Real> {
    agent: AgentId,
    source: SegmentSource<S>,
    idles: bool,
    kept: Vec<TimedSegment<S>>,
    current: Option<TimedSegment<S>>,
    ctx: S::Context,
    origin: Point<S>,
}

impl<S: Real> Cursor<S> {
    fn new(agent: AgentId, frame: &Frame<S>, stream: InstructionStream<S>, horizon: &Horizon<S>, idles: bool) -> Result<Self, SimError> {
        let ctx = frame.speed.context();
        let compiler = Compiler::new(stream, frame.clone(), agent, horizon.max_abs_time.clone())?;
        let cap = horizon.max_segments.unwrap_or(usize::MAX);
        let zero = S::zero(ctx);
        let asleep = (frame.wake_time > zero).then(|| {
            let label = Label::default().with_tag("asleep");
            let end = match &horizon.max_abs_time {
                Some(h) => frame.wake_time.clone().min_of(h.clone()),
                None => frame.wake_time.clone(),
            };
            Ok(TimedSegment::stationary(agent, zero, end, frame.origin.clone(), label))
        });
        Ok(Cursor {
            agent,
            source: Box::new(asleep.into_iter().chain(compiler).take(cap).fuse()),
            idles,
            kept: Vec::new(),
            current: None,
            ctx,
            origin: frame.origin.clone(),
        })
    }

    /// Moves to the next segment, idling up to `until` if the program is
    /// finished and idles. Returns false when nothing follows.
    fn advance(&mut self, until: Option<&S>) -> Result<bool, SimError> {
        if let Some(done) = self.current.take() {
            self.kept.push(done);
        }
        if let Some(seg) = self.source.next() {
            self.current = Some(seg?);
            return Ok(true);
        }
        let (end_time, end_pos) = match self.kept.last() {
            Some(s) => (s.t1.clone(), s.p1.clone()),
            None => (S::zero(self.ctx), self.origin.clone()),
        };
        match until {
            Some(u) if self.idles && *u > end_time => {
                self.current = Some(TimedSegment::stationary(self.agent, end_time, u.clone(), end_pos, Label::default().with_tag("idle")));
                Ok(true)
            }
            _ => Ok(false),
        }
    }
}

fn polyline<S: Real>(agent: AgentId, frame: &Frame<S>, kept: Vec<TimedSegment<S>>) -> TimedPolyline<S> {
    // The pre-wake segment is implied by the frame.
    let segments = kept.into_iter().filter(|s| s.label.tag != "asleep").collect();
    TimedPolyline { agent, frame: frame.clone(), segments }
}

/// Runs both agents until first contact or the horizon.
pub fn simulate<S: Real>(
    instance: &Instance,
    program: &Program<S>,
    horizon: &Horizon<S>,
    tol: &Tolerance<S>,
    ctx: S::Context,
) -> Result<RendezvousReport<S>, SimError> {
    horizon.check()?;
    let started = Instant::now();
    let frame_a = Frame::absolute(ctx);
    let frame_b = instance.frame_b::<S>(ctx);
    let r = S::from_rational(ctx, &instance.r);

    if instance.is_trivially_feasible() {
        return Ok(RendezvousReport {
            outcome: Outcome::Rendezvous {
                time: S::zero(ctx),
                pos_a: frame_a.origin.clone(),
                pos_b: frame_b.origin.clone(),
                label_a: Label::default(),
                label_b: Label::default(),
            },
            trace_a: TimedPolyline { agent: AgentId::A, frame: frame_a, segments: Vec::new() },
            trace_b: TimedPolyline { agent: AgentId::B, frame: frame_b, segments: Vec::new() },
            stats: SimStats::default(),
            wall_time: started.elapsed(),
        });
    }

    let (stream_a, stream_b) = match program {
        Program::Common(factory) => (phase_limited(factory(ctx), horizon.max_phase), phase_limited(factory(ctx), horizon.max_phase)),
        Program::Dedicated(p) => (stream_of(p.a.clone()), stream_of(p.b.clone())),
    };
    let idles = program.is_dedicated();
    let mut a = Cursor::new(AgentId::A, &frame_a, stream_a, horizon, idles)?;
    let mut b = Cursor::new(AgentId::B, &frame_b, stream_b, horizon, idles)?;
    let mut stats = SimStats::default();
    let mut best: Option<(S, S)> = None;

    let mut live = match (a.advance(None)?, b.advance(None)?) {
        (true, true) => true,
        (false, true) => {
            let until = b.current.as_ref().expect("live cursor").t1.clone();
            a.advance(Some(&until))?
        }
        (true, false) => {
            let until = a.current.as_ref().expect("live cursor").t1.clone();
            b.advance(Some(&until))?
        }
        (false, false) => false,
    };
    while live {
        let (sa, sb) = (a.current.as_ref().expect("live cursor"), b.current.as_ref().expect("live cursor"));
        stats.pairs_checked += 1;
        if let Some(time) = earliest_contact(sa, sb, &r, tol)? {
            let outcome = Outcome::Rendezvous {
                pos_a: sa.position_at(&time),
                pos_b: sb.position_at(&time),
                label_a: sa.label,
                label_b: sb.label,
                time: time.clone(),
            };
            for c in [&mut a, &mut b] {
                let seg = c.current.take().expect("live cursor");
                c.kept.push(seg.restrict(&seg.t0.clone(), &time));
            }
            return Ok(finish(outcome, a, b, &frame_a, &frame_b, stats, started));
        }
        let (d, at) = closest_approach(sa, sb)?;
        if best.as_ref().map_or(true, |(m, _)| d < *m) {
            best = Some((d, at));
        }
        let (ta, tb) = (sa.t1.clone(), sb.t1.clone());
        live = if ta < tb {
            a.advance(Some(&tb))?
        } else if tb < ta {
            b.advance(Some(&ta))?
        } else {
            let more_a = a.pull()?;
            let more_b = b.pull()?;
            settle_tie(&mut a, &mut b, more_a, more_b)?
        };
    }
    let (min_distance, argmin_time) = best.unwrap_or_else(|| (instance.initial_distance::<S>(ctx), S::zero(ctx)));
    let outcome = Outcome::NoContactWithinHorizon { min_distance, argmin_time };
    Ok(finish(outcome, a, b, &frame_a, &frame_b, stats, started))
}

impl<S: Real> Cursor<S> {
    /// The next compiled segment, leaving the current one in place.
    fn pull(&mut self) -> Result<Option<TimedSegment<S>>, SimError> {
        match self.source.next() {
            Some(seg) => Ok(Some(seg?)),
            None => Ok(None),
        }
    }
}

/// Both current segments end together: step both, letting a finished
/// dedicated agent idle while the other keeps moving.
fn settle_tie<S: Real>(
    a: &mut Cursor<S>,
    b: &mut Cursor<S>,
    next_a: Option<TimedSegment<S>>,
    next_b: Option<TimedSegment<S>>,
) -> Result<bool, SimError> {
    let step = |c: &mut Cursor<S>, next: Option<TimedSegment<S>>| {
        if let Some(done) = c.current.take() {
            c.kept.push(done);
        }
        c.current = next;
    };
    match (next_a, next_b) {
        (Some(na), Some(nb)) => {
            step(a, Some(na));
            step(b, Some(nb));
            Ok(true)
        }
        (Some(na), None) => {
            let until = na.t1.clone();
            step(a, Some(na));
            idle_or_stop(b, &until)
        }
        (None, Some(nb)) => {
            let until = nb.t1.clone();
            step(b, Some(nb));
            idle_or_stop(a, &until)
        }
        (None, None) => Ok(false),
    }
}

fn idle_or_stop<S: Real>(c: &mut Cursor<S>, until: &S) -> Result<bool, SimError> {
    let done = c.current.take().expect("live cursor");
    let (t, p) = (done.t1.clone(), done.p1.clone());
    c.kept.push(done);
    if c.idles && *until > t {
        c.current = Some(TimedSegment::stationary(c.agent, t, until.clone(), p, Label::default().with_tag("idle")));
        return Ok(true);
    }
    Ok(false)
}

fn finish<S: Real>(
    outcome: Outcome<S>,
    a: Cursor<S>,
    b: Cursor<S>,
    frame_a: &Frame<S>,
    frame_b: &Frame<S>,
    mut stats: SimStats,
    started: Instant,
) -> RendezvousReport<S> {
    let mut kept_a = a.kept;
    let mut kept_b = b.kept;
    // Segments still current when the horizon stopped the sweep are part of the
    // simulated span up to the shorter end.
    kept_a.extend(a.current);
    kept_b.extend(b.current);
    let trace_a = polyline(AgentId::A, frame_a, kept_a);
    let trace_b = polyline(AgentId::B, frame_b, kept_b);
    stats.segments_a = trace_a.segments.len();
    stats.segments_b = trace_b.segments.len();
    RendezvousReport { outcome, trace_a, trace_b, stats, wall_time: started.elapsed() }
}

fn phase_limited<S: Field>(stream: InstructionStream<S>, max_phase: Option<u32>) -> InstructionStream<S> {
    match max_phase {
        None => stream,
        Some(p) => Box::new(stream.take_while(move |r| r.as_ref().map_or(true, |i| i.label.phase <= p))),
    }
}

/// Segments covering `[0, end]`: the trace preceded by the pre-wake rest.
fn from_zero<S: Real>(trace: &TimedPolyline<S>) -> Vec<TimedSegment<S>> {
    let ctx = trace.frame.speed.context();
    let zero = S::zero(ctx);
    let start = trace.segments.first().map(|s| s.t0.clone()).unwrap_or_else(|| trace.frame.wake_time.clone());
    let mut out = Vec::with_capacity(trace.segments.len() + 1);
    if start > zero {
        out.push(TimedSegment::stationary(trace.agent, zero, start, trace.frame.origin.clone(), Label::default().with_tag("asleep")));
    }
    out.extend(trace.segments.iter().cloned());
    out
}

/// Calls `visit` on every pair of segments whose time intervals overlap,
/// in sweep order. Returns the number of pairs.
pub fn overlapping_pairs<S: Real>(
    a: &[TimedSegment<S>],
    b: &[TimedSegment<S>],
    mut visit: impl FnMut(&TimedSegment<S>, &TimedSegment<S>),
) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        if a[i].overlap(&b[j]).is_some() {
            visit(&a[i], &b[j]);
            n += 1;
        }
        let (ta, tb) = (&a[i].t1, &b[j].t1);
        if ta < tb {
            i += 1;
        } else if tb < ta {
            j += 1;
        } else {
            // Zero-length segments at a shared end point still overlap the next one.
            let a_next_touches = a.get(i + 1).is_some_and(|s| s.t1 == *ta);
            let b_next_touches = b.get(j + 1).is_some_and(|s| s.t1 == *tb);
            match (a_next_touches, b_next_touches) {
                (true, false) => i += 1,
                (false, true) => j += 1,
                _ => {
                    i += 1;
                    j += 1;
                }
            }
        }
    }
    n
}

/// Per overlapping pair: the analytic minimum plus `grid` uniform samples.
pub fn min_distance_profile<S: Real>(trace_a: &TimedPolyline<S>, trace_b: &TimedPolyline<S>, grid: usize) -> Vec<(S, S)> {
    let (a, b) = (from_zero(trace_a), from_zero(trace_b));
    let mut out = Vec::new();
    overlapping_pairs(&a, &b, |sa, sb| {
        if let Ok((d, at)) = closest_approach(sa, sb) {
            out.push((at, d));
        }
        let (s0, s1) = sa.overlap(sb).expect("overlapping pair");
        let ctx = s0.context();
        for k in 0..grid {
            let frac = if grid > 1 { S::from_i64(ctx, k as i64) / S::from_i64(ctx, grid as i64 - 1) } else { S::zero(ctx) };
            let s = s0.clone() + (s1.clone() - s0.clone()) * frac;
            out.push((s.clone(), sa.position_at(&s).dist(&sb.position_at(&s))));
        }
    });
    out
}

fn sample_times<S: Real>(from: &S, to: &S, samples: usize, seed: u64) -> Vec<S> {
    let ctx = from.context();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let u = S::from_f64(ctx, rng.gen::<f64>());
            from.clone() + (to.clone() - from.clone()) * u
        })
        .collect()
}

/// Largest deviation from the delayed-mirror identities for a synchronous
/// mirrored instance: B at time z is A at time z − t reflected about the
/// canonical line and shifted along it, and the two projections on the line
/// keep their initial distance.
pub fn mirror_check<S: Real>(
    instance: &Instance,
    report: &RendezvousReport<S>,
    samples: usize,
    seed: u64,
    ctx: S::Context,
) -> Result<S, SimError> {
    if !instance.is_synchronous() || instance.chi != Chirality::Mirrored {
        return Err(SimError::WrongInstance("mirror check needs a synchronous instance with chi = -1"));
    }
    let line = instance.canonical_line::<S>(ctx);
    let start_b = instance.start_b::<S>(ctx);
    let proj_a0 = line.project(&Point::zero(ctx));
    let proj_b0 = line.project(&start_b);
    let shift = proj_b0.clone() - proj_a0.clone();
    let gap = proj_a0.dist(&proj_b0);
    let t = S::from_rational(ctx, &instance.t);
    let end = report.end_time();
    let mut worst = S::zero(ctx);
    if end < t {
        return Ok(worst);
    }
    for z in sample_times(&t, &end, samples, seed) {
        let pa = report.trace_a.position_at(&(z.clone() - t.clone()));
        let pb = report.trace_b.position_at(&z);
        let mirrored = line.reflect(&pa) + shift.clone();
        let dev1 = pb.dist(&mirrored);
        let dev2 = (line.project(&pa).dist(&line.project(&pb)) - gap.clone()).abs();
        worst = worst.max_of(dev1).max_of(dev2);
    }
    Ok(worst)
}

/// Largest deviation from `posB(z) = posA(z − t) + (x, y)` for a synchronous
/// instance with χ = 1 and φ = 0.
pub fn shift_check<S: Real>(
    instance: &Instance,
    report: &RendezvousReport<S>,
    samples: usize,
    seed: u64,
    ctx: S::Context,
) -> Result<S, SimError> {
    if !instance.is_synchronous() || instance.chi != Chirality::Same || !instance.phi.is_zero() {
        return Err(SimError::WrongInstance("shift check needs a synchronous instance with chi = 1 and phi = 0"));
    }
    let offset = instance.start_b::<S>(ctx);
    let t = S::from_rational(ctx, &instance.t);
    let end = report.end_time();
    let mut worst = S::zero(ctx);
    if end < t {
        return Ok(worst);
    }
    for z in sample_times(&t, &end, samples, seed) {
        let pa = report.trace_a.position_at(&(z.clone() - t.clone()));
        let pb = report.trace_b.position_at(&z);
        worst = worst.max_of(pb.dist(&(pa + offset.clone())));
    }
    Ok(worst)
}
