//! Agent-local instructions and their compilation into absolute trajectories.
//!
//! Local speed is one length unit per time unit, so a move of distance `d`
//! takes `d` local time. Directions carry an exact rotation in multiples of π
//! so that rotated searches keep exact durations.

use thiserror::Error;

use crate::geometry::{AgentId, Frame, Point, Rotation, TimedSegment, Vec2};
use crate::numerics::{Field, PiRatio, Real, TrigCache};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KinematicsError {
    #[error("stream ended after {consumed} of {requested} local time units")]
    Exhausted { requested: String, consumed: String },
    #[error("{0} must be nonnegative")]
    Negative(&'static str),
    #[error("horizon {horizon} lies before wake-up time {wake}")]
    HorizonBeforeWake { horizon: String, wake: String },
    #[error("{0}")]
    Procedure(String),
}

/// Where an instruction came from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Label {
    pub phase: u32,
    pub block: u8,
    pub epoch: u64,
    pub step: u64,
    pub tag: &'static str,
}

impl Label {
    pub fn new(phase: u32, block: u8, epoch: u64, tag: &'static str) -> Self {
        Label { phase, block, epoch, step: 0, tag }
    }

    pub fn with_step(self, step: u64) -> Self {
        Label { step, ..self }
    }

    pub fn with_tag(self, tag: &'static str) -> Self {
        Label { tag, ..self }
    }
}

/// A local direction: `R(turn·π) · local`.
#[derive(Clone, Debug, PartialEq)]
pub struct Heading<S> {
    pub turn: PiRatio,
    pub local: Vec2<S>,
}

impl<S: Field> Heading<S> {
    pub fn new(local: Vec2<S>) -> Self {
        Heading { turn: PiRatio::ZERO, local }
    }

    pub fn north(ctx: S::Context) -> Self {
        Heading::new(Vec2::new(S::zero(ctx), S::one(ctx)))
    }

    pub fn south(ctx: S::Context) -> Self {
        Heading::new(Vec2::new(S::zero(ctx), -S::one(ctx)))
    }

    pub fn east(ctx: S::Context) -> Self {
        Heading::new(Vec2::new(S::one(ctx), S::zero(ctx)))
    }

    pub fn west(ctx: S::Context) -> Self {
        Heading::new(Vec2::new(-S::one(ctx), S::zero(ctx)))
    }

    pub fn turned(self, by: PiRatio) -> Self {
        Heading { turn: self.turn + by, local: self.local }
    }

    pub fn reversed(&self) -> Self {
        Heading { turn: self.turn, local: -self.local.clone() }
    }
}

impl<S: Real> Heading<S> {
    /// The direction in the agent's unrotated local coordinates.
    pub fn resolve(&self, cache: &mut TrigCache<S>) -> Vec2<S> {
        if self.turn.is_zero() {
            return self.local.clone();
        }
        Rotation::from_cos_sin(cache.cos_sin(self.turn)).apply(&self.local)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Step<S> {
    Move { heading: Heading<S>, distance: S },
    Wait { duration: S },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Instruction<S> {
    pub step: Step<S>,
    pub label: Label,
}

impl<S: Field> Instruction<S> {
    pub fn go(heading: Heading<S>, distance: S, label: Label) -> Self {
        Instruction { step: Step::Move { heading, distance }, label }
    }

    pub fn wait(duration: S, label: Label) -> Self {
        Instruction { step: Step::Wait { duration }, label }
    }

    /// Local time taken.
    pub fn duration(&self) -> &S {
        match &self.step {
            Step::Move { distance, .. } => distance,
            Step::Wait { duration } => duration,
        }
    }

    pub fn is_move(&self) -> bool {
        matches!(self.step, Step::Move { .. })
    }

    /// The first `d` local time units of this instruction.
    pub fn truncated(&self, d: S) -> Self {
        let step = match &self.step {
            Step::Move { heading, .. } => Step::Move { heading: heading.clone(), distance: d },
            Step::Wait { .. } => Step::Wait { duration: d },
        };
        Instruction { step, label: self.label }
    }

    pub fn relabeled(mut self, label: Label) -> Self {
        self.label = label;
        self
    }

    pub fn validate(&self) -> Result<(), KinematicsError> {
        match &self.step {
            Step::Move { distance, .. } if distance.is_negative() => Err(KinematicsError::Negative("move distance")),
            Step::Wait { duration } if duration.is_negative() => Err(KinematicsError::Negative("wait duration")),
            _ => Ok(()),
        }
    }
}

/// A lazily produced, possibly unbounded instruction sequence.
pub type InstructionStream<S> = Box<dyn Iterator<Item = Result<Instruction<S>, KinematicsError>> + Send>;

pub fn stream_of<S: Field>(list: Vec<Instruction<S>>) -> InstructionStream<S> {
    Box::new(list.into_iter().map(Ok))
}

/// Sum of local durations.
pub fn total_duration<'a, S: Field>(ctx: S::Context, list: impl IntoIterator<Item = &'a Instruction<S>>) -> S {
    list.into_iter().fold(S::zero(ctx), |acc, i| acc + i.duration().clone())
}

/// Cuts consecutive pieces of given local duration off a stream, carrying a
/// partially consumed instruction over to the next piece.
pub struct LocalTimeSlicer<S: Field> {
    stream: InstructionStream<S>,
    carry: Option<Instruction<S>>,
}

impl<S: Field> LocalTimeSlicer<S> {
    pub fn new(stream: InstructionStream<S>) -> Self {
        LocalTimeSlicer { stream, carry: None }
    }

    /// The next instructions, totalling exactly `duration`.
    pub fn take(&mut self, duration: &S) -> Result<Vec<Instruction<S>>, KinematicsError> {
        if duration.is_negative() {
            return Err(KinematicsError::Negative("slice duration"));
        }
        let ctx = duration.context();
        let mut out = Vec::new();
        let mut used = S::zero(ctx);
        while used < *duration {
            let next = match self.carry.take() {
                Some(i) => i,
                None => match self.stream.next() {
                    Some(i) => i?,
                    None => {
                        return Err(KinematicsError::Exhausted {
                            requested: format!("{duration:?}"),
                            consumed: format!("{used:?}"),
                        })
                    }
                },
            };
            next.validate()?;
            let left = duration.clone() - used.clone();
            let d = next.duration().clone();
            if d > left {
                out.push(next.truncated(left.clone()));
                self.carry = Some(next.truncated(d - left.clone()));
                used = used + left;
            } else {
                used = used + d;
                out.push(next);
            }
        }
        Ok(out)
    }
}

/// The prefix of `stream` lasting exactly `duration` local time units, the
/// last move split if needed.
pub fn slice_by_local_time<S: Field>(
    stream: InstructionStream<S>,
    duration: &S,
) -> Result<Vec<Instruction<S>>, KinematicsError> {
    LocalTimeSlicer::new(stream).take(duration)
}

/// Retraces the moves of `path` in reverse, skipping waits.
pub fn backtrack_of<S: Field>(path: &[Instruction<S>]) -> Vec<Instruction<S>> {
    path.iter()
        .rev()
        .filter_map(|i| match &i.step {
            Step::Move { heading, distance } => Some(Instruction::go(heading.reversed(), distance.clone(), i.label)),
            Step::Wait { .. } => None,
        })
        .collect()
}

/// Incremental compiler from a local stream to absolute segments.
///
/// Yields segments starting at `(frame.origin, frame.wake_time)` and stops
/// after the segment that reaches `horizon`, truncated there.
pub struct Compiler<S: Real> {
    stream: InstructionStream<S>,
    frame: Frame<S>,
    agent: AgentId,
    horizon: Option<S>,
    position: Point<S>,
    time: S,
    cache: TrigCache<S>,
    done: bool,
}

impl<S: Real> Compiler<S> {
    pub fn new(
        stream: InstructionStream<S>,
        frame: Frame<S>,
        agent: AgentId,
        horizon: Option<S>,
    ) -> Result<Self, KinematicsError> {
        if let Some(h) = &horizon {
            if *h < frame.wake_time {
                return Err(KinematicsError::HorizonBeforeWake {
                    horizon: format!("{h:?}"),
                    wake: format!("{:?}", frame.wake_time),
                });
            }
        }
        let ctx = frame.speed.context();
        Ok(Compiler {
            stream,
            position: frame.origin.clone(),
            time: frame.wake_time.clone(),
            frame,
            agent,
            horizon,
            cache: TrigCache::new(ctx),
            done: false,
        })
    }

    pub fn frame(&self) -> &Frame<S> {
        &self.frame
    }

    /// Absolute time reached so far.
    pub fn time(&self) -> &S {
        &self.time
    }

    pub fn position(&self) -> &Point<S> {
        &self.position
    }

    fn segment(&mut self, ins: Instruction<S>) -> TimedSegment<S> {
        let t0 = self.time.clone();
        let mut t1 = t0.clone() + ins.duration().clone() * self.frame.time_unit.clone();
        let p0 = self.position.clone();
        let mut p1 = match &ins.step {
            Step::Move { heading, distance } => {
                let dir = self.frame.to_abs_dir(&heading.resolve(&mut self.cache));
                p0.clone() + dir.scale(&(distance.clone() * self.frame.length_unit.clone()))
            }
            Step::Wait { .. } => p0.clone(),
        };
        if let Some(h) = &self.horizon {
            if t1 >= *h {
                self.done = true;
                if t1 > *h {
                    let full = TimedSegment { agent: self.agent, t0: t0.clone(), t1: t1.clone(), p0: p0.clone(), p1, label: ins.label };
                    p1 = full.position_at(h);
                    t1 = h.clone();
                }
            }
        }
        self.time = t1.clone();
        self.position = p1.clone();
        TimedSegment { agent: self.agent, t0, t1, p0, p1, label: ins.label }
    }
}

impl<S: Real> Iterator for Compiler<S> {
    type Item = Result<TimedSegment<S>, KinematicsError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        if let Some(h) = &self.horizon {
            if self.time >= *h {
                self.done = true;
                return None;
            }
        }
        let ins = match self.stream.next()? {
            Ok(i) => i,
            Err(e) => {
                self.done = true;
                return Some(Err(e));
            }
        };
        if let Err(e) = ins.validate() {
            self.done = true;
            return Some(Err(e));
        }
        Some(Ok(self.segment(ins)))
    }
}

/// A finished absolute trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct TimedPolyline<S> {
    pub agent: AgentId,
    pub frame: Frame<S>,
    pub segments: Vec<TimedSegment<S>>,
}

impl<S: Real> TimedPolyline<S> {
    pub fn end_time(&self) -> S {
        self.segments.last().map(|s| s.t1.clone()).unwrap_or_else(|| self.frame.wake_time.clone())
    }

    pub fn end_position(&self) -> Point<S> {
        self.segments.last().map(|s| s.p1.clone()).unwrap_or_else(|| self.frame.origin.clone())
    }

    /// Position at absolute time `s`: the origin before the first segment,
    /// the last position after the end.
    pub fn position_at(&self, s: &S) -> Point<S> {
        let idx = self.segments.partition_point(|seg| seg.t1 < *s);
        match self.segments.get(idx) {
            Some(seg) if seg.t0 <= *s => seg.position_at(s),
            Some(_) if idx == 0 => self.frame.origin.clone(),
            Some(_) => self.segments[idx - 1].p1.clone(),
            None => self.end_position(),
        }
    }

    /// Checks contiguity in time and space and that moving segments travel
    /// at the frame's speed, within `eps`.
    pub fn check_invariants(&self, eps: &S) -> Result<(), String> {
        for (k, pair) in self.segments.windows(2).enumerate() {
            let (a, b) = (&pair[0], &pair[1]);
            if (a.t1.clone() - b.t0.clone()).abs() > *eps || a.p1.dist(&b.p0) > *eps {
                return Err(format!("segments {k} and {} are not contiguous", k + 1));
            }
        }
        for (k, seg) in self.segments.iter().enumerate() {
            if seg.t1 < seg.t0 {
                return Err(format!("segment {k} runs backwards in time"));
            }
            if !seg.is_wait() && !seg.duration().is_zero() {
                let speed = seg.velocity().norm();
                if (speed - self.frame.speed.clone()).abs() > eps.clone() * self.frame.speed.clone().max_of(S::one(eps.context())) {
                    return Err(format!("segment {k} moves at the wrong speed"));
                }
            }
        }
        Ok(())
    }
}

/// Compiles the whole stream up to `horizon`. A finite stream may omit the
/// horizon.
pub fn compile<S: Real>(
    stream: InstructionStream<S>,
    frame: &Frame<S>,
    agent: AgentId,
    horizon: Option<S>,
) -> Result<TimedPolyline<S>, KinematicsError> {
    let compiler = Compiler::new(stream, frame.clone(), agent, horizon)?;
    let segments = compiler.collect::<Result<Vec<_>, _>>()?;
    Ok(TimedPolyline { agent, frame: frame.clone(), segments })
}
