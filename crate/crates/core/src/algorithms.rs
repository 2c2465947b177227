//! Search procedures and the phase-structured rendezvous stream.

use std::collections::BTreeMap;
use std::iter;
use std::sync::Arc;

use thiserror::Error;

use crate::geometry::{Frame, Vec2};
use crate::instance::Instance;
use crate::kinematics::{
    backtrack_of, Heading, Instruction, InstructionStream, KinematicsError, Label, LocalTimeSlicer,
};
use crate::numerics::{Angle, Field, PiRatio, Real};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgorithmError {
    #[error("cow-walk index must be at least 1, got {0}")]
    InvalidIndex(u32),
    #[error("{0}")]
    WrongInstance(&'static str),
    #[error("no solo procedure registered as {0:?}")]
    UnknownPlugin(String),
}

fn lcw_iter<S: Field>(ctx: S::Context, i: u32, turn: PiRatio, label: Label) -> impl Iterator<Item = Instruction<S>> {
    let label = label.with_tag("lcw");
    (1..=i).flat_map(move |j| {
        let d = S::pow2(ctx, i64::from(j));
        [
            Instruction::go(Heading::east(ctx).turned(turn), d.clone(), label),
            Instruction::go(Heading::west(ctx).turned(turn), d.clone() + d.clone(), label),
            Instruction::go(Heading::east(ctx).turned(turn), d, label),
        ]
    })
}

fn pcw_iter<S: Field>(ctx: S::Context, i: u32, turn: PiRatio, label: Label) -> impl Iterator<Item = Instruction<S>> {
    let shift = label.with_tag("pcw-shift");
    let rows = 1u64 << (2 * i);
    let sweep = move |up: bool| {
        let (out, back) = if up { (Heading::north(ctx), Heading::south(ctx)) } else { (Heading::south(ctx), Heading::north(ctx)) };
        (0..rows)
            .flat_map(move |_| {
                iter::once(Instruction::go(out.clone().turned(turn), S::pow2(ctx, -i64::from(i)), shift))
                    .chain(lcw_iter(ctx, i, turn, label))
            })
            .chain(iter::once(Instruction::go(back.turned(turn), S::pow2(ctx, i64::from(i)), shift)))
    };
    lcw_iter(ctx, i, turn, label).chain(sweep(true)).chain(sweep(false))
}

pub fn linear_cow_walk<S: Field>(ctx: S::Context, i: u32) -> Result<Vec<Instruction<S>>, AlgorithmError> {
    check_index(i)?;
    Ok(lcw_iter(ctx, i, PiRatio::ZERO, Label::default()).collect())
}

pub fn planar_cow_walk<S: Field>(ctx: S::Context, i: u32) -> Result<Vec<Instruction<S>>, AlgorithmError> {
    check_index(i)?;
    Ok(planar_cow_walk_iter(ctx, i, PiRatio::ZERO, Label::default())?.collect())
}

/// Lazy form of [`planar_cow_walk`] in the context rotated by `turn`.
pub fn planar_cow_walk_iter<S: Field>(
    ctx: S::Context,
    i: u32,
    turn: PiRatio,
    label: Label,
) -> Result<impl Iterator<Item = Instruction<S>>, AlgorithmError> {
    check_index(i)?;
    Ok(pcw_iter(ctx, i, turn, label))
}

fn check_index(i: u32) -> Result<(), AlgorithmError> {
    if i == 0 || i > 30 {
        return Err(AlgorithmError::InvalidIndex(i));
    }
    Ok(())
}

/// An externally supplied solo procedure.
///
/// Implementations must be deterministic, parameterless and unbounded.
pub trait SoloProcedure<S: Field>: Send + Sync {
    fn name(&self) -> &str;
    fn generate(&self, ctx: S::Context) -> InstructionStream<S>;
    /// Guaranteed rendezvous time for the instance class, used only to
    /// report phase bounds.
    fn declared_delta(&self, _ctx: S::Context) -> Option<S> {
        None
    }
    fn guarantee_note(&self) -> &str;
}

/// Traces the unit square forever, waiting one unit after each lap.
#[derive(Clone, Copy, Debug, Default)]
pub struct UnitSquare;

impl<S: Field> SoloProcedure<S> for UnitSquare {
    fn name(&self) -> &str {
        "default"
    }

    fn generate(&self, ctx: S::Context) -> InstructionStream<S> {
        let label = Label::default().with_tag("unit-square");
        let lap = move || {
            let one = S::one(ctx);
            [
                Instruction::go(Heading::east(ctx), one.clone(), label),
                Instruction::go(Heading::north(ctx), one.clone(), label),
                Instruction::go(Heading::west(ctx), one.clone(), label),
                Instruction::go(Heading::south(ctx), one.clone(), label),
                Instruction::wait(one, label),
            ]
        };
        Box::new(iter::repeat_with(lap).flatten().map(Ok))
    }

    fn guarantee_note(&self) -> &str {
        "placeholder; provides no rendezvous guarantee for any instance class"
    }
}

/// The two procedures the rendezvous stream delegates to.
#[derive(Clone)]
pub struct Plugins<S: Field> {
    pub latecomers: Arc<dyn SoloProcedure<S>>,
    pub cgkk: Arc<dyn SoloProcedure<S>>,
}

pub fn default_plugins<S: Field>() -> Plugins<S> {
    Plugins { latecomers: Arc::new(UnitSquare), cgkk: Arc::new(UnitSquare) }
}

/// Solo procedures selectable by name.
pub struct PluginRegistry<S: Field> {
    entries: BTreeMap<String, Arc<dyn SoloProcedure<S>>>,
}

impl<S: Field> Default for PluginRegistry<S> {
    fn default() -> Self {
        let mut r = PluginRegistry { entries: BTreeMap::new() };
        r.register(Arc::new(UnitSquare));
        r
    }
}

impl<S: Field> PluginRegistry<S> {
    pub fn register(&mut self, p: Arc<dyn SoloProcedure<S>>) {
        self.entries.insert(p.name().to_owned(), p);
    }

    pub fn get(&self, name: &str) -> Result<Arc<dyn SoloProcedure<S>>, AlgorithmError> {
        self.entries.get(name).cloned().ok_or_else(|| AlgorithmError::UnknownPlugin(name.to_owned()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// The same procedure in both roles.
    pub fn plugins(&self, name: &str) -> Result<Plugins<S>, AlgorithmError> {
        let p = self.get(name)?;
        Ok(Plugins { latecomers: p.clone(), cgkk: p })
    }
}

fn numbered<S: Field>(it: impl Iterator<Item = Instruction<S>>) -> impl Iterator<Item = Instruction<S>> {
    it.enumerate().map(|(k, ins)| {
        let label = ins.label.with_step(k as u64);
        ins.relabeled(label)
    })
}

fn deferred<S: Field, F>(build: F) -> InstructionStream<S>
where
    F: FnOnce() -> Result<Vec<Instruction<S>>, KinematicsError> + Send + 'static,
{
    Box::new(iter::once(build).flat_map(|build| -> Box<dyn Iterator<Item = _> + Send> {
        match build() {
            Ok(list) => Box::new(list.into_iter().map(Ok)),
            Err(e) => Box::new(iter::once(Err(e))),
        }
    }))
}

fn relabel_all<S: Field>(list: Vec<Instruction<S>>, label: Label) -> impl Iterator<Item = Instruction<S>> {
    list.into_iter().map(move |ins| ins.relabeled(label))
}

fn block2<S: Field>(ctx: S::Context, i: u32, plugin: Arc<dyn SoloProcedure<S>>) -> Result<Vec<Instruction<S>>, KinematicsError> {
    let label = Label::new(i, 2, 0, "wait");
    let span = S::pow2(ctx, i64::from(i));
    let path = LocalTimeSlicer::new(plugin.generate(ctx)).take(&span)?;
    let back = backtrack_of(&path);
    let out = iter::once(Instruction::wait(span, label))
        .chain(relabel_all(path, label.with_tag("latecomers")))
        .chain(relabel_all(back, label.with_tag("backtrack")));
    Ok(numbered(out).collect())
}

fn block4<S: Field>(ctx: S::Context, i: u32, plugin: Arc<dyn SoloProcedure<S>>) -> Result<Vec<Instruction<S>>, KinematicsError> {
    let chunk = S::pow2(ctx, -i64::from(i));
    let pause = S::pow2(ctx, i64::from(i));
    let mut slicer = LocalTimeSlicer::new(plugin.generate(ctx));
    let mut out = Vec::new();
    let mut motion = Vec::new();
    for k in 1..=(1u64 << (2 * i)) {
        let label = Label::new(i, 4, k, "cgkk");
        let piece = slicer.take(&chunk)?;
        motion.extend(piece.iter().cloned());
        out.extend(relabel_all(piece, label));
        out.push(Instruction::wait(pause.clone(), label.with_tag("cgkk-wait")));
    }
    out.extend(relabel_all(backtrack_of(&motion), Label::new(i, 4, 0, "backtrack")));
    Ok(numbered(out.into_iter()).collect())
}

/// One phase of the rendezvous stream, lazily expanded.
pub fn aurv_phase<S: Field>(ctx: S::Context, i: u32, plugins: &Plugins<S>) -> Result<InstructionStream<S>, AlgorithmError> {
    check_index(i)?;
    let epochs = 1u64 << (i + 1);
    let block1 = (1..=epochs).flat_map(move |j| {
        let turn = PiRatio::new(j as i64, 1i64 << i).expect("positive denominator");
        numbered(pcw_iter(ctx, i, turn, Label::new(i, 1, j, "lcw")))
    });
    let wait3 = Label::new(i, 3, 0, "wait");
    let block3 = iter::once(Instruction::wait(S::pow2(ctx, 15 * i64::from(i) * i64::from(i)), wait3))
        .chain(pcw_iter(ctx, i, PiRatio::ZERO, Label::new(i, 3, 0, "lcw")));
    let (late, cgkk) = (plugins.latecomers.clone(), plugins.cgkk.clone());
    let stream = block1
        .map(Ok)
        .chain(deferred(move || block2(ctx, i, late)))
        .chain(numbered(block3).map(Ok))
        .chain(deferred(move || block4(ctx, i, cgkk)));
    Ok(Box::new(stream))
}

/// The unbounded rendezvous stream: phases 1, 2, 3, … in order.
pub fn almost_universal_rv<S: Field>(ctx: S::Context, plugins: Plugins<S>) -> InstructionStream<S> {
    Box::new((1u32..).flat_map(move |i| -> InstructionStream<S> {
        match aurv_phase(ctx, i, &plugins) {
            Ok(s) => s,
            Err(e) => Box::new(iter::once(Err(KinematicsError::Procedure(e.to_string())))),
        }
    }))
}

/// Per-agent instruction lists of an instance-specific algorithm.
#[derive(Clone, Debug, PartialEq)]
pub struct DedicatedPrograms<S> {
    pub a: Vec<Instruction<S>>,
    pub b: Vec<Instruction<S>>,
}

/// Local North of the context rotated by half of φ plus a quarter turn.
fn half_turn_north<S: Real>(phi: &Angle, ctx: S::Context) -> Vec2<S> {
    let (c, s) = match phi.as_pi_ratio() {
        Some(p) => S::cos_sin_pi(ctx, p.half() + PiRatio::new(1, 2).expect("positive denominator")),
        None => {
            let alpha = phi.radians::<S>(ctx) / S::from_i64(ctx, 2) + S::pi(ctx) / S::from_i64(ctx, 2);
            let (s, c) = alpha.sin_cos();
            (c, s)
        }
    };
    // R(α)·(0, 1)
    Vec2::new(-s, c)
}

fn lemma4_program<S: Real>(instance: &Instance, frame: &Frame<S>, ctx: S::Context) -> Vec<Instruction<S>> {
    let line = instance.canonical_line::<S>(ctx);
    let to_line = line.project(&frame.origin) - frame.origin.clone();
    let local = frame.to_local_dir(&to_line).scale(&(S::one(ctx) / frame.length_unit.clone()));
    let dist = local.norm();
    let approach = if dist.is_zero() { Heading::east(ctx) } else { Heading::new(local.scale(&(S::one(ctx) / dist.clone()))) };
    let north = Heading::new(half_turn_north::<S>(&instance.phi, ctx));
    let t = S::from_rational(ctx, &instance.t);
    vec![
        Instruction::go(approach, dist, Label::new(0, 0, 0, "lemma4-approach").with_step(0)),
        Instruction::go(north.clone(), t.clone(), Label::new(0, 0, 0, "lemma4-north").with_step(1)),
        Instruction::go(north.reversed(), t, Label::new(0, 0, 0, "lemma4-south").with_step(2)),
    ]
}

/// The instance-specific algorithm for synchronous mirrored instances whose
/// delay is at least the projected gap minus the radius. Each agent's list
/// comes from the same procedure applied to its own frame.
pub fn lemma4_dedicated<S: Real>(instance: &Instance, ctx: S::Context) -> Result<DedicatedPrograms<S>, AlgorithmError> {
    if !instance.is_synchronous() || instance.chi != crate::geometry::Chirality::Mirrored {
        return Err(AlgorithmError::WrongInstance("requires a synchronous instance with chi = -1"));
    }
    if instance.delay_vs_projected_gap() == std::cmp::Ordering::Less {
        return Err(AlgorithmError::WrongInstance("requires t >= dist(proj_A, proj_B) - r"));
    }
    Ok(DedicatedPrograms {
        a: lemma4_program(instance, &Frame::absolute(ctx), ctx),
        b: lemma4_program(instance, &instance.frame_b::<S>(ctx), ctx),
    })
}
