//! Planar primitives, agent frames, the canonical line and the first-contact
//! kernel for two points moving affinely in time.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::instance::Instance;
use crate::kinematics::Label;
use crate::numerics::{Angle, Field, Real, Tolerance};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeometryError {
    #[error("segments do not overlap in time ([{a0}, {a1}] vs [{b0}, {b1}])")]
    NoOverlap { a0: String, a1: String, b0: String, b1: String },
}

/// A point or displacement in the absolute frame (agent A's system).
#[derive(Clone, Debug, PartialEq)]
pub struct Vec2<S> {
    pub x: S,
    pub y: S,
}

pub type Point<S> = Vec2<S>;

impl<S: Field> Vec2<S> {
    pub fn new(x: S, y: S) -> Self {
        Vec2 { x, y }
    }

    pub fn zero(ctx: S::Context) -> Self {
        Vec2 { x: S::zero(ctx), y: S::zero(ctx) }
    }

    pub fn from_f64(ctx: S::Context, x: f64, y: f64) -> Self {
        Vec2 { x: S::from_f64(ctx, x), y: S::from_f64(ctx, y) }
    }

    pub fn dot(&self, other: &Self) -> S {
        self.x.clone() * other.x.clone() + self.y.clone() * other.y.clone()
    }

    pub fn norm2(&self) -> S {
        self.dot(self)
    }

    pub fn scale(&self, k: &S) -> Self {
        Vec2 { x: self.x.clone() * k.clone(), y: self.y.clone() * k.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    pub fn context(&self) -> S::Context {
        self.x.context()
    }
}

impl<S: Real> Vec2<S> {
    pub fn norm(&self) -> S {
        self.norm2().sqrt()
    }

    pub fn dist(&self, other: &Self) -> S {
        (self.clone() - other.clone()).norm()
    }
}

impl<S: Field> Add for Vec2<S> {
    type Output = Vec2<S>;
    fn add(self, o: Vec2<S>) -> Vec2<S> {
        Vec2 { x: self.x + o.x, y: self.y + o.y }
    }
}

impl<S: Field> Sub for Vec2<S> {
    type Output = Vec2<S>;
    fn sub(self, o: Vec2<S>) -> Vec2<S> {
        Vec2 { x: self.x - o.x, y: self.y - o.y }
    }
}

impl<S: Field> Neg for Vec2<S> {
    type Output = Vec2<S>;
    fn neg(self) -> Vec2<S> {
        Vec2 { x: -self.x, y: -self.y }
    }
}

impl<S: Field> Mul<S> for Vec2<S> {
    type Output = Vec2<S>;
    fn mul(self, k: S) -> Vec2<S> {
        Vec2 { x: self.x * k.clone(), y: self.y * k }
    }
}

/// Handedness of an agent's system relative to agent A's.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "i64")]
pub enum Chirality {
    Same,
    Mirrored,
}

impl Chirality {
    pub fn sign(self) -> i64 {
        match self {
            Chirality::Same => 1,
            Chirality::Mirrored => -1,
        }
    }
}

impl TryFrom<i64> for Chirality {
    type Error = String;
    fn try_from(v: i64) -> Result<Self, String> {
        match v {
            1 => Ok(Chirality::Same),
            -1 => Ok(Chirality::Mirrored),
            other => Err(format!("chirality must be 1 or -1, got {other}")),
        }
    }
}

impl From<Chirality> for i64 {
    fn from(c: Chirality) -> i64 {
        c.sign()
    }
}

/// Counterclockwise rotation stored as its cosine and sine.
#[derive(Clone, Debug, PartialEq)]
pub struct Rotation<S> {
    pub cos: S,
    pub sin: S,
}

impl<S: Field> Rotation<S> {
    pub fn identity(ctx: S::Context) -> Self {
        Rotation { cos: S::one(ctx), sin: S::zero(ctx) }
    }

    pub fn from_cos_sin((cos, sin): (S, S)) -> Self {
        Rotation { cos, sin }
    }

    pub fn apply(&self, v: &Vec2<S>) -> Vec2<S> {
        Vec2 {
            x: self.cos.clone() * v.x.clone() - self.sin.clone() * v.y.clone(),
            y: self.sin.clone() * v.x.clone() + self.cos.clone() * v.y.clone(),
        }
    }

    /// `self ∘ other`: rotate by `other` first.
    pub fn then(&self, other: &Rotation<S>) -> Rotation<S> {
        Rotation {
            cos: self.cos.clone() * other.cos.clone() - self.sin.clone() * other.sin.clone(),
            sin: self.sin.clone() * other.cos.clone() + self.cos.clone() * other.sin.clone(),
        }
    }

    pub fn inverse(&self) -> Rotation<S> {
        Rotation { cos: self.cos.clone(), sin: -self.sin.clone() }
    }
}

impl<S: Real> Rotation<S> {
    pub fn from_angle(angle: &Angle, ctx: S::Context) -> Self {
        Rotation::from_cos_sin(angle.cos_sin(ctx))
    }
}

/// An agent's private coordinate system expressed in absolute terms.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame<S> {
    pub origin: Point<S>,
    /// Rotation of the local x-axis relative to the absolute one.
    pub rotation: Rotation<S>,
    pub chi: Chirality,
    /// Absolute length of one local length unit (`time_unit · speed`).
    pub length_unit: S,
    /// Absolute duration of one local time unit.
    pub time_unit: S,
    /// Absolute time at which the agent wakes up.
    pub wake_time: S,
    /// Absolute distance per absolute time while moving.
    pub speed: S,
}

impl<S: Field> Frame<S> {
    /// Agent A's frame: the absolute one.
    pub fn absolute(ctx: S::Context) -> Self {
        Frame {
            origin: Vec2::zero(ctx),
            rotation: Rotation::identity(ctx),
            chi: Chirality::Same,
            length_unit: S::one(ctx),
            time_unit: S::one(ctx),
            wake_time: S::zero(ctx),
            speed: S::one(ctx),
        }
    }

    pub fn agent(
        origin: Point<S>,
        rotation: Rotation<S>,
        chi: Chirality,
        time_unit: S,
        speed: S,
        wake_time: S,
    ) -> Self {
        Frame {
            origin,
            rotation,
            chi,
            length_unit: time_unit.clone() * speed.clone(),
            time_unit,
            wake_time,
            speed,
        }
    }

    /// `R(φ) · diag(1, χ) · local`.
    pub fn to_abs_dir(&self, local: &Vec2<S>) -> Vec2<S> {
        let mirrored = match self.chi {
            Chirality::Same => local.clone(),
            Chirality::Mirrored => Vec2 { x: local.x.clone(), y: -local.y.clone() },
        };
        self.rotation.apply(&mirrored)
    }

    /// Inverse of [`Frame::to_abs_dir`].
    pub fn to_local_dir(&self, abs: &Vec2<S>) -> Vec2<S> {
        let v = self.rotation.inverse().apply(abs);
        match self.chi {
            Chirality::Same => v,
            Chirality::Mirrored => Vec2 { x: v.x, y: -v.y },
        }
    }

    /// Absolute position of a point given in local coordinates.
    pub fn to_abs_point(&self, local: &Vec2<S>) -> Point<S> {
        self.origin.clone() + self.to_abs_dir(local).scale(&self.length_unit)
    }

    /// The frame `Rot(α)`: local axes turned by `α` counterclockwise as seen
    /// from inside this frame. For a mirrored frame the absolute effect is a
    /// clockwise turn.
    pub fn rot_context(&self, alpha: &Rotation<S>) -> Frame<S> {
        let rotation = match self.chi {
            Chirality::Same => self.rotation.then(alpha),
            Chirality::Mirrored => self.rotation.then(&alpha.inverse()),
        };
        Frame { rotation, ..self.clone() }
    }
}

pub fn frame_to_abs_dir<S: Field>(frame: &Frame<S>, local: &Vec2<S>) -> Vec2<S> {
    frame.to_abs_dir(local)
}

pub fn rot_context<S: Real>(frame: &Frame<S>, alpha: &Angle) -> Frame<S> {
    let ctx = frame.speed.context();
    frame.rot_context(&Rotation::from_angle(alpha, ctx))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Line<S> {
    pub anchor: Point<S>,
    /// Unit vector.
    pub direction: Vec2<S>,
}

impl<S: Field> Line<S> {
    pub fn project(&self, p: &Point<S>) -> Point<S> {
        let along = (p.clone() - self.anchor.clone()).dot(&self.direction);
        self.anchor.clone() + self.direction.scale(&along)
    }

    /// Mirror image of `p` across the line.
    pub fn reflect(&self, p: &Point<S>) -> Point<S> {
        let foot = self.project(p);
        foot.clone() + foot - p.clone()
    }

    /// Signed coordinate of the projection of `p` along the line.
    pub fn coordinate(&self, p: &Point<S>) -> S {
        (p.clone() - self.anchor.clone()).dot(&self.direction)
    }
}

pub fn project<S: Field>(p: &Point<S>, line: &Line<S>) -> Point<S> {
    line.project(p)
}

/// The line equidistant from both origins at inclination φ/2 (the common
/// x-axis direction when φ = 0).
pub fn canonical_line<S: Real>(instance: &Instance, ctx: S::Context) -> Line<S> {
    let two = S::from_i64(ctx, 2);
    let anchor = Vec2 {
        x: S::from_rational(ctx, &instance.x) / two.clone(),
        y: S::from_rational(ctx, &instance.y) / two,
    };
    let (cos, sin) = instance.phi.half_cos_sin::<S>(ctx);
    Line { anchor, direction: Vec2 { x: cos, y: sin } }
}

/// Which agent a trajectory belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AgentId {
    A,
    B,
}

/// A piece of trajectory that is affine in absolute time.
#[derive(Clone, Debug, PartialEq)]
pub struct TimedSegment<S> {
    pub agent: AgentId,
    pub t0: S,
    pub t1: S,
    pub p0: Point<S>,
    pub p1: Point<S>,
    pub label: Label,
}

impl<S: Field> TimedSegment<S> {
    pub fn stationary(agent: AgentId, t0: S, t1: S, at: Point<S>, label: Label) -> Self {
        TimedSegment { agent, t0, t1, p0: at.clone(), p1: at, label }
    }

    pub fn duration(&self) -> S {
        self.t1.clone() - self.t0.clone()
    }

    pub fn is_wait(&self) -> bool {
        self.p0 == self.p1
    }

    pub fn velocity(&self) -> Vec2<S> {
        let dt = self.duration();
        if dt.is_zero() || self.is_wait() {
            return Vec2::zero(dt.context());
        }
        let d = self.p1.clone() - self.p0.clone();
        Vec2 { x: d.x / dt.clone(), y: d.y / dt }
    }

    pub fn position_at(&self, s: &S) -> Point<S> {
        let dt = self.duration();
        if dt.is_zero() || self.is_wait() {
            return self.p0.clone();
        }
        let frac = (s.clone() - self.t0.clone()) / dt;
        self.p0.clone() + (self.p1.clone() - self.p0.clone()).scale(&frac)
    }

    /// The same motion over the sub-interval `[s0, s1]`.
    pub fn restrict(&self, s0: &S, s1: &S) -> Self {
        TimedSegment {
            agent: self.agent,
            t0: s0.clone(),
            t1: s1.clone(),
            p0: self.position_at(s0),
            p1: self.position_at(s1),
            label: self.label,
        }
    }

    pub fn overlap(&self, other: &Self) -> Option<(S, S)> {
        let s0 = self.t0.clone().max_of(other.t0.clone());
        let s1 = self.t1.clone().min_of(other.t1.clone());
        (s0 <= s1).then_some((s0, s1))
    }
}

/// Relative motion `B − A` over the common interval, as `d0 + w·τ` for
/// `τ ∈ [0, len]`.
struct Relative<S> {
    start: S,
    len: S,
    d0: Vec2<S>,
    w: Vec2<S>,
}

fn relative<S: Field>(a: &TimedSegment<S>, b: &TimedSegment<S>) -> Result<Relative<S>, GeometryError> {
    let (s0, s1) = a.overlap(b).ok_or_else(|| GeometryError::NoOverlap {
        a0: format!("{:?}", a.t0),
        a1: format!("{:?}", a.t1),
        b0: format!("{:?}", b.t0),
        b1: format!("{:?}", b.t1),
    })?;
    Ok(Relative {
        d0: b.position_at(&s0) - a.position_at(&s0),
        w: b.velocity() - a.velocity(),
        len: s1 - s0.clone(),
        start: s0,
    })
}

/// Earliest absolute time in the common interval at which the two moving
/// points are within `r`. A pass that misses `r` only by rounding (within the
/// tolerance band) still counts.
pub fn earliest_contact<S: Real>(
    a: &TimedSegment<S>,
    b: &TimedSegment<S>,
    r: &S,
    tol: &Tolerance<S>,
) -> Result<Option<S>, GeometryError> {
    let m = relative(a, b)?;
    if let Some(tau) = first_within(&m, r) {
        return Ok(Some(m.start + tau));
    }
    let reach = r.clone() + tol.band(r, r);
    Ok(first_within(&m, &reach).map(|tau| m.start.clone() + tau))
}

/// Smallest offset `τ ∈ [0, len]` with `|d0 + wτ| ≤ reach`.
fn first_within<S: Real>(m: &Relative<S>, reach: &S) -> Option<S> {
    // |d0 + wτ|² − reach² = qa·τ² + 2·qb·τ + qc
    let qc = m.d0.norm2() - reach.square();
    if qc.is_negative() || qc.is_zero() {
        return Some(S::zero(qc.context()));
    }
    let qa = m.w.norm2();
    let qb = m.d0.dot(&m.w);
    if qa.is_zero() || !qb.is_negative() {
        return None;
    }
    let disc = qb.square() - qa * qc.clone();
    if disc.is_negative() {
        return None;
    }
    // Smaller root c/q with q = −b + √disc; both terms positive, no cancellation.
    let tau = qc / (disc.sqrt() - qb);
    (tau <= m.len).then_some(tau)
}

/// Minimum distance between the two moving points over their common
/// interval, with the earliest time it is attained.
pub fn closest_approach<S: Real>(
    a: &TimedSegment<S>,
    b: &TimedSegment<S>,
) -> Result<(S, S), GeometryError> {
    let m = relative(a, b)?;
    let qa = m.w.norm2();
    let tau = if qa.is_zero() {
        S::zero(qa.context())
    } else {
        let raw = -(m.d0.dot(&m.w)) / qa;
        raw.max_of(S::zero(m.len.context())).min_of(m.len.clone())
    };
    let d = m.d0.clone() + m.w.scale(&tau);
    Ok((d.norm(), m.start + tau))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kinematics::Label;
    use crate::numerics::{BigFloat, Precision};
    use proptest::prelude::*;

    type S = BigFloat;
    const P: Precision = Precision::DEFAULT;

    fn s(v: f64) -> S {
        S::from_f64(P, v)
    }

    fn v(x: f64, y: f64) -> Vec2<S> {
        Vec2::from_f64(P, x, y)
    }

    fn close(a: &Vec2<S>, b: &Vec2<S>, bits: i64) -> bool {
        (a.clone() - b.clone()).norm() <= S::pow2(P, -bits)
    }

    fn frame(phi: Angle, chi: Chirality) -> Frame<S> {
        Frame::agent(v(0.0, 0.0), Rotation::from_angle(&phi, P), chi, s(1.0), s(1.0), s(0.0))
    }

    fn pi(num: i64, den: i64) -> Angle {
        Angle::pi_ratio(num, den).unwrap()
    }

    #[test]
    fn frame_direction_examples() {
        let id = frame(Angle::zero(), Chirality::Same);
        assert_eq!(frame_to_abs_dir(&id, &v(1.0, 0.0)), v(1.0, 0.0));
        let half = frame(pi(1, 1), Chirality::Same);
        assert_eq!(frame_to_abs_dir(&half, &v(1.0, 0.0)), v(-1.0, 0.0));
        let quarter_mirrored = frame(pi(1, 2), Chirality::Mirrored);
        assert_eq!(frame_to_abs_dir(&quarter_mirrored, &v(0.0, 1.0)), v(1.0, 0.0));
    }

    #[test]
    fn rot_context_examples() {
        let a = rot_context(&frame(Angle::zero(), Chirality::Same), &pi(1, 2));
        assert_eq!(a.to_abs_dir(&v(1.0, 0.0)), v(0.0, 1.0));
        let b = rot_context(&frame(Angle::zero(), Chirality::Mirrored), &pi(1, 2));
        assert_eq!(b.to_abs_dir(&v(1.0, 0.0)), v(0.0, -1.0));
    }

    #[test]
    fn north_under_half_turn_context_agrees_for_mirrored_agents() {
        for (num, den) in [(0, 1), (1, 3), (5, 7), (3, 2), (19, 10)] {
            let phi = PiRatio::new(num, den).unwrap();
            let alpha = Angle::Pi(phi.half() + PiRatio::new(1, 2).unwrap());
            let expected_angle = phi.half() + PiRatio::new(1, 1).unwrap();
            let expected = Rotation::<S>::from_cos_sin(S::cos_sin_pi(P, expected_angle)).apply(&v(1.0, 0.0));
            let a = rot_context(&frame(Angle::zero(), Chirality::Same), &alpha);
            let b = rot_context(&frame(Angle::Pi(phi), Chirality::Mirrored), &alpha);
            assert!(close(&a.to_abs_dir(&v(0.0, 1.0)), &expected, 200));
            assert!(close(&b.to_abs_dir(&v(0.0, 1.0)), &expected, 200));
        }
    }

    use crate::numerics::PiRatio;

    fn inst(x: &str, y: &str, phi: Angle) -> Instance {
        Instance::from_strs("1", x, y, phi, "1", "1", "0", Chirality::Same).unwrap()
    }

    #[test]
    fn canonical_line_examples() {
        let l: Line<S> = canonical_line(&inst("0", "2", Angle::zero()), P);
        assert_eq!((l.anchor, l.direction), (v(0.0, 1.0), v(1.0, 0.0)));
        let l: Line<S> = canonical_line(&inst("2", "0", pi(1, 1)), P);
        assert_eq!((l.anchor, l.direction), (v(1.0, 0.0), v(0.0, 1.0)));
        let l: Line<S> = canonical_line(&inst("2", "2", pi(1, 2)), P);
        let h = S::from_i64(P, 2).sqrt() / S::from_i64(P, 2);
        assert_eq!(l.anchor, v(1.0, 1.0));
        assert!(close(&l.direction, &Vec2::new(h.clone(), h), 250));
    }

    #[test]
    fn projection_examples() {
        let horizontal = |y: f64| Line { anchor: v(0.0, y), direction: v(1.0, 0.0) };
        assert_eq!(project(&v(0.0, 0.0), &horizontal(1.0)), v(0.0, 1.0));
        assert_eq!(project(&v(3.0, 0.0), &horizontal(0.0)), v(3.0, 0.0));
        let h = S::from_i64(P, 2).sqrt() / S::from_i64(P, 2);
        let diagonal = Line { anchor: v(0.0, 0.0), direction: Vec2::new(h.clone(), h) };
        assert!(close(&project(&v(2.0, 0.0), &diagonal), &v(1.0, 1.0), 250));
    }

    fn seg(t0: f64, t1: f64, p0: (f64, f64), p1: (f64, f64)) -> TimedSegment<S> {
        TimedSegment {
            agent: AgentId::A,
            t0: s(t0),
            t1: s(t1),
            p0: v(p0.0, p0.1),
            p1: v(p1.0, p1.1),
            label: Label::default(),
        }
    }

    #[test]
    fn contact_examples() {
        let tol = Tolerance::standard(P);
        let a = seg(0.0, 10.0, (0.0, 0.0), (0.0, 0.0));
        let near = seg(0.0, 10.0, (0.5, 0.0), (0.5, 0.0));
        assert_eq!(earliest_contact(&a, &near, &s(1.0), &tol).unwrap(), Some(s(0.0)));
        let flyby = seg(0.0, 10.0, (3.0, 0.0), (-7.0, 0.0));
        assert_eq!(earliest_contact(&a, &flyby, &s(1.0), &tol).unwrap(), Some(s(2.0)));
        let left = seg(0.0, 10.0, (0.0, 0.0), (10.0, 0.0));
        let right = seg(0.0, 10.0, (0.0, 3.0), (10.0, 3.0));
        assert_eq!(earliest_contact(&left, &right, &s(1.0), &tol).unwrap(), None);
    }

    #[test]
    fn contact_at_exact_radius_counts() {
        let tol = Tolerance::standard(P);
        let a = seg(0.0, 4.0, (0.0, 0.0), (0.0, 0.0));
        let b = seg(0.0, 4.0, (5.0, 0.0), (1.0, 0.0));
        assert_eq!(earliest_contact(&a, &b, &s(1.0), &tol).unwrap(), Some(s(4.0)));
        let grazing = seg(0.0, 2.0, (-1.0, 1.0), (1.0, 1.0));
        assert_eq!(earliest_contact(&a, &grazing, &s(1.0), &tol).unwrap(), Some(s(1.0)));
        // Misses by less than the band: still a contact.
        let shaved = seg(0.0, 2.0, (-1.0, 1.0 + 2f64.powi(-70)), (1.0, 1.0 + 2f64.powi(-70)));
        assert!(earliest_contact(&a, &shaved, &s(1.0), &tol).unwrap().is_some());
        let clear = seg(0.0, 2.0, (-1.0, 1.0 + 2f64.powi(-40)), (1.0, 1.0 + 2f64.powi(-40)));
        assert_eq!(earliest_contact(&a, &clear, &s(1.0), &tol).unwrap(), None);
    }

    #[test]
    fn contact_requires_overlap() {
        let a = seg(0.0, 1.0, (0.0, 0.0), (1.0, 0.0));
        let b = seg(2.0, 3.0, (0.0, 0.0), (1.0, 0.0));
        assert!(earliest_contact(&a, &b, &s(1.0), &Tolerance::standard(P)).is_err());
    }

    #[test]
    fn closest_approach_of_flyby() {
        let a = seg(0.0, 10.0, (0.0, 0.0), (0.0, 0.0));
        let flyby = seg(0.0, 10.0, (3.0, 0.0), (-7.0, 0.0));
        assert_eq!(closest_approach(&a, &flyby).unwrap(), (s(0.0), s(3.0)));
        let receding = seg(0.0, 10.0, (3.0, 0.0), (13.0, 0.0));
        assert_eq!(closest_approach(&a, &receding).unwrap(), (s(3.0), s(0.0)));
    }

    #[test]
    fn restrict_keeps_the_motion() {
        let m = seg(0.0, 4.0, (0.0, 0.0), (4.0, 0.0));
        let r = m.restrict(&s(1.0), &s(3.0));
        assert_eq!((r.p0, r.p1), (v(1.0, 0.0), v(3.0, 0.0)));
    }

    fn coord() -> impl Strategy<Value = f64> {
        -100.0f64..100.0
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn frames_preserve_norms(num in -64i64..64, den in 1i64..64, mirrored: bool, x in coord(), y in coord()) {
            let chi = if mirrored { Chirality::Mirrored } else { Chirality::Same };
            let f = frame(pi(num, den), chi);
            let u = v(x, y);
            let mapped = f.to_abs_dir(&u);
            let err = (mapped.norm() - u.norm()).abs();
            prop_assert!(err <= S::pow2(P, -240));
        }

        #[test]
        fn canonical_line_is_equidistant(x in coord(), y in coord(), num in 0i64..128, den in 1i64..64) {
            prop_assume!(x != 0.0 || y != 0.0);
            let i = Instance::from_strs("1", &x.to_string(), &y.to_string(), pi(num, den), "1", "1", "0", Chirality::Mirrored).unwrap();
            let l: Line<S> = canonical_line(&i, P);
            let a = v(0.0, 0.0);
            let b = i.start_b(P);
            let da = (project(&a, &l) - a).norm();
            let db = (project(&b, &l) - b).norm();
            prop_assert!((da - db).abs() <= S::pow2(P, -200));
        }

        #[test]
        fn contact_is_symmetric(
            ax in coord(), ay in coord(), bx in coord(), by in coord(),
            cx in coord(), cy in coord(), dx in coord(), dy in coord(), r in 0.1f64..50.0,
        ) {
            let a = seg(0.0, 8.0, (ax, ay), (bx, by));
            let b = seg(1.0, 9.0, (cx, cy), (dx, dy));
            let tol = Tolerance::standard(P);
            prop_assert_eq!(
                earliest_contact(&a, &b, &s(r), &tol).unwrap(),
                earliest_contact(&b, &a, &s(r), &tol).unwrap()
            );
        }
    }
}
