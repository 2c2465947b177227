//! Deterministic simulation of two-agent rendezvous in the plane.
//!
//! Agents share no coordinate system: each has its own origin, rotation,
//! chirality, time unit, speed and wake-up time. The crate compiles
//! instruction streams into absolute timed polylines and finds the first
//! moment the agents come within the visibility radius.
//!
//! Everything numeric is generic over [`numerics::Field`] /
//! [`numerics::Real`]; the aliases below fix the scalar to [`BigFloat`].

pub mod algorithms;
pub mod geometry;
pub mod harness;
pub mod instance;
pub mod kinematics;
pub mod numerics;
pub mod simulator;

pub use numerics::{BigFloat, Precision, Tolerance};

/// The scalar used by the CLI and the harness.
pub type Scalar = BigFloat;
pub type Point = geometry::Vec2<Scalar>;
pub type Frame = geometry::Frame<Scalar>;
pub type Line = geometry::Line<Scalar>;
pub type TimedSegment = geometry::TimedSegment<Scalar>;
pub type TimedPolyline = kinematics::TimedPolyline<Scalar>;
pub type Instruction = kinematics::Instruction<Scalar>;
pub type RendezvousReport = simulator::RendezvousReport<Scalar>;
pub type Horizon = simulator::Horizon<Scalar>;
pub type Program = simulator::Program<Scalar>;
pub type FeasibilityVerdict = instance::FeasibilityVerdict<Scalar>;
