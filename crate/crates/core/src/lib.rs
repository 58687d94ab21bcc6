//! Desynchronization dynamics on a shared period ring, plus the linear
//! stability laboratory around their equilibrium.
//!
//! A population of `n` nodes fires periodically on a common period `T`; the
//! state is the vector of consecutive firing gaps, which always sums to `T`.
//! Two feedback rules steer the ring toward the evenly spaced configuration:
//!
//! * [`dwarf`] — the single-hop rule: one node per round adjusts its phase
//!   from the reciprocal partial sums of the gaps ahead of and behind it.
//! * [`mdwarf`] — the multi-hop rule: every node synchronously combines
//!   closest-neighbor, resistance, and absorption forces, with perception
//!   masks deciding which offsets contribute under a given topology.
//!
//! The analysis side linearizes both rules at equilibrium:
//!
//! * [`jacobian`] — analytic Jacobians (single-hop, multi-hop, and circulant
//!   star variants) plus a finite-difference prober that checks them against
//!   the actual step functions.
//! * [`spectral`] — characteristic polynomials, dense eigensolves,
//!   coefficient-sum and Gershgorin-disc certificates, and the closed-form
//!   node-count thresholds those certificates imply.
//!
//! [`sim`] drives trajectories with seeded reproducibility and [`export`]
//! writes byte-stable JSON/CSV artifacts. Everything is generic over the
//! scalar type through [`scalar::Real`]; the `*64` aliases at the crate root
//! pin the common double-precision instantiations.

pub mod dwarf;
pub mod error;
pub mod export;
pub mod jacobian;
pub mod mdwarf;
pub mod model;
pub mod scalar;
pub mod sim;
pub mod spectral;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision system description ([`model::SystemConfig`]).
pub type SystemConfig64 = model::SystemConfig<f64>;
/// Double-precision gap state ([`model::GapVector`]).
pub type GapVector64 = model::GapVector<f64>;
/// Double-precision firing phases ([`model::PhaseVector`]).
pub type PhaseVector64 = model::PhaseVector<f64>;
/// Double-precision single-hop force ([`dwarf::SingleHopForce`]).
pub type SingleHopForce64 = dwarf::SingleHopForce<f64>;
/// Double-precision multi-hop force ([`mdwarf::TotalForce`]).
pub type TotalForce64 = mdwarf::TotalForce<f64>;
/// Double-precision Jacobian ([`jacobian::JacobianMatrix`]).
pub type JacobianMatrix64 = jacobian::JacobianMatrix<f64>;
/// Double-precision characteristic polynomial ([`spectral::CharPoly`]).
pub type CharPoly64 = spectral::CharPoly<f64>;
/// Double-precision stability report ([`spectral::StabilityReport`]).
pub type StabilityReport64 = spectral::StabilityReport<f64>;
/// Double-precision node-count thresholds ([`spectral::StabilityThresholds`]).
pub type StabilityThresholds64 = spectral::StabilityThresholds<f64>;
/// Double-precision run configuration ([`sim::SimConfig`]).
pub type SimConfig64 = sim::SimConfig<f64>;
/// Double-precision run outcome ([`sim::RunResult`]).
pub type RunResult64 = sim::RunResult<f64>;
/// Double-precision trace row ([`sim::TraceRecord`]).
pub type TraceRecord64 = sim::TraceRecord<f64>;
