//! Single-hop desynchronization: the firing node nudges its own slot using
//! only the gaps it can measure from its neighbors' beacons.
//!
//! One round is observed from the frame of the node that just fired: the
//! force `F` is a sum of reciprocal partial gap sums, accumulated forward
//! from the firing node (repelling) and backward from its predecessor
//! (attracting); the update then moves the firing node's beacon by `F` and
//! relabels the ring so the next node becomes the observer.

use crate::error::{Error, Result};
use crate::model::{GapVector, SystemConfig};
use crate::scalar::Real;

/// A computed single-hop force together with its per-term breakdown.
#[derive(Debug, Clone, PartialEq)]
pub struct SingleHopForce<F: Real> {
    /// The net force `F` applied to the firing node's gap pair.
    pub value: F,
    /// Signed terms `∓KT/S(m)`, keyed by the number `m` of gaps in the
    /// partial sum: forward (negative) terms first, then backward (positive).
    pub contributions: Vec<(usize, F)>,
}

/// Number of partial-sum terms on each side: `n/2 − 1` for even `n`,
/// `⌊n/2⌋` for odd `n` (both sides always match).
pub fn term_count(n: usize) -> usize {
    if n.is_multiple_of(2) {
        n / 2 - 1
    } else {
        n / 2
    }
}

pub(crate) fn raw_single_hop_force<F: Real>(gaps: &[F], coupling: F, period: F) -> F {
    let n = gaps.len();
    let m_max = term_count(n);
    let mut total = F::zero();
    let mut fwd = F::zero();
    let mut bwd = F::zero();
    for m in 1..=m_max {
        fwd += gaps[m - 1];
        bwd += gaps[n - m];
        total += F::one() / bwd - F::one() / fwd;
    }
    coupling * period * total
}

/// Computes the force on the node that fired at the start of gap 0.
///
/// Requires `n ≥ 3`; the state length must match the config.
pub fn single_hop_force<F: Real>(
    gaps: &GapVector<F>,
    config: &SystemConfig<F>,
) -> Result<SingleHopForce<F>> {
    let n = gaps.len();
    if n < 3 {
        return Err(Error::Domain(format!(
            "single-hop force needs n >= 3, got {n}"
        )));
    }
    if n != config.n() {
        return Err(Error::Config(format!(
            "state has {n} gaps but config expects {}",
            config.n()
        )));
    }
    let kt = config.coupling() * config.period();
    let m_max = term_count(n);
    let mut contributions = Vec::with_capacity(2 * m_max);
    let mut fwd = F::zero();
    for m in 1..=m_max {
        fwd += gaps.as_slice()[m - 1];
        contributions.push((m, -kt / fwd));
    }
    let mut bwd = F::zero();
    for m in 1..=m_max {
        bwd += gaps.as_slice()[n - m];
        contributions.push((m, kt / bwd));
    }
    // accumulate back/front pairs together so the two sides cancel exactly
    // on symmetric states instead of leaving reordering residue
    let value = raw_single_hop_force(gaps.as_slice(), config.coupling(), config.period());
    Ok(SingleHopForce {
        value,
        contributions,
    })
}

/// Applies one firing: the observer's beacon moves by `F`, shrinking its
/// predecessor gap and growing its successor gap, then the ring is relabeled
/// so gap 0 again leads the next observer.
///
/// `(Δ₀, …, Δₙ₋₁) → (Δ₁, …, Δₙ₋₂, Δₙ₋₁ + F, Δ₀ − F)`
///
/// Fails with [`Error::Overshoot`] when a modified gap would leave `(0, T]`;
/// the state is not updated in that case.
pub fn step_single_hop<F: Real>(
    gaps: &GapVector<F>,
    config: &SystemConfig<F>,
) -> Result<GapVector<F>> {
    let force = single_hop_force(gaps, config)?.value;
    let n = gaps.len();
    let period = gaps.period();
    let grown = gaps.as_slice()[n - 1] + force;
    let shrunk = gaps.as_slice()[0] - force;
    if !(grown > F::zero() && grown <= period) {
        return Err(Error::Overshoot {
            node: n - 1,
            value: grown.as_f64(),
        });
    }
    if !(shrunk > F::zero() && shrunk <= period) {
        return Err(Error::Overshoot {
            node: 0,
            value: shrunk.as_f64(),
        });
    }
    let mut next = Vec::with_capacity(n);
    next.extend_from_slice(&gaps.as_slice()[1..n - 1]);
    next.push(grown);
    next.push(shrunk);
    GapVector::new(next, period)
}
