//! Multi-hop desynchronization: every node adjusts each round using forces
//! from all nodes it perceives, directly or through relays.
//!
//! A perceived node at cyclic offset `d` from observer `i` contributes a
//! pairwise force `T/S`, where `S` sums the gaps separating the pair: nodes
//! in the nearer half-ring push the observer away (negative side), nodes in
//! the farther half-ring pull it along (positive side). Which contributions
//! enter the total is decided by three boolean masks per offset:
//!
//! * closest (`R`): no nearer node on the same side is perceived;
//! * resistance (`S`): a farther in-range node is perceived, so this one also
//!   pushes to make room;
//! * absorption (`T`): a nearer node is perceived and shields part of the
//!   force.
//!
//! The synchronous transition then moves every gap by the force difference
//! of its two endpoint nodes, scaled by the coupling constant.

use crate::error::{Error, Result};
use crate::model::{GapVector, PerceptionMatrix, SystemConfig};
use crate::scalar::Real;

/// Boolean mask triples for one observer, split by half-ring.
///
/// Minus-side vectors cover offsets `d = 1..⌊n/2⌋−1` at index `d−1`;
/// plus-side vectors cover `d = ⌊n/2⌋+1..n−1` at index `d−⌊n/2⌋−1`. The
/// opposite offset `⌊n/2⌋` (and offset 0) belongs to neither side.
///
/// `R` is the raw nearest-visible product (its adjacent entry is 1 even for
/// an empty perception); `S` and `T` are gated by the perception bit of
/// their own offset, so they are 0 wherever `c_{i,j} = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForceMasks {
    observer: usize,
    n: usize,
    r_minus: Vec<bool>,
    s_minus: Vec<bool>,
    t_minus: Vec<bool>,
    r_plus: Vec<bool>,
    s_plus: Vec<bool>,
    t_plus: Vec<bool>,
}

impl ForceMasks {
    pub fn observer(&self) -> usize {
        self.observer
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Half-ring split point `⌊n/2⌋`.
    pub fn half(&self) -> usize {
        self.n / 2
    }

    fn minus_index(&self, d: usize) -> usize {
        assert!(d >= 1 && d < self.half(), "minus offset {d} out of range");
        d - 1
    }

    fn plus_index(&self, d: usize) -> usize {
        assert!(
            d > self.half() && d < self.n,
            "plus offset {d} out of range"
        );
        d - self.half() - 1
    }

    pub fn r_minus(&self, d: usize) -> bool {
        self.r_minus[self.minus_index(d)]
    }

    pub fn s_minus(&self, d: usize) -> bool {
        self.s_minus[self.minus_index(d)]
    }

    pub fn t_minus(&self, d: usize) -> bool {
        self.t_minus[self.minus_index(d)]
    }

    pub fn r_plus(&self, d: usize) -> bool {
        self.r_plus[self.plus_index(d)]
    }

    pub fn s_plus(&self, d: usize) -> bool {
        self.s_plus[self.plus_index(d)]
    }

    pub fn t_plus(&self, d: usize) -> bool {
        self.t_plus[self.plus_index(d)]
    }
}

/// Evaluates the closest/resistance/absorption masks for observer `i`.
pub fn force_masks(perception: &PerceptionMatrix, i: usize) -> Result<ForceMasks> {
    let n = perception.n();
    if n < 4 {
        return Err(Error::Domain(format!("force masks need n >= 4, got {n}")));
    }
    if i >= n {
        return Err(Error::Domain(format!(
            "observer {i} out of range for n={n}"
        )));
    }
    let h = n / 2;
    let sees = |e: usize| perception.perceives(i, i + e);

    let mut r_minus = Vec::with_capacity(h.saturating_sub(1));
    let mut s_minus = Vec::with_capacity(h.saturating_sub(1));
    let mut t_minus = Vec::with_capacity(h.saturating_sub(1));
    for d in 1..h {
        let nearer_seen = (1..d).any(&sees);
        r_minus.push(!nearer_seen);
        s_minus.push(sees(d) && (d + 1..h).any(&sees));
        t_minus.push(sees(d) && nearer_seen);
    }

    let mut r_plus = Vec::with_capacity(n - h - 1);
    let mut s_plus = Vec::with_capacity(n - h - 1);
    let mut t_plus = Vec::with_capacity(n - h - 1);
    for d in h + 1..n {
        let nearer_seen = (d + 1..n).any(&sees);
        r_plus.push(!nearer_seen);
        s_plus.push(sees(d) && (h + 1..d).any(&sees));
        t_plus.push(sees(d) && nearer_seen);
    }

    Ok(ForceMasks {
        observer: i,
        n,
        r_minus,
        s_minus,
        t_minus,
        r_plus,
        s_plus,
        t_plus,
    })
}

/// Which half-ring a pairwise force acts from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ForceDirection {
    /// Farther half-ring: the neighbor pulls the observer forward.
    Positive,
    /// Nearer half-ring: the neighbor pushes the observer back.
    Negative,
}

/// One reciprocal-gap-sum force between an observer and one perceived node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairwiseForce<F: Real> {
    pub direction: ForceDirection,
    /// `T` divided by the contiguous cyclic gap sum separating the pair.
    pub magnitude: F,
}

/// Computes the pairwise force between observer `i` and node `j`.
///
/// Negative direction divides `T` by the gaps from `i` forward to `j`;
/// positive direction by the gaps from `j` forward around to `i`.
pub fn pairwise_force<F: Real>(
    gaps: &GapVector<F>,
    i: usize,
    j: usize,
    direction: ForceDirection,
) -> Result<PairwiseForce<F>> {
    let n = gaps.len();
    if i >= n || j >= n {
        return Err(Error::Domain(format!(
            "node pair ({i},{j}) out of range for n={n}"
        )));
    }
    if i == j {
        return Err(Error::Domain(format!(
            "pairwise force undefined for i = j = {i}"
        )));
    }
    let d = (j + n - i) % n;
    let magnitude = match direction {
        ForceDirection::Negative => gaps.period() / gaps.cyclic_sum(i, d),
        ForceDirection::Positive => gaps.period() / gaps.cyclic_sum(j, n - d),
    };
    Ok(PairwiseForce {
        direction,
        magnitude,
    })
}

/// The six masked sub-sums making up one node's total force.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceBreakdown<F: Real> {
    pub closest_plus: F,
    pub resistance_plus: F,
    pub absorption_plus: F,
    pub closest_minus: F,
    pub resistance_minus: F,
    pub absorption_minus: F,
}

/// Net force on one node with its component breakdown.
///
/// `value = (closest⁺ + resistance⁺ − absorption⁺)
///        − (closest⁻ + resistance⁻ − absorption⁻)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TotalForce<F: Real> {
    pub value: F,
    pub breakdown: ForceBreakdown<F>,
}

/// Per-offset signed weights after range gating, shared by the force and its
/// analytic gradient so the two can never drift apart.
///
/// Ranges: closest spans every sided offset; resistance drops the outermost
/// offset of each side (`⌊n/2⌋−1` minus, `⌊n/2⌋+1` plus); absorption drops
/// the innermost (`1` minus, `n−1` plus).
fn gated_weights(
    perception: &PerceptionMatrix,
    masks: &ForceMasks,
    i: usize,
    d: usize,
    minus: bool,
) -> (bool, bool, bool) {
    let n = masks.n();
    let h = masks.half();
    let c = perception.perceives(i, i + d);
    if minus {
        let closest = c && masks.r_minus(d);
        let resistance = d <= h.saturating_sub(2) && masks.s_minus(d);
        let absorption = d >= 2 && masks.t_minus(d);
        (closest, resistance, absorption)
    } else {
        let closest = c && masks.r_plus(d);
        let resistance = d >= h + 2 && masks.s_plus(d);
        let absorption = d <= n - 2 && masks.t_plus(d);
        (closest, resistance, absorption)
    }
}

fn breakdown_from_raw<F: Real>(
    gaps: &[F],
    period: F,
    perception: &PerceptionMatrix,
    i: usize,
) -> Result<ForceBreakdown<F>> {
    let n = gaps.len();
    let masks = force_masks(perception, i)?;
    let h = n / 2;
    let cyclic_sum = |start: usize, count: usize| -> F {
        let mut acc = F::zero();
        for k in 0..count {
            acc += gaps[(start + k) % n];
        }
        acc
    };

    let mut b = ForceBreakdown {
        closest_plus: F::zero(),
        resistance_plus: F::zero(),
        absorption_plus: F::zero(),
        closest_minus: F::zero(),
        resistance_minus: F::zero(),
        absorption_minus: F::zero(),
    };

    for d in 1..h {
        let (closest, resistance, absorption) = gated_weights(perception, &masks, i, d, true);
        if !(closest || resistance || absorption) {
            continue;
        }
        let f = period / cyclic_sum(i, d);
        if closest {
            b.closest_minus += f;
        }
        if resistance {
            b.resistance_minus += f;
        }
        if absorption {
            b.absorption_minus += f;
        }
    }
    for d in h + 1..n {
        let (closest, resistance, absorption) = gated_weights(perception, &masks, i, d, false);
        if !(closest || resistance || absorption) {
            continue;
        }
        let f = period / cyclic_sum((i + d) % n, n - d);
        if closest {
            b.closest_plus += f;
        }
        if resistance {
            b.resistance_plus += f;
        }
        if absorption {
            b.absorption_plus += f;
        }
    }
    Ok(b)
}

pub(crate) fn raw_total_force<F: Real>(
    gaps: &[F],
    period: F,
    perception: &PerceptionMatrix,
    i: usize,
) -> Result<F> {
    let b = breakdown_from_raw(gaps, period, perception, i)?;
    Ok((b.closest_plus + b.resistance_plus - b.absorption_plus)
        - (b.closest_minus + b.resistance_minus - b.absorption_minus))
}

/// Computes the total multi-hop force on node `i` with its breakdown.
pub fn total_force<F: Real>(
    gaps: &GapVector<F>,
    perception: &PerceptionMatrix,
    i: usize,
    config: &SystemConfig<F>,
) -> Result<TotalForce<F>> {
    let n = gaps.len();
    if n != config.n() || n != perception.n() {
        return Err(Error::Config(format!(
            "size mismatch: {} gaps, perception n={}, config n={}",
            n,
            perception.n(),
            config.n()
        )));
    }
    let breakdown = breakdown_from_raw(gaps.as_slice(), gaps.period(), perception, i)?;
    let value = (breakdown.closest_plus + breakdown.resistance_plus - breakdown.absorption_plus)
        - (breakdown.closest_minus + breakdown.resistance_minus - breakdown.absorption_minus);
    Ok(TotalForce { value, breakdown })
}

pub(crate) fn raw_step_multihop<F: Real>(
    gaps: &[F],
    period: F,
    perception: &PerceptionMatrix,
    coupling: F,
) -> Result<Vec<F>> {
    let n = gaps.len();
    let mut forces = Vec::with_capacity(n);
    for i in 0..n {
        forces.push(raw_total_force(gaps, period, perception, i)?);
    }
    let mut next = Vec::with_capacity(n);
    for i in 0..n {
        next.push(gaps[i] + coupling * forces[(i + 1) % n] - coupling * forces[i]);
    }
    Ok(next)
}

/// Applies one synchronous round: every force is computed from the pre-update
/// state, then every gap moves by the coupled force difference of its two
/// endpoint nodes: `Δᵢ′ = Δᵢ + K·F_{i+1} − K·Fᵢ`.
///
/// Fails with [`Error::Overshoot`] if any updated gap leaves `(0, T]`.
pub fn step_multihop<F: Real>(
    gaps: &GapVector<F>,
    perception: &PerceptionMatrix,
    config: &SystemConfig<F>,
) -> Result<GapVector<F>> {
    let n = gaps.len();
    if n != config.n() || n != perception.n() {
        return Err(Error::Config(format!(
            "size mismatch: {} gaps, perception n={}, config n={}",
            n,
            perception.n(),
            config.n()
        )));
    }
    let next = raw_step_multihop(
        gaps.as_slice(),
        gaps.period(),
        perception,
        config.coupling(),
    )?;
    for (i, &g) in next.iter().enumerate() {
        if !(g > F::zero() && g <= gaps.period()) {
            return Err(Error::Overshoot {
                node: i,
                value: g.as_f64(),
            });
        }
    }
    GapVector::new(next, gaps.period())
}

/// Gradient `∂Fᵢ/∂Δ_p` of the total force at an arbitrary state, assembled
/// from the same gated weights as the force itself.
pub(crate) fn force_gradient<F: Real>(
    gaps: &[F],
    period: F,
    perception: &PerceptionMatrix,
    i: usize,
) -> Result<Vec<F>> {
    let n = gaps.len();
    let masks = force_masks(perception, i)?;
    let h = n / 2;
    let mut grad = vec![F::zero(); n];
    let cyclic_sum = |start: usize, count: usize| -> F {
        let mut acc = F::zero();
        for k in 0..count {
            acc += gaps[(start + k) % n];
        }
        acc
    };
    let mut add_span = |start: usize, count: usize, scale: F| {
        let s = cyclic_sum(start, count);
        let slope = scale * period / (s * s);
        for k in 0..count {
            grad[(start + k) % n] += slope;
        }
    };

    for d in 1..h {
        let (closest, resistance, absorption) = gated_weights(perception, &masks, i, d, true);
        let w = weight_value::<F>(closest, resistance, absorption);
        if w != F::zero() {
            // force term is −w·T/S(i, d): d/dΔ_p = +w·T/S²
            add_span(i, d, w);
        }
    }
    for d in h + 1..n {
        let (closest, resistance, absorption) = gated_weights(perception, &masks, i, d, false);
        let w = weight_value::<F>(closest, resistance, absorption);
        if w != F::zero() {
            // force term is +w·T/S(i+d, n−d): d/dΔ_p = −w·T/S²
            add_span((i + d) % n, n - d, -w);
        }
    }
    Ok(grad)
}

fn weight_value<F: Real>(closest: bool, resistance: bool, absorption: bool) -> F {
    let mut w = F::zero();
    if closest {
        w += F::one();
    }
    if resistance {
        w += F::one();
    }
    if absorption {
        w -= F::one();
    }
    w
}
