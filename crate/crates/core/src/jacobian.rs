//! Equilibrium Jacobians of the desynchronization maps, plus a
//! finite-difference probe that arbitrates between analytic variants.
//!
//! Three analytic builders cover the single-hop map (even/odd parity), the
//! general multi-hop map at any state, and the hub-topology (star) special
//! case under saturated perception. The star case additionally exposes the
//! two published circulant variants whose off-diagonal structure does not
//! survive a finite-difference check; see [`StarVariant`].

use crate::dwarf::{raw_single_hop_force, term_count};
use crate::error::{Error, Result};
use crate::mdwarf::{force_gradient, raw_step_multihop};
use crate::model::{inverse_square_sum, GapVector, PerceptionMatrix, SystemConfig};
use crate::scalar::Real;
use nalgebra::DMatrix;

/// How a Jacobian was obtained; carried into exports and error messages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    AnalyticSingleHop,
    AnalyticMultihop,
    AnalyticStar,
    FiniteDifference,
}

impl Provenance {
    pub fn label(&self) -> &'static str {
        match self {
            Provenance::AnalyticSingleHop => "analytic-single-hop",
            Provenance::AnalyticMultihop => "analytic-multi-hop",
            Provenance::AnalyticStar => "analytic-star",
            Provenance::FiniteDifference => "finite-difference",
        }
    }
}

/// Dense square Jacobian with provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobianMatrix<F: Real> {
    entries: DMatrix<F>,
    provenance: Provenance,
}

impl<F: Real> JacobianMatrix<F> {
    pub fn new(entries: DMatrix<F>, provenance: Provenance) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::Domain(format!(
                "jacobian must be square, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if entries.iter().any(|e| !e.is_finite()) {
            return Err(Error::Numerical {
                provenance: provenance.label().to_string(),
                detail: "non-finite jacobian entry".into(),
            });
        }
        Ok(Self {
            entries,
            provenance,
        })
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<F> {
        &self.entries
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn get(&self, row: usize, col: usize) -> F {
        self.entries[(row, col)]
    }

    /// Largest absolute entrywise difference against another matrix.
    pub fn max_abs_difference(&self, other: &JacobianMatrix<F>) -> Result<F> {
        if self.n() != other.n() {
            return Err(Error::Domain(format!(
                "size mismatch: {} vs {}",
                self.n(),
                other.n()
            )));
        }
        let mut worst = F::zero();
        for (a, b) in self.entries.iter().zip(other.entries.iter()) {
            let d = (*a - *b).abs();
            if d > worst {
                worst = d;
            }
        }
        Ok(worst)
    }
}

/// Node-count parity selecting which single-hop closed form applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of(n: usize) -> Parity {
        if n.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    pub fn matches(&self, n: usize) -> bool {
        *self == Parity::of(n)
    }
}

/// Analytic Jacobian of the single-hop snapshot map at equilibrium.
///
/// Rows `0..n−2` are the relabeling shift (one unit entry each). The last two
/// rows carry `±A·(σ(p+1) − σ(n−p))` where `σ(s)` is the inverse-square tail
/// through the term count of the force, plus the identity entry of the gap
/// each row updates. Middle columns vanish: two for even `n`, one for odd.
pub fn jacobian_single_hop<F: Real>(
    config: &SystemConfig<F>,
    parity: Parity,
) -> Result<JacobianMatrix<F>> {
    let n = config.n();
    if n < 4 {
        return Err(Error::Domain(format!(
            "single-hop jacobian needs n >= 4, got {n}"
        )));
    }
    if !parity.matches(n) {
        return Err(Error::Domain(format!(
            "parity {parity:?} does not match n={n}"
        )));
    }
    let amp = config.amplification();
    let m_max = term_count(n);
    let sigma = |s: usize| inverse_square_sum::<F>(s, m_max);
    let mut entries = DMatrix::<F>::zeros(n, n);
    for r in 0..n - 2 {
        entries[(r, r + 1)] = F::one();
    }
    for p in 0..n {
        let slope = amp * (sigma(p + 1) - sigma(n - p));
        entries[(n - 2, p)] = slope + if p == n - 1 { F::one() } else { F::zero() };
        entries[(n - 1, p)] = -slope + if p == 0 { F::one() } else { F::zero() };
    }
    JacobianMatrix::new(entries, Provenance::AnalyticSingleHop)
}

/// Analytic Jacobian of the synchronous multi-hop map at an arbitrary state,
/// assembled from the same gated mask weights as the force code.
///
/// Requires `n ≥ 6`: below that the sided offset bands collapse and the
/// closed-form case analysis has no room.
pub fn jacobian_multihop<F: Real>(
    gaps: &GapVector<F>,
    perception: &PerceptionMatrix,
    config: &SystemConfig<F>,
) -> Result<JacobianMatrix<F>> {
    let n = gaps.len();
    if n < 6 {
        return Err(Error::UnsupportedSize {
            n,
            reason: "multi-hop jacobian needs distinct sided offset bands (n >= 6)",
        });
    }
    if n != config.n() || n != perception.n() {
        return Err(Error::Config(format!(
            "size mismatch: {} gaps, perception n={}, config n={}",
            n,
            perception.n(),
            config.n()
        )));
    }
    let k = config.coupling();
    let mut grads = Vec::with_capacity(n);
    for i in 0..n {
        grads.push(force_gradient(
            gaps.as_slice(),
            gaps.period(),
            perception,
            i,
        )?);
    }
    let mut entries = DMatrix::<F>::zeros(n, n);
    for r in 0..n {
        for p in 0..n {
            let delta = if r == p { F::one() } else { F::zero() };
            entries[(r, p)] = delta + k * (grads[(r + 1) % n][p] - grads[r][p]);
        }
    }
    JacobianMatrix::new(entries, Provenance::AnalyticMultihop)
}

/// The three circulant closed forms for the saturated-perception star case.
///
/// `MaskReduced` is derived by collapsing the mask algebra at full perception
/// (per side: twice the nearest force, minus the force across the half-ring
/// boundary) and is the variant the finite-difference oracle confirms; it is
/// what [`jacobian_star`] returns and what every certified path uses.
///
/// The two `AllOnes*` variants instead substitute 1 for every mask factor,
/// reproducing the published circulant with its two diagonal-sum conventions
/// (half-ring limit `⌊n/2⌋−2` vs full limit `n−2`). They are kept for the
/// discrepancy report; the finite-difference check rejects both.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StarVariant {
    MaskReduced,
    AllOnesHalfRange,
    AllOnesFullRange,
}

impl StarVariant {
    pub fn label(&self) -> &'static str {
        match self {
            StarVariant::MaskReduced => "mask-reduced",
            StarVariant::AllOnesHalfRange => "all-ones-half-range",
            StarVariant::AllOnesFullRange => "all-ones-full-range",
        }
    }
}

/// First row of the circulant star Jacobian for a given variant.
pub fn star_first_row<F: Real>(config: &SystemConfig<F>, variant: StarVariant) -> Result<Vec<F>> {
    let n = config.n();
    if n < 6 || !n.is_multiple_of(2) {
        return Err(Error::UnsupportedSize {
            n,
            reason: "star closed form requires even n >= 6",
        });
    }
    let amp = config.amplification();
    let h = n / 2;
    let two = F::from_literal(2.0);
    let mut row = vec![F::zero(); n];
    match variant {
        StarVariant::MaskReduced => {
            let hm1 = F::from_count((h - 1) * (h - 1));
            row[0] = F::one() - two * two * amp + two * amp / hm1;
            row[1] = two * amp;
            row[n - 1] = two * amp;
            row[h - 1] = -amp / hm1;
            row[h + 1] = -amp / hm1;
        }
        StarVariant::AllOnesHalfRange | StarVariant::AllOnesFullRange => {
            let limit = match variant {
                StarVariant::AllOnesHalfRange => h - 2,
                _ => n - 2,
            };
            row[0] = F::one() - two * amp * (F::one() + inverse_square_sum::<F>(1, limit));
            row[1] = two * amp;
            row[n - 1] = two * amp;
            for q in 2..=h - 2 {
                let w = amp / F::from_count(q * q);
                row[q] = w;
                row[n - q] = w;
            }
        }
    }
    Ok(row)
}

/// Builds the circulant star Jacobian for an explicit variant.
pub fn jacobian_star_variant<F: Real>(
    config: &SystemConfig<F>,
    variant: StarVariant,
) -> Result<JacobianMatrix<F>> {
    let row = star_first_row(config, variant)?;
    let n = row.len();
    let entries = DMatrix::<F>::from_fn(n, n, |r, c| row[(c + n - r) % n]);
    JacobianMatrix::new(entries, Provenance::AnalyticStar)
}

/// Equilibrium Jacobian for the star topology under two-hop (saturated)
/// perception: the mask-reduced circulant, the variant every oracle check
/// certifies. See [`StarVariant`] for the published alternatives.
pub fn jacobian_star<F: Real>(config: &SystemConfig<F>) -> Result<JacobianMatrix<F>> {
    jacobian_star_variant(config, StarVariant::MaskReduced)
}

/// The single-hop snapshot map as a plain slice function, for derivative
/// probing: probe states need not sum to the period, but must stay positive.
pub fn single_hop_step_map<F: Real>(
    config: &SystemConfig<F>,
) -> impl Fn(&[F]) -> Result<Vec<F>> + '_ {
    move |gaps: &[F]| {
        if gaps.len() != config.n() {
            return Err(Error::Config(format!(
                "state has {} gaps but config expects {}",
                gaps.len(),
                config.n()
            )));
        }
        if let Some(i) = gaps.iter().position(|g| *g <= F::zero()) {
            return Err(Error::DegenerateState(format!("gap {i} is nonpositive")));
        }
        let n = gaps.len();
        let force = raw_single_hop_force(gaps, config.coupling(), config.period());
        let mut next = Vec::with_capacity(n);
        next.extend_from_slice(&gaps[1..n - 1]);
        next.push(gaps[n - 1] + force);
        next.push(gaps[0] - force);
        Ok(next)
    }
}

/// The synchronous multi-hop map as a plain slice function, for derivative
/// probing.
pub fn multihop_step_map<'a, F: Real>(
    config: &'a SystemConfig<F>,
    perception: &'a PerceptionMatrix,
) -> impl Fn(&[F]) -> Result<Vec<F>> + 'a {
    move |gaps: &[F]| {
        if gaps.len() != config.n() || gaps.len() != perception.n() {
            return Err(Error::Config(format!(
                "state has {} gaps but config expects {}",
                gaps.len(),
                config.n()
            )));
        }
        if let Some(i) = gaps.iter().position(|g| *g <= F::zero()) {
            return Err(Error::DegenerateState(format!("gap {i} is nonpositive")));
        }
        raw_step_multihop(gaps, config.period(), perception, config.coupling())
    }
}

/// Central-difference Jacobian of an arbitrary state-update map.
///
/// Column `j` is `(map(x + h·eⱼ) − map(x − h·eⱼ)) / 2h`. The point must be
/// interior: every gap larger than `2h`. A map failure during probing is
/// wrapped in [`Error::Probe`] with the offending column.
pub fn finite_difference_jacobian<F: Real>(
    map: impl Fn(&[F]) -> Result<Vec<F>>,
    point: &GapVector<F>,
    h: F,
) -> Result<JacobianMatrix<F>> {
    if h <= F::zero() {
        return Err(Error::Domain(
            "finite-difference step must be positive".into(),
        ));
    }
    let n = point.len();
    let two_h = F::from_literal(2.0) * h;
    if point.as_slice().iter().any(|g| *g <= two_h) {
        return Err(Error::Domain(
            "point too close to the state-space boundary for the requested step".into(),
        ));
    }
    let mut entries = DMatrix::<F>::zeros(n, n);
    let mut probe = point.as_slice().to_vec();
    for col in 0..n {
        let base = probe[col];
        probe[col] = base + h;
        let plus = map(&probe).map_err(|e| Error::Probe {
            column: col,
            source: Box::new(e),
        })?;
        probe[col] = base - h;
        let minus = map(&probe).map_err(|e| Error::Probe {
            column: col,
            source: Box::new(e),
        })?;
        probe[col] = base;
        if plus.len() != n || minus.len() != n {
            return Err(Error::Numerical {
                provenance: Provenance::FiniteDifference.label().to_string(),
                detail: format!("map returned {} values for {} states", plus.len(), n),
            });
        }
        for row in 0..n {
            entries[(row, col)] = (plus[row] - minus[row]) / two_h;
        }
    }
    JacobianMatrix::new(entries, Provenance::FiniteDifference)
}
