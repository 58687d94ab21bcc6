//! Shared domain types: system constants, ring state, topology, and
//! perception matrices.
//!
//! Nodes live on a period ring of length `T`. The dynamical state is the
//! vector of gaps `Δ₀..Δₙ₋₁` between consecutive nodes; the coupling constant
//! `K` and its scale-free companion `A = Kn²/T` parameterize every update and
//! every equilibrium Jacobian.

use crate::error::{Error, Result};
use crate::scalar::Real;
use serde::Deserialize;
use std::path::Path;

/// Node count, period, and coupling constant for one system instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig<F: Real> {
    n: usize,
    period: F,
    coupling: F,
}

impl<F: Real> SystemConfig<F> {
    /// Builds a config with the coupling constant derived from `n` and `T`.
    pub fn new(n: usize, period: F) -> Result<Self> {
        let coupling = coupling_constant(n, period)?;
        Ok(Self {
            n,
            period,
            coupling,
        })
    }

    /// Builds a config with an explicit coupling constant override.
    pub fn with_coupling(n: usize, period: F, coupling: F) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("node count {n} < 2")));
        }
        if period <= F::zero() || coupling <= F::zero() {
            return Err(Error::Domain("period and coupling must be positive".into()));
        }
        Ok(Self {
            n,
            period,
            coupling,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn period(&self) -> F {
        self.period
    }

    pub fn coupling(&self) -> F {
        self.coupling
    }

    /// The equilibrium gap `T/n`.
    pub fn equilibrium_gap(&self) -> F {
        self.period / F::from_count(self.n)
    }

    /// `A = Kn²/T`, the natural parameter of the equilibrium Jacobians.
    pub fn amplification(&self) -> F {
        self.coupling * F::from_count(self.n * self.n) / self.period
    }
}

/// `K = 38.597 · n^(−1.874) · T/1000`.
pub fn coupling_constant<F: Real>(n: usize, period: F) -> Result<F> {
    if n < 2 {
        return Err(Error::Domain(format!("node count {n} < 2")));
    }
    if period <= F::zero() {
        return Err(Error::Domain("period must be positive".into()));
    }
    let base = F::from_literal(38.597);
    let exponent = F::from_literal(-1.874);
    Ok(base * F::from_count(n).powf(exponent) * period / F::from_literal(1000.0))
}

/// `A = 0.038597 · n^0.126`; equals `coupling_constant(n,T)·n²/T` for every T.
pub fn amplification<F: Real>(n: usize) -> Result<F> {
    if n < 2 {
        return Err(Error::Domain(format!("node count {n} < 2")));
    }
    Ok(F::from_literal(0.038597) * F::from_count(n).powf(F::from_literal(0.126)))
}

/// `Σ_{i=s}^{upper} 1/i²` with an inclusive upper limit; zero when `s > upper`.
pub fn inverse_square_sum<F: Real>(s: usize, upper_inclusive: usize) -> F {
    let mut acc = F::zero();
    for i in s.max(1)..=upper_inclusive {
        acc += F::one() / F::from_count(i * i);
    }
    acc
}

/// `Σ_{i=s}^{⌊n/2⌋−1} 1/i²`, the partial sum appearing in the single-hop
/// equilibrium Jacobian rows; empty sums return zero.
pub fn partial_inverse_square_sum<F: Real>(s: usize, n: usize) -> Result<F> {
    if s < 1 {
        return Err(Error::Domain("start index must be >= 1".into()));
    }
    if n < 4 {
        return Err(Error::Domain(format!("node count {n} < 4")));
    }
    Ok(inverse_square_sum(s, n / 2 - 1))
}

/// The state vector of consecutive phase gaps `Δ₀..Δₙ₋₁`, each in `(0, T]`,
/// summing to the period.
#[derive(Debug, Clone, PartialEq)]
pub struct GapVector<F: Real> {
    gaps: Vec<F>,
    period: F,
}

impl<F: Real> GapVector<F> {
    /// Validates positivity and sum conservation: `|ΣΔ − T| ≤ 1e−9·T`,
    /// widened to `4nε·T` for scalars whose machine epsilon `ε` cannot
    /// resolve that bound (f32, or f64 beyond a million nodes).
    pub fn new(gaps: Vec<F>, period: F) -> Result<Self> {
        if gaps.len() < 2 {
            return Err(Error::Domain(format!(
                "need at least 2 gaps, got {}",
                gaps.len()
            )));
        }
        if period <= F::zero() {
            return Err(Error::Domain("period must be positive".into()));
        }
        for (i, &g) in gaps.iter().enumerate() {
            if !(g > F::zero() && g <= period) {
                return Err(Error::DegenerateState(format!(
                    "gap {i} = {} outside (0, T]",
                    g.as_f64()
                )));
            }
        }
        let sum: F = gaps.iter().copied().fold(F::zero(), |a, b| a + b);
        let floor = F::from_literal(1e-9);
        let eps_scale = F::default_epsilon() * F::from_count(4 * gaps.len());
        let tol = period * if eps_scale > floor { eps_scale } else { floor };
        if (sum - period).abs() > tol {
            return Err(Error::DegenerateState(format!(
                "gap sum {} deviates from period {} beyond tolerance",
                sum.as_f64(),
                period.as_f64()
            )));
        }
        Ok(Self { gaps, period })
    }

    /// The equilibrium state with all gaps equal to `T/n`.
    pub fn equilibrium(n: usize, period: F) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("node count {n} < 2")));
        }
        let g = period / F::from_count(n);
        Ok(Self {
            gaps: vec![g; n],
            period,
        })
    }

    pub fn len(&self) -> usize {
        self.gaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gaps.is_empty()
    }

    pub fn period(&self) -> F {
        self.period
    }

    pub fn as_slice(&self) -> &[F] {
        &self.gaps
    }

    /// Gap at a cyclically normalized index.
    pub fn cyclic(&self, index: usize) -> F {
        self.gaps[index % self.gaps.len()]
    }

    /// Sum of `count` consecutive gaps starting at `start` (cyclic).
    pub fn cyclic_sum(&self, start: usize, count: usize) -> F {
        let n = self.gaps.len();
        let mut acc = F::zero();
        for k in 0..count {
            acc += self.gaps[(start + k) % n];
        }
        acc
    }

    /// Largest deviation from the equilibrium gap, `max_i |Δᵢ − T/n|`.
    pub fn max_deviation(&self) -> F {
        let eq = self.period / F::from_count(self.gaps.len());
        self.gaps
            .iter()
            .map(|&g| (g - eq).abs())
            .fold(F::zero(), |a, b| if b > a { b } else { a })
    }
}

/// Node firing phases on `[0, T)`, the simulator-facing representation.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseVector<F: Real> {
    phases: Vec<F>,
    period: F,
}

impl<F: Real> PhaseVector<F> {
    pub fn new(phases: Vec<F>, period: F) -> Result<Self> {
        if period <= F::zero() {
            return Err(Error::Domain("period must be positive".into()));
        }
        for (i, &p) in phases.iter().enumerate() {
            if !(p >= F::zero() && p < period) {
                return Err(Error::Domain(format!(
                    "phase {i} = {} outside [0, T)",
                    p.as_f64()
                )));
            }
        }
        Ok(Self { phases, period })
    }

    pub fn as_slice(&self) -> &[F] {
        &self.phases
    }

    pub fn period(&self) -> F {
        self.period
    }
}

/// Gaps in phase order starting from the earliest-firing node after the ring
/// wraparound; rejects duplicate phases, which would make the order undefined.
pub fn ring_gaps<F: Real>(phases: &PhaseVector<F>, period: F) -> Result<GapVector<F>> {
    let n = phases.as_slice().len();
    if n < 2 {
        return Err(Error::Domain(format!("need at least 2 phases, got {n}")));
    }
    let mut sorted: Vec<F> = phases.as_slice().to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("phases are finite"));
    for w in sorted.windows(2) {
        if w[0] == w[1] {
            return Err(Error::DegenerateState(format!(
                "duplicate phase {}",
                w[0].as_f64()
            )));
        }
    }
    let mut gaps = Vec::with_capacity(n);
    for i in 0..n {
        let next = if i + 1 == n {
            sorted[0] + period
        } else {
            sorted[i + 1]
        };
        gaps.push(next - sorted[i]);
    }
    GapVector::new(gaps, period)
}

/// Reconstructs phases from gaps with node 0 anchored at phase 0.
pub fn phases_from_gaps<F: Real>(gaps: &GapVector<F>) -> PhaseVector<F> {
    let n = gaps.len();
    let mut phases = Vec::with_capacity(n);
    let mut acc = F::zero();
    for i in 0..n {
        phases.push(acc);
        acc += gaps.as_slice()[i];
    }
    PhaseVector {
        phases,
        period: gaps.period(),
    }
}

#[derive(Deserialize)]
struct TopologyFile {
    n: usize,
    edges: Vec<[usize; 2]>,
}

/// Undirected communication graph: symmetric boolean adjacency, no self-loops.
/// Connectivity is not required; disconnected graphs are representable.
#[derive(Debug, Clone, PartialEq)]
pub struct Topology {
    n: usize,
    adjacency: Vec<bool>,
}

impl Topology {
    /// Builds from an undirected edge list, rejecting self and duplicate edges.
    pub fn from_edges(n: usize, edges: &[[usize; 2]]) -> Result<Self> {
        if n < 2 {
            return Err(Error::Domain(format!("node count {n} < 2")));
        }
        let mut adjacency = vec![false; n * n];
        for &[a, b] in edges {
            if a >= n || b >= n {
                return Err(Error::Domain(format!(
                    "edge [{a},{b}] out of range for n={n}"
                )));
            }
            if a == b {
                return Err(Error::Domain(format!("self edge [{a},{b}] rejected")));
            }
            if adjacency[a * n + b] {
                return Err(Error::Domain(format!("duplicate edge [{a},{b}] rejected")));
            }
            adjacency[a * n + b] = true;
            adjacency[b * n + a] = true;
        }
        Ok(Self { n, adjacency })
    }

    /// Parses the JSON form `{"n": int, "edges": [[i,j], ...]}`.
    pub fn from_json_str(text: &str, origin: &Path) -> Result<Self> {
        let file: TopologyFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            path: origin.to_path_buf(),
            detail: e.to_string(),
        })?;
        Self::from_edges(file.n, &file.edges)
    }

    /// Reads and parses a topology file.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        })?;
        Self::from_json_str(&text, path)
    }

    /// Hub-and-leaves graph with node 0 as the hub.
    pub fn star(n: usize) -> Result<Self> {
        let edges: Vec<[usize; 2]> = (1..n).map(|i| [0, i]).collect();
        Self::from_edges(n, &edges)
    }

    /// Path graph 0–1–…–(n−1).
    pub fn chain(n: usize) -> Result<Self> {
        let edges: Vec<[usize; 2]> = (1..n).map(|i| [i - 1, i]).collect();
        Self::from_edges(n, &edges)
    }

    /// Complete graph.
    pub fn full(n: usize) -> Result<Self> {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push([i, j]);
            }
        }
        Self::from_edges(n, &edges)
    }

    /// Cycle graph 0–1–…–(n−1)–0.
    pub fn ring(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Domain(format!("ring needs n >= 3, got {n}")));
        }
        let mut edges: Vec<[usize; 2]> = (1..n).map(|i| [i - 1, i]).collect();
        edges.push([0, n - 1]);
        Self::from_edges(n, &edges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn adjacent(&self, i: usize, j: usize) -> bool {
        self.adjacency[i * self.n + j]
    }

    /// True when every node can reach every other node.
    pub fn is_connected(&self) -> bool {
        let n = self.n;
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for (w, seen_w) in seen.iter_mut().enumerate() {
                if self.adjacent(v, w) && !*seen_w {
                    *seen_w = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Whether perception extends over direct neighbors only or across one relay.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerceptionMode {
    OneHop,
    TwoHop,
}

/// Which nodes each node knows the relative phase of: `c[i][j] = 1` when node
/// `i` perceives node `j`, directly or (in two-hop mode) through one relay.
#[derive(Debug, Clone, PartialEq)]
pub struct PerceptionMatrix {
    n: usize,
    c: Vec<bool>,
}

impl PerceptionMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    /// `c_{i,j}` with cyclically normalized indices.
    pub fn perceives(&self, i: usize, j: usize) -> bool {
        self.c[(i % self.n) * self.n + (j % self.n)]
    }

    /// All off-diagonal entries set; the perception of a complete graph.
    pub fn complete(n: usize) -> Result<Self> {
        perception_matrix(&Topology::full(n)?, PerceptionMode::OneHop)
    }
}

/// Derives the perception matrix from a topology: one-hop mode returns the
/// adjacency itself; two-hop mode adds every pair sharing a neighbor.
pub fn perception_matrix(topology: &Topology, mode: PerceptionMode) -> Result<PerceptionMatrix> {
    let n = topology.n();
    let mut c = vec![false; n * n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let direct = topology.adjacent(i, j);
            let relayed = mode == PerceptionMode::TwoHop
                && (0..n).any(|k| topology.adjacent(i, k) && topology.adjacent(k, j));
            c[i * n + j] = direct || relayed;
        }
    }
    Ok(PerceptionMatrix { n, c })
}
