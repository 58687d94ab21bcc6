//! Eigenvalue analysis: characteristic polynomials of the single-hop map,
//! dense eigensolves, coefficient-sum and disc-containment certificates, and
//! the closed-form node-count thresholds the certificates imply.
//!
//! Certificates are cheap sufficient conditions for the spectral radius to
//! stay within the unit circle; the thresholds extrapolate them to node
//! counts far beyond anything a dense eigensolver can touch.

use crate::error::{Error, Result};
use crate::jacobian::{
    jacobian_multihop, jacobian_single_hop, jacobian_star, JacobianMatrix, Parity, StarVariant,
};
use crate::model::{amplification, inverse_square_sum, GapVector, PerceptionMatrix, SystemConfig};
use crate::scalar::Real;
/// Complex scalar used for eigenvalues and polynomial roots.
pub use nalgebra::Complex;
use nalgebra::DMatrix;

/// Absolute slack on certificate comparisons against 1: the hub-topology
/// closed form sits algebraically exactly on the unit circle below its
/// threshold, so a strict comparison would flip on rounding noise.
const CERTIFICATE_SLACK: f64 = 1e-12;

/// Tolerance on the spectral-radius stability verdict.
const RADIUS_SLACK: f64 = 1e-9;

/// Monic characteristic polynomial of a single-hop equilibrium Jacobian.
#[derive(Debug, Clone, PartialEq)]
pub struct CharPoly<F: Real> {
    coefficients: Vec<F>,
    parity: Parity,
}

impl<F: Real> CharPoly<F> {
    /// Coefficients `a₀..aₙ` in ascending exponent order, `aₙ = 1`.
    pub fn coefficients(&self) -> &[F] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    /// Horner evaluation at a real point.
    pub fn eval(&self, x: F) -> F {
        self.coefficients
            .iter()
            .rev()
            .fold(F::zero(), |acc, &c| acc * x + c)
    }

    /// Roots via a companion-matrix eigensolve (same residual contract as
    /// [`eigenvalues`]).
    pub fn roots(&self) -> Result<Vec<Complex<F>>> {
        let n = self.degree();
        let mut companion = DMatrix::<F>::zeros(n, n);
        for r in 1..n {
            companion[(r, r - 1)] = F::one();
        }
        for r in 0..n {
            companion[(r, n - 1)] = -self.coefficients[r];
        }
        solve_dense(&companion, "companion-matrix")
    }
}

/// Characteristic polynomial of the single-hop equilibrium Jacobian:
/// monic degree `n`, `−A/m²` at exponents `m` and `n−m` for `m` up to the
/// force term count, and constant term `2A·Σ₁ − 1`.
///
/// For even `n` the exponent `n/2` keeps coefficient zero; for odd `n` the
/// paired exponents tile every power `1..n−1`.
pub fn char_poly_single_hop<F: Real>(
    config: &SystemConfig<F>,
    parity: Parity,
) -> Result<CharPoly<F>> {
    let n = config.n();
    if n < 4 {
        return Err(Error::Domain(format!(
            "characteristic polynomial needs n >= 4, got {n}"
        )));
    }
    if !parity.matches(n) {
        return Err(Error::Domain(format!(
            "parity {parity:?} does not match n={n}"
        )));
    }
    let amp = config.amplification();
    let m_max = crate::dwarf::term_count(n);
    let mut coefficients = vec![F::zero(); n + 1];
    coefficients[n] = F::one();
    for m in 1..=m_max {
        let w = amp / F::from_count(m * m);
        coefficients[m] -= w;
        coefficients[n - m] -= w;
    }
    let two = F::from_literal(2.0);
    coefficients[0] = two * amp * inverse_square_sum::<F>(1, m_max) - F::one();
    Ok(CharPoly {
        coefficients,
        parity,
    })
}

/// Root-modulus bound for a monic polynomial: `max(1, Σ_{i<n} |aᵢ|)`.
pub fn coefficient_sum_bound<F: Real>(poly: &CharPoly<F>) -> F {
    let n = poly.degree();
    let sum = poly.coefficients()[..n]
        .iter()
        .fold(F::zero(), |acc, c| acc + c.abs());
    if sum > F::one() {
        sum
    } else {
        F::one()
    }
}

fn solve_dense<F: Real>(matrix: &DMatrix<F>, provenance: &str) -> Result<Vec<Complex<F>>> {
    let schur = nalgebra::linalg::Schur::try_new(matrix.clone(), F::default_epsilon(), 100_000)
        .ok_or_else(|| Error::Numerical {
            provenance: provenance.to_string(),
            detail: "eigensolve did not converge".into(),
        })?;
    let mut values: Vec<Complex<F>> = schur.complex_eigenvalues().iter().copied().collect();
    values.sort_by(|a, b| {
        (a.re, a.im)
            .partial_cmp(&(b.re, b.im))
            .expect("finite eigenvalues")
    });
    Ok(values)
}

/// Eigenvalues of a Jacobian, sorted by real then imaginary part.
pub fn eigenvalues<F: Real>(matrix: &JacobianMatrix<F>) -> Result<Vec<Complex<F>>> {
    solve_dense(matrix.entries(), matrix.provenance().label())
}

/// Modulus of a complex value without extra trait requirements.
pub fn modulus<F: Real>(z: &Complex<F>) -> F {
    (z.re * z.re + z.im * z.im).sqrt()
}

/// Largest eigenvalue modulus.
pub fn spectral_radius<F: Real>(values: &[Complex<F>]) -> F {
    values
        .iter()
        .map(modulus)
        .fold(F::zero(), |a, b| if b > a { b } else { a })
}

/// One row's eigenvalue containment disc: centered at the diagonal entry
/// with radius the absolute sum of the row's off-diagonal entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GershgorinDisc<F: Real> {
    pub center: F,
    pub radius: F,
}

impl<F: Real> GershgorinDisc<F> {
    /// Farthest distance from the origin the disc reaches: `|center| + radius`.
    pub fn reach(&self) -> F {
        self.center.abs() + self.radius
    }

    pub fn contains(&self, z: &Complex<F>) -> bool {
        let dr = z.re - self.center;
        (dr * dr + z.im * z.im).sqrt() <= self.radius + F::from_literal(1e-8)
    }
}

/// Row discs plus the unit-circle containment verdict.
#[derive(Debug, Clone, PartialEq)]
pub struct GershgorinCertificate<F: Real> {
    pub discs: Vec<GershgorinDisc<F>>,
    /// Largest disc reach over all rows.
    pub max_reach: F,
    /// True iff every disc lies inside the unit circle (with rounding slack).
    pub contained: bool,
}

/// Computes one disc per row and the unit-circle verdict.
pub fn gershgorin_certificate<F: Real>(matrix: &JacobianMatrix<F>) -> GershgorinCertificate<F> {
    let n = matrix.n();
    let mut discs = Vec::with_capacity(n);
    let mut max_reach = F::zero();
    for r in 0..n {
        let center = matrix.get(r, r);
        let mut radius = F::zero();
        for c in 0..n {
            if c != r {
                radius += matrix.get(r, c).abs();
            }
        }
        let disc = GershgorinDisc { center, radius };
        if disc.reach() > max_reach {
            max_reach = disc.reach();
        }
        discs.push(disc);
    }
    let contained = max_reach <= F::one() + F::from_literal(CERTIFICATE_SLACK);
    GershgorinCertificate {
        discs,
        max_reach,
        contained,
    }
}

/// The (shared) row disc of the circulant star Jacobian, computed from the
/// closed form so it stays available at node counts far beyond dense
/// matrices: center is the diagonal entry, radius the off-diagonal absolute
/// sum of any row.
pub fn star_disc<F: Real>(n: usize, variant: StarVariant) -> Result<GershgorinDisc<F>> {
    if n < 6 || !n.is_multiple_of(2) {
        return Err(Error::UnsupportedSize {
            n,
            reason: "star closed form requires even n >= 6",
        });
    }
    let amp: F = amplification(n)?;
    let h = n / 2;
    let two = F::from_literal(2.0);
    let four = F::from_literal(4.0);
    Ok(match variant {
        StarVariant::MaskReduced => {
            let hm1 = F::from_count((h - 1) * (h - 1));
            GershgorinDisc {
                center: F::one() - four * amp + two * amp / hm1,
                radius: four * amp + two * amp / hm1,
            }
        }
        StarVariant::AllOnesHalfRange | StarVariant::AllOnesFullRange => {
            let off = two * amp * (F::one() + inverse_square_sum::<F>(1, h - 2));
            let center = match variant {
                StarVariant::AllOnesHalfRange => F::one() - off,
                _ => F::one() - two * amp * (F::one() + inverse_square_sum::<F>(1, n - 2)),
            };
            GershgorinDisc {
                center,
                radius: off,
            }
        }
    })
}

/// Closed-form node-count limits implied by the three stability certificates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityThresholds<F: Real> {
    /// Largest real `n` with `0.038597·n^0.126·ζ(2) ≤ 1`.
    pub single_hop_eigen: F,
    /// Largest real `n` with `2·0.038597·n^0.126·ζ(2) ≤ 1`.
    pub single_hop_hirst_macey: F,
    /// Largest real `n` with `0.20417813·n^0.126 ≤ 1`.
    pub star_gershgorin: F,
}

/// Solves the three threshold inequalities in closed form, using ζ(2) = π²/6
/// as the large-`n` limit of the partial inverse-square sums.
pub fn stability_thresholds<F: Real>() -> StabilityThresholds<F> {
    let zeta2 = F::pi() * F::pi() / F::from_literal(6.0);
    let base = F::from_literal(0.038597);
    let inv_exp = F::one() / F::from_literal(0.126);
    let solve = |limit: F| (limit / (base * zeta2)).powf(inv_exp);
    StabilityThresholds {
        single_hop_eigen: solve(F::one()),
        single_hop_hirst_macey: solve(F::from_literal(0.5)),
        // the hub-topology analysis folds 2(1 + ζ(2)) and the base constant
        // into a single published coefficient; reuse it verbatim
        star_gershgorin: (F::one() / F::from_literal(0.204_178_13)).powf(inv_exp),
    }
}

/// One named sufficient condition checked for a report.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate<F: Real> {
    pub name: &'static str,
    pub bound: F,
    pub satisfied: bool,
}

/// Which equilibrium Jacobian a stability report analyzes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportMode {
    SingleHopEven,
    SingleHopOdd,
    Star,
    General,
}

impl ReportMode {
    pub fn label(&self) -> &'static str {
        match self {
            ReportMode::SingleHopEven => "single-hop-even",
            ReportMode::SingleHopOdd => "single-hop-odd",
            ReportMode::Star => "star",
            ReportMode::General => "general",
        }
    }
}

/// Stability verdict: certified stable, or nothing proved (which is not a
/// proof of instability).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Stable,
    NotCertified,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Stable => "stable",
            Verdict::NotCertified => "not-certified",
        }
    }
}

/// Full per-configuration stability analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport<F: Real> {
    pub n: usize,
    pub mode: ReportMode,
    pub eigenvalues: Vec<Complex<F>>,
    pub spectral_radius: F,
    pub certificates: Vec<Certificate<F>>,
    pub thresholds: StabilityThresholds<F>,
    pub verdict: Verdict,
}

impl<F: Real> StabilityReport<F> {
    /// Distance of the spectral radius from the unit circle (negative when
    /// outside); informational, not part of the verdict.
    pub fn margin(&self) -> F {
        F::one() - self.spectral_radius
    }
}

/// Assembles Jacobian, spectrum, certificates, thresholds, and verdict for
/// one configuration. `General` mode requires a perception matrix; the two
/// single-hop modes also evaluate the coefficient-sum certificate.
pub fn stability_report<F: Real>(
    config: &SystemConfig<F>,
    mode: ReportMode,
    perception: Option<&PerceptionMatrix>,
) -> Result<StabilityReport<F>> {
    let n = config.n();
    let one_plus = F::one() + F::from_literal(CERTIFICATE_SLACK);
    let mut certificates = Vec::new();
    let matrix = match mode {
        ReportMode::SingleHopEven | ReportMode::SingleHopOdd => {
            let parity = if mode == ReportMode::SingleHopEven {
                Parity::Even
            } else {
                Parity::Odd
            };
            let poly = char_poly_single_hop(config, parity)?;
            let bound = coefficient_sum_bound(&poly);
            certificates.push(Certificate {
                name: "hirst_macey",
                bound,
                satisfied: bound <= one_plus,
            });
            jacobian_single_hop(config, parity)?
        }
        ReportMode::Star => jacobian_star(config)?,
        ReportMode::General => {
            let perception = perception.ok_or_else(|| {
                Error::Config("general stability mode requires a perception matrix".into())
            })?;
            let gaps = GapVector::equilibrium(n, config.period())?;
            jacobian_multihop(&gaps, perception, config)?
        }
    };
    let gersh = gershgorin_certificate(&matrix);
    certificates.push(Certificate {
        name: "gershgorin",
        bound: gersh.max_reach,
        satisfied: gersh.contained,
    });
    let eigenvalues = eigenvalues(&matrix)?;
    let radius = spectral_radius(&eigenvalues);
    let verdict = if radius <= F::one() + F::from_literal(RADIUS_SLACK)
        || certificates.iter().any(|c| c.satisfied)
    {
        Verdict::Stable
    } else {
        Verdict::NotCertified
    };
    Ok(StabilityReport {
        n,
        mode,
        eigenvalues,
        spectral_radius: radius,
        certificates,
        thresholds: stability_thresholds(),
        verdict,
    })
}

/// Greedy minimal pairing distance between two equally sized spectra;
/// used to compare eigensolver output against independent oracles without
/// relying on a tie-stable ordering.
pub fn pairing_distance<F: Real>(a: &[Complex<F>], b: &[Complex<F>]) -> Result<F> {
    if a.len() != b.len() {
        return Err(Error::Domain(format!(
            "spectra differ in size: {} vs {}",
            a.len(),
            b.len()
        )));
    }
    let mut used = vec![false; b.len()];
    let mut worst = F::zero();
    for za in a {
        let mut best: Option<(usize, F)> = None;
        for (idx, zb) in b.iter().enumerate() {
            if used[idx] {
                continue;
            }
            let d = modulus(&Complex::new(za.re - zb.re, za.im - zb.im));
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((idx, d));
            }
        }
        let (idx, d) = best.expect("nonempty candidates");
        used[idx] = true;
        if d > worst {
            worst = d;
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jacobian::{jacobian_star_variant, star_first_row, Provenance};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn four_node_char_poly() {
        let config = SystemConfig::new(4, 1000.0).unwrap();
        let poly = char_poly_single_hop(&config, Parity::Even).unwrap();
        let a: f64 = amplification(4).unwrap();
        let expected = [2.0 * a - 1.0, -a, 0.0, -a, 1.0];
        for (got, want) in poly.coefficients().iter().zip(expected) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-15);
        }
    }

    #[test]
    fn six_node_middle_coefficient_vanishes() {
        let config = SystemConfig::new(6, 1000.0).unwrap();
        let poly = char_poly_single_hop(&config, Parity::Even).unwrap();
        assert_eq!(poly.coefficients()[3], 0.0);
    }

    #[test]
    fn constant_term_closed_form_all_sizes() {
        for n in 4..=21 {
            let config = SystemConfig::new(n, 500.0).unwrap();
            let poly = char_poly_single_hop(&config, Parity::of(n)).unwrap();
            let a: f64 = amplification(n).unwrap();
            let s1: f64 = inverse_square_sum(1, crate::dwarf::term_count(n));
            assert_relative_eq!(
                poly.coefficients()[0],
                2.0 * a * s1 - 1.0,
                max_relative = 1e-13
            );
        }
        let config = SystemConfig::new(6, 500.0).unwrap();
        assert!(char_poly_single_hop(&config, Parity::Odd).is_err());
    }

    #[test]
    fn coefficient_sum_bound_cases() {
        let config = SystemConfig::new(4, 1000.0).unwrap();
        let poly = char_poly_single_hop(&config, Parity::Even).unwrap();
        // A + A + (1 − 2A) collapses to exactly 1
        assert_eq!(coefficient_sum_bound(&poly), 1.0);

        let monic_square = CharPoly {
            coefficients: vec![0.0, 0.0, 1.0],
            parity: Parity::Even,
        };
        assert_eq!(coefficient_sum_bound(&monic_square), 1.0);
        let shifted = CharPoly {
            coefficients: vec![-3.0, 0.0, 1.0],
            parity: Parity::Even,
        };
        assert_eq!(coefficient_sum_bound(&shifted), 3.0);
    }

    #[test]
    fn bound_collapse_is_exact_while_below_threshold() {
        for n in 4..=40 {
            let config = SystemConfig::<f64>::new(n, 1000.0).unwrap();
            let poly = char_poly_single_hop(&config, Parity::of(n)).unwrap();
            let a: f64 = amplification(n).unwrap();
            let s1: f64 = inverse_square_sum(1, crate::dwarf::term_count(n));
            assert!(2.0 * a * s1 <= 1.0, "desk-scale premise violated at n={n}");
            let sum: f64 = poly.coefficients()[..n].iter().map(|c| c.abs()).sum();
            assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn identity_eigenvalues() {
        let m = JacobianMatrix::new(DMatrix::<f64>::identity(5, 5), Provenance::FiniteDifference)
            .unwrap();
        let ev = eigenvalues(&m).unwrap();
        assert_eq!(ev.len(), 5);
        for z in ev {
            assert_abs_diff_eq!(z.re, 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(z.im, 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn circulant_dft_oracle_matches_eigensolver() {
        for n in [6usize, 8, 12, 16] {
            let config = SystemConfig::new(n, 1000.0).unwrap();
            let row = star_first_row(&config, StarVariant::MaskReduced).unwrap();
            let mut oracle = Vec::with_capacity(n);
            for j in 0..n {
                let mut re = 0.0f64;
                let mut im = 0.0f64;
                for (q, &c) in row.iter().enumerate() {
                    let angle = 2.0 * std::f64::consts::PI * (j * q) as f64 / n as f64;
                    re += c * angle.cos();
                    im += c * angle.sin();
                }
                oracle.push(Complex::new(re, im));
            }
            let ev = eigenvalues(&jacobian_star(&config).unwrap()).unwrap();
            let d = pairing_distance(&ev, &oracle).unwrap();
            assert!(d <= 1e-8, "n={n}: pairing distance {d}");
        }
    }

    #[test]
    fn companion_roots_match_jacobian_spectrum_and_bound() {
        let config = SystemConfig::new(6, 1000.0).unwrap();
        let poly = char_poly_single_hop(&config, Parity::Even).unwrap();
        let roots = poly.roots().unwrap();
        let bound = coefficient_sum_bound(&poly);
        for z in &roots {
            assert!(modulus(z) <= bound + 1e-8);
        }
        let ev = eigenvalues(&jacobian_single_hop(&config, Parity::Even).unwrap()).unwrap();
        let d = pairing_distance(&roots, &ev).unwrap();
        assert!(d <= 1e-8, "root set vs spectrum distance {d}");
    }

    #[test]
    fn gershgorin_basic_verdicts() {
        let zero =
            JacobianMatrix::new(DMatrix::<f64>::zeros(3, 3), Provenance::FiniteDifference).unwrap();
        let cert = gershgorin_certificate(&zero);
        assert!(cert.contained);
        for d in &cert.discs {
            assert_eq!((d.center, d.radius), (0.0, 0.0));
        }

        let double = JacobianMatrix::new(
            DMatrix::<f64>::from_diagonal_element(3, 3, 2.0),
            Provenance::FiniteDifference,
        )
        .unwrap();
        assert!(!gershgorin_certificate(&double).contained);
    }

    #[test]
    fn gershgorin_discs_contain_every_eigenvalue() {
        use rand::{RngExt, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for trial in 0..25 {
            let n = 3 + (trial % 6);
            let m = DMatrix::<f64>::from_fn(n, n, |_, _| rng.random::<f64>() - 0.5);
            let jm = JacobianMatrix::new(m, Provenance::FiniteDifference).unwrap();
            let cert = gershgorin_certificate(&jm);
            for z in eigenvalues(&jm).unwrap() {
                assert!(
                    cert.discs.iter().any(|d| d.contains(&z)),
                    "eigenvalue {z:?} escapes all discs"
                );
            }
        }
    }

    #[test]
    fn star_disc_closed_form_matches_matrix_discs() {
        for variant in [
            StarVariant::MaskReduced,
            StarVariant::AllOnesHalfRange,
            StarVariant::AllOnesFullRange,
        ] {
            let config = SystemConfig::new(8, 1000.0).unwrap();
            let matrix = jacobian_star_variant(&config, variant).unwrap();
            let cert = gershgorin_certificate(&matrix);
            let closed: GershgorinDisc<f64> = star_disc(8, variant).unwrap();
            for d in &cert.discs {
                assert_abs_diff_eq!(d.center, closed.center, epsilon = 1e-14);
                assert_abs_diff_eq!(d.radius, closed.radius, epsilon = 1e-14);
            }
        }
        assert!(star_disc::<f64>(7, StarVariant::MaskReduced).is_err());
    }

    #[test]
    fn published_disc_sits_on_the_unit_circle_below_threshold() {
        for n in [8usize, 64, 299_306] {
            let disc: GershgorinDisc<f64> = star_disc(n, StarVariant::AllOnesHalfRange).unwrap();
            assert_abs_diff_eq!(disc.reach(), 1.0, epsilon = 1e-9);
            assert!(disc.reach() <= 1.0 + CERTIFICATE_SLACK);
        }
        // first even n above the threshold: the diagonal has gone negative
        // and the reach exceeds 1 by a strictly positive closed-form margin
        let above: GershgorinDisc<f64> = star_disc(299_400, StarVariant::AllOnesHalfRange).unwrap();
        assert_relative_eq!(above.reach(), 1.000_023_143, max_relative = 1e-6);
        assert!(above.reach() > 1.0 + CERTIFICATE_SLACK);
    }

    #[test]
    fn thresholds_match_frozen_values() {
        let t: StabilityThresholds<f64> = stability_thresholds();
        assert_relative_eq!(t.single_hop_eigen, 3.179_543e9, max_relative = 1e-5);
        assert_relative_eq!(t.single_hop_hirst_macey, 1.297_890e7, max_relative = 1e-5);
        assert_relative_eq!(t.star_gershgorin, 299_307.3, max_relative = 1e-5);
    }

    #[test]
    fn desk_scale_spectral_radii_stay_contained() {
        for n in [4usize, 5, 8, 13, 24, 33, 64] {
            let config = SystemConfig::new(n, 1000.0).unwrap();
            let ev = eigenvalues(&jacobian_single_hop(&config, Parity::of(n)).unwrap()).unwrap();
            assert!(
                spectral_radius(&ev) <= 1.0 + RADIUS_SLACK,
                "single-hop n={n}"
            );
        }
        for n in [6usize, 8, 18, 34, 64] {
            let config = SystemConfig::new(n, 1000.0).unwrap();
            let ev = eigenvalues(&jacobian_star(&config).unwrap()).unwrap();
            assert!(spectral_radius(&ev) <= 1.0 + RADIUS_SLACK, "star n={n}");
        }
    }

    #[test]
    fn stability_reports_for_reference_configurations() {
        let star8 = stability_report(
            &SystemConfig::<f64>::new(8, 1000.0).unwrap(),
            ReportMode::Star,
            None,
        )
        .unwrap();
        assert_eq!(star8.verdict, Verdict::Stable);
        assert!(star8.spectral_radius <= 1.0 + RADIUS_SLACK);
        assert_eq!(star8.certificates.len(), 1);
        assert_eq!(star8.certificates[0].name, "gershgorin");

        let single4 = stability_report(
            &SystemConfig::<f64>::new(4, 1000.0).unwrap(),
            ReportMode::SingleHopEven,
            None,
        )
        .unwrap();
        assert_eq!(single4.verdict, Verdict::Stable);
        let hm = single4
            .certificates
            .iter()
            .find(|c| c.name == "hirst_macey")
            .unwrap();
        assert!(hm.satisfied && (hm.bound - 1.0).abs() <= 1e-12);

        let config = SystemConfig::<f64>::new(8, 1000.0).unwrap();
        assert!(matches!(
            stability_report(&config, ReportMode::General, None),
            Err(Error::Config(_))
        ));
        let c = PerceptionMatrix::complete(8).unwrap();
        let general = stability_report(&config, ReportMode::General, Some(&c)).unwrap();
        assert_eq!(general.verdict, Verdict::Stable);
        assert_eq!(general.mode.label(), "general");
    }

    #[test]
    fn report_margin_is_informational() {
        let report = stability_report(
            &SystemConfig::<f64>::new(6, 1000.0).unwrap(),
            ReportMode::SingleHopEven,
            None,
        )
        .unwrap();
        assert_abs_diff_eq!(
            report.margin(),
            1.0 - report.spectral_radius,
            epsilon = 1e-15
        );
    }
}
