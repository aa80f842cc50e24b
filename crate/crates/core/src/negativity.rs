//! Logarithmic negativity between two oscillators.
//!
//! Partial transposition of mode B acts on the covariance as `p_B → −p_B`.
//! The negativity is `N = −Σ_j ln min(1, ν_j)` over the symplectic eigenvalues
//! `ν_j` of the transposed two-mode covariance.

use nalgebra::allocator::Allocator;
use nalgebra::{DMatrix, DefaultAllocator, Dim, DimDiff, DimSub, Matrix4, OMatrix, SymmetricEigen, U1};
use num_complex::Complex;
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::gaussian::{self, CovarianceState};

/// Symplectic eigenvalues this close to 1 are treated as exactly 1.
pub const UNIT_CLAMP: f64 = 1e-12;
/// Relative tolerance when pairing `±ν` eigenvalues.
pub const PAIRING_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct NegativityReport {
    pub pair: (usize, usize),
    /// Symplectic eigenvalues of `γ^{T_B}`, ascending.
    pub nus: Vec<f64>,
    pub negativity: f64,
    pub t: f64,
}

impl NegativityReport {
    pub fn min_nu(&self) -> f64 {
        self.nus[0]
    }
}

fn require_two_modes(cov: &CovarianceState) -> Result<()> {
    if cov.n() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: cov.n(),
        });
    }
    Ok(())
}

/// `P γ P` with `P = diag(1, 1, 1, −1)` in `(q_A, q_B, p_A, p_B)` ordering.
pub fn partial_transpose(cov: &CovarianceState) -> Result<CovarianceState> {
    require_two_modes(cov)?;
    let mut g = cov.matrix().clone();
    flip_momentum(&mut g, 3);
    CovarianceState::new(g, cov.time())
}

fn flip_momentum(g: &mut DMatrix<f64>, row: usize) {
    for j in 0..g.ncols() {
        g[(row, j)] = -g[(row, j)];
        g[(j, row)] = -g[(j, row)];
    }
}

/// Symplectic spectrum, ascending.
///
/// For positive definite `γ` the matrix `i γ^{1/2} Ω γ^{1/2}` is Hermitian with
/// eigenvalues `±ν_j`, so only symmetric eigensolvers are involved.
pub fn symplectic_eigenvalues(cov: &CovarianceState) -> Result<Vec<f64>> {
    let asym = cov.symmetry_error();
    if asym > gaussian::SYMMETRY_TOL {
        return Err(Error::NotSymmetric(asym));
    }
    if cov.n() == 2 {
        let g = Matrix4::from_fn(|i, j| cov.matrix()[(i, j)]);
        return two_mode_spectrum(&g).map(Vec::from);
    }
    pair_moduli(hermitian_moduli(
        cov.matrix().clone(),
        &gaussian::symplectic_form(cov.n()),
    )?)
}

/// Stack-allocated two-mode version of [`symplectic_eigenvalues`].
pub fn two_mode_spectrum(g: &Matrix4<f64>) -> Result<[f64; 2]> {
    #[rustfmt::skip]
    let omega = Matrix4::new(
        0.0, 0.0, 1.0, 0.0,
        0.0, 0.0, 0.0, 1.0,
        -1.0, 0.0, 0.0, 0.0,
        0.0, -1.0, 0.0, 0.0,
    );
    let nus = pair_moduli(hermitian_moduli(*g, &omega)?)?;
    Ok([nus[0], nus[1]])
}

const EIGEN_MAX_ITER: usize = 1000;

fn hermitian_moduli<D>(g: OMatrix<f64, D, D>, omega: &OMatrix<f64, D, D>) -> Result<Vec<f64>>
where
    D: Dim + DimSub<U1>,
    DefaultAllocator: Allocator<D, D> + Allocator<D> + Allocator<DimDiff<D, U1>>,
{
    let eig = SymmetricEigen::try_new(g, f64::EPSILON, EIGEN_MAX_ITER)
        .ok_or_else(|| Error::Spectrum("covariance eigendecomposition did not converge".into()))?;
    if let Some(low) = eig.eigenvalues.iter().copied().find(|&l| l.is_nan() || l <= 0.0) {
        return Err(Error::Spectrum(format!(
            "covariance is not positive definite (eigenvalue {low})"
        )));
    }
    let roots = eig.eigenvalues.map(f64::sqrt);
    let half = &eig.eigenvectors * OMatrix::from_diagonal(&roots) * eig.eigenvectors.transpose();
    let h = (&half * omega * &half).map(|x| Complex::new(0.0, x));
    let spectrum = SymmetricEigen::try_new(h, f64::EPSILON, EIGEN_MAX_ITER)
        .ok_or_else(|| Error::Spectrum("symplectic eigendecomposition did not converge".into()))?;
    Ok(spectrum.eigenvalues.iter().map(|v| v.abs()).collect())
}

fn pair_moduli(mut moduli: Vec<f64>) -> Result<Vec<f64>> {
    moduli.sort_by(f64::total_cmp);
    moduli
        .chunks_exact(2)
        .map(|pair| {
            let (a, b) = (pair[0], pair[1]);
            if (a - b).abs() > PAIRING_RTOL * a.max(b) {
                Err(Error::Spectrum(format!("unpaired eigenvalue moduli {a} and {b}")))
            } else {
                Ok(0.5 * (a + b))
            }
        })
        .collect()
}

/// `−Σ ln min(1, ν)` with values within [`UNIT_CLAMP`] of 1 taken as 1.
pub fn negativity_from_spectrum(nus: &[f64]) -> f64 {
    nus.iter()
        .map(|&nu| {
            let nu = nu.abs();
            if nu >= 1.0 - UNIT_CLAMP {
                0.0
            } else {
                -nu.ln()
            }
        })
        .sum()
}

/// Logarithmic negativity of the oscillator pair `(a, b)`.
pub fn log_negativity(state: &CovarianceState, pair: (usize, usize)) -> Result<NegativityReport> {
    let (a, b) = pair;
    if a == b {
        return Err(Error::InvalidModes(format!("pair ({a}, {b}) repeats a mode")));
    }
    let two = gaussian::reduce(state, &[a, b])?;
    two_mode_report(&two, pair)
}

/// Negativity report for a state that is already the two-mode reduction of
/// `pair`.
pub fn two_mode_report(two: &CovarianceState, pair: (usize, usize)) -> Result<NegativityReport> {
    let transposed = partial_transpose(two)?;
    let nus = symplectic_eigenvalues(&transposed)?;
    let negativity = negativity_from_spectrum(&nus);
    Ok(NegativityReport {
        pair,
        nus,
        negativity,
        t: two.time(),
    })
}

/// [`two_mode_report`] on a raw `(q_A, q_B, p_A, p_B)` covariance, without
/// heap allocation for the matrices. The input is not symmetry-checked.
pub fn two_mode_report_fixed(g: &Matrix4<f64>, pair: (usize, usize), t: f64) -> Result<NegativityReport> {
    let mut transposed = *g;
    for j in 0..4 {
        transposed[(3, j)] = -transposed[(3, j)];
        transposed[(j, 3)] = -transposed[(j, 3)];
    }
    let nus = two_mode_spectrum(&transposed)?;
    Ok(NegativityReport {
        pair,
        nus: nus.to_vec(),
        negativity: negativity_from_spectrum(&nus),
        t,
    })
}

/// Two-mode negativity from symplectic invariants:
/// `ν∓² = (Δ̃ ∓ √(Δ̃² − 4 det γ))/2` with `Δ̃ = det A + det B − 2 det C`.
///
/// The invariants and the discriminant are evaluated in double-double
/// arithmetic: in plain `f64` the discriminant cancels when both transposed
/// eigenvalues are close to 1, and its square root turns `1e-16` errors into
/// `1e-8` errors in `ν`.
pub fn two_mode_negativity_closed_form(cov: &CovarianceState) -> Result<f64> {
    require_two_modes(cov)?;
    let g = cov.matrix();
    let e = |i: usize, j: usize| TwoFloat::from(g[(i, j)]);
    let det2 = |a: TwoFloat, b: TwoFloat, c: TwoFloat, d: TwoFloat| a * d - b * c;
    let det_a = det2(e(0, 0), e(0, 2), e(2, 0), e(2, 2));
    let det_b = det2(e(1, 1), e(1, 3), e(3, 1), e(3, 3));
    let det_c = det2(e(0, 1), e(0, 3), e(2, 1), e(2, 3));
    let det_g = det4(&e);
    let delta = det_a + det_b - det_c * 2.0;
    let disc = delta * delta - det_g * 4.0;
    let root = if disc > 0.0 { disc.sqrt() } else { TwoFloat::from(0.0) };
    let plus_sq = (delta + root) / 2.0;
    let minus_sq = det_g / plus_sq;
    let nu = |x: TwoFloat| f64::from(x).max(0.0).sqrt();
    Ok(negativity_from_spectrum(&[nu(minus_sq), nu(plus_sq)]))
}

/// 4×4 determinant by Laplace expansion in complementary 2×2 minors of the
/// top and bottom row pairs.
fn det4(e: &impl Fn(usize, usize) -> TwoFloat) -> TwoFloat {
    let minor = |r: usize, c0: usize, c1: usize| e(r, c0) * e(r + 1, c1) - e(r, c1) * e(r + 1, c0);
    let cols = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let signs = [1.0, -1.0, 1.0, 1.0, -1.0, 1.0];
    let mut det = TwoFloat::from(0.0);
    for (k, &(a, b)) in cols.iter().enumerate() {
        let (c, d) = cols[5 - k];
        det += minor(0, a, b) * minor(2, c, d) * signs[k];
    }
    det
}
