//! Gaussian states at the level of second moments.
//!
//! Covariances use `γ_ij = ⟨{ΔR_i, ΔR_j}⟩` with `R = (q_0, …, q_{n−1}, p_0, …, p_{n−1})`,
//! so the vacuum of every mode is the identity. First moments are never
//! tracked; they do not enter any entanglement quantity computed here.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, Matrix2, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadratic::Propagator;

/// Symmetry tolerance for covariance matrices.
pub const SYMMETRY_TOL: f64 = 1e-10;
/// Lower bound on the smallest eigenvalue of `γ + iΩ` for a physical state.
pub const PHYSICALITY_TOL: f64 = -1e-8;

/// Initial preparation of a single oscillator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ModePreparation {
    Vacuum,
    /// Squeezed vacuum `S(r e^{iφ})|0⟩` with `S†aS = a cosh r − a† e^{iφ} sinh r`.
    /// `φ = 0` squeezes `q`.
    Squeezed {
        r: f64,
        phi: f64,
    },
    Thermal {
        nbar: f64,
    },
    Coherent,
}

impl ModePreparation {
    /// Squeezed vacuum; the phase is reduced to `[0, 2π)`.
    pub fn squeezed(r: f64, phi: f64) -> Result<Self> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::InvalidParameter(format!("squeezing must be >= 0, got {r}")));
        }
        if !phi.is_finite() {
            return Err(Error::InvalidParameter(format!("phase must be finite, got {phi}")));
        }
        Ok(Self::Squeezed {
            r,
            phi: phi.rem_euclid(TAU),
        })
    }

    pub fn thermal(nbar: f64) -> Result<Self> {
        if !(nbar >= 0.0 && nbar.is_finite()) {
            return Err(Error::InvalidParameter(format!("occupation must be >= 0, got {nbar}")));
        }
        Ok(Self::Thermal { nbar })
    }

    fn validate(&self) -> Result<()> {
        match *self {
            Self::Squeezed { r, phi } => Self::squeezed(r, phi).map(|_| ()),
            Self::Thermal { nbar } => Self::thermal(nbar).map(|_| ()),
            Self::Vacuum | Self::Coherent => Ok(()),
        }
    }

    /// The mode's 2×2 covariance in its own `(q, p)` basis.
    pub fn block(&self) -> Matrix2<f64> {
        match *self {
            Self::Vacuum | Self::Coherent => Matrix2::identity(),
            Self::Thermal { nbar } => Matrix2::identity() * (2.0 * nbar + 1.0),
            Self::Squeezed { r, phi } => {
                let (ch, sh) = ((2.0 * r).cosh(), (2.0 * r).sinh());
                let (s, c) = phi.sin_cos();
                Matrix2::new(ch - sh * c, -sh * s, -sh * s, ch + sh * c)
            }
        }
    }

    /// True when the block is exactly the vacuum identity.
    pub fn is_vacuum_like(&self) -> bool {
        match *self {
            Self::Vacuum | Self::Coherent => true,
            Self::Squeezed { r, .. } => r == 0.0,
            Self::Thermal { nbar } => nbar == 0.0,
        }
    }

    pub fn is_pure(&self) -> bool {
        !matches!(*self, Self::Thermal { nbar } if nbar > 0.0)
    }
}

/// `Ω = [[0, I], [−I, 0]]` for `n` modes.
pub fn symplectic_form(n: usize) -> DMatrix<f64> {
    let mut omega = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        omega[(i, n + i)] = 1.0;
        omega[(n + i, i)] = -1.0;
    }
    omega
}

#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceState {
    gamma: DMatrix<f64>,
    time: f64,
}

impl CovarianceState {
    /// Wraps a covariance matrix, checking its shape and symmetry.
    pub fn new(gamma: DMatrix<f64>, time: f64) -> Result<Self> {
        if !gamma.is_square() || !gamma.nrows().is_multiple_of(2) || gamma.nrows() == 0 {
            return Err(Error::InvalidParameter(format!(
                "covariance must be 2n x 2n, got {}x{}",
                gamma.nrows(),
                gamma.ncols()
            )));
        }
        let asym = crate::quadratic::max_asymmetry(&gamma);
        if asym > SYMMETRY_TOL {
            return Err(Error::NotSymmetric(asym));
        }
        Ok(Self { gamma, time })
    }

    pub fn n(&self) -> usize {
        self.gamma.nrows() / 2
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.gamma
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn symmetry_error(&self) -> f64 {
        crate::quadratic::max_asymmetry(&self.gamma)
    }

    pub fn determinant(&self) -> f64 {
        self.gamma.determinant()
    }

    /// Smallest eigenvalue of the Hermitian matrix `γ + iΩ`.
    pub fn min_physicality_eigenvalue(&self) -> f64 {
        let n = self.n();
        let omega = symplectic_form(n);
        let h = DMatrix::from_fn(2 * n, 2 * n, |i, j| Complex64::new(self.gamma[(i, j)], omega[(i, j)]));
        SymmetricEigen::new(h).eigenvalues.min()
    }

    /// `γ + iΩ ≥ 0` up to [`PHYSICALITY_TOL`].
    pub fn is_physical(&self) -> bool {
        self.min_physicality_eigenvalue() >= PHYSICALITY_TOL
    }
}

/// Product-state covariance from per-mode preparations, at `t = 0`.
pub fn initial_covariance(preps: &[ModePreparation]) -> Result<CovarianceState> {
    if preps.is_empty() {
        return Err(Error::InvalidParameter("at least one mode is required".into()));
    }
    let n = preps.len();
    let mut gamma = DMatrix::zeros(2 * n, 2 * n);
    for (k, prep) in preps.iter().enumerate() {
        prep.validate()?;
        let b = prep.block();
        gamma[(k, k)] = b[(0, 0)];
        gamma[(k, n + k)] = b[(0, 1)];
        gamma[(n + k, k)] = b[(1, 0)];
        gamma[(n + k, n + k)] = b[(1, 1)];
    }
    Ok(CovarianceState { gamma, time: 0.0 })
}

/// `γ' = E γ Eᵀ`, resymmetrized.
pub fn evolve(state: &CovarianceState, e: &Propagator) -> Result<CovarianceState> {
    if state.n() != e.n() {
        return Err(Error::DimensionMismatch {
            expected: state.n(),
            found: e.n(),
        });
    }
    let em = e.matrix();
    let g = em * &state.gamma * em.transpose();
    let gamma = (&g + g.transpose()) * 0.5;
    Ok(CovarianceState {
        gamma,
        time: state.time + e.time(),
    })
}

/// Marginal covariance of `modes`, in the order given.
pub fn reduce(state: &CovarianceState, modes: &[usize]) -> Result<CovarianceState> {
    let n = state.n();
    check_modes(modes, n)?;
    let k = modes.len();
    let src = |a: usize| if a < k { modes[a] } else { n + modes[a - k] };
    let gamma = DMatrix::from_fn(2 * k, 2 * k, |i, j| state.gamma[(src(i), src(j))]);
    Ok(CovarianceState {
        gamma,
        time: state.time,
    })
}

pub(crate) fn check_modes(modes: &[usize], n: usize) -> Result<()> {
    if modes.is_empty() {
        return Err(Error::InvalidModes("empty mode list".into()));
    }
    for (i, &m) in modes.iter().enumerate() {
        if m >= n {
            return Err(Error::InvalidModes(format!("mode {m} out of range for {n} modes")));
        }
        if modes[..i].contains(&m) {
            return Err(Error::InvalidModes(format!("mode {m} selected twice")));
        }
    }
    Ok(())
}
