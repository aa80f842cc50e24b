//! Quadratic Hamiltonian of an oscillator network and its symplectic
//! propagator.
//!
//! With `ħ = m = ω = 1` every oscillator contributes `(p² + q²)/2` and every
//! edge of weight `w` contributes `(w/4)[(q_i − q_j)² + (p_i − p_j)²]`, so
//! `H = ½(qᵀVq + pᵀTp)` with `V = T = I + ½ Σ_e w_e L_e`.
//!
//! Under RWA the propagator has the closed block form
//! `E(t) = [[cos Vt, sin Vt], [−sin Vt, cos Vt]]`, evaluated through the
//! eigendecomposition of `V`, which is computed once per Hamiltonian.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::network::OscillatorNetwork;

/// Maximum `|A − Aᵀ|` accepted for a user-supplied quadratic form.
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct HamiltonianMatrices {
    v: DMatrix<f64>,
    t: DMatrix<f64>,
    modes: OnceLock<NormalModes>,
}

impl HamiltonianMatrices {
    /// Wraps explicit position and momentum forms. Both must be square, of the
    /// same size and symmetric to [`SYMMETRY_TOL`].
    pub fn from_matrices(v: DMatrix<f64>, t: DMatrix<f64>) -> Result<Self> {
        let n = v.nrows();
        for m in [&v, &t] {
            if !m.is_square() {
                return Err(Error::InvalidParameter("quadratic form must be square".into()));
            }
            if m.nrows() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: m.nrows(),
                });
            }
            let asym = max_asymmetry(m);
            if asym > SYMMETRY_TOL {
                return Err(Error::NotSymmetric(asym));
            }
        }
        Ok(Self {
            v,
            t,
            modes: OnceLock::new(),
        })
    }

    pub fn n(&self) -> usize {
        self.v.nrows()
    }

    pub fn v(&self) -> &DMatrix<f64> {
        &self.v
    }

    pub fn t(&self) -> &DMatrix<f64> {
        &self.t
    }

    pub fn is_rwa(&self) -> bool {
        self.v == self.t
    }

    /// Cached eigendecomposition of `V`. Fails outside the RWA regime.
    pub fn normal_modes(&self) -> Result<&NormalModes> {
        if !self.is_rwa() {
            return Err(Error::NotRwa);
        }
        Ok(self.modes.get_or_init(|| NormalModes::new(&self.v)))
    }
}

pub fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i + 1..n {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// `V = I + ½ Σ_e w_e L_e`, `T = V`.
pub fn assemble(net: &OscillatorNetwork) -> HamiltonianMatrices {
    let n = net.len();
    let mut v = DMatrix::identity(n, n);
    for e in net.edges() {
        let half = 0.5 * e.weight;
        v[(e.a, e.a)] += half;
        v[(e.b, e.b)] += half;
        v[(e.a, e.b)] -= half;
        v[(e.b, e.a)] -= half;
    }
    let t = v.clone();
    HamiltonianMatrices {
        v,
        t,
        modes: OnceLock::new(),
    }
}

/// Eigenbasis `V = O diag(λ) Oᵀ` of the quadratic form.
#[derive(Debug, Clone)]
pub struct NormalModes {
    basis: DMatrix<f64>,
    frequencies: DVector<f64>,
}

impl NormalModes {
    fn new(v: &DMatrix<f64>) -> Self {
        let eig = SymmetricEigen::new(v.clone());
        Self {
            basis: eig.eigenvectors,
            frequencies: eig.eigenvalues,
        }
    }

    pub fn n(&self) -> usize {
        self.frequencies.len()
    }

    pub fn frequencies(&self) -> &DVector<f64> {
        &self.frequencies
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    /// Rows `rows` of `cos(Vt)` and `sin(Vt)`, each `rows.len() × n`.
    pub fn cos_sin_rows(&self, t: f64, rows: &[usize]) -> (DMatrix<f64>, DMatrix<f64>) {
        let n = self.n();
        let (cos, sin): (Vec<f64>, Vec<f64>) = self
            .frequencies
            .iter()
            .map(|&l| {
                let (s, c) = (l * t).sin_cos();
                (c, s)
            })
            .unzip();
        let mut c_rows = DMatrix::zeros(rows.len(), n);
        let mut s_rows = DMatrix::zeros(rows.len(), n);
        for (r, &i) in rows.iter().enumerate() {
            for k in 0..n {
                let oik = self.basis[(i, k)];
                let (ck, sk) = (oik * cos[k], oik * sin[k]);
                for j in 0..n {
                    let ojk = self.basis[(j, k)];
                    c_rows[(r, j)] += ck * ojk;
                    s_rows[(r, j)] += sk * ojk;
                }
            }
        }
        (c_rows, s_rows)
    }

    pub fn propagator(&self, t: f64) -> Propagator {
        let n = self.n();
        let all: Vec<usize> = (0..n).collect();
        let (c, s) = self.cos_sin_rows(t, &all);
        let mut e = DMatrix::zeros(2 * n, 2 * n);
        e.view_mut((0, 0), (n, n)).copy_from(&c);
        e.view_mut((0, n), (n, n)).copy_from(&s);
        e.view_mut((n, 0), (n, n)).copy_from(&(-&s));
        e.view_mut((n, n), (n, n)).copy_from(&c);
        Propagator { t, e }
    }

    /// Rows of `E(t)` for the phase-space coordinates of `modes`, as a
    /// `2k × 2n` matrix ordered `(q_{m0}, …, q_{mk}, p_{m0}, …, p_{mk})`.
    pub fn propagator_rows(&self, t: f64, modes: &[usize]) -> DMatrix<f64> {
        let n = self.n();
        let k = modes.len();
        let (c, s) = self.cos_sin_rows(t, modes);
        let mut rows = DMatrix::zeros(2 * k, 2 * n);
        rows.view_mut((0, 0), (k, n)).copy_from(&c);
        rows.view_mut((0, n), (k, n)).copy_from(&s);
        rows.view_mut((k, 0), (k, n)).copy_from(&(-&s));
        rows.view_mut((k, n), (k, n)).copy_from(&c);
        rows
    }
}

/// Symplectic, orthogonal `2n × 2n` evolution matrix `E(t)` in
/// (all-q, all-p) ordering.
#[derive(Debug, Clone, PartialEq)]
pub struct Propagator {
    t: f64,
    e: DMatrix<f64>,
}

impl Propagator {
    pub fn n(&self) -> usize {
        self.e.nrows() / 2
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.e
    }

    /// `max |E Eᵀ − I|`.
    pub fn orthogonality_error(&self) -> f64 {
        let dim = self.e.nrows();
        (&self.e * self.e.transpose() - DMatrix::<f64>::identity(dim, dim)).amax()
    }

    /// `max |E Ω Eᵀ − Ω|`.
    pub fn symplecticity_error(&self) -> f64 {
        let omega = crate::gaussian::symplectic_form(self.n());
        (&self.e * &omega * self.e.transpose() - omega).amax()
    }
}

/// `E(t)` for an RWA Hamiltonian.
pub fn propagator(h: &HamiltonianMatrices, t: f64) -> Result<Propagator> {
    if !t.is_finite() {
        return Err(Error::InvalidParameter(format!("time must be finite, got {t}")));
    }
    Ok(h.normal_modes()?.propagator(t))
}
