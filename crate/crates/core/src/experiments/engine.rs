use nalgebra::{Matrix2, Matrix4, Matrix4x2};

use crate::error::{Error, Result};
use crate::gaussian::ModePreparation;
use crate::negativity::{self, NegativityReport};
use crate::quadratic::HamiltonianMatrices;

/// Product initial state, stored as deviations `B_m − I` from the vacuum on
/// the modes that carry them.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductState {
    n: usize,
    excitations: Vec<(usize, Matrix2<f64>)>,
}

impl ProductState {
    pub fn new(preps: &[ModePreparation]) -> Result<Self> {
        // Validates every preparation.
        crate::gaussian::initial_covariance(preps)?;
        let excitations = preps
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_vacuum_like())
            .map(|(k, p)| (k, p.block() - Matrix2::identity()))
            .collect();
        Ok(Self {
            n: preps.len(),
            excitations,
        })
    }

    pub fn excited_modes(&self) -> Vec<usize> {
        self.excitations.iter().map(|e| e.0).collect()
    }
}

/// Two-mode reductions of an evolving product state, for a fixed set of
/// pairs and times.
///
/// Rows of an orthogonal `E(t)` are orthonormal, so the reduced covariance of
/// pair `(a, b)` is `I + Σ_m K_m (B_m − I) K_mᵀ`, where `K_m` is the 4×2 block
/// of `E(t)` linking `(q_a, q_b, p_a, p_b)` to `(q_m, p_m)`. Only the blocks of
/// modes that can be excited are kept, so one propagation serves any number of
/// preparations that differ only on those modes.
#[derive(Debug, Clone)]
pub struct PairPropagation {
    n: usize,
    c: f64,
    times: Vec<f64>,
    pairs: Vec<(usize, usize)>,
    slot_of_mode: Vec<Option<usize>>,
    slots: usize,
    blocks: Vec<Matrix4x2<f64>>,
}

impl PairPropagation {
    /// `times` are in units of `ct`; physical time is `ct / c`.
    pub fn new(
        h: &HamiltonianMatrices,
        c: f64,
        times: &[f64],
        pairs: &[(usize, usize)],
        active: &[usize],
    ) -> Result<Self> {
        let modes = h.normal_modes()?;
        let n = modes.n();
        if c.is_nan() || c <= 0.0 {
            return Err(Error::InvalidParameter(format!("time unit must be positive, got {c}")));
        }
        for &(a, b) in pairs {
            crate::gaussian::check_modes(&[a, b], n)?;
        }
        let mut slot_of_mode = vec![None; n];
        for (slot, &m) in active.iter().enumerate() {
            crate::gaussian::check_modes(&[m], n)?;
            if slot_of_mode[m].replace(slot).is_some() {
                return Err(Error::InvalidModes(format!("active mode {m} listed twice")));
            }
        }

        let basis = modes.basis();
        let freqs = modes.frequencies();
        let mut blocks = Vec::with_capacity(times.len() * pairs.len() * active.len());
        let mut cos = vec![0.0; n];
        let mut sin = vec![0.0; n];
        for &ct in times {
            let t = ct / c;
            for k in 0..n {
                (sin[k], cos[k]) = (freqs[k] * t).sin_cos();
            }
            let entry = |i: usize, j: usize| {
                let mut cij = 0.0;
                let mut sij = 0.0;
                for k in 0..n {
                    let w = basis[(i, k)] * basis[(j, k)];
                    cij += w * cos[k];
                    sij += w * sin[k];
                }
                (cij, sij)
            };
            for &(a, b) in pairs {
                for &m in active {
                    let (ca, sa) = entry(a, m);
                    let (cb, sb) = entry(b, m);
                    blocks.push(Matrix4x2::new(ca, sa, cb, sb, -sa, ca, -sb, cb));
                }
            }
        }

        Ok(Self {
            n,
            c,
            times: times.to_vec(),
            pairs: pairs.to_vec(),
            slot_of_mode,
            slots: active.len(),
            blocks,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    /// Reduced `(q_a, q_b, p_a, p_b)` covariance at `times[ti]` for `pairs[pi]`.
    pub fn reduced(&self, ti: usize, pi: usize, state: &ProductState) -> Result<Matrix4<f64>> {
        if state.n != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: state.n,
            });
        }
        let base = (ti * self.pairs.len() + pi) * self.slots;
        let mut g = Matrix4::identity();
        for (m, dev) in &state.excitations {
            let slot = self.slot_of_mode[*m]
                .ok_or_else(|| Error::InvalidModes(format!("mode {m} is excited but was not propagated")))?;
            let k = &self.blocks[base + slot];
            g += k * dev * k.transpose();
        }
        Ok((g + g.transpose()) * 0.5)
    }

    pub fn report(&self, ti: usize, pi: usize, state: &ProductState) -> Result<NegativityReport> {
        let g = self.reduced(ti, pi, state)?;
        negativity::two_mode_report_fixed(&g, self.pairs[pi], self.times[ti] / self.c)
    }
}
