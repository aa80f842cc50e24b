//! Exact results for the bare four-oscillator ring (`M = 2`) with both
//! references squeezed by the same `r` and relative angle `δ = φ₂ − φ₁`.
//!
//! The smallest symplectic eigenvalue of the partially transposed state of the
//! two hubs is
//!
//! ```text
//! ν² = |cos²(ct) + sin²(ct) [cosh 2r − sinh 2r |cos(δ/2)|]|
//! ```
//!
//! so the hubs become entangled at some time iff the bracket is below 1, i.e.
//! iff `r > 0` and `|cos(δ/2)| > (cosh 2r − 1)/sinh 2r = tanh r`. The verdict
//! does not involve the coupling constant.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalizationVerdict {
    pub r: f64,
    pub delta: f64,
    pub entangling: bool,
    /// `δ*(r)`: entangling for `|δ| < δ*` (mod 2π).
    pub threshold: f64,
}

/// Closed-form smallest symplectic eigenvalue of the transposed hub pair.
pub fn m2_symplectic_eigenvalue(r: f64, delta: f64, ct: f64) -> f64 {
    let (s, c) = ct.sin_cos();
    let bracket = (2.0 * r).cosh() - (2.0 * r).sinh() * (0.5 * delta).cos().abs();
    (c * c + s * s * bracket).abs().sqrt()
}

/// `tanh r`, the canonical right-hand side of the entanglement condition.
pub fn threshold_ratio(r: f64) -> f64 {
    r.tanh()
}

/// `(cosh 2r − 1)/sinh 2r`, algebraically equal to [`threshold_ratio`] for
/// `r > 0`. Overflows for `r ≳ 177`.
pub fn threshold_ratio_unreduced(r: f64) -> f64 {
    ((2.0 * r).cosh() - 1.0) / (2.0 * r).sinh()
}

/// Whether equal squeezing `r` at relative angle `delta` entangles the hubs.
/// Equality is non-entangling.
///
/// `|cos(δ/2)| > tanh r` is evaluated as `1 − |cos(δ/2)| < 1 − tanh r`, i.e.
/// `2 sin²(δ'/4) < 2e^{−2r}/(1 + e^{−2r})` with `δ'` wrapped into `[−π, π]`,
/// which stays resolvable when `tanh r` rounds to 1.
pub fn entanglement_condition(r: f64, delta: f64) -> LocalizationVerdict {
    // Below 1e-3 the unreduced form cancels; above 170 it overflows.
    debug_assert!(!(1e-3..170.0).contains(&r) || (threshold_ratio(r) - threshold_ratio_unreduced(r)).abs() < 1e-12);
    let wrapped = (delta + PI).rem_euclid(TAU) - PI;
    let gap = (0.25 * wrapped).sin().powi(2);
    let decay = (-2.0 * r).exp();
    let entangling = r > 0.0 && gap < decay / (1.0 + decay);
    let threshold = if r > 0.0 { 2.0 * threshold_ratio(r).acos() } else { PI };
    LocalizationVerdict {
        r,
        delta,
        entangling,
        threshold,
    }
}

/// `δ*(r) = 2 arccos(tanh r)`.
pub fn delta_threshold(r: f64) -> Result<f64> {
    if !(r > 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!("threshold needs r > 0, got {r}")));
    }
    Ok(2.0 * r.tanh().acos())
}

/// The non-entangling window `[δ*, 2π − δ*]` inside `[0, 2π)`.
pub fn forbidden_window(r: f64) -> Result<(f64, f64)> {
    let d = delta_threshold(r)?;
    Ok((d, TAU - d))
}

/// Largest squeezing that still entangles at angle `delta`: `atanh |cos(δ/2)|`.
/// `None` when every `r > 0` entangles (`δ ≡ 0 mod 2π`).
pub fn r_upper_bound(delta: f64) -> Option<f64> {
    let x = (0.5 * delta).cos().abs();
    if x >= 1.0 {
        None
    } else {
        Some(x.atanh())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn eigenvalue_anchor() {
        let nu = m2_symplectic_eigenvalue(1.0, 0.0, FRAC_PI_2);
        assert_abs_diff_eq!(nu, (-1.0f64).exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(nu, 0.3678794, epsilon = 1e-7);
    }

    #[test]
    fn eigenvalue_trivial_points() {
        for (r, d) in [(0.3, 0.0), (1.0, 2.0), (1.75, 4.0)] {
            assert_eq!(m2_symplectic_eigenvalue(r, d, 0.0), 1.0);
        }
        for (d, ct) in [(0.0, 0.4), (1.3, 2.2), (3.0, 17.0)] {
            assert_abs_diff_eq!(m2_symplectic_eigenvalue(0.0, d, ct), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn ratio_forms_agree() {
        for k in 1..=400 {
            let r = k as f64 * 0.01;
            assert_abs_diff_eq!(threshold_ratio(r), threshold_ratio_unreduced(r), epsilon = 1e-12);
        }
    }

    #[test]
    fn reported_thresholds() {
        assert_abs_diff_eq!(delta_threshold(1.0).unwrap(), 1.41005, epsilon = 1e-5);
        assert_abs_diff_eq!(delta_threshold(1.75).unwrap(), 0.68822, epsilon = 1e-5);
        let (lo, hi) = forbidden_window(1.0).unwrap();
        assert_abs_diff_eq!(lo, 1.41005, epsilon = 1e-5);
        assert_abs_diff_eq!(hi, 4.87313, epsilon = 1e-5);
        let (lo, hi) = forbidden_window(1.75).unwrap();
        assert_abs_diff_eq!(lo, 0.68822, epsilon = 1e-5);
        assert_abs_diff_eq!(hi, 5.59496, epsilon = 1e-5);
    }

    #[test]
    fn boundary_at_r_one() {
        let d = 1.41005;
        assert_abs_diff_eq!((d / 2.0f64).cos().abs(), 1.0f64.tanh(), epsilon = 1e-5);
        assert!(entanglement_condition(1.0, d - 1e-4).entangling);
        assert!(!entanglement_condition(1.0, d + 1e-4).entangling);
        assert!(entanglement_condition(1.0, -(d - 1e-4)).entangling);
    }

    #[test]
    fn boundary_eigenvalue_is_one() {
        let d = delta_threshold(0.9).unwrap();
        assert_eq!(entanglement_condition(0.9, d).threshold, d);
        assert_abs_diff_eq!(m2_symplectic_eigenvalue(0.9, d, FRAC_PI_2), 1.0, epsilon = 1e-12);
        assert!(!entanglement_condition(0.9, d + 1e-9).entangling);
        assert!(entanglement_condition(0.9, d - 1e-9).entangling);
    }

    #[test]
    fn strong_squeezing_at_zero_angle_still_entangles() {
        // tanh(20) rounds to 1 but cosh 40 − sinh 40 = e^{−40} < 1.
        assert!(entanglement_condition(20.0, 0.0).entangling);
        assert!(m2_symplectic_eigenvalue(20.0, 0.0, FRAC_PI_2) < 1.0);
        assert!(!entanglement_condition(20.0, 0.01).entangling);
    }

    #[test]
    fn verdict_threshold_range() {
        for r in [0.0, 1e-6, 0.5, 1.0, 3.0] {
            let t = entanglement_condition(r, 1.0).threshold;
            assert!(t > 0.0 && t <= PI);
        }
    }

    #[test]
    fn window_at_larger_squeezing() {
        for k in 1..200 {
            let d = 0.68823 + (5.59495 - 0.68823) * k as f64 / 200.0;
            assert!(!entanglement_condition(1.75, d).entangling, "δ = {d}");
        }
        assert!(entanglement_condition(1.75, 0.5).entangling);
    }

    #[test]
    fn unsqueezed_never_entangles() {
        for k in 0..64 {
            let d = k as f64 * 0.1;
            assert!(!entanglement_condition(0.0, d).entangling);
        }
    }

    #[test]
    fn threshold_is_monotone() {
        assert!(delta_threshold(0.0).is_err());
        assert!(delta_threshold(-1.0).is_err());
        assert_abs_diff_eq!(delta_threshold(1e-9).unwrap(), PI, epsilon = 1e-8);
        let mut prev = PI;
        for k in 1..300 {
            let d = delta_threshold(k as f64 * 0.01).unwrap();
            assert!(d < prev && d > 0.0);
            prev = d;
        }
    }

    #[test]
    fn condition_matches_eigenvalue_over_time() {
        for r in [0.25, 0.5, 1.0, 1.75, 2.0] {
            for k in 0..63 {
                let delta = k as f64 * 0.1;
                let verdict = entanglement_condition(r, delta);
                let dips = (0..10_000).any(|j| m2_symplectic_eigenvalue(r, delta, j as f64 * 1e-3 * TAU) < 1.0 - 1e-12);
                assert_eq!(dips, verdict.entangling, "r = {r}, δ = {delta}");
                if verdict.entangling {
                    assert!(m2_symplectic_eigenvalue(r, delta, FRAC_PI_2) < 1.0);
                }
            }
        }
    }

    #[test]
    fn symmetric_and_periodic() {
        for (r, d, ct) in [(0.7, 0.9, 1.3), (1.2, 2.4, 5.0), (1.75, 0.3, 0.2)] {
            let base = m2_symplectic_eigenvalue(r, d, ct);
            assert_abs_diff_eq!(base, m2_symplectic_eigenvalue(r, -d, ct), epsilon = 1e-14);
            assert_abs_diff_eq!(base, m2_symplectic_eigenvalue(r, d + TAU, ct), epsilon = 1e-13);
            let v = entanglement_condition(r, d).entangling;
            assert_eq!(v, entanglement_condition(r, -d).entangling);
            assert_eq!(v, entanglement_condition(r, d + TAU).entangling);
        }
    }

    #[test]
    fn upper_bound_on_squeezing() {
        assert!(r_upper_bound(0.0).is_none());
        assert_abs_diff_eq!(r_upper_bound(PI).unwrap(), 0.0, epsilon = 1e-15);
        let d = 2.0;
        let rmax = r_upper_bound(d).unwrap();
        assert!(entanglement_condition(rmax * 0.99, d).entangling);
        assert!(!entanglement_condition(rmax * 1.01, d).entangling);
    }
}
