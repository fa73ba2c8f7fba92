//! Closed-form norm values and paving parameters.
//!
//! These are the exact constants the moment bounds and random-matrix
//! experiments converge to. Every function validates its domain and returns
//! an error outside it rather than extrapolating.

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClosedFormError {
    #[error("rank must be at least 1, got {k}")]
    RankTooSmall { k: usize },
    #[error("set size must be at least 1, got {n}")]
    SizeTooSmall { n: usize },
    #[error("coefficient count {got} does not match set size {n}")]
    CoefficientCountMismatch { n: usize, got: usize },
    #[error("trace {name} = {value} must lie in (0, 1/2]")]
    TraceOutOfRange { name: &'static str, value: f64 },
    #[error("traces must satisfy tau_q <= tau_p, got tau_p = {tau_p}, tau_q = {tau_q}")]
    TracesOutOfOrder { tau_p: f64, tau_q: f64 },
    #[error("block count must be at least 1, got {n}")]
    BlockCountTooSmall { n: usize },
    #[error("epsilon = {epsilon} must be positive")]
    EpsilonOutOfRange { epsilon: f64 },
    #[error("value {value} for {name} must be finite")]
    NotFinite { name: &'static str, value: f64 },
}

fn check_finite(name: &'static str, value: f64) -> Result<f64, ClosedFormError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(ClosedFormError::NotFinite { name, value })
    }
}

/// Norm of the walk operator `sum (g_i + g_i^-1)` on the free group of rank
/// `k`: `2 sqrt(2k - 1)`.
pub fn kesten_norm(k: usize) -> Result<f64, ClosedFormError> {
    if k < 1 {
        return Err(ClosedFormError::RankTooSmall { k });
    }
    Ok(2.0 * ((2 * k - 1) as f64).sqrt())
}

/// Norm of `sum_{i=1}^n g_i` for a Leinert set of size `n`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct LeinertNorm {
    pub value: f64,
    /// `n = 1` has no alternating products, so the Leinert condition is
    /// vacuous; the formula still returns `2 sqrt(0) = 0` as stated, but a
    /// single unitary has norm 1. Callers should not treat the vacuous value
    /// as a norm.
    pub vacuous: bool,
}

/// `2 sqrt(n - 1)`, the norm of the sum over a Leinert set of size `n >= 2`.
pub fn leinert_norm(n: usize) -> Result<LeinertNorm, ClosedFormError> {
    if n < 1 {
        return Err(ClosedFormError::SizeTooSmall { n });
    }
    Ok(LeinertNorm { value: 2.0 * ((n - 1) as f64).sqrt(), vacuous: n == 1 })
}

/// Norm bound `2 sqrt(1 - 1/n) * sqrt(sum |alpha_i|^2)` for a weighted sum
/// `sum alpha_i g_i` over a Leinert set of size `n`.
///
/// At unit coefficient vectors this is `2 sqrt(1 - 1/n)`; scaling is
/// included so callers can pass raw coefficients.
pub fn coefficient_bound(n: usize, alphas: &[Complex64]) -> Result<f64, ClosedFormError> {
    if n < 1 {
        return Err(ClosedFormError::SizeTooSmall { n });
    }
    if alphas.len() != n {
        return Err(ClosedFormError::CoefficientCountMismatch { n, got: alphas.len() });
    }
    let mut sum_sq = 0.0;
    for a in alphas {
        check_finite("alpha", a.norm_sqr())?;
        sum_sq += a.norm_sqr();
    }
    Ok(2.0 * (1.0 - 1.0 / n as f64).sqrt() * sum_sq.sqrt())
}

fn check_trace(name: &'static str, value: f64) -> Result<(), ClosedFormError> {
    check_finite(name, value)?;
    if value <= 0.0 || value > 0.5 {
        return Err(ClosedFormError::TraceOutOfRange { name, value });
    }
    Ok(())
}

/// Norm of `q p q` for free projections `p`, `q` with traces
/// `0 < tau_q <= tau_p <= 1/2`:
///
/// ```text
/// tau_p + tau_q - 2 tau_p tau_q + 2 sqrt(tau_p (1 - tau_p) tau_q (1 - tau_q))
/// ```
pub fn qpq_norm(tau_p: f64, tau_q: f64) -> Result<f64, ClosedFormError> {
    check_trace("tau_p", tau_p)?;
    check_trace("tau_q", tau_q)?;
    if tau_q > tau_p {
        return Err(ClosedFormError::TracesOutOfOrder { tau_p, tau_q });
    }
    Ok(tau_p + tau_q - 2.0 * tau_p * tau_q
        + 2.0 * (tau_p * (1.0 - tau_p) * tau_q * (1.0 - tau_q)).sqrt())
}

/// Norm of `q v q` for a trace-zero symmetry `v` free from a projection `q`
/// of trace `0 < tau_q <= 1/2`: `2 sqrt(tau_q (1 - tau_q))`.
pub fn qvq_norm(tau_q: f64) -> Result<f64, ClosedFormError> {
    check_trace("tau_q", tau_q)?;
    Ok(2.0 * (tau_q * (1.0 - tau_q)).sqrt())
}

/// The optimal paving bound for `n` blocks.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PavingBound {
    pub n: usize,
    /// `2 sqrt(n - 1) / n`: the best possible bound on `||sum p_i x p_i||`
    /// over trace-`1/n` paving projections, for `x` a contraction with
    /// zero diagonal blocks in the free model.
    pub bound: f64,
    /// `n = 1` pavings are the identity map; the formula value 0 is not a
    /// norm statement there.
    pub vacuous: bool,
}

/// `2 sqrt(n - 1) / n`.
pub fn paving_norm_bound(n: usize) -> Result<PavingBound, ClosedFormError> {
    if n < 1 {
        return Err(ClosedFormError::BlockCountTooSmall { n });
    }
    Ok(PavingBound {
        n,
        bound: 2.0 * ((n - 1) as f64).sqrt() / n as f64,
        vacuous: n == 1,
    })
}

/// The block count bracketed by a target paving norm.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PavingSize {
    pub epsilon: f64,
    /// The unique `n` with `2 / sqrt(n) <= epsilon < 2 / sqrt(n - 1)`.
    pub n: usize,
    /// `2 / sqrt(n)`: at most `epsilon`, so `n` blocks reach the target
    /// (`paving_norm_bound(n) <= 2 / sqrt(n)`).
    pub sufficient: f64,
    /// `2 / sqrt(n - 1)`: strictly above `epsilon`, so the bracketing picks
    /// out `n` uniquely; infinite at `n = 1`.
    pub necessary: f64,
    pub vacuous: bool,
}

/// Block count for a target paving norm: the unique `n` with
/// `2 / sqrt(n) <= epsilon < 2 / sqrt(n - 1)`. It satisfies
/// `n < 4 / epsilon^2 + 1` and `paving_norm_bound(n) <= epsilon`.
///
/// `epsilon >= 2` needs no paving at all, so the answer is `n = 1` with the
/// vacuity flag set, matching [`paving_norm_bound`].
pub fn paving_size(epsilon: f64) -> Result<PavingSize, ClosedFormError> {
    check_finite("epsilon", epsilon)?;
    if epsilon <= 0.0 {
        return Err(ClosedFormError::EpsilonOutOfRange { epsilon });
    }
    // 4 / eps^2 rounded up is the candidate; the walks absorb float rounding
    // at exact-boundary targets.
    let mut n = (4.0 / (epsilon * epsilon)).ceil().max(1.0) as usize;
    while 2.0 / (n as f64).sqrt() > epsilon {
        n += 1;
    }
    while n > 1 && 2.0 / ((n - 1) as f64).sqrt() <= epsilon {
        n -= 1;
    }
    let result = PavingSize {
        epsilon,
        n,
        sufficient: 2.0 / (n as f64).sqrt(),
        necessary: if n > 1 { 2.0 / ((n - 1) as f64).sqrt() } else { f64::INFINITY },
        vacuous: n == 1,
    };
    debug_assert!(result.sufficient <= epsilon && epsilon < result.necessary);
    debug_assert!(2.0 * ((n - 1) as f64).sqrt() / n as f64 <= epsilon);
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kesten_values() {
        assert!(kesten_norm(0).is_err());
        assert_eq!(kesten_norm(1).unwrap(), 2.0);
        assert!((kesten_norm(2).unwrap() - 2.0 * 3.0_f64.sqrt()).abs() < 1e-15);
        assert!((kesten_norm(5).unwrap() - 6.0).abs() < 1e-15);
    }

    #[test]
    fn leinert_values() {
        assert!(leinert_norm(0).is_err());
        let single = leinert_norm(1).unwrap();
        assert_eq!(single.value, 0.0);
        assert!(single.vacuous);
        let four = leinert_norm(4).unwrap();
        assert!(!four.vacuous);
        assert!((four.value - 2.0 * 3.0_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn coefficient_bound_matches_uniform_identity() {
        // With unit-norm coefficient vectors the bound equals
        // 2 sqrt(n - 1) / sqrt(n): the per-coefficient form of the set bound.
        for n in 1..8usize {
            let uniform = vec![Complex64::new(1.0 / (n as f64).sqrt(), 0.0); n];
            let bound = coefficient_bound(n, &uniform).unwrap();
            let direct = 2.0 * ((n - 1) as f64).sqrt() / (n as f64).sqrt();
            assert!((bound - direct).abs() < 1e-12, "n = {n}");
        }
        // Scaling: doubling coefficients doubles the bound.
        let alphas = [Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let doubled: Vec<Complex64> = alphas.iter().map(|a| a * 2.0).collect();
        let b1 = coefficient_bound(2, &alphas).unwrap();
        let b2 = coefficient_bound(2, &doubled).unwrap();
        assert!((b2 - 2.0 * b1).abs() < 1e-12);
        assert!(coefficient_bound(3, &alphas).is_err());
    }

    #[test]
    fn qpq_values() {
        // Equal traces 1/2 give exactly 1.
        assert!((qpq_norm(0.5, 0.5).unwrap() - 1.0).abs() < 1e-15);
        // tau_p = 1/2, tau_q = 1/3 gives 1/2 + sqrt(2)/3.
        let v = qpq_norm(0.5, 1.0 / 3.0).unwrap();
        assert!((v - (0.5 + 2.0_f64.sqrt() / 3.0)).abs() < 1e-12);
        assert!((v - 0.971_404_520_791_031_7).abs() < 1e-12);
        // Domain errors.
        assert!(qpq_norm(0.6, 0.3).is_err());
        assert!(qpq_norm(0.5, 0.0).is_err());
        assert!(qpq_norm(0.3, 0.5).is_err());
        assert!(qpq_norm(f64::NAN, 0.3).is_err());
    }

    #[test]
    fn qvq_values() {
        assert!((qvq_norm(0.5).unwrap() - 1.0).abs() < 1e-15);
        let third = qvq_norm(1.0 / 3.0).unwrap();
        assert!((third - 2.0 * 2.0_f64.sqrt() / 3.0).abs() < 1e-12);
        assert!(qvq_norm(0.0).is_err());
        assert!(qvq_norm(0.51).is_err());
    }

    #[test]
    fn paving_bound_values() {
        assert!(paving_norm_bound(0).is_err());
        let one = paving_norm_bound(1).unwrap();
        assert_eq!(one.bound, 0.0);
        assert!(one.vacuous);
        let three = paving_norm_bound(3).unwrap();
        assert!((three.bound - 2.0 * 2.0_f64.sqrt() / 3.0).abs() < 1e-15);
        assert!(!three.vacuous);
        // The bound decreases in n beyond n = 2.
        let mut prev = paving_norm_bound(2).unwrap().bound;
        for n in 3..40 {
            let cur = paving_norm_bound(n).unwrap().bound;
            assert!(cur < prev);
            prev = cur;
        }
    }

    #[test]
    fn paving_size_bracketing() {
        // epsilon = 1 needs n = 4: 2/sqrt(4) = 1 <= 1 < 2/sqrt(3) ~ 1.155.
        let s = paving_size(1.0).unwrap();
        assert_eq!(s.n, 4);
        assert!(!s.vacuous);
        assert!((s.sufficient - 1.0).abs() < 1e-15);
        assert!((s.necessary - 2.0 / 3.0_f64.sqrt()).abs() < 1e-15);
        // epsilon = 1/2 needs n = 16.
        assert_eq!(paving_size(0.5).unwrap().n, 16);
        // Both bracketing sides and the block-count ceiling hold on a spread
        // of targets.
        for &eps in &[1.9, 1.2, 0.9, 0.7, 0.31, 0.11, 0.03] {
            let s = paving_size(eps).unwrap();
            assert!(2.0 / (s.n as f64).sqrt() <= eps, "eps = {eps}");
            if s.n > 1 {
                assert!(eps < 2.0 / ((s.n - 1) as f64).sqrt(), "eps = {eps}");
            }
            assert!((s.n as f64) < 4.0 / (eps * eps) + 1.0, "eps = {eps}");
            assert!(paving_norm_bound(s.n).unwrap().bound <= eps, "eps = {eps}");
        }
        // Degenerate and invalid inputs.
        assert_eq!(paving_size(2.0).unwrap().n, 1);
        assert!(paving_size(2.0).unwrap().vacuous);
        assert!(paving_size(2.5).unwrap().vacuous);
        assert!(paving_size(0.0).is_err());
        assert!(paving_size(f64::NAN).is_err());
    }

    #[test]
    fn paving_size_is_monotone_and_meets_target() {
        // Block count never increases with a looser target, and the realized
        // bound always meets the target it was sized for.
        let mut prev = usize::MAX;
        for k in 1..=400usize {
            let eps = k as f64 / 200.0;
            let s = paving_size(eps).unwrap();
            assert!(s.n <= prev, "eps = {eps}");
            assert!(paving_norm_bound(s.n).unwrap().bound <= eps, "eps = {eps}");
            prev = s.n;
        }
    }

    #[test]
    fn coefficient_bound_squares_to_set_bound() {
        // (2 sqrt(1 - 1/n))^2 = 4 (n - 1) / n = (2 sqrt(n - 1) / sqrt(n))^2
        // ties the per-coefficient constant to the set norm constant.
        for n in 2..20usize {
            let unit = vec![Complex64::new(1.0, 0.0); n];
            let per_unit = coefficient_bound(n, &unit).unwrap() / (n as f64).sqrt();
            let set_const = leinert_norm(n).unwrap().value / (n as f64).sqrt();
            assert!((per_unit - set_const).abs() < 1e-12);
            assert!((per_unit * per_unit - 4.0 * (n as f64 - 1.0) / n as f64).abs() < 1e-12);
        }
    }
}
