//! Closed-form continuity bounds.

use crate::error::{Error, Result};

fn check_finite_nonneg(name: &str, x: f64) -> Result<()> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::InvalidArgument(format!("{name} must be a finite nonnegative number, got {x}")));
    }
    Ok(())
}

/// `h(x) = −x log₂ x − (1−x) log₂(1−x)` on `[0, 1]`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::InvalidArgument(format!("binary entropy needs 0 ≤ x ≤ 1, got {x}")));
    }
    Ok(eta(x)? + eta(1.0 - x)?)
}

/// `η(x) = −x log₂ x` with `η(0) = 0`.
pub fn eta(x: f64) -> Result<f64> {
    check_finite_nonneg("x", x)?;
    Ok(if x == 0.0 { 0.0 } else { -x * x.log2() })
}

/// Largest `ε` for which the near-additivity bound [`f1`] is stated.
pub fn f1_epsilon_limit() -> f64 {
    1.0 / (12.0 * std::f64::consts::E.powi(2))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct F1Bound {
    pub value: f64,
    /// `ε > 1/(12e²)`: the value is computed but the bound is not claimed there.
    pub out_of_range: bool,
}

/// `f₁(ε, n) = 2√(3ε) · n · log₂(d_A³) + η(2√(3ε))`.
pub fn f1(epsilon: f64, n: usize, d_a: usize) -> Result<F1Bound> {
    check_finite_nonneg("epsilon", epsilon)?;
    if d_a == 0 {
        return Err(Error::InvalidArgument("d_A must be ≥ 1".into()));
    }
    let x = 2.0 * (3.0 * epsilon).sqrt();
    let value = x * n as f64 * 3.0 * (d_a as f64).log2() + eta(x)?;
    Ok(F1Bound { value, out_of_range: epsilon > f1_epsilon_limit() })
}

/// `ε′ = 16√ε · log₂(Π dᵢ) + (m+1) · 2h(2√ε)` for `m = dims.len()` parts.
pub fn epsilon_prime(epsilon: f64, dims: &[usize]) -> Result<f64> {
    check_finite_nonneg("epsilon", epsilon)?;
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::InvalidArgument("dimensions must be nonempty and ≥ 1".into()));
    }
    let root = epsilon.sqrt();
    if 2.0 * root > 1.0 {
        return Err(Error::InvalidArgument(format!("epsilon {epsilon} too large: 2√ε > 1")));
    }
    let log_dim: f64 = dims.iter().map(|&d| (d as f64).log2()).sum();
    let m = dims.len() as f64;
    Ok(16.0 * root * log_dim + (m + 1.0) * 2.0 * binary_entropy(2.0 * root)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_entropy_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!(binary_entropy(1.5).is_err());
        assert!(binary_entropy(f64::NAN).is_err());
    }

    #[test]
    fn eta_values() {
        assert_eq!(eta(0.0).unwrap(), 0.0);
        assert_eq!(eta(0.5).unwrap(), 0.5);
        assert!(eta(-0.1).is_err());
    }

    #[test]
    fn epsilon_prime_value() {
        assert_eq!(epsilon_prime(1.0 / 16.0, &[2, 2]).unwrap(), 14.0);
        assert_eq!(epsilon_prime(0.0, &[3, 5, 7]).unwrap(), 0.0);
        assert!(epsilon_prime(0.5, &[2]).is_err());
        assert!(epsilon_prime(0.1, &[]).is_err());
    }

    #[test]
    fn f1_values() {
        for n in [1, 5, 100] {
            assert_eq!(f1(0.0, n, 4).unwrap(), F1Bound { value: 0.0, out_of_range: false });
        }
        let lim = f1_epsilon_limit();
        assert!(!f1(lim, 3, 2).unwrap().out_of_range);
        let over = f1(lim * 1.01, 3, 2).unwrap();
        assert!(over.out_of_range && over.value > 0.0);
        // ε = 1/12: 2√(3ε) = 1, so f₁ = n log₂ d_A³
        let b = f1(1.0 / 12.0, 2, 2).unwrap();
        assert!((b.value - 6.0).abs() < 1e-12);
        assert!(f1(-1.0, 1, 2).is_err());
    }
}
