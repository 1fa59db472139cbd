//! Problem geometry: database of `N = 2^n` items split into `K = 2^(n-m)`
//! blocks of `b = 2^m` items.

use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Largest qubit count whose database size fits a `u64`.
pub const MAX_QUBITS: u32 = 62;

/// Validated `(n, m)` pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SearchSpace {
    n: u32,
    m: u32,
}

impl SearchSpace {
    /// Builds a search space with `1 <= n <= 62` and `0 <= m < n`.
    ///
    /// `m = 0` is admitted: every block holds a single item and partial search
    /// degenerates to full search. `m = n` (a single block) is rejected.
    pub fn new(n: u32, m: u32) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::Parameter(format!(
                "qubit count n = {n} outside 1..={MAX_QUBITS}"
            )));
        }
        if m >= n {
            return Err(Error::Parameter(format!(
                "block qubit count m = {m} must be smaller than n = {n}"
            )));
        }
        Ok(Self { n, m })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    /// Database size `N = 2^n`.
    pub fn database_size(&self) -> u64 {
        1u64 << self.n
    }

    /// Block size `b = 2^m`.
    pub fn block_size(&self) -> u64 {
        1u64 << self.m
    }

    /// Block count `K = 2^(n-m)`.
    pub fn block_count(&self) -> u64 {
        1u64 << (self.n - self.m)
    }

    pub fn angles<T: Real>(&self) -> Angles<T> {
        Angles::new(self)
    }
}

impl fmt::Display for SearchSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={}, m={}", self.n, self.m)
    }
}

/// `2^(-q/2)`: an exact power of two, times `1/√2` when `q` is odd.
pub(crate) fn inv_sqrt_pow2<T: Real>(q: u32) -> T {
    let even = T::of(2.0).powi(-((q / 2) as i32));
    if q % 2 == 1 {
        even * T::FRAC_1_SQRT_2()
    } else {
        even
    }
}

/// The three rotation angles of the model together with their sines and
/// cosines.
///
/// `sin θ1 = 1/√N`, `sin θ2 = 1/√b`, `sin γ = 1/√K`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Angles<T> {
    pub theta1: T,
    pub theta2: T,
    pub gamma: T,
    pub sin_theta1: T,
    pub cos_theta1: T,
    pub sin_theta2: T,
    pub cos_theta2: T,
    pub sin_gamma: T,
    pub cos_gamma: T,
}

impl<T: Real> Angles<T> {
    pub fn new(space: &SearchSpace) -> Self {
        let sin_theta1: T = inv_sqrt_pow2(space.n());
        let sin_theta2: T = inv_sqrt_pow2(space.m());
        let sin_gamma: T = inv_sqrt_pow2(space.n() - space.m());
        let cos_of = |s: T| (T::one() - s * s).max(T::zero()).sqrt();
        Self {
            theta1: sin_theta1.asin(),
            theta2: sin_theta2.asin(),
            gamma: sin_gamma.asin(),
            sin_theta1,
            cos_theta1: cos_of(sin_theta1),
            sin_theta2,
            cos_theta2: cos_of(sin_theta2),
            sin_gamma,
            cos_gamma: cos_of(sin_gamma),
        }
    }
}

/// Convenience wrapper matching the free-function style used elsewhere.
pub fn angles<T: Real>(space: &SearchSpace) -> Angles<T> {
    Angles::new(space)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_4;

    #[test]
    fn sizes() {
        let s = SearchSpace::new(8, 2).unwrap();
        assert_eq!(
            (s.database_size(), s.block_size(), s.block_count()),
            (256, 4, 64)
        );
        let s = SearchSpace::new(1, 0).unwrap();
        assert_eq!(
            (s.database_size(), s.block_size(), s.block_count()),
            (2, 1, 2)
        );
        let s = SearchSpace::new(30, 10).unwrap();
        assert_eq!(s.database_size(), 1 << 30);
        assert_eq!(s.block_size(), 1 << 10);
        assert_eq!(s.block_count(), 1 << 20);
        let s = SearchSpace::new(62, 61).unwrap();
        assert_eq!(s.block_size() * s.block_count(), s.database_size());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(SearchSpace::new(0, 0), Err(Error::Parameter(_))));
        assert!(matches!(SearchSpace::new(63, 1), Err(Error::Parameter(_))));
        assert!(matches!(SearchSpace::new(5, 5), Err(Error::Parameter(_))));
        assert!(matches!(SearchSpace::new(5, 9), Err(Error::Parameter(_))));
    }

    #[test]
    fn angle_values() {
        let a: Angles<f64> = SearchSpace::new(8, 2).unwrap().angles();
        assert!((a.sin_theta1 - 1.0 / 16.0).abs() < 1e-16);
        assert!((a.sin_theta2 - 0.5).abs() < 1e-16);
        assert!((a.sin_gamma - 0.125).abs() < 1e-16);

        let a: Angles<f64> = SearchSpace::new(2, 1).unwrap().angles();
        assert!((a.theta2 - FRAC_PI_4).abs() < 1e-15);
        assert!((a.gamma - FRAC_PI_4).abs() < 1e-15);

        let a: Angles<f64> = SearchSpace::new(8, 7).unwrap().angles();
        assert!((a.gamma - FRAC_PI_4).abs() < 1e-15);
        assert!((a.cos_gamma - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sine_identities_hold_for_every_space() {
        for n in 1..=MAX_QUBITS {
            for m in 0..n {
                let s = SearchSpace::new(n, m).unwrap();
                let a: Angles<f64> = s.angles();
                let rel = |x: f64| (x - 1.0).abs();
                assert!(rel(a.sin_theta1.powi(2) * s.database_size() as f64) <= 1e-14);
                assert!(rel(a.sin_theta2.powi(2) * s.block_size() as f64) <= 1e-14);
                assert!(rel(a.sin_gamma.powi(2) * s.block_count() as f64) <= 1e-14);
                assert!((a.sin_theta1 - a.sin_theta2 * a.sin_gamma).abs() <= 1e-14 * a.sin_theta1);
                for angle in [a.theta1, a.theta2, a.gamma] {
                    assert!(angle > 0.0 && angle <= std::f64::consts::FRAC_PI_2);
                }
            }
        }
    }

    #[test]
    fn exact_powers_of_two() {
        let a: Angles<f64> = SearchSpace::new(2, 1).unwrap().angles();
        assert_eq!(a.sin_theta1, 0.5);
        assert_eq!(a.sin_theta2, std::f64::consts::FRAC_1_SQRT_2);
        assert_eq!(a.sin_gamma, std::f64::consts::FRAC_1_SQRT_2);
        assert_eq!(inv_sqrt_pow2::<f64>(62), 2f64.powi(-31));
    }

    #[test]
    fn single_precision_angles() {
        let a: Angles<f32> = SearchSpace::new(8, 2).unwrap().angles();
        assert!((a.sin_theta1 - 0.0625).abs() < 1e-7);
    }
}
