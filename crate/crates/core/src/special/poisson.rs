use crate::scalar::Real;

use super::gamma::{ln_factorial, regularized_gamma_lower};

/// `θ^k e^{-θ} / k!`. Products for small `k`, log space otherwise.
pub fn poisson_pmf<T: Real>(k: usize, theta: T) -> T {
    if theta.is_nan() || theta < T::zero() {
        return T::nan();
    }
    if theta == T::zero() {
        return if k == 0 { T::one() } else { T::zero() };
    }
    if k <= 30 && theta < T::lit(100.0) {
        let mut p = (-theta).exp();
        for i in 1..=k {
            p = p * theta / T::from_usize_lossy(i);
        }
        return p;
    }
    (T::from_usize_lossy(k) * theta.ln() - theta - ln_factorial::<T>(k)).exp()
}

/// `Pr{X >= k}` for `X ~ Poisson(θ)`.
pub fn poisson_tail<T: Real>(k: usize, theta: T) -> T {
    if k == 0 {
        return T::one();
    }
    if theta <= T::zero() {
        return T::zero();
    }
    // Pr{X >= k} = P(k, θ), the regularized lower incomplete gamma.
    regularized_gamma_lower(T::from_usize_lossy(k), theta).unwrap_or_else(|_| {
        let head = (0..k).fold(T::zero(), |acc, j| acc + poisson_pmf(j, theta));
        (T::one() - head).max(T::zero())
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pmf_values() {
        for &theta in &[0.1_f64, 0.5, 0.9] {
            assert_eq!(poisson_pmf(0, theta), (-theta).exp());
        }
        assert!((poisson_pmf(1, 0.5_f64) - 0.5 * (-0.5_f64).exp()).abs() < 1e-16);
        assert_eq!(poisson_pmf(3, 0.0_f64), 0.0);
        assert_eq!(poisson_pmf(0, 0.0_f64), 1.0);
        assert!(poisson_pmf(2, -1.0_f64).is_nan());
    }

    #[test]
    fn pmf_normalizes() {
        let total: f64 = (0..=200).map(|k| poisson_pmf(k, 0.8)).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pmf_large_k_is_finite_and_continuous_across_switch() {
        let a: f64 = poisson_pmf(30, 20.0);
        let b: f64 = (30.0 * 20.0_f64.ln() - 20.0 - ln_factorial::<f64>(30)).exp();
        assert!((a - b).abs() < 1e-13 * a);
        let tiny: f64 = poisson_pmf(5000, 0.5);
        assert!(tiny >= 0.0 && tiny.is_finite());
    }

    #[test]
    fn tail_matches_complement_of_head() {
        for k in 0..8 {
            let head: f64 = (0..k).map(|j| poisson_pmf(j, 0.7)).sum();
            assert!((poisson_tail(k, 0.7) - (1.0 - head)).abs() < 1e-14, "k={k}");
        }
    }
}
