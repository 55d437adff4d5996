//! Embedded Markov chain of the queue length at departure epochs.
//!
//! The matrices here are built directly from the per-service arrival law and
//! solved numerically, giving a check on the closed forms that shares no code
//! with the series evaluators.

use std::io::{self, Write};

use crate::channel::check_theta;
use crate::error::{QueueError, Result};
use crate::scalar::Real;
use crate::special::poisson_pmf;

/// Largest chain solved by dense elimination; larger ones use power iteration.
pub const DENSE_LIMIT: usize = 2000;
const POWER_ITERATIONS: usize = 500_000;

/// Dense row-stochastic matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionMatrix<T> {
    size: usize,
    data: Vec<T>,
}

impl<T: Real> TransitionMatrix<T> {
    /// Wraps row-major entries; rows must be stochastic.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let size = rows.len();
        if size < 2 || rows.iter().any(|r| r.len() != size) {
            return Err(QueueError::Config(format!("matrix must be square with size >= 2, got {size} rows")));
        }
        let data: Vec<T> = rows.into_iter().flatten().collect();
        let m = TransitionMatrix { size, data };
        let tol = T::lit(1e-12).max(T::epsilon() * T::from_usize_lossy(4 * size));
        for (i, s) in m.row_sums().into_iter().enumerate() {
            if (s - T::one()).abs() > tol || m.row(i).iter().any(|&p| !(p >= T::zero())) {
                return Err(QueueError::Config(format!("row {i} is not a probability vector")));
            }
        }
        Ok(m)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.size + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.size..(i + 1) * self.size]
    }

    pub fn row_sums(&self) -> Vec<T> {
        (0..self.size)
            .map(|i| self.row(i).iter().fold(T::zero(), |a, &p| a + p))
            .collect()
    }

    /// `π P` for a row vector `π`.
    pub fn left_multiply(&self, pi: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.size];
        for (i, &w) in pi.iter().enumerate() {
            if w == T::zero() {
                continue;
            }
            for (o, &p) in out.iter_mut().zip(self.row(i)) {
                *o = *o + w * p;
            }
        }
        out
    }

    /// `‖π P - π‖_∞`.
    pub fn stationary_residual(&self, pi: &[T]) -> T {
        self.left_multiply(pi)
            .iter()
            .zip(pi)
            .fold(T::zero(), |m, (&a, &b)| m.max((a - b).abs()))
    }

    /// Writes one CSV line per row.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        for i in 0..self.size {
            let line: Vec<String> = self.row(i).iter().map(|p| p.to_string()).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }
}

/// Skip-free-to-the-left band: rows 0 and 1 start at column 0, row i >= 2 at
/// column i - 1. The last column absorbs the remaining mass of each row.
fn banded<T: Real>(size: usize, arrivals: &[T]) -> TransitionMatrix<T> {
    let mut data = vec![T::zero(); size * size];
    for i in 0..size {
        let base = i.saturating_sub(1);
        let mut head = T::zero();
        for j in base..size - 1 {
            let p = arrivals[j - base];
            data[i * size + j] = p;
            head = head + p;
        }
        data[i * size + size - 1] = (T::one() - head).max(T::zero());
    }
    TransitionMatrix { size, data }
}

fn check_size(size: usize) -> Result<()> {
    if size < 2 {
        return Err(QueueError::domain("size", size as f64, "size >= 2"));
    }
    Ok(())
}

/// Infinite-buffer chain truncated to `size` states.
pub fn build_infinite_truncated<T: Real>(theta: T, size: usize) -> Result<TransitionMatrix<T>> {
    let theta = check_theta(theta)?;
    check_size(size)?;
    let p: Vec<T> = (0..size).map(|k| poisson_pmf(k, theta)).collect();
    Ok(banded(size, &p))
}

/// Exact `(K+1) × (K+1)` chain of the finite buffer; the last column holds
/// `Pr{T >= m}` so that every row is stochastic.
pub fn build_finite<T: Real>(theta: T, buffer: usize) -> Result<TransitionMatrix<T>> {
    let theta = check_theta(theta)?;
    if buffer < 1 {
        return Err(QueueError::domain("K", buffer as f64, "K >= 1"));
    }
    let p: Vec<T> = (0..=buffer).map(|k| poisson_pmf(k, theta)).collect();
    Ok(banded(buffer + 1, &p))
}

/// Law of the number of Poisson(λ)-per-block arrivals during a Poisson(θ)
/// service (Neyman type A), `q_0 ..= q_{n-1}`.
///
/// Panjer recursion: `q_0 = exp(θ(e^{-λ} - 1))`, `q_n = (θ/n) Σ_{k=1}^n k f_k q_{n-k}`
/// with `f_k` the Poisson(λ) pmf.
pub fn neyman_type_a<T: Real>(theta: T, lambda: T, n: usize) -> Vec<T> {
    let f: Vec<T> = (0..n).map(|k| poisson_pmf(k, lambda)).collect();
    let mut q = Vec::with_capacity(n);
    if n == 0 {
        return q;
    }
    q.push((theta * (-lambda).exp_m1()).exp());
    for m in 1..n {
        let acc = (1..=m).fold(T::zero(), |a, k| a + T::from_usize_lossy(k) * f[k] * q[m - k]);
        q.push(theta * acc / T::from_usize_lossy(m));
    }
    q
}

/// Departure-epoch chain under Poisson(λ) arrivals per block, truncated to `size`.
pub fn build_poisson_arrivals<T: Real>(theta: T, lambda: T, size: usize) -> Result<TransitionMatrix<T>> {
    let theta = check_theta(theta)?;
    if !(lambda > T::zero()) || !lambda.is_finite() {
        return Err(QueueError::domain("lambda", lambda.as_f64(), "lambda > 0"));
    }
    check_size(size)?;
    Ok(banded(size, &neyman_type_a(theta, lambda, size)))
}

/// Block-start law of the finite buffer from the departure-epoch law `d` of
/// [`build_finite`]: `d_j / (d_0 + θ)` for `j < K`, with the top entry
/// collecting the remaining mass (queue lengths `K` and `K + 1`).
pub fn departure_to_time_average<T: Real>(departure: &[T], theta: T) -> Result<Vec<T>> {
    let theta = check_theta(theta)?;
    check_size(departure.len())?;
    let scale = (departure[0] + theta).recip();
    let k = departure.len() - 1;
    let mut out: Vec<T> = departure[..k].iter().map(|&d| d * scale).collect();
    let head = out.iter().fold(T::zero(), |a, &p| a + p);
    out.push(T::one() - head);
    Ok(out)
}

fn residual_target<T: Real>() -> T {
    T::lit(1e-12).max(T::epsilon() * T::lit(1e3))
}

/// Solves `A x = b` in place by Gaussian elimination with partial pivoting.
fn lu_solve<T: Real>(mut a: Vec<T>, mut b: Vec<T>, n: usize) -> Option<Vec<T>> {
    for col in 0..n {
        let pivot = (col..n).max_by(|&r, &s| {
            a[r * n + col]
                .abs()
                .partial_cmp(&a[s * n + col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if a[pivot * n + col] == T::zero() {
            return None;
        }
        if pivot != col {
            for j in 0..n {
                a.swap(col * n + j, pivot * n + j);
            }
            b.swap(col, pivot);
        }
        let diag = a[col * n + col];
        for r in col + 1..n {
            let factor = a[r * n + col] / diag;
            if factor == T::zero() {
                continue;
            }
            for j in col..n {
                a[r * n + j] = a[r * n + j] - factor * a[col * n + j];
            }
            b[r] = b[r] - factor * b[col];
        }
    }
    let mut x = vec![T::zero(); n];
    for r in (0..n).rev() {
        let s = (r + 1..n).fold(b[r], |acc, j| acc - a[r * n + j] * x[j]);
        x[r] = s / a[r * n + r];
    }
    Some(x)
}

fn dense_stationary<T: Real>(m: &TransitionMatrix<T>) -> Option<Vec<T>> {
    let n = m.size();
    // (Pᵀ - I) π = 0 with the last equation replaced by Σ π = 1.
    let mut a = vec![T::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            a[j * n + i] = m.get(i, j);
        }
        a[i * n + i] = a[i * n + i] - T::one();
    }
    for j in 0..n {
        a[(n - 1) * n + j] = T::one();
    }
    let mut b = vec![T::zero(); n];
    b[n - 1] = T::one();
    let mut pi = lu_solve(a, b, n)?;
    let total = pi.iter().fold(T::zero(), |s, &p| s + p);
    pi.iter_mut().for_each(|p| *p = *p / total);
    Some(pi)
}

fn power_stationary<T: Real>(m: &TransitionMatrix<T>, target: T) -> (Vec<T>, T) {
    let n = m.size();
    let half = T::lit(0.5);
    let mut pi = vec![T::from_usize_lossy(n).recip(); n];
    let mut residual = m.stationary_residual(&pi);
    for it in 0..POWER_ITERATIONS {
        // lazy chain (P + I)/2 shares π and is aperiodic
        let next = m.left_multiply(&pi);
        for (p, q) in pi.iter_mut().zip(next) {
            *p = half * (*p + q);
        }
        if it % 64 == 0 {
            residual = m.stationary_residual(&pi);
            if residual < target {
                break;
            }
        }
    }
    (pi, residual)
}

/// Stationary row vector of `m`: dense solve up to [`DENSE_LIMIT`] states,
/// power iteration beyond it or when the dense residual misses the target.
pub fn solve_stationary<T: Real>(m: &TransitionMatrix<T>) -> Result<Vec<T>> {
    let target = residual_target::<T>();
    if m.size() <= DENSE_LIMIT {
        if let Some(pi) = dense_stationary(m) {
            if m.stationary_residual(&pi) < target {
                return Ok(pi);
            }
        }
    }
    let (pi, residual) = power_stationary(m, target);
    if residual < target {
        Ok(pi)
    } else {
        Err(QueueError::Solve {
            residual: residual.as_f64(),
            target: target.as_f64(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinite_truncated_entries() {
        let t = 0.5_f64;
        let m = build_infinite_truncated(t, 50).unwrap();
        assert_eq!(m.get(0, 0), (-t).exp());
        assert_eq!(m.get(2, 0), 0.0);
        assert_eq!(m.get(2, 1), (-t).exp());
        assert_eq!(m.row(0), m.row(1));
        for s in m.row_sums() {
            assert!((s - 1.0).abs() < 1e-15);
        }
        // band shift on the non-absorbing columns
        for i in 2..10 {
            for j in (i - 1)..49 {
                assert_eq!(m.get(i, j), m.get(1, j - (i - 1)));
            }
        }
    }

    #[test]
    fn finite_last_row() {
        let m = build_finite(0.5_f64, 3).unwrap();
        assert_eq!(m.size(), 4);
        assert_eq!(m.row(0), m.row(1));
        assert!((m.get(3, 3) - (1.0 - (-0.5_f64).exp())).abs() < 1e-15);
        assert_eq!(m.get(3, 2), (-0.5_f64).exp());
        for s in m.row_sums() {
            assert!((s - 1.0).abs() < 1e-15);
        }
        assert!(build_finite(0.5_f64, 0).is_err());
    }

    #[test]
    fn neyman_type_a_head_and_normalization() {
        let q = neyman_type_a(0.5_f64, 1.0, 200);
        assert!((q[0] - (0.5 * ((-1.0_f64).exp() - 1.0)).exp()).abs() < 1e-15);
        let total: f64 = q.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn symmetric_two_state_chain() {
        let m = TransitionMatrix::from_rows(vec![vec![0.3_f64, 0.7], vec![0.7, 0.3]]).unwrap();
        let pi = solve_stationary(&m).unwrap();
        assert!((pi[0] - 0.5).abs() < 1e-15 && (pi[1] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_stochastic_rows() {
        assert!(TransitionMatrix::from_rows(vec![vec![0.3, 0.6], vec![0.5, 0.5]]).is_err());
        assert!(TransitionMatrix::from_rows(vec![vec![1.0]]).is_err());
    }

    #[test]
    fn power_iteration_agrees_with_dense() {
        let m = build_infinite_truncated(0.6_f64, 60).unwrap();
        let dense = dense_stationary(&m).unwrap();
        let (power, res) = power_stationary(&m, 1e-13);
        assert!(res < 1e-13);
        for (a, b) in dense.iter().zip(&power) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn truncation_size_robustness() {
        for &t in &[0.2_f64, 0.5, 0.8] {
            let a = solve_stationary(&build_infinite_truncated(t, 100).unwrap()).unwrap();
            let b = solve_stationary(&build_infinite_truncated(t, 200).unwrap()).unwrap();
            for k in 0..30 {
                assert!((a[k] - b[k]).abs() < 1e-9);
            }
            let m = build_infinite_truncated(t, 200).unwrap();
            assert!(m.stationary_residual(&b) < 1e-12);
        }
    }

    #[test]
    fn random_arrivals_differ_from_constant() {
        let p = build_poisson_arrivals(0.5_f64, 1.0, 20).unwrap();
        let c = build_infinite_truncated(0.5_f64, 20).unwrap();
        assert_ne!(p, c);
        assert!((p.get(0, 0) - c.get(0, 0)).abs() > 0.1);
        assert_eq!(p.row(0), p.row(1));
    }

    #[test]
    fn time_average_transform() {
        let d = solve_stationary(&build_finite(0.5_f64, 3).unwrap()).unwrap();
        let avg = departure_to_time_average(&d, 0.5).unwrap();
        assert!((avg.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(avg[0] < d[0]);
    }

    #[test]
    fn csv_dump_shape() {
        let m = build_finite(0.5_f64, 2).unwrap();
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.lines().all(|l| l.split(',').count() == 3));
    }
}
