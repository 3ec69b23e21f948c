//! The tridiagonal β-ensemble and its soft-edge scaling.

use std::io::{self, Write};

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{stream_rng, STREAM_ENSEMBLE};
pub use crate::tridiag::TridiagonalMatrix;

fn check(n: usize, beta: f64) -> Result<()> {
    if n < 1 {
        return Err(Error::param("n", "must be at least 1"));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::param("beta", format!("must be positive, got {beta}")));
    }
    Ok(())
}

/// `χ_k` as the square root of a `Gamma(k/2, 2)` variate.
fn chi<R: Rng + ?Sized>(k: f64, rng: &mut R) -> f64 {
    Gamma::new(0.5 * k, 2.0).expect("positive shape").sample(rng).sqrt()
}

/// `diag[i] = N(0, 2)/√β`, `offdiag[j] = χ_{(n-1-j)β}/√β`.
///
/// The diagonal is drawn first, then the off-diagonal from the top down.
pub fn sample_matrix(n: usize, beta: f64, seed: u64) -> Result<TridiagonalMatrix> {
    check(n, beta)?;
    let mut rng = stream_rng(seed, STREAM_ENSEMBLE);
    let scale = beta.sqrt().recip();
    let diag = (0..n)
        .map(|_| {
            let g: f64 = StandardNormal.sample(&mut rng);
            std::f64::consts::SQRT_2 * g * scale
        })
        .collect();
    let offdiag = (0..n - 1).map(|j| chi((n - 1 - j) as f64 * beta, &mut rng) * scale).collect();
    TridiagonalMatrix::new(diag, offdiag)
}

/// All eigenvalues, ascending.
pub fn eigenvalues(m: &TridiagonalMatrix) -> Vec<f64> {
    m.eigenvalues()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeSample {
    pub n: usize,
    pub beta: f64,
    /// `n^{1/6}(2√n - λ)` for the largest eigenvalues, nondecreasing.
    pub scaled: Vec<f64>,
}

fn scale_edge(n: usize, largest: impl Iterator<Item = f64>) -> Vec<f64> {
    let nf = n as f64;
    let (factor, edge) = (nf.powf(1.0 / 6.0), 2.0 * nf.sqrt());
    largest.map(|l| factor * (edge - l)).collect()
}

/// Edge scaling of the `k` largest entries of `eigs`.
pub fn edge_scale(eigs: &[f64], n: usize, beta: f64, k: usize) -> Result<EdgeSample> {
    if k > n || k > eigs.len() {
        return Err(Error::param("k", format!("k = {k} exceeds n = {n}")));
    }
    let mut sorted = eigs.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    Ok(EdgeSample { n, beta, scaled: scale_edge(n, sorted.into_iter().take(k)) })
}

/// Samples a matrix and scales its `k` largest eigenvalues without solving
/// for the rest.
pub fn edge_sample(n: usize, beta: f64, k: usize, seed: u64) -> Result<EdgeSample> {
    if k == 0 || k > n {
        return Err(Error::param("k", format!("must be in 1..={n}")));
    }
    let m = sample_matrix(n, beta, seed)?;
    Ok(EdgeSample { n, beta, scaled: scale_edge(n, m.largest(k).into_iter()) })
}

/// Logarithm of the unnormalized joint eigenvalue density; `-∞` on ties.
pub fn ln_joint_density(lambdas: &[f64], beta: f64) -> f64 {
    let mut s = -0.25 * beta * lambdas.iter().map(|l| l * l).sum::<f64>();
    for (j, a) in lambdas.iter().enumerate() {
        for b in &lambdas[j + 1..] {
            s += beta * (a - b).abs().ln();
        }
    }
    s
}

/// `exp(-(β/4)Σλ²)·Π_{j<k}|λ_j - λ_k|^β`, without the normalizing constant.
pub fn joint_density(lambdas: &[f64], beta: f64) -> f64 {
    ln_joint_density(lambdas, beta).exp()
}

/// Writes `seed,n,beta,j,scaled_value` rows, `j` counting from 0 at the edge.
pub fn write_edge_csv<W: Write>(samples: &[(u64, EdgeSample)], mut out: W) -> io::Result<()> {
    writeln!(out, "seed,n,beta,j,scaled_value")?;
    for (seed, s) in samples {
        for (j, v) in s.scaled.iter().enumerate() {
            writeln!(out, "{seed},{},{},{j},{v:.16e}", s.n, s.beta)?;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_per_seed() {
        let a = sample_matrix(5, 2.0, 123).unwrap();
        assert_eq!(a, sample_matrix(5, 2.0, 123).unwrap());
        assert_ne!(a, sample_matrix(5, 2.0, 124).unwrap());
        assert!(a.offdiag().iter().all(|&v| v > 0.0));
        assert!(sample_matrix(0, 2.0, 1).is_err());
        assert!(sample_matrix(3, 0.0, 1).is_err());
    }

    #[test]
    fn small_beta_is_fine() {
        let m = sample_matrix(10, 0.1, 4).unwrap();
        assert!(m.offdiag().iter().all(|v| v.is_finite() && *v >= 0.0));
    }

    #[test]
    fn edge_arithmetic() {
        let s = edge_scale(&[1.0, 20.0], 100, 2.0, 1).unwrap();
        assert_eq!(s.scaled, vec![0.0]);
        let s = edge_scale(&[20.1, 3.0], 100, 2.0, 2).unwrap();
        assert!((s.scaled[0] + 0.215_443_469).abs() < 1e-8);
        assert!(s.scaled[0] <= s.scaled[1]);
        assert!(edge_scale(&[1.0], 1, 2.0, 2).is_err());
    }

    #[test]
    fn edge_sample_matches_full_solve() {
        let m = sample_matrix(50, 2.0, 9).unwrap();
        let full = edge_scale(&m.eigenvalues(), 50, 2.0, 3).unwrap();
        let fast = edge_sample(50, 2.0, 3, 9).unwrap();
        for (a, b) in full.scaled.iter().zip(&fast.scaled) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn density_values() {
        assert_eq!(joint_density(&[1.0, 1.0], 2.0), 0.0);
        assert_eq!(joint_density(&[0.0], 2.0), 1.0);
        let r = joint_density(&[-1.0, 1.0], 2.0) / joint_density(&[-2.0, 2.0], 2.0);
        assert!((r - 3f64.exp() / 4.0).abs() < 1e-12);
    }

    #[test]
    fn edge_csv() {
        let s = EdgeSample { n: 4, beta: 2.0, scaled: vec![0.5, 1.5] };
        let mut buf = Vec::new();
        write_edge_csv(&[(3, s)], &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "seed,n,beta,j,scaled_value");
        assert!(lines[2].starts_with("3,4,2,1,1.5"));
    }
}
