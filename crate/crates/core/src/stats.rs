//! Empirical distributions, two-sample Kolmogorov–Smirnov and moments.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDistribution {
    samples: Vec<f64>,
}

impl EmpiricalDistribution {
    pub fn new(mut samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::param("samples", "empty sample"));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("samples", "non-finite sample"));
        }
        samples.sort_by(f64::total_cmp);
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn count(&self) -> usize {
        self.samples.len()
    }

    /// `F(x) = #{s ≤ x} / n`.
    pub fn cdf(&self, x: f64) -> f64 {
        self.samples.partition_point(|&s| s <= x) as f64 / self.count() as f64
    }
}

/// `sup_x |F_a(x) - F_b(x)|`.
pub fn ks_distance(a: &EmpiricalDistribution, b: &EmpiricalDistribution) -> f64 {
    let (a, b) = (&a.samples, &b.samples);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut d = 0.0f64;
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Mean followed by central moments of order `2..=up_to`, population
/// convention (divide by `n`).
pub fn moments(d: &EmpiricalDistribution, up_to: usize) -> Result<Vec<f64>> {
    if up_to < 1 {
        return Err(Error::param("up_to", "must be at least 1"));
    }
    let n = d.count() as f64;
    let mean = d.samples.iter().sum::<f64>() / n;
    let mut out = vec![mean];
    for k in 2..=up_to {
        out.push(d.samples.iter().map(|x| (x - mean).powi(k as i32)).sum::<f64>() / n);
    }
    Ok(out)
}

/// Two-sample KS critical value `coefficient · √((n_a + n_b)/(n_a n_b))`;
/// `coefficient = 1.358` is the 5% level.
pub fn ks_critical(n_a: usize, n_b: usize, coefficient: f64) -> f64 {
    let (a, b) = (n_a as f64, n_b as f64);
    coefficient * ((a + b) / (a * b)).sqrt()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub ks: f64,
    pub n_a: usize,
    pub n_b: usize,
    pub mean_a: f64,
    pub mean_b: f64,
    pub var_a: f64,
    pub var_b: f64,
    /// Seeds (or seed bases) the two samples came from.
    pub seeds: Vec<u64>,
    pub moment_convention: String,
}

impl ComparisonReport {
    pub fn new(a: &EmpiricalDistribution, b: &EmpiricalDistribution, seeds: Vec<u64>) -> Self {
        let ma = moments(a, 2).expect("up_to ≥ 1");
        let mb = moments(b, 2).expect("up_to ≥ 1");
        Self {
            ks: ks_distance(a, b),
            n_a: a.count(),
            n_b: b.count(),
            mean_a: ma[0],
            mean_b: mb[0],
            var_a: ma[1],
            var_b: mb[1],
            seeds,
            moment_convention: "population".into(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(v: &[f64]) -> EmpiricalDistribution {
        EmpiricalDistribution::new(v.to_vec()).unwrap()
    }

    #[test]
    fn ks_extremes() {
        assert_eq!(ks_distance(&dist(&[1.0, 2.0, 3.0]), &dist(&[3.0, 1.0, 2.0])), 0.0);
        assert_eq!(ks_distance(&dist(&[0.0]), &dist(&[1.0])), 1.0);
        assert_eq!(ks_distance(&dist(&[0.0, 1.0]), &dist(&[1.0])), 0.5);
    }

    #[test]
    fn moment_conventions() {
        assert_eq!(moments(&dist(&[1.0, 1.0, 1.0]), 2).unwrap(), vec![1.0, 0.0]);
        assert_eq!(moments(&dist(&[-1.0, 1.0]), 3).unwrap(), vec![0.0, 1.0, 0.0]);
        assert!(moments(&dist(&[1.0]), 0).is_err());
    }

    #[test]
    fn rejects_empty_and_nan() {
        assert!(EmpiricalDistribution::new(vec![]).is_err());
        assert!(EmpiricalDistribution::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn cdf_and_critical_value() {
        let d = dist(&[1.0, 2.0, 2.0, 4.0]);
        assert_eq!(d.cdf(0.0), 0.0);
        assert_eq!(d.cdf(2.0), 0.75);
        assert_eq!(d.cdf(9.0), 1.0);
        assert!((ks_critical(2000, 2000, 1.358) - 0.042_94).abs() < 1e-4);
    }
}
