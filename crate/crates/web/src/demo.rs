use serde::Serialize;
use stochairy::ensemble;
use stochairy::form;
use stochairy::noise;
use stochairy::operator::{coupling_for_beta, OperatorSpec, Potential};
use stochairy::prufer;
use stochairy::rng::derive_seed;
use stochairy::stats::{self, EmpiricalDistribution};
use stochairy::{Error, Result};

/// Points kept per phase curve.
const CURVE_POINTS: usize = 400;

/// Mean and variance of `-TW₂`, the β = 2 limit of the scaled edge.
const EDGE_LIMIT_BETA2: (f64, f64) = (1.771_086_807, 0.813_194_792);

#[derive(Debug, Clone, Serialize)]
pub struct PhaseCurve {
    pub lambda: f64,
    pub theta: Vec<f64>,
    pub count_below: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct PhaseCurves {
    pub t: Vec<f64>,
    pub curves: Vec<PhaseCurve>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Spectrum {
    pub truncation: f64,
    pub prufer: Vec<f64>,
    pub form: Vec<f64>,
    pub max_gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Histogram {
    pub lo: f64,
    pub width: f64,
    pub counts: Vec<usize>,
    pub mean: f64,
    pub variance: f64,
    /// Limiting mean and variance, known only for β = 2.
    pub reference: Option<(f64, f64)>,
}

fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}

fn check_beta(beta: f64) -> Result<()> {
    if beta > 0.0 && beta.is_finite() {
        Ok(())
    } else {
        Err(invalid("beta", format!("must be positive, got {beta}")))
    }
}

fn operator(beta: f64, seed: u64, step: f64, truncation: f64) -> Result<OperatorSpec> {
    check_beta(beta)?;
    let c = coupling_for_beta(beta);
    let path = noise::sample_path(0.5, step, truncation + 1.0, seed)?;
    OperatorSpec::new(Potential::AIRY, c, path, truncation)
}

pub fn phase_curves(beta: f64, seed: u64, truncation: f64, step: f64, lambdas: &[f64]) -> Result<PhaseCurves> {
    let spec = operator(beta, seed, step, truncation)?;
    let mut t = Vec::new();
    let mut curves = Vec::with_capacity(lambdas.len());
    for &lambda in lambdas {
        let log = prufer::phase_flow(&spec, lambda);
        let stride = (log.theta.len() / CURVE_POINTS).max(1);
        let mut idx: Vec<usize> = (0..log.theta.len()).step_by(stride).collect();
        if idx.last() != Some(&(log.theta.len() - 1)) {
            idx.push(log.theta.len() - 1);
        }
        if t.is_empty() {
            t = idx.iter().map(|&i| i as f64 * log.step).collect();
        }
        curves.push(PhaseCurve {
            lambda,
            theta: idx.iter().map(|&i| log.theta[i]).collect(),
            count_below: prufer::count_below(&spec, lambda),
        });
    }
    Ok(PhaseCurves { t, curves })
}

pub fn sao_spectrum(beta: f64, seed: u64, step: f64, k: usize) -> Result<Spectrum> {
    if k == 0 {
        return Err(invalid("k", "must be at least 1"));
    }
    check_beta(beta)?;
    let c = coupling_for_beta(beta);
    let mut l = prufer::auto_truncation(Potential::AIRY, c, 0.0)?;
    loop {
        let spec = operator(beta, seed, step, l)?;
        let shot = prufer::solve_spectrum(&spec, k, prufer::default_tol(&spec))?;
        let matrix = form::spectrum(&form::assemble(&spec)?, k)?;
        let prufer: Vec<f64> = shot.iter().map(|r| r.value).collect();
        let form: Vec<f64> = matrix.iter().map(|r| r.value).collect();
        let top = prufer.iter().chain(&form).copied().fold(f64::NEG_INFINITY, f64::max);
        let next = prufer::auto_truncation(Potential::AIRY, c, top)?;
        if next <= l {
            let max_gap = prufer.iter().zip(&form).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            return Ok(Spectrum { truncation: l, prufer, form, max_gap });
        }
        l = next;
    }
}

pub fn edge_histogram(n: usize, beta: f64, samples: usize, seed_base: u64, bins: usize) -> Result<Histogram> {
    check_beta(beta)?;
    if samples == 0 || bins == 0 {
        return Err(invalid("samples", "samples and bins must be positive"));
    }
    let values = (0..samples as u64)
        .map(|i| ensemble::edge_sample(n, beta, 1, derive_seed(seed_base, i)).map(|e| e.scaled[0]))
        .collect::<Result<Vec<f64>>>()?;
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut counts = vec![0; bins];
    for v in &values {
        counts[(((v - lo) / width) as usize).min(bins - 1)] += 1;
    }
    let m = stats::moments(&EmpiricalDistribution::new(values)?, 2)?;
    let reference = (beta == 2.0).then_some(EDGE_LIMIT_BETA2);
    Ok(Histogram { lo, width, counts, mean: m[0], variance: m[1], reference })
}
