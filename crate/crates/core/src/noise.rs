//! Brownian and fractional Brownian paths on uniform grids, the unit-window
//! average `a(t) = ∫_t^{t+1} X(s) ds` and its growth diagnostics.
//!
//! Paths are sampled through their stationary increments (fractional
//! Gaussian noise). The default sampler is the circulant embedding of the
//! increment covariance, diagonalised by an FFT; when the embedding fails to
//! be nonnegative the sampler falls back to the exact Durbin–Levinson
//! (Hosking) factorisation. For `h = 1/2` the increments are independent and
//! are drawn directly, which also makes Brownian paths prefix-stable: the
//! same seed sampled to a longer horizon reproduces the shorter path.

use std::io::{self, Write};

use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid;
use crate::rng::{stream_rng, STREAM_NOISE};

/// A sampled path `values[i] = X(i·step)` with `X(0) = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoisePath {
    hurst: f64,
    step: f64,
    values: Vec<f64>,
    seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SamplingMethod {
    /// Direct increments for `h = 1/2`, circulant embedding otherwise, with
    /// the exact factorisation as fallback.
    #[default]
    Auto,
    /// Circulant embedding only; fails on a negative embedding eigenvalue.
    CirculantEmbedding,
    /// Exact Durbin–Levinson factorisation of the increment covariance, O(N²).
    Levinson,
}

impl NoisePath {
    /// Wraps externally supplied grid values (synthetic paths, tests).
    pub fn from_values(hurst: f64, step: f64, values: Vec<f64>, seed: u64) -> Result<Self> {
        check_hurst(hurst)?;
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::param("step", format!("must be positive, got {step}")));
        }
        if values.len() < 2 {
            return Err(Error::param("values", "a path needs at least two grid points"));
        }
        if values[0] != 0.0 {
            return Err(Error::param("values", format!("X(0) must be 0, got {}", values[0])));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("values", "non-finite path value"));
        }
        Ok(Self { hurst, step, values, seed })
    }

    /// Grid values of a function with `f(0) = 0`.
    pub fn from_fn(step: f64, horizon: f64, f: impl Fn(f64) -> f64) -> Result<Self> {
        let n = grid::cells(horizon, step).ok_or(Error::OffGrid { t: horizon, step })?;
        let values = (0..=n).map(|i| f(i as f64 * step)).collect();
        Self::from_values(0.5, step, values, 0)
    }

    /// The identically zero path (no noise).
    pub fn zero(step: f64, horizon: f64) -> Result<Self> {
        Self::from_fn(step, horizon, |_| 0.0)
    }

    pub fn hurst(&self) -> f64 {
        self.hurst
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        self.step * (self.values.len() - 1) as f64
    }

    /// Piecewise-linear interpolation; constant extrapolation past the end.
    pub fn value_at(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.values[0];
        }
        let x = t / self.step;
        let i = x.floor() as usize;
        if i + 1 >= self.values.len() {
            return *self.values.last().unwrap();
        }
        let w = x - i as f64;
        self.values[i] * (1.0 - w) + self.values[i + 1] * w
    }

    /// The same path restricted to `[0, horizon]`.
    pub fn restrict(&self, horizon: f64) -> Result<Self> {
        let n = grid::index_of(horizon, self.step)?;
        if n + 1 > self.values.len() {
            return Err(Error::Uncovered { from: 0.0, to: horizon, available: self.horizon() });
        }
        Ok(Self { values: self.values[..=n].to_vec(), ..self.clone() })
    }

    /// CSV with header `t,x` and 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,x")?;
        for (i, x) in self.values.iter().enumerate() {
            writeln!(out, "{:.16e},{:.16e}", i as f64 * self.step, x)?;
        }
        Ok(())
    }
}

fn check_hurst(hurst: f64) -> Result<()> {
    if hurst > 0.0 && hurst < 1.0 {
        Ok(())
    } else {
        Err(Error::param("hurst", format!("must lie in (0, 1), got {hurst}")))
    }
}

/// Samples a (fractional) Brownian path on `[0, horizon]` with [`SamplingMethod::Auto`].
pub fn sample_path(hurst: f64, step: f64, horizon: f64, seed: u64) -> Result<NoisePath> {
    sample_path_with(hurst, step, horizon, seed, SamplingMethod::Auto)
}

pub fn sample_path_with(
    hurst: f64,
    step: f64,
    horizon: f64,
    seed: u64,
    method: SamplingMethod,
) -> Result<NoisePath> {
    check_hurst(hurst)?;
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::param("step", format!("must be positive, got {step}")));
    }
    if !(horizon >= step && horizon.is_finite()) {
        return Err(Error::param("horizon", format!("must be at least one step, got {horizon}")));
    }
    let n = grid::cells(horizon, step).ok_or(Error::OffGrid { t: horizon, step })?;
    let mut rng = stream_rng(seed, STREAM_NOISE);

    let increments = match method {
        SamplingMethod::Auto if hurst == 0.5 => {
            (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
        }
        SamplingMethod::Auto => match circulant_fgn(hurst, n, &mut rng) {
            Ok(v) => v,
            Err(Error::NegativeEmbedding { .. }) => levinson_fgn(hurst, n, &mut rng),
            Err(e) => return Err(e),
        },
        SamplingMethod::CirculantEmbedding => circulant_fgn(hurst, n, &mut rng)?,
        SamplingMethod::Levinson => levinson_fgn(hurst, n, &mut rng),
    };

    let scale = step.powf(hurst);
    let mut values = Vec::with_capacity(n + 1);
    let mut x = 0.0;
    values.push(0.0);
    for dz in increments {
        x += scale * dz;
        values.push(x);
    }
    Ok(NoisePath { hurst, step, values, seed })
}

/// Autocovariance of unit-step fractional Gaussian noise.
fn fgn_autocov(hurst: f64, k: usize) -> f64 {
    let h2 = 2.0 * hurst;
    let k = k as f64;
    0.5 * ((k + 1.0).powf(h2) - 2.0 * k.powf(h2) + (k - 1.0).abs().powf(h2))
}

fn circulant_fgn<R: Rng>(hurst: f64, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    let m = n.next_power_of_two().max(2);
    let size = 2 * m;
    let mut row: Vec<Complex64> = (0..size)
        .map(|j| {
            let k = if j <= m { j } else { size - j };
            Complex64::new(fgn_autocov(hurst, k), 0.0)
        })
        .collect();

    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(size);
    fft.process(&mut row);

    let scale_max = row.iter().map(|c| c.re.abs()).fold(0.0, f64::max);
    let mut weights = Vec::with_capacity(size);
    for (index, ev) in row.iter().enumerate() {
        let value = ev.re;
        if value < -1e-10 * scale_max {
            return Err(Error::NegativeEmbedding { index, value });
        }
        weights.push((value.max(0.0) / size as f64).sqrt());
    }

    // Y = F(√(λ/2m) ⊙ (A + iB)); Re Y has exactly the embedded covariance.
    let mut w: Vec<Complex64> = weights
        .iter()
        .map(|&s| {
            let a: f64 = rng.sample(StandardNormal);
            let b: f64 = rng.sample(StandardNormal);
            Complex64::new(s * a, s * b)
        })
        .collect();
    fft.process(&mut w);
    Ok(w[..n].iter().map(|c| c.re).collect())
}

/// Exact sampling by the innovations (Durbin–Levinson) recursion.
fn levinson_fgn<R: Rng>(hurst: f64, n: usize, rng: &mut R) -> Vec<f64> {
    let gamma: Vec<f64> = (0..=n).map(|k| fgn_autocov(hurst, k)).collect();
    let mut out = Vec::with_capacity(n);
    let mut phi: Vec<f64> = Vec::with_capacity(n);
    let mut prev: Vec<f64> = Vec::with_capacity(n);
    let mut v = gamma[0];

    for t in 0..n {
        let mean: f64 = phi.iter().zip(out.iter().rev()).map(|(p, x)| p * x).sum();
        let z: f64 = rng.sample(StandardNormal);
        out.push(mean + v.max(0.0).sqrt() * z);
        if t + 1 == n {
            break;
        }
        // Update the order-(t+1) predictor coefficients.
        let k = t + 1;
        let num = gamma[k] - phi.iter().enumerate().map(|(j, p)| p * gamma[k - 1 - j]).sum::<f64>();
        let kappa = num / v;
        prev.clear();
        prev.extend_from_slice(&phi);
        for j in 0..phi.len() {
            phi[j] = prev[j] - kappa * prev[prev.len() - 1 - j];
        }
        phi.push(kappa);
        v *= 1.0 - kappa * kappa;
    }
    out
}

/// `a(t) = ∫_t^{t+1} X(s) ds` and `a'(t) = X(t+1) - X(t)` on the path grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AveragedPath {
    pub step: f64,
    /// Trapezoid quadrature of the unit-window integral.
    pub values: Vec<f64>,
    /// Exact path difference at offset one.
    pub derivative: Vec<f64>,
    /// `X(t) - a(t)` at the same grid points.
    pub gap: Vec<f64>,
}

impl AveragedPath {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn horizon(&self) -> f64 {
        self.step * (self.values.len() - 1) as f64
    }
}

pub fn averaged_path(path: &NoisePath) -> Result<AveragedPath> {
    let m = grid::cells_per_unit(path.step).ok_or_else(|| {
        Error::param("step", format!("{} does not divide one time unit", path.step))
    })?;
    let x = &path.values;
    if x.len() <= m {
        return Err(Error::Uncovered { from: 0.0, to: 1.0, available: path.horizon() });
    }
    let count = x.len() - m;
    let h = path.step;

    let mut values = Vec::with_capacity(count);
    let mut derivative = Vec::with_capacity(count);
    let mut gap = Vec::with_capacity(count);
    // Trapezoid on [t_i, t_{i+m}], as a sliding sum of cell averages.
    let mut window: f64 = (0..m).map(|j| 0.5 * (x[j] + x[j + 1])).sum();
    for i in 0..count {
        if i > 0 {
            window += 0.5 * (x[i + m - 1] + x[i + m]) - 0.5 * (x[i - 1] + x[i]);
        }
        let a = h * window;
        values.push(a);
        derivative.push(x[i + m] - x[i]);
        gap.push(x[i] - a);
    }
    Ok(AveragedPath { step: h, values, derivative, gap })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GrowthMode {
    /// `|a'(t)|`
    Derivative,
    /// `|X(t) - a(t)|`
    Gap,
}

/// Block suprema over `[n, n+1]` and their ratios to `√(log n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthDiagnostic {
    pub mode: GrowthMode,
    pub block_suprema: Vec<(usize, f64)>,
    /// `(n, sup / √(ln n))` for `n ≥ 2`.
    pub ratios: Vec<(usize, f64)>,
}

impl GrowthDiagnostic {
    pub fn max_ratio(&self) -> f64 {
        self.ratios.iter().map(|r| r.1).fold(0.0, f64::max)
    }

    /// Running maximum of the ratios up to block `n` inclusive.
    pub fn running_max_at(&self, n: usize) -> f64 {
        self.ratios.iter().take_while(|r| r.0 <= n).map(|r| r.1).fold(0.0, f64::max)
    }
}

pub fn growth_diagnostic(avg: &AveragedPath, mode: GrowthMode) -> Result<GrowthDiagnostic> {
    let horizon = avg.horizon();
    if horizon < 3.0 - 1e-9 {
        return Err(Error::param("horizon", format!("growth diagnostic needs at least 3, got {horizon}")));
    }
    let m = grid::cells_per_unit(avg.step)
        .ok_or_else(|| Error::param("step", "does not divide one time unit"))?;
    let series = match mode {
        GrowthMode::Derivative => &avg.derivative,
        GrowthMode::Gap => &avg.gap,
    };
    let blocks = (avg.len() - 1) / m;
    let mut block_suprema = Vec::with_capacity(blocks);
    let mut ratios = Vec::with_capacity(blocks.saturating_sub(2));
    for n in 0..blocks {
        let sup = series[n * m..=(n + 1) * m].iter().map(|v| v.abs()).fold(0.0, f64::max);
        block_suprema.push((n, sup));
        if n >= 2 {
            ratios.push((n, sup / (n as f64).ln().sqrt()));
        }
    }
    Ok(GrowthDiagnostic { mode, block_suprema, ratios })
}
