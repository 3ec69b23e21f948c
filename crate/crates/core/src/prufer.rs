//! Prüfer-phase shooting.
//!
//! Writing `u = r sin θ`, `u[1] = r cos θ` for a solution of the
//! quasi-derivative system gives the bounded phase equation
//!
//! ```text
//! θ' = cos²θ + 2Q sinθ cosθ + (λ - p + Q²) sin²θ,   θ(0) = 0,
//! ```
//!
//! whose slope is exactly 1 at every multiple of π. The phase therefore only
//! crosses `kπ` upwards, each crossing is a zero of `u`, and `⌊θ_λ(L)/π⌋`
//! counts the Dirichlet eigenvalues of `[0, L]` below λ. The flow is
//! integrated with classical RK4 on the noise grid, with `Q` linear inside
//! each cell.

use std::f64::consts::PI;
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::form;
use crate::operator::{OperatorSpec, Potential};

/// Bisection width used for noiseless operators.
pub const DEFAULT_TOL_DETERMINISTIC: f64 = 1e-8;
/// Bisection width used when the coupling is nonzero.
pub const DEFAULT_TOL_NOISY: f64 = 1e-6;

pub fn default_tol(spec: &OperatorSpec) -> f64 {
    if spec.coupling() == 0.0 {
        DEFAULT_TOL_DETERMINISTIC
    } else {
        DEFAULT_TOL_NOISY
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Prufer,
    Form,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Prufer => "prufer",
            Method::Form => "form",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "prufer" => Ok(Method::Prufer),
            "form" => Ok(Method::Form),
            other => Err(Error::param("method", format!("unknown method `{other}`"))),
        }
    }
}

/// One Dirichlet eigenvalue of `[0, L]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenvalueRecord {
    /// 1-based.
    pub index: usize,
    pub value: f64,
    /// Interior zeros of the eigenfunction.
    pub oscillation_count: usize,
    pub bisection_width: f64,
    pub truncation: f64,
    pub method: Method,
}

/// Writes `k,lambda,oscillations,bisection_width,L,seed,method` rows.
pub fn write_spectrum_csv<W: Write>(
    records: &[EigenvalueRecord],
    seed: u64,
    mut out: W,
    header: bool,
) -> io::Result<()> {
    if header {
        writeln!(out, "k,lambda,oscillations,bisection_width,L,seed,method")?;
    }
    for r in records {
        writeln!(
            out,
            "{},{:.16e},{},{:.6e},{},{},{}",
            r.index, r.value, r.oscillation_count, r.bisection_width, r.truncation, seed, r.method
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseLog {
    pub lambda: f64,
    pub step: f64,
    /// `θ` at every grid time of `[0, L]`.
    pub theta: Vec<f64>,
    /// `(t, k)` where `θ` first reaches `kπ`.
    pub crossings: Vec<(f64, usize)>,
}

impl PhaseLog {
    pub fn final_phase(&self) -> f64 {
        *self.theta.last().unwrap()
    }

    /// Crossings strictly before the end of the interval.
    pub fn interior_crossings(&self) -> usize {
        let end = self.step * (self.theta.len() - 1) as f64;
        self.crossings.iter().filter(|c| c.0 < end - 0.5 * self.step).count()
    }
}

#[inline]
fn phase_rhs(theta: f64, q: f64, p: f64, lambda: f64) -> f64 {
    let (s, c) = theta.sin_cos();
    c * c + 2.0 * q * s * c + (lambda - p + q * q) * s * s
}

/// One RK4 step over cell `i`.
#[inline]
fn rk4_cell(spec: &OperatorSpec, lambda: f64, i: usize, theta: f64) -> f64 {
    let h = spec.step();
    let t = spec.time(i);
    let (q0, qm, q1) = (spec.q_at(i), spec.q_mid(i), spec.q_at(i + 1));
    let (p0, pm, p1) = (spec.p(t), spec.p(t + 0.5 * h), spec.p(t + h));
    let k1 = phase_rhs(theta, q0, p0, lambda);
    let k2 = phase_rhs(theta + 0.5 * h * k1, qm, pm, lambda);
    let k3 = phase_rhs(theta + 0.5 * h * k2, qm, pm, lambda);
    let k4 = phase_rhs(theta + h * k3, q1, p1, lambda);
    theta + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Integrates the phase from `theta0` at `t = 0` over the first `cells`
/// cells, calling `visit(i, θ_i)` at every grid index (including 0).
pub(crate) fn integrate_phase(
    spec: &OperatorSpec,
    lambda: f64,
    theta0: f64,
    cells: usize,
    mut visit: impl FnMut(usize, f64),
) -> f64 {
    let mut theta = theta0;
    visit(0, theta);
    for i in 0..cells {
        theta = rk4_cell(spec, lambda, i, theta);
        visit(i + 1, theta);
    }
    theta
}

/// Phase at `t = L` only, from `θ(0) = 0`.
fn final_phase(spec: &OperatorSpec, lambda: f64) -> f64 {
    integrate_phase(spec, lambda, 0.0, spec.cells(), |_, _| {})
}

/// Phase flow with crossing bookkeeping from an arbitrary start angle.
pub(crate) fn phase_log_from(spec: &OperatorSpec, lambda: f64, theta0: f64, cells: usize) -> PhaseLog {
    let step = spec.step();
    let mut theta = Vec::with_capacity(cells + 1);
    let mut crossings = Vec::new();
    let mut next = (theta0 / PI).floor() as i64 + 1;
    integrate_phase(spec, lambda, theta0, cells, |i, th| {
        theta.push(th);
        while i > 0 && th >= next as f64 * PI {
            crossings.push((i as f64 * step, next as usize));
            next += 1;
        }
    });
    PhaseLog { lambda, step, theta, crossings }
}

/// `θ_λ` on `[0, L]` from the Dirichlet start `θ(0) = 0`.
pub fn phase_flow(spec: &OperatorSpec, lambda: f64) -> PhaseLog {
    phase_log_from(spec, lambda, 0.0, spec.cells())
}

/// Number of Dirichlet eigenvalues of `[0, L]` below λ, `⌊θ_λ(L)/π⌋`.
/// An eigenvalue exactly at λ (`θ_λ(L) = kπ`) is counted.
pub fn count_below(spec: &OperatorSpec, lambda: f64) -> usize {
    (final_phase(spec, lambda) / PI).floor().max(0.0) as usize
}

/// Window lower end `-C - 1` from the form lower bound, pushed further down
/// if the phase count disagrees.
fn lower_window(spec: &OperatorSpec) -> Result<f64> {
    let mut lo = match form::lower_bound_default(spec) {
        Ok(b) => -b.constant - 1.0,
        Err(_) => -1.0,
    };
    for _ in 0..64 {
        if count_below(spec, lo) == 0 {
            return Ok(lo);
        }
        lo = 2.0 * lo - 1.0;
    }
    Err(Error::BracketFailure { wanted: 1, reason: "no eigenvalue-free lower end found".into() })
}

/// The `k_max` lowest Dirichlet eigenvalues of `[0, L]` by bisection on the
/// phase count, each refined to a bracket of width ≤ `tol`.
///
/// Beyond the turning point `θ_λ(L)` is a steep staircase in λ, so the count
/// is bisected rather than the phase mismatch solved by secants.
pub fn solve_spectrum(spec: &OperatorSpec, k_max: usize, tol: f64) -> Result<Vec<EigenvalueRecord>> {
    if let Potential::LinearField { .. } = spec.potential() {
        return Err(Error::NonConfining("linear-field potential has no discrete spectrum".into()));
    }
    if k_max == 0 {
        return Err(Error::param("k_max", "must be at least 1"));
    }
    if !(tol > 0.0) {
        return Err(Error::param("tol", format!("must be positive, got {tol}")));
    }

    let lo = lower_window(spec)?;
    let mut hi = lo + 1.0;
    let mut evaluated: Vec<(f64, usize)> = vec![(lo, 0)];
    let mut grown = 0;
    loop {
        let c = count_below(spec, hi);
        evaluated.push((hi, c));
        if c >= k_max {
            break;
        }
        grown += 1;
        if grown > 64 {
            return Err(Error::BracketFailure {
                wanted: k_max,
                reason: format!("only {c} eigenvalues below {hi}"),
            });
        }
        hi = lo + 2.0 * (hi - lo);
    }

    let mut records = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let mut a = evaluated.iter().filter(|e| e.1 < k).map(|e| e.0).fold(f64::NEG_INFINITY, f64::max);
        let mut b = evaluated.iter().filter(|e| e.1 >= k).map(|e| e.0).fold(f64::INFINITY, f64::min);
        while b - a > tol {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            let c = count_below(spec, mid);
            evaluated.push((mid, c));
            if c >= k {
                b = mid;
            } else {
                a = mid;
            }
        }
        let oscillation_count = phase_flow(spec, a).interior_crossings();
        records.push(EigenvalueRecord {
            index: k,
            value: 0.5 * (a + b),
            oscillation_count,
            bisection_width: b - a,
            truncation: spec.truncation(),
            method: Method::Prufer,
        });
    }
    Ok(records)
}

/// `λ_k` of the same realization restricted to each length in `lengths`.
pub fn truncation_sweep(spec: &OperatorSpec, lengths: &[f64], k: usize, tol: f64) -> Result<Vec<(f64, f64)>> {
    lengths
        .iter()
        .map(|&l| {
            let s = spec.with_truncation(l)?;
            let recs = solve_spectrum(&s, k, tol)?;
            Ok((l, recs[k - 1].value))
        })
        .collect()
}

/// Smallest integer `L` with `p(L) ≥ λ_hi + 4|c|√(ln L) + 10`.
pub fn auto_truncation(potential: Potential, coupling: f64, lambda_hi: f64) -> Result<f64> {
    if !potential.is_confining() {
        return Err(Error::NonConfining(format!("cannot choose a truncation for {potential:?}")));
    }
    potential.validate()?;
    let need = |l: f64| lambda_hi + 4.0 * coupling.abs() * l.max(1.0).ln().sqrt() + 10.0;
    let mut l = potential.inverse(need(1.0)).unwrap().max(1.0).ceil();
    for _ in 0..10_000 {
        if potential.eval(l) >= need(l) {
            return Ok(l);
        }
        l += 1.0;
    }
    Err(Error::param("lambda_hi", format!("no truncation found for λ_hi = {lambda_hi}")))
}
