//! The generalized Sturm–Liouville operator `H = -d²/dt² + p(t) + Q'(t)` in
//! quasi-derivative form.
//!
//! With `u[1] = u' - Q u`, the eigen-equation `Hu = λu` becomes the first
//! order system
//!
//! ```text
//! d/dt (u, u[1]) = [[Q, 1], [p - Q² - λ, -Q]] (u, u[1])
//! ```
//!
//! in which only `Q`, never `Q'`, appears. The coefficient matrix has zero
//! trace, so the bracket `[u₁, u₂] = u₁ u₂[1] - u₁[1] u₂` of two solutions
//! with the same λ is constant.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid;
use crate::noise::{self, NoisePath};

/// The deterministic part `p(t)` of the potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Potential {
    /// `p(t) = scale · t^exponent`
    Power { scale: f64, exponent: f64 },
    /// `p(t) = -field · t`; not confining.
    LinearField { field: f64 },
    Zero,
}

impl Potential {
    /// `p(t) = t`, the stochastic Airy case.
    pub const AIRY: Potential = Potential::Power { scale: 1.0, exponent: 1.0 };

    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            Potential::Power { scale, exponent } => {
                if exponent == 1.0 {
                    scale * t
                } else {
                    scale * t.powf(exponent)
                }
            }
            Potential::LinearField { field } => -field * t,
            Potential::Zero => 0.0,
        }
    }

    /// `p'(t)`.
    pub fn derivative(&self, t: f64) -> f64 {
        match *self {
            Potential::Power { scale, exponent } => scale * exponent * t.powf(exponent - 1.0),
            Potential::LinearField { field } => -field,
            Potential::Zero => 0.0,
        }
    }

    /// Whether `p(t) → ∞`, so that the half-line spectrum is discrete.
    pub fn is_confining(&self) -> bool {
        matches!(self, Potential::Power { .. })
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Potential::Power { scale, exponent } => {
                if !(scale > 0.0 && scale.is_finite()) {
                    return Err(Error::param("potential.scale", format!("must be positive, got {scale}")));
                }
                if !(exponent > 0.0 && exponent.is_finite()) {
                    return Err(Error::param("potential.exponent", format!("must be positive, got {exponent}")));
                }
            }
            Potential::LinearField { field } => {
                if !field.is_finite() {
                    return Err(Error::param("potential.field", "must be finite"));
                }
            }
            Potential::Zero => {}
        }
        Ok(())
    }

    /// Smallest `t` with `p(t) ≥ level`, for confining potentials.
    pub fn inverse(&self, level: f64) -> Option<f64> {
        match *self {
            Potential::Power { scale, exponent } => Some((level.max(0.0) / scale).powf(1.0 / exponent)),
            _ => None,
        }
    }
}

/// One realization of `H`: potential, coupling, noise path and the
/// computational interval `[0, truncation]`.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSpec {
    potential: Potential,
    coupling: f64,
    path: NoisePath,
    truncation: f64,
    cells: usize,
}

impl OperatorSpec {
    pub fn new(potential: Potential, coupling: f64, path: NoisePath, truncation: f64) -> Result<Self> {
        potential.validate()?;
        if !coupling.is_finite() {
            return Err(Error::param("coupling", "must be finite"));
        }
        if !(truncation > 0.0) {
            return Err(Error::param("truncation", format!("must be positive, got {truncation}")));
        }
        let cells = grid::index_of(truncation, path.step())?;
        if cells + 1 > path.len() {
            return Err(Error::Uncovered { from: 0.0, to: truncation, available: path.horizon() });
        }
        Ok(Self { potential, coupling, path, truncation, cells })
    }

    /// `p(t) = t`, `c = 2/√β`, Brownian noise sampled one unit past the
    /// truncation so the averaged path is available on all of `[0, L]`.
    pub fn stochastic_airy(beta: f64, step: f64, truncation: f64, seed: u64) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::param("beta", format!("must be positive, got {beta}")));
        }
        let path = noise::sample_path(0.5, step, truncation + 1.0, seed)?;
        Self::new(Potential::AIRY, coupling_for_beta(beta), path, truncation)
    }

    /// A noiseless operator on `[0, truncation]`.
    pub fn deterministic(potential: Potential, step: f64, truncation: f64) -> Result<Self> {
        let horizon = truncation + if grid::cells_per_unit(step).is_some() { 1.0 } else { 0.0 };
        let path = NoisePath::zero(step, horizon).or_else(|_| NoisePath::zero(step, truncation))?;
        Self::new(potential, 0.0, path, truncation)
    }

    pub fn potential(&self) -> Potential {
        self.potential
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn path(&self) -> &NoisePath {
        &self.path
    }

    pub fn truncation(&self) -> f64 {
        self.truncation
    }

    pub fn step(&self) -> f64 {
        self.path.step()
    }

    /// Number of grid cells in `[0, L]`.
    pub fn cells(&self) -> usize {
        self.cells
    }

    pub fn seed(&self) -> u64 {
        self.path.seed()
    }

    /// The same realization on `[0, truncation]`.
    pub fn with_truncation(&self, truncation: f64) -> Result<Self> {
        Self::new(self.potential, self.coupling, self.path.clone(), truncation)
    }

    /// `Q` at grid index `i`.
    #[inline]
    pub fn q_at(&self, i: usize) -> f64 {
        self.coupling * self.path.values()[i]
    }

    /// `Q` at the midpoint of cell `i` (linear interpolation).
    #[inline]
    pub fn q_mid(&self, i: usize) -> f64 {
        let x = self.path.values();
        0.5 * self.coupling * (x[i] + x[i + 1])
    }

    #[inline]
    pub fn p(&self, t: f64) -> f64 {
        self.potential.eval(t)
    }

    #[inline]
    pub fn time(&self, i: usize) -> f64 {
        i as f64 * self.step()
    }
}

pub fn coupling_for_beta(beta: f64) -> f64 {
    2.0 / beta.sqrt()
}

/// `(t, u, u[1])`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuasiState {
    pub t: f64,
    pub u: f64,
    pub uq: f64,
}

impl QuasiState {
    pub fn new(t: f64, u: f64, uq: f64) -> Self {
        Self { t, u, uq }
    }

    /// Classical derivative `u' = u[1] + Q u`.
    pub fn derivative(&self, q: f64) -> f64 {
        self.uq + q * self.u
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PropagationLog {
    pub lambda: f64,
    pub states: Vec<QuasiState>,
    /// `|det Φ(to) - 1|` for the fundamental matrix of the discrete scheme:
    /// the relative change of the bracket of any two solutions.
    pub wronskian_drift: f64,
}

impl PropagationLog {
    pub fn last(&self) -> QuasiState {
        *self.states.last().unwrap()
    }

    pub fn first(&self) -> QuasiState {
        self.states[0]
    }

    pub fn state_at(&self, t: f64) -> Option<QuasiState> {
        let step = if self.states.len() > 1 { self.states[1].t - self.states[0].t } else { return None };
        let offset = t - self.states[0].t;
        let i = grid::cells(offset, step)?;
        self.states.get(i).copied()
    }

    /// Number of sign changes of `u` strictly inside the logged interval.
    pub fn sign_changes(&self) -> usize {
        let mut count = 0;
        let mut last = 0.0f64;
        for s in &self.states[1..self.states.len() - 1] {
            if s.u != 0.0 {
                if last != 0.0 && (s.u > 0.0) != (last > 0.0) {
                    count += 1;
                }
                last = s.u;
            }
        }
        count
    }

    /// CSV with header `t,u,uq`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "t,u,uq")?;
        for s in &self.states {
            writeln!(out, "{:.16e},{:.16e},{:.16e}", s.t, s.u, s.uq)?;
        }
        Ok(())
    }
}

const OVERFLOW: f64 = 1e300;

/// Explicit midpoint step of the quasi-derivative system on cell `i`, with
/// the coefficient matrix frozen at the half-step for both stages.
///
/// With `A` traceless the step determinant is `1 + O(h⁴)`; evaluating the
/// first stage at the left node instead would leave an `O(h³ p')` error per
/// step in the bracket.
#[inline]
fn midpoint_step(spec: &OperatorSpec, lambda: f64, i: usize, u: f64, w: f64) -> (f64, f64) {
    let h = spec.step();
    let q = spec.q_mid(i);
    let s = spec.p(spec.time(i) + 0.5 * h) - q * q - lambda;
    let k1u = q * u + w;
    let k1w = s * u - q * w;
    let um = u + 0.5 * h * k1u;
    let wm = w + 0.5 * h * k1w;
    (u + h * (q * um + wm), w + h * (s * um - q * wm))
}

/// Solves the quasi-derivative system from `initial` at `from` to `to`,
/// one noise-grid cell per step.
pub fn propagate(
    spec: &OperatorSpec,
    lambda: f64,
    initial: QuasiState,
    from: f64,
    to: f64,
) -> Result<PropagationLog> {
    if !lambda.is_finite() {
        return Err(Error::param("lambda", "must be finite"));
    }
    let step = spec.step();
    let i0 = grid::index_of(from, step)?;
    let i1 = grid::index_of(to, step)?;
    if i0 >= i1 {
        return Err(Error::param("interval", format!("need from < to, got [{from}, {to}]")));
    }
    if i1 > spec.cells() {
        return Err(Error::Uncovered { from, to, available: spec.truncation() });
    }

    let mut states = Vec::with_capacity(i1 - i0 + 1);
    let (mut u, mut w) = (initial.u, initial.uq);
    // The bracket of any two solutions is multiplied by the determinant of
    // each step map; accumulating those avoids the cancellation of forming
    // it from growing solutions.
    let mut log_det = 0.0f64;
    states.push(QuasiState::new(spec.time(i0), u, w));
    for i in i0..i1 {
        (u, w) = midpoint_step(spec, lambda, i, u, w);
        let (a, b) = midpoint_step(spec, lambda, i, 1.0, 0.0);
        let (c, d) = midpoint_step(spec, lambda, i, 0.0, 1.0);
        log_det += ((a - 1.0) * d + (d - 1.0) - b * c).ln_1p();
        let t = spec.time(i + 1);
        if !(u.abs() + w.abs() <= OVERFLOW) {
            return Err(Error::Overflow { t });
        }
        states.push(QuasiState::new(t, u, w));
    }
    Ok(PropagationLog { lambda, states, wronskian_drift: log_det.exp_m1().abs() })
}

/// The bracket `u₁ u₂[1] - u₁[1] u₂`.
pub fn wronskian(s1: &QuasiState, s2: &QuasiState) -> Result<f64> {
    if (s1.t - s2.t).abs() > 1e-12 * s1.t.abs().max(1.0) {
        return Err(Error::TimeMismatch(s1.t, s2.t));
    }
    Ok(s1.u * s2.uq - s1.uq * s2.u)
}

/// `|∫_a^b (λ₁-λ₂) u₁ u₂ dt - [u₁,u₂]|_a^b|` for two eigen-equation
/// solutions; trapezoid quadrature on the log grid.
pub fn greens_residual(
    spec: &OperatorSpec,
    u1: &PropagationLog,
    u2: &PropagationLog,
    a: f64,
    b: f64,
) -> Result<f64> {
    let step = spec.step();
    let slice = |log: &PropagationLog| -> Result<usize> {
        let start = log.states[0].t;
        let end = log.last().t;
        if a < start - 1e-12 || b > end + 1e-12 || a >= b {
            return Err(Error::Uncovered { from: a, to: b, available: end });
        }
        grid::index_of(a - start, step)
    };
    let o1 = slice(u1)?;
    let o2 = slice(u2)?;
    let n = grid::index_of(b - a, step)?;
    let dl = u1.lambda - u2.lambda;
    let mut integral = 0.0;
    for j in 0..n {
        let f0 = u1.states[o1 + j].u * u2.states[o2 + j].u;
        let f1 = u1.states[o1 + j + 1].u * u2.states[o2 + j + 1].u;
        integral += 0.5 * step * (f0 + f1);
    }
    let wa = wronskian(&u1.states[o1], &u2.states[o2])?;
    let wb = wronskian(&u1.states[o1 + n], &u2.states[o2 + n])?;
    Ok((dl * integral - (wb - wa)).abs())
}

/// Largest defect in the integral form of `Hu = v`,
///
/// ```text
/// u'(t) = α + Q(t) u(t) + ∫_0^t (p u - Q u' - v) dy,
/// ```
///
/// for grid samples `u` (with `u(0) = 0`) and a candidate `v`. Checkpoints
/// are the cell midpoints, where the centred difference of `u` is
/// second-order accurate even for a rough `Q`; `α` is fitted at the first
/// checkpoint. Verification utility only.
pub fn apply(spec: &OperatorSpec, u: &[f64], v: &[f64]) -> Result<f64> {
    if u.len() != v.len() || u.len() < 3 {
        return Err(Error::GridMismatch(format!(
            "u and v need equal lengths ≥ 3, got {} and {}",
            u.len(),
            v.len()
        )));
    }
    if u.len() > spec.cells() + 1 {
        return Err(Error::GridMismatch(format!(
            "{} samples exceed the {} grid points of [0, L]",
            u.len(),
            spec.cells() + 1
        )));
    }
    if u[0] != 0.0 {
        return Err(Error::param("u", format!("u(0) must be 0, got {}", u[0])));
    }
    let h = spec.step();
    let node = |i: usize| {
        let t = spec.time(i);
        spec.p(t) * u[i] - v[i]
    };
    // ∫ (p u - v) by trapezoid up to the node; ∫ Q u' cell-wise as Q_mid Δu.
    let mut integral = 0.0;
    let mut alpha = None;
    let mut defect: f64 = 0.0;
    for i in 0..u.len() - 1 {
        let du = u[i + 1] - u[i];
        let qm = spec.q_mid(i);
        let half_pu_v = 0.25 * h * (node(i) + 0.5 * (node(i) + node(i + 1)));
        let half_qdu = 0.5 * qm * du;
        let at_mid = integral + half_pu_v - half_qdu;
        let deriv = du / h;
        let um = 0.5 * (u[i] + u[i + 1]);
        let residual = deriv - qm * um - at_mid;
        let alpha = *alpha.get_or_insert(residual);
        defect = defect.max((residual - alpha).abs());
        integral += 0.5 * h * (node(i) + node(i + 1)) - qm * du;
    }
    Ok(defect)
}
