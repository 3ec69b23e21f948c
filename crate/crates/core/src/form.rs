//! The quadratic form of `H` and its finite-difference matrix.
//!
//! With `a(t) = ∫_t^{t+1} X` the form is
//!
//! ```text
//! E(u, v) = ∫ u'v' + (p + c a') u v dt  -  c ∫ (X - a) (uv)' dt,
//! ```
//!
//! which never differentiates the noise. [`evaluate`] uses this split
//! literally; [`assemble`] builds the tridiagonal matrix whose quadratic form
//! approximates it on piecewise-linear functions.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid;
use crate::noise;
use crate::operator::OperatorSpec;
use crate::prufer::{EigenvalueRecord, Method};
use crate::tridiag::{sign_changes, TridiagonalMatrix};

/// Relative floor below which eigenvector entries are treated as zero when
/// counting sign changes.
const NODE_FLOOR: f64 = 1e-8;

/// Grid function on `[0, L]` vanishing at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    step: f64,
    values: Vec<f64>,
}

impl TestFunction {
    pub fn new(step: f64, values: Vec<f64>) -> Result<Self> {
        if !(step > 0.0) || values.len() < 2 {
            return Err(Error::param("values", "need a positive step and at least two nodes"));
        }
        if values[0] != 0.0 {
            return Err(Error::param("values", format!("f(0) must vanish, got {}", values[0])));
        }
        Ok(Self { step, values })
    }

    /// Hat of height one centred at grid node `center`, reaching zero
    /// `half_width` nodes away, on a grid of `cells` cells.
    pub fn hat(step: f64, cells: usize, center: usize, half_width: usize) -> Result<Self> {
        if half_width == 0 || center < half_width || center > cells {
            return Err(Error::param("center", "hat must vanish at the origin and fit the grid"));
        }
        let values = (0..=cells)
            .map(|i| {
                let d = (i as f64 - center as f64).abs() / half_width as f64;
                (1.0 - d).max(0.0)
            })
            .collect();
        Self::new(step, values)
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Forward-difference derivative, one entry per cell.
    pub fn derivative(&self) -> Vec<f64> {
        self.values.windows(2).map(|w| (w[1] - w[0]) / self.step).collect()
    }
}

/// Constants of the lower bound `E(u,u) ≥ -C (u,u)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundEstimate {
    pub epsilon: f64,
    pub delta: f64,
    pub c1: f64,
    pub c2: f64,
    pub constant: f64,
}

/// Everything [`evaluate`] and [`lower_bound`] need from one realization,
/// computed once.
#[derive(Debug, Clone)]
pub struct QuadraticForm {
    step: f64,
    coupling: f64,
    /// `p` at the nodes of `[0, L]`.
    p: Vec<f64>,
    /// `a'` at the nodes.
    a_prime: Vec<f64>,
    /// `X - a` averaged over each cell.
    gap_mid: Vec<f64>,
}

impl QuadraticForm {
    pub fn new(spec: &OperatorSpec) -> Result<Self> {
        let n = spec.cells();
        let p: Vec<f64> = (0..=n).map(|i| spec.p(spec.time(i))).collect();
        let (a_prime, gap_mid) = if spec.coupling() == 0.0 {
            (vec![0.0; n + 1], vec![0.0; n])
        } else {
            let avg = noise::averaged_path(spec.path())?;
            if avg.len() < n + 1 {
                return Err(Error::Uncovered {
                    from: 0.0,
                    to: spec.truncation() + 1.0,
                    available: spec.path().horizon(),
                });
            }
            let gap_mid = avg.gap[..=n].windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
            (avg.derivative[..=n].to_vec(), gap_mid)
        };
        Ok(Self { step: spec.step(), coupling: spec.coupling(), p, a_prime, gap_mid })
    }

    pub fn cells(&self) -> usize {
        self.gap_mid.len()
    }

    fn check(&self, f: &TestFunction) -> Result<()> {
        if grid::cells(self.step, f.step) != Some(1) || f.values.len() != self.cells() + 1 {
            return Err(Error::GridMismatch(format!(
                "test function has {} nodes at step {}, form has {} at step {}",
                f.values.len(),
                f.step,
                self.cells() + 1,
                self.step
            )));
        }
        Ok(())
    }

    pub fn evaluate(&self, u: &TestFunction, v: &TestFunction) -> Result<f64> {
        self.check(u)?;
        self.check(v)?;
        let h = self.step;
        let c = self.coupling;
        let (u, v) = (&u.values, &v.values);
        let n = self.cells();
        let mut kinetic = 0.0;
        let mut noise = 0.0;
        for i in 0..n {
            kinetic += (u[i + 1] - u[i]) * (v[i + 1] - v[i]);
            noise += self.gap_mid[i] * (u[i + 1] * v[i + 1] - u[i] * v[i]);
        }
        let weight = |i: usize| (self.p[i] + c * self.a_prime[i]) * u[i] * v[i];
        let mut potential: f64 = (1..n).map(weight).sum();
        potential += 0.5 * (weight(0) + weight(n));
        Ok(kinetic / h + h * potential - c * noise)
    }

    /// Trapezoid `(u, u)`.
    pub fn norm_sq(&self, u: &TestFunction) -> Result<f64> {
        self.check(u)?;
        let x = &u.values;
        let n = x.len() - 1;
        let inner: f64 = x[1..n].iter().map(|v| v * v).sum();
        Ok(self.step * (inner + 0.5 * (x[0] * x[0] + x[n] * x[n])))
    }

    /// Grid scan of the lower-bound constants.
    ///
    /// `C1` is taken over cells with the cell-averaged gap and the smaller
    /// endpoint value of `p`, which makes the bound hold exactly for the
    /// discrete form of [`evaluate`].
    pub fn lower_bound(&self, epsilon: f64, delta: f64) -> Result<LowerBoundEstimate> {
        let c = self.coupling.abs();
        let p_min = self.p.iter().copied().fold(f64::INFINITY, f64::min);
        if c == 0.0 {
            let c2 = (-p_min).max(0.0);
            return Ok(LowerBoundEstimate { epsilon, delta, c1: 0.0, c2, constant: c2 });
        }
        if !(epsilon > 0.0 && epsilon * c < 1.0) {
            return Err(Error::param("epsilon", format!("need 0 < ε < 1/|c| = {}", 1.0 / c)));
        }
        if !(delta > 0.0 && delta < 1.0 - epsilon * c) {
            return Err(Error::param("delta", format!("need 0 < δ < 1 - ε|c| = {}", 1.0 - epsilon * c)));
        }
        let c1 = self
            .gap_mid
            .iter()
            .zip(self.p.windows(2))
            .map(|(g, w)| (g / epsilon).powi(2) - w[0].min(w[1]))
            .fold(0.0f64, f64::max);
        // For p ≥ 0 this is the plain infimum of (1-εc-δ)p + c a'; a negative
        // p also has to absorb the δp term.
        let c2 = -self
            .p
            .iter()
            .zip(&self.a_prime)
            .map(|(&p, &da)| (1.0 - epsilon * c - delta) * p + self.coupling * da + delta * p.min(0.0))
            .fold(f64::INFINITY, f64::min);
        let c2 = c2.max(0.0);
        Ok(LowerBoundEstimate { epsilon, delta, c1, c2, constant: epsilon * c * c1 + c2 })
    }
}

/// `E(u, v)` by trapezoid quadrature on the spec's grid.
pub fn evaluate(spec: &OperatorSpec, u: &TestFunction, v: &TestFunction) -> Result<f64> {
    QuadraticForm::new(spec)?.evaluate(u, v)
}

pub fn lower_bound(spec: &OperatorSpec, epsilon: f64, delta: f64) -> Result<LowerBoundEstimate> {
    QuadraticForm::new(spec)?.lower_bound(epsilon, delta)
}

/// [`lower_bound`] at `ε = 1/(2|c|)`, `δ = (1 - ε|c|)/2`.
pub fn lower_bound_default(spec: &OperatorSpec) -> Result<LowerBoundEstimate> {
    let c = spec.coupling().abs();
    let (epsilon, delta) = if c == 0.0 { (1.0, 0.5) } else { (0.5 / c, 0.25) };
    lower_bound(spec, epsilon, delta)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteForm {
    pub matrix: TridiagonalMatrix,
    pub step: f64,
    pub truncation: f64,
}

impl DiscreteForm {
    /// `step · xᵀ M x` for interior node values `x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.step * self.matrix.quadratic(x)
    }

    /// [`Self::quadratic_form`] of a test function vanishing at `L`.
    pub fn energy(&self, u: &TestFunction) -> Result<f64> {
        let n = self.matrix.dim() + 1;
        if u.values.len() != n + 1 {
            return Err(Error::GridMismatch(format!("expected {} nodes, got {}", n + 1, u.values.len())));
        }
        Ok(self.quadratic_form(&u.values[1..n]))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> io::Result<()> {
        self.matrix.write_csv(out)
    }
}

/// Dirichlet finite-difference matrix on the interior nodes of `[0, L]`.
pub fn assemble(spec: &OperatorSpec) -> Result<DiscreteForm> {
    let n = spec.cells();
    if n < 3 {
        return Err(Error::param("truncation", format!("need at least two interior nodes, got {}", n.saturating_sub(1))));
    }
    let h = spec.step();
    let x = spec.path().values();
    let c = spec.coupling();
    let diag = (1..n)
        .map(|i| 2.0 / (h * h) + spec.p(spec.time(i)) + c * (x[i + 1] - x[i]) / h)
        .collect();
    let offdiag = vec![-1.0 / (h * h); n - 2];
    Ok(DiscreteForm { matrix: TridiagonalMatrix::new(diag, offdiag)?, step: h, truncation: spec.truncation() })
}

/// The `k_max` smallest eigenvalues of the assembled matrix.
pub fn spectrum(form: &DiscreteForm, k_max: usize) -> Result<Vec<EigenvalueRecord>> {
    if k_max == 0 || k_max > form.matrix.dim() {
        return Err(Error::param("k_max", format!("must be in 1..={}", form.matrix.dim())));
    }
    Ok((1..=k_max)
        .map(|k| {
            let (lo, hi) = form.matrix.eigenvalue_bracket(k - 1);
            let value = 0.5 * (lo + hi);
            let vector = form.matrix.eigenvector(value);
            EigenvalueRecord {
                index: k,
                value,
                oscillation_count: sign_changes(&vector, NODE_FLOOR),
                bisection_width: hi - lo,
                truncation: form.truncation,
                method: Method::Form,
            }
        })
        .collect())
}
