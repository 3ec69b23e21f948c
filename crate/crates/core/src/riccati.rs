//! The Riccati variable `z = u'/u`, tracked through its explosions.
//!
//! `z` is read off the Prüfer phase as `z = Q + cot θ`, so it is never
//! integrated through a pole. Every upward crossing of `kπ` by `θ` is a zero
//! of `u`: `z` leaves to `-∞` and comes back from `+∞`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid;
use crate::operator::OperatorSpec;
use crate::prufer;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiccatiLog {
    pub lambda: f64,
    /// `None` stands for `z(0) = +∞`.
    pub initial: Option<f64>,
    pub step: f64,
    pub explosion_times: Vec<f64>,
    /// `z` at every grid time of `[0, horizon]`; infinite where `u` vanishes.
    pub values: Vec<f64>,
    pub final_value: f64,
}

impl RiccatiLog {
    pub fn horizon(&self) -> f64 {
        self.step * (self.values.len() - 1) as f64
    }

    /// Residual of `z(t) - z(s) = Q(t) - Q(s) + ∫_s^t (p - λ - z²)` on a grid
    /// interval where `z` stays finite.
    ///
    /// The integral uses the end-corrected trapezoid rule cell by cell; inside
    /// a cell `Q` is linear, so `z' = ΔQ/h + p - λ - z²` there.
    pub fn integral_residual(&self, spec: &OperatorSpec, s: f64, t: f64) -> Result<f64> {
        let i = grid::index_of(s, self.step)?;
        let j = grid::index_of(t, self.step)?;
        if !(i < j && j < self.values.len()) {
            return Err(Error::Uncovered { from: s, to: t, available: self.horizon() });
        }
        let z = &self.values;
        if z[i..=j].iter().any(|v| !v.is_finite()) {
            return Err(Error::param("interval", "z explodes inside the interval"));
        }
        let h = self.step;
        let pot = spec.potential();
        let f = |k: usize| pot.eval(spec.time(k)) - self.lambda - z[k] * z[k];
        let df = |k: usize, dq: f64| {
            let t = spec.time(k);
            pot.derivative(t) - 2.0 * z[k] * (dq + pot.eval(t) - self.lambda - z[k] * z[k])
        };
        let mut integral = 0.0;
        for k in i..j {
            let dq = (spec.q_at(k + 1) - spec.q_at(k)) / h;
            integral += 0.5 * h * (f(k) + f(k + 1)) - h * h / 12.0 * (df(k + 1, dq) - df(k, dq));
        }
        Ok((z[j] - z[i] - (spec.q_at(j) - spec.q_at(i)) - integral).abs())
    }
}

/// `θ(0)` for a given `z(0)`; `Q(0) = 0` so `z(0) = cot θ(0)`.
fn initial_phase(z0: Option<f64>) -> Result<f64> {
    match z0 {
        None => Ok(0.0),
        Some(z) if z.is_finite() => Ok(FRAC_PI_2 - z.atan()),
        Some(z) => Err(Error::param("z0", format!("must be finite or +∞, got {z}"))),
    }
}

pub fn riccati_flow(spec: &OperatorSpec, lambda: f64, z0: Option<f64>, horizon: f64) -> Result<RiccatiLog> {
    let cells = grid::index_of(horizon, spec.step())?;
    if cells > spec.cells() {
        return Err(Error::Uncovered { from: 0.0, to: horizon, available: spec.truncation() });
    }
    let theta0 = initial_phase(z0)?;
    let log = prufer::phase_log_from(spec, lambda, theta0, cells);
    let values: Vec<f64> = log
        .theta
        .iter()
        .enumerate()
        .map(|(i, &th)| {
            let s = th.sin();
            if s == 0.0 || (i == 0 && z0.is_none()) {
                f64::INFINITY
            } else {
                spec.q_at(i) + th.cos() / s
            }
        })
        .collect();
    let final_value = *values.last().unwrap();
    Ok(RiccatiLog {
        lambda,
        initial: z0,
        step: spec.step(),
        explosion_times: log.crossings.iter().map(|c| c.0).collect(),
        values,
        final_value,
    })
}

/// Explosions on `[0, horizon]` from the Dirichlet start `z(0) = +∞`.
pub fn explosion_count(spec: &OperatorSpec, lambda: f64, horizon: f64) -> Result<usize> {
    Ok(riccati_flow(spec, lambda, None, horizon)?.explosion_times.len())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CensusRow {
    pub lambda: f64,
    pub horizon: f64,
    pub count: usize,
    pub seed: u64,
    /// Phase count on `[0, horizon]`, for the duality check.
    pub count_below: usize,
}

/// Explosion counts over a `λ × horizon` grid, with the phase count alongside.
pub fn census(spec: &OperatorSpec, lambdas: &[f64], horizons: &[f64]) -> Result<Vec<CensusRow>> {
    let mut rows = Vec::with_capacity(lambdas.len() * horizons.len());
    for &horizon in horizons {
        let restricted = spec.with_truncation(horizon)?;
        for &lambda in lambdas {
            rows.push(CensusRow {
                lambda,
                horizon,
                count: explosion_count(spec, lambda, horizon)?,
                seed: spec.seed(),
                count_below: prufer::count_below(&restricted, lambda),
            });
        }
    }
    Ok(rows)
}

/// Writes `lambda,horizon,count,seed,count_below` rows.
pub fn write_census_csv<W: Write>(rows: &[CensusRow], mut out: W) -> io::Result<()> {
    writeln!(out, "lambda,horizon,count,seed,count_below")?;
    for r in rows {
        writeln!(out, "{},{},{},{},{}", r.lambda, r.horizon, r.count, r.seed, r.count_below)?;
    }
    Ok(())
}

/// `θ` modulo π mapped back to a finite `z`, exposed for plotting.
pub fn phase_to_z(q: f64, theta: f64) -> f64 {
    let r = theta.rem_euclid(PI);
    if r == 0.0 {
        f64::INFINITY
    } else {
        q + 1.0 / r.tan()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::Potential;

    #[test]
    fn free_cotangent() {
        let spec = OperatorSpec::deterministic(Potential::Zero, 1e-3, 10.0).unwrap();
        let log = riccati_flow(&spec, 1.0, None, 10.0).unwrap();
        assert_eq!(log.explosion_times.len(), 3);
        for (k, t) in log.explosion_times.iter().enumerate() {
            let want = (k + 1) as f64 * PI;
            assert!(*t >= want - 1e-6 && *t < want + 1e-3 + 1e-6, "{t}");
        }
        assert!((log.values[500] - (0.5f64).tan().recip()).abs() < 1e-8);
    }

    #[test]
    fn free_hyperbola() {
        let spec = OperatorSpec::deterministic(Potential::Zero, 1e-3, 10.0).unwrap();
        let log = riccati_flow(&spec, 0.0, None, 10.0).unwrap();
        assert!(log.explosion_times.is_empty());
        assert!((log.final_value - 0.1).abs() < 1e-8);
        assert_eq!(log.values[0], f64::INFINITY);
    }

    #[test]
    fn finite_start() {
        let spec = OperatorSpec::deterministic(Potential::Zero, 1e-3, 2.0).unwrap();
        // z = -tan t for u = cos t.
        let log = riccati_flow(&spec, 1.0, Some(0.0), 2.0).unwrap();
        assert_eq!(log.explosion_times.len(), 1);
        assert!((log.explosion_times[0] - FRAC_PI_2).abs() < 1.1e-3);
        assert!((log.values[1000] + 1f64.tan()).abs() < 1e-8);
        assert!(riccati_flow(&spec, 1.0, Some(f64::NAN), 2.0).is_err());
    }

    #[test]
    fn laplacian_count() {
        let spec = OperatorSpec::deterministic(Potential::Zero, PI / 1000.0, PI).unwrap();
        assert_eq!(explosion_count(&spec, 4.5, PI).unwrap(), 2);
    }

    #[test]
    fn integral_identity_between_explosions() {
        let spec = OperatorSpec::stochastic_airy(2.0, 1e-3, 10.0, 5).unwrap();
        let log = riccati_flow(&spec, 6.0, None, 10.0).unwrap();
        let mut edges = vec![0.0];
        edges.extend(&log.explosion_times);
        edges.push(10.0);
        for w in edges.windows(2) {
            let s = ((w[0] + 0.1) / 1e-3).ceil() * 1e-3;
            let t = ((w[1] - 0.1) / 1e-3).floor() * 1e-3;
            if t - s > 0.05 {
                let r = log.integral_residual(&spec, s, t).unwrap();
                assert!(r < 1e-3, "[{s}, {t}]: {r}");
            }
        }
    }

    #[test]
    fn census_duality() {
        let spec = OperatorSpec::stochastic_airy(2.0, 1e-3, 20.0, 7).unwrap();
        let rows = census(&spec, &[0.0, 2.0, 4.0, 6.0, 8.0], &[20.0]).unwrap();
        assert!(rows.iter().all(|r| r.count == r.count_below));
        let mut buf = Vec::new();
        write_census_csv(&rows, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 6);
    }
}
