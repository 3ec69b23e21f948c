//! Symmetric tridiagonal matrices and a Sturm-sequence bisection eigensolver.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TridiagonalMatrix {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

const MAX_BISECTIONS: usize = 256;

/// Bisection stops once the bracket is narrower than this, relative or absolute.
pub const EIGEN_TOL: f64 = 1e-12;

impl TridiagonalMatrix {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::param("diag", "matrix must have n ≥ 1"));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(Error::param(
                "offdiag",
                format!("expected {} entries, got {}", diag.len() - 1, offdiag.len()),
            ));
        }
        if diag.iter().chain(&offdiag).any(|v| !v.is_finite()) {
            return Err(Error::param("entries", "non-finite matrix entry"));
        }
        Ok(Self { diag, offdiag })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    /// Number of eigenvalues strictly below `x` (negative LDLᵀ pivots).
    pub fn count_below(&self, x: f64) -> usize {
        let d = &self.diag;
        let e = &self.offdiag;
        let pivmin = f64::MIN_POSITIVE * e.iter().fold(1.0f64, |m, v| m.max(v * v));
        let mut count = 0;
        let mut q = d[0] - x;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
        for i in 1..d.len() {
            q = (d[i] - x) - e[i - 1] * e[i - 1] / q;
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin enclosure of the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        let n = self.dim();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.offdiag[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.offdiag[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// Bracket `(lo, hi)` of the `index`-th smallest eigenvalue (0-based),
    /// with `count_below(lo) ≤ index < count_below(hi)`.
    pub fn eigenvalue_bracket(&self, index: usize) -> (f64, f64) {
        assert!(index < self.dim(), "eigenvalue index {index} out of range");
        let (g_lo, g_hi) = self.gershgorin();
        let pad = 1e-9 * (g_hi - g_lo).abs().max(1.0) + f64::MIN_POSITIVE;
        bisect(g_lo - pad, g_hi + pad, |x| self.count_below(x) > index)
    }

    pub fn eigenvalue(&self, index: usize) -> f64 {
        let (lo, hi) = self.eigenvalue_bracket(index);
        0.5 * (lo + hi)
    }

    /// All eigenvalues, ascending. Exact zeros on the off-diagonal split the
    /// matrix into independent blocks.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim());
        let mut start = 0;
        for i in 0..=self.offdiag.len() {
            if i == self.offdiag.len() || self.offdiag[i] == 0.0 {
                let block = TridiagonalMatrix {
                    diag: self.diag[start..=i].to_vec(),
                    offdiag: self.offdiag[start..i].to_vec(),
                };
                if block.dim() == 1 {
                    out.push(block.diag[0]);
                } else {
                    out.extend((0..block.dim()).map(|k| block.eigenvalue(k)));
                }
                start = i + 1;
            }
        }
        out.sort_by(f64::total_cmp);
        out
    }

    /// The `k` smallest eigenvalues, ascending.
    pub fn smallest(&self, k: usize) -> Vec<f64> {
        (0..k.min(self.dim())).map(|i| self.eigenvalue(i)).collect()
    }

    /// The `k` largest eigenvalues, descending.
    pub fn largest(&self, k: usize) -> Vec<f64> {
        let n = self.dim();
        (0..k.min(n)).map(|j| self.eigenvalue(n - 1 - j)).collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim();
        assert_eq!(x.len(), n);
        (0..n)
            .map(|i| {
                let mut y = self.diag[i] * x[i];
                if i > 0 {
                    y += self.offdiag[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    y += self.offdiag[i] * x[i + 1];
                }
                y
            })
            .collect()
    }

    /// `xᵀ M x`.
    pub fn quadratic(&self, x: &[f64]) -> f64 {
        self.mul_vec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// Unit eigenvector for an eigenvalue approximation, by inverse iteration.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.dim();
        if n == 1 {
            return vec![1.0];
        }
        let (g_lo, g_hi) = self.gershgorin();
        let norm = g_lo.abs().max(g_hi.abs()).max(f64::MIN_POSITIVE);
        let shift = lambda + 4.0 * f64::EPSILON * norm;
        let lu = TridiagonalLu::factor(self, shift);
        let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i * 7919) % 13) as f64 / 13.0).collect();
        for _ in 0..3 {
            lu.solve_in_place(&mut x);
            let s = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            x.iter_mut().for_each(|v| *v /= s);
        }
        x
    }

    /// CSV with header `i,diag,offdiag`; the last row has an empty off-diagonal.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "i,diag,offdiag")?;
        for (i, d) in self.diag.iter().enumerate() {
            match self.offdiag.get(i) {
                Some(e) => writeln!(out, "{i},{d:.16e},{e:.16e}")?,
                None => writeln!(out, "{i},{d:.16e},")?,
            }
        }
        Ok(())
    }
}

/// Bisection on a monotone predicate: returns `(lo, hi)` with `!pred(lo)`,
/// `pred(hi)` and `hi - lo ≤ max(EIGEN_TOL, EIGEN_TOL·|mid|)` (or no
/// representable midpoint left).
fn bisect(mut lo: f64, mut hi: f64, pred: impl Fn(f64) -> bool) -> (f64, f64) {
    for _ in 0..MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= EIGEN_TOL * mid.abs().max(1.0) || mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    (lo, hi)
}

/// Sign changes of a vector, ignoring entries below `rel_floor · max|x|`.
pub fn sign_changes(x: &[f64], rel_floor: f64) -> usize {
    let floor = rel_floor * x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut last = 0.0f64;
    let mut count = 0;
    for &v in x {
        if v.abs() > floor {
            if last != 0.0 && (v > 0.0) != (last > 0.0) {
                count += 1;
            }
            last = v;
        }
    }
    count
}

/// LU factorisation of `T - σI` with partial pivoting (two super-diagonals).
struct TridiagonalLu {
    d: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    dl: Vec<f64>,
    swapped: Vec<bool>,
}

impl TridiagonalLu {
    fn factor(m: &TridiagonalMatrix, shift: f64) -> Self {
        let n = m.dim();
        let mut d: Vec<f64> = m.diag.iter().map(|v| v - shift).collect();
        let mut du = m.offdiag.clone();
        let mut dl = m.offdiag.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        let tiny = f64::EPSILON * m.gershgorin().1.abs().max(m.gershgorin().0.abs()).max(1.0);
        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let f = dl[i] / d[i];
                dl[i] = f;
                d[i + 1] -= f * du[i];
            } else {
                let f = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = f;
                let tmp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = tmp - f * d[i + 1];
                if i + 1 < n - 1 {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -f;
                }
                swapped[i] = true;
            }
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        Self { d, du, du2, dl, swapped }
    }

    fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.d.len();
        for i in 0..n - 1 {
            if self.swapped[i] {
                b.swap(i, i + 1);
                b[i + 1] -= self.dl[i] * b[i];
            } else {
                b[i + 1] -= self.dl[i] * b[i];
            }
        }
        b[n - 1] /= self.d[n - 1];
        if n > 1 {
            b[n - 2] = (b[n - 2] - self.du[n - 2] * b[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - self.du[i] * b[i + 1] - self.du2[i] * b[i + 2]) / self.d[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_by_one_and_two_by_two() {
        let m = TridiagonalMatrix::new(vec![3.5], vec![]).unwrap();
        assert_eq!(m.eigenvalues(), vec![3.5]);
        let m = TridiagonalMatrix::new(vec![0.0, 0.0], vec![1.0]).unwrap();
        let ev = m.eigenvalues();
        assert!((ev[0] + 1.0).abs() < 1e-12 && (ev[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_malformed() {
        assert!(TridiagonalMatrix::new(vec![], vec![]).is_err());
        assert!(TridiagonalMatrix::new(vec![1.0, 2.0], vec![]).is_err());
        assert!(TridiagonalMatrix::new(vec![1.0, f64::NAN], vec![0.0]).is_err());
    }

    #[test]
    fn free_chain_closed_form() {
        let n = 60;
        let m = TridiagonalMatrix::new(vec![0.0; n], vec![-1.0; n - 1]).unwrap();
        let ev = m.eigenvalues();
        let mut exact: Vec<f64> = (1..=n)
            .map(|k| 2.0 * (k as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos())
            .collect();
        exact.sort_by(f64::total_cmp);
        for (a, b) in ev.iter().zip(&exact) {
            assert!((a - b).abs() < 1e-11);
        }
        assert_eq!(m.count_below(f64::INFINITY), n);
        assert_eq!(m.count_below(f64::NEG_INFINITY), 0);
    }

    #[test]
    fn zero_offdiagonal_splits_blocks() {
        let m = TridiagonalMatrix::new(vec![5.0, 0.0, 0.0, -3.0], vec![0.0, 2.0, 0.0]).unwrap();
        let ev = m.eigenvalues();
        let expected = [-3.0, -2.0, 2.0, 5.0];
        for (a, b) in ev.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-11, "{ev:?}");
        }
        assert!((m.eigenvalue(1) + 2.0).abs() < 1e-11);
    }

    #[test]
    fn largest_and_smallest() {
        let m = TridiagonalMatrix::new(vec![1.0, 2.0, 3.0, 4.0], vec![0.5, 0.5, 0.5]).unwrap();
        let all = m.eigenvalues();
        let top = m.largest(2);
        assert!((top[0] - all[3]).abs() < 1e-12 && (top[1] - all[2]).abs() < 1e-12);
        let low = m.smallest(2);
        assert!((low[0] - all[0]).abs() < 1e-12 && (low[1] - all[1]).abs() < 1e-12);
    }

    #[test]
    fn inverse_iteration_vector() {
        let n = 200;
        let m = TridiagonalMatrix::new(vec![2.0; n], vec![-1.0; n - 1]).unwrap();
        for k in 0..4 {
            let lambda = m.eigenvalue(k);
            let v = m.eigenvector(lambda);
            let mv = m.mul_vec(&v);
            let resid = mv.iter().zip(&v).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
            assert!(resid < 1e-9, "k={k} resid={resid}");
            assert_eq!(sign_changes(&v, 1e-8), k);
        }
    }

    #[test]
    fn quadratic_form() {
        let m = TridiagonalMatrix::new(vec![8.0, 8.0], vec![-4.0]).unwrap();
        assert_eq!(m.quadratic(&[1.0, 1.0]), 8.0);
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("i,diag,offdiag\n0,"));
        assert_eq!(s.lines().count(), 3);
    }
}
