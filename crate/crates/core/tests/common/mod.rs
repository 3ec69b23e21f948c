//! Reference computations shared by the integration tests. Nothing here
//! calls into the library's solvers.

#![allow(dead_code)]

/// Eigenvalues below `x` of the Dirichlet finite-difference matrix of
/// `-u'' + p u` on `[0, length]`, counted by the signs of the `LDLᵀ` pivots.
pub fn fd_count_below(p: impl Fn(f64) -> f64, length: f64, step: f64, x: f64) -> usize {
    let n = (length / step).round() as usize;
    let off2 = 1.0 / step.powi(4);
    let mut count = 0;
    let mut pivot = 1.0;
    for i in 1..n {
        let d = 2.0 / (step * step) + p(i as f64 * step) - x;
        pivot = if i == 1 { d } else { d - off2 / pivot };
        if pivot == 0.0 {
            pivot = -1e-300;
        }
        if pivot < 0.0 {
            count += 1;
        }
    }
    count
}

/// `k`-th (1-based) finite-difference eigenvalue by bisection on
/// [`fd_count_below`].
pub fn fd_eigenvalue(p: &impl Fn(f64) -> f64, length: f64, step: f64, k: usize, lo: f64, hi: f64) -> f64 {
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo > 1e-11 {
        let mid = 0.5 * (lo + hi);
        if fd_count_below(p, length, step, mid) >= k {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// The lowest five Dirichlet eigenvalues of `-u'' + t u` on `[0, 40]` from
/// finite differences at steps `2e-4` and `1e-4`, Richardson-extrapolated
/// against the `O(h²)` error.
pub fn airy_oracle() -> [f64; 5] {
    let p = |t: f64| t;
    let mut out = [0.0; 5];
    for (k, slot) in out.iter_mut().enumerate() {
        let coarse = fd_eigenvalue(&p, 40.0, 2e-4, k + 1, 0.0, 12.0);
        let fine = fd_eigenvalue(&p, 40.0, 1e-4, k + 1, 0.0, 12.0);
        *slot = (4.0 * fine - coarse) / 3.0;
    }
    out
}

/// Negated zeros of `Ai`, rounded to five decimals.
pub const AIRY_VALUES: [f64; 5] = [2.33811, 4.08795, 5.52056, 6.78671, 7.94413];

/// Characteristic polynomial `det(T - x)` of a symmetric tridiagonal matrix
/// by the three-term recurrence, scaled to avoid overflow (sign preserved).
pub fn char_poly_sign(diag: &[f64], off: &[f64], x: f64) -> f64 {
    let (mut prev, mut cur) = (1.0f64, diag[0] - x);
    for i in 1..diag.len() {
        let next = (diag[i] - x) * cur - off[i - 1] * off[i - 1] * prev;
        prev = cur;
        cur = next;
        let s = cur.abs().max(prev.abs());
        if s > 1e100 {
            prev /= s;
            cur /= s;
        }
    }
    cur
}

/// All eigenvalues by scanning the characteristic polynomial for sign
/// changes on a grid and bisecting each bracket. The scan is refined until
/// `n` roots are found.
pub fn brute_force_eigenvalues(diag: &[f64], off: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let radius = diag
        .iter()
        .enumerate()
        .map(|(i, d)| {
            let l = if i > 0 { off[i - 1].abs() } else { 0.0 };
            let r = off.get(i).map_or(0.0, |v| v.abs());
            d.abs() + l + r
        })
        .fold(0.0f64, f64::max)
        + 1.0;
    let mut points = 20_000usize;
    loop {
        let mut roots = Vec::new();
        let h = 2.0 * radius / points as f64;
        let mut x0 = -radius;
        let mut f0 = char_poly_sign(diag, off, x0);
        for i in 1..=points {
            let x1 = -radius + i as f64 * h;
            let f1 = char_poly_sign(diag, off, x1);
            if f1 == 0.0 {
                roots.push(x1);
            } else if f0 != 0.0 && (f0 > 0.0) != (f1 > 0.0) {
                let (mut a, mut b, fa) = (x0, x1, f0);
                for _ in 0..200 {
                    let m = 0.5 * (a + b);
                    if m <= a || m >= b {
                        break;
                    }
                    let fm = char_poly_sign(diag, off, m);
                    if (fm > 0.0) == (fa > 0.0) && fm != 0.0 {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                roots.push(0.5 * (a + b));
            }
            x0 = x1;
            f0 = f1;
        }
        if roots.len() == n || points > 20_000_000 {
            return roots;
        }
        points *= 10;
    }
}
