//! Uniform-grid bookkeeping shared by every module.

use crate::error::{Error, Result};

const GRID_RTOL: f64 = 1e-9;

/// Number of whole cells of width `step` in `extent`, if `extent` lands on
/// the grid.
pub fn cells(extent: f64, step: f64) -> Option<usize> {
    if !(extent.is_finite() && step.is_finite()) || step <= 0.0 || extent < 0.0 {
        return None;
    }
    let n = (extent / step).round();
    let tol = GRID_RTOL * extent.abs().max(1.0);
    if (n * step - extent).abs() <= tol {
        Some(n as usize)
    } else {
        None
    }
}

/// Grid index of `t`, or an [`Error::OffGrid`].
pub fn index_of(t: f64, step: f64) -> Result<usize> {
    cells(t, step).ok_or(Error::OffGrid { t, step })
}

/// `m` with `m * step == 1`, when the step divides one time unit.
pub fn cells_per_unit(step: f64) -> Option<usize> {
    cells(1.0, step).filter(|&m| m >= 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_steps_land_on_grid() {
        assert_eq!(cells(15.0, 2e-3), Some(7500));
        assert_eq!(cells(1.0, 0.1), Some(10));
        assert_eq!(cells(std::f64::consts::PI, std::f64::consts::PI / 1000.0), Some(1000));
        assert_eq!(cells(1.05, 0.1), None);
        assert_eq!(cells_per_unit(0.3), None);
        assert_eq!(cells_per_unit(1e-3), Some(1000));
    }
}
