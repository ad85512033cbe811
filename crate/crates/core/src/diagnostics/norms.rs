//! Discrete Sobolev-type norms on periodic grids.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::math::sqrt;

/// Second-order central difference along `axis`.
pub fn central_difference(data: &[f64], grid: &Grid, axis: usize) -> Vec<f64> {
    let h = grid.spacing(axis);
    (0..data.len())
        .map(|c| (data[grid.neighbor(c, axis, 1)] - data[grid.neighbor(c, axis, -1)]) / (2.0 * h))
        .collect()
}

fn sum_sq(data: &[f64]) -> f64 {
    data.iter().map(|x| x * x).sum()
}

/// `sqrt(sum over components and multi-indices |a| <= m of ||D^a v||^2 dV)`.
///
/// `D` is the central difference; second derivatives compose it, with each
/// mixed derivative counted once.
pub fn discrete_norm(components: &[&[f64]], grid: &Grid, m: usize) -> Result<f64> {
    if m > 2 {
        return Err(Error::Usage("norm order must be 0, 1 or 2"));
    }
    let n = grid.n_cells();
    if components.iter().any(|c| c.len() != n) {
        return Err(Error::Usage("field length does not match grid"));
    }
    let mut total = 0.0;
    for v in components {
        total += sum_sq(v);
        if m >= 1 {
            let first: Vec<Vec<f64>> = (0..grid.dim).map(|a| central_difference(v, grid, a)).collect();
            for d in &first {
                total += sum_sq(d);
            }
            if m == 2 {
                for a in 0..grid.dim {
                    for b in a..grid.dim {
                        total += sum_sq(&central_difference(&first[a], grid, b));
                    }
                }
            }
        }
    }
    Ok(sqrt(total * grid.cell_volume()))
}
