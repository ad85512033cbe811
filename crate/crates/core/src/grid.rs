//! Periodic structured grids and per-cell state storage.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{RescaledState, NVAR};

/// Periodic 1D or 2D grid on `[0, lx) x [0, ly)`.
///
/// Cells are stored row-major: index `iy * nx + ix`. A 1D grid has `ny = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub dim: usize,
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
}

impl Grid {
    pub fn new_1d(nx: usize, lx: f64) -> Result<Self> {
        let g = Self { dim: 1, nx, ny: 1, lx, ly: 1.0 };
        g.validate()?;
        Ok(g)
    }

    pub fn new_2d(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Self> {
        let g = Self { dim: 2, nx, ny, lx, ly };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        match self.dim {
            1 => {
                if self.ny != 1 {
                    return Err(Error::Config("1D grid must have ny = 1"));
                }
            }
            2 => {
                if self.ny < 4 {
                    return Err(Error::Config("ny must be >= 4"));
                }
                if !(self.ly > 0.0 && self.ly.is_finite()) {
                    return Err(Error::Config("ly must be > 0"));
                }
            }
            _ => return Err(Error::Config("dim must be 1 or 2")),
        }
        if self.nx < 4 {
            return Err(Error::Config("nx must be >= 4"));
        }
        if !(self.lx > 0.0 && self.lx.is_finite()) {
            return Err(Error::Config("lx must be > 0"));
        }
        Ok(())
    }

    #[inline]
    pub fn n_cells(&self) -> usize {
        self.nx * self.ny
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    #[inline]
    pub fn dy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    /// Cell size along an active axis.
    #[inline]
    pub fn spacing(&self, axis: usize) -> f64 {
        if axis == 0 {
            self.dx()
        } else {
            self.dy()
        }
    }

    /// Cell area (2D) or length (1D).
    pub fn cell_volume(&self) -> f64 {
        if self.dim == 1 {
            self.dx()
        } else {
            self.dx() * self.dy()
        }
    }

    #[inline]
    pub fn index(&self, ix: usize, iy: usize) -> usize {
        iy * self.nx + ix
    }

    /// Cell-center coordinates; `y = 0` on 1D grids.
    pub fn center(&self, cell: usize) -> (f64, f64) {
        let ix = cell % self.nx;
        let iy = cell / self.nx;
        let x = (ix as f64 + 0.5) * self.dx();
        let y = if self.dim == 1 { 0.0 } else { (iy as f64 + 0.5) * self.dy() };
        (x, y)
    }

    /// Periodic neighbour of `cell` shifted by `offset` along `axis`.
    #[inline]
    pub fn neighbor(&self, cell: usize, axis: usize, offset: isize) -> usize {
        let ix = cell % self.nx;
        let iy = cell / self.nx;
        if axis == 0 {
            let n = self.nx as isize;
            self.index(((ix as isize + offset).rem_euclid(n)) as usize, iy)
        } else {
            let n = self.ny as isize;
            self.index(ix, ((iy as isize + offset).rem_euclid(n)) as usize)
        }
    }
}

/// Rescaled state per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub grid: Grid,
    pub cells: Vec<RescaledState>,
}

impl Field {
    pub fn uniform(grid: Grid, state: RescaledState) -> Self {
        Self { grid, cells: alloc::vec![state; grid.n_cells()] }
    }

    pub fn from_fn(grid: Grid, mut f: impl FnMut(f64, f64) -> RescaledState) -> Self {
        let cells = (0..grid.n_cells())
            .map(|c| {
                let (x, y) = grid.center(c);
                f(x, y)
            })
            .collect();
        Self { grid, cells }
    }

    pub fn new(grid: Grid, cells: Vec<RescaledState>) -> Result<Self> {
        if cells.len() != grid.n_cells() {
            return Err(Error::Usage("cell count does not match grid"));
        }
        Ok(Self { grid, cells })
    }

    /// One variable (by index into the 14-vector) as a contiguous array.
    pub fn component(&self, var: usize) -> Vec<f64> {
        self.cells.iter().map(|c| c.to_array()[var]).collect()
    }

    /// All 14 variables as separate arrays.
    pub fn components(&self) -> [Vec<f64>; NVAR] {
        let mut out: [Vec<f64>; NVAR] = core::array::from_fn(|_| Vec::with_capacity(self.cells.len()));
        for c in &self.cells {
            let a = c.to_array();
            for (v, x) in out.iter_mut().zip(a) {
                v.push(x);
            }
        }
        out
    }

    pub fn is_finite(&self) -> bool {
        self.cells.iter().all(|c| c.is_finite())
    }

    /// Largest absolute entry over all cells and variables.
    pub fn max_abs(&self) -> f64 {
        self.cells
            .iter()
            .flat_map(|c| c.to_array())
            .fold(0.0, |m: f64, x| m.max(x.abs()))
    }
}
