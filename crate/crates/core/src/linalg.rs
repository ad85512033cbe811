//! Small dense matrices with compile-time size and a Jacobi eigensolver.

use core::ops::{Index, IndexMut, Mul};

use crate::math::sqrt;

/// Dense `N x N` matrix stored row-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquareMatrix<const N: usize> {
    data: [[f64; N]; N],
}

/// Flux Jacobian / symmetrizer size: (phi, u, sigma, k, y).
pub type SquareMatrix14 = SquareMatrix<14>;
/// Dissipation matrix size: (sigma, k, y).
pub type SquareMatrix10 = SquareMatrix<10>;

impl<const N: usize> Default for SquareMatrix<N> {
    fn default() -> Self {
        Self::zeros()
    }
}

impl<const N: usize> SquareMatrix<N> {
    pub const fn zeros() -> Self {
        Self { data: [[0.0; N]; N] }
    }

    pub fn identity() -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.data[i][i] = 1.0;
        }
        m
    }

    pub fn from_diagonal(diag: &[f64; N]) -> Self {
        let mut m = Self::zeros();
        for i in 0..N {
            m.data[i][i] = diag[i];
        }
        m
    }

    pub fn from_rows(data: [[f64; N]; N]) -> Self {
        Self { data }
    }

    pub fn rows(&self) -> &[[f64; N]; N] {
        &self.data
    }

    pub fn diagonal(&self) -> [f64; N] {
        core::array::from_fn(|i| self.data[i][i])
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros();
        for i in 0..N {
            for j in 0..N {
                t.data[j][i] = self.data[i][j];
            }
        }
        t
    }

    pub fn mul_vec(&self, v: &[f64; N]) -> [f64; N] {
        core::array::from_fn(|i| {
            self.data[i]
                .iter()
                .zip(v.iter())
                .map(|(a, b)| a * b)
                .sum()
        })
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut m = *self;
        m.data.iter_mut().flatten().for_each(|x| *x *= s);
        m
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut m = *self;
        for i in 0..N {
            for j in 0..N {
                m.data[i][j] += other.data[i][j];
            }
        }
        m
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        self.data
            .iter()
            .map(|row| row.iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn norm_frobenius(&self) -> f64 {
        sqrt(self.data.iter().flatten().map(|x| x * x).sum())
    }

    /// `||M - M^T||_inf`.
    pub fn asymmetry_inf(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..N {
            let row: f64 = (0..N).map(|j| (self.data[i][j] - self.data[j][i]).abs()).sum();
            worst = worst.max(row);
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().flatten().all(|x| x.is_finite())
    }

    /// Eigenvalues of the symmetric part `(M + M^T)/2`, ascending.
    ///
    /// Cyclic Jacobi rotations; converges to full precision for the small
    /// matrices used here.
    pub fn symmetric_eigenvalues(&self) -> [f64; N] {
        let mut a = [[0.0; N]; N];
        for i in 0..N {
            for j in 0..N {
                a[i][j] = 0.5 * (self.data[i][j] + self.data[j][i]);
            }
        }
        let scale = self.norm_frobenius().max(f64::MIN_POSITIVE);
        for _sweep in 0..100 {
            let off: f64 = (0..N)
                .flat_map(|i| (0..N).filter(move |&j| j != i).map(move |j| (i, j)))
                .map(|(i, j)| a[i][j] * a[i][j])
                .sum();
            if sqrt(off) <= 1e-17 * scale {
                break;
            }
            for p in 0..N {
                for q in (p + 1)..N {
                    let apq = a[p][q];
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + sqrt(theta * theta + 1.0));
                    let t = if theta == 0.0 { 1.0 } else { t };
                    let c = 1.0 / sqrt(t * t + 1.0);
                    let s = t * c;
                    for k in 0..N {
                        let akp = a[k][p];
                        let akq = a[k][q];
                        a[k][p] = c * akp - s * akq;
                        a[k][q] = s * akp + c * akq;
                    }
                    for k in 0..N {
                        let apk = a[p][k];
                        let aqk = a[q][k];
                        a[p][k] = c * apk - s * aqk;
                        a[q][k] = s * apk + c * aqk;
                    }
                }
            }
        }
        let mut eig: [f64; N] = core::array::from_fn(|i| a[i][i]);
        eig.sort_by(|x, y| x.total_cmp(y));
        eig
    }
}

impl<const N: usize> Index<(usize, usize)> for SquareMatrix<N> {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i][j]
    }
}

impl<const N: usize> IndexMut<(usize, usize)> for SquareMatrix<N> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i][j]
    }
}

impl<const N: usize> Mul for SquareMatrix<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::zeros();
        for i in 0..N {
            for k in 0..N {
                let aik = self.data[i][k];
                if aik == 0.0 {
                    continue;
                }
                for j in 0..N {
                    out.data[i][j] += aik * rhs.data[k][j];
                }
            }
        }
        out
    }
}
