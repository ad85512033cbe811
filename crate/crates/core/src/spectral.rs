//! Fourier differentiation and Leray projection on periodic grids.
//!
//! Power-of-two sizes use an iterative radix-2 FFT; other sizes fall back to a
//! direct DFT (fine for the small grids where that happens).

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::ops::{Add, Mul, Sub};

use crate::grid::Grid;
use crate::math::{cos, sin};

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub const ZERO: Complex = Complex { re: 0.0, im: 0.0 };

    #[inline]
    pub fn new(re: f64, im: f64) -> Self {
        Self { re, im }
    }

    #[inline]
    pub fn scale(self, s: f64) -> Self {
        Self::new(self.re * s, self.im * s)
    }

    /// Multiply by `i * s`.
    #[inline]
    pub fn times_i(self, s: f64) -> Self {
        Self::new(-self.im * s, self.re * s)
    }

    #[inline]
    pub fn conj(self) -> Self {
        Self::new(self.re, -self.im)
    }
}

impl Add for Complex {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for Complex {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for Complex {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Self::new(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)
    }
}

/// One-dimensional complex transform of fixed length.
#[derive(Debug, Clone)]
pub struct Fft {
    n: usize,
    /// `exp(-2 pi i j / n)` for `j < n`.
    roots: Vec<Complex>,
    bitrev: Vec<usize>,
}

impl Fft {
    pub fn new(n: usize) -> Self {
        assert!(n > 0);
        let roots = (0..n)
            .map(|j| {
                let a = -2.0 * PI * j as f64 / n as f64;
                Complex::new(cos(a), sin(a))
            })
            .collect();
        let bitrev = if n.is_power_of_two() {
            let bits = n.trailing_zeros();
            (0..n)
                .map(|i| if bits == 0 { 0 } else { i.reverse_bits() >> (usize::BITS - bits) })
                .collect()
        } else {
            Vec::new()
        };
        Self { n, roots, bitrev }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// In-place forward transform (no normalization).
    pub fn forward(&self, buf: &mut [Complex]) {
        debug_assert_eq!(buf.len(), self.n);
        if self.n.is_power_of_two() {
            self.radix2(buf);
        } else {
            self.direct(buf);
        }
    }

    /// In-place inverse transform, normalized by `1/n`.
    pub fn inverse(&self, buf: &mut [Complex]) {
        buf.iter_mut().for_each(|z| *z = z.conj());
        self.forward(buf);
        let s = 1.0 / self.n as f64;
        buf.iter_mut().for_each(|z| *z = z.conj().scale(s));
    }

    fn radix2(&self, buf: &mut [Complex]) {
        let n = self.n;
        for i in 0..n {
            let j = self.bitrev[i];
            if i < j {
                buf.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let stride = n / len;
            let half = len / 2;
            for start in (0..n).step_by(len) {
                for j in 0..half {
                    let w = self.roots[j * stride];
                    let a = buf[start + j];
                    let b = buf[start + j + half] * w;
                    buf[start + j] = a + b;
                    buf[start + j + half] = a - b;
                }
            }
            len <<= 1;
        }
    }

    fn direct(&self, buf: &mut [Complex]) {
        let n = self.n;
        let input: Vec<Complex> = buf.to_vec();
        for (k, out) in buf.iter_mut().enumerate() {
            let mut acc = Complex::ZERO;
            for (j, x) in input.iter().enumerate() {
                acc = acc + *x * self.roots[(j * k) % n];
            }
            *out = acc;
        }
    }
}

/// Angular wavenumbers for a periodic axis of `n` points and length `len`.
/// With `derivative = true` the Nyquist mode is zeroed (odd derivatives).
fn wavenumbers(n: usize, len: f64, derivative: bool) -> Vec<f64> {
    let base = 2.0 * PI / len;
    (0..n)
        .map(|j| {
            let m = if j <= n / 2 { j as isize } else { j as isize - n as isize };
            if derivative && n.is_multiple_of(2) && j == n / 2 {
                0.0
            } else {
                base * m as f64
            }
        })
        .collect()
}

/// Spectral operators for one grid.
#[derive(Debug, Clone)]
pub struct Spectral {
    grid: Grid,
    fx: Fft,
    fy: Fft,
    kx: Vec<f64>,
    ky: Vec<f64>,
}

impl Spectral {
    pub fn new(grid: &Grid) -> Self {
        let ky = if grid.dim == 1 { vec![0.0] } else { wavenumbers(grid.ny, grid.ly, true) };
        Self {
            grid: *grid,
            fx: Fft::new(grid.nx),
            fy: Fft::new(grid.ny),
            kx: wavenumbers(grid.nx, grid.lx, true),
            ky,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Derivative wavenumbers of a spectral coefficient index.
    #[inline]
    fn k_of(&self, idx: usize) -> (f64, f64) {
        (self.kx[idx % self.grid.nx], self.ky[idx / self.grid.nx])
    }

    pub fn forward(&self, data: &[f64]) -> Vec<Complex> {
        let mut buf: Vec<Complex> = data.iter().map(|&x| Complex::new(x, 0.0)).collect();
        self.transform(&mut buf, false);
        buf
    }

    /// Real part of the inverse transform (consumes the coefficients).
    pub fn inverse(&self, mut spec: Vec<Complex>) -> Vec<f64> {
        self.transform(&mut spec, true);
        spec.into_iter().map(|z| z.re).collect()
    }

    fn transform(&self, buf: &mut [Complex], inverse: bool) {
        let (nx, ny) = (self.grid.nx, self.grid.ny);
        for row in buf.chunks_exact_mut(nx) {
            if inverse {
                self.fx.inverse(row);
            } else {
                self.fx.forward(row);
            }
        }
        if ny > 1 {
            let mut col = vec![Complex::ZERO; ny];
            for ix in 0..nx {
                for iy in 0..ny {
                    col[iy] = buf[iy * nx + ix];
                }
                if inverse {
                    self.fy.inverse(&mut col);
                } else {
                    self.fy.forward(&mut col);
                }
                for iy in 0..ny {
                    buf[iy * nx + ix] = col[iy];
                }
            }
        }
    }

    /// Multiply coefficients by `i k_axis`.
    fn differentiate_coeffs(&self, spec: &[Complex], axis: usize) -> Vec<Complex> {
        spec.iter()
            .enumerate()
            .map(|(idx, z)| {
                let (kx, ky) = self.k_of(idx);
                z.times_i(if axis == 0 { kx } else { ky })
            })
            .collect()
    }

    pub fn derivative(&self, data: &[f64], axis: usize) -> Vec<f64> {
        if axis >= self.grid.dim {
            return vec![0.0; data.len()];
        }
        let spec = self.forward(data);
        self.inverse(self.differentiate_coeffs(&spec, axis))
    }

    /// `(d/dx, d/dy)`; the second entry is zero on 1D grids.
    pub fn gradient(&self, data: &[f64]) -> [Vec<f64>; 2] {
        let spec = self.forward(data);
        let dx = self.inverse(self.differentiate_coeffs(&spec, 0));
        let dy = if self.grid.dim == 2 {
            self.inverse(self.differentiate_coeffs(&spec, 1))
        } else {
            vec![0.0; data.len()]
        };
        [dx, dy]
    }

    pub fn divergence(&self, vx: &[f64], vy: &[f64]) -> Vec<f64> {
        let mut d = self.derivative(vx, 0);
        if self.grid.dim == 2 {
            for (a, b) in d.iter_mut().zip(self.derivative(vy, 1)) {
                *a += b;
            }
        }
        d
    }

    /// Leray projection of the in-plane vector field `(vx, vy)`.
    pub fn project(&self, vx: &[f64], vy: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut sx = self.forward(vx);
        let mut sy = self.forward(vy);
        for idx in 0..sx.len() {
            let (kx, ky) = self.k_of(idx);
            let k2 = kx * kx + ky * ky;
            if k2 == 0.0 {
                continue;
            }
            let dot = sx[idx].scale(kx) + sy[idx].scale(ky);
            sx[idx] = sx[idx] - dot.scale(kx / k2);
            sy[idx] = sy[idx] - dot.scale(ky / k2);
        }
        (self.inverse(sx), self.inverse(sy))
    }

    /// Zero-mean `p` with `div grad p = div (vx, vy)` in the discrete sense
    /// used by [`Spectral::project`], so `v - grad p` is the projection.
    pub fn pressure_from(&self, vx: &[f64], vy: &[f64]) -> Vec<f64> {
        let sx = self.forward(vx);
        let sy = self.forward(vy);
        let spec = sx
            .iter()
            .zip(sy.iter())
            .enumerate()
            .map(|(idx, (a, b))| {
                let (kx, ky) = self.k_of(idx);
                let k2 = kx * kx + ky * ky;
                if k2 == 0.0 {
                    Complex::ZERO
                } else {
                    // p_hat = -i (k . v_hat) / |k|^2
                    (a.scale(kx) + b.scale(ky)).times_i(-1.0 / k2)
                }
            })
            .collect();
        self.inverse(spec)
    }
}
