//! Unitary 2D DFT over a row-major complex grid.
//!
//! Radix-2 iterative FFT for power-of-two lengths, direct DFT otherwise.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Debug, Clone)]
struct Plan1d {
    n: usize,
    /// `exp(-2 pi i k / n)` for `k < n`.
    twiddles: Vec<Complex64>,
    radix2: bool,
}

impl Plan1d {
    fn new(n: usize) -> Self {
        let twiddles = (0..n)
            .map(|k| {
                let t = -2.0 * PI * k as f64 / n as f64;
                Complex64::new(t.cos(), t.sin())
            })
            .collect();
        Self {
            n,
            twiddles,
            radix2: n.is_power_of_two(),
        }
    }

    fn twiddle(&self, k: usize, inverse: bool) -> Complex64 {
        let w = self.twiddles[k];
        if inverse {
            w.conj()
        } else {
            w
        }
    }

    /// Unnormalized transform of `buf` in place.
    fn run(&self, buf: &mut [Complex64], scratch: &mut [Complex64], inverse: bool) {
        let n = self.n;
        if n <= 1 {
            return;
        }
        if !self.radix2 {
            for (k, s) in scratch[..n].iter_mut().enumerate() {
                *s = buf
                    .iter()
                    .enumerate()
                    .map(|(j, &x)| x * self.twiddle((j * k) % n, inverse))
                    .sum();
            }
            buf.copy_from_slice(&scratch[..n]);
            return;
        }
        let bits = n.trailing_zeros();
        for i in 0..n {
            let j = i.reverse_bits() >> (usize::BITS - bits);
            if j > i {
                buf.swap(i, j);
            }
        }
        let mut len = 2;
        while len <= n {
            let half = len / 2;
            let stride = n / len;
            for start in (0..n).step_by(len) {
                for k in 0..half {
                    let w = self.twiddle(k * stride, inverse);
                    let a = buf[start + k];
                    let b = buf[start + k + half] * w;
                    buf[start + k] = a + b;
                    buf[start + k + half] = a - b;
                }
            }
            len *= 2;
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Fft2 {
    rows: Plan1d,
    cols: Plan1d,
    scale: f64,
}

impl Fft2 {
    pub(crate) fn new(rows: usize, cols: usize) -> Self {
        Self {
            rows: Plan1d::new(rows),
            cols: Plan1d::new(cols),
            scale: 1.0 / ((rows * cols) as f64).sqrt(),
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.rows.n * self.cols.n
    }

    pub(crate) fn forward(&self, grid: &mut [Complex64]) {
        self.transform(grid, false);
    }

    pub(crate) fn inverse(&self, grid: &mut [Complex64]) {
        self.transform(grid, true);
    }

    fn transform(&self, grid: &mut [Complex64], inverse: bool) {
        let (r, c) = (self.rows.n, self.cols.n);
        assert_eq!(grid.len(), r * c);
        let mut scratch = vec![Complex64::new(0.0, 0.0); r.max(c)];
        for row in grid.chunks_exact_mut(c) {
            self.cols.run(row, &mut scratch, inverse);
        }
        let mut column = vec![Complex64::new(0.0, 0.0); r];
        for j in 0..c {
            for i in 0..r {
                column[i] = grid[i * c + j];
            }
            self.rows.run(&mut column, &mut scratch, inverse);
            for i in 0..r {
                grid[i * c + j] = column[i] * self.scale;
            }
        }
    }
}
