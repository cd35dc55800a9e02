//! Sensing operators `Phi: R^N -> C^M` and the measurement noise model.
//!
//! Images are real, measurements complex. The adjoint of a real-to-complex
//! map is taken with respect to the real inner products
//! `Re <Phi x, y>` and `<x, z>`, i.e. `adjoint(y) = Re(Phi^H y)`.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{dim_err, Error, Result};
use crate::fft::Fft2;
use crate::image::{dot, Image};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    SpreadSpectrum,
    FourierMask,
    Dense,
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OperatorKind::SpreadSpectrum => "spread-spectrum",
            OperatorKind::FourierMask => "fourier-mask",
            OperatorKind::Dense => "dense",
        })
    }
}

/// Linear measurement map from a real image of `n` pixels to `m` complex samples.
pub trait MeasurementOperator: Send + Sync {
    fn kind(&self) -> OperatorKind;

    /// Number of measurements `M`.
    fn m(&self) -> usize;

    /// Number of pixels `N`.
    fn n(&self) -> usize;

    /// `y = Phi x`. Panics on length mismatch.
    fn forward_into(&self, x: &[f64], y: &mut [Complex64]);

    /// `x = Re(Phi^H y)`. Panics on length mismatch.
    fn adjoint_into(&self, y: &[Complex64], x: &mut [f64]);

    fn forward(&self, x: &[f64]) -> Result<Vec<Complex64>> {
        if x.len() != self.n() {
            return Err(dim_err!(
                "operator expects {} pixels, got {}",
                self.n(),
                x.len()
            ));
        }
        let mut y = vec![Complex64::new(0.0, 0.0); self.m()];
        self.forward_into(x, &mut y);
        Ok(y)
    }

    fn adjoint(&self, y: &[Complex64]) -> Result<Vec<f64>> {
        if y.len() != self.m() {
            return Err(dim_err!(
                "operator expects {} measurements, got {}",
                self.m(),
                y.len()
            ));
        }
        let mut x = vec![0.0; self.n()];
        self.adjoint_into(y, &mut x);
        Ok(x)
    }

    /// Back-projection of visibilities; only defined for Fourier sampling.
    fn dirty_image(&self, _y: &[Complex64]) -> Result<Image> {
        Err(Error::Kind {
            expected: "fourier-mask",
        })
    }
}

/// Inverse unitary FFT of `y` zero-filled outside the mask, real part.
pub fn dirty_image(op: &dyn MeasurementOperator, y: &[Complex64]) -> Result<Image> {
    op.dirty_image(y)
}

/// Real inner product on `C^M`: `Re sum a_i conj(b_i)`.
pub fn inner_c(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.re * y.re + x.im * y.im)
        .sum()
}

pub fn norm_c(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Largest normalized adjoint defect
/// `|<Phi x, y> - <x, Phi^* y>| / (|x| |y|)` over `trials` random pairs.
pub fn adjoint_defect(op: &dyn MeasurementOperator, trials: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let x: Vec<f64> = (0..op.n()).map(|_| rng.sample(StandardNormal)).collect();
        let y: Vec<Complex64> = (0..op.m())
            .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        let mut fx = vec![Complex64::new(0.0, 0.0); op.m()];
        op.forward_into(&x, &mut fx);
        let mut ay = vec![0.0; op.n()];
        op.adjoint_into(&y, &mut ay);
        let defect = (inner_c(&fx, &y) - dot(&x, &ay)).abs();
        let scale = crate::image::norm2(&x) * norm_c(&y);
        worst = worst.max(defect / scale);
    }
    worst
}

fn check_lengths(op: &dyn MeasurementOperator, x: usize, y: usize) {
    assert_eq!(x, op.n(), "image length");
    assert_eq!(y, op.m(), "measurement length");
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpreadSpectrumConfig {
    pub seed: u64,
    pub m: usize,
}

/// `Phi x = S_Omega F (c . x)`: Rademacher modulation `c`, unitary 2D FFT `F`,
/// then selection of a uniformly random frequency subset `Omega`.
#[derive(Debug, Clone)]
pub struct SpreadSpectrum {
    rows: usize,
    cols: usize,
    modulation: Vec<f64>,
    selection: Vec<usize>,
    fft: Fft2,
}

impl SpreadSpectrum {
    pub fn new(cfg: SpreadSpectrumConfig, rows: usize, cols: usize) -> Result<Self> {
        let n = rows * cols;
        if cfg.m == 0 || cfg.m > n {
            return Err(Error::Config(alloc::format!(
                "spread spectrum needs 0 < m <= n, got m = {} and n = {n}",
                cfg.m
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let modulation = (0..n)
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
        let mut selection = index::sample(&mut rng, n, cfg.m).into_vec();
        selection.sort_unstable();
        Self::from_parts(rows, cols, modulation, selection)
    }

    /// Explicit modulation sequence and frequency selection.
    pub fn from_parts(
        rows: usize,
        cols: usize,
        modulation: Vec<f64>,
        selection: Vec<usize>,
    ) -> Result<Self> {
        let n = rows * cols;
        if modulation.len() != n {
            return Err(dim_err!(
                "modulation has {} entries for {n} pixels",
                modulation.len()
            ));
        }
        if modulation.iter().any(|&c| c != 1.0 && c != -1.0) {
            return Err(Error::Config("modulation entries must be +1 or -1".into()));
        }
        check_indices(&selection, n)?;
        Ok(Self {
            rows,
            cols,
            modulation,
            selection,
            fft: Fft2::new(rows, cols),
        })
    }

    pub fn modulation(&self) -> &[f64] {
        &self.modulation
    }

    pub fn selection(&self) -> &[usize] {
        &self.selection
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }
}

fn check_indices(indices: &[usize], n: usize) -> Result<()> {
    let mut seen = vec![false; n];
    for &i in indices {
        if i >= n {
            return Err(dim_err!("frequency index {i} out of range for {n} cells"));
        }
        if core::mem::replace(&mut seen[i], true) {
            return Err(Error::Config(alloc::format!(
                "frequency index {i} selected twice"
            )));
        }
    }
    Ok(())
}

impl MeasurementOperator for SpreadSpectrum {
    fn kind(&self) -> OperatorKind {
        OperatorKind::SpreadSpectrum
    }

    fn m(&self) -> usize {
        self.selection.len()
    }

    fn n(&self) -> usize {
        self.fft.len()
    }

    fn forward_into(&self, x: &[f64], y: &mut [Complex64]) {
        check_lengths(self, x.len(), y.len());
        let mut grid: Vec<Complex64> = x
            .iter()
            .zip(&self.modulation)
            .map(|(&v, &c)| Complex64::new(v * c, 0.0))
            .collect();
        self.fft.forward(&mut grid);
        for (out, &k) in y.iter_mut().zip(&self.selection) {
            *out = grid[k];
        }
    }

    fn adjoint_into(&self, y: &[Complex64], x: &mut [f64]) {
        check_lengths(self, x.len(), y.len());
        let mut grid = vec![Complex64::new(0.0, 0.0); self.fft.len()];
        for (&v, &k) in y.iter().zip(&self.selection) {
            grid[k] = v;
        }
        self.fft.inverse(&mut grid);
        for ((out, g), &c) in x.iter_mut().zip(&grid).zip(&self.modulation) {
            *out = g.re * c;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FourierMaskConfig {
    pub seed: u64,
    pub image_side: usize,
    /// Arcs generated before the mask is trimmed or extended to `target_m`.
    pub n_ellipses: usize,
    pub points_per_arc: usize,
    pub target_m: usize,
}

impl FourierMaskConfig {
    pub fn new(seed: u64, image_side: usize, target_m: usize) -> Self {
        Self {
            seed,
            image_side,
            n_ellipses: 24,
            points_per_arc: 2 * image_side,
            target_m,
        }
    }
}

/// Target measurement count scaled from a reference grid by pixel count,
/// e.g. `9413` at 256 becomes `588` at 64.
pub fn scaled_measurement_count(reference_m: usize, reference_side: usize, side: usize) -> usize {
    let ratio = side as f64 / reference_side as f64;
    (reference_m as f64 * ratio * ratio).round() as usize
}

/// Unitary 2D FFT followed by selection of a set of grid frequencies.
#[derive(Debug, Clone)]
pub struct FourierMask {
    rows: usize,
    cols: usize,
    mask: Vec<usize>,
    fft: Fft2,
}

const MAX_EXTRA_ARCS: usize = 100_000;

impl FourierMask {
    /// Samples along arcs of randomly parameterized ellipses centered near the
    /// origin of the frequency plane, quantized to the grid and deduplicated,
    /// skipping a small disc around the zero frequency, then trimmed at random or extended with more arcs to exactly
    /// `target_m` distinct cells.
    pub fn new(cfg: FourierMaskConfig) -> Result<Self> {
        let side = cfg.image_side;
        let n = side * side;
        if side == 0 || cfg.target_m == 0 || cfg.target_m >= n {
            return Err(Error::Config(alloc::format!(
                "fourier mask needs 0 < target_m < side^2, got target_m = {} on a {side}x{side} grid",
                cfg.target_m
            )));
        }
        if cfg.points_per_arc == 0 {
            return Err(Error::Config("points_per_arc must be positive".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let mut taken = vec![false; n];
        let mut cells = Vec::with_capacity(cfg.target_m);
        let mut arcs = 0;
        while arcs < cfg.n_ellipses || cells.len() < cfg.target_m {
            if arcs >= cfg.n_ellipses + MAX_EXTRA_ARCS {
                return Err(Error::Config(alloc::format!(
                    "could not reach {} distinct frequencies after {arcs} arcs",
                    cfg.target_m
                )));
            }
            add_arc(&mut rng, side, cfg.points_per_arc, &mut taken, &mut cells);
            arcs += 1;
        }
        // Drop a uniformly random subset of the excess.
        let excess = cells.len() - cfg.target_m;
        if excess > 0 {
            let drop = index::sample(&mut rng, cells.len(), excess);
            for i in drop.iter() {
                taken[cells[i]] = false;
            }
        }
        let mask: Vec<usize> = (0..n).filter(|&k| taken[k]).collect();
        debug_assert_eq!(mask.len(), cfg.target_m);
        Ok(Self {
            rows: side,
            cols: side,
            mask,
            fft: Fft2::new(side, side),
        })
    }

    /// Every frequency of a `rows x cols` grid.
    pub fn full(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            mask: (0..rows * cols).collect(),
            fft: Fft2::new(rows, cols),
        }
    }

    /// Mask from explicit `(row, col)` grid cells; order is irrelevant.
    pub fn from_cells(rows: usize, cols: usize, cells: &[(usize, usize)]) -> Result<Self> {
        let mut mask = Vec::with_capacity(cells.len());
        for &(r, c) in cells {
            if r >= rows || c >= cols {
                return Err(dim_err!("cell ({r}, {c}) outside a {rows}x{cols} grid"));
            }
            mask.push(r * cols + c);
        }
        check_indices(&mask, rows * cols)?;
        mask.sort_unstable();
        Ok(Self {
            rows,
            cols,
            mask,
            fft: Fft2::new(rows, cols),
        })
    }

    /// Sampled `(row, col)` cells in row-major order.
    pub fn cells(&self) -> Vec<(usize, usize)> {
        self.mask
            .iter()
            .map(|&k| (k / self.cols, k % self.cols))
            .collect()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }
}

/// Radius of the unsampled disc around the zero frequency, as a fraction of
/// the half side: an interferometer has no baselines shorter than its dishes.
const MIN_BASELINE: f64 = 0.1;

fn add_arc(
    rng: &mut ChaCha8Rng,
    side: usize,
    points: usize,
    taken: &mut [bool],
    cells: &mut Vec<usize>,
) {
    let half = side as f64 / 2.0;
    let hole = MIN_BASELINE * half;
    // Log-uniform semi-major axis: short baselines are more common.
    let (lo, hi) = (0.06f64.ln(), 0.98f64.ln());
    let a = half * rng.random_range(lo..hi).exp();
    let b = a * rng.random_range(0.3..=1.0);
    let theta = rng.random_range(0.0..PI);
    let offset = 0.02 * side as f64;
    let (cu, cv) = (
        rng.random_range(-offset..=offset),
        rng.random_range(-offset..=offset),
    );
    let start = rng.random_range(0.0..2.0 * PI);
    let span = rng.random_range(PI / 4.0..=PI);
    let (st, ct) = theta.sin_cos();
    for p in 0..points {
        let phi = start + span * p as f64 / points as f64;
        let (sp, cp) = phi.sin_cos();
        let (eu, ev) = (a * cp, b * sp);
        let u = cu + ct * eu - st * ev;
        let v = cv + st * eu + ct * ev;
        let (ur, vr) = (u.round(), v.round());
        if ur * ur + vr * vr < hole * hole {
            continue;
        }
        let col = (ur as i64).rem_euclid(side as i64) as usize;
        let row = (vr as i64).rem_euclid(side as i64) as usize;
        let k = row * side + col;
        if !taken[k] {
            taken[k] = true;
            cells.push(k);
        }
    }
}

impl MeasurementOperator for FourierMask {
    fn kind(&self) -> OperatorKind {
        OperatorKind::FourierMask
    }

    fn m(&self) -> usize {
        self.mask.len()
    }

    fn n(&self) -> usize {
        self.fft.len()
    }

    fn forward_into(&self, x: &[f64], y: &mut [Complex64]) {
        check_lengths(self, x.len(), y.len());
        let mut grid: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.fft.forward(&mut grid);
        for (out, &k) in y.iter_mut().zip(&self.mask) {
            *out = grid[k];
        }
    }

    fn adjoint_into(&self, y: &[Complex64], x: &mut [f64]) {
        check_lengths(self, x.len(), y.len());
        let mut grid = vec![Complex64::new(0.0, 0.0); self.fft.len()];
        for (&v, &k) in y.iter().zip(&self.mask) {
            grid[k] = v;
        }
        self.fft.inverse(&mut grid);
        for (out, g) in x.iter_mut().zip(&grid) {
            *out = g.re;
        }
    }

    fn dirty_image(&self, y: &[Complex64]) -> Result<Image> {
        Image::new(self.rows, self.cols, self.adjoint(y)?)
    }
}

/// Explicit complex `m x n` matrix, row-major. Used for small problems and
/// for checking the solver against generic convex solvers.
#[derive(Debug, Clone)]
pub struct DenseOperator {
    m: usize,
    n: usize,
    data: Vec<Complex64>,
}

impl DenseOperator {
    pub fn new(m: usize, n: usize, data: Vec<Complex64>) -> Result<Self> {
        if m == 0 || n == 0 || data.len() != m * n {
            return Err(dim_err!("{m}x{n} matrix with {} entries", data.len()));
        }
        Ok(Self { m, n, data })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        Self { m: n, n, data }
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }
}

impl MeasurementOperator for DenseOperator {
    fn kind(&self) -> OperatorKind {
        OperatorKind::Dense
    }

    fn m(&self) -> usize {
        self.m
    }

    fn n(&self) -> usize {
        self.n
    }

    fn forward_into(&self, x: &[f64], y: &mut [Complex64]) {
        check_lengths(self, x.len(), y.len());
        for (out, row) in y.iter_mut().zip(self.data.chunks_exact(self.n)) {
            *out = row.iter().zip(x).map(|(a, &v)| a * v).sum();
        }
    }

    fn adjoint_into(&self, y: &[Complex64], x: &mut [f64]) {
        check_lengths(self, x.len(), y.len());
        x.fill(0.0);
        for (&v, row) in y.iter().zip(self.data.chunks_exact(self.n)) {
            for (out, a) in x.iter_mut().zip(row) {
                *out += (a.conj() * v).re;
            }
        }
    }
}

/// Circular complex Gaussian noise calibrated to an input SNR in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    /// `f64::INFINITY` disables the noise.
    pub input_snr_db: f64,
    pub seed: u64,
}

/// Per-sample noise level `sigma_n = |y0| 10^(-isnr/20) / sqrt(M)`, so that
/// `E|n|^2 = M sigma_n^2 = |y0|^2 10^(-isnr/10)`.
pub fn noise_sigma(y0: &[Complex64], input_snr_db: f64) -> Result<f64> {
    let energy = norm_c(y0);
    if energy == 0.0 {
        return Err(Error::ZeroSignal);
    }
    Ok(energy * 10f64.powf(-input_snr_db / 20.0) / (y0.len() as f64).sqrt())
}

/// Returns `(y0 + n, sigma_n)`. Each complex sample of `n` has variance
/// `sigma_n^2`, split evenly between real and imaginary parts.
pub fn apply_noise(y0: &[Complex64], model: &NoiseModel) -> Result<(Vec<Complex64>, f64)> {
    let sigma = noise_sigma(y0, model.input_snr_db)?;
    if sigma == 0.0 {
        return Ok((y0.to_vec(), 0.0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(model.seed);
    let s = sigma * core::f64::consts::FRAC_1_SQRT_2;
    let y = y0
        .iter()
        .map(|&v| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            v + Complex64::new(s * re, s * im)
        })
        .collect();
    Ok((y, sigma))
}
