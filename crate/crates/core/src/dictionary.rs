//! Concatenated frame dictionary `Psi = [Psi_1, ..., Psi_q] / sqrt(q)`.
//!
//! Each frame is an orthonormal basis (a Daubechies wavelet basis or the
//! Dirac basis), so `Psi Psi^T = I`: analysis is an isometry and synthesis
//! composed with analysis is the identity. Nothing is ever materialized as a
//! matrix; both maps run the fast transforms frame by frame.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{dim_err, Error, Result};
use crate::image::Image;
use crate::wavelets::{self, Daubechies, WaveletFilter, Workspace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Frame {
    Dirac,
    Daubechies(Daubechies),
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Frame::Dirac => f.write_str("dirac"),
            Frame::Daubechies(d) => d.fmt(f),
        }
    }
}

impl FromStr for Frame {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("dirac") {
            Ok(Frame::Dirac)
        } else {
            s.to_ascii_lowercase().parse().map(Frame::Daubechies)
        }
    }
}

/// Parses a comma-separated frame list such as `dirac,db1,db2`; `db1-db8`
/// expands to every order in the range.
pub fn parse_frames(spec: &str) -> Result<Vec<Frame>> {
    let mut frames = Vec::new();
    for token in spec.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        match token.split_once('-') {
            Some((lo, hi)) => {
                let lo: Daubechies = lo.trim().to_ascii_lowercase().parse()?;
                let hi: Daubechies = hi.trim().to_ascii_lowercase().parse()?;
                if lo.order() > hi.order() {
                    return Err(Error::Parse(alloc::format!(
                        "empty wavelet range `{token}`"
                    )));
                }
                frames.extend(
                    (lo.order()..=hi.order())
                        .filter_map(Daubechies::from_order)
                        .map(Frame::Daubechies),
                );
            }
            None => frames.push(token.parse()?),
        }
    }
    Ok(frames)
}

pub fn frames_to_string(frames: &[Frame]) -> String {
    let mut out = String::new();
    for (i, f) in frames.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&alloc::format!("{f}"));
    }
    out
}

/// Db1 through Db8, the sparsity-averaging dictionary of the spread-spectrum experiments.
pub fn db1_to_db8() -> Vec<Frame> {
    Daubechies::ALL
        .iter()
        .map(|&d| Frame::Daubechies(d))
        .collect()
}

/// Dirac followed by Db1 through Db8.
pub fn dirac_and_db1_to_db8() -> Vec<Frame> {
    let mut frames = vec![Frame::Dirac];
    frames.extend(db1_to_db8());
    frames
}

#[derive(Debug, Clone)]
pub struct SaraDictionary {
    frames: Vec<Frame>,
    filters: Vec<Option<WaveletFilter>>,
    rows: usize,
    cols: usize,
    levels: usize,
    taps: usize,
    scale: f64,
}

impl SaraDictionary {
    /// Builds a dictionary for `rows x cols` images. Levels above
    /// `log2(min(rows, cols))` are clamped with a warning; duplicate frames
    /// are rejected.
    pub fn new(frames: Vec<Frame>, rows: usize, cols: usize, levels: usize) -> Result<Self> {
        for (i, f) in frames.iter().enumerate() {
            if frames[..i].contains(f) {
                return Err(Error::Config(alloc::format!("duplicate frame `{f}`")));
            }
        }
        Self::new_allow_duplicates(frames, rows, cols, levels)
    }

    /// Same as [`SaraDictionary::new`] without the duplicate check. Only
    /// useful for exercising the scaling of the concatenation.
    pub fn new_allow_duplicates(
        frames: Vec<Frame>,
        rows: usize,
        cols: usize,
        levels: usize,
    ) -> Result<Self> {
        if frames.is_empty() {
            return Err(Error::Config("dictionary needs at least one frame".into()));
        }
        let levels = wavelets::clamp_levels(rows, cols, levels);
        if frames.iter().any(|f| matches!(f, Frame::Daubechies(_))) {
            wavelets::check_shape(rows, cols, levels)?;
        } else if rows == 0 || cols == 0 {
            return Err(dim_err!("empty image shape {rows}x{cols}"));
        }
        Ok(Self::build(frames, rows, cols, levels))
    }

    fn build(frames: Vec<Frame>, rows: usize, cols: usize, levels: usize) -> Self {
        let filters: Vec<_> = frames
            .iter()
            .map(|f| match f {
                Frame::Dirac => None,
                Frame::Daubechies(d) => Some(wavelets::filter_taps(*d)),
            })
            .collect();
        let taps = filters
            .iter()
            .flatten()
            .map(|f| f.taps())
            .max()
            .unwrap_or(2);
        let scale = 1.0 / (frames.len() as f64).sqrt();
        Self {
            frames,
            filters,
            rows,
            cols,
            levels,
            taps,
            scale,
        }
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    /// Number of frames `q`.
    pub fn q(&self) -> usize {
        self.frames.len()
    }

    pub fn n_pixels(&self) -> usize {
        self.rows * self.cols
    }

    /// Total coefficient count `D = q N`.
    pub fn n_coeffs(&self) -> usize {
        self.q() * self.n_pixels()
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn analysis(&self, x: &Image) -> Result<Vec<f64>> {
        if x.shape() != self.shape() {
            return Err(dim_err!(
                "image shape {:?} does not match dictionary shape {:?}",
                x.shape(),
                self.shape()
            ));
        }
        let mut out = vec![0.0; self.n_coeffs()];
        self.analysis_into(x.as_slice(), &mut out);
        Ok(out)
    }

    pub fn synthesis(&self, alpha: &[f64]) -> Result<Image> {
        if alpha.len() != self.n_coeffs() {
            return Err(dim_err!(
                "expected {} coefficients, got {}",
                self.n_coeffs(),
                alpha.len()
            ));
        }
        let mut out = vec![0.0; self.n_pixels()];
        self.synthesis_into(alpha, &mut out);
        Image::new(self.rows, self.cols, out)
    }

    /// `out = Psi^T x`; block `i` holds `Psi_i^T x / sqrt(q)`.
    ///
    /// Panics if the slice lengths do not match `N` and `D`.
    pub fn analysis_into(&self, x: &[f64], out: &mut [f64]) {
        let n = self.n_pixels();
        assert_eq!(x.len(), n);
        assert_eq!(out.len(), self.n_coeffs());
        let mut work = Workspace::new(self.rows.max(self.cols), self.taps);
        for (block, filter) in out.chunks_exact_mut(n).zip(&self.filters) {
            block.copy_from_slice(x);
            if let Some(filter) = filter {
                wavelets::forward_in_place(
                    block,
                    self.rows,
                    self.cols,
                    filter,
                    self.levels,
                    &mut work,
                );
            }
            for v in block.iter_mut() {
                *v *= self.scale;
            }
        }
    }

    /// `out = Psi alpha = sum_i Psi_i alpha_i / sqrt(q)`.
    ///
    /// Panics if the slice lengths do not match `D` and `N`.
    pub fn synthesis_into(&self, alpha: &[f64], out: &mut [f64]) {
        let n = self.n_pixels();
        assert_eq!(alpha.len(), self.n_coeffs());
        assert_eq!(out.len(), n);
        out.fill(0.0);
        let mut work = Workspace::new(self.rows.max(self.cols), self.taps);
        let mut buf = vec![0.0; n];
        for (block, filter) in alpha.chunks_exact(n).zip(&self.filters) {
            buf.copy_from_slice(block);
            if let Some(filter) = filter {
                wavelets::inverse_in_place(
                    &mut buf,
                    self.rows,
                    self.cols,
                    filter,
                    self.levels,
                    &mut work,
                );
            }
            for (o, b) in out.iter_mut().zip(&buf) {
                *o += self.scale * b;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::{dot, norm2};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_vec(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
    }

    fn random_image(side: usize, seed: u64) -> Image {
        Image::new(side, side, random_vec(side * side, seed)).unwrap()
    }

    #[test]
    fn dirac_analysis_is_copy() {
        let dict = SaraDictionary::new(vec![Frame::Dirac], 4, 4, 2).unwrap();
        let x = random_image(4, 3);
        assert_eq!(dict.analysis(&x).unwrap(), x.as_slice());
    }

    #[test]
    fn duplicated_dirac_scales_by_inverse_sqrt_two() {
        let dict = SaraDictionary::new_allow_duplicates(vec![Frame::Dirac, Frame::Dirac], 4, 4, 1)
            .unwrap();
        let x = random_image(4, 5);
        let a = dict.analysis(&x).unwrap();
        let s = core::f64::consts::FRAC_1_SQRT_2;
        for (i, v) in a.iter().enumerate() {
            assert!((*v - x.as_slice()[i % 16] * s).abs() < 1e-15);
        }
        assert!((norm2(&a) - x.norm()).abs() < 1e-12);
    }

    #[test]
    fn duplicates_rejected() {
        let err = SaraDictionary::new(vec![Frame::Dirac, Frame::Dirac], 4, 4, 1).unwrap_err();
        assert!(matches!(err, Error::Config(_)));
    }

    #[test]
    fn tight_frame_and_isometry_sara_dictionary() {
        let dict = SaraDictionary::new(db1_to_db8(), 32, 32, 4).unwrap();
        assert_eq!(dict.n_coeffs(), 8 * 1024);
        let x = random_image(32, 9);
        let a = dict.analysis(&x).unwrap();
        assert!((norm2(&a) / x.norm() - 1.0).abs() < 1e-10);
        let back = dict.synthesis(&a).unwrap();
        for (u, v) in back.as_slice().iter().zip(x.as_slice()) {
            assert!((u - v).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_coefficients_synthesize_zero() {
        let dict = SaraDictionary::new(dirac_and_db1_to_db8(), 16, 16, 3).unwrap();
        let img = dict.synthesis(&vec![0.0; dict.n_coeffs()]).unwrap();
        assert!(img.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn adjoint_pair() {
        let dict = SaraDictionary::new(dirac_and_db1_to_db8(), 16, 16, 3).unwrap();
        for seed in 0..5 {
            let x = random_image(16, seed);
            let alpha = random_vec(dict.n_coeffs(), 100 + seed);
            let lhs = dot(&dict.analysis(&x).unwrap(), &alpha);
            let rhs = dot(x.as_slice(), dict.synthesis(&alpha).unwrap().as_slice());
            assert!((lhs - rhs).abs() < 1e-10);
        }
    }

    #[test]
    fn single_block_synthesis() {
        let frames = vec![Frame::Dirac, Frame::Daubechies(Daubechies::Db4)];
        let dict = SaraDictionary::new(frames, 16, 16, 2).unwrap();
        let mut alpha = random_vec(dict.n_coeffs(), 4);
        alpha[..256].fill(0.0);
        let got = dict.synthesis(&alpha).unwrap();
        let dec = wavelets::WaveletDecomposition {
            coeffs: alpha[256..].to_vec(),
            levels: 2,
            shape: (16, 16),
        };
        let direct = wavelets::dwt2_inverse(&dec, &wavelets::filter_taps(Daubechies::Db4)).unwrap();
        for (g, d) in got.as_slice().iter().zip(direct.as_slice()) {
            assert!((g - d * core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        }
    }

    #[test]
    fn dimension_errors() {
        let dict = SaraDictionary::new(db1_to_db8(), 16, 16, 2).unwrap();
        assert!(dict.analysis(&random_image(8, 0)).is_err());
        assert!(dict.synthesis(&[0.0; 10]).is_err());
        assert!(SaraDictionary::new(db1_to_db8(), 12, 12, 3).is_err());
        assert!(SaraDictionary::new(vec![], 8, 8, 1).is_err());
    }

    #[test]
    fn parse_frame_list() {
        let frames = parse_frames("dirac, db1,DB8").unwrap();
        assert_eq!(
            frames,
            vec![
                Frame::Dirac,
                Frame::Daubechies(Daubechies::Db1),
                Frame::Daubechies(Daubechies::Db8)
            ]
        );
        assert_eq!(frames_to_string(&frames), "dirac,db1,db8");
        assert!(parse_frames("dirac,curvelet").is_err());
        let mut expect = vec![Frame::Dirac];
        expect.extend(db1_to_db8());
        assert_eq!(parse_frames("dirac,db1-db8").unwrap(), expect);
        assert_eq!(parse_frames("Db2 - db3").unwrap().len(), 2);
        assert!(parse_frames("db5-db2").is_err());
        assert!(parse_frames("db1-db9").is_err());
    }
}
