//! Periodic multi-level 2D orthonormal wavelet transforms, Daubechies Db1 to Db8.
//!
//! Coefficients use the usual in-place (Mallat) layout: after `levels`
//! decompositions the coarsest approximation occupies the top-left
//! `rows >> levels` by `cols >> levels` block and detail bands fill the rest.
//! Boundaries are periodic, so every transform is an exact orthogonal matrix
//! and the inverse is the adjoint.

#![allow(clippy::excessive_precision)]

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{dim_err, Error, Result};
use crate::image::Image;

pub const DEFAULT_LEVELS: usize = 4;

/// Extremal-phase Daubechies family with `k` vanishing moments (`2k` taps).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Daubechies {
    Db1,
    Db2,
    Db3,
    Db4,
    Db5,
    Db6,
    Db7,
    Db8,
}

impl Daubechies {
    pub const ALL: [Daubechies; 8] = [
        Daubechies::Db1,
        Daubechies::Db2,
        Daubechies::Db3,
        Daubechies::Db4,
        Daubechies::Db5,
        Daubechies::Db6,
        Daubechies::Db7,
        Daubechies::Db8,
    ];

    /// Number of vanishing moments.
    pub fn order(self) -> usize {
        self as usize + 1
    }

    pub fn from_order(order: usize) -> Option<Self> {
        Self::ALL.get(order.checked_sub(1)?).copied()
    }

    pub fn name(self) -> &'static str {
        ["db1", "db2", "db3", "db4", "db5", "db6", "db7", "db8"][self as usize]
    }

    fn lowpass(self) -> &'static [f64] {
        match self {
            Daubechies::Db1 => &DB1,
            Daubechies::Db2 => &DB2,
            Daubechies::Db3 => &DB3,
            Daubechies::Db4 => &DB4,
            Daubechies::Db5 => &DB5,
            Daubechies::Db6 => &DB6,
            Daubechies::Db7 => &DB7,
            Daubechies::Db8 => &DB8,
        }
    }
}

impl fmt::Display for Daubechies {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Daubechies {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let digits = s
            .strip_prefix("db")
            .or_else(|| s.strip_prefix("Db"))
            .or_else(|| s.strip_prefix("DB"))
            .ok_or_else(|| Error::Parse(alloc::format!("unknown wavelet `{s}`")))?;
        digits
            .parse::<usize>()
            .ok()
            .and_then(Daubechies::from_order)
            .ok_or_else(|| Error::Parse(alloc::format!("unknown wavelet `{s}`")))
    }
}

// Analysis lowpass taps h[0..2k], normalized so that sum(h) = sqrt(2).
// Minimum-phase spectral factors of the Daubechies polynomial, 20 digits.
const DB1: [f64; 2] = [0.70710678118654752440, 0.70710678118654752440];
const DB2: [f64; 4] = [
    0.48296291314453414337,
    0.83651630373780790558,
    0.22414386804201338103,
    -0.12940952255126038117,
];
const DB3: [f64; 6] = [
    0.33267055295008261600,
    0.80689150931109257649,
    0.45987750211849157010,
    -0.13501102001025458870,
    -0.085441273882026661693,
    0.035226291885709536603,
];
const DB4: [f64; 8] = [
    0.23037781330889650086,
    0.71484657055291564709,
    0.63088076792985890788,
    -0.027983769416859854211,
    -0.18703481171909308408,
    0.030841381835560763627,
    0.032883011666885199735,
    -0.010597401785069032105,
];
const DB5: [f64; 10] = [
    0.16010239797419291448,
    0.60382926979718967054,
    0.72430852843777292773,
    0.13842814590132073151,
    -0.24229488706638203186,
    -0.032244869584638374648,
    0.077571493840045713523,
    -0.0062414902127982742742,
    -0.012580751999081999469,
    0.0033357252854737712780,
];
const DB6: [f64; 12] = [
    0.11154074335010946362,
    0.49462389039845308568,
    0.75113390802109535068,
    0.31525035170919762909,
    -0.22626469396543982008,
    -0.12976686756726193556,
    0.097501605587323049102,
    0.027522865530305728626,
    -0.031582039317486029565,
    0.00055384220116149613925,
    0.0047772575109455106396,
    -0.0010773010853084795649,
];
const DB7: [f64; 14] = [
    0.077852054085009179020,
    0.39653931948191730654,
    0.72913209084623511992,
    0.46978228740519312247,
    -0.14390600392856497541,
    -0.22403618499387498264,
    0.071309219266830264751,
    0.080612609151083071913,
    -0.038029936935014413580,
    -0.016574541630666880654,
    0.012550998556099840613,
    0.00042957797292136652113,
    -0.0018016407040474909153,
    0.00035371379997452024845,
];
const DB8: [f64; 16] = [
    0.054415842243104009955,
    0.31287159091429997066,
    0.67563073629728980681,
    0.58535468365420671277,
    -0.015829105256349305667,
    -0.28401554296154692652,
    0.00047248457391328277036,
    0.12874742662047845886,
    -0.017369301001807546170,
    -0.044088253930794751507,
    0.013981027917398281649,
    0.0087460940474057767164,
    -0.0048703529934515743104,
    -0.00039174037337694704630,
    0.00067544940645056936637,
    -0.00011747678412476953373,
];

/// Analysis filter pair of an orthonormal Daubechies wavelet.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletFilter {
    family: Daubechies,
    lowpass: Vec<f64>,
    highpass: Vec<f64>,
}

impl WaveletFilter {
    pub fn family(&self) -> Daubechies {
        self.family
    }

    pub fn lowpass(&self) -> &[f64] {
        &self.lowpass
    }

    /// Quadrature mirror of the lowpass: `g[i] = (-1)^i h[L-1-i]`.
    pub fn highpass(&self) -> &[f64] {
        &self.highpass
    }

    pub fn taps(&self) -> usize {
        self.lowpass.len()
    }

    /// Checks unit DC gain, unit energy and orthogonality to even shifts,
    /// each within `1e-12`.
    pub fn validate(&self) -> Result<()> {
        const TOL: f64 = 1e-12;
        let h = &self.lowpass;
        let sum: f64 = h.iter().sum();
        let energy: f64 = h.iter().map(|a| a * a).sum();
        let mut ok = (sum - core::f64::consts::SQRT_2).abs() < TOL && (energy - 1.0).abs() < TOL;
        for shift in (2..h.len()).step_by(2) {
            let c: f64 = h.iter().zip(&h[shift..]).map(|(a, b)| a * b).sum();
            ok &= c.abs() < TOL;
        }
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidFilter(self.family.name()))
        }
    }
}

pub fn filter_taps(family: Daubechies) -> WaveletFilter {
    let lowpass = family.lowpass().to_vec();
    let n = lowpass.len();
    let highpass = (0..n)
        .map(|i| {
            let v = lowpass[n - 1 - i];
            if i % 2 == 0 {
                v
            } else {
                -v
            }
        })
        .collect();
    WaveletFilter {
        family,
        lowpass,
        highpass,
    }
}

/// Validates every built-in table. Cheap; meant to be called once at startup.
pub fn validate_all_filters() -> Result<()> {
    Daubechies::ALL
        .iter()
        .try_for_each(|&f| filter_taps(f).validate())
}

/// Largest level count allowed for a `rows x cols` image: `floor(log2(min))`.
pub fn max_levels(rows: usize, cols: usize) -> usize {
    let m = rows.min(cols);
    if m == 0 {
        0
    } else {
        (usize::BITS - 1 - m.leading_zeros()) as usize
    }
}

/// Clamps a requested depth to `max_levels`, logging a warning if it had to.
pub fn clamp_levels(rows: usize, cols: usize, levels: usize) -> usize {
    let max = max_levels(rows, cols);
    if levels > max {
        log::warn!("requested {levels} wavelet levels on a {rows}x{cols} image; clamping to {max}");
        max
    } else {
        levels
    }
}

pub fn check_shape(rows: usize, cols: usize, levels: usize) -> Result<()> {
    if levels == 0 {
        return Err(dim_err!("at least one decomposition level is required"));
    }
    if levels > max_levels(rows, cols) {
        return Err(dim_err!("{levels} levels exceed log2(min({rows}, {cols}))"));
    }
    let block = 1usize << levels;
    if rows % block != 0 || cols % block != 0 {
        return Err(dim_err!(
            "{rows}x{cols} image is not divisible by 2^{levels}"
        ));
    }
    Ok(())
}

/// Coefficients of one orthonormal wavelet basis; same cardinality as the image.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletDecomposition {
    pub coeffs: Vec<f64>,
    pub levels: usize,
    pub shape: (usize, usize),
}

impl WaveletDecomposition {
    pub fn norm(&self) -> f64 {
        crate::image::norm2(&self.coeffs)
    }
}

pub fn dwt2_forward(
    img: &Image,
    filter: &WaveletFilter,
    levels: usize,
) -> Result<WaveletDecomposition> {
    let (rows, cols) = img.shape();
    check_shape(rows, cols, levels)?;
    let mut coeffs = img.as_slice().to_vec();
    let mut work = Workspace::new(rows.max(cols), filter.taps());
    forward_in_place(&mut coeffs, rows, cols, filter, levels, &mut work);
    Ok(WaveletDecomposition {
        coeffs,
        levels,
        shape: (rows, cols),
    })
}

pub fn dwt2_inverse(dec: &WaveletDecomposition, filter: &WaveletFilter) -> Result<Image> {
    let (rows, cols) = dec.shape;
    check_shape(rows, cols, dec.levels)?;
    if dec.coeffs.len() != rows * cols {
        return Err(dim_err!(
            "{} coefficients for a {rows}x{cols} decomposition",
            dec.coeffs.len()
        ));
    }
    let mut data = dec.coeffs.clone();
    let mut work = Workspace::new(rows.max(cols), filter.taps());
    inverse_in_place(&mut data, rows, cols, filter, dec.levels, &mut work);
    Image::new(rows, cols, data)
}

/// Scratch buffers reused across lines and levels.
pub(crate) struct Workspace {
    line: Vec<f64>,
    ext: Vec<f64>,
    out: Vec<f64>,
}

impl Workspace {
    pub(crate) fn new(max_len: usize, taps: usize) -> Self {
        Self {
            line: vec![0.0; max_len],
            ext: vec![0.0; max_len + taps],
            out: vec![0.0; max_len + taps],
        }
    }
}

/// One analysis step on `work.line[..n]`; result (approx then detail) left in `work.out[..n]`.
fn analyze_line(work: &mut Workspace, n: usize, filter: &WaveletFilter) {
    let taps = filter.taps();
    let (line, ext, out) = (&work.line[..n], &mut work.ext, &mut work.out);
    for (j, e) in ext[..n + taps].iter_mut().enumerate() {
        *e = line[j % n];
    }
    let half = n / 2;
    let (h, g) = (filter.lowpass(), filter.highpass());
    for k in 0..half {
        let window = &ext[2 * k..2 * k + taps];
        let mut a = 0.0;
        let mut d = 0.0;
        for ((&x, &hi), &gi) in window.iter().zip(h).zip(g) {
            a += hi * x;
            d += gi * x;
        }
        out[k] = a;
        out[half + k] = d;
    }
}

/// Adjoint of [`analyze_line`]: reads approx/detail from `work.line[..n]`,
/// writes the signal into `work.out[..n]`.
fn synthesize_line(work: &mut Workspace, n: usize, filter: &WaveletFilter) {
    let taps = filter.taps();
    let (line, ext, out) = (&work.line[..n], &mut work.ext, &mut work.out);
    let ext = &mut ext[..n + taps];
    ext.fill(0.0);
    let half = n / 2;
    let (h, g) = (filter.lowpass(), filter.highpass());
    for k in 0..half {
        let a = line[k];
        let d = line[half + k];
        for ((e, &hi), &gi) in ext[2 * k..2 * k + taps].iter_mut().zip(h).zip(g) {
            *e += hi * a + gi * d;
        }
    }
    out[..n].fill(0.0);
    for (j, &e) in ext.iter().enumerate() {
        out[j % n] += e;
    }
}

pub(crate) fn forward_in_place(
    data: &mut [f64],
    rows: usize,
    cols: usize,
    filter: &WaveletFilter,
    levels: usize,
    work: &mut Workspace,
) {
    let (mut r, mut c) = (rows, cols);
    for _ in 0..levels {
        for i in 0..r {
            let row = &mut data[i * cols..i * cols + c];
            work.line[..c].copy_from_slice(row);
            analyze_line(work, c, filter);
            row.copy_from_slice(&work.out[..c]);
        }
        for j in 0..c {
            for i in 0..r {
                work.line[i] = data[i * cols + j];
            }
            analyze_line(work, r, filter);
            for i in 0..r {
                data[i * cols + j] = work.out[i];
            }
        }
        r /= 2;
        c /= 2;
    }
}

pub(crate) fn inverse_in_place(
    data: &mut [f64],
    rows: usize,
    cols: usize,
    filter: &WaveletFilter,
    levels: usize,
    work: &mut Workspace,
) {
    for level in (0..levels).rev() {
        let (r, c) = (rows >> level, cols >> level);
        for j in 0..c {
            for i in 0..r {
                work.line[i] = data[i * cols + j];
            }
            synthesize_line(work, r, filter);
            for i in 0..r {
                data[i * cols + j] = work.out[i];
            }
        }
        for i in 0..r {
            let row = &mut data[i * cols..i * cols + c];
            work.line[..c].copy_from_slice(row);
            synthesize_line(work, c, filter);
            row.copy_from_slice(&work.out[..c]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_image(rows: usize, cols: usize, seed: u64) -> Image {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..rows * cols)
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        Image::new(rows, cols, data).unwrap()
    }

    #[test]
    fn builtin_filters_are_orthonormal() {
        validate_all_filters().unwrap();
        for f in Daubechies::ALL {
            assert_eq!(filter_taps(f).taps(), 2 * f.order());
        }
    }

    #[test]
    fn haar_taps() {
        let h = filter_taps(Daubechies::Db1);
        let s = core::f64::consts::FRAC_1_SQRT_2;
        assert_abs_diff_eq!(h.lowpass()[0], s, epsilon = 1e-16);
        assert_abs_diff_eq!(h.lowpass()[1], s, epsilon = 1e-16);
    }

    #[test]
    fn corrupted_filter_is_rejected() {
        let mut f = filter_taps(Daubechies::Db4);
        f.lowpass[3] += 1e-9;
        assert_eq!(f.validate(), Err(Error::InvalidFilter("db4")));
    }

    #[test]
    fn haar_one_level_line() {
        let f = filter_taps(Daubechies::Db1);
        let mut work = Workspace::new(2, 2);
        work.line[..2].copy_from_slice(&[1.0, -1.0]);
        analyze_line(&mut work, 2, &f);
        assert_abs_diff_eq!(work.out[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(work.out[1], core::f64::consts::SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn haar_annihilates_constants() {
        let img = Image::new(16, 16, vec![3.5; 256]).unwrap();
        let dec = dwt2_forward(&img, &filter_taps(Daubechies::Db1), 3).unwrap();
        let approx = 16 >> 3;
        for i in 0..16 {
            for j in 0..16 {
                let v = dec.coeffs[i * 16 + j];
                if i < approx && j < approx {
                    // 3.5 * 2^levels per approximation coefficient
                    assert_abs_diff_eq!(v, 28.0, epsilon = 1e-12);
                } else {
                    assert_eq!(v, 0.0, "detail ({i},{j})");
                }
            }
        }
        assert_abs_diff_eq!(dec.norm(), img.norm(), epsilon = 1e-12);
    }

    #[test]
    fn zero_coefficients_give_zero_image() {
        let dec = WaveletDecomposition {
            coeffs: vec![0.0; 64],
            levels: 2,
            shape: (8, 8),
        };
        let img = dwt2_inverse(&dec, &filter_taps(Daubechies::Db5)).unwrap();
        assert!(img.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn round_trip_and_isometry_all_families() {
        for (s, f) in Daubechies::ALL.into_iter().enumerate() {
            let filter = filter_taps(f);
            let img = random_image(32, 32, s as u64);
            let dec = dwt2_forward(&img, &filter, 3).unwrap();
            assert!((dec.norm() - img.norm()).abs() < 1e-10, "{f}");
            let back = dwt2_inverse(&dec, &filter).unwrap();
            let err = back
                .as_slice()
                .iter()
                .zip(img.as_slice())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            assert!(err < 1e-10, "{f}: {err}");
        }
    }

    #[test]
    fn rectangular_images_and_deep_levels() {
        // Db8 on an 8-sample line at the coarsest levels wraps the filter
        // several times over; still orthogonal.
        let filter = filter_taps(Daubechies::Db8);
        let img = random_image(8, 32, 11);
        let dec = dwt2_forward(&img, &filter, 3).unwrap();
        assert!((dec.norm() - img.norm()).abs() < 1e-10);
        let back = dwt2_inverse(&dec, &filter).unwrap();
        for (a, b) in back.as_slice().iter().zip(img.as_slice()) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn adjoint_identity() {
        let filter = filter_taps(Daubechies::Db3);
        let x = random_image(16, 16, 1);
        let c = random_image(16, 16, 2);
        let fx = dwt2_forward(&x, &filter, 2).unwrap();
        let ic = dwt2_inverse(
            &WaveletDecomposition {
                coeffs: c.as_slice().to_vec(),
                levels: 2,
                shape: (16, 16),
            },
            &filter,
        )
        .unwrap();
        let lhs = crate::image::dot(&fx.coeffs, c.as_slice());
        let rhs = crate::image::dot(x.as_slice(), ic.as_slice());
        assert!((lhs - rhs).abs() < 1e-10);
    }

    #[test]
    fn shape_errors() {
        let filter = filter_taps(Daubechies::Db2);
        let img = random_image(12, 12, 0);
        assert!(matches!(
            dwt2_forward(&img, &filter, 3),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(
            dwt2_forward(&img, &filter, 0),
            Err(Error::Dimension(_))
        ));
        let dec = WaveletDecomposition {
            coeffs: vec![0.0; 10],
            levels: 1,
            shape: (4, 4),
        };
        assert!(matches!(
            dwt2_inverse(&dec, &filter),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn level_clamping() {
        assert_eq!(max_levels(64, 32), 5);
        assert_eq!(clamp_levels(16, 16, 9), 4);
        assert_eq!(clamp_levels(16, 16, 2), 2);
    }

    #[test]
    fn parse_family() {
        assert_eq!("db8".parse::<Daubechies>().unwrap(), Daubechies::Db8);
        assert_eq!("Db1".parse::<Daubechies>().unwrap(), Daubechies::Db1);
        assert!("db9".parse::<Daubechies>().is_err());
        assert!("haar".parse::<Daubechies>().is_err());
    }
}
