//! Sparsity averaging reweighted analysis (SARA) for compressive imaging.
//!
//! The crate is `no_std` and only needs `alloc`. It provides:
//!
//! * [`wavelets`]: periodic multi-level 2D Daubechies transforms (Db1 to Db8),
//! * [`dictionary`]: the concatenated, `1/sqrt(q)`-scaled wavelet dictionary
//!   exposed through matrix-free analysis and synthesis maps,
//! * [`measurement`]: spread-spectrum and masked-Fourier sensing operators,
//!   noise calibration and the dirty image,
//! * [`solver`]: a primal-dual solver for the constrained weighted l1
//!   analysis problem, plus its proximal building blocks,
//! * [`sara`]: the reweighting loop with its homotopy on `gamma`,
//! * [`metrics`]: reconstruction SNR.
//!
//! File formats, the experiment harness and the CLI live in the
//! `sara-harness` crate.

#![no_std]
// Float methods resolve to `num_traits::Float` (libm) unless some crate in the
// graph links std, in which case the inherent methods shadow the trait and the
// imports read as unused.

extern crate alloc;

pub mod dictionary;
pub mod error;
mod fft;
pub mod image;
pub mod measurement;
pub mod metrics;
pub mod sara;
pub mod seed;
pub mod solver;
pub mod wavelets;

pub use dictionary::{Frame, SaraDictionary};
pub use error::{Error, Result};
pub use image::Image;
pub use measurement::{
    DenseOperator, FourierMask, FourierMaskConfig, MeasurementOperator, NoiseModel, OperatorKind,
    SpreadSpectrum, SpreadSpectrumConfig,
};
pub use num_complex::Complex64;
pub use sara::{SaraConfig, SaraRecord, SaraTrace};
pub use solver::{SolverConfig, SolverResult, WeightVector};
pub use wavelets::{Daubechies, WaveletDecomposition, WaveletFilter};
