#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{dim_err, Error, Result};
use crate::image::{norm2, Image};

/// `20 log10(|x| / |x - x_hat|)` in dB; `+inf` for an exact match.
pub fn snr_db(reference: &Image, estimate: &Image) -> Result<f64> {
    if reference.shape() != estimate.shape() {
        return Err(dim_err!(
            "reference {:?} and estimate {:?} differ in shape",
            reference.shape(),
            estimate.shape()
        ));
    }
    let signal = reference.norm();
    if signal == 0.0 {
        return Err(Error::ZeroReference);
    }
    let err: alloc::vec::Vec<f64> = reference
        .as_slice()
        .iter()
        .zip(estimate.as_slice())
        .map(|(a, b)| a - b)
        .collect();
    let noise = norm2(&err);
    if noise == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(20.0 * (signal / noise).log10())
}
