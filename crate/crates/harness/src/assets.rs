//! Test images compiled into the binary, addressed as `builtin:<name>`.
//!
//! `natural*` is a block-averaged 8-bit photograph; `galaxy*` is a synthetic
//! spiral galaxy (16-bit, zero background) for the radio demo.

use std::path::Path;

use sara_core::Image;

use crate::pgm::{decode_pgm, read_pgm};
use crate::HarnessError;

const BUILTIN: &[(&str, &[u8])] = &[
    ("natural64", include_bytes!("../assets/natural64.pgm")),
    ("natural256", include_bytes!("../assets/natural256.pgm")),
    ("galaxy64", include_bytes!("../assets/galaxy64.pgm")),
    ("galaxy256", include_bytes!("../assets/galaxy256.pgm")),
];

pub const PREFIX: &str = "builtin:";

pub fn builtin_names() -> impl Iterator<Item = &'static str> {
    BUILTIN.iter().map(|(name, _)| *name)
}

pub fn builtin(name: &str) -> Option<Image> {
    BUILTIN
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, bytes)| decode_pgm(bytes).expect("embedded assets are valid PGM"))
}

/// Loads `builtin:<name>` or a PGM path.
pub fn load_image(source: &str) -> Result<Image, HarnessError> {
    match source.strip_prefix(PREFIX) {
        Some(name) => builtin(name).ok_or_else(|| {
            let known: Vec<_> = builtin_names().collect();
            HarnessError::Config(format!(
                "unknown builtin image `{name}`, known: {}",
                known.join(", ")
            ))
        }),
        None => read_pgm(Path::new(source)),
    }
}

/// Block-averages `img` down to `side x side`; the shape must be a multiple.
pub fn downsample(img: &Image, side: usize) -> Result<Image, HarnessError> {
    let (rows, cols) = img.shape();
    if side == 0 || rows % side != 0 || cols % side != 0 {
        return Err(HarnessError::Config(format!(
            "cannot reduce a {rows}x{cols} image to {side}x{side}"
        )));
    }
    let (fr, fc) = (rows / side, cols / side);
    if fr == 1 && fc == 1 {
        return Ok(img.clone());
    }
    let mut out = vec![0.0; side * side];
    for r in 0..rows {
        for c in 0..cols {
            out[(r / fr) * side + c / fc] += img.get(r, c);
        }
    }
    let inv = 1.0 / (fr * fc) as f64;
    out.iter_mut().for_each(|v| *v *= inv);
    Ok(Image::new(side, side, out)?)
}
