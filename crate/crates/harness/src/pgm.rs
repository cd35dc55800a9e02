//! Binary PGM (P5) images, 8- and 16-bit.

use std::fs;
use std::io::Write;
use std::path::Path;

use sara_core::Image;

use crate::HarnessError;

/// Reads a P5 (or ASCII P2) PGM; samples are scaled to `[0, 1]` by `maxval`.
pub fn read_pgm(path: &Path) -> Result<Image, HarnessError> {
    let bytes = fs::read(path).map_err(|e| HarnessError::io(path, e))?;
    decode_pgm(&bytes).map_err(|msg| HarnessError::Format {
        path: path.to_owned(),
        msg,
    })
}

pub fn decode_pgm(bytes: &[u8]) -> Result<Image, String> {
    let mut pos = 0;
    let magic = next_token(bytes, &mut pos).ok_or("missing magic number")?;
    let ascii = match magic.as_str() {
        "P5" => false,
        "P2" => true,
        other => return Err(format!("unsupported magic `{other}`, expected P5 or P2")),
    };
    let mut header = [0usize; 3];
    for (slot, name) in header.iter_mut().zip(["width", "height", "maxval"]) {
        *slot = next_token(bytes, &mut pos)
            .and_then(|t| t.parse().ok())
            .ok_or(format!("bad {name}"))?;
    }
    let [width, height, maxval] = header;
    if width == 0 || height == 0 || maxval == 0 || maxval > 65535 {
        return Err(format!("bad header {width}x{height} maxval {maxval}"));
    }
    let n = width * height;
    let scale = 1.0 / maxval as f64;
    let data: Vec<f64> = if ascii {
        (0..n)
            .map(|_| {
                next_token(bytes, &mut pos)
                    .and_then(|t| t.parse::<u32>().ok())
                    .map(|v| v as f64 * scale)
                    .ok_or_else(|| "truncated pixel data".to_string())
            })
            .collect::<Result<_, _>>()?
    } else {
        // exactly one whitespace byte separates the header from the raster
        pos += 1;
        let wide = maxval > 255;
        let need = n * if wide { 2 } else { 1 };
        let raster = bytes
            .get(pos..pos + need)
            .ok_or_else(|| format!("expected {need} raster bytes"))?;
        if wide {
            raster
                .chunks_exact(2)
                .map(|b| u16::from_be_bytes([b[0], b[1]]) as f64 * scale)
                .collect()
        } else {
            raster.iter().map(|&b| b as f64 * scale).collect()
        }
    };
    Image::new(height, width, data).map_err(|e| e.to_string())
}

fn next_token(bytes: &[u8], pos: &mut usize) -> Option<String> {
    loop {
        while *pos < bytes.len() && bytes[*pos].is_ascii_whitespace() {
            *pos += 1;
        }
        if *pos < bytes.len() && bytes[*pos] == b'#' {
            while *pos < bytes.len() && bytes[*pos] != b'\n' {
                *pos += 1;
            }
            continue;
        }
        break;
    }
    let start = *pos;
    while *pos < bytes.len() && !bytes[*pos].is_ascii_whitespace() {
        *pos += 1;
    }
    (start < *pos).then(|| String::from_utf8_lossy(&bytes[start..*pos]).into_owned())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Depth {
    Eight,
    Sixteen,
}

/// Encodes `img`, mapping `[lo, hi]` linearly onto `[0, maxval]` with clipping.
pub fn encode_pgm(img: &Image, lo: f64, hi: f64, depth: Depth) -> Vec<u8> {
    let maxval: u32 = match depth {
        Depth::Eight => 255,
        Depth::Sixteen => 65535,
    };
    let span = if hi > lo { hi - lo } else { 1.0 };
    let mut out = format!("P5\n{} {}\n{}\n", img.cols(), img.rows(), maxval).into_bytes();
    for &v in img.as_slice() {
        let q = (((v - lo) / span).clamp(0.0, 1.0) * maxval as f64).round() as u32;
        match depth {
            Depth::Eight => out.push(q as u8),
            Depth::Sixteen => out.extend_from_slice(&(q as u16).to_be_bytes()),
        }
    }
    out
}

pub fn write_pgm(
    path: &Path,
    img: &Image,
    lo: f64,
    hi: f64,
    depth: Depth,
) -> Result<(), HarnessError> {
    let bytes = encode_pgm(img, lo, hi, depth);
    fs::File::create(path)
        .and_then(|mut f| f.write_all(&bytes))
        .map_err(|e| HarnessError::io(path, e))
}

/// `log10` rendering clipped to `decades` below the peak, mapped to `[0, 1]`.
pub fn log_scale(img: &Image, decades: f64) -> Image {
    let peak = img.max();
    let data = if peak > 0.0 {
        let floor = peak * 10f64.powf(-decades);
        img.as_slice()
            .iter()
            .map(|&v| ((v.max(floor) / peak).log10() + decades) / decades)
            .collect()
    } else {
        vec![0.0; img.len()]
    };
    Image::new(img.rows(), img.cols(), data).expect("same shape")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eight_bit_round_trip() {
        let img = Image::new(2, 3, vec![0.0, 1.0, 0.5, 0.25, 1.0 / 255.0, 0.75]).unwrap();
        let back = decode_pgm(&encode_pgm(&img, 0.0, 1.0, Depth::Eight)).unwrap();
        assert_eq!(back.shape(), (2, 3));
        for (a, b) in img.as_slice().iter().zip(back.as_slice()) {
            assert!((a - b).abs() <= 0.5 / 255.0 + 1e-12);
        }
    }

    #[test]
    fn sixteen_bit_round_trip() {
        let img = Image::new(1, 4, vec![0.0, 0.123456, 0.5, 1.0]).unwrap();
        let back = decode_pgm(&encode_pgm(&img, 0.0, 1.0, Depth::Sixteen)).unwrap();
        for (a, b) in img.as_slice().iter().zip(back.as_slice()) {
            assert!((a - b).abs() <= 0.5 / 65535.0 + 1e-12);
        }
    }

    #[test]
    fn ascii_with_comments() {
        let img = decode_pgm(b"P2\n# a comment\n2 1\n# another\n4\n0 4\n").unwrap();
        assert_eq!(img.as_slice(), &[0.0, 1.0]);
    }

    #[test]
    fn malformed_inputs() {
        assert!(decode_pgm(b"P6\n1 1\n255\n\0\0\0").is_err());
        assert!(decode_pgm(b"P5\n2 2\n255\n\0").is_err());
        assert!(decode_pgm(b"P5\n0 2\n255\n").is_err());
    }

    #[test]
    fn log_rendering_spans_unit_interval() {
        let img = Image::new(1, 4, vec![1.0, 0.1, 1e-3, 0.0]).unwrap();
        let out = log_scale(&img, 3.0);
        let v = out.as_slice();
        assert!((v[0] - 1.0).abs() < 1e-12);
        assert!((v[1] - 2.0 / 3.0).abs() < 1e-12);
        assert!(v[2].abs() < 1e-12 && v[3].abs() < 1e-12);
    }
}
