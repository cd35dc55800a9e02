//! Sampling patterns as plain text: one `row col` pair per line.
//! Blank lines and `#` comments are ignored.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::HarnessError;

pub fn format_mask(cells: &[(usize, usize)]) -> String {
    let mut out = String::with_capacity(cells.len() * 8);
    for (r, c) in cells {
        writeln!(out, "{r} {c}").expect("writing to a String");
    }
    out
}

pub fn parse_mask(text: &str) -> Result<Vec<(usize, usize)>, String> {
    let mut cells = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut it = line.split_whitespace().map(str::parse::<usize>);
        match (it.next(), it.next(), it.next()) {
            (Some(Ok(r)), Some(Ok(c)), None) => cells.push((r, c)),
            _ => {
                return Err(format!(
                    "line {}: expected `row col`, got `{line}`",
                    lineno + 1
                ))
            }
        }
    }
    Ok(cells)
}

pub fn write_mask(path: &Path, cells: &[(usize, usize)]) -> Result<(), HarnessError> {
    fs::write(path, format_mask(cells)).map_err(|e| HarnessError::io(path, e))
}

pub fn read_mask(path: &Path) -> Result<Vec<(usize, usize)>, HarnessError> {
    let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    parse_mask(&text).map_err(|msg| HarnessError::Format {
        path: path.to_owned(),
        msg,
    })
}
