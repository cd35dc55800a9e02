//! Flat `key = value` configuration files with `#` comments.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::HarnessError;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues(BTreeMap<String, String>);

impl KeyValues {
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut map = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected `key = value`", lineno + 1))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(format!("line {}: empty key", lineno + 1));
            }
            map.insert(key.to_string(), value.trim().to_string());
        }
        Ok(Self(map))
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::parse(&text).map_err(|msg| HarnessError::Format {
            path: path.to_owned(),
            msg,
        })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn set(&mut self, key: &str, value: impl Into<String>) {
        self.0.insert(key.to_string(), value.into());
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    /// Entries of `other` replace ours.
    pub fn merge(&mut self, other: KeyValues) {
        self.0.extend(other.0);
    }

    pub fn parse_value<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, HarnessError>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| HarnessError::Config(format!("`{key} = {v}`: {e}")))
            })
            .transpose()
    }

    pub fn parse_list<T: std::str::FromStr>(
        &self,
        key: &str,
    ) -> Result<Option<Vec<T>>, HarnessError>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| {
                v.split(',')
                    .map(str::trim)
                    .filter(|t| !t.is_empty())
                    .map(|t| {
                        t.parse::<T>()
                            .map_err(|e| HarnessError::Config(format!("`{key}`: `{t}`: {e}")))
                    })
                    .collect()
            })
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_comments_and_override() {
        let mut kv =
            KeyValues::parse("# experiment\nratios = 0.2, 0.4\n trials=5 # five\n\n").unwrap();
        assert_eq!(
            kv.parse_list::<f64>("ratios").unwrap(),
            Some(vec![0.2, 0.4])
        );
        assert_eq!(kv.parse_value::<usize>("trials").unwrap(), Some(5));
        assert_eq!(kv.parse_value::<usize>("seed").unwrap(), None);
        let cli = KeyValues::parse("trials = 1").unwrap();
        kv.merge(cli);
        assert_eq!(kv.get("trials"), Some("1"));
        assert!(kv.parse_value::<f64>("ratios").is_err());
    }

    #[test]
    fn malformed_lines() {
        assert!(KeyValues::parse("no equals sign").is_err());
        assert!(KeyValues::parse(" = 3").is_err());
    }
}
