//! INI-style run configuration: `key = value` lines, `#` or `;` comments,
//! optional `[section]` headers (ignored).

use std::collections::BTreeMap;

use crate::error::{Error, Result};

pub const KNOWN_KEYS: [&str; 13] =
    ["command", "p", "lambdas", "ells", "nodes", "samples", "seed", "out", "format", "name", "n", "map", "radius"];

pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with(';') || line.starts_with('[') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse { line: i + 1, message: format!("expected key=value, got `{line}`") })?;
        let key = key.trim().to_ascii_lowercase().replace('-', "_");
        if !KNOWN_KEYS.contains(&key.as_str()) {
            return Err(Error::Parse { line: i + 1, message: format!("unknown key `{key}`") });
        }
        out.insert(key, value.trim().to_string());
    }
    Ok(out)
}

pub fn parse_list<T: std::str::FromStr>(key: &str, text: &str) -> Result<Vec<T>> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|_| Error::Parse { line: 0, message: format!("{key}: bad entry `{s}`") }))
        .collect()
}
