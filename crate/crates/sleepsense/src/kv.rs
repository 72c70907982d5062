//! `key=value` text, one pair per line. Blank lines and lines starting with
//! `#` are ignored.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::str::FromStr;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

pub fn parse_entries(text: &str, origin: &str) -> Result<Vec<Entry>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::parse(origin, i + 1, format!("expected key=value, got '{line}'")))?;
        let key = k.trim();
        if key.is_empty() {
            return Err(CliError::parse(origin, i + 1, "empty key"));
        }
        out.push(Entry { key: key.to_string(), value: v.trim().to_string(), line: i + 1 });
    }
    Ok(out)
}

/// Unique keys consumed one by one; whatever is left over is rejected.
#[derive(Debug)]
pub struct Fields {
    origin: String,
    map: BTreeMap<String, (String, usize)>,
}

impl Fields {
    pub fn new(entries: Vec<Entry>, origin: &str) -> Result<Self> {
        let mut map = BTreeMap::new();
        for e in entries {
            if map.insert(e.key.clone(), (e.value, e.line)).is_some() {
                return Err(CliError::parse(origin, e.line, format!("duplicate key '{}'", e.key)));
            }
        }
        Ok(Fields { origin: origin.to_string(), map })
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        Self::new(parse_entries(text, origin)?, origin)
    }

    pub fn take<T: FromStr>(&mut self, key: &str) -> Result<Option<T>>
    where
        T::Err: Display,
    {
        match self.map.remove(key) {
            None => Ok(None),
            Some((v, line)) => v
                .parse()
                .map(Some)
                .map_err(|e| CliError::parse(&self.origin, line, format!("bad value for '{key}': {e}"))),
        }
    }

    pub fn require<T: FromStr>(&mut self, key: &str) -> Result<T>
    where
        T::Err: Display,
    {
        self.take(key)?
            .ok_or_else(|| CliError::parse(&self.origin, 0, format!("missing key '{key}'")))
    }

    /// Overwrites `slot` when the key is present.
    pub fn fill<T: FromStr>(&mut self, key: &str, slot: &mut T) -> Result<()>
    where
        T::Err: Display,
    {
        if let Some(v) = self.take(key)? {
            *slot = v;
        }
        Ok(())
    }

    pub fn finish(self) -> Result<()> {
        match self.map.into_iter().next() {
            None => Ok(()),
            Some((key, (_, line))) => Err(CliError::parse(&self.origin, line, format!("unknown key '{key}'"))),
        }
    }
}
