//! Key-value config files with sections.
//!
//! ```text
//! # comment
//! [grid]
//! n = 16            # one value for all axes, or three
//! length = 16.0
//! ```
//!
//! Every key a scenario does not read is reported as an error with its line number.

use std::cell::Cell;
use std::collections::BTreeMap;
use std::str::FromStr;

use crate::error::{CliError, CliResult};

#[derive(Debug)]
struct Entry {
    value: String,
    line: usize,
    used: Cell<bool>,
}

#[derive(Debug, Default)]
pub struct Config {
    sections: BTreeMap<String, BTreeMap<String, Entry>>,
    section_lines: BTreeMap<String, usize>,
}

impl Config {
    pub fn parse(text: &str) -> CliResult<Config> {
        let mut cfg = Config::default();
        let mut current: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            if let Some(rest) = body.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| CliError::config(line, format!("unterminated section header '{body}'")))?
                    .trim();
                if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
                    return Err(CliError::config(line, format!("invalid section name '{name}'")));
                }
                if cfg.section_lines.contains_key(name) {
                    return Err(CliError::config(line, format!("section [{name}] appears twice")));
                }
                cfg.section_lines.insert(name.to_string(), line);
                cfg.sections.entry(name.to_string()).or_default();
                current = Some(name.to_string());
                continue;
            }
            let (k, v) = body
                .split_once('=')
                .ok_or_else(|| CliError::config(line, format!("expected 'key = value', found '{body}'")))?;
            let (k, v) = (k.trim(), v.trim());
            let sec = current.as_ref().ok_or_else(|| CliError::config(line, "key outside any [section]"))?;
            if k.is_empty() {
                return Err(CliError::config(line, "empty key"));
            }
            if v.is_empty() {
                return Err(CliError::config(line, format!("key '{k}' has no value")));
            }
            let map = cfg.sections.get_mut(sec).expect("section registered");
            if let Some(prev) = map.get(k) {
                return Err(CliError::config(line, format!("key '{k}' already set at line {}", prev.line)));
            }
            map.insert(k.to_string(), Entry { value: v.to_string(), line, used: Cell::new(false) });
        }
        Ok(cfg)
    }

    pub fn has_section(&self, sec: &str) -> bool {
        self.sections.contains_key(sec)
    }

    fn entry(&self, sec: &str, key: &str) -> Option<&Entry> {
        let e = self.sections.get(sec)?.get(key)?;
        e.used.set(true);
        Some(e)
    }

    /// Line of a key, for error messages about values that parse but are out of range.
    pub fn line_of(&self, sec: &str, key: &str) -> Option<usize> {
        self.sections.get(sec)?.get(key).map(|e| e.line)
    }

    pub fn str(&self, sec: &str, key: &str) -> Option<&str> {
        self.entry(sec, key).map(|e| e.value.as_str())
    }

    pub fn str_or<'a>(&'a self, sec: &str, key: &str, default: &'a str) -> &'a str {
        self.str(sec, key).unwrap_or(default)
    }

    pub fn get<T: FromStr>(&self, sec: &str, key: &str) -> CliResult<Option<T>> {
        match self.entry(sec, key) {
            None => Ok(None),
            Some(e) => e
                .value
                .parse::<T>()
                .map(Some)
                .map_err(|_| CliError::config(e.line, format!("cannot parse {sec}.{key} = '{}'", e.value))),
        }
    }

    pub fn get_or<T: FromStr>(&self, sec: &str, key: &str, default: T) -> CliResult<T> {
        Ok(self.get(sec, key)?.unwrap_or(default))
    }

    pub fn require<T: FromStr>(&self, sec: &str, key: &str) -> CliResult<T> {
        self.get(sec, key)?.ok_or_else(|| CliError::Config { line: None, msg: format!("missing required key {sec}.{key}") })
    }

    /// Whitespace- or comma-separated list.
    pub fn list<T: FromStr>(&self, sec: &str, key: &str) -> CliResult<Option<Vec<T>>> {
        match self.entry(sec, key) {
            None => Ok(None),
            Some(e) => e
                .value
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<T>().map_err(|_| CliError::config(e.line, format!("cannot parse '{t}' in {sec}.{key}"))))
                .collect::<CliResult<Vec<T>>>()
                .map(Some),
        }
    }

    /// One value (repeated on every axis) or exactly three.
    pub fn triple<T: FromStr + Copy>(&self, sec: &str, key: &str) -> CliResult<Option<[T; 3]>> {
        let Some(v) = self.list::<T>(sec, key)? else {
            return Ok(None);
        };
        match v.len() {
            1 => Ok(Some([v[0]; 3])),
            3 => Ok(Some([v[0], v[1], v[2]])),
            n => Err(CliError::config(self.line_of(sec, key).unwrap_or(0), format!("{sec}.{key} needs 1 or 3 values, found {n}"))),
        }
    }

    pub fn triple_or<T: FromStr + Copy>(&self, sec: &str, key: &str, default: [T; 3]) -> CliResult<[T; 3]> {
        Ok(self.triple(sec, key)?.unwrap_or(default))
    }

    /// First key (in file order) that nothing has read, as a config error.
    pub fn check_all_used(&self) -> CliResult<()> {
        let mut unused: Vec<(usize, String)> = Vec::new();
        for (sec, map) in &self.sections {
            for (k, e) in map {
                if !e.used.get() {
                    unused.push((e.line, format!("unknown key {sec}.{k}")));
                }
            }
        }
        unused.sort();
        match unused.into_iter().next() {
            Some((line, msg)) => Err(CliError::config(line, msg)),
            None => Ok(()),
        }
    }

    /// Section headers that carry no keys at all are allowed; unknown non-empty sections are caught
    /// by [`check_all_used`](Self::check_all_used).
    pub fn section_line(&self, sec: &str) -> Option<usize> {
        self.section_lines.get(sec).copied()
    }
}

/// A range check that reports the offending key's line.
pub fn ensure(cfg: &Config, sec: &str, key: &str, ok: bool, what: &str) -> CliResult<()> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config { line: cfg.line_of(sec, key), msg: format!("{sec}.{key}: {what}") })
    }
}
