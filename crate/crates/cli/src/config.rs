//! `key = value` run files. Keys are long flag names; `-` and `_` are
//! interchangeable. Relative paths resolve against the file's directory.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{bail, Context, Result};

#[derive(Debug, Default)]
pub struct ConfigFile {
    base: PathBuf,
    values: BTreeMap<String, (usize, String)>,
    used: std::cell::RefCell<Vec<String>>,
}

fn normalize(key: &str) -> String {
    key.trim().trim_start_matches("--").replace('_', "-").to_lowercase()
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path).with_context(|| format!("config {}", path.display()))?;
        let mut cfg = Self::parse(&text).with_context(|| format!("config {}", path.display()))?;
        cfg.base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                bail!("line {}: expected `key = value`", i + 1);
            };
            let key = normalize(k);
            if key.is_empty() {
                bail!("line {}: empty key", i + 1);
            }
            let v = v.trim().trim_matches('"').to_string();
            if values.insert(key.clone(), (i + 1, v)).is_some() {
                bail!("line {}: `{key}` set twice", i + 1);
            }
        }
        Ok(ConfigFile {
            values,
            ..Self::default()
        })
    }

    fn raw(&self, key: &str) -> Option<&(usize, String)> {
        let key = normalize(key);
        let hit = self.values.get(&key);
        if hit.is_some() {
            self.used.borrow_mut().push(key);
        }
        hit
    }

    /// Fills `slot` from the file when the flag was not given.
    pub fn fill<T: FromStr>(&self, slot: &mut Option<T>, key: &str) -> Result<()>
    where
        T::Err: std::fmt::Display,
    {
        if let Some((line, v)) = self.raw(key) {
            if slot.is_none() {
                let parsed = v
                    .parse()
                    .map_err(|e| anyhow::anyhow!("config line {line}: `{key}`: {e}"))?;
                *slot = Some(parsed);
            }
        }
        Ok(())
    }

    pub fn fill_path(&self, slot: &mut Option<PathBuf>, key: &str) {
        if let Some((_, v)) = self.raw(key) {
            if slot.is_none() {
                *slot = Some(self.base.join(v));
            }
        }
    }

    pub fn fill_paths(&self, slot: &mut Vec<PathBuf>, key: &str) {
        if let Some((_, v)) = self.raw(key) {
            if slot.is_empty() {
                *slot = v
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| self.base.join(s))
                    .collect();
            }
        }
    }

    pub fn fill_flag(&self, slot: &mut bool, key: &str) -> Result<()> {
        let mut v = None;
        self.fill::<bool>(&mut v, key)?;
        *slot |= v.unwrap_or(false);
        Ok(())
    }

    /// Fails on keys no command option consumed.
    pub fn check_unused(&self) -> Result<()> {
        let used = self.used.borrow();
        let unknown: Vec<&str> = self
            .values
            .keys()
            .filter(|k| !used.contains(k))
            .map(String::as_str)
            .collect();
        if !unknown.is_empty() {
            bail!("config: unknown key(s) for this command: {}", unknown.join(", "));
        }
        Ok(())
    }
}
