//! Plain-text `key=value` config files. Flags always override file values;
//! unknown keys are hard errors, like unknown flags.

use std::collections::HashMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

pub struct ConfigFile {
    values: HashMap<String, String>,
    consumed: std::cell::RefCell<Vec<String>>,
}

impl ConfigFile {
    pub fn empty() -> Self {
        Self {
            values: HashMap::new(),
            consumed: std::cell::RefCell::new(Vec::new()),
        }
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let content = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let mut values = HashMap::new();
        for (lineno, line) in content.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                format!(
                    "bad config line {} in {}: expected key=value",
                    lineno + 1,
                    path.display()
                )
            })?;
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Self {
            values,
            consumed: std::cell::RefCell::new(Vec::new()),
        })
    }

    /// Flag value if given, else config-file value, else default.
    pub fn resolve<T>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, String>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.consumed.borrow_mut().push(key.to_string());
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.values.get(key) {
            Some(raw) => raw
                .parse::<T>()
                .map_err(|e| format!("bad config value for {key}: {e}")),
            None => Ok(default),
        }
    }

    /// Like `resolve` but with no default: stays `None` when absent.
    pub fn resolve_opt<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, String>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.consumed.borrow_mut().push(key.to_string());
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            Some(raw) => raw
                .parse::<T>()
                .map(Some)
                .map_err(|e| format!("bad config value for {key}: {e}")),
            None => Ok(None),
        }
    }

    /// After every key has been resolved, reject leftovers.
    pub fn finish(&self) -> Result<(), String> {
        let consumed = self.consumed.borrow();
        let mut unknown: Vec<&String> = self
            .values
            .keys()
            .filter(|k| !consumed.contains(k))
            .collect();
        unknown.sort();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(format!(
                "unknown config keys: {}",
                unknown
                    .iter()
                    .map(|s| s.as_str())
                    .collect::<Vec<_>>()
                    .join(", ")
            ))
        }
    }
}
