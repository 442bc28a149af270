//! Optional `key=value` config file.
//!
//! One entry per line, `#` starts a comment, keys use the flag names with
//! either dashes or underscores. Precedence is flag, then file, then the
//! built-in default (handled at the call site with `unwrap_or`).

use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

use cartex::Error;

#[derive(Debug, Default)]
pub struct ConfigFile {
    entries: HashMap<String, String>,
}

fn normalize(key: &str) -> String {
    key.trim().replace('_', "-").to_ascii_lowercase()
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self, Error> {
        let Some(path) = path else {
            return Ok(ConfigFile::default());
        };
        let text = std::fs::read_to_string(path)?;
        let mut entries = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Parameter(format!(
                    "config line {}: expected key=value, got {raw:?}",
                    lineno + 1
                )));
            };
            entries.insert(normalize(key), value.trim().to_string());
        }
        Ok(ConfigFile { entries })
    }

    /// Flag value if given, otherwise the parsed file entry, otherwise None.
    pub fn resolve<T: FromStr>(&self, key: &str, flag: Option<T>) -> Result<Option<T>, Error> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.entries.get(&normalize(key)) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                Error::Parameter(format!("config key {key}: cannot parse value {raw:?}"))
            }),
        }
    }
}
