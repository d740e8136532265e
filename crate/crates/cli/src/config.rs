//! Flat JSON configuration merged with command-line flags, and the lockfile
//! that records every resolved value.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

pub struct Resolver {
    file: Map<String, Value>,
    resolved: BTreeMap<String, Value>,
}

impl Resolver {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let file = match path {
            None => Map::new(),
            Some(p) => {
                let text = std::fs::read_to_string(p).with_context(|| format!("reading config {}", p.display()))?;
                match serde_json::from_str::<Value>(&text).with_context(|| format!("parsing config {}", p.display()))? {
                    Value::Object(m) => m,
                    _ => bail!("config {} must be a JSON object", p.display()),
                }
            }
        };
        if let Some((k, _)) = file.iter().find(|(_, v)| v.is_object() || v.is_array()) {
            bail!("config key {k:?} must hold a scalar value");
        }
        Ok(Resolver { file, resolved: BTreeMap::new() })
    }

    fn from_file<T: DeserializeOwned>(&self, key: &str) -> Result<Option<T>> {
        match self.file.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => serde_json::from_value(v.clone())
                .map(Some)
                .map_err(|e| anyhow!("config key {key:?}: {e}")),
        }
    }

    /// Flag, else config file, else nothing.
    pub fn opt<T: DeserializeOwned + Serialize>(&mut self, key: &str, flag: Option<T>) -> Result<Option<T>> {
        let v = match flag {
            Some(v) => Some(v),
            None => self.from_file(key)?,
        };
        if let Some(v) = &v {
            self.resolved.insert(key.to_string(), serde_json::to_value(v)?);
        }
        Ok(v)
    }

    pub fn or<T: DeserializeOwned + Serialize>(&mut self, key: &str, flag: Option<T>, default: T) -> Result<T> {
        match self.opt(key, flag)? {
            Some(v) => Ok(v),
            None => {
                self.resolved.insert(key.to_string(), serde_json::to_value(&default)?);
                Ok(default)
            }
        }
    }

    pub fn req<T: DeserializeOwned + Serialize>(&mut self, key: &str, flag: Option<T>) -> Result<T> {
        self.opt(key, flag)?
            .ok_or_else(|| anyhow!("missing required value --{key} (flag or config key)"))
    }

    pub fn record(&mut self, key: &str, value: impl Serialize) -> Result<()> {
        self.resolved.insert(key.to_string(), serde_json::to_value(value)?);
        Ok(())
    }

    pub fn write_lock(&self, dir: &Path, command: &str) -> Result<()> {
        let lock = serde_json::json!({
            "tool": "fikit",
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "config": self.resolved,
        });
        fikit::io::write_atomic(&dir.join("run.lock.json"), serde_json::to_string_pretty(&lock)?.as_bytes())?;
        Ok(())
    }
}
