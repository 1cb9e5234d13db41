//! Pieces shared by the per-command configs, plus loading and `--set`
//! overrides.

use crate::{config_err, CliError, Context, Result};
use fractal_dims::sampled::log_grid;
use fractal_dims::vonkoch::GkfParams;
use fractal_dims::zeta::RatioMultiset;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::path::Path;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GkfSpec {
    pub n: u32,
    pub r: f64,
}

impl GkfSpec {
    pub fn params(&self) -> Result<GkfParams> {
        GkfParams::new(self.n, self.r).ctx("vonkoch")
    }
}

/// Either an explicit ratio list `[[ratio, multiplicity], ...]` or a
/// generalized von Koch system.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratios: Option<Vec<(f64, u32)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gkf: Option<GkfSpec>,
}

impl SystemSpec {
    pub fn ratios(&self) -> Result<RatioMultiset> {
        match (&self.ratios, &self.gkf) {
            (Some(r), None) => RatioMultiset::new(r).ctx("zeta"),
            (None, Some(g)) => g.params()?.ratios().ctx("vonkoch"),
            _ => config_err("system needs exactly one of `ratios` or `gkf`"),
        }
    }
}

/// Log-spaced sample times.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogRange {
    pub t0: f64,
    pub t1: f64,
    pub per_decade: usize,
}

impl LogRange {
    pub const fn new(t0: f64, t1: f64, per_decade: usize) -> Self {
        LogRange { t0, t1, per_decade }
    }

    pub fn grid(&self) -> Result<Vec<f64>> {
        if !(self.t0 > 0.0 && self.t1 > self.t0 && self.t1.is_finite()) || self.per_decade == 0 {
            return config_err(format!("bad time range {self:?}"));
        }
        Ok(log_grid(self.t0, self.t1, self.per_decade))
    }
}

pub fn load(path: &Path) -> Result<(Value, Vec<u8>)> {
    let bytes = std::fs::read(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
    let v: Value = serde_json::from_slice(&bytes)?;
    if !v.is_object() {
        return config_err("top level must be a JSON object");
    }
    Ok((v, bytes))
}

/// Apply `key.path=value` overrides; the value is parsed as JSON and taken
/// as a string when that fails.
pub fn apply_overrides(config: &mut Value, overrides: &[String]) -> Result<()> {
    for o in overrides {
        let Some((key, raw)) = o.split_once('=') else {
            return config_err(format!("override `{o}` is not KEY=VALUE"));
        };
        let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
        let mut node = &mut *config;
        let parts: Vec<&str> = key.split('.').collect();
        for (i, part) in parts.iter().enumerate() {
            if part.is_empty() {
                return config_err(format!("empty key segment in `{key}`"));
            }
            let Value::Object(map) = node else {
                return config_err(format!("`{key}` descends into a non-object"));
            };
            if i + 1 == parts.len() {
                map.insert(part.to_string(), value.clone());
                break;
            }
            node = map.entry(part.to_string()).or_insert_with(|| Value::Object(Default::default()));
        }
    }
    Ok(())
}

pub fn parse<T: serde::de::DeserializeOwned>(v: Value) -> Result<T> {
    serde_json::from_value(v).map_err(|e| CliError::Config(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn overrides_create_and_replace() {
        let mut v = json!({"h": 0.01, "gkf": {"n": 3}});
        apply_overrides(&mut v, &["h=0.002".into(), "gkf.r=0.25".into(), "name=abc".into(), "a.b=[1,2]".into()]).unwrap();
        assert_eq!(v, json!({"h": 0.002, "gkf": {"n": 3, "r": 0.25}, "name": "abc", "a": {"b": [1, 2]}}));
        assert!(apply_overrides(&mut v, &["novalue".into()]).is_err());
        assert!(apply_overrides(&mut v, &["h.x=1".into()]).is_err());
    }

    #[test]
    fn system_needs_one_source() {
        let both = SystemSpec { ratios: Some(vec![(0.5, 2)]), gkf: Some(GkfSpec { n: 3, r: 1.0 / 3.0 }) };
        assert!(both.ratios().is_err());
        let g = SystemSpec { ratios: None, gkf: Some(GkfSpec { n: 3, r: 1.0 / 3.0 }) };
        assert_eq!(g.ratios().unwrap().total_multiplicity(), 4);
    }
}
