//! Run configuration: a TOML file with `[run] [fitness] [weights] [criterion]
//! [output]` sections, overridden key by key from the command line.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::path::Path;

use serde_json::Value;

use crate::CliError;

/// Every accepted key, by section. Flags carry the same names.
pub const KEYS: &[(&str, &[&str])] = &[
    ("run", &["n", "nmin", "nmax", "replicas", "seed", "mode", "l", "explosion_alpha", "trees", "simulate"]),
    (
        "fitness",
        &[
            "family",
            "g",
            "form",
            "sigma",
            "nu",
            "alpha",
            "r",
            "table",
            "tail_exponent",
            "beta",
            "p",
            "growth_c",
            "growth_n",
        ],
    ),
    ("weights", &["family", "kappa", "gamma", "value", "table", "c_lo", "c_hi"]),
    (
        "criterion",
        &[
            "delta",
            "eps",
            "c",
            "w",
            "ratio_form",
            "expectation",
            "h",
            "draws",
            "theta",
            "mgf_tol",
            "per_decade",
            "a1",
            "m",
            "eps_b",
            "kappa_max",
            "example",
        ],
    ),
    ("output", &["out_dir", "formats", "force"]),
];

/// Resolved key/value pairs with a record of what was read.
#[derive(Debug, Default)]
pub struct Config {
    values: BTreeMap<String, Value>,
    used: RefCell<BTreeMap<String, Value>>,
}

fn section_of(key: &str) -> Option<&'static str> {
    KEYS.iter().find(|(_, ks)| ks.contains(&key)).map(|(s, _)| *s)
}

/// Flag text as a typed value: integer, float, boolean, else string.
fn parse_scalar(text: &str) -> Value {
    if let Ok(i) = text.parse::<i64>() {
        return Value::from(i);
    }
    if let Ok(f) = text.parse::<f64>() {
        if f.is_finite() {
            return Value::from(f);
        }
    }
    match text {
        "true" => Value::Bool(true),
        "false" => Value::Bool(false),
        _ => Value::String(text.to_string()),
    }
}

fn toml_to_json(v: &toml::Value) -> Result<Value, CliError> {
    Ok(match v {
        toml::Value::String(s) => Value::String(s.clone()),
        toml::Value::Integer(i) => Value::from(*i),
        toml::Value::Float(f) => Value::from(*f),
        toml::Value::Boolean(b) => Value::Bool(*b),
        toml::Value::Array(a) => Value::Array(a.iter().map(toml_to_json).collect::<Result<_, _>>()?),
        other => return Err(CliError::Config(format!("unsupported value `{other}`"))),
    })
}

impl Config {
    /// Loads `path` (if any), rejecting unknown sections and keys, then applies
    /// `overrides` (`section.key`, text) on top.
    pub fn load(path: Option<&Path>, overrides: &[(&'static str, String)]) -> Result<Self, CliError> {
        let mut cfg = Config::default();
        if let Some(path) = path {
            let text =
                std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            let table: toml::Table = text.parse().map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            let mut unknown = Vec::new();
            for (section, body) in &table {
                let Some((_, keys)) = KEYS.iter().find(|(s, _)| s == section) else {
                    unknown.push(format!("[{section}]"));
                    continue;
                };
                let toml::Value::Table(body) = body else {
                    unknown.push(section.clone());
                    continue;
                };
                for (k, v) in body {
                    if keys.contains(&k.as_str()) {
                        cfg.values.insert(format!("{section}.{k}"), toml_to_json(v)?);
                    } else {
                        unknown.push(format!("{section}.{k}"));
                    }
                }
            }
            if !unknown.is_empty() {
                return Err(CliError::Config(format!("unknown configuration keys: {}", unknown.join(", "))));
            }
        }
        for (key, text) in overrides {
            cfg.values.insert(key.to_string(), parse_scalar(text));
        }
        Ok(cfg)
    }

    fn raw(&self, key: &str) -> Option<&Value> {
        debug_assert!(key.split_once('.').is_some_and(|(s, k)| section_of(k).is_some() && !s.is_empty()), "{key}");
        self.values.get(key)
    }

    fn note(&self, key: &str, v: Value) {
        self.used.borrow_mut().insert(key.to_string(), v);
    }

    pub fn has(&self, key: &str) -> bool {
        self.raw(key).is_some()
    }

    pub fn f64_opt(&self, key: &str) -> Result<Option<f64>, CliError> {
        let Some(v) = self.raw(key) else { return Ok(None) };
        let x = v.as_f64().ok_or_else(|| CliError::Config(format!("`{key}` must be a number, got {v}")))?;
        self.note(key, v.clone());
        Ok(Some(x))
    }

    pub fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        match self.f64_opt(key)? {
            Some(x) => Ok(x),
            None => {
                self.note(key, Value::from(default));
                Ok(default)
            }
        }
    }

    pub fn f64_req(&self, key: &str) -> Result<f64, CliError> {
        self.f64_opt(key)?.ok_or_else(|| CliError::Config(format!("missing required key `{key}`")))
    }

    pub fn u64_opt(&self, key: &str) -> Result<Option<u64>, CliError> {
        let Some(v) = self.raw(key) else { return Ok(None) };
        let x = match v {
            Value::Number(n) if n.is_u64() => n.as_u64().unwrap(),
            Value::Number(n) if n.as_f64().is_some_and(|f| f >= 0.0 && f.fract() == 0.0 && f < 9e15) => {
                n.as_f64().unwrap() as u64
            }
            _ => return Err(CliError::Config(format!("`{key}` must be a non-negative integer, got {v}"))),
        };
        self.note(key, Value::from(x));
        Ok(Some(x))
    }

    pub fn u64_or(&self, key: &str, default: u64) -> Result<u64, CliError> {
        match self.u64_opt(key)? {
            Some(x) => Ok(x),
            None => {
                self.note(key, Value::from(default));
                Ok(default)
            }
        }
    }

    pub fn str_opt(&self, key: &str) -> Result<Option<String>, CliError> {
        let Some(v) = self.raw(key) else { return Ok(None) };
        let s = match v {
            Value::String(s) => s.clone(),
            Value::Number(n) => n.to_string(),
            _ => return Err(CliError::Config(format!("`{key}` must be a string, got {v}"))),
        };
        self.note(key, Value::String(s.clone()));
        Ok(Some(s))
    }

    pub fn str_or(&self, key: &str, default: &str) -> Result<String, CliError> {
        match self.str_opt(key)? {
            Some(s) => Ok(s),
            None => {
                self.note(key, Value::String(default.into()));
                Ok(default.into())
            }
        }
    }

    pub fn bool_or(&self, key: &str, default: bool) -> Result<bool, CliError> {
        let b = match self.raw(key) {
            None => default,
            Some(Value::Bool(b)) => *b,
            Some(v) => return Err(CliError::Config(format!("`{key}` must be true or false, got {v}"))),
        };
        self.note(key, Value::Bool(b));
        Ok(b)
    }

    /// A list of numbers, from a TOML array or comma-separated text.
    pub fn f64_list_or(&self, key: &str, default: &[f64]) -> Result<Vec<f64>, CliError> {
        let bad = |v: &Value| CliError::Config(format!("`{key}` must be a list of numbers, got {v}"));
        let out = match self.raw(key) {
            None => default.to_vec(),
            Some(Value::Number(n)) => vec![n.as_f64().unwrap()],
            Some(v @ Value::Array(a)) => {
                a.iter().map(|x| x.as_f64().ok_or_else(|| bad(v))).collect::<Result<_, _>>()?
            }
            Some(v @ Value::String(s)) => {
                s.split(',').map(|p| p.trim().parse::<f64>().map_err(|_| bad(v))).collect::<Result<_, _>>()?
            }
            Some(v) => return Err(bad(v)),
        };
        self.note(key, Value::from(out.clone()));
        Ok(out)
    }

    /// `a:b:step` inclusive grid, or a single number.
    pub fn range(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        let Some(v) = self.raw(key) else { return Ok(None) };
        let text = match v {
            Value::Number(n) => n.to_string(),
            Value::String(s) => s.clone(),
            _ => return Err(CliError::Config(format!("`{key}` must be a number or a:b:step range, got {v}"))),
        };
        self.note(key, Value::String(text.clone()));
        parse_range(&text).map(Some).map_err(|e| CliError::Config(format!("`{key}`: {e}")))
    }

    /// Every key read so far with its resolved value.
    pub fn consumed(&self) -> BTreeMap<String, Value> {
        self.used.borrow().clone()
    }

    /// `section.key = value` lines for CSV headers.
    pub fn header_lines(&self) -> Vec<String> {
        self.consumed().iter().map(|(k, v)| format!("{k} = {v}")).collect()
    }
}

pub fn parse_range(text: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| format!("`{s}` is not a number"));
    match parts.as_slice() {
        [x] => Ok(vec![num(x)?]),
        [a, b, step] => {
            let (a, b, step) = (num(a)?, num(b)?, num(step)?);
            if !(step > 0.0) || b < a {
                return Err(format!("range {text} needs a ≤ b and step > 0"));
            }
            let count = ((b - a) / step + 1e-9).floor() as usize + 1;
            if count > 10_000 {
                return Err(format!("range {text} has {count} points; at most 10000 allowed"));
            }
            Ok((0..count).map(|k| round12(a + step * k as f64)).collect())
        }
        _ => Err(format!("expected a number or a:b:step, got `{text}`")),
    }
}

/// Strips accumulated binary noise so grid values print as typed.
fn round12(x: f64) -> f64 {
    format!("{x:.12e}").parse().unwrap()
}
