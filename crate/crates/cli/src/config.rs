//! Config assembly: file, subcommand flags, `--override` pairs, then the
//! global `--seed`/`--out`, each layer replacing fields of the previous one.

use std::marker::PhantomData;
use std::path::{Path, PathBuf};

use ruclab::lattice::LatticeNorm;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::CliError;

/// An input given inline or as a path (a JSON string) to a JSON file.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Source<T> {
    raw: Value,
    #[serde(skip)]
    kind: PhantomData<T>,
}

impl<T: DeserializeOwned> Source<T> {
    pub fn load(&self, field: &str) -> Result<T, CliError> {
        match &self.raw {
            Value::String(p) => {
                let text = std::fs::read_to_string(p)
                    .map_err(|e| CliError::usage(format!("{field}: cannot read `{p}`: {e}")))?;
                let de = &mut serde_json::Deserializer::from_str(&text);
                serde_path_to_error::deserialize(de)
                    .map_err(|e| CliError::usage(format!("{field} (`{p}`): {}: {}", e.path(), e.inner())))
            }
            inline => serde_path_to_error::deserialize(inline).map_err(|e| {
                let path = e.path().to_string();
                CliError::usage(if path == "." { format!("{field}: {}", e.inner()) } else { format!("{field}.{path}: {}", e.inner()) })
            }),
        }
    }
}

/// A norm as `"l1"`, `"l2"`, `"sup"`, `"lp:<p>"`, or the full object form.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum NormArg {
    Short(String),
    Full(LatticeNorm),
}

impl Default for NormArg {
    fn default() -> Self {
        NormArg::Short("sup".into())
    }
}

impl NormArg {
    pub fn resolve(&self, field: &str) -> Result<LatticeNorm, CliError> {
        match self {
            NormArg::Full(n) => Ok(n.clone()),
            NormArg::Short(s) => match s.as_str() {
                "sup" | "linf" | "inf" => Ok(LatticeNorm::sup()),
                "l1" => Ok(LatticeNorm::l1()),
                "l2" => Ok(LatticeNorm::l2()),
                other => other
                    .strip_prefix("lp:")
                    .and_then(|p| p.parse::<f64>().ok())
                    .ok_or_else(|| CliError::usage(format!("{field}: unknown norm `{other}`")))
                    .and_then(|p| LatticeNorm::lp(p).map_err(|e| CliError::usage(format!("{field}: {e}")))),
            },
        }
    }
}

/// The assembled config document plus the fields every preset shares.
pub struct Assembled {
    pub experiment: String,
    pub seed: u64,
    pub out: PathBuf,
    pub body: Value,
}

pub struct Layers<'a> {
    pub file: Option<&'a Path>,
    pub experiment: Option<&'a str>,
    pub flags: Vec<(&'static str, Value)>,
    pub overrides: &'a [String],
    pub seed: Option<u64>,
    pub out: Option<&'a Path>,
}

pub fn assemble(layers: Layers<'_>) -> Result<Assembled, CliError> {
    let mut doc = match layers.file {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::usage(format!("cannot read config `{}`: {e}", path.display())))?;
            serde_json::from_str::<Value>(&text)
                .map_err(|e| CliError::usage(format!("config `{}` is not valid JSON: {e}", path.display())))?
        }
        None => Value::Object(Map::new()),
    };
    let obj = doc.as_object_mut().ok_or_else(|| CliError::usage("config must be a JSON object"))?;

    if let Some(name) = layers.experiment {
        match obj.get("experiment") {
            Some(Value::String(s)) if s != name => {
                return Err(CliError::usage(format!("experiment: config names `{s}` but the command is `{name}`")))
            }
            _ => {
                obj.insert("experiment".into(), Value::String(name.into()));
            }
        }
    }
    for (key, value) in layers.flags {
        obj.insert(key.into(), value);
    }
    for pair in layers.overrides {
        let (key, raw) = pair
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("--override expects key=value, got `{pair}`")))?;
        let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.into()));
        set_path(obj, key, value)?;
    }
    if let Some(seed) = layers.seed {
        obj.insert("seed".into(), Value::from(seed));
    }
    if let Some(out) = layers.out {
        obj.insert("out".into(), Value::String(out.display().to_string()));
    }

    let experiment = match obj.remove("experiment") {
        Some(Value::String(s)) => s,
        Some(_) => return Err(CliError::usage("experiment: expected a string")),
        None => return Err(CliError::usage("missing field `experiment`")),
    };
    let seed = match obj.remove("seed") {
        None => 0,
        Some(v) => v.as_u64().ok_or_else(|| CliError::usage("seed: expected an unsigned 64-bit integer"))?,
    };
    let out = match obj.remove("out") {
        None => PathBuf::from("out"),
        Some(Value::String(s)) => PathBuf::from(s),
        Some(_) => return Err(CliError::usage("out: expected a path string")),
    };
    Ok(Assembled { experiment, seed, out, body: doc })
}

fn set_path(obj: &mut Map<String, Value>, key: &str, value: Value) -> Result<(), CliError> {
    let mut parts = key.split('.').peekable();
    let mut cur = obj;
    while let Some(part) = parts.next() {
        if part.is_empty() {
            return Err(CliError::usage(format!("--override: empty key segment in `{key}`")));
        }
        if parts.peek().is_none() {
            cur.insert(part.into(), value);
            return Ok(());
        }
        let next = cur.entry(part).or_insert_with(|| Value::Object(Map::new()));
        cur = next
            .as_object_mut()
            .ok_or_else(|| CliError::usage(format!("--override: `{part}` in `{key}` is not an object")))?;
    }
    Ok(())
}

/// Typed view of the config body with field paths in errors.
pub fn parse<T: DeserializeOwned>(body: &Value) -> Result<T, CliError> {
    serde_path_to_error::deserialize(body).map_err(|e| {
        let path = e.path().to_string();
        CliError::usage(if path == "." { e.inner().to_string() } else { format!("{path}: {}", e.inner()) })
    })
}
