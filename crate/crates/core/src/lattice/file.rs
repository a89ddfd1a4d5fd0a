//! JSON environment files.
//!
//! ```json
//! {"dim": 2, "radius": 1, "a": 1, "b": 2, "source": [0, 0], "sink": [1, 0],
//!  "default": "a", "exceptions": [{"base": [0, 0], "axis": 0}]}
//! ```
//!
//! Exceptions carry the value opposite to `default`. Saved files are canonical:
//! the majority value is the default (ties go to `a`) and exceptions are sorted
//! by edge index, so `save(load(x)) == x` for any canonical `x`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Environment, Lattice, LatticeSpec, Value};
use crate::error::{Error, Result};
use crate::scalar::Weight;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExceptionEdge {
    pub base: Vec<i64>,
    pub axis: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentFile {
    pub dim: usize,
    pub radius: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduced_box: Option<Vec<[i64; 2]>>,
    pub a: i64,
    pub b: i64,
    pub source: Vec<i64>,
    pub sink: Vec<i64>,
    pub default: Value,
    pub exceptions: Vec<ExceptionEdge>,
}

impl EnvironmentFile {
    pub fn from_environment<T: Weight>(lattice: &Lattice<T>, env: &Environment) -> Result<Self> {
        lattice.check_env(env)?;
        let spec = lattice.spec();
        let n_b = env.count_b();
        let default = if n_b * 2 > env.len() { Value::B } else { Value::A };
        let exceptions = lattice
            .edge_ids()
            .filter(|&e| env.value(e) != default)
            .map(|e| {
                let (base, axis) = lattice.decode_edge(e)?;
                Ok(ExceptionEdge { base, axis })
            })
            .collect::<Result<Vec<_>>>()?;
        let as_i64 =
            |v: T, name: &str| v.to_i64().ok_or_else(|| Error::EnvFile(format!("{name} = {v} does not fit in i64")));
        Ok(Self {
            dim: spec.dim,
            radius: spec.radius,
            reduced_box: spec.reduced_box.as_ref().map(|b| b.iter().map(|&(l, h)| [l, h]).collect()),
            a: as_i64(spec.a, "a")?,
            b: as_i64(spec.b, "b")?,
            source: spec.source.clone(),
            sink: spec.sink.clone(),
            default,
            exceptions,
        })
    }

    pub fn spec<T: Weight>(&self) -> Result<LatticeSpec<T>> {
        let conv = |v: i64, name: &str| {
            T::from_i64(v).ok_or_else(|| Error::EnvFile(format!("{name} = {v} does not fit the weight type")))
        };
        Ok(LatticeSpec {
            dim: self.dim,
            radius: self.radius,
            reduced_box: self.reduced_box.as_ref().map(|b| b.iter().map(|&[l, h]| (l, h)).collect()),
            a: conv(self.a, "a")?,
            b: conv(self.b, "b")?,
            source: self.source.clone(),
            sink: self.sink.clone(),
        })
    }

    /// Builds the lattice and environment, validating every exception.
    pub fn resolve<T: Weight>(&self) -> Result<(Lattice<T>, Environment)> {
        let lattice = Lattice::build(self.spec()?)?;
        let mut env = Environment::uniform(lattice.edge_count(), self.default);
        let mut seen = vec![false; lattice.edge_count()];
        for ex in &self.exceptions {
            let e = lattice.encode_edge(&ex.base, ex.axis)?;
            if std::mem::replace(&mut seen[e.index()], true) {
                return Err(Error::DuplicateEdge(e.index()));
            }
            env.set(e, self.default.flipped());
        }
        Ok((lattice, env))
    }

    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::EnvFile(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("environment file serializes");
        s.push('\n');
        s
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

/// Reads a lattice and environment from a file.
pub fn load_environment<T: Weight>(path: impl AsRef<Path>) -> Result<(Lattice<T>, Environment)> {
    EnvironmentFile::load(path)?.resolve()
}

/// Writes `env` in canonical form.
pub fn save_environment<T: Weight>(lattice: &Lattice<T>, env: &Environment, path: impl AsRef<Path>) -> Result<()> {
    EnvironmentFile::from_environment(lattice, env)?.save(path)
}
