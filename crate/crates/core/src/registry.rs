//! Name-keyed registries of interchangeable strategies.
//!
//! Every family of exchangeable building blocks (cutoff profiles, transition
//! profiles, half-line discretizations, potentials, curvature profiles, 2D
//! domain kinds) is exposed as a trait object behind a [`Registry`], so the
//! CLI and presets select them by name at runtime.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numeric and textual parameters handed to a strategy builder.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Args {
    #[serde(default)]
    pub values: BTreeMap<String, f64>,
    #[serde(default)]
    pub path: Option<String>,
}

impl Args {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.values.insert(key.to_string(), value);
        self
    }

    pub fn with_path(mut self, path: impl Into<String>) -> Self {
        self.path = Some(path.into());
        self
    }

    pub fn get(&self, key: &str, default: f64) -> f64 {
        self.values.get(key).copied().unwrap_or(default)
    }
}

pub type Builder<T> = fn(&Args) -> Result<Box<T>>;

struct Entry<T: ?Sized> {
    summary: &'static str,
    build: Builder<T>,
}

/// A registry of named builders for one strategy family.
pub struct Registry<T: ?Sized> {
    kind: &'static str,
    entries: BTreeMap<&'static str, Entry<T>>,
}

impl<T: ?Sized> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Self { kind, entries: BTreeMap::new() }
    }

    pub fn register(&mut self, name: &'static str, summary: &'static str, build: Builder<T>) -> &mut Self {
        self.entries.insert(name, Entry { summary, build });
        self
    }

    pub fn kind(&self) -> &'static str {
        self.kind
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.keys().copied().collect()
    }

    pub fn summary(&self, name: &str) -> Option<&'static str> {
        self.entries.get(name).map(|e| e.summary)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn build(&self, name: &str, args: &Args) -> Result<Box<T>> {
        match self.entries.get(name) {
            Some(entry) => (entry.build)(args),
            None => Err(Error::UnknownStrategy {
                kind: self.kind,
                name: name.to_string(),
                available: self.names().join(", "),
            }),
        }
    }
}

impl<T: ?Sized> fmt::Debug for Registry<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Registry")
            .field("kind", &self.kind)
            .field("entries", &self.names())
            .finish()
    }
}
