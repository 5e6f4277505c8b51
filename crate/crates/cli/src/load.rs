use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use aisemi::algebra::{parse_algebra, parse_algebras, registry, registry_names};
use aisemi::FiniteAiSemiring;
use anyhow::{bail, Context, Result};

/// A registry name or the path of a file holding exactly one algebra.
pub fn load_algebra(source: &str) -> Result<FiniteAiSemiring> {
    if let Ok(s) = registry(source) {
        return Ok(s);
    }
    if !Path::new(source).exists() {
        bail!("{source:?} is neither a registry algebra ({}) nor a file", registry_names().join(", "));
    }
    let text = fs::read_to_string(source).with_context(|| format!("reading {source}"))?;
    let mut all = parse_algebras(&text).with_context(|| format!("parsing {source}"))?;
    match all.len() {
        1 => Ok(all.remove(0)),
        0 => bail!("{source}: no algebra found"),
        n => bail!("{source}: expected one algebra, found {n}"),
    }
}

/// The built-in registry with some entries replaced from files. A replaced
/// entry that fails to load stays in the registry as an error so that every
/// claim depending on it fails.
#[derive(Debug, Default)]
pub struct Registry {
    overrides: BTreeMap<String, Result<FiniteAiSemiring, String>>,
}

impl Registry {
    /// `overrides` are `NAME=FILE` pairs.
    pub fn with_overrides(overrides: &[String]) -> Result<Self> {
        let mut map = BTreeMap::new();
        for o in overrides {
            let (name, file) = o
                .split_once('=')
                .with_context(|| format!("override {o:?} is not NAME=FILE"))?;
            if registry(name).is_err() {
                bail!("override names unknown algebra {name:?}");
            }
            let text = fs::read_to_string(file).with_context(|| format!("reading {file}"))?;
            let loaded = parse_algebra(&text)
                .map(|s| s.renamed(name))
                .map_err(|e| format!("{file}: {e}"));
            map.insert(name.to_string(), loaded);
        }
        Ok(Registry { overrides: map })
    }

    pub fn get(&self, name: &str) -> Result<FiniteAiSemiring, String> {
        match self.overrides.get(name) {
            Some(r) => r.clone(),
            None => registry(name).map_err(|e| e.to_string()),
        }
    }

    pub fn is_overridden(&self) -> bool {
        !self.overrides.is_empty()
    }
}
