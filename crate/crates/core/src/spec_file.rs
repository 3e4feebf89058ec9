//! JSON substitution files.
//!
//! ```json
//! {"alphabet": ["a", "b", "c"],
//!  "rules": {"a": "abc", "b": "bca", "c": "cab"},
//!  "seed": "a"}
//! ```
//!
//! Letters are mapped to dense indices in declaration order. An image is
//! either a list of letter names or a string; a string is split on
//! whitespace when it contains any, otherwise into characters.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::subst::{Letter, Substitution};
use crate::MAX_ALPHABET;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Image {
    Text(String),
    Letters(Vec<String>),
}

impl Image {
    fn names(&self) -> Vec<String> {
        match self {
            Image::Letters(names) => names.clone(),
            Image::Text(t) if t.contains(char::is_whitespace) => t.split_whitespace().map(str::to_owned).collect(),
            Image::Text(t) => t.chars().map(String::from).collect(),
        }
    }
}

/// The file as written.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubstitutionSpecFile {
    pub alphabet: Vec<String>,
    pub rules: BTreeMap<String, Image>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<String>,
}

/// A validated substitution with its letter names.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LoadedSpec {
    pub names: Vec<String>,
    pub substitution: Substitution,
    pub seed: Option<Letter>,
}

impl LoadedSpec {
    pub fn name(&self, a: Letter) -> &str {
        &self.names[a.index()]
    }
}

impl SubstitutionSpecFile {
    pub fn validate(&self) -> Result<LoadedSpec> {
        if self.alphabet.is_empty() {
            return Err(Error::EmptyAlphabet);
        }
        if self.alphabet.len() > MAX_ALPHABET {
            return Err(Error::AlphabetTooLarge(self.alphabet.len()));
        }
        let lookup = |name: &str| -> Result<Letter> {
            self.alphabet
                .iter()
                .position(|n| n == name)
                .map(|i| Letter(i as u8))
                .ok_or_else(|| Error::SpecFile(format!("unknown letter {name:?}")))
        };
        for (i, name) in self.alphabet.iter().enumerate() {
            if name.is_empty() {
                return Err(Error::SpecFile("empty letter name".into()));
            }
            if self.alphabet[..i].contains(name) {
                return Err(Error::SpecFile(format!("duplicate letter {name:?}")));
            }
        }
        if let Some(extra) = self.rules.keys().find(|k| !self.alphabet.contains(k)) {
            return Err(Error::SpecFile(format!("rule for unknown letter {extra:?}")));
        }
        let images = self
            .alphabet
            .iter()
            .map(|name| {
                let image = self
                    .rules
                    .get(name)
                    .ok_or_else(|| Error::SpecFile(format!("missing rule for letter {name:?}")))?;
                image.names().iter().map(|n| lookup(n)).collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let substitution = Substitution::new(images)?;
        let seed = self.seed.as_deref().map(lookup).transpose()?;
        Ok(LoadedSpec {
            names: self.alphabet.clone(),
            substitution,
            seed,
        })
    }
}

pub fn parse_spec(json: &str) -> Result<LoadedSpec> {
    serde_json::from_str::<SubstitutionSpecFile>(json)?.validate()
}

pub fn load_spec(path: impl AsRef<Path>) -> Result<LoadedSpec> {
    parse_spec(&std::fs::read_to_string(path)?)
}
