use std::collections::BTreeSet;
use std::str::FromStr;

use hyperinv::{ExactScalar, ExactTensor, SymTensor};
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// The JSON wire form of a symmetric tensor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TensorDocument {
    pub rank: usize,
    pub dim: usize,
    pub entries: Vec<Entry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Entry {
    pub index: Vec<usize>,
    pub value: String,
}

pub fn parse_rational(text: &str) -> Result<ExactScalar, CliError> {
    ExactScalar::from_str(text.trim()).map_err(|e| CliError::Input(format!("bad rational {text:?}: {e}")))
}

impl TensorDocument {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Input(format!("malformed tensor document: {e}")))
    }

    pub fn to_tensor(&self) -> Result<ExactTensor, CliError> {
        let mut t = SymTensor::zeros(self.rank, self.dim)?;
        let mut seen = BTreeSet::new();
        for entry in &self.entries {
            if entry.index.len() != self.rank || entry.index.iter().any(|&i| i >= self.dim) {
                return Err(CliError::Input(format!(
                    "index {:?} does not fit rank {} dim {}",
                    entry.index, self.rank, self.dim
                )));
            }
            let mut key = entry.index.clone();
            key.sort_unstable();
            if !seen.insert(key.clone()) {
                return Err(CliError::Input(format!("duplicate canonical index {key:?}")));
            }
            t.set(&key, parse_rational(&entry.value)?)?;
        }
        Ok(t)
    }

    /// One entry per nonzero canonical key, keys in lexicographic order.
    pub fn from_tensor(t: &ExactTensor) -> Self {
        TensorDocument {
            rank: t.rank(),
            dim: t.dim(),
            entries: t
                .iter()
                .filter(|(_, v)| !v.is_zero())
                .map(|(k, v)| Entry {
                    index: k.to_vec(),
                    value: v.to_string(),
                })
                .collect(),
        }
    }
}
