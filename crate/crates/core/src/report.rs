//! Pass/fail records for identity suites.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::dense::Matrix;
use crate::tensor::SymTensor;
use crate::ExactScalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Measured but not asserted.
    Reported,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub identity: String,
    /// The relation being checked, written out.
    pub relation: String,
    pub status: Status,
    /// Largest absolute component of the residual, as an exact rational.
    pub residual: String,
    pub seed: u64,
}

impl Check {
    /// Asserted check: passes iff `residual` is exactly zero.
    pub fn exact(identity: impl Into<String>, relation: impl Into<String>, residual: &ExactScalar, seed: u64) -> Self {
        Check {
            identity: identity.into(),
            relation: relation.into(),
            status: if residual.is_zero() { Status::Pass } else { Status::Fail },
            residual: residual.abs().to_string(),
            seed,
        }
    }

    pub fn reported(identity: impl Into<String>, relation: impl Into<String>, residual: &ExactScalar, seed: u64) -> Self {
        Check {
            status: Status::Reported,
            ..Self::exact(identity, relation, residual, seed)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub suite: String,
    pub checks: Vec<Check>,
    /// Named exact constants measured along the way (e.g. a proportionality factor).
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub constants: BTreeMap<String, String>,
}

impl VerificationReport {
    pub fn new(suite: impl Into<String>) -> Self {
        VerificationReport {
            suite: suite.into(),
            checks: Vec::new(),
            constants: BTreeMap::new(),
        }
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
        self.constants.extend(other.constants);
    }

    /// No asserted check failed.
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    /// Sets the seed of every check to `seed`.
    pub fn with_seed(mut self, seed: u64) -> Self {
        for c in &mut self.checks {
            c.seed = seed;
        }
        self
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.status == Status::Fail)
    }
}

/// Largest absolute value in a sequence (zero for an empty one).
pub fn max_abs<'a>(values: impl IntoIterator<Item = &'a ExactScalar>) -> ExactScalar {
    values
        .into_iter()
        .map(|v| v.abs())
        .max()
        .unwrap_or_else(ExactScalar::zero)
}

pub fn max_abs_tensor(t: &SymTensor<ExactScalar>) -> ExactScalar {
    max_abs(t.iter().map(|(_, v)| v))
}

/// Largest absolute entry of `m - I`.
pub fn identity_defect(m: &Matrix<ExactScalar>) -> ExactScalar {
    let id = Matrix::identity(m.dim());
    max_abs(m.add_scaled(&id, &-<ExactScalar as num_traits::One>::one()).entries())
}
