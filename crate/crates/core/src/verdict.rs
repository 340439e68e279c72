//! Output type of the irreducibility decision procedures.

use serde::Serialize;

use crate::whittaker::PbwVector;

/// Result of a decision procedure. A reducible verdict names a witness;
/// verdicts produced through the Whittaker-vector argument also carry the
/// checkable witness vector itself.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Irreducible,
    Reducible {
        witness: String,
        #[serde(skip_serializing_if = "Option::is_none")]
        vector: Option<PbwVector>,
    },
}

impl Verdict {
    pub fn reducible(witness: impl Into<String>) -> Self {
        Verdict::Reducible { witness: witness.into(), vector: None }
    }

    pub fn reducible_with_vector(witness: impl Into<String>, vector: PbwVector) -> Self {
        Verdict::Reducible { witness: witness.into(), vector: Some(vector) }
    }

    pub fn is_irreducible(&self) -> bool {
        matches!(self, Verdict::Irreducible)
    }

    pub fn is_reducible(&self) -> bool {
        !self.is_irreducible()
    }

    pub fn witness_vector(&self) -> Option<&PbwVector> {
        match self {
            Verdict::Irreducible => None,
            Verdict::Reducible { vector, .. } => vector.as_ref(),
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Verdict::Irreducible => write!(f, "irreducible"),
            Verdict::Reducible { witness, .. } => write!(f, "reducible ({witness})"),
        }
    }
}
