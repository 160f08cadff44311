//! Classical LOPC protocols over [`JointDistribution`]s: teleportation with
//! a shared key, unlocking, two-copy superactivation, the five-copy
//! construction and secret distribution.

mod drivers;
pub mod tables;
mod transcript;
pub mod verify;

use thiserror::Error;

use crate::dist::{DistError, JointDistribution};
use crate::measures::MeasureError;

pub use drivers::{
    classical_teleport, distill_pair_from_five, distribute_secret, five_copy_layout, multipartite_from_pairwise,
    superactivate_pair, symmetrized_five, unlock, PairSbit, UnlockBranch, FIVE_PARTIES,
};
pub use tables::{compact_table, smolin_table};
pub use transcript::{ProtocolTranscript, Step, TranscriptJson};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error("unexpected shape: {0}")]
    Shape(String),
    #[error("parties {0:?} are not connected to the rest by pairwise keys")]
    DisconnectedGraph(Vec<String>),
}

pub type Result<T, E = ProtocolError> = std::result::Result<T, E>;

/// Two distinct honest parties.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PairTarget {
    pub holder1: String,
    pub holder2: String,
}

impl PairTarget {
    pub fn new(holder1: &str, holder2: &str) -> Result<Self> {
        if holder1 == holder2 {
            return Err(ProtocolError::Shape(format!("pair needs two distinct parties, got {holder1} twice")));
        }
        for h in [holder1, holder2] {
            if !crate::dist::Owner::from(h).is_honest() {
                return Err(ProtocolError::Shape(format!("{h} is not an honest party")));
            }
        }
        Ok(PairTarget {
            holder1: holder1.to_string(),
            holder2: holder2.to_string(),
        })
    }
}

impl std::fmt::Display for PairTarget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.holder1, self.holder2)
    }
}

/// The single register owned by `party`.
pub(crate) fn sole_register(d: &JointDistribution, party: &str) -> Result<String> {
    let owner = crate::dist::Owner::from(party);
    let owned: Vec<&str> = d
        .registers()
        .iter()
        .filter(|r| r.owner == owner)
        .map(|r| r.name.as_str())
        .collect();
    match owned.as_slice() {
        [one] if d.register(one)?.is_binary() => Ok(one.to_string()),
        [one] => Err(ProtocolError::Shape(format!("register {one} of {party} is not binary"))),
        _ => Err(ProtocolError::Shape(format!(
            "{party} should own exactly one register, owns {owned:?}"
        ))),
    }
}

#[cfg(test)]
mod tests;
