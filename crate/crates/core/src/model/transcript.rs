use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::model::UserSet;

/// Bits of metadata charged per coded message besides its target subset.
pub const LENGTH_FIELD_BITS: u64 = 32;
/// Bits charged per cache for announcing its placement seed.
pub const SEED_BITS: u64 = 64;

/// What a server message is and whom it is for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum MessageKind {
    /// XOR of zero-padded subfiles `V_{k, S\{k}}` over `k` in `subset`.
    Coded { subset: UserSet },
    /// One binary linear combination of the bits of `file`.
    FileCombo { file: usize, coefficients: BitString },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub kind: MessageKind,
    pub payload: BitString,
}

/// Everything the server broadcasts in one delivery phase.
///
/// Only payload bits count toward the rate; `header_bits` records the
/// metadata (subsets, lengths, coefficients, seeds) separately.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Transcript {
    pub messages: Vec<Message>,
    pub header_bits: u64,
    pub file_bits: usize,
}

impl Transcript {
    pub fn new(file_bits: usize) -> Self {
        Self {
            messages: Vec::new(),
            header_bits: 0,
            file_bits,
        }
    }

    pub fn payload_bits(&self) -> u64 {
        self.messages.iter().map(|m| m.payload.len() as u64).sum()
    }

    /// Payload bits normalized by the file size.
    pub fn rate(&self) -> f64 {
        self.payload_bits() as f64 / self.file_bits as f64
    }

    pub fn len(&self) -> usize {
        self.messages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.messages.is_empty()
    }

    pub fn coded_count(&self) -> usize {
        self.messages
            .iter()
            .filter(|m| matches!(m.kind, MessageKind::Coded { .. }))
            .count()
    }

    /// Number of file-combination messages for file `n`.
    pub fn combos_for(&self, n: usize) -> usize {
        self.messages
            .iter()
            .filter(|m| matches!(m.kind, MessageKind::FileCombo { file, .. } if file == n))
            .count()
    }
}
