//! Domain types shared by every phase of the caching system.

mod cache;
mod demand;
mod files;
mod params;
mod signature;
mod transcript;
mod users;

pub use cache::{CacheContents, CachedSet};
pub use demand::DemandVector;
pub use files::FileStore;
pub use params::{SystemParams, MAX_USERS};
pub use signature::{build_signatures, subfile, BitSignature};
pub use transcript::{Message, MessageKind, Transcript, LENGTH_FIELD_BITS, SEED_BITS};
pub use users::{delivery_order, LexSubsets, UserSet};
