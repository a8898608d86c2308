//! Decentralized coded caching.
//!
//! A server holds `N` files of `F` bits; `K` users each cache `MF` bits.
//! During placement every user independently stores a random `MF/N`-bit
//! subset of each file. During delivery the server broadcasts XORs of
//! subfiles so that a single message serves several users at once, or,
//! when memory is scarce, random linear combinations of each requested
//! file.
//!
//! This crate simulates both phases bit-exactly ([`placement`],
//! [`delivery`]), checks every user's reconstruction ([`decode`]), routes
//! deliveries over trees ([`tree`]), covers shared caches and
//! asynchronous requests ([`extensions`]), and evaluates the closed-form
//! rates and bounds they are measured against ([`analytics`]).

pub mod analytics;
pub mod bits;
pub mod decode;
pub mod delivery;
pub mod error;
pub mod extensions;
pub mod gf2;
pub mod model;
pub mod placement;
pub mod tree;

pub use bits::BitString;
pub use decode::{decode_user, reconstruct_placement, verify_all, LocalCache, VerifyReport};
pub use delivery::{
    coded_delivery, deliver, deliver_limited, rlc_delivery, worst_case_rate, DeliveryChoice,
    DemandStrategy,
};
pub use error::{DecodeError, Error, Result};
pub use model::{
    build_signatures, subfile, BitSignature, CacheContents, DemandVector, FileStore, Message,
    MessageKind, SystemParams, Transcript, UserSet,
};
pub use placement::{decentralized_place, user_seed};
pub use tree::{descendant_leaves, route_transcript, verify_tree_decode, TreeNetwork};
