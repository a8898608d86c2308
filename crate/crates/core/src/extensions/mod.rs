//! Variations on the basic shared-link setting.

pub mod asynchronous;
pub mod shared;

pub use asynchronous::{
    parse_arrivals_csv, schedule_async, segment_params, segment_placement, verify_async_decode, Arrival,
    AsyncSchedule, AsyncVerify, Round, RoundEntry,
};
pub use shared::{simulate_shared, verify_shared, SharedConfig, SharedRun};
