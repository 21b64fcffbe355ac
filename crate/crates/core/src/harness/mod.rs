//! Configuration, caching, cross-checks and reports for the command-line
//! tool.

pub mod cache;
pub mod config;
pub mod report;
pub mod verify;

pub use cache::{decode_entry, load_parts, load_setup, Cache, CacheKey, CacheStats, CACHE_ENV};
pub use config::{Fault, RunConfig};
pub use report::{compare_status, exit_code, Check, Status, Totals, VerificationReport};
pub use verify::{apply_fault, verify_all};
