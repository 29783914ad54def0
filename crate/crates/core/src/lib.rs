//! Network-coding protection of `n` link-disjoint connections against the
//! failure of any single relay node.
//!
//! Each round, `t` of the connections carry linear combinations (over a
//! finite field) of the plain units sent on the other `n - t`. The
//! protection duty rotates so every connection gives up the same share of
//! capacity, and the receivers can rebuild up to `t` lost plain units per
//! round from the coded ones. Normalized capacity is `(n - t) / n` whether
//! or not a failure occurs.
//!
//! Modules:
//! - [`gfield`]: GF(p^r) arithmetic and Gaussian elimination.
//! - [`topology`]: the network, relay degrees and capacity accounting.
//! - [`protcode`]: coefficient matrix, encoding, decoding, recoverability.
//! - [`npsim`]: schedule, packets, failure injection and session runs.
//! - [`scenario`] and [`harness`]: scenario files and batch drivers.

pub mod error;
pub mod fixtures;
pub mod gfield;
pub mod harness;
pub mod npsim;
pub mod protcode;
pub mod scenario;
pub mod topology;

pub use error::{Error, Result};
pub use gfield::{gaussian_solve, FieldElement, FieldSpec};
pub use npsim::{
    classify_failure_case, inject_node_failure, make_packets, run_session, schedule_rounds, DataSource,
    FailureCase, FailureScenario, Packet, PacketKind, RoundPlan, SessionReport,
};
pub use protcode::{
    build_coefficient_matrix, decode, encode_round, field_size_bounds, verify_recoverability, Convention,
    ProtectionMatrix, RecoverabilityReport,
};
pub use scenario::{parse_scenario, Scenario};
pub use topology::{normalized_capacity, Network, NetworkSpec, PathActivity};

pub use num_rational::Ratio;
