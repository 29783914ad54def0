//! Protocol engine: round schedule, packets, node-failure injection and
//! end-to-end session runs.

pub mod schedule;
mod session;

pub use schedule::{protection_window, schedule_rounds, session_length, Round, RoundPlan};
pub use session::{
    classify_failure_case, inject_node_failure, make_packets, run_session, DataSource, FailureCase,
    FailureScenario, Packet, PacketKind, RecoveryStatus, RoundRecord, RoundTag, SessionReport, SourceId,
};
