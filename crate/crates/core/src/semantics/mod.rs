//! Transition systems, simulation, exhaustive exploration and the
//! lock-freedom check.

mod explore;
mod fidelity;
mod lts;
mod simulate;

pub use explore::{
    explore, lock_free, lock_report, Edge, ExploreError, ExploreOptions, LockReport, Starvation, StateGraph,
    DEFAULT_STATE_BOUND,
};
pub use fidelity::{fidelity_harness, prune_to_session, Divergence, FidelityError, FidelityFailure, FidelityVerdict};
pub use lts::{global_enabled, session_enabled, CommAction};
pub use simulate::{simulate, RunStatus, Simulation};
