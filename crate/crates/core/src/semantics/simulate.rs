//! Seeded random execution of a session.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{session_enabled, CommAction};
use crate::session::Session;
use crate::store::Store;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    /// Every participant terminated.
    Final,
    /// No communication is possible but some participant has not terminated.
    Stuck,
    /// The step budget ran out while communications were still possible.
    StepLimit,
}

#[derive(Clone, Debug)]
pub struct Simulation {
    pub trace: Vec<CommAction>,
    pub final_session: Session,
    pub status: RunStatus,
}

/// Runs up to `steps` communications, choosing uniformly among the enabled
/// ones.
pub fn simulate(store: &Store, m: &Session, steps: usize, seed: u64) -> Simulation {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut current = m.clone();
    let mut trace = Vec::new();
    loop {
        let mut enabled = session_enabled(store, &current);
        if enabled.is_empty() {
            let status = if current.is_final(store) { RunStatus::Final } else { RunStatus::Stuck };
            return Simulation { trace, final_session: current, status };
        }
        if trace.len() == steps {
            return Simulation { trace, final_session: current, status: RunStatus::StepLimit };
        }
        let (action, next) = enabled.swap_remove(rng.gen_range(0..enabled.len()));
        trace.push(action);
        current = next;
    }
}
