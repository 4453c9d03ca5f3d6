//! Well-formedness and the typing judgement for sessions.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use super::{depth, leq, leq_plus, project, DepthValue, ProjectionError};
use crate::names::Participant;
use crate::parser::print_process;
use crate::session::Session;
use crate::store::{GlobalType, Process, Store};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum TypingMode {
    /// Outputs must match the projection exactly.
    #[default]
    Standard,
    /// Outputs may be a subset of the projection's.
    Plus,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParticipantCheck {
    pub participant: Participant,
    pub depth: DepthValue,
    pub projection: Result<Process, ProjectionError>,
}

impl ParticipantCheck {
    pub fn ok(&self) -> bool {
        self.depth.is_finite() && self.projection.is_ok()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WellFormedReport {
    pub ok: bool,
    pub participants: Vec<ParticipantCheck>,
}

impl WellFormedReport {
    pub fn to_json(&self, store: &Store) -> serde_json::Value {
        let entries: Vec<_> = self
            .participants
            .iter()
            .map(|c| {
                serde_json::json!({
                    "participant": c.participant,
                    "depth": c.depth,
                    "projection": match &c.projection {
                        Ok(p) => serde_json::json!({ "ok": print_process(store, *p) }),
                        Err(e) => serde_json::json!({ "error": e.reason, "global_node": e.global_node.index() }),
                    },
                })
            })
            .collect();
        serde_json::json!({ "ok": self.ok, "participants": entries })
    }
}

/// Every participant has finite depth and a defined projection.
pub fn well_formed(store: &mut Store, g: GlobalType) -> WellFormedReport {
    let participants: Vec<ParticipantCheck> = store
        .participants_of_global(g)
        .into_iter()
        .map(|p| ParticipantCheck {
            depth: depth(store, g, &p),
            projection: project(store, g, &p),
            participant: p,
        })
        .collect();
    WellFormedReport { ok: participants.iter().all(ParticipantCheck::ok), participants }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypingFailure {
    pub participant: Participant,
    pub expected: Process,
    pub actual: Process,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TypingReport {
    pub ok: bool,
    pub failures: Vec<TypingFailure>,
    pub missing: BTreeSet<Participant>,
}

#[derive(Serialize)]
struct FailureView {
    participant: Participant,
    expected: String,
    actual: String,
}

impl TypingReport {
    pub fn to_json(&self, store: &Store) -> serde_json::Value {
        let failures: Vec<_> = self
            .failures
            .iter()
            .map(|f| FailureView {
                participant: f.participant.clone(),
                expected: print_process(store, f.expected),
                actual: print_process(store, f.actual),
            })
            .collect();
        serde_json::json!({ "ok": self.ok, "failures": failures, "missing": self.missing })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TypingError {
    #[error("global type is not well formed")]
    IllFormedGlobalType(WellFormedReport),
}

/// Checks that each bound process refines the projection of `g` onto its
/// participant and that every participant of `g` is bound.
pub fn typecheck(store: &mut Store, m: &Session, g: GlobalType, mode: TypingMode) -> Result<TypingReport, TypingError> {
    let wf = well_formed(store, g);
    if !wf.ok {
        return Err(TypingError::IllFormedGlobalType(wf));
    }
    Ok(typing_rule(store, m, g, mode).expect("well-formed types project"))
}

/// The premises of the typing rule alone, without requiring `g` to be well
/// formed. Fails only if some needed projection is undefined.
pub fn typing_rule(
    store: &mut Store,
    m: &Session,
    g: GlobalType,
    mode: TypingMode,
) -> Result<TypingReport, ProjectionError> {
    let mut failures = Vec::new();
    for (p, actual) in m.iter() {
        let expected = project(store, g, p)?;
        let holds = match mode {
            TypingMode::Standard => leq(store, actual, expected),
            TypingMode::Plus => leq_plus(store, actual, expected),
        };
        if !holds {
            failures.push(TypingFailure { participant: p.clone(), expected, actual });
        }
    }
    for p in store.participants_of_global(g) {
        project(store, g, &p)?;
    }
    let bound = m.participants();
    let missing: BTreeSet<Participant> = store.participants_of_global(g).difference(&bound).cloned().collect();
    Ok(TypingReport { ok: failures.is_empty() && missing.is_empty(), failures, missing })
}
