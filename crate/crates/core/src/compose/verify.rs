//! End-to-end check of a connection: both compositions, typing of the
//! result, the projection inequalities and the depth bound.

use serde::Serialize;

use super::{connect_globals, connect_sessions, gateway, ComposeError};
use crate::names::Participant;
use crate::parser::{print_global, print_session};
use crate::session::Session;
use crate::store::{GlobalType, Process, Store};
use crate::typing::{depth, leq, project, typecheck, DepthValue, TypingMode, TypingReport};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProjectionCheck {
    pub participant: Participant,
    pub holds: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DepthBound {
    /// Twice the sum of the largest depths in the two components.
    pub bound: DepthValue,
    /// Largest depth in the composed type.
    pub max_depth: DepthValue,
    pub holds: bool,
}

#[derive(Clone, Debug)]
pub struct ConnectionReport {
    pub composed_session: Session,
    pub composed_global: GlobalType,
    pub typing: TypingReport,
    pub projection_checks: Vec<ProjectionCheck>,
    pub depth_bound: DepthBound,
}

impl ConnectionReport {
    /// Composed typing and every projection check; the depth bound is
    /// reported separately.
    pub fn ok(&self) -> bool {
        self.typing.ok && self.projection_checks.iter().all(|c| c.holds)
    }

    pub fn to_json(&self, store: &Store) -> serde_json::Value {
        serde_json::json!({
            "ok": self.ok(),
            "composed_session": print_session(store, &self.composed_session),
            "composed_global": print_global(store, self.composed_global),
            "typing": self.typing.to_json(store),
            "projection_checks": self.projection_checks,
            "depth_bound": self.depth_bound,
        })
    }
}

/// Largest depth of any participant of `g`.
pub fn max_depth(store: &Store, g: GlobalType) -> DepthValue {
    store
        .participants_of_global(g)
        .iter()
        .map(|p| depth(store, g, p))
        .max()
        .unwrap_or(DepthValue::Finite(0))
}

#[allow(clippy::too_many_arguments)]
pub fn verify_connection(
    store: &mut Store,
    m: &Session,
    g: GlobalType,
    m2: &Session,
    g2: GlobalType,
    h: &Participant,
    k: &Participant,
    mode: TypingMode,
) -> Result<ConnectionReport, ComposeError> {
    for (session, global) in [(m, g), (m2, g2)] {
        let report = typecheck(store, session, global, mode)?;
        if !report.ok {
            return Err(ComposeError::UntypedComponent(report));
        }
    }
    let composed_session = connect_sessions(store, m, h, m2, k)?;
    let composed_global = connect_globals(store, g, h, g2, k)?;
    let typing = match typecheck(store, &composed_session, composed_global, mode) {
        Ok(r) => r,
        Err(_) => TypingReport {
            ok: false,
            failures: Vec::new(),
            missing: Default::default(),
        },
    };

    let mut projection_checks = Vec::new();
    let mut check = |store: &mut Store, who: &Participant, expected_below: Process| {
        let holds = match project(store, composed_global, who) {
            Ok(actual) => leq(store, expected_below, actual),
            Err(_) => false,
        };
        projection_checks.push(ProjectionCheck { participant: who.clone(), holds });
    };
    let gh = project(store, g, h)?;
    let gh = gateway(store, gh, k)?;
    check(store, h, gh);
    let gk = project(store, g2, k)?;
    let gk = gateway(store, gk, h)?;
    check(store, k, gk);
    for (global, iface) in [(g, h), (g2, k)] {
        for p in store.participants_of_global(global) {
            if &p != iface {
                let local = project(store, global, &p)?;
                check(store, &p, local);
            }
        }
    }

    let bound = match (max_depth(store, g), max_depth(store, g2)) {
        (DepthValue::Finite(a), DepthValue::Finite(b)) => DepthValue::Finite(2 * (a + b)),
        _ => DepthValue::Infinite,
    };
    let composed_depth = max_depth(store, composed_global);
    let depth_bound = DepthBound { bound, max_depth: composed_depth, holds: composed_depth <= bound };

    Ok(ConnectionReport { composed_session, composed_global, typing, projection_checks, depth_bound })
}
