//! Co-exploration of a typed session and its global type.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;
use thiserror::Error;

use super::{global_enabled, session_enabled, CommAction, ExploreOptions};
use crate::names::Participant;
use crate::session::{normalize_session, Session};
use crate::store::{GlobalDraft, Draft, GlobalNode, GlobalType, ProcNode, Process, Store};
use crate::typing::{project, typecheck, typing_rule, TypingError, TypingMode, TypingReport};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "action", rename_all = "snake_case")]
pub enum Divergence {
    /// The session can perform an action the global type cannot.
    SessionActionUnmatched(CommAction),
    /// The global type can perform an action the session cannot.
    GlobalActionUnmatched(CommAction),
    /// Both perform the action but the successors no longer satisfy the
    /// premises of the typing rule.
    SuccessorUntypable(CommAction),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FidelityFailure {
    /// Actions leading to the pair where the divergence occurs.
    pub trace: Vec<CommAction>,
    pub divergence: Divergence,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum FidelityVerdict {
    Pass { pairs: usize },
    Fail(FidelityFailure),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum FidelityError {
    #[error("the session is not typed by the global type")]
    NotTyped(TypingReport),
    #[error(transparent)]
    Typing(#[from] TypingError),
    #[error("more than {0} session/global pairs")]
    BoundExceeded(usize),
}

type PairKey = (Vec<(Participant, Process)>, GlobalType);

fn pair_key(store: &Store, m: &Session, g: GlobalType) -> PairKey {
    let n = normalize_session(store, m);
    (n.iter().map(|(p, q)| (p.clone(), q)).collect(), g)
}

/// Pairs already visited. Global types are compared through their
/// projections up to bisimilarity: stepping an independent communication
/// inside a cycle unfolds the cycle, so the reachable global types of a
/// regular type need not be finitely many, while their projections are.
type Assignment = Vec<(Participant, Process)>;

#[derive(Default)]
struct Visited {
    buckets: HashMap<Assignment, Vec<Assignment>>,
}

impl Visited {
    /// Records the pair and returns whether it was new.
    fn insert(&mut self, store: &mut Store, m: &Session, g: GlobalType) -> bool {
        let (session, _) = pair_key(store, m, g);
        let projections: Vec<(Participant, Process)> = store
            .participants_of_global(g)
            .into_iter()
            .map(|p| {
                let q = project(store, g, &p).expect("successors are projectable");
                (p, q)
            })
            .collect();
        let bucket = self.buckets.entry(session).or_default();
        let known = bucket.iter().any(|other| {
            other.len() == projections.len()
                && other.iter().zip(&projections).all(|((p, a), (q, b))| p == q && store.bisim_process(*a, *b))
        });
        if !known {
            bucket.push(projections);
        }
        !known
    }
}

/// Checks, at every reachable pair, that session and global type offer the
/// same actions and that successors stay typed.
pub fn fidelity_harness(
    store: &mut Store,
    m: &Session,
    g: GlobalType,
    mode: TypingMode,
    opts: &ExploreOptions,
) -> Result<FidelityVerdict, FidelityError> {
    let report = typecheck(store, m, g, mode)?;
    if !report.ok {
        return Err(FidelityError::NotTyped(report));
    }
    let mut seen = Visited::default();
    seen.insert(store, m, g);
    // (session, global, parent pair, action from parent)
    let mut pairs: Vec<Pair> = vec![(m.clone(), g, None)];
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let (session, global) = (pairs[i].0.clone(), pairs[i].1);
        let local = session_enabled(store, &session);
        let remote = global_enabled(store, global);
        for (a, next_session) in local.iter() {
            let Some((_, next_global)) = remote.iter().find(|(b, _)| b == a) else {
                return Ok(fail(trace_to(&pairs, i), Divergence::SessionActionUnmatched(a.clone())));
            };
            let retyped = typing_rule(store, next_session, *next_global, mode).map(|r| r.ok).unwrap_or(false);
            if !retyped {
                return Ok(fail(trace_to(&pairs, i), Divergence::SuccessorUntypable(a.clone())));
            }
            if seen.insert(store, next_session, *next_global) {
                if pairs.len() >= opts.max_states {
                    return Err(FidelityError::BoundExceeded(opts.max_states));
                }
                pairs.push((next_session.clone(), *next_global, Some((i, a.clone()))));
                queue.push_back(pairs.len() - 1);
            }
        }
        if let Some((b, _)) = remote.iter().find(|(b, _)| !local.iter().any(|(a, _)| a == b)) {
            return Ok(fail(trace_to(&pairs, i), Divergence::GlobalActionUnmatched(b.clone())));
        }
    }
    Ok(FidelityVerdict::Pass { pairs: pairs.len() })
}

type Pair = (Session, GlobalType, Option<(usize, CommAction)>);

fn trace_to(pairs: &[Pair], mut cur: usize) -> Vec<CommAction> {
    let mut t = Vec::new();
    while let Some((parent, a)) = &pairs[cur].2 {
        t.push(a.clone());
        cur = *parent;
    }
    t.reverse();
    t
}

fn fail(trace: Vec<CommAction>, divergence: Divergence) -> FidelityVerdict {
    FidelityVerdict::Fail(FidelityFailure { trace, divergence })
}

/// For a session typed with subset outputs, prunes from `g` every branch
/// the session never takes. Returns `None` if the root sender of some
/// reachable node does not output to its receiver.
pub fn prune_to_session(store: &mut Store, m: &Session, g: GlobalType) -> Option<GlobalType> {
    let mut index: HashMap<PairKey, usize> = HashMap::new();
    let mut drafts: Vec<GlobalDraft> = Vec::new();
    let mut pending: Vec<(Session, GlobalType, usize)> = Vec::new();
    index.insert(pair_key(store, m, g), 0);
    drafts.push(Draft::End);
    pending.push((m.clone(), g, 0));
    while let Some((session, global, slot)) = pending.pop() {
        let GlobalNode::Comm { sender, receiver, branches } = store.global(global).clone() else {
            continue;
        };
        let ProcNode::Output { peer, branches: outs } = store.process(session.get(&sender)?).clone() else {
            return None;
        };
        let ProcNode::Input { branches: ins, .. } = store.process(session.get(&receiver)?).clone() else {
            return None;
        };
        if peer != receiver {
            return None;
        }
        let mut kids = Vec::new();
        for (label, cont) in outs.iter() {
            let next_global = branches.get(label)?;
            let next = session.with_binding(sender.clone(), cont).with_binding(receiver.clone(), ins.get(label)?);
            let k = pair_key(store, &next, next_global);
            let j = *index.entry(k).or_insert_with(|| {
                drafts.push(Draft::End);
                pending.push((next, next_global, drafts.len() - 1));
                drafts.len() - 1
            });
            kids.push((label.clone(), j));
        }
        drafts[slot] = Draft::Node { head: (sender, receiver), branches: kids };
    }
    Some(store.build_globals(&drafts).expect("no aliases")[0])
}
