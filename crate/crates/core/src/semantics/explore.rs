//! Exhaustive exploration of the session state space and the lock-freedom
//! check.

use std::collections::{HashMap, VecDeque};

use serde::Serialize;
use thiserror::Error;

use super::{session_enabled, CommAction};
use crate::names::Participant;
use crate::parser::print_session;
use crate::session::{normalize_session, Session};
use crate::store::{Process, Store};

pub const DEFAULT_STATE_BOUND: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExploreOptions {
    pub max_states: usize,
}

impl Default for ExploreOptions {
    fn default() -> Self {
        ExploreOptions { max_states: DEFAULT_STATE_BOUND }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ExploreError {
    #[error("state space exceeds {bound} states")]
    StateSpaceBoundExceeded { bound: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub from: usize,
    pub action: CommAction,
    pub to: usize,
}

/// Reachable states in breadth-first order; state 0 is the initial one.
#[derive(Clone, Debug)]
pub struct StateGraph {
    pub states: Vec<Session>,
    pub edges: Vec<Edge>,
    /// Index into `edges` of the edge that first reached each state.
    discovered_by: Vec<Option<usize>>,
}

impl StateGraph {
    pub fn initial(&self) -> usize {
        0
    }

    /// Shortest action sequence from the initial state.
    pub fn path_to(&self, mut state: usize) -> Vec<CommAction> {
        let mut path = Vec::new();
        while let Some(e) = self.discovered_by[state] {
            path.push(self.edges[e].action.clone());
            state = self.edges[e].from;
        }
        path.reverse();
        path
    }

    pub fn to_dot(&self, store: &Store) -> String {
        let mut out = String::from("digraph states {\n");
        for (i, s) in self.states.iter().enumerate() {
            let label = if s.is_empty() { "terminated".to_string() } else { print_session(store, s) };
            let label = label.replace('\\', "\\\\").replace('"', "\\\"").replace('\n', "\\l");
            out.push_str(&format!("  s{i} [shape=box, label=\"{label}\\l\"];\n"));
        }
        for e in &self.edges {
            let a = &e.action;
            out.push_str(&format!(
                "  s{} -> s{} [label=\"{}:{}\u{2192}{}\"];\n",
                e.from, e.to, a.sender, a.label, a.receiver
            ));
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self, store: &Store) -> serde_json::Value {
        let states: Vec<String> = self.states.iter().map(|s| print_session(store, s)).collect();
        serde_json::json!({ "initial": self.initial(), "states": states, "edges": self.edges })
    }
}

fn key(m: &Session) -> Vec<(Participant, Process)> {
    m.iter().map(|(p, q)| (p.clone(), q)).collect()
}

/// All states reachable from `m`, each normalized by dropping terminated
/// participants.
pub fn explore(store: &Store, m: &Session, opts: &ExploreOptions) -> Result<StateGraph, ExploreError> {
    let start = normalize_session(store, m);
    let mut index = HashMap::from([(key(&start), 0usize)]);
    let mut graph = StateGraph { states: vec![start], edges: Vec::new(), discovered_by: vec![None] };
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for (action, next) in session_enabled(store, &graph.states[i]) {
            let next = normalize_session(store, &next);
            let k = key(&next);
            let j = match index.get(&k) {
                Some(&j) => j,
                None => {
                    if graph.states.len() >= opts.max_states {
                        return Err(ExploreError::StateSpaceBoundExceeded { bound: opts.max_states });
                    }
                    let j = graph.states.len();
                    index.insert(k, j);
                    graph.states.push(next);
                    graph.discovered_by.push(Some(graph.edges.len()));
                    queue.push_back(j);
                    j
                }
            };
            graph.edges.push(Edge { from: i, action, to: j });
        }
    }
    Ok(graph)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Starvation {
    pub path: Vec<CommAction>,
    pub participant: Participant,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LockReport {
    pub ok: bool,
    /// Path to a state that cannot move although some participant has not
    /// terminated.
    pub deadlock_witness: Option<Vec<CommAction>>,
    /// Path to a state from which a waiting participant can never
    /// communicate again.
    pub starvation_witness: Option<Starvation>,
    pub states: usize,
    pub transitions: usize,
}

pub fn lock_free(store: &Store, m: &Session, opts: &ExploreOptions) -> Result<LockReport, ExploreError> {
    Ok(lock_report(&explore(store, m, opts)?))
}

pub fn lock_report(graph: &StateGraph) -> LockReport {
    let n = graph.states.len();
    let mut outgoing = vec![0usize; n];
    let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in &graph.edges {
        outgoing[e.from] += 1;
        incoming[e.to].push(e.from);
    }
    let deadlock_witness = (0..n)
        .find(|&i| outgoing[i] == 0 && !graph.states[i].is_empty())
        .map(|i| graph.path_to(i));

    let mut can_reach: HashMap<Participant, Vec<bool>> = HashMap::new();
    let mut starvation_witness = None;
    'states: for (i, state) in graph.states.iter().enumerate() {
        for (p, _) in state.iter() {
            let reach = can_reach.entry(p.clone()).or_insert_with(|| {
                // States from which some edge involving p is reachable.
                let mut mark = vec![false; n];
                let mut stack: Vec<usize> =
                    graph.edges.iter().filter(|e| e.action.involves(p)).map(|e| e.from).collect();
                while let Some(s) = stack.pop() {
                    if !mark[s] {
                        mark[s] = true;
                        stack.extend(incoming[s].iter().copied().filter(|t| !mark[*t]));
                    }
                }
                mark
            });
            if !reach[i] {
                starvation_witness = Some(Starvation { path: graph.path_to(i), participant: p.clone() });
                break 'states;
            }
        }
    }
    LockReport {
        ok: deadlock_witness.is_none() && starvation_witness.is_none(),
        deadlock_witness,
        starvation_witness,
        states: n,
        transitions: graph.edges.len(),
    }
}
