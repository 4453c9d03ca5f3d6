//! Transition systems of sessions and global types.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;

use crate::names::{Label, Participant};
use crate::session::Session;
use crate::store::{GlobalNode, GlobalType, ProcNode, Store};

/// A synchronous communication: `sender` sends `label` to `receiver`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize)]
pub struct CommAction {
    pub sender: Participant,
    pub label: Label,
    pub receiver: Participant,
}

impl CommAction {
    pub fn new(sender: &str, label: &str, receiver: &str) -> Self {
        CommAction {
            sender: Participant::new(sender),
            label: Label::new(label),
            receiver: Participant::new(receiver),
        }
    }

    pub fn involves(&self, p: &Participant) -> bool {
        &self.sender == p || &self.receiver == p
    }
}

impl fmt::Display for CommAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -{}-> {}", self.sender, self.label, self.receiver)
    }
}

/// All communications a session can perform, sorted by action.
pub fn session_enabled(store: &Store, m: &Session) -> Vec<(CommAction, Session)> {
    let mut out = Vec::new();
    for (p, proc_) in m.iter() {
        let ProcNode::Output { peer: q, branches: outs } = store.process(proc_) else {
            continue;
        };
        let Some(partner) = m.get(q) else { continue };
        let ProcNode::Input { peer, branches: ins } = store.process(partner) else {
            continue;
        };
        if peer != p || !outs.labels_within(ins) {
            continue;
        }
        for (label, cont) in outs.iter() {
            let next = m.with_binding(p.clone(), cont).with_binding(q.clone(), ins.get(label).unwrap());
            out.push((
                CommAction { sender: p.clone(), label: label.clone(), receiver: q.clone() },
                next,
            ));
        }
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// All communications a global type can perform, either at its root or
/// ahead of it when independent of the root's participants.
pub fn global_enabled(store: &mut Store, g: GlobalType) -> Vec<(CommAction, GlobalType)> {
    let actions = enabled_actions(store, g);
    actions.into_iter().map(|a| {
        let next = step(store, g, &a);
        (a, next)
    }).collect()
}

fn root_actions(node: &GlobalNode) -> BTreeSet<CommAction> {
    match node {
        GlobalNode::End => BTreeSet::new(),
        GlobalNode::Comm { sender, receiver, branches } => branches
            .labels()
            .map(|l| CommAction { sender: sender.clone(), label: l.clone(), receiver: receiver.clone() })
            .collect(),
    }
}

/// Least fixpoint of the enabled-action sets over the nodes below `g`.
fn enabled_actions(store: &mut Store, g: GlobalType) -> BTreeSet<CommAction> {
    if let Some(a) = store.global_actions.get(&g) {
        return a.clone();
    }
    let nodes: Vec<GlobalType> = store
        .reachable_globals(g)
        .into_iter()
        .filter(|n| !store.global_actions.contains_key(n))
        .collect();
    let mut sets: HashMap<GlobalType, BTreeSet<CommAction>> = nodes.iter().map(|n| (*n, BTreeSet::new())).collect();
    let mut changed = true;
    while changed {
        changed = false;
        for &n in nodes.iter().rev() {
            let GlobalNode::Comm { sender, receiver, branches } = store.global(n) else { continue };
            let mut children = branches.targets().map(|c| sets.get(&c).or_else(|| store.global_actions.get(&c)).unwrap());
            let first = children.next().unwrap().clone();
            let common: BTreeSet<CommAction> = children.fold(first, |acc, s| acc.intersection(s).cloned().collect());
            let mut new = root_actions(store.global(n));
            new.extend(common.into_iter().filter(|a| !a.involves(sender) && !a.involves(receiver)));
            if new.len() != sets[&n].len() {
                sets.insert(n, new);
                changed = true;
            }
        }
    }
    store.global_actions.extend(sets);
    store.global_actions[&g].clone()
}

/// The successor of `g` under an enabled action.
fn step(store: &mut Store, g: GlobalType, a: &CommAction) -> GlobalType {
    if let Some(&n) = store.global_steps.get(&(g, a.clone())) {
        return n;
    }
    let GlobalNode::Comm { sender, receiver, branches } = store.global(g).clone() else {
        unreachable!("terminated global type has no actions");
    };
    let next = if sender == a.sender && receiver == a.receiver {
        branches.get(&a.label).expect("enabled label")
    } else {
        // Independent action, enabled under every branch.
        let stepped: Vec<_> = branches.iter().map(|(l, c)| (l.clone(), c)).collect();
        let stepped: Vec<_> = stepped.into_iter().map(|(l, c)| (l, step(store, c, a))).collect();
        store.comm(sender, receiver, stepped).expect("rebuilt node keeps its shape")
    };
    store.global_steps.insert((g, a.clone()), next);
    next
}
