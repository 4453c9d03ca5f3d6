//! Depth of the first occurrence of a participant along the paths of a
//! global type.

use std::collections::HashMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::names::Participant;
use crate::store::{GlobalType, Store};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DepthValue {
    Finite(u64),
    Infinite,
}

impl DepthValue {
    pub fn is_finite(self) -> bool {
        matches!(self, DepthValue::Finite(_))
    }

    pub fn succ(self) -> DepthValue {
        match self {
            DepthValue::Finite(n) => DepthValue::Finite(n + 1),
            DepthValue::Infinite => DepthValue::Infinite,
        }
    }
}

impl fmt::Display for DepthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DepthValue::Finite(n) => write!(f, "{n}"),
            DepthValue::Infinite => f.write_str("inf"),
        }
    }
}

impl Serialize for DepthValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            DepthValue::Finite(n) => s.serialize_u64(*n),
            DepthValue::Infinite => s.serialize_str("inf"),
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mark {
    Active,
    Done(u64),
}

/// The maximum, over paths containing `p`, of the number of communications
/// preceding the first one involving `p`; 0 if `p` does not occur.
pub fn depth(store: &Store, g: GlobalType, p: &Participant) -> DepthValue {
    let nodes = store.reachable_globals(g);
    if !nodes.iter().any(|&n| store.global(n).involves(p)) {
        return DepthValue::Finite(0);
    }
    // Which nodes can reach `p` at all; communications below them that
    // never mention `p` do not contribute paths.
    let mut reaches: HashMap<GlobalType, bool> = HashMap::new();
    for &n in nodes.iter().rev() {
        reaches.entry(n).or_insert(false);
    }
    let mut changed = true;
    while changed {
        changed = false;
        for &n in &nodes {
            if reaches[&n] {
                continue;
            }
            let node = store.global(n);
            let r = node.involves(p) || node.branches().is_some_and(|b| b.targets().any(|c| reaches[&c]));
            if r {
                reaches.insert(n, true);
                changed = true;
            }
        }
    }
    let mut marks: HashMap<GlobalType, Mark> = HashMap::new();
    match longest(store, g, p, &reaches, &mut marks) {
        Some(d) => DepthValue::Finite(d),
        None => DepthValue::Infinite,
    }
}

/// Longest prefix avoiding `p` below `n`, or `None` when a cycle avoiding
/// `p` can still reach `p`.
fn longest(
    store: &Store,
    n: GlobalType,
    p: &Participant,
    reaches: &HashMap<GlobalType, bool>,
    marks: &mut HashMap<GlobalType, Mark>,
) -> Option<u64> {
    let node = store.global(n);
    if node.involves(p) {
        return Some(0);
    }
    match marks.get(&n) {
        Some(Mark::Active) => return None,
        Some(Mark::Done(d)) => return Some(*d),
        None => {}
    }
    marks.insert(n, Mark::Active);
    let mut best = 0;
    for c in node.branches().into_iter().flat_map(|b| b.targets()) {
        if reaches[&c] {
            best = best.max(longest(store, c, p, reaches, marks)? + 1);
        }
    }
    marks.insert(n, Mark::Done(best));
    Some(best)
}
