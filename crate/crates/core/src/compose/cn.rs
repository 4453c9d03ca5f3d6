//! Connection of two global types through a pair of interface participants.

use std::collections::HashMap;
use std::fmt;

use super::{compatible, ComposeError};
use crate::names::{Label, Participant};
use crate::store::{Draft, GlobalDraft, GlobalNode, GlobalType, Store};
use crate::typing::project;

/// What the connection is waiting for.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum StarMarker {
    /// Nothing pending.
    Hash,
    /// `h` received the label; `k` must send it next.
    FwdLabel(Label),
    /// `k` received the label; `h` must send it next.
    BwdLabel(Label),
}

impl fmt::Display for StarMarker {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StarMarker::Hash => f.write_str("#"),
            StarMarker::FwdLabel(l) => write!(f, "{l}->"),
            StarMarker::BwdLabel(l) => write!(f, "{l}<-"),
        }
    }
}

/// One call of the connection function. `h` belongs to `left` and `k` to
/// `right`; `swapped` records whether the roles are reversed with respect
/// to the initial call.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct CnKey {
    pub h: Participant,
    pub k: Participant,
    pub star: StarMarker,
    pub left: GlobalType,
    pub right: GlobalType,
    pub swapped: bool,
}

impl fmt::Display for CnKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "CN({}, {}, {}, node {}, node {})",
            self.h,
            self.k,
            self.star,
            self.left.index(),
            self.right.index()
        )
    }
}

/// Order in which the clauses are tried when nothing is pending.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ClauseOrder {
    /// Clauses inspecting the left type (end, input to `h`, independent
    /// communication) before those inspecting the right type.
    #[default]
    LeftFirst,
    /// Clauses in their numbered order: end, input to `h`, input to `k`,
    /// independent left communication, independent right communication.
    Numbered,
}

/// Disjoint participants and compatible interface projections.
pub fn compatible_globals(
    store: &mut Store,
    g: GlobalType,
    h: &Participant,
    g2: GlobalType,
    k: &Participant,
) -> Result<bool, ComposeError> {
    if !store.participants_of_global(g).is_disjoint(&store.participants_of_global(g2)) {
        return Ok(false);
    }
    let a = project(store, g, h)?;
    let b = project(store, g2, k)?;
    Ok(compatible(store, a, b))
}

pub fn connect_globals(
    store: &mut Store,
    g: GlobalType,
    h: &Participant,
    g2: GlobalType,
    k: &Participant,
) -> Result<GlobalType, ComposeError> {
    connect_globals_with(store, g, h, g2, k, ClauseOrder::default())
}

pub fn connect_globals_with(
    store: &mut Store,
    g: GlobalType,
    h: &Participant,
    g2: GlobalType,
    k: &Participant,
    order: ClauseOrder,
) -> Result<GlobalType, ComposeError> {
    if !compatible_globals(store, g, h, g2, k)? {
        return Err(ComposeError::IncompatibleGlobals { h: h.clone(), k: k.clone() });
    }
    let root = CnKey { h: h.clone(), k: k.clone(), star: StarMarker::Hash, left: g, right: g2, swapped: false };
    Connector { store, order, index: HashMap::new(), drafts: Vec::new(), pending: Vec::new() }.run(root)
}

struct Connector<'a> {
    store: &'a mut Store,
    order: ClauseOrder,
    index: HashMap<CnKey, usize>,
    drafts: Vec<GlobalDraft>,
    pending: Vec<CnKey>,
}

/// Sender, receiver and branches of a communication.
type Comm = (Participant, Participant, Vec<(Label, GlobalType)>);

fn comm(node: &GlobalNode) -> Option<Comm> {
    match node {
        GlobalNode::End => None,
        GlobalNode::Comm { sender, receiver, branches } => {
            Some((sender.clone(), receiver.clone(), branches.iter().map(|(l, c)| (l.clone(), c)).collect()))
        }
    }
}

impl Connector<'_> {
    fn run(mut self, root: CnKey) -> Result<GlobalType, ComposeError> {
        let top = self.call(root);
        while let Some(key) = self.pending.pop() {
            let slot = self.index[&key];
            self.drafts[slot] = self.expand(&key)?;
        }
        Ok(self.store.build_globals(&self.drafts).expect("every call emits a communication")[top])
    }

    /// Draft index standing for the result of a call.
    fn call(&mut self, key: CnKey) -> usize {
        if key.star == StarMarker::Hash && *self.store.global(key.left) == GlobalNode::End {
            self.drafts.push(Draft::Existing(key.right));
            return self.drafts.len() - 1;
        }
        if let Some(&i) = self.index.get(&key) {
            return i;
        }
        self.drafts.push(Draft::End);
        let i = self.drafts.len() - 1;
        self.index.insert(key.clone(), i);
        self.pending.push(key);
        i
    }

    fn node(&mut self, from: &Participant, to: &Participant, branches: Vec<(Label, usize)>) -> usize {
        self.drafts.push(Draft::Node { head: (from.clone(), to.clone()), branches });
        self.drafts.len() - 1
    }

    fn expand(&mut self, key: &CnKey) -> Result<GlobalDraft, ComposeError> {
        let left = comm(self.store.global(key.left));
        let right = comm(self.store.global(key.right));
        let (h, k) = (&key.h, &key.k);
        let outside = |p: &Participant| p != h && p != k;
        let with = |star: StarMarker, left: GlobalType, right: GlobalType| CnKey {
            h: h.clone(),
            k: k.clone(),
            star,
            left,
            right,
            swapped: key.swapped,
        };
        let flipped = |left: GlobalType, right: GlobalType| CnKey {
            h: k.clone(),
            k: h.clone(),
            star: StarMarker::Hash,
            left,
            right,
            swapped: !key.swapped,
        };
        let draft = |head: (Participant, Participant), branches| Draft::Node { head, branches };
        match &key.star {
            StarMarker::Hash => {
                let attempts: [u8; 4] = match self.order {
                    ClauseOrder::LeftFirst => [2, 8, 5, 9],
                    ClauseOrder::Numbered => [2, 5, 8, 9],
                };
                for clause in attempts {
                    match (clause, &left, &right) {
                        // p -> h : {l_i . G_i}  gives  p -> h : {l_i . CN(l_i->, G_i, G')}
                        (2, Some((p, q, bs)), _) if q == h && outside(p) => {
                            let kids = bs
                                .iter()
                                .map(|(l, c)| (l.clone(), self.call(with(StarMarker::FwdLabel(l.clone()), *c, key.right))))
                                .collect();
                            return Ok(draft((p.clone(), q.clone()), kids));
                        }
                        // r -> k : {l_j . G'_j}  gives  r -> k : {l_j . CN(l_j<-, G, G'_j)}
                        (5, _, Some((r, s, bs))) if s == k && outside(r) => {
                            let kids = bs
                                .iter()
                                .map(|(l, c)| (l.clone(), self.call(with(StarMarker::BwdLabel(l.clone()), key.left, *c))))
                                .collect();
                            return Ok(draft((r.clone(), s.clone()), kids));
                        }
                        (8, Some((p, q, bs)), _) if outside(p) && outside(q) => {
                            let kids = bs.iter().map(|(l, c)| (l.clone(), self.call(flipped(key.right, *c)))).collect();
                            return Ok(draft((p.clone(), q.clone()), kids));
                        }
                        (9, _, Some((r, s, bs))) if outside(r) && outside(s) => {
                            let kids = bs.iter().map(|(l, c)| (l.clone(), self.call(flipped(*c, key.left)))).collect();
                            return Ok(draft((r.clone(), s.clone()), kids));
                        }
                        _ => {}
                    }
                }
            }
            StarMarker::FwdLabel(label) => match &right {
                // k -> s : {.., l . G'_l, ..}  gives  h -> k : l . k -> s : l . CN(#, G, G'_l)
                Some((r, s, bs)) if r == k && outside(s) => {
                    if let Some((_, c)) = bs.iter().find(|(l, _)| l == label) {
                        let rest = self.call(with(StarMarker::Hash, key.left, *c));
                        let relay = self.node(k, s, vec![(label.clone(), rest)]);
                        return Ok(draft((h.clone(), k.clone()), vec![(label.clone(), relay)]));
                    }
                }
                Some((r, s, bs)) if outside(r) && outside(s) => {
                    let kids = bs
                        .iter()
                        .map(|(l, c)| (l.clone(), self.call(with(key.star.clone(), key.left, *c))))
                        .collect();
                    return Ok(draft((r.clone(), s.clone()), kids));
                }
                _ => {}
            },
            StarMarker::BwdLabel(label) => match &left {
                // h -> q : {.., l . G_l, ..}  gives  k -> h : l . h -> q : l . CN(#, G_l, G')
                Some((p, q, bs)) if p == h && outside(q) => {
                    if let Some((_, c)) = bs.iter().find(|(l, _)| l == label) {
                        let rest = self.call(with(StarMarker::Hash, *c, key.right));
                        let relay = self.node(h, q, vec![(label.clone(), rest)]);
                        return Ok(draft((k.clone(), h.clone()), vec![(label.clone(), relay)]));
                    }
                }
                Some((p, q, bs)) if outside(p) && outside(q) => {
                    let kids = bs
                        .iter()
                        .map(|(l, c)| (l.clone(), self.call(with(key.star.clone(), *c, key.right))))
                        .collect();
                    return Ok(draft((p.clone(), q.clone()), kids));
                }
                _ => {}
            },
        }
        Err(ComposeError::NoClauseApplies(key.clone()))
    }
}
