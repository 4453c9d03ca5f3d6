//! Interned regular trees for processes and global types.
//!
//! Trees are finite node graphs with back-edges. Acyclic nodes are
//! hash-consed; nodes on cycles are allocated by reserving an id first and
//! defining it once its children are known.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::hash::Hash;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use thiserror::Error;

use crate::coinduction::holds_coinductively;
use crate::names::{Label, Participant};
use crate::semantics::CommAction;
use crate::typing::ProjectionError;

/// Handle to a process node in a [`Store`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Process(u32);

/// Handle to a global type node in a [`Store`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct GlobalType(u32);

impl Process {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl GlobalType {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoreError {
    #[error("a choice needs at least one branch")]
    EmptyBranches,
    #[error("label {0} occurs twice in one choice")]
    DuplicateLabel(Label),
    #[error("participant {0} communicates with itself")]
    SelfCommunication(Participant),
    #[error("participant {0} is bound twice")]
    DuplicateParticipant(Participant),
}

/// A nonempty choice, sorted by label with pairwise distinct labels.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Branches<T>(Vec<(Label, T)>);

impl<T: Copy> Branches<T> {
    pub fn new(branches: impl IntoIterator<Item = (Label, T)>) -> Result<Self, CoreError> {
        let mut branches: Vec<_> = branches.into_iter().collect();
        if branches.is_empty() {
            return Err(CoreError::EmptyBranches);
        }
        branches.sort_by(|a, b| a.0.cmp(&b.0));
        for pair in branches.windows(2) {
            if pair[0].0 == pair[1].0 {
                return Err(CoreError::DuplicateLabel(pair[0].0.clone()));
            }
        }
        Ok(Self(branches))
    }

    pub fn single(label: Label, target: T) -> Self {
        Self(vec![(label, target)])
    }

    pub fn get(&self, label: &Label) -> Option<T> {
        self.0
            .binary_search_by(|(l, _)| l.cmp(label))
            .ok()
            .map(|i| self.0[i].1)
    }

    pub fn contains(&self, label: &Label) -> bool {
        self.get(label).is_some()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Label, T)> + '_ {
        self.0.iter().map(|(l, t)| (l, *t))
    }

    pub fn labels(&self) -> impl Iterator<Item = &Label> + '_ {
        self.0.iter().map(|(l, _)| l)
    }

    pub fn targets(&self) -> impl Iterator<Item = T> + '_ {
        self.0.iter().map(|(_, t)| *t)
    }

    pub fn label_set(&self) -> BTreeSet<Label> {
        self.labels().cloned().collect()
    }

    /// Every label of `self` is a label of `other`.
    pub fn labels_within<U: Copy>(&self, other: &Branches<U>) -> bool {
        self.labels().all(|l| other.contains(l))
    }

    pub fn same_labels<U: Copy>(&self, other: &Branches<U>) -> bool {
        self.len() == other.len() && self.labels_within(other)
    }

    pub fn map<U: Copy>(&self, mut f: impl FnMut(&Label, T) -> U) -> Branches<U> {
        Branches(self.0.iter().map(|(l, t)| (l.clone(), f(l, *t))).collect())
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum ProcNode {
    End,
    Input { peer: Participant, branches: Branches<Process> },
    Output { peer: Participant, branches: Branches<Process> },
}

impl ProcNode {
    pub fn peer(&self) -> Option<&Participant> {
        match self {
            ProcNode::End => None,
            ProcNode::Input { peer, .. } | ProcNode::Output { peer, .. } => Some(peer),
        }
    }

    pub fn branches(&self) -> Option<&Branches<Process>> {
        match self {
            ProcNode::End => None,
            ProcNode::Input { branches, .. } | ProcNode::Output { branches, .. } => Some(branches),
        }
    }

    pub fn is_end(&self) -> bool {
        matches!(self, ProcNode::End)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum GlobalNode {
    End,
    Comm {
        sender: Participant,
        receiver: Participant,
        branches: Branches<GlobalType>,
    },
}

impl GlobalNode {
    pub fn branches(&self) -> Option<&Branches<GlobalType>> {
        match self {
            GlobalNode::End => None,
            GlobalNode::Comm { branches, .. } => Some(branches),
        }
    }

    pub fn involves(&self, p: &Participant) -> bool {
        match self {
            GlobalNode::End => false,
            GlobalNode::Comm { sender, receiver, .. } => sender == p || receiver == p,
        }
    }
}

/// Polarity and peer of a process node under construction.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub(crate) enum ProcHead {
    Input(Participant),
    Output(Participant),
}

/// A node of a graph under construction. Children are indices into the
/// same draft vector.
#[derive(Clone, Debug)]
pub(crate) enum Draft<Id, Head> {
    Existing(Id),
    End,
    Alias(usize),
    Node { head: Head, branches: Vec<(Label, usize)> },
}

pub(crate) type ProcDraft = Draft<Process, ProcHead>;
pub(crate) type GlobalDraft = Draft<GlobalType, (Participant, Participant)>;

/// An alias chain that never reaches a constructor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct AliasCycle(pub usize);

pub(crate) trait NodeKind {
    type Id: Copy + Eq + Hash;
    type Head: Clone;
    fn end(store: &Store) -> Self::Id;
    fn make(store: &mut Store, head: &Self::Head, branches: Branches<Self::Id>) -> Self::Id;
    fn reserve(store: &mut Store) -> Self::Id;
    fn define(store: &mut Store, id: Self::Id, head: &Self::Head, branches: Branches<Self::Id>);
}

pub(crate) struct ProcKind;
pub(crate) struct GlobalKind;

impl NodeKind for ProcKind {
    type Id = Process;
    type Head = ProcHead;

    fn end(store: &Store) -> Process {
        store.end_process()
    }

    fn make(store: &mut Store, head: &ProcHead, branches: Branches<Process>) -> Process {
        store.intern_process(proc_node(head, branches))
    }

    fn reserve(store: &mut Store) -> Process {
        store.reserve_process()
    }

    fn define(store: &mut Store, id: Process, head: &ProcHead, branches: Branches<Process>) {
        store.define_process(id, proc_node(head, branches));
    }
}

impl NodeKind for GlobalKind {
    type Id = GlobalType;
    type Head = (Participant, Participant);

    fn end(store: &Store) -> GlobalType {
        store.end_global()
    }

    fn make(store: &mut Store, head: &Self::Head, branches: Branches<GlobalType>) -> GlobalType {
        store.intern_global(global_node(head, branches))
    }

    fn reserve(store: &mut Store) -> GlobalType {
        store.reserve_global()
    }

    fn define(store: &mut Store, id: GlobalType, head: &Self::Head, branches: Branches<GlobalType>) {
        store.define_global(id, global_node(head, branches));
    }
}

fn proc_node(head: &ProcHead, branches: Branches<Process>) -> ProcNode {
    match head {
        ProcHead::Input(peer) => ProcNode::Input { peer: peer.clone(), branches },
        ProcHead::Output(peer) => ProcNode::Output { peer: peer.clone(), branches },
    }
}

fn global_node((sender, receiver): &(Participant, Participant), branches: Branches<GlobalType>) -> GlobalNode {
    debug_assert_ne!(sender, receiver);
    GlobalNode::Comm {
        sender: sender.clone(),
        receiver: receiver.clone(),
        branches,
    }
}

/// Owner of all process and global type nodes.
#[derive(Default)]
pub struct Store {
    procs: Vec<Option<ProcNode>>,
    proc_index: HashMap<ProcNode, Process>,
    globals: Vec<Option<GlobalNode>>,
    global_index: HashMap<GlobalNode, GlobalType>,
    pub(crate) projections: HashMap<(GlobalType, Participant), Result<Process, ProjectionError>>,
    pub(crate) global_actions: HashMap<GlobalType, BTreeSet<CommAction>>,
    pub(crate) global_steps: HashMap<(GlobalType, CommAction), GlobalType>,
}

impl Store {
    pub fn new() -> Self {
        let mut store = Store::default();
        store.intern_process(ProcNode::End);
        store.intern_global(GlobalNode::End);
        store
    }

    pub fn end_process(&self) -> Process {
        Process(0)
    }

    pub fn end_global(&self) -> GlobalType {
        GlobalType(0)
    }

    pub fn process(&self, p: Process) -> &ProcNode {
        self.procs[p.index()]
            .as_ref()
            .expect("process node read before definition")
    }

    pub fn global(&self, g: GlobalType) -> &GlobalNode {
        self.globals[g.index()]
            .as_ref()
            .expect("global node read before definition")
    }

    pub fn process_count(&self) -> usize {
        self.procs.len()
    }

    pub fn global_count(&self) -> usize {
        self.globals.len()
    }

    pub fn intern_process(&mut self, node: ProcNode) -> Process {
        if let Some(&id) = self.proc_index.get(&node) {
            return id;
        }
        let id = Process(self.procs.len() as u32);
        self.procs.push(Some(node.clone()));
        self.proc_index.insert(node, id);
        id
    }

    pub fn intern_global(&mut self, node: GlobalNode) -> GlobalType {
        if let Some(&id) = self.global_index.get(&node) {
            return id;
        }
        let id = GlobalType(self.globals.len() as u32);
        self.globals.push(Some(node.clone()));
        self.global_index.insert(node, id);
        id
    }

    pub fn input(
        &mut self,
        peer: Participant,
        branches: impl IntoIterator<Item = (Label, Process)>,
    ) -> Result<Process, CoreError> {
        let branches = Branches::new(branches)?;
        Ok(self.intern_process(ProcNode::Input { peer, branches }))
    }

    pub fn output(
        &mut self,
        peer: Participant,
        branches: impl IntoIterator<Item = (Label, Process)>,
    ) -> Result<Process, CoreError> {
        let branches = Branches::new(branches)?;
        Ok(self.intern_process(ProcNode::Output { peer, branches }))
    }

    pub fn comm(
        &mut self,
        sender: Participant,
        receiver: Participant,
        branches: impl IntoIterator<Item = (Label, GlobalType)>,
    ) -> Result<GlobalType, CoreError> {
        if sender == receiver {
            return Err(CoreError::SelfCommunication(sender));
        }
        let branches = Branches::new(branches)?;
        Ok(self.intern_global(GlobalNode::Comm { sender, receiver, branches }))
    }

    /// Allocates an id to be filled in later by [`Store::define_process`].
    pub fn reserve_process(&mut self) -> Process {
        let id = Process(self.procs.len() as u32);
        self.procs.push(None);
        id
    }

    pub fn define_process(&mut self, id: Process, node: ProcNode) {
        let slot = &mut self.procs[id.index()];
        assert!(slot.is_none(), "process node defined twice");
        *slot = Some(node.clone());
        self.proc_index.entry(node).or_insert(id);
    }

    pub fn reserve_global(&mut self) -> GlobalType {
        let id = GlobalType(self.globals.len() as u32);
        self.globals.push(None);
        id
    }

    pub fn define_global(&mut self, id: GlobalType, node: GlobalNode) {
        let slot = &mut self.globals[id.index()];
        assert!(slot.is_none(), "global node defined twice");
        *slot = Some(node.clone());
        self.global_index.entry(node).or_insert(id);
    }

    /// A fresh node with the same content as `p`: the one-step unfolding.
    pub fn unfold_process(&mut self, p: Process) -> Process {
        let node = self.process(p).clone();
        if node.is_end() {
            return p;
        }
        let id = self.reserve_process();
        self.define_process(id, node);
        id
    }

    pub fn unfold_global(&mut self, g: GlobalType) -> GlobalType {
        let node = self.global(g).clone();
        if node == GlobalNode::End {
            return g;
        }
        let id = self.reserve_global();
        self.define_global(id, node);
        id
    }

    /// Nodes reachable from `p`, in depth-first preorder.
    pub fn reachable_processes(&self, p: Process) -> Vec<Process> {
        reachable(p, |n| self.process(n).branches().into_iter().flat_map(|b| b.targets()).collect())
    }

    pub fn reachable_globals(&self, g: GlobalType) -> Vec<GlobalType> {
        reachable(g, |n| self.global(n).branches().into_iter().flat_map(|b| b.targets()).collect())
    }

    pub fn participants_of_process(&self, p: Process) -> BTreeSet<Participant> {
        self.reachable_processes(p)
            .into_iter()
            .filter_map(|n| self.process(n).peer().cloned())
            .collect()
    }

    pub fn participants_of_global(&self, g: GlobalType) -> BTreeSet<Participant> {
        let mut out = BTreeSet::new();
        for n in self.reachable_globals(g) {
            if let GlobalNode::Comm { sender, receiver, .. } = self.global(n) {
                out.insert(sender.clone());
                out.insert(receiver.clone());
            }
        }
        out
    }

    pub fn bisim_process(&self, a: Process, b: Process) -> bool {
        holds_coinductively((a, b), |a, b| match (self.process(a), self.process(b)) {
            (ProcNode::End, ProcNode::End) => Some(vec![]),
            (ProcNode::Input { peer: p, branches: x }, ProcNode::Input { peer: q, branches: y })
            | (ProcNode::Output { peer: p, branches: x }, ProcNode::Output { peer: q, branches: y }) => {
                (p == q && x.same_labels(y)).then(|| x.iter().map(|(l, c)| (c, y.get(l).unwrap())).collect())
            }
            _ => None,
        })
    }

    pub fn bisim_global(&self, a: GlobalType, b: GlobalType) -> bool {
        holds_coinductively((a, b), |a, b| match (self.global(a), self.global(b)) {
            (GlobalNode::End, GlobalNode::End) => Some(vec![]),
            (
                GlobalNode::Comm { sender: s1, receiver: r1, branches: x },
                GlobalNode::Comm { sender: s2, receiver: r2, branches: y },
            ) => (s1 == s2 && r1 == r2 && x.same_labels(y))
                .then(|| x.iter().map(|(l, c)| (c, y.get(l).unwrap())).collect()),
            _ => None,
        })
    }

    pub(crate) fn build_processes(&mut self, drafts: &[ProcDraft]) -> Result<Vec<Process>, AliasCycle> {
        build::<ProcKind>(self, drafts)
    }

    pub(crate) fn build_globals(&mut self, drafts: &[GlobalDraft]) -> Result<Vec<GlobalType>, AliasCycle> {
        build::<GlobalKind>(self, drafts)
    }
}

fn reachable<T: Copy + Eq + Hash>(root: T, children: impl Fn(T) -> Vec<T>) -> Vec<T> {
    let mut seen = HashSet::new();
    let mut order = Vec::new();
    let mut stack = vec![root];
    while let Some(n) = stack.pop() {
        if !seen.insert(n) {
            continue;
        }
        order.push(n);
        let mut kids = children(n);
        kids.reverse();
        stack.extend(kids.into_iter().filter(|k| !seen.contains(k)));
    }
    order
}

/// Follows alias chains to a non-alias draft.
pub(crate) fn resolve_aliases<I, H>(drafts: &[Draft<I, H>]) -> Result<Vec<usize>, AliasCycle> {
    let mut target: Vec<Option<usize>> = vec![None; drafts.len()];
    for start in 0..drafts.len() {
        let mut chain = Vec::new();
        let mut cur = start;
        let resolved = loop {
            if let Some(t) = target[cur] {
                break t;
            }
            match drafts[cur] {
                Draft::Alias(next) => {
                    if chain.contains(&cur) {
                        return Err(AliasCycle(cur));
                    }
                    chain.push(cur);
                    cur = next;
                }
                _ => break cur,
            }
        };
        for i in chain {
            target[i] = Some(resolved);
        }
        target[start] = Some(resolved);
    }
    Ok(target.into_iter().map(|t| t.unwrap()).collect())
}

fn build<K: NodeKind>(store: &mut Store, drafts: &[Draft<K::Id, K::Head>]) -> Result<Vec<K::Id>, AliasCycle> {
    let target = resolve_aliases(drafts)?;
    let mut graph = DiGraph::<usize, ()>::new();
    let nodes: Vec<NodeIndex> = (0..drafts.len()).map(|i| graph.add_node(i)).collect();
    for (i, d) in drafts.iter().enumerate() {
        if let Draft::Node { branches, .. } = d {
            for (_, c) in branches {
                graph.add_edge(nodes[i], nodes[target[*c]], ());
            }
        }
    }
    let mut ids: Vec<Option<K::Id>> = vec![None; drafts.len()];
    let child_ids = |ids: &[Option<K::Id>], branches: &[(Label, usize)]| {
        Branches::new(branches.iter().map(|(l, c)| (l.clone(), ids[target[*c]].unwrap())))
            .expect("draft branches are distinct")
    };
    // Tarjan yields components children-first.
    for scc in tarjan_scc(&graph) {
        let members: Vec<usize> = scc.iter().map(|n| graph[*n]).collect();
        let cyclic = members.len() > 1 || graph.contains_edge(scc[0], scc[0]);
        if !cyclic {
            let i = members[0];
            ids[i] = match &drafts[i] {
                Draft::Existing(id) => Some(*id),
                Draft::End => Some(K::end(store)),
                Draft::Alias(_) => None,
                Draft::Node { head, branches } => {
                    let br = child_ids(&ids, branches);
                    Some(K::make(store, head, br))
                }
            };
            continue;
        }
        for &i in &members {
            ids[i] = Some(K::reserve(store));
        }
        for &i in &members {
            if let Draft::Node { head, branches } = &drafts[i] {
                let br = child_ids(&ids, branches);
                K::define(store, ids[i].unwrap(), head, br);
            }
        }
    }
    Ok((0..drafts.len()).map(|i| ids[target[i]].unwrap()).collect())
}
