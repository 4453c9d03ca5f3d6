//! Seeded generators of processes, global types and related pairs, used by
//! the property suites.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::names::{Label, Participant};
use crate::session::Session;
use crate::store::{Draft, GlobalDraft, ProcDraft, ProcHead, ProcNode, Process, Store, GlobalType};
use crate::typing::{project, well_formed};

pub struct Generator {
    rng: ChaCha8Rng,
}

pub fn names(prefix: &[&str]) -> Vec<Participant> {
    prefix.iter().map(|s| Participant::new(s)).collect()
}

pub fn labels(names: &[&str]) -> Vec<Label> {
    names.iter().map(|s| Label::new(s)).collect()
}

impl Generator {
    pub fn new(seed: u64) -> Self {
        Generator { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn branch_count(&mut self, max: usize) -> usize {
        let n = match self.rng.gen_range(0..100) {
            0..=59 => 1,
            60..=89 => 2,
            _ => 3,
        };
        n.min(max)
    }

    fn pick_labels(&mut self, pool: &[Label], n: usize) -> Vec<Label> {
        let mut ls: Vec<Label> = pool.choose_multiple(&mut self.rng, n).cloned().collect();
        ls.sort();
        ls
    }

    /// A random process graph with at most `max_nodes` nodes.
    pub fn process(&mut self, store: &mut Store, max_nodes: usize, peers: &[Participant], pool: &[Label]) -> Process {
        let n = self.rng.gen_range(1..=max_nodes.max(1));
        let mut drafts: Vec<ProcDraft> = Vec::with_capacity(n);
        for i in 0..n {
            if i > 0 && self.rng.gen_bool(0.15) {
                drafts.push(Draft::End);
                continue;
            }
            let peer = peers.choose(&mut self.rng).unwrap().clone();
            let head = if self.rng.gen_bool(0.5) { ProcHead::Input(peer) } else { ProcHead::Output(peer) };
            let count = self.branch_count(pool.len());
            let branches = self
                .pick_labels(pool, count)
                .into_iter()
                .map(|l| (l, self.rng.gen_range(0..n)))
                .collect();
            drafts.push(Draft::Node { head, branches });
        }
        store.build_processes(&drafts).unwrap()[0]
    }

    /// A random global type graph; it need not be well formed.
    pub fn global(&mut self, store: &mut Store, max_nodes: usize, parts: &[Participant], pool: &[Label]) -> GlobalType {
        let n = self.rng.gen_range(1..=max_nodes.max(1));
        let mut drafts: Vec<GlobalDraft> = Vec::with_capacity(n);
        for i in 0..n {
            if i > 0 && self.rng.gen_bool(0.15) {
                drafts.push(Draft::End);
                continue;
            }
            let pair: Vec<Participant> = parts.choose_multiple(&mut self.rng, 2).cloned().collect();
            let count = self.branch_count(pool.len());
            let shared = self.rng.gen_bool(0.4);
            let target = |rng: &mut ChaCha8Rng| {
                if rng.gen_bool(0.7) && i + 1 < n {
                    rng.gen_range(i + 1..n)
                } else {
                    rng.gen_range(0..n)
                }
            };
            let common = target(&mut self.rng);
            let branches = self
                .pick_labels(pool, count)
                .into_iter()
                .map(|l| (l, if shared { common } else { target(&mut self.rng) }))
                .collect();
            drafts.push(Draft::Node { head: (pair[0].clone(), pair[1].clone()), branches });
        }
        store.build_globals(&drafts).unwrap()[0]
    }

    /// Rejection-samples a well-formed global type mentioning at least two
    /// participants.
    pub fn well_formed_global(
        &mut self,
        store: &mut Store,
        max_nodes: usize,
        parts: &[Participant],
        pool: &[Label],
    ) -> GlobalType {
        loop {
            let size = self.rng.gen_range(2..=parts.len());
            let chosen: Vec<Participant> = parts.choose_multiple(&mut self.rng, size).cloned().collect();
            let g = self.global(store, max_nodes, &chosen, pool);
            if store.participants_of_global(g).len() >= 2 && well_formed(store, g).ok {
                return g;
            }
        }
    }

    /// Copies the graph of `p`, letting `edit` rewrite each node's branch
    /// list (indices refer to copies of the original nodes, plus one extra
    /// `0` node at the end).
    fn rewrite(
        &mut self,
        store: &mut Store,
        p: Process,
        mut edit: impl FnMut(&mut ChaCha8Rng, &ProcNode, Vec<(Label, usize)>, usize) -> ProcDraft,
    ) -> Process {
        let nodes = store.reachable_processes(p);
        let index: HashMap<Process, usize> = nodes.iter().enumerate().map(|(i, n)| (*n, i)).collect();
        let mut drafts = Vec::with_capacity(nodes.len());
        for n in &nodes {
            let node = store.process(*n).clone();
            let branches = node
                .branches()
                .map(|b| b.iter().map(|(l, c)| (l.clone(), index[&c])).collect())
                .unwrap_or_default();
            drafts.push(edit(&mut self.rng, &node, branches, nodes.len()));
        }
        // Index `nodes.len()` is a spare terminated node edits may point at.
        drafts.push(Draft::End);
        store.build_processes(&drafts).unwrap()[0]
    }

    /// A process that is `≤` the given one: some inputs gain extra branches.
    pub fn extend_inputs(&mut self, store: &mut Store, p: Process, pool: &[Label]) -> Process {
        self.rewrite(store, p, |rng, node, mut branches, n| match node {
            ProcNode::End => Draft::End,
            ProcNode::Input { peer, .. } => {
                if rng.gen_bool(0.4) {
                    if let Some(extra) = pool.iter().find(|l| !branches.iter().any(|(b, _)| b == *l)) {
                        branches.push((extra.clone(), rng.gen_range(0..n)));
                    }
                }
                Draft::Node { head: ProcHead::Input(peer.clone()), branches }
            }
            ProcNode::Output { peer, .. } => Draft::Node { head: ProcHead::Output(peer.clone()), branches },
        })
    }

    /// A process the given one is `≤` to: some inputs lose branches.
    pub fn restrict_inputs(&mut self, store: &mut Store, p: Process) -> Process {
        self.rewrite(store, p, |rng, node, mut branches, _| match node {
            ProcNode::End => Draft::End,
            ProcNode::Input { peer, .. } => {
                if branches.len() > 1 && rng.gen_bool(0.4) {
                    branches.remove(rng.gen_range(0..branches.len()));
                }
                Draft::Node { head: ProcHead::Input(peer.clone()), branches }
            }
            ProcNode::Output { peer, .. } => Draft::Node { head: ProcHead::Output(peer.clone()), branches },
        })
    }

    /// A process that is `≤⁺` the given one: some outputs lose branches.
    pub fn restrict_outputs(&mut self, store: &mut Store, p: Process) -> Process {
        self.rewrite(store, p, |rng, node, mut branches, _| match node {
            ProcNode::End => Draft::End,
            ProcNode::Output { peer, .. } => {
                if branches.len() > 1 && rng.gen_bool(0.4) {
                    branches.remove(rng.gen_range(0..branches.len()));
                }
                Draft::Node { head: ProcHead::Output(peer.clone()), branches }
            }
            ProcNode::Input { peer, .. } => Draft::Node { head: ProcHead::Input(peer.clone()), branches },
        })
    }

    /// A process compatible with `p`, talking to `peer`: outputs become
    /// inputs on a nonempty subset of labels, inputs become outputs possibly
    /// offering extra labels that lead to `0`.
    pub fn compatible_partner(&mut self, store: &mut Store, p: Process, peer: &Participant, pool: &[Label]) -> Process {
        let mut out = self.rewrite(store, p, |rng, node, mut branches, _| match node {
            ProcNode::End => Draft::End,
            ProcNode::Output { .. } => {
                if branches.len() > 1 && rng.gen_bool(0.3) {
                    branches.remove(rng.gen_range(0..branches.len()));
                }
                Draft::Node { head: ProcHead::Input(peer.clone()), branches }
            }
            ProcNode::Input { .. } => Draft::Node { head: ProcHead::Output(peer.clone()), branches },
        });
        // Extra output labels are added in a second pass, all leading to one End node.
        let end_label = pool.to_vec();
        out = self.rewrite(store, out, |rng, node, mut branches, n| match node {
            ProcNode::End => Draft::End,
            ProcNode::Output { peer, .. } => {
                if rng.gen_bool(0.3) {
                    if let Some(extra) = end_label.iter().find(|l| !branches.iter().any(|(b, _)| b == *l)) {
                        branches.push((extra.clone(), n));
                    }
                }
                Draft::Node { head: ProcHead::Output(peer.clone()), branches }
            }
            ProcNode::Input { peer, .. } => Draft::Node { head: ProcHead::Input(peer.clone()), branches },
        });
        out
    }

    /// A global type over `k` and fresh participants whose projection onto
    /// `k` is `q` with all peers renamed. Independent communications
    /// between two other fresh participants are sometimes interleaved;
    /// if that breaks well-formedness the plain two-party type is returned.
    pub fn context_for(
        &mut self,
        store: &mut Store,
        q: Process,
        k: &Participant,
        fresh: &[Participant],
        pool: &[Label],
    ) -> GlobalType {
        assert!(fresh.len() >= 3);
        let partner = &fresh[0];
        for attempt in 0..2 {
            let interleave = attempt == 0;
            let nodes = store.reachable_processes(q);
            let index: HashMap<Process, usize> = nodes.iter().enumerate().map(|(i, n)| (*n, i)).collect();
            let mut drafts: Vec<GlobalDraft> = Vec::new();
            let mut extra = Vec::new();
            for n in &nodes {
                let node = store.process(*n);
                let branches: Vec<(Label, usize)> = node
                    .branches()
                    .map(|b| b.iter().map(|(l, c)| (l.clone(), index[&c])).collect())
                    .unwrap_or_default();
                drafts.push(match node {
                    ProcNode::End => Draft::End,
                    ProcNode::Output { .. } => Draft::Node { head: (k.clone(), partner.clone()), branches },
                    ProcNode::Input { .. } => Draft::Node { head: (partner.clone(), k.clone()), branches },
                });
            }
            if interleave {
                for draft in drafts.iter_mut() {
                    if matches!(draft, Draft::Node { .. }) && self.rng.gen_bool(0.3) {
                        let moved = std::mem::replace(draft, Draft::End);
                        extra.push(moved);
                        let target = nodes.len() + extra.len() - 1;
                        let label = pool.choose(&mut self.rng).unwrap().clone();
                        *draft = Draft::Node { head: (fresh[1].clone(), fresh[2].clone()), branches: vec![(label, target)] };
                    }
                }
                drafts.extend(extra);
            }
            let g = store.build_globals(&drafts).unwrap()[0];
            if well_formed(store, g).ok {
                return g;
            }
        }
        unreachable!("two-party types are always well formed")
    }
}

/// Binds every participant of `g` to its projection.
pub fn self_projection(store: &mut Store, g: GlobalType) -> Session {
    let parts = store.participants_of_global(g);
    let bindings: Vec<_> = parts
        .into_iter()
        .map(|p| {
            let proc_ = project(store, g, &p).expect("well-formed types project");
            (p, proc_)
        })
        .collect();
    Session::new(store, bindings).expect("projections never mention their own participant")
}
