//! Coinductive projection of a global type onto one participant.
//!
//! Every reachable global node gets an unknown standing for its projection.
//! Nodes where the participant sends or receives fix the shape of their
//! unknown; nodes that merely contain the participant further down produce
//! merge equations over their children. Equations are solved by
//! unification, so cyclic "all branches equal" situations are settled
//! coinductively.

use std::collections::{BTreeMap, HashMap, HashSet};

use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::Serialize;
use thiserror::Error;

use crate::names::{Label, Participant};
use crate::store::{Draft, GlobalNode, GlobalType, ProcDraft, ProcHead, Process, Store};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ProjectionFailure {
    /// Some branch projects to an input and another to an output or `0`.
    MixedShapes,
    /// Branch projections are not all equal and cannot be merged.
    UnequalContinuations,
    /// Inputs from one sender whose label sets overlap without being equal.
    OverlappingInputLabels,
    /// Inputs from different senders.
    DifferentInputSenders,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("cannot project onto {participant}: {reason:?} at global node {}", global_node.index())]
pub struct ProjectionError {
    pub global_node: GlobalType,
    pub participant: Participant,
    pub reason: ProjectionFailure,
}

#[derive(Clone, Debug)]
enum Shape {
    End,
    In(Participant, BTreeMap<Label, usize>),
    Out(Participant, BTreeMap<Label, usize>),
}

struct Unifier {
    parent: Vec<usize>,
    shape: Vec<Option<Shape>>,
}

impl Unifier {
    fn fresh(&mut self, shape: Option<Shape>) -> usize {
        self.parent.push(self.parent.len());
        self.shape.push(shape);
        self.parent.len() - 1
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn shape_of(&mut self, x: usize) -> Option<Shape> {
        let r = self.find(x);
        self.shape[r].clone()
    }

    /// Identifies two unknowns and, recursively, their continuations.
    /// Returns false if the trees cannot be equal.
    fn unify(&mut self, a: usize, b: usize) -> bool {
        let mut work = vec![(a, b)];
        while let Some((a, b)) = work.pop() {
            let (ra, rb) = (self.find(a), self.find(b));
            if ra == rb {
                continue;
            }
            self.parent[rb] = ra;
            let sb = self.shape[rb].take();
            match (self.shape[ra].clone(), sb) {
                (_, None) => {}
                (None, Some(s)) => self.shape[ra] = Some(s),
                (Some(Shape::End), Some(Shape::End)) => {}
                (Some(Shape::In(p, x)), Some(Shape::In(q, y))) | (Some(Shape::Out(p, x)), Some(Shape::Out(q, y))) => {
                    if p != q || x.len() != y.len() || !x.keys().all(|l| y.contains_key(l)) {
                        return false;
                    }
                    work.extend(x.iter().map(|(l, c)| (*c, y[l])));
                }
                _ => return false,
            }
        }
        true
    }
}

enum Equation {
    Fixed,
    Merge(Vec<usize>),
}

pub fn project(store: &mut Store, g: GlobalType, p: &Participant) -> Result<Process, ProjectionError> {
    let key = (g, p.clone());
    if let Some(r) = store.projections.get(&key) {
        return r.clone();
    }
    let result = compute(store, g, p);
    store.projections.insert(key, result.clone());
    result
}

fn compute(store: &mut Store, g: GlobalType, p: &Participant) -> Result<Process, ProjectionError> {
    let nodes = store.reachable_globals(g);
    let contains_p = nodes_containing(store, &nodes, p);
    let var: HashMap<GlobalType, usize> = nodes.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let mut uf = Unifier { parent: Vec::new(), shape: Vec::new() };
    let mut equations = Vec::with_capacity(nodes.len());
    for &n in &nodes {
        let (shape, eq) = match store.global(n) {
            GlobalNode::Comm { sender, receiver, branches } if contains_p.contains(&n) => {
                let kids: BTreeMap<Label, usize> = branches.iter().map(|(l, c)| (l.clone(), var[&c])).collect();
                if sender == p {
                    (Some(Shape::Out(receiver.clone(), kids)), Equation::Fixed)
                } else if receiver == p {
                    (Some(Shape::In(sender.clone(), kids)), Equation::Fixed)
                } else {
                    (None, Equation::Merge(kids.into_values().collect()))
                }
            }
            _ => (Some(Shape::End), Equation::Fixed),
        };
        uf.fresh(shape);
        equations.push(eq);
    }

    let mut graph = DiGraph::<usize, ()>::new();
    let idx: Vec<_> = (0..nodes.len()).map(|i| graph.add_node(i)).collect();
    for (i, eq) in equations.iter().enumerate() {
        if let Equation::Merge(kids) = eq {
            for &c in kids {
                if matches!(equations[c], Equation::Merge(_)) {
                    graph.update_edge(idx[i], idx[c], ());
                }
            }
        }
    }
    for scc in tarjan_scc(&graph) {
        let members: Vec<usize> = scc.iter().map(|n| graph[*n]).collect();
        let cyclic = members.len() > 1 || graph.contains_edge(scc[0], scc[0]);
        for &i in &members {
            let Equation::Merge(kids) = &equations[i] else { continue };
            let fail = |reason| ProjectionError { global_node: nodes[i], participant: p.clone(), reason };
            if cyclic || kids.len() == 1 {
                // A merge node on a cycle of merge nodes would keep gaining
                // labels if it merged inputs, so all its branches must agree.
                merge_equal(&mut uf, i, kids).map_err(fail)?;
            } else {
                merge_node(&mut uf, i, kids).map_err(fail)?;
            }
        }
    }
    Ok(materialize(store, &mut uf, var[&g]))
}

/// Global nodes from which a communication involving `p` is reachable.
fn nodes_containing(store: &Store, nodes: &[GlobalType], p: &Participant) -> HashSet<GlobalType> {
    let mut parents: HashMap<GlobalType, Vec<GlobalType>> = HashMap::new();
    let mut stack = Vec::new();
    for &n in nodes {
        let node = store.global(n);
        if node.involves(p) {
            stack.push(n);
        }
        for c in node.branches().into_iter().flat_map(|b| b.targets()) {
            parents.entry(c).or_default().push(n);
        }
    }
    let mut seen: HashSet<GlobalType> = stack.iter().copied().collect();
    while let Some(n) = stack.pop() {
        for &q in parents.get(&n).map(Vec::as_slice).unwrap_or_default() {
            if seen.insert(q) {
                stack.push(q);
            }
        }
    }
    seen
}

fn classify_failure(uf: &mut Unifier, kids: &[usize]) -> ProjectionFailure {
    let shapes: Vec<_> = kids.iter().map(|&k| uf.shape_of(k)).collect();
    let inputs = shapes.iter().filter(|s| matches!(s, Some(Shape::In(..)))).count();
    if inputs > 0 && inputs < shapes.len() {
        ProjectionFailure::MixedShapes
    } else {
        ProjectionFailure::UnequalContinuations
    }
}

fn merge_equal(uf: &mut Unifier, node: usize, kids: &[usize]) -> Result<(), ProjectionFailure> {
    let reason = classify_failure(uf, kids);
    for &k in kids {
        if !uf.unify(node, k) {
            return Err(reason);
        }
    }
    Ok(())
}

fn merge_node(uf: &mut Unifier, node: usize, kids: &[usize]) -> Result<(), ProjectionFailure> {
    let shapes: Vec<_> = kids.iter().map(|&k| uf.shape_of(k)).collect();
    let inputs: Option<Vec<(Participant, BTreeMap<Label, usize>)>> = shapes
        .into_iter()
        .map(|s| match s {
            Some(Shape::In(q, b)) => Some((q, b)),
            _ => None,
        })
        .collect();
    let Some(inputs) = inputs else {
        return merge_equal(uf, node, kids);
    };
    let sender = inputs[0].0.clone();
    if inputs.iter().any(|(q, _)| *q != sender) {
        return merge_equal(uf, node, kids).map_err(|_| ProjectionFailure::DifferentInputSenders);
    }
    let total: usize = inputs.iter().map(|(_, b)| b.len()).sum();
    let union: BTreeMap<Label, usize> = inputs.into_iter().flat_map(|(_, b)| b).collect();
    if union.len() < total {
        return merge_equal(uf, node, kids).map_err(|_| ProjectionFailure::OverlappingInputLabels);
    }
    let merged = uf.fresh(Some(Shape::In(sender, union)));
    if uf.unify(node, merged) {
        Ok(())
    } else {
        Err(ProjectionFailure::UnequalContinuations)
    }
}

fn materialize(store: &mut Store, uf: &mut Unifier, root: usize) -> Process {
    let mut index: HashMap<usize, usize> = HashMap::new();
    let mut drafts: Vec<ProcDraft> = Vec::new();
    let mut pending = vec![uf.find(root)];
    index.insert(pending[0], 0);
    drafts.push(Draft::End);
    while let Some(class) = pending.pop() {
        let slot = index[&class];
        let shape = uf.shape[class].clone().expect("every merge class acquires a shape");
        let (head, kids) = match shape {
            Shape::End => continue,
            Shape::In(q, kids) => (ProcHead::Input(q), kids),
            Shape::Out(q, kids) => (ProcHead::Output(q), kids),
        };
        let mut branches = Vec::with_capacity(kids.len());
        for (l, k) in kids {
            let c = uf.find(k);
            let j = *index.entry(c).or_insert_with(|| {
                drafts.push(Draft::End);
                pending.push(c);
                drafts.len() - 1
            });
            branches.push((l, j));
        }
        drafts[slot] = Draft::Node { head, branches };
    }
    store.build_processes(&drafts).expect("projection drafts have no aliases")[0]
}
