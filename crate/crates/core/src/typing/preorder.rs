//! The structural preorders on processes.

use crate::coinduction::holds_coinductively;
use crate::store::{ProcNode, Process, Store};

/// `P ≤ Q`: `P` may accept more inputs than `Q` and must offer exactly the
/// same outputs.
pub fn leq(store: &Store, p: Process, q: Process) -> bool {
    preorder(store, p, q, false)
}

/// As [`leq`], but `P` may also offer a subset of `Q`'s outputs.
pub fn leq_plus(store: &Store, p: Process, q: Process) -> bool {
    preorder(store, p, q, true)
}

fn preorder(store: &Store, p: Process, q: Process, relaxed_outputs: bool) -> bool {
    holds_coinductively((p, q), |a, b| match (store.process(a), store.process(b)) {
        (ProcNode::End, ProcNode::End) => Some(vec![]),
        (ProcNode::Input { peer: x, branches: big }, ProcNode::Input { peer: y, branches: small }) => {
            (x == y && small.labels_within(big))
                .then(|| small.iter().map(|(l, c)| (big.get(l).unwrap(), c)).collect())
        }
        (ProcNode::Output { peer: x, branches: left }, ProcNode::Output { peer: y, branches: right }) => {
            let labels_ok = if relaxed_outputs {
                left.labels_within(right)
            } else {
                left.same_labels(right)
            };
            (x == y && labels_ok).then(|| left.iter().map(|(l, c)| (c, right.get(l).unwrap())).collect())
        }
        _ => None,
    })
}
