use crate::coinduction::holds_coinductively;
use crate::store::{ProcNode, Process, Store};

/// Dual behaviour up to peer names: every input faces an output offering at
/// least the same labels.
pub fn compatible(store: &Store, p: Process, q: Process) -> bool {
    holds_coinductively((p, q), |a, b| match (store.process(a), store.process(b)) {
        (ProcNode::End, ProcNode::End) => Some(vec![]),
        (ProcNode::Output { branches: outs, .. }, ProcNode::Input { branches: ins, .. }) => {
            ins.labels_within(outs).then(|| ins.iter().map(|(l, c)| (outs.get(l).unwrap(), c)).collect())
        }
        (ProcNode::Input { branches: ins, .. }, ProcNode::Output { branches: outs, .. }) => {
            ins.labels_within(outs).then(|| ins.iter().map(|(l, c)| (c, outs.get(l).unwrap())).collect())
        }
        _ => None,
    })
}
