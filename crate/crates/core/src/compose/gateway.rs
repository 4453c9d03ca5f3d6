use std::collections::HashMap;

use super::ComposeError;
use crate::names::Participant;
use crate::store::{Draft, ProcDraft, ProcHead, ProcNode, Process, Store};

/// The forwarder replacing an interface process: each input is relayed to
/// `h`, each output is first received from `h`.
pub fn gateway(store: &mut Store, p: Process, h: &Participant) -> Result<Process, ComposeError> {
    if store.participants_of_process(p).contains(h) {
        return Err(ComposeError::ParticipantCollision(h.clone()));
    }
    let mut index: HashMap<Process, usize> = HashMap::from([(p, 0)]);
    let mut drafts: Vec<ProcDraft> = vec![Draft::End];
    let mut pending = vec![p];
    while let Some(n) = pending.pop() {
        let slot = index[&n];
        let (outer, inner, branches) = match store.process(n) {
            ProcNode::End => continue,
            ProcNode::Input { peer, branches } => (ProcHead::Input(peer.clone()), ProcHead::Output(h.clone()), branches),
            ProcNode::Output { peer, branches } => (ProcHead::Input(h.clone()), ProcHead::Output(peer.clone()), branches),
        };
        let mut kids = Vec::with_capacity(branches.len());
        for (label, cont) in branches.iter() {
            let target = *index.entry(cont).or_insert_with(|| {
                drafts.push(Draft::End);
                pending.push(cont);
                drafts.len() - 1
            });
            drafts.push(Draft::Node { head: inner.clone(), branches: vec![(label.clone(), target)] });
            kids.push((label.clone(), drafts.len() - 1));
        }
        drafts[slot] = Draft::Node { head: outer, branches: kids };
    }
    Ok(store.build_processes(&drafts).expect("no aliases")[0])
}
