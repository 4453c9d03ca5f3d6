//! Multiparty sessions: finite maps from participants to processes.

use std::collections::{BTreeMap, BTreeSet};

use crate::names::Participant;
use crate::store::{CoreError, Process, Store};

#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Session {
    bindings: BTreeMap<Participant, Process>,
}

impl Session {
    /// Rejects duplicate participants and processes that talk to their own
    /// participant.
    pub fn new(store: &Store, bindings: impl IntoIterator<Item = (Participant, Process)>) -> Result<Self, CoreError> {
        let mut map = BTreeMap::new();
        for (p, proc_) in bindings {
            if store.participants_of_process(proc_).contains(&p) {
                return Err(CoreError::SelfCommunication(p));
            }
            if map.insert(p.clone(), proc_).is_some() {
                return Err(CoreError::DuplicateParticipant(p));
            }
        }
        Ok(Session { bindings: map })
    }

    pub fn get(&self, p: &Participant) -> Option<Process> {
        self.bindings.get(p).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Participant, Process)> + '_ {
        self.bindings.iter().map(|(p, q)| (p, *q))
    }

    pub fn len(&self) -> usize {
        self.bindings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    /// The bound participants, pt(M).
    pub fn participants(&self) -> BTreeSet<Participant> {
        self.bindings.keys().cloned().collect()
    }

    pub(crate) fn with_binding(&self, p: Participant, proc_: Process) -> Session {
        let mut bindings = self.bindings.clone();
        bindings.insert(p, proc_);
        Session { bindings }
    }

    pub(crate) fn without(&self, p: &Participant) -> Session {
        let mut bindings = self.bindings.clone();
        bindings.remove(p);
        Session { bindings }
    }

    /// True if every participant has terminated.
    pub fn is_final(&self, store: &Store) -> bool {
        self.bindings.values().all(|&p| store.process(p).is_end())
    }
}

/// Drops every binding to the terminated process.
pub fn normalize_session(store: &Store, m: &Session) -> Session {
    Session {
        bindings: m
            .bindings
            .iter()
            .filter(|(_, &p)| !store.process(p).is_end())
            .map(|(p, q)| (p.clone(), *q))
            .collect(),
    }
}
