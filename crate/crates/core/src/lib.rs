//! Open multiparty sessions.
//!
//! Processes and global types are regular trees stored as node graphs in a
//! [`Store`]. On top of them the crate provides projection and typing,
//! the transition systems of sessions and global types with an exact
//! lock-freedom check, and the connection of two sessions (or two global
//! types) through a pair of compatible interface participants replaced by
//! gateways.

mod coinduction;
pub mod compose;
pub mod names;
pub mod parser;
pub mod random;
pub mod semantics;
pub mod session;
pub mod store;
pub mod typing;

#[cfg(test)]
mod testing;

pub use names::{Label, Participant};
pub use session::{normalize_session, Session};
pub use store::{Branches, CoreError, GlobalNode, GlobalType, ProcNode, Process, Store};
