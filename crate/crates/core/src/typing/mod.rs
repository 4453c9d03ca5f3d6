//! Projection, depth, well-formedness, the structural preorders and the
//! typing judgement.

mod check;
mod depth;
mod preorder;
mod project;

pub use check::{
    typecheck, typing_rule, well_formed, ParticipantCheck, TypingError, TypingFailure, TypingMode, TypingReport, WellFormedReport,
};
pub use depth::{depth, DepthValue};
pub use preorder::{leq, leq_plus};
pub use project::{project, ProjectionError, ProjectionFailure};

#[cfg(test)]
mod tests;
