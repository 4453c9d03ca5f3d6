//! Interface compatibility, gateways and the connection of sessions and of
//! global types.

mod cn;
mod compat;
mod gateway;
mod sessions;
mod verify;

use thiserror::Error;

use crate::names::Participant;
use crate::typing::{ProjectionError, TypingError, TypingReport};

pub use cn::{compatible_globals, connect_globals, connect_globals_with, ClauseOrder, CnKey, StarMarker};
pub use compat::compatible;
pub use gateway::gateway;
pub use sessions::{compatible_sessions, connect_sessions};
pub use verify::{max_depth, verify_connection, ConnectionReport, DepthBound, ProjectionCheck};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ComposeError {
    #[error("participant {0} already occurs in the process")]
    ParticipantCollision(Participant),
    #[error("sessions cannot be connected through {h} and {k}")]
    IncompatibleSessions { h: Participant, k: Participant },
    #[error("global types cannot be connected through {h} and {k}")]
    IncompatibleGlobals { h: Participant, k: Participant },
    #[error("a component session is not typed by its global type")]
    UntypedComponent(TypingReport),
    #[error(transparent)]
    Projection(#[from] ProjectionError),
    #[error(transparent)]
    Typing(#[from] TypingError),
    #[error("no connection clause applies to {0}")]
    NoClauseApplies(CnKey),
}
