//! Surface syntax for processes (`.proc`), global types (`.gt`) and
//! sessions (`.sess`).
//!
//! ```text
//! file    ::= ("let" ident "=" term)* "in" body | body
//! P       ::= "0" | ident "!" Br | ident "?" Br | "rec" ident "." P | ident | "(" P ")"
//! G       ::= "end" | ident "->" ident ":" Br | "rec" ident "." G | ident | "(" G ")"
//! Br      ::= Lbl ["." T] | "{" Lbl ["." T] ("," Lbl ["." T])* "}"
//! session ::= ident "|>" P ("||" ident "|>" P)*
//! ```
//!
//! A branch without continuation ends with the terminated process. `0` and
//! `end` are interchangeable. Line comments start with `//` or `#`.

mod lexer;
mod lower;
mod print;
mod syntax;

use std::fmt;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::names::{Label, Participant};
use crate::session::Session;
use crate::store::{CoreError, GlobalType, ProcHead, Process, Store};
use syntax::{Head, Mode};

pub use print::{print_global, print_process, print_session};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SourceSpan {
    pub file: PathBuf,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file.display(), self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiagnosticKind {
    Syntax,
    UnboundVar(String),
    UnguardedRec,
    DuplicateLabel(Label),
    SelfCommunication(Participant),
    DuplicateParticipant(Participant),
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{span}: {message}")]
pub struct ParseDiagnostic {
    pub span: SourceSpan,
    pub kind: DiagnosticKind,
    pub message: String,
}

impl ParseDiagnostic {
    pub(crate) fn new(span: SourceSpan, kind: DiagnosticKind, message: impl Into<String>) -> Self {
        ParseDiagnostic { span, kind, message: message.into() }
    }
}

const DEFAULT_FILE: &str = "<input>";

fn proc_head(h: &Head) -> ProcHead {
    match h {
        Head::Input(p) => ProcHead::Input(p.clone()),
        Head::Output(p) => ProcHead::Output(p.clone()),
        Head::Comm(..) => unreachable!("global head in process mode"),
    }
}

fn global_head(h: &Head) -> (Participant, Participant) {
    match h {
        Head::Comm(p, q) => (p.clone(), q.clone()),
        _ => unreachable!("process head in global mode"),
    }
}

pub fn parse_process(store: &mut Store, text: &str) -> Result<Process, ParseDiagnostic> {
    parse_process_in(store, text, Path::new(DEFAULT_FILE))
}

pub fn parse_global(store: &mut Store, text: &str) -> Result<GlobalType, ParseDiagnostic> {
    parse_global_in(store, text, Path::new(DEFAULT_FILE))
}

pub fn parse_session(store: &mut Store, text: &str) -> Result<Session, ParseDiagnostic> {
    parse_session_in(store, text, Path::new(DEFAULT_FILE))
}

/// As [`parse_process`], attributing diagnostics to `file`.
pub fn parse_process_in(store: &mut Store, text: &str, file: &Path) -> Result<Process, ParseDiagnostic> {
    let ast = syntax::parse_term_file(text, file, Mode::Process)?;
    let (lowered, root) = lower::lower_file(&ast, &proc_head)?;
    let ids = store.build_processes(&lowered.drafts).map_err(|c| lowered.cycle_error(c))?;
    Ok(ids[root])
}

pub fn parse_global_in(store: &mut Store, text: &str, file: &Path) -> Result<GlobalType, ParseDiagnostic> {
    let ast = syntax::parse_term_file(text, file, Mode::Global)?;
    let (lowered, root) = lower::lower_file(&ast, &global_head)?;
    let ids = store.build_globals(&lowered.drafts).map_err(|c| lowered.cycle_error(c))?;
    Ok(ids[root])
}

pub fn parse_session_in(store: &mut Store, text: &str, file: &Path) -> Result<Session, ParseDiagnostic> {
    let ast = syntax::parse_session_file(text, file)?;
    for (i, b) in ast.body.iter().enumerate() {
        if ast.body[..i].iter().any(|o| o.participant == b.participant) {
            return Err(ParseDiagnostic::new(
                b.span.clone(),
                DiagnosticKind::DuplicateParticipant(b.participant.clone()),
                format!("participant {} is bound twice", b.participant),
            ));
        }
    }
    let terms: Vec<_> = ast.body.iter().map(|b| &b.term).collect();
    let (lowered, roots) = lower::lower(&ast.lets, &terms, &proc_head)?;
    let ids = store.build_processes(&lowered.drafts).map_err(|c| lowered.cycle_error(c))?;
    let bindings = ast.body.iter().zip(&roots).map(|(b, r)| (b.participant.clone(), ids[*r]));
    Session::new(store, bindings).map_err(|e| {
        let (p, kind) = match e {
            CoreError::SelfCommunication(p) => (p.clone(), DiagnosticKind::SelfCommunication(p)),
            CoreError::DuplicateParticipant(p) => (p.clone(), DiagnosticKind::DuplicateParticipant(p)),
            other => unreachable!("session construction cannot fail with {other}"),
        };
        let span = ast.body.iter().find(|b| b.participant == p).unwrap().span.clone();
        ParseDiagnostic::new(span, kind, format!("participant {p} communicates with itself"))
    })
}
