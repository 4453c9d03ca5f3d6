//! Helpers for unit tests: loading the example corpus.

use std::path::PathBuf;

use crate::parser::{parse_global_in, parse_process_in, parse_session_in};
use crate::session::Session;
use crate::store::{GlobalType, Process, Store};

pub(crate) fn corpus_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn read(name: &str) -> (String, PathBuf) {
    let path = corpus_path(name);
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    (text, path)
}

pub(crate) fn proc_(store: &mut Store, name: &str) -> Process {
    let (text, path) = read(&format!("{name}.proc"));
    parse_process_in(store, &text, &path).unwrap()
}

pub(crate) fn global(store: &mut Store, name: &str) -> GlobalType {
    let (text, path) = read(&format!("{name}.gt"));
    parse_global_in(store, &text, &path).unwrap()
}

pub(crate) fn session(store: &mut Store, name: &str) -> Session {
    let (text, path) = read(&format!("{name}.sess"));
    parse_session_in(store, &text, &path).unwrap()
}
