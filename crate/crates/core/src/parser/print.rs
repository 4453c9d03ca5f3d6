//! Surface-syntax printing. Cycles are cut with `rec X<n>` binders placed at
//! back-edge targets; variables are numbered in the order their binders
//! appear in the text.

use std::collections::HashMap;
use std::hash::Hash;

use crate::names::Label;
use crate::session::Session;
use crate::store::{GlobalNode, GlobalType, ProcNode, Process, Store};

type View<'a, I> = dyn Fn(I) -> Option<(String, Vec<(Label, I)>)> + 'a;

struct Printer<'a, I> {
    view: &'a View<'a, I>,
    end: &'static str,
    next_var: usize,
    path: Vec<(I, Option<String>)>,
}

impl<I: Copy + Eq + Hash> Printer<'_, I> {
    fn go(&mut self, id: I) -> String {
        if let Some(pos) = self.path.iter().position(|(n, _)| *n == id) {
            if self.path[pos].1.is_none() {
                self.path[pos].1 = Some(format!("{MARK}{}{MARK}", self.next_var));
                self.next_var += 1;
            }
            return self.path[pos].1.clone().unwrap();
        }
        let Some((head, branches)) = (self.view)(id) else {
            return self.end.to_string();
        };
        self.path.push((id, None));
        let body = if let [(label, child)] = branches.as_slice() {
            format!("{head}{label} . {}", self.go(*child))
        } else {
            let parts: Vec<String> = branches.iter().map(|(l, c)| format!("{l} . {}", self.go(*c))).collect();
            format!("{head}{{{}}}", parts.join(", "))
        };
        match self.path.pop().and_then(|(_, name)| name) {
            Some(name) => format!("rec {name} . {body}"),
            None => body,
        }
    }
}

// Placeholder delimiting variable numbers until binders are renumbered.
const MARK: char = '\u{1}';

fn print_tree<I: Copy + Eq + Hash>(
    root: I,
    end: &'static str,
    view: &View<'_, I>,
) -> String {
    let raw = Printer { view, end, next_var: 0, path: Vec::new() }.go(root);
    let mut names = HashMap::new();
    let mut pieces = raw.split(MARK);
    let mut out = pieces.next().unwrap_or_default().to_string();
    while let (Some(var), Some(rest)) = (pieces.next(), pieces.next()) {
        let fresh = names.len();
        let n = *names.entry(var.to_string()).or_insert(fresh);
        out.push_str(&format!("X{n}"));
        out.push_str(rest);
    }
    out
}

pub fn print_process(store: &Store, p: Process) -> String {
    print_tree(p, "0", &|n| match store.process(n) {
        ProcNode::End => None,
        ProcNode::Input { peer, branches } => Some((format!("{peer}?"), branches.iter().map(|(l, c)| (l.clone(), c)).collect())),
        ProcNode::Output { peer, branches } => {
            Some((format!("{peer}!"), branches.iter().map(|(l, c)| (l.clone(), c)).collect()))
        }
    })
}

pub fn print_global(store: &Store, g: GlobalType) -> String {
    print_tree(g, "end", &|n| match store.global(n) {
        GlobalNode::End => None,
        GlobalNode::Comm { sender, receiver, branches } => Some((
            format!("{sender} -> {receiver} : "),
            branches.iter().map(|(l, c)| (l.clone(), c)).collect(),
        )),
    })
}

/// One binding per line, joined by `||`.
pub fn print_session(store: &Store, m: &Session) -> String {
    if m.is_empty() {
        return String::new();
    }
    m.iter()
        .map(|(p, proc_)| format!("{p} |> {}", print_process(store, proc_)))
        .collect::<Vec<_>>()
        .join("\n|| ")
}
