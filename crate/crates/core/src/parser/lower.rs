//! Ties recursion binders and `let` definitions into node graphs.

use super::syntax::{FileAst, Head, LetBinding, Term, TermKind};
use super::{DiagnosticKind, ParseDiagnostic, SourceSpan};
use crate::store::{AliasCycle, Draft};

pub(super) struct Lowered<I, H> {
    pub drafts: Vec<Draft<I, H>>,
    spans: Vec<SourceSpan>,
}

impl<I, H> Lowered<I, H> {
    pub fn cycle_error(&self, AliasCycle(i): AliasCycle) -> ParseDiagnostic {
        ParseDiagnostic::new(
            self.spans[i].clone(),
            DiagnosticKind::UnguardedRec,
            "recursion is not guarded by a communication",
        )
    }
}

struct Lowerer<'a, I, H> {
    out: Lowered<I, H>,
    head: &'a dyn Fn(&Head) -> H,
}

impl<I, H> Lowerer<'_, I, H> {
    fn push(&mut self, d: Draft<I, H>, span: &SourceSpan) -> usize {
        self.out.drafts.push(d);
        self.out.spans.push(span.clone());
        self.out.drafts.len() - 1
    }

    fn term(&mut self, t: &Term, env: &mut Vec<(String, usize)>) -> Result<usize, ParseDiagnostic> {
        match &t.kind {
            TermKind::End => Ok(self.push(Draft::End, &t.span)),
            TermKind::Var(v) => env.iter().rev().find(|(n, _)| n == v).map(|(_, i)| *i).ok_or_else(|| {
                ParseDiagnostic::new(
                    t.span.clone(),
                    DiagnosticKind::UnboundVar(v.clone()),
                    format!("unbound variable {v}"),
                )
            }),
            TermKind::Rec(var, body) => {
                let r = self.push(Draft::Alias(usize::MAX), &t.span);
                env.push((var.clone(), r));
                let b = self.term(body, env)?;
                env.pop();
                self.out.drafts[r] = Draft::Alias(b);
                Ok(r)
            }
            TermKind::Prefix { head, branches } => {
                let idx = self.push(Draft::End, &t.span);
                let mut children = Vec::with_capacity(branches.len());
                for b in branches {
                    let c = match &b.cont {
                        Some(cont) => self.term(cont, env)?,
                        None => self.push(Draft::End, &t.span),
                    };
                    children.push((b.label.clone(), c));
                }
                self.out.drafts[idx] = Draft::Node { head: (self.head)(head), branches: children };
                Ok(idx)
            }
        }
    }
}

/// Lowers the `let` definitions followed by every body term. Returns the
/// draft index of each body.
pub(super) fn lower<I, H>(
    lets: &[LetBinding],
    bodies: &[&Term],
    head: &dyn Fn(&Head) -> H,
) -> Result<(Lowered<I, H>, Vec<usize>), ParseDiagnostic> {
    let mut lw = Lowerer { out: Lowered { drafts: Vec::new(), spans: Vec::new() }, head };
    let mut env = Vec::new();
    for (i, l) in lets.iter().enumerate() {
        if lets[..i].iter().any(|m| m.name == l.name) {
            return Err(ParseDiagnostic::new(
                l.span.clone(),
                DiagnosticKind::Syntax,
                format!("{} is defined twice", l.name),
            ));
        }
        let slot = lw.push(Draft::Alias(usize::MAX), &l.span);
        env.push((l.name.clone(), slot));
    }
    for (i, l) in lets.iter().enumerate() {
        let b = lw.term(&l.body, &mut env)?;
        lw.out.drafts[i] = Draft::Alias(b);
    }
    let roots = bodies.iter().map(|t| lw.term(t, &mut env)).collect::<Result<Vec<_>, _>>()?;
    Ok((lw.out, roots))
}

pub(super) fn lower_file<I, H>(
    ast: &FileAst<Term>,
    head: &dyn Fn(&Head) -> H,
) -> Result<(Lowered<I, H>, usize), ParseDiagnostic> {
    let (lowered, roots) = lower(&ast.lets, &[&ast.body], head)?;
    Ok((lowered, roots[0]))
}
