use std::path::Path;

use super::lexer::{tokenize, Tok, Token};
use super::{DiagnosticKind, ParseDiagnostic, SourceSpan};
use crate::names::{Label, Participant};

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub(super) enum Mode {
    Process,
    Global,
}

#[derive(Clone, Debug)]
pub(super) struct Term {
    pub kind: TermKind,
    pub span: SourceSpan,
}

#[derive(Clone, Debug)]
pub(super) enum TermKind {
    End,
    Var(String),
    Rec(String, Box<Term>),
    Prefix { head: Head, branches: Vec<BranchAst> },
}

#[derive(Clone, Debug)]
pub(super) enum Head {
    Input(Participant),
    Output(Participant),
    Comm(Participant, Participant),
}

#[derive(Clone, Debug)]
pub(super) struct BranchAst {
    pub label: Label,
    pub cont: Option<Term>,
}

#[derive(Clone, Debug)]
pub(super) struct LetBinding {
    pub name: String,
    pub span: SourceSpan,
    pub body: Term,
}

#[derive(Clone, Debug)]
pub(super) struct SessionBinding {
    pub participant: Participant,
    pub span: SourceSpan,
    pub term: Term,
}

#[derive(Clone, Debug)]
pub(super) struct FileAst<B> {
    pub lets: Vec<LetBinding>,
    pub body: B,
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    mode: Mode,
}

type PResult<T> = Result<T, ParseDiagnostic>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        let i = (self.pos + offset).min(self.tokens.len() - 1);
        &self.tokens[i].tok
    }

    fn span(&self) -> SourceSpan {
        self.tokens[self.pos].span.clone()
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn unexpected<T>(&self, expected: &str) -> PResult<T> {
        Err(ParseDiagnostic::new(
            self.span(),
            DiagnosticKind::Syntax,
            format!("expected {expected}, found {}", self.peek().describe()),
        ))
    }

    fn expect(&mut self, tok: Tok) -> PResult<SourceSpan> {
        if *self.peek() == tok {
            Ok(self.bump().span)
        } else {
            self.unexpected(&tok.describe())
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, SourceSpan)> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                let span = self.bump().span;
                Ok((s, span))
            }
            _ => self.unexpected(what),
        }
    }

    fn lets(&mut self) -> PResult<Vec<LetBinding>> {
        let mut lets = Vec::new();
        while *self.peek() == Tok::Let {
            self.bump();
            let (name, span) = self.ident("a definition name")?;
            self.expect(Tok::Eq)?;
            let body = self.term()?;
            lets.push(LetBinding { name, span, body });
        }
        if !lets.is_empty() {
            self.expect(Tok::In)?;
        }
        Ok(lets)
    }

    fn term(&mut self) -> PResult<Term> {
        let span = self.span();
        match self.peek().clone() {
            Tok::Zero | Tok::End => {
                self.bump();
                Ok(Term { kind: TermKind::End, span })
            }
            Tok::Rec => {
                self.bump();
                let (var, _) = self.ident("a recursion variable")?;
                self.expect(Tok::Dot)?;
                let body = self.term()?;
                Ok(Term { kind: TermKind::Rec(var, Box::new(body)), span })
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            Tok::Ident(name) => {
                let next = self.peek_at(1).clone();
                match (self.mode, next) {
                    (Mode::Process, Tok::Bang | Tok::Query) => {
                        self.bump();
                        let peer = Participant::new(&name);
                        let head = if self.bump().tok == Tok::Bang {
                            Head::Output(peer)
                        } else {
                            Head::Input(peer)
                        };
                        let branches = self.branches()?;
                        Ok(Term { kind: TermKind::Prefix { head, branches }, span })
                    }
                    (Mode::Global, Tok::Arrow) => {
                        self.bump();
                        self.bump();
                        let (receiver, _) = self.ident("a receiver")?;
                        self.expect(Tok::Colon)?;
                        if name == receiver {
                            return Err(ParseDiagnostic::new(
                                span,
                                DiagnosticKind::SelfCommunication(Participant::new(&name)),
                                format!("participant {name} sends to itself"),
                            ));
                        }
                        let head = Head::Comm(Participant::new(&name), Participant::new(&receiver));
                        let branches = self.branches()?;
                        Ok(Term { kind: TermKind::Prefix { head, branches }, span })
                    }
                    (Mode::Process, Tok::Arrow) => {
                        self.bump();
                        self.unexpected("`!` or `?` in a process")
                    }
                    (Mode::Global, Tok::Bang | Tok::Query) => {
                        self.bump();
                        self.unexpected("`->` in a global type")
                    }
                    _ => {
                        self.bump();
                        Ok(Term { kind: TermKind::Var(name), span })
                    }
                }
            }
            _ => self.unexpected("a term"),
        }
    }

    fn branches(&mut self) -> PResult<Vec<BranchAst>> {
        if *self.peek() != Tok::LBrace {
            return Ok(vec![self.branch()?]);
        }
        self.bump();
        let mut out: Vec<BranchAst> = Vec::new();
        loop {
            let span = self.span();
            let b = self.branch()?;
            if out.iter().any(|o| o.label == b.label) {
                return Err(ParseDiagnostic::new(
                    span,
                    DiagnosticKind::DuplicateLabel(b.label.clone()),
                    format!("label {} occurs twice in one choice", b.label),
                ));
            }
            out.push(b);
            match self.peek() {
                Tok::Comma => {
                    self.bump();
                }
                Tok::RBrace => {
                    self.bump();
                    return Ok(out);
                }
                _ => return self.unexpected("`,` or `}`"),
            }
        }
    }

    fn branch(&mut self) -> PResult<BranchAst> {
        let (label, _) = self.ident("a label")?;
        let cont = if *self.peek() == Tok::Dot {
            self.bump();
            Some(self.term()?)
        } else {
            None
        };
        Ok(BranchAst { label: Label::new(&label), cont })
    }

    fn session(&mut self) -> PResult<Vec<SessionBinding>> {
        let mut out = Vec::new();
        if *self.peek() == Tok::Eof {
            return Ok(out);
        }
        loop {
            let (name, span) = self.ident("a participant")?;
            self.expect(Tok::Bind)?;
            let term = self.term()?;
            out.push(SessionBinding { participant: Participant::new(&name), span, term });
            match self.peek() {
                Tok::Par | Tok::Comma => {
                    self.bump();
                }
                _ => return Ok(out),
            }
        }
    }
}

fn parser(text: &str, file: &Path, mode: Mode) -> PResult<Parser> {
    Ok(Parser { tokens: tokenize(text, file)?, pos: 0, mode })
}

pub(super) fn parse_term_file(text: &str, file: &Path, mode: Mode) -> PResult<FileAst<Term>> {
    let mut p = parser(text, file, mode)?;
    let lets = p.lets()?;
    let body = p.term()?;
    p.expect(Tok::Eof)?;
    Ok(FileAst { lets, body })
}

pub(super) fn parse_session_file(text: &str, file: &Path) -> PResult<FileAst<Vec<SessionBinding>>> {
    let mut p = parser(text, file, Mode::Process)?;
    let lets = p.lets()?;
    let body = p.session()?;
    p.expect(Tok::Eof)?;
    Ok(FileAst { lets, body })
}
