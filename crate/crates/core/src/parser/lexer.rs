use super::{DiagnosticKind, ParseDiagnostic, SourceSpan};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(super) enum Tok {
    Ident(String),
    Zero,
    End,
    Rec,
    Let,
    In,
    Bang,
    Query,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Dot,
    Arrow,
    Colon,
    Bind,
    Par,
    Eq,
    Eof,
}

impl Tok {
    pub(super) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Zero => "`0`".into(),
            Tok::End => "`end`".into(),
            Tok::Rec => "`rec`".into(),
            Tok::Let => "`let`".into(),
            Tok::In => "`in`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Query => "`?`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Bind => "`|>`".into(),
            Tok::Par => "`||`".into(),
            Tok::Eq => "`=`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub(super) struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

pub(super) fn tokenize(text: &str, file: &std::path::Path) -> Result<Vec<Token>, ParseDiagnostic> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let span = |line, column| SourceSpan { file: file.to_path_buf(), line, column };
    while i < chars.len() {
        let c = chars[i];
        let start = span(line, col);
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') || c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let from = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[from..i].iter().collect();
            col += i - from;
            let tok = match word.as_str() {
                "end" => Tok::End,
                "rec" => Tok::Rec,
                "let" => Tok::Let,
                "in" => Tok::In,
                _ => Tok::Ident(word),
            };
            out.push(Token { tok, span: start });
            continue;
        }
        let two: String = chars[i..(i + 2).min(chars.len())].iter().collect();
        let (tok, len) = match (c, two.as_str()) {
            (_, "->") => (Tok::Arrow, 2),
            (_, "|>") => (Tok::Bind, 2),
            (_, "||") => (Tok::Par, 2),
            ('0', _) => (Tok::Zero, 1),
            ('!', _) => (Tok::Bang, 1),
            ('?', _) => (Tok::Query, 1),
            ('{', _) => (Tok::LBrace, 1),
            ('}', _) => (Tok::RBrace, 1),
            ('(', _) => (Tok::LParen, 1),
            (')', _) => (Tok::RParen, 1),
            (',', _) => (Tok::Comma, 1),
            ('.', _) => (Tok::Dot, 1),
            (':', _) => (Tok::Colon, 1),
            ('=', _) => (Tok::Eq, 1),
            _ => {
                return Err(ParseDiagnostic::new(
                    start,
                    DiagnosticKind::Syntax,
                    format!("unexpected character {c:?}"),
                ))
            }
        };
        if tok == Tok::Zero && chars.get(i + 1).is_some_and(|d| d.is_ascii_alphanumeric() || *d == '_') {
            return Err(ParseDiagnostic::new(start, DiagnosticKind::Syntax, "identifiers cannot start with a digit"));
        }
        i += len;
        col += len;
        out.push(Token { tok, span: start });
    }
    out.push(Token { tok: Tok::Eof, span: span(line, col) });
    Ok(out)
}
