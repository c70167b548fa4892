//! Tokenizer shared by the domain, preference, plan and cost file readers.

use std::fmt;

use thiserror::Error;

/// Source position, 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: {message}")]
pub struct SyntaxError {
    pub pos: Pos,
    pub message: String,
}

impl SyntaxError {
    pub fn new(pos: Pos, message: impl Into<String>) -> Self {
        SyntaxError {
            pos,
            message: message.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Var(String),
    Int(i64),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Dot,
    DotDot,
    Eq,
    Neq,
    Minus,
    Amp,
    AmpAmp,
    Bar,
    BarBar,
    Bang,
    BangBang,
    Lt,
    LtBar,
    LtE,
    LtW,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) | Tok::Var(s) => return write!(f, "`{s}`"),
            Tok::Int(n) => return write!(f, "`{n}`"),
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Comma => ",",
            Tok::Dot => ".",
            Tok::DotDot => "..",
            Tok::Eq => "=",
            Tok::Neq => "!=",
            Tok::Minus => "-",
            Tok::Amp => "&",
            Tok::AmpAmp => "&&",
            Tok::Bar => "|",
            Tok::BarBar => "||",
            Tok::Bang => "!",
            Tok::BangBang => "!!",
            Tok::Lt => "<",
            Tok::LtBar => "<|",
            Tok::LtE => "<e",
            Tok::LtW => "<w",
            Tok::Eof => return write!(f, "end of input"),
        };
        write!(f, "`{s}`")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, SyntaxError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let (mut line, mut col) = (1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos { line, col };
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
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let peek = |k: usize| chars.get(i + k).copied();
        let (tok, len) = if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            let mut j = i;
            while j < chars.len() && is_ident_char(chars[j]) {
                j += 1;
            }
            let s: String = chars[start..j].iter().collect();
            let tok = if c.is_ascii_uppercase() {
                Tok::Var(s)
            } else {
                Tok::Ident(s)
            };
            (tok, j - start)
        } else if c.is_ascii_digit() {
            let start = i;
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let s: String = chars[start..j].iter().collect();
            let n = s
                .parse::<i64>()
                .map_err(|_| SyntaxError::new(pos, format!("integer `{s}` out of range")))?;
            (Tok::Int(n), j - start)
        } else {
            match (c, peek(1)) {
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                ('{', _) => (Tok::LBrace, 1),
                ('}', _) => (Tok::RBrace, 1),
                (',', _) => (Tok::Comma, 1),
                ('.', Some('.')) => (Tok::DotDot, 2),
                ('.', _) => (Tok::Dot, 1),
                ('=', _) => (Tok::Eq, 1),
                ('!', Some('=')) => (Tok::Neq, 2),
                ('!', Some('!')) => (Tok::BangBang, 2),
                ('!', _) => (Tok::Bang, 1),
                ('-', _) => (Tok::Minus, 1),
                ('&', Some('&')) => (Tok::AmpAmp, 2),
                ('&', _) => (Tok::Amp, 1),
                ('|', Some('|')) => (Tok::BarBar, 2),
                ('|', _) => (Tok::Bar, 1),
                ('<', Some('|')) => (Tok::LtBar, 2),
                // `<e`/`<w` only when not the start of an identifier such as `<eventually`
                ('<', Some('e')) if !peek(2).is_some_and(is_ident_char) => (Tok::LtE, 2),
                ('<', Some('w')) if !peek(2).is_some_and(is_ident_char) => (Tok::LtW, 2),
                ('<', _) => (Tok::Lt, 1),
                _ => return Err(SyntaxError::new(pos, format!("unexpected character `{c}`"))),
            }
        };
        out.push(Token { tok, pos });
        i += len;
        col += len;
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: Pos { line, col },
    });
    Ok(out)
}

/// Cursor over a token vector.
pub struct Cursor {
    toks: Vec<Token>,
    idx: usize,
}

impl Cursor {
    pub fn new(src: &str) -> Result<Self, SyntaxError> {
        Ok(Cursor {
            toks: tokenize(src)?,
            idx: 0,
        })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.idx].tok
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        let j = (self.idx + k).min(self.toks.len() - 1);
        &self.toks[j].tok
    }

    pub fn pos(&self) -> Pos {
        self.toks[self.idx].pos
    }

    #[allow(clippy::should_implement_trait)]
    pub fn next(&mut self) -> Token {
        let t = self.toks[self.idx].clone();
        if self.idx + 1 < self.toks.len() {
            self.idx += 1;
        }
        t
    }

    pub fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    pub fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == tok {
            self.next();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, tok: &Tok) -> Result<Pos, SyntaxError> {
        let pos = self.pos();
        if self.eat(tok) {
            Ok(pos)
        } else {
            Err(self.unexpected(&format!("{tok}")))
        }
    }

    pub fn ident(&mut self) -> Result<(String, Pos), SyntaxError> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.next();
                Ok((s, pos))
            }
            _ => Err(self.unexpected("an identifier")),
        }
    }

    pub fn peek_ident(&self) -> Option<&str> {
        match self.peek() {
            Tok::Ident(s) => Some(s),
            _ => None,
        }
    }

    pub fn unexpected(&self, wanted: &str) -> SyntaxError {
        SyntaxError::new(
            self.pos(),
            format!("expected {wanted}, found {}", self.peek()),
        )
    }
}

/// A constant argument: lowercase identifier or integer.
pub fn constant(cur: &mut Cursor) -> Result<String, SyntaxError> {
    match cur.peek().clone() {
        Tok::Ident(s) => {
            cur.next();
            Ok(s)
        }
        Tok::Int(n) => {
            cur.next();
            Ok(n.to_string())
        }
        _ => Err(cur.unexpected("a constant")),
    }
}

/// Ground atom `name` or `name(c1, ..., cn)`.
pub fn ground_atom(cur: &mut Cursor) -> Result<(crate::theory::Atom, Pos), SyntaxError> {
    let (name, pos) = cur.ident()?;
    let mut args = Vec::new();
    if cur.eat(&Tok::LParen) {
        loop {
            args.push(constant(cur)?);
            if !cur.eat(&Tok::Comma) {
                break;
            }
        }
        cur.expect(&Tok::RParen)?;
    }
    Ok((crate::theory::Atom { name, args }, pos))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn lt_variants() {
        assert_eq!(
            toks("a <e b"),
            vec![
                Tok::Ident("a".into()),
                Tok::LtE,
                Tok::Ident("b".into()),
                Tok::Eof
            ]
        );
        assert_eq!(
            toks("a <eventually"),
            vec![
                Tok::Ident("a".into()),
                Tok::Lt,
                Tok::Ident("eventually".into()),
                Tok::Eof
            ]
        );
        assert_eq!(
            toks("<w(<|"),
            vec![Tok::LtW, Tok::LParen, Tok::LtBar, Tok::Eof]
        );
    }

    #[test]
    fn comments_and_positions() {
        let t = tokenize("% hi\n  foo(X).").unwrap();
        assert_eq!(t[0].pos, Pos { line: 2, col: 3 });
        assert_eq!(t[2].tok, Tok::Var("X".into()));
    }

    #[test]
    fn doubled_operators() {
        assert_eq!(
            toks("&& & || | !! ! != .."),
            vec![
                Tok::AmpAmp,
                Tok::Amp,
                Tok::BarBar,
                Tok::Bar,
                Tok::BangBang,
                Tok::Bang,
                Tok::Neq,
                Tok::DotDot,
                Tok::Eof
            ]
        );
    }
}
