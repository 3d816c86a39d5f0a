//! Tokens with source positions, shared by the model language and the
//! transition-system formats.

use std::fmt;

use thiserror::Error;

use crate::scalar::parse_ratio;
use crate::set::Element;
use num_rational::BigRational;

/// 1-based line and column.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Span {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    /// A run of name characters: identifiers, element names and numbers.
    Word(String),
    Sym(&'static str),
    Newline,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Word(w) => f.write_str(w),
            Tok::Sym(s) => f.write_str(s),
            Tok::Newline => f.write_str("end of line"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("{}{span}: {message} (at `{token}`)", file.as_deref().map(|f| format!("{f}:")).unwrap_or_default())]
pub struct ParseError {
    pub file: Option<String>,
    pub span: Span,
    pub message: String,
    pub token: String,
}

impl ParseError {
    pub fn in_file(mut self, file: &str) -> Self {
        self.file = Some(file.to_string());
        self
    }
}

// Longest first, so `<->` wins over `->`.
const SYMBOLS: [&str; 14] = ["<->", "->", "{", "}", "(", ")", ",", ":", ";", "|", "=", "*", "\\", "+"];

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || matches!(c, '_' | '\'' | '.' | '/' | '@')
}

pub fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let chars: Vec<(usize, char)> = line.char_indices().collect();
        let mut k = 0;
        while k < chars.len() {
            let (byte, c) = chars[k];
            let span = Span { line: ln + 1, column: k + 1 };
            if c == '#' {
                break;
            }
            if c.is_whitespace() {
                k += 1;
                continue;
            }
            if is_word_char(c) {
                let start = k;
                while k < chars.len() && is_word_char(chars[k].1) {
                    k += 1;
                }
                let end = chars.get(k).map_or(line.len(), |&(b, _)| b);
                out.push(Token { tok: Tok::Word(line[chars[start].0..end].to_string()), span });
                continue;
            }
            match SYMBOLS.iter().find(|s| line[byte..].starts_with(**s)) {
                Some(s) => {
                    out.push(Token { tok: Tok::Sym(s), span });
                    k += s.chars().count();
                }
                None => {
                    return Err(ParseError {
                        file: None,
                        span,
                        message: "unexpected character".into(),
                        token: c.to_string(),
                    })
                }
            }
        }
        out.push(Token { tok: Tok::Newline, span: Span { line: ln + 1, column: chars.len() + 1 } });
    }
    let line = out.last().map_or(1, |t| t.span.line + 1);
    out.push(Token { tok: Tok::Eof, span: Span { line, column: 1 } });
    Ok(out)
}

/// A token stream with one token of lookahead.
pub struct Cursor {
    tokens: Vec<Token>,
    pos: usize,
}

impl Cursor {
    /// `keep_newlines = false` drops line structure.
    pub fn new(text: &str, keep_newlines: bool) -> Result<Self, ParseError> {
        let mut tokens = lex(text)?;
        if !keep_newlines {
            tokens.retain(|t| t.tok != Tok::Newline);
        }
        Ok(Cursor { tokens, pos: 0 })
    }

    pub fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    pub fn span(&self) -> Span {
        self.peek().span
    }

    pub fn advance(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    pub fn at_eof(&self) -> bool {
        self.peek().tok == Tok::Eof
    }

    pub fn at_sym(&self, s: &str) -> bool {
        matches!(&self.peek().tok, Tok::Sym(x) if *x == s)
    }

    pub fn at_word(&self, w: &str) -> bool {
        matches!(&self.peek().tok, Tok::Word(x) if x == w)
    }

    pub fn at_newline(&self) -> bool {
        matches!(self.peek().tok, Tok::Newline | Tok::Eof)
    }

    pub fn eat_sym(&mut self, s: &str) -> bool {
        let hit = self.at_sym(s);
        if hit {
            self.pos += 1;
        }
        hit
    }

    pub fn skip_newlines(&mut self) {
        while self.peek().tok == Tok::Newline {
            self.pos += 1;
        }
    }

    pub fn error_here(&self, message: impl Into<String>) -> ParseError {
        let t = self.peek();
        ParseError { file: None, span: t.span, message: message.into(), token: t.tok.to_string() }
    }

    pub fn error_at(&self, token: &Token, message: impl Into<String>) -> ParseError {
        ParseError { file: None, span: token.span, message: message.into(), token: token.tok.to_string() }
    }

    pub fn expect_sym(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            Err(self.error_here(format!("expected `{s}`")))
        }
    }

    pub fn expect_word(&mut self, what: &str) -> Result<(String, Span), ParseError> {
        match &self.peek().tok {
            Tok::Word(w) => {
                let out = (w.clone(), self.span());
                self.pos += 1;
                Ok(out)
            }
            _ => Err(self.error_here(format!("expected {what}"))),
        }
    }

    pub fn expect_keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.at_word(kw) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error_here(format!("expected `{kw}`")))
        }
    }

    pub fn expect_newline(&mut self) -> Result<(), ParseError> {
        match self.peek().tok {
            Tok::Newline => {
                self.pos += 1;
                Ok(())
            }
            Tok::Eof => Ok(()),
            _ => Err(self.error_here("expected end of line")),
        }
    }

    /// A declared name: letters, digits, `_` and `'`.
    pub fn name(&mut self, what: &str) -> Result<(String, Span), ParseError> {
        let t = self.peek().clone();
        let (w, span) = self.expect_word(what)?;
        if w.chars().all(|c| c.is_alphanumeric() || c == '_' || c == '\'') {
            Ok((w, span))
        } else {
            Err(self.error_at(&t, format!("`{w}` is not a valid {what}")))
        }
    }

    /// `atom`, `atom@n` or `(element, element)`.
    pub fn element(&mut self) -> Result<Element, ParseError> {
        if self.eat_sym("(") {
            let l = self.element()?;
            self.expect_sym(",")?;
            let r = self.element()?;
            self.expect_sym(")")?;
            return Ok(Element::pair(l, r));
        }
        let t = self.peek().clone();
        let (w, _) = self.expect_word("an element")?;
        let bad = || self.error_at(&t, format!("`{w}` is not a valid element"));
        let (base, tag) = match w.split_once('@') {
            Some((b, n)) => (b, Some(n.parse::<u32>().map_err(|_| bad())?)),
            None => (w.as_str(), None),
        };
        if base.is_empty() || base.contains(['/', '@']) {
            return Err(bad());
        }
        Ok(match tag {
            Some(n) => Element::tagged(n, Element::atom(base)),
            None => Element::atom(base),
        })
    }

    pub fn rational(&mut self) -> Result<BigRational, ParseError> {
        let t = self.peek().clone();
        let (w, _) = self.expect_word("a number")?;
        parse_ratio(&w).ok_or_else(|| self.error_at(&t, format!("`{w}` is not a number")))
    }

    pub fn integer(&mut self) -> Result<u64, ParseError> {
        let t = self.peek().clone();
        let (w, _) = self.expect_word("an integer")?;
        w.parse().map_err(|_| self.error_at(&t, format!("`{w}` is not a positive integer")))
    }
}
