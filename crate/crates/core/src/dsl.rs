//! A small definition language for constructor expressions.
//!
//! ```text
//! # the double of F2 along a^2 b a^-1 b^-1
//! F := free(2)
//! D := amalgam(F, F; wl = a^2 b a^-1 b^-1; wr = a^2 b a^-1 b^-1)
//! E := extend(free(2); c = a^2 b a^-1 b^-1; m = 1)
//! H := hnn(F; w1 = a; w2 = b)
//! P := product(abelian(2), F)
//! ```
//!
//! Edge words are written over the generator names of the operand they
//! live in. `m` defaults to 1.

use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

use crate::expr::{EdgeWord, ExprError, GroupExpr, Maximality, Node};
use crate::word::{Word, WordError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DslErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown name `{0}`")]
    UnknownName(String),
    #[error("`{0}` is already defined")]
    DuplicateName(String),
    #[error("`{0}` is a reserved word")]
    Reserved(String),
    #[error("malformed word: {0}")]
    Word(#[from] WordError),
    #[error(transparent)]
    Expr(#[from] ExprError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct DslError {
    pub line: usize,
    pub column: usize,
    pub kind: DslErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: warning: {}", self.line, self.column, self.message)
    }
}

/// Named bindings in definition order.
#[derive(Debug, Clone, Default)]
pub struct Session {
    bindings: Vec<(String, GroupExpr)>,
    pub diagnostics: Vec<Diagnostic>,
    pub source: Option<PathBuf>,
}

impl Session {
    pub fn get(&self, name: &str) -> Option<&GroupExpr> {
        self.bindings.iter().find(|(n, _)| n == name).map(|(_, e)| e)
    }

    pub fn bindings(&self) -> &[(String, GroupExpr)] {
        &self.bindings
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.bindings.iter().map(|(n, _)| n.as_str())
    }

    pub fn last(&self) -> Option<(&str, &GroupExpr)> {
        self.bindings.last().map(|(n, e)| (n.as_str(), e))
    }

    pub fn is_empty(&self) -> bool {
        self.bindings.is_empty()
    }

    pub fn bind(&mut self, name: impl Into<String>, expr: GroupExpr) -> Result<(), DslErrorKind> {
        let name = name.into();
        if KEYWORDS.contains(&name.as_str()) {
            return Err(DslErrorKind::Reserved(name));
        }
        if self.get(&name).is_some() {
            return Err(DslErrorKind::DuplicateName(name));
        }
        self.bindings.push((name, expr));
        Ok(())
    }
}

const KEYWORDS: [&str; 6] = ["free", "abelian", "extend", "amalgam", "hnn", "product"];

/// Writes one definition per line with every expression fully expanded.
pub fn render(session: &Session) -> String {
    session
        .bindings
        .iter()
        .map(|(n, e)| format!("{n} := {e}\n"))
        .collect()
}

pub fn parse_dsl(text: &str) -> Result<Session, DslError> {
    let mut parser = Parser {
        chars: text.chars().collect(),
        pos: 0,
        line: 1,
        column: 1,
        session: Session::default(),
    };
    parser.program()?;
    Ok(parser.session)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
    session: Session,
}

type Pos = (usize, usize);

impl Parser {
    fn here(&self) -> Pos {
        (self.line, self.column)
    }

    fn error<T>(&self, at: Pos, kind: impl Into<DslErrorKind>) -> Result<T, DslError> {
        Err(DslError {
            line: at.0,
            column: at.1,
            kind: kind.into(),
        })
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    /// Skips blanks and comments; newlines too when `newlines` is set.
    fn skip(&mut self, newlines: bool) {
        while let Some(c) = self.peek() {
            match c {
                '#' => {
                    while self.peek().is_some_and(|c| c != '\n') {
                        self.bump();
                    }
                }
                '\n' if !newlines => break,
                c if c.is_whitespace() => {
                    self.bump();
                }
                _ => break,
            }
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), DslError> {
        self.skip(true);
        let at = self.here();
        for want in s.chars() {
            if self.peek() != Some(want) {
                let found = self.peek().map_or("end of input".to_string(), |c| format!("`{c}`"));
                return self.error(at, DslErrorKind::Syntax(format!("expected `{s}`, found {found}")));
            }
            self.bump();
        }
        Ok(())
    }

    fn identifier(&mut self) -> Result<(String, Pos), DslError> {
        self.skip(true);
        let at = self.here();
        let mut s = String::new();
        while let Some(c) = self.peek() {
            let ok = if s.is_empty() {
                c.is_ascii_alphabetic() || c == '_'
            } else {
                c.is_ascii_alphanumeric() || c == '_' || c == '\''
            };
            if !ok {
                break;
            }
            s.push(c);
            self.bump();
        }
        if s.is_empty() {
            let found = self.peek().map_or("end of input".to_string(), |c| format!("`{c}`"));
            return self.error(at, DslErrorKind::Syntax(format!("expected a name, found {found}")));
        }
        Ok((s, at))
    }

    fn integer(&mut self) -> Result<usize, DslError> {
        self.skip(true);
        let at = self.here();
        let mut s = String::new();
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            s.push(c);
            self.bump();
        }
        match s.parse() {
            Ok(n) => Ok(n),
            Err(_) => self.error(at, DslErrorKind::Syntax("expected a non-negative integer".into())),
        }
    }

    fn program(&mut self) -> Result<(), DslError> {
        loop {
            self.skip(true);
            if self.peek().is_none() {
                return Ok(());
            }
            let (name, at) = self.identifier()?;
            self.expect(":=")?;
            let expr = self.expr()?;
            self.skip(false);
            if let Some(c) = self.peek().filter(|&c| c != '\n') {
                let here = self.here();
                return self.error(here, DslErrorKind::Syntax(format!("unexpected `{c}` after definition")));
            }
            if let Err(kind) = self.session.bind(name, expr) {
                return self.error(at, kind);
            }
        }
    }

    fn expr(&mut self) -> Result<GroupExpr, DslError> {
        let (name, at) = self.identifier()?;
        self.skip(false);
        if self.peek() != Some('(') {
            return match self.session.get(&name) {
                Some(e) => Ok(e.clone()),
                None => self.error(at, DslErrorKind::UnknownName(name)),
            };
        }
        self.expect("(")?;
        let built = match name.as_str() {
            "free" => {
                let n = self.integer()?;
                GroupExpr::free(n)
            }
            "abelian" => {
                let n = self.integer()?;
                GroupExpr::free_abelian(n)
            }
            "extend" => {
                let base = self.expr()?;
                self.expect(";")?;
                let c = self.word_field("c", &base)?;
                self.skip(true);
                let m = if self.peek() == Some(';') {
                    self.expect(";")?;
                    self.keyword("m")?;
                    self.expect("=")?;
                    self.integer()?
                } else {
                    1
                };
                GroupExpr::ext_centralizer(base, c, m)
            }
            "amalgam" => {
                let left = self.expr()?;
                self.expect(",")?;
                let right = self.expr()?;
                self.expect(";")?;
                let wl = self.word_field("wl", &left)?;
                self.expect(";")?;
                let wr = self.word_field("wr", &right)?;
                GroupExpr::cyclic_amalgam(left, right, wl, wr)
            }
            "hnn" => {
                let base = self.expr()?;
                self.expect(";")?;
                let w1 = self.word_field("w1", &base)?;
                self.expect(";")?;
                let w2 = self.word_field("w2", &base)?;
                GroupExpr::cyclic_hnn(base, w1, w2)
            }
            "product" => {
                let left = self.expr()?;
                self.expect(",")?;
                let right = self.expr()?;
                GroupExpr::free_product(left, right)
            }
            _ => {
                return self.error(
                    at,
                    DslErrorKind::Syntax(format!("unknown constructor `{name}`")),
                )
            }
        };
        self.expect(")")?;
        match built {
            Ok(e) => {
                self.note_asserted(&e, at);
                Ok(e)
            }
            Err(err) => self.error(at, err),
        }
    }

    fn keyword(&mut self, k: &str) -> Result<(), DslError> {
        let (got, at) = self.identifier()?;
        if got != k {
            return self.error(at, DslErrorKind::Syntax(format!("expected `{k}`, found `{got}`")));
        }
        Ok(())
    }

    /// `key = word`, the word running up to the next `;` or `)`.
    fn word_field(&mut self, key: &str, operand: &GroupExpr) -> Result<Word, DslError> {
        self.keyword(key)?;
        self.expect("=")?;
        self.skip(true);
        let at = self.here();
        let mut text = String::new();
        while let Some(c) = self.peek().filter(|&c| c != ';' && c != ')' && c != '#') {
            text.push(c);
            self.bump();
        }
        if text.trim().is_empty() {
            return self.error(at, DslErrorKind::Syntax(format!("missing word for `{key}`")));
        }
        match Word::parse(&text, operand.presentation().alphabet()) {
            Ok(w) => Ok(w),
            Err(e) => self.error(at, e),
        }
    }

    fn note_asserted(&mut self, e: &GroupExpr, at: Pos) {
        let own: Vec<(&EdgeWord, &GroupExpr)> = match e.node() {
            Node::ExtCentralizer {
                base, centralized, ..
            } => vec![(centralized, base)],
            Node::CyclicAmalgam {
                left,
                right,
                left_word,
                right_word,
            } => vec![(left_word, left), (right_word, right)],
            Node::CyclicHnn { base, word, image } => vec![(word, base), (image, base)],
            _ => Vec::new(),
        };
        for (edge, factor) in own {
            if edge.maximality == Maximality::Asserted {
                self.session.diagnostics.push(Diagnostic {
                    line: at.0,
                    column: at.1,
                    message: format!(
                        "maximality of <{}> is assumed, not checked (factor is neither free nor free abelian)",
                        edge.word.display(factor.presentation().alphabet())
                    ),
                });
            }
        }
    }
}
