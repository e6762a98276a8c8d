//! Propositional formulas, quantifier prefixes and quantified theories.
//!
//! Negation and truth are not constructors: `~f` is `f -> bot` and `true`
//! is `bot -> bot`. The concrete syntax is handled by [`parse_theory`] and
//! the [`Display`](fmt::Display) impl of [`Formula`].

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

const KEYWORDS: [&str; 5] = ["exists", "forall", "bot", "false", "true"];

/// A propositional variable, named by `[a-z][A-Za-z0-9_]*`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom(Arc<str>);

impl Atom {
    pub fn new(name: &str) -> Result<Atom> {
        let mut chars = name.chars();
        let valid = matches!(chars.next(), Some('a'..='z'))
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
            && !KEYWORDS.contains(&name);
        if valid {
            Ok(Atom(Arc::from(name)))
        } else {
            Err(Error::InvalidAtom(name.to_string()))
        }
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::str::FromStr for Atom {
    type Err = Error;

    fn from_str(s: &str) -> Result<Atom> {
        Atom::new(s)
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Formula {
    Bot,
    Var(Atom),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
}

impl Formula {
    /// Variable with the given name.
    ///
    /// Panics on an invalid name; use [`Atom::new`] for fallible construction.
    pub fn var(name: &str) -> Formula {
        Formula::Var(Atom::new(name).expect("invalid atom name"))
    }

    pub fn top() -> Formula {
        Formula::implies(Formula::Bot, Formula::Bot)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(f: Formula) -> Formula {
        Formula::implies(f, Formula::Bot)
    }

    pub fn and(l: Formula, r: Formula) -> Formula {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Formula {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn implies(l: Formula, r: Formula) -> Formula {
        Formula::Implies(Box::new(l), Box::new(r))
    }

    /// If this is `f -> bot`, returns `f`.
    pub fn as_negation(&self) -> Option<&Formula> {
        match self {
            Formula::Implies(l, r) if **r == Formula::Bot => Some(l),
            _ => None,
        }
    }

    pub fn is_top(&self) -> bool {
        matches!(self.as_negation(), Some(Formula::Bot))
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    pub fn collect_atoms(&self, out: &mut BTreeSet<Atom>) {
        match self {
            Formula::Bot => {}
            Formula::Var(a) => {
                out.insert(a.clone());
            }
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) => {
                l.collect_atoms(out);
                r.collect_atoms(out);
            }
        }
    }

    // 1: ->, 2: |, 3: &, 4: ~ and atoms
    fn precedence(&self) -> u8 {
        match self {
            _ if self.as_negation().is_some() => 4,
            Formula::Bot | Formula::Var(_) => 4,
            Formula::And(..) => 3,
            Formula::Or(..) => 2,
            Formula::Implies(..) => 1,
        }
    }

    fn fmt_prec(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let parens = self.precedence() < min;
        if parens {
            f.write_str("(")?;
        }
        if self.is_top() {
            f.write_str("true")?;
        } else if let Some(inner) = self.as_negation() {
            f.write_str("~")?;
            inner.fmt_prec(f, 4)?;
        } else {
            match self {
                Formula::Bot => f.write_str("bot")?,
                Formula::Var(a) => write!(f, "{a}")?,
                Formula::And(l, r) => {
                    l.fmt_prec(f, 3)?;
                    f.write_str(" & ")?;
                    r.fmt_prec(f, 4)?;
                }
                Formula::Or(l, r) => {
                    l.fmt_prec(f, 2)?;
                    f.write_str(" | ")?;
                    r.fmt_prec(f, 3)?;
                }
                Formula::Implies(l, r) => {
                    l.fmt_prec(f, 2)?;
                    f.write_str(" -> ")?;
                    r.fmt_prec(f, 1)?;
                }
            }
        }
        if parens {
            f.write_str(")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_prec(f, 1)
    }
}

/// Renders a formula in the concrete syntax accepted by [`parse_formula`].
pub fn print_formula(f: &Formula) -> String {
    f.to_string()
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Quantifier {
    Exists,
    Forall,
}

impl Quantifier {
    pub fn keyword(self) -> &'static str {
        match self {
            Quantifier::Exists => "exists",
            Quantifier::Forall => "forall",
        }
    }
}

/// The quantifier prefix `Q1 x1 ... Qn xn`, outermost first.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Binder {
    entries: Vec<(Quantifier, Atom)>,
}

impl Binder {
    pub fn empty() -> Binder {
        Binder::default()
    }

    pub fn new(entries: Vec<(Quantifier, Atom)>) -> Result<Binder> {
        let mut seen = BTreeSet::new();
        for (_, x) in &entries {
            if !seen.insert(x.clone()) {
                return Err(Error::DuplicateBinder(x.clone()));
            }
        }
        Ok(Binder { entries })
    }

    /// Builds a binder from `(quantifier, name)` pairs; panics on invalid input.
    pub fn of(entries: &[(Quantifier, &str)]) -> Binder {
        let entries = entries
            .iter()
            .map(|&(q, x)| (q, Atom::new(x).expect("invalid atom name")))
            .collect();
        Binder::new(entries).expect("duplicate binder variable")
    }

    pub fn entries(&self) -> &[(Quantifier, Atom)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Splits off the outermost entry.
    pub fn split_first(&self) -> Option<((Quantifier, &Atom), Binder)> {
        let ((q, x), rest) = self.entries.split_first()?;
        Some((
            (*q, x),
            Binder {
                entries: rest.to_vec(),
            },
        ))
    }

    pub fn atoms(&self) -> BTreeSet<Atom> {
        self.entries.iter().map(|(_, x)| x.clone()).collect()
    }

    pub fn binds(&self, x: &Atom) -> bool {
        self.entries.iter().any(|(_, y)| y == x)
    }
}

impl fmt::Display for Binder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return f.write_str("eps");
        }
        for (i, (q, x)) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{} {x}.", q.keyword())?;
        }
        Ok(())
    }
}

/// A binder over a list of quantifier-free formulas. The matrix is a theory:
/// its value is the minimum over its members.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct QuantifiedTheory {
    pub binder: Binder,
    pub matrix: Vec<Formula>,
}

impl QuantifiedTheory {
    pub fn new(binder: Binder, matrix: Vec<Formula>) -> QuantifiedTheory {
        QuantifiedTheory { binder, matrix }
    }

    pub fn matrix_atoms(&self) -> BTreeSet<Atom> {
        matrix_atoms(&self.matrix)
    }

    /// Matrix atoms not bound by the binder.
    pub fn free_atoms(&self) -> BTreeSet<Atom> {
        self.matrix_atoms()
            .into_iter()
            .filter(|a| !self.binder.binds(a))
            .collect()
    }

    /// Binder atoms together with matrix atoms.
    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = self.binder.atoms();
        out.extend(self.matrix_atoms());
        out
    }
}

impl fmt::Display for QuantifiedTheory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.binder.is_empty() {
            writeln!(f, "{}", self.binder)?;
        }
        for phi in &self.matrix {
            writeln!(f, "{phi}.")?;
        }
        Ok(())
    }
}

pub fn matrix_atoms(matrix: &[Formula]) -> BTreeSet<Atom> {
    let mut out = BTreeSet::new();
    for f in matrix {
        f.collect_atoms(&mut out);
    }
    out
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    /// Accept matrix atoms that the binder does not quantify.
    pub allow_free: bool,
}

pub fn parse_theory(text: &str) -> Result<QuantifiedTheory> {
    parse_theory_with(text, ParseOptions::default())
}

pub fn parse_theory_with(text: &str, options: ParseOptions) -> Result<QuantifiedTheory> {
    let mut p = Parser::new(text)?;
    let mut entries = Vec::new();
    loop {
        let q = match p.peek() {
            Tok::Exists => Quantifier::Exists,
            Tok::Forall => Quantifier::Forall,
            _ => break,
        };
        p.bump();
        let (line, column) = p.position();
        let x = match p.bump() {
            Tok::Ident(name) => Atom::new(&name).map_err(|_| p.error_at(line, column, "bad identifier"))?,
            other => return Err(p.error_at(line, column, &format!("expected variable, found {other}"))),
        };
        if entries.iter().any(|(_, y)| *y == x) {
            return Err(Error::DuplicateBinder(x));
        }
        p.expect(Tok::Dot)?;
        entries.push((q, x));
    }
    let binder = Binder { entries };

    let mut matrix = Vec::new();
    while p.peek() != Tok::Eof {
        matrix.push(p.implication()?);
        p.expect(Tok::Dot)?;
    }
    if matrix.is_empty() {
        let (line, column) = p.position();
        return Err(p.error_at(line, column, "expected at least one formula"));
    }

    let theory = QuantifiedTheory { binder, matrix };
    if !options.allow_free {
        if let Some(a) = theory.free_atoms().into_iter().next() {
            return Err(Error::FreeVariable(a));
        }
    }
    Ok(theory)
}

/// Parses a single formula, optionally terminated by `.`.
pub fn parse_formula(text: &str) -> Result<Formula> {
    let mut p = Parser::new(text)?;
    let f = p.implication()?;
    if p.peek() == Tok::Dot {
        p.bump();
    }
    if p.peek() != Tok::Eof {
        let (line, column) = p.position();
        return Err(p.error_at(line, column, &format!("unexpected {}", p.peek())));
    }
    Ok(f)
}

#[derive(Clone, PartialEq, Eq, Debug)]
enum Tok {
    Ident(String),
    Exists,
    Forall,
    Bot,
    True,
    Dot,
    Neg,
    And,
    Or,
    Arrow,
    LParen,
    RParen,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{s}`"),
            Tok::Exists => f.write_str("`exists`"),
            Tok::Forall => f.write_str("`forall`"),
            Tok::Bot => f.write_str("`bot`"),
            Tok::True => f.write_str("`true`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Neg => f.write_str("`~`"),
            Tok::And => f.write_str("`&`"),
            Tok::Or => f.write_str("`|`"),
            Tok::Arrow => f.write_str("`->`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

struct Parser {
    toks: Vec<(Tok, usize, usize)>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Result<Parser> {
        Ok(Parser {
            toks: lex(text)?,
            pos: 0,
        })
    }

    fn peek(&self) -> Tok {
        self.toks[self.pos].0.clone()
    }

    fn position(&self) -> (usize, usize) {
        let (_, l, c) = self.toks[self.pos];
        (l, c)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, line: usize, column: usize, message: &str) -> Error {
        Error::Syntax {
            line,
            column,
            message: message.to_string(),
        }
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        let (line, column) = self.position();
        let got = self.bump();
        if got == want {
            Ok(())
        } else {
            Err(self.error_at(line, column, &format!("expected {want}, found {got}")))
        }
    }

    fn implication(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if self.peek() == Tok::Arrow {
            self.bump();
            let rhs = self.implication()?;
            Ok(Formula::implies(lhs, rhs))
        } else {
            Ok(lhs)
        }
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut f = self.conjunction()?;
        while self.peek() == Tok::Or {
            self.bump();
            f = Formula::or(f, self.conjunction()?);
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut f = self.negation()?;
        while self.peek() == Tok::And {
            self.bump();
            f = Formula::and(f, self.negation()?);
        }
        Ok(f)
    }

    fn negation(&mut self) -> Result<Formula> {
        if self.peek() == Tok::Neg {
            self.bump();
            Ok(Formula::neg(self.negation()?))
        } else {
            self.primary()
        }
    }

    fn primary(&mut self) -> Result<Formula> {
        let (line, column) = self.position();
        match self.bump() {
            Tok::Ident(name) => Atom::new(&name)
                .map(Formula::Var)
                .map_err(|_| self.error_at(line, column, &format!("invalid atom `{name}`"))),
            Tok::Bot => Ok(Formula::Bot),
            Tok::True => Ok(Formula::top()),
            Tok::LParen => {
                let f = self.implication()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            other => Err(self.error_at(line, column, &format!("expected formula, found {other}"))),
        }
    }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize, usize)>> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);
    while let Some(&c) = chars.peek() {
        let (l0, c0) = (line, col);
        let mut advance = |chars: &mut std::iter::Peekable<std::str::Chars<'_>>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            c
        };
        match c {
            c if c.is_whitespace() => {
                advance(&mut chars);
            }
            '%' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    advance(&mut chars);
                }
            }
            '.' | '~' | '&' | '|' | '(' | ')' => {
                advance(&mut chars);
                let tok = match c {
                    '.' => Tok::Dot,
                    '~' => Tok::Neg,
                    '&' => Tok::And,
                    '|' => Tok::Or,
                    '(' => Tok::LParen,
                    _ => Tok::RParen,
                };
                out.push((tok, l0, c0));
            }
            '-' => {
                advance(&mut chars);
                if chars.peek() == Some(&'>') {
                    advance(&mut chars);
                    out.push((Tok::Arrow, l0, c0));
                } else {
                    return Err(Error::Syntax {
                        line: l0,
                        column: c0,
                        message: "expected `->`".into(),
                    });
                }
            }
            c if c.is_ascii_alphabetic() => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        word.push(c);
                        advance(&mut chars);
                    } else {
                        break;
                    }
                }
                let tok = match word.as_str() {
                    "exists" => Tok::Exists,
                    "forall" => Tok::Forall,
                    "bot" | "false" => Tok::Bot,
                    "true" => Tok::True,
                    _ if word.starts_with(|c: char| c.is_ascii_lowercase()) => Tok::Ident(word),
                    _ => {
                        return Err(Error::Syntax {
                            line: l0,
                            column: c0,
                            message: format!("identifiers must start with a lowercase letter: `{word}`"),
                        })
                    }
                };
                out.push((tok, l0, c0));
            }
            other => {
                return Err(Error::Syntax {
                    line: l0,
                    column: c0,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    out.push((Tok::Eof, line, col));
    Ok(out)
}
