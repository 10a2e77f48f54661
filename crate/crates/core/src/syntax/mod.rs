//! Text syntax for exponential polynomials, systems and constraint formulas.
//!
//! ```text
//! term    := sum
//! sum     := ['-'] prod (('+' | '-') prod)*
//! prod    := pow ('*' pow)*
//! pow     := atom ('^' NAT)?
//! atom    := INT | VAR | 'E' '(' term ')' | '(' term ')'
//! VAR     := 'x' NAT | 'y'
//!
//! formula := conj ('|' conj)*
//! conj    := unary ('&' unary)*
//! unary   := '!' unary | '(' formula ')' | term REL term
//! REL     := '=' | '!=' | '<' | '<=' | '>' | '>='
//! ```
//!
//! `a > b` and `a >= b` are read as `b < a` and `b <= a`. Constraint
//! schedules use `c1, c2, ...` in place of `x1, x2, ...` and have no `y`.

mod lexer;
mod print;

use std::collections::BTreeSet;
use std::fmt;

use num_traits::ToPrimitive;
use thiserror::Error;

use crate::exp_poly::{normalize, ExpPolyError, ExpTerm, Var};
use crate::khovanskii::{KhovanskiiSystem, SystemError};
use lexer::{lex, Spanned, Tok, VarStyle};

pub use print::{constraint_source, system_source};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("expected {}, found {found}", expected.join(" or "))]
    Unexpected { expected: Vec<&'static str>, found: String },
    #[error("unexpected character {0:?}")]
    BadCharacter(char),
    #[error("unknown identifier {0:?}")]
    BadIdentifier(String),
    #[error("exponent {0} is too large")]
    BadExponent(String),
    #[error("malformed header: {0}")]
    BadHeader(String),
    #[error("system has {equations} equations in {vars} variables")]
    Arity { equations: usize, vars: usize },
    #[error("variable {0} is outside the declared variables")]
    UnknownVariable(Var),
    #[error("empty system")]
    EmptySystem,
    #[error(transparent)]
    Limit(#[from] ExpPolyError),
}

/// Relation of a constraint atom.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Eq,
    Ne,
    Lt,
    Le,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Eq => "=",
            Relation::Ne => "!=",
            Relation::Lt => "<",
            Relation::Le => "<=",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Atom {
    pub lhs: ExpTerm,
    pub rel: Relation,
    pub rhs: ExpTerm,
}

/// Quantifier-free boolean combination of atoms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ConstraintFormula {
    Atom(Atom),
    And(Box<ConstraintFormula>, Box<ConstraintFormula>),
    Or(Box<ConstraintFormula>, Box<ConstraintFormula>),
    Not(Box<ConstraintFormula>),
}

impl ConstraintFormula {
    pub fn atom(lhs: ExpTerm, rel: Relation, rhs: ExpTerm) -> ConstraintFormula {
        ConstraintFormula::Atom(Atom { lhs, rel, rhs })
    }

    pub fn and(self, other: ConstraintFormula) -> ConstraintFormula {
        ConstraintFormula::And(Box::new(self), Box::new(other))
    }

    pub fn or(self, other: ConstraintFormula) -> ConstraintFormula {
        ConstraintFormula::Or(Box::new(self), Box::new(other))
    }

    pub fn negate(self) -> ConstraintFormula {
        ConstraintFormula::Not(Box::new(self))
    }

    /// Left-nested conjunction; `None` for an empty list.
    pub fn conjunction(items: impl IntoIterator<Item = ConstraintFormula>) -> Option<ConstraintFormula> {
        items.into_iter().reduce(ConstraintFormula::and)
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            ConstraintFormula::Atom(a) => {
                a.lhs.vars(out);
                a.rhs.vars(out);
            }
            ConstraintFormula::And(a, b) | ConstraintFormula::Or(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            ConstraintFormula::Not(a) => a.collect_vars(out),
        }
    }

    pub fn atoms(&self) -> Vec<&Atom> {
        match self {
            ConstraintFormula::Atom(a) => vec![a],
            ConstraintFormula::And(a, b) | ConstraintFormula::Or(a, b) => {
                let mut v = a.atoms();
                v.extend(b.atoms());
                v
            }
            ConstraintFormula::Not(a) => a.atoms(),
        }
    }
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn new(toks: Vec<Spanned>) -> Parser {
        Parser { toks, pos: 0 }
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &[&'static str]) -> ParseError {
        let s = &self.toks[self.pos];
        ParseError {
            line: s.line,
            col: s.col,
            kind: ParseErrorKind::Unexpected { expected: expected.to_vec(), found: s.tok.describe() },
        }
    }

    fn expect(&mut self, tok: Tok, name: &'static str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.error(&[name]))
        }
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::End => Ok(()),
            _ => Err(self.error(&["operator", "end of input"])),
        }
    }

    fn term(&mut self) -> Result<ExpTerm, ParseError> {
        let neg = *self.peek() == Tok::Minus;
        if neg {
            self.bump();
        }
        let first = self.prod()?;
        let mut items = vec![if neg { first.negated() } else { first }];
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    items.push(self.prod()?);
                }
                Tok::Minus => {
                    self.bump();
                    items.push(self.prod()?.negated());
                }
                _ => break,
            }
        }
        Ok(if items.len() == 1 { items.pop().expect("one item") } else { ExpTerm::Sum(items) })
    }

    fn prod(&mut self) -> Result<ExpTerm, ParseError> {
        let mut items = vec![self.pow()?];
        while *self.peek() == Tok::Star {
            self.bump();
            items.push(self.pow()?);
        }
        Ok(if items.len() == 1 { items.pop().expect("one item") } else { ExpTerm::Product(items) })
    }

    fn pow(&mut self) -> Result<ExpTerm, ParseError> {
        let base = self.atom()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let s = &self.toks[self.pos];
        let (line, col) = (s.line, s.col);
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                let e = n.to_u32().ok_or(ParseError { line, col, kind: ParseErrorKind::BadExponent(n.to_string()) })?;
                Ok(ExpTerm::pow(base, e))
            }
            _ => Err(self.error(&["natural-number exponent"])),
        }
    }

    fn atom(&mut self) -> Result<ExpTerm, ParseError> {
        match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                Ok(ExpTerm::Const(n))
            }
            Tok::Var(v) => {
                self.bump();
                Ok(ExpTerm::Var(v))
            }
            Tok::Exp => {
                self.bump();
                self.expect(Tok::LParen, "'('")?;
                let arg = self.term()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(ExpTerm::exp(arg))
            }
            Tok::LParen => {
                self.bump();
                let t = self.term()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(t)
            }
            _ => Err(self.error(&["integer", "variable", "'E'", "'('"])),
        }
    }

    fn formula(&mut self) -> Result<ConstraintFormula, ParseError> {
        let mut f = self.conj()?;
        while *self.peek() == Tok::Or {
            self.bump();
            f = f.or(self.conj()?);
        }
        Ok(f)
    }

    fn conj(&mut self) -> Result<ConstraintFormula, ParseError> {
        let mut f = self.unary()?;
        while *self.peek() == Tok::And {
            self.bump();
            f = f.and(self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<ConstraintFormula, ParseError> {
        match self.peek() {
            Tok::Bang => {
                self.bump();
                Ok(self.unary()?.negate())
            }
            Tok::LParen => {
                // A parenthesis opens either a sub-formula or a term; try the
                // former and fall back if what follows only fits a term.
                let save = self.pos;
                self.bump();
                if let Ok(f) = self.formula() {
                    if *self.peek() == Tok::RParen {
                        self.bump();
                        let term_continues = matches!(
                            self.peek(),
                            Tok::Plus | Tok::Minus | Tok::Star | Tok::Caret | Tok::Eq | Tok::Ne | Tok::Lt | Tok::Le | Tok::Gt | Tok::Ge
                        );
                        if !term_continues {
                            return Ok(f);
                        }
                    }
                }
                self.pos = save;
                self.relation()
            }
            _ => self.relation(),
        }
    }

    fn relation(&mut self) -> Result<ConstraintFormula, ParseError> {
        let lhs = self.term()?;
        let rel = match self.peek() {
            Tok::Eq => Relation::Eq,
            Tok::Ne => Relation::Ne,
            Tok::Lt => Relation::Lt,
            Tok::Le => Relation::Le,
            Tok::Gt | Tok::Ge => {
                let strict = *self.peek() == Tok::Gt;
                self.bump();
                let rhs = self.term()?;
                let rel = if strict { Relation::Lt } else { Relation::Le };
                return Ok(ConstraintFormula::atom(rhs, rel, lhs));
            }
            _ => return Err(self.error(&["'='", "'!='", "'<'", "'<='", "'>'", "'>='"])),
        };
        self.bump();
        let rhs = self.term()?;
        Ok(ConstraintFormula::atom(lhs, rel, rhs))
    }
}

fn parse_term_at(s: &str, line: usize, col: usize, style: VarStyle) -> Result<ExpTerm, ParseError> {
    let mut p = Parser::new(lex(s, line, col, style)?);
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

/// Parse a single term over `y, x1, x2, ...`.
pub fn parse_term(s: &str) -> Result<ExpTerm, ParseError> {
    parse_term_at(s, 1, 1, VarStyle::X)
}

/// Parse a formula over `y, x1, x2, ...`.
pub fn parse_formula(s: &str) -> Result<ConstraintFormula, ParseError> {
    parse_formula_at(s, 1, 1, VarStyle::X)
}

/// Parse a formula over constants `c1, c2, ...`; `ck` is stored as `xk`.
pub fn parse_constraint(s: &str) -> Result<ConstraintFormula, ParseError> {
    parse_formula_at(s, 1, 1, VarStyle::C)
}

pub(crate) fn parse_constraint_at(s: &str, line: usize) -> Result<ConstraintFormula, ParseError> {
    parse_formula_at(s, line, 1, VarStyle::C)
}

fn parse_formula_at(s: &str, line: usize, col: usize, style: VarStyle) -> Result<ConstraintFormula, ParseError> {
    let mut p = Parser::new(lex(s, line, col, style)?);
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

/// Parse a system: an optional `vars: n` header, then one equation per line
/// or `;`-separated. An equation is a term (meaning `term = 0`) or
/// `lhs = rhs`. `#` starts a comment. The system uses `y, x1..x(n-1)` if
/// any equation mentions `y`, else `x1..xn`.
pub fn parse_system(s: &str) -> Result<KhovanskiiSystem, ParseError> {
    parse_system_at(s, 1)
}

pub(crate) fn parse_system_at(s: &str, first_line: usize) -> Result<KhovanskiiSystem, ParseError> {
    let mut declared: Option<(usize, usize)> = None;
    let mut equations: Vec<(ExpTerm, usize, usize)> = Vec::new();
    for (k, raw) in s.lines().enumerate() {
        let line = first_line + k;
        let text = raw.split('#').next().unwrap_or("");
        if text.trim().is_empty() {
            continue;
        }
        if let Some(rest) = text.trim_start().strip_prefix("vars:") {
            if declared.is_some() || !equations.is_empty() {
                return Err(ParseError { line, col: 1, kind: ParseErrorKind::BadHeader("'vars:' must come first".into()) });
            }
            let n: usize = rest
                .trim()
                .parse()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| ParseError { line, col: 1, kind: ParseErrorKind::BadHeader(format!("bad variable count {:?}", rest.trim())) })?;
            declared = Some((n, line));
            continue;
        }
        let mut col = 1;
        for piece in text.split(';') {
            if !piece.trim().is_empty() {
                equations.push((parse_equation(piece, line, col)?, line, col));
            }
            col += piece.chars().count() + 1;
        }
    }
    if equations.is_empty() {
        let line = declared.map_or(first_line, |(_, l)| l);
        return Err(ParseError { line, col: 1, kind: ParseErrorKind::EmptySystem });
    }
    let n = declared.map_or(equations.len(), |(n, _)| n);
    if n != equations.len() {
        let (line, col) = declared.map_or((first_line, 1), |(_, l)| (l, 1));
        return Err(ParseError { line, col, kind: ParseErrorKind::Arity { equations: equations.len(), vars: n } });
    }
    let mut uses_y = false;
    for (t, _, _) in &equations {
        let mut vs = BTreeSet::new();
        t.vars(&mut vs);
        uses_y |= vs.contains(&Var::Y);
    }
    let layout = if uses_y { crate::exp_poly::VarLayout::with_y(n) } else { crate::exp_poly::VarLayout::plain(n) };
    let mut polys = Vec::with_capacity(n);
    for (t, line, col) in &equations {
        let mut vs = BTreeSet::new();
        t.vars(&mut vs);
        if let Some(v) = vs.into_iter().find(|v| layout.index_of(*v).is_none()) {
            return Err(ParseError { line: *line, col: *col, kind: ParseErrorKind::UnknownVariable(v) });
        }
        let p = normalize(t).map_err(|e| ParseError { line: *line, col: *col, kind: e.into() })?;
        polys.push(p);
    }
    KhovanskiiSystem::new(layout, polys).map_err(|e| {
        let kind = match e {
            SystemError::Arity { equations, vars } => ParseErrorKind::Arity { equations, vars },
            SystemError::UnknownVariable(v) => ParseErrorKind::UnknownVariable(v),
            SystemError::Empty => ParseErrorKind::EmptySystem,
        };
        ParseError { line: first_line, col: 1, kind }
    })
}

fn parse_equation(s: &str, line: usize, col: usize) -> Result<ExpTerm, ParseError> {
    let mut p = Parser::new(lex(s, line, col, VarStyle::X)?);
    let lhs = p.term()?;
    if *p.peek() == Tok::Eq {
        p.bump();
        let rhs = p.term()?;
        p.finish()?;
        return Ok(ExpTerm::Sum(vec![lhs, rhs.negated()]));
    }
    match p.peek() {
        Tok::End => Ok(lhs),
        _ => Err(p.error(&["operator", "'='", "end of equation"])),
    }
}
