//! Exponential polynomials with integer coefficients.
//!
//! An [`ExpTerm`] is a raw expression tree. [`normalize`] turns it into a
//! [`CanonicalPoly`]: a sorted sum of monomials `c * x^a * E(q)`, where all
//! exponential factors of a monomial are merged into a single atom `E(q)`
//! with `q` itself canonical and nonzero. Because `E(a)E(b) = E(a+b)` is
//! applied eagerly, `E(a+b)` and `E(a)*E(b)` have the same normal form.
//!
//! Structural equality of canonical polynomials is ring equality modulo the
//! exponential law; it does not decide equalities that need
//! transcendence-theoretic input (e.g. `E(1) - 3 = 0` is not decided here,
//! only evaluated numerically).

mod calculus;

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

pub use calculus::Complexity;

/// A variable: `y` or `x1, x2, ...`. `y` orders before every `x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    Y,
    X(u32),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::Y => f.write_str("y"),
            Var::X(i) => write!(f, "x{}", i),
        }
    }
}

/// How variables map to coordinate positions: `x1..xn`, or `y, x1..x(n-1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct VarLayout {
    has_y: bool,
    len: usize,
}

impl VarLayout {
    /// `x1, ..., xn`.
    pub fn plain(n: usize) -> VarLayout {
        VarLayout { has_y: false, len: n }
    }

    /// `y, x1, ..., x(n-1)`; `n` counts `y`.
    pub fn with_y(n: usize) -> VarLayout {
        assert!(n >= 1, "layout with y needs at least one slot");
        VarLayout { has_y: true, len: n }
    }

    pub fn has_y(&self) -> bool {
        self.has_y
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn index_of(&self, v: Var) -> Option<usize> {
        let i = match (v, self.has_y) {
            (Var::Y, true) => 0,
            (Var::Y, false) => return None,
            (Var::X(k), true) => k as usize,
            (Var::X(k), false) => (k as usize).checked_sub(1)?,
        };
        (i < self.len).then_some(i)
    }

    pub fn var_at(&self, i: usize) -> Var {
        assert!(i < self.len, "coordinate out of range");
        match (self.has_y, i) {
            (true, 0) => Var::Y,
            (true, i) => Var::X(i as u32),
            (false, i) => Var::X(i as u32 + 1),
        }
    }

    pub fn vars(&self) -> Vec<Var> {
        (0..self.len).map(|i| self.var_at(i)).collect()
    }
}

/// A raw exponential-polynomial expression.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ExpTerm {
    Const(BigInt),
    Var(Var),
    Sum(Vec<ExpTerm>),
    Product(Vec<ExpTerm>),
    Pow(Box<ExpTerm>, u32),
    Exp(Box<ExpTerm>),
}

impl ExpTerm {
    pub fn int(v: i64) -> ExpTerm {
        ExpTerm::Const(BigInt::from(v))
    }

    pub fn x(i: u32) -> ExpTerm {
        ExpTerm::Var(Var::X(i))
    }

    pub fn exp(arg: ExpTerm) -> ExpTerm {
        ExpTerm::Exp(Box::new(arg))
    }

    pub fn pow(base: ExpTerm, n: u32) -> ExpTerm {
        ExpTerm::Pow(Box::new(base), n)
    }

    /// Negation in the shape the parser produces: constants absorb the sign,
    /// products get a leading `-1`/negated constant factor.
    pub fn negated(self) -> ExpTerm {
        match self {
            ExpTerm::Const(c) => ExpTerm::Const(-c),
            ExpTerm::Product(mut fs) => {
                match fs.first_mut() {
                    Some(ExpTerm::Const(c)) => *c = -&*c,
                    _ => fs.insert(0, ExpTerm::int(-1)),
                }
                ExpTerm::Product(fs)
            }
            t => ExpTerm::Product(vec![ExpTerm::int(-1), t]),
        }
    }

    /// Maximum nesting depth of the tree.
    pub fn depth(&self) -> usize {
        match self {
            ExpTerm::Const(_) | ExpTerm::Var(_) => 1,
            ExpTerm::Sum(ts) | ExpTerm::Product(ts) => 1 + ts.iter().map(ExpTerm::depth).max().unwrap_or(0),
            ExpTerm::Pow(b, _) => 1 + b.depth(),
            ExpTerm::Exp(a) => 1 + a.depth(),
        }
    }

    /// Maximum nesting of `E` nodes.
    pub fn tower_height(&self) -> usize {
        match self {
            ExpTerm::Const(_) | ExpTerm::Var(_) => 0,
            ExpTerm::Sum(ts) | ExpTerm::Product(ts) => ts.iter().map(ExpTerm::tower_height).max().unwrap_or(0),
            ExpTerm::Pow(b, _) => b.tower_height(),
            ExpTerm::Exp(a) => 1 + a.tower_height(),
        }
    }

    pub fn vars(&self, out: &mut std::collections::BTreeSet<Var>) {
        match self {
            ExpTerm::Const(_) => {}
            ExpTerm::Var(v) => {
                out.insert(*v);
            }
            ExpTerm::Sum(ts) | ExpTerm::Product(ts) => ts.iter().for_each(|t| t.vars(out)),
            ExpTerm::Pow(b, _) => b.vars(out),
            ExpTerm::Exp(a) => a.vars(out),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExpPolyError {
    #[error("expression depth {depth} exceeds the configured limit {limit}")]
    DepthLimit { depth: usize, limit: usize },
    #[error("{count} monomials exceed the configured limit {limit}")]
    SizeLimit { count: usize, limit: usize },
    #[error("variable {0} has no assignment")]
    MissingVariable(Var),
}

/// Resource limits for normalization and arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_depth: usize,
    pub max_monomials: usize,
}

impl Default for Limits {
    fn default() -> Limits {
        Limits { max_depth: 32, max_monomials: 1_000_000 }
    }
}

impl Limits {
    fn check(&self, p: &CanonicalPoly) -> Result<(), ExpPolyError> {
        if p.terms.len() > self.max_monomials {
            return Err(ExpPolyError::SizeLimit { count: p.terms.len(), limit: self.max_monomials });
        }
        Ok(())
    }
}

/// The coefficient-free part of a monomial: `x^a * E(q)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MonoKey {
    powers: Vec<(Var, u32)>,
    exp: Option<Arc<CanonicalPoly>>,
}

impl MonoKey {
    pub fn one() -> MonoKey {
        MonoKey { powers: Vec::new(), exp: None }
    }

    pub fn powers(&self) -> &[(Var, u32)] {
        &self.powers
    }

    /// Argument of the exponential factor, if any.
    pub fn exp_arg(&self) -> Option<&CanonicalPoly> {
        self.exp.as_deref()
    }

    pub fn degree(&self) -> u64 {
        self.powers.iter().map(|&(_, e)| e as u64).sum()
    }

    fn mul(&self, other: &MonoKey) -> MonoKey {
        let mut powers = Vec::with_capacity(self.powers.len() + other.powers.len());
        let (mut i, mut j) = (0, 0);
        while i < self.powers.len() || j < other.powers.len() {
            match (self.powers.get(i), other.powers.get(j)) {
                (Some(&(va, ea)), Some(&(vb, eb))) if va == vb => {
                    powers.push((va, ea + eb));
                    i += 1;
                    j += 1;
                }
                (Some(&a), Some(&b)) => {
                    if a.0 < b.0 {
                        powers.push(a);
                        i += 1;
                    } else {
                        powers.push(b);
                        j += 1;
                    }
                }
                (Some(&a), None) => {
                    powers.push(a);
                    i += 1;
                }
                (None, Some(&b)) => {
                    powers.push(b);
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        let exp = match (&self.exp, &other.exp) {
            (None, e) | (e, None) => e.clone(),
            (Some(p), Some(q)) => {
                let s = p.add(q);
                (!s.is_zero()).then(|| Arc::new(s))
            }
        };
        MonoKey { powers, exp }
    }
}

/// Graded lexicographic on the power product (`y` before `x1` before `x2`),
/// then by the exponential argument (absent < present, then recursively).
impl Ord for MonoKey {
    fn cmp(&self, other: &MonoKey) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| lex_powers(&self.powers, &other.powers))
            .then_with(|| match (&self.exp, &other.exp) {
                (None, None) => Ordering::Equal,
                (None, Some(_)) => Ordering::Less,
                (Some(_), None) => Ordering::Greater,
                (Some(a), Some(b)) => a.as_ref().cmp(b.as_ref()),
            })
    }
}

impl PartialOrd for MonoKey {
    fn partial_cmp(&self, other: &MonoKey) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn lex_powers(a: &[(Var, u32)], b: &[(Var, u32)]) -> Ordering {
    let (mut i, mut j) = (0, 0);
    loop {
        match (a.get(i), b.get(j)) {
            (None, None) => return Ordering::Equal,
            (Some(_), None) => return Ordering::Greater,
            (None, Some(_)) => return Ordering::Less,
            (Some(&(va, ea)), Some(&(vb, eb))) => {
                if va == vb {
                    if ea != eb {
                        return ea.cmp(&eb);
                    }
                    i += 1;
                    j += 1;
                } else if va < vb {
                    return Ordering::Greater;
                } else {
                    return Ordering::Less;
                }
            }
        }
    }
}

/// `coeff * key`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial {
    pub coeff: BigInt,
    pub key: MonoKey,
}

/// Canonical exponential polynomial; monomials in strictly decreasing
/// [`MonoKey`] order with nonzero coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct CanonicalPoly {
    terms: Vec<Monomial>,
}

impl Ord for CanonicalPoly {
    fn cmp(&self, other: &CanonicalPoly) -> Ordering {
        for (a, b) in self.terms.iter().zip(&other.terms) {
            let c = a.key.cmp(&b.key).then_with(|| a.coeff.cmp(&b.coeff));
            if c != Ordering::Equal {
                return c;
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl PartialOrd for CanonicalPoly {
    fn partial_cmp(&self, other: &CanonicalPoly) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl CanonicalPoly {
    pub fn zero() -> CanonicalPoly {
        CanonicalPoly { terms: Vec::new() }
    }

    pub fn one() -> CanonicalPoly {
        CanonicalPoly::constant(BigInt::one())
    }

    pub fn constant(c: BigInt) -> CanonicalPoly {
        CanonicalPoly::from_monomials([(MonoKey::one(), c)])
    }

    pub fn int(c: i64) -> CanonicalPoly {
        CanonicalPoly::constant(BigInt::from(c))
    }

    pub fn var(v: Var) -> CanonicalPoly {
        CanonicalPoly::from_monomials([(MonoKey { powers: vec![(v, 1)], exp: None }, BigInt::one())])
    }

    pub fn x(i: u32) -> CanonicalPoly {
        CanonicalPoly::var(Var::X(i))
    }

    /// Sum of monomials, merging like terms.
    pub fn from_monomials(items: impl IntoIterator<Item = (MonoKey, BigInt)>) -> CanonicalPoly {
        let mut acc: BTreeMap<MonoKey, BigInt> = BTreeMap::new();
        for (k, c) in items {
            if c.is_zero() {
                continue;
            }
            *acc.entry(k).or_insert_with(BigInt::zero) += c;
        }
        let terms = acc
            .into_iter()
            .rev()
            .filter(|(_, c)| !c.is_zero())
            .map(|(key, coeff)| Monomial { coeff, key })
            .collect();
        CanonicalPoly { terms }
    }

    pub fn terms(&self) -> &[Monomial] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The integer value if the polynomial is an integer constant.
    pub fn as_integer(&self) -> Option<BigInt> {
        match self.terms.as_slice() {
            [] => Some(BigInt::zero()),
            [m] if m.key == MonoKey::one() => Some(m.coeff.clone()),
            _ => None,
        }
    }

    pub fn add(&self, other: &CanonicalPoly) -> CanonicalPoly {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        CanonicalPoly::from_monomials(
            self.terms.iter().chain(&other.terms).map(|m| (m.key.clone(), m.coeff.clone())),
        )
    }

    pub fn neg(&self) -> CanonicalPoly {
        CanonicalPoly {
            terms: self.terms.iter().map(|m| Monomial { coeff: -&m.coeff, key: m.key.clone() }).collect(),
        }
    }

    pub fn sub(&self, other: &CanonicalPoly) -> CanonicalPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &CanonicalPoly) -> CanonicalPoly {
        if self.is_zero() || other.is_zero() {
            return CanonicalPoly::zero();
        }
        let mut items = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                items.push((a.key.mul(&b.key), &a.coeff * &b.coeff));
            }
        }
        CanonicalPoly::from_monomials(items)
    }

    pub fn scale(&self, c: &BigInt) -> CanonicalPoly {
        if c.is_zero() {
            return CanonicalPoly::zero();
        }
        CanonicalPoly {
            terms: self.terms.iter().map(|m| Monomial { coeff: &m.coeff * c, key: m.key.clone() }).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> CanonicalPoly {
        let mut acc = CanonicalPoly::one();
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `E(self)`, with `E(0) = 1`.
    pub fn exp(&self) -> CanonicalPoly {
        if self.is_zero() {
            return CanonicalPoly::one();
        }
        CanonicalPoly::from_monomials([(MonoKey { powers: Vec::new(), exp: Some(Arc::new(self.clone())) }, BigInt::one())])
    }

    pub fn try_add(&self, other: &CanonicalPoly, limits: &Limits) -> Result<CanonicalPoly, ExpPolyError> {
        let r = self.add(other);
        limits.check(&r)?;
        Ok(r)
    }

    pub fn try_mul(&self, other: &CanonicalPoly, limits: &Limits) -> Result<CanonicalPoly, ExpPolyError> {
        let bound = self.terms.len().saturating_mul(other.terms.len());
        if bound > limits.max_monomials.saturating_mul(4) {
            return Err(ExpPolyError::SizeLimit { count: bound, limit: limits.max_monomials });
        }
        let r = self.mul(other);
        limits.check(&r)?;
        Ok(r)
    }

    pub fn try_pow(&self, n: u32, limits: &Limits) -> Result<CanonicalPoly, ExpPolyError> {
        let mut acc = CanonicalPoly::one();
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.try_mul(&base, limits)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.try_mul(&base, limits)?;
            }
        }
        Ok(acc)
    }

    /// Content (gcd of coefficients, positive) and sign of the leading
    /// coefficient.
    pub fn content(&self) -> BigInt {
        use num_integer::Integer;
        self.terms.iter().fold(BigInt::zero(), |g, m| g.gcd(&m.coeff))
    }

    pub fn leading_coeff(&self) -> Option<&BigInt> {
        self.terms.first().map(|m| &m.coeff)
    }

    /// Divide every coefficient by the positive content and make the leading
    /// coefficient positive.
    pub fn primitive(&self) -> CanonicalPoly {
        use num_integer::Integer;
        let g = self.content();
        if g.is_zero() {
            return self.clone();
        }
        let g = if self.leading_coeff().is_some_and(|c| c.is_negative()) { -g } else { g };
        CanonicalPoly {
            terms: self.terms.iter().map(|m| Monomial { coeff: m.coeff.div_floor(&g), key: m.key.clone() }).collect(),
        }
    }
}

impl ops::Add for &CanonicalPoly {
    type Output = CanonicalPoly;
    fn add(self, rhs: &CanonicalPoly) -> CanonicalPoly {
        CanonicalPoly::add(self, rhs)
    }
}

impl ops::Sub for &CanonicalPoly {
    type Output = CanonicalPoly;
    fn sub(self, rhs: &CanonicalPoly) -> CanonicalPoly {
        CanonicalPoly::sub(self, rhs)
    }
}

impl ops::Mul for &CanonicalPoly {
    type Output = CanonicalPoly;
    fn mul(self, rhs: &CanonicalPoly) -> CanonicalPoly {
        CanonicalPoly::mul(self, rhs)
    }
}

impl ops::Neg for &CanonicalPoly {
    type Output = CanonicalPoly;
    fn neg(self) -> CanonicalPoly {
        CanonicalPoly::neg(self)
    }
}

/// Normalize with the default [`Limits`].
pub fn normalize(t: &ExpTerm) -> Result<CanonicalPoly, ExpPolyError> {
    normalize_with(t, &Limits::default())
}

pub fn normalize_with(t: &ExpTerm, limits: &Limits) -> Result<CanonicalPoly, ExpPolyError> {
    let depth = t.depth();
    if depth > limits.max_depth {
        return Err(ExpPolyError::DepthLimit { depth, limit: limits.max_depth });
    }
    normalize_rec(t, limits)
}

fn normalize_rec(t: &ExpTerm, limits: &Limits) -> Result<CanonicalPoly, ExpPolyError> {
    Ok(match t {
        ExpTerm::Const(c) => CanonicalPoly::constant(c.clone()),
        ExpTerm::Var(v) => CanonicalPoly::var(*v),
        ExpTerm::Sum(ts) => {
            let mut acc = CanonicalPoly::zero();
            for t in ts {
                acc = acc.try_add(&normalize_rec(t, limits)?, limits)?;
            }
            acc
        }
        ExpTerm::Product(ts) => {
            let mut acc = CanonicalPoly::one();
            for t in ts {
                acc = acc.try_mul(&normalize_rec(t, limits)?, limits)?;
                if acc.is_zero() {
                    break;
                }
            }
            acc
        }
        ExpTerm::Pow(b, n) => normalize_rec(b, limits)?.try_pow(*n, limits)?,
        ExpTerm::Exp(a) => normalize_rec(a, limits)?.exp(),
    })
}
