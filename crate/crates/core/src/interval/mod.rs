//! Outward-rounded interval arithmetic over binary rationals.
//!
//! Every operation takes the working precision (significand bits) as an
//! argument; there is no global rounding state. Endpoints that overflow the
//! representable exponent range saturate to infinities, which keeps every
//! result a sound enclosure.

mod eval;
mod exp;

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::dyadic::{Dyadic, DyadicParseError, Round};

pub use eval::{eval_formula, eval_formula_partial, eval_poly, eval_term, EvalError};
pub use exp::{exp_enclosure, ln2_enclosure};

/// Default working precision in significand bits.
pub const DEFAULT_PRECISION: u32 = 64;

/// Finite endpoints are kept within `2^±MAX_TOP`; beyond that they
/// saturate (to an infinity, or to the limit on the sound side).
const MAX_TOP: i64 = 1 << 40;

/// An interval endpoint on the extended real line.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bound {
    NegInf,
    Finite(Dyadic),
    PosInf,
}

impl Bound {
    pub fn zero() -> Bound {
        Bound::Finite(Dyadic::zero())
    }

    pub fn finite(&self) -> Option<&Dyadic> {
        match self {
            Bound::Finite(d) => Some(d),
            _ => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Bound::Finite(_))
    }

    fn signum(&self) -> i32 {
        match self {
            Bound::NegInf => -1,
            Bound::PosInf => 1,
            Bound::Finite(d) => d.signum(),
        }
    }

    pub fn neg(&self) -> Bound {
        match self {
            Bound::NegInf => Bound::PosInf,
            Bound::PosInf => Bound::NegInf,
            Bound::Finite(d) => Bound::Finite(d.neg()),
        }
    }

    fn infinity(sign: i32) -> Bound {
        if sign < 0 {
            Bound::NegInf
        } else {
            Bound::PosInf
        }
    }

    /// Round a finite value and saturate it into the representable range.
    pub(crate) fn settle(d: Dyadic, prec: u32, dir: Round) -> Bound {
        let d = d.round(prec, dir);
        if d.is_zero() {
            return Bound::Finite(d);
        }
        let top = d.top();
        if top > MAX_TOP {
            return match (d.is_positive(), dir) {
                (true, Round::Down) => Bound::Finite(Dyadic::pow2(MAX_TOP)),
                (true, Round::Up) => Bound::PosInf,
                (false, Round::Down) => Bound::NegInf,
                (false, Round::Up) => Bound::Finite(Dyadic::pow2(MAX_TOP).neg()),
            };
        }
        if top < -MAX_TOP {
            return match (d.is_positive(), dir) {
                (true, Round::Down) | (false, Round::Up) => Bound::zero(),
                (true, Round::Up) => Bound::Finite(Dyadic::pow2(-MAX_TOP)),
                (false, Round::Down) => Bound::Finite(Dyadic::pow2(-MAX_TOP).neg()),
            };
        }
        Bound::Finite(d)
    }

    fn add_round(&self, other: &Bound, prec: u32, dir: Round) -> Bound {
        match (self, other) {
            (Bound::Finite(a), Bound::Finite(b)) => Bound::settle(a.add_round(b, prec, dir), prec, dir),
            (Bound::NegInf, Bound::PosInf) | (Bound::PosInf, Bound::NegInf) => match dir {
                Round::Down => Bound::NegInf,
                Round::Up => Bound::PosInf,
            },
            (Bound::Finite(_), inf) | (inf, _) => inf.clone(),
        }
    }

    /// Product with the interval convention `0 * inf = 0`.
    fn mul_round(&self, other: &Bound, prec: u32, dir: Round) -> Bound {
        match (self, other) {
            (Bound::Finite(a), Bound::Finite(b)) => Bound::settle(a.mul(b), prec, dir),
            _ => {
                let s = self.signum() * other.signum();
                if s == 0 {
                    Bound::zero()
                } else {
                    Bound::infinity(s)
                }
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Bound::NegInf => f64::NEG_INFINITY,
            Bound::PosInf => f64::INFINITY,
            Bound::Finite(d) => d.to_f64(),
        }
    }

    fn to_decimal(&self, sig: usize, dir: Round) -> String {
        match self {
            Bound::NegInf => "-inf".to_string(),
            Bound::PosInf => "inf".to_string(),
            Bound::Finite(d) => d.to_decimal(sig, dir),
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::NegInf => f.write_str("-inf"),
            Bound::PosInf => f.write_str("inf"),
            Bound::Finite(d) => write!(f, "{}", d),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IntervalParseError {
    #[error("expected `[lo, hi]`, found `{0}`")]
    Shape(String),
    #[error(transparent)]
    Number(#[from] DyadicParseError),
    #[error("empty interval: lower endpoint exceeds upper endpoint in `{0}`")]
    Empty(String),
}

/// A closed interval `[lo, hi]` with `lo <= hi`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: Bound,
    hi: Bound,
}

impl Interval {
    /// Panics if `lo > hi` or if the bounds are not of the right kind.
    pub fn new(lo: Bound, hi: Bound) -> Interval {
        assert!(lo <= hi, "interval with lo > hi");
        assert!(lo != Bound::PosInf && hi != Bound::NegInf, "degenerate infinite interval");
        Interval { lo, hi }
    }

    pub fn from_dyadics(lo: Dyadic, hi: Dyadic) -> Interval {
        Interval::new(Bound::Finite(lo), Bound::Finite(hi))
    }

    pub fn point(d: Dyadic) -> Interval {
        Interval { lo: Bound::Finite(d.clone()), hi: Bound::Finite(d) }
    }

    pub fn from_i64(v: i64) -> Interval {
        Interval::point(Dyadic::from_i64(v))
    }

    pub fn from_bigint(v: &BigInt) -> Interval {
        Interval::point(Dyadic::from_bigint(v.clone()))
    }

    /// Exact interval from two finite doubles. Panics on NaN/inf or `lo > hi`.
    pub fn from_f64s(lo: f64, hi: f64) -> Interval {
        Interval::from_dyadics(
            Dyadic::from_f64(lo).expect("finite lower endpoint"),
            Dyadic::from_f64(hi).expect("finite upper endpoint"),
        )
    }

    pub fn entire() -> Interval {
        Interval { lo: Bound::NegInf, hi: Bound::PosInf }
    }

    pub fn zero() -> Interval {
        Interval::point(Dyadic::zero())
    }

    pub fn one() -> Interval {
        Interval::point(Dyadic::one())
    }

    pub fn lo(&self) -> &Bound {
        &self.lo
    }

    pub fn hi(&self) -> &Bound {
        &self.hi
    }

    pub fn is_finite(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        let b = Bound::Finite(x.clone());
        self.lo <= b && b <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        self.lo.signum() <= 0 && self.hi.signum() >= 0
    }

    /// `self ⊆ other`.
    pub fn subset_of(&self, other: &Interval) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// `self ⊆ interior(other)`.
    pub fn interior_of(&self, other: &Interval) -> bool {
        other.lo < self.lo && self.hi < other.hi
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = (&self.lo).max(&other.lo).clone();
        let hi = (&self.hi).min(&other.hi).clone();
        if lo <= hi {
            Some(Interval { lo, hi })
        } else {
            None
        }
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval { lo: (&self.lo).min(&other.lo).clone(), hi: (&self.hi).max(&other.hi).clone() }
    }

    /// True if every element is strictly positive.
    pub fn is_positive(&self) -> bool {
        self.lo.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.hi.signum() < 0
    }

    /// Exact width, `None` when unbounded.
    pub fn width(&self) -> Option<Dyadic> {
        match (&self.lo, &self.hi) {
            (Bound::Finite(a), Bound::Finite(b)) => Some(b.sub(a)),
            _ => None,
        }
    }

    pub fn width_f64(&self) -> f64 {
        self.width().map(|w| w.to_f64()).unwrap_or(f64::INFINITY)
    }

    /// Exact midpoint of a bounded interval.
    pub fn mid(&self) -> Option<Dyadic> {
        match (&self.lo, &self.hi) {
            (Bound::Finite(a), Bound::Finite(b)) => Some(a.midpoint(b)),
            _ => None,
        }
    }

    /// `max(|lo|, |hi|)`; `None` when unbounded.
    pub fn mag(&self) -> Option<Dyadic> {
        match (&self.lo, &self.hi) {
            (Bound::Finite(a), Bound::Finite(b)) => Some(std::cmp::max(a.abs(), b.abs())),
            _ => None,
        }
    }

    /// Round both endpoints outward to `prec` bits.
    pub fn round(&self, prec: u32) -> Interval {
        let lo = match &self.lo {
            Bound::Finite(d) => Bound::settle(d.clone(), prec, Round::Down),
            b => b.clone(),
        };
        let hi = match &self.hi {
            Bound::Finite(d) => Bound::settle(d.clone(), prec, Round::Up),
            b => b.clone(),
        };
        Interval { lo, hi }
    }

    pub fn neg(&self) -> Interval {
        Interval { lo: self.hi.neg(), hi: self.lo.neg() }
    }

    pub fn add(&self, other: &Interval, prec: u32) -> Interval {
        Interval {
            lo: self.lo.add_round(&other.lo, prec, Round::Down),
            hi: self.hi.add_round(&other.hi, prec, Round::Up),
        }
    }

    pub fn sub(&self, other: &Interval, prec: u32) -> Interval {
        self.add(&other.neg(), prec)
    }

    pub fn mul(&self, other: &Interval, prec: u32) -> Interval {
        let (a, b, c, d) = (&self.lo, &self.hi, &other.lo, &other.hi);
        let (sa, sb, sc, sd) = (a.signum(), b.signum(), c.signum(), d.signum());
        // Sign-case analysis picks the two endpoint products that matter.
        let (lo, hi) = if sa >= 0 {
            if sc >= 0 {
                (a.mul_round(c, prec, Round::Down), b.mul_round(d, prec, Round::Up))
            } else if sd <= 0 {
                (b.mul_round(c, prec, Round::Down), a.mul_round(d, prec, Round::Up))
            } else {
                (b.mul_round(c, prec, Round::Down), b.mul_round(d, prec, Round::Up))
            }
        } else if sb <= 0 {
            if sc >= 0 {
                (a.mul_round(d, prec, Round::Down), b.mul_round(c, prec, Round::Up))
            } else if sd <= 0 {
                (b.mul_round(d, prec, Round::Down), a.mul_round(c, prec, Round::Up))
            } else {
                (a.mul_round(d, prec, Round::Down), a.mul_round(c, prec, Round::Up))
            }
        } else if sc >= 0 {
            (a.mul_round(d, prec, Round::Down), b.mul_round(d, prec, Round::Up))
        } else if sd <= 0 {
            (b.mul_round(c, prec, Round::Down), a.mul_round(c, prec, Round::Up))
        } else {
            let lo1 = a.mul_round(d, prec, Round::Down);
            let lo2 = b.mul_round(c, prec, Round::Down);
            let hi1 = a.mul_round(c, prec, Round::Up);
            let hi2 = b.mul_round(d, prec, Round::Up);
            (lo1.min(lo2), hi1.max(hi2))
        };
        Interval { lo, hi }
    }

    /// `self^n` with the even-power case handled tightly.
    pub fn powi(&self, n: u32, prec: u32) -> Interval {
        match n {
            0 => return Interval::one(),
            1 => return self.round(prec),
            _ => {}
        }
        if n % 2 == 1 || self.lo.signum() >= 0 {
            // Monotone increasing on this interval.
            return Interval { lo: pow_bound(&self.lo, n, prec, Round::Down), hi: pow_bound(&self.hi, n, prec, Round::Up) };
        }
        if self.hi.signum() <= 0 {
            return self.neg().powi(n, prec);
        }
        let m = (&self.lo.neg()).max(&self.hi).clone();
        Interval { lo: Bound::zero(), hi: pow_bound(&m, n, prec, Round::Up) }
    }

    /// `1 / self`; `None` when the interval contains zero.
    pub fn recip(&self, prec: u32) -> Option<Interval> {
        if self.contains_zero() {
            return None;
        }
        let inv = |b: &Bound, dir: Round| match b {
            Bound::Finite(d) => Bound::settle(Dyadic::one().div_round(d, prec + 2, dir), prec, dir),
            _ => Bound::zero(),
        };
        Some(Interval { lo: inv(&self.hi, Round::Down), hi: inv(&self.lo, Round::Up) })
    }

    /// Divide by a nonzero integer.
    pub fn div_int(&self, k: i64, prec: u32) -> Interval {
        assert!(k != 0, "division by zero");
        if k < 0 {
            return self.div_int(-k, prec).neg();
        }
        let kd = Dyadic::from_i64(k);
        let div = |b: &Bound, dir: Round| match b {
            Bound::Finite(d) => Bound::settle(d.div_round(&kd, prec, dir), prec, dir),
            inf => inf.clone(),
        };
        Interval { lo: div(&self.lo, Round::Down), hi: div(&self.hi, Round::Up) }
    }

    pub fn exp(&self, prec: u32) -> Interval {
        exp_enclosure(self, prec)
    }

    /// Widen by `delta` on both sides.
    pub fn inflate(&self, delta: &Dyadic, prec: u32) -> Interval {
        let d = Interval::from_dyadics(delta.neg(), delta.clone());
        self.add(&d, prec)
    }

    /// Split at the exact midpoint.
    pub fn bisect(&self) -> Option<(Interval, Interval)> {
        let m = self.mid()?;
        Some((
            Interval { lo: self.lo.clone(), hi: Bound::Finite(m.clone()) },
            Interval { lo: Bound::Finite(m), hi: self.hi.clone() },
        ))
    }

    /// Parse `[lo, hi]` (or a single number) with outward rounding at
    /// `prec` bits.
    pub fn parse(s: &str, prec: u32) -> Result<Interval, IntervalParseError> {
        let t = s.trim();
        let parse_bound = |x: &str, dir: Round| -> Result<Bound, IntervalParseError> {
            match x.trim() {
                "-inf" => Ok(Bound::NegInf),
                "inf" | "+inf" => Ok(Bound::PosInf),
                v => Ok(Bound::Finite(Dyadic::parse_rounded(v, prec, dir)?)),
            }
        };
        let (lo, hi) = if let Some(inner) = t.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let (a, b) = inner.split_once(',').ok_or_else(|| IntervalParseError::Shape(s.to_string()))?;
            (parse_bound(a, Round::Down)?, parse_bound(b, Round::Up)?)
        } else {
            (parse_bound(t, Round::Down)?, parse_bound(t, Round::Up)?)
        };
        if lo > hi || lo == Bound::PosInf || hi == Bound::NegInf {
            return Err(IntervalParseError::Empty(s.to_string()));
        }
        Ok(Interval { lo, hi })
    }

    /// Decimal rendering with outward rounding, e.g. `[2.7182818284, 2.7182818285]`.
    pub fn to_decimal(&self, sig: usize) -> String {
        format!("[{}, {}]", self.lo.to_decimal(sig, Round::Down), self.hi.to_decimal(sig, Round::Up))
    }

    /// Exact binary-rational rendering, e.g. `[5p-2, 3]`.
    pub fn to_exact(&self) -> String {
        format!("[{}, {}]", self.lo, self.hi)
    }

    /// Lexicographic order on `(lo, hi)`; a total order for sorting, not an
    /// interval comparison.
    pub fn lex_cmp(&self, other: &Interval) -> Ordering {
        self.lo.cmp(&other.lo).then_with(|| self.hi.cmp(&other.hi))
    }
}

fn pow_bound(b: &Bound, n: u32, prec: u32, dir: Round) -> Bound {
    match b {
        Bound::Finite(d) => {
            let negative = d.is_negative() && n % 2 == 1;
            // Round the magnitude away from or toward zero consistently.
            let mag_dir = if negative { dir.flip() } else { dir };
            let m = d.abs();
            let mut acc = Dyadic::one();
            let mut base = m;
            let mut e = n;
            while e > 0 {
                if e & 1 == 1 {
                    acc = acc.mul_round(&base, prec + 8, mag_dir);
                }
                e >>= 1;
                if e > 0 {
                    base = base.mul_round(&base, prec + 8, mag_dir);
                }
            }
            let v = if negative { acc.neg() } else { acc };
            Bound::settle(v, prec, dir)
        }
        Bound::NegInf if n.is_multiple_of(2) => Bound::PosInf,
        inf => inf.clone(),
    }
}

impl fmt::Display for Interval {
    /// Outward decimal form; the formatter precision selects significant
    /// digits (default 17).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal(f.precision().unwrap_or(17)))
    }
}

/// One interval per coordinate.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntervalBox(pub Vec<Interval>);

impl IntervalBox {
    pub fn new(coords: Vec<Interval>) -> IntervalBox {
        IntervalBox(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Interval] {
        &self.0
    }

    pub fn get(&self, i: usize) -> &Interval {
        &self.0[i]
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(Interval::is_finite)
    }

    pub fn max_width(&self) -> Option<Dyadic> {
        let mut best = Dyadic::zero();
        for c in &self.0 {
            let w = c.width()?;
            if w > best {
                best = w;
            }
        }
        Some(best)
    }

    pub fn volume_f64(&self) -> f64 {
        self.0.iter().map(Interval::width_f64).product()
    }

    pub fn midpoint(&self) -> Option<Vec<Dyadic>> {
        self.0.iter().map(Interval::mid).collect()
    }

    pub fn subset_of(&self, other: &IntervalBox) -> bool {
        self.dim() == other.dim() && self.0.iter().zip(&other.0).all(|(a, b)| a.subset_of(b))
    }

    pub fn interior_of(&self, other: &IntervalBox) -> bool {
        self.dim() == other.dim() && self.0.iter().zip(&other.0).all(|(a, b)| a.interior_of(b))
    }

    pub fn overlaps(&self, other: &IntervalBox) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a.overlaps(b))
    }

    pub fn intersect(&self, other: &IntervalBox) -> Option<IntervalBox> {
        self.0.iter().zip(&other.0).map(|(a, b)| a.intersect(b)).collect::<Option<Vec<_>>>().map(IntervalBox)
    }

    pub fn hull(&self, other: &IntervalBox) -> IntervalBox {
        IntervalBox(self.0.iter().zip(&other.0).map(|(a, b)| a.hull(b)).collect())
    }

    /// Split coordinate `i` at its midpoint.
    pub fn bisect(&self, i: usize) -> Option<(IntervalBox, IntervalBox)> {
        let (a, b) = self.0[i].bisect()?;
        let mut left = self.clone();
        let mut right = self.clone();
        left.0[i] = a;
        right.0[i] = b;
        Some((left, right))
    }

    pub fn lex_cmp(&self, other: &IntervalBox) -> Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            let c = a.lex_cmp(b);
            if c != Ordering::Equal {
                return c;
            }
        }
        self.dim().cmp(&other.dim())
    }

    /// Parse `[a,b]; [c,d]` (also accepts `x` between factors).
    pub fn parse(s: &str, prec: u32) -> Result<IntervalBox, IntervalParseError> {
        let mut out = Vec::new();
        let mut rest = s.trim();
        while !rest.is_empty() {
            let rest_trim = rest.trim_start_matches(|c: char| c == ';' || c == 'x' || c == '×' || c.is_whitespace());
            if rest_trim.is_empty() {
                break;
            }
            if !rest_trim.starts_with('[') {
                return Err(IntervalParseError::Shape(s.to_string()));
            }
            let close = rest_trim.find(']').ok_or_else(|| IntervalParseError::Shape(s.to_string()))?;
            out.push(Interval::parse(&rest_trim[..=close], prec)?);
            rest = &rest_trim[close + 1..];
        }
        if out.is_empty() {
            return Err(IntervalParseError::Shape(s.to_string()));
        }
        Ok(IntervalBox(out))
    }

    pub fn to_exact(&self) -> String {
        self.0.iter().map(Interval::to_exact).collect::<Vec<_>>().join("; ")
    }
}

impl fmt::Display for IntervalBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sig = f.precision().unwrap_or(17);
        let parts: Vec<String> = self.0.iter().map(|c| c.to_decimal(sig)).collect();
        f.write_str(&parts.join("; "))
    }
}

/// Three-valued truth with Kleene connectives.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Truth3 {
    True,
    False,
    Unknown,
}

impl Truth3 {
    pub fn and(self, other: Truth3) -> Truth3 {
        match (self, other) {
            (Truth3::False, _) | (_, Truth3::False) => Truth3::False,
            (Truth3::True, Truth3::True) => Truth3::True,
            _ => Truth3::Unknown,
        }
    }

    pub fn or(self, other: Truth3) -> Truth3 {
        match (self, other) {
            (Truth3::True, _) | (_, Truth3::True) => Truth3::True,
            (Truth3::False, Truth3::False) => Truth3::False,
            _ => Truth3::Unknown,
        }
    }

}

impl std::ops::Not for Truth3 {
    type Output = Truth3;

    fn not(self) -> Truth3 {
        match self {
            Truth3::True => Truth3::False,
            Truth3::False => Truth3::True,
            Truth3::Unknown => Truth3::Unknown,
        }
    }
}

impl From<bool> for Truth3 {
    fn from(b: bool) -> Truth3 {
        if b {
            Truth3::True
        } else {
            Truth3::False
        }
    }
}

impl fmt::Display for Truth3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Truth3::True => "TRUE",
            Truth3::False => "FALSE",
            Truth3::Unknown => "UNKNOWN",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(s: &str) -> Interval {
        Interval::parse(s, 64).unwrap()
    }

    #[test]
    fn arithmetic_basics() {
        let a = iv("[1, 2]");
        let b = iv("[-3, 4]");
        assert_eq!(a.add(&b, 64), iv("[-2, 6]"));
        assert_eq!(a.sub(&b, 64), iv("[-3, 5]"));
        assert_eq!(a.mul(&b, 64), iv("[-6, 8]"));
        assert_eq!(b.mul(&b, 64), iv("[-12, 16]"));
        assert_eq!(b.powi(2, 64), iv("[0, 16]"));
        assert_eq!(iv("[-3, -2]").powi(3, 64), iv("[-27, -8]"));
        assert_eq!(iv("[-3, -2]").powi(2, 64), iv("[4, 9]"));
    }

    #[test]
    fn rounding_is_outward() {
        let third = Interval::one().div_int(3, 20);
        let back = third.mul(&Interval::from_i64(3), 20);
        assert!(back.contains(&Dyadic::one()));
        assert!(!third.is_point());
        let neg = Interval::one().div_int(-3, 20);
        assert!(neg.is_negative());
        assert!(neg.mul(&Interval::from_i64(-3), 20).contains(&Dyadic::one()));
    }

    #[test]
    fn recip_rejects_zero() {
        assert!(iv("[-1, 1]").recip(64).is_none());
        let r = iv("[2, 4]").recip(64).unwrap();
        assert_eq!(r, iv("[0.25, 0.5]"));
    }

    #[test]
    fn infinities_follow_interval_conventions() {
        let e = Interval::entire();
        assert_eq!(e.mul(&Interval::zero(), 64), Interval::zero());
        let half = Interval::new(Bound::Finite(Dyadic::one()), Bound::PosInf);
        assert_eq!(half.mul(&iv("[-1, -1]"), 64).hi(), &Bound::Finite(Dyadic::from_i64(-1)));
        assert!(half.add(&half, 64).hi() == &Bound::PosInf);
    }

    #[test]
    fn parse_and_format() {
        let x = Interval::parse("[0.1, 0.2]", 64).unwrap();
        assert!(x.lo() < &Bound::Finite(Dyadic::from_f64(0.1).unwrap()) || x.lo() == &Bound::Finite(Dyadic::from_f64(0.1).unwrap()));
        // Endpoints are not exactly representable, so the outward decimal form widens.
        assert_eq!(x.to_decimal(3), "[0.0999, 0.201]");
        assert_eq!(Interval::parse("[0.5, 2]", 64).unwrap().to_decimal(3), "[0.5, 2]");
        assert!(Interval::parse("[2, 1]", 64).is_err());
        assert!(Interval::parse("2, 1", 64).is_err());
        let b = IntervalBox::parse("[0,1]; [-2, 3]", 64).unwrap();
        assert_eq!(b.dim(), 2);
        assert_eq!(b.to_exact(), "[0, 1]; [-2, 3]");
        let e = Interval::parse("[-inf, 0]", 64).unwrap();
        assert_eq!(e.lo(), &Bound::NegInf);
    }

    #[test]
    fn kleene_tables() {
        use Truth3::*;
        let all = [True, False, Unknown];
        for a in all {
            assert_eq!(!!a, a);
            for b in all {
                assert_eq!(a.and(b), b.and(a));
                assert_eq!(a.or(b), b.or(a));
                // De Morgan
                assert_eq!(!a.and(b), (!a).or(!b));
            }
        }
        assert_eq!(Unknown.and(False), False);
        assert_eq!(Unknown.or(True), True);
        assert_eq!(Unknown.and(True), Unknown);
    }

    #[test]
    fn box_operations() {
        let b = IntervalBox::parse("[0,4]; [0,1]", 64).unwrap();
        let (l, r) = b.bisect(0).unwrap();
        assert_eq!(l.get(0), &iv("[0, 2]"));
        assert_eq!(r.get(0), &iv("[2, 4]"));
        assert!(l.subset_of(&b));
        assert!(!l.interior_of(&b));
        assert_eq!(b.volume_f64(), 4.0);
    }
}
