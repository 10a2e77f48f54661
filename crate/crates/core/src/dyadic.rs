//! Binary rationals `m * 2^e` with directed rounding to a significand
//! precision.
//!
//! These are the endpoints of every [`Interval`](crate::interval::Interval).
//! Arithmetic is exact unless a `*_round` variant is used; the rounded
//! variants round the exact result towards `-inf` ([`Round::Down`]) or
//! `+inf` ([`Round::Up`]) so that interval endpoints can always be rounded
//! outward.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

/// Rounding direction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Round {
    Down,
    Up,
}

impl Round {
    pub fn flip(self) -> Round {
        match self {
            Round::Down => Round::Up,
            Round::Up => Round::Down,
        }
    }
}

/// `mant * 2^exp`; `mant` is odd, or zero with `exp == 0`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mant: BigInt,
    exp: i64,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DyadicParseError {
    #[error("malformed number literal `{0}`")]
    Malformed(String),
}

impl Dyadic {
    pub fn new(mant: BigInt, exp: i64) -> Dyadic {
        if mant.is_zero() {
            return Dyadic::zero();
        }
        let tz = mant.trailing_zeros().unwrap_or(0);
        if tz == 0 {
            Dyadic { mant, exp }
        } else {
            Dyadic { mant: mant >> tz, exp: exp + tz as i64 }
        }
    }

    pub fn zero() -> Dyadic {
        Dyadic { mant: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Dyadic {
        Dyadic { mant: BigInt::one(), exp: 0 }
    }

    pub fn from_i64(v: i64) -> Dyadic {
        Dyadic::new(BigInt::from(v), 0)
    }

    pub fn from_bigint(v: BigInt) -> Dyadic {
        Dyadic::new(v, 0)
    }

    /// `2^e`.
    pub fn pow2(e: i64) -> Dyadic {
        Dyadic { mant: BigInt::one(), exp: e }
    }

    /// Exact conversion; `None` for NaN and infinities.
    pub fn from_f64(v: f64) -> Option<Dyadic> {
        if !v.is_finite() {
            return None;
        }
        if v == 0.0 {
            return Some(Dyadic::zero());
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 0 { 1i64 } else { -1i64 };
        let exponent = ((bits >> 52) & 0x7ff) as i64;
        let fraction = bits & 0x000f_ffff_ffff_ffff;
        let (m, e) = if exponent == 0 {
            (fraction, -1074)
        } else {
            (fraction | 0x0010_0000_0000_0000, exponent - 1075)
        };
        Some(Dyadic::new(BigInt::from(sign * m as i64), e))
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mant
    }

    pub fn exponent(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.mant.is_positive()
    }

    pub fn signum(&self) -> i32 {
        match self.mant.sign() {
            Sign::Minus => -1,
            Sign::NoSign => 0,
            Sign::Plus => 1,
        }
    }

    /// Significand bit length.
    pub fn bits(&self) -> u64 {
        self.mant.bits()
    }

    /// `|self| < 2^top` and, for nonzero values, `|self| >= 2^(top-1)`.
    pub fn top(&self) -> i64 {
        self.exp + self.mant.bits() as i64
    }

    pub fn neg(&self) -> Dyadic {
        Dyadic { mant: -&self.mant, exp: self.exp }
    }

    pub fn abs(&self) -> Dyadic {
        Dyadic { mant: self.mant.abs(), exp: self.exp }
    }

    /// Multiply by `2^k` (exact).
    pub fn shl(&self, k: i64) -> Dyadic {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic { mant: self.mant.clone(), exp: self.exp + k }
    }

    pub fn add(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &other.mant << (other.exp - e) as u64;
        Dyadic::new(a + b, e)
    }

    pub fn sub(&self, other: &Dyadic) -> Dyadic {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Dyadic) -> Dyadic {
        if self.is_zero() || other.is_zero() {
            return Dyadic::zero();
        }
        Dyadic { mant: &self.mant * &other.mant, exp: self.exp + other.exp }
    }

    /// Round to at most `prec` significand bits in direction `dir`.
    pub fn round(&self, prec: u32, dir: Round) -> Dyadic {
        let bits = self.mant.bits();
        if bits <= prec as u64 {
            return self.clone();
        }
        let shift = bits - prec as u64;
        let negative = self.mant.is_negative();
        let mut q = self.mant.magnitude() >> shift;
        // `mant` is odd, so the discarded bits are never all zero.
        let away = matches!((dir, negative), (Round::Up, false) | (Round::Down, true));
        if away {
            q += 1u32;
        }
        let q = BigInt::from_biguint(if negative { Sign::Minus } else { Sign::Plus }, q);
        Dyadic::new(q, self.exp + shift as i64)
    }

    /// Rounded sum. Operands far below the precision of the larger one are
    /// replaced by a sticky bit so the exact sum never needs a huge shift.
    pub fn add_round(&self, other: &Dyadic, prec: u32, dir: Round) -> Dyadic {
        if self.is_zero() {
            return other.round(prec, dir);
        }
        if other.is_zero() {
            return self.round(prec, dir);
        }
        let (big, small) = if self.top() >= other.top() { (self, other) } else { (other, self) };
        let guard = big.top() - prec as i64 - 4;
        if small.top() < guard && small.exp < big.exp.min(guard) {
            // |small| < 2^guard, far below one ulp of `big` at `prec`.
            let toward = match dir {
                Round::Down => small.is_negative(),
                Round::Up => small.is_positive(),
            };
            let sticky = if toward {
                let s = Dyadic::pow2(guard);
                if small.is_negative() {
                    s.neg()
                } else {
                    s
                }
            } else {
                Dyadic::zero()
            };
            return big.add(&sticky).round(prec, dir);
        }
        self.add(other).round(prec, dir)
    }

    pub fn sub_round(&self, other: &Dyadic, prec: u32, dir: Round) -> Dyadic {
        self.add_round(&other.neg(), prec, dir)
    }

    pub fn mul_round(&self, other: &Dyadic, prec: u32, dir: Round) -> Dyadic {
        self.mul(other).round(prec, dir)
    }

    /// Rounded quotient. Panics on division by zero.
    pub fn div_round(&self, other: &Dyadic, prec: u32, dir: Round) -> Dyadic {
        assert!(!other.is_zero(), "division by zero");
        if self.is_zero() {
            return Dyadic::zero();
        }
        let want = prec as i64 + 2;
        let s = (want + other.bits() as i64 - self.bits() as i64).max(0);
        let num = &self.mant << s as u64;
        let q = match dir {
            Round::Down => num.div_floor(&other.mant),
            Round::Up => -((-num).div_floor(&other.mant)),
        };
        Dyadic::new(q, self.exp - other.exp - s).round(prec, dir)
    }

    /// Rounded quotient of two integers.
    pub fn ratio(num: &BigInt, den: &BigInt, prec: u32, dir: Round) -> Dyadic {
        Dyadic::from_bigint(num.clone()).div_round(&Dyadic::from_bigint(den.clone()), prec, dir)
    }

    /// Floor of the value as an integer.
    pub fn floor(&self) -> BigInt {
        if self.exp >= 0 {
            &self.mant << self.exp as u64
        } else {
            let den = BigInt::one() << (-self.exp) as u64;
            self.mant.div_floor(&den)
        }
    }

    pub fn ceil(&self) -> BigInt {
        -(self.neg().floor())
    }

    /// Nearest-ish `f64` (correct to within an ulp); saturates to infinities.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let r = self.round(53, Round::Down);
        let m = r.mant.to_i64().expect("53-bit significand fits in i64") as f64;
        let e = r.exp;
        if e + 53 > 1100 {
            return if m > 0.0 { f64::INFINITY } else { f64::NEG_INFINITY };
        }
        if e < -1200 {
            return 0.0;
        }
        // Two steps keep the scale factor itself finite.
        let half = e / 2;
        m * 2f64.powi(half as i32) * 2f64.powi((e - half) as i32)
    }

    /// `(self + other) / 2`, exact.
    pub fn midpoint(&self, other: &Dyadic) -> Dyadic {
        self.add(other).shl(-1)
    }

    /// Parse a decimal literal (`-12.5e-3`) or an exact binary rational
    /// (`-25p-1`), rounding decimal values in direction `dir` at `prec` bits.
    pub fn parse_rounded(s: &str, prec: u32, dir: Round) -> Result<Dyadic, DyadicParseError> {
        let t = s.trim();
        let bad = || DyadicParseError::Malformed(s.to_string());
        if let Some((m, e)) = t.split_once('p') {
            let mant = BigInt::from_str(m).map_err(|_| bad())?;
            let exp = i64::from_str(e).map_err(|_| bad())?;
            return Ok(Dyadic::new(mant, exp));
        }
        let (num, den) = parse_decimal(t).ok_or_else(bad)?;
        Ok(Dyadic::ratio(&num, &den, prec, dir))
    }

    /// Decimal rendering with `sig` significant digits, rounded in `dir`.
    pub fn to_decimal(&self, sig: usize, dir: Round) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let sig = sig.max(1);
        if self.is_negative() {
            return format!("-{}", self.neg().to_decimal(sig, dir.flip()));
        }
        // value = mant * 2^exp; estimate the decimal exponent of the leading digit.
        let mut e10 = (((self.top() - 1) as f64) * std::f64::consts::LOG10_2).floor() as i64;
        loop {
            let k = sig as i64 - 1 - e10;
            let mut num = self.mant.clone();
            let mut den = BigInt::one();
            if k >= 0 {
                num *= BigInt::from(10).pow(k as u32);
            } else {
                den *= BigInt::from(10).pow((-k) as u32);
            }
            if self.exp >= 0 {
                num <<= self.exp as u64;
            } else {
                den <<= (-self.exp) as u64;
            }
            let q = match dir {
                Round::Down => num.div_floor(&den),
                Round::Up => -((-num).div_floor(&den)),
            };
            let digits = q.to_string();
            if digits.len() > sig && !(digits.len() == sig + 1 && dir == Round::Up && q == BigInt::from(10).pow(sig as u32)) {
                e10 += 1;
                continue;
            }
            if digits.len() < sig {
                e10 -= 1;
                continue;
            }
            let (digits, e10) = if digits.len() == sig + 1 {
                // Rounded up to a power of ten.
                (digits[..sig].to_string(), e10 + 1)
            } else {
                (digits, e10)
            };
            return format_sci(&digits, e10);
        }
    }
}

fn format_sci(digits: &str, e10: i64) -> String {
    let trimmed = digits.trim_end_matches('0');
    let trimmed = if trimmed.is_empty() { "0" } else { trimmed };
    if (-6..=20).contains(&e10) {
        if e10 >= 0 {
            let int_len = e10 as usize + 1;
            if trimmed.len() <= int_len {
                let mut s = trimmed.to_string();
                s.extend(std::iter::repeat_n('0', int_len - trimmed.len()));
                s
            } else {
                format!("{}.{}", &trimmed[..int_len], &trimmed[int_len..])
            }
        } else {
            let zeros = (-e10 - 1) as usize;
            format!("0.{}{}", "0".repeat(zeros), trimmed)
        }
    } else if trimmed.len() == 1 {
        format!("{}e{}", trimmed, e10)
    } else {
        format!("{}.{}e{}", &trimmed[..1], &trimmed[1..], e10)
    }
}

/// Parse `[-]digits[.digits][e[+-]digits]` into an exact fraction.
fn parse_decimal(t: &str) -> Option<(BigInt, BigInt)> {
    let (body, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], i64::from_str(&t[i + 1..]).ok()?),
        None => (t, 0),
    };
    let (neg, body) = match body.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, body.strip_prefix('+').unwrap_or(body)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((i, f)) => (i, f),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{}{}", int_part, frac_part);
    let mut num = BigInt::from_str(if digits.is_empty() { "0" } else { &digits }).ok()?;
    if neg {
        num = -num;
    }
    let scale = exp - frac_part.len() as i64;
    if scale.unsigned_abs() > 100_000 {
        return None;
    }
    let mut den = BigInt::one();
    if scale >= 0 {
        num *= BigInt::from(10).pow(scale as u32);
    } else {
        den = BigInt::from(10).pow((-scale) as u32);
    }
    Some((num, den))
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Dyadic) -> Ordering {
        let (sa, sb) = (self.signum(), other.signum());
        if sa != sb {
            return sa.cmp(&sb);
        }
        if sa == 0 {
            return Ordering::Equal;
        }
        let (ta, tb) = (self.top(), other.top());
        if ta != tb {
            let mag = ta.cmp(&tb);
            return if sa > 0 { mag } else { mag.reverse() };
        }
        // Same leading bit position: the exponents differ by at most the
        // significand lengths, so aligning is cheap.
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &other.mant << (other.exp - e) as u64;
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Dyadic) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Exact binary-rational form `mantp<exp>`, e.g. `5p-2` for 1.25.
impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if (0..=64).contains(&self.exp) {
            write!(f, "{}", &self.mant << self.exp as u64)
        } else {
            write!(f, "{}p{}", self.mant, self.exp)
        }
    }
}

impl FromStr for Dyadic {
    type Err = DyadicParseError;

    /// Exact parse: binary rationals, integers, and decimals whose value is
    /// a binary rational.
    fn from_str(s: &str) -> Result<Dyadic, DyadicParseError> {
        let lo = Dyadic::parse_rounded(s, 4096, Round::Down)?;
        let hi = Dyadic::parse_rounded(s, 4096, Round::Up)?;
        if lo == hi {
            Ok(lo)
        } else {
            Err(DyadicParseError::Malformed(s.to_string()))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    #[test]
    fn normalizes_trailing_zeros() {
        assert_eq!(Dyadic::new(BigInt::from(12), 0), Dyadic::new(BigInt::from(3), 2));
        assert_eq!(Dyadic::new(BigInt::from(0), 7), Dyadic::zero());
    }

    #[test]
    fn f64_roundtrip() {
        for v in [0.1, -3.75, 1e300, 5e-324, 2.0f64.powi(-1030), 123456789.0] {
            assert_eq!(Dyadic::from_f64(v).unwrap().to_f64(), v);
        }
        assert!(Dyadic::from_f64(f64::NAN).is_none());
    }

    #[test]
    fn directed_rounding_brackets() {
        let third_lo = Dyadic::ratio(&BigInt::from(1), &BigInt::from(3), 20, Round::Down);
        let third_hi = Dyadic::ratio(&BigInt::from(1), &BigInt::from(3), 20, Round::Up);
        assert!(third_lo < third_hi);
        assert!(third_lo.mul(&Dyadic::from_i64(3)) < Dyadic::one());
        assert!(third_hi.mul(&Dyadic::from_i64(3)) > Dyadic::one());
        let neg = Dyadic::ratio(&BigInt::from(-1), &BigInt::from(3), 20, Round::Down);
        assert_eq!(neg, third_hi.neg());
    }

    #[test]
    fn round_negative_values() {
        let x = d("-11p-3"); // -1.375
        assert_eq!(x.round(2, Round::Down), d("-3p-1"));
        assert_eq!(x.round(2, Round::Up), d("-1"));
    }

    #[test]
    fn add_round_with_huge_gap_stays_sound() {
        let big = Dyadic::pow2(1_000_000_000);
        let tiny = Dyadic::pow2(-5);
        let up = big.add_round(&tiny, 53, Round::Up);
        let down = big.add_round(&tiny, 53, Round::Down);
        assert!(up > big);
        assert_eq!(down, big);
        let down_neg = big.add_round(&tiny.neg(), 53, Round::Down);
        assert!(down_neg < big);
    }

    #[test]
    fn ordering_matches_values() {
        let mut xs = [d("3"), d("-1p-3"), d("1p100"), d("0"), d("-7"), d("5p-1")];
        xs.sort();
        let got: Vec<String> = xs.iter().map(|x| x.to_string()).collect();
        assert_eq!(got, ["-7", "-1p-3", "0", "5p-1", "3", "1p100"]);
    }

    #[test]
    fn decimal_output_is_outward() {
        let third_hi = Dyadic::ratio(&BigInt::from(1), &BigInt::from(3), 80, Round::Up);
        assert_eq!(third_hi.to_decimal(5, Round::Up), "0.33334");
        assert_eq!(third_hi.to_decimal(5, Round::Down), "0.33333");
        assert_eq!(d("-5p-1").to_decimal(3, Round::Down), "-2.5");
        assert_eq!(d("1p200").to_decimal(3, Round::Down), "1.6e60");
        assert_eq!(d("999p0").to_decimal(2, Round::Up), "1000");
    }

    #[test]
    fn parse_decimal_rounds_outward() {
        let lo = Dyadic::parse_rounded("0.1", 64, Round::Down).unwrap();
        let hi = Dyadic::parse_rounded("0.1", 64, Round::Up).unwrap();
        assert!(lo < hi);
        let ten = Dyadic::from_i64(10);
        assert!(lo.mul(&ten) < Dyadic::one() && hi.mul(&ten) > Dyadic::one());
        assert_eq!(d("2.5"), d("5p-1"));
        assert!("0.1".parse::<Dyadic>().is_err());
        assert!(Dyadic::parse_rounded("1.2.3", 64, Round::Down).is_err());
    }

    #[test]
    fn floor_and_ceil() {
        assert_eq!(d("-5p-1").floor(), BigInt::from(-3));
        assert_eq!(d("-5p-1").ceil(), BigInt::from(-2));
        assert_eq!(d("7").floor(), BigInt::from(7));
    }
}
