//! Rigorous enclosure of the real exponential.
//!
//! `e^x = 2^k * e^r` with `k = round(x / ln 2)` and `|r| <= 0.36`; `e^r` is a
//! Taylor polynomial evaluated in interval arithmetic plus a Lagrange
//! remainder term. Guard bits make the final enclosure at most a couple of
//! ulps wider than the correctly rounded one.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::Num;

use super::{Bound, Interval};
use crate::dyadic::{Dyadic, Round};

/// `floor(ln 2 * 2^576)`.
const LN2_HEX: &str = "b17217f7d1cf79abc9e3b39803f2f6af40f343267298b62d8a0d175b8baafa2be7b876206debac98559552fb4afa1b10ed2eae35c138214427573b291169b8253e96ca16224ae8c5";
const LN2_BITS: u32 = 576;

const GUARD_BITS: u32 = 32;

/// Arguments beyond this magnitude saturate.
const SATURATE_LOG2: i64 = 41;

fn ln2_mantissa() -> &'static BigInt {
    static M: OnceLock<BigInt> = OnceLock::new();
    M.get_or_init(|| BigInt::from_str_radix(LN2_HEX, 16).expect("valid hex constant"))
}

/// Enclosure of `ln 2`, as tight as `prec` allows (up to 576 bits).
pub fn ln2_enclosure(prec: u32) -> Interval {
    let m = ln2_mantissa();
    let lo = Dyadic::new(m.clone(), -(LN2_BITS as i64));
    let hi = Dyadic::new(m + 1u32, -(LN2_BITS as i64));
    Interval::from_dyadics(lo.round(prec, Round::Down), hi.round(prec, Round::Up))
}

/// Smallest `n` with `0.36^(n+1) / (n+1)! * 1.5 < 2^-(bits+1)`.
fn taylor_terms(bits: u32) -> u32 {
    let target = -(bits as f64) - 2.0;
    let mut log2_term = 1.5f64.log2();
    let mut n = 0u32;
    loop {
        let k = (n + 1) as f64;
        log2_term += 0.36f64.log2() - k.log2();
        if log2_term < target {
            return n;
        }
        n += 1;
    }
}

/// Enclosure of `e^x` for a finite point `x`, at `prec` bits.
fn exp_point(x: &Dyadic, prec: u32) -> Interval {
    if x.is_zero() {
        return Interval::one();
    }
    if x.top() > SATURATE_LOG2 {
        return if x.is_positive() {
            Interval::new(Bound::settle(Dyadic::pow2(1 << 41), prec, Round::Down), Bound::PosInf)
        } else {
            Interval::new(Bound::zero(), Bound::settle(Dyadic::pow2(-(1 << 41)), prec, Round::Up))
        };
    }
    let w = prec + GUARD_BITS;
    let ln2_prec = (w + 2 * SATURATE_LOG2 as u32).min(LN2_BITS);
    let ln2 = ln2_enclosure(ln2_prec);
    let xi = Interval::point(x.clone());
    let mut k = (x.to_f64() / std::f64::consts::LN_2).round() as i64;
    let limit = Dyadic::from_f64(0.36).expect("finite");
    let r = loop {
        let r = xi.sub(&ln2.mul(&Interval::from_i64(k), ln2_prec + 64), ln2_prec + 64);
        match r.mag() {
            Some(m) if m <= limit => break r,
            _ => {
                // The float estimate of k was off by one; step towards zero residual.
                let mid = r.mid().expect("finite residual");
                k += if mid.is_positive() { 1 } else { -1 };
            }
        }
    };
    let r = r.round(w + 8);
    let n = taylor_terms(w);
    let mut s = Interval::one();
    for i in (1..=n).rev() {
        s = Interval::one().add(&r.mul(&s, w).div_int(i as i64, w), w);
    }
    let rem = Dyadic::pow2(-(w as i64) - 1);
    s = s.inflate(&rem, w);
    let scale = |b: &Bound, dir: Round| match b {
        Bound::Finite(d) => Bound::settle(d.shl(k), prec, dir),
        inf => inf.clone(),
    };
    let lo = scale(s.lo(), Round::Down);
    // e^x > 0 always; keep the lower endpoint nonnegative.
    let lo = if lo < Bound::zero() { Bound::zero() } else { lo };
    Interval::new(lo, scale(s.hi(), Round::Up))
}

/// Enclosure of `{e^r : r in x}` at `prec` bits. Monotonicity means only
/// the endpoints are evaluated.
pub fn exp_enclosure(x: &Interval, prec: u32) -> Interval {
    if x.is_point() {
        if let Bound::Finite(d) = x.lo() {
            return exp_point(d, prec);
        }
    }
    let lo = match x.lo() {
        Bound::NegInf => Bound::zero(),
        Bound::Finite(d) => exp_point(d, prec).lo().clone(),
        Bound::PosInf => unreachable!("interval lower endpoint is never +inf"),
    };
    let hi = match x.hi() {
        Bound::PosInf => Bound::PosInf,
        Bound::Finite(d) => exp_point(d, prec).hi().clone(),
        Bound::NegInf => unreachable!("interval upper endpoint is never -inf"),
    };
    Interval::new(lo, hi)
}
