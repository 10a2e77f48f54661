//! Oracles and generators shared by the integration tests.
//!
//! The oracles use none of the library's numerics: values are fixed-point
//! integers scaled by `2^FRAC`, `exp` reduces by halving and squares back,
//! and `e` comes from a rational Taylor sum with an explicit remainder.
#![allow(dead_code)]

use std::cmp::Ordering;

use ecl_core::dyadic::Dyadic;
use ecl_core::exp_poly::{CanonicalPoly, ExpTerm, Var, VarLayout};
use ecl_core::interval::{Bound, Interval, IntervalBox};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// Fractional bits of the fixed-point oracle.
pub const FRAC: u32 = 384;

/// `m / 2^FRAC`, truncated toward negative infinity after every product.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Fx(pub BigInt);

impl Fx {
    pub fn int(v: i64) -> Fx {
        Fx(BigInt::from(v) << FRAC)
    }

    pub fn big(v: &BigInt) -> Fx {
        Fx(v << FRAC)
    }

    /// `num / 2^shift`, exact while `shift <= FRAC`.
    pub fn dyadic(num: i64, shift: u32) -> Fx {
        assert!(shift <= FRAC);
        Fx(BigInt::from(num) << (FRAC - shift))
    }

    pub fn from_dyadic(d: &Dyadic) -> Fx {
        let e = d.exponent() + FRAC as i64;
        if e >= 0 {
            Fx(d.mantissa() << e as usize)
        } else {
            Fx(d.mantissa() >> (-e) as usize)
        }
    }

    /// Nearest fixed-point value to `p / q`.
    pub fn ratio(p: i64, q: i64) -> Fx {
        Fx((BigInt::from(p) << FRAC).div_floor(&BigInt::from(q)))
    }

    pub fn add(&self, o: &Fx) -> Fx {
        Fx(&self.0 + &o.0)
    }

    pub fn sub(&self, o: &Fx) -> Fx {
        Fx(&self.0 - &o.0)
    }

    pub fn neg(&self) -> Fx {
        Fx(-&self.0)
    }

    pub fn mul(&self, o: &Fx) -> Fx {
        Fx((&self.0 * &o.0) >> FRAC)
    }

    pub fn div(&self, o: &Fx) -> Fx {
        Fx((&self.0 << FRAC).div_floor(&o.0))
    }

    pub fn powi(&self, n: u32) -> Fx {
        let mut r = Fx::int(1);
        for _ in 0..n {
            r = r.mul(self);
        }
        r
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn abs(&self) -> Fx {
        Fx(self.0.abs())
    }

    /// `exp(x) = exp(x / 2^k)^(2^k)` with `|x / 2^k| < 2^-16`.
    pub fn exp(&self) -> Fx {
        let int_bits = self.0.bits().saturating_sub(FRAC as u64);
        let k = int_bits + 16;
        let y = Fx(&self.0 >> k as usize);
        let mut sum = Fx::int(1);
        let mut term = Fx::int(1);
        let mut i = 1i64;
        loop {
            term = Fx(term.mul(&y).0 / i);
            if term.is_zero() {
                break;
            }
            sum = sum.add(&term);
            i += 1;
        }
        for _ in 0..k {
            sum = sum.mul(&sum);
        }
        sum
    }

    pub fn to_f64(&self) -> f64 {
        let shift = self.0.bits().saturating_sub(60);
        let top = (&self.0 >> shift as usize).to_f64().unwrap_or(0.0);
        top * 2f64.powi(shift as i32 - FRAC as i32)
    }

    /// Oracle error allowance: `2^-(FRAC-96)` absolute plus `2^-200` relative.
    pub fn slack(&self) -> Fx {
        Fx((BigInt::one() << 96) + (self.0.abs() >> 200))
    }

    /// Exact comparison with a dyadic.
    pub fn cmp_dyadic(&self, d: &Dyadic) -> Ordering {
        let e = d.exponent() + FRAC as i64;
        if e >= 0 {
            self.0.cmp(&(d.mantissa() << e as usize))
        } else {
            (&self.0 << (-e) as usize).cmp(d.mantissa())
        }
    }
}

/// True if `v`, up to its slack, may lie in `x`.
pub fn enclosed(v: &Fx, x: &Interval) -> bool {
    let s = v.slack();
    let above_lo = match x.lo() {
        Bound::NegInf => true,
        Bound::PosInf => false,
        Bound::Finite(d) => v.add(&s).cmp_dyadic(d) != Ordering::Less,
    };
    let below_hi = match x.hi() {
        Bound::PosInf => true,
        Bound::NegInf => false,
        Bound::Finite(d) => v.sub(&s).cmp_dyadic(d) != Ordering::Greater,
    };
    above_lo && below_hi
}

/// Distance from `v` to the farther endpoint of `x`, as f64.
pub fn far_distance(v: &Fx, x: &Interval) -> f64 {
    match (x.lo().finite(), x.hi().finite()) {
        (Some(lo), Some(hi)) => {
            let a = v.sub(&Fx::from_dyadic(lo)).abs();
            let b = v.sub(&Fx::from_dyadic(hi)).abs();
            a.max(b).to_f64()
        }
        _ => f64::INFINITY,
    }
}

/// `e` as a rational Taylor sum `sum_{k<=n} 1/k!` with `0 < e - sum < 2/(n+1)!`.
pub fn e_taylor(n: u32) -> (Fx, Fx) {
    let mut f = BigInt::one();
    for k in 1..=n {
        f *= k;
    }
    // s = sum_{k<=n} n!/k!, an integer.
    let mut s = BigInt::zero();
    let mut t = f.clone();
    for k in 0..=n {
        s += &t;
        if k < n {
            t /= k + 1;
        }
    }
    let lo = Fx((&s << FRAC).div_floor(&f));
    let rem = Fx((BigInt::from(2) << FRAC).div_ceil(&(f * (n + 1))));
    (lo.clone(), lo.add(&rem).add(&Fx(BigInt::one())))
}

/// Root of `f` in `[a, b]` by bisection on the oracle's sign, assuming
/// `f(a)` and `f(b)` have opposite signs.
pub fn bisect(f: impl Fn(&Fx) -> Fx, mut a: Fx, mut b: Fx, steps: u32) -> Fx {
    let sa = f(&a).0.sign();
    assert_ne!(sa, f(&b).0.sign(), "bisection needs a sign change");
    for _ in 0..steps {
        let m = Fx((&a.0 + &b.0) >> 1);
        if f(&m).0.sign() == sa {
            a = m;
        } else {
            b = m;
        }
    }
    Fx((&a.0 + &b.0) >> 1)
}

/// Value of a raw term at a point given in `layout` order.
pub fn eval_term(t: &ExpTerm, layout: VarLayout, point: &[Fx]) -> Fx {
    match t {
        ExpTerm::Const(c) => Fx::big(c),
        ExpTerm::Var(v) => point[layout.index_of(*v).expect("variable in layout")].clone(),
        ExpTerm::Sum(ts) => ts.iter().fold(Fx::int(0), |acc, t| acc.add(&eval_term(t, layout, point))),
        ExpTerm::Product(ts) => ts.iter().fold(Fx::int(1), |acc, t| acc.mul(&eval_term(t, layout, point))),
        ExpTerm::Pow(b, n) => eval_term(b, layout, point).powi(*n),
        ExpTerm::Exp(a) => eval_term(a, layout, point).exp(),
    }
}

/// Value of a canonical polynomial, read monomial by monomial.
pub fn eval_poly(p: &CanonicalPoly, layout: VarLayout, point: &[Fx]) -> Fx {
    let mut acc = Fx::int(0);
    for m in p.terms() {
        let mut v = Fx::big(&m.coeff);
        for &(var, k) in m.key.powers() {
            v = v.mul(&point[layout.index_of(var).expect("variable in layout")].powi(k));
        }
        if let Some(arg) = m.key.exp_arg() {
            v = v.mul(&eval_poly(arg, layout, point).exp());
        }
        acc = acc.add(&v);
    }
    acc
}

/// Same evaluation in f64, for dense sampling.
pub fn eval_term_f64(t: &ExpTerm, x: f64) -> f64 {
    match t {
        ExpTerm::Const(c) => c.to_f64().unwrap_or(f64::NAN),
        ExpTerm::Var(_) => x,
        ExpTerm::Sum(ts) => ts.iter().map(|t| eval_term_f64(t, x)).sum(),
        ExpTerm::Product(ts) => ts.iter().map(|t| eval_term_f64(t, x)).product(),
        ExpTerm::Pow(b, n) => eval_term_f64(b, x).powi(*n as i32),
        ExpTerm::Exp(a) => eval_term_f64(a, x).exp(),
    }
}

fn coeff(rng: &mut ChaCha8Rng, bound: i64) -> i64 {
    loop {
        let c = rng.gen_range(-bound..=bound);
        if c != 0 {
            return c;
        }
    }
}

/// Random term in `x1..xn` with coefficients in `[-bound, bound]`, at most
/// `tower` nested `E`s and nesting depth at most `size + 1`. Inner nodes
/// dominate so that most terms have several monomials.
pub fn random_term(rng: &mut ChaCha8Rng, n: u32, tower: usize, bound: i64, size: usize) -> ExpTerm {
    if size == 0 || rng.gen_range(0..8) == 0 {
        return if rng.gen_bool(0.5) { ExpTerm::int(coeff(rng, bound)) } else { ExpTerm::x(rng.gen_range(1..=n)) };
    }
    let sub = |rng: &mut ChaCha8Rng| random_term(rng, n, tower, bound, size - 1);
    match rng.gen_range(0..6) {
        0 | 1 => {
            let k = rng.gen_range(2..=3);
            ExpTerm::Sum((0..k).map(|_| sub(rng)).collect())
        }
        2 => ExpTerm::Product(vec![ExpTerm::int(coeff(rng, bound)), sub(rng)]),
        3 => ExpTerm::Product(vec![sub(rng), sub(rng)]),
        4 => ExpTerm::pow(sub(rng), rng.gen_range(0..=2)),
        // Arguments of `E` stay small so towers remain representable.
        _ if tower > 1 && rng.gen_bool(0.5) => {
            let inner = ExpTerm::exp(random_term(rng, n, 0, 2, 1));
            ExpTerm::exp(ExpTerm::Sum(vec![ExpTerm::Product(vec![ExpTerm::int(coeff(rng, 2)), inner]), random_term(rng, n, 0, 2, 0)]))
        }
        _ if tower > 0 => ExpTerm::exp(random_term(rng, n, tower - 1, 2, (size - 1).min(1))),
        _ => sub(rng),
    }
}

/// Random univariate term: a sum of 2..=4 pieces of the forms `c x^k`,
/// `c E(a x + b)`, `c x E(a x)` and `c E(a E(x) / 2)`.
pub fn random_univariate(rng: &mut ChaCha8Rng) -> ExpTerm {
    let x = || ExpTerm::x(1);
    let k = rng.gen_range(2..=4);
    let mut parts = Vec::with_capacity(k);
    for _ in 0..k {
        let c = ExpTerm::int(coeff(rng, 5));
        let piece = match rng.gen_range(0..4) {
            0 => ExpTerm::Product(vec![c, ExpTerm::pow(x(), rng.gen_range(0..=3))]),
            1 => {
                let a = ExpTerm::int(coeff(rng, 2));
                let b = ExpTerm::int(rng.gen_range(-2..=2));
                ExpTerm::Product(vec![c, ExpTerm::exp(ExpTerm::Sum(vec![ExpTerm::Product(vec![a, x()]), b]))])
            }
            2 => {
                let a = ExpTerm::int(coeff(rng, 1));
                ExpTerm::Product(vec![c, x(), ExpTerm::exp(ExpTerm::Product(vec![a, x()]))])
            }
            _ => {
                // E(a E(x) - b) keeps the second tower level moderate on [-3, 3].
                let a = ExpTerm::int(coeff(rng, 1));
                let b = ExpTerm::int(rng.gen_range(0..=20));
                let inner = ExpTerm::Sum(vec![ExpTerm::Product(vec![a, ExpTerm::exp(x())]), b.negated()]);
                ExpTerm::Product(vec![c, ExpTerm::exp(inner)])
            }
        };
        parts.push(piece);
    }
    ExpTerm::Sum(parts)
}

/// Random dyadic `m / 2^20` in `[lo, hi]` (both in units of `2^-20`).
pub fn random_dyadic(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> (i64, Dyadic) {
    let m = rng.gen_range(lo..=hi);
    (m, Dyadic::new(BigInt::from(m), -20))
}

pub fn dyadic_interval(lo: i64, hi: i64) -> Interval {
    Interval::from_dyadics(Dyadic::new(BigInt::from(lo), -20), Dyadic::new(BigInt::from(hi), -20))
}

pub fn point_box(coords: &[Dyadic]) -> IntervalBox {
    IntervalBox::new(coords.iter().cloned().map(Interval::point).collect())
}

pub fn var_x(i: u32) -> Var {
    Var::X(i)
}
