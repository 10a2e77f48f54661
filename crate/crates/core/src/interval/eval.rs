//! Interval evaluation of exponential polynomials and three-valued
//! evaluation of constraint formulas.

use std::collections::BTreeMap;

use thiserror::Error;

use super::{Bound, Interval, IntervalBox, Truth3};
use crate::exp_poly::{normalize, CanonicalPoly, ExpTerm, Var, VarLayout};
use crate::syntax::{Atom, ConstraintFormula, Relation};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("no interval for variable {0}")]
    MissingVariable(Var),
    #[error("box has dimension {found}, expected {expected}")]
    Dimension { expected: usize, found: usize },
}

fn lookup_in<'a>(layout: VarLayout, b: &'a IntervalBox) -> impl Fn(Var) -> Option<&'a Interval> + 'a {
    move |v| layout.index_of(v).map(|i| b.get(i))
}

/// Enclosure of `{p(r) : r in b}`; `layout` maps variables to coordinates.
pub fn eval_poly(p: &CanonicalPoly, layout: VarLayout, b: &IntervalBox, prec: u32) -> Result<Interval, EvalError> {
    if b.dim() != layout.len() {
        return Err(EvalError::Dimension { expected: layout.len(), found: b.dim() });
    }
    eval_with(p, &lookup_in(layout, b), prec)
}

pub(crate) fn eval_with<'a>(p: &CanonicalPoly, at: &dyn Fn(Var) -> Option<&'a Interval>, prec: u32) -> Result<Interval, EvalError> {
    let mut acc = Interval::zero();
    for m in p.terms() {
        let mut t = Interval::from_bigint(&m.coeff).round(prec);
        for &(v, e) in m.key.powers() {
            let x = at(v).ok_or(EvalError::MissingVariable(v))?;
            t = t.mul(&x.powi(e, prec), prec);
        }
        if let Some(q) = m.key.exp_arg() {
            t = t.mul(&eval_with(q, at, prec)?.exp(prec), prec);
        }
        acc = acc.add(&t, prec);
    }
    Ok(acc)
}

/// Enclosure of a raw term, evaluated node by node without normalizing.
pub fn eval_term(t: &ExpTerm, layout: VarLayout, b: &IntervalBox, prec: u32) -> Result<Interval, EvalError> {
    let at = lookup_in(layout, b);
    term_with(t, &at, prec)
}

fn term_with<'a>(t: &ExpTerm, at: &dyn Fn(Var) -> Option<&'a Interval>, prec: u32) -> Result<Interval, EvalError> {
    Ok(match t {
        ExpTerm::Const(c) => Interval::from_bigint(c).round(prec),
        ExpTerm::Var(v) => at(*v).ok_or(EvalError::MissingVariable(*v))?.clone(),
        ExpTerm::Sum(ts) => {
            let mut acc = Interval::zero();
            for t in ts {
                acc = acc.add(&term_with(t, at, prec)?, prec);
            }
            acc
        }
        ExpTerm::Product(ts) => {
            let mut acc = Interval::one();
            for t in ts {
                acc = acc.mul(&term_with(t, at, prec)?, prec);
            }
            acc
        }
        ExpTerm::Pow(b, n) => term_with(b, at, prec)?.powi(*n, prec),
        ExpTerm::Exp(a) => term_with(a, at, prec)?.exp(prec),
    })
}

/// Three-valued truth of `phi` over every point of `b`.
pub fn eval_formula(phi: &ConstraintFormula, layout: VarLayout, b: &IntervalBox, prec: u32) -> Truth3 {
    formula_with(phi, &lookup_in(layout, b), prec)
}

/// As [`eval_formula`], with variables looked up in a partial assignment;
/// atoms mentioning an unassigned variable are `Unknown`.
pub fn eval_formula_partial(phi: &ConstraintFormula, assignment: &BTreeMap<Var, Interval>, prec: u32) -> Truth3 {
    formula_with(phi, &|v| assignment.get(&v), prec)
}

fn formula_with<'a>(phi: &ConstraintFormula, at: &dyn Fn(Var) -> Option<&'a Interval>, prec: u32) -> Truth3 {
    match phi {
        ConstraintFormula::Atom(a) => atom_with(a, at, prec),
        ConstraintFormula::And(a, b) => {
            let l = formula_with(a, at, prec);
            if l == Truth3::False {
                return l;
            }
            l.and(formula_with(b, at, prec))
        }
        ConstraintFormula::Or(a, b) => {
            let l = formula_with(a, at, prec);
            if l == Truth3::True {
                return l;
            }
            l.or(formula_with(b, at, prec))
        }
        ConstraintFormula::Not(a) => !formula_with(a, at, prec),
    }
}

fn atom_with<'a>(a: &Atom, at: &dyn Fn(Var) -> Option<&'a Interval>, prec: u32) -> Truth3 {
    let diff = ExpTerm::Sum(vec![a.lhs.clone(), a.rhs.clone().negated()]);
    let Ok(d) = normalize(&diff) else { return Truth3::Unknown };
    if d.is_zero() {
        return Truth3::from(matches!(a.rel, Relation::Eq | Relation::Le));
    }
    let Ok(v) = eval_with(&d, at, prec) else { return Truth3::Unknown };
    let zero = Bound::zero();
    let eq = if !v.contains_zero() {
        Truth3::False
    } else if v.lo() == &zero && v.hi() == &zero {
        Truth3::True
    } else {
        Truth3::Unknown
    };
    match a.rel {
        Relation::Eq => eq,
        Relation::Ne => !eq,
        Relation::Lt => {
            if v.hi() < &zero {
                Truth3::True
            } else if v.lo() >= &zero {
                Truth3::False
            } else {
                Truth3::Unknown
            }
        }
        Relation::Le => {
            if v.hi() <= &zero {
                Truth3::True
            } else if v.lo() > &zero {
                Truth3::False
            } else {
                Truth3::Unknown
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::Dyadic;
    use crate::syntax::{parse_formula, parse_term};

    fn boxed(s: &str) -> IntervalBox {
        IntervalBox::parse(s, 64).unwrap()
    }

    fn poly(s: &str) -> CanonicalPoly {
        normalize(&parse_term(s).unwrap()).unwrap()
    }

    #[test]
    fn simple_enclosures() {
        let r = eval_poly(&poly("x1"), VarLayout::plain(1), &boxed("[2,3]"), 64).unwrap();
        assert_eq!(r, Interval::parse("[2,3]", 64).unwrap());
        let r = eval_poly(&poly("E(x1)"), VarLayout::plain(1), &boxed("[0,0]"), 64).unwrap();
        assert!(r.contains(&Dyadic::one()));
        assert!(r.width().unwrap() <= Dyadic::pow2(-62));
        let r = eval_poly(&poly("x1*E(x1) - 1"), VarLayout::plain(1), &boxed("[0.567143, 0.567144]"), 64).unwrap();
        assert!(r.contains_zero());
    }

    #[test]
    fn dimension_and_missing_variables() {
        let e = eval_poly(&poly("x2"), VarLayout::plain(1), &boxed("[0,1]"), 64).unwrap_err();
        assert_eq!(e, EvalError::MissingVariable(Var::X(2)));
        let e = eval_poly(&poly("x1"), VarLayout::plain(2), &boxed("[0,1]"), 64).unwrap_err();
        assert_eq!(e, EvalError::Dimension { expected: 2, found: 1 });
    }

    #[test]
    fn formulas() {
        let l = VarLayout::plain(1);
        let f = parse_formula("x1 < x1 + 1").unwrap();
        assert_eq!(eval_formula(&f, l, &boxed("[-100, 7]"), 64), Truth3::True);
        let f = parse_formula("x1 = 0").unwrap();
        assert_eq!(eval_formula(&f, l, &boxed("[1,2]"), 64), Truth3::False);
        assert_eq!(eval_formula(&f, l, &boxed("[-1,1]"), 64), Truth3::Unknown);
        assert_eq!(eval_formula(&f, l, &boxed("[0,0]"), 64), Truth3::True);
        let f = parse_formula("E(x1 + 1) = E(x1)*E(1)").unwrap();
        assert_eq!(eval_formula(&f, l, &boxed("[-1,1]"), 64), Truth3::True);
        let f = parse_formula("x1 != 0 | x1 <= 5").unwrap();
        assert_eq!(eval_formula(&f, l, &boxed("[-1,1]"), 64), Truth3::True);
    }

    #[test]
    fn partial_assignment() {
        let f = parse_formula("x1 > 2 & x2 < 0").unwrap();
        let mut a = BTreeMap::new();
        a.insert(Var::X(1), Interval::from_i64(3));
        assert_eq!(eval_formula_partial(&f, &a, 64), Truth3::Unknown);
        a.insert(Var::X(1), Interval::from_i64(1));
        assert_eq!(eval_formula_partial(&f, &a, 64), Truth3::False);
    }

    #[test]
    fn raw_terms_agree_with_canonical() {
        let t = parse_term("(x1 + 1)^2 - E(x1)*E(-x1)").unwrap();
        let b = boxed("[0.5, 0.75]");
        let a = eval_term(&t, VarLayout::plain(1), &b, 64).unwrap();
        let c = eval_poly(&normalize(&t).unwrap(), VarLayout::plain(1), &b, 64).unwrap();
        assert!(a.overlaps(&c));
    }
}
