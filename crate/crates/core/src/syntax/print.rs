//! Printers. Output of every printer reparses to an equal value.

use std::fmt::{self, Write};

use num_traits::{One, Signed};

use super::ConstraintFormula;
use crate::exp_poly::{CanonicalPoly, ExpTerm, Var};
use crate::khovanskii::KhovanskiiSystem;

#[derive(Clone, Copy, PartialEq, Eq)]
enum Ctx {
    /// Whole term, or the first item of a sum.
    Top,
    /// Factor of a product after the first.
    Factor,
    /// Base of a power.
    Base,
}

type Names<'a> = &'a dyn Fn(Var) -> String;

fn x_names(v: Var) -> String {
    v.to_string()
}

fn c_names(v: Var) -> String {
    match v {
        Var::X(k) => format!("c{}", k),
        Var::Y => "y".into(),
    }
}

fn write_term(out: &mut String, t: &ExpTerm, ctx: Ctx, names: Names) {
    match t {
        ExpTerm::Const(c) => {
            if c.is_negative() && ctx != Ctx::Top {
                let _ = write!(out, "({})", c);
            } else {
                let _ = write!(out, "{}", c);
            }
        }
        ExpTerm::Var(v) => out.push_str(&names(*v)),
        ExpTerm::Exp(a) => {
            out.push_str("E(");
            write_term(out, a, Ctx::Top, names);
            out.push(')');
        }
        ExpTerm::Pow(b, n) => {
            let wrap = ctx == Ctx::Base;
            if wrap {
                out.push('(');
            }
            write_term(out, b, Ctx::Base, names);
            let _ = write!(out, "^{}", n);
            if wrap {
                out.push(')');
            }
        }
        ExpTerm::Product(fs) => {
            if fs.is_empty() {
                out.push('1');
                return;
            }
            let wrap = ctx != Ctx::Top;
            if wrap {
                out.push('(');
            }
            for (i, f) in fs.iter().enumerate() {
                if i > 0 {
                    out.push('*');
                }
                write_factor(out, f, i == 0, names);
            }
            if wrap {
                out.push(')');
            }
        }
        ExpTerm::Sum(items) => {
            if items.is_empty() {
                out.push('0');
                return;
            }
            let wrap = ctx != Ctx::Top;
            if wrap {
                out.push('(');
            }
            for (i, item) in items.iter().enumerate() {
                if i == 0 {
                    write_sum_item(out, item, names);
                    continue;
                }
                match item {
                    ExpTerm::Const(c) if c.is_negative() => {
                        let _ = write!(out, " - {}", -c);
                    }
                    ExpTerm::Product(fs) if fs.len() >= 2 && matches!(&fs[0], ExpTerm::Const(c) if c.is_negative()) => {
                        let ExpTerm::Const(c) = &fs[0] else { unreachable!() };
                        let mut flipped = fs.clone();
                        flipped[0] = ExpTerm::Const(-c);
                        out.push_str(" - ");
                        write_term(out, &ExpTerm::Product(flipped), Ctx::Top, names);
                    }
                    _ => {
                        out.push_str(" + ");
                        write_sum_item(out, item, names);
                    }
                }
            }
            if wrap {
                out.push(')');
            }
        }
    }
}

fn write_sum_item(out: &mut String, t: &ExpTerm, names: Names) {
    match t {
        ExpTerm::Sum(_) => write_term(out, t, Ctx::Factor, names),
        _ => write_term(out, t, Ctx::Top, names),
    }
}

fn write_factor(out: &mut String, t: &ExpTerm, first: bool, names: Names) {
    match t {
        ExpTerm::Const(_) if first => write_term(out, t, Ctx::Top, names),
        ExpTerm::Pow(..) => write_term(out, t, Ctx::Top, names),
        _ => write_term(out, t, Ctx::Factor, names),
    }
}

fn write_poly(out: &mut String, p: &CanonicalPoly, names: Names) {
    if p.is_zero() {
        out.push('0');
        return;
    }
    for (i, m) in p.terms().iter().enumerate() {
        let neg = m.coeff.is_negative();
        match (i, neg) {
            (0, true) => out.push('-'),
            (0, false) => {}
            (_, true) => out.push_str(" - "),
            (_, false) => out.push_str(" + "),
        }
        let abs = m.coeff.abs();
        let mut factors: Vec<String> = Vec::new();
        for &(v, e) in m.key.powers() {
            if e == 1 {
                factors.push(names(v));
            } else {
                factors.push(format!("{}^{}", names(v), e));
            }
        }
        if let Some(q) = m.key.exp_arg() {
            let mut s = String::from("E(");
            write_poly(&mut s, q, names);
            s.push(')');
            factors.push(s);
        }
        if factors.is_empty() || !abs.is_one() {
            factors.insert(0, abs.to_string());
        }
        out.push_str(&factors.join("*"));
    }
}

fn write_formula(out: &mut String, f: &ConstraintFormula, names: Names) {
    match f {
        ConstraintFormula::Atom(a) => {
            write_term(out, &a.lhs, Ctx::Top, names);
            let _ = write!(out, " {} ", a.rel);
            write_term(out, &a.rhs, Ctx::Top, names);
        }
        ConstraintFormula::Not(a) => {
            out.push('!');
            match **a {
                ConstraintFormula::Not(_) => write_formula(out, a, names),
                _ => {
                    out.push('(');
                    write_formula(out, a, names);
                    out.push(')');
                }
            }
        }
        ConstraintFormula::And(a, b) => {
            write_operand(out, a, |g| matches!(g, ConstraintFormula::Or(..)), names);
            out.push_str(" & ");
            write_operand(out, b, |g| matches!(g, ConstraintFormula::Or(..) | ConstraintFormula::And(..)), names);
        }
        ConstraintFormula::Or(a, b) => {
            write_operand(out, a, |_| false, names);
            out.push_str(" | ");
            write_operand(out, b, |g| matches!(g, ConstraintFormula::Or(..)), names);
        }
    }
}

fn write_operand(out: &mut String, f: &ConstraintFormula, wrap: impl Fn(&ConstraintFormula) -> bool, names: Names) {
    if wrap(f) {
        out.push('(');
        write_formula(out, f, names);
        out.push(')');
    } else {
        write_formula(out, f, names);
    }
}

impl fmt::Display for ExpTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_term(&mut s, self, Ctx::Top, &x_names);
        f.write_str(&s)
    }
}

impl fmt::Display for CanonicalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_poly(&mut s, self, &x_names);
        f.write_str(&s)
    }
}

impl fmt::Display for ConstraintFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_formula(&mut s, self, &x_names);
        f.write_str(&s)
    }
}

/// `vars: n` followed by one equation per line.
impl fmt::Display for KhovanskiiSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vars: {}", self.n())?;
        for eq in self.equations() {
            writeln!(f, "{}", eq)?;
        }
        Ok(())
    }
}

/// Single-line form: equations joined by `; `.
pub fn system_source(s: &KhovanskiiSystem) -> String {
    s.equations().iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; ")
}

/// A formula printed over constants `c1, c2, ...`.
pub fn constraint_source(f: &ConstraintFormula) -> String {
    let mut s = String::new();
    write_formula(&mut s, f, &c_names);
    s
}

#[cfg(test)]
mod tests {
    use super::super::{parse_constraint, parse_formula, parse_system, parse_term};
    use crate::exp_poly::normalize;

    #[test]
    fn canonical_round_trip() {
        for src in ["x1*E(x1) - 1", "E(E(0))", "-3*x1^2*x2 + E(-x1 + 2) - 7", "y*E(y) + x1", "0", "E(x1)^3 - E(2*x1)"] {
            let p = normalize(&parse_term(src).unwrap()).unwrap();
            let printed = p.to_string();
            let q = normalize(&parse_term(&printed).unwrap()).unwrap();
            assert_eq!(p, q, "{src} printed as {printed}");
        }
        let p = normalize(&parse_term("x1*E(x1) - 1").unwrap()).unwrap();
        assert_eq!(p.to_string(), "x1*E(x1) - 1");
    }

    #[test]
    fn term_round_trip_is_exact() {
        for src in ["x1 - 2*x2", "-(x1 + 1)*(-3)", "(x1^2)^3", "E(-1) - -1", "x1 + (x2 - x1)", "-1*2 - 3*y"] {
            let Ok(t) = parse_term(src) else { continue };
            let printed = t.to_string();
            assert_eq!(parse_term(&printed).unwrap(), t, "{src} printed as {printed}");
        }
    }

    #[test]
    fn formula_round_trip() {
        for src in ["x1 < E(x2) & !(x1 = 0)", "(x1 = 0 | x2 <= 1) & x1 != 2", "!!(x1 < 0)", "x1 < 0 | (x2 < 0 | x1 = x2)"] {
            let f = parse_formula(src).unwrap();
            assert_eq!(parse_formula(&f.to_string()).unwrap(), f, "{src}");
        }
        let f = parse_constraint("c2 < 1 & c2*E(c2) = 1").unwrap();
        assert_eq!(super::constraint_source(&f), "c2 < 1 & c2*E(c2) = 1");
    }

    #[test]
    fn system_round_trip() {
        let s = parse_system("E(y) - x1\nx1*E(x1) - 1").unwrap();
        assert_eq!(parse_system(&s.to_string()).unwrap(), s);
        assert_eq!(super::system_source(&s), "-x1 + E(y); x1*E(x1) - 1");
    }
}
