//! Square systems of exponential polynomials with their symbolic Jacobian,
//! the logarithm augmentation, and builders that combine two systems into
//! one whose first coordinate is a sum, product, inverse, negation or
//! exponential of the first coordinates of the inputs.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use thiserror::Error;

use crate::exp_poly::{CanonicalPoly, Var, VarLayout};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SystemError {
    #[error("system has {equations} equations in {vars} variables")]
    Arity { equations: usize, vars: usize },
    #[error("variable {0} is outside the system's variables")]
    UnknownVariable(Var),
    #[error("empty system")]
    Empty,
}

/// `f_1 = ... = f_n = 0` in the variables of `layout`, with the Jacobian
/// matrix `J[i][j] = d f_i / d v_j` and its determinant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct KhovanskiiSystem {
    layout: VarLayout,
    equations: Vec<CanonicalPoly>,
    jacobian: Vec<Vec<CanonicalPoly>>,
    det: CanonicalPoly,
}

impl KhovanskiiSystem {
    pub fn new(layout: VarLayout, equations: Vec<CanonicalPoly>) -> Result<KhovanskiiSystem, SystemError> {
        if equations.is_empty() {
            return Err(SystemError::Empty);
        }
        if equations.len() != layout.len() {
            return Err(SystemError::Arity { equations: equations.len(), vars: layout.len() });
        }
        for eq in &equations {
            if let Some(v) = eq.vars().into_iter().find(|v| layout.index_of(*v).is_none()) {
                return Err(SystemError::UnknownVariable(v));
            }
        }
        let vars = layout.vars();
        let jacobian: Vec<Vec<CanonicalPoly>> =
            equations.iter().map(|f| vars.iter().map(|&v| f.partial_derivative(v)).collect()).collect();
        let det = determinant(&jacobian);
        Ok(KhovanskiiSystem { layout, equations, jacobian, det })
    }

    /// Variables `x1..xn` if no equation mentions `y`, else `y, x1..x(n-1)`.
    pub fn positional(equations: Vec<CanonicalPoly>) -> Result<KhovanskiiSystem, SystemError> {
        let n = equations.len();
        if n == 0 {
            return Err(SystemError::Empty);
        }
        let uses_y = equations.iter().any(|e| e.vars().contains(&Var::Y));
        let layout = if uses_y { VarLayout::with_y(n) } else { VarLayout::plain(n) };
        KhovanskiiSystem::new(layout, equations)
    }

    pub fn n(&self) -> usize {
        self.layout.len()
    }

    pub fn layout(&self) -> VarLayout {
        self.layout
    }

    pub fn vars(&self) -> Vec<Var> {
        self.layout.vars()
    }

    pub fn equations(&self) -> &[CanonicalPoly] {
        &self.equations
    }

    pub fn jacobian(&self) -> &[Vec<CanonicalPoly>] {
        &self.jacobian
    }

    pub fn jacobian_det(&self) -> &CanonicalPoly {
        &self.det
    }

    /// Maximum tower height over the equations.
    pub fn tower_height(&self) -> usize {
        self.equations.iter().map(CanonicalPoly::tower_height).max().unwrap_or(0)
    }

    /// Rewrite to the plain layout `x1..xn` by position.
    fn to_plain(&self) -> Vec<CanonicalPoly> {
        if !self.layout.has_y() {
            return self.equations.clone();
        }
        let layout = self.layout;
        self.equations.iter().map(|e| e.rename(|v| Var::X(layout.index_of(v).expect("variable in layout") as u32 + 1))).collect()
    }
}

/// Cofactor expansion along the first row, skipping zero entries.
pub fn determinant(m: &[Vec<CanonicalPoly>]) -> CanonicalPoly {
    let n = m.len();
    if n == 0 {
        return CanonicalPoly::one();
    }
    let cols: Vec<usize> = (0..n).collect();
    det_minor(m, 0, &cols)
}

fn det_minor(m: &[Vec<CanonicalPoly>], row: usize, cols: &[usize]) -> CanonicalPoly {
    if cols.len() == 1 {
        return m[row][cols[0]].clone();
    }
    let mut acc = CanonicalPoly::zero();
    for (k, &c) in cols.iter().enumerate() {
        let entry = &m[row][c];
        if entry.is_zero() {
            continue;
        }
        let rest: Vec<usize> = cols.iter().copied().filter(|&d| d != c).collect();
        let term = entry.mul(&det_minor(m, row + 1, &rest));
        acc = if k % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

/// Prepend `y` with `E(y) - x1`. The input's variables are first moved to
/// `x1..xn` by position, so a previous `y` becomes `x1`; the result has
/// variables `y, x1..xn` and `det = E(y) * det(S)` after the same renaming.
pub fn augment_log(s: &KhovanskiiSystem) -> KhovanskiiSystem {
    let plain = s.to_plain();
    let y = CanonicalPoly::var(Var::Y);
    let mut equations = Vec::with_capacity(plain.len() + 1);
    equations.push(y.exp().sub(&CanonicalPoly::x(1)));
    equations.extend(plain);
    KhovanskiiSystem::new(VarLayout::with_y(s.n() + 1), equations).expect("augmented system is square")
}

/// `det(S)` with variables moved to `x1..xn` by position.
pub fn plain_det(s: &KhovanskiiSystem) -> CanonicalPoly {
    let layout = s.layout();
    if !layout.has_y() {
        return s.jacobian_det().clone();
    }
    s.jacobian_det().rename(|v| Var::X(layout.index_of(v).expect("variable in layout") as u32 + 1))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CombineOp {
    Sum,
    Product,
    Inverse,
    Neg,
    Exp,
}

impl CombineOp {
    pub fn is_binary(self) -> bool {
        matches!(self, CombineOp::Sum | CombineOp::Product)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CombineError {
    #[error("operation needs a second system")]
    MissingOperand,
    #[error("operation takes a single system")]
    UnexpectedOperand,
    #[error("combined determinant does not factor as expected")]
    DeterminantMismatch,
}

/// A combined system and the documented factorization of its determinant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombinedSystem {
    pub system: KhovanskiiSystem,
    /// `+1` or `-1`; `det = sign * det(Sa) * det(Sb) * w`.
    pub det_sign: i32,
    /// `w`: `u` (the first coordinate of `Sa`, i.e. `x2`) for inverse, else `1`.
    pub factor: CanonicalPoly,
}

/// Build a system whose first coordinate `z` is `u + v`, `u * v`, `1/u`,
/// `-u` or `E(u)`, where `u`, `v` are the first coordinates of `sa`, `sb`.
///
/// Layout of the result: `x1 = z`, then the variables of `sa`, then those of
/// `sb`, each block in its original order. The new equation comes first.
pub fn combine(sa: &KhovanskiiSystem, sb: Option<&KhovanskiiSystem>, op: CombineOp) -> Result<CombinedSystem, CombineError> {
    match (op.is_binary(), sb.is_some()) {
        (true, false) => return Err(CombineError::MissingOperand),
        (false, true) => return Err(CombineError::UnexpectedOperand),
        _ => {}
    }
    let na = sa.n() as u32;
    let shift = |eqs: Vec<CanonicalPoly>, by: u32| -> Vec<CanonicalPoly> {
        eqs.into_iter()
            .map(|e| {
                e.rename(|v| match v {
                    Var::X(i) => Var::X(i + by),
                    Var::Y => unreachable!("plain layout"),
                })
            })
            .collect()
    };
    let z = CanonicalPoly::x(1);
    let u = CanonicalPoly::x(2);
    let v = CanonicalPoly::x(2 + na);
    let head = match op {
        CombineOp::Sum => z.sub(&u.add(&v)),
        CombineOp::Product => z.sub(&u.mul(&v)),
        CombineOp::Inverse => z.mul(&u).sub(&CanonicalPoly::one()),
        CombineOp::Neg => z.add(&u),
        CombineOp::Exp => z.sub(&u.exp()),
    };
    let mut equations = vec![head];
    equations.extend(shift(sa.to_plain(), 1));
    let mut expected = plain_det(sa).rename(|v| match v {
        Var::X(i) => Var::X(i + 1),
        Var::Y => unreachable!("plain"),
    });
    if let Some(sb) = sb {
        equations.extend(shift(sb.to_plain(), 1 + na));
        let db = plain_det(sb).rename(|v| match v {
            Var::X(i) => Var::X(i + 1 + na),
            Var::Y => unreachable!("plain"),
        });
        expected = expected.mul(&db);
    }
    let factor = if op == CombineOp::Inverse { u.clone() } else { CanonicalPoly::one() };
    expected = expected.mul(&factor);
    let n = equations.len();
    let system = KhovanskiiSystem::new(VarLayout::plain(n), equations).expect("combined system is square");
    let det = system.jacobian_det();
    let det_sign = if *det == expected {
        1
    } else if *det == expected.neg() {
        -1
    } else {
        return Err(CombineError::DeterminantMismatch);
    };
    Ok(CombinedSystem { system, det_sign, factor })
}

/// Variables that some equation depends on.
pub fn occurring_vars(s: &KhovanskiiSystem) -> BTreeSet<Var> {
    s.equations().iter().flat_map(|e| e.vars()).collect()
}

/// Integer constant `c` as the one-variable system `x1 - c`.
pub fn constant_system(c: i64) -> KhovanskiiSystem {
    KhovanskiiSystem::new(VarLayout::plain(1), vec![CanonicalPoly::x(1).sub(&CanonicalPoly::constant(BigInt::from(c)))])
        .expect("square")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_system;

    fn sys(s: &str) -> KhovanskiiSystem {
        parse_system(s).unwrap()
    }

    #[test]
    fn determinants() {
        assert_eq!(sys("x1 - 5").jacobian_det(), &CanonicalPoly::one());
        let s = sys("x1*E(x1) - 1");
        let e = CanonicalPoly::x(1).exp();
        assert_eq!(s.jacobian_det(), &e.add(&CanonicalPoly::x(1).mul(&e)));
        assert_eq!(sys("x1 - 3; x2 + 4").jacobian_det(), &CanonicalPoly::one());
        let s = sys("x1*x2 - 1; x1 - x2");
        // [[x2, x1], [1, -1]] -> -x2 - x1
        assert_eq!(s.jacobian_det(), &CanonicalPoly::x(1).add(&CanonicalPoly::x(2)).neg());
    }

    #[test]
    fn augmentation_identity() {
        let s = sys("x1 - E(1)");
        let a = augment_log(&s);
        assert_eq!(a.n(), 2);
        assert_eq!(a.equations()[0], CanonicalPoly::var(Var::Y).exp().sub(&CanonicalPoly::x(1)));
        assert_eq!(a.jacobian_det(), &CanonicalPoly::var(Var::Y).exp());

        let s = sys("x1*E(x1) - 1");
        let a = augment_log(&s);
        assert_eq!(a.jacobian_det(), &CanonicalPoly::var(Var::Y).exp().mul(s.jacobian_det()));
    }

    #[test]
    fn double_augmentation() {
        let s = sys("x1*E(x1) - 1");
        let a2 = augment_log(&augment_log(&s));
        // Outer y, inner y renamed to x1, original x1 renamed to x2.
        let y = CanonicalPoly::var(Var::Y);
        let inner = CanonicalPoly::x(1);
        let shifted = s.jacobian_det().rename(|_| Var::X(2));
        assert_eq!(a2.jacobian_det(), &y.exp().mul(&inner.exp()).mul(&shifted));
    }

    #[test]
    fn combine_block_structure() {
        let e = sys("x1 - E(1)");
        let w = sys("x1*E(x1) - 1");
        for op in [CombineOp::Sum, CombineOp::Product] {
            let c = combine(&e, Some(&w), op).unwrap();
            assert_eq!(c.system.n(), 3);
        }
        for op in [CombineOp::Inverse, CombineOp::Neg, CombineOp::Exp] {
            let c = combine(&w, None, op).unwrap();
            assert_eq!(c.system.n(), 2);
        }
        assert_eq!(combine(&e, None, CombineOp::Sum), Err(CombineError::MissingOperand));
        assert_eq!(combine(&e, Some(&e), CombineOp::Exp), Err(CombineError::UnexpectedOperand));
        let inv = combine(&e, None, CombineOp::Inverse).unwrap();
        assert_eq!(inv.factor, CanonicalPoly::x(2));
    }

    #[test]
    fn combine_accepts_augmented_inputs() {
        let a = augment_log(&sys("x1 - E(1)"));
        let c = combine(&a, None, CombineOp::Exp).unwrap();
        assert_eq!(c.system.n(), 3);
        assert!(!c.system.layout().has_y());
    }
}
