//! Bounded enumeration of square systems with integer coefficients.
//!
//! Equations are integer combinations of a fixed monomial basis. For `n`
//! variables the level-0 basis is the squarefree monomials in `x1..xn`
//! (including `1`); level `t` adds `b * E(q)` and `b * E(-q)` for every
//! level-0 `b` and every level-`t-1` element `q`. Each basis element is a
//! single monomial, so distinct coefficient vectors give distinct canonical
//! polynomials and the stream is duplicate-free.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::exp_poly::{CanonicalPoly, VarLayout};
use crate::khovanskii::KhovanskiiSystem;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct EnumBound {
    /// Largest number of variables (and equations).
    pub max_n: usize,
    /// Largest nesting depth of `E`.
    pub max_tower: usize,
    /// Coefficients range over `±1 ..= ±(2^bits - 1)`.
    pub max_coeff_bits: u32,
    /// Most monomials per equation.
    pub max_monomials: usize,
}

impl EnumBound {
    fn max_coeff(&self) -> i64 {
        (1i64 << self.max_coeff_bits.min(62)) - 1
    }
}

/// The monomial basis for `n` variables up to tower height `max_tower`,
/// ordered by level and then by canonical order.
pub fn equation_basis(n: usize, max_tower: usize) -> Vec<CanonicalPoly> {
    let mut level0 = Vec::new();
    for mask in 0u32..(1 << n) {
        let mut m = CanonicalPoly::one();
        for i in 0..n {
            if mask & (1 << i) != 0 {
                m = m.mul(&CanonicalPoly::x(i as u32 + 1));
            }
        }
        level0.push(m);
    }
    level0.sort();
    let mut seen: BTreeSet<CanonicalPoly> = level0.iter().cloned().collect();
    let mut basis = level0.clone();
    let mut prev = level0.clone();
    for _ in 0..max_tower {
        let mut level = Vec::new();
        for q in &prev {
            for arg in [q.clone(), q.neg()] {
                let e = arg.exp();
                for b in &level0 {
                    let m = b.mul(&e);
                    if seen.insert(m.clone()) {
                        level.push(m);
                    }
                }
            }
        }
        level.sort();
        basis.extend(level.iter().cloned());
        prev = basis.clone();
    }
    basis
}

/// Advance `idx` (strictly increasing, values `< n`) to the next
/// combination in lexicographic order.
fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - (k - i) {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn first_combination(k: usize, n: usize) -> Option<Vec<usize>> {
    (k <= n).then(|| (0..k).collect())
}

/// Non-constant primitive equations with positive leading coefficient, in
/// order of support size, support, then coefficient vector.
fn equations(n: usize, bound: &EnumBound) -> Vec<CanonicalPoly> {
    let basis = equation_basis(n, bound.max_tower);
    let c = bound.max_coeff();
    let coeffs: Vec<i64> = (1..=c).flat_map(|v| [v, -v]).collect();
    let mut out = Vec::new();
    for k in 1..=bound.max_monomials.min(basis.len()) {
        let Some(mut support) = first_combination(k, basis.len()) else { break };
        loop {
            let mut choice = vec![0usize; k];
            loop {
                let p = support
                    .iter()
                    .zip(&choice)
                    .fold(CanonicalPoly::zero(), |acc, (&b, &ci)| acc.add(&basis[b].scale(&BigInt::from(coeffs[ci]))));
                let keep = p.as_integer().is_none()
                    && p.leading_coeff().is_some_and(|l| l.is_positive())
                    && p.content().is_one();
                if keep {
                    out.push(p);
                }
                let mut carry = true;
                for d in choice.iter_mut().rev() {
                    *d += 1;
                    if *d < coeffs.len() {
                        carry = false;
                        break;
                    }
                    *d = 0;
                }
                if carry {
                    break;
                }
            }
            if !next_combination(&mut support, basis.len()) {
                break;
            }
        }
    }
    out
}

/// Lazy, restartable stream of systems within `bound`: by number of
/// variables, then strictly increasing tuples of equations.
pub struct SystemEnumerator {
    bound: EnumBound,
    n: usize,
    pool: Vec<CanonicalPoly>,
    idx: Option<Vec<usize>>,
}

impl SystemEnumerator {
    fn load(&mut self) {
        self.pool = equations(self.n, &self.bound);
        self.idx = first_combination(self.n, self.pool.len());
    }
}

impl Iterator for SystemEnumerator {
    type Item = KhovanskiiSystem;

    fn next(&mut self) -> Option<KhovanskiiSystem> {
        loop {
            if self.n == 0 || self.n > self.bound.max_n {
                return None;
            }
            let Some(idx) = self.idx.as_mut() else {
                self.n += 1;
                if self.n <= self.bound.max_n {
                    self.load();
                }
                continue;
            };
            let eqs: Vec<CanonicalPoly> = idx.iter().map(|&i| self.pool[i].clone()).collect();
            if !next_combination(idx, self.pool.len()) {
                self.idx = None;
            }
            let sys = KhovanskiiSystem::new(VarLayout::plain(self.n), eqs).expect("square by construction");
            let occurs: BTreeSet<_> = sys.equations().iter().flat_map(|e| e.vars()).collect();
            if occurs.len() == self.n && !sys.jacobian_det().is_zero() {
                return Some(sys);
            }
        }
    }
}

pub fn enumerate_systems(bound: EnumBound) -> SystemEnumerator {
    let mut e = SystemEnumerator { bound, n: 1, pool: Vec::new(), idx: None };
    if bound.max_n >= 1 && bound.max_coeff_bits >= 1 && bound.max_monomials >= 1 {
        e.load();
    } else {
        e.n = 0;
    }
    e
}
