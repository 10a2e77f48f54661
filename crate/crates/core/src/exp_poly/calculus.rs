use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;

use super::{CanonicalPoly, ExpPolyError, MonoKey, Var};

/// Size measures used to bound enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Complexity {
    pub tower_height: usize,
    pub monomials: usize,
    pub coeff_bits: u64,
}

impl CanonicalPoly {
    /// `d self / d v`, with `E(u)' = u' E(u)`.
    pub fn partial_derivative(&self, v: Var) -> CanonicalPoly {
        let mut out = CanonicalPoly::zero();
        for m in &self.terms {
            if let Some(pos) = m.key.powers.iter().position(|&(w, _)| w == v) {
                let e = m.key.powers[pos].1;
                let mut powers = m.key.powers.clone();
                if e == 1 {
                    powers.remove(pos);
                } else {
                    powers[pos].1 = e - 1;
                }
                let key = MonoKey { powers, exp: m.key.exp.clone() };
                out = out.add(&CanonicalPoly::from_monomials([(key, &m.coeff * BigInt::from(e))]));
            }
            if let Some(q) = &m.key.exp {
                let dq = q.partial_derivative(v);
                if !dq.is_zero() {
                    let whole = CanonicalPoly::from_monomials([(m.key.clone(), m.coeff.clone())]);
                    out = out.add(&whole.mul(&dq));
                }
            }
        }
        out
    }

    /// Replace every variable by its image; errors if a variable is unmapped.
    pub fn substitute(&self, assignment: &BTreeMap<Var, CanonicalPoly>) -> Result<CanonicalPoly, ExpPolyError> {
        let mut out = CanonicalPoly::zero();
        for m in &self.terms {
            let mut t = CanonicalPoly::constant(m.coeff.clone());
            for &(v, e) in &m.key.powers {
                let img = assignment.get(&v).ok_or(ExpPolyError::MissingVariable(v))?;
                t = t.mul(&img.pow(e));
            }
            if let Some(q) = &m.key.exp {
                t = t.mul(&q.substitute(assignment)?.exp());
            }
            out = out.add(&t);
        }
        Ok(out)
    }

    /// Rename variables through `f`.
    pub fn rename(&self, f: impl Fn(Var) -> Var) -> CanonicalPoly {
        let map: BTreeMap<Var, CanonicalPoly> = self.vars().into_iter().map(|v| (v, CanonicalPoly::var(f(v)))).collect();
        self.substitute(&map).expect("every occurring variable is mapped")
    }

    /// Variables occurring anywhere, including inside exponentials.
    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        for m in &self.terms {
            out.extend(m.key.powers.iter().map(|&(v, _)| v));
            if let Some(q) = &m.key.exp {
                q.collect_vars(out);
            }
        }
    }

    pub fn tower_height(&self) -> usize {
        self.terms.iter().filter_map(|m| m.key.exp.as_ref().map(|q| 1 + q.tower_height())).max().unwrap_or(0)
    }

    fn max_coeff_bits(&self) -> u64 {
        self.terms
            .iter()
            .map(|m| {
                let inner = m.key.exp.as_ref().map_or(0, |q| q.max_coeff_bits());
                m.coeff.bits().max(inner)
            })
            .max()
            .unwrap_or(0)
    }

    /// Tower height, top-level monomial count, and the largest coefficient
    /// bit length at any nesting level.
    pub fn complexity(&self) -> Complexity {
        Complexity { tower_height: self.tower_height(), monomials: self.terms.len(), coeff_bits: self.max_coeff_bits() }
    }
}
