//! Layers of candidate values for constants `c1..cm`, each a solution of
//! its generator system, filtered by a cumulative constraint schedule.
//!
//! Admission is three-valued: a tuple is dropped only when the cumulative
//! conjunction evaluates to FALSE on its enclosures. A ray is therefore a
//! family of candidate assignments none of which is refuted; the absence of
//! a ray inside the given boxes refutes nothing about solutions outside them.

use std::collections::BTreeMap;

use thiserror::Error;

use super::{Layer, LayeredGraph};
use crate::certify::{solve_in_box, CertifyError, SolverConfig};
use crate::exp_poly::{ExpTerm, Var};
use crate::interval::{eval_formula_partial, Interval, IntervalBox, Truth3};
use crate::khovanskii::KhovanskiiSystem;
use crate::par;
use crate::syntax::{ConstraintFormula, Relation};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum KoenigError {
    #[error("{systems} generator systems but {boxes} boxes")]
    BoxCount { systems: usize, boxes: usize },
    #[error("constraint {index} mentions c{constant}, but there are only {count} constants")]
    UnknownConstant { index: usize, constant: u32, count: usize },
    #[error("depth {depth} exceeds the {count} generator systems")]
    Depth { depth: usize, count: usize },
    #[error("system {index}: {source}")]
    Solve { index: usize, source: CertifyError },
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingInstance {
    /// `generators[k-1]` defines `ck` as the first coordinate of one of its
    /// solutions.
    pub generators: Vec<KhovanskiiSystem>,
    pub boxes: Vec<IntervalBox>,
    /// `constraints[i-1]` is `phi_i`, over `c1..cm` stored as `x1..xm`.
    pub constraints: Vec<ConstraintFormula>,
    pub cfg: SolverConfig,
}

impl EmbeddingInstance {
    pub fn new(
        generators: Vec<KhovanskiiSystem>,
        boxes: Vec<IntervalBox>,
        constraints: Vec<ConstraintFormula>,
        cfg: SolverConfig,
    ) -> Result<EmbeddingInstance, KoenigError> {
        if generators.len() != boxes.len() {
            return Err(KoenigError::BoxCount { systems: generators.len(), boxes: boxes.len() });
        }
        let m = generators.len();
        for (i, phi) in constraints.iter().enumerate() {
            for v in phi.vars() {
                let k = match v {
                    Var::X(k) => k,
                    Var::Y => 0,
                };
                if k == 0 || k as usize > m {
                    return Err(KoenigError::UnknownConstant { index: i + 1, constant: k, count: m });
                }
            }
        }
        Ok(EmbeddingInstance { generators, boxes, constraints, cfg })
    }

    /// `phi_1 & ... & phi_n`, or `None` if the schedule is empty.
    pub fn cumulative(&self, n: usize) -> Option<ConstraintFormula> {
        ConstraintFormula::conjunction(self.constraints.iter().take(n).cloned())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingLayers {
    pub graph: LayeredGraph<Interval>,
    /// `bases[k-1]`: first-coordinate enclosures of the certified solutions
    /// of `generators[k-1]` in its box, ascending.
    pub bases: Vec<Vec<Interval>>,
    /// `excluded[n-1]`: tuples refuted by the cumulative conjunction.
    pub excluded: Vec<Vec<Vec<Interval>>>,
}

/// Why a search ended where it did.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Feasibility {
    /// Every layer is non-empty.
    Layers,
    /// No certified solution of generator `k` in its box; says nothing about
    /// other boxes.
    EmptyBase(usize),
    /// Layer `n` is empty because every candidate tuple was refuted.
    Refuted(usize),
}

impl EmbeddingLayers {
    pub fn feasibility(&self) -> Feasibility {
        for (n, layer) in self.graph.layers.iter().enumerate() {
            if layer.vertices.is_empty() {
                if self.bases[n].is_empty() {
                    return Feasibility::EmptyBase(n + 1);
                }
                return Feasibility::Refuted(n + 1);
            }
        }
        Feasibility::Layers
    }
}

fn assignment(tuple: &[Interval]) -> BTreeMap<Var, Interval> {
    tuple.iter().enumerate().map(|(k, v)| (Var::X(k as u32 + 1), v.clone())).collect()
}

/// Evaluate `phi` with `ck` bound to `tuple[k-1]`; unbound constants make
/// their atoms unknown.
pub fn admit(phi: Option<&ConstraintFormula>, tuple: &[Interval], prec: u32) -> Truth3 {
    match phi {
        None => Truth3::True,
        Some(f) => eval_formula_partial(f, &assignment(tuple), prec),
    }
}

/// Layers `X1..X(depth)`. `Xn` holds the tuples of `B1 x ... x Bn` on which
/// `phi_1 & ... & phi_n` is not FALSE. A refuted prefix stays refuted when
/// more constants are bound, so `Xn` is computed by extending `X(n-1)`.
pub fn build_layers(inst: &EmbeddingInstance, depth: usize) -> Result<EmbeddingLayers, KoenigError> {
    if depth > inst.generators.len() {
        return Err(KoenigError::Depth { depth, count: inst.generators.len() });
    }
    let prec = inst.cfg.precision;
    let mut bases = Vec::with_capacity(depth);
    let mut warnings = Vec::with_capacity(depth);
    for k in 0..depth {
        let r = solve_in_box(&inst.generators[k], &inst.boxes[k], &inst.cfg).map_err(|source| KoenigError::Solve { index: k + 1, source })?;
        let mut w = Vec::new();
        if !r.undecided.is_empty() {
            w.push(format!("c{}: {} undecided boxes; candidates may be missing", k + 1, r.undecided.len()));
        }
        if r.budget_exhausted {
            w.push(format!("c{}: split budget exhausted", k + 1));
        }
        let mut b: Vec<Interval> = r.certificates.iter().map(|c| c.first().clone()).collect();
        b.sort_by(|x, y| x.lex_cmp(y));
        if b.is_empty() {
            w.push(format!("c{}: no certified solution in {}", k + 1, inst.boxes[k]));
        }
        bases.push(b);
        warnings.push(w);
    }
    let mut layers: Vec<Vec<Vec<Interval>>> = Vec::with_capacity(depth);
    let mut excluded = Vec::with_capacity(depth);
    let mut prev: Vec<Vec<Interval>> = vec![Vec::new()];
    for n in 1..=depth {
        let phi = inst.cumulative(n);
        let candidates: Vec<Vec<Interval>> =
            prev.iter().flat_map(|t| bases[n - 1].iter().map(move |b| t.iter().chain(Some(b)).cloned().collect())).collect();
        let verdicts = par::map(inst.cfg.parallel, &candidates, |t| admit(phi.as_ref(), t, prec));
        let (mut keep, mut drop) = (Vec::new(), Vec::new());
        for (t, v) in candidates.into_iter().zip(verdicts) {
            if v == Truth3::False {
                drop.push(t);
            } else {
                keep.push(t);
            }
        }
        layers.push(keep.clone());
        excluded.push(drop);
        prev = keep;
    }
    let mut graph = LayeredGraph::from_prefix(layers);
    for (layer, w) in graph.layers.iter_mut().zip(warnings) {
        let Layer { warnings, .. } = layer;
        *warnings = w;
    }
    Ok(EmbeddingLayers { graph, bases, excluded })
}

/// A finite fragment of the order diagram of `values`: `phi_n` is the
/// conjunction of the strict order relations, decided on the enclosures,
/// between `cn` or `E(cn)` and every earlier term among `c1, E(c1), ...,
/// cn`. Undecided pairs are left out.
pub fn diagram_schedule(values: &[Interval], prec: u32) -> Vec<ConstraintFormula> {
    let term = |k: usize, e: bool| {
        let c = ExpTerm::x(k as u32 + 1);
        if e {
            ExpTerm::exp(c)
        } else {
            c
        }
    };
    let value = |k: usize, e: bool| if e { values[k].exp(prec) } else { values[k].clone() };
    let mut out = Vec::with_capacity(values.len());
    for n in 0..values.len() {
        let mut lits = Vec::new();
        let mut earlier: Vec<(usize, bool)> = (0..n).flat_map(|k| [(k, false), (k, true)]).collect();
        earlier.push((n, false));
        for e in [false, true] {
            for &(k, ek) in &earlier {
                if (k, ek) == (n, e) {
                    continue;
                }
                let (a, b) = (value(n, e), value(k, ek));
                if a.hi() < b.lo() {
                    lits.push(ConstraintFormula::atom(term(n, e), Relation::Lt, term(k, ek)));
                } else if b.hi() < a.lo() {
                    lits.push(ConstraintFormula::atom(term(k, ek), Relation::Lt, term(n, e)));
                }
            }
        }
        let phi = ConstraintFormula::conjunction(lits)
            .unwrap_or_else(|| ConstraintFormula::atom(term(n, false), Relation::Eq, term(n, false)));
        out.push(phi);
    }
    out
}
