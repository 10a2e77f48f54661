use std::cmp::Ordering;

use super::{EclNumber, EnumBound};
use crate::certify::{refine, solve_in_box, SolverConfig};
use crate::interval::IntervalBox;
use crate::khovanskii::KhovanskiiSystem;
use crate::par;
use crate::syntax::system_source;

/// Width below which overlapping enclosures are treated as one number.
pub const MERGE_WIDTH: f64 = 1e-30;
const MERGE_PRECISION: u32 = 128;
const CHUNK: usize = 256;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub number: EclNumber,
    pub system_source: String,
    /// `(system index, certificate index)` of the witness.
    pub cert_ref: (usize, usize),
    /// Other witnesses whose enclosures still overlap this one at
    /// [`MERGE_WIDTH`]; equality is not decided.
    pub aliases: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CatalogReport {
    /// Ascending by enclosure.
    pub entries: Vec<CatalogEntry>,
    pub systems_solved: usize,
    /// Systems whose solve ran out of splits.
    pub exhausted: Vec<String>,
    /// Systems with undecided boxes, and how many.
    pub undecided: Vec<(String, usize)>,
}

/// `bx` padded to `n` coordinates by repeating its last one.
fn fit_box(bx: &IntervalBox, n: usize) -> IntervalBox {
    let mut c: Vec<_> = bx.coords().iter().take(n).cloned().collect();
    let last = c.last().cloned().expect("non-empty box");
    c.resize(n, last);
    IntervalBox::new(c)
}

fn separated(a: &mut CatalogEntry, b: &mut CatalogEntry, cfg: &SolverConfig) -> bool {
    if !a.number.enclosure.overlaps(&b.number.enclosure) {
        return true;
    }
    let prec = cfg.precision.max(MERGE_PRECISION);
    let max = cfg.max_precision.max(prec);
    for e in [&mut *a, &mut *b] {
        if let Ok(c) = refine(&e.number.certificate, MERGE_WIDTH, prec, max) {
            if let Ok(n) = EclNumber::from_certificate(c) {
                e.number = n;
            }
        }
    }
    !a.number.enclosure.overlaps(&b.number.enclosure)
}

/// Solve every enumerated system in `bx` and collect the first coordinates.
pub fn catalog(bound: EnumBound, bx: &IntervalBox, cfg: &SolverConfig) -> CatalogReport {
    catalog_systems(super::enumerate_systems(bound), bx, cfg)
}

/// As [`catalog`] over an explicit stream of systems.
pub fn catalog_systems(systems: impl IntoIterator<Item = KhovanskiiSystem>, bx: &IntervalBox, cfg: &SolverConfig) -> CatalogReport {
    let mut report = CatalogReport::default();
    if bx.dim() == 0 {
        return report;
    }
    let mut found: Vec<CatalogEntry> = Vec::new();
    let mut it = systems.into_iter().peekable();
    while it.peek().is_some() {
        let chunk: Vec<KhovanskiiSystem> = it.by_ref().take(CHUNK).collect();
        let base = report.systems_solved;
        let solved = par::map(cfg.parallel, &chunk, |s| solve_in_box(s, &fit_box(bx, s.n()), &cfg.clone().with_parallel(false)));
        for (i, (s, r)) in chunk.iter().zip(solved).enumerate() {
            let src = system_source(s);
            let Ok(r) = r else { continue };
            if r.budget_exhausted {
                report.exhausted.push(src.clone());
            }
            if !r.undecided.is_empty() {
                report.undecided.push((src.clone(), r.undecided.len()));
            }
            for (j, c) in r.certificates.into_iter().enumerate() {
                if let Ok(number) = EclNumber::from_certificate(c) {
                    found.push(CatalogEntry { number, system_source: src.clone(), cert_ref: (base + i, j), aliases: Vec::new() });
                }
            }
        }
        report.systems_solved += chunk.len();
    }
    found.sort_by(entry_cmp);
    let mut entries: Vec<CatalogEntry> = Vec::new();
    for mut e in found {
        let mut merged = false;
        for k in entries.iter_mut().rev() {
            if k.number.enclosure.hi() < e.number.enclosure.lo() {
                break;
            }
            if !separated(k, &mut e, cfg) {
                // The earliest-enumerated witness represents the number.
                if e.cert_ref < k.cert_ref {
                    std::mem::swap(&mut k.number, &mut e.number);
                    std::mem::swap(&mut k.system_source, &mut e.system_source);
                    std::mem::swap(&mut k.cert_ref, &mut e.cert_ref);
                }
                k.aliases.push(e.system_source.clone());
                merged = true;
                break;
            }
        }
        if !merged {
            entries.push(e);
        }
    }
    entries.sort_by(entry_cmp);
    report.entries = entries;
    report
}

fn entry_cmp(a: &CatalogEntry, b: &CatalogEntry) -> Ordering {
    a.number.enclosure.lex_cmp(&b.number.enclosure).then_with(|| a.cert_ref.cmp(&b.cert_ref))
}

/// Export lines `(enclosure, system-source, cert-ref)`.
pub fn catalog_lines(report: &CatalogReport) -> Vec<String> {
    report
        .entries
        .iter()
        .map(|e| format!("({}, {}, s{}#{})", e.number.enclosure.to_decimal(17), e.system_source, e.cert_ref.0, e.cert_ref.1 + 1))
        .collect()
}
