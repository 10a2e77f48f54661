//! Certified isolation of the solutions of a square system in a box.
//!
//! Branch and prune over interval boxes: a box is discarded when some
//! equation's enclosure excludes zero or the Krawczyk image misses it, and
//! is certified when the Krawczyk image lands in its interior. Certified
//! boxes are then contracted to the requested width and re-proved there,
//! together with a zero-free enclosure of the Jacobian determinant.
//!
//! Only the query box is searched. An empty report means no solution in
//! that box, not no solution at all.

mod krawczyk;
mod record;

use std::cmp::Ordering;

use thiserror::Error;

use crate::dyadic::Dyadic;
use crate::interval::{eval_poly, Interval, IntervalBox, DEFAULT_PRECISION};
use crate::khovanskii::KhovanskiiSystem;
use crate::par;
use krawczyk::{krawczyk, Step};

pub use record::RecordError;

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    /// Target width of every certificate box.
    pub eps: f64,
    /// Working precision in bits.
    pub precision: u32,
    /// Refinement escalates up to this precision before giving up.
    pub max_precision: u32,
    /// Bisection budget per solve.
    pub max_splits: u64,
    /// Boxes narrower than this that are neither pruned nor certified are
    /// reported undecided; `None` means `eps`.
    pub min_width: Option<f64>,
    /// Process each frontier level on the rayon pool.
    pub parallel: bool,
}

impl Default for SolverConfig {
    fn default() -> SolverConfig {
        SolverConfig {
            eps: 1e-12,
            precision: DEFAULT_PRECISION,
            max_precision: 256,
            max_splits: 1_000_000,
            min_width: None,
            parallel: true,
        }
    }
}

impl SolverConfig {
    pub fn with_eps(mut self, eps: f64) -> SolverConfig {
        self.eps = eps;
        self
    }

    pub fn with_precision(mut self, precision: u32) -> SolverConfig {
        self.precision = precision;
        self.max_precision = self.max_precision.max(precision);
        self
    }

    pub fn with_parallel(mut self, parallel: bool) -> SolverConfig {
        self.parallel = parallel;
        self
    }

    pub fn with_max_splits(mut self, max_splits: u64) -> SolverConfig {
        self.max_splits = max_splits;
        self
    }

    fn validate(&self) -> Result<(), CertifyError> {
        let ok_eps = self.eps.is_finite() && self.eps > 0.0;
        let ok_min = self.min_width.is_none_or(|w| w.is_finite() && w > 0.0);
        if !ok_eps || !ok_min || self.precision < 24 || self.max_precision < self.precision {
            return Err(CertifyError::Config(format!("{:?}", self)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CertifyError {
    #[error("box has dimension {found}, system has {expected} variables")]
    Dimension { expected: usize, found: usize },
    #[error("search box must be bounded")]
    Unbounded,
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error("first-coordinate enclosures of certificates {0} and {1} overlap; refine with a smaller eps")]
    Overlap(usize, usize),
    #[error("index {k} out of range for {count} certificates")]
    OutOfRange { k: usize, count: usize },
    #[error("refinement failed at precision up to {0}")]
    RefineFailed(u32),
}

/// A box proved to contain exactly one solution, with a Jacobian
/// determinant enclosure that excludes zero.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KhovanskiiCertificate {
    pub system: KhovanskiiSystem,
    pub region: IntervalBox,
    pub precision: u32,
    /// The Krawczyk image of `region` lies in its interior.
    pub newton_contraction: bool,
    /// Enclosure of the Jacobian determinant over `region`.
    pub jacobian_det: Interval,
}

impl KhovanskiiCertificate {
    /// Enclosure of the first coordinate.
    pub fn first(&self) -> &Interval {
        self.region.get(0)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub query: IntervalBox,
    /// Sorted by box, hence by first coordinate.
    pub certificates: Vec<KhovanskiiCertificate>,
    /// Boxes where neither exclusion nor certification succeeded.
    pub undecided: Vec<IntervalBox>,
    pub pruned_count: u64,
    /// Volume removed by pruning and contraction.
    pub pruned_volume: f64,
    pub splits_used: u64,
    pub budget_exhausted: bool,
}

impl SolveReport {
    /// No undecided residue: the certificates account for every solution in
    /// the query box.
    pub fn is_complete(&self) -> bool {
        self.undecided.is_empty()
    }
}

enum Outcome {
    Pruned,
    Certified { region: IntervalBox, cert: Option<KhovanskiiCertificate> },
    Undecided(IntervalBox),
    Split(IntervalBox, IntervalBox),
}

struct Worker<'a> {
    sys: &'a KhovanskiiSystem,
    eps: Dyadic,
    min_width: Dyadic,
    precision: u32,
    max_precision: u32,
}

const MAX_CONTRACTIONS: usize = 8;

impl Worker<'_> {
    fn excluded(&self, x: &IntervalBox) -> bool {
        self.sys
            .equations()
            .iter()
            .any(|f| !eval_poly(f, self.sys.layout(), x, self.precision).expect("layout matches").contains_zero())
    }

    /// Returns the outcome and the volume shaved off by contraction.
    fn process(&self, x0: &IntervalBox) -> (Outcome, f64) {
        let mut x = x0.clone();
        let mut shaved = 0.0;
        let mut stalled = false;
        for _ in 0..MAX_CONTRACTIONS {
            if self.excluded(&x) {
                return (Outcome::Pruned, shaved + x.volume_f64());
            }
            match krawczyk(self.sys, &x, self.precision) {
                Step::Empty => return (Outcome::Pruned, shaved + x.volume_f64()),
                Step::Interior(_) => {
                    let cert = refine_region(self.sys, &x, &self.eps, self.precision, self.max_precision);
                    return (Outcome::Certified { region: x, cert }, shaved);
                }
                Step::Contracted(kx) => {
                    let before = x.max_width().expect("finite box");
                    let after = kx.max_width().expect("finite box");
                    let progress = after < before && after.mul(&Dyadic::from_i64(4)) <= before.mul(&Dyadic::from_i64(3));
                    shaved += (x.volume_f64() - kx.volume_f64()).max(0.0);
                    x = kx;
                    stalled = true;
                    if !progress {
                        break;
                    }
                }
                Step::Undefined => break,
            }
        }
        if stalled {
            if let Some(region) = self.inflate_and_prove(&x) {
                let cert = refine_region(self.sys, &region, &self.eps, self.precision, self.max_precision);
                return (Outcome::Certified { region, cert }, shaved);
            }
        }
        let w = x.max_width().expect("finite box");
        if w <= self.min_width {
            return (Outcome::Undecided(x), shaved);
        }
        let i = split_coordinate(&x);
        match x.bisect(i) {
            Some((a, b)) => (Outcome::Split(a, b), shaved),
            None => (Outcome::Undecided(x), shaved),
        }
    }

    /// Epsilon-inflation: a solution on or near the boundary of `x` can be
    /// proved on a slightly larger box.
    fn inflate_and_prove(&self, x: &IntervalBox) -> Option<IntervalBox> {
        let mut cur = x.clone();
        for _ in 0..3 {
            let wide = inflate_box(&cur, &self.eps, self.precision);
            match krawczyk(self.sys, &wide, self.precision) {
                Step::Interior(_) => return Some(wide),
                Step::Contracted(k) => cur = k,
                _ => return None,
            }
        }
        None
    }
}

/// Grow each coordinate by `max(w/8, eps/8)` on both sides.
fn inflate_box(x: &IntervalBox, eps: &Dyadic, prec: u32) -> IntervalBox {
    let floor = eps.shl(-3);
    IntervalBox::new(
        x.coords()
            .iter()
            .map(|c| {
                let w = c.width().expect("finite").shl(-3);
                c.inflate(&std::cmp::max(w, floor.clone()), prec)
            })
            .collect(),
    )
}

/// Coordinate of largest width relative to `max(1, |x_i|)`; ties go to the
/// lowest index.
fn split_coordinate(x: &IntervalBox) -> usize {
    let mut best = 0;
    let mut best_rel = -1.0f64;
    for (i, c) in x.coords().iter().enumerate() {
        let w = c.width_f64();
        let mag = c.mag().map_or(f64::INFINITY, |m| m.to_f64()).max(1.0);
        let rel = w / mag;
        if rel > best_rel {
            best = i;
            best_rel = rel;
        }
    }
    best
}

/// Precisions tried by refinement: `p, 2p, 4p, ...` capped at `max`.
fn escalation(p: u32, max: u32) -> Vec<u32> {
    let mut out = vec![p];
    let mut q = p;
    while q < max {
        q = (q * 2).min(max);
        out.push(q);
    }
    out
}

/// Contract a box known to hold a unique solution down to width `eps`,
/// then prove the small box.
fn refine_region(sys: &KhovanskiiSystem, region: &IntervalBox, eps: &Dyadic, p: u32, max: u32) -> Option<KhovanskiiCertificate> {
    escalation(p, max).into_iter().find_map(|prec| refine_at(sys, region, eps, prec))
}

fn refine_at(sys: &KhovanskiiSystem, region: &IntervalBox, eps: &Dyadic, prec: u32) -> Option<KhovanskiiCertificate> {
    let half = eps.shl(-1);
    let mut x = region.clone();
    for _ in 0..200 {
        if x.max_width()? <= half {
            break;
        }
        let next = match krawczyk(sys, &x, prec) {
            Step::Interior(k) => k,
            Step::Contracted(k) => k,
            Step::Empty | Step::Undefined => return None,
        };
        if next == x {
            break;
        }
        x = next;
    }
    if x.max_width()? > half {
        return None;
    }
    // Pad by a few ulps so rounding in K cannot touch the boundary.
    let eighth = eps.shl(-3);
    let padded = IntervalBox::new(
        x.coords()
            .iter()
            .map(|c| {
                let mag = c.mag().expect("finite");
                let ulp = if mag.is_zero() { Dyadic::pow2(-(prec as i64)) } else { Dyadic::pow2(mag.top() - prec as i64 + 4) };
                let w = c.width().expect("finite").shl(-2);
                let d = std::cmp::min(std::cmp::max(w, ulp), eighth.clone());
                c.inflate(&d, prec)
            })
            .collect(),
    );
    for cand in [x, padded] {
        if cand.max_width()? > *eps {
            continue;
        }
        if let Some(cert) = prove(sys, &cand, prec) {
            return Some(cert);
        }
    }
    None
}

/// Build a certificate for `x` if both conditions hold at `prec`.
fn prove(sys: &KhovanskiiSystem, x: &IntervalBox, prec: u32) -> Option<KhovanskiiCertificate> {
    if !matches!(krawczyk(sys, x, prec), Step::Interior(_)) {
        return None;
    }
    let det = eval_poly(sys.jacobian_det(), sys.layout(), x, prec).ok()?;
    if det.contains_zero() {
        return None;
    }
    Some(KhovanskiiCertificate {
        system: sys.clone(),
        region: x.clone(),
        precision: prec,
        newton_contraction: true,
        jacobian_det: det,
    })
}

/// Isolate and certify the solutions of `sys` in `query`.
pub fn solve_in_box(sys: &KhovanskiiSystem, query: &IntervalBox, cfg: &SolverConfig) -> Result<SolveReport, CertifyError> {
    cfg.validate()?;
    if query.dim() != sys.n() {
        return Err(CertifyError::Dimension { expected: sys.n(), found: query.dim() });
    }
    if !query.is_finite() {
        return Err(CertifyError::Unbounded);
    }
    let worker = Worker {
        sys,
        eps: Dyadic::from_f64(cfg.eps).expect("validated"),
        min_width: Dyadic::from_f64(cfg.min_width.unwrap_or(cfg.eps)).expect("validated"),
        precision: cfg.precision,
        max_precision: cfg.max_precision,
    };
    let mut report = SolveReport {
        query: query.clone(),
        certificates: Vec::new(),
        undecided: Vec::new(),
        pruned_count: 0,
        pruned_volume: 0.0,
        splits_used: 0,
        budget_exhausted: false,
    };
    let mut regions: Vec<IntervalBox> = Vec::new();
    let mut found: Vec<(IntervalBox, KhovanskiiCertificate)> = Vec::new();
    let mut frontier = vec![query.clone()];
    while !frontier.is_empty() {
        let results = par::map(cfg.parallel, &frontier, |x| worker.process(x));
        let mut next = Vec::new();
        for (x, (outcome, shaved)) in frontier.iter().zip(results) {
            report.pruned_volume += shaved;
            match outcome {
                Outcome::Pruned => report.pruned_count += 1,
                Outcome::Certified { region, cert } => match cert {
                    Some(c) => {
                        regions.push(region.clone());
                        found.push((region, c));
                    }
                    None => report.undecided.push(region),
                },
                Outcome::Undecided(b) => report.undecided.push(b),
                Outcome::Split(a, b) => {
                    if report.splits_used < cfg.max_splits {
                        report.splits_used += 1;
                        next.push(a);
                        next.push(b);
                    } else {
                        report.budget_exhausted = true;
                        report.undecided.push(x.clone());
                    }
                }
            }
        }
        // A box inside a certified region holds at most that region's
        // solution, which is already accounted for.
        next.retain(|b| {
            let covered = regions.iter().any(|r| b.subset_of(r));
            if covered {
                report.pruned_count += 1;
                report.pruned_volume += b.volume_f64();
            }
            !covered
        });
        frontier = next;
    }
    report.undecided.retain(|b| !regions.iter().any(|r| b.subset_of(r)));
    report.undecided.sort_by(|a, b| a.lex_cmp(b));
    report.undecided.dedup();

    found.sort_by(|a, b| a.1.region.lex_cmp(&b.1.region).then_with(|| a.0.lex_cmp(&b.0)));
    let mut kept: Vec<(IntervalBox, KhovanskiiCertificate)> = Vec::new();
    for (region, cert) in found {
        if !cert.region.overlaps(query) {
            continue;
        }
        let clash = kept.iter().find(|(_, k)| k.region.overlaps(&cert.region));
        match clash {
            None => kept.push((region, cert)),
            Some((kr, k)) => {
                let hull = k.region.hull(&cert.region);
                if !(hull.subset_of(kr) || hull.subset_of(&region)) {
                    // Possibly a second solution within eps of the first.
                    report.undecided.push(cert.region.clone());
                }
            }
        }
    }
    report.certificates = kept.into_iter().map(|(_, c)| c).collect();
    report.undecided.sort_by(|a, b| a.lex_cmp(b));
    report.undecided = coalesce(std::mem::take(&mut report.undecided));
    Ok(report)
}

/// Merge consecutive boxes whose union is itself a box: equal in every
/// coordinate but one, overlapping in that one.
fn coalesce(boxes: Vec<IntervalBox>) -> Vec<IntervalBox> {
    let mut out: Vec<IntervalBox> = Vec::with_capacity(boxes.len());
    for b in boxes {
        if let Some(last) = out.last_mut() {
            let differ: Vec<usize> = (0..b.dim()).filter(|&i| last.get(i) != b.get(i)).collect();
            if differ.len() <= 1 && differ.iter().all(|&i| last.get(i).overlaps(b.get(i))) {
                *last = last.hull(&b);
                continue;
            }
        }
        out.push(b);
    }
    out
}

/// Certify the solution near `guess`: contract with the Krawczyk operator,
/// inflate if needed, then refine to `cfg.eps`. `None` if no unique
/// solution could be proved around `guess`.
pub fn certify_near(sys: &KhovanskiiSystem, guess: &IntervalBox, cfg: &SolverConfig) -> Option<KhovanskiiCertificate> {
    cfg.validate().ok()?;
    if guess.dim() != sys.n() || !guess.is_finite() {
        return None;
    }
    let worker = Worker {
        sys,
        eps: Dyadic::from_f64(cfg.eps).expect("validated"),
        min_width: Dyadic::from_f64(cfg.min_width.unwrap_or(cfg.eps)).expect("validated"),
        precision: cfg.precision,
        max_precision: cfg.max_precision,
    };
    let mut x = guess.clone();
    for _ in 0..32 {
        match krawczyk(sys, &x, cfg.precision) {
            Step::Interior(_) => return refine_region(sys, &x, &worker.eps, cfg.precision, cfg.max_precision),
            Step::Contracted(k) if k != x => x = k,
            Step::Empty => return None,
            _ => break,
        }
    }
    let region = worker.inflate_and_prove(&x)?;
    refine_region(sys, &region, &worker.eps, cfg.precision, cfg.max_precision)
}

/// Certificate for exactly `x` at `prec`, if both conditions hold there.
pub fn certify_box(sys: &KhovanskiiSystem, x: &IntervalBox, prec: u32) -> Option<KhovanskiiCertificate> {
    if x.dim() != sys.n() || !x.is_finite() {
        return None;
    }
    prove(sys, x, prec)
}

/// Recompute both certificate conditions from scratch.
pub fn verify_certificate(c: &KhovanskiiCertificate) -> bool {
    if c.region.dim() != c.system.n() || !c.region.is_finite() {
        return false;
    }
    prove(&c.system, &c.region, c.precision).is_some()
}

/// First-coordinate enclosure of the `k`-th certificate (1-based) in
/// ascending order of first coordinate.
pub fn select_coordinate(report: &SolveReport, k: usize) -> Result<Interval, CertifyError> {
    let mut firsts: Vec<&Interval> = report.certificates.iter().map(|c| c.first()).collect();
    firsts.sort_by(|a, b| a.lex_cmp(b));
    for i in 1..firsts.len() {
        if firsts[i - 1].overlaps(firsts[i]) {
            return Err(CertifyError::Overlap(i, i + 1));
        }
    }
    if k == 0 || k > firsts.len() {
        return Err(CertifyError::OutOfRange { k, count: firsts.len() });
    }
    Ok(firsts[k - 1].clone())
}

/// Shrink a certificate to width `eps`, escalating precision from `prec`.
pub fn refine(c: &KhovanskiiCertificate, eps: f64, prec: u32, max_precision: u32) -> Result<KhovanskiiCertificate, CertifyError> {
    let e = Dyadic::from_f64(eps).filter(|d| d.is_positive()).ok_or_else(|| CertifyError::Config(format!("eps {eps}")))?;
    if c.region.max_width().is_some_and(|w| w <= e) && c.precision >= prec && verify_certificate(c) {
        return Ok(c.clone());
    }
    let p = prec.max(c.precision);
    refine_region(&c.system, &c.region, &e, p, max_precision.max(p)).ok_or(CertifyError::RefineFailed(max_precision.max(p)))
}

/// Total order used to sort certificates: by box, then precision.
pub fn cert_cmp(a: &KhovanskiiCertificate, b: &KhovanskiiCertificate) -> Ordering {
    a.region.lex_cmp(&b.region).then_with(|| a.precision.cmp(&b.precision))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_system;

    fn solve(src: &str, bx: &str) -> SolveReport {
        let s = parse_system(src).unwrap();
        solve_in_box(&s, &IntervalBox::parse(bx, 64).unwrap(), &SolverConfig::default()).unwrap()
    }

    #[test]
    fn linear_root_on_split_point() {
        let r = solve("x1 - 2", "[0, 4]");
        assert_eq!(r.certificates.len(), 1);
        assert!(r.undecided.is_empty());
        assert!(r.certificates[0].first().contains(&Dyadic::from_i64(2)));
    }

    #[test]
    fn root_on_query_boundary() {
        let r = solve("x1 - 1", "[1, 3]");
        assert_eq!(r.certificates.len(), 1);
        assert!(r.undecided.is_empty());
    }

    #[test]
    fn double_root_residue_stays_local() {
        let r = solve("x1*E(1) - E(x1)", "[0, 3]");
        assert!(r.certificates.is_empty());
        assert!(!r.undecided.is_empty() && r.undecided.len() < 100, "{}", r.undecided.len());
        let near = Interval::parse("[0.999999, 1.000001]", 64).unwrap();
        assert!(r.undecided.iter().all(|b| b.get(0).subset_of(&near)));
    }

    #[test]
    fn no_roots() {
        let r = solve("x1^2 + 1", "[-5, 5]");
        assert!(r.certificates.is_empty());
        assert!(r.undecided.is_empty());
        assert!(r.pruned_count > 0);
    }

    #[test]
    fn two_dimensional_system() {
        let r = solve("x1^2 + x2^2 - 4; x1 - x2", "[-3, 3]; [-3, 3]");
        assert_eq!(r.certificates.len(), 2);
        for c in &r.certificates {
            assert!(verify_certificate(c));
            assert!(c.region.max_width().unwrap().to_f64() <= 1e-12);
        }
        let k1 = select_coordinate(&r, 1).unwrap();
        assert!(k1.hi().to_f64() < 0.0);
        assert_eq!(select_coordinate(&r, 3), Err(CertifyError::OutOfRange { k: 3, count: 2 }));
    }

    #[test]
    fn double_root_is_undecided() {
        let r = solve("x1^2", "[-1, 1.5]");
        assert!(r.certificates.is_empty());
        assert!(!r.undecided.is_empty());
        assert!(r.undecided.iter().any(|b| b.get(0).contains(&Dyadic::zero())));
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let s = parse_system("x1^2").unwrap();
        let cfg = SolverConfig::default().with_max_splits(3);
        let r = solve_in_box(&s, &IntervalBox::parse("[-1, 1.5]", 64).unwrap(), &cfg).unwrap();
        assert!(r.budget_exhausted);
        assert!(!r.undecided.is_empty());
    }

    #[test]
    fn bad_inputs() {
        let s = parse_system("x1 - 1").unwrap();
        let b2 = IntervalBox::parse("[0,1]; [0,1]", 64).unwrap();
        assert_eq!(solve_in_box(&s, &b2, &SolverConfig::default()), Err(CertifyError::Dimension { expected: 1, found: 2 }));
        let inf = IntervalBox::parse("[0, inf]", 64).unwrap();
        assert_eq!(solve_in_box(&s, &inf, &SolverConfig::default()), Err(CertifyError::Unbounded));
    }

    #[test]
    fn refinement_reaches_small_widths() {
        let r = solve("x1*E(x1) - 1", "[0, 1]");
        let c = refine(&r.certificates[0], 1e-30, 128, 256).unwrap();
        assert!(c.region.max_width().unwrap() <= Dyadic::from_f64(1e-30).unwrap());
        assert!(verify_certificate(&c));
    }
}
