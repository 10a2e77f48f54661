//! Numbers defined as the first coordinate of a certified solution of a
//! square system over the integers, closed under field operations, `E` and
//! `log` by explicit system constructions.

mod catalog;
mod enumerate;

use thiserror::Error;

use crate::certify::{certify_box, certify_near, solve_in_box, verify_certificate, CertifyError, KhovanskiiCertificate, SolverConfig};
use crate::dyadic::Dyadic;
use crate::interval::{Interval, IntervalBox};
use crate::khovanskii::{augment_log, combine, CombineError, CombineOp, KhovanskiiSystem};

pub use catalog::{catalog, catalog_lines, catalog_systems, MERGE_WIDTH, CatalogEntry, CatalogReport};
pub use enumerate::{enumerate_systems, equation_basis, EnumBound, SystemEnumerator};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum EclError {
    #[error("certificate does not verify")]
    NotVerified,
    #[error("cannot invert: enclosure {0} contains zero")]
    InverseOfZero(String),
    #[error("cannot take log: enclosure {0} is not strictly positive")]
    NonPositiveLog(String),
    #[error("{0} certified solutions in the box; expected exactly one")]
    NotUnique(usize),
    #[error("re-certification failed up to precision {0}")]
    CertificationFailed(u32),
    #[error(transparent)]
    Combine(#[from] CombineError),
    #[error(transparent)]
    Certify(#[from] CertifyError),
}

/// A number with its witnessing certificate. The number is coordinate 1 of
/// the certified solution.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EclNumber {
    pub certificate: KhovanskiiCertificate,
    pub enclosure: Interval,
}

impl EclNumber {
    /// Wrap a certificate after re-verifying it.
    pub fn from_certificate(certificate: KhovanskiiCertificate) -> Result<EclNumber, EclError> {
        if !verify_certificate(&certificate) {
            return Err(EclError::NotVerified);
        }
        let enclosure = certificate.first().clone();
        Ok(EclNumber { certificate, enclosure })
    }

    /// The unique certified solution of `sys` in `bx`.
    pub fn isolate(sys: &KhovanskiiSystem, bx: &IntervalBox, cfg: &SolverConfig) -> Result<EclNumber, EclError> {
        let r = solve_in_box(sys, bx, cfg)?;
        if r.certificates.len() != 1 || !r.undecided.is_empty() {
            return Err(EclError::NotUnique(r.certificates.len()));
        }
        EclNumber::from_certificate(r.certificates.into_iter().next().expect("one certificate"))
    }

    pub fn system(&self) -> &KhovanskiiSystem {
        &self.certificate.system
    }

    /// Midpoint as a float, for display.
    pub fn approx(&self) -> f64 {
        self.enclosure.mid().map_or(f64::NAN, |m| m.to_f64())
    }
}

fn margin(image: &Interval, cfg: &SolverConfig) -> Interval {
    let w = image.width().unwrap_or_else(Dyadic::zero);
    let e = Dyadic::from_f64(cfg.eps).unwrap_or_else(Dyadic::one);
    image.inflate(&std::cmp::max(w, e), cfg.precision)
}

/// Certify `sys` near `first × rest`, then try to clip the first coordinate
/// to `image` (which is known to contain the number).
fn certify_with_image(
    sys: &KhovanskiiSystem,
    first: Interval,
    rest: &[&IntervalBox],
    image: Option<&Interval>,
    cfg: &SolverConfig,
) -> Result<EclNumber, EclError> {
    let mut coords = vec![first];
    for b in rest {
        coords.extend(b.coords().iter().cloned());
    }
    let guess = IntervalBox::new(coords);
    let cert = certify_near(sys, &guess, cfg).ok_or(EclError::CertificationFailed(cfg.max_precision))?;
    let Some(image) = image else { return EclNumber::from_certificate(cert) };
    if cert.first().subset_of(image) {
        return EclNumber::from_certificate(cert);
    }
    if let Some(clipped) = cert.first().intersect(image) {
        let mut region = cert.region.clone();
        region.0[0] = clipped;
        if let Some(c) = certify_box(sys, &region, cert.precision) {
            return EclNumber::from_certificate(c);
        }
    }
    // Sound but looser: the certificate stands, the enclosure uses both.
    let mut n = EclNumber::from_certificate(cert)?;
    if let Some(e) = n.enclosure.intersect(image) {
        n.enclosure = e;
    }
    Ok(n)
}

fn binary(a: &EclNumber, b: &EclNumber, op: CombineOp, cfg: &SolverConfig) -> Result<EclNumber, EclError> {
    let c = combine(a.system(), Some(b.system()), op)?;
    let p = cfg.precision;
    let image = match op {
        CombineOp::Sum => a.enclosure.add(&b.enclosure, p),
        _ => a.enclosure.mul(&b.enclosure, p),
    };
    certify_with_image(&c.system, margin(&image, cfg), &[&a.certificate.region, &b.certificate.region], Some(&image), cfg)
}

pub fn ecl_add(a: &EclNumber, b: &EclNumber, cfg: &SolverConfig) -> Result<EclNumber, EclError> {
    binary(a, b, CombineOp::Sum, cfg)
}

pub fn ecl_mul(a: &EclNumber, b: &EclNumber, cfg: &SolverConfig) -> Result<EclNumber, EclError> {
    binary(a, b, CombineOp::Product, cfg)
}

pub fn ecl_neg(a: &EclNumber, cfg: &SolverConfig) -> Result<EclNumber, EclError> {
    let c = combine(a.system(), None, CombineOp::Neg)?;
    let image = a.enclosure.neg();
    certify_with_image(&c.system, margin(&image, cfg), &[&a.certificate.region], Some(&image), cfg)
}

pub fn ecl_inv(a: &EclNumber, cfg: &SolverConfig) -> Result<EclNumber, EclError> {
    let image = a.enclosure.recip(cfg.precision).ok_or_else(|| EclError::InverseOfZero(a.enclosure.to_string()))?;
    let c = combine(a.system(), None, CombineOp::Inverse)?;
    certify_with_image(&c.system, margin(&image, cfg), &[&a.certificate.region], Some(&image), cfg)
}

pub fn ecl_exp(a: &EclNumber, cfg: &SolverConfig) -> Result<EclNumber, EclError> {
    let c = combine(a.system(), None, CombineOp::Exp)?;
    let image = a.enclosure.exp(cfg.precision);
    certify_with_image(&c.system, margin(&image, cfg), &[&a.certificate.region], Some(&image), cfg)
}

/// `log a`, witnessed by the log augmentation of `a`'s system.
pub fn ecl_log(a: &EclNumber, cfg: &SolverConfig) -> Result<EclNumber, EclError> {
    if !a.enclosure.is_positive() {
        return Err(EclError::NonPositiveLog(a.enclosure.to_string()));
    }
    let sys = augment_log(a.system());
    let lo = a.enclosure.lo().to_f64().ln();
    let hi = a.enclosure.hi().to_f64().ln();
    let mut last = EclError::CertificationFailed(cfg.max_precision);
    for widen in [1e-9, 1e-6, 1e-3] {
        let pad = widen * lo.abs().max(hi.abs()).max(1.0);
        let guess = Interval::from_f64s(lo - pad, hi + pad);
        match certify_with_image(&sys, guess, &[&a.certificate.region], None, cfg) {
            Ok(n) => return Ok(n),
            Err(e) => last = e,
        }
    }
    Err(last)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_system;

    fn number(src: &str, bx: &str) -> EclNumber {
        EclNumber::isolate(&parse_system(src).unwrap(), &IntervalBox::parse(bx, 64).unwrap(), &SolverConfig::default()).unwrap()
    }

    #[test]
    fn inverse_and_product() {
        let cfg = SolverConfig::default();
        let e = number("x1 - E(1)", "[0, 4]");
        let inv = ecl_inv(&e, &cfg).unwrap();
        assert!((inv.approx() - (-1f64).exp()).abs() < 1e-12);
        let one = ecl_mul(&e, &inv, &cfg).unwrap();
        assert!(one.enclosure.contains(&Dyadic::one()));
        assert!(one.enclosure.width().unwrap().to_f64() <= 2e-12);
    }

    #[test]
    fn log_of_e_is_one() {
        let cfg = SolverConfig::default();
        let e = number("x1 - E(1)", "[0, 4]");
        let l = ecl_log(&e, &cfg).unwrap();
        assert!(l.enclosure.contains(&Dyadic::one()));
        assert!(l.system().layout().has_y());
    }

    #[test]
    fn preconditions() {
        let cfg = SolverConfig::default();
        let z = number("x1", "[-1, 2]");
        assert!(matches!(ecl_inv(&z, &cfg), Err(EclError::InverseOfZero(_))));
        assert!(matches!(ecl_log(&z, &cfg), Err(EclError::NonPositiveLog(_))));
        let m = number("x1 + 2", "[-3, 0]");
        let p = ecl_neg(&m, &cfg).unwrap();
        assert!(p.enclosure.contains(&Dyadic::from_i64(2)));
    }
}
