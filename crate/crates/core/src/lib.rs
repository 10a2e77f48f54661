//! Exponential polynomials over the integers, square systems of them with
//! certified isolated real solutions, the closure calculus on numbers defined
//! by such systems, and a layered-graph search for compatible choices of
//! solutions under quantifier-free constraints.
//!
//! All numerics are rigorous: intervals have dyadic endpoints rounded
//! outward, and the exponential is enclosed with an explicit remainder bound.
//! A certificate proves, within its box, existence and uniqueness of a
//! solution with nonzero Jacobian determinant. Absence of certificates in a
//! box says nothing about solutions outside it.

pub mod certify;
pub mod dyadic;
pub mod ecl;
pub mod exp_poly;
pub mod interval;
pub mod khovanskii;
pub mod koenig;
pub mod par;
pub mod syntax;
