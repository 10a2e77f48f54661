//! Self-contained text form of a certificate:
//!
//! ```text
//! begin certificate
//! precision: 64
//! vars: x1
//! equation: x1*E(x1) - 1
//! box: [5109416570045785p-53, 5109416570045795p-53]
//! newton-contraction: true
//! jacobian-det: [...]
//! end certificate
//! ```
//!
//! Endpoints are exact binary rationals `mantissa p exponent`, so a record
//! can be verified without any other state.

use std::fmt::Write;

use thiserror::Error;

use super::KhovanskiiCertificate;
use crate::exp_poly::{normalize, Var, VarLayout};
use crate::interval::{Interval, IntervalBox};
use crate::khovanskii::KhovanskiiSystem;
use crate::syntax::{parse_term, ParseError};

/// Enough bits to read any endpoint a certificate can contain exactly.
const EXACT_BITS: u32 = 1 << 16;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum RecordError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("missing field {0:?}")]
    Missing(&'static str),
    #[error("equation: {0}")]
    Equation(#[from] ParseError),
}

impl KhovanskiiCertificate {
    pub fn to_record(&self) -> String {
        let mut s = String::from("begin certificate\n");
        let _ = writeln!(s, "precision: {}", self.precision);
        let names: Vec<String> = self.system.vars().iter().map(Var::to_string).collect();
        let _ = writeln!(s, "vars: {}", names.join(" "));
        for eq in self.system.equations() {
            let _ = writeln!(s, "equation: {}", eq);
        }
        for c in self.region.coords() {
            let _ = writeln!(s, "box: {}", c.to_exact());
        }
        let _ = writeln!(s, "newton-contraction: {}", self.newton_contraction);
        let _ = writeln!(s, "jacobian-det: {}", self.jacobian_det.to_exact());
        s.push_str("end certificate\n");
        s
    }

    /// Parse every record in `text`, in order.
    pub fn parse_records(text: &str) -> Result<Vec<KhovanskiiCertificate>, RecordError> {
        let mut out = Vec::new();
        let mut current: Option<(usize, Vec<(usize, &str)>)> = None;
        for (k, raw) in text.lines().enumerate() {
            let line = k + 1;
            let t = raw.trim();
            match (t, current.as_mut()) {
                ("begin certificate", None) => current = Some((line, Vec::new())),
                ("begin certificate", Some(_)) => return Err(malformed(line, "nested record")),
                ("end certificate", Some(_)) => {
                    let (start, body) = current.take().expect("open record");
                    out.push(parse_body(start, &body)?);
                }
                ("end certificate", None) => return Err(malformed(line, "end without begin")),
                (t, Some((_, body))) if !t.is_empty() => body.push((line, t)),
                _ => {}
            }
        }
        if let Some((start, _)) = current {
            return Err(malformed(start, "unterminated record"));
        }
        Ok(out)
    }

    pub fn from_record(text: &str) -> Result<KhovanskiiCertificate, RecordError> {
        let mut all = KhovanskiiCertificate::parse_records(text)?;
        match all.len() {
            1 => Ok(all.pop().expect("one record")),
            0 => Err(RecordError::Missing("begin certificate")),
            _ => Err(malformed(1, "more than one record")),
        }
    }
}

fn malformed(line: usize, msg: &str) -> RecordError {
    RecordError::Malformed { line, msg: msg.to_string() }
}

fn parse_body(start: usize, body: &[(usize, &str)]) -> Result<KhovanskiiCertificate, RecordError> {
    let mut precision = None;
    let mut layout = None;
    let mut equations = Vec::new();
    let mut coords = Vec::new();
    let mut contraction = None;
    let mut det = None;
    for &(line, t) in body {
        let (key, value) = t.split_once(':').ok_or_else(|| malformed(line, "expected 'key: value'"))?;
        let value = value.trim();
        match key.trim() {
            "precision" => precision = Some(value.parse::<u32>().map_err(|_| malformed(line, "bad precision"))?),
            "vars" => layout = Some(parse_layout(value).ok_or_else(|| malformed(line, "bad variable list"))?),
            "equation" => {
                let t = parse_term(value).map_err(|e| ParseError { line, ..e })?;
                equations.push(normalize(&t).map_err(|e| malformed(line, &e.to_string()))?);
            }
            "box" => coords.push(Interval::parse(value, EXACT_BITS).map_err(|e| malformed(line, &e.to_string()))?),
            "newton-contraction" => {
                contraction = Some(match value {
                    "true" => true,
                    "false" => false,
                    _ => return Err(malformed(line, "expected true or false")),
                })
            }
            "jacobian-det" => det = Some(Interval::parse(value, EXACT_BITS).map_err(|e| malformed(line, &e.to_string()))?),
            other => return Err(malformed(line, &format!("unknown field {other:?}"))),
        }
    }
    let layout = layout.ok_or(RecordError::Missing("vars"))?;
    let system = KhovanskiiSystem::new(layout, equations).map_err(|e| malformed(start, &e.to_string()))?;
    Ok(KhovanskiiCertificate {
        system,
        region: IntervalBox::new(coords),
        precision: precision.ok_or(RecordError::Missing("precision"))?,
        newton_contraction: contraction.ok_or(RecordError::Missing("newton-contraction"))?,
        jacobian_det: det.ok_or(RecordError::Missing("jacobian-det"))?,
    })
}

fn parse_layout(s: &str) -> Option<VarLayout> {
    let names: Vec<&str> = s.split_whitespace().collect();
    if names.is_empty() {
        return None;
    }
    let layout = if names[0] == "y" { VarLayout::with_y(names.len()) } else { VarLayout::plain(names.len()) };
    let expected: Vec<String> = layout.vars().iter().map(Var::to_string).collect();
    (names == expected).then_some(layout)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::certify::{solve_in_box, verify_certificate, SolverConfig};
    use crate::syntax::parse_system;

    #[test]
    fn record_round_trip() {
        let s = parse_system("E(y) - x1; x1 - 3").unwrap();
        let b = IntervalBox::parse("[0, 2]; [2, 4]", 64).unwrap();
        let r = solve_in_box(&s, &b, &SolverConfig::default()).unwrap();
        let c = &r.certificates[0];
        let text = c.to_record();
        let back = KhovanskiiCertificate::from_record(&text).unwrap();
        assert_eq!(&back, c);
        assert!(verify_certificate(&back));
    }

    #[test]
    fn tampered_records_fail() {
        let s = parse_system("x1 - 3").unwrap();
        let r = solve_in_box(&s, &IntervalBox::parse("[0, 4]", 64).unwrap(), &SolverConfig::default()).unwrap();
        let text = r.certificates[0].to_record();
        let moved = text.replace("equation: x1 - 3", "equation: x1 - 5");
        assert!(!verify_certificate(&KhovanskiiCertificate::from_record(&moved).unwrap()));
        assert!(matches!(KhovanskiiCertificate::from_record("begin certificate\nvars: x1\n"), Err(RecordError::Malformed { .. })));
        let missing = text.replace("precision: 64\n", "");
        assert_eq!(KhovanskiiCertificate::from_record(&missing), Err(RecordError::Missing("precision")));
    }
}
