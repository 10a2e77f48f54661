//! Instance files.
//!
//! ```text
//! # comments start with '#'
//! system: x1 - E(1)
//! box: [0, 4]
//! system:
//! vars: 2
//! x1 - x2^2
//! x2*E(x2) - 1
//! box: [0, 1]; [0, 1]
//! constraints:
//! c1 > 2
//! c2 < 1 & c2*E(c2) = 1
//! ```
//!
//! Each `system:` block is read in system syntax, with an optional `box:`
//! line. After `constraints:`, each non-empty line is one formula over
//! `c1, c2, ...`.

use thiserror::Error;

use crate::certify::SolverConfig;
use crate::interval::IntervalBox;
use crate::khovanskii::KhovanskiiSystem;
use crate::syntax::{parse_constraint_at, parse_system_at, ConstraintFormula, ParseError};

use super::{EmbeddingInstance, KoenigError};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error(transparent)]
    Instance(#[from] KoenigError),
}

#[derive(Clone, Debug, PartialEq)]
pub struct InstanceFile {
    pub systems: Vec<KhovanskiiSystem>,
    /// `None` where the block had no `box:` line.
    pub boxes: Vec<Option<IntervalBox>>,
    pub constraints: Vec<ConstraintFormula>,
}

impl InstanceFile {
    /// Fill missing boxes with `default` (padded or cut to each system's
    /// dimension by repeating its last coordinate).
    pub fn into_instance(self, default: Option<&IntervalBox>, cfg: SolverConfig) -> Result<EmbeddingInstance, InstanceError> {
        let mut boxes = Vec::with_capacity(self.systems.len());
        for (k, (s, b)) in self.systems.iter().zip(self.boxes).enumerate() {
            let b = match (b, default) {
                (Some(b), _) => b,
                (None, Some(d)) if d.dim() > 0 => {
                    let mut c: Vec<_> = d.coords().iter().take(s.n()).cloned().collect();
                    let last = c.last().cloned().expect("non-empty");
                    c.resize(s.n(), last);
                    IntervalBox::new(c)
                }
                _ => return Err(InstanceError::Malformed { line: 0, msg: format!("system {} has no box", k + 1) }),
            };
            if b.dim() != s.n() {
                return Err(InstanceError::Malformed { line: 0, msg: format!("box for system {} has dimension {}, expected {}", k + 1, b.dim(), s.n()) });
            }
            boxes.push(b);
        }
        Ok(EmbeddingInstance::new(self.systems, boxes, self.constraints, cfg)?)
    }
}

struct Block {
    first_line: usize,
    text: String,
    bx: Option<IntervalBox>,
}

pub fn parse_instance(src: &str, prec: u32) -> Result<InstanceFile, InstanceError> {
    let mut blocks: Vec<Block> = Vec::new();
    let mut constraints = Vec::new();
    let mut in_constraints = false;
    for (k, raw) in src.lines().enumerate() {
        let line = k + 1;
        let text = raw.split('#').next().unwrap_or("");
        let trimmed = text.trim();
        if trimmed.is_empty() {
            if let Some(b) = blocks.last_mut() {
                b.text.push('\n');
            }
            continue;
        }
        if in_constraints {
            constraints.push(parse_constraint_at(text, line)?);
            continue;
        }
        if trimmed == "constraints:" {
            in_constraints = true;
            continue;
        }
        if let Some(rest) = text.trim_start().strip_prefix("system:") {
            // Blank out the keyword so columns still match the file.
            let indent = text.len() - rest.len();
            blocks.push(Block { first_line: line, text: format!("{}{}\n", " ".repeat(indent), rest), bx: None });
            continue;
        }
        let Some(b) = blocks.last_mut() else {
            return Err(InstanceError::Malformed { line, msg: "expected 'system:' or 'constraints:'".into() });
        };
        if let Some(rest) = trimmed.strip_prefix("box:") {
            if b.bx.is_some() {
                return Err(InstanceError::Malformed { line, msg: "second 'box:' for one system".into() });
            }
            let bx = IntervalBox::parse(rest, prec).map_err(|e| InstanceError::Malformed { line, msg: e.to_string() })?;
            b.bx = Some(bx);
            b.text.push('\n');
            continue;
        }
        b.text.push_str(text);
        b.text.push('\n');
    }
    let mut systems = Vec::with_capacity(blocks.len());
    let mut boxes = Vec::with_capacity(blocks.len());
    for b in blocks {
        systems.push(parse_system_at(&b.text, b.first_line)?);
        boxes.push(b.bx);
    }
    if systems.is_empty() {
        return Err(InstanceError::Malformed { line: 1, msg: "no systems".into() });
    }
    Ok(InstanceFile { systems, boxes, constraints })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_system;

    const DEMO: &str = "\
# e and the omega constant
system: x1 - E(1)
box: [0, 4]
system:
  x1*E(x1) - 1
box: [0, 1]
constraints:
c1 > 2
c2 < 1 & c2*E(c2) = 1
";

    #[test]
    fn demo_instance() {
        let f = parse_instance(DEMO, 64).unwrap();
        assert_eq!(f.systems, vec![parse_system("x1 - E(1)").unwrap(), parse_system("x1*E(x1) - 1").unwrap()]);
        assert!(f.boxes.iter().all(Option::is_some));
        assert_eq!(f.constraints.len(), 2);
        let inst = f.into_instance(None, SolverConfig::default()).unwrap();
        assert_eq!(inst.boxes.len(), 2);
    }

    #[test]
    fn positioned_errors() {
        let e = parse_instance("system: x1 - \nconstraints:\n", 64).unwrap_err();
        assert!(matches!(e, InstanceError::Parse(ParseError { line: 1, .. })), "{e:?}");
        let e = parse_instance("system: x1\nconstraints:\nc1 >\n", 64).unwrap_err();
        assert!(matches!(e, InstanceError::Parse(ParseError { line: 3, .. })), "{e:?}");
        let e = parse_instance("box: [0,1]\n", 64).unwrap_err();
        assert!(matches!(e, InstanceError::Malformed { line: 1, .. }));
        let e = parse_instance("system: x1\nbox: [0,\n", 64).unwrap_err();
        assert!(matches!(e, InstanceError::Malformed { line: 2, .. }));
    }

    #[test]
    fn default_box_fills_gaps() {
        let f = parse_instance("system: x1 - 1\n", 64).unwrap();
        assert!(f.clone().into_instance(None, SolverConfig::default()).is_err());
        let d = IntervalBox::parse("[0, 2]", 64).unwrap();
        assert!(f.into_instance(Some(&d), SolverConfig::default()).is_ok());
    }
}
