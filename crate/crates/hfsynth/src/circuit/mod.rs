//! Gate-level circuit IR, ternary evaluation, metrics and hazard checking.

mod batch;
pub mod blocks;
mod builder;
mod matrix;
mod netlist;

use std::fmt;

use crate::error::{Error, Result};
use crate::kleene::{hazard_free_extension, Trit, TritVec};

pub use batch::BatchEvaluator;
pub use builder::Builder;
pub use matrix::{bool_matmul, TernaryMatrix};
pub use netlist::{from_netlist, to_netlist};

pub type NodeId = u32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    Input(u32),
    Const0,
    Const1,
    Not(NodeId),
    And(NodeId, NodeId),
    Or(NodeId, NodeId),
}

impl Gate {
    pub fn is_logic(self) -> bool {
        matches!(self, Gate::Not(_) | Gate::And(..) | Gate::Or(..))
    }

    pub fn operands(self) -> impl Iterator<Item = NodeId> {
        let (a, b) = match self {
            Gate::Not(a) => (Some(a), None),
            Gate::And(a, b) | Gate::Or(a, b) => (Some(a), Some(b)),
            _ => (None, None),
        };
        a.into_iter().chain(b)
    }
}

/// An immutable DAG of gates with designated outputs. Operands always precede their node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Circuit {
    input_count: usize,
    nodes: Vec<Gate>,
    outputs: Vec<NodeId>,
}

impl Circuit {
    pub fn new(input_count: usize, nodes: Vec<Gate>, outputs: Vec<NodeId>) -> Result<Circuit> {
        for (i, g) in nodes.iter().enumerate() {
            if let Gate::Input(k) = *g {
                if k as usize >= input_count {
                    return Err(Error::OutOfRange {
                        value: k as u64,
                        limit: input_count as u64,
                    });
                }
            }
            for a in g.operands() {
                if a as usize >= i {
                    return Err(Error::DanglingReference {
                        node: i,
                        target: a as usize,
                    });
                }
            }
        }
        for &o in &outputs {
            if o as usize >= nodes.len() {
                return Err(Error::DanglingReference {
                    node: nodes.len(),
                    target: o as usize,
                });
            }
        }
        Ok(Circuit {
            input_count,
            nodes,
            outputs,
        })
    }

    pub fn input_count(&self) -> usize {
        self.input_count
    }

    pub fn output_count(&self) -> usize {
        self.outputs.len()
    }

    pub fn nodes(&self) -> &[Gate] {
        &self.nodes
    }

    pub fn outputs(&self) -> &[NodeId] {
        &self.outputs
    }

    /// Number of not/and/or gates.
    pub fn size(&self) -> usize {
        self.nodes.iter().filter(|g| g.is_logic()).count()
    }

    /// Longest gate path to an output; inputs and constants have depth 0.
    pub fn depth(&self) -> usize {
        let levels = self.levels();
        self.outputs
            .iter()
            .map(|&o| levels[o as usize])
            .max()
            .unwrap_or(0)
    }

    fn levels(&self) -> Vec<usize> {
        let mut level = vec![0usize; self.nodes.len()];
        for (i, g) in self.nodes.iter().enumerate() {
            if g.is_logic() {
                level[i] = 1 + g.operands().map(|a| level[a as usize]).max().unwrap_or(0);
            }
        }
        level
    }

    pub fn is_monotone(&self) -> bool {
        !self.nodes.iter().any(|g| matches!(g, Gate::Not(_)))
    }

    fn check_len(&self, len: usize) -> Result<()> {
        if len != self.input_count {
            return Err(Error::LengthMismatch {
                expected: self.input_count,
                got: len,
            });
        }
        Ok(())
    }

    /// Gate-by-gate Kleene evaluation.
    pub fn evaluate(&self, x: &TritVec) -> Result<TritVec> {
        self.check_len(x.len())?;
        let mut val: Vec<Trit> = Vec::with_capacity(self.nodes.len());
        for g in &self.nodes {
            let v = match *g {
                Gate::Input(k) => x[k as usize],
                Gate::Const0 => Trit::Zero,
                Gate::Const1 => Trit::One,
                Gate::Not(a) => val[a as usize].not(),
                Gate::And(a, b) => Trit::and(val[a as usize], val[b as usize]),
                Gate::Or(a, b) => Trit::or(val[a as usize], val[b as usize]),
            };
            val.push(v);
        }
        Ok(TritVec(self.outputs.iter().map(|&o| val[o as usize]).collect()))
    }

    /// Boolean evaluation on a stable input.
    pub fn evaluate_bools(&self, x: &[bool]) -> Result<Vec<bool>> {
        self.check_len(x.len())?;
        let mut val: Vec<bool> = Vec::with_capacity(self.nodes.len());
        for g in &self.nodes {
            let v = match *g {
                Gate::Input(k) => x[k as usize],
                Gate::Const0 => false,
                Gate::Const1 => true,
                Gate::Not(a) => !val[a as usize],
                Gate::And(a, b) => val[a as usize] && val[b as usize],
                Gate::Or(a, b) => val[a as usize] || val[b as usize],
            };
            val.push(v);
        }
        Ok(self.outputs.iter().map(|&o| val[o as usize]).collect())
    }

    /// Evaluates many inputs, 64 at a time.
    pub fn evaluate_many(&self, xs: &[TritVec]) -> Result<Vec<TritVec>> {
        for x in xs {
            self.check_len(x.len())?;
        }
        let mut ev = BatchEvaluator::new(self);
        Ok(xs
            .chunks(64)
            .flat_map(|chunk| ev.run(chunk))
            .collect())
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "circuit(inputs={}, outputs={}, size={}, depth={})",
            self.input_count,
            self.outputs.len(),
            self.size(),
            self.depth()
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum FindingKind {
    /// The circuit yields u where the extension is stable.
    Hazard,
    /// The circuit yields a stable value that differs from the extension.
    Functional,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Finding {
    pub input: TritVec,
    /// One-based output index.
    pub output: usize,
    pub expected: Trit,
    pub got: Trit,
    pub kind: FindingKind,
}

#[derive(Clone, Debug, Default)]
pub struct HazardReport {
    pub checked: usize,
    pub findings: Vec<Finding>,
}

impl HazardReport {
    pub fn is_hazard_free(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn hazards(&self) -> usize {
        self.count(FindingKind::Hazard)
    }

    pub fn functional_errors(&self) -> usize {
        self.count(FindingKind::Functional)
    }

    fn count(&self, kind: FindingKind) -> usize {
        self.findings.iter().filter(|f| f.kind == kind).count()
    }
}

/// Compares `got` against `expected` bit by bit, recording findings for `input`.
pub fn compare_outputs(
    input: &TritVec,
    expected: &TritVec,
    got: &TritVec,
    findings: &mut Vec<Finding>,
) {
    for (i, (&e, &g)) in expected.iter().zip(got.iter()).enumerate() {
        if e == g {
            continue;
        }
        let kind = if g == Trit::U {
            FindingKind::Hazard
        } else {
            FindingKind::Functional
        };
        findings.push(Finding {
            input: input.clone(),
            output: i + 1,
            expected: e,
            got: g,
            kind,
        });
    }
}

/// Checks `c` against the hazard-free extension of `f` on every input of `domain`.
pub fn check_hazard_free<F>(c: &Circuit, f: F, domain: &[TritVec]) -> Result<HazardReport>
where
    F: Fn(&[bool]) -> Vec<bool>,
{
    let got = c.evaluate_many(domain)?;
    let mut report = HazardReport::default();
    for (x, g) in domain.iter().zip(&got) {
        let expected = hazard_free_extension(&f, x);
        if expected.len() != g.len() {
            return Err(Error::WidthMismatch {
                expected: expected.len(),
                got: g.len(),
            });
        }
        compare_outputs(x, &expected, g, &mut report.findings);
        report.checked += 1;
    }
    Ok(report)
}

/// All ternary strings of length `n` in lexicographic order (0 < u < 1).
pub fn all_ternary(n: usize) -> Vec<TritVec> {
    let total = 3usize.pow(n as u32);
    (0..total)
        .map(|mut code| {
            let mut v = vec![Trit::Zero; n];
            for slot in v.iter_mut().rev() {
                *slot = Trit::ALL[code % 3];
                code /= 3;
            }
            TritVec(v)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kleene::tv;

    fn and_not() -> Circuit {
        Circuit::new(
            1,
            vec![Gate::Input(0), Gate::Not(0), Gate::And(0, 1)],
            vec![2],
        )
        .unwrap()
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(and_not().evaluate(&tv("u")).unwrap(), tv("u"));
        let zero = Circuit::new(1, vec![Gate::Input(0), Gate::Const0], vec![1]).unwrap();
        assert_eq!(zero.evaluate(&tv("u")).unwrap(), tv("0"));
        let wire = Circuit::new(1, vec![Gate::Input(0)], vec![0]).unwrap();
        assert_eq!(wire.evaluate(&tv("u")).unwrap(), tv("u"));
        assert!(wire.evaluate(&tv("01")).is_err());
    }

    #[test]
    fn hazard_report_examples() {
        let report = check_hazard_free(&and_not(), |_| vec![false], &[tv("u")]).unwrap();
        assert_eq!(report.hazards(), 1);
        assert_eq!(report.findings[0].output, 1);
        let zero = Circuit::new(1, vec![Gate::Input(0), Gate::Const0], vec![1]).unwrap();
        let report = check_hazard_free(&zero, |_| vec![false], &all_ternary(1)).unwrap();
        assert!(report.is_hazard_free());
        assert_eq!(report.checked, 3);
    }

    #[test]
    fn forward_reference_rejected() {
        let err = Circuit::new(1, vec![Gate::Not(1), Gate::Input(0)], vec![0]).unwrap_err();
        assert!(matches!(err, Error::DanglingReference { node: 0, target: 1 }));
    }

    #[test]
    fn metrics_match_traversal() {
        let c = and_not();
        assert_eq!(c.size(), 2);
        assert_eq!(c.depth(), 2);
        assert!(!c.is_monotone());
    }

    #[test]
    fn batch_matches_scalar() {
        let c = and_not();
        let xs = all_ternary(1);
        let batch = c.evaluate_many(&xs).unwrap();
        for (x, y) in xs.iter().zip(batch) {
            assert_eq!(c.evaluate(x).unwrap(), y);
        }
    }
}
