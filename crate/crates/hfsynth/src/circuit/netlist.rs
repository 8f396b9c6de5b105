use serde::{Deserialize, Serialize};

use super::{Circuit, Gate, NodeId};
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetlistFile {
    inputs: usize,
    nodes: Vec<NodeRecord>,
    outputs: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeRecord {
    op: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    args: Vec<usize>,
    #[serde(rename = "in", default, skip_serializing_if = "Option::is_none")]
    input: Option<usize>,
}

/// Serializes a circuit to the JSON netlist format.
pub fn to_netlist(c: &Circuit) -> Vec<u8> {
    let nodes = c
        .nodes()
        .iter()
        .map(|g| {
            let (op, args, input) = match *g {
                Gate::Input(k) => ("in", vec![], Some(k as usize)),
                Gate::Const0 => ("c0", vec![], None),
                Gate::Const1 => ("c1", vec![], None),
                Gate::Not(a) => ("not", vec![a as usize], None),
                Gate::And(a, b) => ("and", vec![a as usize, b as usize], None),
                Gate::Or(a, b) => ("or", vec![a as usize, b as usize], None),
            };
            NodeRecord {
                op: op.to_string(),
                args,
                input,
            }
        })
        .collect();
    let file = NetlistFile {
        inputs: c.input_count(),
        nodes,
        outputs: c.outputs().iter().map(|&o| o as usize).collect(),
    };
    serde_json::to_vec(&file).expect("netlist serialization")
}

/// Parses a JSON netlist, rejecting forward and dangling references.
pub fn from_netlist(bytes: &[u8]) -> Result<Circuit> {
    let file: NetlistFile = serde_json::from_slice(bytes)?;
    let mut nodes = Vec::with_capacity(file.nodes.len());
    for (i, rec) in file.nodes.iter().enumerate() {
        let arity = match rec.op.as_str() {
            "in" | "c0" | "c1" => 0,
            "not" => 1,
            "and" | "or" => 2,
            other => {
                return Err(Error::Parse {
                    pos: i,
                    msg: format!("unknown op {other:?}"),
                })
            }
        };
        if rec.args.len() != arity {
            return Err(Error::Parse {
                pos: i,
                msg: format!("op {} expects {arity} args, found {}", rec.op, rec.args.len()),
            });
        }
        if let Some(&target) = rec.args.iter().find(|&&a| a >= i) {
            return Err(Error::DanglingReference { node: i, target });
        }
        let a = |j: usize| rec.args[j] as NodeId;
        let gate = match rec.op.as_str() {
            "in" => {
                let k = rec.input.ok_or_else(|| Error::Parse {
                    pos: i,
                    msg: "input node without \"in\" index".into(),
                })?;
                Gate::Input(k as u32)
            }
            "c0" => Gate::Const0,
            "c1" => Gate::Const1,
            "not" => Gate::Not(a(0)),
            "and" => Gate::And(a(0), a(1)),
            _ => Gate::Or(a(0), a(1)),
        };
        nodes.push(gate);
    }
    let outputs = file.outputs.iter().map(|&o| o as NodeId).collect();
    Circuit::new(file.inputs, nodes, outputs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kleene::tv;

    #[test]
    fn round_trip_is_exact() {
        let c = Circuit::new(
            2,
            vec![Gate::Input(0), Gate::Input(1), Gate::Const1, Gate::Not(0), Gate::And(3, 1), Gate::Or(4, 2)],
            vec![4, 5, 0],
        )
        .unwrap();
        let bytes = to_netlist(&c);
        let back = from_netlist(&bytes).unwrap();
        assert_eq!(back, c);
        assert_eq!(to_netlist(&back), bytes);
    }

    #[test]
    fn empty_outputs_are_valid() {
        let c = from_netlist(br#"{"inputs":1,"nodes":[{"op":"in","in":0}],"outputs":[]}"#).unwrap();
        assert_eq!(c.evaluate(&tv("u")).unwrap(), tv(""));
    }

    #[test]
    fn forward_reference_rejected() {
        let err = from_netlist(br#"{"inputs":1,"nodes":[{"op":"not","args":[1]},{"op":"in","in":0}],"outputs":[0]}"#)
            .unwrap_err();
        assert!(matches!(err, Error::DanglingReference { node: 0, target: 1 }));
        let err = from_netlist(br#"{"inputs":1,"nodes":[{"op":"not","args":[0]}],"outputs":[0]}"#).unwrap_err();
        assert!(matches!(err, Error::DanglingReference { .. }));
        let err = from_netlist(br#"{"inputs":1,"nodes":[{"op":"in","in":0}],"outputs":[3]}"#).unwrap_err();
        assert!(matches!(err, Error::DanglingReference { .. }));
    }

    #[test]
    fn malformed_json_reports_position() {
        let err = from_netlist(b"{\"inputs\": 1,\n \"nodes\": [").unwrap_err();
        assert!(err.to_string().contains("line 2"), "{err}");
    }
}
