use super::{Circuit, Gate};
use crate::kleene::{Trit, TritVec};

/// Bit-sliced ternary evaluator: each node holds two 64-lane planes,
/// `can0` (some resolution gives 0) and `can1` (some resolution gives 1).
pub struct BatchEvaluator<'c> {
    circuit: &'c Circuit,
    can0: Vec<u64>,
    can1: Vec<u64>,
}

impl<'c> BatchEvaluator<'c> {
    pub fn new(circuit: &'c Circuit) -> BatchEvaluator<'c> {
        let n = circuit.nodes().len();
        BatchEvaluator {
            circuit,
            can0: vec![0; n],
            can1: vec![0; n],
        }
    }

    /// Evaluates up to 64 inputs of the circuit's input length.
    pub fn run(&mut self, xs: &[TritVec]) -> Vec<TritVec> {
        assert!(xs.len() <= 64);
        let inputs = self.circuit.input_count();
        let mut in0 = vec![0u64; inputs];
        let mut in1 = vec![0u64; inputs];
        for (lane, x) in xs.iter().enumerate() {
            for (i, &t) in x.iter().enumerate() {
                if t != Trit::One {
                    in0[i] |= 1 << lane;
                }
                if t != Trit::Zero {
                    in1[i] |= 1 << lane;
                }
            }
        }
        self.run_planes(&in0, &in1);
        let outs = self.circuit.outputs();
        (0..xs.len())
            .map(|lane| {
                TritVec(
                    outs.iter()
                        .map(|&o| {
                            let z = (self.can0[o as usize] >> lane) & 1 == 1;
                            let w = (self.can1[o as usize] >> lane) & 1 == 1;
                            match (z, w) {
                                (true, true) => Trit::U,
                                (false, true) => Trit::One,
                                _ => Trit::Zero,
                            }
                        })
                        .collect(),
                )
            })
            .collect()
    }

    /// Evaluates on raw planes, one word per input; returns output planes.
    pub fn run_planes(&mut self, in0: &[u64], in1: &[u64]) -> (Vec<u64>, Vec<u64>) {
        for (i, g) in self.circuit.nodes().iter().enumerate() {
            let (z, w) = match *g {
                Gate::Input(k) => (in0[k as usize], in1[k as usize]),
                Gate::Const0 => (!0, 0),
                Gate::Const1 => (0, !0),
                Gate::Not(a) => (self.can1[a as usize], self.can0[a as usize]),
                Gate::And(a, b) => (
                    self.can0[a as usize] | self.can0[b as usize],
                    self.can1[a as usize] & self.can1[b as usize],
                ),
                Gate::Or(a, b) => (
                    self.can0[a as usize] & self.can0[b as usize],
                    self.can1[a as usize] | self.can1[b as usize],
                ),
            };
            self.can0[i] = z;
            self.can1[i] = w;
        }
        let outs = self.circuit.outputs();
        (
            outs.iter().map(|&o| self.can0[o as usize]).collect(),
            outs.iter().map(|&o| self.can1[o as usize]).collect(),
        )
    }
}
