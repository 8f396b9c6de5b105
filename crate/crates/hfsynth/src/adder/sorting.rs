//! Sorting adder: a constant-size carry chain for the front part and a sorting network
//! behind speculative multiplexing for the rear part.

use crate::circuit::blocks::{sort_descending, speculative, xor_tree};
use crate::circuit::{Builder, Circuit, NodeId};
use crate::codes::{gamma_decode_sort, CodeSpec};
use crate::error::Result;
use crate::transducer::chain::forward_chain;

use super::check_adder_code;
use super::fsm::{build_parity_fsm, carry_single_read_step, single_read_stream, CarryState};
use super::join::{front_outputs, LeftChain, RightMachine};

/// Rear bits of `gamma_{k+1,k}` of the decoded sum of two compressed words.
pub fn sorting_rear_function(k: usize, v1: &[bool], v2: &[bool]) -> Vec<bool> {
    let code = CodeSpec::new(k + 1, k).expect("valid code");
    let sum = (gamma_decode_sort(k, v1) + gamma_decode_sort(k, v2)) % code.m;
    code.encode(sum).expect("sum in range")[1..].to_vec()
}

/// Sorter inputs of one compressed word for fixed leading and center bits: their count
/// of ones equals the four-branch decode.
fn sorter_inputs(b: &mut Builder, k: usize, v: &[NodeId], lead: bool, center: bool) -> Vec<NodeId> {
    let h = k / 2;
    let lo = &v[1..1 + h];
    let hi = &v[2 + h..];
    let (ones, data, negate) = match (lead, center) {
        (false, false) => (0, lo, false),
        (false, true) => (1 + h, hi, false),
        (true, true) => (k + 1, lo, true),
        (true, false) => (k + 2 + h, hi, true),
    };
    let mut out: Vec<NodeId> = (0..ones).map(|_| b.one()).collect();
    for &w in data {
        out.push(if negate { b.not(w) } else { w });
    }
    let zero = b.zero();
    out.resize(2 * k + 1, zero);
    out
}

/// Rear part inside a builder from compressed words `v = (parity, rear)` of `k + 1` wires.
pub fn sorting_rear(b: &mut Builder, k: usize, v1: &[NodeId], v2: &[NodeId]) -> Vec<NodeId> {
    let h = k / 2;
    let controls = [v1[0], v1[1 + h], v2[0], v2[1 + h]];
    let mut branches = Vec::with_capacity(16);
    for s in 0..16u32 {
        let bit = |i: u32| s >> (3 - i) & 1 == 1;
        let mut ins = sorter_inputs(b, k, v1, bit(0), bit(1));
        ins.extend(sorter_inputs(b, k, v2, bit(2), bit(3)));
        let sorted = sort_descending(b, &ins);
        let rear: Vec<NodeId> = (2..=k + 1)
            .map(|i| {
                let taps: Vec<NodeId> = (0..4)
                    .map(|j| j * (k + 1) + i - 1)
                    .filter(|&t| t <= sorted.len())
                    .map(|t| sorted[t - 1])
                    .collect();
                taps.iter().skip(1).fold(taps[0], |acc, &t| b.xor(acc, t))
            })
            .collect();
        branches.push(rear);
    }
    speculative(b, &controls, &branches)
}

/// The rear part as a circuit over `v1` then `v2`.
pub fn build_sorting_rear(k: usize) -> Circuit {
    let mut b = Builder::new(2 * (k + 1));
    let v1: Vec<NodeId> = (0..=k).map(|i| b.input(i)).collect();
    let v2: Vec<NodeId> = (0..=k).map(|i| b.input(k + 1 + i)).collect();
    let out = sorting_rear(&mut b, k, &v1, &v2);
    b.finish(&out)
}

/// Adder for the hybrid code with operands interleaved `x1 y1 x2 y2 ...`.
pub fn build_adder_sorting(n: usize, k: usize) -> Result<Circuit> {
    check_adder_code(n, k)?;
    let m = n - k;
    let mut b = Builder::new(2 * n);
    let x1: Vec<NodeId> = (0..n).map(|i| b.input(2 * i)).collect();
    let x2: Vec<NodeId> = (0..n).map(|i| b.input(2 * i + 1)).collect();

    let par = build_parity_fsm();
    let stages: Vec<Vec<NodeId>> = (0..m - 1).map(|j| vec![x1[j], x2[j]]).collect();
    let step = |s: u32, y: u32| par.step(s as usize, y) as u32;
    let left = forward_chain(&mut b, vec![par.start() as u32], &stages, m - 1, step);
    let parities = |s: u32| {
        let name = par.name(s as usize).as_bytes();
        (name[0] == b'1', name[1] == b'1')
    };
    let chain = LeftChain {
        families: &left.families,
        vectors: &left.vectors,
        parities: &parities,
    };

    let right = RightMachine::new(
        6,
        CarryState::with_parities,
        carry_single_read_step,
        |s: &CarryState| s.carry(),
        |s: &CarryState| format!("{s:?}"),
    );
    let (zero, one) = (b.zero(), b.one());
    let stream = single_read_stream(m, k, &x1, &x2, zero, one);
    let front_stage = |_: &mut Builder, j: usize| stream[j].clone();
    let tail = stream[m..].to_vec();
    let mut outs = front_outputs(&mut b, &x1[..m], &x2[..m], &chain, &right, &front_stage, tail);

    let mut v1 = vec![xor_tree(&mut b, &x1[..m])];
    v1.extend_from_slice(&x1[m..]);
    let mut v2 = vec![xor_tree(&mut b, &x2[..m])];
    v2.extend_from_slice(&x2[m..]);
    outs.extend(sorting_rear(&mut b, k, &v1, &v2));
    Ok(b.finish(&outs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adder::{adder_input, contract_pairs, interleave, sorting_reference_add};
    use crate::transducer::symbol_to_bits;

    #[test]
    fn rear_matches_function() {
        for k in 1..=5 {
            let c = build_sorting_rear(k);
            for v in 0..1u32 << (2 * k + 2) {
                let bits = symbol_to_bits(v, 2 * k + 2);
                let (a, bb) = bits.split_at(k + 1);
                assert_eq!(c.evaluate_bools(&bits).unwrap(), sorting_rear_function(k, a, bb));
            }
        }
    }

    #[test]
    fn stable_sweep_matches_reference() {
        for (n, k) in [(2, 1), (3, 1), (4, 2), (5, 3)] {
            let spec = CodeSpec::new(n, k).unwrap();
            let c = build_adder_sorting(n, k).unwrap();
            for xi in 0..1u32 << n {
                for yi in 0..1u32 << n {
                    let (x, y) = (symbol_to_bits(xi, n), symbol_to_bits(yi, n));
                    let want = sorting_reference_add(&spec, &x, &y);
                    assert_eq!(c.evaluate_bools(&interleave(&x, &y)).unwrap(), want, "{xi} {yi}");
                }
            }
        }
    }

    #[test]
    fn contract_sweep_four_two() {
        let spec = CodeSpec::new(4, 2).unwrap();
        let c = build_adder_sorting(4, 2).unwrap();
        for (x, y, want) in contract_pairs(&spec, 1) {
            assert_eq!(c.evaluate(&adder_input(&x, &y)).unwrap(), want, "{x} + {y}");
        }
    }
}
