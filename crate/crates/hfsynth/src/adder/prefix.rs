//! Prefix adder: chains of the unary sum machine combined by parallel prefix scans.

use crate::circuit::{Builder, Circuit, NodeId};
use crate::error::Result;
use crate::transducer::chain::{dot, final_rows, forward_chain};

use super::check_adder_code;
use super::fsm::{build_unary_sum_fsm, unary_sum_order, UnarySumState, TAG_FRONT};
use super::join::{front_outputs, LeftChain, RightMachine};

/// Hazard-free adder for the hybrid code with operands interleaved `x1 y1 x2 y2 ...`.
pub fn build_adder_prefix(n: usize, k: usize) -> Result<Circuit> {
    check_adder_code(n, k)?;
    let m = n - k;
    let mut b = Builder::new(2 * n);
    let x1: Vec<NodeId> = (0..n).map(|i| b.input(2 * i)).collect();
    let x2: Vec<NodeId> = (0..n).map(|i| b.input(2 * i + 1)).collect();
    let tag = |b: &mut Builder, t: u32| [b.constant(t >> 1 == 1), b.constant(t & 1 == 1)];
    let front_stage = |b: &mut Builder, j: usize| {
        let [t1, t2] = tag(b, TAG_FRONT);
        vec![x1[j], x2[j], t1, t2]
    };
    let mut tail = Vec::with_capacity(k);
    for (r, t) in unary_sum_order(k) {
        let [t1, t2] = tag(&mut b, t);
        tail.push(vec![x1[m + r - 1], x2[m + r - 1], t1, t2]);
    }

    let sum = build_unary_sum_fsm(k);
    let mut stages: Vec<Vec<NodeId>> = (0..m).map(|j| front_stage(&mut b, j)).collect();
    stages.extend(tail.iter().cloned());
    let step = |s: u32, y: u32| sum.fsm.step(s as usize, y) as u32;
    let left = forward_chain(&mut b, vec![sum.fsm.start() as u32], &stages, m, step);

    let right = RightMachine::new(
        4,
        UnarySumState::with_parities,
        |s: &UnarySumState, y| s.step(k, y),
        |s: &UnarySumState| s.carry(k),
        |s: &UnarySumState| format!("{s:?}"),
    );
    let parities = |s: u32| {
        let st = sum.state(s as usize);
        (st.p, st.q)
    };
    let chain = LeftChain {
        families: &left.families,
        vectors: &left.vectors,
        parities: &parities,
    };
    let mut outs = front_outputs(&mut b, &x1[..m], &x2[..m], &chain, &right, &front_stage, tail);

    let last = m + k;
    for i in 1..=k {
        let pred = |s: u32| sum.state(s as usize).rear_bit(k, i);
        let row = final_rows(&mut b, &left.families[last], &[&pred]);
        outs.push(dot(&mut b, &row, &left.vectors[last]));
    }
    Ok(b.finish(&outs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adder::{adder_input, contract_pairs, reference_add};
    use crate::codes::CodeSpec;
    use crate::transducer::symbol_to_bits;

    #[test]
    fn stable_sweep_matches_reference() {
        for (n, k) in [(2, 1), (3, 1), (4, 2), (5, 3)] {
            let spec = CodeSpec::new(n, k).unwrap();
            let c = build_adder_prefix(n, k).unwrap();
            for xi in 0..1u32 << n {
                for yi in 0..1u32 << n {
                    let (x, y) = (symbol_to_bits(xi, n), symbol_to_bits(yi, n));
                    let input = crate::adder::interleave(&x, &y);
                    assert_eq!(c.evaluate_bools(&input).unwrap(), reference_add(&spec, &x, &y), "{xi} {yi}");
                }
            }
        }
    }

    #[test]
    fn contract_sweep_four_two() {
        let spec = CodeSpec::new(4, 2).unwrap();
        let c = build_adder_prefix(4, 2).unwrap();
        for (x, y, want) in contract_pairs(&spec, 1) {
            assert_eq!(c.evaluate(&adder_input(&x, &y)).unwrap(), want, "{x} + {y}");
        }
        let x = crate::kleene::tv("00u0");
        let y = crate::kleene::tv("0011");
        assert_eq!(c.evaluate(&adder_input(&x, &y)).unwrap(), crate::kleene::tv("0u11"));
    }

    #[test]
    fn rejects_invalid_parameters() {
        assert!(build_adder_prefix(3, 3).is_err());
        assert!(build_adder_prefix(3, 0).is_err());
    }
}
