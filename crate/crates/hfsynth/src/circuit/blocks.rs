//! Hazard-free building blocks: multiplexers, monotone matrix products,
//! sorting networks, xor trees and speculative multiplexing.

use std::collections::BTreeMap;

use super::{Builder, Circuit, NodeId};
use crate::error::{Error, Result};

/// Multiplexer tree over `selects` (first select is most significant) choosing
/// among `data.len() == 2^selects.len()` single wires.
pub fn mux_select(b: &mut Builder, selects: &[NodeId], data: &[NodeId]) -> NodeId {
    assert_eq!(data.len(), 1 << selects.len(), "mux data count");
    match selects.split_first() {
        None => data[0],
        Some((&s, rest)) => {
            let half = data.len() / 2;
            let lo = mux_select(b, rest, &data[..half]);
            let hi = mux_select(b, rest, &data[half..]);
            b.mux(lo, hi, s)
        }
    }
}

/// Multiplexer tree selecting among equal-width words.
pub fn mux_words(b: &mut Builder, selects: &[NodeId], words: &[Vec<NodeId>]) -> Vec<NodeId> {
    let width = words.first().map_or(0, |w| w.len());
    (0..width)
        .map(|i| {
            let column: Vec<NodeId> = words.iter().map(|w| w[i]).collect();
            mux_select(b, selects, &column)
        })
        .collect()
}

/// Circuit with `n_select` select inputs followed by `2^n_select` data words of
/// `data_width` bits each; outputs the selected word.
pub fn build_mux_tree(n_select: usize, data_width: usize) -> Circuit {
    let words = 1usize << n_select;
    let mut b = Builder::new(n_select + words * data_width);
    let selects: Vec<NodeId> = (0..n_select).map(|i| b.input(i)).collect();
    let data: Vec<Vec<NodeId>> = (0..words)
        .map(|w| {
            (0..data_width)
                .map(|i| b.input(n_select + w * data_width + i))
                .collect()
        })
        .collect();
    let out = mux_words(&mut b, &selects, &data);
    b.finish(&out)
}

/// Row-major matrix of circuit wires.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WireMatrix {
    pub rows: usize,
    pub cols: usize,
    pub wires: Vec<NodeId>,
}

impl WireMatrix {
    pub fn new(rows: usize, cols: usize, wires: Vec<NodeId>) -> WireMatrix {
        assert_eq!(wires.len(), rows * cols);
        WireMatrix { rows, cols, wires }
    }

    pub fn get(&self, r: usize, c: usize) -> NodeId {
        self.wires[r * self.cols + c]
    }
}

/// Negation-free product: entry (r, c) is the balanced or over m of `a[r][m] and f[m][c]`.
pub fn matmul(b: &mut Builder, a: &WireMatrix, f: &WireMatrix) -> WireMatrix {
    assert_eq!(a.cols, f.rows, "matrix product dimensions");
    let mut wires = Vec::with_capacity(a.rows * f.cols);
    let mut terms = Vec::with_capacity(a.cols);
    for r in 0..a.rows {
        for c in 0..f.cols {
            terms.clear();
            for m in 0..a.cols {
                let t = b.and(a.get(r, m), f.get(m, c));
                terms.push(t);
            }
            wires.push(b.or_all(&terms));
        }
    }
    WireMatrix::new(a.rows, f.cols, wires)
}

/// Circuit with inputs G (alpha x beta) then F (beta x gamma), both row-major,
/// and outputs the product (alpha x gamma) row-major.
pub fn build_monotone_matmul(alpha: usize, beta: usize, gamma: usize) -> Circuit {
    let mut b = Builder::new(alpha * beta + beta * gamma);
    let g = WireMatrix::new(alpha, beta, (0..alpha * beta).map(|i| b.input(i)).collect());
    let f = WireMatrix::new(
        beta,
        gamma,
        (0..beta * gamma).map(|i| b.input(alpha * beta + i)).collect(),
    );
    let p = matmul(&mut b, &g, &f);
    b.finish(&p.wires)
}

/// Batcher odd-even mergesort, descending (largest first), built from or/and comparators.
pub fn sort_descending(b: &mut Builder, wires: &[NodeId]) -> Vec<NodeId> {
    let width = wires.len();
    if width <= 1 {
        return wires.to_vec();
    }
    let n = width.next_power_of_two();
    let mut v = wires.to_vec();
    let zero = b.zero();
    v.resize(n, zero);
    let mut p = 1;
    while p < n {
        let mut k = p;
        while k >= 1 {
            let mut j = k % p;
            while j + k < n {
                for i in 0..k.min(n - j - k) {
                    if (i + j) / (2 * p) == (i + j + k) / (2 * p) {
                        let (x, y) = (v[i + j], v[i + j + k]);
                        v[i + j] = b.or(x, y);
                        v[i + j + k] = b.and(x, y);
                    }
                }
                j += 2 * k;
            }
            k /= 2;
        }
        p *= 2;
    }
    v.truncate(width);
    v
}

pub fn build_sorting_network(width: usize) -> Circuit {
    let mut b = Builder::new(width);
    let ins = b.inputs();
    let out = sort_descending(&mut b, &ins);
    b.finish(&out)
}

/// Balanced xor tree; the empty parity is 0.
pub fn xor_tree(b: &mut Builder, wires: &[NodeId]) -> NodeId {
    match wires.len() {
        0 => b.zero(),
        1 => wires[0],
        len => {
            let (l, r) = wires.split_at(len.div_ceil(2));
            let l = xor_tree(b, l);
            let r = xor_tree(b, r);
            b.xor(l, r)
        }
    }
}

pub fn build_xor_tree(n: usize) -> Circuit {
    let mut b = Builder::new(n);
    let ins = b.inputs();
    let out = xor_tree(&mut b, &ins);
    b.finish(&[out])
}

/// Speculative multiplexing inside a builder: `branches[s]` is the output of the
/// branch for control assignment `s` (first control most significant).
pub fn speculative(b: &mut Builder, controls: &[NodeId], branches: &[Vec<NodeId>]) -> Vec<NodeId> {
    mux_words(b, controls, branches)
}

/// Builds a circuit over `n_inputs` inputs from one subcircuit per stable assignment of the
/// inputs at `control_indices` (zero-based). Each subcircuit receives the remaining inputs in order.
pub fn build_speculative(
    n_inputs: usize,
    control_indices: &[usize],
    subcircuits: &BTreeMap<Vec<bool>, Circuit>,
) -> Result<Circuit> {
    if let Some(&bad) = control_indices.iter().find(|&&i| i >= n_inputs) {
        return Err(Error::OutOfRange {
            value: bad as u64,
            limit: n_inputs as u64,
        });
    }
    let mut b = Builder::new(n_inputs);
    let controls: Vec<NodeId> = control_indices.iter().map(|&i| b.input(i)).collect();
    let rest: Vec<NodeId> = (0..n_inputs)
        .filter(|i| !control_indices.contains(i))
        .map(|i| b.input(i))
        .collect();
    let mut width = None;
    let mut branches = Vec::with_capacity(1 << controls.len());
    for s in 0..1usize << controls.len() {
        let key: Vec<bool> = (0..controls.len())
            .map(|j| (s >> (controls.len() - 1 - j)) & 1 == 1)
            .collect();
        let sub = subcircuits
            .get(&key)
            .ok_or_else(|| Error::MissingAssignment(crate::kleene::bits_to_string(&key)))?;
        if sub.input_count() != rest.len() {
            return Err(Error::WidthMismatch {
                expected: rest.len(),
                got: sub.input_count(),
            });
        }
        let w = *width.get_or_insert(sub.output_count());
        if sub.output_count() != w {
            return Err(Error::WidthMismatch {
                expected: w,
                got: sub.output_count(),
            });
        }
        branches.push(b.embed(sub, &rest));
    }
    let out = speculative(&mut b, &controls, &branches);
    Ok(b.finish(&out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{all_ternary, check_hazard_free, Gate};
    use crate::kleene::{tv, TritVec};

    #[test]
    fn mux_examples() {
        let c = build_mux_tree(1, 1);
        assert_eq!(c.evaluate(&tv("u11")).unwrap(), tv("1"));
        for a in ["0", "1", "u"] {
            assert_eq!(c.evaluate(&tv(&format!("0{a}u"))).unwrap(), tv(a));
        }
        let c = build_mux_tree(2, 1);
        assert_eq!(c.evaluate(&tv("0u1100")).unwrap(), tv("1"));
    }

    #[test]
    fn mux_tree_is_hazard_free() {
        for n_select in 1..=2 {
            let c = build_mux_tree(n_select, 1);
            let f = move |y: &[bool]| {
                let s = y[..n_select].iter().fold(0, |acc, &b| acc * 2 + b as usize);
                vec![y[n_select + s]]
            };
            let domain = all_ternary(n_select + (1 << n_select));
            assert!(check_hazard_free(&c, f, &domain).unwrap().is_hazard_free());
        }
    }

    #[test]
    fn matmul_size_and_depth_bounds() {
        for (a, bb, g) in [(1, 1, 1), (2, 3, 2), (3, 4, 2), (4, 4, 4)] {
            let c = build_monotone_matmul(a, bb, g);
            assert!(c.size() < 2 * a * bb * g);
            let log = (bb as f64).log2().ceil() as usize;
            assert!(c.depth() <= 1 + log);
            assert!(c.is_monotone());
        }
        let c = build_monotone_matmul(1, 1, 1);
        assert_eq!(c.evaluate(&tv("u1")).unwrap(), tv("u"));
    }

    #[test]
    fn sorting_examples() {
        let c = build_sorting_network(3);
        assert_eq!(c.evaluate(&tv("1u0")).unwrap(), tv("1u0"));
        assert_eq!(c.evaluate(&tv("0u1")).unwrap(), tv("1u0"));
        for w in 1..=9 {
            let c = build_sorting_network(w);
            assert!(c.is_monotone());
            for code in 0..1u32 << w {
                let x: Vec<bool> = (0..w).map(|i| code >> i & 1 == 1).collect();
                let out = c.evaluate_bools(&x).unwrap();
                let ones = x.iter().filter(|&&b| b).count();
                let want: Vec<bool> = (0..w).map(|i| i < ones).collect();
                assert_eq!(out, want);
            }
        }
    }

    #[test]
    fn xor_examples() {
        assert_eq!(build_xor_tree(4).evaluate(&tv("1011")).unwrap(), tv("1"));
        assert_eq!(build_xor_tree(4).evaluate(&tv("10u1")).unwrap(), tv("u"));
        assert_eq!(build_xor_tree(1).evaluate(&tv("0")).unwrap(), tv("0"));
    }

    fn constant(v: bool) -> Circuit {
        Circuit::new(1, vec![Gate::Input(0), if v { Gate::Const1 } else { Gate::Const0 }], vec![1]).unwrap()
    }

    #[test]
    fn speculative_examples() {
        let mut subs = BTreeMap::new();
        subs.insert(vec![false], constant(false));
        subs.insert(vec![true], constant(true));
        let c = build_speculative(2, &[0], &subs).unwrap();
        assert_eq!(c.evaluate(&tv("u0")).unwrap(), tv("u"));
        let id = Circuit::new(1, vec![Gate::Input(0)], vec![0]).unwrap();
        let mut subs = BTreeMap::new();
        subs.insert(vec![false], id.clone());
        subs.insert(vec![true], id);
        let c = build_speculative(2, &[0], &subs).unwrap();
        for z in ["0", "1"] {
            assert_eq!(c.evaluate(&TritVec::from(tv(&format!("u{z}")))).unwrap(), tv(z));
        }
        subs.remove(&vec![true]);
        assert!(matches!(build_speculative(2, &[0], &subs), Err(Error::MissingAssignment(_))));
    }
}
