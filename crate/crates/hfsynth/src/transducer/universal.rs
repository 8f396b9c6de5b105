//! Universal matrix encodings of finite functions and their ternary star-folds.

use crate::circuit::TernaryMatrix;
use crate::kleene::{Trit, TritVec};

use super::machine::{symbol_resolutions, MooreMachine};

/// Matrix of `f: S -> T` with rows indexed by subsets `B` of `T` and columns by subsets
/// `A` of `S` (bitmasks); entry `(B, A)` is 1 iff `f(A)` is a subset of `B`.
pub fn encode_universal(f: &[usize], t_size: usize) -> TernaryMatrix {
    let s_size = f.len();
    assert!(s_size <= 16 && t_size <= 16, "universal matrix too large");
    let image = |a: usize| {
        (0..s_size)
            .filter(|&s| a >> s & 1 == 1)
            .fold(0usize, |acc, s| acc | 1 << f[s])
    };
    let images: Vec<usize> = (0..1usize << s_size).map(image).collect();
    TernaryMatrix::from_bools(1 << t_size, 1 << s_size, |b, a| images[a] & !b == 0)
}

/// Star-fold of `encode_universal(t(., y))` over all resolutions `y` of the symbol `x`.
pub fn symbol_matrix(m: &MooreMachine, x: &TritVec) -> TernaryMatrix {
    let states = m.num_states();
    let mut acc: Option<TernaryMatrix> = None;
    for y in symbol_resolutions(x) {
        let f: Vec<usize> = (0..states).map(|s| m.step(s, y)).collect();
        let enc = encode_universal(&f, states);
        acc = Some(match acc {
            None => enc,
            Some(prev) => prev.star(&enc).expect("equal dimensions"),
        });
    }
    acc.expect("a symbol has at least one resolution")
}

/// Kleene matrix product: entry `(r, c)` is the or over `m` of `a[r][m] and b[m][c]`.
pub fn kleene_matmul(a: &TernaryMatrix, b: &TernaryMatrix) -> TernaryMatrix {
    assert_eq!(a.cols(), b.rows(), "matrix product dimensions");
    let mut out = TernaryMatrix::filled(a.rows(), b.cols(), Trit::Zero);
    for r in 0..a.rows() {
        for c in 0..b.cols() {
            let v = (0..a.cols()).fold(Trit::Zero, |acc, m| acc.or(a.get(r, m).and(b.get(m, c))));
            out.set(r, c, v);
        }
    }
    out
}
