//! Matrix chains over families of state sets.
//!
//! A stage reads one symbol from builder wires (constants allowed) and moves a family of
//! state sets to the family of subcube images. Entry `(B, A)` of a stage matrix is the
//! hazard-free multiplexer over the variable wires of `[t(A, y) subset of B]`. Column vectors
//! are prefix products from a seed set; row vectors are suffix products into a readout.

use rustc_hash::FxHashMap;

use crate::circuit::blocks::{matmul, mux_select, WireMatrix};
use crate::circuit::{Builder, NodeId};

pub type StateSet = Vec<u32>;

/// An indexed family of sorted state sets.
#[derive(Clone, Debug, Default)]
pub struct SetFamily {
    sets: Vec<StateSet>,
    index: FxHashMap<StateSet, usize>,
}

impl SetFamily {
    pub fn new() -> SetFamily {
        SetFamily::default()
    }

    pub fn from_sets(sets: impl IntoIterator<Item = StateSet>) -> SetFamily {
        let mut f = SetFamily::new();
        for s in sets {
            f.insert(s);
        }
        f
    }

    pub fn insert(&mut self, set: StateSet) -> usize {
        if let Some(&i) = self.index.get(&set) {
            return i;
        }
        let i = self.sets.len();
        self.index.insert(set.clone(), i);
        self.sets.push(set);
        i
    }

    pub fn position(&self, set: &[u32]) -> Option<usize> {
        self.index.get(set).copied()
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn sets(&self) -> &[StateSet] {
        &self.sets
    }
}

fn is_subset(a: &[u32], b: &[u32]) -> bool {
    let mut j = 0;
    for &x in a {
        while j < b.len() && b[j] < x {
            j += 1;
        }
        if j == b.len() || b[j] != x {
            return false;
        }
    }
    true
}

fn union(a: &[u32], b: &[u32]) -> StateSet {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) if x == y => {
                i += 1;
                j += 1;
                x
            }
            (Some(&x), Some(&y)) if x < y => {
                i += 1;
                x
            }
            (Some(&x), None) => {
                i += 1;
                x
            }
            (_, Some(&y)) => {
                j += 1;
                y
            }
            (None, None) => unreachable!(),
        };
        out.push(next);
    }
    out
}

/// The symbol wires of one stage split into a fixed part and variable wires.
struct StageSymbol {
    fixed: u32,
    var_wires: Vec<NodeId>,
    var_shift: Vec<u32>,
}

impl StageSymbol {
    fn new(b: &Builder, wires: &[NodeId]) -> StageSymbol {
        let width = wires.len();
        let mut fixed = 0u32;
        let mut var_wires = Vec::new();
        let mut var_shift = Vec::new();
        for (i, &w) in wires.iter().enumerate() {
            let shift = (width - 1 - i) as u32;
            match b.const_value(w) {
                Some(v) => fixed |= (v as u32) << shift,
                None => {
                    var_wires.push(w);
                    var_shift.push(shift);
                }
            }
        }
        StageSymbol {
            fixed,
            var_wires,
            var_shift,
        }
    }

    /// The symbol for assignment `a` of the variable wires (first wire most significant).
    fn symbol(&self, a: usize) -> u32 {
        let v = self.var_wires.len();
        self.var_shift
            .iter()
            .enumerate()
            .fold(self.fixed, |acc, (j, &sh)| acc | ((a >> (v - 1 - j)) as u32 & 1) << sh)
    }

    fn assignments(&self) -> usize {
        1 << self.var_wires.len()
    }

    /// All subcubes of the variable assignments, as lists of assignments.
    fn subcubes(&self) -> Vec<Vec<usize>> {
        let mut cubes = vec![vec![0usize]];
        for _ in 0..self.var_wires.len() {
            cubes = cubes
                .into_iter()
                .flat_map(|c| {
                    let zero: Vec<usize> = c.iter().map(|&a| a << 1).collect();
                    let one: Vec<usize> = c.iter().map(|&a| a << 1 | 1).collect();
                    let both: Vec<usize> = zero.iter().chain(&one).copied().collect();
                    [zero, one, both]
                })
                .collect();
        }
        cubes
    }
}

/// Images `t(A, y)` of every set of `from` under every assignment of the variable wires.
fn images<F>(from: &SetFamily, sym: &StageSymbol, step: &F) -> Vec<Vec<StateSet>>
where
    F: Fn(u32, u32) -> u32,
{
    from.sets()
        .iter()
        .map(|a| {
            (0..sym.assignments())
                .map(|v| {
                    let y = sym.symbol(v);
                    let mut img: StateSet = a.iter().map(|&s| step(s, y)).collect();
                    img.sort_unstable();
                    img.dedup();
                    img
                })
                .collect()
        })
        .collect()
}

/// One transition stage. Returns the target family (subcube images plus `seeds`) and the
/// stage matrix with rows indexed by the target family and columns by `from`.
pub fn transition_stage<F>(
    b: &mut Builder,
    from: &SetFamily,
    wires: &[NodeId],
    step: F,
    seeds: &[StateSet],
) -> (SetFamily, WireMatrix)
where
    F: Fn(u32, u32) -> u32,
{
    let sym = StageSymbol::new(b, wires);
    let imgs = images(from, &sym, &step);
    let cubes = sym.subcubes();
    let mut to = SetFamily::new();
    for per_a in &imgs {
        for cube in &cubes {
            let set = cube[1..]
                .iter()
                .fold(per_a[cube[0]].clone(), |acc, &v| union(&acc, &per_a[v]));
            to.insert(set);
        }
    }
    for s in seeds {
        to.insert(s.clone());
    }
    let mut wires_out = Vec::with_capacity(to.len() * from.len());
    for target in to.sets() {
        for per_a in &imgs {
            let data: Vec<NodeId> = per_a
                .iter()
                .map(|img| b.constant(is_subset(img, target)))
                .collect();
            wires_out.push(mux_select(b, &sym.var_wires, &data));
        }
    }
    let m = WireMatrix::new(to.len(), from.len(), wires_out);
    (to, m)
}

/// Row over `from` whose entry `A` is the multiplexer of `[pred(s, y) for all s in A]`.
pub fn readout_row<P>(b: &mut Builder, from: &SetFamily, wires: &[NodeId], pred: P) -> WireMatrix
where
    P: Fn(u32, u32) -> bool,
{
    let sym = StageSymbol::new(b, wires);
    let mut row = Vec::with_capacity(from.len());
    for a in from.sets() {
        let data: Vec<NodeId> = (0..sym.assignments())
            .map(|v| {
                let y = sym.symbol(v);
                b.constant(a.iter().all(|&s| pred(s, y)))
            })
            .collect();
        row.push(mux_select(b, &sym.var_wires, &data));
    }
    WireMatrix::new(1, from.len(), row)
}

/// Constant rows over `family`, one per predicate: entry `A` is `[pred(s) for all s in A]`.
pub fn final_rows(b: &mut Builder, family: &SetFamily, preds: &[&dyn Fn(u32) -> bool]) -> WireMatrix {
    let mut wires = Vec::with_capacity(preds.len() * family.len());
    for p in preds {
        for a in family.sets() {
            wires.push(b.constant(a.iter().all(|&s| p(s))));
        }
    }
    WireMatrix::new(preds.len(), family.len(), wires)
}

/// Scan with `combine(earlier, later)`: pairs adjacent items, recurses on the pairs and
/// fills in the even positions. Uses fewer than `2n` combines and depth `2 log n`.
pub fn prefix_scan<T, C>(items: Vec<T>, combine: &mut C) -> Vec<T>
where
    T: Clone,
    C: FnMut(&T, &T) -> T,
{
    if items.len() <= 1 {
        return items;
    }
    let pairs: Vec<T> = items.chunks(2).filter(|c| c.len() == 2).map(|c| combine(&c[0], &c[1])).collect();
    let rec = prefix_scan(pairs, combine);
    let mut out = Vec::with_capacity(items.len());
    for (i, item) in items.iter().enumerate() {
        if i == 0 {
            out.push(item.clone());
        } else if i % 2 == 1 {
            out.push(rec[i / 2].clone());
        } else {
            out.push(combine(&rec[i / 2 - 1], item));
        }
    }
    out
}

/// Column vectors `v_0..v_N` of a forward chain from the single seed set `start`.
/// The first `scan_len` stages are combined by the parallel prefix scan, the rest
/// are applied one after another.
pub struct ForwardChain {
    pub families: Vec<SetFamily>,
    pub vectors: Vec<WireMatrix>,
}

pub fn forward_chain<F>(b: &mut Builder, start: StateSet, stages: &[Vec<NodeId>], scan_len: usize, step: F) -> ForwardChain
where
    F: Fn(u32, u32) -> u32,
{
    let f0 = SetFamily::from_sets([start]);
    let one = b.one();
    let v0 = WireMatrix::new(1, 1, vec![one]);
    let mut families = vec![f0];
    let mut mats = Vec::with_capacity(stages.len());
    for wires in stages {
        let (to, m) = transition_stage(b, families.last().expect("seed family"), wires, &step, &[]);
        families.push(to);
        mats.push(m);
    }
    let scan_len = scan_len.min(mats.len());
    let mut vectors = vec![v0.clone()];
    if scan_len > 0 {
        let mut items = mats[..scan_len].to_vec();
        items[0] = matmul(b, &items[0], &v0);
        let prefixes = prefix_scan(items, &mut |e: &WireMatrix, l: &WireMatrix| matmul(b, l, e));
        vectors.extend(prefixes);
    }
    for m in &mats[scan_len..] {
        let next = matmul(b, m, vectors.last().expect("vector"));
        vectors.push(next);
    }
    ForwardChain { families, vectors }
}

/// Rows of a backward chain. Families grow forward from per-boundary seeds;
/// `rows[j]` (over `families[j]`) is the product of the final readout rows with all
/// stages after boundary `j`. Stages from `scan_len` on are applied one after another
/// from the right end, the earlier ones through the suffix scan.
pub struct BackwardChain {
    pub families: Vec<SetFamily>,
    pub rows: Vec<WireMatrix>,
}

pub fn backward_chain<F>(
    b: &mut Builder,
    seeds: &[Vec<StateSet>],
    stages: &[Vec<NodeId>],
    scan_len: usize,
    step: F,
    preds: &[&dyn Fn(u32) -> bool],
) -> BackwardChain
where
    F: Fn(u32, u32) -> u32,
{
    let n = stages.len();
    assert_eq!(seeds.len(), n + 1, "one seed list per boundary");
    let mut families = vec![SetFamily::from_sets(seeds[0].iter().cloned())];
    let mut mats = Vec::with_capacity(n);
    for (i, wires) in stages.iter().enumerate() {
        let (to, m) = transition_stage(b, &families[i], wires, &step, &seeds[i + 1]);
        families.push(to);
        mats.push(m);
    }
    let scan_len = scan_len.min(n);
    let mut rows: Vec<Option<WireMatrix>> = vec![None; n + 1];
    let mut row = final_rows(b, &families[n], preds);
    rows[n] = Some(row.clone());
    for i in (scan_len..n).rev() {
        row = matmul(b, &row, &mats[i]);
        rows[i] = Some(row.clone());
    }
    if scan_len > 0 {
        let mut items: Vec<WireMatrix> = mats[..scan_len].iter().rev().cloned().collect();
        items[0] = matmul(b, &row, &items[0]);
        let suffixes = prefix_scan(items, &mut |e: &WireMatrix, l: &WireMatrix| matmul(b, e, l));
        for (k, r) in suffixes.into_iter().enumerate() {
            rows[scan_len - 1 - k] = Some(r);
        }
    }
    BackwardChain {
        families,
        rows: rows.into_iter().map(|r| r.expect("every boundary has a row")).collect(),
    }
}

/// `OR_A row[A] and col[A]`.
pub fn dot(b: &mut Builder, row: &WireMatrix, col: &WireMatrix) -> NodeId {
    matmul(b, row, col).wires[0]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scan_matches_sequential_fold() {
        for n in 1..40 {
            let items: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
            let mut combines = 0;
            let out = prefix_scan(items, &mut |a: &Vec<usize>, b: &Vec<usize>| {
                combines += 1;
                a.iter().chain(b).copied().collect()
            });
            for (i, o) in out.iter().enumerate() {
                assert_eq!(*o, (0..=i).collect::<Vec<_>>());
            }
            assert!(combines < 2 * n);
        }
    }

    #[test]
    fn scan_depth_is_logarithmic() {
        for n in [1usize, 2, 5, 16, 33, 100] {
            let out = prefix_scan(vec![0usize; n], &mut |a: &usize, b: &usize| 1 + (*a).max(*b));
            let log = (n as f64).log2().ceil() as usize;
            assert!(out.iter().all(|&d| d <= 2 * log.max(1)));
        }
    }

    #[test]
    fn set_helpers() {
        assert!(is_subset(&[1, 3], &[0, 1, 2, 3]));
        assert!(!is_subset(&[1, 4], &[0, 1, 2, 3]));
        assert!(is_subset(&[], &[]));
        assert_eq!(union(&[0, 2], &[1, 2, 5]), vec![0, 1, 2, 5]);
    }
}
