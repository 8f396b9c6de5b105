//! Front outputs of the adders as a join of a left prefix chain and a right suffix chain.
//!
//! With prefix parities `bx_j`, `by_j` and the carry `c_j` into front position `j`, the binary
//! digits of the front sum are `S_j = bx_j ^ by_j ^ c_j` and output `j` is `S_{j-1} ^ S_j`.
//! The left chain classifies position `j` from its prefix: when the digits at `j` differ the
//! output is `x_j ^ y_j`; otherwise it is `s ^ c_j` with the carry computed by the right
//! machine seeded with the common digit at both parities. Position 1 uses all four seeds.

use std::hash::Hash;

use crate::circuit::blocks::{matmul, WireMatrix};
use crate::circuit::{Builder, NodeId};
use crate::transducer::chain::{backward_chain, transition_stage, SetFamily, StateSet};
use crate::transducer::Fsm;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub(crate) enum RightState<T> {
    Kill,
    Gen,
    Front(bool, bool),
    Tail(T),
}

/// The right machine: tracks running parities over the front until the digits agree
/// (kill or generate), otherwise hands the parities to the tail machine.
pub(crate) struct RightMachine {
    pub fsm: Fsm,
    carry: Vec<Option<bool>>,
    front: [u32; 4],
}

impl RightMachine {
    pub fn new<T, S, F, C, N>(width: usize, tail_start: S, tail_step: F, carry: C, name: N) -> RightMachine
    where
        T: Clone + Eq + Hash,
        S: Fn(bool, bool) -> T,
        F: Fn(&T, u32) -> T,
        C: Fn(&T) -> bool,
        N: Fn(&T) -> String,
    {
        let rest_mask = (1u32 << (width - 2)) - 1;
        let roots = vec![
            RightState::Front(false, false),
            RightState::Front(false, true),
            RightState::Front(true, false),
            RightState::Front(true, true),
        ];
        let step = |s: &RightState<T>, y: u32| {
            let (a, b) = (y >> (width - 1) & 1 == 1, y >> (width - 2) & 1 == 1);
            match s {
                RightState::Kill | RightState::Gen => s.clone(),
                RightState::Front(bx, by) if y & rest_mask == 0 => {
                    let (bx, by) = (bx ^ a, by ^ b);
                    match (bx == by, bx) {
                        (true, true) => RightState::Gen,
                        (true, false) => RightState::Kill,
                        _ => RightState::Front(bx, by),
                    }
                }
                RightState::Front(bx, by) => RightState::Tail(tail_step(&tail_start(*bx, *by), y)),
                RightState::Tail(t) => RightState::Tail(tail_step(t, y)),
            }
        };
        let label = |s: &RightState<T>| match s {
            RightState::Kill => "K".to_string(),
            RightState::Gen => "G".to_string(),
            RightState::Front(bx, by) => format!("F{}{}", *bx as u8, *by as u8),
            RightState::Tail(t) => format!("T:{}", name(t)),
        };
        let (fsm, states) = Fsm::explore_many(roots, width, step, label);
        let carry = states
            .iter()
            .map(|s| match s {
                RightState::Kill => Some(false),
                RightState::Gen => Some(true),
                RightState::Front(..) => None,
                RightState::Tail(t) => Some(carry(t)),
            })
            .collect();
        RightMachine {
            fsm,
            carry,
            front: [0, 1, 2, 3],
        }
    }

    fn front_set(&self, bx: bool, by: bool) -> StateSet {
        vec![self.front[(bx as usize) << 1 | by as usize]]
    }
}

/// Class of a front position: constant output, carry-dependent output with a common digit,
/// or the first position.
fn classify(first: bool, p: bool, q: bool, a: bool, b: bool) -> u32 {
    let (bx, by) = (p ^ a, q ^ b);
    if first {
        6 + 2 * bx as u32 + by as u32
    } else if bx != by {
        (a ^ b) as u32
    } else {
        2 + 2 * bx as u32 + (a ^ b ^ bx) as u32
    }
}

/// Left side of the join: prefix families and column vectors of a chain whose states
/// expose the running parities of both operands.
pub(crate) struct LeftChain<'a> {
    pub families: &'a [SetFamily],
    pub vectors: &'a [WireMatrix],
    pub parities: &'a dyn Fn(u32) -> (bool, bool),
}

/// Front outputs of the sum. `front_stage(j)` are the right machine's symbol wires for
/// zero-based front position `j`; `tail` are its stages over the rear part.
pub(crate) fn front_outputs(
    b: &mut Builder,
    x1: &[NodeId],
    x2: &[NodeId],
    left: &LeftChain,
    right: &RightMachine,
    front_stage: &dyn Fn(&mut Builder, usize) -> Vec<NodeId>,
    tail: Vec<Vec<NodeId>>,
) -> Vec<NodeId> {
    let m = x1.len();
    let mut stages: Vec<Vec<NodeId>> = (1..m).map(|j| front_stage(b, j)).collect();
    stages.extend(tail);
    let mut seeds: Vec<Vec<StateSet>> = vec![Vec::new(); stages.len() + 1];
    seeds[0] = [(false, false), (false, true), (true, false), (true, true)]
        .iter()
        .map(|&(p, q)| right.front_set(p, q))
        .collect();
    for s in seeds.iter_mut().take(m).skip(1) {
        *s = vec![right.front_set(false, false), right.front_set(true, true)];
    }
    let carry = |want: bool| move |s: u32| right.carry[s as usize] == Some(want);
    let carry_one = carry(true);
    let carry_zero = carry(false);
    let step = |s: u32, y: u32| right.fsm.step(s as usize, y) as u32;
    let rows = backward_chain(b, &seeds, &stages, m - 1, step, &[&carry_one, &carry_zero]);

    let mut outs = Vec::with_capacity(m);
    for j in 0..m {
        let first = j == 0;
        let parities = left.parities;
        let classify_step = |s: u32, y: u32| {
            let (p, q) = parities(s);
            classify(first, p, q, y >> 1 & 1 == 1, y & 1 == 1)
        };
        let (classes, er) = transition_stage(b, &left.families[j], &[x1[j], x2[j]], classify_step, &[]);
        let ve = matmul(b, &er, &left.vectors[j]);
        let fam = &rows.families[j];
        let row = &rows.rows[j];
        let g = |b: &mut Builder, e: u32| -> NodeId {
            let (want_carry, set) = match e {
                0 | 1 => return b.constant(e == 1),
                2..=5 => {
                    let (beta, s) = ((e - 2) >> 1 == 1, (e - 2) & 1 == 1);
                    (!s, right.front_set(beta, beta))
                }
                _ => {
                    let (a, bb) = ((e - 6) >> 1 == 1, (e - 6) & 1 == 1);
                    (!(a ^ bb), right.front_set(a, bb))
                }
            };
            let col = fam.position(&set).expect("seed set in family");
            row.get(if want_carry { 0 } else { 1 }, col)
        };
        let mut terms = Vec::with_capacity(classes.len());
        for (idx, set) in classes.sets().iter().enumerate() {
            let gs: Vec<NodeId> = set.iter().map(|&e| g(b, e)).collect();
            let all = b.and_all(&gs);
            terms.push(b.and(ve.get(idx, 0), all));
        }
        outs.push(b.or_all(&terms));
    }
    outs
}
