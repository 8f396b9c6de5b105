//! State machines used by the adders: parities, unary sums, reflected Gray addition and
//! the constant-size carry machine, together with their input orderings.

use crate::codes::CodeSpec;
use crate::transducer::{symbol_from_bits, Fsm, MooreMachine};

/// Symbol tags in bits 3 and 4 of four- and six-bit symbols.
pub const TAG_FRONT: u32 = 0b00;
pub const TAG_CENTER: u32 = 0b01;
pub const TAG_FORWARD: u32 = 0b10;
pub const TAG_REVERSE: u32 = 0b11;

fn b(v: bool) -> char {
    if v {
        '1'
    } else {
        '0'
    }
}

/// Four states `par(x) par(y)` over two-bit symbols.
pub fn build_parity_fsm() -> Fsm {
    Fsm::explore(
        (false, false),
        2,
        |&(p, q), y| (p ^ (y >> 1 & 1 == 1), q ^ (y & 1 == 1)),
        |&(p, q)| format!("{}{}", b(p), b(q)),
    )
    .0
}

/// Counter of the ones in both operands of two unary words read position by position,
/// saturating at `2k`.
pub fn unary_counter_fsm(k: usize) -> Fsm {
    let top = 2 * k as u32;
    Fsm::explore(
        0u32,
        2,
        move |&s, y| (s + (y >> 1 & 1) + (y & 1)).min(top),
        |s| s.to_string(),
    )
    .0
}

/// State of the unary sum machine: parities, center bits, per-operand activity and the sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct UnarySumState {
    pub p: bool,
    pub q: bool,
    pub b1: bool,
    pub b2: bool,
    pub act1: bool,
    pub act2: bool,
    pub sum: u32,
}

impl UnarySumState {
    pub const START: UnarySumState = UnarySumState {
        p: false,
        q: false,
        b1: false,
        b2: false,
        act1: false,
        act2: false,
        sum: 0,
    };

    pub fn with_parities(p: bool, q: bool) -> UnarySumState {
        UnarySumState { p, q, ..UnarySumState::START }
    }

    /// Transition on a four-bit symbol `(a, b, tag)`.
    pub fn step(&self, k: usize, y: u32) -> UnarySumState {
        let (a, bb, tag) = (y >> 3 & 1 == 1, y >> 2 & 1 == 1, y & 3);
        let (w1, w2) = (a ^ self.p, bb ^ self.q);
        let mut s = *self;
        let top = 2 * k as u32;
        match tag {
            TAG_FRONT => {
                s.p ^= a;
                s.q ^= bb;
            }
            TAG_CENTER => {
                s.b1 = w1;
                s.b2 = w2;
                s.act1 = true;
                s.act2 = true;
                s.sum = (w1 as u32 + w2 as u32) * k as u32;
            }
            TAG_FORWARD => {
                for (b, act, w) in [(s.b1, &mut s.act1, w1), (s.b2, &mut s.act2, w2)] {
                    if !b && *act {
                        if w {
                            s.sum = (s.sum + 1).min(top);
                        } else {
                            *act = false;
                        }
                    }
                }
            }
            _ => {
                for (b, act, w) in [(s.b1, &mut s.act1, w1), (s.b2, &mut s.act2, w2)] {
                    if b && *act {
                        if w {
                            *act = false;
                        } else {
                            s.sum = s.sum.saturating_sub(1);
                        }
                    }
                }
            }
        }
        s
    }

    /// Carry into the front part: the rear sum exceeds `k`.
    pub fn carry(&self, k: usize) -> bool {
        self.sum > k as u32
    }

    /// Rear bit `i` (one-based) of the sum codeword.
    pub fn rear_bit(&self, k: usize, i: usize) -> bool {
        let c = self.carry(k);
        let offset = self.sum - if c { k as u32 + 1 } else { 0 };
        let odd = self.p ^ self.q ^ c;
        (i as u32 <= offset) ^ odd
    }
}

/// The unary sum machine: front symbols track the parities, the center symbol fixes the
/// decoding branch of each operand, forward symbols count leading ones and reverse symbols
/// locate the last one. Symbols are `(x1_i, x2_i, tag)` as produced by [`unary_sum_order`].
pub struct UnarySumFsm {
    pub k: usize,
    pub fsm: Fsm,
    pub states: Vec<UnarySumState>,
}

pub fn build_unary_sum_fsm(k: usize) -> UnarySumFsm {
    let (fsm, states) = Fsm::explore(
        UnarySumState::START,
        4,
        |s, y| s.step(k, y),
        |s| {
            format!(
                "p{}{}b{}{}a{}{}s{}",
                b(s.p),
                b(s.q),
                b(s.b1),
                b(s.b2),
                b(s.act1),
                b(s.act2),
                s.sum
            )
        },
    );
    UnarySumFsm { k, fsm, states }
}

impl UnarySumFsm {
    pub fn state(&self, id: usize) -> &UnarySumState {
        &self.states[id]
    }
}

/// One-based rear indices in unary-sum reading order: center, the indices before it in
/// order, then the indices after it from the end.
pub fn unary_sum_order(k: usize) -> Vec<(usize, u32)> {
    let c = 1 + k / 2;
    let mut out = vec![(c, TAG_CENTER)];
    out.extend((1..c).map(|r| (r, TAG_FORWARD)));
    out.extend((c + 1..=k).rev().map(|r| (r, TAG_REVERSE)));
    out
}

/// Symbol stream of the unary sum machine for stable operands.
pub fn unary_sum_stream(spec: &CodeSpec, x: &[bool], y: &[bool]) -> Vec<u32> {
    let m = spec.front_len();
    let sym = |a: bool, bb: bool, tag: u32| (a as u32) << 3 | (bb as u32) << 2 | tag;
    let mut out: Vec<u32> = (0..m).map(|i| sym(x[i], y[i], TAG_FRONT)).collect();
    out.extend(unary_sum_order(spec.k).into_iter().map(|(r, tag)| sym(x[m + r - 1], y[m + r - 1], tag)));
    out
}

/// Reflected Gray adder transducer. States are `(par x, par y, carry)` with the parities of
/// the not yet processed prefix; positions are read from the back. The outputs are the last
/// `n` bits of the `n + 1` bit Gray code of the sum, so the first output also reflects an
/// overflow out of the front.
pub fn build_gray_adder_transducer() -> MooreMachine {
    let states: Vec<(bool, bool, bool)> = (0..8).map(|i| (i & 4 != 0, i & 2 != 0, i & 1 != 0)).collect();
    let id = |(p, q, c): (bool, bool, bool)| (p as usize) << 2 | (q as usize) << 1 | c as usize;
    let mut t = Vec::new();
    let mut o = Vec::new();
    for &(p, q, c) in &states {
        let mut row_t = Vec::new();
        let mut row_o = Vec::new();
        for y in 0..4u32 {
            let (a, bb) = (y >> 1 & 1 == 1, y & 1 == 1);
            let carry_out = (p as u8 + q as u8 + c as u8) >= 2;
            let (p2, q2) = (p ^ a, q ^ bb);
            let out = (p ^ q ^ c) ^ (p2 ^ q2 ^ carry_out);
            row_t.push(id((p2, q2, carry_out)));
            row_o.push(out as u32);
        }
        t.push(row_t);
        o.push(row_o);
    }
    MooreMachine::new(
        states.iter().map(|&(p, q, c)| format!("{}{}{}", b(p), b(q), b(c))).collect(),
        0,
        2,
        1,
        (0..4).collect(),
        t,
        o,
        None,
    )
    .expect("gray adder transducer is valid")
}

/// State index of the Gray adder transducer for `(par x, par y, carry)`.
pub fn gray_adder_state(p: bool, q: bool, c: bool) -> usize {
    (p as usize) << 2 | (q as usize) << 1 | c as usize
}

/// Reordered carry stream: the front symbols, the center pair with a marker, then for
/// `m = 1..k` the pairs at rear index `m` and `k + 1 - m`. Symbols carry four data
/// entries and a two-entry tag, as six entries.
pub fn carry_input_reorder<T: Copy>(spec: &CodeSpec, x: &[T], y: &[T], zero: T, one: T) -> Vec<Vec<T>> {
    let (m, k) = (spec.front_len(), spec.k);
    let c = 1 + k / 2;
    let mut out: Vec<Vec<T>> = (0..m).map(|i| vec![x[i], y[i], zero, zero, zero, zero]).collect();
    out.push(vec![x[m + c - 1], y[m + c - 1], zero, zero, zero, one]);
    for r in 1..=k {
        let s = k + 1 - r;
        out.push(vec![x[m + r - 1], y[m + r - 1], x[m + s - 1], y[m + s - 1], one, zero]);
    }
    out
}

/// Single-read carry stream: like [`carry_input_reorder`] but step `m` only carries
/// `x1` at rear index `m` and `x2` at rear index `k + 1 - m`. At the step where either
/// index is the center, that entry is a constant 0 and a flag selects the stored center bit.
/// Symbols are `(a, b, tag, flag1, flag2)` as six entries.
pub fn carry_single_read_order<T: Copy>(spec: &CodeSpec, x: &[T], y: &[T], zero: T, one: T) -> Vec<Vec<T>> {
    single_read_stream(spec.front_len(), spec.k, x, y, zero, one)
}

pub(crate) fn single_read_stream<T: Copy>(m: usize, k: usize, x: &[T], y: &[T], zero: T, one: T) -> Vec<Vec<T>> {
    let c = 1 + k / 2;
    let flag = |v: bool| if v { one } else { zero };
    let mut out: Vec<Vec<T>> = (0..m).map(|i| vec![x[i], y[i], zero, zero, zero, zero]).collect();
    out.push(vec![x[m + c - 1], y[m + c - 1], zero, one, zero, zero]);
    for r in 1..=k {
        let s = k + 1 - r;
        let a = if r == c { zero } else { x[m + r - 1] };
        let bb = if s == c { zero } else { y[m + s - 1] };
        out.push(vec![a, bb, one, zero, flag(r == c), flag(s == c)]);
    }
    out
}

/// State of the carry machine.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CarryState {
    pub p: bool,
    pub q: bool,
    pub rear: bool,
    pub b1: bool,
    pub b2: bool,
    /// Leading ones of the first operand so far (mixed case with `b1 = 0`), or the running
    /// comparison flag (mixed case with `b1 = 1`).
    pub x: bool,
    /// A one seen in the reversed second operand.
    pub g: bool,
    pub c: bool,
}

impl CarryState {
    pub const START: CarryState = CarryState {
        p: false,
        q: false,
        rear: false,
        b1: false,
        b2: false,
        x: false,
        g: false,
        c: false,
    };

    pub fn with_parities(p: bool, q: bool) -> CarryState {
        CarryState { p, q, ..CarryState::START }
    }

    fn front(&self, a: bool, bb: bool) -> CarryState {
        CarryState {
            p: self.p ^ a,
            q: self.q ^ bb,
            ..*self
        }
    }

    fn center(&self, a: bool, bb: bool) -> CarryState {
        let (b1, b2) = (a ^ self.p, bb ^ self.q);
        let mixed_lt = !b1 && b2;
        CarryState {
            rear: true,
            b1,
            b2,
            x: mixed_lt,
            g: false,
            c: b1 && b2,
            ..*self
        }
    }

    /// Rear step with `z1 = x1_m xor p` and `z2 = x2_{k+1-m} xor q`.
    fn rear_step(&self, z1: bool, z2: bool) -> CarryState {
        let mut s = *self;
        match (s.b1, s.b2) {
            (false, true) => {
                s.x &= z1;
                s.g |= z2;
                s.c |= s.x && s.g;
            }
            (true, false) => s.x = (s.x || z1) && z2,
            _ => {}
        }
        s
    }

    pub fn carry(&self) -> bool {
        match (self.b1, self.b2) {
            (true, false) => self.x,
            _ => self.c,
        }
    }
}

fn bit(y: u32, i: u32) -> bool {
    y >> (5 - i) & 1 == 1
}

fn tag_of(y: u32, hi: u32) -> u32 {
    (bit(y, hi) as u32) << 1 | bit(y, hi + 1) as u32
}

/// Carry machine over the [`carry_input_reorder`] stream.
pub fn build_carry_fsm(k: usize) -> (Fsm, Vec<CarryState>) {
    let _ = k;
    Fsm::explore(
        CarryState::START,
        6,
        |s, y| match (s.rear, tag_of(y, 4)) {
            (false, TAG_FRONT) => s.front(bit(y, 0), bit(y, 1)),
            (false, _) => s.center(bit(y, 0), bit(y, 1)),
            (true, _) => s.rear_step(bit(y, 0) ^ s.p, bit(y, 3) ^ s.q),
        },
        carry_state_name,
    )
}

/// Carry machine over the [`carry_single_read_order`] stream.
pub fn build_carry_fsm_single_read(k: usize) -> (Fsm, Vec<CarryState>) {
    let _ = k;
    Fsm::explore(
        CarryState::START,
        6,
        |s, y| carry_single_read_step(s, y),
        carry_state_name,
    )
}

/// Transition of the single-read carry machine.
pub fn carry_single_read_step(s: &CarryState, y: u32) -> CarryState {
    match (s.rear, tag_of(y, 2)) {
        (false, TAG_FRONT) => s.front(bit(y, 0), bit(y, 1)),
        (false, _) => s.center(bit(y, 0), bit(y, 1)),
        (true, _) => {
            let z1 = if bit(y, 4) { s.b1 } else { bit(y, 0) ^ s.p };
            let z2 = if bit(y, 5) { s.b2 } else { bit(y, 1) ^ s.q };
            s.rear_step(z1, z2)
        }
    }
}

fn carry_state_name(s: &CarryState) -> String {
    format!(
        "p{}{}{}b{}{}x{}g{}c{}",
        b(s.p),
        b(s.q),
        if s.rear { "r" } else { "f" },
        b(s.b1),
        b(s.b2),
        b(s.x),
        b(s.g),
        b(s.c)
    )
}

/// Carry of the front part: the decoded rear values sum to more than `k`.
pub fn carry_definition(spec: &CodeSpec, x: &[bool], y: &[bool]) -> bool {
    let r = spec.k as u64 + 1;
    spec.decode_extended(x) % r + spec.decode_extended(y) % r > spec.k as u64
}

/// Packs six-entry stream symbols of booleans.
pub fn pack_stream(stream: &[Vec<bool>]) -> Vec<u32> {
    stream.iter().map(|s| symbol_from_bits(s)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::rg_encode;
    use crate::kleene::parse_bits;
    use crate::transducer::symbol_to_bits;

    fn bits(s: &str) -> Vec<bool> {
        parse_bits(s).unwrap()
    }

    fn all_words(n: usize) -> Vec<Vec<bool>> {
        (0..1u32 << n).map(|c| symbol_to_bits(c, n)).collect()
    }

    #[test]
    fn parity_fsm_examples() {
        let m = build_parity_fsm();
        assert_eq!(m.num_states(), 4);
        assert_eq!(m.name(m.run(&[0b10, 0b11])), "01");
        assert_eq!(m.name(m.run(&[])), "00");
        for n in 0..5 {
            let s = m.run(&vec![0b11; n]);
            let v = if n % 2 == 1 { "11" } else { "00" };
            assert_eq!(m.name(s), v);
        }
    }

    #[test]
    fn unary_counter_examples() {
        let m = unary_counter_fsm(3);
        let syms: Vec<u32> = [(1, 1), (1, 0), (0, 0)].iter().map(|&(a, b)| a << 1 | b).collect();
        assert_eq!(m.name(m.run(&syms)), "3");
        assert_eq!(m.name(m.run(&[3, 3, 3, 3])), "6");
        assert_eq!(m.num_states(), 7);
    }

    fn unary_sum(k: usize, x: &str, y: &str, p: bool, q: bool) -> u32 {
        let spec = CodeSpec::new(k + 1, k).unwrap();
        let mut xs = vec![p];
        xs.extend(bits(x));
        let mut ys = vec![q];
        ys.extend(bits(y));
        let m = build_unary_sum_fsm(k);
        let s = m.fsm.run(&unary_sum_stream(&spec, &xs, &ys));
        m.state(s).sum
    }

    #[test]
    fn unary_sum_examples() {
        assert_eq!(unary_sum(3, "110", "100", false, false), 3);
        assert_eq!(unary_sum(2, "00", "00", false, false), 0);
        assert_eq!(unary_sum(2, "11", "11", true, true), 0);
    }

    #[test]
    fn unary_sum_matches_extended_decode() {
        for k in 1..=5 {
            let spec = CodeSpec::new(k + 2, k).unwrap();
            let m = build_unary_sum_fsm(k);
            for x in all_words(k + 2) {
                for y in all_words(k + 2).iter().step_by(3) {
                    let s = m.state(m.fsm.run(&unary_sum_stream(&spec, &x, y)));
                    let r = k as u64 + 1;
                    let want = spec.decode_extended(&x) % r + spec.decode_extended(y) % r;
                    assert_eq!(s.sum as u64, want);
                    assert_eq!((s.p, s.q), (x[0] ^ x[1], y[0] ^ y[1]));
                }
            }
        }
    }

    fn gray_add(x: &str, y: &str, c0: bool) -> String {
        let t = build_gray_adder_transducer();
        let (x, y) = (bits(x), bits(y));
        let p = x.iter().fold(false, |a, &v| a ^ v);
        let q = y.iter().fold(false, |a, &v| a ^ v);
        let syms: Vec<u32> = x.iter().zip(&y).rev().map(|(&a, &b)| (a as u32) << 1 | b as u32).collect();
        let out = t.outputs_from(gray_adder_state(p, q, c0), &syms);
        out.iter().rev().map(|&o| if o == 1 { '1' } else { '0' }).collect()
    }

    #[test]
    fn gray_adder_examples() {
        assert_eq!(gray_add("011", "010", false), "111");
        assert_eq!(gray_add("000", "000", false), "000");
        assert_eq!(gray_add("01", "00", true), "11");
        assert_eq!(build_gray_adder_transducer().num_states(), 8);
    }

    #[test]
    fn gray_adder_matches_arithmetic() {
        let s = |v: Vec<bool>| v.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>();
        for n in 1..=4 {
            for i in 0..1u64 << n {
                for j in 0..1u64 << n {
                    for c in [false, true] {
                        let want = rg_encode(n + 1, i + j + c as u64).unwrap()[1..].to_vec();
                        assert_eq!(gray_add(&s(rg_encode(n, i).unwrap()), &s(rg_encode(n, j).unwrap()), c), s(want.clone()));
                        if i + j + (c as u64) < 1 << n {
                            assert_eq!(want, rg_encode(n, i + j + c as u64).unwrap());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn reorder_examples() {
        let spec = CodeSpec::new(4, 2).unwrap();
        let x: Vec<u32> = (1..=4).collect();
        let y: Vec<u32> = (11..=14).collect();
        let s = carry_input_reorder(&spec, &x, &y, 0, 1);
        assert_eq!(s.len(), 5);
        assert_eq!(s[2], vec![4, 14, 0, 0, 0, 1]);
        assert_eq!(s[3], vec![3, 13, 4, 14, 1, 0]);
        assert_eq!(s[4], vec![4, 14, 3, 13, 1, 0]);
        let spec = CodeSpec::new(3, 1).unwrap();
        let s = carry_input_reorder(&spec, &[1, 2, 3], &[4, 5, 6], 0, 9);
        assert_eq!(s.len(), 4);
        assert_eq!(s[3], vec![3, 6, 3, 6, 9, 0]);
        let single = carry_single_read_order(&CodeSpec::new(6, 3).unwrap(), &[1, 2, 3, 4, 5, 6], &[7, 8, 9, 10, 11, 12], 0, 99);
        let data: Vec<u32> = single.iter().flat_map(|s| [s[0], s[1]]).filter(|&v| v != 0).collect();
        let mut sorted = data.clone();
        sorted.sort();
        assert_eq!(sorted, (1..=12).collect::<Vec<_>>());
    }

    #[test]
    fn carry_examples() {
        let spec = CodeSpec::new(4, 2).unwrap();
        let (fsm, states) = build_carry_fsm(2);
        let run = |x: &str, y: &str| {
            let s = carry_input_reorder(&spec, &bits(x), &bits(y), false, true);
            states[fsm.run(&pack_stream(&s))].carry()
        };
        assert!(run("0011", "0011"));
        assert!(!run("0000", "0000"));
        assert!(!run("0101", "0101"));
    }

    #[test]
    fn carry_machines_match_definition() {
        for (n, k) in [(2, 1), (3, 2), (4, 3), (5, 4), (6, 5), (4, 2)] {
            let spec = CodeSpec::new(n, k).unwrap();
            let (lit, lit_states) = build_carry_fsm(k);
            let (single, single_states) = build_carry_fsm_single_read(k);
            assert!(single.num_states() <= 40);
            for x in all_words(n) {
                for y in all_words(n) {
                    let want = carry_definition(&spec, &x, &y);
                    let a = carry_input_reorder(&spec, &x, &y, false, true);
                    assert_eq!(lit_states[lit.run(&pack_stream(&a))].carry(), want);
                    let b = carry_single_read_order(&spec, &x, &y, false, true);
                    assert_eq!(single_states[single.run(&pack_stream(&b))].carry(), want);
                }
            }
        }
    }
}
