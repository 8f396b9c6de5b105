//! Ternary values, resolutions, the star operator and Kleene gate semantics.

use std::fmt;
use std::ops::{Deref, DerefMut};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A ternary value ordered `0 < u < 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Trit {
    Zero,
    U,
    One,
}

impl Trit {
    pub const ALL: [Trit; 3] = [Trit::Zero, Trit::U, Trit::One];

    pub fn from_bool(b: bool) -> Trit {
        if b {
            Trit::One
        } else {
            Trit::Zero
        }
    }

    pub fn is_stable(self) -> bool {
        self != Trit::U
    }

    pub fn to_bool(self) -> Option<bool> {
        match self {
            Trit::Zero => Some(false),
            Trit::One => Some(true),
            Trit::U => None,
        }
    }

    pub fn and(self, other: Trit) -> Trit {
        self.min(other)
    }

    pub fn or(self, other: Trit) -> Trit {
        self.max(other)
    }

    pub fn not(self) -> Trit {
        match self {
            Trit::Zero => Trit::One,
            Trit::One => Trit::Zero,
            Trit::U => Trit::U,
        }
    }

    pub fn star(self, other: Trit) -> Trit {
        if self == other {
            self
        } else {
            Trit::U
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Trit::Zero => '0',
            Trit::One => '1',
            Trit::U => 'u',
        }
    }

    pub fn from_char(c: char) -> Option<Trit> {
        match c {
            '0' => Some(Trit::Zero),
            '1' => Some(Trit::One),
            'u' => Some(Trit::U),
            _ => None,
        }
    }
}

impl From<bool> for Trit {
    fn from(b: bool) -> Trit {
        Trit::from_bool(b)
    }
}

impl fmt::Display for Trit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_char())
    }
}

/// A fixed-length ternary string; position 1 is leftmost.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TritVec(pub Vec<Trit>);

impl TritVec {
    pub fn new(bits: Vec<Trit>) -> TritVec {
        TritVec(bits)
    }

    pub fn from_bools(bits: &[bool]) -> TritVec {
        TritVec(bits.iter().map(|&b| Trit::from_bool(b)).collect())
    }

    pub fn stable(len: usize, value: bool) -> TritVec {
        TritVec(vec![Trit::from_bool(value); len])
    }

    /// One-based access.
    pub fn at(&self, i: usize) -> Trit {
        self.0[i - 1]
    }

    pub fn is_stable(&self) -> bool {
        self.0.iter().all(|t| t.is_stable())
    }

    pub fn unstable_count(&self) -> usize {
        self.0.iter().filter(|t| !t.is_stable()).count()
    }

    pub fn to_bools(&self) -> Option<Vec<bool>> {
        self.0.iter().map(|t| t.to_bool()).collect()
    }

    pub fn concat(&self, other: &TritVec) -> TritVec {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        TritVec(v)
    }

    /// True if every resolution of `other` is a resolution of `self`.
    pub fn covers(&self, other: &TritVec) -> bool {
        self.len() == other.len()
            && self
                .iter()
                .zip(other.iter())
                .all(|(&a, &b)| a == Trit::U || a == b)
    }
}

impl Deref for TritVec {
    type Target = Vec<Trit>;
    fn deref(&self) -> &Vec<Trit> {
        &self.0
    }
}

impl DerefMut for TritVec {
    fn deref_mut(&mut self) -> &mut Vec<Trit> {
        &mut self.0
    }
}

impl From<Vec<Trit>> for TritVec {
    fn from(v: Vec<Trit>) -> TritVec {
        TritVec(v)
    }
}

impl FromStr for TritVec {
    type Err = Error;
    fn from_str(s: &str) -> Result<TritVec> {
        s.chars()
            .enumerate()
            .map(|(pos, c)| {
                Trit::from_char(c).ok_or_else(|| Error::Parse {
                    pos,
                    msg: format!("unexpected character {c:?}"),
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(TritVec)
    }
}

impl fmt::Display for TritVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.0 {
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// Parses a ternary literal, panicking on bad input. Intended for tests and constants.
pub fn tv(s: &str) -> TritVec {
    s.parse().expect("valid ternary literal")
}

/// Parses a stable bit string.
pub fn parse_bits(s: &str) -> Result<Vec<bool>> {
    s.chars()
        .enumerate()
        .map(|(pos, c)| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            _ => Err(Error::Parse {
                pos,
                msg: format!("expected bit, found {c:?}"),
            }),
        })
        .collect()
}

pub fn bits_to_string(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// All stable strings compatible with `x`, in lexicographic order.
pub fn resolutions(x: &TritVec) -> Vec<Vec<bool>> {
    let mut out = Vec::with_capacity(1 << x.unstable_count());
    for_each_resolution(x, |y| out.push(y.to_vec()));
    out
}

/// Calls `visit` on every resolution of `x` in lexicographic order.
pub fn for_each_resolution(x: &TritVec, mut visit: impl FnMut(&[bool])) {
    let free: Vec<usize> = (0..x.len()).filter(|&i| x[i] == Trit::U).collect();
    let mut y: Vec<bool> = x.iter().map(|t| *t == Trit::One).collect();
    let count = 1u64 << free.len();
    for m in 0..count {
        for (j, &pos) in free.iter().enumerate() {
            y[pos] = (m >> (free.len() - 1 - j)) & 1 == 1;
        }
        visit(&y);
    }
}

pub fn star(x: &TritVec, y: &TritVec) -> Result<TritVec> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    Ok(TritVec(
        x.iter().zip(y.iter()).map(|(&a, &b)| a.star(b)).collect(),
    ))
}

/// Running star-fold accumulator over equal-length stable strings.
#[derive(Clone, Debug, Default)]
pub struct StarFold {
    acc: Option<TritVec>,
}

impl StarFold {
    pub fn new() -> StarFold {
        StarFold { acc: None }
    }

    pub fn add_bits(&mut self, y: &[bool]) {
        match &mut self.acc {
            None => self.acc = Some(TritVec::from_bools(y)),
            Some(acc) => {
                for (a, &b) in acc.iter_mut().zip(y) {
                    if *a != Trit::from_bool(b) {
                        *a = Trit::U;
                    }
                }
            }
        }
    }

    pub fn add(&mut self, y: &TritVec) {
        match &mut self.acc {
            None => self.acc = Some(y.clone()),
            Some(acc) => {
                for (a, &b) in acc.iter_mut().zip(y.iter()) {
                    *a = a.star(b);
                }
            }
        }
    }

    pub fn finish(self) -> Option<TritVec> {
        self.acc
    }
}

/// Star-fold of a non-empty collection; `None` when empty.
pub fn star_fold<'a>(items: impl IntoIterator<Item = &'a TritVec>) -> Option<TritVec> {
    let mut acc = StarFold::new();
    for x in items {
        acc.add(x);
    }
    acc.finish()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    And2,
    Or2,
    Not,
    Const0,
    Const1,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::And2 | GateKind::Or2 => 2,
            GateKind::Not => 1,
            GateKind::Const0 | GateKind::Const1 => 0,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GateKind::And2 => "and2",
            GateKind::Or2 => "or2",
            GateKind::Not => "not",
            GateKind::Const0 => "const0",
            GateKind::Const1 => "const1",
        }
    }
}

pub fn gate_eval(kind: GateKind, args: &[Trit]) -> Result<Trit> {
    if args.len() != kind.arity() {
        return Err(Error::Arity {
            gate: kind.name(),
            expected: kind.arity(),
            got: args.len(),
        });
    }
    Ok(match kind {
        GateKind::And2 => args[0].and(args[1]),
        GateKind::Or2 => args[0].or(args[1]),
        GateKind::Not => args[0].not(),
        GateKind::Const0 => Trit::Zero,
        GateKind::Const1 => Trit::One,
    })
}

/// Star-fold of `f` over all resolutions of `x`.
pub fn hazard_free_extension<F>(f: F, x: &TritVec) -> TritVec
where
    F: Fn(&[bool]) -> Vec<bool>,
{
    let mut acc = StarFold::new();
    for_each_resolution(x, |y| acc.add_bits(&f(y)));
    acc.finish().expect("at least one resolution")
}
