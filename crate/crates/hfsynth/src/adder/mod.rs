//! Recoverable addition on the hybrid code: reference semantics, oracles and the two
//! circuit constructions.

pub mod fsm;
mod join;
mod prefix;
mod sorting;

use std::fmt;
use std::str::FromStr;

use crate::circuit::Circuit;
use crate::codes::{gamma_decode_sort, parity, CodeSpec};
use crate::error::{Error, Result};
use crate::kleene::{for_each_resolution, StarFold, Trit, TritVec};

pub use fsm::{
    build_carry_fsm, build_carry_fsm_single_read, build_gray_adder_transducer, build_parity_fsm,
    build_unary_sum_fsm, carry_definition, carry_input_reorder, carry_single_read_order, unary_counter_fsm,
};
pub use prefix::build_adder_prefix;
pub use sorting::{build_adder_sorting, build_sorting_rear, sorting_rear_function};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    Prefix,
    Sorting,
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Variant> {
        match s {
            "prefix" => Ok(Variant::Prefix),
            "sorting" => Ok(Variant::Sorting),
            _ => Err(Error::InvalidParameters(format!("unknown adder variant {s:?}"))),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Prefix => "prefix",
            Variant::Sorting => "sorting",
        })
    }
}

/// An adder on the hybrid code with `n` bits and `k` rear bits; circuits take the operands
/// interleaved `x1 y1 x2 y2 ...`. Circuits can be built for any width, while the code
/// semantics need the modulus to fit in 64 bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AdderSpec {
    pub n: usize,
    pub k: usize,
    pub variant: Variant,
}

impl AdderSpec {
    pub fn new(n: usize, k: usize, variant: Variant) -> Result<AdderSpec> {
        check_adder_code(n, k)?;
        Ok(AdderSpec { n, k, variant })
    }

    pub fn code(&self) -> Result<CodeSpec> {
        CodeSpec::new(self.n, self.k)
    }

    pub fn build(&self) -> Result<Circuit> {
        match self.variant {
            Variant::Prefix => build_adder_prefix(self.n, self.k),
            Variant::Sorting => build_adder_sorting(self.n, self.k),
        }
    }

    /// Boolean function computed by the circuit on stable inputs.
    pub fn stable_function(&self, x: &[bool], y: &[bool]) -> Result<Vec<bool>> {
        let code = self.code()?;
        Ok(match self.variant {
            Variant::Prefix => reference_add(&code, x, y),
            Variant::Sorting => sorting_reference_add(&code, x, y),
        })
    }
}

pub(crate) fn check_adder_code(n: usize, k: usize) -> Result<()> {
    if k == 0 || n <= k {
        return Err(Error::InvalidParameters(format!("adders need n > k >= 1, got n={n}, k={k}")));
    }
    Ok(())
}

/// `encode(decode(x) + decode(y) mod M)`.
pub fn reference_add(spec: &CodeSpec, x: &[bool], y: &[bool]) -> Vec<bool> {
    let sum = (spec.decode_extended(x) + spec.decode_extended(y)) % spec.m;
    spec.encode(sum).expect("sum in range")
}

/// Stable semantics of the sorting adder: the front part as [`reference_add`], the rear
/// part through the four-branch decode of the parity-compressed words.
pub fn sorting_reference_add(spec: &CodeSpec, x: &[bool], y: &[bool]) -> Vec<bool> {
    let m = spec.front_len();
    let mut out = reference_add(spec, x, y);
    let compress = |w: &[bool]| {
        let mut v = vec![parity(&w[..m])];
        v.extend_from_slice(&w[m..]);
        v
    };
    let rear = sorting_rear_function(spec.k, &compress(x), &compress(y));
    out.truncate(m);
    out.extend(rear);
    out
}

/// Decoded rear sum of two compressed words under the four-branch decode.
pub fn sorting_rear_sum(k: usize, v1: &[bool], v2: &[bool]) -> u64 {
    gamma_decode_sort(k, v1) + gamma_decode_sort(k, v2)
}

/// Operands interleaved position by position.
pub fn interleave<T: Copy>(x: &[T], y: &[T]) -> Vec<T> {
    x.iter().zip(y).flat_map(|(&a, &b)| [a, b]).collect()
}

/// Inverse of [`interleave`].
pub fn deinterleave<T: Copy>(v: &[T]) -> (Vec<T>, Vec<T>) {
    (v.iter().step_by(2).copied().collect(), v.iter().skip(1).step_by(2).copied().collect())
}

/// Star-fold of `f` over all resolutions of both ternary operands.
pub fn star_over_pairs<F>(x: &TritVec, y: &TritVec, f: F) -> TritVec
where
    F: Fn(&[bool], &[bool]) -> Vec<bool>,
{
    let mut acc = StarFold::new();
    for_each_resolution(x, |a| {
        for_each_resolution(y, |b| acc.add_bits(&f(a, b)));
    });
    acc.finish().expect("at least one resolution")
}

/// Star-fold of [`reference_add`] over all resolutions of both operands.
pub fn recoverable_sum_oracle(spec: &CodeSpec, x: &TritVec, y: &TritVec) -> TritVec {
    star_over_pairs(x, y, |a, b| reference_add(spec, a, b))
}

/// Star-fold of the codewords over the range sum `r_x + r_y mod M`.
pub fn range_sum_star(spec: &CodeSpec, start: u64, imprecision: u64) -> TritVec {
    spec.extended_codeword((start) % spec.m, imprecision)
        .expect("range within the code")
        .word
}

/// Every pair of extended codewords whose imprecisions sum to at most `budget`, with the
/// expected output word.
pub fn contract_pairs(spec: &CodeSpec, budget: u64) -> Vec<(TritVec, TritVec, TritVec)> {
    let mut out = Vec::new();
    for px in 0..=budget {
        for py in 0..=budget - px {
            for i in 0..spec.m {
                let x = spec.extended_codeword(i, px).expect("valid range").word;
                for j in 0..spec.m {
                    let y = spec.extended_codeword(j, py).expect("valid range").word;
                    out.push((x.clone(), y, range_sum_star(spec, i + j, px + py)));
                }
            }
        }
    }
    out
}

/// Interleaved ternary input of an adder circuit.
pub fn adder_input(x: &TritVec, y: &TritVec) -> TritVec {
    TritVec(interleave::<Trit>(x, y))
}
