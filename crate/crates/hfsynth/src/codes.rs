//! Reflected Gray, unary and hybrid codes with their extended decoders and
//! exhaustive checks for preserving and recoverable properties.

use std::collections::HashMap;

use crate::circuit::blocks::mux_words;
use crate::circuit::{Builder, Circuit, NodeId};
use crate::error::{Error, Result};
use crate::kleene::{for_each_resolution, star_fold, TritVec};

pub fn parity(x: &[bool]) -> bool {
    x.iter().fold(false, |acc, &b| acc ^ b)
}

/// Binary reflected Gray code of `i` on `n` bits.
pub fn rg_encode(n: usize, i: u64) -> Result<Vec<bool>> {
    if n < 64 && i >> n != 0 {
        return Err(Error::OutOfRange {
            value: i,
            limit: 1 << n,
        });
    }
    let g = i ^ (i >> 1);
    Ok((0..n).map(|j| g >> (n - 1 - j) & 1 == 1).collect())
}

/// Inverse of [`rg_encode`]; total on all bit strings.
pub fn rg_decode(x: &[bool]) -> u64 {
    let mut acc = 0u64;
    let mut bit = false;
    for &b in x {
        bit ^= b;
        acc = acc << 1 | bit as u64;
    }
    acc
}

/// `1^i 0^(k-i)`.
pub fn xi_encode(k: usize, i: usize) -> Result<Vec<bool>> {
    if i > k {
        return Err(Error::OutOfRange {
            value: i as u64,
            limit: k as u64 + 1,
        });
    }
    Ok((0..k).map(|j| j < i).collect())
}

/// `0^i 1^(k-i)`.
pub fn xi_bar_encode(k: usize, i: usize) -> Result<Vec<bool>> {
    Ok(xi_encode(k, i)?.into_iter().map(|b| !b).collect())
}

/// Codeword of the unary code sharing the longest prefix (`b = 0`) or suffix (`b = 1`) with `z`.
pub fn u_map(z: &[bool], b: bool) -> Vec<bool> {
    let k = z.len();
    let ones = if b {
        z.iter().rposition(|&v| v).map_or(0, |i| i + 1)
    } else {
        z.iter().position(|&v| !v).unwrap_or(k)
    };
    (0..k).map(|j| j < ones).collect()
}

/// Complemented variant: `complement(u(complement(z), not b))`.
pub fn u_bar_map(z: &[bool], b: bool) -> Vec<bool> {
    let flipped: Vec<bool> = z.iter().map(|&v| !v).collect();
    u_map(&flipped, !b).into_iter().map(|v| !v).collect()
}

/// Value of the unary reading of `z` xored with `p`, decoded through the longest
/// prefix or suffix match keyed on the (xored) center bit.
fn rear_value(z: &[bool], p: bool) -> u64 {
    if z.is_empty() {
        return 0;
    }
    let w: Vec<bool> = z.iter().map(|&v| v ^ p).collect();
    let center = w[z.len() / 2];
    u_map(&w, center).iter().filter(|&&v| v).count() as u64
}

/// The hybrid code with `n` bits, a reflected Gray front of `n - k` bits and a unary rear of `k` bits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CodeSpec {
    pub n: usize,
    pub k: usize,
    pub m: u64,
}

impl CodeSpec {
    pub fn new(n: usize, k: usize) -> Result<CodeSpec> {
        if k > n || n - k >= 48 {
            return Err(Error::InvalidParameters(format!("code with n={n}, k={k}")));
        }
        Ok(CodeSpec {
            n,
            k,
            m: (k as u64 + 1) << (n - k),
        })
    }

    pub fn front_len(&self) -> usize {
        self.n - self.k
    }

    /// One-based index of the rear center bit within the rear.
    pub fn center(&self) -> usize {
        1 + self.k / 2
    }

    pub fn encode(&self, i: u64) -> Result<Vec<bool>> {
        if i >= self.m {
            return Err(Error::OutOfRange {
                value: i,
                limit: self.m,
            });
        }
        let block = i / (self.k as u64 + 1);
        let offset = (i % (self.k as u64 + 1)) as usize;
        let mut word = rg_encode(self.front_len(), block)?;
        let rear = if block % 2 == 0 {
            xi_encode(self.k, offset)?
        } else {
            xi_bar_encode(self.k, offset)?
        };
        word.extend(rear);
        Ok(word)
    }

    /// Total decode: Gray front, and the rear through `u` or `u_bar` keyed on the
    /// front parity and the center bit.
    pub fn decode_extended(&self, x: &[bool]) -> u64 {
        let (front, rear) = x.split_at(self.front_len());
        let block = rg_decode(front);
        block * (self.k as u64 + 1) + rear_value(rear, parity(front))
    }

    /// All codewords in index order.
    pub fn codewords(&self) -> Vec<Vec<bool>> {
        (0..self.m).map(|i| self.encode(i).expect("index in range")).collect()
    }

    pub fn extended_codeword(&self, start: u64, imprecision: u64) -> Result<ExtendedCodeword> {
        if imprecision >= self.m || start >= self.m {
            return Err(Error::OutOfRange {
                value: imprecision.max(start),
                limit: self.m,
            });
        }
        let words: Vec<TritVec> = (0..=imprecision)
            .map(|j| TritVec::from_bools(&self.encode((start + j) % self.m).expect("in range")))
            .collect();
        Ok(ExtendedCodeword {
            word: star_fold(&words).expect("non-empty range"),
            start,
            imprecision,
        })
    }

    /// Every extended codeword with imprecision at most `max_p`.
    pub fn extended_codewords(&self, max_p: u64) -> Vec<ExtendedCodeword> {
        (0..=max_p.min(self.m - 1))
            .flat_map(|p| (0..self.m).map(move |i| (i, p)))
            .map(|(i, p)| self.extended_codeword(i, p).expect("valid range"))
            .collect()
    }

    pub fn range_contains(&self, start: u64, imprecision: u64, i: u64) -> bool {
        (i + self.m - start) % self.m <= imprecision
    }
}

/// Four-branch decode of `v` in `B^(k+1)` used by the sorting-based adder.
pub fn gamma_decode_sort(k: usize, v: &[bool]) -> u64 {
    assert_eq!(v.len(), k + 1, "decode width");
    let h = k / 2;
    let at = |i: usize| v[i - 1];
    let count = |lo: usize, hi: usize, val: bool| (lo..=hi).filter(|&i| i <= k + 1 && at(i) == val).count() as u64;
    let (h64, k64) = (h as u64, k as u64);
    match (at(1), at(2 + h)) {
        (false, false) => count(2, 1 + h, true),
        (false, true) => 1 + h64 + count(3 + h, k + 1, true),
        (true, true) => k64 + 1 + count(2, 1 + h, false),
        (true, false) => k64 + 2 + h64 + count(3 + h, k + 1, false),
    }
}

/// A star-fold of consecutive codewords with its index range `start..=start+imprecision` mod M.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtendedCodeword {
    pub word: TritVec,
    pub start: u64,
    pub imprecision: u64,
}

/// A violation found by the exhaustive code checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CodeViolation {
    pub start: u64,
    pub imprecision: u64,
    pub word: TritVec,
    pub resolution: Vec<bool>,
    pub decoded: Option<u64>,
}

/// First index `i` whose codeword differs from the next one (cyclically) in other than
/// exactly one bit.
pub fn check_gray(codewords: &[Vec<bool>]) -> std::result::Result<(), u64> {
    let m = codewords.len();
    for i in 0..m {
        let next = &codewords[(i + 1) % m];
        if codewords[i].iter().zip(next).filter(|(a, b)| a != b).count() != 1 {
            return Err(i as u64);
        }
    }
    Ok(())
}

/// Checks that no resolution of an extended codeword of imprecision at most `k_test`
/// is a codeword outside its range.
pub fn check_preserving(codewords: &[Vec<bool>], k_test: u64) -> std::result::Result<(), CodeViolation> {
    let m = codewords.len() as u64;
    let index: HashMap<&[bool], u64> = codewords
        .iter()
        .enumerate()
        .map(|(i, w)| (w.as_slice(), i as u64))
        .collect();
    for p in 0..=k_test.min(m - 1) {
        for start in 0..m {
            let words: Vec<TritVec> = (0..=p)
                .map(|j| TritVec::from_bools(&codewords[((start + j) % m) as usize]))
                .collect();
            let word = star_fold(&words).expect("non-empty");
            let mut bad = None;
            for_each_resolution(&word, |y| {
                if bad.is_none() {
                    if let Some(&i) = index.get(y) {
                        if (i + m - start) % m > p {
                            bad = Some((y.to_vec(), i));
                        }
                    }
                }
            });
            if let Some((resolution, i)) = bad {
                return Err(CodeViolation {
                    start,
                    imprecision: p,
                    word,
                    resolution,
                    decoded: Some(i),
                });
            }
        }
    }
    Ok(())
}

/// Checks that `decode` maps every resolution of every extended codeword of imprecision
/// at most `k_test` into its range.
pub fn check_recoverable<D>(codewords: &[Vec<bool>], decode: D, k_test: u64) -> std::result::Result<(), CodeViolation>
where
    D: Fn(&[bool]) -> u64,
{
    check_preserving(codewords, k_test)?;
    let m = codewords.len() as u64;
    for p in 0..=k_test.min(m - 1) {
        for start in 0..m {
            let words: Vec<TritVec> = (0..=p)
                .map(|j| TritVec::from_bools(&codewords[((start + j) % m) as usize]))
                .collect();
            let word = star_fold(&words).expect("non-empty");
            let mut bad = None;
            for_each_resolution(&word, |y| {
                if bad.is_none() {
                    let d = decode(y);
                    if d >= m || (d + m - start) % m > p {
                        bad = Some((y.to_vec(), d));
                    }
                }
            });
            if let Some((resolution, d)) = bad {
                return Err(CodeViolation {
                    start,
                    imprecision: p,
                    word,
                    resolution,
                    decoded: Some(d),
                });
            }
        }
    }
    Ok(())
}

/// Searches all injections `[M] -> B^n` with `M = (k+1) 2^(n-k)` for a `p`-recoverable code.
/// Codes are normalized to map 0 to the all-zero word (xor with a fixed word is a symmetry).
/// Returns a witness code when one exists.
pub fn search_recoverable(n: usize, k: usize, p: u64) -> Result<Option<Vec<u32>>> {
    let spec = CodeSpec::new(n, k)?;
    let m = spec.m as usize;
    if n > 3 || m > 8 {
        return Err(Error::TooLarge(format!("n={n}, k={k}")));
    }
    let words = 1u32 << n;
    let mut code = vec![0u32];
    let mut used = vec![false; words as usize];
    used[0] = true;
    Ok(extend_search(&mut code, &mut used, m, n, p))
}

fn extend_search(code: &mut Vec<u32>, used: &mut [bool], m: usize, n: usize, p: u64) -> Option<Vec<u32>> {
    if code.len() == m {
        return is_recoverable_code(code, n, p).then(|| code.clone());
    }
    for w in 0..used.len() {
        if used[w] {
            continue;
        }
        used[w] = true;
        code.push(w as u32);
        if let Some(found) = extend_search(code, used, m, n, p) {
            return Some(found);
        }
        code.pop();
        used[w] = false;
    }
    None
}

/// A code is `p`-recoverable iff it is `p`-preserving and every word admits a decode value
/// lying in all ranges whose extended codeword covers it.
fn is_recoverable_code(code: &[u32], n: usize, p: u64) -> bool {
    let m = code.len() as u64;
    let words: Vec<Vec<bool>> = code
        .iter()
        .map(|&w| (0..n).map(|j| w >> (n - 1 - j) & 1 == 1).collect())
        .collect();
    if check_preserving(&words, p).is_err() {
        return false;
    }
    let mut allowed = vec![u64::MAX >> (64 - m); 1 << n];
    for q in 0..=p.min(m - 1) {
        for start in 0..m {
            let tw: Vec<TritVec> = (0..=q)
                .map(|j| TritVec::from_bools(&words[((start + j) % m) as usize]))
                .collect();
            let word = star_fold(&tw).expect("non-empty");
            let range: u64 = (0..=q).fold(0, |acc, j| acc | 1 << ((start + j) % m));
            for_each_resolution(&word, |y| {
                let idx = y.iter().fold(0usize, |acc, &b| acc << 1 | b as usize);
                allowed[idx] &= range;
            });
        }
    }
    allowed.iter().all(|&a| a != 0)
}

/// Whether any `(k+1)`-recoverable code exists for the given parameters.
pub fn search_recoverable_bound(n: usize, k: usize) -> Result<bool> {
    Ok(search_recoverable(n, k, k as u64 + 1)?.is_some())
}

/// Hazard-free multiplexer over all `2^n` input strings with constant data `f(decode(x))`.
pub fn build_recoverable_function_circuit<D, F>(spec: &CodeSpec, decode: D, f: F) -> Circuit
where
    D: Fn(&[bool]) -> u64,
    F: Fn(u64) -> Vec<bool>,
{
    let n = spec.n;
    let mut b = Builder::new(n);
    let selects: Vec<NodeId> = b.inputs();
    let words: Vec<Vec<NodeId>> = (0..1u64 << n)
        .map(|x| {
            let bits: Vec<bool> = (0..n).map(|j| x >> (n - 1 - j) & 1 == 1).collect();
            f(decode(&bits)).into_iter().map(|v| b.constant(v)).collect()
        })
        .collect();
    let out = mux_words(&mut b, &selects, &words);
    b.finish(&out)
}
