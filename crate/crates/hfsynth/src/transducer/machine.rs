use std::collections::{BTreeMap, HashMap};
use std::hash::Hash;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kleene::{bits_to_string, hazard_free_extension, parse_bits, StarFold, Trit, TritVec};

/// Packs bits into a symbol; the first bit is the most significant.
pub fn symbol_from_bits(bits: &[bool]) -> u32 {
    bits.iter().fold(0, |acc, &b| acc << 1 | b as u32)
}

pub fn symbol_to_bits(sym: u32, width: usize) -> Vec<bool> {
    (0..width).map(|j| sym >> (width - 1 - j) & 1 == 1).collect()
}

pub fn symbol_to_string(sym: u32, width: usize) -> String {
    bits_to_string(&symbol_to_bits(sym, width))
}

fn parse_symbol(s: &str, width: usize) -> Result<u32> {
    let bits = parse_bits(s)?;
    if bits.len() != width {
        return Err(Error::LengthMismatch {
            expected: width,
            got: bits.len(),
        });
    }
    Ok(symbol_from_bits(&bits))
}

/// A finite state machine with a total transition table over all of `B^input_bits`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fsm {
    names: Vec<String>,
    start: usize,
    input_bits: usize,
    delta: Vec<u32>,
}

impl Fsm {
    pub fn new(names: Vec<String>, start: usize, input_bits: usize, delta: Vec<u32>) -> Result<Fsm> {
        let states = names.len();
        if start >= states {
            return Err(Error::Machine(format!("start state {start} out of range")));
        }
        if delta.len() != states << input_bits {
            return Err(Error::Machine("transition table has wrong size".into()));
        }
        if delta.iter().any(|&s| s as usize >= states) {
            return Err(Error::Machine("transition to unknown state".into()));
        }
        Ok(Fsm {
            names,
            start,
            input_bits,
            delta,
        })
    }

    /// Builds the machine reachable from `start` under `step`, numbering states in
    /// breadth-first discovery order. Returns the machine and the state values.
    pub fn explore<T, F, N>(start: T, input_bits: usize, step: F, name: N) -> (Fsm, Vec<T>)
    where
        T: Clone + Eq + Hash,
        F: Fn(&T, u32) -> T,
        N: Fn(&T) -> String,
    {
        Fsm::explore_many(vec![start], input_bits, step, name)
    }

    /// Like [`Fsm::explore`] from several roots, numbered first; the first root is the start.
    pub fn explore_many<T, F, N>(roots: Vec<T>, input_bits: usize, step: F, name: N) -> (Fsm, Vec<T>)
    where
        T: Clone + Eq + Hash,
        F: Fn(&T, u32) -> T,
        N: Fn(&T) -> String,
    {
        assert!(!roots.is_empty(), "at least one root");
        let mut index: HashMap<T, u32> = HashMap::new();
        let mut states = Vec::new();
        for r in roots {
            if !index.contains_key(&r) {
                index.insert(r.clone(), states.len() as u32);
                states.push(r);
            }
        }
        let mut delta = Vec::new();
        let mut i = 0;
        while i < states.len() {
            for sym in 0..1u32 << input_bits {
                let next = step(&states[i], sym);
                let id = match index.get(&next) {
                    Some(&id) => id,
                    None => {
                        let id = states.len() as u32;
                        index.insert(next.clone(), id);
                        states.push(next);
                        id
                    }
                };
                delta.push(id);
            }
            i += 1;
        }
        let names = states.iter().map(&name).collect();
        let fsm = Fsm::new(names, 0, input_bits, delta).expect("explored machine is total");
        (fsm, states)
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn input_bits(&self) -> usize {
        self.input_bits
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn state_by_name(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn name(&self, state: usize) -> &str {
        &self.names[state]
    }

    pub fn step(&self, state: usize, sym: u32) -> usize {
        self.delta[(state << self.input_bits) | sym as usize] as usize
    }

    pub fn run_from(&self, state: usize, syms: &[u32]) -> usize {
        syms.iter().fold(state, |s, &y| self.step(s, y))
    }

    pub fn run(&self, syms: &[u32]) -> usize {
        self.run_from(self.start, syms)
    }

    /// A machine with uniformly random transitions.
    pub fn random<R: Rng>(rng: &mut R, states: usize, input_bits: usize) -> Fsm {
        let delta = (0..states << input_bits)
            .map(|_| rng.gen_range(0..states as u32))
            .collect();
        let names = (0..states).map(|s| s.to_string()).collect();
        Fsm::new(names, 0, input_bits, delta).expect("random machine is total")
    }
}

/// A Moore machine `(S, s0, Sigma, Lambda, t, o)` with output `o(s_{i-1}, x_i)`.
///
/// Transition and output tables are stored over all of `B^input_bits`; symbols outside
/// the alphabet are mapped through `decoder` first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MooreMachine {
    names: Vec<String>,
    start: usize,
    input_bits: usize,
    output_bits: usize,
    alphabet: Vec<u32>,
    decoder: Vec<u32>,
    explicit_extension: bool,
    trans: Vec<u32>,
    out: Vec<u32>,
}

impl MooreMachine {
    /// `t` and `o` are indexed `[state][position of symbol in alphabet]`. When `decoder` is
    /// `None`, symbols outside the alphabet map to the first alphabet symbol.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        names: Vec<String>,
        start: usize,
        input_bits: usize,
        output_bits: usize,
        alphabet: Vec<u32>,
        t: Vec<Vec<usize>>,
        o: Vec<Vec<u32>>,
        decoder: Option<Vec<u32>>,
    ) -> Result<MooreMachine> {
        let states = names.len();
        let width = 1usize << input_bits;
        if start >= states {
            return Err(Error::Machine(format!("start state {start} out of range")));
        }
        if alphabet.is_empty() || alphabet.iter().any(|&a| a as usize >= width) {
            return Err(Error::Machine("alphabet empty or symbol too wide".into()));
        }
        if t.len() != states || o.len() != states {
            return Err(Error::Machine("tables must have one row per state".into()));
        }
        for (row_t, row_o) in t.iter().zip(&o) {
            if row_t.len() != alphabet.len() || row_o.len() != alphabet.len() {
                return Err(Error::Machine("tables must have one column per symbol".into()));
            }
            if row_t.iter().any(|&s| s >= states) || row_o.iter().any(|&y| y >> output_bits != 0) {
                return Err(Error::Machine("table entry out of range".into()));
            }
        }
        let explicit_extension = decoder.is_some();
        let decoder = match decoder {
            Some(d) => {
                if d.len() != width {
                    return Err(Error::Machine("decoder must cover every symbol".into()));
                }
                for (y, &a) in d.iter().enumerate() {
                    if !alphabet.contains(&a) || (alphabet.contains(&(y as u32)) && a != y as u32) {
                        return Err(Error::Machine(format!(
                            "decoder maps {} outside the alphabet or moves an alphabet symbol",
                            symbol_to_string(y as u32, input_bits)
                        )));
                    }
                }
                d
            }
            None => (0..width as u32)
                .map(|y| if alphabet.contains(&y) { y } else { alphabet[0] })
                .collect(),
        };
        let pos = |a: u32| alphabet.iter().position(|&b| b == a).expect("decoded symbol");
        let mut trans = Vec::with_capacity(states * width);
        let mut out = Vec::with_capacity(states * width);
        for s in 0..states {
            for &d in &decoder {
                trans.push(t[s][pos(d)] as u32);
                out.push(o[s][pos(d)]);
            }
        }
        Ok(MooreMachine {
            names,
            start,
            input_bits,
            output_bits,
            alphabet,
            decoder,
            explicit_extension,
            trans,
            out,
        })
    }

    /// A machine over the full alphabet with uniformly random tables.
    pub fn random<R: Rng>(rng: &mut R, states: usize, input_bits: usize, output_bits: usize) -> MooreMachine {
        let width = 1usize << input_bits;
        let t = (0..states)
            .map(|_| (0..width).map(|_| rng.gen_range(0..states)).collect())
            .collect();
        let o = (0..states)
            .map(|_| (0..width).map(|_| rng.gen_range(0..1u32 << output_bits)).collect())
            .collect();
        MooreMachine::new(
            (0..states).map(|s| s.to_string()).collect(),
            0,
            input_bits,
            output_bits,
            (0..width as u32).collect(),
            t,
            o,
            None,
        )
        .expect("random machine is valid")
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn input_bits(&self) -> usize {
        self.input_bits
    }

    pub fn output_bits(&self) -> usize {
        self.output_bits
    }

    pub fn alphabet(&self) -> &[u32] {
        &self.alphabet
    }

    pub fn decode_symbol(&self, y: u32) -> u32 {
        self.decoder[y as usize]
    }

    /// Transition on any symbol of `B^input_bits`, through the decoder.
    pub fn step(&self, state: usize, y: u32) -> usize {
        self.trans[(state << self.input_bits) | y as usize] as usize
    }

    /// Output on any symbol of `B^input_bits`, through the decoder.
    pub fn output(&self, state: usize, y: u32) -> u32 {
        self.out[(state << self.input_bits) | y as usize]
    }

    /// Outputs when started in `state` instead of the start state, using the extension.
    pub fn outputs_from(&self, state: usize, x: &[u32]) -> Vec<u32> {
        let mut s = state;
        x.iter()
            .map(|&y| {
                let o = self.output(s, y);
                s = self.step(s, y);
                o
            })
            .collect()
    }

    /// Reference semantics; returns the outputs and the state trace `s_0..s_n`.
    pub fn transcribe(&self, x: &[u32]) -> Result<(Vec<u32>, Vec<usize>)> {
        let mut trace = vec![self.start];
        let mut outputs = Vec::with_capacity(x.len());
        for &y in x {
            if y as usize >= self.decoder.len() || (!self.explicit_extension && !self.alphabet.contains(&y)) {
                return Err(Error::Machine(format!(
                    "symbol {} not in the alphabet",
                    symbol_to_string(y, self.input_bits)
                )));
            }
            let s = *trace.last().expect("trace starts with s0");
            outputs.push(self.output(s, y));
            trace.push(self.step(s, y));
        }
        Ok((outputs, trace))
    }

    /// Transcription on a flat bit string of `n * input_bits` bits, using the extension.
    pub fn transcribe_bits(&self, x: &[bool]) -> Vec<bool> {
        let mut s = self.start;
        let mut out = Vec::with_capacity(x.len() / self.input_bits.max(1) * self.output_bits);
        for chunk in x.chunks(self.input_bits) {
            let y = symbol_from_bits(chunk);
            out.extend(symbol_to_bits(self.output(s, y), self.output_bits));
            s = self.step(s, y);
        }
        out
    }

    /// Brute-force star-fold of the transcription over all resolutions of `x`.
    pub fn transcribe_hazard_free_oracle(&self, x: &TritVec) -> TritVec {
        hazard_free_extension(|y| self.transcribe_bits(y), x)
    }

    /// Exact hazard-free transcription by simulating reachable state sets. Each output
    /// depends on disjoint symbols on the two sides of its state, so set simulation is exact.
    pub fn transcribe_set_oracle(&self, x: &TritVec) -> TritVec {
        let mut reach = vec![false; self.num_states()];
        reach[self.start] = true;
        let mut out = Vec::with_capacity(x.len() / self.input_bits.max(1) * self.output_bits);
        for chunk in x.chunks(self.input_bits) {
            let ys = symbol_resolutions(chunk);
            let mut fold = StarFold::new();
            let mut next = vec![false; self.num_states()];
            for s in (0..reach.len()).filter(|&s| reach[s]) {
                for &y in &ys {
                    fold.add_bits(&symbol_to_bits(self.output(s, y), self.output_bits));
                    next[self.step(s, y)] = true;
                }
            }
            out.extend(fold.finish().expect("non-empty").0);
            reach = next;
        }
        TritVec(out)
    }

    pub fn from_json(bytes: &[u8]) -> Result<MooreMachine> {
        let file: MachineFile = serde_json::from_slice(bytes)?;
        file.into_machine()
    }

    pub fn to_json(&self) -> Vec<u8> {
        let sym = |y: u32| symbol_to_string(y, self.input_bits);
        let mut t = BTreeMap::new();
        let mut o = BTreeMap::new();
        for (s, name) in self.names.iter().enumerate() {
            let mut ts = BTreeMap::new();
            let mut os = BTreeMap::new();
            for &a in &self.alphabet {
                ts.insert(sym(a), self.names[self.step(s, a)].clone());
                os.insert(sym(a), symbol_to_string(self.output(s, a), self.output_bits));
            }
            t.insert(name.clone(), ts);
            o.insert(name.clone(), os);
        }
        let extension = if self.explicit_extension {
            Some(
                (0..self.decoder.len() as u32)
                    .filter(|y| !self.alphabet.contains(y))
                    .map(|y| (sym(y), sym(self.decoder[y as usize])))
                    .collect(),
            )
        } else {
            None
        };
        let file = MachineFile {
            states: self.names.clone(),
            start: self.names[self.start].clone(),
            input_bits: self.input_bits,
            output_bits: self.output_bits,
            alphabet: self.alphabet.iter().map(|&a| sym(a)).collect(),
            t,
            o,
            extension,
        };
        serde_json::to_vec_pretty(&file).expect("machine serialization")
    }
}

/// Resolutions of a ternary symbol, as packed symbols.
pub fn symbol_resolutions(chunk: &[Trit]) -> Vec<u32> {
    crate::kleene::resolutions(&TritVec(chunk.to_vec()))
        .iter()
        .map(|y| symbol_from_bits(y))
        .collect()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MachineFile {
    states: Vec<String>,
    start: String,
    input_bits: usize,
    output_bits: usize,
    alphabet: Vec<String>,
    t: BTreeMap<String, BTreeMap<String, String>>,
    o: BTreeMap<String, BTreeMap<String, String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    extension: Option<BTreeMap<String, String>>,
}

impl MachineFile {
    fn into_machine(self) -> Result<MooreMachine> {
        let state = |name: &str| {
            self.states
                .iter()
                .position(|s| s == name)
                .ok_or_else(|| Error::Machine(format!("unknown state {name:?}")))
        };
        let alphabet = self
            .alphabet
            .iter()
            .map(|a| parse_symbol(a, self.input_bits))
            .collect::<Result<Vec<_>>>()?;
        let mut t = Vec::new();
        let mut o = Vec::new();
        for name in &self.states {
            let row_t = self
                .t
                .get(name)
                .ok_or_else(|| Error::Machine(format!("no transitions for state {name:?}")))?;
            let row_o = self
                .o
                .get(name)
                .ok_or_else(|| Error::Machine(format!("no outputs for state {name:?}")))?;
            let mut ts = Vec::new();
            let mut os = Vec::new();
            for a in &self.alphabet {
                let target = row_t
                    .get(a)
                    .ok_or_else(|| Error::Machine(format!("missing t({name}, {a})")))?;
                ts.push(state(target)?);
                let out = row_o
                    .get(a)
                    .ok_or_else(|| Error::Machine(format!("missing o({name}, {a})")))?;
                os.push(parse_symbol(out, self.output_bits)?);
            }
            t.push(ts);
            o.push(os);
        }
        let decoder = match &self.extension {
            None => None,
            Some(ext) => {
                let mut d = Vec::new();
                for y in 0..1u32 << self.input_bits {
                    let key = symbol_to_string(y, self.input_bits);
                    d.push(if alphabet.contains(&y) {
                        y
                    } else {
                        let target = ext
                            .get(&key)
                            .ok_or_else(|| Error::Machine(format!("extension misses {key}")))?;
                        parse_symbol(target, self.input_bits)?
                    });
                }
                Some(d)
            }
        };
        MooreMachine::new(
            self.states.clone(),
            state(&self.start)?,
            self.input_bits,
            self.output_bits,
            alphabet,
            t,
            o,
            decoder,
        )
    }
}

/// The three-state toy machine over the unary alphabet `{00, 10, 11}`: it outputs the
/// code of its current state, moves to the decoded input symbol, and stays in state 2
/// once reached. Symbol `01` is decoded with the recoverable decode of the code.
pub fn toy_machine() -> MooreMachine {
    use crate::codes::CodeSpec;
    let code = CodeSpec::new(2, 2).expect("valid code");
    let enc = |i: u64| symbol_from_bits(&code.encode(i).expect("index in range"));
    let alphabet: Vec<u32> = (0..3).map(enc).collect();
    let t = (0..3)
        .map(|s| (0..3).map(|a| if s == 2 { 2 } else { a }).collect())
        .collect();
    let o = (0..3).map(|s| vec![enc(s as u64); 3]).collect();
    let decoder = (0..4u32)
        .map(|y| enc(code.decode_extended(&symbol_to_bits(y, 2))))
        .collect();
    MooreMachine::new(
        (0..3).map(|s| s.to_string()).collect(),
        0,
        2,
        2,
        alphabet,
        t,
        o,
        Some(decoder),
    )
    .expect("toy machine is valid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::all_ternary;
    use crate::kleene::tv;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn syms(s: &[&str]) -> Vec<u32> {
        s.iter().map(|a| parse_symbol(a, 2).unwrap()).collect()
    }

    #[test]
    fn toy_transcription() {
        let m = toy_machine();
        let (out, trace) = m.transcribe(&syms(&["00", "00", "11", "00"])).unwrap();
        assert_eq!(out, syms(&["00", "00", "00", "11"]));
        assert_eq!(trace, vec![0, 0, 0, 2, 2]);
        let (out, _) = m.transcribe(&syms(&["10", "00", "11", "00"])).unwrap();
        assert_eq!(out, syms(&["00", "10", "00", "11"]));
        assert!(m.transcribe(&[]).unwrap().0.is_empty());
        assert_eq!(m.decode_symbol(0b01), 0b11);
    }

    #[test]
    fn toy_oracle_witness() {
        let m = toy_machine();
        assert_eq!(m.transcribe_hazard_free_oracle(&tv("u0001100")), tv("00u00011"));
        assert_eq!(m.transcribe_set_oracle(&tv("u0001100")), tv("00u00011"));
    }

    #[test]
    fn set_oracle_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (states, bits) in [(2, 1), (2, 2), (3, 2), (4, 1)] {
            let m = MooreMachine::random(&mut rng, states, bits, 2);
            for x in all_ternary(3 * bits) {
                assert_eq!(m.transcribe_set_oracle(&x), m.transcribe_hazard_free_oracle(&x));
            }
        }
    }

    #[test]
    fn strict_alphabet_without_extension() {
        let m = MooreMachine::new(
            vec!["a".into()],
            0,
            1,
            1,
            vec![0],
            vec![vec![0]],
            vec![vec![1]],
            None,
        )
        .unwrap();
        assert!(m.transcribe(&[1]).is_err());
        assert_eq!(m.transcribe_bits(&[true]), vec![true]);
    }

    #[test]
    fn json_round_trip() {
        let m = toy_machine();
        let back = MooreMachine::from_json(&m.to_json()).unwrap();
        assert_eq!(back, m);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = MooreMachine::random(&mut rng, 3, 2, 1);
        assert_eq!(MooreMachine::from_json(&r.to_json()).unwrap(), r);
        assert!(MooreMachine::from_json(br#"{"states":["a"],"start":"b","input_bits":1,"output_bits":1,"alphabet":["0"],"t":{"a":{"0":"a"}},"o":{"a":{"0":"1"}}}"#).is_err());
    }

    #[test]
    fn explore_numbers_reachable_states() {
        let (fsm, states) = Fsm::explore(0u8, 1, |&s, y| (s + y as u8) % 3, |s| s.to_string());
        assert_eq!(states, vec![0, 1, 2]);
        assert_eq!(fsm.run(&[1, 1, 0, 1]), 0);
        assert_eq!(fsm.state_by_name("2"), Some(2));
    }
}
