//! Compilation of Moore machine transcription into hazard-free circuits.

use crate::circuit::{Builder, Circuit, NodeId};
use crate::error::{Error, Result};

use super::chain::{dot, forward_chain, readout_row};
use super::machine::{Fsm, MooreMachine};

/// Transcription circuitry inside a builder: `positions[i]` are the symbol wires of
/// position `i + 1`; returns the output wires per position.
pub fn compile_transcription(b: &mut Builder, machine: &MooreMachine, positions: &[Vec<NodeId>]) -> Vec<Vec<NodeId>> {
    let n = positions.len();
    if n == 0 {
        return Vec::new();
    }
    let step = |s: u32, y: u32| machine.step(s as usize, y) as u32;
    let chain = forward_chain(b, vec![machine.start() as u32], &positions[..n - 1], n - 1, step);
    let lambda = machine.output_bits();
    let mut outputs = Vec::with_capacity(n);
    for (i, wires) in positions.iter().enumerate() {
        let family = &chain.families[i];
        let column = &chain.vectors[i];
        let bits = (0..lambda)
            .map(|j| {
                let shift = lambda - 1 - j;
                let row = readout_row(b, family, wires, |s, y| machine.output(s as usize, y) >> shift & 1 == 1);
                dot(b, &row, column)
            })
            .collect();
        outputs.push(bits);
    }
    outputs
}

/// Hazard-free circuit for the transcription of `n` symbols: `n * l` inputs and `n * lambda` outputs.
pub fn compile_moore(machine: &MooreMachine, n: usize) -> Result<Circuit> {
    if n == 0 {
        return Err(Error::InvalidParameters("transcription length must be at least 1".into()));
    }
    let l = machine.input_bits();
    let mut b = Builder::new(n * l);
    let positions: Vec<Vec<NodeId>> = (0..n).map(|i| (0..l).map(|j| b.input(i * l + j)).collect()).collect();
    let outs = compile_transcription(&mut b, machine, &positions);
    let flat: Vec<NodeId> = outs.into_iter().flatten().collect();
    Ok(b.finish(&flat))
}

fn check_preprocessing(m: &Fsm, delta: &[usize], sigma: &[usize], t: &MooreMachine, n: usize) -> Result<()> {
    if m.input_bits() != t.input_bits() {
        return Err(Error::Machine("preprocessing machine and transducer read different symbols".into()));
    }
    if delta.len() != m.num_states() || delta.iter().any(|&s| s >= t.num_states()) {
        return Err(Error::Machine("delta must map every preprocessing state to a transducer state".into()));
    }
    let mut seen = vec![false; n];
    if sigma.len() != n || sigma.iter().any(|&i| i >= n || std::mem::replace(&mut seen[i], true)) {
        return Err(Error::InvalidParameters(format!("sigma is not a permutation of {n} positions")));
    }
    Ok(())
}

/// The machine over `l + 1` bits that runs `m`, jumps through `delta` on the marker
/// `0^l 1` and then runs `t`. States of `m` come first and output zeros.
pub fn combined_machine(m: &Fsm, delta: &[usize], t: &MooreMachine) -> Result<MooreMachine> {
    check_preprocessing(m, delta, &[], t, 0)?;
    let l = t.input_bits();
    let sm = m.num_states();
    let states = sm + t.num_states();
    let width = 1usize << (l + 1);
    let mut trans = vec![vec![0usize; width]; states];
    let mut out = vec![vec![0u32; width]; states];
    for s in 0..states {
        for y in 0..width as u32 {
            let (x, marker) = (y >> 1, y & 1 == 1);
            trans[s][y as usize] = match (s < sm, marker) {
                (true, false) => m.step(s, x),
                (true, true) => sm + delta[s],
                (false, false) => sm + t.step(s - sm, x),
                (false, true) => s,
            };
            if s >= sm && !marker {
                out[s][y as usize] = t.output(s - sm, x);
            }
        }
    }
    let names = m
        .names()
        .iter()
        .map(|n| format!("pre:{n}"))
        .chain(t.names().iter().cloned())
        .collect();
    MooreMachine::new(
        names,
        m.start(),
        l + 1,
        t.output_bits(),
        (0..width as u32).collect(),
        trans,
        out,
        None,
    )
}

/// Circuit for `x -> tau_t(x)` started in `delta(m(x_sigma))`, built by compiling the
/// combined machine on `iota(x_sigma) | iota(x)` where `iota` appends a 0 bit. Only the
/// outputs of the last `n` positions are exposed. `sigma` is zero-based.
pub fn compile_with_preprocessing(
    m: &Fsm,
    delta: &[usize],
    sigma: &[usize],
    t: &MooreMachine,
    n: usize,
) -> Result<Circuit> {
    check_preprocessing(m, delta, sigma, t, n)?;
    if n == 0 {
        return Err(Error::InvalidParameters("transcription length must be at least 1".into()));
    }
    let combined = combined_machine(m, delta, t)?;
    let l = t.input_bits();
    let mut b = Builder::new(n * l);
    let symbol = |b: &mut Builder, i: usize| -> Vec<NodeId> {
        let mut w: Vec<NodeId> = (0..l).map(|j| b.input(i * l + j)).collect();
        w.push(b.zero());
        w
    };
    let mut positions: Vec<Vec<NodeId>> = sigma.iter().map(|&i| symbol(&mut b, i)).collect();
    let mut marker = vec![b.zero(); l];
    marker.push(b.one());
    positions.push(marker);
    for i in 0..n {
        positions.push(symbol(&mut b, i));
    }
    let outs = compile_transcription(&mut b, &combined, &positions);
    let flat: Vec<NodeId> = outs[n + 1..].iter().flatten().copied().collect();
    Ok(b.finish(&flat))
}

/// Boolean semantics of the preprocessed transcription.
pub fn preprocessed_transcription(m: &Fsm, delta: &[usize], sigma: &[usize], t: &MooreMachine, x: &[bool]) -> Vec<bool> {
    use super::machine::{symbol_from_bits, symbol_to_bits};
    let l = t.input_bits();
    let syms: Vec<u32> = x.chunks(l).map(symbol_from_bits).collect();
    let permuted: Vec<u32> = sigma.iter().map(|&i| syms[i]).collect();
    let mut s = delta[m.run(&permuted)];
    let mut out = Vec::with_capacity(syms.len() * t.output_bits());
    for &y in &syms {
        out.extend(symbol_to_bits(t.output(s, y), t.output_bits()));
        s = t.step(s, y);
    }
    out
}
