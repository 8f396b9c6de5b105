//! Verification drivers: ternary input domains, sharded evaluation against oracles and
//! reports with reproducible witnesses.

use std::fmt;
use std::time::{Duration, Instant};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::adder::{adder_input, contract_pairs, deinterleave, recoverable_sum_oracle, AdderSpec};
use crate::circuit::{all_ternary, compare_outputs, BatchEvaluator, Circuit, Finding, FindingKind};
use crate::error::{Error, Result};
use crate::kleene::{Trit, TritVec};
use crate::transducer::MooreMachine;

/// Largest exhaustive ternary sweep run without sampling.
pub const EXHAUSTIVE_CAP: usize = 531_441;

/// Witnesses kept in a report; counts always cover every finding.
pub const WITNESS_LIMIT: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sweep {
    Exhaustive,
    Sampled { samples: usize, seed: u64 },
}

#[derive(Clone, Debug)]
pub struct VerificationReport {
    pub domain: String,
    pub seed: Option<u64>,
    pub checked: usize,
    pub hazards: usize,
    pub functional_errors: usize,
    pub witnesses: Vec<Finding>,
    pub elapsed: Duration,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.hazards == 0 && self.functional_errors == 0
    }

    fn from_findings(domain: String, seed: Option<u64>, checked: usize, mut findings: Vec<Finding>, elapsed: Duration) -> Self {
        findings.sort();
        let hazards = findings.iter().filter(|f| f.kind == FindingKind::Hazard).count();
        let functional_errors = findings.len() - hazards;
        findings.truncate(WITNESS_LIMIT);
        VerificationReport {
            domain,
            seed,
            checked,
            hazards,
            functional_errors,
            witnesses: findings,
            elapsed,
        }
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} on {}",
            if self.passed() { "pass" } else { "FAIL" },
            self.checked,
            self.domain
        )?;
        if let Some(seed) = self.seed {
            write!(f, " (seed {seed})")?;
        }
        write!(
            f,
            ", hazards {}, functional errors {}, {:.2}s",
            self.hazards,
            self.functional_errors,
            self.elapsed.as_secs_f64()
        )?;
        for w in &self.witnesses {
            write!(f, "\n  input {} output {} expected {} got {}", w.input, w.output, w.expected, w.got)?;
        }
        Ok(())
    }
}

/// A uniformly random ternary string.
pub fn random_ternary<R: Rng>(rng: &mut R, width: usize) -> TritVec {
    TritVec(
        (0..width)
            .map(|_| match rng.gen_range(0..3) {
                0 => Trit::Zero,
                1 => Trit::U,
                _ => Trit::One,
            })
            .collect(),
    )
}

/// Inputs of a sweep: every ternary string up to [`EXHAUSTIVE_CAP`], or seeded samples.
pub fn ternary_inputs(width: usize, sweep: Sweep) -> Result<Vec<TritVec>> {
    match sweep {
        Sweep::Exhaustive => {
            let count = 3f64.powi(width as i32);
            if count > EXHAUSTIVE_CAP as f64 {
                return Err(Error::TooLarge(format!(
                    "3^{width} inputs exceed the exhaustive cap of {EXHAUSTIVE_CAP}; use sampling"
                )));
            }
            Ok(all_ternary(width))
        }
        Sweep::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            Ok((0..samples).map(|_| random_ternary(&mut rng, width)).collect())
        }
    }
}

fn shard_count(jobs: usize, items: usize) -> usize {
    jobs.max(1).min(items.div_ceil(64).max(1))
}

/// Evaluates `c` on every input and compares each output with `oracle`, spreading the
/// inputs over `jobs` worker threads.
pub fn check_against<F>(c: &Circuit, inputs: &[TritVec], oracle: F, jobs: usize) -> Result<(usize, Vec<Finding>)>
where
    F: Fn(&TritVec) -> TritVec + Sync,
{
    if let Some(x) = inputs.iter().find(|x| x.len() != c.input_count()) {
        return Err(Error::LengthMismatch {
            expected: c.input_count(),
            got: x.len(),
        });
    }
    let shards = shard_count(jobs, inputs.len());
    let per = inputs.len().div_ceil(shards).max(1);
    let run = |part: &[TritVec]| -> Result<Vec<Finding>> {
        let mut eval = BatchEvaluator::new(c);
        let mut findings = Vec::new();
        for chunk in part.chunks(64) {
            for (x, got) in chunk.iter().zip(eval.run(chunk)) {
                let expected = oracle(x);
                if expected.len() != got.len() {
                    return Err(Error::WidthMismatch {
                        expected: expected.len(),
                        got: got.len(),
                    });
                }
                compare_outputs(x, &expected, &got, &mut findings);
            }
        }
        Ok(findings)
    };
    let results: Vec<Result<Vec<Finding>>> = if shards == 1 {
        vec![run(inputs)]
    } else {
        std::thread::scope(|s| {
            let handles: Vec<_> = inputs.chunks(per).map(|part| s.spawn(move || run(part))).collect();
            handles.into_iter().map(|h| h.join().expect("verification worker")).collect()
        })
    };
    let mut findings = Vec::new();
    for r in results {
        findings.extend(r?);
    }
    Ok((inputs.len(), findings))
}

/// Checks `c` against `oracle` on the inputs of `sweep`.
pub fn verify_circuit<F>(c: &Circuit, sweep: Sweep, oracle: F, jobs: usize, what: &str) -> Result<VerificationReport>
where
    F: Fn(&TritVec) -> TritVec + Sync,
{
    let start = Instant::now();
    let inputs = ternary_inputs(c.input_count(), sweep)?;
    let (checked, findings) = check_against(c, &inputs, oracle, jobs)?;
    let (domain, seed) = match sweep {
        Sweep::Exhaustive => (format!("all ternary inputs of width {} ({what})", c.input_count()), None),
        Sweep::Sampled { samples, seed } => (
            format!("{samples} sampled ternary inputs of width {} ({what})", c.input_count()),
            Some(seed),
        ),
    };
    Ok(VerificationReport::from_findings(domain, seed, checked, findings, start.elapsed()))
}

/// Checks a transcription circuit of `machine` against the hazard-free transcription.
pub fn verify_machine(c: &Circuit, machine: &MooreMachine, sweep: Sweep, jobs: usize) -> Result<VerificationReport> {
    let l = machine.input_bits();
    if l == 0 || c.input_count() % l != 0 || c.output_count() != c.input_count() / l * machine.output_bits() {
        return Err(Error::WidthMismatch {
            expected: c.input_count() / l.max(1) * machine.output_bits(),
            got: c.output_count(),
        });
    }
    verify_circuit(c, sweep, |x| machine.transcribe_set_oracle(x), jobs, "transcription")
}

/// Operand domains of an adder check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AdderSweep {
    /// Every pair of extended codewords within the budget and every stable operand pair.
    Exhaustive,
    /// Seeded samples of both kinds.
    Sampled { samples: usize, seed: u64 },
}

/// Inputs of an adder check: extended codeword pairs with `p_x + p_y <= budget` and stable
/// operand pairs.
pub fn adder_inputs(spec: &AdderSpec, sweep: AdderSweep, budget: u64) -> Result<(Vec<TritVec>, Vec<TritVec>)> {
    let code = spec.code()?;
    let n = spec.n;
    if budget >= code.m {
        return Err(Error::InvalidParameters(format!("budget {budget} must be below the modulus {}", code.m)));
    }
    match sweep {
        AdderSweep::Exhaustive => {
            let pairs = (budget + 1) * (budget + 2) / 2 * code.m * code.m;
            let stable = 1u128 << (2 * n).min(127);
            if pairs > EXHAUSTIVE_CAP as u64 || stable > EXHAUSTIVE_CAP as u128 {
                return Err(Error::TooLarge(format!(
                    "adder sweep for n={n} exceeds the exhaustive cap of {EXHAUSTIVE_CAP}; use sampling"
                )));
            }
            let contract = contract_pairs(&code, budget).iter().map(|(x, y, _)| adder_input(x, y)).collect();
            let stable = (0..1u64 << (2 * n))
                .map(|v| TritVec((0..2 * n).map(|i| Trit::from_bool(v >> (2 * n - 1 - i) & 1 == 1)).collect()))
                .collect();
            Ok((contract, stable))
        }
        AdderSweep::Sampled { samples, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut contract = Vec::with_capacity(samples);
            let mut stable = Vec::with_capacity(samples);
            for _ in 0..samples {
                let px = rng.gen_range(0..=budget);
                let py = rng.gen_range(0..=budget - px);
                let x = code.extended_codeword(rng.gen_range(0..code.m), px)?.word;
                let y = code.extended_codeword(rng.gen_range(0..code.m), py)?.word;
                contract.push(adder_input(&x, &y));
                stable.push(TritVec((0..2 * n).map(|_| Trit::from_bool(rng.gen())).collect()));
            }
            Ok((contract, stable))
        }
    }
}

/// Checks an adder circuit: extended codeword pairs within `budget` against the
/// recoverable sum oracle and stable operand pairs against the stable function.
pub fn verify_adder(c: &Circuit, spec: &AdderSpec, sweep: AdderSweep, budget: u64, jobs: usize) -> Result<VerificationReport> {
    let start = Instant::now();
    let code = spec.code()?;
    if c.input_count() != 2 * spec.n || c.output_count() != spec.n {
        return Err(Error::WidthMismatch {
            expected: 2 * spec.n,
            got: c.input_count(),
        });
    }
    let (contract, stable) = adder_inputs(spec, sweep, budget)?;
    let (checked_a, mut findings) = check_against(
        c,
        &contract,
        |x| {
            let (a, b) = deinterleave(x);
            recoverable_sum_oracle(&code, &TritVec(a), &TritVec(b))
        },
        jobs,
    )?;
    let (checked_b, more) = check_against(
        c,
        &stable,
        |x| {
            let (a, b) = deinterleave(&x.to_bools().expect("stable input"));
            TritVec::from_bools(&spec.stable_function(&a, &b).expect("code fits"))
        },
        jobs,
    )?;
    findings.extend(more);
    let what = match sweep {
        AdderSweep::Exhaustive => "all",
        AdderSweep::Sampled { .. } => "sampled",
    };
    let domain = format!(
        "{} adder n={} k={}: {what} extended codeword pairs with p_x+p_y<={budget} and stable pairs",
        spec.variant, spec.n, spec.k
    );
    let seed = match sweep {
        AdderSweep::Exhaustive => None,
        AdderSweep::Sampled { seed, .. } => Some(seed),
    };
    Ok(VerificationReport::from_findings(domain, seed, checked_a + checked_b, findings, start.elapsed()))
}
