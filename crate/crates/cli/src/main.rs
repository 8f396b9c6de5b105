use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use hfsynth::adder::{AdderSpec, Variant};
use hfsynth::circuit::{from_netlist, to_netlist};
use hfsynth::codes::{check_gray, check_preserving, check_recoverable, CodeViolation};
use hfsynth::harness::{
    bench_scaling, verify_adder, verify_machine, AdderSweep, Construction, Sweep, VerificationReport,
};
use hfsynth::kleene::TritVec;
use hfsynth::transducer::{compile_moore, MooreMachine};
use hfsynth::{Circuit, CodeSpec};

#[derive(Parser)]
#[command(name = "hfsynth", version, about = "Hazard-free circuit synthesis and verification")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Worker threads for verification sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Seed for sampled sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Imprecision cap for contract-domain sweeps and code checks.
    #[arg(long, global = true)]
    budget: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Compile a Moore machine description into a transcription circuit.
    CompileMoore {
        #[arg(long)]
        machine: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build an adder circuit for the hybrid code.
    BuildAdder {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "prefix")]
        variant: Variant,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the code table as CSV or check a code property.
    Code {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, value_parser = ["preserving", "recoverable", "gray"])]
        check: Option<String>,
    },
    /// Evaluate a circuit on a ternary input.
    Eval {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        input: String,
    },
    /// Check a transcription circuit against its machine.
    Verify {
        #[arg(long)]
        circuit: PathBuf,
        #[arg(long)]
        machine: PathBuf,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Check an adder circuit on the recoverable addition contract and on stable inputs.
    VerifyAdder {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value = "prefix")]
        variant: Variant,
        /// Check a stored netlist instead of a freshly built circuit.
        #[arg(long)]
        circuit: Option<PathBuf>,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Measure size and depth over a grid of widths, as CSV.
    Bench {
        /// prefix:K, sorting:K or toy.
        #[arg(long)]
        construction: Construction,
        /// Comma-separated widths.
        #[arg(long, value_delimiter = ',', required = true)]
        grid: Vec<usize>,
        /// Stop after this many seconds, flagging the table as partial.
        #[arg(long)]
        time_limit: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
#[group(multiple = false)]
struct SweepArgs {
    #[arg(long)]
    exhaustive: bool,
    #[arg(long)]
    samples: Option<usize>,
}

enum Failure {
    Usage(String),
    Check(String),
}

impl<E: std::fmt::Display> From<E> for Failure {
    fn from(e: E) -> Failure {
        Failure::Usage(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check(msg)) => {
            println!("{msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Outcome {
    let g = &cli.global;
    match cli.command {
        Command::CompileMoore { machine, n, out } => {
            let m = read_machine(&machine)?;
            emit_circuit(&compile_moore(&m, n)?, out.as_deref())
        }
        Command::BuildAdder { n, k, variant, out } => {
            emit_circuit(&AdderSpec::new(n, k, variant)?.build()?, out.as_deref())
        }
        Command::Code { n, k, check } => code(n, k, check.as_deref(), g.budget),
        Command::Eval { circuit, input } => {
            let c = read_circuit(&circuit)?;
            let x: TritVec = input.parse()?;
            println!("{}", c.evaluate(&x)?);
            Ok(())
        }
        Command::Verify { circuit, machine, sweep } => {
            let c = read_circuit(&circuit)?;
            let m = read_machine(&machine)?;
            let sweep = match sweep.samples {
                Some(samples) => Sweep::Sampled { samples, seed: g.seed },
                None => Sweep::Exhaustive,
            };
            report(verify_machine(&c, &m, sweep, g.jobs)?)
        }
        Command::VerifyAdder {
            n,
            k,
            variant,
            circuit,
            sweep,
        } => {
            let spec = AdderSpec::new(n, k, variant)?;
            let c = match circuit {
                Some(path) => read_circuit(&path)?,
                None => spec.build()?,
            };
            let sweep = match sweep.samples {
                Some(samples) => AdderSweep::Sampled { samples, seed: g.seed },
                None => AdderSweep::Exhaustive,
            };
            let budget = g.budget.unwrap_or((k as u64).div_ceil(2));
            report(verify_adder(&c, &spec, sweep, budget, g.jobs)?)
        }
        Command::Bench {
            construction,
            grid,
            time_limit,
            out,
        } => {
            let table = bench_scaling(&construction, &grid, time_limit.map(Duration::from_secs_f64))?;
            write_output(table.to_csv().as_bytes(), out.as_deref())?;
            if table.truncated {
                eprintln!("time limit reached after {} of {} widths", table.records.len(), grid.len());
            }
            Ok(())
        }
    }
}

fn read_circuit(path: &Path) -> Result<Circuit, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Ok(from_netlist(&bytes)?)
}

fn read_machine(path: &Path) -> Result<MooreMachine, Failure> {
    let bytes = fs::read(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?;
    Ok(MooreMachine::from_json(&bytes)?)
}

fn write_output(bytes: &[u8], out: Option<&Path>) -> Outcome {
    match out {
        Some(path) => fs::write(path, bytes).map_err(|e| Failure::Usage(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            if !bytes.ends_with(b"\n") {
                stdout.write_all(b"\n")?;
            }
            Ok(())
        }
    }
}

fn emit_circuit(c: &Circuit, out: Option<&Path>) -> Outcome {
    write_output(&to_netlist(c), out)?;
    if out.is_some() {
        eprintln!("{c}");
    }
    Ok(())
}

fn report(r: VerificationReport) -> Outcome {
    if r.passed() {
        println!("{r}");
        Ok(())
    } else {
        Err(Failure::Check(r.to_string()))
    }
}

fn code(n: usize, k: usize, check: Option<&str>, budget: Option<u64>) -> Outcome {
    let spec = CodeSpec::new(n, k)?;
    let words = spec.codewords();
    let bits = |w: &[bool]| w.iter().map(|&b| if b { '1' } else { '0' }).collect::<String>();
    let violation = |what: &str, v: CodeViolation| {
        let decoded = v.decoded.map(|d| format!(", decodes to {d}")).unwrap_or_default();
        Failure::Check(format!(
            "{what} violated: range <{},{}> word {} resolution {}{decoded}",
            v.start,
            v.start + v.imprecision,
            v.word,
            bits(&v.resolution)
        ))
    };
    match check {
        None => {
            let m = spec.front_len();
            println!("i,front,rear,codeword");
            for (i, w) in words.iter().enumerate() {
                println!("{i},{},{},{}", bits(&w[..m]), bits(&w[m..]), bits(w));
            }
            Ok(())
        }
        Some("preserving") => {
            let p = budget.unwrap_or(k as u64);
            check_preserving(&words, p).map_err(|v| violation("preservation", v))?;
            println!("pass: gamma_{{{n},{k}}} is {p}-preserving");
            Ok(())
        }
        Some("recoverable") => {
            let p = budget.unwrap_or((k as u64).div_ceil(2));
            check_recoverable(&words, |w: &[bool]| spec.decode_extended(w), p)
                .map_err(|v| violation("recoverability", v))?;
            println!("pass: gamma_{{{n},{k}}} is {p}-recoverable");
            Ok(())
        }
        Some(_) => {
            check_gray(&words).map_err(|i| {
                let next = (i + 1) % spec.m;
                Failure::Check(format!(
                    "gray property violated: codewords {i} ({}) and {next} ({})",
                    bits(&words[i as usize]),
                    bits(&words[next as usize])
                ))
            })?;
            println!("pass: consecutive codewords of gamma_{{{n},{k}}} differ in one bit");
            Ok(())
        }
    }
}
