//! Verification drivers, size and depth measurements and fits.

pub mod bench;
pub mod fit;
pub mod verify;

pub use bench::{bench_scaling, netlist_metrics, BenchRecord, BenchTable, Construction};
pub use verify::{
    verify_adder, verify_circuit, verify_machine, AdderSweep, Sweep, VerificationReport, EXHAUSTIVE_CAP,
};
