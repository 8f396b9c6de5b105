//! Moore machines, universal matrix encodings and the hazard-free transcription compiler.

pub mod chain;
pub mod compile;
pub mod machine;
pub mod universal;

pub use compile::{combined_machine, compile_moore, compile_transcription, compile_with_preprocessing, preprocessed_transcription};
pub use machine::{symbol_from_bits, symbol_resolutions, symbol_to_bits, symbol_to_string, toy_machine, Fsm, MooreMachine};
pub use universal::{encode_universal, kleene_matmul, symbol_matrix};
