//! Hazard-free circuit synthesis under Kleene three-valued logic.

pub mod circuit;
pub mod adder;
pub mod codes;
pub mod error;
pub mod harness;
pub mod kleene;
pub mod transducer;

pub use circuit::{Circuit, Gate, NodeId};
pub use codes::CodeSpec;
pub use error::{Error, Result};
pub use kleene::{Trit, TritVec};
