//! Benchmark parameter grids.

/// Widths for the adder constructions.
pub const ADDER_WIDTHS: [usize; 3] = [64, 128, 256];

/// Rear lengths for the sorting adder at a fixed width.
pub const SORTING_REAR_LENGTHS: [usize; 3] = [2, 4, 8];

/// Transcription lengths for the toy machine.
pub const MOORE_LENGTHS: [usize; 3] = [16, 64, 256];
