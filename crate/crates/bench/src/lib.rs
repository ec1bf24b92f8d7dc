//! Shared inputs for the pipeline benchmarks.

pub use tmcf;

/// Tower indices whose pair integers grow doubly exponentially; index 10
/// already evaluates polynomials on ~18k-bit integers.
pub const TOWER_STEPS: [u32; 4] = [4, 6, 8, 10];
