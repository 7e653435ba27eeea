//! Certificates and counterexamples for minimax duality over probability
//! simplices, infsup-convexity, and Fritz John / KKT multipliers of
//! sample-discretized (semi-)infinite programs.
//!
//! Every verdict is sample-restricted: a convexity witness found on the sample
//! is a genuine witness for the full problem, while a multiplier certificate
//! only guarantees its inequalities at the sampled points.

pub mod cli;
pub mod instance;
pub mod konig;
pub mod lp;
pub mod multipliers;
pub mod scalar;

pub use instance::{Matrix, ProgramInstance, SimplexVector};
pub use scalar::{Rational, Scalar, ScalarMode};
