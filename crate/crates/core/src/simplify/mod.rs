//! Normal forms and the two-tier zero test.

mod atoms;
mod domain;
mod expand;
mod zero;

pub use atoms::{collect_atoms, Atom, AtomBasis, AtomError};
pub use domain::{Interval, SamplingDomain};
pub use expand::normalize;
pub use zero::{is_zero, is_zero_with, mix_seed, Witness, ZeroTestConfig, ZeroTestError, ZeroVerdict};
