//! Parity kernels for sums of products of binomial coefficients mod 2,
//! run length transforms, residue rule systems, and the tooling used to
//! check that the three descriptions of a sequence agree.

pub mod oeis;
pub mod parity;
pub mod registry;
pub mod rulesys;
pub mod transform;
pub mod verifier;

pub use parity::{CoefficientVector, Natural, Oracle, Parity, ParityError};
pub use registry::{lookup, RegistryEntry};
pub use rulesys::{RuleError, RuleSystem};
pub use transform::{BaseSequence, LinearRecurrence, TransformError};
