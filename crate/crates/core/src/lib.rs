//! Subspace-restricted QAOA+ simulation for a single linear equality
//! constraint `Σ s_i z_i = b` with sequential coefficients `s_i ∈ {1..k}`.

pub mod bits;
pub mod case_study;
pub mod circuit;
pub mod error;
pub mod mixers;
pub mod optimize;
pub mod problem;
pub mod schedules;
pub mod sim;
pub mod spectral;
pub mod verify;

pub use bits::Bitstring;
pub use error::{Error, Result};
pub use mixers::{MergeOperator, MixingFamily, PauliAxis, PauliTerm, Provenance};
pub use problem::{FeasibleBasis, KappaIndex, ProblemInstance};
pub use schedules::{ChebyshevSchedule, Schedule};
pub use sim::{AngleSet, MixerMode, QaoaSimulator, SubspaceOperator, SubspaceState};
pub use verify::{verify_family, VerificationReport};
