//! Exact symbolic verification of causal circuits that solve Fourier
//! promise problems: given black boxes `U_0 … U_{n−1}` with
//! `Π_x = ω^{x·y} Π_0` for every labeled permutation product, find `y`.
//!
//! Phases are tracked as integer exponents of `ω = e^{2πi/n!}` with `y`
//! symbolic; [`densesim`] offers a floating-point cross-check for `n ≤ 3`.

pub mod algorithms;
pub mod circuit;
pub mod commutation;
pub mod densesim;
pub mod numsys;
pub mod perms;

pub use algorithms::{verify_and_solve, PhaseProfile, Protocol, VerificationReport};
pub use circuit::{Circuit, WireOutcome};
pub use commutation::{CommutationTable, PhaseExp};
pub use perms::{Labeling, PermWord};
