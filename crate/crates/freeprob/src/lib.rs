//! Numerical free probability: analytic transforms of measures on the real
//! line, exact free-cumulant calculus, free Levy-Khintchine data, and
//! grid-based certification of free infinite divisibility and free
//! selfdecomposability.
//!
//! Modules:
//!
//! * [`measures`] -- measure representations and the distribution catalog
//! * [`transforms`] -- G, F, F^{-1}, phi, C, C' and Stieltjes inversion
//! * [`cumulants`] -- exact moment/cumulant conversion, the non-crossing
//!   partition oracle, Hankel positivity
//! * [`levy`] -- triplets, generating pairs, Nevanlinna pairs, k-functions
//! * [`checkers`] -- half-plane grid verdicts and Nevanlinna extraction
//! * [`awk`] -- the Askey-Wimp-Kerov family and Riccati continuation
//! * [`cli`] -- the `freeprob` command-line front end

// Parameter guards use !(x > 0.0)-style comparisons on purpose: they also
// reject NaN inputs, which x <= 0.0 would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod awk;
pub mod checkers;
pub mod cli;
pub mod cumulants;
pub mod error;
pub mod levy;
pub mod measures;
pub mod quad;
pub mod rat;
pub mod report;
pub mod special;
pub mod transforms;
