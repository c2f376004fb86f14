//! Exact verification of binomial Fibonacci and Lucas summation identities.
//!
//! Every value lives in Q(sqrt5) ([`golden::GoldenNum`]); trigonometric
//! factors are replaced by real and imaginary parts of Gaussian powers
//! ([`gauss`]). Identities are written in a small language ([`dsl`]),
//! shipped as a catalog and checked over parameter grids ([`verify`]).

pub mod bench;
pub mod bigfib;
pub mod catalog;
pub mod cli;
pub mod dsl;
pub mod gauss;
pub mod golden;
pub mod verify;
