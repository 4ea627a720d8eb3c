//! Exact-arithmetic toolkit for ternary quadratic forms over the rationals.
//!
//! The crate decides whether a nonzero rational number N is represented by a
//! diagonal form a*x^2 + b*y^2 + c*z^2 with rational coefficients, using only
//! integer and rational arithmetic: squarefree normalization, a two-adic
//! residue classification, Legendre-symbol conditions at odd primes, and
//! Hensel-style lifting.  On top of the decision procedure it enumerates
//! excluded congruence classes, searches for explicit rational witnesses,
//! constructs integer witnesses for universal indefinite forms, and carries
//! an intentionally naive oracle layer for cross-checking every claim.
//!
//! Modules, bottom up:
//!
//! * [`arith`]   - big-integer/rational primitives: factorization, squarefree
//!   splitting, Legendre/Jacobi symbols, modular square roots, CRT.
//! * [`forms`]   - general and diagonal ternary forms, diagonalization by
//!   completion of squares, squarefree pairwise-coprime normalization.
//! * [`local`]   - solvability of the congruence f = n modulo prime powers:
//!   classification, obstruction enumeration, lifting.
//! * [`decide`]  - the global decision procedure, excluded progressions,
//!   integer universality, witness construction.
//! * [`oracle`]  - brute-force enumeration used to cross-check the above.
//! * [`cli`]     - the `ternaryq` command-line interface (JSON output).

pub mod arith;
pub mod cli;
pub mod decide;
pub mod error;
pub mod forms;
pub mod local;
pub mod oracle;

pub use arith::{Int, Rat};
pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
