//! Exact decision procedure for positivity of integral homogeneous forms on
//! the standard simplex.
//!
//! The engine substitutes a form through products of weighted-difference
//! substitution matrices (column-stochastic matrices of the shape `P * T_n`
//! for a permutation matrix `P`), which corresponds to restricting the form
//! to the cells of repeated barycentric subdivision of the simplex. Sign
//! patterns of the substituted coefficients then decide positivity:
//!
//! * every cell form has complete monomials with positive coefficients:
//!   the input is positive definite on the simplex;
//! * some cell form has a negative pure-power coefficient: the value of the
//!   input at that cell vertex is negative, an exact counterexample;
//! * every cell form has nonnegative coefficients: the input is positive
//!   semidefinite on the simplex.
//!
//! All arithmetic is exact (arbitrary-precision integers and rationals), so
//! every verdict comes with a replayable certificate or an exact rational
//! witness. The [`bounds`] module evaluates the step-count bounds after
//! which the substitution process is guaranteed to terminate for integral
//! forms, exactly; the [`oracle`] module provides an independent grid
//! minimizer used to cross-check verdicts.

pub mod bounds;
pub mod form;
pub mod oracle;
pub mod rng;
pub mod search;
pub mod util;
pub mod wds;

pub use form::{Form, FormError, SignCategory, SignSummary, SimplexPoint};
pub use search::{classify, SearchConfig, Verdict};
