//! Exact arithmetic: rationals, sparse multivariate polynomials, truncated
//! `eps`-series, and univariate rational functions with Laurent residues.

pub mod poly;
pub mod ratfunc;
pub mod rational;
pub mod series;
pub mod univariate;

pub use poly::{Poly, Sym, Universe, Var};
pub use ratfunc::{Pole, RationalFunction1V};
pub use rational::{parse_rational, Rational};
pub use series::EpsExpansion;
pub use univariate::UniPoly;
