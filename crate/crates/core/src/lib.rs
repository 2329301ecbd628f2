//! Exact fusion coefficients for classical Lie algebras and the random walks
//! they drive on level-k alcoves.

pub mod alcove_markov;
pub mod charlib;
pub mod error;
pub mod fusion;
pub mod rational;
pub mod rootsys;
pub mod scaling;
pub mod snf;
pub mod walks;
pub mod weight;

pub use error::{Error, Result};
pub use rootsys::{Family, RootSystem};
pub use weight::Weight;
