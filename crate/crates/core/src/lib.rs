//! Exact evaluation of incomplete character-exponential sums
//! `sum_{n in I} chi(f(n)) e(g(n)/q)` and certified explicit upper bounds for
//! them over smooth moduli.
//!
//! The bound chain runs: root counting modulo prime powers, the Postnikov
//! expansion of characters modulo `p^m`, complete-sum bounds, differencing of
//! `f` and `g`, van der Corput iteration and finally the modulus splitting
//! pipeline. Every numeric bound carries a trace of the inequalities used.

pub mod certificate;
pub mod characters;
pub mod complete_sums;
pub mod congruence;
pub mod differencing;
pub mod error;
pub mod ffield;
pub mod modarith;
pub mod parse;
pub mod periodic;
pub mod pipeline;
pub mod poly;
pub mod postnikov;
pub mod ratfun;
pub mod verify;

pub use error::{Error, Result};
pub use ratfun::RationalFunction;
