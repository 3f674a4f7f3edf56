//! The group G(M) of a Minsky machine and the concrete model of its normal
//! subgroup T.
//!
//! T is modelled by the exponent-p vector space with basis `z_{i,u}`,
//! `i` in `{1,2,3}^K` and `u` an index word, on which every `a`- and
//! `A`-letter acts by an explicit automorphism. Elements of the form
//! `x_{q_i A_0} * a_1^(m_1) * ... * A_K^(α_K)` are computed in this model,
//! where they are equal exactly when the corresponding words of S(M) are.

mod model;
mod presentation;
mod quotient;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::machines::MachineError;
use crate::rewriting::RewriteError;
use crate::semigroup::SemigroupError;

pub use model::{equal_elements, Basis, IndexWord, Model, TElement, DEFAULT_TRAJECTORY_BOUND};
pub use presentation::{build_group_presentation, GroupPresentationData, Tag, XWord};
pub use quotient::{separate_element, t_quotient, IdealSpec, TCertificate, TQuotientDescriptor};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error(transparent)]
    Semigroup(#[from] SemigroupError),
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
    #[error("`{0}` is not an argument of *")]
    NotStarLetter(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("undecided within the budget: {0}")]
    Unresolved(String),
    #[error("the element is the identity")]
    Identity,
    #[error("span is not closed: {0}")]
    NotClosed(String),
}

pub type Result<T> = std::result::Result<T, GroupError>;

/// A letter of `L1 ∪ L2`. Glass indices are 1-based; `Cap(0)` is `A_0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GLetter {
    Cap(usize),
    A(usize),
    APrime(usize),
    Tilde(usize),
    TildePrime(usize),
}

impl GLetter {
    pub fn glass(self) -> usize {
        match self {
            GLetter::Cap(j) | GLetter::A(j) | GLetter::APrime(j) | GLetter::Tilde(j) | GLetter::TildePrime(j) => j,
        }
    }
}

impl fmt::Display for GLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GLetter::Cap(j) => write!(f, "A{}", j),
            GLetter::A(j) => write!(f, "a{}", j),
            GLetter::APrime(j) => write!(f, "a{}'", j),
            GLetter::Tilde(j) => write!(f, "ta{}", j),
            GLetter::TildePrime(j) => write!(f, "ta{}'", j),
        }
    }
}

impl FromStr for GLetter {
    type Err = GroupError;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || GroupError::UnknownLetter(s.to_string());
        let (body, primed) = match s.strip_suffix('\'') {
            Some(b) => (b, true),
            None => (s, false),
        };
        let (make, digits): (fn(usize) -> GLetter, &str) = if let Some(d) = body.strip_prefix("ta") {
            (if primed { GLetter::TildePrime } else { GLetter::Tilde }, d)
        } else if let Some(d) = body.strip_prefix('a') {
            (if primed { GLetter::APrime } else { GLetter::A }, d)
        } else if let Some(d) = body.strip_prefix('A') {
            if primed {
                return Err(bad());
            }
            (GLetter::Cap, d)
        } else {
            return Err(bad());
        };
        digits.parse().map(make).map_err(|_| bad())
    }
}

pub fn is_prime(p: u32) -> bool {
    let p = p as u64;
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}
