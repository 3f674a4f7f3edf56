//! Machine-to-algebra workbench.
//!
//! Minsky and Turing machine models, the machine transformations used to
//! make them sym-universally halting, the semigroup `S(M)` and the solvable
//! group `G(M)` simulating a Minsky machine, word-problem deciders for both,
//! finite-quotient separation certificates, and Mikhailova-style equalizer
//! experiments.

pub mod bundle;
pub mod cli;
pub mod equalizer;
pub mod group;
pub mod machines;
pub mod rewriting;
pub mod semigroup;
pub mod transforms;

use serde::{Deserialize, Serialize};

/// Three-valued answer used by every bounded decision procedure.
///
/// `Unknown` means a budget ran out before the question was settled; it is
/// never silently turned into `No`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tri {
    Yes,
    No,
    Unknown,
}

impl Tri {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Tri::Yes
        } else {
            Tri::No
        }
    }

    pub fn is_definite(self) -> bool {
        self != Tri::Unknown
    }
}

impl std::fmt::Display for Tri {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Tri::Yes => "Yes",
            Tri::No => "No",
            Tri::Unknown => "Unknown",
        };
        f.write_str(s)
    }
}
