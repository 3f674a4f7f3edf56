//! Machine-to-machine compilers.

mod augment;
mod minsky3;
mod onetape;
mod symuniv;

use std::collections::HashSet;

pub use augment::{augment_for_depth, Augmented};
pub use minsky3::{base3, base3_rev, tm_to_minsky3, Minsky3};
pub use onetape::{to_one_tape, OneTape};
pub use symuniv::{to_sym_universal, SymUniversal};

use crate::machines::{MachineError, Result, TuringMachine};

/// All symbol names (letters and states) used by a Turing machine.
pub(crate) fn taken_names(tm: &TuringMachine) -> HashSet<String> {
    tm.tapes.iter().flat_map(|t| t.alphabet.iter().chain(&t.states).cloned()).collect()
}

/// `base`, or `base'`, `base''`, ... whichever is not yet taken; reserves it.
pub(crate) fn fresh(base: &str, taken: &mut HashSet<String>) -> String {
    let mut name = base.to_string();
    while taken.contains(&name) {
        name.push('\'');
    }
    taken.insert(name.clone());
    name
}

pub(crate) fn require_deterministic(tm: &TuringMachine) -> Result<()> {
    let report = tm.validate()?;
    if !report.deterministic {
        return Err(MachineError::Nondeterministic(report.violations.join("; ")));
    }
    Ok(())
}
