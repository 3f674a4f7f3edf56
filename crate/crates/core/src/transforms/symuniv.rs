// History-tape construction.
//
// The output has the source tapes plus a history tape whose letters are
// `[θ]` for source commands θ. History states:
//   main   - ready for the next source command
//   back   - replaying the history right-to-left with inverse commands
//   fwd    - replaying the history left-to-right
//   erase  - source accepted, deleting the history letter by letter
//   stop   - done
// After every main command the machine walks back to an input
// configuration and forward again; if the walk back does not end in an
// input configuration, it is stuck.

use std::collections::BTreeSet;

use serde::Serialize;

use super::{fresh, require_deterministic, taken_names};
use crate::machines::{
    Clause, MachineError, Result, Side, TapeConfig, TapeSpec, TmCommand, TmConfig, TuringMachine,
};

#[derive(Debug, Clone, Serialize)]
pub struct SymUniversal {
    pub machine: TuringMachine,
    /// Index of the history tape (the last tape).
    pub history_tape: usize,
}

impl SymUniversal {
    /// Source configuration with an empty history tape in the main state.
    pub fn lift(&self, c: &TmConfig) -> TmConfig {
        let mut tapes = c.tapes.clone();
        tapes.push(TapeConfig::new(&[], self.machine.tapes[self.history_tape].start, &[]));
        TmConfig { tapes }
    }

    /// Forget the history tape.
    pub fn project(&self, c: &TmConfig) -> TmConfig {
        TmConfig { tapes: c.tapes[..self.history_tape].to_vec() }
    }
}

const MAIN: u16 = 0;
const BACK: u16 = 1;
const FWD: u16 = 2;
const ERASE: u16 = 3;
const STOP: u16 = 4;

pub fn to_sym_universal(tm: &TuringMachine) -> Result<SymUniversal> {
    require_deterministic(tm)?;
    let k = tm.tape_count();
    let mut taken = taken_names(tm);
    let letters: Vec<String> = (0..tm.commands.len()).map(|i| fresh(&format!("[t{}]", i), &mut taken)).collect();
    let states: Vec<String> = ["h.main", "h.back", "h.fwd", "h.erase", "h.stop"].iter().map(|s| fresh(s, &mut taken)).collect();
    let mut tapes = tm.tapes.clone();
    tapes.push(TapeSpec {
        alphabet: letters,
        states,
        start: MAIN,
        stop: STOP,
    });

    let h = |l: Side, q: u16, r: Side, l2: Side, q2: u16, r2: Side| Clause::new(l, q, r, l2, q2, r2);
    let with_h = |main: &[Clause], hist: Clause| {
        let mut clauses = main.to_vec();
        clauses.push(hist);
        TmCommand { clauses }
    };
    let input_guard: Vec<Clause> = tm
        .tapes
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let left = if i == 0 { Side::Absent } else { Side::Marker };
            Clause::new(left, t.start, Side::Marker, left, t.start, Side::Marker)
        })
        .collect();
    let accept_guard: Vec<Clause> = tm
        .tapes
        .iter()
        .map(|t| Clause::new(Side::Marker, t.stop, Side::Marker, Side::Marker, t.stop, Side::Marker))
        .collect();

    let mut commands = Vec::new();
    for (i, theta) in tm.commands.iter().enumerate() {
        let letter = Side::Letter(i as u16);
        let inv = theta.inverse();
        commands.push(with_h(&theta.clauses, h(Side::Absent, MAIN, Side::Marker, letter, BACK, Side::Marker)));
        commands.push(with_h(&inv.clauses, h(letter, BACK, Side::Absent, Side::Absent, BACK, letter)));
        commands.push(with_h(&theta.clauses, h(Side::Absent, FWD, letter, letter, FWD, Side::Absent)));
        commands.push(with_h(&accept_guard, h(letter, ERASE, Side::Marker, Side::Absent, ERASE, Side::Marker)));
    }
    commands.push(with_h(&input_guard, h(Side::Marker, BACK, Side::Absent, Side::Marker, FWD, Side::Absent)));

    // The forward replay ends in the state tuple of the last replayed
    // command, or in the start tuple when the history is empty.
    let mut tuples: BTreeSet<Vec<u16>> = tm.commands.iter().map(|c| c.clauses.iter().map(|cl| cl.new_state).collect()).collect();
    tuples.insert(tm.tapes.iter().map(|t| t.start).collect());
    for t in tuples {
        let keep: Vec<Clause> = t.iter().map(|&q| Clause::keep(q)).collect();
        commands.push(with_h(&keep, h(Side::Absent, FWD, Side::Marker, Side::Absent, MAIN, Side::Marker)));
    }
    commands.push(with_h(&accept_guard, h(Side::Absent, MAIN, Side::Marker, Side::Absent, ERASE, Side::Marker)));
    commands.push(with_h(&accept_guard, h(Side::Marker, ERASE, Side::Marker, Side::Marker, STOP, Side::Marker)));

    let machine = TuringMachine::new(tapes, commands)?;
    let report = machine.validate()?;
    if !report.deterministic {
        return Err(MachineError::Unsupported(format!(
            "source has a command applicable to its accept configuration: {}",
            report.violations.join("; ")
        )));
    }
    Ok(SymUniversal { machine, history_tape: k })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::turing::TM_PARITY;
    use crate::machines::{run, Machine};

    #[test]
    fn parity_preserved() {
        let src = TuringMachine::parse(TM_PARITY).unwrap();
        let out = to_sym_universal(&src).unwrap();
        for n in 0..7 {
            let a = run(&src, &src.unary_input(n), 1000).unwrap().accepted();
            let b = run(&out.machine, &out.machine.unary_input(n), 10_000).unwrap().accepted();
            assert_eq!(a, b, "n={}", n);
            assert!(out.machine.is_accepting(&out.machine.unary_input(0)) == false);
        }
        assert_eq!(out.lift(&src.unary_input(3)), out.machine.unary_input(3));
    }
}
