// One-tape Turing machine over {1,2} to a 3-glass Minsky machine.
//
// A configuration `α u q v ω` is kept as (entry(q); l(u), r(v), 0) where
// l(u) reads u as a base-3 numeral and r(v) reads v right to left, so the
// letters next to the head are the least significant digits. Glass 3 is
// scratch space and is empty at every block boundary.
//
// Block for a state q: optionally empty-and-refill glasses 1 and 2, pop the
// digit next to the head on each side the commands of q inspect (recording
// "empty" when the glass is empty), pick the unique matching command, push
// the new digits, jump to entry(q'). If nothing matches, the popped digits
// are pushed back and the machine halts.

use std::collections::BTreeMap;

use serde::Serialize;

use super::require_deterministic;
use crate::machines::{Command, MachineError, MinskyConfig, MinskyMachine, Result, Side, TmConfig, TuringMachine};

#[derive(Debug, Clone, Serialize)]
pub struct Minsky3 {
    pub machine: MinskyMachine,
    /// Entry command number of each Turing state.
    pub entries: Vec<usize>,
    /// Human-readable name of every command number, `q.entry`, `q.popL.r1`, ...
    pub names: BTreeMap<usize, String>,
}

impl Minsky3 {
    /// `(entry(q); l(u), r(v), 0)`.
    pub fn encode(&self, c: &TmConfig) -> MinskyConfig {
        let t = &c.tapes[0];
        MinskyConfig::new(self.entries[t.state as usize], &[base3(&t.left), base3_rev(&t.right), 0])
    }
}

/// Value of a word read left to right with letter `i` as digit `i + 1`.
pub fn base3(w: &[u16]) -> u64 {
    w.iter().fold(0, |acc, &d| acc * 3 + d as u64 + 1)
}

/// Value of a word read right to left.
pub fn base3_rev(w: &[u16]) -> u64 {
    w.iter().rev().fold(0, |acc, &d| acc * 3 + d as u64 + 1)
}

/// What a pop found: the glass was empty, or held the given digit (1 or 2).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Obs {
    Empty,
    Digit(u64),
}

struct Gen {
    commands: Vec<Command>,
    names: BTreeMap<usize, String>,
    next: usize,
}

impl Gen {
    fn fresh(&mut self, name: String) -> usize {
        let n = self.next;
        self.next += 1;
        self.names.insert(n, name);
        n
    }

    fn emit(&mut self, c: Command) {
        self.commands.push(c);
    }

    /// Move all coins of `from` into `to`, `factor` coins per coin; then `exit`.
    fn move_all(&mut self, from: usize, to: usize, factor: usize, exit: usize, name: &str) -> usize {
        let head = self.fresh(format!("{}.move{}{}", name, from, to));
        let mut chain = Vec::new();
        for i in 0..factor {
            chain.push(self.fresh(format!("{}.move{}{}.{}", name, from, to, i)));
        }
        self.emit(Command::if_zero(head, &[from], exit));
        self.emit(Command::sub(head, &[from], chain[0]));
        for (i, &c) in chain.iter().enumerate() {
            let nxt = chain.get(i + 1).copied().unwrap_or(head);
            self.emit(Command::add(c, &[to], nxt));
        }
        head
    }

    /// Add `d` coins to glass `g`, then `exit`.
    fn add_const(&mut self, g: usize, d: u64, exit: usize, name: &str) -> usize {
        let mut at = exit;
        for i in (0..d).rev() {
            let c = self.fresh(format!("{}.add{}.{}", name, g, i));
            self.emit(Command::add(c, &[g], at));
            at = c;
        }
        at
    }

    /// Multiply glass `g` by 3 and add digit `d`.
    fn push(&mut self, g: usize, d: u64, exit: usize, name: &str) -> usize {
        let add = self.add_const(g, d, exit, name);
        let back = self.move_all(3, g, 3, add, name);
        self.move_all(g, 3, 1, back, name)
    }

    fn push_all(&mut self, g: usize, digits: &[u64], exit: usize, name: &str) -> usize {
        let mut at = exit;
        for (i, &d) in digits.iter().enumerate().rev() {
            at = self.push(g, d, at, &format!("{}.push{}", name, i));
        }
        at
    }

    /// Divide glass `g` by 3; continue at `exits[r]` by remainder, or at
    /// `empty` if the glass was empty. Remainder 0 with a nonempty glass
    /// never encodes a word and goes to `exits[0]`.
    fn pop(&mut self, g: usize, empty: usize, exits: [usize; 3], name: &str) -> usize {
        let c = self.fresh(format!("{}.pop{}", name, g));
        let r: Vec<usize> = (0..4).map(|i| self.fresh(format!("{}.pop{}.r{}", name, g, i))).collect();
        let outs: Vec<usize> = (0..3).map(|i| self.move_all(3, g, 1, exits[i], &format!("{}.pop{}.x{}", name, g, i))).collect();
        self.emit(Command::if_zero(c, &[g], empty));
        self.emit(Command::sub(c, &[g], r[1]));
        self.emit(Command::if_zero(r[1], &[g], outs[1]));
        self.emit(Command::sub(r[1], &[g], r[2]));
        self.emit(Command::if_zero(r[2], &[g], outs[2]));
        self.emit(Command::sub(r[2], &[g], r[3]));
        self.emit(Command::add(r[3], &[3], r[0]));
        self.emit(Command::if_zero(r[0], &[g], outs[0]));
        self.emit(Command::sub(r[0], &[g], r[1]));
        c
    }

    /// A command number at which the machine halts.
    fn dead(&mut self, name: &str) -> usize {
        let a = self.fresh(format!("{}.halt", name));
        let b = self.fresh(format!("{}.halt'", name));
        self.emit(Command::if_zero(a, &[3], b));
        self.emit(Command::sub(b, &[3], a));
        a
    }
}

fn matches(side: Side, obs: Obs) -> bool {
    match (side, obs) {
        (Side::Absent, _) => true,
        (Side::Marker, Obs::Empty) => true,
        (Side::Letter(a), Obs::Digit(d)) => a as u64 + 1 == d,
        _ => false,
    }
}

pub fn tm_to_minsky3(tm: &TuringMachine, empty_glasses: bool) -> Result<Minsky3> {
    if tm.tape_count() != 1 {
        return Err(MachineError::Unsupported("tm_to_minsky3 needs a one-tape machine; apply to_one_tape first".into()));
    }
    if tm.tapes[0].alphabet.len() > 2 {
        return Err(MachineError::Unsupported("tape alphabet must be {1,2}".into()));
    }
    require_deterministic(tm)?;
    let spec = &tm.tapes[0];
    if tm.commands.iter().any(|c| c.clauses[0].state == spec.stop) {
        return Err(MachineError::Unsupported("commands out of the stop state are not supported".into()));
    }
    let nstates = spec.states.len();
    let mut g = Gen { commands: vec![], names: BTreeMap::new(), next: 1 };
    // Start state gets entry 1 so that the input encoding (1; m, 0, 0) applies.
    let mut order: Vec<usize> = vec![spec.start as usize];
    order.extend((0..nstates).filter(|&q| q != spec.start as usize));
    let mut entries = vec![0; nstates];
    for &q in &order {
        entries[q] = g.fresh(format!("{}.entry", spec.states[q]));
    }

    for &q in &order {
        let name = spec.states[q].clone();
        let entry = entries[q];
        if q == spec.stop as usize {
            g.emit(Command::if_zero(entry, &[1, 2], 0));
            continue;
        }
        let cmds: Vec<&crate::machines::Clause> =
            tm.commands.iter().map(|c| &c.clauses[0]).filter(|c| c.state as usize == q).collect();
        if cmds.is_empty() {
            let d = g.dead(&name);
            g.emit(Command::if_zero(entry, &[3], d));
            continue;
        }
        let need_l = cmds.iter().any(|c| c.left != Side::Absent);
        let need_r = cmds.iter().any(|c| c.right != Side::Absent);
        let left_obs: Vec<Option<Obs>> = if need_l { vec![Some(Obs::Empty), Some(Obs::Digit(1)), Some(Obs::Digit(2)), Some(Obs::Digit(0))] } else { vec![None] };
        let right_obs = if need_r { vec![Some(Obs::Empty), Some(Obs::Digit(1)), Some(Obs::Digit(2)), Some(Obs::Digit(0))] } else { vec![None] };

        // Leaves: one per (left, right) observation.
        let mut leaf: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for (i, lo) in left_obs.iter().enumerate() {
            for (j, ro) in right_obs.iter().enumerate() {
                let tag = format!("{}.case{}{}", name, i, j);
                let popped = |o: &Option<Obs>| match o {
                    Some(Obs::Digit(d)) => vec![*d],
                    _ => vec![],
                };
                let valid = !matches!(lo, Some(Obs::Digit(0))) && !matches!(ro, Some(Obs::Digit(0)));
                let found = if valid {
                    cmds.iter().find(|c| {
                        lo.map_or(true, |o| matches(c.left, o)) && ro.map_or(true, |o| matches(c.right, o))
                    })
                } else {
                    None
                };
                let start = match found {
                    Some(cl) => {
                        let mut l_push = Vec::new();
                        if cl.left == Side::Absent {
                            l_push.extend(popped(lo));
                        }
                        if let Side::Letter(a) = cl.new_left {
                            l_push.push(a as u64 + 1);
                        }
                        let mut r_push = Vec::new();
                        if cl.right == Side::Absent {
                            r_push.extend(popped(ro));
                        }
                        if let Side::Letter(b) = cl.new_right {
                            r_push.push(b as u64 + 1);
                        }
                        let target = entries[cl.new_state as usize];
                        let r = g.push_all(2, &r_push, target, &format!("{}.R", tag));
                        g.push_all(1, &l_push, r, &format!("{}.L", tag))
                    }
                    None => {
                        let d = g.dead(&tag);
                        let r = g.push_all(2, &popped(ro), d, &format!("{}.R", tag));
                        g.push_all(1, &popped(lo), r, &format!("{}.L", tag))
                    }
                };
                leaf.insert((i, j), start);
            }
        }
        // Right pops, one per left observation.
        let mut after_left = Vec::new();
        for i in 0..left_obs.len() {
            let s = if need_r {
                let ex = [leaf[&(i, 3)], leaf[&(i, 1)], leaf[&(i, 2)]];
                g.pop(2, leaf[&(i, 0)], ex, &format!("{}.l{}", name, i))
            } else {
                leaf[&(i, 0)]
            };
            after_left.push(s);
        }
        let mut body = if need_l {
            let ex = [after_left[3], after_left[1], after_left[2]];
            g.pop(1, after_left[0], ex, &name)
        } else {
            after_left[0]
        };
        if empty_glasses {
            for glass in [2, 1] {
                let back = g.move_all(3, glass, 1, body, &format!("{}.empty", name));
                body = g.move_all(glass, 3, 1, back, &format!("{}.empty", name));
            }
        }
        // The entry number itself must carry a command; test glass 3 (always
        // empty here) to jump into the block.
        g.emit(Command::if_zero(entry, &[3], body));
    }

    let machine = MinskyMachine::new(3, g.commands)?;
    let report = machine.validate()?;
    if !report.deterministic {
        return Err(MachineError::Unsupported(format!("compiled machine is not deterministic: {}", report.violations.join("; "))));
    }
    Ok(Minsky3 { machine, entries, names: g.names })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::run;
    use crate::machines::turing::TM_PARITY;

    #[test]
    fn numerals() {
        // 121221 and 1222 read right to left
        assert_eq!(base3(&[0, 1, 0, 1, 1, 0]), 1 * 243 + 2 * 81 + 1 * 27 + 2 * 9 + 2 * 3 + 1);
        assert_eq!(base3_rev(&[0, 1, 1, 1]), 2 * 27 + 2 * 9 + 2 * 3 + 1);
    }

    #[test]
    fn parity_agrees() {
        let tm = TuringMachine::parse(TM_PARITY).unwrap();
        for flag in [false, true] {
            let m3 = tm_to_minsky3(&tm, flag).unwrap();
            assert_eq!(m3.entries[tm.tapes[0].start as usize], 1);
            for n in 0..6 {
                let a = run(&tm, &tm.unary_input(n), 1000).unwrap().accepted();
                let c = m3.encode(&tm.unary_input(n));
                let b = run(&m3.machine, &c, 1_000_000).unwrap().accepted();
                assert_eq!(a, b, "n={} flag={}", n, flag);
            }
        }
    }
}
