// Multi-tape to one-tape compilation.
//
// The single tape holds `u1 ^1 v1 # u2 ^2 v2 # ... # uK ^K vK`, where `^k`
// marks the head of source tape k and `#` separates tracks. The control
// state carries the set of source commands still consistent with what has
// been read so far. One source step is:
//   seek   - left to right, observing the neighbours of every `^k`
//   apply  - right to left, rewriting around each `^k` with the unique
//            surviving command, then back to the left end
// The source accept configuration is recognised during the scan; the tape
// is then erased right to left.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::Serialize;

use super::{fresh, require_deterministic, taken_names};
use crate::machines::{Clause, MachineError, Result, Side, TapeConfig, TapeSpec, TmCommand, TmConfig, TuringMachine};

#[derive(Debug, Clone, Serialize)]
pub struct OneTape {
    pub machine: TuringMachine,
    /// Output letter id of the first letter of each source tape.
    offsets: Vec<u16>,
    sep: u16,
    markers: Vec<u16>,
    /// Scan entry state for a given initial filter.
    seek_entries: HashMap<Vec<usize>, u16>,
    source: TuringMachine,
}

impl OneTape {
    /// Output configuration simulating a source configuration at the start
    /// of a simulation step, if one exists.
    pub fn encode(&self, c: &TmConfig) -> Option<TmConfig> {
        if self.offsets.is_empty() {
            return Some(c.clone());
        }
        let tuple: Vec<u16> = c.tapes.iter().map(|t| t.state).collect();
        let state = *self.seek_entries.get(&initial_filter(&self.source, &tuple))?;
        let mut word = Vec::new();
        for (k, t) in c.tapes.iter().enumerate() {
            if k > 0 {
                word.push(self.sep);
            }
            word.extend(t.left.iter().map(|&a| a + self.offsets[k]));
            word.push(self.markers[k]);
            word.extend(t.right.iter().map(|&a| a + self.offsets[k]));
        }
        Some(TmConfig { tapes: vec![TapeConfig { left: vec![], state, right: word }] })
    }
}

const ACCEPT: usize = usize::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Ctl {
    Start,
    Sep(usize),
    Mark(usize),
    Back,
    Seek(Vec<usize>, usize),
    Pass(Vec<usize>, usize),
    Right(Vec<usize>, usize),
    Ap(usize, usize, u8),
    Erase,
    Stop,
}

fn initial_filter(tm: &TuringMachine, tuple: &[u16]) -> Vec<usize> {
    let mut f: Vec<usize> = tm
        .commands
        .iter()
        .enumerate()
        .filter(|(_, c)| c.clauses.iter().zip(tuple).all(|(cl, &q)| cl.state == q))
        .map(|(i, _)| i)
        .collect();
    if tm.tapes.iter().zip(tuple).all(|(t, &q)| t.stop == q) {
        f.push(ACCEPT);
    }
    f
}

fn side_ok(side: Side, obs: Side) -> bool {
    match side {
        Side::Absent => true,
        s => s == obs,
    }
}

fn filter(tm: &TuringMachine, f: &[usize], k: usize, obs: Side, left: bool) -> Vec<usize> {
    f.iter()
        .copied()
        .filter(|&i| {
            if i == ACCEPT {
                return obs == Side::Marker;
            }
            let cl = &tm.commands[i].clauses[k];
            side_ok(if left { cl.left } else { cl.right }, obs)
        })
        .collect()
}

struct Builder {
    ids: HashMap<Ctl, u16>,
    names: Vec<String>,
    queue: VecDeque<Ctl>,
    taken: HashSet<String>,
}

impl Builder {
    fn id(&mut self, c: Ctl) -> u16 {
        if let Some(&i) = self.ids.get(&c) {
            return i;
        }
        let i = self.names.len() as u16;
        let base = match c {
            Ctl::Start => "o.start".to_string(),
            Ctl::Stop => "o.stop".to_string(),
            _ => format!("o.{}", i),
        };
        self.names.push(fresh(&base, &mut self.taken));
        self.ids.insert(c.clone(), i);
        self.queue.push_back(c);
        i
    }
}

pub fn to_one_tape(tm: &TuringMachine) -> Result<OneTape> {
    require_deterministic(tm)?;
    let k_tapes = tm.tape_count();
    if k_tapes == 1 {
        return Ok(OneTape {
            machine: tm.clone(),
            offsets: vec![],
            sep: 0,
            markers: vec![],
            seek_entries: HashMap::new(),
            source: tm.clone(),
        });
    }
    let accept: TmConfig = TmConfig { tapes: tm.tapes.iter().map(|t| TapeConfig::new(&[], t.stop, &[])).collect() };
    if !tm.step(&accept).is_empty() {
        return Err(MachineError::Unsupported("a command applies to the accept configuration".into()));
    }

    let mut taken = taken_names(tm);
    let mut alphabet = Vec::new();
    let mut offsets = Vec::new();
    let mut tape_letters: Vec<Vec<u16>> = Vec::new();
    for t in &tm.tapes {
        offsets.push(alphabet.len() as u16);
        tape_letters.push((alphabet.len()..alphabet.len() + t.alphabet.len()).map(|x| x as u16).collect());
        alphabet.extend(t.alphabet.iter().cloned());
    }
    let sep = alphabet.len() as u16;
    alphabet.push(fresh("#", &mut taken));
    let markers: Vec<u16> = (0..k_tapes)
        .map(|k| {
            alphabet.push(fresh(&format!("^{}", k + 1), &mut taken));
            (alphabet.len() - 1) as u16
        })
        .collect();
    let plain: Vec<u16> = (0..sep).chain([sep]).collect();
    let everything: Vec<u16> = (0..alphabet.len() as u16).collect();
    let lift = |k: usize, s: Side| match s {
        Side::Letter(a) => Side::Letter(a + offsets[k]),
        Side::Marker => Side::Absent,
        Side::Absent => Side::Absent,
    };

    let mut b = Builder { ids: HashMap::new(), names: vec![], queue: VecDeque::new(), taken };
    let start = b.id(Ctl::Start);
    let stop = b.id(Ctl::Stop);
    let mut commands = Vec::new();
    let cmd = |l: Side, q: u16, r: Side, l2: Side, q2: u16, r2: Side| TmCommand { clauses: vec![Clause::new(l, q, r, l2, q2, r2)] };
    let (a, o) = (Side::Absent, Side::Marker);
    let letter = Side::Letter;
    let mut seek_entries = HashMap::new();

    while let Some(ctl) = b.queue.pop_front() {
        let q = b.ids[&ctl];
        match ctl.clone() {
            Ctl::Start => {
                let next = if k_tapes == 1 { b.id(Ctl::Back) } else { b.id(Ctl::Sep(2)) };
                commands.push(cmd(a, q, o, letter(markers[0]), next, o));
            }
            Ctl::Sep(k) => {
                let next = b.id(Ctl::Mark(k));
                commands.push(cmd(a, q, o, letter(sep), next, o));
            }
            Ctl::Mark(k) => {
                let next = if k == k_tapes { b.id(Ctl::Back) } else { b.id(Ctl::Sep(k + 1)) };
                commands.push(cmd(a, q, o, letter(markers[k - 1]), next, o));
            }
            Ctl::Back => {
                for &x in &everything {
                    commands.push(cmd(letter(x), q, a, a, q, letter(x)));
                }
                let tuple: Vec<u16> = tm.tapes.iter().map(|t| t.start).collect();
                let f = initial_filter(tm, &tuple);
                if !f.is_empty() {
                    let s = b.id(Ctl::Seek(f.clone(), 1));
                    seek_entries.insert(f, s);
                    commands.push(cmd(o, q, a, o, s, a));
                }
            }
            Ctl::Seek(f, k) => {
                for &x in &plain {
                    commands.push(cmd(a, q, letter(x), letter(x), q, a));
                }
                if k > k_tapes {
                    match f.as_slice() {
                        [ACCEPT] => {
                            let e = b.id(Ctl::Erase);
                            commands.push(cmd(a, q, o, a, e, o));
                        }
                        [i] => {
                            let ap = b.id(Ctl::Ap(*i, k_tapes, 0));
                            commands.push(cmd(a, q, o, a, ap, o));
                        }
                        _ => {}
                    }
                    continue;
                }
                let m = letter(markers[k - 1]);
                let mut obs: Vec<(Side, Side)> = tape_letters[k - 1].iter().map(|&x| (letter(x), Side::Letter(x - offsets[k - 1]))).collect();
                obs.push((if k == 1 { o } else { letter(sep) }, Side::Marker));
                for (pat, ob) in obs {
                    let g = filter(tm, &f, k - 1, ob, true);
                    if !g.is_empty() {
                        let p = b.id(Ctl::Pass(g, k));
                        commands.push(cmd(pat, q, m, pat, p, m));
                    }
                }
            }
            Ctl::Pass(f, k) => {
                let r = b.id(Ctl::Right(f, k));
                commands.push(cmd(a, q, letter(markers[k - 1]), letter(markers[k - 1]), r, a));
            }
            Ctl::Right(f, k) => {
                let m = letter(markers[k - 1]);
                let mut obs: Vec<(Side, Side)> = tape_letters[k - 1].iter().map(|&x| (letter(x), Side::Letter(x - offsets[k - 1]))).collect();
                obs.push((if k == k_tapes { o } else { letter(sep) }, Side::Marker));
                for (pat, ob) in obs {
                    let g = filter(tm, &f, k - 1, ob, false);
                    if !g.is_empty() {
                        let s = b.id(Ctl::Seek(g, k + 1));
                        commands.push(cmd(m, q, pat, m, s, pat));
                    }
                }
            }
            Ctl::Ap(i, k, phase) => {
                let theta = &tm.commands[i];
                if k == 0 {
                    for &x in &everything {
                        commands.push(cmd(letter(x), q, a, a, q, letter(x)));
                    }
                    let tuple: Vec<u16> = theta.clauses.iter().map(|c| c.new_state).collect();
                    let f = initial_filter(tm, &tuple);
                    if !f.is_empty() {
                        let s = b.id(Ctl::Seek(f.clone(), 1));
                        seek_entries.insert(f, s);
                        commands.push(cmd(o, q, a, o, s, a));
                    }
                    continue;
                }
                let cl = &theta.clauses[k - 1];
                let m = letter(markers[k - 1]);
                match phase {
                    0 => {
                        for &x in &plain {
                            commands.push(cmd(letter(x), q, a, a, q, letter(x)));
                        }
                        let next = b.id(Ctl::Ap(i, k, 1));
                        commands.push(cmd(m, q, lift(k - 1, cl.right), m, next, lift(k - 1, cl.new_right)));
                    }
                    1 => {
                        let next = b.id(Ctl::Ap(i, k, 2));
                        commands.push(cmd(m, q, a, a, next, m));
                    }
                    _ => {
                        let next = b.id(Ctl::Ap(i, k - 1, 0));
                        commands.push(cmd(lift(k - 1, cl.left), q, m, lift(k - 1, cl.new_left), next, m));
                    }
                }
            }
            Ctl::Erase => {
                for &x in markers.iter().chain([&sep]) {
                    commands.push(cmd(letter(x), q, o, a, q, o));
                }
                commands.push(cmd(o, q, o, o, stop, o));
            }
            Ctl::Stop => {}
        }
    }

    let spec = TapeSpec { alphabet, states: b.names, start, stop };
    let machine = TuringMachine::new(vec![spec], commands)?;
    let report = machine.validate()?;
    if !report.deterministic {
        return Err(MachineError::Unsupported(format!("one-tape simulation is not deterministic: {}", report.violations.join("; "))));
    }
    Ok(OneTape { machine, offsets, sep, markers, seek_entries, source: tm.clone() })
}
