//! Multi-tape Turing machines in the rewriting style: a command rewrites the
//! neighbourhood `a q b` of the head on every tape simultaneously.
//!
//! Letters and states are stored as indices into the per-tape alphabet and
//! state lists; names only matter for parsing and printing.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Machine, MachineError, Result, ValidationReport};

/// One side of a clause: no letter required, the end marker, or a letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Absent,
    Marker,
    Letter(u16),
}

impl Side {
    fn compatible(self, other: Side) -> bool {
        match (self, other) {
            (Side::Absent, _) | (_, Side::Absent) => true,
            (a, b) => a == b,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Clause {
    pub left: Side,
    pub state: u16,
    pub right: Side,
    pub new_left: Side,
    pub new_state: u16,
    pub new_right: Side,
}

impl Clause {
    pub fn new(left: Side, state: u16, right: Side, new_left: Side, new_state: u16, new_right: Side) -> Self {
        Clause { left, state, right, new_left, new_state, new_right }
    }

    /// A clause that only checks the state and leaves the tape untouched.
    pub fn keep(state: u16) -> Self {
        Clause::new(Side::Absent, state, Side::Absent, Side::Absent, state, Side::Absent)
    }

    pub fn inverse(&self) -> Clause {
        Clause {
            left: self.new_left,
            state: self.new_state,
            right: self.new_right,
            new_left: self.left,
            new_state: self.state,
            new_right: self.right,
        }
    }

    fn matches(&self, t: &TapeConfig) -> bool {
        if t.state != self.state {
            return false;
        }
        let left_ok = match self.left {
            Side::Absent => true,
            Side::Marker => t.left.is_empty(),
            Side::Letter(a) => t.left.last() == Some(&a),
        };
        let right_ok = match self.right {
            Side::Absent => true,
            Side::Marker => t.right.is_empty(),
            Side::Letter(b) => t.right.first() == Some(&b),
        };
        left_ok && right_ok
    }

    fn apply(&self, t: &TapeConfig) -> Option<TapeConfig> {
        if !self.matches(t) {
            return None;
        }
        let mut out = t.clone();
        if let Side::Letter(_) = self.left {
            out.left.pop();
        }
        if let Side::Letter(a) = self.new_left {
            out.left.push(a);
        }
        if let Side::Letter(_) = self.right {
            out.right.remove(0);
        }
        if let Side::Letter(b) = self.new_right {
            out.right.insert(0, b);
        }
        out.state = self.new_state;
        Some(out)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TmCommand {
    /// One clause per tape.
    pub clauses: Vec<Clause>,
}

impl TmCommand {
    pub fn inverse(&self) -> TmCommand {
        TmCommand { clauses: self.clauses.iter().map(Clause::inverse).collect() }
    }

    pub fn apply(&self, c: &TmConfig) -> Option<TmConfig> {
        let mut tapes = Vec::with_capacity(c.tapes.len());
        for (cl, t) in self.clauses.iter().zip(&c.tapes) {
            tapes.push(cl.apply(t)?);
        }
        Some(TmConfig { tapes })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TapeSpec {
    pub alphabet: Vec<String>,
    pub states: Vec<String>,
    pub start: u16,
    pub stop: u16,
}

impl TapeSpec {
    pub fn new(alphabet: &[&str], states: &[&str], start: &str, stop: &str) -> Self {
        let states: Vec<String> = states.iter().map(|s| s.to_string()).collect();
        let pos = |n: &str| states.iter().position(|s| s == n).expect("start/stop must be listed states") as u16;
        TapeSpec {
            alphabet: alphabet.iter().map(|s| s.to_string()).collect(),
            start: pos(start),
            stop: pos(stop),
            states,
        }
    }

    pub fn letter(&self, name: &str) -> Option<u16> {
        self.alphabet.iter().position(|s| s == name).map(|i| i as u16)
    }

    pub fn state(&self, name: &str) -> Option<u16> {
        self.states.iter().position(|s| s == name).map(|i| i as u16)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TapeConfig {
    pub left: Vec<u16>,
    pub state: u16,
    /// Right word in reading order; `right[0]` is next to the head.
    pub right: Vec<u16>,
}

impl TapeConfig {
    pub fn new(left: &[u16], state: u16, right: &[u16]) -> Self {
        TapeConfig { left: left.to_vec(), state, right: right.to_vec() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TmConfig {
    pub tapes: Vec<TapeConfig>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TuringMachine {
    pub tapes: Vec<TapeSpec>,
    pub commands: Vec<TmCommand>,
}

impl TuringMachine {
    pub fn new(tapes: Vec<TapeSpec>, commands: Vec<TmCommand>) -> Result<Self> {
        let m = TuringMachine { tapes, commands };
        m.check_structure()?;
        Ok(m)
    }

    pub fn tape_count(&self) -> usize {
        self.tapes.len()
    }

    fn check_structure(&self) -> Result<()> {
        let mut names: HashMap<&str, usize> = HashMap::new();
        for (k, t) in self.tapes.iter().enumerate() {
            for n in t.alphabet.iter().chain(&t.states) {
                if let Some(prev) = names.insert(n.as_str(), k) {
                    return Err(MachineError::Malformed {
                        index: 0,
                        command: n.clone(),
                        reason: format!("symbol `{}` declared twice (tapes {} and {})", n, prev + 1, k + 1),
                    });
                }
            }
            if t.start as usize >= t.states.len() || t.stop as usize >= t.states.len() {
                return Err(MachineError::Malformed {
                    index: 0,
                    command: format!("tape {}", k + 1),
                    reason: "start/stop state out of range".into(),
                });
            }
        }
        for (i, cmd) in self.commands.iter().enumerate() {
            let err = |reason: String| MachineError::Malformed { index: i, command: self.command_text(cmd), reason };
            if cmd.clauses.len() != self.tapes.len() {
                return Err(err(format!("{} clauses for {} tapes", cmd.clauses.len(), self.tapes.len())));
            }
            for (k, (cl, t)) in cmd.clauses.iter().zip(&self.tapes).enumerate() {
                for s in [cl.left, cl.right, cl.new_left, cl.new_right] {
                    if let Side::Letter(a) = s {
                        if a as usize >= t.alphabet.len() {
                            return Err(err(format!("letter out of range on tape {}", k + 1)));
                        }
                    }
                }
                if cl.state as usize >= t.states.len() || cl.new_state as usize >= t.states.len() {
                    return Err(err(format!("state out of range on tape {}", k + 1)));
                }
                if (cl.left == Side::Marker) != (cl.new_left == Side::Marker)
                    || (cl.right == Side::Marker) != (cl.new_right == Side::Marker)
                {
                    return Err(err(format!("clause on tape {} inserts or erases an end marker", k + 1)));
                }
            }
        }
        Ok(())
    }

    /// Symbolic determinism check: two commands overlap iff on every tape
    /// their left-hand sides can match the same tape configuration.
    pub fn validate(&self) -> Result<ValidationReport> {
        self.check_structure()?;
        let mut violations = Vec::new();
        for (i, a) in self.commands.iter().enumerate() {
            for (j, b) in self.commands.iter().enumerate().skip(i + 1) {
                if overlap(a, b) {
                    violations.push(format!("#{} `{}` overlaps #{} `{}`", i, self.command_text(a), j, self.command_text(b)));
                }
            }
        }
        Ok(ValidationReport { deterministic: violations.is_empty(), violations })
    }

    pub fn step(&self, c: &TmConfig) -> Vec<(usize, TmConfig)> {
        self.commands.iter().enumerate().filter_map(|(i, cmd)| cmd.apply(c).map(|n| (i, n))).collect()
    }

    /// `inp(u)`: `u` to the left of the start head on tape 1, all else empty.
    pub fn input(&self, u: &[u16]) -> TmConfig {
        let tapes = self
            .tapes
            .iter()
            .enumerate()
            .map(|(k, t)| TapeConfig { left: if k == 0 { u.to_vec() } else { vec![] }, state: t.start, right: vec![] })
            .collect();
        TmConfig { tapes }
    }

    /// Unary input of length `n` over the first letter of tape 1.
    pub fn unary_input(&self, n: usize) -> TmConfig {
        self.input(&vec![0; n])
    }

    /// Every configuration with total word length at most `size`.
    pub fn configs_up_to(&self, size: usize) -> Vec<TmConfig> {
        // Per tape: all (left, state, right) with given length, then combine.
        fn words(alpha: usize, len: usize) -> Vec<Vec<u16>> {
            let mut out = vec![vec![]];
            for _ in 0..len {
                let mut next = Vec::new();
                for w in &out {
                    for a in 0..alpha {
                        let mut x = w.clone();
                        x.push(a as u16);
                        next.push(x);
                    }
                }
                out = next;
            }
            out
        }
        let per_tape: Vec<Vec<Vec<TapeConfig>>> = self
            .tapes
            .iter()
            .map(|t| {
                (0..=size)
                    .map(|len| {
                        let mut v = Vec::new();
                        for l in 0..=len {
                            for u in words(t.alphabet.len(), l) {
                                for w in words(t.alphabet.len(), len - l) {
                                    for q in 0..t.states.len() {
                                        v.push(TapeConfig { left: u.clone(), state: q as u16, right: w.clone() });
                                    }
                                }
                            }
                        }
                        v
                    })
                    .collect()
            })
            .collect();
        let mut out = Vec::new();
        fn rec(k: usize, left: usize, cur: &mut Vec<TapeConfig>, per: &[Vec<Vec<TapeConfig>>], out: &mut Vec<TmConfig>) {
            if k == per.len() {
                out.push(TmConfig { tapes: cur.clone() });
                return;
            }
            for len in 0..=left {
                for t in &per[k][len] {
                    cur.push(t.clone());
                    rec(k + 1, left - len, cur, per, out);
                    cur.pop();
                }
            }
        }
        rec(0, size, &mut Vec::new(), &per_tape, &mut out);
        out
    }

    fn side_text(&self, k: usize, s: Side, left: bool) -> String {
        match s {
            Side::Absent => "_".into(),
            Side::Marker => if left { "ALPHA" } else { "OMEGA" }.into(),
            Side::Letter(a) => self.tapes[k].alphabet[a as usize].clone(),
        }
    }

    pub fn command_text(&self, cmd: &TmCommand) -> String {
        let parts: Vec<String> = cmd
            .clauses
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if k >= self.tapes.len() {
                    return "?".into();
                }
                let st = |q: u16| self.tapes[k].states.get(q as usize).cloned().unwrap_or_else(|| "?".into());
                format!(
                    "{} {} {} -> {} {} {}",
                    self.side_text(k, c.left, true),
                    st(c.state),
                    self.side_text(k, c.right, false),
                    self.side_text(k, c.new_left, true),
                    st(c.new_state),
                    self.side_text(k, c.new_right, false)
                )
            })
            .collect();
        parts.join(" ; ")
    }

    pub fn config_text(&self, c: &TmConfig) -> String {
        let parts: Vec<String> = c
            .tapes
            .iter()
            .enumerate()
            .map(|(k, t)| {
                let spec = &self.tapes[k];
                let mut s = vec!["ALPHA".to_string()];
                s.extend(t.left.iter().map(|&a| spec.alphabet[a as usize].clone()));
                s.push(spec.states[t.state as usize].clone());
                s.extend(t.right.iter().map(|&a| spec.alphabet[a as usize].clone()));
                s.push("OMEGA".into());
                s.join(" ")
            })
            .collect();
        parts.join(" | ")
    }

    /// Parse `ALPHA u q v OMEGA | ...`. Tokens that are not declared
    /// symbols are split into single characters.
    pub fn parse_config(&self, s: &str) -> Result<TmConfig> {
        let bad = |reason: String| MachineError::BadConfig { config: s.to_string(), reason };
        let parts: Vec<&str> = s.split('|').collect();
        if parts.len() != self.tapes.len() {
            return Err(bad(format!("expected {} tapes", self.tapes.len())));
        }
        let mut tapes = Vec::new();
        for (k, part) in parts.iter().enumerate() {
            let spec = &self.tapes[k];
            let mut toks: Vec<String> = Vec::new();
            for t in part.split_whitespace() {
                if t == "ALPHA" || t == "OMEGA" || spec.letter(t).is_some() || spec.state(t).is_some() {
                    toks.push(t.to_string());
                } else {
                    toks.extend(t.chars().map(|c| c.to_string()));
                }
            }
            if toks.first().map(|s| s.as_str()) != Some("ALPHA") || toks.last().map(|s| s.as_str()) != Some("OMEGA") {
                return Err(bad(format!("tape {} must be ALPHA ... OMEGA", k + 1)));
            }
            let body = &toks[1..toks.len() - 1];
            let qpos: Vec<usize> = (0..body.len()).filter(|&i| spec.state(&body[i]).is_some()).collect();
            if qpos.len() != 1 {
                return Err(bad(format!("tape {} needs exactly one state symbol", k + 1)));
            }
            let conv = |w: &[String]| -> Result<Vec<u16>> {
                w.iter().map(|x| spec.letter(x).ok_or_else(|| bad(format!("unknown letter `{}`", x)))).collect()
            };
            tapes.push(TapeConfig {
                left: conv(&body[..qpos[0]])?,
                state: spec.state(&body[qpos[0]]).unwrap(),
                right: conv(&body[qpos[0] + 1..])?,
            });
        }
        Ok(TmConfig { tapes })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut count = None;
        let mut specs: Vec<(Vec<String>, Vec<String>, Option<String>, Option<String>)> = Vec::new();
        let mut raw_cmds: Vec<(usize, usize, String)> = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| MachineError::Parse { line: ln + 1, col: raw.find(line).unwrap_or(0) + 1, msg };
            let toks: Vec<&str> = line.split_whitespace().collect();
            let tape_index = |t: Option<&&str>| -> Result<usize> {
                let k: usize = t.and_then(|x| x.parse().ok()).ok_or_else(|| err("expected tape number".into()))?;
                if k == 0 || k > specs.len() {
                    return Err(err(format!("tape {} out of range", k)));
                }
                Ok(k - 1)
            };
            match toks[0] {
                "tm" => {
                    let k: usize = toks
                        .get(1)
                        .and_then(|t| t.strip_prefix("tapes="))
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| err("expected `tm tapes=K`".into()))?;
                    count = Some(k);
                    specs = vec![(vec![], vec![], None, None); k];
                }
                "tape" => {
                    let k = tape_index(toks.get(1))?;
                    if toks.get(2) != Some(&"alphabet") {
                        return Err(err("expected `tape k alphabet ...`".into()));
                    }
                    specs[k].0 = toks[3..].iter().map(|s| s.to_string()).collect();
                }
                "states" => {
                    let k = tape_index(toks.get(1))?;
                    specs[k].1 = toks[2..].iter().map(|s| s.to_string()).collect();
                }
                "start" | "stop" => {
                    let k = tape_index(toks.get(1))?;
                    let s = toks.get(2).ok_or_else(|| err("missing state".into()))?.to_string();
                    if toks[0] == "start" {
                        specs[k].2 = Some(s);
                    } else {
                        specs[k].3 = Some(s);
                    }
                }
                "cmd" => raw_cmds.push((ln + 1, raw.find("cmd").unwrap_or(0) + 1, line[3..].to_string())),
                other => return Err(err(format!("unknown directive `{}`", other))),
            }
        }
        if count.is_none() {
            return Err(MachineError::Parse { line: 1, col: 1, msg: "missing `tm tapes=K` header".into() });
        }
        let mut tapes = Vec::new();
        for (k, (alpha, states, start, stop)) in specs.into_iter().enumerate() {
            let e = |m: &str| MachineError::Parse { line: 1, col: 1, msg: format!("tape {}: {}", k + 1, m) };
            let start = start.ok_or_else(|| e("missing start state"))?;
            let stop = stop.ok_or_else(|| e("missing stop state"))?;
            let pos = |n: &str| states.iter().position(|s| s == n).map(|i| i as u16);
            tapes.push(TapeSpec {
                start: pos(&start).ok_or_else(|| e("start state not declared"))?,
                stop: pos(&stop).ok_or_else(|| e("stop state not declared"))?,
                alphabet: alpha,
                states,
            });
        }
        let mut commands = Vec::new();
        for (line, col, body) in raw_cmds {
            let err = |msg: String| MachineError::Parse { line, col, msg };
            let parts: Vec<&str> = body.split(';').collect();
            if parts.len() != tapes.len() {
                return Err(err(format!("expected {} clauses, found {}", tapes.len(), parts.len())));
            }
            let mut clauses = Vec::new();
            for (k, p) in parts.iter().enumerate() {
                let t: Vec<&str> = p.split_whitespace().collect();
                if t.len() != 7 || t[3] != "->" {
                    return Err(err(format!("clause {} must read `a q b -> a' q' b'`", k + 1)));
                }
                let spec = &tapes[k];
                let side = |s: &str, left: bool| -> Result<Side> {
                    match s {
                        "_" => Ok(Side::Absent),
                        "ALPHA" if left => Ok(Side::Marker),
                        "OMEGA" if !left => Ok(Side::Marker),
                        _ => spec.letter(s).map(Side::Letter).ok_or_else(|| err(format!("unknown letter `{}` on tape {}", s, k + 1))),
                    }
                };
                let state = |s: &str| spec.state(s).ok_or_else(|| err(format!("unknown state `{}` on tape {}", s, k + 1)));
                clauses.push(Clause {
                    left: side(t[0], true)?,
                    state: state(t[1])?,
                    right: side(t[2], false)?,
                    new_left: side(t[4], true)?,
                    new_state: state(t[5])?,
                    new_right: side(t[6], false)?,
                });
            }
            commands.push(TmCommand { clauses });
        }
        TuringMachine::new(tapes, commands)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("tm tapes={}\n", self.tapes.len());
        for (k, t) in self.tapes.iter().enumerate() {
            s.push_str(&format!("tape {} alphabet {}\n", k + 1, t.alphabet.join(" ")));
            s.push_str(&format!("states {} {}\n", k + 1, t.states.join(" ")));
            s.push_str(&format!("start {} {}\n", k + 1, t.states[t.start as usize]));
            s.push_str(&format!("stop {} {}\n", k + 1, t.states[t.stop as usize]));
        }
        for c in &self.commands {
            s.push_str(&format!("cmd {}\n", self.command_text(c)));
        }
        s
    }
}

fn overlap(a: &TmCommand, b: &TmCommand) -> bool {
    a.clauses
        .iter()
        .zip(&b.clauses)
        .all(|(x, y)| x.state == y.state && x.left.compatible(y.left) && x.right.compatible(y.right))
}

impl Machine for TuringMachine {
    type Config = TmConfig;

    fn successors(&self, c: &TmConfig) -> Vec<(usize, TmConfig)> {
        self.step(c)
    }

    fn predecessors(&self, c: &TmConfig) -> Vec<(usize, TmConfig)> {
        self.commands.iter().enumerate().filter_map(|(i, cmd)| cmd.inverse().apply(c).map(|p| (i, p))).collect()
    }

    fn is_accepting(&self, c: &TmConfig) -> bool {
        c.tapes
            .iter()
            .zip(&self.tapes)
            .all(|(t, spec)| t.state == spec.stop && t.left.is_empty() && t.right.is_empty())
    }

    fn is_deterministic(&self) -> bool {
        self.validate().map(|r| r.deterministic).unwrap_or(false)
    }

    fn config_size(&self, c: &TmConfig) -> usize {
        c.tapes.iter().map(|t| t.left.len() + t.right.len()).sum()
    }
}

impl fmt::Display for TuringMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Unary parity decider: accepts `1^n` for even `n`, halts otherwise.
pub const TM_PARITY: &str = "tm tapes=1
tape 1 alphabet 1
states 1 qe qo q0
start 1 qe
stop 1 q0
cmd 1 qe OMEGA -> _ qo OMEGA
cmd 1 qo OMEGA -> _ qe OMEGA
cmd ALPHA qe OMEGA -> ALPHA q0 OMEGA
";

/// Copies tape 1 onto tape 2 letter by letter, then erases both; accepts
/// words whose length is even.
pub const TM_COPIER: &str = "tm tapes=2
tape 1 alphabet a
tape 2 alphabet b
states 1 p1 pe po p0
states 2 r1 r0
start 1 p1
stop 1 p0
start 2 r1
stop 2 r0
cmd a p1 OMEGA -> _ p1 OMEGA ; _ r1 OMEGA -> b r1 OMEGA
cmd ALPHA p1 OMEGA -> ALPHA pe OMEGA ; _ r1 OMEGA -> _ r1 OMEGA
cmd ALPHA pe OMEGA -> ALPHA po OMEGA ; b r1 OMEGA -> _ r1 OMEGA
cmd ALPHA po OMEGA -> ALPHA pe OMEGA ; b r1 OMEGA -> _ r1 OMEGA
cmd ALPHA pe OMEGA -> ALPHA p0 OMEGA ; ALPHA r1 OMEGA -> ALPHA r0 OMEGA
";

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::run;

    #[test]
    fn parity_runs() {
        let m = TuringMachine::parse(TM_PARITY).unwrap();
        let bad = TM_PARITY.replace("-> _ qo", "-> ALPHA qo");
        assert!(TuringMachine::parse(&bad).is_err());
        assert!(m.validate().unwrap().deterministic);
        for n in 0..7 {
            let r = run(&m, &m.unary_input(n), 100).unwrap();
            assert_eq!(r.accepted(), n % 2 == 0, "n={}", n);
        }
        assert_eq!(TuringMachine::parse(&m.to_text()).unwrap(), m);
    }

    #[test]
    fn config_literal() {
        let m = TuringMachine::parse(
            "tm tapes=1\ntape 1 alphabet 1 2\nstates 1 q1 q0\nstart 1 q1\nstop 1 q0\ncmd 1 q1 _ -> 2 q1 _\n",
        )
        .unwrap();
        let c = m.parse_config("ALPHA 121 q1 22 OMEGA").unwrap();
        assert_eq!(c.tapes[0].left, vec![0, 1, 0]);
        assert_eq!(c.tapes[0].right, vec![1, 1]);
        let next = m.step(&c);
        assert_eq!(m.config_text(&next[0].1), "ALPHA 1 2 2 q1 2 2 OMEGA");
        let back = m.predecessors(&next[0].1);
        assert!(back.iter().any(|(_, p)| p == &c));
    }
}
