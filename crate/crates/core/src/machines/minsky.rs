//! K-glass Minsky machines.
//!
//! A command is stored in composite form: it takes one coin from each glass
//! in `sub`, requires the glasses in `zero` to be empty, puts one coin into
//! each glass in `add`, and moves to `target`. The four classical command
//! kinds are the special cases with a single nonempty part; the augmented
//! machines built by the transforms module need the general form.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Machine, MachineError, Result, ValidationReport};

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Command {
    pub number: usize,
    /// Glasses (1-based, sorted, possibly repeated) losing one coin.
    pub sub: Vec<usize>,
    /// Glasses (1-based, sorted, distinct) that must be empty.
    pub zero: Vec<usize>,
    /// Glasses (1-based, sorted, possibly repeated) gaining one coin.
    pub add: Vec<usize>,
    /// `None` for the stop command.
    pub target: Option<usize>,
}

impl Command {
    pub fn new(number: usize, sub: &[usize], zero: &[usize], add: &[usize], target: usize) -> Self {
        let mut sub = sub.to_vec();
        let mut zero = zero.to_vec();
        let mut add = add.to_vec();
        sub.sort_unstable();
        zero.sort_unstable();
        zero.dedup();
        add.sort_unstable();
        Command { number, sub, zero, add, target: Some(target) }
    }

    pub fn add(number: usize, glasses: &[usize], target: usize) -> Self {
        Command::new(number, &[], &[], glasses, target)
    }

    pub fn sub(number: usize, glasses: &[usize], target: usize) -> Self {
        Command::new(number, glasses, &[], &[], target)
    }

    pub fn if_zero(number: usize, glasses: &[usize], target: usize) -> Self {
        Command::new(number, &[], glasses, &[], target)
    }

    pub fn stop() -> Self {
        Command { number: 0, sub: vec![], zero: vec![], add: vec![], target: None }
    }

    pub fn is_stop(&self) -> bool {
        self.target.is_none()
    }

    fn count(list: &[usize], g: usize) -> u64 {
        list.iter().filter(|&&x| x == g).count() as u64
    }

    pub fn sub_count(&self, g: usize) -> u64 {
        Command::count(&self.sub, g)
    }

    pub fn add_count(&self, g: usize) -> u64 {
        Command::count(&self.add, g)
    }

    /// Apply to a configuration, or `None` if the guard fails.
    pub fn apply(&self, c: &MinskyConfig) -> Option<MinskyConfig> {
        let target = self.target?;
        if c.state != self.number {
            return None;
        }
        let mut coins = c.coins.clone();
        for &g in &self.zero {
            if coins[g - 1] != 0 {
                return None;
            }
        }
        for &g in &self.sub {
            if coins[g - 1] == 0 {
                return None;
            }
            coins[g - 1] -= 1;
        }
        for &g in &self.add {
            coins[g - 1] += 1;
        }
        Some(MinskyConfig { state: target, coins })
    }

    /// Inverse transformation: the unique predecessor of `c` under this command.
    pub fn apply_inverse(&self, c: &MinskyConfig) -> Option<MinskyConfig> {
        let target = self.target?;
        if c.state != target {
            return None;
        }
        let mut coins = c.coins.clone();
        for &g in &self.add {
            if coins[g - 1] == 0 {
                return None;
            }
            coins[g - 1] -= 1;
        }
        for &g in &self.sub {
            coins[g - 1] += 1;
        }
        let pre = MinskyConfig { state: self.number, coins };
        // The guard of the forward command has to hold at the predecessor.
        if self.apply(&pre).as_ref() == Some(c) {
            Some(pre)
        } else {
            None
        }
    }

    /// Minimal coin requirement per glass, for symbolic domain checks.
    fn lower_bounds(&self) -> BTreeMap<usize, u64> {
        let mut m = BTreeMap::new();
        for &g in &self.sub {
            *m.entry(g).or_insert(0) += 1;
        }
        m
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "cmd {}", self.number)?;
        let Some(t) = self.target else {
            return write!(f, " stop");
        };
        let list = |v: &[usize]| v.iter().map(|g| g.to_string()).collect::<Vec<_>>().join(" ");
        if !self.sub.is_empty() {
            write!(f, " sub {}", list(&self.sub))?;
        }
        if !self.zero.is_empty() {
            write!(f, " if0 {}", list(&self.zero))?;
        }
        if !self.add.is_empty() {
            write!(f, " add {}", list(&self.add))?;
        }
        if self.sub.is_empty() && self.zero.is_empty() && self.add.is_empty() {
            write!(f, " nop")?;
        }
        write!(f, " -> {}", t)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MinskyConfig {
    pub state: usize,
    pub coins: Vec<u64>,
}

impl MinskyConfig {
    pub fn new(state: usize, coins: &[u64]) -> Self {
        MinskyConfig { state, coins: coins.to_vec() }
    }

    pub fn size(&self) -> u64 {
        self.coins.iter().sum()
    }

    /// Parse `(i; e1,e2,...)`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = |msg: &str| MachineError::BadConfig { config: s.to_string(), reason: msg.to_string() };
        let t = s.trim();
        let inner = t
            .strip_prefix('(')
            .and_then(|x| x.strip_suffix(')'))
            .ok_or_else(|| bad("expected (i; e1,...,eK)"))?;
        let (st, rest) = inner.split_once(';').ok_or_else(|| bad("missing ';'"))?;
        let state = st.trim().parse().map_err(|_| bad("bad command number"))?;
        let mut coins = Vec::new();
        for part in rest.split(',') {
            let p = part.trim();
            if p.is_empty() {
                continue;
            }
            coins.push(p.parse().map_err(|_| bad("bad coin count"))?);
        }
        Ok(MinskyConfig { state, coins })
    }
}

impl fmt::Display for MinskyConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<String> = self.coins.iter().map(|x| x.to_string()).collect();
        write!(f, "({}; {})", self.state, c.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinskyMachine {
    pub glasses: usize,
    /// Non-stop commands; command 0 is always the implicit stop.
    pub commands: Vec<Command>,
}

impl MinskyMachine {
    /// Build and structurally validate a machine. Stop commands in the list
    /// are dropped (stop is implicit at command 0).
    pub fn new(glasses: usize, commands: Vec<Command>) -> Result<Self> {
        let commands: Vec<Command> = commands.into_iter().filter(|c| !c.is_stop()).collect();
        let m = MinskyMachine { glasses, commands };
        m.check_structure()?;
        Ok(m)
    }

    fn check_structure(&self) -> Result<()> {
        let numbers = self.command_numbers();
        for (i, c) in self.commands.iter().enumerate() {
            let err = |reason: String| MachineError::Malformed { index: i, command: c.to_string(), reason };
            if c.number == 0 {
                return Err(err("command 0 is reserved for stop".into()));
            }
            for &g in c.sub.iter().chain(&c.zero).chain(&c.add) {
                if g == 0 || g > self.glasses {
                    return Err(err(format!("glass {} out of range 1..{}", g, self.glasses)));
                }
            }
            for &g in &c.zero {
                if c.sub.contains(&g) {
                    return Err(err(format!("glass {} is both tested empty and decremented", g)));
                }
            }
            match c.target {
                None => return Err(err("missing target".into())),
                Some(t) if t != 0 && !numbers.contains(&t) => {
                    return Err(err(format!("target {} is not a command number", t)));
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// Command numbers in use, including 0.
    pub fn command_numbers(&self) -> BTreeSet<usize> {
        let mut s: BTreeSet<usize> = self.commands.iter().map(|c| c.number).collect();
        s.insert(0);
        s
    }

    /// Symbolic determinism check: two commands with the same number have
    /// disjoint domains iff some glass is tested empty by one and required
    /// nonempty by the other.
    pub fn validate(&self) -> Result<ValidationReport> {
        self.check_structure()?;
        let mut violations = Vec::new();
        for (i, a) in self.commands.iter().enumerate() {
            for (j, b) in self.commands.iter().enumerate().skip(i + 1) {
                if a.number != b.number {
                    continue;
                }
                let la = a.lower_bounds();
                let lb = b.lower_bounds();
                let disjoint = a.zero.iter().any(|g| lb.contains_key(g)) || b.zero.iter().any(|g| la.contains_key(g));
                if !disjoint {
                    violations.push(format!("#{} `{}` overlaps #{} `{}`", i, a, j, b));
                }
            }
        }
        Ok(ValidationReport { deterministic: violations.is_empty(), violations })
    }

    pub fn check_config(&self, c: &MinskyConfig) -> Result<()> {
        if c.coins.len() != self.glasses {
            return Err(MachineError::BadConfig {
                config: c.to_string(),
                reason: format!("expected {} glasses", self.glasses),
            });
        }
        if !self.command_numbers().contains(&c.state) {
            return Err(MachineError::BadConfig { config: c.to_string(), reason: "unknown command number".into() });
        }
        Ok(())
    }

    /// Entry command used by the input encoding.
    pub fn start_command(&self) -> usize {
        self.commands.iter().map(|c| c.number).min().unwrap_or(0)
    }

    /// Input configuration `(start; m, 0, ..., 0)`.
    pub fn input(&self, m: u64) -> MinskyConfig {
        let mut coins = vec![0; self.glasses];
        if self.glasses > 0 {
            coins[0] = m;
        }
        MinskyConfig { state: self.start_command(), coins }
    }

    pub fn step(&self, c: &MinskyConfig) -> Vec<(usize, MinskyConfig)> {
        self.commands.iter().enumerate().filter_map(|(i, cmd)| cmd.apply(c).map(|n| (i, n))).collect()
    }

    /// All configurations with coin total at most `size`, over every command number.
    pub fn configs_up_to(&self, size: u64) -> Vec<MinskyConfig> {
        let mut out = Vec::new();
        let mut coins = vec![0u64; self.glasses];
        fn rec(k: usize, left: u64, coins: &mut Vec<u64>, states: &BTreeSet<usize>, out: &mut Vec<MinskyConfig>) {
            if k == coins.len() {
                for &s in states {
                    out.push(MinskyConfig { state: s, coins: coins.clone() });
                }
                return;
            }
            for v in 0..=left {
                coins[k] = v;
                rec(k + 1, left - v, coins, states, out);
            }
            coins[k] = 0;
        }
        rec(0, size, &mut coins, &self.command_numbers(), &mut out);
        out
    }

    /// Parse the line-based text format.
    pub fn parse(text: &str) -> Result<Self> {
        let mut glasses = None;
        let mut commands = Vec::new();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |col: usize, msg: &str| MachineError::Parse { line: ln + 1, col, msg: msg.to_string() };
            let col_of = |tok: &str| raw.find(tok).map(|p| p + 1).unwrap_or(1);
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks[0] {
                "minsky" => {
                    let g = toks
                        .get(1)
                        .and_then(|t| t.strip_prefix("glasses="))
                        .ok_or_else(|| err(col_of("minsky"), "expected `minsky glasses=K`"))?;
                    glasses = Some(g.parse::<usize>().map_err(|_| err(col_of(g), "bad glass count"))?);
                }
                "cmd" => {
                    let num_tok = toks.get(1).ok_or_else(|| err(1, "missing command number"))?;
                    let number: usize = num_tok.parse().map_err(|_| err(col_of(num_tok), "bad command number"))?;
                    if toks.get(2) == Some(&"stop") {
                        if number != 0 {
                            return Err(err(col_of("stop"), "only command 0 may be stop"));
                        }
                        continue;
                    }
                    let (mut sub, mut zero, mut add) = (vec![], vec![], vec![]);
                    let mut cur: Option<&mut Vec<usize>> = None;
                    let mut target = None;
                    let mut i = 2;
                    while i < toks.len() {
                        let t = toks[i];
                        match t {
                            "sub" => cur = Some(&mut sub),
                            "if0" => cur = Some(&mut zero),
                            "add" => cur = Some(&mut add),
                            "nop" => cur = None,
                            "->" => {
                                let tt = toks.get(i + 1).ok_or_else(|| err(col_of("->"), "missing target"))?;
                                target = Some(tt.parse::<usize>().map_err(|_| err(col_of(tt), "bad target"))?);
                                if i + 2 != toks.len() {
                                    return Err(err(col_of(toks[i + 2]), "trailing tokens"));
                                }
                                break;
                            }
                            _ => {
                                let g: usize = t.parse().map_err(|_| err(col_of(t), "expected glass index"))?;
                                match cur.as_deref_mut() {
                                    Some(v) => v.push(g),
                                    None => return Err(err(col_of(t), "glass index outside sub/if0/add")),
                                }
                            }
                        }
                        i += 1;
                    }
                    let target = target.ok_or_else(|| err(raw.len().max(1), "missing `-> target`"))?;
                    commands.push(Command::new(number, &sub, &zero, &add, target));
                }
                other => return Err(err(col_of(other), &format!("unknown directive `{}`", other))),
            }
        }
        let glasses = glasses.ok_or(MachineError::Parse { line: 1, col: 1, msg: "missing `minsky glasses=K` header".into() })?;
        MinskyMachine::new(glasses, commands)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("minsky glasses={}\n", self.glasses);
        for c in &self.commands {
            s.push_str(&c.to_string());
            s.push('\n');
        }
        s.push_str("cmd 0 stop\n");
        s
    }

    /// The machine restricted to configurations whose empty glasses lie in
    /// `allowed_empty`: commands testing other glasses for zero are dropped.
    pub fn restricted(&self, allowed_empty: &BTreeSet<usize>) -> MinskyMachine {
        let commands = self.commands.iter().filter(|c| c.zero.iter().all(|g| allowed_empty.contains(g))).cloned().collect();
        MinskyMachine { glasses: self.glasses, commands }
    }
}

impl Machine for MinskyMachine {
    type Config = MinskyConfig;

    fn successors(&self, c: &MinskyConfig) -> Vec<(usize, MinskyConfig)> {
        self.step(c)
    }

    fn predecessors(&self, c: &MinskyConfig) -> Vec<(usize, MinskyConfig)> {
        self.commands.iter().enumerate().filter_map(|(i, cmd)| cmd.apply_inverse(c).map(|p| (i, p))).collect()
    }

    fn is_accepting(&self, c: &MinskyConfig) -> bool {
        c.state == 0
    }

    fn is_deterministic(&self) -> bool {
        self.validate().map(|r| r.deterministic).unwrap_or(false)
    }

    fn config_size(&self, c: &MinskyConfig) -> usize {
        c.size() as usize
    }
}

pub const M_DEC: &str = "minsky glasses=2\ncmd 1 sub 1 -> 1\ncmd 1 if0 1 -> 0\ncmd 0 stop\n";
pub const M_PAR: &str = "minsky glasses=2\ncmd 1 sub 1 -> 2\ncmd 1 if0 1 -> 0\ncmd 2 sub 1 -> 1\ncmd 0 stop\n";

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::{run, sym_equivalent, RunStatus};
    use crate::Tri;

    fn c(s: usize, e: &[u64]) -> MinskyConfig {
        MinskyConfig::new(s, e)
    }

    #[test]
    fn parse_round_trip() {
        let m = MinskyMachine::parse(M_PAR).unwrap();
        assert_eq!(MinskyMachine::parse(&m.to_text()).unwrap(), m);
    }

    #[test]
    fn determinism() {
        let m = MinskyMachine::parse(M_DEC).unwrap();
        assert!(m.validate().unwrap().deterministic);
        let mut bad = m.clone();
        bad.commands.push(Command::add(1, &[1], 1));
        assert!(!bad.validate().unwrap().deterministic);
        assert!(MinskyMachine::parse("minsky glasses=2\ncmd 1 sub 1 -> 7\n").is_err());
        assert!(MinskyMachine::parse("minsky glasses=2\ncmd 1 sub 3 -> 1\n").is_err());
    }

    #[test]
    fn steps_and_runs() {
        let dec = MinskyMachine::parse(M_DEC).unwrap();
        let par = MinskyMachine::parse(M_PAR).unwrap();
        assert_eq!(dec.step(&c(1, &[3, 0])), vec![(0, c(1, &[2, 0]))]);
        assert_eq!(dec.step(&c(1, &[0, 5])), vec![(1, c(0, &[0, 5]))]);
        assert!(par.step(&c(2, &[0, 1])).is_empty());
        let r = run(&dec, &c(1, &[3, 0]), 100).unwrap();
        assert!(r.accepted());
        assert_eq!(r.len(), 4);
        let r = run(&par, &c(1, &[3, 0]), 100).unwrap();
        assert_eq!(r.status, RunStatus::HaltedNonAccepting(c(2, &[0, 0])));
        let r = run(&dec, &c(1, &[3, 0]), 2).unwrap();
        assert_eq!(r.status, RunStatus::BoundExceeded);
    }

    #[test]
    fn equivalence_examples() {
        let par = MinskyMachine::parse(M_PAR).unwrap();
        assert_eq!(sym_equivalent(&par, &c(1, &[1, 1]), &c(2, &[0, 1]), 1000).answer, Tri::Yes);
        assert_eq!(sym_equivalent(&par, &c(2, &[0, 1]), &c(2, &[0, 2]), 1000).answer, Tri::No);
    }

    #[test]
    fn inverse_undoes_command() {
        let m = MinskyMachine::new(3, vec![Command::new(1, &[1], &[3], &[2, 2], 1)]).unwrap();
        let a = c(1, &[2, 0, 0]);
        let b = m.commands[0].apply(&a).unwrap();
        assert_eq!(b, c(1, &[1, 2, 0]));
        assert_eq!(m.commands[0].apply_inverse(&b), Some(a));
        assert_eq!(m.commands[0].apply_inverse(&c(1, &[0, 2, 1])), None);
    }

    #[test]
    fn config_literal() {
        assert_eq!(MinskyConfig::parse("(1; 3,0)").unwrap(), c(1, &[3, 0]));
        assert_eq!(c(2, &[0, 1]).to_string(), "(2; 0,1)");
    }
}
