// Test-side oracles, written directly against the machine definitions and
// sharing no search code with the library.
#![allow(dead_code)]

pub mod free;
pub mod tmodel;

use std::collections::{BTreeSet, HashSet, VecDeque};

use forge::machines::{Command, Machine, MinskyConfig, MinskyMachine};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const M_DEC: &str = include_str!("../data/m_dec.mm");
pub const M_PAR: &str = include_str!("../data/m_par.mm");
pub const TM_PARITY: &str = include_str!("../data/parity.tm");
pub const Z2: &str = include_str!("../data/z2.grp");

pub fn m_dec() -> MinskyMachine {
    MinskyMachine::parse(M_DEC).unwrap()
}

pub fn m_par() -> MinskyMachine {
    MinskyMachine::parse(M_PAR).unwrap()
}

pub fn cfg(state: usize, coins: &[u64]) -> MinskyConfig {
    MinskyConfig::new(state, coins)
}

/// One application of a command, straight from its sub/zero/add lists.
pub fn fire(cmd: &Command, c: &MinskyConfig) -> Option<MinskyConfig> {
    if cmd.number != c.state {
        return None;
    }
    let target = cmd.target?;
    let mut coins: Vec<i64> = c.coins.iter().map(|&x| x as i64).collect();
    if cmd.zero.iter().any(|&g| coins[g - 1] != 0) {
        return None;
    }
    for &g in &cmd.sub {
        coins[g - 1] -= 1;
    }
    if coins.iter().any(|&x| x < 0) {
        return None;
    }
    for &g in &cmd.add {
        coins[g - 1] += 1;
    }
    Some(MinskyConfig { state: target, coins: coins.into_iter().map(|x| x as u64).collect() })
}

pub fn unfire(cmd: &Command, c: &MinskyConfig) -> Option<MinskyConfig> {
    let target = cmd.target?;
    if target != c.state {
        return None;
    }
    let mut coins: Vec<i64> = c.coins.iter().map(|&x| x as i64).collect();
    for &g in &cmd.add {
        coins[g - 1] -= 1;
    }
    if coins.iter().any(|&x| x < 0) {
        return None;
    }
    for &g in &cmd.sub {
        coins[g - 1] += 1;
    }
    if cmd.zero.iter().any(|&g| coins[g - 1] != 0) {
        return None;
    }
    Some(MinskyConfig { state: cmd.number, coins: coins.into_iter().map(|x| x as u64).collect() })
}

pub fn oracle_run(m: &MinskyMachine, c: &MinskyConfig, limit: usize) -> Option<bool> {
    let mut cur = c.clone();
    for _ in 0..=limit {
        if cur.state == 0 {
            return Some(true);
        }
        match m.commands.iter().find_map(|k| fire(k, &cur)) {
            Some(n) => cur = n,
            None => return Some(false),
        }
    }
    None
}

/// Breadth-first search of the undirected computation graph, `None` when
/// more than `limit` configurations are reached without meeting `b`.
pub fn oracle_sym(m: &MinskyMachine, a: &MinskyConfig, b: &MinskyConfig, limit: usize) -> Option<bool> {
    let mut seen = HashSet::from([a.clone()]);
    let mut queue = VecDeque::from([a.clone()]);
    while let Some(c) = queue.pop_front() {
        if &c == b {
            return Some(true);
        }
        for k in &m.commands {
            for n in [fire(k, &c), unfire(k, &c)].into_iter().flatten() {
                if seen.insert(n.clone()) {
                    if seen.len() > limit {
                        return None;
                    }
                    queue.push_back(n);
                }
            }
        }
    }
    Some(false)
}

// Every configuration reachable from `a` in the Sym graph without any glass
// exceeding `cap`; finite, so the search always ends.
pub fn boxed_class(m: &MinskyMachine, a: &MinskyConfig, cap: u64) -> HashSet<MinskyConfig> {
    let mut seen = HashSet::from([a.clone()]);
    let mut queue = VecDeque::from([a.clone()]);
    while let Some(c) = queue.pop_front() {
        for k in &m.commands {
            for n in [fire(k, &c), unfire(k, &c)].into_iter().flatten() {
                if n.coins.iter().all(|&x| x <= cap) && seen.insert(n.clone()) {
                    queue.push_back(n);
                }
            }
        }
    }
    seen
}

pub fn configs(m: &MinskyMachine, max_coins: u64) -> Vec<MinskyConfig> {
    let states: BTreeSet<usize> = m.commands.iter().map(|c| c.number).chain([0]).collect();
    let mut out = Vec::new();
    for s in states {
        let mut coins = vec![0u64; m.glasses];
        loop {
            out.push(MinskyConfig { state: s, coins: coins.clone() });
            let mut i = 0;
            while i < coins.len() && coins[i] == max_coins {
                coins[i] = 0;
                i += 1;
            }
            if i == coins.len() {
                break;
            }
            coins[i] += 1;
        }
    }
    out
}

/// A random deterministic 2-glass machine with at most `max_commands`
/// commands: each number either acts unconditionally or branches on one
/// glass being empty.
pub fn random_machine(seed: u64, max_commands: usize) -> MinskyMachine {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let states = rng.gen_range(1..=3usize);
        let mut lines = vec!["minsky glasses=2".to_string()];
        let mut count = 0;
        for i in 1..=states {
            let t = |rng: &mut ChaCha8Rng| rng.gen_range(0..=states);
            let g = rng.gen_range(1..=2);
            if rng.gen_bool(0.5) && count + 2 <= max_commands {
                lines.push(format!("cmd {} if0 {} -> {}", i, g, t(&mut rng)));
                let act = if rng.gen_bool(0.5) { format!("sub {}", g) } else { format!("sub {} add {}", g, 3 - g) };
                lines.push(format!("cmd {} {} -> {}", i, act, t(&mut rng)));
                count += 2;
            } else if count < max_commands {
                let act = if rng.gen_bool(0.5) { "add" } else { "sub" };
                lines.push(format!("cmd {} {} {} -> {}", i, act, g, t(&mut rng)));
                count += 1;
            }
        }
        lines.push("cmd 0 stop".into());
        if let Ok(m) = MinskyMachine::parse(&lines.join("\n")) {
            if m.validate().map(|r| r.deterministic).unwrap_or(false) {
                return m;
            }
        }
    }
}

/// Small word problems with known answers: presentation, two words, and
/// whether they are equal.
pub const WORD_PROBLEMS: [(&str, &str, &str, bool); 10] = [
    ("group\ngen x y\nrel [x,y]\n", "x y", "y x", true),
    ("group\ngen x y\nrel [x,y]\n", "x", "y", false),
    ("semigroup\ngen a b\nrel a b = b a\n", "a b a", "a a b", true),
    ("semigroup\ngen a b\nrel a b = b a\n", "a b", "a", false),
    ("semigroup\ngen a\nrel a a = a\n", "a a a", "a", true),
    ("semigroup\ngen a b\nrel a a = a\n", "a b", "b a", false),
    ("group\ngen x\nrel x^3\n", "x^4", "x", true),
    ("group\ngen x\nrel x^3\n", "x", "x^2", false),
    ("group\ngen s t\nrel s^2\nrel t^3\nrel s t s t\n", "s t s", "t^-1", true),
    ("group\ngen s t\nrel s^2\nrel t^3\nrel s t s t\n", "s", "t", false),
];

pub fn any_word(p: &forge::rewriting::Presentation, s: &str) -> forge::rewriting::AnyWord {
    use forge::rewriting::{AnyWord, Kind};
    match p.kind {
        Kind::Semigroup => AnyWord::S(p.parse_sword(s).unwrap()),
        Kind::Group => AnyWord::G(p.parse_gword(s).unwrap()),
    }
}

/// Longest reduced computation of Sym(M) from `c`: the eccentricity of `c`
/// in its class, which is a tree for sym-universally halting machines.
pub fn eccentricity<M: Machine>(m: &M, c: &M::Config) -> usize
where
    M::Config: std::hash::Hash + Eq + Clone,
{
    let mut dist = std::collections::HashMap::from([(c.clone(), 0usize)]);
    let mut queue = VecDeque::from([c.clone()]);
    let mut far = 0;
    while let Some(x) = queue.pop_front() {
        let d = dist[&x];
        far = far.max(d);
        for (_, y) in m.successors(&x).into_iter().chain(m.predecessors(&x)) {
            if !dist.contains_key(&y) {
                dist.insert(y.clone(), d + 1);
                queue.push_back(y);
            }
        }
    }
    far
}
