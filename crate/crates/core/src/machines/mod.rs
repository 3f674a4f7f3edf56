//! Machine models and the generic exploration routines shared by them.
//!
//! Both Minsky machines and multi-tape Turing machines are partial injective
//! transformation systems on configurations. Everything that only depends on
//! that view (simulation, trajectories, Sym(M) exploration, equivalence) lives
//! here and is generic over [`Machine`].

pub mod minsky;
pub mod turing;

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;

use serde::Serialize;
use thiserror::Error;

use crate::Tri;

pub use minsky::{Command, MinskyConfig, MinskyMachine};
pub use turing::{Clause, Side, TapeConfig, TapeSpec, TmCommand, TmConfig, TuringMachine};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MachineError {
    #[error("malformed command #{index} ({command}): {reason}")]
    Malformed {
        index: usize,
        command: String,
        reason: String,
    },
    #[error("machine is not deterministic: {0}")]
    Nondeterministic(String),
    #[error("invalid configuration {config}: {reason}")]
    BadConfig { config: String, reason: String },
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("unsupported machine for this transform: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, MachineError>;

/// Outcome of a symbolic determinism check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub deterministic: bool,
    /// Pairs of command indices whose domains intersect, rendered for humans.
    pub violations: Vec<String>,
}

/// A machine viewed as a finite set of partial injective transformations.
pub trait Machine {
    type Config: Clone + Eq + Hash + Ord + Debug;

    /// Applicable commands and the configurations they produce.
    fn successors(&self, c: &Self::Config) -> Vec<(usize, Self::Config)>;

    /// Configurations from which some command leads to `c`.
    fn predecessors(&self, c: &Self::Config) -> Vec<(usize, Self::Config)>;

    fn is_accepting(&self, c: &Self::Config) -> bool;

    fn is_deterministic(&self) -> bool;

    fn config_size(&self, c: &Self::Config) -> usize;
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum RunStatus<C> {
    Accepted,
    HaltedNonAccepting(C),
    BoundExceeded,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunOutcome<C> {
    pub status: RunStatus<C>,
    /// Every visited configuration, starting with the initial one.
    pub configs: Vec<C>,
    /// `commands[k]` takes `configs[k]` to `configs[k + 1]`.
    pub commands: Vec<usize>,
}

impl<C> RunOutcome<C> {
    /// Number of steps taken.
    pub fn len(&self) -> usize {
        self.commands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.commands.is_empty()
    }

    pub fn accepted(&self) -> bool {
        matches!(self.status, RunStatus::Accepted)
    }
}

/// Follow the unique trajectory of a deterministic machine.
pub fn run<M: Machine>(m: &M, start: &M::Config, max_steps: usize) -> Result<RunOutcome<M::Config>> {
    if !m.is_deterministic() {
        return Err(MachineError::Nondeterministic(
            "run needs a deterministic machine; use sym_equivalent for Sym(M) exploration".into(),
        ));
    }
    Ok(run_unchecked(m, start, max_steps))
}

// Caller guarantees determinism (or accepts taking the first successor).
pub(crate) fn run_unchecked<M: Machine>(m: &M, start: &M::Config, max_steps: usize) -> RunOutcome<M::Config> {
    let mut configs = vec![start.clone()];
    let mut commands = Vec::new();
    loop {
        let cur = configs.last().unwrap();
        if m.is_accepting(cur) {
            return RunOutcome { status: RunStatus::Accepted, configs, commands };
        }
        let mut next = m.successors(cur);
        if next.is_empty() {
            let last = cur.clone();
            return RunOutcome { status: RunStatus::HaltedNonAccepting(last), configs, commands };
        }
        if commands.len() >= max_steps {
            return RunOutcome { status: RunStatus::BoundExceeded, configs, commands };
        }
        let (cmd, c) = next.swap_remove(0);
        commands.push(cmd);
        configs.push(c);
    }
}

/// How a forward trajectory ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryEnd {
    Accepted,
    Halted,
    /// The trajectory revisited a configuration; it is complete.
    Cycle,
    Bound,
}

#[derive(Debug, Clone)]
pub struct Trajectory<C> {
    pub configs: Vec<C>,
    pub end: TrajectoryEnd,
}

/// Forward trajectory of a deterministic machine with cycle detection.
pub fn trajectory<M: Machine>(m: &M, start: &M::Config, max_steps: usize) -> Trajectory<M::Config> {
    let mut configs = vec![start.clone()];
    let mut seen: HashSet<M::Config> = HashSet::new();
    seen.insert(start.clone());
    loop {
        let cur = configs.last().unwrap();
        if m.is_accepting(cur) {
            return Trajectory { configs, end: TrajectoryEnd::Accepted };
        }
        let next = m.successors(cur);
        let Some((_, c)) = next.into_iter().next() else {
            return Trajectory { configs, end: TrajectoryEnd::Halted };
        };
        if seen.contains(&c) {
            return Trajectory { configs, end: TrajectoryEnd::Cycle };
        }
        if configs.len() > max_steps {
            return Trajectory { configs, end: TrajectoryEnd::Bound };
        }
        seen.insert(c.clone());
        configs.push(c);
    }
}

/// Equivalence answer with a connecting Sym(M) path on `Yes`.
#[derive(Debug, Clone)]
pub struct SymAnswer<C> {
    pub answer: Tri,
    pub witness: Option<Vec<C>>,
}

/// Decide `c1 ≡_M c2`.
///
/// Deterministic machines: a reduced Sym(M) path is a forward run followed
/// by a backward run, so the two configurations are equivalent exactly when
/// their forward trajectories meet. Nondeterministic machines fall back to a
/// bounded breadth-first search of the Sym(M) graph.
pub fn sym_equivalent<M: Machine>(
    m: &M,
    c1: &M::Config,
    c2: &M::Config,
    bound: usize,
) -> SymAnswer<M::Config> {
    if c1 == c2 {
        return SymAnswer { answer: Tri::Yes, witness: Some(vec![c1.clone()]) };
    }
    if !m.is_deterministic() {
        return sym_bfs(m, c1, c2, bound);
    }
    let t1 = trajectory(m, c1, bound);
    let t2 = trajectory(m, c2, bound);
    let index: HashMap<&M::Config, usize> = t1.configs.iter().enumerate().map(|(i, c)| (c, i)).collect();
    for (j, c) in t2.configs.iter().enumerate() {
        if let Some(&i) = index.get(c) {
            let mut path: Vec<M::Config> = t1.configs[..=i].to_vec();
            path.extend(t2.configs[..j].iter().rev().cloned());
            return SymAnswer { answer: Tri::Yes, witness: Some(path) };
        }
    }
    let complete = t1.end != TrajectoryEnd::Bound && t2.end != TrajectoryEnd::Bound;
    SymAnswer { answer: if complete { Tri::No } else { Tri::Unknown }, witness: None }
}

/// Breadth-first search over the Sym(M) graph, at most `bound` configurations.
pub fn sym_bfs<M: Machine>(m: &M, c1: &M::Config, c2: &M::Config, bound: usize) -> SymAnswer<M::Config> {
    let mut parent: HashMap<M::Config, Option<M::Config>> = HashMap::new();
    let mut queue = VecDeque::new();
    parent.insert(c1.clone(), None);
    queue.push_back(c1.clone());
    while let Some(cur) = queue.pop_front() {
        if &cur == c2 {
            let mut path = vec![cur.clone()];
            let mut at = cur;
            while let Some(Some(p)) = parent.get(&at) {
                path.push(p.clone());
                at = p.clone();
            }
            path.reverse();
            return SymAnswer { answer: Tri::Yes, witness: Some(path) };
        }
        for (_, n) in m.successors(&cur).into_iter().chain(m.predecessors(&cur)) {
            if parent.contains_key(&n) {
                continue;
            }
            if parent.len() >= bound {
                return SymAnswer { answer: Tri::Unknown, witness: None };
            }
            parent.insert(n.clone(), Some(cur.clone()));
            queue.push_back(n);
        }
    }
    SymAnswer { answer: Tri::No, witness: None }
}

/// The full Sym(M)-class of `c`, or `None` if it has more than `bound` members.
pub fn sym_class<M: Machine>(m: &M, c: &M::Config, bound: usize) -> Option<BTreeSet<M::Config>> {
    let mut seen: HashSet<M::Config> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(c.clone());
    queue.push_back(c.clone());
    while let Some(cur) = queue.pop_front() {
        for (_, n) in m.successors(&cur).into_iter().chain(m.predecessors(&cur)) {
            if seen.insert(n.clone()) {
                if seen.len() > bound {
                    return None;
                }
                queue.push_back(n);
            }
        }
    }
    Some(seen.into_iter().collect())
}

/// Search the Sym(M)-class of `c` for a configuration satisfying `pred`.
///
/// `Yes` when found, `No` when the class was exhausted, `Unknown` on budget.
pub fn sym_class_find<M: Machine>(
    m: &M,
    c: &M::Config,
    bound: usize,
    mut pred: impl FnMut(&M::Config) -> bool,
) -> (Tri, Option<M::Config>) {
    let mut seen: HashSet<M::Config> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(c.clone());
    queue.push_back(c.clone());
    while let Some(cur) = queue.pop_front() {
        if pred(&cur) {
            return (Tri::Yes, Some(cur));
        }
        for (_, n) in m.successors(&cur).into_iter().chain(m.predecessors(&cur)) {
            if seen.insert(n.clone()) {
                if seen.len() > bound {
                    return (Tri::Unknown, None);
                }
                queue.push_back(n);
            }
        }
    }
    (Tri::No, None)
}

/// Whether `c` is accepted, i.e. connected to an accepting configuration.
pub fn accepted<M: Machine>(m: &M, c: &M::Config, bound: usize) -> Tri {
    if m.is_deterministic() {
        let t = trajectory(m, c, bound);
        match t.end {
            TrajectoryEnd::Accepted => Tri::Yes,
            TrajectoryEnd::Halted | TrajectoryEnd::Cycle => Tri::No,
            TrajectoryEnd::Bound => Tri::Unknown,
        }
    } else {
        sym_class_find(m, c, bound, |x| m.is_accepting(x)).0
    }
}

/// Longest computation of `m` from `c` without repeated configurations,
/// explored depth-first; `None` if some such computation exceeds `limit`.
pub fn longest_forward<M: Machine>(m: &M, c: &M::Config, limit: usize) -> Option<usize> {
    fn go<M: Machine>(
        m: &M,
        c: &M::Config,
        on_path: &mut HashSet<M::Config>,
        depth: usize,
        limit: usize,
    ) -> Option<usize> {
        if depth > limit {
            return None;
        }
        let mut best = depth;
        for (_, n) in m.successors(c) {
            if on_path.contains(&n) {
                continue;
            }
            on_path.insert(n.clone());
            let r = go(m, &n, on_path, depth + 1, limit);
            on_path.remove(&n);
            best = best.max(r?);
        }
        Some(best)
    }
    let mut on_path = HashSet::new();
    on_path.insert(c.clone());
    go(m, c, &mut on_path, 0, limit)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HaltingMode {
    /// Every computation of M from every small configuration is short.
    Forward,
    /// Sym(M) halts from every small non-accepted configuration.
    Sym,
}

#[derive(Debug, Clone, Serialize)]
pub struct HaltingReport<C> {
    pub examined: usize,
    pub counterexamples: Vec<C>,
    /// Sym mode only: accepted configurations whose Sym-class overflowed the
    /// bound. These do not violate sym-universal halting.
    pub unbounded_accepted: Vec<C>,
}

/// Empirical universal-halting check over an explicit configuration list.
pub fn check_halting<M: Machine>(
    m: &M,
    configs: impl IntoIterator<Item = M::Config>,
    step_bound: usize,
    mode: HaltingMode,
) -> HaltingReport<M::Config> {
    let mut report = HaltingReport { examined: 0, counterexamples: Vec::new(), unbounded_accepted: Vec::new() };
    for c in configs {
        report.examined += 1;
        match mode {
            HaltingMode::Forward => {
                if longest_forward(m, &c, step_bound).is_none() {
                    report.counterexamples.push(c);
                }
            }
            HaltingMode::Sym => {
                if sym_class(m, &c, step_bound).is_some() {
                    continue;
                }
                if accepted(m, &c, step_bound) == Tri::Yes {
                    report.unbounded_accepted.push(c);
                } else {
                    report.counterexamples.push(c);
                }
            }
        }
    }
    report
}

/// Per-input-size measurements of a deterministic machine.
#[derive(Debug, Clone, Serialize)]
pub struct StatsRow {
    pub n: usize,
    /// Accepting computation length, when the input is accepted.
    pub time: Option<usize>,
    /// Halting time, when the input is halted without acceptance.
    pub cotime: Option<usize>,
    /// Largest configuration size along the computation.
    pub space: usize,
    pub bound_exceeded: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MachineStats {
    pub step_bound: usize,
    pub rows: Vec<StatsRow>,
}

impl MachineStats {
    fn prefix_max(&self, f: impl Fn(&StatsRow) -> Option<usize>) -> Vec<usize> {
        let mut acc = 0;
        self.rows
            .iter()
            .map(|r| {
                acc = acc.max(f(r).unwrap_or(0));
                acc
            })
            .collect()
    }

    /// T_M(n) as a monotone function (max over inputs of size ≤ n).
    pub fn time_function(&self) -> Vec<usize> {
        self.prefix_max(|r| r.time)
    }

    /// Ψ(n) as a monotone function.
    pub fn cotime_function(&self) -> Vec<usize> {
        self.prefix_max(|r| r.cotime)
    }

    pub fn space_function(&self) -> Vec<usize> {
        self.prefix_max(|r| if r.time.is_some() { Some(r.space) } else { None })
    }

    pub fn row(&self, n: usize) -> Option<&StatsRow> {
        self.rows.iter().find(|r| r.n == n)
    }
}

/// Measure time, co-time and space on the inputs `input(0..=n_max)`.
pub fn stats<M: Machine>(
    m: &M,
    n_max: usize,
    step_bound: usize,
    input: impl Fn(usize) -> M::Config,
) -> Result<MachineStats> {
    if !m.is_deterministic() {
        return Err(MachineError::Nondeterministic("stats needs a deterministic machine".into()));
    }
    let mut rows = Vec::new();
    for n in 0..=n_max {
        let out = run_unchecked(m, &input(n), step_bound);
        let space = out.configs.iter().map(|c| m.config_size(c)).max().unwrap_or(0);
        let (time, cotime, bound_exceeded) = match out.status {
            RunStatus::Accepted => (Some(out.len()), None, false),
            RunStatus::HaltedNonAccepting(_) => (None, Some(out.len()), false),
            RunStatus::BoundExceeded => (None, None, true),
        };
        rows.push(StatsRow { n, time, cotime, space, bound_exceeded });
    }
    Ok(MachineStats { step_bound, rows })
}
