// Depth lower-bound witnesses for the augmented machines M_n.
//
// In any quotient of S(M_n) where a_{K+1}^D = a_{K+1}^{2D} and
// a_{K+2}^D = a_{K+2}^{2D}, the word of a configuration that runs for at
// least D steps is zero. The chain below spells this out letter by letter:
// run D lifted steps, insert D matched coins, identify, drain, stop.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{build_presentation, Layout, Result, SemigroupError};
use crate::machines::{self, Command, MinskyConfig, MinskyMachine};
use crate::rewriting::{apply_step, replay, AnyWord, DerivationStep, Presentation, SWord};
use crate::transforms::Augmented;

const RUN_LIMIT: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Stage {
    Run,
    Insert,
    Identify,
    Drain,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepthFailure {
    pub stage: Stage,
    pub step: usize,
    pub reason: String,
}

impl fmt::Display for DepthFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} stage, step {}: {}", self.stage, self.step, self.reason)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DepthWitness {
    pub d: u64,
    pub input: MinskyConfig,
    /// Size of the input configuration.
    pub n: usize,
    pub halting_time: usize,
    /// Co-time function of the source machine at `n`, when it is deterministic.
    pub psi: Option<usize>,
    /// S(M_n) plus the two identification relations (the last two).
    pub presentation: Presentation,
    pub start: SWord,
    pub steps: Vec<DerivationStep>,
    /// Index one past the last step of each stage.
    pub stage_ends: Vec<(Stage, usize)>,
}

impl DepthWitness {
    /// Replay every step; `Err(i)` names the first step that fails.
    pub fn replay(&self) -> std::result::Result<(), usize> {
        match replay(&self.presentation, &AnyWord::S(self.start.clone()), &self.steps)? {
            AnyWord::S(SWord::Zero) => Ok(()),
            _ => Err(self.steps.len()),
        }
    }
}

struct Builder {
    pres: Presentation,
    cur: Vec<usize>,
    steps: Vec<DerivationStep>,
}

impl Builder {
    fn push(&mut self, position: usize, relation: usize, forward: bool) -> std::result::Result<(), String> {
        let before = AnyWord::S(SWord::Word(self.cur.clone()));
        let mut step = DerivationStep { position, relation, forward, rotation: 0, split: 0, before: before.clone(), after: before.clone() };
        let after = apply_step(&self.pres, &before, &step).ok_or_else(|| format!("relation {} does not apply at {}", relation, position))?;
        step.after = after.clone();
        self.steps.push(step);
        self.cur = match after {
            AnyWord::S(SWord::Word(w)) => w,
            _ => vec![],
        };
        Ok(())
    }

    fn swap_relation(&self, x: usize, y: usize) -> Option<(usize, bool)> {
        let (xy, yx) = (SWord::word(&[x, y]), SWord::word(&[y, x]));
        self.pres.relations.iter().enumerate().find_map(|(i, (l, r))| {
            if *l == xy && *r == yx {
                Some((i, true))
            } else if *l == yx && *r == xy {
                Some((i, false))
            } else {
                None
            }
        })
    }

    /// Reorder the current word into `target` by commutativity relations.
    fn arrange(&mut self, target: &[usize]) -> std::result::Result<(), String> {
        for p in 0..target.len() {
            let i = (p..self.cur.len()).find(|&i| self.cur[i] == target[p]).ok_or("letter missing")?;
            for j in (p + 1..=i).rev() {
                let (x, y) = (self.cur[j - 1], self.cur[j]);
                let (rel, fwd) = self.swap_relation(x, y).ok_or_else(|| format!("generators {} and {} do not commute", x, y))?;
                self.push(j - 1, rel, fwd)?;
            }
        }
        Ok(())
    }

    fn sort(&mut self) -> std::result::Result<(), String> {
        let mut t = self.cur.clone();
        t.sort();
        self.arrange(&t)
    }

    /// Bring `pattern` to the front (rest in canonical order) and rewrite it.
    fn rewrite_front(&mut self, pattern: &[usize], relation: usize, forward: bool) -> std::result::Result<(), String> {
        let mut rest = self.cur.clone();
        for x in pattern {
            let i = rest.iter().position(|y| y == x).ok_or("pattern letter missing")?;
            rest.remove(i);
        }
        rest.sort();
        let mut target = pattern.to_vec();
        target.extend(rest);
        self.arrange(&target)?;
        self.push(0, relation, forward)
    }
}

fn fail<T>(stage: Stage, step: usize, reason: String) -> Result<T> {
    Err(SemigroupError::Depth(DepthFailure { stage, step, reason }))
}

fn source_machine(aug: &Augmented) -> Result<MinskyMachine> {
    let k = aug.source_glasses;
    let cmds = aug.machine.commands[..aug.source_commands]
        .iter()
        .map(|c| {
            let zero: Vec<usize> = c.zero.iter().copied().filter(|&g| g <= k).collect();
            let add: Vec<usize> = c.add.iter().copied().filter(|&g| g <= k).collect();
            Command::new(c.number, &c.sub, &zero, &add, c.target.unwrap_or(0))
        })
        .collect();
    Ok(MinskyMachine::new(k, cmds)?)
}

fn lifted_step(aug: &Augmented, c: &MinskyConfig) -> Result<Option<(usize, MinskyConfig)>> {
    let mut found = None;
    for (i, cmd) in aug.machine.commands[..aug.source_commands].iter().enumerate() {
        if let Some(next) = cmd.apply(c) {
            if found.is_some() {
                return Err(SemigroupError::Precondition(format!("source machine is nondeterministic at {}", c)));
            }
            found = Some((i, next));
        }
    }
    Ok(found)
}

/// Build and replay the four-stage chain for a source input configuration.
pub fn depth_witness(aug: &Augmented, input: &MinskyConfig, d: u64) -> Result<DepthWitness> {
    let k = aug.source_glasses;
    if input.coins.len() != k {
        return Err(SemigroupError::Precondition(format!("input {} does not have {} glasses", input, k)));
    }

    let start_cfg = aug.lift(input, (0, 0));
    let mut halting_time = None;
    let mut c = start_cfg.clone();
    for t in 0..RUN_LIMIT {
        if c.state == 0 {
            return Err(SemigroupError::Precondition(format!("input {} is accepted", input)));
        }
        match lifted_step(aug, &c)? {
            Some((_, next)) => c = next,
            None => {
                halting_time = Some(t);
                break;
            }
        }
    }
    let Some(halting_time) = halting_time else {
        return Err(SemigroupError::Precondition(format!("input {} does not halt within {} steps", input, RUN_LIMIT)));
    };
    let psi = source_machine(aug)
        .ok()
        .and_then(|src| machines::stats(&src, input.size() as usize, RUN_LIMIT, |i| src.input(i as u64)).ok())
        .map(|s| s.cotime_function()[input.size() as usize]);

    let base = build_presentation(&aug.machine);
    let l = Layout::of(&aug.machine);
    let minsky_offset = base.relations.len() - aug.machine.commands.len();
    let (x1, x2) = (l.a(k + 1), l.a(k + 2));
    let mut pres = base;
    let power = |g: usize, e: u64| SWord::Word(vec![g; e as usize]);
    pres.relations.push((power(x1, d), power(x1, 2 * d)));
    pres.relations.push((power(x2, d), power(x2, 2 * d)));
    let ident = pres.relations.len() - 2;

    let start = super::config_word(&start_cfg).to_sword(&l);
    let SWord::Word(start_letters) = start.clone() else {
        return Err(SemigroupError::Precondition("input word is zero".into()));
    };
    let mut b = Builder { pres, cur: start_letters, steps: vec![] };
    let mut stage_ends = Vec::new();

    // (i) D lifted commands of M, each adding a coin to glass K+1.
    let mut c = start_cfg;
    for s in 0..d as usize {
        let Some((ci, next)) = lifted_step(aug, &c)? else {
            return fail(Stage::Run, s, format!("the machine halts after {} steps", halting_time));
        };
        let rel = minsky_offset + ci;
        let SWord::Word(lhs) = b.pres.relations[rel].0.clone() else { unreachable!() };
        b.rewrite_front(&lhs, rel, true).and_then(|_| b.sort()).or_else(|e| fail(Stage::Run, s, e))?;
        c = next;
    }
    stage_ends.push((Stage::Run, b.steps.len()));

    // The weight-0 commands of the current state.
    let j = c.state;
    let find = |pred: &dyn Fn(&Command) -> bool| {
        aug.machine.commands[aug.source_commands..]
            .iter()
            .position(|cmd| cmd.number == j && pred(cmd))
            .map(|i| minsky_offset + aug.source_commands + i)
    };
    let Some(add_rel) = find(&|cmd| !cmd.add.is_empty()) else {
        return fail(Stage::Insert, 0, format!("no Add(K+1,K+2) command numbered {}", j));
    };
    let Some(stop_rel) = find(&|cmd| !cmd.zero.is_empty()) else {
        return fail(Stage::Drain, 0, format!("no empty-guard command numbered {}", j));
    };

    // (ii) q_j = q_j a_{K+1} a_{K+2}, D times.
    for s in 0..d as usize {
        b.rewrite_front(&[l.q(j)], add_rel, true).and_then(|_| b.sort()).or_else(|e| fail(Stage::Insert, s, e))?;
    }
    stage_ends.push((Stage::Insert, b.steps.len()));

    // (iii) a_{K+1}^{2D} -> a_{K+1}^D.
    if d == 0 {
        return fail(Stage::Identify, 0, "the identification needs D > 0".into());
    }
    let pos = b.cur.iter().position(|&g| g == x1).unwrap_or(0);
    b.push(pos, ident, false).or_else(|e| fail(Stage::Identify, 0, e))?;
    stage_ends.push((Stage::Identify, b.steps.len()));

    // (iv) Drain the matched coins, fire the guard, then q_0 = 0.
    for s in 0..d as usize {
        b.rewrite_front(&[l.q(j), x1, x2], add_rel, false).and_then(|_| b.sort()).or_else(|e| fail(Stage::Drain, s, e))?;
    }
    let SWord::Word(guard) = b.pres.relations[stop_rel].0.clone() else { unreachable!() };
    b.rewrite_front(&guard, stop_rel, true).or_else(|e| fail(Stage::Drain, d as usize, e))?;
    let stop = b.pres.relations.iter().position(|(lhs, r)| *lhs == SWord::word(&[l.q(0)]) && *r == SWord::Zero).unwrap();
    b.push(0, stop, true).or_else(|e| fail(Stage::Drain, d as usize + 1, e))?;
    stage_ends.push((Stage::Drain, b.steps.len()));

    let w = DepthWitness {
        d,
        input: input.clone(),
        n: input.size() as usize,
        halting_time,
        psi,
        presentation: b.pres,
        start,
        steps: b.steps,
        stage_ends,
    };
    if let Err(i) = w.replay() {
        return fail(Stage::Drain, i, "replay failed".into());
    }
    Ok(w)
}
