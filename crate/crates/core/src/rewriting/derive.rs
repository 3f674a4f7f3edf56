use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{free_reduce, inverse, GWord, Kind, Presentation, Result, RewriteError, SWord};

/// A word of either kind.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AnyWord {
    S(SWord),
    G(GWord),
}

/// One relator application.
///
/// Semigroups: replace the occurrence of one side of relation `relation`
/// at `position` by the other side (`forward` means left-to-right).
/// Groups: take relator `relation` (inverted unless `forward`), rotate it by
/// `rotation` to get `uv` with `|u| = split`, and replace the occurrence of
/// `u` at `position` by `v^-1`, then reduce freely.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationStep {
    pub position: usize,
    pub relation: usize,
    pub forward: bool,
    pub rotation: usize,
    pub split: usize,
    pub before: AnyWord,
    pub after: AnyWord,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct StepRef {
    position: usize,
    relation: usize,
    forward: bool,
    rotation: usize,
    split: usize,
}

fn find_all(hay: &[usize], needle: &[usize]) -> Vec<usize> {
    if needle.len() > hay.len() {
        return vec![];
    }
    (0..=hay.len() - needle.len()).filter(|&i| &hay[i..i + needle.len()] == needle).collect()
}

fn find_all_g(hay: &[i32], needle: &[i32]) -> Vec<usize> {
    if needle.len() > hay.len() {
        return vec![];
    }
    (0..=hay.len() - needle.len()).filter(|&i| &hay[i..i + needle.len()] == needle).collect()
}

fn semigroup_apply(pres: &Presentation, w: &[usize], s: StepRef) -> Option<SWord> {
    let (l, r) = pres.relations.get(s.relation)?;
    let (from, to) = if s.forward { (l, r) } else { (r, l) };
    let SWord::Word(from) = from else { return None };
    if from.is_empty() || s.position + from.len() > w.len() || &w[s.position..s.position + from.len()] != from.as_slice() {
        return None;
    }
    match to {
        SWord::Zero => Some(SWord::Zero),
        SWord::Word(to) => {
            let mut out = w[..s.position].to_vec();
            out.extend_from_slice(to);
            out.extend_from_slice(&w[s.position + from.len()..]);
            Some(SWord::Word(out))
        }
    }
}

fn rotated(pres: &Presentation, s: StepRef) -> Option<GWord> {
    let r = pres.relators.get(s.relation)?;
    let r = if s.forward { r.clone() } else { inverse(r) };
    if r.is_empty() || s.rotation >= r.len() || s.split > r.len() {
        return None;
    }
    let mut c = r[s.rotation..].to_vec();
    c.extend_from_slice(&r[..s.rotation]);
    Some(c)
}

fn group_apply(pres: &Presentation, w: &[i32], s: StepRef) -> Option<GWord> {
    let c = rotated(pres, s)?;
    let (u, v) = c.split_at(s.split);
    if s.position + u.len() > w.len() || &w[s.position..s.position + u.len()] != u {
        return None;
    }
    let mut out = w[..s.position].to_vec();
    out.extend(inverse(v));
    out.extend_from_slice(&w[s.position + u.len()..]);
    Some(free_reduce(&out))
}

fn apply_ref(pres: &Presentation, w: &AnyWord, s: StepRef) -> Option<AnyWord> {
    match w {
        AnyWord::S(SWord::Zero) => None,
        AnyWord::S(SWord::Word(v)) => semigroup_apply(pres, v, s).map(AnyWord::S),
        AnyWord::G(g) => group_apply(pres, g, s).map(AnyWord::G),
    }
}

/// Recompute the effect of a recorded step on `before`.
pub fn apply_step(pres: &Presentation, before: &AnyWord, step: &DerivationStep) -> Option<AnyWord> {
    let s = StepRef { position: step.position, relation: step.relation, forward: step.forward, rotation: step.rotation, split: step.split };
    apply_ref(pres, before, s)
}

/// Replay a derivation from `start`; returns the final word or the index of
/// the first step that does not replay.
pub fn replay(pres: &Presentation, start: &AnyWord, steps: &[DerivationStep]) -> std::result::Result<AnyWord, usize> {
    let mut cur = start.clone();
    for (i, st) in steps.iter().enumerate() {
        if st.before != cur {
            return Err(i);
        }
        match apply_step(pres, &cur, st) {
            Some(next) if next == st.after => cur = next,
            _ => return Err(i),
        }
    }
    Ok(cur)
}

fn neighbours(pres: &Presentation, w: &AnyWord, max_len: Option<usize>) -> Vec<(StepRef, AnyWord)> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    let fits = |x: &AnyWord| match (x, max_len) {
        (_, None) => true,
        (AnyWord::S(s), Some(m)) => s.len() <= m,
        (AnyWord::G(g), Some(m)) => g.len() <= m,
    };
    match w {
        AnyWord::S(SWord::Zero) => {}
        AnyWord::S(SWord::Word(v)) => {
            for (i, (l, r)) in pres.relations.iter().enumerate() {
                for (forward, from) in [(true, l), (false, r)] {
                    let SWord::Word(from) = from else { continue };
                    if from.is_empty() {
                        continue;
                    }
                    for p in find_all(v, from) {
                        let s = StepRef { position: p, relation: i, forward, rotation: 0, split: 0 };
                        if let Some(n) = semigroup_apply(pres, v, s) {
                            let n = AnyWord::S(n);
                            if fits(&n) && seen.insert(n.clone()) {
                                out.push((s, n));
                            }
                        }
                    }
                }
            }
        }
        AnyWord::G(g) => {
            for i in 0..pres.relators.len() {
                let len = pres.relators[i].len();
                for forward in [true, false] {
                    for rotation in 0..len {
                        for split in 0..=len {
                            let s0 = StepRef { position: 0, relation: i, forward, rotation, split };
                            let c = rotated(pres, s0).unwrap();
                            let positions: Vec<usize> = if split == 0 { (0..=g.len()).collect() } else { find_all_g(g, &c[..split]) };
                            for p in positions {
                                let s = StepRef { position: p, ..s0 };
                                if let Some(n) = group_apply(pres, g, s) {
                                    let n = AnyWord::G(n);
                                    if &n != w && fits(&n) && seen.insert(n.clone()) {
                                        out.push((s, n));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// Incremental breadth-first search over one-step relator applications.
pub struct Search<'a> {
    pres: &'a Presentation,
    index: HashMap<AnyWord, usize>,
    nodes: Vec<(AnyWord, Option<(usize, StepRef)>, usize)>,
    head: usize,
    budget: usize,
    max_len: Option<usize>,
    /// Some neighbour was dropped because of the budget or the length cap.
    pub truncated: bool,
}

pub type Consequences<'a> = Search<'a>;

impl<'a> Search<'a> {
    pub fn new(pres: &'a Presentation, start: AnyWord, budget: usize, max_len: Option<usize>) -> Self {
        let mut index = HashMap::new();
        index.insert(start.clone(), 0);
        Search { pres, index, nodes: vec![(start, None, 0)], head: 0, budget, max_len, truncated: false }
    }

    /// Expand the next queued word; `false` once the queue is empty.
    pub fn expand_one(&mut self) -> bool {
        if self.head >= self.nodes.len() {
            return false;
        }
        let (w, _, depth) = self.nodes[self.head].clone();
        let me = self.head;
        self.head += 1;
        for (s, n) in neighbours(self.pres, &w, self.max_len) {
            if self.index.contains_key(&n) {
                continue;
            }
            if self.nodes.len() >= self.budget {
                self.truncated = true;
                return true;
            }
            self.index.insert(n.clone(), self.nodes.len());
            self.nodes.push((n, Some((me, s)), depth + 1));
        }
        true
    }

    /// Expand until the queue empties or the budget is reached.
    pub fn run(&mut self) {
        while !self.truncated && self.expand_one() {}
    }

    pub fn run_until(&mut self, target: &AnyWord) -> bool {
        while !self.contains(target) && !self.truncated && self.expand_one() {}
        self.contains(target)
    }

    pub fn contains(&self, w: &AnyWord) -> bool {
        self.index.contains_key(w)
    }

    /// The reachable set was enumerated completely.
    pub fn exhausted(&self) -> bool {
        !self.truncated && self.head >= self.nodes.len()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn word_at(&self, i: usize) -> &AnyWord {
        &self.nodes[i].0
    }

    pub fn words(&self) -> impl Iterator<Item = &AnyWord> {
        self.nodes.iter().map(|n| &n.0)
    }

    pub fn depth(&self, w: &AnyWord) -> Option<usize> {
        self.index.get(w).map(|&i| self.nodes[i].2)
    }

    /// Derivation from the start word to `target`.
    pub fn path_to(&self, target: &AnyWord) -> Option<Vec<DerivationStep>> {
        let mut i = *self.index.get(target)?;
        let mut steps = Vec::new();
        while let Some((p, s)) = self.nodes[i].1 {
            steps.push(DerivationStep {
                position: s.position,
                relation: s.relation,
                forward: s.forward,
                rotation: s.rotation,
                split: s.split,
                before: self.nodes[p].0.clone(),
                after: self.nodes[i].0.clone(),
            });
            i = p;
        }
        steps.reverse();
        Some(steps)
    }
}

/// Breadth-first closure of `start` under single relator applications.
pub fn derive_consequences<'a>(pres: &'a Presentation, start: AnyWord, budget: usize) -> Result<Consequences<'a>> {
    if budget == 0 {
        return Err(RewriteError::ZeroBudget);
    }
    match (&start, pres.kind) {
        (AnyWord::S(_), Kind::Semigroup) | (AnyWord::G(_), Kind::Group) => {}
        _ => return Err(RewriteError::WrongKind("word kind does not match the presentation".into())),
    }
    let mut s = Search::new(pres, start, budget, None);
    s.run();
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Area {
    /// Minimal number of applications, with a derivation to the empty word.
    Exact(usize, Vec<DerivationStep>),
    Unknown,
}

impl Area {
    pub fn value(&self) -> Option<usize> {
        match self {
            Area::Exact(k, _) => Some(*k),
            Area::Unknown => None,
        }
    }
}

/// Minimal relator applications reducing `w` to the empty word, searching
/// among intermediate words of length at most `max_len` (default `|w|`).
pub fn area(pres: &Presentation, w: &[i32], budget: usize, max_len: Option<usize>) -> Result<Area> {
    if pres.kind != Kind::Group {
        return Err(RewriteError::WrongKind("area needs a group presentation".into()));
    }
    if budget == 0 {
        return Err(RewriteError::ZeroBudget);
    }
    let start = AnyWord::G(free_reduce(w));
    let cap = max_len.unwrap_or_else(|| w.len().max(pres.relators.iter().map(|r| r.len()).max().unwrap_or(0)));
    let target = AnyWord::G(vec![]);
    let mut s = Search::new(pres, start, budget, Some(cap));
    if s.run_until(&target) {
        let path = s.path_to(&target).unwrap();
        return Ok(Area::Exact(path.len(), path));
    }
    Ok(Area::Unknown)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rewriting::commutator;

    #[test]
    fn commuting_semigroup() {
        let p = Presentation::parse("semigroup\ngen a b\nrel a.b = b.a\n").unwrap();
        let c = derive_consequences(&p, AnyWord::S(SWord::word(&[0, 1])), 10).unwrap();
        assert_eq!(c.len(), 2);
        assert!(c.exhausted());
        let path = c.path_to(&AnyWord::S(SWord::word(&[1, 0]))).unwrap();
        assert_eq!(replay(&p, &AnyWord::S(SWord::word(&[0, 1])), &path), Ok(AnyWord::S(SWord::word(&[1, 0]))));
    }

    #[test]
    fn group_torsion() {
        let p = Presentation::parse("group\ngen x\nrel x^2\n").unwrap();
        let c = derive_consequences(&p, AnyWord::G(vec![1, 1, 1]), 10).unwrap();
        assert!(c.contains(&AnyWord::G(vec![1])));
    }

    #[test]
    fn commutator_areas() {
        let p = Presentation::parse("group\ngen x y\nrel [x,y]\n").unwrap();
        assert_eq!(area(&p, &commutator(&[1], &[2]), 1000, None).unwrap().value(), Some(1));
        let w = commutator(&[1, 1], &[2, 2]);
        let a = area(&p, &w, 100_000, None).unwrap();
        assert_eq!(a.value(), Some(4));
        if let Area::Exact(_, path) = a {
            assert_eq!(replay(&p, &AnyWord::G(w), &path), Ok(AnyWord::G(vec![])));
        }
        assert_eq!(area(&p, &[1], 1000, None).unwrap(), Area::Unknown);
    }
}
