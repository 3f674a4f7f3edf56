use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::{CanonicalWord, Layout, NonZero, Result, SemigroupError};
use crate::machines::{self, MinskyConfig, MinskyMachine};
use crate::Tri;

/// Extra relations `a_g^d = a_g^{2d}` for the listed glasses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Identification {
    pub glasses: Vec<usize>,
    pub d: u64,
}

// One direction of a command relation `q_i a_X A_Z -> q_j a_Y A_Z`.
struct Rel {
    from_q: usize,
    from_a: Vec<u64>,
    to_q: usize,
    to_a: Vec<u64>,
    zero: Vec<usize>,
}

pub(crate) struct Class {
    pub members: Vec<NonZero>,
    pub zero: bool,
    pub complete: bool,
}

/// Canonical-word rewriting for S(M), optionally with identifications.
pub(crate) struct Ctx {
    pub layout: Layout,
    pub ident: Option<Identification>,
    rels: Vec<Rel>,
}

fn counts(k: usize, glasses: &[usize]) -> Vec<u64> {
    let mut v = vec![0; k];
    for &g in glasses {
        v[g - 1] += 1;
    }
    v
}

impl Ctx {
    pub fn new(m: &MinskyMachine, ident: Option<Identification>) -> Self {
        let k = m.glasses;
        let mut rels = Vec::new();
        for c in &m.commands {
            let (x, y) = (counts(k, &c.sub), counts(k, &c.add));
            let t = c.target.unwrap_or(0);
            rels.push(Rel { from_q: c.number, from_a: x.clone(), to_q: t, to_a: y.clone(), zero: c.zero.clone() });
            rels.push(Rel { from_q: t, from_a: y, to_q: c.number, to_a: x, zero: c.zero.clone() });
        }
        Ctx { layout: Layout::of(m), ident, rels }
    }

    fn period(&self, g: usize) -> Option<u64> {
        self.ident.as_ref().filter(|i| i.glasses.contains(&g)).map(|i| i.d)
    }

    pub fn normalize(&self, mut w: NonZero) -> NonZero {
        for (j, e) in w.a_exp.iter_mut().enumerate() {
            if let Some(d) = self.period(j + 1) {
                if *e >= 2 * d {
                    *e = d + (*e - d) % d;
                }
            }
        }
        w
    }

    pub fn normalize_word(&self, w: CanonicalWord) -> CanonicalWord {
        match w {
            CanonicalWord::Word(x) => CanonicalWord::Word(self.normalize(x)),
            z => z,
        }
    }

    // Exponent vectors representing the same element as `e`.
    fn representatives(&self, e: &[u64]) -> Vec<Vec<u64>> {
        let mut out = vec![e.to_vec()];
        for (j, &x) in e.iter().enumerate() {
            if let Some(d) = self.period(j + 1).filter(|&d| x >= d) {
                let mut more = Vec::new();
                for r in &out {
                    for t in 1..=2 {
                        let mut r2 = r.clone();
                        r2[j] += t * d;
                        more.push(r2);
                    }
                }
                out.extend(more);
            }
        }
        out
    }

    pub fn neighbours(&self, w: &NonZero) -> Vec<CanonicalWord> {
        let Some(q) = w.q else { return vec![] };
        let mut out = Vec::new();
        let reps = self.representatives(&w.a_exp);
        for r in self.rels.iter().filter(|r| r.from_q == q) {
            if !r.zero.iter().all(|z| w.a_set.contains(z)) {
                continue;
            }
            for e in &reps {
                let fits = e.iter().zip(&r.from_a).all(|(x, y)| x >= y) && r.zero.iter().all(|&z| e[z - 1] == r.from_a[z - 1]);
                if !fits {
                    continue;
                }
                let next = if r.to_q == 0 {
                    CanonicalWord::Zero
                } else {
                    let a_exp = e.iter().zip(&r.from_a).zip(&r.to_a).map(|((x, s), t)| x - s + t).collect();
                    CanonicalWord::Word(self.normalize(NonZero { q: Some(r.to_q), a_exp, a_set: w.a_set.clone() }))
                };
                if !out.contains(&next) {
                    out.push(next);
                }
            }
        }
        out
    }

    /// Breadth-first enumeration of the nonzero words equal to `w`.
    pub fn class(&self, w: &NonZero, bound: usize) -> Class {
        let start = self.normalize(w.clone());
        let mut seen: HashSet<NonZero> = HashSet::new();
        let mut members = vec![start.clone()];
        let mut queue = VecDeque::from([start.clone()]);
        seen.insert(start);
        let class = |members, zero, complete| Class { members, zero, complete };
        while let Some(cur) = queue.pop_front() {
            for n in self.neighbours(&cur) {
                match n {
                    CanonicalWord::Zero => return class(members, true, false),
                    CanonicalWord::Word(x) => {
                        if seen.insert(x.clone()) {
                            if seen.len() > bound {
                                return class(members, false, false);
                            }
                            members.push(x.clone());
                            queue.push_back(x);
                        }
                    }
                }
            }
        }
        class(members, false, true)
    }

    /// Words `y` with `x = p y r` for words `p, r` (possibly empty).
    pub fn factors(&self, x: &NonZero) -> Vec<NonZero> {
        let ranges: Vec<Vec<u64>> = x
            .a_exp
            .iter()
            .enumerate()
            .map(|(j, &e)| match self.period(j + 1) {
                Some(d) if e >= d => (0..2 * d).collect(),
                _ => (0..=e).collect(),
            })
            .collect();
        let caps: Vec<usize> = x.a_set.iter().copied().collect();
        let mut out = Vec::new();
        let mut f = vec![0u64; ranges.len()];
        loop {
            for mask in 0..(1u32 << caps.len()) {
                let q_set: BTreeSet<usize> = caps.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, &c)| c).collect();
                if f.iter().any(|&v| v > 0) || !q_set.is_empty() {
                    out.push(NonZero { q: None, a_exp: f.clone(), a_set: q_set.clone() });
                }
                // The A letters of a prefix factor cannot have a-letters
                // of the same glass to their right.
                if x.q.is_some() && q_set.iter().all(|&z| f[z - 1] == x.a_exp[z - 1]) {
                    out.push(NonZero { q: x.q, a_exp: f.clone(), a_set: q_set });
                }
            }
            let mut i = 0;
            loop {
                if i == f.len() {
                    return out;
                }
                let pos = ranges[i].iter().position(|&v| v == f[i]).unwrap();
                if pos + 1 < ranges[i].len() {
                    f[i] = ranges[i][pos + 1];
                    break;
                }
                f[i] = ranges[i][0];
                i += 1;
            }
        }
    }

    /// With `partial`, an incomplete class still yields the divisors found
    /// so far; otherwise it yields an empty incomplete set.
    pub fn divisors(&self, x: &NonZero, bound: usize, partial: bool) -> Result<Divisors> {
        let class = self.class(x, bound);
        if class.zero {
            return Err(SemigroupError::ZeroWord);
        }
        if !class.complete && !partial {
            return Ok(Divisors { complete: false, words: BTreeSet::new() });
        }
        let mut words = BTreeSet::new();
        for m in &class.members {
            words.extend(self.factors(m));
        }
        Ok(Divisors { complete: class.complete, words })
    }
}

/// All canonical words dividing an element. Closed under equality in S(M)
/// when `complete`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Divisors {
    pub complete: bool,
    pub words: BTreeSet<NonZero>,
}

impl Divisors {
    pub fn answer(&self) -> Tri {
        if self.complete {
            Tri::Yes
        } else {
            Tri::Unknown
        }
    }
}

// A word with a q-letter behaves like the configuration of its exponents
// under the machine without the zero tests of glasses whose A is missing.
fn as_config(m: &MinskyMachine, x: &NonZero) -> (MinskyMachine, MinskyConfig) {
    let mm = if x.is_full() { m.clone() } else { m.restricted(&x.a_set) };
    (mm, MinskyConfig { state: x.q.unwrap_or(0), coins: x.a_exp.clone() })
}

pub fn is_zero(m: &MinskyMachine, w: &CanonicalWord, bound: usize) -> Tri {
    let x = match w {
        CanonicalWord::Zero => return Tri::Yes,
        CanonicalWord::Word(x) => x,
    };
    if x.q.is_none() {
        return Tri::No;
    }
    let (mm, c) = as_config(m, x);
    machines::accepted(&mm, &c, bound)
}

fn both_zero(m: &MinskyMachine, x: &CanonicalWord, y: &CanonicalWord, bound: usize) -> Tri {
    match (is_zero(m, x, bound), is_zero(m, y, bound)) {
        (Tri::Yes, Tri::Yes) => Tri::Yes,
        (Tri::No, _) | (_, Tri::No) => Tri::No,
        _ => Tri::Unknown,
    }
}

/// Equality in S(M).
pub fn equal(m: &MinskyMachine, w1: &CanonicalWord, w2: &CanonicalWord, bound: usize) -> Tri {
    let (x, y) = match (w1, w2) {
        (CanonicalWord::Zero, CanonicalWord::Zero) => return Tri::Yes,
        (CanonicalWord::Zero, w) | (w, CanonicalWord::Zero) => return is_zero(m, w, bound),
        (CanonicalWord::Word(x), CanonicalWord::Word(y)) => (x, y),
    };
    if x == y {
        return Tri::Yes;
    }
    if x.q.is_none() || y.q.is_none() {
        return Tri::No;
    }
    // Command relations keep the set of A letters.
    if x.a_set != y.a_set {
        return both_zero(m, w1, w2, bound);
    }
    let (mm, cx) = as_config(m, x);
    let (_, cy) = as_config(m, y);
    match machines::sym_equivalent(&mm, &cx, &cy, bound).answer {
        Tri::Yes => Tri::Yes,
        Tri::No => both_zero(m, w1, w2, bound),
        Tri::Unknown => match both_zero(m, w1, w2, bound) {
            Tri::Yes => Tri::Yes,
            _ => Tri::Unknown,
        },
    }
}

pub fn divisors(m: &MinskyMachine, w: &CanonicalWord, bound: usize) -> Result<Divisors> {
    match w {
        CanonicalWord::Zero => Err(SemigroupError::ZeroWord),
        CanonicalWord::Word(x) => Ctx::new(m, None).divisors(x, bound, true),
    }
}
