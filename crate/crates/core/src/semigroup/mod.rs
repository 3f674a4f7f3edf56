//! The semigroup S(M) of a Minsky machine M.
//!
//! Generators are `q0..qN`, `a1..aK`, `A1..AK`. Modulo the commutativity
//! relations and the 0-relations every nonzero element is a subword of
//! `q_i a_1^e1 ... a_K^eK A_1 ... A_K`, which is what [`CanonicalWord`]
//! stores. The remaining relations (one per command) act on canonical words
//! exactly as the commands act on configurations.

mod classes;
mod depth;
mod rees;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::machines::{MachineError, MinskyConfig, MinskyMachine};
use crate::rewriting::{Presentation, RewriteError, SWord};

pub use classes::{divisors, equal, is_zero, Divisors};
pub(crate) use classes::Ctx;
pub use depth::{depth_witness, DepthFailure, DepthWitness, Stage};
pub use rees::{separating_quotient, v_r_quotient, Identification, QuotientCertificate, QuotientMethod, ReesQuotient};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemigroupError {
    #[error(transparent)]
    Rewrite(#[from] RewriteError),
    #[error(transparent)]
    Machine(#[from] MachineError),
    #[error("the empty word is not an element of S(M)")]
    EmptyWord,
    #[error("the word is zero in S(M)")]
    ZeroWord,
    #[error("the words are equal in S(M)")]
    EqualWords,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("undecided within the budget: {0}")]
    Unresolved(String),
    #[error("depth witness failed: {0}")]
    Depth(DepthFailure),
}

pub type Result<T> = std::result::Result<T, SemigroupError>;

/// Generator numbering for a machine with largest command number `n` and
/// `k` glasses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub n: usize,
    pub k: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Letter {
    Q(usize),
    /// 1-based glass.
    A(usize),
    Cap(usize),
}

impl Layout {
    pub fn of(m: &MinskyMachine) -> Self {
        let n = m.command_numbers().into_iter().chain(m.commands.iter().filter_map(|c| c.target)).max().unwrap_or(0);
        Layout { n, k: m.glasses }
    }

    pub fn generators(&self) -> usize {
        self.n + 1 + 2 * self.k
    }

    pub fn q(&self, i: usize) -> usize {
        i
    }

    pub fn a(&self, j: usize) -> usize {
        self.n + j
    }

    pub fn cap(&self, j: usize) -> usize {
        self.n + self.k + j
    }

    pub fn letter(&self, g: usize) -> Letter {
        if g <= self.n {
            Letter::Q(g)
        } else if g <= self.n + self.k {
            Letter::A(g - self.n)
        } else {
            Letter::Cap(g - self.n - self.k)
        }
    }

    pub fn names(&self) -> Vec<String> {
        let mut v: Vec<String> = (0..=self.n).map(|i| format!("q{}", i)).collect();
        v.extend((1..=self.k).map(|j| format!("a{}", j)));
        v.extend((1..=self.k).map(|j| format!("A{}", j)));
        v
    }
}

/// A nonzero element in normal form `q? a_1^e1 ... a_K^eK A_S`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NonZero {
    pub q: Option<usize>,
    pub a_exp: Vec<u64>,
    /// 1-based glasses whose `A` letter is present.
    pub a_set: BTreeSet<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CanonicalWord {
    Zero,
    Word(NonZero),
}

impl NonZero {
    /// Contains `q` and every `A_j`.
    pub fn is_full(&self) -> bool {
        self.q.is_some() && self.a_set.len() == self.a_exp.len()
    }

    pub fn config(&self) -> Option<MinskyConfig> {
        if self.is_full() {
            Some(MinskyConfig { state: self.q.unwrap(), coins: self.a_exp.clone() })
        } else {
            None
        }
    }

    pub fn len(&self) -> usize {
        usize::from(self.q.is_some()) + self.a_exp.iter().sum::<u64>() as usize + self.a_set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The word in canonical letter order.
    pub fn letters(&self, l: &Layout) -> Vec<usize> {
        let mut w = Vec::with_capacity(self.len());
        if let Some(q) = self.q {
            w.push(l.q(q));
        }
        for (j, &e) in self.a_exp.iter().enumerate() {
            w.extend(std::iter::repeat(l.a(j + 1)).take(e as usize));
        }
        w.extend(self.a_set.iter().map(|&j| l.cap(j)));
        w
    }

    /// Product in S(M) modulo commutativity, 0-relations and `q0 = 0`.
    pub fn mul(&self, other: &NonZero) -> CanonicalWord {
        if other.q.is_some() {
            return CanonicalWord::Zero;
        }
        if !self.a_set.is_disjoint(&other.a_set) {
            return CanonicalWord::Zero;
        }
        if self.a_set.iter().any(|&j| other.a_exp[j - 1] > 0) {
            return CanonicalWord::Zero;
        }
        let a_exp = self.a_exp.iter().zip(&other.a_exp).map(|(x, y)| x + y).collect();
        let a_set = self.a_set.union(&other.a_set).copied().collect();
        CanonicalWord::Word(NonZero { q: self.q, a_exp, a_set })
    }
}

impl CanonicalWord {
    pub fn is_zero(&self) -> bool {
        matches!(self, CanonicalWord::Zero)
    }

    pub fn nonzero(&self) -> Option<&NonZero> {
        match self {
            CanonicalWord::Zero => None,
            CanonicalWord::Word(w) => Some(w),
        }
    }

    pub fn to_sword(&self, l: &Layout) -> SWord {
        match self {
            CanonicalWord::Zero => SWord::Zero,
            CanonicalWord::Word(w) => SWord::Word(w.letters(l)),
        }
    }

    pub fn mul(&self, other: &CanonicalWord) -> CanonicalWord {
        match (self, other) {
            (CanonicalWord::Word(a), CanonicalWord::Word(b)) => a.mul(b),
            _ => CanonicalWord::Zero,
        }
    }
}

impl fmt::Display for NonZero {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(q) = self.q {
            parts.push(format!("q{}", q));
        }
        for (j, &e) in self.a_exp.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(format!("a{}", j + 1)),
                _ => parts.push(format!("a{}^{}", j + 1, e)),
            }
        }
        parts.extend(self.a_set.iter().map(|j| format!("A{}", j)));
        f.write_str(&parts.join(" "))
    }
}

impl fmt::Display for CanonicalWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CanonicalWord::Zero => f.write_str("0"),
            CanonicalWord::Word(w) => w.fmt(f),
        }
    }
}

/// The relations of S(M): commutativity, 0-relations, `q0 = 0`, then one
/// relation per command.
pub fn build_presentation(m: &MinskyMachine) -> Presentation {
    let l = Layout::of(m);
    let k = l.k;
    let mut rels: Vec<(SWord, SWord)> = Vec::new();
    let pair = |x: usize, y: usize| (SWord::word(&[x, y]), SWord::word(&[y, x]));
    for i in 1..=k {
        for j in i + 1..=k {
            rels.push(pair(l.a(i), l.a(j)));
        }
    }
    for i in 1..=k {
        for j in 1..=k {
            if i != j {
                rels.push(pair(l.a(i), l.cap(j)));
            }
        }
    }
    for i in 1..=k {
        for j in i + 1..=k {
            rels.push(pair(l.cap(i), l.cap(j)));
        }
    }
    for x in 0..l.generators() {
        for y in 0..l.generators() {
            if forbidden_pair(&l, x, y) {
                rels.push((SWord::word(&[x, y]), SWord::Zero));
            }
        }
    }
    rels.push((SWord::word(&[l.q(0)]), SWord::Zero));
    for c in &m.commands {
        let caps: Vec<usize> = c.zero.iter().map(|&g| l.cap(g)).collect();
        let mut lhs = vec![l.q(c.number)];
        lhs.extend(c.sub.iter().map(|&g| l.a(g)));
        lhs.extend(&caps);
        let mut rhs = vec![l.q(c.target.unwrap_or(0))];
        rhs.extend(c.add.iter().map(|&g| l.a(g)));
        rhs.extend(&caps);
        rels.push((SWord::Word(lhs), SWord::Word(rhs)));
    }
    let names = l.names();
    let names: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    Presentation::semigroup(&names, rels)
}

/// `xy` is not a subword of any configuration word up to commutativity.
fn forbidden_pair(l: &Layout, x: usize, y: usize) -> bool {
    match (l.letter(x), l.letter(y)) {
        (_, Letter::Q(_)) => true,
        (Letter::Cap(i), Letter::A(j)) | (Letter::Cap(i), Letter::Cap(j)) => i == j,
        _ => false,
    }
}

/// Normal form of a word given as generator indices.
pub fn canonicalize(m: &MinskyMachine, word: &[usize]) -> Result<CanonicalWord> {
    canonicalize_in(&Layout::of(m), word)
}

pub(crate) fn canonicalize_in(l: &Layout, word: &[usize]) -> Result<CanonicalWord> {
    if word.is_empty() {
        return Err(SemigroupError::EmptyWord);
    }
    let mut q = None;
    let mut a_exp = vec![0u64; l.k];
    let mut a_set = BTreeSet::new();
    let mut zero = false;
    for (pos, &g) in word.iter().enumerate() {
        if g >= l.generators() {
            return Err(RewriteError::UnknownGenerator(format!("#{}", g)).into());
        }
        match l.letter(g) {
            Letter::Q(i) => {
                // A q-letter must come first, and q0 is zero.
                if pos > 0 || i == 0 {
                    zero = true;
                }
                q = Some(i);
            }
            Letter::A(j) => {
                if a_set.contains(&j) {
                    zero = true;
                }
                a_exp[j - 1] += 1;
            }
            Letter::Cap(j) => {
                if !a_set.insert(j) {
                    zero = true;
                }
            }
        }
    }
    if zero {
        return Ok(CanonicalWord::Zero);
    }
    Ok(CanonicalWord::Word(NonZero { q, a_exp, a_set }))
}

/// Parse a word in the token syntax `q1 a1^2 a2 A1 A2` (or `0`).
pub fn parse_word(m: &MinskyMachine, text: &str) -> Result<CanonicalWord> {
    let pres = build_presentation(m);
    match pres.parse_sword(text)? {
        SWord::Zero => Ok(CanonicalWord::Zero),
        SWord::Word(w) => canonicalize(m, &w),
    }
}

/// `w(i; e1..eK) = q_i a_1^e1 ... a_K^eK A_1 ... A_K`.
pub fn config_word(c: &MinskyConfig) -> CanonicalWord {
    if c.state == 0 {
        return CanonicalWord::Zero;
    }
    CanonicalWord::Word(NonZero { q: Some(c.state), a_exp: c.coins.clone(), a_set: (1..=c.coins.len()).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::minsky::{M_DEC, M_PAR};

    #[test]
    fn presentation_of_m_dec() {
        let m = MinskyMachine::parse(M_DEC).unwrap();
        let p = build_presentation(&m);
        let q1a1 = p.parse_sword("q1 a1").unwrap();
        let q1 = p.parse_sword("q1").unwrap();
        assert!(p.relations.contains(&(q1a1, q1)));
        let l = p.parse_sword("q1 A1").unwrap();
        let r = p.parse_sword("q0 A1").unwrap();
        assert!(p.relations.contains(&(l, r)));
        // 4 commutations, 16 forbidden pairs, the stop relation, 2 commands.
        assert_eq!(p.relations.len(), 4 + 16 + 1 + 2);
    }

    #[test]
    fn normal_forms() {
        let m = MinskyMachine::parse(M_PAR).unwrap();
        let w = parse_word(&m, "A1 a2").unwrap();
        assert_eq!(w.to_string(), "a2 A1");
        assert!(parse_word(&m, "A1 a1").unwrap().is_zero());
        assert!(parse_word(&m, "q1 q2").unwrap().is_zero());
        assert!(parse_word(&m, "q0 a1").unwrap().is_zero());
        assert!(parse_word(&m, "").is_err());
        assert!(parse_word(&m, "b").is_err());
        let c = config_word(&MinskyConfig::new(2, &[0, 1]));
        assert_eq!(c.to_string(), "q2 a2 A1 A2");
        assert!(config_word(&MinskyConfig::new(0, &[0, 0])).is_zero());
    }

    #[test]
    fn stop_only_machine() {
        let m = MinskyMachine::parse("minsky glasses=1\ncmd 0 stop\n").unwrap();
        let p = build_presentation(&m);
        assert!(p.relations.iter().all(|(_, r)| r.len() <= 2));
    }
}
