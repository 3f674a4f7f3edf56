use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::sync::RwLock;

use serde::{Deserialize, Serialize};

use super::{is_prime, GLetter, GroupError, Result};
use crate::machines::{trajectory, Machine, MinskyConfig, MinskyMachine, TrajectoryEnd};
use crate::semigroup::NonZero;

pub const DEFAULT_TRAJECTORY_BOUND: usize = 100_000;

/// Index of a basis vector of T: a nonzero word of the free-command
/// semigroup with a q-letter (`W`), or an S(M)-class of such a word with
/// `A_0` attached (`W0`), stored by its canonical member.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IndexWord {
    W(NonZero),
    W0(NonZero),
}

impl IndexWord {
    pub fn word(&self) -> &NonZero {
        match self {
            IndexWord::W(w) | IndexWord::W0(w) => w,
        }
    }

    pub fn has_a0(&self) -> bool {
        matches!(self, IndexWord::W0(_))
    }

    /// Whether `A_j` occurs; `j = 0` asks for `A_0`.
    pub fn contains(&self, j: usize) -> bool {
        if j == 0 {
            self.has_a0()
        } else {
            self.word().a_set.contains(&j)
        }
    }

    pub fn max_exp(&self) -> u64 {
        self.word().a_exp.iter().copied().max().unwrap_or(0)
    }
}

impl fmt::Display for IndexWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w = self.word();
        let mut parts = vec![format!("q{}", w.q.unwrap_or(0))];
        if self.has_a0() {
            parts.push("A0".into());
        }
        for (j, &e) in w.a_exp.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(format!("a{}", j + 1)),
                _ => parts.push(format!("a{}^{}", j + 1, e)),
            }
        }
        parts.extend(w.a_set.iter().map(|j| format!("A{}", j)));
        f.write_str(&parts.join("."))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Basis {
    /// Entries in `{1,2,3}`, one per glass.
    pub v: Vec<u8>,
    pub u: IndexWord,
}

impl fmt::Display for Basis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.v.iter().map(|x| x.to_string()).collect();
        write!(f, "({}|{})", v.join(","), self.u)
    }
}

/// Element of T: finitely many basis vectors with nonzero coefficients mod p.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TElement {
    pub p: u32,
    #[serde(with = "term_list")]
    pub terms: BTreeMap<Basis, u32>,
}

// JSON maps need string keys, so terms travel as a list of pairs.
mod term_list {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serializer};

    use super::Basis;

    pub fn serialize<S: Serializer>(terms: &BTreeMap<Basis, u32>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(terms.iter())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<Basis, u32>, D::Error> {
        Ok(Vec::<(Basis, u32)>::deserialize(d)?.into_iter().collect())
    }
}

impl TElement {
    pub fn zero(p: u32) -> Self {
        TElement { p, terms: BTreeMap::new() }
    }

    pub fn basis(p: u32, b: Basis) -> Self {
        let mut e = TElement::zero(p);
        e.add_term(b, 1);
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, b: Basis, c: i64) {
        let p = self.p as i64;
        let c = c.rem_euclid(p);
        if c == 0 {
            return;
        }
        let slot = self.terms.entry(b.clone()).or_insert(0);
        *slot = ((*slot as i64 + c) % p) as u32;
        if *slot == 0 {
            self.terms.remove(&b);
        }
    }

    pub fn add(&self, other: &TElement) -> TElement {
        let mut e = self.clone();
        for (b, &c) in &other.terms {
            e.add_term(b.clone(), c as i64);
        }
        e
    }

    pub fn scale(&self, s: i64) -> TElement {
        let mut e = TElement::zero(self.p);
        for (b, &c) in &self.terms {
            e.add_term(b.clone(), c as i64 * s);
        }
        e
    }

    pub fn neg(&self) -> TElement {
        self.scale(-1)
    }

    pub fn support(&self) -> impl Iterator<Item = &Basis> {
        self.terms.keys()
    }
}

impl fmt::Display for TElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(b, c)| format!("{}^{}", b, c)).collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Support equality; the basis is independent, so this is equality in T.
pub fn equal_elements(e1: &TElement, e2: &TElement) -> bool {
    e1 == e2
}

// How a letter acts on the basis vectors of one index word.
enum Mode {
    Fixed,
    // Three-case action with the longer index `up` (None: zero class).
    Active(Option<IndexWord>),
    // z -> z + z_{uA}.
    Cap(Option<IndexWord>),
}

/// The model of T for one machine and prime.
pub struct Model {
    pub machine: MinskyMachine,
    pub p: u32,
    pub bound: usize,
    cache: RwLock<HashMap<NonZero, Option<NonZero>>>,
}

impl Model {
    pub fn new(m: &MinskyMachine, p: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(GroupError::NotPrime(p));
        }
        if !m.is_deterministic() {
            return Err(GroupError::Precondition("the machine must be deterministic".into()));
        }
        Ok(Model { machine: m.clone(), p, bound: DEFAULT_TRAJECTORY_BOUND, cache: RwLock::new(HashMap::new()) })
    }

    pub fn k(&self) -> usize {
        self.machine.glasses
    }

    /// Largest command number.
    pub fn n(&self) -> usize {
        self.machine.command_numbers().into_iter().max().unwrap_or(0)
    }

    /// Canonical member of the S(M)-class of a word with a q-letter, or
    /// None for the zero class. The class is the set of configurations
    /// whose trajectories meet, so the end of the trajectory (its last
    /// configuration, or the least one on its cycle) names it.
    pub fn canonical(&self, w: &NonZero) -> Result<Option<NonZero>> {
        let Some(q) = w.q else {
            return Err(GroupError::Precondition(format!("{} has no q-letter", w)));
        };
        if q == 0 {
            return Ok(None);
        }
        if let Some(c) = self.cache.read().unwrap().get(w) {
            return Ok(c.clone());
        }
        let mm = if w.is_full() { self.machine.clone() } else { self.machine.restricted(&w.a_set) };
        let t = trajectory(&mm, &MinskyConfig { state: q, coins: w.a_exp.clone() }, self.bound);
        let end = match t.end {
            TrajectoryEnd::Accepted => None,
            TrajectoryEnd::Halted => t.configs.last().cloned(),
            TrajectoryEnd::Cycle => {
                let last = t.configs.last().unwrap();
                let (_, next) = mm.successors(last).into_iter().next().unwrap();
                let start = t.configs.iter().position(|c| *c == next).unwrap();
                t.configs[start..].iter().min().cloned()
            }
            TrajectoryEnd::Bound => return Err(GroupError::Unresolved(format!("trajectory of {} exceeds {} steps", w, self.bound))),
        };
        let rep = end.map(|c| NonZero { q: Some(c.state), a_exp: c.coins, a_set: w.a_set.clone() });
        self.cache.write().unwrap().insert(w.clone(), rep.clone());
        Ok(rep)
    }

    /// Index word of `w` (with or without `A_0`); None when it is zero.
    pub fn index(&self, w: &NonZero, with_a0: bool) -> Result<Option<IndexWord>> {
        if w.q.is_none() || w.a_exp.len() != self.k() || w.a_set.iter().any(|&j| j == 0 || j > self.k()) {
            return Err(GroupError::Precondition(format!("{} is not an index word", w)));
        }
        if with_a0 {
            Ok(self.canonical(w)?.map(IndexWord::W0))
        } else if w.q == Some(0) {
            Ok(None)
        } else {
            Ok(Some(IndexWord::W(w.clone())))
        }
    }

    fn rebuild(&self, u: &IndexWord, w: NonZero) -> Result<Option<IndexWord>> {
        self.index(&w, u.has_a0())
    }

    fn times_a(&self, u: &IndexWord, j: usize) -> Result<Option<IndexWord>> {
        let mut w = u.word().clone();
        w.a_exp[j - 1] += 1;
        self.rebuild(u, w)
    }

    fn times_cap(&self, u: &IndexWord, j: usize) -> Result<Option<IndexWord>> {
        if j == 0 {
            return self.index(u.word(), true);
        }
        let mut w = u.word().clone();
        w.a_set.insert(j);
        self.rebuild(u, w)
    }

    fn check_letter(&self, y: GLetter) -> Result<()> {
        let j = y.glass();
        let ok = match y {
            GLetter::Cap(_) => j <= self.k(),
            _ => (1..=self.k()).contains(&j),
        };
        if ok {
            Ok(())
        } else {
            Err(GroupError::UnknownLetter(y.to_string()))
        }
    }

    fn mode(&self, u: &IndexWord, y: GLetter) -> Result<Mode> {
        Ok(match y {
            GLetter::Cap(j) if u.contains(j) => Mode::Fixed,
            GLetter::Cap(j) => Mode::Cap(self.times_cap(u, j)?),
            GLetter::A(j) | GLetter::APrime(j) if u.contains(j) => Mode::Fixed,
            GLetter::A(j) | GLetter::APrime(j) => Mode::Active(self.times_a(u, j)?),
            GLetter::Tilde(_) | GLetter::TildePrime(_) if u.has_a0() => Mode::Fixed,
            // For u = vA_j the longer index is v a_j A_j.
            GLetter::Tilde(j) | GLetter::TildePrime(j) => Mode::Active(self.times_a(u, j)?),
        })
    }

    /// Image of one basis vector under `y^sign`.
    fn image(&self, b: &Basis, y: GLetter, sign: i8) -> Result<Vec<(Basis, i64)>> {
        let mode = self.mode(&b.u, y)?;
        let primed = matches!(y, GLetter::APrime(_) | GLetter::TildePrime(_));
        Ok(match mode {
            Mode::Fixed => vec![(b.clone(), 1)],
            Mode::Cap(target) => {
                let mut out = vec![(b.clone(), 1)];
                if let Some(t) = target {
                    out.push((Basis { v: b.v.clone(), u: t }, sign as i64));
                }
                out
            }
            Mode::Active(up) => {
                let j = y.glass() - 1;
                let at = |k: u8| Basis { v: set(&b.v, j, k), u: b.u.clone() };
                let up_at = |k: u8| up.clone().map(|u| Basis { v: set(&b.v, j, k), u });
                let rows: Vec<(Basis, i64)> = match (primed, sign > 0, b.v[j]) {
                    (false, true, 1) => vec![(at(1), 1), (at(2), 1), (at(3), 1)],
                    (false, true, 2) => vec![(at(2), 1), (at(1), -1)],
                    (false, true, _) => vec![(at(1), 1)],
                    (false, false, 1) => vec![(at(3), 1)],
                    (false, false, 2) => vec![(at(2), 1), (at(3), 1)],
                    (false, false, _) => vec![(at(1), 1), (at(2), -1), (at(3), -2)],
                    (true, true, 1) => vec![(at(2), 1), (at(3), 1)],
                    (true, true, 2) => vec![(at(1), -1)],
                    (true, true, _) => vec![(at(1), 1), (at(3), -1)],
                    (true, false, 1) => vec![(at(2), -1)],
                    (true, false, 2) => vec![(at(1), 1), (at(2), 1), (at(3), 1)],
                    (true, false, _) => vec![(at(2), -1), (at(3), -1)],
                };
                let extra = match (primed, sign > 0, b.v[j]) {
                    (_, true, 1) => up_at(1).map(|x| (x, 1)),
                    (false, false, 3) => up_at(3).map(|x| (x, -1)),
                    (true, false, 2) => up_at(2).map(|x| (x, 1)),
                    _ => None,
                };
                rows.into_iter().chain(extra).collect()
            }
        })
    }

    pub fn apply_letter(&self, e: &TElement, y: GLetter, sign: i8) -> Result<TElement> {
        self.check_letter(y)?;
        let mut out = TElement::zero(e.p);
        for (b, &c) in &e.terms {
            for (b2, c2) in self.image(b, y, sign)? {
                out.add_term(b2, c as i64 * c2);
            }
        }
        Ok(out)
    }

    /// Right action of a word: letters are applied left to right.
    pub fn apply_word(&self, e: &TElement, word: &[(GLetter, i8)]) -> Result<TElement> {
        let mut e = e.clone();
        for &(y, s) in word {
            e = self.apply_letter(&e, y, s)?;
        }
        Ok(e)
    }

    /// `f*a_j = f^-1 f^{a_j} f^{-a_j^-1} f^{(a_j')^-1}` and `f*A_j = [f, A_j]`.
    pub fn star(&self, f: &TElement, y: GLetter) -> Result<TElement> {
        self.check_letter(y)?;
        match y {
            GLetter::A(j) => {
                let mut e = f.neg();
                e = e.add(&self.apply_letter(f, y, 1)?);
                e = e.add(&self.apply_letter(f, y, -1)?.neg());
                Ok(e.add(&self.apply_letter(f, GLetter::APrime(j), -1)?))
            }
            GLetter::Cap(_) => Ok(f.neg().add(&self.apply_letter(f, y, 1)?)),
            _ => Err(GroupError::NotStarLetter(y.to_string())),
        }
    }

    pub fn ones(&self) -> Vec<u8> {
        vec![1; self.k()]
    }

    pub fn basis_element(&self, v: Vec<u8>, u: Option<IndexWord>) -> TElement {
        match u {
            Some(u) => TElement::basis(self.p, Basis { v, u }),
            None => TElement::zero(self.p),
        }
    }

    /// `x_{q_i[A_0]} * a_1^(m_1) * ... * a_K^(m_K) * A_j ...` for the
    /// exponents and `A`-letters of `w`.
    pub fn word_element(&self, w: &NonZero, with_a0: bool) -> Result<TElement> {
        let start = NonZero { q: w.q, a_exp: vec![0; self.k()], a_set: BTreeSet::new() };
        let mut e = self.basis_element(self.ones(), self.index(&start, with_a0)?);
        for (j, &m) in w.a_exp.iter().enumerate() {
            for _ in 0..m {
                e = self.star(&e, GLetter::A(j + 1))?;
            }
        }
        for &j in &w.a_set {
            e = self.star(&e, GLetter::Cap(j))?;
        }
        Ok(e)
    }

    /// The element of a configuration, with every `A_j` present.
    pub fn config_element(&self, c: &MinskyConfig, with_a0: bool) -> Result<TElement> {
        self.machine.check_config(c)?;
        let w = NonZero { q: Some(c.state), a_exp: c.coins.clone(), a_set: (1..=self.k()).collect() };
        self.word_element(&w, with_a0)
    }

    /// Parse an index word such as `q1.A0.a2^3.A1`.
    pub fn parse_index(&self, text: &str) -> Result<Option<IndexWord>> {
        let bad = |m: &str| GroupError::Parse(format!("{} in `{}`", m, text));
        let mut w = NonZero { q: None, a_exp: vec![0; self.k()], a_set: BTreeSet::new() };
        let mut a0 = false;
        for tok in text.split(|c: char| c == '.' || c.is_whitespace()).filter(|t| !t.is_empty()) {
            let (name, exp) = match tok.split_once('^') {
                Some((n, e)) => (n, e.parse::<u64>().map_err(|_| bad("bad exponent"))?),
                None => (tok, 1),
            };
            let num = |s: &str| s.parse::<usize>().map_err(|_| bad("bad letter"));
            if let Some(d) = name.strip_prefix('q') {
                if w.q.replace(num(d)?).is_some() || exp != 1 {
                    return Err(bad("more than one q-letter"));
                }
            } else if let Some(d) = name.strip_prefix('a') {
                let j = num(d)?;
                if j == 0 || j > self.k() {
                    return Err(bad("glass out of range"));
                }
                w.a_exp[j - 1] += exp;
            } else if let Some(d) = name.strip_prefix('A') {
                let j = num(d)?;
                if j > self.k() || exp != 1 {
                    return Err(bad("bad A-letter"));
                }
                if j == 0 {
                    a0 = true;
                } else {
                    w.a_set.insert(j);
                }
            } else {
                return Err(bad("unknown letter"));
            }
        }
        if w.q.is_none() {
            return Err(bad("missing q-letter"));
        }
        if w.q.unwrap() > self.n() {
            return Err(bad("q-letter out of range"));
        }
        self.index(&w, a0)
    }

    /// Parse `(1,1|q1.A0)^1 + (2,1|q1)^2`; `0` is the identity.
    pub fn parse_element(&self, text: &str) -> Result<TElement> {
        let mut e = TElement::zero(self.p);
        let text = text.trim();
        if text == "0" || text.is_empty() {
            return Ok(e);
        }
        for term in text.split('+') {
            let term = term.trim();
            let bad = |m: &str| GroupError::Parse(format!("{} in `{}`", m, term));
            let inner = term.strip_prefix('(').ok_or_else(|| bad("expected `(`"))?;
            let (body, rest) = inner.split_once(')').ok_or_else(|| bad("expected `)`"))?;
            let c: i64 = match rest.trim() {
                "" => 1,
                r => r.strip_prefix('^').and_then(|x| x.trim().parse().ok()).ok_or_else(|| bad("bad coefficient"))?,
            };
            let (vtext, utext) = body.split_once('|').ok_or_else(|| bad("expected `|`"))?;
            let v: Vec<u8> = vtext
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| s.parse::<u8>().ok().filter(|x| (1..=3).contains(x)))
                .collect::<Option<_>>()
                .ok_or_else(|| bad("vector entries must be 1, 2 or 3"))?;
            if v.len() != self.k() {
                return Err(bad("vector length differs from the number of glasses"));
            }
            if let Some(u) = self.parse_index(utext)? {
                e.add_term(Basis { v, u }, c);
            }
        }
        Ok(e)
    }

    /// Every vector of `{1,2,3}^K`.
    pub fn vectors(&self) -> Vec<Vec<u8>> {
        let mut out = vec![vec![]];
        for _ in 0..self.k() {
            out = out.into_iter().flat_map(|v: Vec<u8>| (1..=3).map(move |x| [v.clone(), vec![x]].concat())).collect();
        }
        out
    }

    /// W-words with exponents below `d`, over every q-letter but `q0` and
    /// every set of `A`-letters.
    pub fn small_words(&self, d: u64) -> Vec<NonZero> {
        let k = self.k();
        let mut exps = vec![vec![]];
        for _ in 0..k {
            exps = exps.into_iter().flat_map(|e: Vec<u64>| (0..d).map(move |x| [e.clone(), vec![x]].concat())).collect();
        }
        let mut out = Vec::new();
        for q in self.machine.command_numbers().into_iter().filter(|&q| q != 0) {
            for e in &exps {
                for mask in 0..(1u32 << k) {
                    let a_set = (1..=k).filter(|j| mask >> (j - 1) & 1 == 1).collect();
                    out.push(NonZero { q: Some(q), a_exp: e.clone(), a_set });
                }
            }
        }
        out
    }

    /// Basis vectors whose index words have exponents at most `max_coins`.
    pub fn sample_basis(&self, max_coins: u64) -> Result<Vec<Basis>> {
        let mut idx = BTreeSet::new();
        for w in self.small_words(max_coins + 1) {
            idx.insert(IndexWord::W(w.clone()));
            if let Some(u) = self.index(&w, true)? {
                idx.insert(u);
            }
        }
        let vs = self.vectors();
        Ok(idx.into_iter().flat_map(|u| vs.iter().map(move |v| Basis { v: v.clone(), u: u.clone() })).collect())
    }
}

fn set(v: &[u8], j: usize, k: u8) -> Vec<u8> {
    let mut v = v.to_vec();
    v[j] = k;
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::minsky::M_PAR;

    fn model() -> Model {
        Model::new(&MinskyMachine::parse(M_PAR).unwrap(), 2).unwrap()
    }

    #[test]
    fn letter_actions() {
        let g = Model::new(&MinskyMachine::parse(M_PAR).unwrap(), 5).unwrap();
        let b = g.parse_element("(1,1|q1)").unwrap();
        let img = g.apply_letter(&b, GLetter::A(1), 1).unwrap();
        let want = g.parse_element("(1,1|q1) + (2,1|q1) + (3,1|q1) + (1,1|q1.a1)").unwrap();
        assert_eq!(img, want);
        let c = g.parse_element("(1,1|q1.A1)").unwrap();
        assert_eq!(g.apply_letter(&c, GLetter::A(1), 1).unwrap(), c);
        let cap = g.apply_letter(&b, GLetter::Cap(1), 1).unwrap();
        assert_eq!(cap, g.parse_element("(1,1|q1) + (1,1|q1.A1)").unwrap());
    }

    #[test]
    fn inverses() {
        let g = model();
        let letters = [GLetter::A(1), GLetter::APrime(2), GLetter::Tilde(1), GLetter::TildePrime(2), GLetter::Cap(0), GLetter::Cap(2)];
        for b in g.sample_basis(1).unwrap() {
            let e = TElement::basis(2, b);
            for &y in &letters {
                let there = g.apply_letter(&e, y, 1).unwrap();
                assert_eq!(g.apply_letter(&there, y, -1).unwrap(), e, "{} {}", y, e);
            }
        }
    }

    #[test]
    fn star_moves_the_index() {
        let g = model();
        let f = g.parse_element("(1,1|q1.A0)").unwrap();
        assert_eq!(g.star(&f, GLetter::Cap(1)).unwrap(), g.parse_element("(1,1|q1.A0.A1)").unwrap());
        let f = g.parse_element("(1,1|q1.A0.A1)").unwrap();
        assert!(g.star(&f, GLetter::Cap(1)).unwrap().is_zero());
        assert!(g.star(&TElement::zero(2), GLetter::A(1)).unwrap().is_zero());
        assert!(g.star(&f, GLetter::Tilde(1)).is_err());
    }

    #[test]
    fn configurations() {
        let g = model();
        let e = g.config_element(&MinskyConfig::new(2, &[0, 1]), true).unwrap();
        let f = g.config_element(&MinskyConfig::new(1, &[1, 1]), true).unwrap();
        assert!(equal_elements(&e, &f));
        let e0 = g.config_element(&MinskyConfig::new(2, &[0, 1]), false).unwrap();
        let f0 = g.config_element(&MinskyConfig::new(1, &[1, 1]), false).unwrap();
        assert!(!equal_elements(&e0, &f0));
        assert!(g.config_element(&MinskyConfig::new(1, &[2, 0]), true).unwrap().is_zero());
    }

    #[test]
    fn literal_round_trip() {
        let g = model();
        let e = g.parse_element("(2,1|q1.a1^2.A2)^1 + (1,3|q2.A0.a2.A1.A2)").unwrap();
        assert_eq!(g.parse_element(&e.to_string()).unwrap(), e);
        assert!(g.parse_element("(1|q1)").is_err());
        assert!(g.parse_element("(1,1|q1.b2)").is_err());
    }
}
