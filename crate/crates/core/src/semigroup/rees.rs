use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::classes::Ctx;
pub use super::classes::Identification;
use super::{build_presentation, canonicalize_in, equal, is_zero, CanonicalWord, NonZero, Result, SemigroupError};
use crate::machines::{MinskyConfig, MinskyMachine};
use crate::rewriting::{check_associative, FiniteStructure};
use crate::Tri;

/// Finite Rees quotient `S / I` where the complement of the ideal `I` is a
/// finite set of nonzero elements closed under taking divisors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReesQuotient {
    /// Representative of each element; the last element is the zero.
    pub elements: Vec<Option<NonZero>>,
    pub zero: usize,
    pub table: Vec<Vec<usize>>,
    /// Image of each generator of the presentation.
    pub assignment: Vec<usize>,
    /// Every canonical word outside the ideal, sorted, with its element.
    pub members: Vec<(NonZero, usize)>,
    pub ident: Option<Identification>,
}

impl ReesQuotient {
    fn build(ctx: &Ctx, words: &BTreeSet<NonZero>, bound: usize) -> Result<Self> {
        let mut members: Vec<(NonZero, usize)> = Vec::new();
        let mut reps = Vec::new();
        let mut assigned: BTreeSet<&NonZero> = BTreeSet::new();
        for w in words {
            if assigned.contains(w) {
                continue;
            }
            let class = ctx.class(w, bound);
            if class.zero || !class.complete {
                return Err(SemigroupError::Unresolved(format!("class of {} not enumerated", w)));
            }
            let idx = reps.len();
            for x in class.members {
                let Some(x) = words.get(&x) else {
                    return Err(SemigroupError::Unresolved(format!("{} equals {} but is not listed", x, w)));
                };
                assigned.insert(x);
                members.push((x.clone(), idx));
            }
            reps.push(w.clone());
        }
        members.sort();
        let n = reps.len();
        let mut q = ReesQuotient {
            elements: reps.iter().cloned().map(Some).chain([None]).collect(),
            zero: n,
            table: vec![vec![n; n + 1]; n + 1],
            assignment: vec![],
            members,
            ident: ctx.ident.clone(),
        };
        for i in 0..n {
            for j in 0..n {
                q.table[i][j] = q.lookup(ctx, &reps[i].mul(&reps[j]));
            }
        }
        let l = ctx.layout;
        q.assignment = (0..l.generators()).map(|g| q.lookup(ctx, &canonicalize_in(&l, &[g]).unwrap())).collect();
        Ok(q)
    }

    fn lookup(&self, ctx: &Ctx, w: &CanonicalWord) -> usize {
        match ctx.normalize_word(w.clone()) {
            CanonicalWord::Zero => self.zero,
            CanonicalWord::Word(x) => match self.members.binary_search_by(|(y, _)| y.cmp(&x)) {
                Ok(i) => self.members[i].1,
                Err(_) => self.zero,
            },
        }
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    /// Image of a canonical word: normalize, then collapse the ideal.
    pub fn image(&self, m: &MinskyMachine, w: &CanonicalWord) -> usize {
        self.lookup(&Ctx::new(m, self.ident.clone()), w)
    }

    pub fn structure(&self) -> FiniteStructure {
        FiniteStructure::Semigroup { table: self.table.clone(), zero: Some(self.zero), assignment: self.assignment.clone() }
    }

    /// Associativity, every defining relation of S(M), and independence of
    /// the table from the chosen representatives.
    pub fn verify(&self, m: &MinskyMachine) -> std::result::Result<(), String> {
        if !check_associative(&self.table) {
            return Err("table is not associative".into());
        }
        self.structure().verify(&build_presentation(m))?;
        let ctx = Ctx::new(m, self.ident.clone());
        let l = ctx.layout;
        for g in 0..l.generators() {
            let gw = canonicalize_in(&l, &[g]).unwrap();
            let gi = self.assignment[g];
            for (w, i) in &self.members {
                let w = CanonicalWord::Word(w.clone());
                if self.lookup(&ctx, &w.mul(&gw)) != self.table[*i][gi] || self.lookup(&ctx, &gw.mul(&w)) != self.table[gi][*i] {
                    return Err(format!("multiplying {} by generator {} is not well defined", w, l.names()[g]));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuotientMethod {
    /// Rees quotient by the non-divisors of an element.
    Divisors { of: CanonicalWord },
    /// Rees quotient by `V_R`.
    VR { r: u64 },
    /// Divisor quotient after adding `a^d = a^{2d}` on some glasses.
    Identified { of: CanonicalWord, ident: Identification },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientCertificate {
    pub method: QuotientMethod,
    pub quotient: ReesQuotient,
    pub words: (CanonicalWord, CanonicalWord),
    pub images: (usize, usize),
}

impl QuotientCertificate {
    /// Recheck the quotient and evaluate the literal words through the table.
    pub fn check(&self, m: &MinskyMachine) -> std::result::Result<(), String> {
        self.quotient.verify(m)?;
        let s = self.quotient.structure();
        let l = super::Layout::of(m);
        let e1 = s.eval_sword(&self.words.0.to_sword(&l));
        let e2 = s.eval_sword(&self.words.1.to_sword(&l));
        if (e1, e2) != (Some(self.images.0), Some(self.images.1)) {
            return Err(format!("recorded images {:?} but evaluation gives {:?}", self.images, (e1, e2)));
        }
        if self.images.0 == self.images.1 {
            return Err("images coincide".into());
        }
        Ok(())
    }
}

fn attempt(ctx: &Ctx, z: &CanonicalWord, w1: &CanonicalWord, w2: &CanonicalWord, bound: usize) -> Option<(ReesQuotient, (usize, usize))> {
    let x = ctx.normalize(z.nonzero()?.clone());
    let d = ctx.divisors(&x, bound, false).ok().filter(|d| d.complete)?;
    let q = ReesQuotient::build(ctx, &d.words, bound).ok()?;
    let images = (q.lookup(ctx, w1), q.lookup(ctx, w2));
    (images.0 != images.1).then_some((q, images))
}

/// A finite quotient of S(M) separating two different elements.
///
/// Tries the Rees quotient by the non-divisors of either word; if those are
/// infinite, adds `a^d = a^{2d}` (first for the last two glasses, then for
/// all of them) with growing `d`.
pub fn separating_quotient(m: &MinskyMachine, w1: &CanonicalWord, w2: &CanonicalWord, bound: usize) -> Result<QuotientCertificate> {
    if [w1, w2].iter().any(|w| w.nonzero().is_some_and(|x| x.is_empty())) {
        return Err(SemigroupError::EmptyWord);
    }
    if equal(m, w1, w2, bound) == Tri::Yes {
        return Err(SemigroupError::EqualWords);
    }
    let ctx = Ctx::new(m, None);
    for z in [w1, w2] {
        if let Some((quotient, images)) = attempt(&ctx, z, w1, w2, bound) {
            let method = QuotientMethod::Divisors { of: z.clone() };
            return Ok(QuotientCertificate { method, quotient, words: (w1.clone(), w2.clone()), images });
        }
    }
    let k = m.glasses;
    let top = |w: &CanonicalWord| w.nonzero().map(|x| x.a_exp.iter().copied().max().unwrap_or(0)).unwrap_or(0);
    let mut sets = vec![(1..=k).collect::<Vec<_>>()];
    if k > 2 {
        sets.insert(0, vec![k - 1, k]);
    }
    for glasses in sets {
        for d in 1..=top(w1).max(top(w2)) + 3 {
            let ident = Identification { glasses: glasses.clone(), d };
            let ctx = Ctx::new(m, Some(ident.clone()));
            for z in [w1, w2] {
                if let Some((quotient, images)) = attempt(&ctx, z, w1, w2, bound) {
                    let method = QuotientMethod::Identified { of: z.clone(), ident };
                    return Ok(QuotientCertificate { method, quotient, words: (w1.clone(), w2.clone()), images });
                }
            }
        }
    }
    Err(SemigroupError::Unresolved(format!("no separating quotient found for {} and {}", w1, w2)))
}

/// The Rees quotient `S(M) / V_R`: elements dividing a nonzero
/// configuration word with all exponents at most `r`.
pub fn v_r_quotient(m: &MinskyMachine, r: u64, bound: usize) -> Result<ReesQuotient> {
    let ctx = Ctx::new(m, None);
    let mut words = BTreeSet::new();
    for state in m.command_numbers().into_iter().filter(|&s| s != 0) {
        let mut coins = vec![0u64; m.glasses];
        loop {
            let w = super::config_word(&MinskyConfig { state, coins: coins.clone() });
            match is_zero(m, &w, bound) {
                Tri::No => {
                    let d = ctx.divisors(w.nonzero().unwrap(), bound, false)?;
                    if !d.complete {
                        return Err(SemigroupError::Unresolved(format!("divisors of {}", w)));
                    }
                    words.extend(d.words);
                }
                Tri::Yes => {}
                Tri::Unknown => return Err(SemigroupError::Unresolved(format!("zero test of {}", w))),
            }
            let Some(i) = coins.iter().position(|&c| c < r) else { break };
            coins[i] += 1;
            for c in &mut coins[..i] {
                *c = 0;
            }
        }
    }
    ReesQuotient::build(&ctx, &words, bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::minsky::M_PAR;
    use crate::semigroup::{config_word, parse_word};

    #[test]
    fn separate_from_zero() {
        let m = MinskyMachine::parse(M_PAR).unwrap();
        let w = config_word(&MinskyConfig::new(2, &[0, 1]));
        let cert = separating_quotient(&m, &w, &CanonicalWord::Zero, 1000).unwrap();
        cert.check(&m).unwrap();
        let d = crate::semigroup::divisors(&m, &w, 50).unwrap();
        let classes: BTreeSet<usize> = d.words.iter().map(|x| cert.quotient.image(&m, &CanonicalWord::Word(x.clone()))).collect();
        assert_eq!(cert.quotient.size(), classes.len() + 1);
        assert!(separating_quotient(&m, &w, &w, 1000).is_err());
    }

    #[test]
    fn v_r_of_a_halting_machine() {
        let m = MinskyMachine::parse("minsky glasses=1\ncmd 1 sub 1 -> 2\ncmd 2 if0 1 -> 2\n").unwrap();
        let (a, aa) = (parse_word(&m, "a1").unwrap(), parse_word(&m, "a1^2").unwrap());
        let q = v_r_quotient(&m, 2, 1000).unwrap();
        q.verify(&m).unwrap();
        assert_ne!(q.image(&m, &a), q.image(&m, &aa));
        // (2;1) equals (1;2), so a1^2 survives in V_1 but a1^3 does not.
        let q1 = v_r_quotient(&m, 1, 1000).unwrap();
        assert_ne!(q1.image(&m, &aa), q1.zero);
        assert_eq!(q1.image(&m, &parse_word(&m, "a1^3").unwrap()), q1.zero);
    }

    #[test]
    fn powers_of_a_letter() {
        let m = MinskyMachine::parse(M_PAR).unwrap();
        let a = parse_word(&m, "a1").unwrap();
        let aa = parse_word(&m, "a1^2").unwrap();
        let cert = separating_quotient(&m, &a, &aa, 1000).unwrap();
        cert.check(&m).unwrap();
    }
}
