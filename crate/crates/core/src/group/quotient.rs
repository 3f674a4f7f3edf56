use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::model::{Basis, IndexWord, Model, TElement};
use super::{GLetter, GroupError, Result};
use crate::machines::MinskyConfig;
use crate::semigroup::{config_word, is_zero, CanonicalWord, Ctx, NonZero};
use crate::Tri;

/// Ideal of index words whose basis vectors span a normal subgroup of
/// finite index in T.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IdealSpec {
    /// Words that do not divide a nonzero configuration word with all
    /// exponents at most `r`.
    VR { r: u64 },
    /// Every `A_0`-word, and the `W`-words with an exponent at least `d`.
    Y { d: u64 },
    /// `W`-words with an exponent at least `d`, and the `A_0`-classes
    /// containing such a word.
    YZ { d: u64 },
}

impl fmt::Display for IdealSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IdealSpec::VR { r } => write!(f, "V_R(R={})", r),
            IdealSpec::Y { d } => write!(f, "Y(D={})", d),
            IdealSpec::YZ { d } => write!(f, "YZ(D={})", d),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TQuotientDescriptor {
    pub spec: IdealSpec,
    pub p: u32,
    /// Index words outside the ideal.
    pub complement: Vec<IndexWord>,
    /// `|complement| * 3^K`; the index of the span in T is `p` to this.
    pub index_exponent: usize,
    /// Basis vectors checked for closure of the span.
    pub checked: usize,
}

impl TQuotientDescriptor {
    pub fn index(&self) -> Option<u128> {
        (self.p as u128).checked_pow(u32::try_from(self.index_exponent).ok()?)
    }

    pub fn in_complement(&self, u: &IndexWord) -> bool {
        self.complement.binary_search(u).is_ok()
    }

    /// The part of `e` outside the span, i.e. its image in the quotient.
    pub fn project(&self, e: &TElement) -> TElement {
        let mut out = TElement::zero(e.p);
        for (b, &c) in &e.terms {
            if self.in_complement(&b.u) {
                out.add_term(b.clone(), c as i64);
            }
        }
        out
    }
}

struct Ideal<'a> {
    model: &'a Model,
    spec: IdealSpec,
    ctx: Ctx,
    divisors: Option<HashSet<NonZero>>,
    memo: HashMap<IndexWord, bool>,
}

impl<'a> Ideal<'a> {
    fn new(model: &'a Model, spec: IdealSpec) -> Result<Self> {
        let ctx = Ctx::new(&model.machine, None);
        let divisors = match spec {
            IdealSpec::VR { r } => Some(v_r_divisors(model, &ctx, r)?),
            _ => None,
        };
        Ok(Ideal { model, spec, ctx, divisors, memo: HashMap::new() })
    }

    fn contains(&mut self, u: &IndexWord) -> Result<bool> {
        if let Some(&x) = self.memo.get(u) {
            return Ok(x);
        }
        let x = match (self.spec, u) {
            (IdealSpec::VR { .. }, _) => !self.divisors.as_ref().unwrap().contains(u.word()),
            (IdealSpec::Y { d } | IdealSpec::YZ { d }, IndexWord::W(_)) => u.max_exp() >= d,
            (IdealSpec::Y { .. }, IndexWord::W0(_)) => true,
            (IdealSpec::YZ { d }, IndexWord::W0(w)) => reaches(self.model, &self.ctx, w, d)?,
        };
        self.memo.insert(u.clone(), x);
        Ok(x)
    }
}

// Whether the class of `w` has a member with an exponent at least `d`.
// Members below `d` are finitely many, so the search ends.
fn reaches(model: &Model, ctx: &Ctx, w: &NonZero, d: u64) -> Result<bool> {
    let big = |x: &NonZero| x.a_exp.iter().any(|&e| e >= d);
    let mut seen = HashSet::from([w.clone()]);
    let mut queue = VecDeque::from([w.clone()]);
    while let Some(cur) = queue.pop_front() {
        if big(&cur) {
            return Ok(true);
        }
        for n in ctx.neighbours(&cur) {
            match n {
                CanonicalWord::Zero => return Err(GroupError::Precondition(format!("{} lies in the zero class", w))),
                CanonicalWord::Word(x) => {
                    if seen.insert(x.clone()) {
                        if seen.len() > model.bound {
                            return Err(GroupError::Unresolved(format!("class of {}", w)));
                        }
                        queue.push_back(x);
                    }
                }
            }
        }
    }
    Ok(false)
}

// Divisors of the nonzero configuration words with exponents at most `r`.
fn v_r_divisors(model: &Model, ctx: &Ctx, r: u64) -> Result<HashSet<NonZero>> {
    let m = &model.machine;
    let mut out = HashSet::new();
    for state in m.command_numbers().into_iter().filter(|&s| s != 0) {
        for coins in boxes(m.glasses, r) {
            let w = config_word(&MinskyConfig { state, coins });
            match is_zero(m, &w, model.bound) {
                Tri::Yes => {}
                Tri::No => {
                    let d = ctx.divisors(w.nonzero().unwrap(), model.bound, false)?;
                    if !d.complete {
                        return Err(GroupError::Unresolved(format!("divisors of {} are not finite within the bound", w)));
                    }
                    out.extend(d.words);
                }
                Tri::Unknown => return Err(GroupError::Unresolved(format!("zero test of {}", w))),
            }
        }
    }
    Ok(out)
}

fn boxes(k: usize, r: u64) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out.into_iter().flat_map(|v: Vec<u64>| (0..=r).map(move |x| [v.clone(), vec![x]].concat())).collect();
    }
    out
}

fn letters(k: usize) -> Vec<GLetter> {
    let mut v: Vec<GLetter> = (0..=k).map(GLetter::Cap).collect();
    for i in 1..=k {
        v.extend([GLetter::A(i), GLetter::APrime(i), GLetter::Tilde(i), GLetter::TildePrime(i)]);
    }
    v
}

/// The span of the basis vectors indexed by an ideal, with its closure
/// under every generator action checked on the index words next to the
/// complement.
pub fn t_quotient(model: &Model, spec: IdealSpec) -> Result<TQuotientDescriptor> {
    let mut ideal = Ideal::new(model, spec)?;
    // Candidates for the complement, and the boundary of the ideal.
    let (inner, outer): (Vec<NonZero>, Vec<NonZero>) = match spec {
        IdealSpec::Y { d } | IdealSpec::YZ { d } => (model.small_words(d), model.small_words(d + 2)),
        IdealSpec::VR { r } => {
            let words: BTreeSet<NonZero> = ideal.divisors.as_ref().unwrap().iter().filter(|w| w.q.is_some()).cloned().collect();
            let mut outer: BTreeSet<NonZero> = model.small_words(r + 2).into_iter().collect();
            outer.extend(words.iter().cloned());
            (words.into_iter().collect(), outer.into_iter().collect())
        }
    };
    let mut complement = BTreeSet::new();
    for w in &inner {
        for u in [model.index(w, false)?, model.index(w, true)?].into_iter().flatten() {
            if !ideal.contains(&u)? {
                complement.insert(u);
            }
        }
    }
    let mut boundary = BTreeSet::new();
    for w in &outer {
        for u in [model.index(w, false)?, model.index(w, true)?].into_iter().flatten() {
            if ideal.contains(&u)? {
                boundary.insert(u);
            }
        }
    }
    let vectors = model.vectors();
    let mut checked = 0;
    for u in &boundary {
        for v in &vectors {
            let e = TElement::basis(model.p, Basis { v: v.clone(), u: u.clone() });
            checked += 1;
            for y in letters(model.k()) {
                for s in [1, -1] {
                    for b in model.apply_letter(&e, y, s)?.support() {
                        if !ideal.contains(&b.u)? {
                            return Err(GroupError::NotClosed(format!("{}^({}^{}) has the term {} outside the span", e, y, s, b)));
                        }
                    }
                }
            }
        }
    }
    let complement: Vec<IndexWord> = complement.into_iter().collect();
    let index_exponent = complement.len() * vectors.len();
    Ok(TQuotientDescriptor { spec, p: model.p, complement, index_exponent, checked })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TCertificate {
    pub quotient: TQuotientDescriptor,
    pub element: TElement,
    /// Support vectors of the element outside the span.
    pub witness: Vec<Basis>,
}

impl TCertificate {
    /// Rebuild the quotient and confirm the element survives in it.
    pub fn check(&self, model: &Model) -> std::result::Result<(), String> {
        let q = t_quotient(model, self.quotient.spec).map_err(|e| e.to_string())?;
        if q != self.quotient {
            return Err("recorded quotient differs from the recomputed one".into());
        }
        let proj = q.project(&self.element);
        if proj.is_zero() {
            return Err("the element lies in the span".into());
        }
        if self.witness.is_empty() || self.witness.iter().any(|b| !proj.terms.contains_key(b)) {
            return Err("witness vectors are not support vectors outside the span".into());
        }
        Ok(())
    }
}

/// A finite quotient of T, normal in G(M), in which `e` is not the
/// identity. W-indexed support is separated by `Y(D)`; otherwise the
/// `A_0`-classes in the support must be finite and `YZ(D)` is used with
/// `D` past their exponents.
pub fn separate_element(model: &Model, e: &TElement) -> Result<TCertificate> {
    if e.is_zero() {
        return Err(GroupError::Identity);
    }
    let w_exps: Vec<u64> = e.support().filter(|b| !b.u.has_a0()).map(|b| b.u.max_exp()).collect();
    let spec = if let Some(&m) = w_exps.iter().max() {
        IdealSpec::Y { d: m + 1 }
    } else {
        let ctx = Ctx::new(&model.machine, None);
        let mut top = 0;
        for b in e.support() {
            let class = ctx.class(b.u.word(), model.bound);
            if !class.complete || class.zero {
                return Err(GroupError::Unresolved(format!("the class of {} is not finite within the bound", b.u)));
            }
            top = class.members.iter().flat_map(|x| x.a_exp.iter().copied()).chain([top]).max().unwrap();
        }
        IdealSpec::YZ { d: top + 1 }
    };
    let quotient = t_quotient(model, spec)?;
    let proj = quotient.project(e);
    if proj.is_zero() {
        return Err(GroupError::NotClosed(format!("{} lies in the span of {}", e, spec)));
    }
    Ok(TCertificate { witness: proj.support().cloned().collect(), quotient, element: e.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::minsky::M_PAR;
    use crate::machines::MinskyMachine;

    const HALTING: &str = "minsky glasses=1\ncmd 1 sub 1 -> 2\ncmd 2 if0 1 -> 2\n";

    #[test]
    fn y_and_yz_quotients() {
        let g = Model::new(&MinskyMachine::parse(M_PAR).unwrap(), 2).unwrap();
        let q = t_quotient(&g, IdealSpec::YZ { d: 2 }).unwrap();
        assert!(!q.complement.is_empty());
        assert_eq!(q.index_exponent, q.complement.len() * 9);
        let q0 = t_quotient(&g, IdealSpec::YZ { d: 0 }).unwrap();
        assert!(q0.complement.is_empty());
        assert_eq!(q0.index(), Some(1));
        let e = g.parse_element("(1,1|q1)").unwrap();
        let cert = separate_element(&g, &e).unwrap();
        assert_eq!(cert.quotient.spec, IdealSpec::Y { d: 1 });
        cert.check(&g).unwrap();
        assert!(matches!(separate_element(&g, &TElement::zero(2)), Err(GroupError::Identity)));
    }

    #[test]
    fn a0_support_on_a_halting_machine() {
        let g = Model::new(&MinskyMachine::parse(HALTING).unwrap(), 3).unwrap();
        let e = g.config_element(&MinskyConfig::new(1, &[1]), true).unwrap();
        assert!(!e.is_zero());
        let cert = separate_element(&g, &e).unwrap();
        assert!(matches!(cert.quotient.spec, IdealSpec::YZ { .. }));
        cert.check(&g).unwrap();
        let v0 = t_quotient(&g, IdealSpec::VR { r: 0 }).unwrap();
        let ctx = Ctx::new(&g.machine, None);
        for u in &v0.complement {
            let class = ctx.class(u.word(), 1000);
            assert!(class.members.iter().any(|x| x.a_exp.iter().all(|&c| c == 0)), "{}", u);
        }
    }
}
