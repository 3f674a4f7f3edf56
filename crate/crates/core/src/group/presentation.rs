use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::model::{Basis, Model, TElement};
use super::{is_prime, GLetter, GroupError, Result};
use crate::machines::MinskyMachine;
use crate::rewriting::{commutator, free_reduce, inverse, GWord, Presentation};
use crate::semigroup::NonZero;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Tag {
    G1,
    G2,
    G3,
    G4,
    G5,
    G6,
    G7,
    G8,
}

impl fmt::Display for Tag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self)
    }
}

/// `u = q_j w` with `w` a set of `A`-letters, `0` standing for `A_0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct XWord {
    pub q: usize,
    pub caps: BTreeSet<usize>,
}

impl fmt::Display for XWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x_q{}", self.q)?;
        for c in &self.caps {
            write!(f, "A{}", c)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupPresentationData {
    pub p: u32,
    pub k: usize,
    pub n: usize,
    /// The index set U of `L0`, in generator order.
    pub x_words: Vec<XWord>,
    /// `M_0, ..., M_K`.
    pub m_sets: Vec<Vec<GLetter>>,
    pub presentation: Presentation,
    /// Tag of each relator of `presentation`.
    pub tags: Vec<Tag>,
    /// Relator instances per tag before duplicates are dropped.
    pub instances: BTreeMap<Tag, usize>,
}

struct Builder {
    seen: HashSet<GWord>,
    relators: Vec<GWord>,
    tags: Vec<Tag>,
    instances: BTreeMap<Tag, usize>,
}

impl Builder {
    fn push(&mut self, tag: Tag, r: GWord) {
        *self.instances.entry(tag).or_insert(0) += 1;
        let r = free_reduce(&r);
        if !r.is_empty() && self.seen.insert(r.clone()) {
            self.relators.push(r);
            self.tags.push(tag);
        }
    }
}

fn cat(parts: &[&[i32]]) -> GWord {
    parts.concat()
}

// `x^y = y^-1 x y`.
fn conj(x: &[i32], y: &[i32]) -> GWord {
    cat(&[&inverse(y), x, y])
}

// `x^{y} x^-1 (x^{y'})^-1`: the relation `x^{y-1} = x^{y'}`.
fn minus_one(x: &[i32], y: &[i32], y2: &[i32]) -> GWord {
    cat(&[&conj(x, y), &inverse(x), &inverse(&conj(x, y2))])
}

// Every vector of `{-1, 0, 1}^k`.
fn signs(k: usize) -> Vec<Vec<i32>> {
    let mut out = vec![vec![]];
    for _ in 0..k {
        out = out.into_iter().flat_map(|v: Vec<i32>| [-1, 0, 1].map(|s| [v.clone(), vec![s]].concat())).collect();
    }
    out
}

impl GroupPresentationData {
    pub fn x_count(&self) -> usize {
        self.x_words.len()
    }

    pub fn x_gen(&self, u: &XWord) -> i32 {
        self.x_words.binary_search(u).expect("x-word in U") as i32 + 1
    }

    pub fn letter_gen(&self, y: GLetter) -> i32 {
        let base = self.x_count() as i32 + 1;
        let k1 = self.k as i32 + 1;
        let at = |i: usize, off: i32| base + k1 + 4 * (i as i32 - 1) + off;
        match y {
            GLetter::Cap(j) => base + j as i32,
            GLetter::A(i) => at(i, 0),
            GLetter::APrime(i) => at(i, 1),
            GLetter::Tilde(i) => at(i, 2),
            GLetter::TildePrime(i) => at(i, 3),
        }
    }

    /// The generator with 0-based index `g`.
    pub fn decode(&self, g: usize) -> std::result::Result<&XWord, GLetter> {
        if g < self.x_count() {
            return Ok(&self.x_words[g]);
        }
        let r = g - self.x_count();
        if r <= self.k {
            return Err(GLetter::Cap(r));
        }
        let (i, off) = ((r - self.k - 1) / 4 + 1, (r - self.k - 1) % 4);
        Err([GLetter::A(i), GLetter::APrime(i), GLetter::Tilde(i), GLetter::TildePrime(i)][off])
    }

    pub fn relators_with(&self, tag: Tag) -> impl Iterator<Item = &GWord> {
        self.presentation.relators.iter().zip(&self.tags).filter(move |(_, t)| **t == tag).map(|(r, _)| r)
    }

    /// Text export; each block of relators is headed by its tag.
    pub fn to_text(&self) -> String {
        let p = &self.presentation;
        let mut s = format!("group\ngen {}\n", p.generators.join(" "));
        let mut last = None;
        for (r, t) in p.relators.iter().zip(&self.tags) {
            if last != Some(*t) {
                s.push_str(&format!("# {}\n", t));
                last = Some(*t);
            }
            s.push_str(&format!("rel {}\n", p.gword_text(r)));
        }
        s
    }

    /// Image of `x_u` in the model: `z_{1,u}`, or the identity.
    pub fn x_element(&self, model: &Model, u: &XWord) -> Result<TElement> {
        let w = NonZero { q: Some(u.q), a_exp: vec![0; self.k], a_set: u.caps.iter().copied().filter(|&c| c != 0).collect() };
        Ok(model.basis_element(model.ones(), model.index(&w, u.caps.contains(&0))?))
    }

    /// Evaluate a word in the semidirect product of T and the automorphism
    /// group: the automorphism part is returned as a freely reduced letter
    /// word, the T part as an element.
    pub fn evaluate(&self, model: &Model, w: &[i32]) -> Result<(Vec<(GLetter, i8)>, TElement)> {
        let mut auto: Vec<(GLetter, i8)> = Vec::new();
        let mut t = TElement::zero(model.p);
        for &x in w {
            let s = x.signum() as i8;
            match self.decode(x.unsigned_abs() as usize - 1) {
                Ok(u) => t = t.add(&self.x_element(model, u)?.scale(s as i64)),
                Err(y) => {
                    t = model.apply_letter(&t, y, s)?;
                    if auto.last() == Some(&(y, -s)) {
                        auto.pop();
                    } else {
                        auto.push((y, s));
                    }
                }
            }
        }
        Ok((auto, t))
    }

    /// Whether a relator is the identity in the model, judged on its
    /// T part and on the given basis vectors for its automorphism part.
    pub fn relator_holds(&self, model: &Model, r: &[i32], samples: &[Basis]) -> Result<bool> {
        let (auto, t) = self.evaluate(model, r)?;
        if !t.is_zero() {
            return Ok(false);
        }
        if auto.is_empty() {
            return Ok(true);
        }
        for b in samples {
            let e = TElement::basis(model.p, b.clone());
            if model.apply_word(&e, &auto)? != e {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// The presentation of G(M) with relators G1 to G8.
pub fn build_group_presentation(m: &MinskyMachine, p: u32) -> Result<GroupPresentationData> {
    if !is_prime(p) {
        return Err(GroupError::NotPrime(p));
    }
    m.validate()?;
    let k = m.glasses;
    let n = m.command_numbers().into_iter().max().unwrap_or(0);
    let mut x_words = Vec::new();
    for q in 0..=n {
        for mask in 0..(1u32 << (k + 1)) {
            x_words.push(XWord { q, caps: (0..=k).filter(|j| mask >> j & 1 == 1).collect() });
        }
    }
    x_words.sort();
    let mut m_sets = vec![(1..=k).flat_map(|i| [GLetter::Tilde(i), GLetter::TildePrime(i)]).chain([GLetter::Cap(0)]).collect::<Vec<_>>()];
    for i in 1..=k {
        m_sets.push(vec![GLetter::A(i), GLetter::APrime(i), GLetter::Cap(i)]);
    }
    let mut names: Vec<String> = x_words.iter().map(|u| u.to_string()).collect();
    names.extend((0..=k).map(|j| GLetter::Cap(j).to_string()));
    for i in 1..=k {
        names.extend([GLetter::A(i), GLetter::APrime(i), GLetter::Tilde(i), GLetter::TildePrime(i)].map(|y| y.to_string()));
    }
    let mut data = GroupPresentationData {
        p,
        k,
        n,
        x_words,
        m_sets,
        presentation: Presentation::group(&names.iter().map(String::as_str).collect::<Vec<_>>(), vec![]),
        tags: vec![],
        instances: BTreeMap::new(),
    };
    let mut b = Builder { seen: HashSet::new(), relators: vec![], tags: vec![], instances: BTreeMap::new() };
    let xs: Vec<GWord> = data.x_words.iter().map(|u| vec![data.x_gen(u)]).collect();
    let l = |y: GLetter| vec![data.letter_gen(y)];
    let caps: Vec<GWord> = (0..=k).map(|j| l(GLetter::Cap(j))).collect();
    let l2: Vec<GWord> = (1..=k)
        .flat_map(|i| [GLetter::A(i), GLetter::APrime(i), GLetter::Tilde(i), GLetter::TildePrime(i)])
        .map(|y| l(y))
        .collect();
    let pw = p as usize;

    // G1: H0 and H1 abelian of exponent p, H2 abelian.
    for family in [&xs, &caps] {
        for (i, x) in family.iter().enumerate() {
            b.push(Tag::G1, x.repeat(pw));
            for y in &family[i + 1..] {
                b.push(Tag::G1, commutator(x, y));
            }
        }
    }
    for (i, x) in l2.iter().enumerate() {
        for y in &l2[i + 1..] {
            b.push(Tag::G1, commutator(x, y));
        }
    }

    // G2: letters of different M_i commute.
    for i in 0..=k {
        for j in i + 1..=k {
            for &y in &data.m_sets[i] {
                for &z in &data.m_sets[j] {
                    b.push(Tag::G2, commutator(&l(y), &l(z)));
                }
            }
        }
    }

    // G3, G4: BR-conjoints with f(t) = t - 1, written for the inverses.
    let br = |b: &mut Builder, tag: Tag, f: &[GWord], f2: &[GWord], x: &GWord| {
        for a in f {
            for a2 in f2 {
                b.push(tag, commutator(a, a2));
            }
        }
        for (a, a2) in f.iter().zip(f2) {
            b.push(tag, minus_one(x, a, a2));
        }
        for alpha in signs(f.len()) {
            let z: GWord = f.iter().zip(&alpha).flat_map(|(a, &s)| crate::rewriting::power(a, s as i64)).collect();
            b.push(tag, commutator(&conj(x, &z), x));
        }
    };
    for i in 1..=k {
        let f = [inverse(&l(GLetter::A(i)))];
        let f2 = [inverse(&l(GLetter::APrime(i)))];
        br(&mut b, Tag::G3, &f, &f2, &caps[i]);
    }
    let f: Vec<GWord> = (1..=k).map(|i| inverse(&l(GLetter::Tilde(i)))).collect();
    let f2: Vec<GWord> = (1..=k).map(|i| inverse(&l(GLetter::TildePrime(i)))).collect();
    br(&mut b, Tag::G4, &f, &f2, &caps[0]);

    // G5.
    for (ui, u) in data.x_words.iter().enumerate() {
        for i in 0..=k {
            if u.caps.contains(&i) {
                for &z in &data.m_sets[i] {
                    b.push(Tag::G5, commutator(&xs[ui], &l(z)));
                }
            } else {
                let mut v = u.clone();
                v.caps.insert(i);
                b.push(Tag::G5, cat(&[&commutator(&xs[ui], &caps[i]), &inverse(&xs[data.x_gen(&v) as usize - 1])]));
                if i > 0 {
                    b.push(Tag::G5, minus_one(&xs[ui], &l(GLetter::A(i)), &l(GLetter::APrime(i))));
                }
            }
        }
    }

    // G6.
    for q in 0..=n {
        let x = &xs[data.x_gen(&XWord { q, caps: BTreeSet::new() }) as usize - 1];
        for i in 1..=k {
            b.push(Tag::G6, cat(&[&conj(x, &l(GLetter::A(i))), &inverse(&conj(x, &l(GLetter::Tilde(i))))]));
            b.push(Tag::G6, cat(&[&conj(x, &l(GLetter::APrime(i))), &inverse(&conj(x, &l(GLetter::TildePrime(i))))]));
        }
    }

    // G7.
    for alpha in signs(k) {
        let z: GWord = alpha.iter().enumerate().flat_map(|(i, &s)| crate::rewriting::power(&l(GLetter::A(i + 1)), s as i64)).collect();
        for x in &xs {
            for y in &xs {
                b.push(Tag::G7, commutator(&conj(x, &z), y));
            }
        }
    }

    // G8: one relation per command.
    let star = |f: GWord, y: GLetter| -> GWord {
        match y {
            GLetter::A(i) => {
                let (a, a2) = (l(y), l(GLetter::APrime(i)));
                cat(&[&inverse(&f), &conj(&f, &a), &inverse(&conj(&f, &inverse(&a))), &conj(&f, &inverse(&a2))])
            }
            _ => commutator(&f, &l(y)),
        }
    };
    for c in &m.commands {
        let target = c.target.unwrap_or(0);
        let side = |q: usize, add: &[usize]| {
            let x = xs[data.x_gen(&XWord { q, caps: [0].into() }) as usize - 1].clone();
            let letters = add.iter().map(|&i| GLetter::A(i)).chain(c.zero.iter().map(|&i| GLetter::Cap(i)));
            letters.fold(x, |f, y| star(f, y))
        };
        let lhs = side(c.number, &c.sub);
        let rhs = side(target, &c.add);
        b.push(Tag::G8, cat(&[&lhs, &inverse(&rhs)]));
    }

    data.presentation.relators = b.relators;
    data.tags = b.tags;
    data.instances = b.instances;
    Ok(data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::machines::minsky::M_PAR;

    #[test]
    fn generator_counts() {
        let m = MinskyMachine::parse(M_PAR).unwrap();
        let d = build_group_presentation(&m, 2).unwrap();
        assert_eq!(d.x_count(), 24);
        assert_eq!(d.presentation.generators.len(), 24 + 3 + 8);
        assert_eq!(d.instances[&Tag::G7], 24 * 24 * 9);
        assert_eq!(d.relators_with(Tag::G8).count(), 3);
        assert!(matches!(build_group_presentation(&m, 4), Err(GroupError::NotPrime(4))));
        for g in 0..d.presentation.generators.len() {
            let name = match d.decode(g) {
                Ok(u) => u.to_string(),
                Err(y) => y.to_string(),
            };
            assert_eq!(name, d.presentation.generators[g]);
        }
    }

    #[test]
    fn relators_hold_in_the_model() {
        let m = MinskyMachine::parse(M_PAR).unwrap();
        let d = build_group_presentation(&m, 3).unwrap();
        let model = Model::new(&m, 3).unwrap();
        let samples = model.sample_basis(1).unwrap();
        for (r, t) in d.presentation.relators.iter().zip(&d.tags) {
            assert!(d.relator_holds(&model, r, &samples).unwrap(), "{} {}", t, d.presentation.gword_text(r));
        }
        let wrong = commutator(&[d.letter_gen(GLetter::Cap(1))], &[d.letter_gen(GLetter::A(1))]);
        assert!(!d.relator_holds(&model, &wrong, &samples).unwrap());
    }
}
