// Letter actions on T written out case by case from the displayed formulas,
// and a semidirect-product evaluator for relators. Index arithmetic (u*a_j,
// u*A_j) goes through `Model::index`, which the simulation tests cover.

use forge::group::{Basis, GLetter, GroupPresentationData, IndexWord, Model, TElement};
use forge::semigroup::NonZero;

pub fn letters(k: usize) -> Vec<GLetter> {
    let mut out: Vec<GLetter> = (0..=k).map(GLetter::Cap).collect();
    for j in 1..=k {
        out.extend([GLetter::A(j), GLetter::APrime(j), GLetter::Tilde(j), GLetter::TildePrime(j)]);
    }
    out
}

fn at(b: &Basis, j: usize, x: u8) -> Basis {
    let mut v = b.v.clone();
    v[j] = x;
    Basis { v, u: b.u.clone() }
}

fn with_exp(g: &Model, u: &IndexWord, j: usize) -> Option<IndexWord> {
    let mut w = u.word().clone();
    w.a_exp[j - 1] += 1;
    g.index(&w, u.has_a0()).unwrap()
}

fn with_cap(g: &Model, u: &IndexWord, j: usize) -> Option<IndexWord> {
    if j == 0 {
        return g.index(u.word(), true).unwrap();
    }
    let mut w = u.word().clone();
    w.a_set.insert(j);
    g.index(&w, u.has_a0()).unwrap()
}

// z^{a_j} for i_j = 1, 2, 3, with `up` the index of the longer word.
fn three_case(p: u32, b: &Basis, j: usize, up: Option<IndexWord>) -> TElement {
    let i = j - 1;
    let mut e = TElement::zero(p);
    match b.v[i] {
        1 => {
            for x in 1..=3 {
                e.add_term(at(b, i, x), 1);
            }
            if let Some(u) = up {
                e.add_term(Basis { v: b.v.clone(), u }, 1);
            }
        }
        2 => {
            e.add_term(b.clone(), 1);
            e.add_term(at(b, i, 1), -1);
        }
        _ => e.add_term(at(b, i, 1), 1),
    }
    e
}

/// Image of a basis vector under a letter (positive power).
pub fn oracle_image(g: &Model, b: &Basis, y: GLetter) -> TElement {
    let p = g.p;
    let fixed = TElement::basis(p, b.clone());
    let u = &b.u;
    let primed = |img: TElement| img.add(&fixed.neg());
    match y {
        GLetter::Cap(j) if u.contains(j) => fixed,
        GLetter::Cap(j) => {
            let mut e = fixed.clone();
            if let Some(t) = with_cap(g, u, j) {
                e.add_term(Basis { v: b.v.clone(), u: t }, 1);
            }
            e
        }
        GLetter::A(j) | GLetter::APrime(j) if u.contains(j) => fixed,
        GLetter::A(j) => three_case(p, b, j, with_exp(g, u, j)),
        GLetter::APrime(j) => primed(three_case(p, b, j, with_exp(g, u, j))),
        GLetter::Tilde(_) | GLetter::TildePrime(_) if u.has_a0() => fixed,
        GLetter::Tilde(j) => three_case(p, b, j, with_exp(g, u, j)),
        GLetter::TildePrime(j) => primed(three_case(p, b, j, with_exp(g, u, j))),
    }
}

/// `z_{1,u}` for an x-generator, the identity when `u` is the zero class.
pub fn x_image(g: &Model, pd: &GroupPresentationData, gen: usize) -> TElement {
    let u = &pd.x_words[gen];
    let w = NonZero { q: Some(u.q), a_exp: vec![0; g.k()], a_set: u.caps.iter().copied().filter(|&c| c != 0).collect() };
    match g.index(&w, u.caps.contains(&0)).unwrap() {
        Some(idx) => TElement::basis(g.p, Basis { v: vec![1; g.k()], u: idx }),
        None => TElement::zero(g.p),
    }
}

/// Whether a relator is trivial in the semidirect product `T ⋊ Aut`:
/// its T part vanishes and its automorphism part fixes every sample.
pub fn relator_trivial(g: &Model, pd: &GroupPresentationData, r: &[i32], samples: &[Basis]) -> bool {
    let x_count = pd.x_words.len();
    let k = pd.k;
    let mut t = TElement::zero(g.p);
    let mut auto: Vec<(GLetter, i8)> = Vec::new();
    for &x in r {
        let gen = x.unsigned_abs() as usize - 1;
        let s = if x > 0 { 1 } else { -1 };
        if gen < x_count {
            t = t.add(&x_image(g, pd, gen).scale(s as i64));
            continue;
        }
        let off = gen - x_count;
        let y = if off <= k {
            GLetter::Cap(off)
        } else {
            let (j, kind) = ((off - k - 1) / 4 + 1, (off - k - 1) % 4);
            [GLetter::A(j), GLetter::APrime(j), GLetter::Tilde(j), GLetter::TildePrime(j)][kind]
        };
        // (t, f)(1, y) = (t^y, fy)
        t = g.apply_letter(&t, y, s).unwrap();
        auto.push((y, s));
    }
    t.is_zero() && samples.iter().all(|b| {
        let e = TElement::basis(g.p, b.clone());
        g.apply_word(&e, &auto).unwrap() == e
    })
}

// u*y computed on the words themselves: a repeated A-letter, or an
// a-letter after the A-letter of its glass, gives zero.
pub fn index_product(g: &Model, u: &IndexWord, y: GLetter) -> Option<IndexWord> {
    let mut w = u.word().clone();
    match y {
        GLetter::A(j) if w.a_set.contains(&j) => return None,
        GLetter::A(j) => w.a_exp[j - 1] += 1,
        GLetter::Cap(j) => {
            if !w.a_set.insert(j) {
                return None;
            }
        }
        _ => unreachable!(),
    }
    g.index(&w, u.has_a0()).unwrap()
}

// Every basis vector outside the complement stays outside under every letter.
pub fn closed(g: &Model, complement: &[IndexWord], samples: &[Basis]) -> bool {
    let inside = |b: &Basis| complement.binary_search(&b.u).is_err();
    samples.iter().filter(|b| inside(b)).all(|b| {
        let e = TElement::basis(g.p, b.clone());
        letters(g.k()).into_iter().all(|y| [1, -1].iter().all(|&s| g.apply_letter(&e, y, s).unwrap().support().all(inside)))
    })
}
