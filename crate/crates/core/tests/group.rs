mod common;

use std::collections::BTreeSet;

use common::tmodel::{closed, index_product, letters, oracle_image, relator_trivial};
use common::{cfg, configs, m_par};
use forge::group::{build_group_presentation, separate_element, t_quotient, Basis, GLetter, IdealSpec, Model, TElement};
use forge::machines::MinskyMachine;
use forge::semigroup::{config_word, equal, NonZero};
use forge::Tri;
use proptest::prelude::*;

const HALTING: &str = "minsky glasses=1\ncmd 1 sub 1 -> 2\ncmd 2 if0 1 -> 2\n";

fn model(p: u32) -> Model {
    Model::new(&m_par(), p).unwrap()
}

#[test]
fn letter_actions_match_the_formulas() {
    // p = 5 keeps signs visible.
    let g = model(5);
    for b in g.sample_basis(2).unwrap() {
        for y in letters(g.k()) {
            let e = TElement::basis(g.p, b.clone());
            assert_eq!(g.apply_letter(&e, y, 1).unwrap(), oracle_image(&g, &b, y), "{} under {}", b, y);
        }
    }
}

#[test]
fn inverse_letters_undo_letters() {
    for p in [2, 5] {
        let g = model(p);
        for b in g.sample_basis(4).unwrap() {
            let e = TElement::basis(p, b.clone());
            for y in letters(g.k()) {
                for s in [1, -1] {
                    let back = g.apply_letter(&g.apply_letter(&e, y, s).unwrap(), y, -s).unwrap();
                    assert_eq!(back, e, "{} under {}^{}", b, y, s);
                }
            }
        }
    }
}

#[test]
fn relators_hold_in_the_model() {
    for p in [2, 3] {
        let g = model(p);
        let pd = build_group_presentation(&m_par(), p).unwrap();
        let samples = g.sample_basis(1).unwrap();
        let bad: Vec<_> = pd
            .presentation
            .relators
            .iter()
            .zip(&pd.tags)
            .filter(|(r, _)| !relator_trivial(&g, &pd, r, &samples))
            .map(|(r, t)| format!("{} {}", t, pd.presentation.gword_text(r)))
            .collect();
        assert!(bad.is_empty(), "p={}: {:?}", p, &bad[..bad.len().min(5)]);
    }
}

#[test]
fn star_multiplies_index_words() {
    let g = model(3);
    let mut seen = BTreeSet::new();
    for b in g.sample_basis(3).unwrap() {
        if !seen.insert(b.u.clone()) {
            continue;
        }
        let f = TElement::basis(g.p, Basis { v: g.ones(), u: b.u.clone() });
        for j in 1..=g.k() {
            for y in [GLetter::A(j), GLetter::Cap(j)] {
                let want = g.basis_element(g.ones(), index_product(&g, &b.u, y));
                assert_eq!(g.star(&f, y).unwrap(), want, "{} * {}", b.u, y);
            }
        }
    }
    assert!(g.star(&TElement::zero(3), GLetter::A(1)).unwrap().is_zero());
    assert!(g.star(&TElement::zero(3), GLetter::Tilde(1)).is_err());
}

#[test]
fn configuration_elements_simulate_the_semigroup() {
    let m = m_par();
    let g = model(2);
    let cs = configs(&m, 2);
    let with: Vec<TElement> = cs.iter().map(|c| g.config_element(c, true).unwrap()).collect();
    for (i, a) in cs.iter().enumerate() {
        for (j, b) in cs.iter().enumerate() {
            let sg = equal(&m, &config_word(a), &config_word(b), 100_000);
            assert_eq!(Tri::from_bool(with[i] == with[j]), sg, "{} vs {}", a, b);
        }
    }
    // Without A0 the elements of running configurations are all distinct.
    let running: Vec<_> = cs.iter().filter(|c| c.state != 0).collect();
    let free: BTreeSet<String> = running.iter().map(|c| g.config_element(c, false).unwrap().to_string()).collect();
    assert_eq!(free.len(), running.len());
    assert_eq!(g.config_element(&cfg(2, &[0, 1]), true).unwrap(), g.config_element(&cfg(1, &[1, 1]), true).unwrap());
    assert!(g.config_element(&cfg(1, &[2, 0]), true).unwrap().is_zero());
}

#[test]
fn quotient_spans_are_normal() {
    let g = model(2);
    let samples = g.sample_basis(3).unwrap();
    for spec in [IdealSpec::Y { d: 1 }, IdealSpec::Y { d: 2 }, IdealSpec::YZ { d: 1 }, IdealSpec::YZ { d: 2 }] {
        let q = t_quotient(&g, spec).unwrap();
        assert!(closed(&g, &q.complement, &samples), "{}", spec);
        assert_eq!(q.index_exponent, q.complement.len() * 9);
    }
    let h = Model::new(&MinskyMachine::parse(HALTING).unwrap(), 3).unwrap();
    let hs = h.sample_basis(4).unwrap();
    for r in 0..3 {
        let q = t_quotient(&h, IdealSpec::VR { r }).unwrap();
        assert!(closed(&h, &q.complement, &hs), "V_R r={}", r);
    }
}

#[test]
fn separation_certificates_replay() {
    let g = model(2);
    for b in g.sample_basis(2).unwrap().into_iter().filter(|b| !b.u.has_a0()).step_by(7) {
        let e = TElement::basis(2, b.clone()).add(&g.word_element(&NonZero { q: Some(1), a_exp: vec![1, 0], a_set: BTreeSet::new() }, false).unwrap());
        if e.is_zero() {
            continue;
        }
        let cert = separate_element(&g, &e).unwrap();
        assert!(cert.check(&g).is_ok(), "{}", e);
        assert!(cert.witness.iter().all(|w| cert.quotient.in_complement(&w.u) && e.terms.contains_key(w)));
    }
    // A0-indexed support needs finite classes.
    let h = Model::new(&MinskyMachine::parse(HALTING).unwrap(), 3).unwrap();
    for c in [cfg(1, &[0]), cfg(1, &[2]), cfg(2, &[3])] {
        let e = h.config_element(&c, true).unwrap();
        let cert = separate_element(&h, &e).unwrap();
        assert!(cert.check(&h).is_ok(), "{}", c);
        let mut tampered = cert.clone();
        tampered.element = TElement::zero(3);
        assert!(tampered.check(&h).is_err());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn elements_round_trip_through_json(picks in proptest::collection::vec((any::<prop::sample::Index>(), 1i64..5), 0..6)) {
        let g = model(5);
        let basis = g.sample_basis(1).unwrap();
        let mut e = TElement::zero(5);
        for (i, c) in picks {
            e.add_term(basis[i.index(basis.len())].clone(), c);
        }
        let json = serde_json::to_string(&e).unwrap();
        prop_assert_eq!(serde_json::from_str::<TElement>(&json).unwrap(), e.clone());
        prop_assert_eq!(g.parse_element(&e.to_string()).unwrap(), e);
    }
}
