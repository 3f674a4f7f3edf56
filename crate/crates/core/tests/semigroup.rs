mod common;

use std::collections::BTreeSet;

use common::{cfg, configs, m_dec, m_par, oracle_run};
use forge::machines::{stats, MinskyConfig, MinskyMachine};
use forge::rewriting::{replay, AnyWord, FiniteStructure, SWord, Search};
use forge::semigroup::{
    build_presentation, config_word, depth_witness, divisors, equal, is_zero, parse_word, separating_quotient, v_r_quotient, CanonicalWord,
    Layout, NonZero,
};
use forge::transforms::augment_for_depth;
use forge::Tri;
use proptest::prelude::*;

// Consequence closure of w(c) among words of bounded length.
fn closure(m: &MinskyMachine, c: &MinskyConfig, max_len: usize) -> (BTreeSet<SWord>, bool) {
    let pres = build_presentation(m);
    let l = Layout::of(m);
    let mut s = Search::new(&pres, AnyWord::S(config_word(c).to_sword(&l)), 2_000_000, Some(max_len));
    s.run();
    let words = s.words().map(|w| if let AnyWord::S(x) = w { x.clone() } else { unreachable!() }).collect();
    (words, s.exhausted() || !s.truncated)
}

#[test]
fn equality_matches_rewriting_closure() {
    for m in [m_dec(), m_par()] {
        let l = Layout::of(&m);
        let cs = configs(&m, 2);
        let closures: Vec<_> = cs.iter().map(|c| closure(&m, c, 9)).collect();
        for (i, a) in cs.iter().enumerate() {
            assert!(closures[i].1);
            for (j, b) in cs.iter().enumerate() {
                let wb = config_word(b).to_sword(&l);
                let oracle = closures[i].0.contains(&wb) || (closures[i].0.contains(&SWord::Zero) && closures[j].0.contains(&SWord::Zero));
                assert_eq!(equal(&m, &config_word(a), &config_word(b), 100_000), Tri::from_bool(oracle), "{} vs {}", a, b);
            }
        }
    }
}

#[test]
fn zero_exactly_on_accepted_configurations() {
    for m in [m_dec(), m_par()] {
        for c in configs(&m, 4) {
            let accepted = oracle_run(&m, &c, 1_000).unwrap();
            assert_eq!(is_zero(&m, &config_word(&c), 100_000), Tri::from_bool(accepted), "{}", c);
        }
    }
}

fn table_ok(s: &FiniteStructure, m: &MinskyMachine) -> bool {
    let FiniteStructure::Semigroup { table, zero, assignment } = s else { return false };
    let n = table.len();
    let pres = build_presentation(m);
    let eval = |w: &SWord| match w {
        SWord::Zero => *zero,
        SWord::Word(v) => v.iter().map(|&g| assignment[g]).reduce(|a, b| table[a][b]),
    };
    (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| table[table[a][b]][c] == table[a][table[b][c]])))
        && pres.relations.iter().all(|(l, r)| eval(l).is_some() && eval(l) == eval(r))
}

fn arb_word(k: usize) -> impl Strategy<Value = NonZero> {
    (prop_oneof![Just(None), (1usize..3).prop_map(Some)], proptest::collection::vec(0u64..4, k), proptest::collection::btree_set(1..=k, 0..=k))
        .prop_map(|(q, a_exp, a_set)| NonZero { q, a_exp, a_set })
        .prop_filter("nonempty", |w| !w.is_empty())
}

// Accepts nothing; every class is {(1;n+1), (2;n)} or {(1;0)}, so all are finite.
const M_DRAIN: &str = "minsky glasses=1\ncmd 1 sub 1 -> 2\ncmd 2 if0 1 -> 2\n";

fn m_drain() -> MinskyMachine {
    MinskyMachine::parse(M_DRAIN).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn separating_quotients_are_homomorphic_images(x in arb_word(2), y in arb_word(2)) {
        let m = m_par();
        let (a, b) = (CanonicalWord::Word(x), CanonicalWord::Word(y));
        prop_assume!(equal(&m, &a, &b, 100_000) == Tri::No);
        let cert = separating_quotient(&m, &a, &b, 100_000).unwrap();
        prop_assert!(cert.check(&m).is_ok());
        prop_assert!(table_ok(&cert.quotient.structure(), &m));
        let l = Layout::of(&m);
        let s = cert.quotient.structure();
        prop_assert_ne!(s.eval_sword(&a.to_sword(&l)), s.eval_sword(&b.to_sword(&l)));
    }

    #[test]
    fn divisor_sets_are_closed(x in arb_word(1)) {
        let m = m_drain();
        let w = CanonicalWord::Word(x);
        let d = divisors(&m, &w, 100_000).unwrap();
        prop_assume!(d.complete);
        for y in &d.words {
            let dy = divisors(&m, &CanonicalWord::Word(y.clone()), 100_000).unwrap();
            prop_assert!(dy.complete);
            prop_assert!(dy.words.is_subset(&d.words), "divisors of {} escape those of {}", y, w);
        }
    }
}

#[test]
fn empty_words_cannot_be_separated() {
    let m = m_par();
    let empty = CanonicalWord::Word(NonZero { q: None, a_exp: vec![0, 0], a_set: BTreeSet::new() });
    let w = parse_word(&m, "q1 a1").unwrap();
    assert!(separating_quotient(&m, &empty, &w, 1_000).is_err());
}

#[test]
fn rees_quotient_by_v_r() {
    let m = m_drain();
    for r in 0..3 {
        let q = v_r_quotient(&m, r, 100_000).unwrap();
        assert!(q.verify(&m).is_ok());
        assert!(table_ok(&q.structure(), &m));
        // Nothing is accepted, so configuration words within the bound survive.
        for c in configs(&m, r).into_iter().filter(|c| c.state != 0) {
            assert_ne!(q.image(&m, &config_word(&c)), q.zero, "{}", c);
        }
    }
}

#[test]
fn depth_witness_at_the_halting_time() {
    let src = m_par();
    let aug = augment_for_depth(&src).unwrap();
    let st = stats(&src, 5, 1_000, |n| cfg(1, &[n as u64, 0])).unwrap();
    let psi = st.cotime_function();
    let base = build_presentation(&aug.machine);
    for n in [1u64, 3, 5] {
        let input = cfg(1, &[n, 0]);
        let d = psi[n as usize] as u64;
        assert_eq!(d, n);
        let w = depth_witness(&aug, &input, d).unwrap();
        assert_eq!(w.psi, Some(d as usize));
        // Only the relations of S(M_n) plus the two identifications are used.
        assert_eq!(w.presentation.relations[..base.relations.len()], base.relations[..]);
        assert_eq!(w.presentation.relations.len(), base.relations.len() + 2);
        assert!(w.replay().is_ok());
        assert!(replay(&w.presentation, &AnyWord::S(w.start.clone()), &w.steps).is_ok());
        assert!(depth_witness(&aug, &input, d + 1).is_err());
    }
}

#[test]
fn parsed_words_are_canonical() {
    let m = m_par();
    let w = parse_word(&m, "q1 a1 a2 A1 A2").unwrap();
    assert_eq!(w, parse_word(&m, "q1 a2 a1 A2 A1").unwrap());
    assert!(parse_word(&m, "q1 A1 a1").unwrap().is_zero());
    assert_eq!(equal(&m, &w, &parse_word(&m, "q2 a2 A1 A2").unwrap(), 100_000), Tri::Yes);
}
