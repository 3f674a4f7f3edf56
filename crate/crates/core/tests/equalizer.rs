mod common;

use std::collections::{HashMap, VecDeque};

use common::free::{inv, reduce, shoelace, value};
use common::{any_word, WORD_PROBLEMS, Z2};
use forge::equalizer::{
    commutator_family, d_length, distortion_table, equalizer_generators, express, member, separate_pair, DGen, Equalizer, PairSeparation,
    PairWord, RowStatus,
};
use forge::rewriting::{AnyWord, FiniteStructure, Kind, Presentation};
use forge::Tri;
use proptest::prelude::*;

// Shortest D-word with the given value, by plain breadth-first search.
fn oracle_d_length(eq: &Equalizer, target: &(Vec<i32>, Vec<i32>), max: usize) -> Option<usize> {
    let gens: Vec<(DGen, i8)> = eq.gens().into_iter().flat_map(|d| [(d, 1), (d, -1)]).collect();
    let start = (vec![], vec![]);
    let mut seen = HashMap::from([(start.clone(), 0usize)]);
    let mut queue = VecDeque::from([start]);
    while let Some(cur) = queue.pop_front() {
        let d = seen[&cur];
        if &cur == target {
            return Some(d);
        }
        if d == max {
            continue;
        }
        for g in &gens {
            let (a, b) = value(eq, &[*g]);
            let n = (reduce(&[cur.0.clone(), a].concat()), reduce(&[cur.1.clone(), b].concat()));
            if !seen.contains_key(&n) {
                seen.insert(n.clone(), d + 1);
                queue.push_back(n);
            }
        }
    }
    None
}

fn z2() -> Equalizer {
    equalizer_generators(&Presentation::parse(Z2).unwrap()).unwrap()
}

#[test]
fn generating_set_matches_the_definition() {
    for (text, ..) in WORD_PROBLEMS.iter().filter(|(t, ..)| t.starts_with("group")) {
        let pres = Presentation::parse(text).unwrap();
        let eq = equalizer_generators(&pres).unwrap();
        assert_eq!(eq.len(), eq.relators.len() + pres.generators.len());
        for d in eq.gens() {
            let (u, v) = value(&eq, &[(d, 1)]);
            assert_eq!(eq.value(d), PairWord { u, v });
        }
    }
    let semi = Presentation::parse("semigroup\ngen a\n").unwrap();
    assert!(equalizer_generators(&semi).is_err());
}

#[test]
fn commutator_rows() {
    let eq = z2();
    let rows = distortion_table(&eq, &commutator_family, 3, 400_000, 3);
    for (r, n) in rows.iter().zip(1..) {
        let w = commutator_family(n);
        assert_eq!(r.n, n);
        assert_eq!(shoelace(&w).abs(), 2 * (n * n) as i64);
        assert_eq!(r.area, Some(n * n), "n={}", n);
        if r.status == RowStatus::Exact {
            assert!(r.dlen.unwrap() >= r.area.unwrap());
        } else {
            assert!(r.dlen.map_or(true, |d| d >= r.dlen_lower));
        }
        let d = express(&eq, &w, 400_000).unwrap();
        assert_eq!(value(&eq, &d), (reduce(&w), vec![]));
        assert_eq!(d.iter().filter(|(g, _)| matches!(g, DGen::Rel(_))).count(), n * n);
    }
}

#[test]
fn members_are_expressible() {
    for (text, w1, w2, equal) in WORD_PROBLEMS.iter().filter(|(t, ..)| t.starts_with("group")) {
        let pres = Presentation::parse(text).unwrap();
        let eq = equalizer_generators(&pres).unwrap();
        let (AnyWord::G(u), AnyWord::G(v)) = (any_word(&pres, w1), any_word(&pres, w2)) else { unreachable!() };
        let pair = PairWord::new(&u, &v);
        assert_eq!(member(&pres, &pair, 20_000).unwrap(), Tri::from_bool(*equal), "{} {} {}", text, w1, w2);
        let w = reduce(&[u.clone(), inv(&v)].concat());
        match express(&eq, &w, 200_000) {
            Ok(d) => {
                assert!(equal);
                assert_eq!(value(&eq, &d), (w.clone(), vec![]));
            }
            Err(e) => assert!(!equal, "{}: {}", text, e),
        }
    }
}

fn perm_image(perms: &[Vec<usize>], degree: usize, w: &[i32]) -> Vec<usize> {
    (0..degree)
        .map(|pt| {
            w.iter().fold(pt, |pt, &x| {
                let p = &perms[x.unsigned_abs() as usize - 1];
                if x > 0 {
                    p[pt]
                } else {
                    p.iter().position(|&y| y == pt).unwrap()
                }
            })
        })
        .collect()
}

#[test]
fn separations_replay() {
    for (text, w1, w2, equal) in WORD_PROBLEMS.iter().filter(|(t, ..)| t.starts_with("group")) {
        let pres = Presentation::parse(text).unwrap();
        assert_eq!(pres.kind, Kind::Group);
        let (AnyWord::G(u), AnyWord::G(v)) = (any_word(&pres, w1), any_word(&pres, w2)) else { unreachable!() };
        let pair = PairWord::new(&u, &v);
        let Ok(cert) = separate_pair(&pres, &pair, 4, 20_000) else {
            assert!(equal, "{} {} {}", text, w1, w2);
            continue;
        };
        assert!(!equal);
        assert!(cert.check(&pres).is_ok());
        let PairSeparation::Finite { structure: FiniteStructure::Group { degree, perms }, .. } = &cert.separation else { panic!() };
        for r in &pres.relators {
            assert_eq!(perm_image(perms, *degree, r), (0..*degree).collect::<Vec<_>>());
        }
        assert_ne!(perm_image(perms, *degree, &pair.u), perm_image(perms, *degree, &pair.v));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn d_lengths_match_breadth_first_search(word in proptest::collection::vec((0usize..3, prop_oneof![Just(1i8), Just(-1)]), 0..4)) {
        let eq = z2();
        let gens = eq.gens();
        let dw: Vec<(DGen, i8)> = word.iter().map(|&(i, s)| (gens[i], s)).collect();
        let (u, v) = value(&eq, &dw);
        prop_assert_eq!(eq.eval(&dw), PairWord { u: u.clone(), v: v.clone() });
        let want = oracle_d_length(&eq, &(u.clone(), v.clone()), 3).unwrap();
        prop_assert_eq!(d_length(&eq, &PairWord { u, v }, 100_000), Ok(want));
    }

    #[test]
    fn conjugates_of_relators_are_expressed(g in proptest::collection::vec(prop_oneof![Just(1i32), Just(-1), Just(2), Just(-2)], 0..4), s in any::<bool>()) {
        let eq = z2();
        let r = if s { eq.relators[0].clone() } else { inv(&eq.relators[0]) };
        let w = reduce(&[g.clone(), r, inv(&g)].concat());
        let d = express(&eq, &w, 200_000).unwrap();
        prop_assert_eq!(value(&eq, &d), (w, vec![]));
    }
}
