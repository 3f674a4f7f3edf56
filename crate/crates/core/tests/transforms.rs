mod common;

use common::{cfg, eccentricity, m_dec, m_par, TM_PARITY};
use forge::machines::turing::TM_COPIER;
use forge::machines::{accepted, run, sym_class, sym_equivalent, Machine, MinskyConfig, TuringMachine};
use forge::transforms::{augment_for_depth, base3, base3_rev, tm_to_minsky3, to_one_tape, to_sym_universal};
use forge::Tri;
use proptest::prelude::*;

const EVEN_TWOS: &str = include_str!("data/even_twos.tm");

fn words(len: usize) -> Vec<Vec<u16>> {
    (0..=len).flat_map(|l| (0..1usize << l).map(move |bits| (0..l).map(|i| ((bits >> i) & 1) as u16).collect())).collect()
}

fn verdict<M: Machine>(m: &M, c: &M::Config) -> bool {
    run(m, c, 1_000_000).unwrap().accepted()
}

#[test]
fn minsky3_preserves_verdicts() {
    let par = TuringMachine::parse(TM_PARITY).unwrap();
    let twos = TuringMachine::parse(EVEN_TWOS).unwrap();
    for flag in [false, true] {
        let m3 = tm_to_minsky3(&par, flag).unwrap();
        for n in 0..=5 {
            let c = par.unary_input(n);
            assert_eq!(verdict(&m3.machine, &m3.encode(&c)), n % 2 == 0, "parity n={} flag={}", n, flag);
        }
        let m3 = tm_to_minsky3(&twos, flag).unwrap();
        for w in words(5) {
            let even = w.iter().filter(|&&x| x == 1).count() % 2 == 0;
            let c = twos.input(&w);
            assert_eq!(verdict(&twos, &c), even);
            assert_eq!(verdict(&m3.machine, &m3.encode(&c)), even, "{:?} flag={}", w, flag);
        }
    }
}

#[test]
fn three_ary_numerals() {
    // Letters 1 and 2 are digits 1 and 2; the right word is read backwards.
    let u = [0u16, 1, 0, 1, 1, 0];
    let v = [0u16, 1, 1, 1];
    assert_eq!(base3(&u), u64::from_str_radix("121221", 3).unwrap());
    assert_eq!(base3_rev(&v), u64::from_str_radix("2221", 3).unwrap());
}

#[test]
fn one_tape_preserves_verdicts() {
    for (src, lang) in [(TM_PARITY, 1usize), (TM_COPIER, 2)] {
        let tm = TuringMachine::parse(src).unwrap();
        let one = to_one_tape(&tm).unwrap();
        assert_eq!(one.machine.tape_count(), 1);
        for n in 0..=5 {
            let c = tm.unary_input(n);
            let enc = one.encode(&c).expect("input configurations are encodable");
            assert_eq!(verdict(&one.machine, &enc), n % 2 == 0, "tapes={} n={}", lang, n);
        }
    }
}

#[test]
fn sym_universal_preserves_verdicts_and_merges_only_accepted_inputs() {
    for src in [TM_PARITY, TM_COPIER] {
        let tm = TuringMachine::parse(src).unwrap();
        let su = to_sym_universal(&tm).unwrap();
        let m = &su.machine;
        for n in 0..=6 {
            assert_eq!(verdict(m, &su.lift(&tm.unary_input(n))), n % 2 == 0, "n={}", n);
        }
        for a in 0..=6 {
            for b in a + 1..=6 {
                let (ca, cb) = (su.lift(&tm.unary_input(a)), su.lift(&tm.unary_input(b)));
                if sym_equivalent(m, &ca, &cb, 100_000).answer == Tri::Yes {
                    assert!(verdict(m, &ca) && verdict(m, &cb), "{} ~ {} but not both accepted", a, b);
                }
            }
        }
    }
}

#[test]
fn sym_universal_computations_are_linear() {
    let tm = TuringMachine::parse(TM_PARITY).unwrap();
    let su = to_sym_universal(&tm).unwrap();
    let m = &su.machine;
    // Longest reduced Sym computation per size, outside the classes of
    // input configurations; C is fitted on sizes up to 3.
    let mut worst = vec![0usize; 7];
    for c in m.configs_up_to(6) {
        if accepted(m, &c, 100_000) == Tri::Yes {
            continue;
        }
        let class = sym_class(m, &c, 100_000).expect("finite class");
        if class.iter().any(|x| *x == su.lift(&tm.unary_input(m.config_size(x)))) {
            continue;
        }
        let s = m.config_size(&c);
        worst[s] = worst[s].max(eccentricity(m, &c));
    }
    let c = (0..=3).map(|s| worst[s].div_ceil(s + 1)).max().unwrap();
    assert!(worst.iter().enumerate().all(|(s, &e)| e <= c * (s + 1)), "C={} {:?}", c, worst);
}

fn random_computation(m: &forge::machines::MinskyMachine, start: &MinskyConfig, choices: &[u8]) -> (Vec<usize>, MinskyConfig) {
    let mut cur = start.clone();
    let mut used = Vec::new();
    for &ch in choices {
        let succ = m.step(&cur);
        if succ.is_empty() {
            break;
        }
        let (i, n) = succ[ch as usize % succ.len()].clone();
        used.push(i);
        cur = n;
    }
    (used, cur)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn augmentation_weight_counts_projected_steps(
        which in 0usize..2, a in 0u64..6, b in 0u64..3, choices in proptest::collection::vec(any::<u8>(), 0..40)
    ) {
        let src = if which == 0 { m_dec() } else { m_par() };
        let aug = augment_for_depth(&src).unwrap();
        let start = aug.lift(&cfg(1, &[a, b]), (0, 0));
        let (used, end) = random_computation(&aug.machine, &start, &choices);
        let projected = aug.project_commands(&used);
        prop_assert_eq!(aug.computation_weight(&used), projected.len());
        let k = src.glasses;
        prop_assert_eq!((end.coins[k] - end.coins[k + 1]) as usize, projected.len());
        // The projection is a computation of the source machine; the added
        // commands only touch the extra glasses and may jump to the stop state.
        let mut cur = aug.project(&start);
        for &i in &projected {
            cur = src.commands[i].apply(&cur).expect("projected step applies");
        }
        prop_assert_eq!(cur.coins, aug.project(&end).coins);
    }
}
