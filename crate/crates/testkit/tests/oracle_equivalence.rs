use rand::Rng;

use sigdiag_core::causes::{causes_for, check_cause, CauseFamily};
use sigdiag_core::dsl::parse_pattern;
use sigdiag_core::semantics::{eval_pattern, Checker};
use sigdiag_core::trace::{serialize_csv, EvaluationInterval, Trace};
use sigdiag_testkit::corpus::{equivalence_case, random_pattern, random_time, random_trace};
use sigdiag_testkit::{fixtures, rng, Oracle, TooLarge};

fn context(trace: &Trace, what: &str) -> String {
    format!("{what}\n{}", serialize_csv(trace))
}

#[test]
fn atoms_agree_with_oracle() {
    let mut checked = 0;
    for seed in 0..1500 {
        let (trace, atom) = equivalence_case(seed);
        let oracle = Oracle::new(&trace).unwrap();
        let fast = Checker::new(&trace).atom(&atom).unwrap();
        assert_eq!(fast, oracle.atom(&atom), "seed {seed}: {}", context(&trace, &atom.to_string()));
        checked += 1;
    }
    assert!(checked >= 1000);
}

#[test]
fn patterns_on_intervals_agree_with_oracle() {
    for seed in 0..600 {
        let mut r = rng(10_000 + seed);
        let n = r.gen_range(1..=15);
        let trace = random_trace(&mut r, n);
        let p = random_pattern(&mut r, true);
        let (a, b) = (random_time(&mut r, &trace), random_time(&mut r, &trace));
        let (lower, upper) = (a.min(b), a.max(b));
        let fast = eval_pattern(&trace, &EvaluationInterval::new(lower, upper), &p);
        let slow = Oracle::new(&trace).unwrap().pattern(&p, lower, upper);
        assert_eq!(fast, slow, "seed {seed}: [{lower}, {upper}] {}", context(&trace, &p.to_string()));
    }
}

#[test]
fn causes_agree_with_oracle() {
    let mut held = 0;
    for seed in 0..1200 {
        let (trace, atom) = equivalence_case(50_000 + seed);
        let oracle = Oracle::new(&trace).unwrap();
        for b in causes_for(&trace, &atom) {
            let fast = check_cause(&trace, &b);
            let slow = oracle.cause_holds(&b);
            let what = context(&trace, &format!("{} on {atom}", b.cause));
            if b.cause.family == CauseFamily::Not {
                // reporting also needs a satisfied occurrence
                assert!(!fast || slow, "seed {seed}: {what}");
            } else {
                assert_eq!(fast, slow, "seed {seed}: {what}");
            }
            held += usize::from(fast);
        }
    }
    assert!(held > 100, "corpus exercises too few causes: {held}");
}

#[test]
fn first_match_is_first_holding_cause() {
    for seed in 0..800 {
        let (trace, atom) = equivalence_case(90_000 + seed);
        if atom.negated || Checker::new(&trace).atom(&atom).unwrap() {
            continue;
        }
        let oracle = Oracle::new(&trace).unwrap();
        let expected = causes_for(&trace, &atom).into_iter().find(|b| oracle.cause_holds(b)).map(|b| b.cause);
        let got = sigdiag_core::engine::diagnose_atom(&Checker::new(&trace), &atom).unwrap().map(|(b, _)| b.cause);
        assert_eq!(got, expected, "seed {seed}: {}", context(&trace, &atom.to_string()));
    }
}

#[test]
fn constant_signal_has_no_spike() {
    let tr = fixtures::fig6();
    let beta2 = sigdiag_core::trace::prepare(&tr, &["beta2".to_string()].into(), &Default::default()).unwrap();
    let o = Oracle::new(&beta2).unwrap();
    assert!(!o.pattern(&parse_pattern("exists spike in beta2").unwrap(), 0.0, 6.0));
}

#[test]
fn single_record_satisfies_assert() {
    let tr = Trace::from_samples("s", &[(0.0, 1.0)]).unwrap();
    let o = Oracle::new(&tr).unwrap();
    assert!(o.pattern(&parse_pattern("assert s < 2").unwrap(), 0.0, 0.0));
}

#[test]
fn size_bound_is_enforced() {
    let s: Vec<(f64, f64)> = (0..31).map(|k| (k as f64, 0.0)).collect();
    let tr = Trace::from_samples("s", &s).unwrap();
    assert_eq!(Oracle::new(&tr).err(), Some(TooLarge { len: 31, bound: 30 }));
    assert!(Oracle::with_bound(&tr, 31).is_ok());
}
