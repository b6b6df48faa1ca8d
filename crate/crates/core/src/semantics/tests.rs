use super::*;
use crate::dsl::{parse_pattern, parse_property};
use crate::trace::{parse_csv, Record, Trace};
use proptest::prelude::*;

const T6: [f64; 8] = [0.0, 0.2, 0.9, 1.8, 3.0, 4.9, 5.7, 6.0];

fn fig1() -> Trace {
    parse_csv(
        "timestamp,beta,rho\n0,2,1\n0.2,153.5,52.5\n0.9,55,125\n1.8,0.5,125.5\n3.0,80,25\n4.9,203.5,75.5\n5.7,20,35\n6.0,0.5,200.5\n",
    )
    .unwrap()
}

fn series(var: &str, t: &[f64], v: &[f64]) -> Trace {
    let s: Vec<(f64, f64)> = t.iter().copied().zip(v.iter().copied()).collect();
    Trace::from_samples(var, &s).unwrap()
}

fn holds(trace: &Trace, prop: &str) -> bool {
    eval_property(trace, &parse_property(prop).unwrap()).holds
}

fn fig9_beta3() -> Trace {
    Trace::from_samples("beta3", &[(1.0, 0.5), (2.0, 2.0), (3.0, 0.5), (4.0, 4.0), (5.0, 4.8), (6.0, 3.5), (7.0, 3.2)])
        .unwrap()
}

#[test]
fn fig1_violates_phi1() {
    assert!(!holds(&fig1(), "globally exists spike in beta with width < 0.5 amplitude < 90"));
    assert!(holds(&fig1(), "globally exists spike in beta"));
}

#[test]
fn excluded_middle() {
    let tr = fig1();
    for atom in ["globally assert beta < 100", "after 3 beta becomes > 100", "between 1 and 5 exists spike in rho"] {
        assert!(holds(&tr, &format!("{atom} or not {atom}")));
        assert!(!holds(&tr, &format!("{atom} and not {atom}")));
    }
}

#[test]
fn fig4_assert() {
    let tr = Trace::from_samples(
        "beta1",
        &[(1.0, 1.5), (2.0, 2.0), (3.0, 3.0), (4.0, 5.0), (5.0, 2.5), (6.0, 4.3), (7.0, 3.5)],
    )
    .unwrap();
    assert!(!holds(&tr, "globally assert beta1 < 4"));
    let c = match parse_pattern("assert beta1 < 4").unwrap() {
        Pattern::Assert(c) => c,
        _ => unreachable!(),
    };
    assert!(!eval_condition(&tr, 4.0, &c));
    assert!(eval_condition(&tr, 3.0, &c));
}

#[test]
fn condition_on_fig1() {
    let c = match parse_pattern("assert beta <= 90 and beta >= -90").unwrap() {
        Pattern::Assert(c) => c,
        _ => unreachable!(),
    };
    assert!(eval_condition(&fig1(), 0.9, &c));
    let eq = match parse_pattern("assert beta = 55").unwrap() {
        Pattern::Assert(c) => c,
        _ => unreachable!(),
    };
    assert!(eval_condition(&fig1(), 0.9, &eq));
}

#[test]
fn absolute_scope_bounds() {
    let tr = series("beta1", &T6, &[2.0, 153.5, 20.0, 0.5, 80.0, 203.5, 20.0, 0.5]);
    let p = parse_property("after 7 exists spike in beta1 with width < 0.5 amplitude < 90").unwrap();
    let v = eval_scope(&tr, &p.clauses[0].atoms[0].scope);
    assert!(!v.holds);
    assert!(!holds(&tr, "globally exists spike in beta1 with width < 0.5 amplitude < 90"));
    // boundaries: before needs t_i < t, after needs t < t_e
    assert!(!holds(&tr, "before 0 assert beta1 > -1"));
    assert!(holds(&tr, "before 0.2 assert beta1 > -1"));
    assert!(!holds(&tr, "after 6 assert beta1 > -1"));
    assert!(holds(&tr, "at 6 assert beta1 > -1"));
    assert!(!holds(&tr, "between 3 and 3 assert beta1 > -1"));
    let g = parse_property("globally assert beta1 < 1000").unwrap();
    let gv = eval_scope(&tr, &g.clauses[0].atoms[0].scope);
    assert_eq!(gv.evaluated_interval, EvaluationInterval::new(0.0, 6.0));
}

#[test]
fn between_on_fig9() {
    assert!(!holds(&fig9_beta3(), "between 2 and 6 assert beta3 <= 4"));
    assert!(holds(&fig9_beta3(), "between 2 and 3.5 assert beta3 <= 4"));
}

#[test]
fn becomes_on_constant() {
    let tr = Trace::from_samples("s", &[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)]).unwrap();
    assert!(!holds(&tr, "globally s becomes > 0"));
    assert!(!holds(&tr, "globally s becomes = 0"));
    let rising = Trace::from_samples("s", &[(0.0, 0.0), (1.0, 0.0), (2.0, 1.0)]).unwrap();
    assert!(holds(&rising, "globally s becomes > 0"));
}

#[test]
fn rises_on_fig9() {
    let tr = fig9_beta3();
    let iv = EvaluationInterval::new(1.0, 7.0);
    assert!(!eval_pattern(&tr, &iv, &parse_pattern("beta3 rises monotonically reaching 3").unwrap()));
    assert!(eval_pattern(&tr, &iv, &parse_pattern("beta3 rises reaching 3").unwrap()));
    assert!(!eval_pattern(&tr, &iv, &parse_pattern("beta3 falls reaching 1").unwrap()));
    assert!(eval_pattern(&tr, &EvaluationInterval::new(2.0, 7.0), &parse_pattern("beta3 falls reaching 1").unwrap()));
    // window starting at the first crossing: nothing precedes it
    assert!(!eval_pattern(&tr, &EvaluationInterval::new(4.0, 7.0), &parse_pattern("beta3 rises reaching 3").unwrap()));
}

#[test]
fn overshoots_basic() {
    let tr = Trace::from_samples("s", &[(0.0, 0.0), (1.0, 2.0), (2.0, 3.5), (3.0, 3.2), (4.0, 3.9)]).unwrap();
    assert!(holds(&tr, "globally s overshoots monotonically 3 by 1"));
    assert!(!holds(&tr, "globally s overshoots 3 by 0.8"));
    let tr2 = Trace::from_samples("s", &[(0.0, 5.0), (1.0, 3.0), (2.0, 1.5), (3.0, 1.8)]).unwrap();
    assert!(holds(&tr2, "globally s undershoots monotonically 2 by 1"));
    assert!(!holds(&tr2, "globally s undershoots 2 by 0.4"));
}

#[test]
fn spike_constraints() {
    let tr = series("b", &T6, &[2.0, 153.5, 20.0, 0.5, 80.0, 203.5, 20.0, 0.5]);
    assert!(holds(&tr, "globally exists spike in b with amplitude > 150 width < 2"));
    assert!(!holds(&tr, "globally exists spike in b with amplitude > 250"));
    assert!(holds(&tr, "globally exists spike in b with width > 4.5"));
    let flat = series("b", &T6, &[100.0; 8]);
    assert!(!holds(&flat, "globally exists spike in b"));
    assert!(!holds(&flat, "globally exists oscillation in b"));
}

#[test]
fn oscillation_fig8_beta1() {
    let tr = Trace::from_samples(
        "b",
        &[
            (0.0, 2.0),
            (0.2, 153.5),
            (0.5, 20.0),
            (1.0, 120.0),
            (1.2, 10.0),
            (1.9, 50.0),
            (2.5, 50.0),
            (3.5, 5.0),
            (4.0, 200.0),
            (4.5, 10.0),
            (5.0, 100.0),
            (6.5, 100.0),
        ],
    )
    .unwrap();
    assert!(!holds(&tr, "globally exists oscillation in b with p2pAmp < 90 period < 0.5"));
    assert!(holds(&tr, "globally exists oscillation in b with p2pAmp < 120"));
    assert!(holds(&tr, "globally exists oscillation in b with period <= 0.7"));
    assert!(!holds(&tr, "globally exists oscillation in b with period < 0.7"));
}

#[test]
fn if_then() {
    let tr =
        Trace::from_samples("s", &[(0.0, 0.0), (1.0, 5.0), (2.0, 5.0), (3.0, 0.0), (4.0, -5.0), (5.0, -5.0)]).unwrap();
    assert!(holds(&tr, "globally if assert s >= 5 then assert s <= -5"));
    assert!(holds(&tr, "globally if assert s >= 5 then within at most 2 assert s <= -5"));
    assert!(!holds(&tr, "globally if assert s >= 5 then within at most 1 assert s <= -5"));
    assert!(holds(&tr, "globally if assert s >= 5 then within exactly 2 assert s <= -5"));
    assert!(!holds(&tr, "globally if assert s >= 5 then assert s >= 10"));
    // a trigger at the interval end is not a trigger
    assert!(holds(&tr, "globally if assert s <= -5 then assert s >= 10"));
}

#[test]
fn event_scopes() {
    let tr =
        Trace::from_samples("s", &[(0.0, 0.0), (1.0, 1.0), (2.0, 1.0), (3.0, 9.0), (4.0, 9.0), (5.0, 0.0)]).unwrap();
    // p (s = 1 held) occurs before p1 (s = 9 held)
    assert!(holds(&tr, "before assert s = 9 assert s = 1"));
    assert!(!holds(&tr, "before assert s = 1 assert s = 9"));
    assert!(holds(&tr, "after assert s = 1 assert s = 9"));
    assert!(!holds(&tr, "after assert s = 9 assert s = 1"));
    assert!(holds(&tr, "between assert s = 1 and assert s = 9 assert s <= 9"));
    assert!(!holds(&tr, "between assert s = 1 and assert s = 9 assert s < 5"));
    // no trigger: vacuously true
    assert!(holds(&tr, "before assert s = 7 assert s > 100"));
}

#[test]
fn epsilon_only_widens_equality() {
    let tr = Trace::from_samples("s", &[(0.0, 1.0), (1.0, 1.05)]).unwrap();
    let p = parse_property("globally assert s = 1").unwrap();
    let c = Checker::new(&tr);
    assert!(!c.property(&p).unwrap());
    let c = Checker::new(&tr).with_epsilon(0.1);
    assert!(c.property(&p).unwrap());
    let q = parse_property("globally assert s < 1.01").unwrap();
    assert!(!c.property(&q).unwrap());
}

#[test]
fn deadline_expires() {
    let samples: Vec<(f64, f64)> = (0..400).map(|i| (i as f64, (i % 7) as f64)).collect();
    let tr = Trace::from_samples("s", &samples).unwrap();
    let p = parse_property("globally if exists spike in s then within exactly 0.5 exists oscillation in s").unwrap();
    let c = Checker::new(&tr).with_deadline(Some(Instant::now()));
    assert_eq!(c.property(&p), Err(Expired));
}

fn arb_trace() -> impl Strategy<Value = Trace> {
    proptest::collection::vec((1u8..4, -4i8..5), 1..12).prop_map(|steps| {
        let mut t = 0.0;
        let records = steps
            .into_iter()
            .map(|(dt, v)| {
                t += dt as f64 * 0.5;
                Record::new(t).with("s", v as f64).with("z", -(v as f64))
            })
            .collect();
        Trace::new(vec!["s".into(), "z".into()], records).unwrap()
    })
}

proptest! {
    #[test]
    fn falls_is_mirrored_rises(tr in arb_trace(), v in -4i8..5, mono in any::<bool>(), m in 0u8..4) {
        let iv = EvaluationInterval::of_trace(&tr);
        let m = m as f64;
        let v = v as f64;
        let falls = Pattern::Falls { signal: SignalExpr::var("s"), monotonic: mono, target: v };
        let rises = Pattern::Rises { signal: SignalExpr::var("s").negated(), monotonic: mono, target: -v };
        prop_assert_eq!(eval_pattern(&tr, &iv, &falls), eval_pattern(&tr, &iv, &rises));
        let under = Pattern::Undershoots { signal: SignalExpr::var("s"), monotonic: mono, target: v, margin: m };
        let over = Pattern::Overshoots { signal: SignalExpr::var("z"), monotonic: mono, target: -v, margin: m };
        prop_assert_eq!(eval_pattern(&tr, &iv, &under), eval_pattern(&tr, &iv, &over));
    }

    #[test]
    fn spike_and_oscillation_are_polarity_free(tr in arb_trace(), a in 0u8..6, w in 1u8..6) {
        let iv = EvaluationInterval::of_trace(&tr);
        let amp = Some(Constraint::new(CmpOp::Ge, a as f64));
        let width = Some(Constraint::new(CmpOp::Le, w as f64));
        let sp = |v: &str| Pattern::Spike { signal: SignalExpr::var(v), width, amplitude: amp };
        prop_assert_eq!(eval_pattern(&tr, &iv, &sp("s")), eval_pattern(&tr, &iv, &sp("z")));
        let os = |v: &str| Pattern::Oscillation { signal: SignalExpr::var(v), p2p_amp: amp, period: width };
        prop_assert_eq!(eval_pattern(&tr, &iv, &os("s")), eval_pattern(&tr, &iv, &os("z")));
    }

    #[test]
    fn not_is_negation(tr in arb_trace(), v in -4i8..5) {
        for src in ["globally assert s < V", "after 1 s becomes > V", "before assert s = V assert s > V"] {
            let a = src.replace('V', &v.to_string());
            let pos = parse_property(&a).unwrap();
            let neg = parse_property(&format!("not {a}")).unwrap();
            prop_assert_eq!(eval_property(&tr, &pos).holds, !eval_property(&tr, &neg).holds);
        }
    }

    #[test]
    fn between_ignores_outside_values(tr in arb_trace(), noise in proptest::collection::vec(-9i8..9, 12)) {
        let ts = tr.timestamps();
        let (a, b) = (ts[0] + 1.0, ts[ts.len() - 1] - 0.5);
        prop_assume!(a < b);
        let p = parse_property(&format!("between {a} and {b} exists spike in s with amplitude >= 2")).unwrap();
        let records = tr.records().iter().enumerate().map(|(i, r)| {
            let mut r = r.clone();
            if r.timestamp < a || r.timestamp > b {
                r.values.insert("s".into(), noise[i % noise.len()] as f64);
            }
            r
        }).collect();
        let other = Trace::new(tr.variables().to_vec(), records).unwrap();
        prop_assert_eq!(eval_property(&tr, &p).holds, eval_property(&other, &p).holds);
    }
}
