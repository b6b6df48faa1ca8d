use proptest::prelude::*;

use sigdiag_core::causes::{causes_for, check_cause, ViolationCauseId};
use sigdiag_core::dsl::parse_property;
use sigdiag_core::semantics::shapes::extrema;
use sigdiag_core::trace::Trace;
use sigdiag_testkit::afc::afc_trace;
use sigdiag_testkit::{cause_case, generate_trace, GenError, GeneratorSpec, Shape};

fn values(t: &Trace) -> Vec<f64> {
    t.records().iter().map(|r| r.get("s").unwrap()).collect()
}

fn holds(trace: &Trace, cause: &str, property: &str) -> bool {
    let c: ViolationCauseId = cause.parse().unwrap();
    let p = parse_property(property).unwrap();
    let b = causes_for(trace, &p.clauses[0].atoms[0]).into_iter().find(|b| b.cause == c).unwrap();
    check_cause(trace, &b)
}

#[test]
fn constant_trace() {
    let t = generate_trace(&GeneratorSpec::new(Shape::Constant, 10, 1)).unwrap();
    let v = values(&t);
    assert_eq!(v.len(), 10);
    assert!(v.iter().all(|&x| x == v[0]));
    assert!(holds(&t, "c_spike_3", "globally exists spike in s"));
    assert!(holds(&t, "c_oscillation_5", "globally exists oscillation in s"));
}

#[test]
fn spiky_trace_violates_small_amplitude() {
    let shape = Shape::Spiky { n_spikes: 1, amp_range: (100.0, 200.0), width_range: (1.0, 2.0) };
    for seed in 0..20 {
        let t = generate_trace(&GeneratorSpec::new(shape.clone(), 20, seed)).unwrap();
        assert!(holds(&t, "c_spike_1", "globally exists spike in s with amplitude < 90"));
    }
}

#[test]
fn rises_4_case_starts_above_then_stays_below() {
    let c: ViolationCauseId = "c_rises_4".parse().unwrap();
    for seed in 0..20 {
        let case = cause_case(c, seed).unwrap();
        let atom = case.atom();
        let b = causes_for(&case.trace, &atom).into_iter().find(|b| b.cause == c).unwrap();
        let (lo, hi) = case.trace.window(b.interval.lower, b.interval.upper).unwrap();
        let (sign, v) = match atom.scope.pattern() {
            sigdiag_core::dsl::Pattern::Rises { target, .. } => (1.0, *target),
            sigdiag_core::dsl::Pattern::Falls { target, .. } => (-1.0, *target),
            p => panic!("unexpected {p}"),
        };
        let s: Vec<f64> = values(&case.trace)[lo..=hi].iter().map(|x| sign * x).collect();
        let first_below = s.iter().position(|&x| x < sign * v).unwrap();
        assert!(first_below > 0);
        assert!(s[first_below..].iter().all(|&x| x < sign * v));
    }
}

#[test]
fn extrema_counts_match_shape() {
    for seed in 0..30 {
        let one = generate_trace(&GeneratorSpec::new(Shape::SingleExtremum, 8, seed)).unwrap();
        assert_eq!(extrema(&values(&one), 0, 7).len(), 1);
        let two = generate_trace(&GeneratorSpec::new(Shape::TwoExtrema, 8, seed)).unwrap();
        assert_eq!(extrema(&values(&two), 0, 7).len(), 2);
        let up = values(&generate_trace(&GeneratorSpec::new(Shape::Increasing, 8, seed)).unwrap());
        assert!(up.windows(2).all(|w| w[0] < w[1]));
        let down = values(&generate_trace(&GeneratorSpec::new(Shape::Decreasing, 8, seed)).unwrap());
        assert!(down.windows(2).all(|w| w[0] > w[1]));
    }
}

#[test]
fn oscillating_trace_has_requested_cycles() {
    let shape = Shape::Oscillating { n_cycles: 3, p2p_range: (2.0, 4.0), period_range: (0.5, 0.5) };
    let t = generate_trace(&GeneratorSpec::new(shape, 40, 3)).unwrap();
    let p = parse_property("globally exists oscillation in s with period = 0.5").unwrap();
    assert!(sigdiag_core::semantics::eval_property(&t, &p).holds);
}

#[test]
fn invalid_specs_are_rejected() {
    let bad = |shape, n| generate_trace(&GeneratorSpec::new(shape, n, 0));
    assert!(matches!(bad(Shape::Constant, 0), Err(GenError::InvalidSpec(_))));
    assert!(matches!(bad(Shape::SingleExtremum, 2), Err(GenError::InvalidSpec(_))));
    let spiky = Shape::Spiky { n_spikes: 1, amp_range: (5.0, 1.0), width_range: (1.0, 2.0) };
    assert!(matches!(bad(spiky, 30), Err(GenError::InvalidSpec(_))));
    let spiky = Shape::Spiky { n_spikes: 2, amp_range: (1.0, 2.0), width_range: (1.0, 2.0) };
    assert!(matches!(bad(spiky, 4), Err(GenError::InvalidSpec(_))));
}

#[test]
fn afc_traces_violate_after_eleven() {
    let t = afc_trace(3);
    assert_eq!(t.len(), 24_001);
    assert_eq!(t.end(), 50.0);
    let first = t.records().iter().find(|r| r.timestamp >= 11.0 && r.get("mu").unwrap() >= 0.007).unwrap();
    assert!(first.timestamp <= 50.0);
}

fn shape() -> impl Strategy<Value = Shape> {
    prop_oneof![
        Just(Shape::Constant),
        Just(Shape::Increasing),
        Just(Shape::Decreasing),
        Just(Shape::SingleExtremum),
        Just(Shape::TwoExtrema),
        (1usize..4, 1.0f64..50.0, 0.25f64..1.5).prop_map(|(n, a, w)| Shape::Spiky {
            n_spikes: n,
            amp_range: (a, a * 2.0),
            width_range: (w, w + 0.5)
        }),
        (1usize..4, 1.0f64..50.0, 0.25f64..1.5).prop_map(|(n, a, p)| Shape::Oscillating {
            n_cycles: n,
            p2p_range: (a, a * 2.0),
            period_range: (p, p + 0.5)
        }),
    ]
}

proptest! {
    #[test]
    fn generated_traces_are_valid_and_deterministic(shape in shape(), n in 1usize..60, seed in any::<u64>()) {
        let spec = GeneratorSpec::new(shape, n, seed);
        match generate_trace(&spec) {
            Ok(t) => {
                prop_assert_eq!(t.len(), n);
                let ts = t.timestamps();
                prop_assert!(ts.windows(2).all(|w| w[0] < w[1]));
                prop_assert!(values(&t).iter().all(|v| v.is_finite()));
                prop_assert_eq!(generate_trace(&spec).unwrap(), t);
            }
            Err(GenError::InvalidSpec(_)) => prop_assert!(n < spec.min_records()),
            Err(e) => prop_assert!(false, "{}", e),
        }
    }
}
