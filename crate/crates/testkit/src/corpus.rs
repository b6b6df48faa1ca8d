//! Random traces and constructs for checker/oracle comparison.
//!
//! Values are small integers so plateaus and exact threshold hits are
//! common; scope bounds sit on a quarter grid so they land both on and
//! between samples.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use sigdiag_core::dsl::{Atom, BinOp, Bowtie, CmpOp, Condition, Constraint, Pattern, Scope, SignalExpr, Within};
use sigdiag_core::trace::Trace;

use crate::generator::VAR;

/// `n` samples of `s`, on a regular or jittered clock.
pub fn random_trace(rng: &mut ChaCha8Rng, n: usize) -> Trace {
    let regular = rng.gen_bool(0.5);
    let mut t = f64::from(rng.gen_range(0..4)) * 0.25;
    let mut samples = Vec::with_capacity(n);
    for _ in 0..n {
        samples.push((t, f64::from(rng.gen_range(0..7))));
        t += if regular { 0.5 } else { f64::from(rng.gen_range(1..=4)) * 0.25 };
    }
    Trace::from_samples(VAR, &samples).expect("increasing timestamps")
}

fn op(rng: &mut ChaCha8Rng) -> CmpOp {
    *CmpOp::ALL.choose(rng).unwrap()
}

fn level(rng: &mut ChaCha8Rng) -> f64 {
    f64::from(rng.gen_range(-1..=7))
}

fn signal(rng: &mut ChaCha8Rng) -> SignalExpr {
    let s = SignalExpr::var(VAR);
    match rng.gen_range(0..6) {
        0 => SignalExpr::bin(BinOp::Sub, s, SignalExpr::Const(1.0)),
        1 => SignalExpr::bin(BinOp::Mul, SignalExpr::Const(2.0), s),
        _ => s,
    }
}

fn condition(rng: &mut ChaCha8Rng) -> Condition {
    let leaf = |rng: &mut ChaCha8Rng| Condition::Cmp(signal(rng), op(rng), level(rng));
    match rng.gen_range(0..5) {
        0 => Condition::And(Box::new(leaf(rng)), Box::new(leaf(rng))),
        1 => Condition::Or(Box::new(leaf(rng)), Box::new(leaf(rng))),
        _ => leaf(rng),
    }
}

fn constraint(rng: &mut ChaCha8Rng, scale: f64) -> Option<Constraint> {
    rng.gen_bool(0.6).then(|| Constraint::new(op(rng), f64::from(rng.gen_range(0..=8)) * scale))
}

/// A pattern that is cheap to test on every sub-window: used inside
/// if-then and as event-scope triggers.
pub fn simple_pattern(rng: &mut ChaCha8Rng) -> Pattern {
    match rng.gen_range(0..4) {
        0 => Pattern::Assert(condition(rng)),
        1 => Pattern::Becomes(signal(rng), op(rng), level(rng)),
        2 => Pattern::Rises { signal: signal(rng), monotonic: rng.gen_bool(0.5), target: level(rng) },
        _ => Pattern::Falls { signal: signal(rng), monotonic: rng.gen_bool(0.5), target: level(rng) },
    }
}

/// Any pattern; if-then only at the top with simple operands.
pub fn random_pattern(rng: &mut ChaCha8Rng, allow_if_then: bool) -> Pattern {
    let monotonic = rng.gen_bool(0.5);
    match rng.gen_range(0..if allow_if_then { 9 } else { 8 }) {
        0 => Pattern::Assert(condition(rng)),
        1 => Pattern::Becomes(signal(rng), op(rng), level(rng)),
        2 => Pattern::Spike { signal: signal(rng), width: constraint(rng, 0.5), amplitude: constraint(rng, 1.0) },
        3 => Pattern::Oscillation { signal: signal(rng), p2p_amp: constraint(rng, 1.0), period: constraint(rng, 0.5) },
        4 => Pattern::Rises { signal: signal(rng), monotonic, target: level(rng) },
        5 => Pattern::Falls { signal: signal(rng), monotonic, target: level(rng) },
        6 => Pattern::Overshoots {
            signal: signal(rng),
            monotonic,
            target: level(rng),
            margin: f64::from(rng.gen_range(0..=3)),
        },
        7 => Pattern::Undershoots {
            signal: signal(rng),
            monotonic,
            target: level(rng),
            margin: f64::from(rng.gen_range(0..=3)),
        },
        _ => {
            let within = rng.gen_bool(0.5).then(|| Within {
                bowtie: *[Bowtie::Exactly, Bowtie::AtMost, Bowtie::AtLeast].choose(rng).unwrap(),
                d: f64::from(rng.gen_range(0..=6)) * 0.5,
            });
            Pattern::IfThen(Box::new(simple_pattern(rng)), within, Box::new(simple_pattern(rng)))
        }
    }
}

/// A time on the quarter grid around `trace`.
pub fn random_time(rng: &mut ChaCha8Rng, trace: &Trace) -> f64 {
    let lo = ((trace.start() - 1.0) * 4.0).floor() as i64;
    let hi = ((trace.end() + 1.0) * 4.0).ceil() as i64;
    rng.gen_range(lo..=hi) as f64 / 4.0
}

/// An atom over `trace`. Event scopes only when `events` is set.
pub fn random_atom(rng: &mut ChaCha8Rng, trace: &Trace, events: bool) -> Atom {
    let kinds = if events { 8 } else { 5 };
    let scope = match rng.gen_range(0..kinds) {
        0 => Scope::Globally(random_pattern(rng, true)),
        1 => Scope::BeforeT(random_time(rng, trace), random_pattern(rng, true)),
        2 => Scope::AfterT(random_time(rng, trace), random_pattern(rng, true)),
        3 => Scope::At(random_time(rng, trace), random_pattern(rng, true)),
        4 => {
            let (a, b) = (random_time(rng, trace), random_time(rng, trace));
            Scope::BetweenT(a.min(b), a.max(b), random_pattern(rng, true))
        }
        5 => Scope::BeforeP(Box::new(simple_pattern(rng)), random_pattern(rng, false)),
        6 => Scope::AfterP(Box::new(simple_pattern(rng)), random_pattern(rng, false)),
        _ => Scope::BetweenP(Box::new(simple_pattern(rng)), Box::new(simple_pattern(rng)), random_pattern(rng, false)),
    };
    Atom { negated: rng.gen_bool(0.2), scope }
}

/// A seeded trace/atom pair for checker-oracle comparison: up to 15
/// records, 9 with event scopes since those nest a pattern in every frame.
pub fn equivalence_case(seed: u64) -> (Trace, Atom) {
    let mut r = crate::rng(seed);
    let events = r.gen_bool(0.3);
    let n = r.gen_range(1..=if events { 9 } else { 15 });
    let trace = random_trace(&mut r, n);
    let atom = random_atom(&mut r, &trace, events);
    (trace, atom)
}
