//! The violation-cause catalog.
//!
//! Every cause predicate returns the sample indices its diagnosis is built
//! from. A cause only holds when that witness exists, so a cause that holds
//! always has a diagnosis.

use std::fmt;
use std::str::FromStr;

use crate::diagnosis::{tie_break, Candidate};
use crate::dsl::{Atom, CmpOp, Condition, Pattern, Scope, SignalExpr, Within};
use crate::semantics::shapes::{extrema, oscillation_instances, spike_instances, ShapeInstance};
use crate::semantics::{Checker, Eval, Expired, Win};
use crate::trace::{EvaluationInterval, Trace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CauseFamily {
    Not,
    AAt,
    ABef,
    AAft,
    ABet,
    EBef,
    EAft,
    EBet,
    Assert,
    Becomes,
    Spike,
    Oscillation,
    Rises,
    Overshoots,
    IfThen,
}

impl CauseFamily {
    pub const ALL: [CauseFamily; 15] = [
        CauseFamily::Not,
        CauseFamily::AAt,
        CauseFamily::ABef,
        CauseFamily::AAft,
        CauseFamily::ABet,
        CauseFamily::EBef,
        CauseFamily::EAft,
        CauseFamily::EBet,
        CauseFamily::Assert,
        CauseFamily::Becomes,
        CauseFamily::Spike,
        CauseFamily::Oscillation,
        CauseFamily::Rises,
        CauseFamily::Overshoots,
        CauseFamily::IfThen,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CauseFamily::Not => "not",
            CauseFamily::AAt => "a_at",
            CauseFamily::ABef => "a_bef",
            CauseFamily::AAft => "a_aft",
            CauseFamily::ABet => "a_bet",
            CauseFamily::EBef => "e_bef",
            CauseFamily::EAft => "e_aft",
            CauseFamily::EBet => "e_bet",
            CauseFamily::Assert => "assert",
            CauseFamily::Becomes => "becomes",
            CauseFamily::Spike => "spike",
            CauseFamily::Oscillation => "oscillation",
            CauseFamily::Rises => "rises",
            CauseFamily::Overshoots => "overshoots",
            CauseFamily::IfThen => "if_then",
        }
    }

    /// Number of causes in the family.
    pub fn size(self) -> u8 {
        match self {
            CauseFamily::Becomes => 3,
            CauseFamily::Spike => 5,
            CauseFamily::Oscillation => 7,
            CauseFamily::Rises | CauseFamily::Overshoots => 4,
            CauseFamily::IfThen => 2,
            _ => 1,
        }
    }

    pub fn of_pattern(p: &Pattern) -> CauseFamily {
        match p {
            Pattern::Assert(_) => CauseFamily::Assert,
            Pattern::Becomes(..) => CauseFamily::Becomes,
            Pattern::IfThen(..) => CauseFamily::IfThen,
            Pattern::Spike { .. } => CauseFamily::Spike,
            Pattern::Oscillation { .. } => CauseFamily::Oscillation,
            Pattern::Rises { .. } | Pattern::Falls { .. } => CauseFamily::Rises,
            Pattern::Overshoots { .. } | Pattern::Undershoots { .. } => CauseFamily::Overshoots,
        }
    }

    fn of_scope(s: &Scope) -> Option<CauseFamily> {
        match s {
            Scope::Globally(_) => None,
            Scope::BeforeT(..) => Some(CauseFamily::ABef),
            Scope::AfterT(..) => Some(CauseFamily::AAft),
            Scope::At(..) => Some(CauseFamily::AAt),
            Scope::BetweenT(..) => Some(CauseFamily::ABet),
            Scope::BeforeP(..) => Some(CauseFamily::EBef),
            Scope::AfterP(..) => Some(CauseFamily::EAft),
            Scope::BetweenP(..) => Some(CauseFamily::EBet),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ViolationCauseId {
    pub family: CauseFamily,
    pub index: u8,
}

impl ViolationCauseId {
    pub fn new(family: CauseFamily, index: u8) -> Option<Self> {
        (1..=family.size()).contains(&index).then_some(ViolationCauseId { family, index })
    }

    /// The whole catalog in family order.
    pub fn all() -> Vec<ViolationCauseId> {
        CauseFamily::ALL
            .iter()
            .flat_map(|&family| (1..=family.size()).map(move |index| ViolationCauseId { family, index }))
            .collect()
    }
}

impl fmt::Display for ViolationCauseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c_{}_{}", self.family.name(), self.index)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnknownCause(pub String);

impl fmt::Display for UnknownCause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unknown violation cause `{}`", self.0)
    }
}

impl std::error::Error for UnknownCause {}

/// Accepts `c_spike_4`, `spike_4`, `spike:4` and `if-then` spellings.
impl FromStr for ViolationCauseId {
    type Err = UnknownCause;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || UnknownCause(s.to_string());
        let norm = s.trim().replace('-', "_");
        let body = norm.strip_prefix("c_").unwrap_or(&norm);
        let (name, idx) = body.rsplit_once(['_', ':']).ok_or_else(err)?;
        let family = CauseFamily::ALL.into_iter().find(|f| f.name() == name).ok_or_else(err)?;
        let index: u8 = idx.parse().map_err(|_| err())?;
        ViolationCauseId::new(family, index).ok_or_else(err)
    }
}

/// A cause instantiated for one atom. `interval` is where the cause is
/// evaluated; `dual` marks falls/undershoots bound to rises/overshoots causes.
#[derive(Debug, Clone, PartialEq)]
pub struct CauseBinding {
    pub cause: ViolationCauseId,
    pub atom: Atom,
    pub interval: EvaluationInterval,
    pub dual: bool,
}

/// Ordered causes for an atom: scope cause first, then pattern causes.
///
/// Event-scope atoms get their scope cause only; it coincides with the
/// scope being violated.
pub fn causes_for(trace: &Trace, atom: &Atom) -> Vec<CauseBinding> {
    let checker = Checker::new(trace);
    let whole = EvaluationInterval::of_trace(trace);
    let derived = checker.scope_interval(&atom.scope).unwrap_or(whole);
    let pattern = atom.scope.pattern();
    let dual = pattern.is_dual();
    let bind = |family, index, interval| CauseBinding {
        cause: ViolationCauseId { family, index },
        atom: atom.clone(),
        interval,
        dual,
    };
    if atom.negated {
        return vec![bind(CauseFamily::Not, 1, derived)];
    }
    let mut out = Vec::new();
    if let Some(family) = CauseFamily::of_scope(&atom.scope) {
        out.push(bind(family, 1, whole));
        if atom.scope.is_event() {
            return out;
        }
    }
    let family = CauseFamily::of_pattern(pattern);
    out.extend((1..=family.size()).map(|i| bind(family, i, derived)));
    out
}

/// Sample indices backing a diagnosis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Witness {
    Record(usize),
    /// Two records in the order the diagnosis lists them.
    Pair(usize, usize),
    Shape(ShapeInstance),
    Interval(usize, usize),
    /// A scope boundary outside the trace.
    Boundary,
    Occurrences((usize, usize), (usize, usize)),
}

pub fn check_cause(trace: &Trace, binding: &CauseBinding) -> bool {
    match find_witness(&Checker::new(trace), binding) {
        Ok(w) => w.is_some(),
        Err(Expired) => unreachable!("no deadline was set"),
    }
}

pub fn find_witness(c: &Checker, b: &CauseBinding) -> Eval<Option<Witness>> {
    let scope = &b.atom.scope;
    let (ti, te) = (c.trace().start(), c.trace().end());
    let boundary = |bad: bool| Ok(bad.then_some(Witness::Boundary));
    match (b.cause.family, scope) {
        (CauseFamily::Not, _) => not_witness(c, scope),
        (CauseFamily::AAt, &Scope::At(t, _)) => boundary(t < ti || te < t),
        (CauseFamily::ABef, &Scope::BeforeT(t, _)) => boundary(t <= ti || te < t),
        (CauseFamily::AAft, &Scope::AfterT(t, _)) => boundary(t < ti || te <= t),
        (CauseFamily::ABet, &Scope::BetweenT(n, m, _)) => boundary(n < ti || te < m || m <= n),
        (CauseFamily::EBef, Scope::BeforeP(p1, p)) => {
            Ok(c.before_event_witness(p1, p)?.map(|(i, j)| Witness::Interval(i, j)))
        }
        (CauseFamily::EAft, Scope::AfterP(p1, p)) => {
            Ok(c.after_event_witness(p1, p)?.map(|(i, j)| Witness::Interval(i, j)))
        }
        (CauseFamily::EBet, Scope::BetweenP(p1, p2, p)) => {
            Ok(c.between_event_witness(p1, p2, p)?.map(|(j, k)| Witness::Interval(j, k)))
        }
        (family, _) if family == CauseFamily::of_pattern(scope.pattern()) && !scope.is_event() => {
            let Some(w) = c.scope_interval(scope).and_then(|iv| c.window(&iv)) else {
                return Ok(None);
            };
            pattern_witness(c, scope.pattern(), b.cause.index, w)
        }
        _ => Ok(None),
    }
}

/// First index of the maximum and of the minimum, in time order.
fn extremes(v: &[f64], w: Win) -> Witness {
    let mut hi = w.lo;
    let mut lo = w.lo;
    for i in w.indices() {
        if v[i] > v[hi] {
            hi = i;
        }
        if v[i] < v[lo] {
            lo = i;
        }
    }
    Witness::Pair(hi.min(lo), hi.max(lo))
}

fn when(cond: bool, w: impl FnOnce() -> Witness) -> Eval<Option<Witness>> {
    Ok(cond.then(w))
}

fn pattern_witness(c: &Checker, p: &Pattern, index: u8, w: Win) -> Eval<Option<Witness>> {
    match p {
        Pattern::Assert(cond) => {
            let f = c.condition_fn(cond);
            Ok(w.indices().find(|&i| !f(i)).map(Witness::Record))
        }
        Pattern::Becomes(s, op, v) => {
            let sig = c.signal(s);
            let sat = |i: usize| c.cmp(*op, sig[i], *v);
            match index {
                1 => when(w.indices().skip(1).all(|i| !sat(i)), || extremes(&sig, w)),
                2 => when(w.indices().all(sat), || extremes(&sig, w)),
                _ => {
                    // a prefix satisfying the constraint, then a suffix violating it
                    let first_bad = w.indices().find(|&i| !sat(i)).unwrap_or(w.hi + 1);
                    let Some(last_good) = w.indices().rev().find(|&i| sat(i)) else {
                        return Ok(None);
                    };
                    let ok = w.len() >= 3 && (w.lo + 1).max(last_good) <= (w.hi - 1).min(first_bad);
                    when(ok, || Witness::Pair(last_good, last_good + 1))
                }
            }
        }
        Pattern::Spike { signal, width, amplitude } => {
            let sig = c.signal(signal);
            match index {
                1 | 2 => {
                    let constraint = if index == 1 { amplitude } else { width };
                    let measure = |i: &ShapeInstance| if index == 1 { i.amplitude(&sig) } else { i.span(c.times()) };
                    let Some(k) = constraint else { return Ok(None) };
                    let inst = spike_instances(&sig, w.lo, w.hi);
                    c.tick()?;
                    if inst.is_empty() || inst.iter().any(|i| c.cmp(k.op, measure(i), k.value)) {
                        return Ok(None);
                    }
                    Ok(closest(c, &inst, measure, k.value, |i| (i.idx[1], i.idx[3])))
                }
                _ => monotone_causes(&sig, index - 2, w),
            }
        }
        Pattern::Oscillation { signal, p2p_amp, period } => {
            let sig = c.signal(signal);
            match index {
                1 | 2 => {
                    let constraint = if index == 1 { p2p_amp } else { period };
                    let Some(k) = constraint else { return Ok(None) };
                    let inst = oscillation_instances(&sig, w.lo, w.hi);
                    c.tick()?;
                    let violates = |i: &ShapeInstance| {
                        if index == 1 {
                            let (a, b) = i.p2p(&sig);
                            !c.cmp(k.op, a, k.value) && !c.cmp(k.op, b, k.value)
                        } else {
                            !c.cmp(k.op, i.span(c.times()), k.value)
                        }
                    };
                    if inst.is_empty() || !inst.iter().all(violates) {
                        return Ok(None);
                    }
                    let measure = |i: &ShapeInstance| {
                        if index == 1 {
                            let (a, b) = i.p2p(&sig);
                            a.max(b)
                        } else {
                            i.span(c.times())
                        }
                    };
                    Ok(closest(c, &inst, measure, k.value, |i| (i.idx[0], i.idx[4])))
                }
                3 | 4 => {
                    let ext = extrema(&sig, w.lo, w.hi);
                    match (index, ext.as_slice()) {
                        (3, &[e]) => Ok(Some(Witness::Record(e))),
                        (4, &[a, b]) => Ok(Some(Witness::Pair(a, b))),
                        _ => Ok(None),
                    }
                }
                _ => monotone_causes(&sig, index - 4, w),
            }
        }
        Pattern::Rises { signal, monotonic, target } => rises_witness(c, signal, 1.0, *monotonic, *target, index, w),
        Pattern::Falls { signal, monotonic, target } => rises_witness(c, signal, -1.0, *monotonic, *target, index, w),
        Pattern::Overshoots { signal, monotonic, target, margin } => {
            overshoots_witness(c, signal, 1.0, *monotonic, *target, *margin, index, w)
        }
        Pattern::Undershoots { signal, monotonic, target, margin } => {
            overshoots_witness(c, signal, -1.0, *monotonic, *target, *margin, index, w)
        }
        Pattern::IfThen(p1, within, p2) => if_then_witness(c, p1, within, p2, index, w),
    }
}

/// Constant (1), non-increasing (2), non-decreasing (3).
fn monotone_causes(v: &[f64], which: u8, w: Win) -> Eval<Option<Witness>> {
    let pairs = || (w.lo..w.hi).map(|k| (v[k], v[k + 1]));
    match which {
        1 => when(w.indices().all(|i| v[i] == v[w.lo]), || Witness::Interval(w.lo, w.hi)),
        2 => when(pairs().all(|(a, b)| a >= b), || extremes(v, w)),
        _ => when(pairs().all(|(a, b)| a <= b), || extremes(v, w)),
    }
}

fn closest(
    c: &Checker,
    inst: &[ShapeInstance],
    measure: impl Fn(&ShapeInstance) -> f64,
    target: f64,
    bounds: impl Fn(&ShapeInstance) -> (usize, usize),
) -> Option<Witness> {
    let t = c.times();
    let cands: Vec<Candidate> = inst
        .iter()
        .map(|i| {
            let (a, b) = bounds(i);
            Candidate { measure: measure(i), start: t[a], end: t[b] }
        })
        .collect();
    tie_break(&cands, target).map(|k| Witness::Shape(inst[k]))
}

fn first_decrease(o: &impl Fn(usize) -> f64, lo: usize, f: usize) -> Option<usize> {
    (lo..f).find(|&k| o(k) >= o(k + 1))
}

fn rises_witness(
    c: &Checker,
    signal: &SignalExpr,
    sign: f64,
    monotonic: bool,
    target: f64,
    index: u8,
    w: Win,
) -> Eval<Option<Witness>> {
    let sig = c.signal(signal);
    let o = |i: usize| sign * sig[i];
    let v = sign * target;
    match index {
        1 => when(w.indices().all(|i| o(i) < v), || extremes(&sig, w)),
        2 => when(w.indices().all(|i| o(i) >= v), || extremes(&sig, w)),
        3 => {
            let Some(f) = w.indices().find(|&i| o(i) >= v) else { return Ok(None) };
            if !monotonic || f == w.lo {
                return Ok(None);
            }
            Ok(first_decrease(&o, w.lo, f).map(|k| Witness::Pair(k, k + 1)))
        }
        _ => {
            let Some(t) = w.indices().find(|&i| o(i) < v) else { return Ok(None) };
            when(t > w.lo && t < w.hi && (t..=w.hi).all(|i| o(i) < v), || Witness::Pair(t - 1, t))
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn overshoots_witness(
    c: &Checker,
    signal: &SignalExpr,
    sign: f64,
    monotonic: bool,
    target: f64,
    margin: f64,
    index: u8,
    w: Win,
) -> Eval<Option<Witness>> {
    let sig = c.signal(signal);
    let o = |i: usize| sign * sig[i];
    let v1 = sign * target;
    let top = v1 + margin;
    match index {
        1 => when(w.indices().all(|i| o(i) < v1), || extremes(&sig, w)),
        2 => when(o(w.hi) > top, || extremes(&sig, w)),
        3 => {
            let Some(f) = w.indices().find(|&i| o(i) >= v1) else { return Ok(None) };
            if !monotonic || f == w.lo || (f..=w.hi).any(|i| o(i) > top) {
                return Ok(None);
            }
            Ok(first_decrease(&o, w.lo, f).map(|k| Witness::Pair(k, k + 1)))
        }
        _ => {
            // in band up to t > t_l, below v1 afterwards, with at least one drop
            let Some(g) = w.indices().find(|&i| o(i) < v1) else { return Ok(None) };
            let ok = g >= w.lo + 2 && (w.lo..g).all(|i| o(i) <= top) && (g..=w.hi).all(|i| o(i) < v1);
            when(ok, || Witness::Pair(g - 1, g))
        }
    }
}

/// Ends `j` of `p1` occurrences `[i, j]` with `lo <= i < j < hi`.
fn trigger_ends(c: &Checker, p1: &Pattern, w: Win) -> Eval<Vec<usize>> {
    let mut out = Vec::new();
    for j in w.lo + 1..w.hi {
        for i in w.lo..j {
            c.tick()?;
            if c.holds(p1, Win::new(i, j))? {
                out.push(j);
                break;
            }
        }
    }
    Ok(out)
}

fn if_then_witness(
    c: &Checker,
    p1: &Pattern,
    within: &Option<Within>,
    p2: &Pattern,
    index: u8,
    w: Win,
) -> Eval<Option<Witness>> {
    if index == 2 && within.is_none() {
        return Ok(None);
    }
    let starts = c.occurrence_starts(p2, w)?;
    let ends = trigger_ends(c, p1, w)?;
    let t = c.times();
    for &j in ends.iter().rev() {
        let later = &starts[starts.partition_point(|&k| k < j)..];
        match (index, within) {
            (1, _) if later.is_empty() => return Ok(Some(Witness::Interval(j, w.hi))),
            (2, Some(d)) if !later.is_empty() => {
                let op = d.bowtie.as_cmp();
                if later.iter().all(|&k| !c.cmp(op, t[k] - t[j], d.d)) {
                    return Ok(Some(Witness::Pair(j, later[0])));
                }
            }
            _ => {}
        }
    }
    Ok(None)
}

/// The satisfied scope of a negated atom, and where its pattern held.
fn not_witness(c: &Checker, scope: &Scope) -> Eval<Option<Witness>> {
    if !c.scope(scope)? {
        return Ok(None);
    }
    let n = c.times().len();
    let w = match scope {
        Scope::BeforeP(_, p) => c.first_occurrence_end(p)?.map(|(k, l)| Win::new(k, l)),
        Scope::AfterP(_, p) => c.last_occurrence_start(p, n - 1)?.map(|(k, l)| Win::new(k, l)),
        Scope::BetweenP(p1, p2, p) => {
            let (ends, starts) = c.between_frames(p1, p2)?;
            let framed =
                (0..n).filter(|&j| ends[j]).find_map(|j| (j + 1..n).find(|&k| starts[k]).map(|k| Win::new(j, k)));
            match framed {
                Some(w) => Some(w),
                None => c.first_occurrence_end(p)?.map(|(k, l)| Win::new(k, l)),
            }
        }
        _ => c.scope_interval(scope).and_then(|iv| c.window(&iv)),
    };
    match w {
        Some(w) => satisfied_witness(c, scope.pattern(), w),
        None => Ok(None),
    }
}

fn satisfied_witness(c: &Checker, p: &Pattern, w: Win) -> Eval<Option<Witness>> {
    let reach = |s: &SignalExpr, sign: f64, v: f64| {
        let sig = c.signal(s);
        w.indices().find(|&i| sign * sig[i] >= sign * v)
    };
    let first = match p {
        Pattern::Assert(cond) => {
            let f = c.condition_fn(cond);
            return Ok(w.indices().find(|&i| f(i)).map(Witness::Record));
        }
        Pattern::Becomes(s, op, v) => {
            let sig = c.signal(s);
            w.indices().find(|&i| c.cmp(*op, sig[i], *v))
        }
        Pattern::Rises { signal, target, .. } | Pattern::Overshoots { signal, target, .. } => {
            reach(signal, 1.0, *target)
        }
        Pattern::Falls { signal, target, .. } | Pattern::Undershoots { signal, target, .. } => {
            reach(signal, -1.0, *target)
        }
        Pattern::Spike { signal, width, amplitude } => {
            let sig = c.signal(signal);
            let inst = spike_instances(&sig, w.lo, w.hi);
            return Ok(inst.into_iter().find(|i| c.spike_ok(&sig, i, width, amplitude)).map(Witness::Shape));
        }
        Pattern::Oscillation { signal, p2p_amp, period } => {
            let sig = c.signal(signal);
            let inst = oscillation_instances(&sig, w.lo, w.hi);
            return Ok(inst.into_iter().find(|i| c.oscillation_ok(&sig, i, p2p_amp, period)).map(Witness::Shape));
        }
        Pattern::IfThen(p1, within, p2) => return occurrences(c, p1, within, p2, w),
    };
    // the first reaching record only counts when the pattern holds there
    if !c.holds(p, w)? {
        return Ok(None);
    }
    Ok(first.map(Witness::Record))
}

/// A `p1` occurrence followed by a `p2` occurrence that answers it.
fn occurrences(c: &Checker, p1: &Pattern, within: &Option<Within>, p2: &Pattern, w: Win) -> Eval<Option<Witness>> {
    let t = c.times();
    let timing = within.map(|d| (d.bowtie.as_cmp(), d.d));
    for j in w.lo + 1..w.hi {
        let mut trigger = None;
        for i in w.lo..j {
            c.tick()?;
            if c.holds(p1, Win::new(i, j))? {
                trigger = Some(i);
                break;
            }
        }
        let Some(i) = trigger else { continue };
        for k in j..w.hi {
            if timing.is_some_and(|(op, d): (CmpOp, f64)| !c.cmp(op, t[k] - t[j], d)) {
                continue;
            }
            for l in k + 1..=w.hi {
                c.tick()?;
                if c.holds(p2, Win::new(k, l))? {
                    return Ok(Some(Witness::Occurrences((i, j), (k, l))));
                }
            }
        }
    }
    Ok(None)
}

/// Condition variables, for records that report every signal a condition reads.
pub fn condition_variables(c: &Condition) -> Vec<String> {
    c.variables().into_iter().collect()
}
