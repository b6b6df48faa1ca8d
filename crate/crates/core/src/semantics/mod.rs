//! Verdicts for properties, scopes and patterns.
//!
//! Quantifiers range over the sample timestamps inside the evaluation
//! interval. A pattern sees the window of samples in `[t_l, t_u]`; its
//! first sample plays the role of `t_l`, so `(t_l, ...]` starts at the
//! second sample of the window.

pub mod shapes;

use std::cell::{Cell, RefCell};
use std::collections::HashMap;
use std::rc::Rc;
use std::time::Instant;

use crate::dsl::{Atom, CmpOp, Condition, Constraint, Pattern, PropertyAst, Scope, SignalExpr};
use crate::trace::{EvaluationInterval, Trace};

use shapes::{oscillation_instances, spike_instances, ShapeInstance};

/// The evaluation ran past its deadline; the partial result is discarded.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Expired;

pub type Eval<T> = Result<T, Expired>;

/// Inclusive range of sample indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Win {
    pub lo: usize,
    pub hi: usize,
}

impl Win {
    pub fn new(lo: usize, hi: usize) -> Self {
        debug_assert!(lo <= hi);
        Win { lo, hi }
    }

    pub fn len(&self) -> usize {
        self.hi - self.lo + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<usize> {
        self.lo..=self.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verdict {
    pub holds: bool,
    pub evaluated_interval: EvaluationInterval,
}

/// Evaluation context over one trace. Signals are computed once per
/// expression and cached.
pub struct Checker<'t> {
    trace: &'t Trace,
    times: Vec<f64>,
    epsilon: f64,
    deadline: Option<Instant>,
    ticks: Cell<u32>,
    cache: RefCell<HashMap<String, Rc<Vec<f64>>>>,
}

enum Resolved {
    And(Box<Resolved>, Box<Resolved>),
    Or(Box<Resolved>, Box<Resolved>),
    Cmp(Rc<Vec<f64>>, CmpOp, f64),
}

impl Resolved {
    fn at(&self, i: usize, eps: f64) -> bool {
        match self {
            Resolved::And(a, b) => a.at(i, eps) && b.at(i, eps),
            Resolved::Or(a, b) => a.at(i, eps) || b.at(i, eps),
            Resolved::Cmp(s, op, v) => op.apply(s[i], *v, eps),
        }
    }
}

/// Signal values with an orientation: `sign = -1` evaluates the dual
/// (falls, undershoots) on the mirrored signal.
struct Oriented<'a> {
    v: &'a [f64],
    sign: f64,
}

impl Oriented<'_> {
    fn at(&self, i: usize) -> f64 {
        self.sign * self.v[i]
    }
}

impl<'t> Checker<'t> {
    pub fn new(trace: &'t Trace) -> Self {
        Checker {
            trace,
            times: trace.timestamps(),
            epsilon: 0.0,
            deadline: None,
            ticks: Cell::new(0),
            cache: RefCell::new(HashMap::new()),
        }
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_deadline(mut self, deadline: Option<Instant>) -> Self {
        self.deadline = deadline;
        self
    }

    pub fn trace(&self) -> &'t Trace {
        self.trace
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn cmp(&self, op: CmpOp, a: f64, b: f64) -> bool {
        op.apply(a, b, self.epsilon)
    }

    pub fn deadline(&self) -> Option<Instant> {
        self.deadline
    }

    /// Cheap cooperative deadline check.
    pub fn tick(&self) -> Eval<()> {
        if let Some(d) = self.deadline {
            let n = self.ticks.get().wrapping_add(1);
            self.ticks.set(n);
            if n % 64 == 0 && Instant::now() >= d {
                return Err(Expired);
            }
        }
        Ok(())
    }

    pub fn expired(&self) -> bool {
        self.deadline.is_some_and(|d| Instant::now() >= d)
    }

    /// Values of `expr` at every sample. Missing values read as NaN.
    pub fn signal(&self, expr: &SignalExpr) -> Rc<Vec<f64>> {
        let key = expr.to_string();
        if let Some(s) = self.cache.borrow().get(&key) {
            return s.clone();
        }
        let values: Vec<f64> =
            self.trace.records().iter().map(|r| expr.eval(&mut |v| r.get(v).unwrap_or(f64::NAN))).collect();
        let rc = Rc::new(values);
        self.cache.borrow_mut().insert(key, rc.clone());
        rc
    }

    /// Samples inside the interval.
    pub fn window(&self, iv: &EvaluationInterval) -> Option<Win> {
        self.trace.window(iv.lower, iv.upper).map(|(lo, hi)| Win::new(lo, hi))
    }

    pub fn full(&self) -> Win {
        Win::new(0, self.times.len() - 1)
    }

    pub fn interval_of(&self, w: Win) -> EvaluationInterval {
        EvaluationInterval::new(self.times[w.lo], self.times[w.hi])
    }

    fn resolve(&self, c: &Condition) -> Resolved {
        match c {
            Condition::And(a, b) => Resolved::And(Box::new(self.resolve(a)), Box::new(self.resolve(b))),
            Condition::Or(a, b) => Resolved::Or(Box::new(self.resolve(a)), Box::new(self.resolve(b))),
            Condition::Cmp(s, op, v) => Resolved::Cmp(self.signal(s), *op, *v),
        }
    }

    /// A reusable per-sample evaluator for `c`.
    pub fn condition_fn(&self, c: &Condition) -> impl Fn(usize) -> bool + '_ {
        let r = self.resolve(c);
        let eps = self.epsilon;
        move |i| r.at(i, eps)
    }

    pub fn condition_at(&self, c: &Condition, i: usize) -> bool {
        self.resolve(c).at(i, self.epsilon)
    }

    // ---- properties and scopes ----

    pub fn property(&self, p: &PropertyAst) -> Eval<bool> {
        for clause in &p.clauses {
            let mut all = true;
            for a in &clause.atoms {
                if !self.atom(a)? {
                    all = false;
                    break;
                }
            }
            if all {
                return Ok(true);
            }
        }
        Ok(false)
    }

    pub fn atom(&self, a: &Atom) -> Eval<bool> {
        Ok(self.scope(&a.scope)? != a.negated)
    }

    /// The interval an absolute scope (or globally) hands to its pattern,
    /// when its boundary condition holds. `None` for event scopes and for
    /// out-of-range boundaries.
    pub fn scope_interval(&self, s: &Scope) -> Option<EvaluationInterval> {
        let (ti, te) = (self.trace.start(), self.trace.end());
        match *s {
            Scope::Globally(_) => Some(EvaluationInterval::new(ti, te)),
            Scope::BeforeT(t, _) => (ti < t && t <= te).then(|| EvaluationInterval::new(ti, t)),
            Scope::AfterT(t, _) => (ti <= t && t < te).then(|| EvaluationInterval::new(t, te)),
            Scope::At(t, _) => (ti <= t && t <= te).then(|| EvaluationInterval::new(t, t)),
            Scope::BetweenT(n, m, _) => (ti <= n && n < m && m <= te).then(|| EvaluationInterval::new(n, m)),
            _ => None,
        }
    }

    pub fn scope(&self, s: &Scope) -> Eval<bool> {
        match s {
            Scope::BeforeP(p1, p) => self.before_event(p1, p),
            Scope::AfterP(p1, p) => self.after_event(p1, p),
            Scope::BetweenP(p1, p2, p) => self.between_event(p1, p2, p),
            _ => match self.scope_interval(s) {
                Some(iv) => self.pattern_on(s.pattern(), self.window(&iv)),
                None => Ok(false),
            },
        }
    }

    /// Smallest `l` such that `p` holds on some `[k, l]` with `k < l`.
    pub fn first_occurrence_end(&self, p: &Pattern) -> Eval<Option<(usize, usize)>> {
        let n = self.times.len();
        for l in 1..n {
            for k in 0..l {
                self.tick()?;
                if self.holds(p, Win::new(k, l))? {
                    return Ok(Some((k, l)));
                }
            }
        }
        Ok(None)
    }

    /// Largest `k` such that `p` holds on some `[k, l]` with `k < l <= hi`.
    pub fn last_occurrence_start(&self, p: &Pattern, hi: usize) -> Eval<Option<(usize, usize)>> {
        for k in (0..hi).rev() {
            for l in k + 1..=hi {
                self.tick()?;
                if self.holds(p, Win::new(k, l))? {
                    return Ok(Some((k, l)));
                }
            }
        }
        Ok(None)
    }

    /// First `(t1, t2)` (lexicographic) with `p1` on `[t1, t2]`, `t_i < t1`,
    /// and no occurrence of `p` ending before `t1`.
    pub fn before_event_witness(&self, p1: &Pattern, p: &Pattern) -> Eval<Option<(usize, usize)>> {
        let n = self.times.len();
        // p holds on [k, l] with l < i  iff  i > l*
        let limit = match self.first_occurrence_end(p)? {
            Some((_, l)) => l.min(n - 1),
            None => n - 1,
        };
        for i in 1..=limit {
            for j in i + 1..n {
                self.tick()?;
                if self.holds(p1, Win::new(i, j))? {
                    return Ok(Some((i, j)));
                }
            }
        }
        Ok(None)
    }

    fn before_event(&self, p1: &Pattern, p: &Pattern) -> Eval<bool> {
        Ok(self.before_event_witness(p1, p)?.is_none())
    }

    /// First `(t1, t2)` with `p1` on `[t1, t2]`, `t2 < t_e`, and no occurrence
    /// of `p` starting after `t2`.
    pub fn after_event_witness(&self, p1: &Pattern, p: &Pattern) -> Eval<Option<(usize, usize)>> {
        let n = self.times.len();
        if n < 3 {
            // t1 < t2 < t_e needs three samples
            return Ok(None);
        }
        // p holds on [k, l] with k > j  iff  j < k*
        let from = match self.last_occurrence_start(p, n - 1)? {
            Some((k, _)) => k,
            None => 0,
        };
        for i in 0..n - 2 {
            for j in (i + 1).max(from)..n - 1 {
                self.tick()?;
                if self.holds(p1, Win::new(i, j))? {
                    return Ok(Some((i, j)));
                }
            }
        }
        Ok(None)
    }

    fn after_event(&self, p1: &Pattern, p: &Pattern) -> Eval<bool> {
        Ok(self.after_event_witness(p1, p)?.is_none())
    }

    /// `ends[j]`: some `p1` occurrence ends at `j`; `starts[k]`: some `p2`
    /// occurrence starts at `k`.
    pub fn between_frames(&self, p1: &Pattern, p2: &Pattern) -> Eval<(Vec<bool>, Vec<bool>)> {
        let n = self.times.len();
        let mut ends = vec![false; n];
        for (j, end) in ends.iter_mut().enumerate().skip(1) {
            for i in 0..j {
                self.tick()?;
                if self.holds(p1, Win::new(i, j))? {
                    *end = true;
                    break;
                }
            }
        }
        let mut starts = vec![false; n];
        for (k, start) in starts.iter_mut().enumerate().take(n.saturating_sub(1)) {
            for l in k + 1..n {
                self.tick()?;
                if self.holds(p2, Win::new(k, l))? {
                    *start = true;
                    break;
                }
            }
        }
        Ok((ends, starts))
    }

    /// First `(t2, t3)` where `p1` ends at `t2`, `p2` starts at `t3 > t2`
    /// and `p` fails on `[t2, t3]`.
    pub fn between_event_witness(&self, p1: &Pattern, p2: &Pattern, p: &Pattern) -> Eval<Option<(usize, usize)>> {
        let n = self.times.len();
        let (ends, starts) = self.between_frames(p1, p2)?;
        for j in (0..n).filter(|&j| ends[j]) {
            for k in (j + 1..n).filter(|&k| starts[k]) {
                self.tick()?;
                if !self.holds(p, Win::new(j, k))? {
                    return Ok(Some((j, k)));
                }
            }
        }
        Ok(None)
    }

    fn between_event(&self, p1: &Pattern, p2: &Pattern, p: &Pattern) -> Eval<bool> {
        Ok(self.between_event_witness(p1, p2, p)?.is_none())
    }

    // ---- patterns ----

    pub fn pattern(&self, p: &Pattern, iv: &EvaluationInterval) -> Eval<bool> {
        self.pattern_on(p, self.window(iv))
    }

    /// Pattern verdict on a window; `None` is a window without samples.
    pub fn pattern_on(&self, p: &Pattern, w: Option<Win>) -> Eval<bool> {
        match w {
            Some(w) => self.holds(p, w),
            None => Ok(matches!(p, Pattern::Assert(_) | Pattern::IfThen(..))),
        }
    }

    pub fn holds(&self, p: &Pattern, w: Win) -> Eval<bool> {
        Ok(match p {
            Pattern::Assert(c) => {
                let f = self.condition_fn(c);
                w.indices().all(f)
            }
            Pattern::Becomes(s, op, v) => {
                let sig = self.signal(s);
                match w.indices().find(|&i| self.cmp(*op, sig[i], *v)) {
                    Some(f) => f > w.lo,
                    None => false,
                }
            }
            Pattern::Rises { signal, monotonic, target } => self.rises(signal, 1.0, *monotonic, *target, w),
            Pattern::Falls { signal, monotonic, target } => self.rises(signal, -1.0, *monotonic, *target, w),
            Pattern::Overshoots { signal, monotonic, target, margin } => {
                self.overshoots(signal, 1.0, *monotonic, *target, *margin, w)
            }
            Pattern::Undershoots { signal, monotonic, target, margin } => {
                self.overshoots(signal, -1.0, *monotonic, *target, *margin, w)
            }
            Pattern::Spike { signal, width, amplitude } => {
                let sig = self.signal(signal);
                spike_instances(&sig, w.lo, w.hi).iter().any(|i| self.spike_ok(&sig, i, width, amplitude))
            }
            Pattern::Oscillation { signal, p2p_amp, period } => {
                let sig = self.signal(signal);
                oscillation_instances(&sig, w.lo, w.hi).iter().any(|i| self.oscillation_ok(&sig, i, p2p_amp, period))
            }
            Pattern::IfThen(p1, within, p2) => self.if_then(p1, within.map(|w| (w.bowtie.as_cmp(), w.d)), p2, w)?,
        })
    }

    pub fn constraint_ok(&self, c: &Option<Constraint>, measured: f64) -> bool {
        c.map_or(true, |c| self.cmp(c.op, measured, c.value))
    }

    pub fn spike_ok(
        &self,
        v: &[f64],
        i: &ShapeInstance,
        width: &Option<Constraint>,
        amplitude: &Option<Constraint>,
    ) -> bool {
        self.constraint_ok(width, i.span(&self.times)) && self.constraint_ok(amplitude, i.amplitude(v))
    }

    pub fn oscillation_ok(
        &self,
        v: &[f64],
        i: &ShapeInstance,
        p2p_amp: &Option<Constraint>,
        period: &Option<Constraint>,
    ) -> bool {
        let (a, b) = i.p2p(v);
        self.constraint_ok(p2p_amp, a)
            && self.constraint_ok(p2p_amp, b)
            && self.constraint_ok(period, i.span(&self.times))
    }

    /// First index of the window where the oriented signal reaches `target`.
    fn first_reach(&self, s: &Oriented, target: f64, w: Win) -> Option<usize> {
        w.indices().find(|&i| s.at(i) >= target)
    }

    fn rises(&self, signal: &SignalExpr, sign: f64, monotonic: bool, target: f64, w: Win) -> bool {
        let sig = self.signal(signal);
        let s = Oriented { v: &sig, sign };
        match self.first_reach(&s, sign * target, w) {
            Some(f) if f > w.lo => !monotonic || (w.lo..f).all(|k| s.at(k) < s.at(k + 1)),
            _ => false,
        }
    }

    fn overshoots(&self, signal: &SignalExpr, sign: f64, monotonic: bool, target: f64, margin: f64, w: Win) -> bool {
        let sig = self.signal(signal);
        let s = Oriented { v: &sig, sign };
        let v1 = sign * target;
        match self.first_reach(&s, v1, w) {
            Some(f) if f > w.lo => {
                (f..=w.hi).all(|k| s.at(k) <= v1 + margin) && (!monotonic || (w.lo..f).all(|k| s.at(k) < s.at(k + 1)))
            }
            _ => false,
        }
    }

    /// Start indices `k` of `p2` occurrences `[k, l]` inside `w`.
    pub fn occurrence_starts(&self, p: &Pattern, w: Win) -> Eval<Vec<usize>> {
        let mut out = Vec::new();
        for k in w.lo..w.hi {
            for l in k + 1..=w.hi {
                self.tick()?;
                if self.holds(p, Win::new(k, l))? {
                    out.push(k);
                    break;
                }
            }
        }
        Ok(out)
    }

    /// Whether a `p2` start in `starts` answers a trigger ending at `j`.
    pub fn answered(&self, starts: &[usize], j: usize, within: Option<(CmpOp, f64)>) -> bool {
        let from = starts.partition_point(|&k| k < j);
        match within {
            None => from < starts.len(),
            Some((op, d)) => starts[from..].iter().any(|&k| self.cmp(op, self.times[k] - self.times[j], d)),
        }
    }

    fn if_then(&self, p1: &Pattern, within: Option<(CmpOp, f64)>, p2: &Pattern, w: Win) -> Eval<bool> {
        let starts = self.occurrence_starts(p2, w)?;
        for j in w.lo + 1..w.hi {
            if self.answered(&starts, j, within) {
                continue;
            }
            for i in w.lo..j {
                self.tick()?;
                if self.holds(p1, Win::new(i, j))? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

fn unbounded<T>(r: Eval<T>) -> T {
    match r {
        Ok(v) => v,
        Err(Expired) => unreachable!("no deadline was set"),
    }
}

pub fn eval_property(trace: &Trace, property: &PropertyAst) -> Verdict {
    let c = Checker::new(trace);
    Verdict { holds: unbounded(c.property(property)), evaluated_interval: EvaluationInterval::of_trace(trace) }
}

pub fn eval_scope(trace: &Trace, scope: &Scope) -> Verdict {
    let c = Checker::new(trace);
    let holds = unbounded(c.scope(scope));
    let evaluated_interval = c.scope_interval(scope).unwrap_or_else(|| EvaluationInterval::of_trace(trace));
    Verdict { holds, evaluated_interval }
}

pub fn eval_pattern(trace: &Trace, interval: &EvaluationInterval, pattern: &Pattern) -> bool {
    unbounded(Checker::new(trace).pattern(pattern, interval))
}

/// `t` must be a sample timestamp; other instants evaluate to false.
pub fn eval_condition(trace: &Trace, t: f64, cond: &Condition) -> bool {
    match trace.index_of(t) {
        Some(i) => Checker::new(trace).condition_at(cond, i),
        None => false,
    }
}

#[cfg(test)]
mod tests;
