//! Brute-force evaluator for properties, patterns and violation causes.
//!
//! Every quantifier is a loop over sample indices. Nothing here calls into
//! the checker; only the AST types are shared. Comparisons are exact.
//!
//! Conventions it shares with the checker by definition, not by code:
//! a pattern sees the samples inside `[t_l, t_u]` and the first of them
//! plays `t_l`; an empty window satisfies assert and if-then only; a spike's
//! outer extremum may coincide with its inner one only at a window edge.

use sigdiag_core::causes::{CauseBinding, CauseFamily};
use sigdiag_core::dsl::{Atom, CmpOp, Condition, Constraint, Pattern, PropertyAst, Scope, SignalExpr, Within};
use sigdiag_core::trace::Trace;

pub const DEFAULT_BOUND: usize = 30;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("trace has {len} records, the oracle accepts at most {bound}")]
pub struct TooLarge {
    pub len: usize,
    pub bound: usize,
}

/// A spike or oscillation occurrence found by enumeration. `peak` is the
/// written polarity (strict maximum in the middle).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tuple {
    pub peak: bool,
    pub t: [usize; 5],
}

pub struct Oracle<'t> {
    trace: &'t Trace,
    times: Vec<f64>,
}

fn sat(op: CmpOp, a: f64, b: f64) -> bool {
    match op {
        CmpOp::Lt => a < b,
        CmpOp::Gt => a > b,
        CmpOp::Le => a <= b,
        CmpOp::Ge => a >= b,
        CmpOp::Eq => a == b,
        CmpOp::Ne => a != b,
    }
}

fn meets(c: &Option<Constraint>, x: f64) -> bool {
    match c {
        Some(c) => sat(c.op, x, c.value),
        None => true,
    }
}

impl<'t> Oracle<'t> {
    pub fn new(trace: &'t Trace) -> Result<Self, TooLarge> {
        Self::with_bound(trace, DEFAULT_BOUND)
    }

    pub fn with_bound(trace: &'t Trace, bound: usize) -> Result<Self, TooLarge> {
        if trace.len() > bound {
            return Err(TooLarge { len: trace.len(), bound });
        }
        let times = trace.records().iter().map(|r| r.timestamp).collect();
        Ok(Oracle { trace, times })
    }

    fn n(&self) -> usize {
        self.times.len()
    }

    fn val(&self, e: &SignalExpr, k: usize) -> f64 {
        let r = &self.trace.records()[k];
        e.eval(&mut |v| r.get(v).unwrap_or(f64::NAN))
    }

    fn cond(&self, c: &Condition, k: usize) -> bool {
        match c {
            Condition::And(a, b) => self.cond(a, k) && self.cond(b, k),
            Condition::Or(a, b) => self.cond(a, k) || self.cond(b, k),
            Condition::Cmp(e, op, v) => sat(*op, self.val(e, k), *v),
        }
    }

    /// First and last sample inside `[lower, upper]`.
    pub fn samples(&self, lower: f64, upper: f64) -> Option<(usize, usize)> {
        let inside: Vec<usize> = (0..self.n()).filter(|&k| lower <= self.times[k] && self.times[k] <= upper).collect();
        Some((*inside.first()?, *inside.last()?))
    }

    pub fn property(&self, p: &PropertyAst) -> bool {
        p.clauses.iter().any(|c| c.atoms.iter().all(|a| self.atom(a)))
    }

    pub fn atom(&self, a: &Atom) -> bool {
        self.scope(&a.scope) != a.negated
    }

    /// The `[t_l, t_u]` of an absolute scope whose boundaries are valid.
    pub fn absolute_interval(&self, s: &Scope) -> Option<(f64, f64)> {
        let (ti, te) = (self.times[0], self.times[self.n() - 1]);
        match *s {
            Scope::Globally(_) => Some((ti, te)),
            Scope::BeforeT(t, _) if ti < t && t <= te => Some((ti, t)),
            Scope::AfterT(t, _) if ti <= t && t < te => Some((t, te)),
            Scope::At(t, _) if ti <= t && t <= te => Some((t, t)),
            Scope::BetweenT(n, m, _) if ti <= n && n < m && m <= te => Some((n, m)),
            _ => None,
        }
    }

    pub fn scope(&self, s: &Scope) -> bool {
        let n = self.n();
        match s {
            Scope::BeforeP(p1, p) => {
                // every p1 occurrence [t1, t2] with t_i < t1 is preceded by a p occurrence [t3, t4], t4 < t1
                for t1 in 1..n {
                    for t2 in t1 + 1..n {
                        if self.on(p1, t1, t2) && !self.occurs_in(p, 0, t1 - 1) {
                            return false;
                        }
                    }
                }
                true
            }
            Scope::AfterP(p1, p) => {
                for t1 in 0..n {
                    for t2 in t1 + 1..n.saturating_sub(1) {
                        if self.on(p1, t1, t2) && !self.occurs_in(p, t2 + 1, n - 1) {
                            return false;
                        }
                    }
                }
                true
            }
            Scope::BetweenP(p1, p2, p) => !self.between_violation(p1, p2, p),
            _ => match self.absolute_interval(s) {
                Some((l, u)) => self.pattern(s.pattern(), l, u),
                None => false,
            },
        }
    }

    fn between_violation(&self, p1: &Pattern, p2: &Pattern, p: &Pattern) -> bool {
        let n = self.n();
        for t1 in 0..n {
            for t2 in t1 + 1..n {
                if !self.on(p1, t1, t2) {
                    continue;
                }
                for t3 in t2 + 1..n {
                    for t4 in t3 + 1..n {
                        if self.on(p2, t3, t4) && !self.on(p, t2, t3) {
                            return true;
                        }
                    }
                }
            }
        }
        false
    }

    /// Some `[t3, t4]`, `a <= t3 < t4 <= b`, satisfies `p`.
    fn occurs_in(&self, p: &Pattern, a: usize, b: usize) -> bool {
        (a..=b).any(|t3| (t3 + 1..=b).any(|t4| self.on(p, t3, t4)))
    }

    /// Pattern verdict on the time interval `[lower, upper]`.
    pub fn pattern(&self, p: &Pattern, lower: f64, upper: f64) -> bool {
        match self.samples(lower, upper) {
            Some((a, b)) => self.on(p, a, b),
            None => matches!(p, Pattern::Assert(_) | Pattern::IfThen(..)),
        }
    }

    /// Pattern verdict on the samples `a..=b`.
    pub fn on(&self, p: &Pattern, a: usize, b: usize) -> bool {
        match p {
            Pattern::Assert(c) => (a..=b).all(|t| self.cond(c, t)),
            Pattern::Becomes(e, op, v) => {
                (a + 1..=b).any(|t| sat(*op, self.val(e, t), *v) && (a..t).all(|t1| !sat(*op, self.val(e, t1), *v)))
            }
            Pattern::Rises { signal, monotonic, target } => self.rises(signal, 1.0, *monotonic, *target, a, b),
            Pattern::Falls { signal, monotonic, target } => self.rises(signal, -1.0, *monotonic, *target, a, b),
            Pattern::Overshoots { signal, monotonic, target, margin } => {
                self.overshoots(signal, 1.0, *monotonic, *target, *margin, a, b)
            }
            Pattern::Undershoots { signal, monotonic, target, margin } => {
                self.overshoots(signal, -1.0, *monotonic, *target, *margin, a, b)
            }
            Pattern::Spike { signal, width, amplitude } => self
                .spike_tuples(signal, a, b)
                .iter()
                .any(|u| meets(width, self.span(u)) && meets(amplitude, self.amplitude(signal, u))),
            Pattern::Oscillation { signal, p2p_amp, period } => self.oscillation_tuples(signal, a, b).iter().any(|u| {
                let (x, y) = self.p2p(signal, u);
                meets(p2p_amp, x) && meets(p2p_amp, y) && meets(period, self.span(u))
            }),
            Pattern::IfThen(p1, within, p2) => {
                for t1 in a..=b {
                    for t2 in t1 + 1..b {
                        if self.on(p1, t1, t2) && !self.answered(p2, within, t2, b) {
                            return false;
                        }
                    }
                }
                true
            }
        }
    }

    fn timing_ok(&self, within: &Option<Within>, t3: usize, t2: usize) -> bool {
        match within {
            Some(w) => sat(w.bowtie.as_cmp(), self.times[t3] - self.times[t2], w.d),
            None => true,
        }
    }

    /// Some `p2` occurrence `[t3, t4]` with `t2 <= t3 < t4 <= b` meets the timing.
    fn answered(&self, p2: &Pattern, within: &Option<Within>, t2: usize, b: usize) -> bool {
        (t2..=b).any(|t3| self.timing_ok(within, t3, t2) && (t3 + 1..=b).any(|t4| self.on(p2, t3, t4)))
    }

    /// mon: every pair of samples in `[a, t]` strictly increases.
    fn mon(x: &impl Fn(usize) -> f64, a: usize, t: usize) -> bool {
        (a..=t).all(|p| (p + 1..=t).all(|q| x(p) < x(q)))
    }

    fn rises(&self, e: &SignalExpr, sign: f64, monotonic: bool, target: f64, a: usize, b: usize) -> bool {
        let x = |k: usize| sign * self.val(e, k);
        let v = sign * target;
        (a + 1..=b).any(|t| x(t) >= v && (a..t).all(|t1| x(t1) < v) && (!monotonic || Self::mon(&x, a, t)))
    }

    #[allow(clippy::too_many_arguments)]
    fn overshoots(
        &self,
        e: &SignalExpr,
        sign: f64,
        monotonic: bool,
        target: f64,
        margin: f64,
        a: usize,
        b: usize,
    ) -> bool {
        let x = |k: usize| sign * self.val(e, k);
        let v1 = sign * target;
        (a + 1..=b).any(|t| {
            x(t) >= v1
                && (a..t).all(|t1| x(t1) < v1)
                && (t..=b).all(|t2| x(t2) <= v1 + margin)
                && (!monotonic || Self::mon(&x, a, t))
        })
    }

    // ---- shapes ----

    /// The value at `t` is the maximum of `[p, q]`, non-decreasing before and non-increasing after.
    fn maxf(x: &impl Fn(usize) -> f64, t: usize, p: usize, q: usize) -> bool {
        (p..=q).all(|k| x(k) <= x(t))
            && (p..=t).all(|i| (i + 1..=t).all(|j| x(i) <= x(j)))
            && (t..=q).all(|i| (i + 1..=q).all(|j| x(i) >= x(j)))
    }

    /// Strict version of [`Self::maxf`].
    fn lmaxf(x: &impl Fn(usize) -> f64, t: usize, p: usize, q: usize) -> bool {
        (p..=q).all(|k| k == t || x(k) < x(t))
            && (p..=t).all(|i| (i + 1..=t).all(|j| x(i) < x(j)))
            && (t..=q).all(|i| (i + 1..=q).all(|j| x(i) > x(j)))
    }

    /// Every spike tuple inside `a..=b`, both polarities.
    pub fn spike_tuples(&self, e: &SignalExpr, a: usize, b: usize) -> Vec<Tuple> {
        let mut out = Vec::new();
        for peak in [true, false] {
            // minima of s are maxima of -s
            let neg = |k: usize| if peak { -self.val(e, k) } else { self.val(e, k) };
            let pos = |k: usize| -neg(k);
            for t1 in a..=b {
                for t2 in t1..=b {
                    if t1 == t2 && t2 != a {
                        continue;
                    }
                    for t3 in t2 + 1..=b {
                        if !Self::maxf(&neg, t2, t1, t3) {
                            continue;
                        }
                        for t4 in t3 + 1..=b {
                            if !Self::lmaxf(&pos, t3, t2, t4) {
                                continue;
                            }
                            for t5 in t4..=b {
                                if t4 == t5 && t4 != b {
                                    continue;
                                }
                                if Self::maxf(&neg, t4, t3, t5) {
                                    out.push(Tuple { peak, t: [t1, t2, t3, t4, t5] });
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// Every oscillation tuple inside `a..=b`, both polarities.
    pub fn oscillation_tuples(&self, e: &SignalExpr, a: usize, b: usize) -> Vec<Tuple> {
        let mut out = Vec::new();
        for peak in [true, false] {
            let neg = |k: usize| if peak { -self.val(e, k) } else { self.val(e, k) };
            let pos = |k: usize| -neg(k);
            for t1 in a..=b {
                for t2 in t1 + 1..=b {
                    for t3 in t2 + 1..=b {
                        if !Self::lmaxf(&neg, t2, t1, t3) {
                            continue;
                        }
                        for t4 in t3 + 1..=b {
                            if !Self::lmaxf(&pos, t3, t2, t4) {
                                continue;
                            }
                            for t5 in t4 + 1..=b {
                                if Self::lmaxf(&neg, t4, t3, t5) {
                                    out.push(Tuple { peak, t: [t1, t2, t3, t4, t5] });
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }

    /// width(t2, t4).
    pub fn span(&self, u: &Tuple) -> f64 {
        (self.times[u.t[3]] - self.times[u.t[1]]).abs()
    }

    /// amp over t2, t3, t4.
    pub fn amplitude(&self, e: &SignalExpr, u: &Tuple) -> f64 {
        let [_, t2, t3, t4, _] = u.t;
        let (x2, x3, x4) = (self.val(e, t2), self.val(e, t3), self.val(e, t4));
        (x3 - x2).abs().max((x3 - x4).abs())
    }

    pub fn p2p(&self, e: &SignalExpr, u: &Tuple) -> (f64, f64) {
        let [_, t2, t3, t4, _] = u.t;
        let (x2, x3, x4) = (self.val(e, t2), self.val(e, t3), self.val(e, t4));
        ((x2 - x3).abs(), (x3 - x4).abs())
    }

    /// ext(s, t, [p, q]) for some `p < t < q` inside `a..=b`.
    fn ext_at(&self, e: &SignalExpr, t: usize, a: usize, b: usize) -> bool {
        let x = |k: usize| self.val(e, k);
        let y = |k: usize| -self.val(e, k);
        (a..t).any(|p| (t + 1..=b).any(|q| Self::lmaxf(&x, t, p, q) || Self::lmaxf(&y, t, p, q)))
    }

    // ---- violation causes ----

    /// Whether the bound cause holds, following the catalog formulas with
    /// the witness-existence conditions the library attaches to them.
    ///
    /// `not:1` is the bare formula (the scope holds); the library further
    /// requires a satisfied occurrence to report.
    pub fn cause_holds(&self, b: &CauseBinding) -> bool {
        let scope = &b.atom.scope;
        let n = self.n();
        let (ti, te) = (self.times[0], self.times[n - 1]);
        match (b.cause.family, scope) {
            (CauseFamily::Not, _) => self.scope(scope),
            (CauseFamily::AAt, &Scope::At(t, _)) => t < ti || te < t,
            (CauseFamily::ABef, &Scope::BeforeT(t, _)) => t <= ti || te < t,
            (CauseFamily::AAft, &Scope::AfterT(t, _)) => t < ti || te <= t,
            (CauseFamily::ABet, &Scope::BetweenT(lo, hi, _)) => lo < ti || te < hi || hi <= lo,
            (CauseFamily::EBef, Scope::BeforeP(p1, p)) => {
                (1..n).any(|t1| (t1 + 1..n).any(|t2| self.on(p1, t1, t2) && !self.occurs_in(p, 0, t1 - 1)))
            }
            (CauseFamily::EAft, Scope::AfterP(p1, p)) => (0..n).any(|t1| {
                (t1 + 1..n.saturating_sub(1)).any(|t2| self.on(p1, t1, t2) && !self.occurs_in(p, t2 + 1, n - 1))
            }),
            (CauseFamily::EBet, Scope::BetweenP(p1, p2, p)) => self.between_violation(p1, p2, p),
            (family, _) if !scope.is_event() && family == CauseFamily::of_pattern(scope.pattern()) => {
                let Some((l, u)) = self.absolute_interval(scope) else { return false };
                let Some((lo, hi)) = self.samples(l, u) else { return false };
                self.pattern_cause(scope.pattern(), b.cause.index, lo, hi)
            }
            _ => false,
        }
    }

    fn pattern_cause(&self, p: &Pattern, index: u8, a: usize, b: usize) -> bool {
        match p {
            Pattern::Assert(c) => (a..=b).any(|t| !self.cond(c, t)),
            Pattern::Becomes(e, op, v) => {
                let good = |t: usize| sat(*op, self.val(e, t), *v);
                match index {
                    1 => (a + 1..=b).all(|t| !good(t)),
                    2 => (a..=b).all(good),
                    _ => (a + 1..b).any(|t| (a..t).all(good) && (t + 1..=b).all(|t2| !good(t2))),
                }
            }
            Pattern::Spike { signal, width, amplitude } => match index {
                1 | 2 => {
                    let k = if index == 1 { amplitude } else { width };
                    if k.is_none() {
                        return false;
                    }
                    let all = self.spike_tuples(signal, a, b);
                    !all.is_empty()
                        && all.iter().all(|u| {
                            let m = if index == 1 { self.amplitude(signal, u) } else { self.span(u) };
                            !meets(k, m)
                        })
                }
                3 => self.constant(signal, a, b),
                4 => self.pairwise(signal, a, b, |x, y| x >= y),
                _ => self.pairwise(signal, a, b, |x, y| x <= y),
            },
            Pattern::Oscillation { signal, p2p_amp, period } => match index {
                1 | 2 => {
                    let k = if index == 1 { p2p_amp } else { period };
                    if k.is_none() {
                        return false;
                    }
                    let all = self.oscillation_tuples(signal, a, b);
                    !all.is_empty()
                        && all.iter().all(|u| {
                            if index == 1 {
                                let (x, y) = self.p2p(signal, u);
                                !meets(k, x) && !meets(k, y)
                            } else {
                                !meets(k, self.span(u))
                            }
                        })
                }
                3 | 4 => {
                    let count = (a..=b).filter(|&t| self.ext_at(signal, t, a, b)).count();
                    count == usize::from(index - 2)
                }
                5 => self.constant(signal, a, b),
                6 => self.pairwise(signal, a, b, |x, y| x >= y),
                _ => self.pairwise(signal, a, b, |x, y| x <= y),
            },
            Pattern::Rises { signal, monotonic, target } => {
                self.rises_cause(signal, 1.0, *monotonic, *target, index, a, b)
            }
            Pattern::Falls { signal, monotonic, target } => {
                self.rises_cause(signal, -1.0, *monotonic, *target, index, a, b)
            }
            Pattern::Overshoots { signal, monotonic, target, margin } => {
                self.overshoots_cause(signal, 1.0, *monotonic, *target, *margin, index, a, b)
            }
            Pattern::Undershoots { signal, monotonic, target, margin } => {
                self.overshoots_cause(signal, -1.0, *monotonic, *target, *margin, index, a, b)
            }
            Pattern::IfThen(p1, within, p2) => {
                if index == 2 && within.is_none() {
                    return false;
                }
                (a..b).any(|t1| {
                    (t1 + 1..b).any(|t2| {
                        if !self.on(p1, t1, t2) {
                            return false;
                        }
                        let any_p2 = self.answered(p2, &None, t2, b);
                        if index == 1 {
                            !any_p2
                        } else {
                            any_p2 && !self.answered(p2, within, t2, b)
                        }
                    })
                })
            }
        }
    }

    fn constant(&self, e: &SignalExpr, a: usize, b: usize) -> bool {
        (a..=b).all(|t| self.val(e, t) == self.val(e, a))
    }

    fn pairwise(&self, e: &SignalExpr, a: usize, b: usize, rel: impl Fn(f64, f64) -> bool) -> bool {
        (a..b).all(|t1| (t1 + 1..=b).all(|t2| rel(self.val(e, t1), self.val(e, t2))))
    }

    #[allow(clippy::too_many_arguments)]
    fn rises_cause(
        &self,
        e: &SignalExpr,
        sign: f64,
        monotonic: bool,
        target: f64,
        index: u8,
        a: usize,
        b: usize,
    ) -> bool {
        let x = |k: usize| sign * self.val(e, k);
        let v = sign * target;
        match index {
            1 => (a..=b).all(|t| x(t) < v),
            2 => (a..=b).all(|t| x(t) >= v),
            3 => monotonic && (a + 1..=b).any(|t| x(t) >= v && (a..t).all(|t1| x(t1) < v) && !Self::mon(&x, a, t)),
            _ => (a + 1..b).any(|t| (a..t).all(|t1| x(t1) >= v) && (t..=b).all(|t2| x(t2) < v)),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn overshoots_cause(
        &self,
        e: &SignalExpr,
        sign: f64,
        monotonic: bool,
        target: f64,
        margin: f64,
        index: u8,
        a: usize,
        b: usize,
    ) -> bool {
        let x = |k: usize| sign * self.val(e, k);
        let v1 = sign * target;
        let top = v1 + margin;
        match index {
            1 => (a..=b).all(|t| x(t) < v1),
            2 => (a..=b).any(|t| x(t) > top && (t + 1..=b).all(|t1| x(t1) > top)),
            3 => {
                monotonic
                    && (a + 1..=b).any(|t| {
                        x(t) >= v1
                            && (a..t).all(|t2| x(t2) < v1)
                            && (t..=b).all(|t1| x(t1) <= top)
                            && !Self::mon(&x, a, t)
                    })
            }
            _ => (a + 1..b).any(|t| (a..=t).all(|t1| v1 <= x(t1) && x(t1) <= top) && (t + 1..=b).all(|t2| x(t2) < v1)),
        }
    }
}
