//! Seeded trace generators.
//!
//! Timestamps are `t0 + k * dt` with `dt` a binary fraction, so every
//! boundary and width is exact in floating point. Values are small
//! integers. The single variable is `s`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sigdiag_core::causes::{CauseFamily, ViolationCauseId};
use sigdiag_core::dsl::{parse_property, Atom};
use sigdiag_core::engine::diagnose_atom;
use sigdiag_core::semantics::Checker;
use sigdiag_core::trace::Trace;

pub const VAR: &str = "s";

/// Attempts per cause before [`cause_case`] gives up.
pub const RETRY_BUDGET: u32 = 200;

#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Constant,
    Increasing,
    Decreasing,
    SingleExtremum,
    TwoExtrema,
    /// Triangular spikes on a flat baseline. Ranges are inclusive.
    Spiky {
        n_spikes: usize,
        amp_range: (f64, f64),
        width_range: (f64, f64),
    },
    /// A strict zigzag; the period is the time between two minima.
    Oscillating {
        n_cycles: usize,
        p2p_range: (f64, f64),
        period_range: (f64, f64),
    },
    /// A trace on which the cause is the first one the engine finds for
    /// the property [`cause_case`] pairs it with. The recipe picks its own
    /// length; `n_records` is ignored.
    CauseSeeded(ViolationCauseId),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub shape: Shape,
    pub n_records: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GenError {
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error("no trace for {cause} within {attempts} attempts")]
    RetryBudget { cause: ViolationCauseId, attempts: u32 },
}

/// Sample spacing for shaped traces.
const DT: f64 = 0.125;

impl GeneratorSpec {
    pub fn new(shape: Shape, n_records: usize, seed: u64) -> Self {
        GeneratorSpec { shape, n_records, seed }
    }

    /// Smallest record count the shape can be drawn with.
    pub fn min_records(&self) -> usize {
        match &self.shape {
            Shape::Constant | Shape::Increasing | Shape::Decreasing | Shape::CauseSeeded(_) => 1,
            Shape::SingleExtremum => 3,
            Shape::TwoExtrema => 4,
            Shape::Spiky { n_spikes, width_range, .. } => 1 + n_spikes * (half_steps(width_range.1) * 2),
            Shape::Oscillating { n_cycles, period_range, .. } => 3 + n_cycles * half_steps(period_range.1) * 2,
        }
    }

    pub fn validate(&self) -> Result<(), GenError> {
        let bad = |m: String| Err(GenError::InvalidSpec(m));
        if self.n_records == 0 {
            return bad("n_records must be at least 1".into());
        }
        let range = |name: &str, (a, b): (f64, f64), min: f64| {
            if !(a.is_finite() && b.is_finite() && min <= a && a <= b) {
                Err(GenError::InvalidSpec(format!("{name} range [{a}, {b}] must be non-empty and at least {min}")))
            } else {
                Ok(())
            }
        };
        match &self.shape {
            Shape::Spiky { n_spikes, amp_range, width_range } => {
                if *n_spikes == 0 {
                    return bad("spiky needs at least one spike".into());
                }
                range("amplitude", *amp_range, f64::MIN_POSITIVE)?;
                range("width", *width_range, 2.0 * DT)?;
            }
            Shape::Oscillating { n_cycles, p2p_range, period_range } => {
                if *n_cycles == 0 {
                    return bad("oscillating needs at least one cycle".into());
                }
                range("p2p amplitude", *p2p_range, f64::MIN_POSITIVE)?;
                range("period", *period_range, 2.0 * DT)?;
            }
            _ => {}
        }
        if self.n_records < self.min_records() {
            return bad(format!("{:?} needs at least {} records", self.shape, self.min_records()));
        }
        Ok(())
    }
}

/// Samples on each side of a spike or half-cycle of the given duration.
fn half_steps(duration: f64) -> usize {
    ((duration / (2.0 * DT)).floor() as usize).max(1)
}

fn samples(t0: f64, dt: f64, values: &[f64]) -> Trace {
    let s: Vec<(f64, f64)> = values.iter().enumerate().map(|(k, &v)| (t0 + k as f64 * dt, v)).collect();
    Trace::from_samples(VAR, &s).expect("generated timestamps increase")
}

pub fn generate_trace(spec: &GeneratorSpec) -> Result<Trace, GenError> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let n = spec.n_records;
    let values = match &spec.shape {
        Shape::CauseSeeded(c) => return cause_case(*c, spec.seed).map(|case| case.trace),
        Shape::Constant => vec![rng.gen_range(-10..=10) as f64; n],
        Shape::Increasing => walk(&mut rng, n, 1),
        Shape::Decreasing => walk(&mut rng, n, -1),
        Shape::SingleExtremum => {
            let k = rng.gen_range(1..n - 1);
            let mut v = walk(&mut rng, k + 1, 1);
            let top = v[k];
            v.extend(walk_from(&mut rng, top, n - k, -1).into_iter().skip(1));
            v
        }
        Shape::TwoExtrema => {
            let k1 = rng.gen_range(1..n - 2);
            let k2 = rng.gen_range(k1 + 1..n - 1);
            let mut v = walk(&mut rng, k1 + 1, 1);
            let a = v[k1];
            v.extend(walk_from(&mut rng, a, k2 - k1 + 1, -1).into_iter().skip(1));
            let b = v[k2];
            v.extend(walk_from(&mut rng, b, n - k2, 1).into_iter().skip(1));
            v
        }
        Shape::Spiky { n_spikes, amp_range, width_range } => {
            let base = rng.gen_range(-5..=5) as f64;
            let mut v = vec![base];
            for _ in 0..*n_spikes {
                let amp = rng.gen_range(amp_range.0..=amp_range.1);
                let w = rng.gen_range(width_range.0..=width_range.1);
                let h = half_steps(w);
                for k in 1..=h {
                    v.push(base + amp * k as f64 / h as f64);
                }
                for k in (0..h).rev() {
                    v.push(base + amp * k as f64 / h as f64);
                }
            }
            v.resize(n, base);
            if rng.gen_bool(0.5) {
                v.iter_mut().for_each(|x| *x = -*x);
            }
            v
        }
        Shape::Oscillating { n_cycles, p2p_range, period_range } => {
            let low = rng.gen_range(-5..=5) as f64;
            let h = half_steps(rng.gen_range(period_range.0..=period_range.1));
            // start above the first minimum so it is strict
            let mut v = vec![low + 1.0];
            for _ in 0..*n_cycles {
                let p2p = rng.gen_range(p2p_range.0..=p2p_range.1);
                for k in 0..h {
                    v.push(low + p2p * k as f64 / h as f64);
                }
                for k in (1..=h).rev() {
                    v.push(low + p2p * k as f64 / h as f64);
                }
            }
            v.push(low);
            v.push(low + 1.0);
            let last = *v.last().unwrap();
            v.resize(n, last);
            v
        }
    };
    Ok(samples(0.0, DT, &values))
}

/// Strictly monotone integer walk of `n` values in direction `dir`.
fn walk(rng: &mut ChaCha8Rng, n: usize, dir: i32) -> Vec<f64> {
    let start = rng.gen_range(-10..=10) as f64;
    walk_from(rng, start, n, dir)
}

fn walk_from(rng: &mut ChaCha8Rng, start: f64, n: usize, dir: i32) -> Vec<f64> {
    let mut v = Vec::with_capacity(n);
    let mut x = start;
    for _ in 0..n {
        v.push(x);
        x += f64::from(dir) * f64::from(rng.gen_range(1..=4));
    }
    v
}

/// A generated trace with the property it violates through one cause.
#[derive(Debug, Clone, PartialEq)]
pub struct Case {
    pub cause: ViolationCauseId,
    pub seed: u64,
    pub trace: Trace,
    /// A single-atom property.
    pub property: String,
    /// Candidates drawn before one passed the internal check.
    pub attempts: u32,
}

impl Case {
    pub fn atom(&self) -> Atom {
        let p = parse_property(&self.property).expect("generated properties parse");
        p.clauses[0].atoms[0].clone()
    }
}

/// A trace and single-atom property on which `cause` is the first cause
/// of the atom's list that holds, so the engine reports it.
///
/// Event-scope causes are drawn by rejection; the others follow a recipe
/// transcribing the cause formula, and retry only if the check rejects.
pub fn cause_case(cause: ViolationCauseId, seed: u64) -> Result<Case, GenError> {
    for attempt in 0..RETRY_BUDGET {
        let mut rng =
            ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(u64::from(attempt)));
        let (values, t0, dt, property) = candidate(cause, &mut rng);
        let trace = samples(t0, dt, &values);
        if selected(&trace, &property) == Some(cause) {
            return Ok(Case { cause, seed, trace, property, attempts: attempt + 1 });
        }
    }
    Err(GenError::RetryBudget { cause, attempts: RETRY_BUDGET })
}

fn selected(trace: &Trace, property: &str) -> Option<ViolationCauseId> {
    let p = parse_property(property).ok()?;
    let atom = &p.clauses[0].atoms[0];
    let checker = Checker::new(trace);
    if checker.atom(atom).ok()? {
        return None;
    }
    diagnose_atom(&checker, atom).ok()?.map(|(b, _)| b.cause)
}

fn num(x: f64) -> String {
    format!("{x}")
}

struct Draw<'r> {
    rng: &'r mut ChaCha8Rng,
}

impl Draw<'_> {
    fn int(&mut self, lo: i32, hi: i32) -> f64 {
        f64::from(self.rng.gen_range(lo..=hi))
    }

    fn len(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.gen_range(lo..=hi)
    }

    fn coin(&mut self) -> bool {
        self.rng.gen_bool(0.5)
    }

    /// `n` values in `[lo, hi]`.
    fn values(&mut self, n: usize, lo: i32, hi: i32) -> Vec<f64> {
        (0..n).map(|_| self.int(lo, hi)).collect()
    }

    /// Non-increasing, not constant.
    fn sagging(&mut self, n: usize) -> Vec<f64> {
        let mut x = self.int(0, 10);
        let drop = self.len(1, n - 1);
        (0..n)
            .map(|k| {
                if k == drop {
                    x -= self.int(1, 3);
                } else if k > 0 && self.coin() {
                    x -= self.int(0, 2);
                }
                x
            })
            .collect()
    }

    /// Strictly monotone from `start`.
    fn ramp(&mut self, start: f64, n: usize, dir: f64) -> Vec<f64> {
        let mut x = start;
        (0..n)
            .map(|_| {
                let out = x;
                x += dir * self.int(1, 3);
                out
            })
            .collect()
    }
}

/// How the pattern window sits in the trace.
enum Placement {
    Globally,
    Between,
    After,
    Before,
}

/// Pads `inner` with noise outside the pattern window and returns the
/// values with the scope text.
fn embed(d: &mut Draw, inner: Vec<f64>, dt: f64, t0: f64) -> (Vec<f64>, String) {
    let m = inner.len();
    let placement = if m < 2 {
        Placement::Globally
    } else {
        [Placement::Globally, Placement::Between, Placement::After, Placement::Before]
            .into_iter()
            .nth(d.len(0, 3))
            .unwrap()
    };
    let (pre, post) = match placement {
        Placement::Globally => (0, 0),
        Placement::Between => (d.len(0, 3), d.len(0, 3)),
        Placement::After => (d.len(1, 3), 0),
        Placement::Before => (0, d.len(1, 3)),
    };
    let mut v = d.values(pre, -10, 10);
    v.extend(inner);
    v.extend(d.values(post, -10, 10));
    let at = |k: usize| num(t0 + k as f64 * dt);
    let scope = match placement {
        Placement::Globally => "globally".to_string(),
        Placement::Between => format!("between {} and {}", at(pre), at(pre + m - 1)),
        Placement::After => format!("after {}", at(pre)),
        Placement::Before => format!("before {}", at(m - 1)),
    };
    (v, scope)
}

type Candidate = (Vec<f64>, f64, f64, String);

fn candidate(cause: ViolationCauseId, rng: &mut ChaCha8Rng) -> Candidate {
    let dt = *[0.25, 0.5, 1.0].choose(rng).unwrap();
    let t0 = f64::from(rng.gen_range(0..4)) * dt;
    let mut d = Draw { rng };
    let idx = cause.index;
    match cause.family {
        CauseFamily::EBef | CauseFamily::EAft | CauseFamily::EBet => {
            let (values, property) = event_candidate(&mut d, cause.family);
            (values, t0, dt, property)
        }
        CauseFamily::Not => {
            let (inner, pattern) = satisfied(&mut d);
            let (values, scope) = embed(&mut d, inner, dt, t0);
            (values, t0, dt, format!("not {scope} {pattern}"))
        }
        CauseFamily::AAt | CauseFamily::ABef | CauseFamily::AAft | CauseFamily::ABet => {
            let n = d.len(2, 8);
            let values = d.values(n, -5, 5);
            let (ti, te) = (t0, t0 + (n - 1) as f64 * dt);
            let outside = |d: &mut Draw, before_ok: bool| {
                if before_ok && d.coin() {
                    ti - d.int(1, 4) * dt
                } else {
                    te + d.int(1, 4) * dt
                }
            };
            let scope = match cause.family {
                CauseFamily::AAt => format!("at {}", num(outside(&mut d, true))),
                CauseFamily::ABef => {
                    let t = if d.coin() { ti } else { outside(&mut d, true) };
                    format!("before {}", num(t))
                }
                CauseFamily::AAft => {
                    let t = if d.coin() { te } else { outside(&mut d, true) };
                    format!("after {}", num(t))
                }
                _ => {
                    let (n1, m1) = match d.len(0, 2) {
                        0 => (ti - d.int(1, 3) * dt, te),
                        1 => (ti, te + d.int(1, 3) * dt),
                        _ => {
                            let a = ti + d.int(0, (n - 1) as i32) * dt;
                            (a, a - d.int(0, 2) * dt)
                        }
                    };
                    format!("between {} and {}", num(n1), num(m1))
                }
            };
            (values, t0, dt, format!("{scope} assert {VAR} < {}", num(d.int(-5, 5))))
        }
        _ => {
            let (inner, pattern) = pattern_candidate(&mut d, cause.family, idx, dt);
            let (values, scope) = embed(&mut d, inner, dt, t0);
            (values, t0, dt, format!("{scope} {pattern}"))
        }
    }
}

/// A window and a pattern that holds on it, with a reportable occurrence.
fn satisfied(d: &mut Draw) -> (Vec<f64>, String) {
    let m = d.len(2, 8);
    match d.len(0, 2) {
        0 => {
            let v = d.values(m, -5, 5);
            let c = v.iter().cloned().fold(f64::MIN, f64::max) + d.int(1, 3);
            (v, format!("assert {VAR} < {}", num(c)))
        }
        1 => {
            let c = d.int(-3, 3);
            let k = d.len(1, m - 1);
            let mut v: Vec<f64> = (0..k).map(|_| c - d.int(1, 4)).collect();
            v.extend((k..m).map(|_| d.int(-5, 5)));
            v[k] = c + d.int(1, 3);
            (v, format!("{VAR} becomes > {}", num(c)))
        }
        _ => {
            let start = d.int(-5, 0);
            let v = d.ramp(start, m, 1.0);
            let target = v[m - 1];
            (v, format!("{VAR} rises monotonically reaching {}", num(target)))
        }
    }
}

fn event_candidate(d: &mut Draw, family: CauseFamily) -> (Vec<f64>, String) {
    let n = d.len(4, 8);
    let v = d.values(n, 0, 9);
    let pat = |d: &mut Draw| -> String {
        let c = num(d.int(1, 8));
        match d.len(0, 4) {
            0 => format!("assert {VAR} > {c}"),
            1 => format!("assert {VAR} < {c}"),
            2 => format!("{VAR} becomes > {c}"),
            3 => format!("{VAR} becomes < {c}"),
            _ => format!("{VAR} rises reaching {c}"),
        }
    };
    let p1 = pat(d);
    let p = pat(d);
    let text = match family {
        CauseFamily::EBef => format!("before {p1} {p}"),
        CauseFamily::EAft => format!("after {p1} {p}"),
        _ => {
            let p2 = pat(d);
            format!("between {p1} and {p2} {p}")
        }
    };
    (v, text)
}

fn neg(v: &mut [f64]) {
    v.iter_mut().for_each(|x| *x = -*x);
}

fn max(v: &[f64]) -> f64 {
    v.iter().cloned().fold(f64::MIN, f64::max)
}

fn min(v: &[f64]) -> f64 {
    v.iter().cloned().fold(f64::MAX, f64::min)
}

/// Strict zigzag through `turns` alternating extremes, two samples per leg.
fn zigzag(d: &mut Draw, turns: usize) -> Vec<f64> {
    let mut ext = vec![d.int(-2, 2)];
    for k in 1..turns {
        let up = k % 2 == 1;
        let step = d.int(2, 6);
        ext.push(if up { ext[k - 1] + step } else { ext[k - 1] - step });
    }
    let mut v = vec![ext[0]];
    for k in 1..turns {
        let (a, b) = (ext[k - 1], ext[k]);
        if d.coin() {
            v.push((a + b) / 2.0);
        }
        v.push(b);
    }
    v
}

fn spike_train(d: &mut Draw) -> Vec<f64> {
    let base = d.int(-3, 3);
    let mut v = vec![base; d.len(1, 2)];
    for _ in 0..d.len(1, 2) {
        let up = d.len(1, 2);
        let down = d.len(1, 2);
        let peak = base + d.int(2, 8);
        v.extend(d.ramp(base + 1.0, up - 1, 1.0).into_iter().map(|x| x.min(peak - 1.0)));
        v.push(peak);
        for k in 1..down {
            v.push(peak - (peak - base) * k as f64 / down as f64);
        }
        v.push(base);
        v.extend(vec![base; d.len(0, 1)]);
    }
    v
}

fn pattern_candidate(d: &mut Draw, family: CauseFamily, idx: u8, dt: f64) -> (Vec<f64>, String) {
    match family {
        CauseFamily::Assert => {
            let v = {
                let n = d.len(1, 8);
                d.values(n, -5, 5)
            };
            let c = v[d.len(0, v.len() - 1)] - d.int(0, 1);
            let cond = if d.coin() {
                format!("{VAR} < {}", num(c))
            } else {
                format!("{VAR} > {} and {VAR} < {}", num(min(&v) - 1.0), num(c))
            };
            (v, format!("assert {cond}"))
        }
        CauseFamily::Becomes => {
            let c = d.int(-3, 3);
            let m = d.len(3, 8);
            let below = |d: &mut Draw| c - d.int(0, 4);
            let above = |d: &mut Draw| c + d.int(1, 4);
            // values for `> c`: `above` satisfies, `below` violates
            let mut v: Vec<f64> = match idx {
                1 => {
                    let mut v: Vec<f64> = (0..m).map(|_| below(d)).collect();
                    if d.coin() {
                        v[0] = above(d);
                    }
                    v
                }
                2 => (0..m).map(|_| above(d)).collect(),
                _ => {
                    let g = d.len(2, m - 1);
                    (0..m).map(|k| if k < g { above(d) } else { below(d) }).collect()
                }
            };
            if d.coin() {
                neg(&mut v);
                (v, format!("{VAR} becomes < {}", num(-c)))
            } else {
                (v, format!("{VAR} becomes > {}", num(c)))
            }
        }
        CauseFamily::Spike => {
            let mut v = match idx {
                1 | 2 => spike_train(d),
                3 => vec![d.int(-5, 5); d.len(1, 8)],
                4 => {
                    let n = d.len(2, 8);
                    d.sagging(n)
                }
                _ => {
                    let mut v = {
                        let n = d.len(2, 8);
                        d.sagging(n)
                    };
                    v.reverse();
                    v
                }
            };
            let (lo, hi) = (min(&v), max(&v));
            let dur = (v.len() - 1) as f64 * dt;
            let amp_bad = || [format!("amplitude > {}", num(hi - lo)), "amplitude <= 0".into(), "amplitude = 0".into()];
            let width_bad = || {
                [
                    format!("width > {}", num(dur)),
                    format!("width < {}", num(2.0 * dt)),
                    format!("width = {}", num(dt / 2.0)),
                ]
            };
            let clause = match idx {
                1 => {
                    let mut c = vec![amp_bad()[d.len(0, 2)].clone()];
                    if d.coin() {
                        c.push(width_bad()[d.len(0, 2)].clone());
                    }
                    format!(" with {}", c.join(" "))
                }
                2 => format!(" with {}", width_bad()[d.len(0, 2)]),
                _ if d.coin() => format!(" with {}", amp_bad()[0]),
                _ => String::new(),
            };
            if idx <= 3 && d.coin() {
                neg(&mut v);
            }
            (v, format!("exists spike in {VAR}{clause}"))
        }
        CauseFamily::Oscillation => {
            let mut v = match idx {
                1 | 2 => {
                    let turns = d.len(5, 6);
                    zigzag(d, turns)
                }
                3 => zigzag(d, 3),
                4 => zigzag(d, 4),
                5 => vec![d.int(-5, 5); d.len(1, 8)],
                6 => {
                    let n = d.len(2, 8);
                    d.sagging(n)
                }
                _ => {
                    let mut v = {
                        let n = d.len(2, 8);
                        d.sagging(n)
                    };
                    v.reverse();
                    v
                }
            };
            let (lo, hi) = (min(&v), max(&v));
            let dur = (v.len() - 1) as f64 * dt;
            let clause = match idx {
                1 => [format!("p2pAmp > {}", num(hi - lo)), "p2pAmp <= 0".into()][d.len(0, 1)].clone(),
                2 => [format!("period > {}", num(dur)), format!("period < {}", num(2.0 * dt))][d.len(0, 1)].clone(),
                _ if d.coin() => format!("period > {}", num(dur)),
                _ => String::new(),
            };
            if idx <= 5 && d.coin() {
                neg(&mut v);
            }
            let with = if clause.is_empty() { clause } else { format!(" with {clause}") };
            (v, format!("exists oscillation in {VAR}{with}"))
        }
        CauseFamily::Rises => {
            let v0 = d.int(-2, 2);
            let m = d.len(3, 8);
            let mut mono = d.coin();
            let mut v: Vec<f64> = match idx {
                1 => (0..m).map(|_| v0 - d.int(1, 5)).collect(),
                2 => (0..m).map(|_| v0 + d.int(0, 4)).collect(),
                3 => {
                    mono = true;
                    let f = d.len(2, m - 1);
                    let mut v: Vec<f64> = (0..f).map(|_| v0 - d.int(1, 5)).collect();
                    // one non-increasing step before the crossing
                    let k = d.len(0, f - 2);
                    v[k + 1] = v[k] - d.int(0, 2);
                    v.push(v0 + d.int(0, 3));
                    v.extend((f + 1..m).map(|_| d.int(-5, 5)));
                    v
                }
                _ => {
                    let t = d.len(1, m - 2);
                    (0..m).map(|k| if k < t { v0 + d.int(0, 4) } else { v0 - d.int(1, 4) }).collect()
                }
            };
            let m_kw = if mono { " monotonically" } else { "" };
            if d.coin() {
                neg(&mut v);
                (v, format!("{VAR} falls{m_kw} reaching {}", num(-v0)))
            } else {
                (v, format!("{VAR} rises{m_kw} reaching {}", num(v0)))
            }
        }
        CauseFamily::Overshoots => {
            let v1 = d.int(-2, 2);
            let margin = d.int(1, 4);
            let top = v1 + margin;
            let m = d.len(3, 8);
            let mut mono = d.coin();
            let band = |d: &mut Draw| v1 + d.int(0, margin as i32);
            let mut v: Vec<f64> = match idx {
                1 => (0..m).map(|_| v1 - d.int(1, 5)).collect(),
                2 => {
                    let mut v = d.values(m, (v1 - 4.0) as i32, (top + 4.0) as i32);
                    v[m - 1] = top + d.int(1, 3);
                    v
                }
                3 => {
                    mono = true;
                    let f = d.len(2, m - 1);
                    let mut v: Vec<f64> = (0..f).map(|_| v1 - d.int(1, 5)).collect();
                    let k = d.len(0, f - 2);
                    v[k + 1] = v[k] - d.int(0, 2);
                    v.push(band(d));
                    v.extend((f + 1..m).map(|_| top - d.int(0, 6)));
                    v
                }
                _ => {
                    let t = d.len(2, m - 1);
                    (0..m).map(|k| if k < t { band(d) } else { v1 - d.int(1, 4) }).collect()
                }
            };
            let m_kw = if mono { " monotonically" } else { "" };
            if d.coin() {
                neg(&mut v);
                (v, format!("{VAR} undershoots{m_kw} {} by {}", num(-v1), num(margin)))
            } else {
                (v, format!("{VAR} overshoots{m_kw} {} by {}", num(v1), num(margin)))
            }
        }
        _ => {
            // if s > hi then s < lo: triggers are runs above hi, answers runs below lo
            let (lo, hi) = (0.0, 5.0);
            let m = d.len(4, 8);
            let mut v: Vec<f64> = vec![hi + d.int(1, 3), hi + d.int(1, 3)];
            let within = if idx == 1 {
                v.extend((2..m).map(|_| d.int(0, 5)));
                match d.len(0, 2) {
                    0 => String::new(),
                    1 => format!(" within at most {}", num(d.int(1, 3) * dt)),
                    _ => format!(" within at least {}", num(d.int(0, 2) * dt)),
                }
            } else {
                v.extend((2..m - 2).map(|_| d.int(0, 5)));
                v.extend([lo - d.int(1, 3), lo - d.int(1, 3)]);
                let gap = (m - 3) as f64 * dt;
                match d.len(0, 2) {
                    0 => format!(" within at most {}", num(gap - dt / 2.0)),
                    1 => format!(" within at least {}", num(gap + dt)),
                    _ => format!(" within exactly {}", num(gap + dt / 2.0)),
                }
            };
            (v, format!("if assert {VAR} > {} then{within} assert {VAR} < {}", num(hi), num(lo)))
        }
    }
}
