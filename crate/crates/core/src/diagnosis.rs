//! Diagnosis payloads built from cause witnesses.

use std::collections::BTreeMap;
use std::fmt;
use std::time::Duration;

use crate::causes::{find_witness, CauseBinding, CauseFamily, ViolationCauseId, Witness};
use crate::dsl::{Pattern, Scope, SignalExpr, Span};
use crate::semantics::shapes::Polarity;
use crate::semantics::{Checker, Eval, Expired};
use crate::trace::Trace;

#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    RecordPair((f64, f64), (f64, f64)),
    RecordWithValues(f64, BTreeMap<String, f64>),
    IntervalWithValue([f64; 2], f64),
    Interval([f64; 2]),
    IntervalAndBoundary([f64; 2], f64),
    IntervalAndBoundaries([f64; 2], f64, f64),
    IntervalWithDistance([f64; 2], f64),
    /// A trigger occurrence and the response occurrence answering it.
    IntervalPair([f64; 2], [f64; 2]),
}

impl Payload {
    pub fn kind(&self) -> &'static str {
        match self {
            Payload::RecordPair(..) => "record_pair",
            Payload::RecordWithValues(..) => "record_with_values",
            Payload::IntervalWithValue(..) => "interval_with_value",
            Payload::Interval(..) => "interval",
            Payload::IntervalAndBoundary(..) => "interval_and_boundary",
            Payload::IntervalAndBoundaries(..) => "interval_and_boundaries",
            Payload::IntervalWithDistance(..) => "interval_with_distance",
            Payload::IntervalPair(..) => "interval_pair",
        }
    }

    /// Every timestamp the payload mentions, boundaries included.
    pub fn timestamps(&self) -> Vec<f64> {
        match self {
            Payload::RecordPair(a, b) => vec![a.0, b.0],
            Payload::RecordWithValues(t, _) => vec![*t],
            Payload::IntervalWithValue(i, _)
            | Payload::Interval(i)
            | Payload::IntervalAndBoundary(i, _)
            | Payload::IntervalAndBoundaries(i, _, _)
            | Payload::IntervalWithDistance(i, _) => i.to_vec(),
            Payload::IntervalPair(a, b) => vec![a[0], a[1], b[0], b[1]],
        }
    }
}

fn iv(f: &mut fmt::Formatter<'_>, i: &[f64; 2]) -> fmt::Result {
    write!(f, "[{}, {}]", i[0], i[1])
}

impl fmt::Display for Payload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Payload::RecordPair(a, b) => write!(f, "<({}, {}), ({}, {})>", a.0, a.1, b.0, b.1),
            Payload::RecordWithValues(t, vals) => {
                write!(f, "<{t}")?;
                for (k, v) in vals {
                    write!(f, ", {k}={v}")?;
                }
                write!(f, ">")
            }
            Payload::IntervalWithValue(i, v) | Payload::IntervalWithDistance(i, v) => {
                write!(f, "<")?;
                iv(f, i)?;
                write!(f, ", {v}>")
            }
            Payload::Interval(i) => {
                write!(f, "<")?;
                iv(f, i)?;
                write!(f, ">")
            }
            Payload::IntervalAndBoundary(i, t) => {
                write!(f, "<")?;
                iv(f, i)?;
                write!(f, ", {t}>")
            }
            Payload::IntervalAndBoundaries(i, n, m) => {
                write!(f, "<")?;
                iv(f, i)?;
                write!(f, ", {n}, {m}>")
            }
            Payload::IntervalPair(a, b) => {
                write!(f, "<")?;
                iv(f, a)?;
                write!(f, ", ")?;
                iv(f, b)?;
                write!(f, ">")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosisInstance {
    pub id: String,
    pub cause: ViolationCauseId,
    pub dual: bool,
    /// Which spike/oscillation orientation the witness has.
    pub polarity: Option<Polarity>,
    pub payload: Payload,
}

/// `d_not_<pattern>` for negated atoms, `d_<family>_<index>` otherwise.
pub fn diagnosis_id(binding: &CauseBinding) -> String {
    match binding.cause.family {
        CauseFamily::Not => format!("d_not_{}", binding.atom.scope.pattern().family()),
        family => format!("d_{}_{}", family.name(), binding.cause.index),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub measure: f64,
    pub start: f64,
    pub end: f64,
}

/// Smallest `|measure - target|`, then earliest start, then shortest span.
pub fn tie_break(candidates: &[Candidate], target: f64) -> Option<usize> {
    let key = |c: &Candidate| ((c.measure - target).abs(), c.start, c.end - c.start);
    (0..candidates.len()).min_by(|&a, &b| {
        let (x, y) = (key(&candidates[a]), key(&candidates[b]));
        x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1)).then(x.2.total_cmp(&y.2))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum DiagnosisError {
    #[error("the violation cause does not hold on this trace")]
    CauseDoesNotHold,
}

pub fn build_diagnosis(trace: &Trace, binding: &CauseBinding) -> Result<DiagnosisInstance, DiagnosisError> {
    match diagnosis_for(&Checker::new(trace), binding) {
        Ok(Some(d)) => Ok(d),
        Ok(None) => Err(DiagnosisError::CauseDoesNotHold),
        Err(Expired) => unreachable!("no deadline was set"),
    }
}

/// The diagnosis of `binding`, or `None` when its cause does not hold.
pub fn diagnosis_for(c: &Checker, binding: &CauseBinding) -> Eval<Option<DiagnosisInstance>> {
    Ok(find_witness(c, binding)?.map(|w| to_instance(c, binding, w)))
}

fn pattern_signal(p: &Pattern) -> Option<&SignalExpr> {
    match p {
        Pattern::Becomes(s, ..) => Some(s),
        Pattern::Spike { signal, .. }
        | Pattern::Oscillation { signal, .. }
        | Pattern::Rises { signal, .. }
        | Pattern::Falls { signal, .. }
        | Pattern::Overshoots { signal, .. }
        | Pattern::Undershoots { signal, .. } => Some(signal),
        Pattern::Assert(_) | Pattern::IfThen(..) => None,
    }
}

fn to_instance(c: &Checker, b: &CauseBinding, w: Witness) -> DiagnosisInstance {
    let t = c.times();
    let (ti, te) = (c.trace().start(), c.trace().end());
    let pattern = b.atom.scope.pattern();
    let sig = pattern_signal(pattern).map(|s| c.signal(s));
    let value = |i: usize| sig.as_ref().map_or(f64::NAN, |s| s[i]);
    let record = |i: usize| (t[i], value(i));
    let named = |i: usize| {
        let mut m = BTreeMap::new();
        match pattern {
            Pattern::Assert(cond) => {
                let rec = &c.trace().records()[i];
                for v in cond.variables() {
                    m.insert(v.clone(), rec.get(&v).unwrap_or(f64::NAN));
                }
            }
            _ => {
                if let Some(s) = pattern_signal(pattern) {
                    m.insert(s.to_string(), value(i));
                }
            }
        }
        Payload::RecordWithValues(t[i], m)
    };
    let family = b.cause.family;
    let index = b.cause.index;
    let mut polarity = None;
    let payload = match w {
        Witness::Boundary => match b.atom.scope {
            Scope::BetweenT(n, m, _) => Payload::IntervalAndBoundaries([ti, te], n, m),
            Scope::BeforeT(x, _) | Scope::AfterT(x, _) | Scope::At(x, _) => Payload::IntervalAndBoundary([ti, te], x),
            _ => unreachable!("boundary witness on a non-absolute scope"),
        },
        Witness::Record(i) => named(i),
        Witness::Pair(i, j) if family == CauseFamily::IfThen => {
            Payload::IntervalWithDistance([t[i], t[j]], t[j] - t[i])
        }
        Witness::Pair(i, j) => Payload::RecordPair(record(i), record(j)),
        Witness::Shape(inst) => {
            polarity = Some(inst.polarity);
            let s = sig.as_ref().expect("shape witness on a signal pattern");
            match (family, index) {
                (CauseFamily::Spike, 1) => {
                    Payload::IntervalWithValue([t[inst.idx[1]], t[inst.idx[3]]], inst.amplitude(s))
                }
                (CauseFamily::Spike, 2) => Payload::IntervalWithValue([t[inst.idx[1]], t[inst.idx[3]]], inst.span(t)),
                (CauseFamily::Oscillation, 1) => {
                    let (a, b) = inst.p2p(s);
                    Payload::IntervalWithValue([t[inst.idx[0]], t[inst.idx[4]]], a.max(b))
                }
                (CauseFamily::Oscillation, 2) => {
                    Payload::IntervalWithValue([t[inst.idx[0]], t[inst.idx[4]]], inst.span(t))
                }
                _ => Payload::RecordPair(record(inst.idx[0]), record(inst.idx[4])),
            }
        }
        Witness::Interval(i, j) => match family {
            CauseFamily::Spike | CauseFamily::Oscillation => Payload::IntervalWithValue([t[i], t[j]], value(i)),
            _ => Payload::Interval([t[i], t[j]]),
        },
        Witness::Occurrences((i, j), (k, l)) => Payload::IntervalPair([t[i], t[j]], [t[k], t[l]]),
    };
    DiagnosisInstance { id: diagnosis_id(b), cause: b.cause, dual: b.dual, polarity, payload }
}

/// Outcome for one atom of a property.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomEntry {
    pub index: usize,
    pub text: String,
    pub span: Span,
    /// `None` when the deadline passed before the atom was checked.
    pub verdict: Option<bool>,
    pub diagnosis: Option<DiagnosisInstance>,
    /// False when the deadline cut the atom's check or cause search short.
    pub complete: bool,
}

impl AtomEntry {
    pub fn cause(&self) -> Option<ViolationCauseId> {
        self.diagnosis.as_ref().map(|d| d.cause)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosisReport {
    pub verdict: Option<bool>,
    pub entries: Vec<AtomEntry>,
    pub timeout: bool,
    pub elapsed: Duration,
}

impl DiagnosisReport {
    pub fn diagnoses(&self) -> impl Iterator<Item = (&AtomEntry, &DiagnosisInstance)> {
        self.entries.iter().filter_map(|e| e.diagnosis.as_ref().map(|d| (e, d)))
    }

    pub fn violated(&self) -> impl Iterator<Item = &AtomEntry> {
        self.entries.iter().filter(|e| e.verdict == Some(false))
    }
}
