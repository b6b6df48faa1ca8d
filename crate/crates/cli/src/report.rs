//! JSON documents written by the commands. Field order is declaration
//! order, so output is stable for fixed inputs.

use std::collections::BTreeMap;

use serde::Serialize;

use sigdiag_core::diagnosis::{DiagnosisReport, Payload};

pub const TOOL: &str = "sigdiag";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct ReportDocument {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub trace: String,
    pub property: String,
    pub verdict: Option<bool>,
    pub atoms: Vec<AtomDoc>,
    pub diagnoses: Vec<DiagnosisDoc>,
    /// Wall clock, `None` under `--omit-timing`.
    pub duration_ms: Option<u64>,
    pub timeout: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AtomDoc {
    pub index: usize,
    pub text: String,
    pub span: [usize; 2],
    pub verdict: Option<bool>,
    pub complete: bool,
    pub cause: Option<String>,
    pub dual: Option<bool>,
    pub diagnosis: Option<String>,
    pub payload: Option<PayloadDoc>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiagnosisDoc {
    pub atom: usize,
    pub id: String,
    pub cause: String,
    pub dual: bool,
    pub polarity: Option<&'static str>,
    pub summary: String,
    pub payload: PayloadDoc,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecordDoc {
    pub timestamp: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PayloadDoc {
    RecordPair { first: RecordDoc, second: RecordDoc },
    RecordWithValues { timestamp: f64, values: BTreeMap<String, f64> },
    IntervalWithValue { interval: [f64; 2], value: f64 },
    Interval { interval: [f64; 2] },
    IntervalAndBoundary { interval: [f64; 2], boundary: f64 },
    IntervalAndBoundaries { interval: [f64; 2], boundaries: [f64; 2] },
    IntervalWithDistance { interval: [f64; 2], distance: f64 },
    IntervalPair { trigger: [f64; 2], response: [f64; 2] },
}

impl From<&Payload> for PayloadDoc {
    fn from(p: &Payload) -> Self {
        let rec = |(timestamp, value): (f64, f64)| RecordDoc { timestamp, value };
        match p.clone() {
            Payload::RecordPair(a, b) => PayloadDoc::RecordPair { first: rec(a), second: rec(b) },
            Payload::RecordWithValues(timestamp, values) => PayloadDoc::RecordWithValues { timestamp, values },
            Payload::IntervalWithValue(interval, value) => PayloadDoc::IntervalWithValue { interval, value },
            Payload::Interval(interval) => PayloadDoc::Interval { interval },
            Payload::IntervalAndBoundary(interval, boundary) => PayloadDoc::IntervalAndBoundary { interval, boundary },
            Payload::IntervalAndBoundaries(interval, a, b) => {
                PayloadDoc::IntervalAndBoundaries { interval, boundaries: [a, b] }
            }
            Payload::IntervalWithDistance(interval, distance) => {
                PayloadDoc::IntervalWithDistance { interval, distance }
            }
            Payload::IntervalPair(trigger, response) => PayloadDoc::IntervalPair { trigger, response },
        }
    }
}

impl ReportDocument {
    pub fn new(command: &'static str, trace: &str, property: &str, r: &DiagnosisReport, timing: bool) -> Self {
        let atoms = r
            .entries
            .iter()
            .map(|e| AtomDoc {
                index: e.index,
                text: e.text.clone(),
                span: [e.span.start, e.span.end],
                verdict: e.verdict,
                complete: e.complete,
                cause: e.diagnosis.as_ref().map(|d| d.cause.to_string()),
                dual: e.diagnosis.as_ref().map(|d| d.dual),
                diagnosis: e.diagnosis.as_ref().map(|d| d.id.clone()),
                payload: e.diagnosis.as_ref().map(|d| (&d.payload).into()),
            })
            .collect();
        let diagnoses = r
            .diagnoses()
            .map(|(e, d)| DiagnosisDoc {
                atom: e.index,
                id: d.id.clone(),
                cause: d.cause.to_string(),
                dual: d.dual,
                polarity: d.polarity.map(|p| p.name()),
                summary: d.payload.to_string(),
                payload: (&d.payload).into(),
            })
            .collect();
        ReportDocument {
            tool: TOOL,
            version: VERSION,
            command,
            trace: trace.to_string(),
            property: property.to_string(),
            verdict: r.verdict,
            atoms,
            diagnoses,
            duration_ms: timing.then_some(r.elapsed.as_millis() as u64),
            timeout: r.timeout,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairStatus {
    Satisfied,
    Diagnosed,
    Undiagnosed,
    Timeout,
    Error,
}

impl PairStatus {
    /// The outcome of a diagnose run, as the command's exit code reports it.
    pub fn of(r: &DiagnosisReport) -> Self {
        if r.timeout {
            PairStatus::Timeout
        } else if r.verdict == Some(true) {
            PairStatus::Satisfied
        } else if r.diagnoses().next().is_some() {
            PairStatus::Diagnosed
        } else {
            PairStatus::Undiagnosed
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            PairStatus::Satisfied | PairStatus::Diagnosed => 0,
            PairStatus::Error => 2,
            PairStatus::Undiagnosed => 3,
            PairStatus::Timeout => 4,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PairDoc {
    pub line: usize,
    pub trace: String,
    pub property: String,
    pub status: PairStatus,
    pub exit_code: i32,
    pub error: Option<String>,
    pub report: Option<ReportDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub pairs: usize,
    pub errors: usize,
    pub finished: usize,
    pub timed_out: usize,
    pub violated: usize,
    pub diagnosed: usize,
    /// Finished within the timeout, over pairs that ran.
    pub finished_pct: Option<f64>,
    /// Diagnosed, over finished pairs with a violated property.
    pub diagnosed_pct: Option<f64>,
}

fn pct(n: usize, d: usize) -> Option<f64> {
    (d > 0).then(|| (n as f64 * 10_000.0 / d as f64).round() / 100.0)
}

impl Summary {
    pub fn of(pairs: &[PairDoc]) -> Self {
        let count = |s: PairStatus| pairs.iter().filter(|p| p.status == s).count();
        let errors = count(PairStatus::Error);
        let timed_out = count(PairStatus::Timeout);
        let diagnosed = count(PairStatus::Diagnosed);
        let violated = diagnosed + count(PairStatus::Undiagnosed);
        let finished = pairs.len() - errors - timed_out;
        Summary {
            pairs: pairs.len(),
            errors,
            finished,
            timed_out,
            violated,
            diagnosed,
            finished_pct: pct(finished, pairs.len() - errors),
            diagnosed_pct: pct(diagnosed, violated),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BatchDocument {
    pub tool: &'static str,
    pub version: &'static str,
    pub manifest: String,
    pub pairs: Vec<PairDoc>,
    pub summary: Summary,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn payload_kind_matches_core_name() {
        let payloads = [
            Payload::RecordPair((0.0, 1.0), (2.0, 3.0)),
            Payload::RecordWithValues(4.0, [("b".to_string(), 5.0)].into()),
            Payload::IntervalWithValue([0.0, 6.0], 100.0),
            Payload::Interval([0.0, 1.0]),
            Payload::IntervalAndBoundary([0.0, 6.0], 7.0),
            Payload::IntervalAndBoundaries([0.0, 6.0], 1.0, 2.0),
            Payload::IntervalWithDistance([0.0, 6.0], 0.5),
            Payload::IntervalPair([0.0, 1.0], [2.0, 3.0]),
        ];
        for p in &payloads {
            let v = serde_json::to_value(PayloadDoc::from(p)).unwrap();
            assert_eq!(v["kind"], p.kind());
        }
    }

    #[test]
    fn payload_fields_follow_kind() {
        let doc = PayloadDoc::from(&Payload::IntervalAndBoundary([0.0, 6.0], 7.0));
        assert_eq!(
            serde_json::to_string(&doc).unwrap(),
            r#"{"kind":"interval_and_boundary","interval":[0.0,6.0],"boundary":7.0}"#
        );
    }

    fn pair(status: PairStatus) -> PairDoc {
        PairDoc {
            line: 1,
            trace: String::new(),
            property: String::new(),
            status,
            exit_code: status.exit_code(),
            error: None,
            report: None,
        }
    }

    #[test]
    fn summary_percentages() {
        use PairStatus::*;
        let s = Summary::of(&[pair(Diagnosed), pair(Undiagnosed), pair(Satisfied), pair(Timeout), pair(Error)]);
        assert_eq!((s.pairs, s.errors, s.finished, s.timed_out), (5, 1, 3, 1));
        assert_eq!(s.finished_pct, Some(75.0));
        assert_eq!(s.diagnosed_pct, Some(50.0));
        assert_eq!(Summary::of(&[pair(Satisfied)]).diagnosed_pct, None);
        assert_eq!(Summary::of(&[pair(Diagnosed), pair(Diagnosed), pair(Diagnosed)]).diagnosed_pct, Some(100.0));
    }

    #[test]
    fn exit_codes_are_distinct_per_outcome() {
        use PairStatus::*;
        let codes: Vec<i32> = [Satisfied, Diagnosed, Undiagnosed, Timeout, Error].map(PairStatus::exit_code).into();
        assert_eq!(codes, [0, 0, 3, 4, 2]);
    }
}
