//! Sampled traces: CSV ingestion, projection and interpolation.
//!
//! A [`Trace`] is an ordered list of [`Record`]s with strictly increasing
//! timestamps. Records coming out of [`parse_csv`] may miss values; after
//! [`prepare`] every retained record carries a value for every used variable.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TraceError {
    #[error("empty file")]
    Empty,
    #[error("line {line}: header must start with a `timestamp` column")]
    BadHeader { line: usize },
    #[error("line {line}: header names no variable columns")]
    NoVariables { line: usize },
    #[error("line {line}: duplicate column `{name}`")]
    DuplicateColumn { line: usize, name: String },
    #[error("line {line}: expected {expected} cells, found {found}")]
    RowWidth { line: usize, expected: usize, found: usize },
    #[error("line {line}, column `{column}`: non-numeric cell `{cell}`")]
    NonNumeric { line: usize, column: String, cell: String },
    #[error("line {line}: missing timestamp")]
    MissingTimestamp { line: usize },
    #[error("line {line}: duplicate timestamps ({t})")]
    DuplicateTimestamp { line: usize, t: f64 },
    #[error("line {line}: non-monotone timestamps ({prev} then {t})")]
    NonMonotone { line: usize, prev: f64, t: f64 },
    #[error("csv: {0}")]
    Csv(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{0}` has no defined sample")]
    NoSamples(String),
    #[error("variable `{0}`: linear interpolation needs at least two defined samples")]
    LinearNeedsTwo(String),
    #[error("no record left after projection")]
    NothingLeft,
    #[error("{t} is not a sample timestamp")]
    NotASample { t: f64 },
    #[error("variable `{var}` is missing at t={t}")]
    Missing { var: String, t: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Record {
    pub timestamp: f64,
    /// Missing values are simply absent.
    pub values: BTreeMap<String, f64>,
}

impl Record {
    pub fn new(timestamp: f64) -> Self {
        Record { timestamp, values: BTreeMap::new() }
    }

    pub fn with(mut self, var: &str, value: f64) -> Self {
        self.values.insert(var.to_string(), value);
        self
    }

    pub fn get(&self, var: &str) -> Option<f64> {
        self.values.get(var).copied()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    records: Vec<Record>,
    /// Column order as ingested; also the serialization order.
    variables: Vec<String>,
}

impl Trace {
    /// Builds a trace, enforcing the record invariants.
    pub fn new(variables: Vec<String>, records: Vec<Record>) -> Result<Self, TraceError> {
        if records.is_empty() {
            return Err(TraceError::Empty);
        }
        let mut prev: Option<f64> = None;
        for (i, r) in records.iter().enumerate() {
            let t = r.timestamp;
            if !t.is_finite() {
                return Err(TraceError::NonNumeric { line: i + 2, column: "timestamp".into(), cell: t.to_string() });
            }
            if let Some(p) = prev {
                if t == p {
                    return Err(TraceError::DuplicateTimestamp { line: i + 2, t });
                }
                if t < p {
                    return Err(TraceError::NonMonotone { line: i + 2, prev: p, t });
                }
            }
            for k in r.values.keys() {
                if !variables.iter().any(|v| v == k) {
                    return Err(TraceError::UnknownVariable(k.clone()));
                }
            }
            prev = Some(t);
        }
        Ok(Trace { records, variables })
    }

    /// Single-variable convenience constructor from `(t, value)` samples.
    pub fn from_samples(var: &str, samples: &[(f64, f64)]) -> Result<Self, TraceError> {
        let records = samples.iter().map(|&(t, v)| Record::new(t).with(var, v)).collect();
        Trace::new(vec![var.to_string()], records)
    }

    pub fn records(&self) -> &[Record] {
        &self.records
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn timestamps(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.timestamp).collect()
    }

    /// First timestamp, t_i.
    pub fn start(&self) -> f64 {
        self.records[0].timestamp
    }

    /// Last timestamp, t_e.
    pub fn end(&self) -> f64 {
        self.records[self.records.len() - 1].timestamp
    }

    pub fn recording_interval(&self) -> f64 {
        self.end() - self.start()
    }

    pub fn index_of(&self, t: f64) -> Option<usize> {
        self.records.binary_search_by(|r| r.timestamp.total_cmp(&t)).ok()
    }

    /// Inclusive index range of the samples inside `[lower, upper]`, if any.
    pub fn window(&self, lower: f64, upper: f64) -> Option<(usize, usize)> {
        let lo = self.records.partition_point(|r| r.timestamp < lower);
        let hi = self.records.partition_point(|r| r.timestamp <= upper);
        if lo < hi {
            Some((lo, hi - 1))
        } else {
            None
        }
    }
}

/// The `[t_l, t_u]` window a scope hands to a pattern.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluationInterval {
    pub lower: f64,
    pub upper: f64,
}

impl EvaluationInterval {
    pub fn new(lower: f64, upper: f64) -> Self {
        EvaluationInterval { lower, upper }
    }

    pub fn of_trace(trace: &Trace) -> Self {
        EvaluationInterval::new(trace.start(), trace.end())
    }

    pub fn contains(&self, t: f64) -> bool {
        self.lower <= t && t <= self.upper
    }
}

impl fmt::Display for EvaluationInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lower, self.upper)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum InterpolationKind {
    #[default]
    Linear,
    PreviousValue,
    Nearest,
}

impl FromStr for InterpolationKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "linear" => Ok(InterpolationKind::Linear),
            "previous-value" | "previous" => Ok(InterpolationKind::PreviousValue),
            "nearest" => Ok(InterpolationKind::Nearest),
            other => Err(format!("unknown interpolation `{other}` (expected linear, previous-value or nearest)")),
        }
    }
}

impl fmt::Display for InterpolationKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InterpolationKind::Linear => "linear",
            InterpolationKind::PreviousValue => "previous-value",
            InterpolationKind::Nearest => "nearest",
        })
    }
}

/// Default kind plus optional per-variable overrides.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct InterpolationPolicy {
    pub kind: InterpolationKind,
    pub overrides: BTreeMap<String, InterpolationKind>,
}

impl InterpolationPolicy {
    pub fn new(kind: InterpolationKind) -> Self {
        InterpolationPolicy { kind, overrides: BTreeMap::new() }
    }

    pub fn with_override(mut self, var: &str, kind: InterpolationKind) -> Self {
        self.overrides.insert(var.to_string(), kind);
        self
    }

    pub fn kind_for(&self, var: &str) -> InterpolationKind {
        self.overrides.get(var).copied().unwrap_or(self.kind)
    }
}

/// Parses a CSV trace. The first column must be `timestamp`.
pub fn parse_csv(text: &str) -> Result<Trace, TraceError> {
    if text.trim().is_empty() {
        return Err(TraceError::Empty);
    }
    let mut reader =
        csv::ReaderBuilder::new().has_headers(false).flexible(true).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut rows = reader.records();
    let header = match rows.next() {
        Some(h) => h.map_err(|e| TraceError::Csv(e.to_string()))?,
        None => return Err(TraceError::Empty),
    };
    let header_line = header.position().map_or(1, |p| p.line() as usize);
    let mut cols = header.iter();
    match cols.next() {
        Some(first) if first.trim_start_matches('\u{feff}') == "timestamp" => {}
        _ => return Err(TraceError::BadHeader { line: header_line }),
    }
    let variables: Vec<String> = cols.map(str::to_string).collect();
    if variables.is_empty() {
        return Err(TraceError::NoVariables { line: header_line });
    }
    let mut seen = BTreeSet::new();
    for v in &variables {
        if !seen.insert(v.as_str()) || v == "timestamp" || v.is_empty() {
            return Err(TraceError::DuplicateColumn { line: header_line, name: v.clone() });
        }
    }

    let mut records = Vec::new();
    let mut prev: Option<f64> = None;
    for row in rows {
        let row = row.map_err(|e| TraceError::Csv(e.to_string()))?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        if row.len() == 1 && row.get(0) == Some("") {
            continue;
        }
        if row.len() != variables.len() + 1 {
            return Err(TraceError::RowWidth { line, expected: variables.len() + 1, found: row.len() });
        }
        let ts_cell = &row[0];
        if ts_cell.is_empty() {
            return Err(TraceError::MissingTimestamp { line });
        }
        let t = parse_number(ts_cell).ok_or_else(|| TraceError::NonNumeric {
            line,
            column: "timestamp".into(),
            cell: ts_cell.to_string(),
        })?;
        if let Some(p) = prev {
            if t == p {
                return Err(TraceError::DuplicateTimestamp { line, t });
            }
            if t < p {
                return Err(TraceError::NonMonotone { line, prev: p, t });
            }
        }
        prev = Some(t);
        let mut rec = Record::new(t);
        for (var, cell) in variables.iter().zip(row.iter().skip(1)) {
            if cell.is_empty() {
                continue;
            }
            let v = parse_number(cell).ok_or_else(|| TraceError::NonNumeric {
                line,
                column: var.clone(),
                cell: cell.to_string(),
            })?;
            rec.values.insert(var.clone(), v);
        }
        records.push(rec);
    }
    if records.is_empty() {
        return Err(TraceError::Empty);
    }
    Ok(Trace { records, variables })
}

// Rust's float parser also accepts "inf" and "NaN"; traces must be finite.
fn parse_number(cell: &str) -> Option<f64> {
    let v: f64 = cell.parse().ok()?;
    v.is_finite().then_some(v)
}

/// Writes a trace as CSV. `{}` formatting of `f64` is the shortest
/// representation that parses back to the same bits.
pub fn serialize_csv(trace: &Trace) -> String {
    let mut out = String::from("timestamp");
    for v in &trace.variables {
        out.push(',');
        out.push_str(&csv_field(v));
    }
    out.push('\n');
    for r in &trace.records {
        out.push_str(&r.timestamp.to_string());
        for v in &trace.variables {
            out.push(',');
            if let Some(x) = r.values.get(v) {
                out.push_str(&x.to_string());
            }
        }
        out.push('\n');
    }
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Projects the trace on `used_vars` and fills the remaining gaps.
pub fn prepare(trace: &Trace, used_vars: &BTreeSet<String>, policy: &InterpolationPolicy) -> Result<Trace, TraceError> {
    for v in used_vars {
        if !trace.variables.contains(v) {
            return Err(TraceError::UnknownVariable(v.clone()));
        }
    }
    let mut records: Vec<Record> = trace
        .records
        .iter()
        .filter(|r| used_vars.iter().any(|v| r.values.contains_key(v)))
        .map(|r| Record {
            timestamp: r.timestamp,
            values: r.values.iter().filter(|(k, _)| used_vars.contains(*k)).map(|(k, v)| (k.clone(), *v)).collect(),
        })
        .collect();
    if records.is_empty() {
        return match used_vars.iter().next() {
            Some(v) => Err(TraceError::NoSamples(v.clone())),
            None => Err(TraceError::NothingLeft),
        };
    }

    for var in used_vars {
        let defined: Vec<(f64, f64)> =
            records.iter().filter_map(|r| r.values.get(var).map(|&x| (r.timestamp, x))).collect();
        if defined.is_empty() {
            return Err(TraceError::NoSamples(var.clone()));
        }
        let kind = policy.kind_for(var);
        if defined.len() == records.len() {
            continue;
        }
        if kind == InterpolationKind::Linear && defined.len() < 2 {
            return Err(TraceError::LinearNeedsTwo(var.clone()));
        }
        for r in records.iter_mut() {
            if !r.values.contains_key(var) {
                let x = interpolate(&defined, r.timestamp, kind);
                r.values.insert(var.clone(), x);
            }
        }
    }

    let variables = trace.variables.iter().filter(|v| used_vars.contains(*v)).cloned().collect();
    Ok(Trace { records, variables })
}

/// `defined` is sorted by time and non-empty. Outside the defined range every
/// policy holds the nearest defined value.
fn interpolate(defined: &[(f64, f64)], t: f64, kind: InterpolationKind) -> f64 {
    let after = defined.partition_point(|&(dt, _)| dt < t);
    if after == 0 {
        return defined[0].1;
    }
    if after == defined.len() {
        return defined[defined.len() - 1].1;
    }
    let (t0, v0) = defined[after - 1];
    let (t1, v1) = defined[after];
    match kind {
        InterpolationKind::Linear => v0 + (v1 - v0) * (t - t0) / (t1 - t0),
        InterpolationKind::PreviousValue => v0,
        // ties go to the earlier sample
        InterpolationKind::Nearest => {
            if t - t0 <= t1 - t {
                v0
            } else {
                v1
            }
        }
    }
}

/// Value of `var` at sample timestamp `t`.
pub fn signal_value(trace: &Trace, var: &str, t: f64) -> Result<f64, TraceError> {
    if !trace.variables.iter().any(|v| v == var) {
        return Err(TraceError::UnknownVariable(var.to_string()));
    }
    let i = trace.index_of(t).ok_or(TraceError::NotASample { t })?;
    trace.records[i].get(var).ok_or_else(|| TraceError::Missing { var: var.to_string(), t })
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG1: &str = "timestamp,β,ρ
0,2,1
0.2,153.5,52.5
0.9,55,125
1.8,0.5,125.5
3.0,80,25
4.9,203.5,75.5
5.7,20,35
6.0,0.5,200.5
";

    fn vars(names: &[&str]) -> BTreeSet<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn parses_fragment() {
        let tr = parse_csv(FIG1).unwrap();
        assert_eq!(tr.len(), 8);
        assert_eq!(tr.start(), 0.0);
        assert_eq!(tr.end(), 6.0);
        let r3 = &tr.records()[2];
        assert_eq!(r3.timestamp, 0.9);
        assert_eq!(r3.get("β"), Some(55.0));
        assert_eq!(r3.get("ρ"), Some(125.0));
        assert_eq!(signal_value(&tr, "β", 4.9).unwrap(), 203.5);
    }

    #[test]
    fn single_row() {
        let tr = parse_csv("timestamp,x\n0.0,1.5\n").unwrap();
        assert_eq!(tr.len(), 1);
        assert_eq!(tr.recording_interval(), 0.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(parse_csv("timestamp,x\n2.0,1\n1.0,2\n"), Err(TraceError::NonMonotone { .. })));
        assert!(matches!(parse_csv("timestamp,x\n1.0,1\n1.0,2\n"), Err(TraceError::DuplicateTimestamp { .. })));
        assert!(matches!(parse_csv("timestamp,x\n1.0,abc\n"), Err(TraceError::NonNumeric { .. })));
        assert!(matches!(parse_csv(""), Err(TraceError::Empty)));
        assert!(matches!(parse_csv("timestamp,x\n"), Err(TraceError::Empty)));
        assert!(matches!(parse_csv("time,x\n0,1\n"), Err(TraceError::BadHeader { .. })));
        assert!(matches!(parse_csv("timestamp,x\n0,nan\n"), Err(TraceError::NonNumeric { .. })));
        assert!(matches!(parse_csv("timestamp,x\n0,1,2\n"), Err(TraceError::RowWidth { .. })));
    }

    #[test]
    fn error_reports_line() {
        let err = parse_csv("timestamp,x\n0,1\n1,2\n0.5,3\n").unwrap_err();
        assert_eq!(err, TraceError::NonMonotone { line: 4, prev: 1.0, t: 0.5 });
        assert!(err.to_string().contains("non-monotone timestamps"));
    }

    #[test]
    fn projection_drops_records_and_columns() {
        let tr = parse_csv("timestamp,β,ρ,γ\n0,1,2,3\n1,,5,6\n2,7,,\n").unwrap();
        let p = prepare(&tr, &vars(&["β"]), &InterpolationPolicy::default()).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.variables(), &["β".to_string()]);
        for r in p.records() {
            assert_eq!(r.values.len(), 1);
        }
    }

    #[test]
    fn fills_gaps() {
        let tr = parse_csv("timestamp,β,ρ\n0,0,1\n1,,1\n2,4,1\n").unwrap();
        let used = vars(&["β", "ρ"]);
        let lin = prepare(&tr, &used, &InterpolationPolicy::new(InterpolationKind::Linear)).unwrap();
        assert_eq!(signal_value(&lin, "β", 1.0).unwrap(), 2.0);
        let prev = prepare(
            &tr,
            &used,
            &InterpolationPolicy::new(InterpolationKind::Linear).with_override("β", InterpolationKind::PreviousValue),
        )
        .unwrap();
        assert_eq!(signal_value(&prev, "β", 1.0).unwrap(), 0.0);
        let near = prepare(&tr, &used, &InterpolationPolicy::new(InterpolationKind::Nearest)).unwrap();
        assert_eq!(signal_value(&near, "β", 1.0).unwrap(), 0.0);
    }

    #[test]
    fn prepare_errors() {
        let tr = parse_csv("timestamp,a,b\n0,1,\n1,2,3\n2,3,\n").unwrap();
        assert!(matches!(
            prepare(&tr, &vars(&["a", "b"]), &InterpolationPolicy::default()),
            Err(TraceError::LinearNeedsTwo(_))
        ));
        assert!(prepare(&tr, &vars(&["a", "b"]), &InterpolationPolicy::new(InterpolationKind::PreviousValue)).is_ok());
        let empty = parse_csv("timestamp,a,b\n0,1,\n1,2,\n").unwrap();
        assert!(matches!(
            prepare(&empty, &vars(&["b"]), &InterpolationPolicy::default()),
            Err(TraceError::NoSamples(_))
        ));
        assert!(matches!(
            prepare(&empty, &vars(&["zz"]), &InterpolationPolicy::default()),
            Err(TraceError::UnknownVariable(_))
        ));
    }

    #[test]
    fn signal_value_errors() {
        let tr = parse_csv(FIG1).unwrap();
        assert!(matches!(signal_value(&tr, "β", 0.5), Err(TraceError::NotASample { .. })));
        assert!(matches!(signal_value(&tr, "zz", 0.0), Err(TraceError::UnknownVariable(_))));
    }

    #[test]
    fn window_bounds() {
        let tr = parse_csv(FIG1).unwrap();
        assert_eq!(tr.window(0.0, 6.0), Some((0, 7)));
        assert_eq!(tr.window(0.5, 1.8), Some((2, 3)));
        assert_eq!(tr.window(1.0, 1.5), None);
        assert_eq!(tr.window(6.5, 7.0), None);
    }

    #[test]
    fn csv_round_trip() {
        let tr = parse_csv(FIG1).unwrap();
        let back = parse_csv(&serialize_csv(&tr)).unwrap();
        assert_eq!(tr, back);
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use proptest::prelude::*;

    fn arb_trace() -> impl Strategy<Value = Trace> {
        (1usize..20, 1usize..4).prop_flat_map(|(n, k)| {
            let cells = proptest::collection::vec(proptest::option::weighted(0.7, -1e6f64..1e6), n * k);
            let steps = proptest::collection::vec(0.001f64..10.0, n);
            (Just(k), steps, cells).prop_map(|(k, steps, cells)| {
                let names: Vec<String> = (0..k).map(|i| format!("v{i}")).collect();
                let mut t = -5.0;
                let records = steps
                    .iter()
                    .enumerate()
                    .map(|(i, dt)| {
                        t += dt;
                        let mut r = Record::new(t);
                        for (j, name) in names.iter().enumerate() {
                            if let Some(x) = cells[i * k + j] {
                                r.values.insert(name.clone(), x);
                            }
                        }
                        r
                    })
                    .collect();
                Trace::new(names, records).unwrap()
            })
        })
    }

    proptest! {
        #[test]
        fn prepare_is_idempotent(tr in arb_trace(), kind in prop_oneof![
            Just(InterpolationKind::Linear),
            Just(InterpolationKind::PreviousValue),
            Just(InterpolationKind::Nearest),
        ]) {
            let used: BTreeSet<String> = tr.variables().iter().take(2).cloned().collect();
            let policy = InterpolationPolicy::new(kind);
            if let Ok(once) = prepare(&tr, &used, &policy) {
                let twice = prepare(&once, &used, &policy).unwrap();
                prop_assert_eq!(&once, &twice);
                for r in once.records() {
                    for v in &used {
                        prop_assert!(r.values.contains_key(v));
                    }
                }
            }
        }

        #[test]
        fn csv_round_trip_is_identity(tr in arb_trace()) {
            let used: BTreeSet<String> = tr.variables().iter().cloned().collect();
            let policy = InterpolationPolicy::new(InterpolationKind::PreviousValue);
            if let Ok(p) = prepare(&tr, &used, &policy) {
                let back = parse_csv(&serialize_csv(&p)).unwrap();
                prop_assert_eq!(p, back);
            }
        }
    }
}
