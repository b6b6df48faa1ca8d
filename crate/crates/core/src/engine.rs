//! Atom-by-atom checking, cause search and report assembly.

use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use crate::causes::{causes_for, CauseBinding};
use crate::diagnosis::{diagnosis_for, AtomEntry, DiagnosisInstance, DiagnosisReport};
use crate::dsl::{parse_property_spanned, Atom, DslError, PropertyAst, Span};
use crate::semantics::{Checker, Eval};
use crate::trace::{parse_csv, prepare, InterpolationPolicy, Trace, TraceError};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub timeout: Duration,
    pub interpolation: InterpolationPolicy,
    pub epsilon: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { timeout: Duration::from_secs(60), interpolation: InterpolationPolicy::default(), epsilon: 0.0 }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum EngineError {
    #[error("{path}: {message}")]
    Io { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Trace { path: PathBuf, source: TraceError },
    #[error("{path}: {source}")]
    Property { path: PathBuf, source: DslError },
    #[error(transparent)]
    Prepare(#[from] TraceError),
}

/// A parsed property together with its source text.
#[derive(Debug, Clone, PartialEq)]
pub struct Property {
    pub ast: PropertyAst,
    pub source: String,
    pub spans: Vec<Span>,
}

impl Property {
    pub fn parse(source: &str) -> Result<Self, DslError> {
        let (ast, spans) = parse_property_spanned(source)?;
        Ok(Property { ast, source: source.to_string(), spans })
    }

    pub fn atoms(&self) -> Vec<&Atom> {
        self.ast.atoms()
    }

    fn atom_text(&self, i: usize, atom: &Atom) -> (String, Span) {
        match self.spans.get(i) {
            Some(&s) => (self.source[s.start..s.end].to_string(), s),
            None => (atom.to_string(), Span { start: 0, end: 0 }),
        }
    }
}

/// Projects and gap-fills `trace` for the variables `property` reads.
pub fn prepare_for(trace: &Trace, property: &PropertyAst, config: &RunConfig) -> Result<Trace, TraceError> {
    prepare(trace, &property.used_variables(), &config.interpolation)
}

/// Walks the atom's cause list in order and returns the first cause that
/// holds, with its diagnosis.
pub fn diagnose_atom(checker: &Checker, atom: &Atom) -> Eval<Option<(CauseBinding, DiagnosisInstance)>> {
    for binding in causes_for(checker.trace(), atom) {
        checker.tick()?;
        if checker.expired() {
            return Err(crate::semantics::Expired);
        }
        if let Some(d) = diagnosis_for(checker, &binding)? {
            return Ok(Some((binding, d)));
        }
    }
    Ok(None)
}

/// Checks every atom of `property` on the prepared `trace` and diagnoses the
/// violated ones. Atoms not finished before the deadline keep a `None`
/// verdict or no diagnosis, and the report is flagged.
pub fn diagnose(trace: &Trace, property: &Property, config: &RunConfig) -> DiagnosisReport {
    evaluate(trace, property, config, true)
}

/// Verdicts only: like [`diagnose`] without the cause search.
pub fn check(trace: &Trace, property: &Property, config: &RunConfig) -> DiagnosisReport {
    evaluate(trace, property, config, false)
}

fn evaluate(trace: &Trace, property: &Property, config: &RunConfig, search: bool) -> DiagnosisReport {
    let start = Instant::now();
    let checker = Checker::new(trace).with_epsilon(config.epsilon).with_deadline(start.checked_add(config.timeout));
    let mut timeout = false;
    let mut entries = Vec::new();
    for (index, atom) in property.atoms().into_iter().enumerate() {
        let (text, span) = property.atom_text(index, atom);
        let mut entry = AtomEntry { index, text, span, verdict: None, diagnosis: None, complete: false };
        if !timeout && !checker.expired() {
            match checker.atom(atom) {
                Ok(true) => {
                    entry.verdict = Some(true);
                    entry.complete = true;
                }
                Ok(false) if !search => {
                    entry.verdict = Some(false);
                    entry.complete = true;
                }
                Ok(false) => {
                    entry.verdict = Some(false);
                    match diagnose_atom(&checker, atom) {
                        Ok(found) => {
                            entry.diagnosis = found.map(|(_, d)| d);
                            entry.complete = true;
                        }
                        Err(_) => timeout = true,
                    }
                }
                Err(_) => timeout = true,
            }
        } else {
            timeout = true;
        }
        entries.push(entry);
    }
    let verdict = overall_verdict(&property.ast, &entries);
    DiagnosisReport { verdict, entries, timeout, elapsed: start.elapsed() }
}

/// The property verdict from its atom verdicts, when they decide it.
fn overall_verdict(ast: &PropertyAst, entries: &[AtomEntry]) -> Option<bool> {
    let mut k = 0;
    let mut unknown = false;
    for clause in &ast.clauses {
        let mut all = Some(true);
        for _ in &clause.atoms {
            all = match (all, entries[k].verdict) {
                (Some(false), _) | (_, Some(false)) => Some(false),
                (Some(true), Some(true)) => Some(true),
                _ => None,
            };
            k += 1;
        }
        match all {
            Some(true) => return Some(true),
            None => unknown = true,
            Some(false) => {}
        }
    }
    if unknown {
        None
    } else {
        Some(false)
    }
}

fn read(path: &Path) -> Result<String, EngineError> {
    std::fs::read_to_string(path).map_err(|e| EngineError::Io { path: path.to_path_buf(), message: e.to_string() })
}

/// Reads and parses a trace and a property file, and prepares the trace
/// for the property.
pub fn load_pair(
    trace_path: &Path,
    property_path: &Path,
    config: &RunConfig,
) -> Result<(Trace, Property), EngineError> {
    let trace = parse_csv(&read(trace_path)?)
        .map_err(|source| EngineError::Trace { path: trace_path.to_path_buf(), source })?;
    let text = read(property_path)?;
    let property = Property::parse(text.trim_end())
        .map_err(|source| EngineError::Property { path: property_path.to_path_buf(), source })?;
    let prepared = prepare_for(&trace, &property.ast, config)?;
    Ok((prepared, property))
}

/// Reads, parses, prepares and diagnoses one trace/property pair.
pub fn run_pair(trace_path: &Path, property_path: &Path, config: &RunConfig) -> Result<DiagnosisReport, EngineError> {
    let (trace, property) = load_pair(trace_path, property_path, config)?;
    Ok(diagnose(&trace, &property, config))
}

/// Independent runs over `pairs`, in input order. `jobs = 0` uses every core.
pub fn run_batch(
    pairs: &[(PathBuf, PathBuf)],
    config: &RunConfig,
    jobs: usize,
) -> Vec<Result<DiagnosisReport, EngineError>> {
    let work = || pairs.par_iter().map(|(t, p)| run_pair(t, p, config)).collect();
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(work),
        Err(_) => pairs.iter().map(|(t, p)| run_pair(t, p, config)).collect(),
    }
}
