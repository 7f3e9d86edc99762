//! Intrinsic evaluation: corpus splitting, per-invocation classification
//! and the per-library report.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

use crate::encoder::ParallelPair;
use crate::hash::{fnv1a64, mix64};
use crate::translator::TranslationModel;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SplitError {
    #[error("test fraction must lie strictly between 0 and 1, got {0}")]
    InvalidFraction(f64),
    #[error("the {0} split is empty")]
    EmptySplit(&'static str),
}

/// Deterministic split keyed by `(seed, origin)`: pairs with the same
/// origin always land on the same side.
pub fn split_corpus(
    pairs: &[ParallelPair],
    test_fraction: f64,
    seed: u64,
) -> Result<(Vec<ParallelPair>, Vec<ParallelPair>), SplitError> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(SplitError::InvalidFraction(test_fraction));
    }
    let (test, train): (Vec<ParallelPair>, Vec<ParallelPair>) = pairs.iter().cloned().partition(|p| {
        let h = mix64(seed ^ fnv1a64(p.origin().as_bytes()));
        ((h >> 11) as f64 / (1u64 << 53) as f64) < test_fraction
    });
    if train.is_empty() {
        return Err(SplitError::EmptySplit("training"));
    }
    if test.is_empty() {
        return Err(SplitError::EmptySplit("test"));
    }
    Ok((train, test))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Correct,
    Incorrect,
    OoSource,
    OoTarget,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("pair {origin} has {found} method-name tokens, expected exactly one")]
pub struct MalformedPair {
    pub origin: String,
    pub found: usize,
}

/// Classifies one test invocation. Only the method-name position decides
/// the outcome; the rest of the sentence is decoded as context.
pub fn classify_instance(model: &TranslationModel, pair: &ParallelPair, beam: usize) -> Result<Outcome, MalformedPair> {
    let positions = pair.method_positions();
    let [pos] = positions.as_slice() else {
        return Err(MalformedPair { origin: pair.origin().to_string(), found: positions.len() });
    };
    let source = pair.source_strings();
    let reference = pair.target()[*pos].canonical();
    if !model.source_vocab.contains(source[*pos]) {
        return Ok(Outcome::OoSource);
    }
    if !model.target_vocab.contains(reference) {
        return Ok(Outcome::OoTarget);
    }
    let translation = model.decode(&source, beam);
    Ok(if translation.target.get(*pos).is_some_and(|t| t == reference) { Outcome::Correct } else { Outcome::Incorrect })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct EvalCounts {
    pub correct: u64,
    pub incorrect: u64,
    pub oo_source: u64,
    pub oo_target: u64,
}

impl EvalCounts {
    pub fn new(correct: u64, incorrect: u64, oo_source: u64, oo_target: u64) -> Self {
        EvalCounts { correct, incorrect, oo_source, oo_target }
    }

    pub fn oovoc(&self) -> u64 {
        self.oo_source + self.oo_target
    }

    pub fn total(&self) -> u64 {
        self.correct + self.incorrect + self.oovoc()
    }

    pub fn record(&mut self, outcome: Outcome) {
        match outcome {
            Outcome::Correct => self.correct += 1,
            Outcome::Incorrect => self.incorrect += 1,
            Outcome::OoSource => self.oo_source += 1,
            Outcome::OoTarget => self.oo_target += 1,
        }
    }

    pub fn merge(self, o: EvalCounts) -> EvalCounts {
        EvalCounts::new(
            self.correct + o.correct,
            self.incorrect + o.incorrect,
            self.oo_source + o.oo_source,
            self.oo_target + o.oo_target,
        )
    }
}

/// An exact non-negative rational, 0/0 read as 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Ratio {
    pub num: u64,
    pub den: u64,
}

impl Ratio {
    pub fn value(self) -> f64 {
        if self.den == 0 {
            0.0
        } else {
            self.num as f64 / self.den as f64
        }
    }

    /// Percentage with two decimals, rounded half up: `63.98%`.
    pub fn percent(self) -> String {
        if self.den == 0 {
            return "0.00%".to_string();
        }
        let (num, den) = (self.num as u128, self.den as u128);
        let hundredths = (num * 20_000 + den) / (2 * den);
        format!("{}.{:02}%", hundredths / 100, hundredths % 100)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Metrics {
    pub precision: Ratio,
    pub recall: Ratio,
    pub f1: Ratio,
}

/// precision = C/(C+I), recall = C/(C+OOVoc), F1 = 2PR/(P+R) = 2C/(2C+I+OOVoc).
pub fn compute_metrics(c: &EvalCounts) -> Metrics {
    let ratio = |num: u64, den: u64| if num == 0 { Ratio { num: 0, den: 0 } } else { Ratio { num, den } };
    Metrics {
        precision: ratio(c.correct, c.correct + c.incorrect),
        recall: ratio(c.correct, c.correct + c.oovoc()),
        f1: ratio(2 * c.correct, 2 * c.correct + c.incorrect + c.oovoc()),
    }
}

pub const REPORT_HEADER: &str = "Library\tCorrect\tIncorrect\tOOSource\tOOTarget\tOOVoc\tTotal\tPrecision\tRecall\tF1";

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EvalReport {
    pub per_library: BTreeMap<String, EvalCounts>,
}

pub fn format_row(label: &str, c: &EvalCounts) -> String {
    let m = compute_metrics(c);
    format!(
        "{label}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
        c.correct,
        c.incorrect,
        c.oo_source,
        c.oo_target,
        c.oovoc(),
        c.total(),
        m.precision.percent(),
        m.recall.percent(),
        m.f1.percent()
    )
}

impl EvalReport {
    pub fn record(&mut self, library: &str, outcome: Outcome) {
        self.per_library.entry(library.to_string()).or_default().record(outcome);
    }

    pub fn total(&self) -> EvalCounts {
        self.per_library.values().fold(EvalCounts::default(), |a, b| a.merge(*b))
    }

    pub fn total_row(&self) -> String {
        format_row("Total", &self.total())
    }

    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{REPORT_HEADER}");
        for (lib, c) in &self.per_library {
            let _ = writeln!(out, "{}", format_row(lib, c));
        }
        let _ = writeln!(out, "{}", self.total_row());
        out
    }

    pub fn write(&self, path: &Path) -> std::io::Result<()> {
        std::fs::write(path, self.to_tsv())
    }
}

/// Classifies every test pair (in parallel) and tallies by library.
pub fn evaluate(model: &TranslationModel, test: &[ParallelPair], beam: usize) -> Result<EvalReport, MalformedPair> {
    let outcomes: Vec<(String, Outcome)> = test
        .par_iter()
        .map(|p| classify_instance(model, p, beam).map(|o| (p.library().to_string(), o)))
        .collect::<Result<_, _>>()?;
    let mut report = EvalReport::default();
    for (lib, o) in outcomes {
        report.record(&lib, o);
    }
    Ok(report)
}
