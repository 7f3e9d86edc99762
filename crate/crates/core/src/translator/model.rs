use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

use super::decoder::{decode, Translation, Weights};
use super::lm::{LmCounts, NGramModel};
use super::phrases::{extract_phrases, PhraseCounts, PhraseEntry, PhraseTable};
use crate::encoder::{parse_method_source_token, ElementKind, ParallelPair};
use crate::hash::fnv1a64;
use crate::querier::NameIndex;

pub const FORMAT_VERSION: u32 = 1;
const HEADER_PREFIX: &str = "M2C-MODEL v";
const SEP: &str = " ||| ";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrainConfig {
    pub lmax: usize,
    pub order: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { lmax: 4, order: 3 }
    }
}

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("the training corpus is empty")]
    EmptyCorpus,
    #[error("invalid configuration: {0}")]
    InvalidConfig(&'static str),
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("unsupported model version: {0}")]
    UnsupportedVersion(String),
    #[error("corrupt model: {0}")]
    CorruptModel(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TranslationModel {
    pub phrases: PhraseTable,
    pub lm: NGramModel,
    pub source_vocab: BTreeSet<String>,
    pub target_vocab: BTreeSet<String>,
    pub names: NameIndex,
    pub weights: Weights,
}

#[derive(Default)]
struct Counts {
    phrases: PhraseCounts,
    lm: LmCounts,
    source_vocab: BTreeSet<String>,
    target_vocab: BTreeSet<String>,
    /// Method names from compact tokens, then from detailed ones.
    names: BTreeMap<String, u64>,
    detailed_names: BTreeMap<String, u64>,
}

impl Counts {
    fn add(mut self, pair: &ParallelPair, config: &TrainConfig) -> Self {
        let source = pair.source_strings();
        let target = pair.target_strings();
        for (s, t) in extract_phrases(&source, &target, config.lmax).expect("pairs are aligned") {
            self.phrases.add(s, t, 1);
        }
        self.lm.add_sentence(&target, config.order);
        self.source_vocab.extend(source.iter().map(|s| s.to_string()));
        self.target_vocab.extend(target.iter().map(|t| t.to_string()));
        for tok in pair.source().iter().filter(|t| t.kind() == ElementKind::MethodName) {
            if let Some(q) = parse_method_source_token(tok.canonical()) {
                let bucket = if q.variables.is_empty() && q.words.is_empty() { &mut self.names } else { &mut self.detailed_names };
                *bucket.entry(q.name).or_insert(0) += 1;
            }
        }
        self
    }

    fn merge(mut self, other: Counts) -> Self {
        self.phrases = self.phrases.merge(other.phrases);
        self.lm = self.lm.merge(other.lm);
        self.source_vocab.extend(other.source_vocab);
        self.target_vocab.extend(other.target_vocab);
        for (n, c) in other.names {
            *self.names.entry(n).or_insert(0) += c;
        }
        for (n, c) in other.detailed_names {
            *self.detailed_names.entry(n).or_insert(0) += c;
        }
        self
    }
}

/// Trains phrase table, language model and name index from aligned pairs.
pub fn train(corpus: &[ParallelPair], config: TrainConfig) -> Result<TranslationModel, TrainError> {
    if config.lmax == 0 {
        return Err(TrainError::InvalidConfig("lmax must be at least 1"));
    }
    if config.order == 0 {
        return Err(TrainError::InvalidConfig("n-gram order must be at least 1"));
    }
    if corpus.iter().all(ParallelPair::is_empty) {
        return Err(TrainError::EmptyCorpus);
    }
    let counts = corpus
        .par_iter()
        .fold(Counts::default, |acc, pair| acc.add(pair, &config))
        .reduce(Counts::default, Counts::merge);
    let mut names = counts.names;
    for (n, c) in counts.detailed_names {
        names.entry(n).or_insert(c);
    }
    Ok(TranslationModel {
        phrases: PhraseTable::from_counts(&counts.phrases),
        lm: NGramModel::from_counts(config.order, &counts.lm),
        source_vocab: counts.source_vocab,
        target_vocab: counts.target_vocab,
        names: NameIndex::from_counts(names),
        weights: Weights::default(),
    })
}

fn corrupt(msg: impl Into<String>) -> ModelError {
    ModelError::CorruptModel(msg.into())
}

impl TranslationModel {
    pub fn decode<S: AsRef<str>>(&self, source: &[S], beam: usize) -> Translation {
        decode(&self.phrases, &self.lm, &self.weights, source, beam)
    }

    /// The model file contents. Identical models serialize identically.
    pub fn to_text(&self) -> String {
        let mut out = format!("{HEADER_PREFIX}{FORMAT_VERSION}\n");
        let w = &self.weights;
        out.push_str("[WEIGHTS]\n");
        let _ = write!(out, "fwd {}\nlen {}\nlm {}\nrev {}\n", w.fwd, w.len, w.lm, w.rev);

        out.push_str("[VOCAB-SRC]\n");
        for t in &self.source_vocab {
            out.push_str(t);
            out.push('\n');
        }
        out.push_str("[VOCAB-TGT]\n");
        for t in &self.target_vocab {
            out.push_str(t);
            out.push('\n');
        }

        out.push_str("[PHRASES]\n");
        let mut lines: Vec<String> = self
            .phrases
            .iter()
            .flat_map(|(s, es)| es.iter().map(move |e| format!("{s}{SEP}{}{SEP}{} {} {}", e.target, e.count, e.p_fwd, e.p_rev)))
            .collect();
        lines.sort();
        for l in lines {
            out.push_str(&l);
            out.push('\n');
        }

        out.push_str("[LM]\n");
        let _ = writeln!(out, "{}", self.lm.order());
        let mut lines: Vec<String> =
            self.lm.entries().into_iter().map(|(h, w, c)| format!("{h}{SEP}{w}{SEP}{c}")).collect();
        lines.sort();
        for l in lines {
            out.push_str(&l);
            out.push('\n');
        }

        out.push_str("[NAMES]\n");
        for (name, count) in self.names.frequencies() {
            let _ = writeln!(out, "{name}{SEP}{count}");
        }

        let checksum = fnv1a64(out.as_bytes());
        let _ = writeln!(out, "[CHECKSUM]\n{checksum:016x}");
        out
    }

    pub fn save(&self, path: &Path) -> Result<(), ModelError> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, ModelError> {
        let bytes = std::fs::read(path)?;
        Self::from_bytes(&bytes)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, ModelError> {
        let header_end = bytes.iter().position(|&b| b == b'\n').unwrap_or(bytes.len());
        let header = String::from_utf8_lossy(&bytes[..header_end]);
        match header.strip_prefix(HEADER_PREFIX) {
            Some(v) if v == FORMAT_VERSION.to_string() => {}
            Some(v) => return Err(ModelError::UnsupportedVersion(v.to_string())),
            None => return Err(corrupt("missing model header")),
        }
        let text = std::str::from_utf8(bytes).map_err(|_| corrupt("not UTF-8"))?;

        let marker = "\n[CHECKSUM]\n";
        let pos = text.rfind(marker).ok_or_else(|| corrupt("missing checksum"))?;
        let body = &text[..pos + 1];
        let stored = text[pos + marker.len()..].strip_suffix('\n').unwrap_or(&text[pos + marker.len()..]);
        let stored = u64::from_str_radix(stored, 16).ok().filter(|_| stored.len() == 16).ok_or_else(|| corrupt("bad checksum line"))?;
        if stored != fnv1a64(body.as_bytes()) {
            return Err(corrupt("checksum mismatch"));
        }
        parse_body(body)
    }
}

fn parse_body(body: &str) -> Result<TranslationModel, ModelError> {
    let mut sections: BTreeMap<&str, Vec<(usize, &str)>> = BTreeMap::new();
    let mut current: Option<&str> = None;
    for (i, line) in body.lines().enumerate().skip(1) {
        if line.starts_with('[') && line.ends_with(']') {
            let name = &line[1..line.len() - 1];
            if !matches!(name, "WEIGHTS" | "VOCAB-SRC" | "VOCAB-TGT" | "PHRASES" | "LM" | "NAMES") {
                return Err(corrupt(format!("line {}: unknown section {line}", i + 1)));
            }
            if sections.insert(name, Vec::new()).is_some() {
                return Err(corrupt(format!("line {}: duplicate section {line}", i + 1)));
            }
            current = Some(name);
        } else {
            let section = current.ok_or_else(|| corrupt(format!("line {}: content before any section", i + 1)))?;
            sections.get_mut(section).expect("section registered").push((i + 1, line));
        }
    }
    let section = |name: &str| sections.get(name).ok_or_else(|| corrupt(format!("missing section [{name}]")));
    let bad = |line: usize| corrupt(format!("line {line}: malformed entry"));

    let mut weights = Weights { fwd: f64::NAN, rev: f64::NAN, lm: f64::NAN, len: f64::NAN };
    for &(n, line) in section("WEIGHTS")? {
        let (key, value) = line.split_once(' ').ok_or_else(|| bad(n))?;
        let value: f64 = value.parse().map_err(|_| bad(n))?;
        match key {
            "fwd" => weights.fwd = value,
            "rev" => weights.rev = value,
            "lm" => weights.lm = value,
            "len" => weights.len = value,
            _ => return Err(bad(n)),
        }
    }
    if [weights.fwd, weights.rev, weights.lm, weights.len].iter().any(|w| w.is_nan()) {
        return Err(corrupt("incomplete [WEIGHTS]"));
    }

    let vocab = |name: &str| -> Result<BTreeSet<String>, ModelError> {
        Ok(section(name)?.iter().map(|(_, l)| l.to_string()).collect())
    };
    let source_vocab = vocab("VOCAB-SRC")?;
    let target_vocab = vocab("VOCAB-TGT")?;

    let mut entries: BTreeMap<String, Vec<PhraseEntry>> = BTreeMap::new();
    for &(n, line) in section("PHRASES")? {
        let parts: Vec<&str> = line.split(SEP).collect();
        let [src, tgt, stats] = parts.as_slice() else { return Err(bad(n)) };
        let nums: Vec<&str> = stats.split(' ').collect();
        let [count, p_fwd, p_rev] = nums.as_slice() else { return Err(bad(n)) };
        let entry = PhraseEntry {
            target: tgt.to_string(),
            count: count.parse().map_err(|_| bad(n))?,
            p_fwd: p_fwd.parse().map_err(|_| bad(n))?,
            p_rev: p_rev.parse().map_err(|_| bad(n))?,
        };
        if !(entry.p_fwd > 0.0 && entry.p_fwd <= 1.0 && entry.p_rev > 0.0 && entry.p_rev <= 1.0) {
            return Err(bad(n));
        }
        entries.entry(src.to_string()).or_default().push(entry);
    }

    let lm_lines = section("LM")?;
    let (&(n, order_line), rest) = lm_lines.split_first().ok_or_else(|| corrupt("empty [LM]"))?;
    let order: usize = order_line.parse().ok().filter(|&o| o >= 1).ok_or_else(|| bad(n))?;
    let mut lm_counts = LmCounts::default();
    for &(n, line) in rest {
        let parts: Vec<&str> = line.split(SEP).collect();
        let [h, w, c] = parts.as_slice() else { return Err(bad(n)) };
        lm_counts.add(h.to_string(), w.to_string(), c.parse().map_err(|_| bad(n))?);
    }

    let mut names = BTreeMap::new();
    for &(n, line) in section("NAMES")? {
        let (name, count) = line.split_once(SEP).ok_or_else(|| bad(n))?;
        names.insert(name.to_string(), count.parse().map_err(|_| bad(n))?);
    }

    Ok(TranslationModel {
        phrases: PhraseTable::from_entries(entries),
        lm: NGramModel::from_counts(order, &lm_counts),
        source_vocab,
        target_vocab,
        names: NameIndex::from_counts(names),
        weights,
    })
}
