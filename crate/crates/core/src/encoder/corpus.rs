//! Parallel corpus files and corpus extraction from a source tree.
//!
//! One pair per line: `library TAB origin TAB source tokens TAB target tokens`,
//! tokens separated by single spaces. Inside every field `%`, space, tab and
//! line breaks are percent-escaped.

use std::fmt;
use std::io::{self, BufRead, Write};
use std::path::Path;

use rayon::prelude::*;
use thiserror::Error;

use super::pairs::{encode_file, EncodeOptions, PairError, ParallelPair};
use crate::extractor::{java_files, ParsedFile, TypeDatabase};

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub fn escape_field(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '%' => out.push_str("%25"),
            ' ' => out.push_str("%20"),
            '\t' => out.push_str("%09"),
            '\n' => out.push_str("%0A"),
            '\r' => out.push_str("%0D"),
            c => out.push(c),
        }
    }
    out
}

/// Inverse of [`escape_field`]. Only the escapes it produces are decoded.
pub fn unescape_field(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut rest = text;
    while let Some(pos) = rest.find('%') {
        out.push_str(&rest[..pos]);
        let tail = &rest[pos..];
        let decoded = match tail.get(..3) {
            Some("%25") => Some('%'),
            Some("%20") => Some(' '),
            Some("%09") => Some('\t'),
            Some("%0A") => Some('\n'),
            Some("%0D") => Some('\r'),
            _ => None,
        };
        match decoded {
            Some(c) => {
                out.push(c);
                rest = &tail[3..];
            }
            None => {
                out.push('%');
                rest = &tail[1..];
            }
        }
    }
    out.push_str(rest);
    out
}

/// Serializes one pair as a corpus line (without the newline).
pub fn format_pair_line(pair: &ParallelPair) -> String {
    let join = |tokens: Vec<&str>| tokens.into_iter().map(escape_field).collect::<Vec<_>>().join(" ");
    format!(
        "{}\t{}\t{}\t{}",
        escape_field(pair.library()),
        escape_field(pair.origin()),
        join(pair.source_strings()),
        join(pair.target_strings())
    )
}

pub fn parse_pair_line(line: &str) -> Result<ParallelPair, String> {
    let fields: Vec<&str> = line.split('\t').collect();
    let [library, origin, source, target] = fields.as_slice() else {
        return Err(format!("expected 4 tab-separated fields, found {}", fields.len()));
    };
    let split = |field: &str| -> Vec<String> { field.split(' ').filter(|t| !t.is_empty()).map(unescape_field).collect() };
    let (source, target) = (split(source), split(target));
    if source.is_empty() {
        return Err("empty sentence".to_string());
    }
    ParallelPair::from_canonical(&source, &target, unescape_field(library), unescape_field(origin))
        .map_err(|e: PairError| e.to_string())
}

pub fn write_corpus<W: Write>(mut out: W, pairs: &[ParallelPair]) -> io::Result<()> {
    for pair in pairs {
        writeln!(out, "{}", format_pair_line(pair))?;
    }
    out.flush()
}

/// Reads a corpus, skipping blank lines.
pub fn read_corpus<R: BufRead>(input: R) -> Result<Vec<ParallelPair>, CorpusError> {
    let mut pairs = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.is_empty() {
            continue;
        }
        pairs.push(parse_pair_line(line).map_err(|message| CorpusError::Malformed { line: i + 1, message })?);
    }
    Ok(pairs)
}

pub fn load_corpus(path: &Path) -> Result<Vec<ParallelPair>, CorpusError> {
    let file = std::fs::File::open(path)?;
    read_corpus(io::BufReader::new(file))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExtractStats {
    pub files_read: usize,
    /// Unreadable or unlexable files.
    pub files_skipped: usize,
    /// Invocation sites found.
    pub sites_extracted: usize,
    /// Sites dropped because a type could not be resolved.
    pub sites_dropped: usize,
    /// Call patterns the extractor could not classify.
    pub sites_skipped: usize,
    pub pairs_written: usize,
}

impl fmt::Display for ExtractStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "files read: {}\nfiles skipped: {}\nsites extracted: {}\nsites dropped (unresolved): {}\nsites skipped (unparseable): {}\npairs written: {}",
            self.files_read, self.files_skipped, self.sites_extracted, self.sites_dropped, self.sites_skipped, self.pairs_written
        )
    }
}

#[derive(Debug, Clone, Default)]
pub struct Corpus {
    pub pairs: Vec<ParallelPair>,
    pub stats: ExtractStats,
}

enum FileOutcome {
    Skipped(String),
    Encoded { pairs: Vec<ParallelPair>, sites: usize, dropped: usize, skipped: usize },
}

fn relative_name(root: &Path, path: &Path) -> String {
    let rel = path.strip_prefix(root).unwrap_or(path);
    let parts: Vec<String> = rel.components().map(|c| c.as_os_str().to_string_lossy().into_owned()).collect();
    if parts.is_empty() {
        path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
    } else {
        parts.join("/")
    }
}

/// Extracts and encodes every `.java` file under `root` (or `root` itself
/// when it is a file). Files are processed in parallel; the output order is
/// the sorted file order, then site order within each file.
pub fn extract_corpus(root: &Path, db: &TypeDatabase, options: EncodeOptions) -> io::Result<Corpus> {
    let files = if root.is_file() { vec![root.to_path_buf()] } else { java_files(root)? };
    let base = if root.is_file() { root.parent().unwrap_or(root) } else { root };
    let outcomes: Vec<FileOutcome> = files
        .par_iter()
        .map(|path| {
            let name = relative_name(base, path);
            let text = match std::fs::read(path).map(String::from_utf8) {
                Ok(Ok(text)) => text,
                Ok(Err(_)) => return FileOutcome::Skipped(format!("{name}: not UTF-8")),
                Err(e) => return FileOutcome::Skipped(format!("{name}: {e}")),
            };
            match ParsedFile::parse(&name, &text) {
                Ok(file) => {
                    let encoded = encode_file(&file, db, options);
                    FileOutcome::Encoded {
                        pairs: encoded.pairs,
                        sites: file.sites().len(),
                        dropped: encoded.dropped,
                        skipped: file.skipped_sites(),
                    }
                }
                Err(e) => FileOutcome::Skipped(format!("{name}: {e}")),
            }
        })
        .collect();

    let mut corpus = Corpus::default();
    for outcome in outcomes {
        match outcome {
            FileOutcome::Skipped(reason) => {
                log::warn!("skipping {reason}");
                corpus.stats.files_skipped += 1;
            }
            FileOutcome::Encoded { pairs, sites, dropped, skipped } => {
                corpus.stats.files_read += 1;
                corpus.stats.sites_extracted += sites;
                corpus.stats.sites_dropped += dropped;
                corpus.stats.sites_skipped += skipped;
                corpus.pairs.extend(pairs);
            }
        }
    }
    corpus.stats.pairs_written = corpus.pairs.len();
    Ok(corpus)
}
