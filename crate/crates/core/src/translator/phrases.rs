use std::collections::{BTreeMap, HashMap};

use crate::encoder::PairError;

/// Every aligned span of length `1..=lmax`: `source[i..i+k]` with
/// `target[i..i+k]`, phrases space-joined.
pub fn extract_phrases<S: AsRef<str>, T: AsRef<str>>(
    source: &[S],
    target: &[T],
    lmax: usize,
) -> Result<Vec<(String, String)>, PairError> {
    if source.len() != target.len() {
        return Err(PairError::LengthMismatch { source_len: source.len(), target_len: target.len() });
    }
    let join = |xs: &[S]| xs.iter().map(AsRef::as_ref).collect::<Vec<_>>().join(" ");
    let join_t = |xs: &[T]| xs.iter().map(AsRef::as_ref).collect::<Vec<_>>().join(" ");
    let mut out = Vec::new();
    for k in 1..=lmax.min(source.len()) {
        for i in 0..=source.len() - k {
            out.push((join(&source[i..i + k]), join_t(&target[i..i + k])));
        }
    }
    Ok(out)
}

/// Joint phrase-pair counts. Merging is associative and commutative.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PhraseCounts {
    counts: HashMap<(String, String), u64>,
}

impl PhraseCounts {
    pub fn add(&mut self, source: String, target: String, n: u64) {
        *self.counts.entry((source, target)).or_insert(0) += n;
    }

    pub fn merge(self, other: PhraseCounts) -> PhraseCounts {
        let (mut big, small) = if self.counts.len() >= other.counts.len() { (self, other) } else { (other, self) };
        for (k, v) in small.counts {
            *big.counts.entry(k).or_insert(0) += v;
        }
        big
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhraseEntry {
    pub target: String,
    pub count: u64,
    /// p(target | source)
    pub p_fwd: f64,
    /// p(source | target)
    pub p_rev: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PhraseTable {
    entries: BTreeMap<String, Vec<PhraseEntry>>,
    lmax: usize,
}

fn phrase_len(phrase: &str) -> usize {
    phrase.split(' ').count()
}

impl PhraseTable {
    /// Relative-frequency estimates from joint counts.
    pub fn from_counts(counts: &PhraseCounts) -> Self {
        let mut source_totals: HashMap<&str, u64> = HashMap::new();
        let mut target_totals: HashMap<&str, u64> = HashMap::new();
        for ((s, t), &c) in &counts.counts {
            *source_totals.entry(s).or_insert(0) += c;
            *target_totals.entry(t).or_insert(0) += c;
        }
        let mut entries: BTreeMap<String, Vec<PhraseEntry>> = BTreeMap::new();
        for ((s, t), &c) in &counts.counts {
            entries.entry(s.clone()).or_default().push(PhraseEntry {
                target: t.clone(),
                count: c,
                p_fwd: c as f64 / source_totals[s.as_str()] as f64,
                p_rev: c as f64 / target_totals[t.as_str()] as f64,
            });
        }
        Self::from_entries(entries)
    }

    /// Builds a table from explicit entries, e.g. read from a model file.
    pub fn from_entries(mut entries: BTreeMap<String, Vec<PhraseEntry>>) -> Self {
        for list in entries.values_mut() {
            list.sort_by(|a, b| b.p_fwd.total_cmp(&a.p_fwd).then_with(|| a.target.cmp(&b.target)));
        }
        let lmax = entries.keys().map(|s| phrase_len(s)).max().unwrap_or(0);
        PhraseTable { entries, lmax }
    }

    pub fn lmax(&self) -> usize {
        self.lmax
    }

    pub fn get(&self, source: &str) -> &[PhraseEntry] {
        self.entries.get(source).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &[PhraseEntry])> {
        self.entries.iter().map(|(s, e)| (s.as_str(), e.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.entries.values().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Σ_t p_fwd(t|s) for every source phrase.
    pub fn forward_sums(&self) -> BTreeMap<&str, f64> {
        self.entries.iter().map(|(s, es)| (s.as_str(), es.iter().map(|e| e.p_fwd).sum())).collect()
    }

    /// Σ_s p_rev(s|t) for every target phrase.
    pub fn reverse_sums(&self) -> BTreeMap<&str, f64> {
        let mut sums: BTreeMap<&str, f64> = BTreeMap::new();
        for es in self.entries.values() {
            for e in es {
                *sums.entry(e.target.as_str()).or_insert(0.0) += e.p_rev;
            }
        }
        sums
    }
}
