//! Witten-Bell smoothed n-gram language model over target tokens.
//!
//! For a history `h` seen `N` times with `T` distinct followers:
//! `P(w|h) = c(h,w) / (N + T)` when `w` followed `h`, otherwise the
//! reserved mass `T / (N + T)` is shared evenly by the `Z` predictable
//! words that never followed `h`. Predictable words are the training
//! vocabulary, `</s>` and `<unk>`. Unseen histories back off to their
//! longest seen suffix.

use std::collections::{BTreeSet, HashMap};

pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";
pub const UNK: &str = "<unk>";

/// n-gram counts for every history length `0..order`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LmCounts {
    counts: HashMap<(String, String), u64>,
}

impl LmCounts {
    pub fn add_sentence<S: AsRef<str>>(&mut self, sentence: &[S], order: usize) {
        let words: Vec<&str> = std::iter::once(BOS)
            .chain(sentence.iter().map(AsRef::as_ref))
            .chain(std::iter::once(EOS))
            .collect();
        for i in 1..words.len() {
            for k in 0..order.min(i + 1) {
                let history = words[i - k..i].join(" ");
                *self.counts.entry((history, words[i].to_string())).or_insert(0) += 1;
            }
        }
    }

    pub fn add(&mut self, history: String, word: String, n: u64) {
        *self.counts.entry((history, word)).or_insert(0) += n;
    }

    pub fn merge(self, other: LmCounts) -> LmCounts {
        let (mut big, small) = if self.counts.len() >= other.counts.len() { (self, other) } else { (other, self) };
        for (k, v) in small.counts {
            *big.counts.entry(k).or_insert(0) += v;
        }
        big
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
struct History {
    total: u64,
    followers: HashMap<String, u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NGramModel {
    order: usize,
    vocab: BTreeSet<String>,
    /// Keyed by the space-joined history.
    histories: HashMap<String, History>,
}

impl NGramModel {
    pub fn from_counts(order: usize, counts: &LmCounts) -> Self {
        assert!(order >= 1, "n-gram order must be at least 1");
        let mut vocab = BTreeSet::new();
        let mut histories: HashMap<String, History> = HashMap::new();
        for ((h, w), &c) in &counts.counts {
            if h.is_empty() {
                vocab.insert(w.clone());
            }
            let entry = histories.entry(h.clone()).or_default();
            entry.total += c;
            *entry.followers.entry(w.clone()).or_insert(0) += c;
        }
        NGramModel { order, vocab, histories }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `(history, word, count)` triples, sorted.
    pub fn entries(&self) -> Vec<(&str, &str, u64)> {
        let mut out: Vec<(&str, &str, u64)> = self
            .histories
            .iter()
            .flat_map(|(h, hist)| hist.followers.iter().map(move |(w, &c)| (h.as_str(), w.as_str(), c)))
            .collect();
        out.sort();
        out
    }

    /// Histories with at least one observation.
    pub fn histories(&self) -> impl Iterator<Item = &str> {
        self.histories.keys().map(String::as_str)
    }

    /// Every word the model assigns probability to: the vocabulary plus `<unk>`.
    pub fn predictable(&self) -> impl Iterator<Item = &str> {
        self.vocab.iter().map(String::as_str).chain(std::iter::once(UNK))
    }

    pub fn contains(&self, word: &str) -> bool {
        self.vocab.contains(word)
    }

    /// The word itself if known, else `<unk>`.
    pub fn map_word<'w>(&self, word: &'w str) -> &'w str {
        if word == BOS || self.vocab.contains(word) {
            word
        } else {
            UNK
        }
    }

    /// P(word | history). `history` holds already-mapped tokens, oldest first.
    pub fn prob<S: AsRef<str>>(&self, history: &[S], word: &str) -> f64 {
        let word = self.map_word(word);
        let usable = history.len().min(self.order - 1);
        for k in (0..=usable).rev() {
            let h = history[history.len() - k..].iter().map(AsRef::as_ref).collect::<Vec<_>>().join(" ");
            if let Some(hist) = self.histories.get(&h) {
                let n = hist.total as f64;
                let t = hist.followers.len() as f64;
                return match hist.followers.get(word) {
                    Some(&c) => c as f64 / (n + t),
                    None => {
                        let z = (self.vocab.len() + 1 - hist.followers.len()) as f64;
                        t / ((n + t) * z)
                    }
                };
            }
        }
        // Untrained model: uniform over the predictable words.
        1.0 / (self.vocab.len() + 1) as f64
    }

    /// Natural-log probability of `sentence` followed by `</s>`, starting
    /// from `<s>`.
    pub fn sentence_logprob<S: AsRef<str>>(&self, sentence: &[S]) -> f64 {
        let mut history: Vec<&str> = vec![BOS];
        let mut total = 0.0;
        for w in sentence.iter().map(AsRef::as_ref).chain(std::iter::once(EOS)) {
            total += self.prob(&history, w).ln();
            history.push(self.map_word(w));
            if history.len() >= self.order {
                history.remove(0);
            }
        }
        total
    }
}

/// Σ ln P(w_i | h_i) over the sentence and the closing `</s>`.
pub fn lm_logprob<S: AsRef<str>>(lm: &NGramModel, sentence: &[S]) -> f64 {
    lm.sentence_logprob(sentence)
}
