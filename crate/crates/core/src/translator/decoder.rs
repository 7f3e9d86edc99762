//! Monotone stack decoding under a log-linear score.
//!
//! score = Σ_phrases [λ_fwd·ln p_fwd + λ_rev·ln p_rev]
//!       + λ_lm·lm_logprob(target) + λ_len·|target|
//!
//! A source token without any unigram phrase is copied through as
//! `token#OOV` at a fixed cost of ln(1e-6) in place of the phrase features.

use std::cmp::Ordering;
use std::collections::HashMap;
use std::ops::Range;

use super::lm::{NGramModel, BOS};
use super::phrases::PhraseTable;
use crate::encoder::OOV_SUFFIX;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Weights {
    pub fwd: f64,
    pub rev: f64,
    pub lm: f64,
    pub len: f64,
}

impl Default for Weights {
    fn default() -> Self {
        Weights { fwd: 1.0, rev: 1.0, lm: 1.0, len: 0.0 }
    }
}

/// Additive cost of one copied-through token.
pub fn copy_penalty() -> f64 {
    1e-6f64.ln()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub source: Range<usize>,
    /// Space-joined target phrase.
    pub target: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Translation {
    pub target: Vec<String>,
    pub score: f64,
    pub segmentation: Vec<Segment>,
}

#[derive(Debug, Clone)]
struct Hyp {
    score: f64,
    target: Vec<String>,
    /// Last `order - 1` target tokens as the language model sees them.
    history: Vec<String>,
    segments: Vec<Segment>,
    phrase_scores: Vec<f64>,
}

fn better(a: &Hyp, b: &Hyp) -> Ordering {
    b.score.total_cmp(&a.score).then_with(|| a.target.cmp(&b.target))
}

struct Decoder<'a, S> {
    phrases: &'a PhraseTable,
    lm: &'a NGramModel,
    weights: &'a Weights,
    source: &'a [S],
}

impl<S: AsRef<str>> Decoder<'_, S> {
    fn extend(&self, hyp: &Hyp, span: Range<usize>, target: &str, phrase_score: f64) -> Hyp {
        let mut next = hyp.clone();
        let mut delta = phrase_score;
        for tok in target.split(' ') {
            delta += self.weights.lm * self.lm.prob(&next.history, tok).ln() + self.weights.len;
            next.target.push(tok.to_string());
            next.history.push(self.lm.map_word(tok).to_string());
            if next.history.len() >= self.lm.order() {
                next.history.remove(0);
            }
        }
        next.score += delta;
        next.segments.push(Segment { source: span, target: target.to_string() });
        next.phrase_scores.push(phrase_score);
        next
    }

    /// One beam-search pass. Also reports whether any stack was pruned.
    fn run(&self, width: usize) -> (Hyp, bool) {
        let n = self.source.len();
        let lmax = self.phrases.lmax().max(1);
        let mut stacks: Vec<Vec<Hyp>> = vec![Vec::new(); n + 1];
        let mut start_history = vec![BOS.to_string()];
        if self.lm.order() <= 1 {
            start_history.clear();
        }
        stacks[0].push(Hyp { score: 0.0, target: Vec::new(), history: start_history, segments: Vec::new(), phrase_scores: Vec::new() });
        let mut pruned = false;
        for j in 0..n {
            let hyps = recombine(std::mem::take(&mut stacks[j]));
            let hyps = if hyps.len() > width {
                pruned = true;
                hyps.into_iter().take(width).collect()
            } else {
                hyps
            };
            for hyp in &hyps {
                let first = self.source[j].as_ref();
                if self.phrases.get(first).is_empty() {
                    let copy = format!("{first}{OOV_SUFFIX}");
                    stacks[j + 1].push(self.extend(hyp, j..j + 1, &copy, copy_penalty()));
                }
                for k in 1..=lmax.min(n - j) {
                    let phrase = self.source[j..j + k].iter().map(AsRef::as_ref).collect::<Vec<_>>().join(" ");
                    for e in self.phrases.get(&phrase) {
                        let phrase_score = self.weights.fwd * e.p_fwd.ln() + self.weights.rev * e.p_rev.ln();
                        stacks[j + k].push(self.extend(hyp, j..j + k, &e.target, phrase_score));
                    }
                }
            }
        }
        let mut finals: Vec<Hyp> = std::mem::take(&mut stacks[n])
            .into_iter()
            .map(|mut h| {
                h.score += self.weights.lm * self.lm.prob(&h.history, super::lm::EOS).ln();
                h
            })
            .collect();
        finals.sort_by(better);
        (finals.into_iter().next().expect("copy-through always completes a hypothesis"), pruned)
    }

    /// The literal score formula, evaluated from scratch for `hyp`.
    fn rescore(&self, hyp: &Hyp) -> f64 {
        let phrase_sum: f64 = hyp.phrase_scores.iter().sum();
        phrase_sum
            + self.weights.lm * super::lm::lm_logprob(self.lm, &hyp.target)
            + self.weights.len * hyp.target.len() as f64
    }
}

/// Keeps the best hypothesis per language-model state, sorted best first.
fn recombine(hyps: Vec<Hyp>) -> Vec<Hyp> {
    let mut best: HashMap<Vec<String>, Hyp> = HashMap::new();
    for h in hyps {
        match best.get(&h.history) {
            Some(cur) if better(cur, &h) != Ordering::Greater => {}
            _ => {
                best.insert(h.history.clone(), h);
            }
        }
    }
    let mut out: Vec<Hyp> = best.into_values().collect();
    out.sort_by(better);
    out
}

/// Best translation of `source`.
///
/// Widths `1..=beam` are tried in turn and the best result kept, stopping
/// as soon as a pass prunes nothing (that pass is exact). A wider beam can
/// therefore never return a worse score.
pub fn decode<S: AsRef<str>>(
    phrases: &PhraseTable,
    lm: &NGramModel,
    weights: &Weights,
    source: &[S],
    beam: usize,
) -> Translation {
    let decoder = Decoder { phrases, lm, weights, source };
    let mut best: Option<(f64, Hyp)> = None;
    for width in 1..=beam.max(1) {
        let (hyp, pruned) = decoder.run(width);
        let score = decoder.rescore(&hyp);
        let replace = match &best {
            None => true,
            Some((s, h)) => score > *s || (score == *s && hyp.target < h.target),
        };
        if replace {
            best = Some((score, hyp));
        }
        if !pruned {
            break;
        }
    }
    let (score, hyp) = best.expect("at least one pass");
    Translation { target: hyp.target, score, segmentation: hyp.segments }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::translator::lm::{lm_logprob, LmCounts};
    use crate::translator::phrases::PhraseCounts;

    fn setup(pairs: &[(&[&str], &[&str])]) -> (PhraseTable, NGramModel) {
        let mut pc = PhraseCounts::default();
        let mut lc = LmCounts::default();
        for (s, t) in pairs {
            for (a, b) in crate::translator::phrases::extract_phrases(s, t, 4).unwrap() {
                pc.add(a, b, 1);
            }
            lc.add_sentence(t, 3);
        }
        (PhraseTable::from_counts(&pc), NGramModel::from_counts(3, &lc))
    }

    #[test]
    fn single_entry() {
        let (pt, lm) = setup(&[(&["a"], &["x"])]);
        let t = decode(&pt, &lm, &Weights::default(), &["a"], 5);
        assert_eq!(t.target, ["x"]);
        assert_eq!(t.segmentation, [Segment { source: 0..1, target: "x".into() }]);
    }

    #[test]
    fn majority_wins() {
        let (pt, lm) = setup(&[(&["a"], &["x"]), (&["a"], &["x"]), (&["a"], &["y"])]);
        let w = Weights::default();
        let t = decode(&pt, &lm, &w, &["a"], 5);
        assert_eq!(t.target, ["x"]);
        // Brute force over the two candidates.
        let score = |tok: &str, pf: f64, pr: f64| pf.ln() + pr.ln() + lm_logprob(&lm, &[tok]);
        let sx = score("x", 2.0 / 3.0, 1.0);
        let sy = score("y", 1.0 / 3.0, 1.0);
        assert!(sx > sy);
        assert!((t.score - sx).abs() < 1e-12);
    }

    #[test]
    fn copy_through_unknown_tokens() {
        let (pt, lm) = setup(&[(&["a", "b"], &["x", "y"])]);
        let t = decode(&pt, &lm, &Weights::default(), &["a", "qqq", "b"], 5);
        assert_eq!(t.target, ["x", "qqq#OOV", "y"]);
        let empty = decode(&pt, &lm, &Weights::default(), &[] as &[&str], 5);
        assert!(empty.target.is_empty());
    }

    #[test]
    fn prefers_longer_consistent_phrases() {
        let (pt, lm) = setup(&[(&["a", "b"], &["x", "y"]), (&["a"], &["z"]), (&["b"], &["w"])]);
        let t = decode(&pt, &lm, &Weights::default(), &["a", "b"], 10);
        assert_eq!(t.target, ["x", "y"]);
        let covered: Vec<Range<usize>> = t.segmentation.iter().map(|s| s.source.clone()).collect();
        assert_eq!(covered.first().map(|r| r.start), Some(0));
        assert_eq!(covered.last().map(|r| r.end), Some(2));
        let joined: Vec<String> = t.segmentation.iter().flat_map(|s| s.target.split(' ').map(String::from)).collect();
        assert_eq!(joined, t.target);
    }
}
