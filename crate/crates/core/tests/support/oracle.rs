//! Exhaustive reference decoder and random tiny models.

use std::collections::BTreeMap;

use m2c_core::translator::{copy_penalty, lm_logprob, LmCounts, NGramModel, PhraseEntry, PhraseTable, Weights};
use rand::seq::SliceRandom;
use rand::Rng;

/// Every complete derivation of `source`, as (literal score, target).
pub fn all_derivations(pt: &PhraseTable, lm: &NGramModel, w: &Weights, source: &[&str]) -> Vec<(f64, Vec<String>)> {
    fn walk(
        pt: &PhraseTable,
        w: &Weights,
        source: &[&str],
        j: usize,
        phrase_sum: f64,
        target: &mut Vec<String>,
        out: &mut Vec<(f64, Vec<String>)>,
    ) {
        if j == source.len() {
            out.push((phrase_sum, target.clone()));
            return;
        }
        if pt.get(source[j]).is_empty() {
            target.push(format!("{}#OOV", source[j]));
            walk(pt, w, source, j + 1, phrase_sum + copy_penalty(), target, out);
            target.pop();
        }
        for k in 1..=pt.lmax().max(1).min(source.len() - j) {
            let phrase = source[j..j + k].join(" ");
            for e in pt.get(&phrase) {
                let n = target.len();
                target.extend(e.target.split(' ').map(String::from));
                let s = w.fwd * e.p_fwd.ln() + w.rev * e.p_rev.ln();
                walk(pt, w, source, j + k, phrase_sum + s, target, out);
                target.truncate(n);
            }
        }
    }
    let mut out = Vec::new();
    walk(pt, w, source, 0, 0.0, &mut Vec::new(), &mut out);
    out.into_iter()
        .map(|(ps, t)| (ps + w.lm * lm_logprob(lm, &t) + w.len * t.len() as f64, t))
        .collect()
}

/// Best literal score over all derivations.
pub fn brute_force_best(pt: &PhraseTable, lm: &NGramModel, w: &Weights, source: &[&str]) -> (f64, Vec<String>) {
    all_derivations(pt, lm, w, source)
        .into_iter()
        .max_by(|a, b| a.0.total_cmp(&b.0).then_with(|| b.1.cmp(&a.1)))
        .expect("copy-through guarantees a derivation")
}

pub struct TinyModel {
    pub phrases: PhraseTable,
    pub lm: NGramModel,
    pub weights: Weights,
    pub source: Vec<&'static str>,
}

const SRC: &[&str] = &["a", "b", "c", "d"];
const TGT: &[&str] = &["x", "y", "z", "w"];

/// At most 8 phrase entries, source length 1 to 5.
pub fn random_tiny_model<R: Rng>(rng: &mut R) -> TinyModel {
    let n_entries = rng.gen_range(1..=8);
    let mut entries: BTreeMap<String, Vec<PhraseEntry>> = BTreeMap::new();
    let mut placed = 0;
    while placed < n_entries {
        let len = rng.gen_range(1..=3);
        let src: Vec<&str> = (0..len).map(|_| *SRC.choose(rng).unwrap()).collect();
        let tlen = rng.gen_range(1..=2);
        let tgt: Vec<&str> = (0..tlen).map(|_| *TGT.choose(rng).unwrap()).collect();
        let list = entries.entry(src.join(" ")).or_default();
        let target = tgt.join(" ");
        if list.iter().any(|e| e.target == target) {
            continue;
        }
        list.push(PhraseEntry {
            target,
            count: rng.gen_range(1..5),
            p_fwd: rng.gen_range(0.05..1.0),
            p_rev: rng.gen_range(0.05..1.0),
        });
        placed += 1;
    }
    let order = rng.gen_range(1..=3);
    let mut counts = LmCounts::default();
    for _ in 0..rng.gen_range(1..=4) {
        let s: Vec<&str> = (0..rng.gen_range(1..=4)).map(|_| *TGT.choose(rng).unwrap()).collect();
        counts.add_sentence(&s, order);
    }
    let weights = Weights {
        fwd: rng.gen_range(0.0..2.0),
        rev: rng.gen_range(0.0..2.0),
        lm: rng.gen_range(0.0..2.0),
        len: rng.gen_range(-1.0..1.0),
    };
    let source = (0..rng.gen_range(1..=5)).map(|_| *SRC.choose(rng).unwrap()).collect();
    TinyModel { phrases: PhraseTable::from_entries(entries), lm: NGramModel::from_counts(order, &counts), weights, source }
}
