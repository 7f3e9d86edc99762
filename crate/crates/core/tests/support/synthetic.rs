//! Synthetic corpora where every source token has exactly one target.

use m2c_core::encoder::ParallelPair;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub const NAMES: usize = 40;

const CONTEXT: &[(&str, &str)] = &[("int", "int"), ("=", "="), ("return", "return"), ("#lit", "#lit:int"), ("+", "+")];

pub fn library(k: usize) -> String {
    format!("Lib{}", k % 3)
}

pub fn method_target(k: usize) -> String {
    let args = (0..k % 3).map(|_| "#var:int").collect::<Vec<_>>().join(",");
    format!("com.lib{}.Util{k}.op{k}({args})", k % 3)
}

/// `n` pairs over `NAMES` method names, each with a few context tokens on
/// either side of the invocation.
pub fn corpus(n: usize, seed: u64) -> Vec<ParallelPair> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let k = rng.gen_range(0..NAMES);
            let mut src: Vec<String> = Vec::new();
            let mut tgt: Vec<String> = Vec::new();
            for _ in 0..rng.gen_range(0..3) {
                let (s, t) = CONTEXT[rng.gen_range(0..CONTEXT.len())];
                src.push(s.into());
                tgt.push(t.into());
            }
            src.push(format!("op{k}#iden"));
            tgt.push(method_target(k));
            for _ in 0..rng.gen_range(0..2) {
                let (s, t) = CONTEXT[rng.gen_range(0..CONTEXT.len())];
                src.push(s.into());
                tgt.push(t.into());
            }
            ParallelPair::from_canonical(&src, &tgt, library(k), format!("Gen{}.java:{}", i / 10, i % 10 + 1)).unwrap()
        })
        .collect()
}

/// Pairs whose method names never occur in [`corpus`].
pub fn unseen(n: usize) -> Vec<ParallelPair> {
    (0..n)
        .map(|i| {
            let src = ["int", &format!("fresh{i}#iden")];
            let tgt = ["int", &format!("com.other.Fresh.fresh{i}()")];
            ParallelPair::from_canonical(&src, &tgt, library(i), format!("Fresh.java:{}", i + 1)).unwrap()
        })
        .collect()
}
