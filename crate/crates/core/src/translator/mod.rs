//! Phrase-based translation: phrase table, language model, decoder and
//! the persisted model.

mod decoder;
mod lm;
mod model;
mod phrases;

pub use decoder::{copy_penalty, decode, Segment, Translation, Weights};
pub use lm::{lm_logprob, LmCounts, NGramModel, BOS, EOS, UNK};
pub use model::{train, ModelError, TrainConfig, TrainError, TranslationModel, FORMAT_VERSION};
pub use phrases::{extract_phrases, PhraseCounts, PhraseEntry, PhraseTable};
