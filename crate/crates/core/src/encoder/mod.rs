//! The source and target token languages and the parallel corpus.

mod corpus;
mod pairs;
mod subtokens;
mod template;
mod tokens;

pub use corpus::{
    escape_field, extract_corpus, format_pair_line, load_corpus, parse_pair_line, read_corpus, unescape_field,
    write_corpus, Corpus, CorpusError, ExtractStats,
};
pub use pairs::{
    build_parallel_pair, encode_file, EncodeError, EncodeOptions, FilePairs, PairError, ParallelPair, OTHER_LIBRARY,
};
pub use subtokens::{split_subtokens, text_subtokens};
pub use template::{is_type_name, ExpressionTemplate, Slot, TemplateArg, TemplateParseError, TemplateReceiver};
pub use tokens::{
    escape_text, infer_source_kind, infer_target_kind, is_clean, method_source_token, parse_method_source_token,
    unescape_text, ElementKind, MethodQueryToken, SourceToken, TargetToken, CALL_SLOT, IDEN_MARKER, LIT_SLOT,
    OOV_SUFFIX, VAR_SLOT,
};
