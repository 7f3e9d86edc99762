//! The two token languages.
//!
//! Every program element produces one source token (what a developer
//! types) and one target token (the complete form). Both are plain strings
//! without whitespace or `|`; the kind of a token can be recovered from its
//! text alone, which is what lets the corpus TSV stay a flat list of words.

use std::fmt;

use crate::extractor::{is_fqn, is_keyword};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ElementKind {
    MethodName,
    PartialType,
    Slot,
    Structural,
}

/// Marker that closes the method name in a source method-name token.
pub const IDEN_MARKER: &str = "#iden";
pub const VAR_SLOT: &str = "#var";
pub const LIT_SLOT: &str = "#lit";
pub const CALL_SLOT: &str = "#mcall";
/// Suffix of a source token copied through the decoder untranslated.
pub const OOV_SUFFIX: &str = "#OOV";

macro_rules! token_type {
    ($name:ident, $infer:path) => {
        #[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name {
            kind: ElementKind,
            canonical: String,
        }

        impl $name {
            pub fn new(kind: ElementKind, canonical: impl Into<String>) -> Self {
                let canonical = canonical.into();
                debug_assert!(is_clean(&canonical), "token {canonical:?} contains reserved characters");
                $name { kind, canonical }
            }

            /// Rebuilds a token from its serialized text.
            pub fn from_canonical(canonical: impl Into<String>) -> Self {
                let canonical = canonical.into();
                $name { kind: $infer(&canonical), canonical }
            }

            pub fn kind(&self) -> ElementKind {
                self.kind
            }

            pub fn canonical(&self) -> &str {
                &self.canonical
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.canonical)
            }
        }
    };
}

token_type!(SourceToken, infer_source_kind);
token_type!(TargetToken, infer_target_kind);

/// Non-empty and free of whitespace and `|`.
pub fn is_clean(canonical: &str) -> bool {
    !canonical.is_empty() && !canonical.chars().any(|c| c.is_whitespace() || c == '|')
}

fn is_type_path(text: &str) -> bool {
    is_fqn(text) && !is_keyword(text.split('.').next().unwrap_or(text))
}

pub fn infer_source_kind(canonical: &str) -> ElementKind {
    if canonical.contains(IDEN_MARKER) {
        ElementKind::MethodName
    } else if canonical.starts_with('#') {
        ElementKind::Slot
    } else if is_type_path(canonical) {
        ElementKind::PartialType
    } else {
        ElementKind::Structural
    }
}

pub fn infer_target_kind(canonical: &str) -> ElementKind {
    if canonical.ends_with(')') && canonical.contains('(') {
        ElementKind::MethodName
    } else if canonical.starts_with('#') {
        ElementKind::Slot
    } else if is_type_path(canonical) {
        ElementKind::PartialType
    } else {
        ElementKind::Structural
    }
}

/// Percent-escapes characters that may not appear inside a token, plus the
/// characters the token grammars use as delimiters (`#`, `~`).
pub fn escape_text(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    for c in raw.chars() {
        match c {
            '%' | '|' | '#' | '~' | ',' | '(' | ')' => push_percent(&mut out, c),
            c if c.is_whitespace() => push_percent(&mut out, c),
            c => out.push(c),
        }
    }
    out
}

fn push_percent(out: &mut String, c: char) {
    let mut buf = [0u8; 4];
    for b in c.encode_utf8(&mut buf).bytes() {
        out.push_str(&format!("%{b:02X}"));
    }
}

/// Inverse of [`escape_text`] (and of any `%XX` escaping of UTF-8 bytes).
/// Malformed escapes are kept verbatim.
pub fn unescape_text(escaped: &str) -> String {
    let bytes = escaped.as_bytes();
    let mut out = Vec::with_capacity(bytes.len());
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i] == b'%' && i + 2 < bytes.len() {
            let hex = |b: u8| (b as char).to_digit(16);
            if let (Some(hi), Some(lo)) = (hex(bytes[i + 1]), hex(bytes[i + 2])) {
                out.push((hi * 16 + lo) as u8);
                i += 3;
                continue;
            }
        }
        out.push(bytes[i]);
        i += 1;
    }
    String::from_utf8_lossy(&out).into_owned()
}

/// Source token of a method name, optionally carrying the detailed-query
/// hints: `name#iden#var:T...#word:W...`.
pub fn method_source_token<S: AsRef<str>, W: AsRef<str>>(name: &str, variables: &[S], words: &[W]) -> String {
    let mut token = format!("{name}{IDEN_MARKER}");
    for v in variables {
        token.push_str("#var:");
        token.push_str(&escape_text(v.as_ref()));
    }
    for w in words {
        token.push_str("#word:");
        token.push_str(&escape_text(w.as_ref()));
    }
    token
}

/// Parts of a method-name source token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodQueryToken {
    pub name: String,
    pub variables: Vec<String>,
    pub words: Vec<String>,
}

/// Parses the output of [`method_source_token`].
pub fn parse_method_source_token(token: &str) -> Option<MethodQueryToken> {
    let (name, rest) = token.split_once(IDEN_MARKER)?;
    let mut parsed = MethodQueryToken { name: name.to_string(), variables: Vec::new(), words: Vec::new() };
    if rest.is_empty() {
        return Some(parsed);
    }
    let rest = rest.strip_prefix('#')?;
    for part in rest.split('#') {
        if let Some(v) = part.strip_prefix("var:") {
            if !parsed.words.is_empty() {
                return None;
            }
            parsed.variables.push(unescape_text(v));
        } else {
            parsed.words.push(unescape_text(part.strip_prefix("word:")?));
        }
    }
    Some(parsed)
}
