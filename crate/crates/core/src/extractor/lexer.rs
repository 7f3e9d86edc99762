//! A small hand-written lexer for Java-like source text.
//!
//! Tokens carry their verbatim text, so concatenating every token with the
//! whitespace that was skipped between them reproduces the input exactly.
//! The lexer always terminates the stream with a synthetic, empty
//! [`TokenKind::Eof`] token.

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TokenKind {
    Identifier,
    Keyword,
    Operator,
    Separator,
    StringLiteral,
    CharLiteral,
    NumberLiteral,
    Comment,
    /// Synthetic end-of-input marker with empty text.
    Eof,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexToken {
    pub kind: TokenKind,
    pub text: String,
    /// 1-based line of the first character.
    pub line: usize,
    /// 1-based column (in characters) of the first character.
    pub col: usize,
}

impl LexToken {
    pub fn is_synthetic(&self) -> bool {
        self.kind == TokenKind::Eof
    }

    pub fn is(&self, kind: TokenKind, text: &str) -> bool {
        self.kind == kind && self.text == text
    }

    pub fn is_sep(&self, text: &str) -> bool {
        self.is(TokenKind::Separator, text)
    }

    pub fn is_op(&self, text: &str) -> bool {
        self.is(TokenKind::Operator, text)
    }

    pub fn is_keyword(&self, text: &str) -> bool {
        self.is(TokenKind::Keyword, text)
    }

    pub fn is_literal(&self) -> bool {
        matches!(
            self.kind,
            TokenKind::StringLiteral | TokenKind::CharLiteral | TokenKind::NumberLiteral
        ) || (self.kind == TokenKind::Keyword && matches!(self.text.as_str(), "true" | "false" | "null"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexError {
    #[error("unterminated string literal starting on line {0}")]
    UnterminatedString(usize),
    #[error("unterminated comment starting on line {0}")]
    UnterminatedComment(usize),
}

pub const KEYWORDS: &[&str] = &[
    "abstract", "assert", "boolean", "break", "byte", "case", "catch", "char", "class", "const",
    "continue", "default", "do", "double", "else", "enum", "extends", "false", "final", "finally",
    "float", "for", "goto", "if", "implements", "import", "instanceof", "int", "interface", "long",
    "native", "new", "null", "package", "private", "protected", "public", "return", "short",
    "static", "strictfp", "super", "switch", "synchronized", "this", "throw", "throws",
    "transient", "true", "try", "void", "volatile", "while",
];

pub const PRIMITIVE_TYPES: &[&str] =
    &["boolean", "byte", "char", "double", "float", "int", "long", "short"];

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

pub fn is_primitive(word: &str) -> bool {
    PRIMITIVE_TYPES.contains(&word)
}

/// `[A-Za-z_$][A-Za-z0-9_$]*`
pub fn is_identifier(text: &str) -> bool {
    let mut chars = text.chars();
    match chars.next() {
        Some(c) if is_ident_start(c) => chars.all(is_ident_part),
        _ => false,
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_' || c == '$'
}

fn is_ident_part(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '$'
}

// Longest first so that maximal munch works with a simple prefix scan.
const OPERATORS: &[&str] = &[
    ">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=",
    ">=", "+=", "-=", "*=", "/=", "&=", "|=", "^=", "%=", "<<", ">>", "=", ">", "<", "!", "~",
    "?", ":", "+", "-", "*", "/", "&", "|", "^", "%",
];

const SEPARATORS: &[char] = &['(', ')', '{', '}', '[', ']', ';', ',', '.', '@'];

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    col: usize,
}

impl Cursor {
    fn new(src: &str) -> Self {
        Cursor { chars: src.chars().collect(), pos: 0, line: 1, col: 1 }
    }

    fn peek(&self, ahead: usize) -> Option<char> {
        self.chars.get(self.pos + ahead).copied()
    }

    fn starts_with(&self, s: &str) -> bool {
        s.chars().enumerate().all(|(i, c)| self.peek(i) == Some(c))
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.get(self.pos).copied()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn bump_n(&mut self, n: usize) {
        for _ in 0..n {
            self.bump();
        }
    }

    fn slice(&self, start: usize) -> String {
        self.chars[start..self.pos].iter().collect()
    }
}

/// Splits `source` into tokens. Comments are kept as [`TokenKind::Comment`].
pub fn lex(source: &str) -> Result<Vec<LexToken>, LexError> {
    let mut cur = Cursor::new(source);
    let mut out = Vec::new();

    while let Some(c) = cur.peek(0) {
        if c.is_whitespace() {
            cur.bump();
            continue;
        }
        let (start, line, col) = (cur.pos, cur.line, cur.col);
        let kind = if cur.starts_with("//") {
            while let Some(c) = cur.peek(0) {
                if c == '\n' {
                    break;
                }
                cur.bump();
            }
            TokenKind::Comment
        } else if cur.starts_with("/*") {
            cur.bump_n(2);
            loop {
                if cur.starts_with("*/") {
                    cur.bump_n(2);
                    break;
                }
                if cur.bump().is_none() {
                    return Err(LexError::UnterminatedComment(line));
                }
            }
            TokenKind::Comment
        } else if cur.starts_with("\"\"\"") {
            cur.bump_n(3);
            loop {
                if cur.starts_with("\\") {
                    cur.bump_n(2);
                    continue;
                }
                if cur.starts_with("\"\"\"") {
                    cur.bump_n(3);
                    break;
                }
                if cur.bump().is_none() {
                    return Err(LexError::UnterminatedString(line));
                }
            }
            TokenKind::StringLiteral
        } else if c == '"' || c == '\'' {
            cur.bump();
            loop {
                match cur.peek(0) {
                    None | Some('\n') => return Err(LexError::UnterminatedString(line)),
                    Some('\\') => {
                        cur.bump();
                        if matches!(cur.peek(0), None | Some('\n')) {
                            return Err(LexError::UnterminatedString(line));
                        }
                        cur.bump();
                    }
                    Some(q) if q == c => {
                        cur.bump();
                        break;
                    }
                    Some(_) => {
                        cur.bump();
                    }
                }
            }
            if c == '"' {
                TokenKind::StringLiteral
            } else {
                TokenKind::CharLiteral
            }
        } else if c.is_ascii_digit() || (c == '.' && cur.peek(1).is_some_and(|d| d.is_ascii_digit())) {
            lex_number(&mut cur);
            TokenKind::NumberLiteral
        } else if is_ident_start(c) {
            while cur.peek(0).is_some_and(is_ident_part) {
                cur.bump();
            }
            if is_keyword(&cur.slice(start)) {
                TokenKind::Keyword
            } else {
                TokenKind::Identifier
            }
        } else if cur.starts_with("...") || cur.starts_with("::") || cur.starts_with("->") {
            // `...` and `::` are separators in Java, `->` an operator.
            let sep = !cur.starts_with("->");
            cur.bump_n(if cur.starts_with("...") { 3 } else { 2 });
            if sep {
                TokenKind::Separator
            } else {
                TokenKind::Operator
            }
        } else if SEPARATORS.contains(&c) {
            cur.bump();
            TokenKind::Separator
        } else if let Some(op) = OPERATORS.iter().find(|op| cur.starts_with(op)) {
            cur.bump_n(op.chars().count());
            TokenKind::Operator
        } else {
            // Anything else (stray or non-ASCII characters) becomes a
            // one-character operator so that no input text is lost.
            cur.bump();
            TokenKind::Operator
        };
        out.push(LexToken { kind, text: cur.slice(start), line, col });
    }

    out.push(LexToken { kind: TokenKind::Eof, text: String::new(), line: cur.line, col: cur.col });
    Ok(out)
}

fn lex_number(cur: &mut Cursor) {
    if cur.starts_with("0x") || cur.starts_with("0X") || cur.starts_with("0b") || cur.starts_with("0B") {
        cur.bump_n(2);
        while cur.peek(0).is_some_and(|c| c.is_ascii_hexdigit() || c == '_') {
            cur.bump();
        }
    } else {
        while cur.peek(0).is_some_and(|c| c.is_ascii_digit() || c == '_') {
            cur.bump();
        }
        if cur.peek(0) == Some('.') && cur.peek(1).is_some_and(|c| c.is_ascii_digit()) {
            cur.bump();
        } else if cur.peek(0) == Some('.') && !cur.peek(1).is_some_and(is_ident_start) && cur.peek(1) != Some('.') {
            // `1.` is a valid double literal; `1.foo` and `1..` are not numbers.
            cur.bump();
        }
        while cur.peek(0).is_some_and(|c| c.is_ascii_digit() || c == '_') {
            cur.bump();
        }
        if matches!(cur.peek(0), Some('e' | 'E')) {
            let sign = matches!(cur.peek(1), Some('+' | '-'));
            let digit_at = if sign { 2 } else { 1 };
            if cur.peek(digit_at).is_some_and(|c| c.is_ascii_digit()) {
                cur.bump_n(digit_at);
                while cur.peek(0).is_some_and(|c| c.is_ascii_digit()) {
                    cur.bump();
                }
            }
        }
    }
    if matches!(cur.peek(0), Some('l' | 'L' | 'f' | 'F' | 'd' | 'D')) {
        cur.bump();
    }
}
