//! Token-pattern extraction of method-invocation sites.
//!
//! This is deliberately not a Java parser. A site is any `ident ( ... )`
//! that is not a constructor call, an annotation or a declaration; its
//! receiver is recovered by walking the dotted chain to the left of the name
//! and its arguments are classified into a handful of shapes.

use std::collections::BTreeMap;
use std::ops::Range;

use super::lexer::{is_primitive, LexToken, TokenKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Receiver {
    /// A local variable, parameter or field.
    Variable(String),
    /// A type name used for a static call (`Math.sqrt`).
    StaticType(String),
    /// A type followed by one or more field names (`System.out`), or a
    /// package-qualified type (`java.util.Collections`).
    FieldChain(Vec<String>),
    This,
    None,
    /// The result of another call (`a.b().c()`).
    Call,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArgRole {
    Variable,
    Literal,
    NestedCall,
    ConstantRef,
    Compound,
}

pub const UNKNOWN_TYPE: &str = "unknown";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArgShape {
    pub role: ArgRole,
    /// Simple or qualified type name, or [`UNKNOWN_TYPE`].
    pub type_hint: String,
    /// Infix operators joining `operands` (compound arguments only).
    pub operator_parts: Vec<String>,
    /// Sub-arguments of a compound argument, one more than `operator_parts`.
    pub operands: Vec<ArgShape>,
    /// Verbatim argument text with whitespace removed.
    pub text: String,
}

impl ArgShape {
    fn atom(role: ArgRole, type_hint: impl Into<String>, text: String) -> Self {
        ArgShape { role, type_hint: type_hint.into(), operator_parts: Vec::new(), operands: Vec::new(), text }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvocationSite {
    pub method_name: String,
    pub receiver: Receiver,
    pub args: Vec<ArgShape>,
    pub enclosing_context: Vec<LexToken>,
    pub file: String,
    pub line: usize,
    /// Code-token range covered by the receiver chain, name and argument list.
    pub(crate) span: Range<usize>,
    pub(crate) name_index: usize,
    pub(crate) statement: usize,
}

/// Variable declarations seen in a token stream, keyed by name.
#[derive(Debug, Clone, Default)]
pub(crate) struct Declarations {
    by_name: BTreeMap<String, Vec<(usize, Option<String>)>>,
}

impl Declarations {
    pub fn contains(&self, name: &str) -> bool {
        self.by_name.contains_key(name)
    }

    /// Declared type of `name` as seen from token `at`: the closest earlier
    /// declaration, or the first one in the file (fields may be declared
    /// after their use).
    pub fn type_of(&self, name: &str, at: usize) -> Option<&str> {
        let decls = self.by_name.get(name)?;
        let chosen = decls.iter().rev().find(|(idx, _)| *idx < at).or_else(|| decls.first())?;
        chosen.1.as_deref()
    }
}

/// Everything the encoder needs to know about one file's code tokens.
#[derive(Debug, Clone, Default)]
pub(crate) struct Analysis {
    /// Code tokens: comments and the end marker removed, type arguments stripped.
    pub tokens: Vec<LexToken>,
    pub statements: Vec<Vec<usize>>,
    pub decls: Declarations,
    pub sites: Vec<InvocationSite>,
    pub skipped: usize,
    classes: Vec<(usize, String)>,
}

const DECL_MODIFIERS: &[&str] = &[
    "void", "public", "private", "protected", "static", "final", "abstract", "synchronized",
    "native", "default", "strictfp", "transient", "volatile",
];

/// Extracts every invocation site from a lexed token stream.
pub fn extract_invocations(tokens: &[LexToken]) -> Vec<InvocationSite> {
    Analysis::new(tokens, "").sites
}

/// Like [`extract_invocations`], also returning the number of call patterns
/// that were skipped as unparseable.
pub fn extract_invocations_with_stats(tokens: &[LexToken]) -> (Vec<InvocationSite>, usize) {
    let a = Analysis::new(tokens, "");
    (a.sites, a.skipped)
}

fn is_ident(t: &LexToken) -> bool {
    t.kind == TokenKind::Identifier
}

fn starts_upper(s: &str) -> bool {
    s.chars().next().is_some_and(|c| c.is_ascii_uppercase())
}

fn is_all_caps(s: &str) -> bool {
    s.chars().any(|c| c.is_ascii_uppercase()) && !s.chars().any(|c| c.is_ascii_lowercase())
}

pub(crate) fn literal_type(tok: &LexToken) -> &'static str {
    match tok.kind {
        TokenKind::StringLiteral => "java.lang.String",
        TokenKind::CharLiteral => "char",
        TokenKind::NumberLiteral => {
            let t = tok.text.to_ascii_lowercase();
            let hex = t.starts_with("0x");
            if t.ends_with('l') {
                "long"
            } else if !hex && t.ends_with('f') {
                "float"
            } else if !hex && (t.ends_with('d') || t.contains('.') || t.contains('e')) {
                "double"
            } else {
                "int"
            }
        }
        _ if tok.text == "null" => "null",
        _ => "boolean",
    }
}

/// Removes generic type-argument lists (`List<String>` becomes `List`).
fn strip_type_arguments(tokens: Vec<LexToken>) -> Vec<LexToken> {
    let mut out: Vec<LexToken> = Vec::with_capacity(tokens.len());
    let mut i = 0;
    while i < tokens.len() {
        let tok = &tokens[i];
        let after_type = out.last().is_some_and(|p| (is_ident(p) && starts_upper(&p.text)) || p.is_sep("."));
        if tok.is_op("<") && after_type {
            if let Some(end) = type_argument_end(&tokens, i) {
                i = end;
                continue;
            }
        }
        out.push(tok.clone());
        i += 1;
    }
    out
}

/// If a type-argument list opens at `open`, the index just past its close.
fn type_argument_end(tokens: &[LexToken], open: usize) -> Option<usize> {
    let mut depth: i64 = 0;
    for (j, t) in tokens.iter().enumerate().skip(open) {
        let delta = match (t.kind, t.text.as_str()) {
            (TokenKind::Operator, "<") => 1,
            (TokenKind::Operator, ">") => -1,
            (TokenKind::Operator, ">>") => -2,
            (TokenKind::Operator, ">>>") => -3,
            (TokenKind::Identifier, _) => 0,
            (TokenKind::Separator, "." | "," | "[" | "]") => 0,
            (TokenKind::Operator, "?" | "&") => 0,
            (TokenKind::Keyword, "extends" | "super") => 0,
            (TokenKind::Keyword, k) if is_primitive(k) => 0,
            _ => return None,
        };
        depth += delta;
        if depth == 0 {
            return Some(j + 1);
        }
        if depth < 0 {
            return None;
        }
    }
    None
}

/// Splits the code tokens into statements: maximal runs delimited by `;`,
/// `{` or `}` outside parentheses. Blocks nested inside parentheses (lambda
/// bodies, anonymous classes in arguments) form their own statements and
/// are excluded from the enclosing one.
fn split_statements(tokens: &[LexToken]) -> Vec<Vec<usize>> {
    struct Frame {
        paren: usize,
        current: Vec<usize>,
    }
    let mut statements = Vec::new();
    let mut stack = vec![Frame { paren: 0, current: Vec::new() }];
    let flush = |frame: &mut Frame, statements: &mut Vec<Vec<usize>>| {
        if !frame.current.is_empty() {
            statements.push(std::mem::take(&mut frame.current));
        }
    };
    for (i, t) in tokens.iter().enumerate() {
        let top = stack.last_mut().expect("frame stack never empty");
        match (t.kind, t.text.as_str()) {
            (TokenKind::Separator, "(" | "[") => {
                top.paren += 1;
                top.current.push(i);
            }
            (TokenKind::Separator, ")" | "]") => {
                top.paren = top.paren.saturating_sub(1);
                top.current.push(i);
            }
            (TokenKind::Separator, "{") => {
                if top.paren == 0 {
                    flush(top, &mut statements);
                }
                stack.push(Frame { paren: 0, current: Vec::new() });
            }
            (TokenKind::Separator, "}") => {
                flush(top, &mut statements);
                if stack.len() > 1 {
                    stack.pop();
                }
            }
            (TokenKind::Separator, ";") if top.paren == 0 => flush(top, &mut statements),
            _ => top.current.push(i),
        }
    }
    while let Some(mut frame) = stack.pop() {
        flush(&mut frame, &mut statements);
    }
    statements.sort_by_key(|s| s[0]);
    statements
}

/// Start index of the dotted identifier chain ending at `end` (inclusive).
fn chain_start(tokens: &[LexToken], end: usize) -> usize {
    let mut j = end;
    while j >= 2 && tokens[j - 1].is_sep(".") && is_ident(&tokens[j - 2]) {
        j -= 2;
    }
    if j >= 2 && tokens[j - 1].is_sep(".") && (tokens[j - 2].is_keyword("this") || tokens[j - 2].is_keyword("super")) {
        j -= 2;
    }
    j
}

fn collect_declarations(tokens: &[LexToken]) -> Declarations {
    let mut decls = Declarations::default();
    for i in 0..tokens.len() {
        let t = &tokens[i];
        let is_type_tok = is_ident(t) || (t.kind == TokenKind::Keyword && is_primitive(&t.text));
        if !is_type_tok || tokens.get(i + 1).is_some_and(|n| n.is_sep(".")) {
            continue;
        }
        let mut j = i + 1;
        let mut dims = 0;
        while j + 1 < tokens.len() && tokens[j].is_sep("[") && tokens[j + 1].is_sep("]") {
            dims += 1;
            j += 2;
        }
        if tokens.get(j).is_some_and(|n| n.is_sep("...")) {
            dims += 1;
            j += 1;
        }
        let Some(name) = tokens.get(j).filter(|n| is_ident(n)) else { continue };
        let follows = tokens.get(j + 1).is_some_and(|f| {
            matches!((f.kind, f.text.as_str()), (TokenKind::Separator, ";" | "," | ")" | "[") | (TokenKind::Operator, "=" | ":"))
        });
        if !follows {
            continue;
        }
        let start = if is_ident(t) { chain_start(tokens, i) } else { i };
        if start > 0 && tokens[start - 1].is_sep(".") {
            continue;
        }
        let type_name: Vec<&str> = tokens[start..=i].iter().step_by(2).map(|t| t.text.as_str()).collect();
        let type_name = type_name.join(".");
        let ty = (type_name != "var").then(|| format!("{}{}", type_name, "[]".repeat(dims)));
        decls.by_name.entry(name.text.clone()).or_default().push((j, ty));
    }
    decls
}

pub(crate) fn matching_close(tokens: &[LexToken], open: usize) -> Option<usize> {
    let mut depth = 0usize;
    for (j, t) in tokens.iter().enumerate().skip(open) {
        if t.is_sep("(") {
            depth += 1;
        } else if t.is_sep(")") {
            depth -= 1;
            if depth == 0 {
                return Some(j);
            }
        }
    }
    None
}

fn matching_open(tokens: &[LexToken], close: usize) -> Option<usize> {
    let mut depth = 0usize;
    for j in (0..=close).rev() {
        let t = &tokens[j];
        if t.is_sep(")") {
            depth += 1;
        } else if t.is_sep("(") {
            depth -= 1;
            if depth == 0 {
                return Some(j);
            }
        }
    }
    None
}

/// Splits `range` at commas that are not nested in brackets.
fn split_top_level(tokens: &[LexToken], range: Range<usize>) -> Vec<Range<usize>> {
    let mut parts = Vec::new();
    let mut depth = 0i64;
    let mut start = range.start;
    for j in range.clone() {
        let t = &tokens[j];
        if t.kind == TokenKind::Separator {
            match t.text.as_str() {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => depth -= 1,
                "," if depth == 0 => {
                    parts.push(start..j);
                    start = j + 1;
                }
                _ => {}
            }
        }
    }
    if range.start < range.end {
        parts.push(start..range.end);
    }
    parts
}

fn ends_operand(tokens: &[LexToken], j: usize) -> bool {
    let t = &tokens[j];
    match t.kind {
        TokenKind::Identifier | TokenKind::NumberLiteral | TokenKind::StringLiteral | TokenKind::CharLiteral => true,
        TokenKind::Keyword => matches!(t.text.as_str(), "true" | "false" | "null" | "this"),
        TokenKind::Separator => matches!(t.text.as_str(), ")" | "]"),
        TokenKind::Operator if matches!(t.text.as_str(), "++" | "--") => j > 0 && ends_operand(tokens, j - 1),
        _ => false,
    }
}

impl Analysis {
    pub fn new(raw: &[LexToken], file: &str) -> Self {
        let code: Vec<LexToken> = raw
            .iter()
            .filter(|t| !matches!(t.kind, TokenKind::Comment | TokenKind::Eof))
            .cloned()
            .collect();
        let tokens = strip_type_arguments(code);
        let statements = split_statements(&tokens);
        let decls = collect_declarations(&tokens);
        let classes = tokens
            .windows(2)
            .enumerate()
            .filter(|(_, w)| {
                w[0].kind == TokenKind::Keyword
                    && matches!(w[0].text.as_str(), "class" | "interface" | "enum")
                    && is_ident(&w[1])
            })
            .map(|(i, w)| (i, w[1].text.clone()))
            .collect();
        let mut analysis = Analysis { tokens, statements, decls, sites: Vec::new(), skipped: 0, classes };
        analysis.find_sites(file);
        analysis
    }

    fn enclosing_class(&self, at: usize) -> Option<&str> {
        self.classes.iter().rev().find(|(i, _)| *i < at).map(|(_, n)| n.as_str())
    }

    fn find_sites(&mut self, file: &str) {
        let mut statement_of = vec![usize::MAX; self.tokens.len()];
        for (s, stmt) in self.statements.iter().enumerate() {
            for &i in stmt {
                statement_of[i] = s;
            }
        }
        let toks = &self.tokens;
        let mut sites = Vec::new();
        let mut skipped = 0;
        for i in 0..toks.len() {
            if !is_ident(&toks[i]) || !toks.get(i + 1).is_some_and(|t| t.is_sep("(")) {
                continue;
            }
            let start = chain_start(toks, i);
            let before = start.checked_sub(1).map(|b| &toks[b]);
            if before.is_some_and(|b| b.is_keyword("new") || b.is_sep("@")) {
                continue;
            }
            if start == i {
                let declaration = before.is_some_and(|b| {
                    is_ident(b)
                        || b.is_sep("]")
                        || (b.kind == TokenKind::Keyword && (is_primitive(&b.text) || DECL_MODIFIERS.contains(&b.text.as_str())))
                });
                if declaration {
                    continue;
                }
            }
            let Some(close) = matching_close(toks, i + 1) else {
                skipped += 1;
                continue;
            };
            if toks.get(close + 1).is_some_and(|t| t.is_sep("{") || t.is_keyword("throws")) {
                continue;
            }
            let chain: Vec<&str> = toks[start..i].iter().step_by(2).map(|t| t.text.as_str()).collect();
            let (receiver, span_start) = if chain.is_empty() {
                if before.is_some_and(|b| b.is_sep(".")) {
                    // Receiver is an arbitrary expression; only call results are supported.
                    let call_result = i >= 2
                        && toks[i - 2].is_sep(")")
                        && matching_open(toks, i - 2).is_some_and(|o| o > 0 && is_ident(&toks[o - 1]));
                    if !call_result {
                        skipped += 1;
                        continue;
                    }
                    (Receiver::Call, i - 1)
                } else {
                    (Receiver::None, i)
                }
            } else if before.is_some_and(|b| b.is_sep(".")) {
                skipped += 1;
                continue;
            } else {
                match self.classify_receiver(&chain) {
                    Some(r) => (r, start),
                    None => {
                        skipped += 1;
                        continue;
                    }
                }
            };
            let args: Option<Vec<ArgShape>> = split_top_level(toks, i + 2..close)
                .into_iter()
                .map(|r| self.classify_arg(r))
                .collect();
            let Some(args) = args else {
                skipped += 1;
                continue;
            };
            let statement = statement_of[i];
            let enclosing_context = self
                .statements
                .get(statement)
                .map(|s| s.iter().map(|&k| toks[k].clone()).collect())
                .unwrap_or_default();
            sites.push(InvocationSite {
                method_name: toks[i].text.clone(),
                receiver,
                args,
                enclosing_context,
                file: file.to_string(),
                line: toks[i].line,
                span: span_start..close + 1,
                name_index: i,
                statement,
            });
        }
        self.sites = sites;
        self.skipped = skipped;
    }

    fn classify_receiver(&self, chain: &[&str]) -> Option<Receiver> {
        match chain {
            ["this"] => Some(Receiver::This),
            ["this", field] if self.decls.contains(field) => Some(Receiver::Variable(field.to_string())),
            ["this", ..] | ["super", ..] => None,
            [var] if self.decls.contains(var) => Some(Receiver::Variable(var.to_string())),
            [first, ..] if self.decls.contains(first) => None,
            [ty] if starts_upper(ty) => Some(Receiver::StaticType(ty.to_string())),
            [var] => Some(Receiver::Variable(var.to_string())),
            chain => Some(Receiver::FieldChain(chain.iter().map(|s| s.to_string()).collect())),
        }
    }

    fn text_of(&self, range: Range<usize>) -> String {
        self.tokens[range].iter().map(|t| t.text.as_str()).collect()
    }

    fn classify_arg(&self, range: Range<usize>) -> Option<ArgShape> {
        let toks = &self.tokens;
        if range.is_empty() {
            return None;
        }
        let mut depth = 0i64;
        let mut operands = Vec::new();
        let mut ops = Vec::new();
        let mut start = range.start;
        for j in range.clone() {
            let t = &toks[j];
            match t.kind {
                TokenKind::Separator if matches!(t.text.as_str(), "(" | "[" | "{") => depth += 1,
                TokenKind::Separator if matches!(t.text.as_str(), ")" | "]" | "}") => depth -= 1,
                TokenKind::Operator if depth == 0 => {
                    if t.text == "->" {
                        return None;
                    }
                    let binary = j > start && !matches!(t.text.as_str(), "++" | "--") && ends_operand(toks, j - 1);
                    if binary {
                        operands.push(start..j);
                        ops.push(t.text.clone());
                        start = j + 1;
                    }
                }
                _ => {}
            }
        }
        operands.push(start..range.end);
        if ops.is_empty() {
            return self.classify_atom(range);
        }
        let operands: Option<Vec<ArgShape>> = operands.into_iter().map(|r| self.classify_atom(r)).collect();
        Some(ArgShape {
            role: ArgRole::Compound,
            type_hint: UNKNOWN_TYPE.to_string(),
            operator_parts: ops,
            operands: operands?,
            text: self.text_of(range),
        })
    }

    fn classify_atom(&self, range: Range<usize>) -> Option<ArgShape> {
        let toks = &self.tokens;
        let text = self.text_of(range.clone());
        let mut a = range.start;
        let mut b = range.end;
        while a < b && toks[a].kind == TokenKind::Operator && matches!(toks[a].text.as_str(), "-" | "+" | "!" | "~" | "++" | "--") {
            a += 1;
        }
        while b > a && toks[b - 1].kind == TokenKind::Operator && matches!(toks[b - 1].text.as_str(), "++" | "--") {
            b -= 1;
        }
        if a >= b {
            return None;
        }
        let first = &toks[a];
        let last = &toks[b - 1];

        if b - a == 1 {
            return if first.is_literal() {
                Some(ArgShape::atom(ArgRole::Literal, literal_type(first), text))
            } else if is_ident(first) {
                let ty = self.decls.type_of(&first.text, a).unwrap_or(UNKNOWN_TYPE);
                Some(ArgShape::atom(ArgRole::Variable, ty, text))
            } else if first.is_keyword("this") {
                let ty = self.enclosing_class(a).unwrap_or(UNKNOWN_TYPE);
                Some(ArgShape::atom(ArgRole::Variable, ty, text))
            } else {
                None
            };
        }
        if first.is_keyword("new") {
            return Some(ArgShape::atom(ArgRole::NestedCall, UNKNOWN_TYPE, text));
        }
        // Dotted chains: constants and `this.field`.
        let is_chain = (b - a) % 2 == 1
            && toks[a..b].iter().enumerate().all(|(k, t)| {
                if k % 2 == 1 {
                    t.is_sep(".")
                } else {
                    is_ident(t) || (k == 0 && t.is_keyword("this"))
                }
            });
        if is_chain {
            let segs: Vec<&str> = toks[a..b].iter().step_by(2).map(|t| t.text.as_str()).collect();
            return match segs.as_slice() {
                ["this", field] if self.decls.contains(field) => {
                    let ty = self.decls.type_of(field, a).unwrap_or(UNKNOWN_TYPE);
                    Some(ArgShape::atom(ArgRole::Variable, ty, text))
                }
                [first, .., last] if *first != "this" && !self.decls.contains(first) && is_all_caps(last) => {
                    let owner = segs[..segs.len() - 1].join(".");
                    Some(ArgShape::atom(ArgRole::ConstantRef, owner, text))
                }
                _ => None,
            };
        }
        if last.is_sep(")") {
            let open = matching_open(toks, b - 1)?;
            if open > a && is_ident(&toks[open - 1]) {
                return Some(ArgShape::atom(ArgRole::NestedCall, UNKNOWN_TYPE, text));
            }
            return None;
        }
        // Cast: `(Type) operand`.
        if first.is_sep("(") && a + 3 < b && toks[a + 2].is_sep(")") {
            let ty = &toks[a + 1];
            let type_like = (is_ident(ty) && starts_upper(&ty.text)) || (ty.kind == TokenKind::Keyword && is_primitive(&ty.text));
            if type_like {
                let mut inner = self.classify_atom(a + 3..b)?;
                if inner.role == ArgRole::Variable || inner.role == ArgRole::Literal {
                    inner.type_hint = ty.text.clone();
                }
                inner.text = text;
                return Some(inner);
            }
        }
        None
    }
}
