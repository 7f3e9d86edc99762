//! Aligned source/target sentences, one per invocation site.

use thiserror::Error;

use super::template::{ExpressionTemplate, Slot, TemplateArg, TemplateReceiver};
use super::tokens::{escape_text, method_source_token, ElementKind, SourceToken, TargetToken, CALL_SLOT, LIT_SLOT, VAR_SLOT};
use crate::extractor::{
    is_fqn, is_primitive, literal_type, matching_close, simple_name, Analysis, ArgRole, ArgShape, InvocationSite,
    ParsedFile, Receiver, TokenKind, TypeDatabase, UNKNOWN_TYPE,
};

/// Library label for invocations whose declaring type is not in the database.
pub const OTHER_LIBRARY: &str = "other";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PairError {
    #[error("source has {source_len} tokens but target has {target_len}")]
    LengthMismatch { source_len: usize, target_len: usize },
    #[error("token kinds differ at position {0}")]
    KindMismatch(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParallelPair {
    source: Vec<SourceToken>,
    target: Vec<TargetToken>,
    library: String,
    origin: String,
}

impl ParallelPair {
    pub fn new(
        source: Vec<SourceToken>,
        target: Vec<TargetToken>,
        library: impl Into<String>,
        origin: impl Into<String>,
    ) -> Result<Self, PairError> {
        if source.len() != target.len() {
            return Err(PairError::LengthMismatch { source_len: source.len(), target_len: target.len() });
        }
        if let Some(i) = source.iter().zip(&target).position(|(s, t)| s.kind() != t.kind()) {
            return Err(PairError::KindMismatch(i));
        }
        Ok(ParallelPair { source, target, library: library.into(), origin: origin.into() })
    }

    /// Builds a pair from serialized tokens, inferring each token's kind.
    pub fn from_canonical<S: AsRef<str>, T: AsRef<str>>(
        source: &[S],
        target: &[T],
        library: impl Into<String>,
        origin: impl Into<String>,
    ) -> Result<Self, PairError> {
        let source = source.iter().map(|s| SourceToken::from_canonical(s.as_ref())).collect();
        let target = target.iter().map(|t| TargetToken::from_canonical(t.as_ref())).collect();
        Self::new(source, target, library, origin)
    }

    pub fn source(&self) -> &[SourceToken] {
        &self.source
    }

    pub fn target(&self) -> &[TargetToken] {
        &self.target
    }

    pub fn library(&self) -> &str {
        &self.library
    }

    pub fn origin(&self) -> &str {
        &self.origin
    }

    pub fn len(&self) -> usize {
        self.source.len()
    }

    pub fn is_empty(&self) -> bool {
        self.source.is_empty()
    }

    pub fn source_strings(&self) -> Vec<&str> {
        self.source.iter().map(SourceToken::canonical).collect()
    }

    pub fn target_strings(&self) -> Vec<&str> {
        self.target.iter().map(TargetToken::canonical).collect()
    }

    /// Positions of method-name tokens.
    pub fn method_positions(&self) -> Vec<usize> {
        self.source
            .iter()
            .enumerate()
            .filter(|(_, t)| t.kind() == ElementKind::MethodName)
            .map(|(i, _)| i)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("unresolved type: {0}")]
    UnresolvedType(String),
    #[error(transparent)]
    Pair(#[from] PairError),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EncodeOptions {
    /// Also emit a second pair per site whose method token carries the
    /// argument types and operators, so detailed queries are in vocabulary.
    pub detailed: bool,
}

/// Pairs of one file plus the number of sites dropped for unresolved types.
#[derive(Debug, Clone, Default)]
pub struct FilePairs {
    pub pairs: Vec<ParallelPair>,
    pub dropped: usize,
}

/// Encodes every invocation site of `file`.
pub fn encode_file(file: &ParsedFile, db: &TypeDatabase, options: EncodeOptions) -> FilePairs {
    let mut out = FilePairs::default();
    for site in file.sites() {
        match Encoder::new(file, db).encode(site, options) {
            Ok(pairs) => out.pairs.extend(pairs),
            Err(EncodeError::UnresolvedType(ty)) => {
                log::debug!("{}:{}: dropped {} ({ty} unresolved)", file.path, site.line, site.method_name);
                out.dropped += 1;
            }
            Err(EncodeError::Pair(e)) => panic!("encoder produced an invalid pair: {e}"),
        }
    }
    out
}

/// The compact pair for one site.
pub fn build_parallel_pair(file: &ParsedFile, site: &InvocationSite, db: &TypeDatabase) -> Result<ParallelPair, EncodeError> {
    let mut pairs = Encoder::new(file, db).encode(site, EncodeOptions::default())?;
    Ok(pairs.remove(0))
}

struct Encoder<'a> {
    file: &'a ParsedFile,
    analysis: &'a Analysis,
    db: &'a TypeDatabase,
    source: Vec<SourceToken>,
    target: Vec<TargetToken>,
}

fn unresolved(what: &str) -> EncodeError {
    EncodeError::UnresolvedType(what.to_string())
}

fn starts_upper(s: &str) -> bool {
    s.chars().next().is_some_and(|c| c.is_ascii_uppercase())
}

/// Index into `stmt` of the first token at or after code index `end`.
fn skip_to(stmt: &[usize], mut p: usize, end: usize) -> usize {
    while p < stmt.len() && stmt[p] < end {
        p += 1;
    }
    p
}

/// `View[]` becomes `View` and `[]`.
fn split_dims(ty: &str) -> (&str, &str) {
    let base = ty.trim_end_matches("[]");
    (base, &ty[base.len()..])
}

fn simple_type(ty: &str) -> String {
    let (base, dims) = split_dims(ty);
    format!("{}{dims}", simple_name(base))
}

struct Anchor {
    head: Option<(ElementKind, String, String)>,
    receiver: TemplateReceiver,
    receiver_type: Option<String>,
}

impl<'a> Encoder<'a> {
    fn new(file: &'a ParsedFile, db: &'a TypeDatabase) -> Self {
        Encoder { file, analysis: &file.analysis, db, source: Vec::new(), target: Vec::new() }
    }

    fn push(&mut self, kind: ElementKind, source: String, target: String) {
        self.source.push(SourceToken::new(kind, source));
        self.target.push(TargetToken::new(kind, target));
    }

    fn push_var(&mut self, ty: String) {
        self.push(ElementKind::Slot, VAR_SLOT.to_string(), format!("{VAR_SLOT}:{ty}"));
    }

    fn push_lit(&mut self, ty: &str) {
        self.push(ElementKind::Slot, LIT_SLOT.to_string(), format!("{LIT_SLOT}:{ty}"));
    }

    fn push_call(&mut self) {
        self.push(ElementKind::Slot, CALL_SLOT.to_string(), CALL_SLOT.to_string());
    }

    fn push_structural(&mut self, text: &str) {
        let t = escape_text(text);
        self.push(ElementKind::Structural, t.clone(), t);
    }

    /// Resolves a simple, qualified or primitive type name.
    fn resolve_type(&self, hint: &str) -> Result<String, EncodeError> {
        if hint == UNKNOWN_TYPE {
            return Err(unresolved(hint));
        }
        let (base, dims) = split_dims(hint);
        if is_primitive(base) || base == "null" {
            return Ok(hint.to_string());
        }
        if !is_fqn(base) {
            return Err(unresolved(hint));
        }
        if !starts_upper(base) {
            // Already package-qualified.
            return if base.contains('.') { Ok(hint.to_string()) } else { Err(unresolved(hint)) };
        }
        let (first, rest) = match base.split_once('.') {
            Some((f, r)) => (f, Some(r)),
            None => (base, None),
        };
        let fqn = self.file.resolve(first, self.db).ok_or_else(|| unresolved(first))?;
        Ok(match rest {
            Some(r) => format!("{fqn}.{r}{dims}"),
            None => format!("{fqn}{dims}"),
        })
    }

    fn variable_type(&self, name: &str, at: usize) -> Result<String, EncodeError> {
        let declared = self.analysis.decls.type_of(name, at).ok_or_else(|| unresolved(name))?;
        self.resolve_type(declared)
    }

    /// Type of `owner.f1.f2...` from the database's field records.
    fn field_chain_type(&self, owner: &str, fields: &[&str]) -> Option<String> {
        let mut ty = owner.to_string();
        for f in fields {
            ty = if *f == "length" && ty.ends_with("[]") {
                "int".to_string()
            } else {
                self.db.field_type(&ty, f)?.to_string()
            };
        }
        Some(ty)
    }

    /// Splits a type-led chain at its first uppercase segment and returns
    /// (source text, full target path, index of that segment).
    fn qualify_chain(&self, segs: &[&str]) -> Result<(String, String, usize), EncodeError> {
        let u = segs.iter().position(|s| starts_upper(s)).ok_or_else(|| unresolved(&segs.join(".")))?;
        let source = segs[u..].join(".");
        let target = if u == 0 {
            let fqn = self.file.resolve(segs[0], self.db).ok_or_else(|| unresolved(segs[0]))?;
            std::iter::once(fqn.as_str()).chain(segs[1..].iter().copied()).collect::<Vec<_>>().join(".")
        } else {
            segs.join(".")
        };
        Ok((source, target, u))
    }

    fn anchor(&self, site: &InvocationSite) -> Result<Anchor, EncodeError> {
        Ok(match &site.receiver {
            Receiver::Variable(v) => {
                let ty = self.variable_type(v, site.name_index)?;
                Anchor {
                    head: Some((ElementKind::Slot, VAR_SLOT.to_string(), format!("{VAR_SLOT}:{ty}"))),
                    receiver: TemplateReceiver::Var(ty.clone()),
                    receiver_type: Some(ty),
                }
            }
            Receiver::StaticType(t) => {
                let fqn = self.resolve_type(t)?;
                Anchor {
                    head: Some((ElementKind::PartialType, t.clone(), fqn.clone())),
                    receiver: TemplateReceiver::Path(fqn.clone()),
                    receiver_type: Some(fqn),
                }
            }
            Receiver::FieldChain(segs) => {
                let segs: Vec<&str> = segs.iter().map(String::as_str).collect();
                let (source, target, u) = self.qualify_chain(&segs)?;
                let owner_len = target.split('.').count() - (segs.len() - u - 1);
                let owner: Vec<&str> = target.split('.').take(owner_len).collect();
                let receiver_type = self.field_chain_type(&owner.join("."), &segs[u + 1..]);
                Anchor {
                    head: Some((ElementKind::PartialType, source, target.clone())),
                    receiver: TemplateReceiver::Path(target),
                    receiver_type,
                }
            }
            Receiver::This => Anchor {
                head: Some((ElementKind::Structural, "this".into(), "this".into())),
                receiver: TemplateReceiver::This,
                receiver_type: None,
            },
            Receiver::None => Anchor { head: None, receiver: TemplateReceiver::None, receiver_type: None },
            Receiver::Call => Anchor { head: None, receiver: TemplateReceiver::Call, receiver_type: None },
        })
    }

    fn slot(&self, arg: &ArgShape) -> Result<Slot, EncodeError> {
        Ok(match arg.role {
            ArgRole::Variable => Slot::Var(self.resolve_type(&arg.type_hint)?),
            ArgRole::Literal => Slot::Lit(self.resolve_type(&arg.type_hint)?),
            ArgRole::NestedCall => Slot::Call,
            ArgRole::ConstantRef => {
                let owner = self.resolve_type(&arg.type_hint)?;
                let name = arg.text.rsplit('.').next().unwrap_or(&arg.text);
                Slot::Const(format!("{owner}.{name}"))
            }
            ArgRole::Compound => return Err(unresolved(&arg.text)),
        })
    }

    fn template_arg(&self, arg: &ArgShape) -> Result<TemplateArg, EncodeError> {
        if arg.role != ArgRole::Compound {
            return Ok(TemplateArg::single(self.slot(arg)?));
        }
        Ok(TemplateArg {
            operands: arg.operands.iter().map(|o| self.slot(o)).collect::<Result<_, _>>()?,
            operators: arg.operator_parts.clone(),
        })
    }

    fn library(&self, receiver_type: Option<&str>, name: &str, arity: usize) -> String {
        let declaring = match receiver_type {
            // A receiver type outside the database gives no evidence either way.
            Some(t) if !self.db.contains_fqn(t) => None,
            r => self.db.declaring_type(r, name, arity).or(r),
        };
        declaring.and_then(|d| self.db.library_of(d)).unwrap_or(OTHER_LIBRARY).to_string()
    }

    fn encode(mut self, site: &InvocationSite, options: EncodeOptions) -> Result<Vec<ParallelPair>, EncodeError> {
        let anchor = self.anchor(site)?;
        let args: Vec<TemplateArg> = site.args.iter().map(|a| self.template_arg(a)).collect::<Result<_, _>>()?;
        let template = ExpressionTemplate { receiver: anchor.receiver, method: site.method_name.clone(), args };
        let library = self.library(anchor.receiver_type.as_deref(), &site.method_name, site.args.len());

        let analysis = self.analysis;
        let toks = &analysis.tokens;
        let stmt = &analysis.statements[site.statement];
        let others: Vec<&InvocationSite> = analysis
            .sites
            .iter()
            .filter(|s| s.statement == site.statement && s.name_index != site.name_index)
            .collect();
        let contains_anchor = |start: usize, end: usize| start <= site.span.start && site.span.end <= end;

        let mut method_pos = None;
        let mut p = 0;
        while p < stmt.len() {
            let k = stmt[p];
            if k == site.span.start {
                if let Some((kind, s, t)) = anchor.head.clone() {
                    self.push(kind, s, t);
                }
                method_pos = Some(self.source.len());
                self.push(ElementKind::MethodName, method_source_token::<&str, &str>(&site.method_name, &[], &[]), template.serialize());
                p = skip_to(stmt, p, site.span.end);
                continue;
            }
            if let Some(other) = others.iter().filter(|s| s.span.start == k).max_by_key(|s| s.span.end) {
                self.push_call();
                p = if contains_anchor(other.span.start, other.span.end) {
                    skip_to(stmt, p, other.name_index + 2)
                } else {
                    skip_to(stmt, p, other.span.end)
                };
                continue;
            }
            let t = &toks[k];
            match t.kind {
                TokenKind::Separator | TokenKind::Comment | TokenKind::Eof => p += 1,
                TokenKind::Operator => {
                    self.push_structural(&t.text);
                    p += 1;
                }
                TokenKind::StringLiteral | TokenKind::CharLiteral | TokenKind::NumberLiteral => {
                    self.push_lit(literal_type(t));
                    p += 1;
                }
                TokenKind::Keyword if matches!(t.text.as_str(), "true" | "false" | "null") => {
                    self.push_lit(literal_type(t));
                    p += 1;
                }
                TokenKind::Keyword if t.text != "this" => {
                    self.push_structural(&t.text);
                    p += 1;
                }
                TokenKind::Keyword | TokenKind::Identifier => p = self.chain(stmt, p, site)?,
            }
        }
        let method_pos = method_pos.expect("anchor span starts inside its statement");

        let origin = format!("{}:{}", self.file.path, site.line);
        let compact = ParallelPair::new(self.source.clone(), self.target.clone(), library.clone(), origin.clone())?;
        let mut pairs = vec![compact];
        if options.detailed {
            let (vars, words) = detailed_hints(&template);
            if !vars.is_empty() || !words.is_empty() {
                let mut source = self.source;
                source[method_pos] =
                    SourceToken::new(ElementKind::MethodName, method_source_token(&site.method_name, &vars, &words));
                pairs.push(ParallelPair::new(source, self.target, library, origin)?);
            }
        }
        Ok(pairs)
    }

    /// Encodes the dotted chain starting at `stmt[p]`; returns the next index.
    fn chain(&mut self, stmt: &[usize], p: usize, site: &InvocationSite) -> Result<usize, EncodeError> {
        let analysis = self.analysis;
        let toks = &analysis.tokens;
        let at = |q: usize| stmt.get(q).map(|&k| &toks[k]);
        let adjacent = |q: usize| q + 1 < stmt.len() && stmt[q + 1] == stmt[q] + 1;
        let mut q = p;
        while adjacent(q)
            && adjacent(q + 1)
            && at(q + 1).is_some_and(|t| t.is_sep("."))
            && at(q + 2).is_some_and(|t| t.kind == TokenKind::Identifier)
        {
            q += 2;
        }
        let segs: Vec<&str> = (p..=q).step_by(2).map(|i| toks[stmt[i]].text.as_str()).collect();
        let next = q + 1;
        let prev = p.checked_sub(1).and_then(at);
        let followed_by_call = adjacent(q) && at(next).is_some_and(|t| t.is_sep("("));

        if prev.is_some_and(|t| t.is_sep("::")) {
            return Ok(next);
        }
        if followed_by_call && !prev.is_some_and(|t| t.is_keyword("new")) {
            // A call the extractor could not classify.
            self.push_call();
            let open = stmt[next];
            let close = matching_close(toks, open).unwrap_or(toks.len());
            return Ok(if open < site.span.start && site.span.end <= close {
                skip_to(stmt, next, open + 1)
            } else {
                skip_to(stmt, next, close + 1)
            });
        }
        let decls = &analysis.decls;
        match segs.as_slice() {
            ["this"] => self.push_structural("this"),
            ["this", field] if decls.contains(field) => {
                let ty = self.variable_type(field, stmt[p])?;
                self.push_var(ty);
            }
            ["super", ..] => self.push_structural("super"),
            ["var"] if at(next).is_some_and(|t| t.kind == TokenKind::Identifier) => self.push_structural("var"),
            [first, fields @ ..] if decls.contains(first) => {
                let ty = self.variable_type(first, stmt[p])?;
                let ty = self.field_chain_type(&ty, fields).ok_or_else(|| unresolved(&segs.join(".")))?;
                self.push_var(ty);
            }
            _ => {
                let (source, target, _) = self.qualify_chain(&segs)?;
                self.push(ElementKind::PartialType, source, target);
            }
        }
        Ok(next)
    }
}

/// Simple type names of the variable slots and the operators, in order.
fn detailed_hints(template: &ExpressionTemplate) -> (Vec<String>, Vec<String>) {
    let mut vars = Vec::new();
    let mut words = Vec::new();
    for arg in &template.args {
        for slot in &arg.operands {
            if let Slot::Var(t) = slot {
                vars.push(simple_type(t));
            }
        }
        words.extend(arg.operators.iter().cloned());
    }
    (vars, words)
}
