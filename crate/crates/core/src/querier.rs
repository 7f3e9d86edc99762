//! Developer queries: method-name suggestion, query encoding and rendering
//! of decoded templates.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::encoder::{
    method_source_token, split_subtokens, text_subtokens, ExpressionTemplate, Slot, TemplateArg, TemplateReceiver,
    IDEN_MARKER, OOV_SUFFIX,
};
use crate::translator::TranslationModel;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("the name index is empty")]
    EmptyIndex,
    #[error("no method name chosen")]
    MissingName,
}

/// Longest run of query words merged when it spells a single name subtoken.
const MAX_MERGE: usize = 4;

/// Method names seen in training, searchable by subtoken.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NameIndex {
    frequency: BTreeMap<String, u64>,
    subtokens: BTreeMap<String, BTreeSet<String>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Suggestion {
    pub name: String,
    pub score: f64,
    pub frequency: u64,
}

/// Merges consecutive query words whose concatenation is one of `target`'s
/// subtokens (`get bit map` against `getBitmap` gives `get bitmap`).
fn merge_runs(words: &[String], target: &BTreeSet<String>) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut i = 0;
    while i < words.len() {
        let mut taken = 1;
        for len in (2..=MAX_MERGE.min(words.len() - i)).rev() {
            if target.contains(&words[i..i + len].concat()) {
                taken = len;
                break;
            }
        }
        out.insert(words[i..i + taken].concat());
        i += taken;
    }
    out
}

impl NameIndex {
    pub fn from_counts(frequency: BTreeMap<String, u64>) -> Self {
        let mut subtokens: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for name in frequency.keys() {
            for s in split_subtokens(name) {
                subtokens.entry(s).or_default().insert(name.clone());
            }
        }
        NameIndex { frequency, subtokens }
    }

    pub fn is_empty(&self) -> bool {
        self.frequency.is_empty()
    }

    pub fn len(&self) -> usize {
        self.frequency.len()
    }

    pub fn contains(&self, name: &str) -> bool {
        self.frequency.contains_key(name)
    }

    pub fn frequency(&self, name: &str) -> Option<u64> {
        self.frequency.get(name).copied()
    }

    /// `(name, count)` sorted by name.
    pub fn frequencies(&self) -> impl Iterator<Item = (&str, u64)> {
        self.frequency.iter().map(|(n, &c)| (n.as_str(), c))
    }

    pub fn names_with_subtoken(&self, subtoken: &str) -> impl Iterator<Item = &str> {
        self.subtokens.get(subtoken).into_iter().flatten().map(String::as_str)
    }

    /// The `k` names most similar to `text` by subtoken Jaccard similarity,
    /// ties broken by training frequency and then by name. Names sharing no
    /// subtoken with the query are left out.
    pub fn suggest(&self, text: &str, k: usize) -> Result<Vec<Suggestion>, QueryError> {
        if self.is_empty() {
            return Err(QueryError::EmptyIndex);
        }
        let words = text_subtokens(text);
        let mut candidates: BTreeSet<&str> = BTreeSet::new();
        for i in 0..words.len() {
            for len in 1..=MAX_MERGE.min(words.len() - i) {
                candidates.extend(self.names_with_subtoken(&words[i..i + len].concat()));
            }
        }

        // (name, shared, union, frequency); the score is shared / union.
        let mut scored: Vec<(&str, usize, usize, u64)> = candidates
            .into_iter()
            .filter_map(|name| {
                let target: BTreeSet<String> = split_subtokens(name).into_iter().collect();
                let query = merge_runs(&words, &target);
                let shared = query.intersection(&target).count();
                let union = query.union(&target).count();
                (shared > 0).then(|| (name, shared, union, self.frequency[name]))
            })
            .collect();
        scored.sort_by(|a, b| {
            let by_score = (b.1 * a.2).cmp(&(a.1 * b.2));
            by_score.then_with(|| b.3.cmp(&a.3)).then_with(|| a.0.cmp(b.0))
        });
        Ok(scored
            .into_iter()
            .take(k)
            .map(|(name, shared, union, frequency)| Suggestion {
                name: name.to_string(),
                score: shared as f64 / union as f64,
                frequency,
            })
            .collect())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DeveloperQuery {
    pub name_text: Option<String>,
    pub chosen_name: Option<String>,
    /// Type names, in argument order.
    pub variables: Vec<String>,
    /// Operators or other hint words, in order.
    pub words: Vec<String>,
    /// Source tokens of the surrounding code. A token containing `#iden`
    /// marks where the invocation goes; without one it is appended.
    pub context: Vec<String>,
}

/// Source sentence for a query.
pub fn encode_query(q: &DeveloperQuery) -> Result<Vec<String>, QueryError> {
    let name = q.chosen_name.as_deref().filter(|n| !n.is_empty()).ok_or(QueryError::MissingName)?;
    let token = method_source_token(name, &q.variables, &q.words);
    let mut out = q.context.clone();
    match out.iter().position(|t| t.contains(IDEN_MARKER)) {
        Some(i) => out[i] = token,
        None => out.push(token),
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PlaceholderKind {
    Var,
    Lit,
    Call,
}

impl PlaceholderKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PlaceholderKind::Var => "var",
            PlaceholderKind::Lit => "lit",
            PlaceholderKind::Call => "call",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Placeholder {
    /// Character offset of the marker in the display text.
    pub position: usize,
    pub kind: PlaceholderKind,
    /// Fully qualified type; none for calls.
    pub type_name: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderedResult {
    pub display: String,
    pub placeholders: Vec<Placeholder>,
    pub raw_target: String,
    pub score: f64,
    pub renderable: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot render target token {0}")]
pub struct UnparseableTarget(pub String);

/// Drops the leading package segments: `java.lang.System.out` gives
/// `System.out`. Names without an uppercase segment are kept whole.
pub fn shorten(path: &str) -> &str {
    let mut offset = 0;
    for seg in path.split('.') {
        if seg.chars().next().is_some_and(|c| c.is_ascii_uppercase()) {
            return &path[offset..];
        }
        offset += seg.len() + 1;
    }
    path
}

struct Renderer {
    display: String,
    placeholders: Vec<Placeholder>,
}

impl Renderer {
    fn push(&mut self, text: &str) {
        self.display.push_str(text);
    }

    fn marker(&mut self, kind: PlaceholderKind, type_name: Option<&str>) {
        let position = self.display.chars().count();
        match type_name {
            Some(t) => {
                let (base, dims) = t.split_at(t.trim_end_matches("[]").len());
                self.display.push_str(&format!("«{}:{}{dims}»", kind.as_str(), shorten(base)));
            }
            None => self.display.push_str(&format!("«{}»", kind.as_str())),
        }
        self.placeholders.push(Placeholder { position, kind, type_name: type_name.map(str::to_string) });
    }

    fn slot(&mut self, slot: &Slot) {
        match slot {
            Slot::Var(t) => self.marker(PlaceholderKind::Var, Some(t)),
            Slot::Lit(t) => self.marker(PlaceholderKind::Lit, Some(t)),
            Slot::Call => self.marker(PlaceholderKind::Call, None),
            Slot::Const(p) => self.push(shorten(p)),
        }
    }

    fn arg(&mut self, arg: &TemplateArg) {
        for (i, slot) in arg.operands.iter().enumerate() {
            if i > 0 {
                self.push(&format!(" {} ", arg.operators[i - 1]));
            }
            self.slot(slot);
        }
    }
}

/// Turns a target template into display text with placeholder markers.
pub fn render(target: &str) -> Result<RenderedResult, UnparseableTarget> {
    let template = ExpressionTemplate::parse(target).map_err(|_| UnparseableTarget(target.to_string()))?;
    let mut r = Renderer { display: String::new(), placeholders: Vec::new() };
    match &template.receiver {
        TemplateReceiver::Var(t) => r.marker(PlaceholderKind::Var, Some(t)),
        TemplateReceiver::Path(p) => r.push(shorten(p)),
        TemplateReceiver::This => r.push("this"),
        TemplateReceiver::Call => r.marker(PlaceholderKind::Call, None),
        TemplateReceiver::None => {}
    }
    if template.receiver != TemplateReceiver::None {
        r.push(".");
    }
    r.push(&template.method);
    r.push("(");
    for (i, arg) in template.args.iter().enumerate() {
        if i > 0 {
            r.push(", ");
        }
        r.arg(arg);
    }
    r.push(")");
    Ok(RenderedResult {
        display: r.display,
        placeholders: r.placeholders,
        raw_target: target.to_string(),
        score: 0.0,
        renderable: true,
    })
}

/// Rendering of a token that is not a template, such as a copied-through
/// unknown name.
pub fn raw_result(target: &str, score: f64) -> RenderedResult {
    RenderedResult { display: target.to_string(), placeholders: Vec::new(), raw_target: target.to_string(), score, renderable: false }
}

/// Encodes, decodes and renders a query. The rendered token is the one
/// aligned with the method-name token.
pub fn translate_query(model: &TranslationModel, q: &DeveloperQuery, beam: usize) -> Result<RenderedResult, QueryError> {
    let source = encode_query(q)?;
    let position = source.iter().position(|t| t.contains(IDEN_MARKER)).expect("encoded query has a method token");
    let translation = model.decode(&source, beam);
    let target = translation.target.get(position).cloned().unwrap_or_default();
    if target.ends_with(OOV_SUFFIX) {
        return Ok(raw_result(&target, translation.score));
    }
    Ok(match render(&target) {
        Ok(mut r) => {
            r.score = translation.score;
            r
        }
        Err(_) => raw_result(&target, translation.score),
    })
}
