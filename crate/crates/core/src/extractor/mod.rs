//! Source analysis: lexing, invocation-site extraction and type resolution.

mod invocations;
mod lexer;
mod typedb;

use std::path::{Path, PathBuf};

pub use invocations::{
    extract_invocations, extract_invocations_with_stats, ArgRole, ArgShape, InvocationSite, Receiver, UNKNOWN_TYPE,
};
pub(crate) use invocations::{literal_type, matching_close, Analysis};
pub use lexer::{is_identifier, is_keyword, is_primitive, lex, LexError, LexToken, TokenKind};
pub use typedb::{is_fqn, resolve_fqn, simple_name, TypeDatabase, TypeDbError, ANY_OWNER};

/// A lexed and analysed source file.
#[derive(Debug, Clone)]
pub struct ParsedFile {
    pub path: String,
    pub package: Option<String>,
    /// Explicit and wildcard imports followed by the implicit ones: the
    /// file's own types, its package and `java.lang`.
    pub imports: Vec<String>,
    pub(crate) analysis: Analysis,
}

impl ParsedFile {
    pub fn parse(path: &str, source: &str) -> Result<Self, LexError> {
        let raw = lex(source)?;
        let analysis = Analysis::new(&raw, path);
        let toks = &analysis.tokens;

        let dotted_until_semicolon = |from: usize| -> (String, usize) {
            let mut name = String::new();
            let mut j = from;
            while let Some(t) = toks.get(j) {
                if t.is_sep(";") {
                    break;
                }
                name.push_str(&t.text);
                j += 1;
            }
            (name, j)
        };

        let mut package = None;
        let mut imports = Vec::new();
        let mut i = 0;
        while i < toks.len() {
            let t = &toks[i];
            if t.is_keyword("package") {
                let (name, end) = dotted_until_semicolon(i + 1);
                package = is_fqn(&name).then_some(name);
                i = end;
            } else if t.is_keyword("import") {
                if toks.get(i + 1).is_some_and(|n| n.is_keyword("static")) {
                    i = dotted_until_semicolon(i + 2).1;
                    continue;
                }
                let (name, end) = dotted_until_semicolon(i + 1);
                let valid = match name.strip_suffix(".*") {
                    Some(prefix) => is_fqn(prefix),
                    None => is_fqn(&name),
                };
                if valid {
                    imports.push(name);
                }
                i = end;
            } else {
                i += 1;
            }
        }

        // Declared types, qualified by their enclosing types.
        let mut depth = 0usize;
        let mut enclosing: Vec<(usize, String)> = Vec::new();
        for (k, t) in toks.iter().enumerate() {
            if t.is_sep("{") {
                depth += 1;
            } else if t.is_sep("}") {
                depth = depth.saturating_sub(1);
                while enclosing.last().is_some_and(|(d, _)| *d > depth) {
                    enclosing.pop();
                }
            } else if t.kind == TokenKind::Keyword && matches!(t.text.as_str(), "class" | "interface" | "enum") {
                if let Some(name) = toks.get(k + 1).filter(|n| n.kind == TokenKind::Identifier) {
                    let outer = enclosing.last().map(|(_, q)| q.clone()).or_else(|| package.clone());
                    let qualified = match outer {
                        Some(o) => format!("{o}.{}", name.text),
                        None => name.text.clone(),
                    };
                    if !imports.contains(&qualified) {
                        imports.push(qualified.clone());
                    }
                    enclosing.push((depth + 1, qualified));
                }
            }
        }
        if let Some(p) = &package {
            imports.push(format!("{p}.*"));
        }
        imports.push("java.lang.*".to_string());

        Ok(ParsedFile { path: path.to_string(), package, imports, analysis })
    }

    pub fn sites(&self) -> &[InvocationSite] {
        &self.analysis.sites
    }

    /// Call patterns skipped because their receiver or arguments could not
    /// be classified.
    pub fn skipped_sites(&self) -> usize {
        self.analysis.skipped
    }

    pub fn resolve(&self, simple: &str, db: &TypeDatabase) -> Option<String> {
        resolve_fqn(simple, &self.imports, db)
    }
}

/// All `.java` files under `root`, sorted by path.
pub fn java_files(root: &Path) -> std::io::Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in walkdir::WalkDir::new(root).sort_by_file_name() {
        let entry = entry.map_err(std::io::Error::other)?;
        if entry.file_type().is_file() && entry.path().extension().is_some_and(|e| e == "java") {
            files.push(entry.into_path());
        }
    }
    files.sort();
    Ok(files)
}
