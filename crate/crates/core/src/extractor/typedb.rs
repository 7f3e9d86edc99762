//! Declarative type database used to turn simple names into fully
//! qualified names.
//!
//! The on-disk format is TSV with three record kinds:
//!
//! ```text
//! TYPE    <simple>          <fqn>    <library>
//! FIELD   <ownerFqn>        <field>  <typeFqn>
//! METHOD  <ownerSimple|any> <name>   <arity>    <declaringFqn>
//! ```
//!
//! Lines starting with `#` and blank lines are ignored.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use thiserror::Error;

use super::lexer::is_identifier;

#[derive(Debug, Error)]
pub enum TypeDbError {
    #[error("type database line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("cannot read type database: {0}")]
    Io(#[from] std::io::Error),
}

/// Owner key used by `METHOD` records that apply to any receiver type.
pub const ANY_OWNER: &str = "any";

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TypeDatabase {
    entries: BTreeMap<String, BTreeSet<String>>,
    libraries: BTreeMap<String, String>,
    field_types: BTreeMap<(String, String), String>,
    method_owners: BTreeMap<(String, String, usize), BTreeSet<String>>,
}

/// `a.b.C`: one or more identifiers joined by dots.
pub fn is_fqn(name: &str) -> bool {
    !name.is_empty() && name.split('.').all(is_identifier)
}

/// Last dot-separated segment of a qualified name.
pub fn simple_name(fqn: &str) -> &str {
    fqn.rsplit('.').next().unwrap_or(fqn)
}

impl TypeDatabase {
    pub fn new() -> Self {
        Self::default()
    }

    /// The database shipped with the crate (common JDK, Android, GWT,
    /// Joda-Time, Hibernate and XStream types).
    pub fn bundled() -> Self {
        Self::parse(include_str!("../../data/typedb.tsv")).expect("bundled type database is valid")
    }

    pub fn load(path: &Path) -> Result<Self, TypeDbError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn parse(text: &str) -> Result<Self, TypeDbError> {
        let mut db = TypeDatabase::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let raw = raw.trim_end_matches('\r');
            if raw.trim().is_empty() || raw.starts_with('#') {
                continue;
            }
            let err = |message: String| TypeDbError::Parse { line, message };
            let cols: Vec<&str> = raw.split('\t').collect();
            let check_fqn = |s: &str| {
                if is_fqn(s) {
                    Ok(())
                } else {
                    Err(err(format!("`{s}` is not a dotted name")))
                }
            };
            match cols.as_slice() {
                ["TYPE", simple, fqn, library] => {
                    check_fqn(fqn)?;
                    if !is_identifier(simple) {
                        return Err(err(format!("`{simple}` is not an identifier")));
                    }
                    if library.is_empty() {
                        return Err(err("empty library label".into()));
                    }
                    db.add_type(simple, fqn, library);
                }
                ["FIELD", owner, field, ty] => {
                    check_fqn(owner)?;
                    check_fqn(ty)?;
                    if !is_identifier(field) {
                        return Err(err(format!("`{field}` is not an identifier")));
                    }
                    db.add_field(owner, field, ty);
                }
                ["METHOD", owner, name, arity, declaring] => {
                    if *owner != ANY_OWNER && !is_identifier(owner) {
                        return Err(err(format!("`{owner}` is not a simple type name or `any`")));
                    }
                    if !is_identifier(name) {
                        return Err(err(format!("`{name}` is not an identifier")));
                    }
                    check_fqn(declaring)?;
                    let arity = arity.parse().map_err(|_| err(format!("bad arity `{arity}`")))?;
                    db.add_method(owner, name, arity, declaring);
                }
                _ => return Err(err(format!("unrecognised record `{raw}`"))),
            }
        }
        Ok(db)
    }

    pub fn add_type(&mut self, simple: &str, fqn: &str, library: &str) {
        self.entries.entry(simple.to_string()).or_default().insert(fqn.to_string());
        self.libraries.insert(fqn.to_string(), library.to_string());
    }

    pub fn add_field(&mut self, owner: &str, field: &str, ty: &str) {
        self.field_types.insert((owner.to_string(), field.to_string()), ty.to_string());
    }

    pub fn add_method(&mut self, owner: &str, name: &str, arity: usize, declaring: &str) {
        self.method_owners
            .entry((owner.to_string(), name.to_string(), arity))
            .or_default()
            .insert(declaring.to_string());
    }

    /// Candidate FQNs for a simple name, sorted lexicographically.
    pub fn candidates(&self, simple: &str) -> impl Iterator<Item = &str> {
        self.entries.get(simple).into_iter().flatten().map(String::as_str)
    }

    pub fn contains_fqn(&self, fqn: &str) -> bool {
        self.libraries.contains_key(fqn)
    }

    pub fn library_of(&self, fqn: &str) -> Option<&str> {
        self.libraries.get(fqn).map(String::as_str)
    }

    pub fn field_type(&self, owner: &str, field: &str) -> Option<&str> {
        self.field_types.get(&(owner.to_string(), field.to_string())).map(String::as_str)
    }

    /// Declaring type of `name/arity` called on a receiver of type
    /// `receiver_fqn` (or on an unknown receiver when `None`). Owner-specific
    /// records win over `any` records; ties pick the smallest FQN.
    pub fn declaring_type(&self, receiver_fqn: Option<&str>, name: &str, arity: usize) -> Option<&str> {
        let lookup = |owner: &str| {
            self.method_owners
                .get(&(owner.to_string(), name.to_string(), arity))
                .and_then(|set| set.iter().next())
                .map(String::as_str)
        };
        receiver_fqn.and_then(|fqn| lookup(simple_name(fqn))).or_else(|| lookup(ANY_OWNER))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty() && self.field_types.is_empty() && self.method_owners.is_empty()
    }
}

/// Resolves `simple_name` to a fully qualified name.
///
/// Order: an explicit import ending in the name, then a wildcard import
/// whose expansion is a known type, then the database candidates (the
/// lexicographically smallest one when ambiguous).
pub fn resolve_fqn(simple_name: &str, imports: &[String], db: &TypeDatabase) -> Option<String> {
    if let Some(exact) = imports
        .iter()
        .find(|imp| !imp.ends_with(".*") && imp.rsplit('.').next() == Some(simple_name))
    {
        return Some(exact.clone());
    }
    let mut wildcard_hits: Vec<String> = imports
        .iter()
        .filter_map(|imp| imp.strip_suffix(".*"))
        .map(|prefix| format!("{prefix}.{simple_name}"))
        .filter(|fqn| db.contains_fqn(fqn))
        .collect();
    wildcard_hits.sort();
    if let Some(hit) = wildcard_hits.into_iter().next() {
        return Some(hit);
    }
    db.candidates(simple_name).next().map(str::to_string)
}
