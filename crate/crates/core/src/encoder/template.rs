//! Expression templates: the complete form of a method invocation.
//!
//! Grammar of the serialized form:
//!
//! ```text
//! template := recv '.' name '(' [arg (',' arg)*] ')'
//! recv     := '#var:' TYPE | PATH | '#this' | '#none' | '#mcall'
//! arg      := slot ('~' OP '~' slot)*
//! slot     := '#var:' TYPE | '#lit:' TYPE | '#mcall' | PATH
//! ```
//!
//! `PATH` is a dotted name (a static type, a type followed by fields, or a
//! constant). `OP` is percent-escaped so that it never contains `~`, `,`,
//! parentheses or whitespace.

use std::fmt;

use thiserror::Error;

use super::tokens::{escape_text, unescape_text};
use crate::extractor::{is_fqn, is_identifier};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TemplateReceiver {
    Var(String),
    Path(String),
    This,
    None,
    Call,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Slot {
    Var(String),
    Lit(String),
    Call,
    /// A constant or other fully qualified member the developer does not fill.
    Const(String),
}

impl Slot {
    pub fn is_placeholder(&self) -> bool {
        !matches!(self, Slot::Const(_))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TemplateArg {
    pub operands: Vec<Slot>,
    /// Infix operators between consecutive operands.
    pub operators: Vec<String>,
}

impl TemplateArg {
    pub fn single(slot: Slot) -> Self {
        TemplateArg { operands: vec![slot], operators: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ExpressionTemplate {
    pub receiver: TemplateReceiver,
    pub method: String,
    pub args: Vec<TemplateArg>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("not an expression template: {0}")]
pub struct TemplateParseError(pub String);

/// `a.b.C`, a primitive, or either followed by `[]` dimensions.
pub fn is_type_name(ty: &str) -> bool {
    let mut base = ty;
    while let Some(b) = base.strip_suffix("[]") {
        base = b;
    }
    is_fqn(base)
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Slot::Var(t) => write!(f, "#var:{t}"),
            Slot::Lit(t) => write!(f, "#lit:{t}"),
            Slot::Call => f.write_str("#mcall"),
            Slot::Const(p) => f.write_str(p),
        }
    }
}

impl fmt::Display for TemplateReceiver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TemplateReceiver::Var(t) => write!(f, "#var:{t}"),
            TemplateReceiver::Path(p) => f.write_str(p),
            TemplateReceiver::This => f.write_str("#this"),
            TemplateReceiver::None => f.write_str("#none"),
            TemplateReceiver::Call => f.write_str("#mcall"),
        }
    }
}

impl fmt::Display for ExpressionTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}(", self.receiver, self.method)?;
        for (i, arg) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            for (j, slot) in arg.operands.iter().enumerate() {
                if j > 0 {
                    write!(f, "~{}~", escape_text(&arg.operators[j - 1]))?;
                }
                write!(f, "{slot}")?;
            }
        }
        f.write_str(")")
    }
}

fn parse_slot(text: &str) -> Option<Slot> {
    if let Some(t) = text.strip_prefix("#var:") {
        is_type_name(t).then(|| Slot::Var(t.to_string()))
    } else if let Some(t) = text.strip_prefix("#lit:") {
        is_type_name(t).then(|| Slot::Lit(t.to_string()))
    } else if text == "#mcall" {
        Some(Slot::Call)
    } else {
        is_fqn(text).then(|| Slot::Const(text.to_string()))
    }
}

impl ExpressionTemplate {
    pub fn serialize(&self) -> String {
        self.to_string()
    }

    pub fn parse(text: &str) -> Result<Self, TemplateParseError> {
        let fail = || TemplateParseError(text.to_string());
        let body = text.strip_suffix(')').ok_or_else(fail)?;
        let (head, args) = body.split_once('(').ok_or_else(fail)?;
        if args.contains(['(', ')']) {
            return Err(fail());
        }
        let (recv, method) = head.rsplit_once('.').ok_or_else(fail)?;
        if !is_identifier(method) {
            return Err(fail());
        }
        let receiver = match recv {
            "#this" => TemplateReceiver::This,
            "#none" => TemplateReceiver::None,
            "#mcall" => TemplateReceiver::Call,
            r => match r.strip_prefix("#var:") {
                Some(t) if is_type_name(t) => TemplateReceiver::Var(t.to_string()),
                Some(_) => return Err(fail()),
                None if is_fqn(r) => TemplateReceiver::Path(r.to_string()),
                None => return Err(fail()),
            },
        };
        let mut parsed_args = Vec::new();
        if !args.is_empty() {
            for arg in args.split(',') {
                let pieces: Vec<&str> = arg.split('~').collect();
                if pieces.len().is_multiple_of(2) {
                    return Err(fail());
                }
                let mut operands = Vec::new();
                let mut operators = Vec::new();
                for (k, piece) in pieces.iter().enumerate() {
                    if k % 2 == 0 {
                        operands.push(parse_slot(piece).ok_or_else(fail)?);
                    } else {
                        if piece.is_empty() {
                            return Err(fail());
                        }
                        operators.push(unescape_text(piece));
                    }
                }
                parsed_args.push(TemplateArg { operands, operators });
            }
        }
        Ok(ExpressionTemplate { receiver, method: method.to_string(), args: parsed_args })
    }

    /// Placeholder slots in order of appearance, receiver first.
    pub fn placeholders(&self) -> Vec<Slot> {
        let recv = match &self.receiver {
            TemplateReceiver::Var(t) => Some(Slot::Var(t.clone())),
            TemplateReceiver::Call => Some(Slot::Call),
            _ => None,
        };
        recv.into_iter()
            .chain(self.args.iter().flat_map(|a| a.operands.iter().filter(|s| s.is_placeholder()).cloned()))
            .collect()
    }
}
