use std::fmt;

use super::ParamError;
use crate::realfmt::format_f64;

/// Kind tag of a [`ParamValue`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ValueKind {
    Bool,
    Int,
    Real,
    Text,
    None,
    List,
}

impl fmt::Display for ValueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            ValueKind::Bool => "bool",
            ValueKind::Int => "int",
            ValueKind::Real => "real",
            ValueKind::Text => "text",
            ValueKind::None => "none",
            ValueKind::List => "list",
        };
        f.write_str(name)
    }
}

/// A typed parameter literal.
///
/// `List` holds scalars of a single kind (never `None`, never nested) and
/// `Real` is always finite. Values built through [`ParamValue::real`] and
/// [`ParamValue::list`] are checked; values built directly are checked when
/// they enter a [`ParamNode`](super::ParamNode).
#[derive(Debug, Clone, PartialEq)]
pub enum ParamValue {
    Bool(bool),
    Int(i64),
    Real(f64),
    Text(String),
    None,
    List(Vec<ParamValue>),
}

impl ParamValue {
    pub fn kind(&self) -> ValueKind {
        match self {
            ParamValue::Bool(_) => ValueKind::Bool,
            ParamValue::Int(_) => ValueKind::Int,
            ParamValue::Real(_) => ValueKind::Real,
            ParamValue::Text(_) => ValueKind::Text,
            ParamValue::None => ValueKind::None,
            ParamValue::List(_) => ValueKind::List,
        }
    }

    pub fn text(s: impl Into<String>) -> Self {
        ParamValue::Text(s.into())
    }

    pub fn real(value: f64) -> Result<Self, ParamError> {
        if value.is_finite() {
            Ok(ParamValue::Real(value))
        } else {
            Err(ParamError::NonFinite)
        }
    }

    pub fn list(items: Vec<ParamValue>) -> Result<Self, ParamError> {
        let value = ParamValue::List(items);
        value.validate()?;
        Ok(value)
    }

    /// Kind shared by the elements of a non-empty list.
    pub fn element_kind(&self) -> Option<ValueKind> {
        match self {
            ParamValue::List(items) => items.first().map(ParamValue::kind),
            _ => None,
        }
    }

    /// Checks the finiteness and list homogeneity invariants.
    pub fn validate(&self) -> Result<(), ParamError> {
        match self {
            ParamValue::Real(v) if !v.is_finite() => Err(ParamError::NonFinite),
            ParamValue::List(items) => {
                let Some(first) = items.first() else {
                    return Ok(());
                };
                let kind = first.kind();
                if matches!(kind, ValueKind::List | ValueKind::None) {
                    return Err(ParamError::InvalidList("elements must be non-null scalars"));
                }
                for item in items {
                    if item.kind() != kind {
                        return Err(ParamError::InvalidList("elements must share one kind"));
                    }
                    item.validate()?;
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

impl From<bool> for ParamValue {
    fn from(v: bool) -> Self {
        ParamValue::Bool(v)
    }
}

impl From<i64> for ParamValue {
    fn from(v: i64) -> Self {
        ParamValue::Int(v)
    }
}

impl From<&str> for ParamValue {
    fn from(v: &str) -> Self {
        ParamValue::Text(v.to_string())
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_literal(self))
    }
}

/// Canonical literal text of a value; [`infer_value`] maps it back.
///
/// Text that would otherwise be read back as another kind (or fail to
/// parse) is wrapped in single quotes with `\` and `'` backslash-escaped.
/// Text elements of a list are always quoted.
pub fn render_literal(value: &ParamValue) -> String {
    match value {
        ParamValue::Bool(true) => "True".to_string(),
        ParamValue::Bool(false) => "False".to_string(),
        ParamValue::None => "None".to_string(),
        ParamValue::Int(v) => v.to_string(),
        ParamValue::Real(v) => format_f64(*v),
        ParamValue::Text(s) => {
            if matches!(infer_value(s), Ok(ParamValue::Text(ref back)) if back == s) {
                s.clone()
            } else {
                quote(s)
            }
        }
        ParamValue::List(items) => {
            let parts: Vec<String> = items
                .iter()
                .map(|item| match item {
                    ParamValue::Text(s) => quote(s),
                    other => render_literal(other),
                })
                .collect();
            format!("[{}]", parts.join(", "))
        }
    }
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('\'');
    for c in s.chars() {
        if c == '\\' || c == '\'' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('\'');
    out
}

/// Content of a complete single-quoted literal, or `None` when `s` is not one.
fn unquote(s: &str) -> Option<String> {
    let rest = s.strip_prefix('\'')?;
    let mut out = String::with_capacity(rest.len());
    let mut chars = rest.chars();
    while let Some(c) = chars.next() {
        match c {
            '\\' => match chars.next()? {
                e @ ('\\' | '\'') => out.push(e),
                _ => return None,
            },
            '\'' => return chars.as_str().is_empty().then_some(out),
            other => out.push(other),
        }
    }
    None
}

fn is_int_literal(s: &str) -> bool {
    let digits = s.strip_prefix(['+', '-']).unwrap_or(s);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

/// Decimal or exponent float grammar, excluding plain integers.
fn is_real_literal(s: &str) -> bool {
    let body = s.strip_prefix(['+', '-']).unwrap_or(s);
    let (mantissa, exponent) = match body.find(['e', 'E']) {
        Some(pos) => (&body[..pos], Some(&body[pos + 1..])),
        None => (body, None),
    };
    if let Some(exp) = exponent {
        if !is_int_literal(exp) {
            return false;
        }
    }
    let (int_part, frac_part) = match mantissa.split_once('.') {
        Some((i, f)) => (i, Some(f)),
        None => (mantissa, None),
    };
    let all_digits = |p: &str| p.bytes().all(|b| b.is_ascii_digit());
    if !all_digits(int_part) {
        return false;
    }
    match frac_part {
        Some(frac) => all_digits(frac) && !(int_part.is_empty() && frac.is_empty()),
        None => !int_part.is_empty() && exponent.is_some(),
    }
}

fn infer_scalar(text: &str) -> Result<ParamValue, ParamError> {
    match text {
        "True" => return Ok(ParamValue::Bool(true)),
        "False" => return Ok(ParamValue::Bool(false)),
        "None" => return Ok(ParamValue::None),
        _ => {}
    }
    if is_int_literal(text) {
        if let Ok(v) = text.parse::<i64>() {
            return Ok(ParamValue::Int(v));
        }
        return Ok(ParamValue::Text(text.to_string()));
    }
    if is_real_literal(text) {
        let v: f64 = text.parse().map_err(|_| ParamError::NonFinite)?;
        return ParamValue::real(v);
    }
    if let Some(inner) = unquote(text) {
        return Ok(ParamValue::Text(inner));
    }
    Ok(ParamValue::Text(text.to_string()))
}

/// Classifies literal text into a typed value.
///
/// Order: `True`/`False`, `None`, integer, real, `[...]` list, quoted text,
/// plain text. Mixed Int/Real lists are promoted to Real.
pub fn infer_value(text: &str) -> Result<ParamValue, ParamError> {
    if text.starts_with('[') {
        return infer_list(text);
    }
    infer_scalar(text)
}

fn malformed(text: &str, reason: &'static str) -> ParamError {
    ParamError::MalformedList {
        text: text.to_string(),
        reason,
    }
}

fn infer_list(text: &str) -> Result<ParamValue, ParamError> {
    let inner = text
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| malformed(text, "unbalanced brackets"))?;
    if inner.trim().is_empty() {
        return Ok(ParamValue::List(Vec::new()));
    }

    let mut pieces = Vec::new();
    let mut start = 0;
    let mut in_quote = false;
    let mut escaped = false;
    for (i, c) in inner.char_indices() {
        if in_quote {
            match (escaped, c) {
                (true, _) => escaped = false,
                (false, '\\') => escaped = true,
                (false, '\'') => in_quote = false,
                _ => {}
            }
            continue;
        }
        match c {
            '\'' => in_quote = true,
            '[' => return Err(malformed(text, "nested list")),
            ']' => return Err(malformed(text, "unbalanced brackets")),
            ',' => {
                pieces.push(&inner[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    if in_quote {
        return Err(malformed(text, "unterminated quoted element"));
    }
    pieces.push(&inner[start..]);

    let mut items = Vec::with_capacity(pieces.len());
    for piece in pieces {
        let piece = piece.trim();
        if piece.is_empty() {
            return Err(malformed(text, "empty element"));
        }
        let item = if piece.starts_with('\'') {
            unquote(piece)
                .map(ParamValue::Text)
                .ok_or_else(|| malformed(text, "bad quoted element"))?
        } else {
            infer_scalar(piece)?
        };
        if item.kind() == ValueKind::None {
            return Err(malformed(text, "None element"));
        }
        items.push(item);
    }

    let has_real = items.iter().any(|v| v.kind() == ValueKind::Real);
    if has_real {
        for item in &mut items {
            if let ParamValue::Int(v) = *item {
                *item = ParamValue::Real(v as f64);
            }
        }
    }
    let kind = items[0].kind();
    if items.iter().any(|v| v.kind() != kind) {
        return Err(malformed(text, "heterogeneous elements"));
    }
    Ok(ParamValue::List(items))
}
