//! Hierarchical parameter containers.
//!
//! A [`ParamNode`] owns an ordered list of typed attributes and an ordered
//! list of child nodes. Names are identifiers and are unique within a node
//! across both lists. Parameters must be declared before they can be set,
//! so a misspelled override fails instead of silently creating a new entry.
//!
//! Trees serialize to a canonical XML text ([`to_xml_text`]) and parse back
//! ([`parse_xml_text`]) with attribute kinds recovered by [`infer_value`].

mod value;
mod xml;

use std::fmt;
use std::str::FromStr;

pub use value::{infer_value, render_literal, ParamValue, ValueKind};
pub use xml::{parse_xml_text, to_xml_text};

/// Element name prefix reserved for documentation text.
pub const DOC_TAG: &str = "_doc_";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParamError {
    #[error("invalid identifier {0:?}")]
    InvalidIdentifier(String),
    #[error("duplicate name {0:?}")]
    DuplicateName(String),
    #[error("unknown parameter {0}")]
    UnknownParameter(ParamPath),
    #[error("kind mismatch at {path}: expected {expected}, found {found}")]
    KindMismatch {
        path: ParamPath,
        expected: ValueKind,
        found: ValueKind,
    },
    #[error("non-finite real value")]
    NonFinite,
    #[error("invalid list: {0}")]
    InvalidList(&'static str),
    #[error("malformed list {text:?}: {reason}")]
    MalformedList { text: String, reason: &'static str },
    #[error("XML syntax error at line {line}, column {col}: {message}")]
    XmlSyntax {
        line: usize,
        col: usize,
        message: String,
    },
}

/// `[A-Za-z_][A-Za-z0-9_]*`
pub fn is_identifier(s: &str) -> bool {
    let mut bytes = s.bytes();
    matches!(bytes.next(), Some(b) if b.is_ascii_alphabetic() || b == b'_')
        && bytes.all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

fn check_identifier(s: &str) -> Result<(), ParamError> {
    if is_identifier(s) {
        Ok(())
    } else {
        Err(ParamError::InvalidIdentifier(s.to_string()))
    }
}

/// Dotted address of a node or attribute, relative to the root.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParamPath(Vec<String>);

impl ParamPath {
    pub fn new<I, S>(segments: I) -> Result<Self, ParamError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let segments: Vec<String> = segments.into_iter().map(Into::into).collect();
        if segments.is_empty() {
            return Err(ParamError::InvalidIdentifier(String::new()));
        }
        for s in &segments {
            check_identifier(s)?;
        }
        Ok(ParamPath(segments))
    }

    fn single(name: &str) -> Self {
        ParamPath(vec![name.to_string()])
    }

    pub fn segments(&self) -> &[String] {
        &self.0
    }

    fn prefixed(mut self, prefix: &[String]) -> Self {
        let mut segments = prefix.to_vec();
        segments.append(&mut self.0);
        ParamPath(segments)
    }
}

impl fmt::Display for ParamPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.join("."))
    }
}

impl FromStr for ParamPath {
    type Err = ParamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ParamPath::new(s.split('.'))
    }
}

/// A declared attribute: its current value and optional documentation.
#[derive(Debug, Clone, PartialEq)]
pub struct Attrib {
    name: String,
    value: ParamValue,
    doc: Option<String>,
}

impl Attrib {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn value(&self) -> &ParamValue {
        &self.value
    }

    pub fn doc(&self) -> Option<&str> {
        self.doc.as_deref()
    }
}

/// One node of a parameter tree.
///
/// Equality is structural and order-sensitive.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamNode {
    tag: String,
    doc: Option<String>,
    attribs: Vec<Attrib>,
    children: Vec<ParamNode>,
}

impl ParamNode {
    pub fn new(tag: &str) -> Result<Self, ParamError> {
        check_identifier(tag)?;
        Ok(ParamNode {
            tag: tag.to_string(),
            doc: None,
            attribs: Vec::new(),
            children: Vec::new(),
        })
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn doc(&self) -> Option<&str> {
        self.doc.as_deref()
    }

    pub fn set_doc(&mut self, doc: Option<&str>) {
        self.doc = doc.map(str::to_string);
    }

    pub fn attribs(&self) -> impl ExactSizeIterator<Item = &Attrib> {
        self.attribs.iter()
    }

    pub fn children(&self) -> impl ExactSizeIterator<Item = &ParamNode> {
        self.children.iter()
    }

    pub fn child(&self, tag: &str) -> Option<&ParamNode> {
        self.children.iter().find(|c| c.tag == tag)
    }

    pub fn child_mut(&mut self, tag: &str) -> Option<&mut ParamNode> {
        self.children.iter_mut().find(|c| c.tag == tag)
    }

    /// Whether `name` is used by an attribute or a child of this node.
    pub fn contains_name(&self, name: &str) -> bool {
        self.attribs.iter().any(|a| a.name == name) || self.children.iter().any(|c| c.tag == name)
    }

    fn check_new_name(&self, name: &str) -> Result<(), ParamError> {
        check_identifier(name)?;
        if self.contains_name(name) {
            return Err(ParamError::DuplicateName(name.to_string()));
        }
        Ok(())
    }

    /// Appends a child node with the given attributes declared in order.
    pub fn create_child<N>(
        &mut self,
        tag: &str,
        attribs: impl IntoIterator<Item = (N, ParamValue)>,
    ) -> Result<&mut ParamNode, ParamError>
    where
        N: AsRef<str>,
    {
        self.check_new_name(tag)?;
        if tag.starts_with(DOC_TAG) {
            return Err(ParamError::InvalidIdentifier(tag.to_string()));
        }
        let mut child = ParamNode::new(tag)?;
        for (name, value) in attribs {
            child.declare_attrib(name.as_ref(), value, None)?;
        }
        self.children.push(child);
        Ok(self.children.last_mut().expect("just pushed"))
    }

    /// Appends an already built subtree.
    pub fn add_child(&mut self, child: ParamNode) -> Result<&mut ParamNode, ParamError> {
        self.check_new_name(&child.tag)?;
        if child.tag.starts_with(DOC_TAG) {
            return Err(ParamError::InvalidIdentifier(child.tag));
        }
        self.children.push(child);
        Ok(self.children.last_mut().expect("just pushed"))
    }

    pub fn declare_attrib(
        &mut self,
        name: &str,
        default: ParamValue,
        doc: Option<&str>,
    ) -> Result<(), ParamError> {
        self.check_new_name(name)?;
        default.validate()?;
        self.attribs.push(Attrib {
            name: name.to_string(),
            value: default,
            doc: doc.map(str::to_string),
        });
        Ok(())
    }

    pub fn attrib_doc(&self, name: &str) -> Option<&str> {
        self.attribs.iter().find(|a| a.name == name)?.doc()
    }

    pub fn set_attrib_doc(&mut self, name: &str, doc: Option<&str>) -> Result<(), ParamError> {
        let attrib = self
            .attribs
            .iter_mut()
            .find(|a| a.name == name)
            .ok_or_else(|| ParamError::UnknownParameter(ParamPath::single(name)))?;
        attrib.doc = doc.map(str::to_string);
        Ok(())
    }

    pub fn get_attrib(&self, name: &str) -> Result<&ParamValue, ParamError> {
        self.attribs
            .iter()
            .find(|a| a.name == name)
            .map(|a| &a.value)
            .ok_or_else(|| ParamError::UnknownParameter(ParamPath::single(name)))
    }

    /// Replaces the value of a declared attribute.
    ///
    /// The new value must have the slot's current kind, except that an Int
    /// (or list of Int) is stored as Real in a Real slot and a `None` slot
    /// accepts any kind.
    pub fn set_attrib(&mut self, name: &str, value: ParamValue) -> Result<(), ParamError> {
        value.validate()?;
        let attrib = self
            .attribs
            .iter_mut()
            .find(|a| a.name == name)
            .ok_or_else(|| ParamError::UnknownParameter(ParamPath::single(name)))?;
        attrib.value = coerce(&attrib.value, value).map_err(|(expected, found)| {
            ParamError::KindMismatch {
                path: ParamPath::single(name),
                expected,
                found,
            }
        })?;
        Ok(())
    }
}

fn coerce(current: &ParamValue, value: ParamValue) -> Result<ParamValue, (ValueKind, ValueKind)> {
    let mismatch = |v: &ParamValue| (current.kind(), v.kind());
    match (current, value) {
        (ParamValue::None, v) => Ok(v),
        (ParamValue::Real(_), ParamValue::Int(i)) => Ok(ParamValue::Real(i as f64)),
        (ParamValue::List(_), ParamValue::List(items)) => {
            match (current.element_kind(), items.first().map(ParamValue::kind)) {
                (None, _) | (_, None) => Ok(ParamValue::List(items)),
                (Some(a), Some(b)) if a == b => Ok(ParamValue::List(items)),
                (Some(ValueKind::Real), Some(ValueKind::Int)) => Ok(ParamValue::List(
                    items
                        .into_iter()
                        .map(|v| match v {
                            ParamValue::Int(i) => ParamValue::Real(i as f64),
                            other => other,
                        })
                        .collect(),
                )),
                (Some(_), Some(_)) => Err((ValueKind::List, ValueKind::List)),
            }
        }
        (cur, v) if cur.kind() == v.kind() => Ok(v),
        (_, v) => Err(mismatch(&v)),
    }
}

/// Copy of `defaults` with every attribute present in `overrides` set.
///
/// Every override must address a declared attribute; errors carry the full
/// dotted path of the first offending entry. The root tags are not compared
/// and documentation in `overrides` is ignored.
pub fn apply_overrides(defaults: &ParamNode, overrides: &ParamNode) -> Result<ParamNode, ParamError> {
    let mut result = defaults.clone();
    let mut prefix = Vec::new();
    apply_into(&mut result, overrides, &mut prefix)?;
    Ok(result)
}

fn apply_into(
    target: &mut ParamNode,
    overrides: &ParamNode,
    prefix: &mut Vec<String>,
) -> Result<(), ParamError> {
    let relocate = |err: ParamError, prefix: &[String]| match err {
        ParamError::UnknownParameter(p) => ParamError::UnknownParameter(p.prefixed(prefix)),
        ParamError::KindMismatch {
            path,
            expected,
            found,
        } => ParamError::KindMismatch {
            path: path.prefixed(prefix),
            expected,
            found,
        },
        other => other,
    };
    for attrib in &overrides.attribs {
        target
            .set_attrib(&attrib.name, attrib.value.clone())
            .map_err(|e| relocate(e, prefix))?;
    }
    for child in &overrides.children {
        prefix.push(child.tag.clone());
        let Some(slot) = target.child_mut(&child.tag) else {
            return Err(ParamError::UnknownParameter(ParamPath(prefix.clone())));
        };
        apply_into(slot, child, prefix)?;
        prefix.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn root() -> ParamNode {
        ParamNode::new("params").unwrap()
    }

    #[test]
    fn create_child_rules() {
        let mut r = root();
        let child = r
            .create_child("output", [("period", ParamValue::Real(1.0))])
            .unwrap();
        assert_eq!(child.attribs().len(), 1);
        assert_eq!(child.doc(), None);
        assert_eq!(
            r.create_child("output", Vec::<(&str, ParamValue)>::new()).unwrap_err(),
            ParamError::DuplicateName("output".into())
        );
        assert_eq!(
            r.create_child("2bad", Vec::<(&str, ParamValue)>::new()).unwrap_err(),
            ParamError::InvalidIdentifier("2bad".into())
        );
        assert!(matches!(
            r.create_child("_doc_x", Vec::<(&str, ParamValue)>::new()),
            Err(ParamError::InvalidIdentifier(_))
        ));
        assert!(r.create_child("c", [("a", ParamValue::Int(1)), ("a", ParamValue::Int(2))]).is_err());
    }

    #[test]
    fn declare_and_get() {
        let mut n = root();
        n.declare_attrib("nx", ParamValue::Int(64), Some("grid points")).unwrap();
        assert_eq!(n.get_attrib("nx").unwrap(), &ParamValue::Int(64));
        assert_eq!(n.attrib_doc("nx"), Some("grid points"));
        assert_eq!(
            n.declare_attrib("nx", ParamValue::Int(1), None),
            Err(ParamError::DuplicateName("nx".into()))
        );
        assert_eq!(
            n.declare_attrib("c", ParamValue::Real(f64::NAN), None),
            Err(ParamError::NonFinite)
        );
        assert!(matches!(n.get_attrib("missing"), Err(ParamError::UnknownParameter(_))));
        n.create_child("sub", Vec::<(&str, ParamValue)>::new()).unwrap();
        assert_eq!(
            n.declare_attrib("sub", ParamValue::Int(1), None),
            Err(ParamError::DuplicateName("sub".into()))
        );
    }

    #[test]
    fn set_rules() {
        let mut n = root();
        n.declare_attrib("nx", ParamValue::Int(64), None).unwrap();
        n.declare_attrib("period", ParamValue::Real(1.0), None).unwrap();
        n.declare_attrib("unset", ParamValue::None, None).unwrap();
        n.declare_attrib("xs", ParamValue::List(vec![ParamValue::Real(0.5)]), None).unwrap();
        n.set_attrib("nx", ParamValue::Int(128)).unwrap();
        assert_eq!(n.get_attrib("nx").unwrap(), &ParamValue::Int(128));
        n.set_attrib("nx", ParamValue::Int(7)).unwrap();
        assert_eq!(n.get_attrib("nx").unwrap(), &ParamValue::Int(7));
        assert_eq!(
            n.set_attrib("nz", ParamValue::Int(1)),
            Err(ParamError::UnknownParameter(ParamPath::single("nz")))
        );
        n.set_attrib("period", ParamValue::Int(2)).unwrap();
        assert_eq!(n.get_attrib("period").unwrap(), &ParamValue::Real(2.0));
        assert!(matches!(
            n.set_attrib("nx", ParamValue::Real(2.0)),
            Err(ParamError::KindMismatch { .. })
        ));
        assert!(matches!(
            n.set_attrib("nx", ParamValue::None),
            Err(ParamError::KindMismatch { .. })
        ));
        n.set_attrib("unset", ParamValue::text("now set")).unwrap();
        n.set_attrib("xs", ParamValue::List(vec![ParamValue::Int(3)])).unwrap();
        assert_eq!(
            n.get_attrib("xs").unwrap(),
            &ParamValue::List(vec![ParamValue::Real(3.0)])
        );
        assert!(n
            .set_attrib("xs", ParamValue::List(vec![ParamValue::text("a")]))
            .is_err());
    }

    #[test]
    fn paths() {
        let p: ParamPath = "a.b.c".parse().unwrap();
        assert_eq!(p.segments(), ["a", "b", "c"]);
        assert_eq!(p.to_string(), "a.b.c");
        assert!("a..b".parse::<ParamPath>().is_err());
        assert!("".parse::<ParamPath>().is_err());
    }

    #[test]
    fn overrides() {
        let mut defaults = root();
        defaults.declare_attrib("nx", ParamValue::Int(64), None).unwrap();
        defaults
            .create_child("output", [("period", ParamValue::Real(1.0))])
            .unwrap();

        let mut over = root();
        over.declare_attrib("nx", ParamValue::Int(128), None).unwrap();
        let result = apply_overrides(&defaults, &over).unwrap();
        assert_eq!(result.get_attrib("nx").unwrap(), &ParamValue::Int(128));
        assert_eq!(result.child("output"), defaults.child("output"));

        assert_eq!(apply_overrides(&defaults, &defaults).unwrap(), defaults);

        let mut bad = root();
        bad.create_child("oper", [("nz", ParamValue::Int(4))]).unwrap();
        assert_eq!(
            apply_overrides(&defaults, &bad).unwrap_err().to_string(),
            "unknown parameter oper"
        );

        let mut bad = root();
        bad.create_child("output", [("dt", ParamValue::Int(4))]).unwrap();
        assert_eq!(
            apply_overrides(&defaults, &bad),
            Err(ParamError::UnknownParameter("output.dt".parse().unwrap()))
        );

        let mut bad = root();
        bad.create_child("output", [("period", ParamValue::text("x"))]).unwrap();
        match apply_overrides(&defaults, &bad) {
            Err(ParamError::KindMismatch { path, .. }) => assert_eq!(path.to_string(), "output.period"),
            other => panic!("{other:?}"),
        }
    }
}
