//! Random parameter trees and values.

use proptest::prelude::*;
use sciforge::param_tree::{ParamNode, ParamValue};

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![
        any::<f64>().prop_filter("finite", |x| x.is_finite()),
        prop::sample::select(&[0.0, -0.0, 1.0, 1e-5, 1e16, 0.1, -2.5, f64::MIN_POSITIVE, f64::MAX][..]),
    ]
}

fn text() -> impl Strategy<Value = String> {
    prop_oneof![
        any::<String>(),
        prop::sample::select(
            &["True", "None", "12", "-3", "1.5", "1e3", "[1, 2]", "'q'", "it's", "a\\b", "", " ", "[", "nan", "inf"][..]
        )
        .prop_map(String::from),
    ]
}

fn scalar() -> impl Strategy<Value = ParamValue> {
    prop_oneof![
        any::<bool>().prop_map(ParamValue::Bool),
        any::<i64>().prop_map(ParamValue::Int),
        finite().prop_map(ParamValue::Real),
        text().prop_map(ParamValue::Text),
    ]
}

pub fn value() -> impl Strategy<Value = ParamValue> {
    prop_oneof![
        4 => scalar(),
        1 => Just(ParamValue::None),
        1 => prop::collection::vec(any::<bool>().prop_map(ParamValue::Bool), 0..4).prop_map(ParamValue::List),
        1 => prop::collection::vec(any::<i64>().prop_map(ParamValue::Int), 1..4).prop_map(ParamValue::List),
        1 => prop::collection::vec(finite().prop_map(ParamValue::Real), 1..4).prop_map(ParamValue::List),
        1 => prop::collection::vec(text().prop_map(ParamValue::Text), 1..4).prop_map(ParamValue::List),
    ]
}

fn ident() -> impl Strategy<Value = String> {
    "[A-Za-z_][A-Za-z0-9_]{0,6}".prop_filter("reserved prefix", |s| !s.starts_with("_doc_"))
}

fn doc() -> impl Strategy<Value = Option<String>> {
    prop::option::weighted(0.3, any::<String>())
}

#[derive(Debug, Clone)]
enum Entry {
    Attrib(ParamValue, Option<String>),
    Child(ParamNode),
}

fn build(tag: &str, node_doc: Option<String>, entries: Vec<(String, Entry)>) -> ParamNode {
    let mut node = ParamNode::new(tag).unwrap();
    node.set_doc(node_doc.as_deref());
    for (name, entry) in entries {
        if node.contains_name(&name) {
            continue;
        }
        match entry {
            Entry::Attrib(v, d) => node.declare_attrib(&name, v, d.as_deref()).unwrap(),
            Entry::Child(child) => {
                let mut renamed = ParamNode::new(&name).unwrap();
                renamed.set_doc(child.doc());
                for a in child.attribs() {
                    renamed.declare_attrib(a.name(), a.value().clone(), a.doc()).unwrap();
                }
                for c in child.children() {
                    renamed.add_child(c.clone()).unwrap();
                }
                node.add_child(renamed).unwrap();
            }
        }
    }
    node
}

pub fn tree() -> impl Strategy<Value = ParamNode> {
    let attrib_entry = || (ident(), (value(), doc()).prop_map(|(v, d)| Entry::Attrib(v, d)));
    let leaf = (doc(), prop::collection::vec(attrib_entry(), 0..4)).prop_map(|(d, e)| build("n", d, e));
    // Depth of at most 5 levels including the root.
    leaf.prop_recursive(5, 128, 4, move |inner| {
        let entry = prop_oneof![
            1 => attrib_entry(),
            1 => (ident(), inner.prop_map(Entry::Child)),
        ];
        (doc(), prop::collection::vec(entry, 0..5)).prop_map(|(d, e)| build("n", d, e))
    })
}

pub fn depth(node: &ParamNode) -> usize {
    1 + node.children().map(depth).max().unwrap_or(0)
}
