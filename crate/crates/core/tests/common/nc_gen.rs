//! Random trees for the NetCDF writer, and checks on parsed files.

use proptest::prelude::*;
use sciforge::ncdump::{
    encode_header, flatten_params, parse_netcdf, print_tree, read_var_data, write_netcdf, FlatTarget, NcError, NcFile,
    NcValues,
};
use sciforge::param_tree::{ParamNode, ParamValue};
use serde_json::Value;

pub fn assert_round_trip(tree: &ParamNode) -> Result<(), TestCaseError> {
    let bytes = write_netcdf(tree).unwrap();
    let file = parse_netcdf(&bytes).unwrap();
    let header = encode_header(&file);
    prop_assert_eq!(&header[..], &bytes[..header.len()]);
    let mut gatts = file.gatts.iter();
    let mut vars = file.vars.iter();
    for entry in flatten_params(tree).unwrap() {
        match entry.target {
            FlatTarget::GlobalAttribute => {
                let a = gatts.next().unwrap();
                prop_assert_eq!(&a.name, &entry.name);
                prop_assert_eq!(&a.values, &entry.values);
            }
            FlatTarget::Variable => {
                let v = vars.next().unwrap();
                prop_assert_eq!(&v.name, &entry.name);
                prop_assert_eq!(read_var_data(&bytes, &file, &v.name).unwrap(), entry.values);
            }
        }
    }
    prop_assert!(gatts.next().is_none() && vars.next().is_none());
    Ok(())
}

fn scalar() -> impl Strategy<Value = ParamValue> {
    prop_oneof![
        any::<bool>().prop_map(ParamValue::Bool),
        any::<i32>().prop_map(|i| ParamValue::Int(i as i64)),
        any::<f64>()
            .prop_filter("finite", |x| x.is_finite())
            .prop_map(ParamValue::Real),
        ".{0,12}".prop_map(ParamValue::Text),
    ]
}

fn value() -> impl Strategy<Value = ParamValue> {
    prop_oneof![
        3 => scalar(),
        1 => prop::collection::vec(any::<i32>().prop_map(|i| ParamValue::Int(i as i64)), 1..6).prop_map(ParamValue::List),
        1 => prop::collection::vec((-1e300f64..1e300).prop_map(ParamValue::Real), 1..6).prop_map(ParamValue::List),
        1 => prop::collection::vec(any::<bool>().prop_map(ParamValue::Bool), 1..6).prop_map(ParamValue::List),
    ]
}

fn doc() -> impl Strategy<Value = Option<String>> {
    prop::option::weighted(0.3, "[ -~]{0,10}")
}

pub fn node(depth: u32) -> BoxedStrategy<ParamNode> {
    let attribs = prop::collection::vec((value(), doc()), 0..4);
    let leaf = (doc(), attribs).prop_map(|(d, attribs)| {
        let mut n = ParamNode::new("n").unwrap();
        n.set_doc(d.as_deref());
        for (i, (v, d)) in attribs.into_iter().enumerate() {
            n.declare_attrib(&format!("a{i}"), v, d.as_deref()).unwrap();
        }
        n
    });
    if depth == 0 {
        return leaf.boxed();
    }
    (leaf, prop::collection::vec(node(depth - 1), 0..3))
        .prop_map(|(mut n, children)| {
            for (i, c) in children.into_iter().enumerate() {
                let mut renamed = ParamNode::new(&format!("c{i}")).unwrap();
                renamed.set_doc(c.doc());
                for a in c.attribs() {
                    renamed.declare_attrib(a.name(), a.value().clone(), a.doc()).unwrap();
                }
                for g in c.children() {
                    renamed.add_child(g.clone()).unwrap();
                }
                n.add_child(renamed).unwrap();
            }
            n
        })
        .boxed()
}

/// A parse of corrupted bytes either fails or describes exactly the header it read.
pub fn check_mutant(bytes: &[u8]) -> Result<(), String> {
    if let Ok(file) = parse_netcdf(bytes) {
        let header = encode_header(&file);
        if header[..] != bytes[..header.len()] {
            return Err(format!("model does not re-encode to the parsed header: {file:?}"));
        }
        let _ = print_tree(&file, "fuzz", Some(bytes));
    }
    Ok(())
}

fn json_values(v: &NcValues) -> Value {
    match v {
        NcValues::Char(b) => Value::from(String::from_utf8(b.clone()).unwrap()),
        NcValues::Byte(x) => x.iter().map(|&i| i as i64).collect(),
        NcValues::Short(x) => x.iter().map(|&i| i as i64).collect(),
        NcValues::Int(x) => x.iter().map(|&i| i as i64).collect(),
        NcValues::Float(x) => x.iter().map(|&f| f as f64).collect(),
        NcValues::Double(x) => x.iter().copied().collect(),
    }
}

fn numpy_dtype(v: &NcValues) -> &'static str {
    match v {
        NcValues::Char(_) => "char",
        NcValues::Byte(_) => "int8",
        NcValues::Short(_) => "int16",
        NcValues::Int(_) => "int32",
        NcValues::Float(_) => "float32",
        NcValues::Double(_) => "float64",
    }
}

/// Compares a parsed file with the readback frozen from scipy.
pub fn assert_matches_reference(bytes: &[u8], file: &NcFile, reference: &Value) {
    assert_eq!(reference["version"], file.version.number());
    assert_eq!(reference["numrecs"], file.numrecs);
    let dims: Vec<Value> = file
        .dims
        .iter()
        .map(|d| serde_json::json!([d.name, d.length]))
        .collect();
    assert_eq!(reference["dims"], Value::Array(dims));

    let gatts = reference["gatts"].as_object().unwrap();
    assert_eq!(gatts.len(), file.gatts.len());
    for a in &file.gatts {
        let expected = &gatts[&a.name];
        assert_eq!(expected[0], numpy_dtype(&a.values), "{}", a.name);
        assert_eq!(expected[1], json_values(&a.values), "{}", a.name);
    }

    let vars = reference["vars"].as_object().unwrap();
    assert_eq!(vars.len(), file.vars.len());
    for var in &file.vars {
        let expected = &vars[&var.name];
        let dims: Vec<&str> = var.dim_refs.iter().map(|&d| file.dims[d].name.as_str()).collect();
        assert_eq!(expected["dims"], serde_json::json!(dims));
        let atts = expected["atts"].as_object().unwrap();
        assert_eq!(atts.len(), var.atts.len());
        for a in &var.atts {
            assert_eq!(atts[&a.name], json_values(&a.values));
        }
        if file.is_record_var(var) {
            assert_eq!(read_var_data(bytes, file, &var.name), Err(NcError::RecordVarUnsupported(var.name.clone())));
            continue;
        }
        let data = read_var_data(bytes, file, &var.name).unwrap();
        assert_eq!(expected["dtype"], numpy_dtype(&data));
        assert_eq!(expected["data"], json_values(&data));
    }
}
