use crate::param_tree::{ParamNode, ParamValue, DOC_TAG};

use super::{
    padding, NcAttr, NcDim, NcError, NcFile, NcValues, NcVar, NcVersion, NC_ATTRIBUTE, NC_DIMENSION,
    NC_VARIABLE,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlatTarget {
    GlobalAttribute,
    /// A one-dimensional variable with a dimension of the same name.
    Variable,
}

/// One entry of a flattened parameter tree.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatEntry {
    pub name: String,
    pub target: FlatTarget,
    pub values: NcValues,
}

/// Flattens a tree into dotted names: node docs, then each attribute
/// followed by its doc, then children, all in declaration order. The root
/// tag is not part of the names.
pub fn flatten_params(params: &ParamNode) -> Result<Vec<FlatEntry>, NcError> {
    let mut out = Vec::new();
    flatten_into(params, "", &mut out)?;
    Ok(out)
}

fn flatten_into(node: &ParamNode, prefix: &str, out: &mut Vec<FlatEntry>) -> Result<(), NcError> {
    let doc_entry = |name: String, text: &str| FlatEntry {
        name,
        target: FlatTarget::GlobalAttribute,
        values: NcValues::text(text),
    };
    if let Some(doc) = node.doc() {
        out.push(doc_entry(format!("{prefix}{DOC_TAG}"), doc));
    }
    for attrib in node.attribs() {
        let path = format!("{prefix}{}", attrib.name());
        let (target, values) = encode_value(&path, attrib.value())?;
        if let Some(doc) = attrib.doc() {
            out.push(FlatEntry { name: path.clone(), target, values });
            out.push(doc_entry(format!("{prefix}{DOC_TAG}{}", attrib.name()), doc));
        } else {
            out.push(FlatEntry { name: path, target, values });
        }
    }
    for child in node.children() {
        flatten_into(child, &format!("{prefix}{}.", child.tag()), out)?;
    }
    Ok(())
}

fn int32(path: &str, i: i64) -> Result<i32, NcError> {
    i32::try_from(i).map_err(|_| NcError::UnrepresentableValue {
        path: path.to_string(),
        reason: "integer outside the 32-bit range",
    })
}

fn encode_value(path: &str, value: &ParamValue) -> Result<(FlatTarget, NcValues), NcError> {
    let unrepresentable = |reason| NcError::UnrepresentableValue {
        path: path.to_string(),
        reason,
    };
    let scalar = |values| Ok((FlatTarget::GlobalAttribute, values));
    match value {
        ParamValue::Bool(b) => scalar(NcValues::Byte(vec![*b as i8])),
        ParamValue::Int(i) => scalar(NcValues::Int(vec![int32(path, *i)?])),
        ParamValue::Real(x) => scalar(NcValues::Double(vec![*x])),
        ParamValue::Text(s) => scalar(NcValues::text(s)),
        ParamValue::None => Err(unrepresentable("None has no NetCDF encoding")),
        ParamValue::List(items) => {
            let values = match items.first() {
                None => return Err(unrepresentable("empty lists have no element type")),
                Some(ParamValue::Bool(_)) => NcValues::Byte(
                    items
                        .iter()
                        .map(|v| matches!(v, ParamValue::Bool(true)) as i8)
                        .collect(),
                ),
                Some(ParamValue::Int(_)) => NcValues::Int(
                    items
                        .iter()
                        .map(|v| match v {
                            ParamValue::Int(i) => int32(path, *i),
                            _ => unreachable!("lists are homogeneous"),
                        })
                        .collect::<Result<_, _>>()?,
                ),
                Some(ParamValue::Real(_)) => NcValues::Double(
                    items
                        .iter()
                        .map(|v| match v {
                            ParamValue::Real(x) => *x,
                            _ => unreachable!("lists are homogeneous"),
                        })
                        .collect(),
                ),
                Some(_) => return Err(unrepresentable("only numeric lists can be stored")),
            };
            Ok((FlatTarget::Variable, values))
        }
    }
}

struct Writer {
    out: Vec<u8>,
}

impl Writer {
    fn u32(&mut self, v: u32) {
        self.out.extend(v.to_be_bytes());
    }

    fn pad(&mut self, len: u64) {
        self.out.extend(std::iter::repeat_n(0u8, padding(len) as usize));
    }

    fn name(&mut self, name: &str) {
        self.u32(name.len() as u32);
        self.out.extend(name.as_bytes());
        self.pad(name.len() as u64);
    }

    fn list_header(&mut self, tag: u32, n: usize) {
        if n == 0 {
            self.u32(0);
            self.u32(0);
        } else {
            self.u32(tag);
            self.u32(n as u32);
        }
    }

    fn values(&mut self, values: &NcValues) {
        let start = self.out.len();
        match values {
            NcValues::Byte(v) => self.out.extend(v.iter().map(|&b| b as u8)),
            NcValues::Char(v) => self.out.extend(v),
            NcValues::Short(v) => v.iter().for_each(|x| self.out.extend(x.to_be_bytes())),
            NcValues::Int(v) => v.iter().for_each(|x| self.out.extend(x.to_be_bytes())),
            NcValues::Float(v) => v.iter().for_each(|x| self.out.extend(x.to_be_bytes())),
            NcValues::Double(v) => v.iter().for_each(|x| self.out.extend(x.to_be_bytes())),
        }
        self.pad((self.out.len() - start) as u64);
    }

    fn attrs(&mut self, attrs: &[NcAttr]) {
        self.list_header(NC_ATTRIBUTE, attrs.len());
        for a in attrs {
            self.name(&a.name);
            self.u32(a.nc_type() as u32);
            self.u32(a.values.len() as u32);
            self.values(&a.values);
        }
    }
}

/// Serializes the header of `file` exactly as stored.
pub fn encode_header(file: &NcFile) -> Vec<u8> {
    let mut w = Writer { out: Vec::new() };
    w.out.extend(b"CDF");
    w.out.push(file.version.number());
    w.u32(file.numrecs);
    w.list_header(NC_DIMENSION, file.dims.len());
    for d in &file.dims {
        w.name(&d.name);
        w.u32(d.length);
    }
    w.attrs(&file.gatts);
    w.list_header(NC_VARIABLE, file.vars.len());
    for v in &file.vars {
        w.name(&v.name);
        w.u32(v.dim_refs.len() as u32);
        for &d in &v.dim_refs {
            w.u32(d as u32);
        }
        w.attrs(&v.atts);
        w.u32(v.nc_type as u32);
        w.u32(v.vsize);
        match file.version {
            NcVersion::Cdf1 => w.u32(v.begin as u32),
            NcVersion::Cdf2 => w.out.extend(v.begin.to_be_bytes()),
        }
    }
    w.out
}

/// Writes `params` as a CDF-1 file (see [`flatten_params`] for the naming).
pub fn write_netcdf(params: &ParamNode) -> Result<Vec<u8>, NcError> {
    let mut file = NcFile {
        version: NcVersion::Cdf1,
        numrecs: 0,
        dims: Vec::new(),
        gatts: Vec::new(),
        vars: Vec::new(),
    };
    let mut payloads = Vec::new();
    for entry in flatten_params(params)? {
        match entry.target {
            FlatTarget::GlobalAttribute => file.gatts.push(NcAttr {
                name: entry.name,
                values: entry.values,
            }),
            FlatTarget::Variable => {
                let raw = entry.values.len() as u64 * entry.values.nc_type().size();
                let vsize = u32::try_from(raw + padding(raw)).map_err(|_| NcError::UnrepresentableValue {
                    path: entry.name.clone(),
                    reason: "list too large for a CDF-1 variable",
                })?;
                file.dims.push(NcDim {
                    name: entry.name.clone(),
                    length: entry.values.len() as u32,
                });
                file.vars.push(NcVar {
                    name: entry.name,
                    dim_refs: vec![file.dims.len() - 1],
                    atts: Vec::new(),
                    nc_type: entry.values.nc_type(),
                    vsize,
                    begin: 0,
                });
                payloads.push(entry.values);
            }
        }
    }

    // Begin offsets are fixed-width, so the header length does not depend on them.
    let mut begin = encode_header(&file).len() as u64;
    for var in &mut file.vars {
        var.begin = begin;
        begin += var.vsize as u64;
    }
    if begin > u32::MAX as u64 {
        return Err(NcError::UnrepresentableValue {
            path: String::new(),
            reason: "data section exceeds the CDF-1 offset range",
        });
    }
    let mut w = Writer {
        out: encode_header(&file),
    };
    for values in &payloads {
        w.values(values);
    }
    Ok(w.out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ncdump::{parse_netcdf, read_var_data};

    #[test]
    fn empty_root() {
        let bytes = write_netcdf(&ParamNode::new("params").unwrap()).unwrap();
        let mut expected = b"CDF\x01".to_vec();
        expected.extend([0u8; 28]);
        assert_eq!(bytes, expected);
    }

    #[test]
    fn scalar_int_layout() {
        let mut p = ParamNode::new("params").unwrap();
        p.declare_attrib("nx", ParamValue::Int(64), None).unwrap();
        let bytes = write_netcdf(&p).unwrap();
        let mut expected = b"CDF\x01".to_vec();
        expected.extend([0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0]);
        expected.extend([0, 0, 0, 0x0C, 0, 0, 0, 1]);
        expected.extend([0, 0, 0, 2, b'n', b'x', 0, 0]);
        expected.extend([0, 0, 0, 4, 0, 0, 0, 1, 0, 0, 0, 64]);
        expected.extend([0u8; 8]);
        assert_eq!(bytes, expected);
    }

    #[test]
    fn list_becomes_variable() {
        let mut p = ParamNode::new("params").unwrap();
        p.declare_attrib(
            "x",
            ParamValue::List(vec![ParamValue::Int(1), ParamValue::Int(2), ParamValue::Int(3)]),
            None,
        )
        .unwrap();
        let bytes = write_netcdf(&p).unwrap();
        let f = parse_netcdf(&bytes).unwrap();
        assert_eq!(f.dims, vec![NcDim { name: "x".into(), length: 3 }]);
        assert_eq!(read_var_data(&bytes, &f, "x").unwrap(), NcValues::Int(vec![1, 2, 3]));
        assert_eq!(
            read_var_data(&bytes[..bytes.len() - 1], &f, "x"),
            Err(NcError::TruncatedData { name: "x".into(), end: bytes.len() as u64, len: bytes.len() as u64 - 1 })
        );
        assert_eq!(read_var_data(&bytes, &f, "y"), Err(NcError::UnknownVariable("y".into())));
    }

    #[test]
    fn dotted_names_and_docs() {
        let mut p = ParamNode::new("params").unwrap();
        p.set_doc(Some("root doc"));
        let out = p.create_child("output", Vec::<(&str, ParamValue)>::new()).unwrap();
        out.declare_attrib("period", ParamValue::Real(0.5), Some("seconds")).unwrap();
        let names: Vec<_> = flatten_params(&p).unwrap().into_iter().map(|e| e.name).collect();
        assert_eq!(names, ["_doc_", "output.period", "output._doc_period"]);
    }

    #[test]
    fn unrepresentable() {
        for v in [
            ParamValue::None,
            ParamValue::List(vec![]),
            ParamValue::List(vec![ParamValue::Text("a".into())]),
            ParamValue::Int(1 << 40),
        ] {
            let mut p = ParamNode::new("params").unwrap();
            p.declare_attrib("a", v, None).unwrap();
            assert!(matches!(write_netcdf(&p), Err(NcError::UnrepresentableValue { .. })));
        }
    }
}
