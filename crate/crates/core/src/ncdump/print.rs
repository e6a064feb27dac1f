use std::fmt::Write;

use super::{read_var_data, NcAttr, NcFile, NcValues};
use crate::{format_f32, format_f64};

fn quote(bytes: &[u8]) -> String {
    let mut out = String::from("\"");
    for c in String::from_utf8_lossy(bytes).chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            '\0' => out.push_str("\\0"),
            c if c.is_control() => {
                let _ = write!(out, "\\u{{{:x}}}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

fn render_values(values: &NcValues) -> String {
    fn join<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
        items.iter().map(f).collect::<Vec<_>>().join(", ")
    }
    match values {
        NcValues::Char(bytes) => quote(bytes),
        NcValues::Byte(v) => join(v, i8::to_string),
        NcValues::Short(v) => join(v, i16::to_string),
        NcValues::Int(v) => join(v, i32::to_string),
        NcValues::Float(v) => join(v, |x| format_f32(*x)),
        NcValues::Double(v) => join(v, |x| format_f64(*x)),
    }
}

fn attr_line(out: &mut String, indent: &str, owner: &str, attr: &NcAttr) {
    let rendered = render_values(&attr.values);
    if rendered.is_empty() {
        let _ = writeln!(out, "{indent}{owner}:{} =", attr.name);
    } else {
        let _ = writeln!(out, "{indent}{owner}:{} = {rendered}", attr.name);
    }
}

/// Renders the header hierarchy; with `data`, the file bytes, a `data:`
/// section follows with the values of every fixed-size variable.
pub fn print_tree(file: &NcFile, title: &str, data: Option<&[u8]>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{title} (NetCDF classic, version {})", file.version.number());

    out.push_str("dimensions:\n");
    for dim in &file.dims {
        if dim.is_record() {
            let _ = writeln!(out, "  {} = UNLIMITED ({} currently)", dim.name, file.numrecs);
        } else {
            let _ = writeln!(out, "  {} = {}", dim.name, dim.length);
        }
    }

    out.push_str("global attributes:\n");
    for attr in &file.gatts {
        attr_line(&mut out, "  ", "", attr);
    }

    out.push_str("variables:\n");
    for var in &file.vars {
        let dims: Vec<&str> = var.dim_refs.iter().map(|&d| file.dims[d].name.as_str()).collect();
        if dims.is_empty() {
            let _ = writeln!(out, "  {} {}", var.nc_type.name(), var.name);
        } else {
            let _ = writeln!(out, "  {} {}({})", var.nc_type.name(), var.name, dims.join(", "));
        }
        for attr in &var.atts {
            attr_line(&mut out, "    ", &var.name, attr);
        }
    }

    if let Some(bytes) = data {
        out.push_str("data:\n");
        for var in &file.vars {
            if file.is_record_var(var) {
                let _ = writeln!(out, "  {} = <record variable, not read>", var.name);
                continue;
            }
            match read_var_data(bytes, file, &var.name) {
                Ok(values) => {
                    let _ = writeln!(out, "  {} = {}", var.name, render_values(&values));
                }
                Err(err) => {
                    let _ = writeln!(out, "  {} = <{err}>", var.name);
                }
            }
        }
    }
    out
}
