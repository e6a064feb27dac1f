//! Output stripping for Jupyter notebooks.
//!
//! Code cells lose their outputs, execution counts and the `execution`
//! timing metadata; everything else, including key order and number
//! spelling, is kept. Serialization matches Jupyter's own layout (one-space
//! indentation, raw non-ASCII, trailing newline) so that stripping an
//! already clean notebook reproduces its bytes.

use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};

pub const NBCONVERT_SUFFIX: &str = ".nbconvert.ipynb";

#[derive(Debug, thiserror::Error)]
pub enum NbError {
    #[error("unsupported nbformat {0} (only version 4 is handled)")]
    UnsupportedNbformat(i64),
    #[error("malformed notebook: {0}")]
    MalformedNotebook(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

fn malformed(reason: impl Into<String>) -> NbError {
    NbError::MalformedNotebook(reason.into())
}

/// A validated nbformat 4 document.
#[derive(Debug, Clone, PartialEq)]
pub struct NotebookDoc {
    root: Map<String, Value>,
}

impl NotebookDoc {
    pub fn parse(text: &str) -> Result<Self, NbError> {
        let value: Value = serde_json::from_str(text).map_err(|e| malformed(e.to_string()))?;
        Self::from_value(value)
    }

    pub fn from_value(value: Value) -> Result<Self, NbError> {
        let Value::Object(root) = value else {
            return Err(malformed("top level is not an object"));
        };
        let major = root
            .get("nbformat")
            .and_then(Value::as_i64)
            .ok_or_else(|| malformed("missing integer nbformat"))?;
        if major != 4 {
            return Err(NbError::UnsupportedNbformat(major));
        }
        let cells = root
            .get("cells")
            .and_then(Value::as_array)
            .ok_or_else(|| malformed("cells is not a list"))?;
        for (i, cell) in cells.iter().enumerate() {
            let cell = cell
                .as_object()
                .ok_or_else(|| malformed(format!("cell {i} is not an object")))?;
            if !cell.get("cell_type").is_some_and(Value::is_string) {
                return Err(malformed(format!("cell {i} has no cell_type")));
            }
            if cell.get("metadata").is_some_and(|m| !m.is_object()) {
                return Err(malformed(format!("metadata of cell {i} is not an object")));
            }
        }
        Ok(NotebookDoc { root })
    }

    pub fn as_value(&self) -> &Map<String, Value> {
        &self.root
    }

    pub fn cells(&self) -> &[Value] {
        self.root["cells"].as_array().expect("validated")
    }

    /// Jupyter's on-disk layout.
    pub fn to_text(&self) -> String {
        let mut out = Vec::new();
        let mut ser = serde_json::Serializer::with_formatter(&mut out, serde_json::ser::PrettyFormatter::with_indent(b" "));
        self.root.serialize(&mut ser).expect("serializing JSON values cannot fail");
        out.push(b'\n');
        String::from_utf8(out).expect("serde_json emits UTF-8")
    }
}

pub fn strip_notebook(doc: &NotebookDoc) -> NotebookDoc {
    let mut root = doc.root.clone();
    let cells = root
        .get_mut("cells")
        .and_then(Value::as_array_mut)
        .expect("validated");
    for cell in cells.iter_mut().filter_map(Value::as_object_mut) {
        if cell.get("cell_type").and_then(Value::as_str) != Some("code") {
            continue;
        }
        cell.insert("outputs".into(), Value::Array(Vec::new()));
        cell.insert("execution_count".into(), Value::Null);
        if let Some(Value::Object(meta)) = cell.get_mut("metadata") {
            meta.shift_remove("execution");
        }
    }
    NotebookDoc { root }
}

pub fn should_process_path(path: &str, include_nbconvert: bool) -> bool {
    path.ends_with(".ipynb") && (include_nbconvert || !path.ends_with(NBCONVERT_SUFFIX))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StripOutcome {
    AlreadyClean,
    Stripped,
    /// Check mode: the file would change but was left alone.
    WouldChange,
}

/// Strips the notebook at `path` in place, or only reports with `check`.
pub fn strip_file(path: &Path, check: bool) -> Result<StripOutcome, NbError> {
    let io_err = |source| NbError::Io {
        path: path.display().to_string(),
        source,
    };
    let text = std::fs::read_to_string(path).map_err(io_err)?;
    let stripped = strip_notebook(&NotebookDoc::parse(&text)?).to_text();
    if stripped == text {
        return Ok(StripOutcome::AlreadyClean);
    }
    if check {
        return Ok(StripOutcome::WouldChange);
    }
    write_atomically(path, stripped.as_bytes()).map_err(io_err)?;
    Ok(StripOutcome::Stripped)
}

/// Replaces `path` through a temporary file in the same directory.
fn write_atomically(path: &Path, contents: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents)?;
    tmp.as_file().sync_all()?;
    let permissions = std::fs::metadata(path)?.permissions();
    std::fs::set_permissions(tmp.path(), permissions)?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}
