//! NetCDF classic (CDF-1 and CDF-2) files without any external library.
//!
//! [`parse_netcdf`] decodes the header into an [`NcFile`], [`read_var_data`]
//! decodes the payload of fixed-size variables, [`print_tree`] renders the
//! hierarchy as text and [`write_netcdf`] stores a parameter tree as a flat
//! CDF-1 file. Classic files have no groups, so tree paths are flattened to
//! dotted names (`output.period`).

mod parse;
mod print;
mod write;

pub use parse::{parse_netcdf, read_var_data};
pub use print::print_tree;
pub use write::{encode_header, flatten_params, write_netcdf, FlatEntry, FlatTarget};

/// First bytes of an HDF5 file (and of NetCDF-4 files built on it).
pub const HDF5_MAGIC: &[u8; 8] = b"\x89HDF\r\n\x1a\n";

pub(crate) const NC_DIMENSION: u32 = 0x0A;
pub(crate) const NC_VARIABLE: u32 = 0x0B;
pub(crate) const NC_ATTRIBUTE: u32 = 0x0C;
/// `numrecs` value written by streaming producers that never backfill it.
pub const STREAMING: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NcError {
    #[error("not a NetCDF classic file (bad magic at offset 0)")]
    BadMagic,
    #[error("unsupported NetCDF version byte {version} at offset 3")]
    UnsupportedVersion { version: u8 },
    #[error("header truncated at offset {offset}")]
    TruncatedHeader { offset: u64 },
    #[error("non-zero padding at offset {offset}")]
    MalformedPadding { offset: u64 },
    #[error("malformed header at offset {offset}: {reason}")]
    MalformedHeader { offset: u64, reason: String },
    #[error("data of variable {name:?} truncated: needs bytes up to offset {end}, file has {len}")]
    TruncatedData { name: String, end: u64, len: u64 },
    #[error("no variable named {0:?}")]
    UnknownVariable(String),
    #[error("reading record variable {0:?} is not supported")]
    RecordVarUnsupported(String),
    #[error("cannot store {path} in NetCDF classic: {reason}")]
    UnrepresentableValue { path: String, reason: &'static str },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NcVersion {
    /// 32-bit offsets.
    Cdf1,
    /// 64-bit offsets.
    Cdf2,
}

impl NcVersion {
    pub fn number(self) -> u8 {
        match self {
            NcVersion::Cdf1 => 1,
            NcVersion::Cdf2 => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NcType {
    Byte = 1,
    Char = 2,
    Short = 3,
    Int = 4,
    Float = 5,
    Double = 6,
}

impl NcType {
    pub fn from_code(code: u32) -> Option<Self> {
        Some(match code {
            1 => NcType::Byte,
            2 => NcType::Char,
            3 => NcType::Short,
            4 => NcType::Int,
            5 => NcType::Float,
            6 => NcType::Double,
            _ => return None,
        })
    }

    pub fn size(self) -> u64 {
        match self {
            NcType::Byte | NcType::Char => 1,
            NcType::Short => 2,
            NcType::Int | NcType::Float => 4,
            NcType::Double => 8,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            NcType::Byte => "byte",
            NcType::Char => "char",
            NcType::Short => "short",
            NcType::Int => "int",
            NcType::Float => "float",
            NcType::Double => "double",
        }
    }
}

/// Typed values of an attribute or variable.
#[derive(Debug, Clone, PartialEq)]
pub enum NcValues {
    Byte(Vec<i8>),
    /// Raw bytes; usually UTF-8 text.
    Char(Vec<u8>),
    Short(Vec<i16>),
    Int(Vec<i32>),
    Float(Vec<f32>),
    Double(Vec<f64>),
}

impl NcValues {
    pub fn nc_type(&self) -> NcType {
        match self {
            NcValues::Byte(_) => NcType::Byte,
            NcValues::Char(_) => NcType::Char,
            NcValues::Short(_) => NcType::Short,
            NcValues::Int(_) => NcType::Int,
            NcValues::Float(_) => NcType::Float,
            NcValues::Double(_) => NcType::Double,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            NcValues::Byte(v) => v.len(),
            NcValues::Char(v) => v.len(),
            NcValues::Short(v) => v.len(),
            NcValues::Int(v) => v.len(),
            NcValues::Float(v) => v.len(),
            NcValues::Double(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn text(s: &str) -> Self {
        NcValues::Char(s.as_bytes().to_vec())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NcDim {
    pub name: String,
    /// 0 marks the record (UNLIMITED) dimension.
    pub length: u32,
}

impl NcDim {
    pub fn is_record(&self) -> bool {
        self.length == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NcAttr {
    pub name: String,
    pub values: NcValues,
}

impl NcAttr {
    pub fn nc_type(&self) -> NcType {
        self.values.nc_type()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NcVar {
    pub name: String,
    /// Indices into [`NcFile::dims`].
    pub dim_refs: Vec<usize>,
    pub atts: Vec<NcAttr>,
    pub nc_type: NcType,
    /// Bytes per variable (per record for record variables), as stored.
    pub vsize: u32,
    pub begin: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NcFile {
    pub version: NcVersion,
    pub numrecs: u32,
    pub dims: Vec<NcDim>,
    pub gatts: Vec<NcAttr>,
    pub vars: Vec<NcVar>,
}

impl NcFile {
    pub fn var(&self, name: &str) -> Option<&NcVar> {
        self.vars.iter().find(|v| v.name == name)
    }

    pub fn is_record_var(&self, var: &NcVar) -> bool {
        var.dim_refs.first().is_some_and(|&d| self.dims[d].is_record())
    }

    /// Number of elements of a fixed-size variable, or per record.
    pub fn element_count(&self, var: &NcVar) -> u64 {
        var.dim_refs
            .iter()
            .map(|&d| self.dims[d].length as u64)
            .filter(|&len| len > 0)
            .product()
    }

    /// Bytes between consecutive records.
    pub fn record_size(&self) -> u64 {
        let record_vars: Vec<&NcVar> = self.vars.iter().filter(|v| self.is_record_var(v)).collect();
        match record_vars.as_slice() {
            // A lone record variable is stored without per-record padding.
            [only] => self.element_count(only) * only.nc_type.size(),
            many => many.iter().map(|v| v.vsize as u64).sum(),
        }
    }
}

pub(crate) fn padding(len: u64) -> u64 {
    (4 - len % 4) % 4
}
