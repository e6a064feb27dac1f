use std::collections::HashSet;

use super::{
    padding, NcAttr, NcDim, NcError, NcFile, NcType, NcValues, NcVar, NcVersion, NC_ATTRIBUTE, NC_DIMENSION,
    NC_VARIABLE, STREAMING,
};

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn offset(&self) -> u64 {
        self.pos as u64
    }

    fn remaining(&self) -> u64 {
        (self.bytes.len() - self.pos) as u64
    }

    fn take(&mut self, n: u64) -> Result<&'a [u8], NcError> {
        if n > self.remaining() {
            return Err(NcError::TruncatedHeader {
                offset: self.bytes.len() as u64,
            });
        }
        let start = self.pos;
        self.pos += n as usize;
        Ok(&self.bytes[start..self.pos])
    }

    fn u32(&mut self) -> Result<u32, NcError> {
        let b = self.take(4)?;
        Ok(u32::from_be_bytes(b.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64, NcError> {
        let b = self.take(8)?;
        Ok(u64::from_be_bytes(b.try_into().expect("8 bytes")))
    }

    fn malformed(&self, offset: u64, reason: impl Into<String>) -> NcError {
        NcError::MalformedHeader {
            offset,
            reason: reason.into(),
        }
    }

    fn skip_padding(&mut self, len: u64) -> Result<(), NcError> {
        let offset = self.offset();
        let pad = self.take(padding(len))?;
        if pad.iter().any(|&b| b != 0) {
            return Err(NcError::MalformedPadding { offset });
        }
        Ok(())
    }

    /// Element count, checked against the bytes left so that corrupt counts
    /// fail as truncation instead of huge allocations.
    fn count(&mut self, min_item_bytes: u64) -> Result<usize, NcError> {
        let n = self.u32()? as u64;
        if n.saturating_mul(min_item_bytes) > self.remaining() {
            return Err(NcError::TruncatedHeader {
                offset: self.bytes.len() as u64,
            });
        }
        Ok(n as usize)
    }

    fn name(&mut self) -> Result<String, NcError> {
        let offset = self.offset();
        let len = self.count(1)?;
        if len == 0 {
            return Err(self.malformed(offset, "empty name"));
        }
        let raw = self.take(len as u64)?;
        let name = std::str::from_utf8(raw)
            .map_err(|_| self.malformed(offset, "name is not UTF-8"))?
            .to_string();
        self.skip_padding(len as u64)?;
        Ok(name)
    }

    /// `ABSENT` (two zero words) or `tag nelems`; returns nelems.
    fn list_header(&mut self, tag: u32, min_item_bytes: u64) -> Result<usize, NcError> {
        let offset = self.offset();
        let found = self.u32()?;
        let count_offset = self.offset();
        let n = self.count(min_item_bytes)?;
        match (found, n) {
            (0, 0) => Ok(0),
            (0, _) => Err(self.malformed(count_offset, "absent list with non-zero count")),
            (t, 0) if t == tag => Err(self.malformed(offset, "empty list must be written as ABSENT")),
            (t, n) if t == tag => Ok(n),
            (t, _) => Err(self.malformed(offset, format!("expected list tag {tag:#x}, found {t:#x}"))),
        }
    }

    fn nc_type(&mut self) -> Result<NcType, NcError> {
        let offset = self.offset();
        let code = self.u32()?;
        NcType::from_code(code).ok_or_else(|| self.malformed(offset, format!("unknown nc_type {code}")))
    }

    fn values(&mut self, nc_type: NcType, n: usize) -> Result<NcValues, NcError> {
        let len = n as u64 * nc_type.size();
        let raw = self.take(len)?;
        let values = decode(nc_type, raw);
        self.skip_padding(len)?;
        Ok(values)
    }

    fn attrs(&mut self) -> Result<Vec<NcAttr>, NcError> {
        // name (8) + nc_type (4) + nelems (4)
        let n = self.list_header(NC_ATTRIBUTE, 16)?;
        let mut attrs = Vec::with_capacity(n);
        let mut seen = HashSet::new();
        for _ in 0..n {
            let offset = self.offset();
            let name = self.name()?;
            if !seen.insert(name.clone()) {
                return Err(self.malformed(offset, format!("duplicate attribute {name:?}")));
            }
            let nc_type = self.nc_type()?;
            let count = self.count(nc_type.size())?;
            let values = self.values(nc_type, count)?;
            attrs.push(NcAttr { name, values });
        }
        Ok(attrs)
    }
}

fn decode(nc_type: NcType, raw: &[u8]) -> NcValues {
    match nc_type {
        NcType::Byte => NcValues::Byte(raw.iter().map(|&b| b as i8).collect()),
        NcType::Char => NcValues::Char(raw.to_vec()),
        NcType::Short => NcValues::Short(
            raw.chunks_exact(2)
                .map(|c| i16::from_be_bytes([c[0], c[1]]))
                .collect(),
        ),
        NcType::Int => NcValues::Int(
            raw.chunks_exact(4)
                .map(|c| i32::from_be_bytes(c.try_into().expect("4 bytes")))
                .collect(),
        ),
        NcType::Float => NcValues::Float(
            raw.chunks_exact(4)
                .map(|c| f32::from_be_bytes(c.try_into().expect("4 bytes")))
                .collect(),
        ),
        NcType::Double => NcValues::Double(
            raw.chunks_exact(8)
                .map(|c| f64::from_be_bytes(c.try_into().expect("8 bytes")))
                .collect(),
        ),
    }
}

/// Parses the header of a classic file and checks that every variable's
/// data lies inside `bytes`.
pub fn parse_netcdf(bytes: &[u8]) -> Result<NcFile, NcError> {
    let mut r = Reader { bytes, pos: 0 };
    if bytes.len() < 3 {
        return if b"CDF".starts_with(bytes) {
            Err(NcError::TruncatedHeader { offset: bytes.len() as u64 })
        } else {
            Err(NcError::BadMagic)
        };
    }
    if &bytes[..3] != b"CDF" {
        return Err(NcError::BadMagic);
    }
    r.take(3)?;
    let version = match r.take(1)?[0] {
        1 => NcVersion::Cdf1,
        2 => NcVersion::Cdf2,
        v => return Err(NcError::UnsupportedVersion { version: v }),
    };
    let numrecs = r.u32()?;

    // name (8) + length (4)
    let ndims = r.list_header(NC_DIMENSION, 12)?;
    let mut dims: Vec<NcDim> = Vec::with_capacity(ndims);
    for _ in 0..ndims {
        let offset = r.offset();
        let name = r.name()?;
        let length = r.u32()?;
        if dims.iter().any(|d| d.name == name) {
            return Err(r.malformed(offset, format!("duplicate dimension {name:?}")));
        }
        if length == 0 && dims.iter().any(NcDim::is_record) {
            return Err(r.malformed(offset, "more than one record dimension"));
        }
        dims.push(NcDim { name, length });
    }

    let gatts = r.attrs()?;

    let offset_bytes = match version {
        NcVersion::Cdf1 => 4,
        NcVersion::Cdf2 => 8,
    };
    // name (8) + ndims (4) + vatt_list (8) + nc_type (4) + vsize (4) + begin
    let nvars = r.list_header(NC_VARIABLE, 28 + offset_bytes)?;
    let mut vars: Vec<NcVar> = Vec::with_capacity(nvars);
    let mut var_offsets = Vec::with_capacity(nvars);
    for _ in 0..nvars {
        let offset = r.offset();
        let name = r.name()?;
        if vars.iter().any(|v| v.name == name) {
            return Err(r.malformed(offset, format!("duplicate variable {name:?}")));
        }
        let rank = r.count(4)?;
        let mut dim_refs = Vec::with_capacity(rank);
        for position in 0..rank {
            let dim_offset = r.offset();
            let id = r.u32()? as usize;
            let Some(dim) = dims.get(id) else {
                return Err(r.malformed(dim_offset, format!("dimension id {id} out of range")));
            };
            if dim.is_record() && position > 0 {
                return Err(r.malformed(dim_offset, "record dimension must come first"));
            }
            dim_refs.push(id);
        }
        let atts = r.attrs()?;
        let nc_type = r.nc_type()?;
        let vsize = r.u32()?;
        let begin = match version {
            NcVersion::Cdf1 => r.u32()? as u64,
            NcVersion::Cdf2 => r.u64()?,
        };
        var_offsets.push(offset);
        vars.push(NcVar {
            name,
            dim_refs,
            atts,
            nc_type,
            vsize,
            begin,
        });
    }

    let file = NcFile {
        version,
        numrecs,
        dims,
        gatts,
        vars,
    };
    check_layout(&file, bytes.len() as u64, r.offset(), &var_offsets)?;
    Ok(file)
}

fn check_layout(file: &NcFile, file_len: u64, header_len: u64, var_offsets: &[u64]) -> Result<(), NcError> {
    let record_size = file.record_size();
    for (var, &offset) in file.vars.iter().zip(var_offsets) {
        let malformed = |reason: String| NcError::MalformedHeader { offset, reason };
        let raw = file.element_count(var) * var.nc_type.size();
        let padded = raw + super::padding(raw);
        if padded < u32::MAX as u64 && var.vsize as u64 != padded && var.vsize as u64 != raw {
            return Err(malformed(format!(
                "variable {:?} has vsize {}, expected {padded}",
                var.name, var.vsize
            )));
        }
        if var.begin < header_len {
            return Err(malformed(format!("variable {:?} begins inside the header", var.name)));
        }
        let end = if file.is_record_var(var) {
            if file.numrecs == STREAMING || file.numrecs == 0 {
                continue;
            }
            var.begin + (file.numrecs as u64 - 1) * record_size + raw
        } else {
            var.begin + var.vsize as u64
        };
        if end > file_len {
            return Err(NcError::TruncatedData {
                name: var.name.clone(),
                end,
                len: file_len,
            });
        }
    }
    Ok(())
}

/// Decodes the values of a fixed-size variable (row-major, padding dropped).
pub fn read_var_data(bytes: &[u8], file: &NcFile, name: &str) -> Result<NcValues, NcError> {
    let var = file
        .var(name)
        .ok_or_else(|| NcError::UnknownVariable(name.to_string()))?;
    if file.is_record_var(var) {
        return Err(NcError::RecordVarUnsupported(name.to_string()));
    }
    let len = file.element_count(var) * var.nc_type.size();
    let end = var.begin.saturating_add(len);
    if end > bytes.len() as u64 {
        return Err(NcError::TruncatedData {
            name: name.to_string(),
            end,
            len: bytes.len() as u64,
        });
    }
    Ok(decode(var.nc_type, &bytes[var.begin as usize..end as usize]))
}
