//! Series of files whose names differ only in integer index fields.
//!
//! Every maximal run of ASCII digits in a filename stem is an index slot.
//! A serie records the shared pattern plus the sorted set of index tuples
//! present, and can be cut into subsets along any index axis:
//!
//! ```
//! use sciforge::file_series::{build_serie, groups_along_axis};
//!
//! let names = ["im1_1.png", "im1_2.png", "im2_1.png", "im2_2.png"];
//! let serie = build_serie(&names).unwrap();
//! let by_second = groups_along_axis(&serie, 1).unwrap();
//! assert_eq!(by_second[0], ["im1_1.png", "im2_1.png"]);
//! ```

use std::collections::BTreeSet;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SeriesError {
    #[error("{0:?} has no extension")]
    NoExtension(String),
    #[error("no filenames given")]
    EmptyInput,
    #[error("{name:?} does not follow the pattern {pattern}")]
    HeterogeneousSeries { name: String, pattern: String },
    #[error("axis {axis} out of range for {arity} index slots")]
    AxisOutOfRange { axis: usize, arity: usize },
    #[error("step must be positive, got {0}")]
    NonPositiveStep(i64),
}

/// Literal text or an integer index slot.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Piece {
    Literal(String),
    /// Zero-pad width; 0 means unpadded.
    Slot { pad: usize },
}

/// Filename decomposition: stem pieces plus the extension (with its dot).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FilePattern {
    pieces: Vec<Piece>,
    extension: String,
}

impl FilePattern {
    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn extension(&self) -> &str {
        &self.extension
    }

    pub fn arity(&self) -> usize {
        self.pieces.iter().filter(|p| matches!(p, Piece::Slot { .. })).count()
    }

    /// Filename for an index tuple. Panics if the arity differs.
    pub fn render(&self, indices: &[u64]) -> String {
        assert_eq!(indices.len(), self.arity(), "index tuple arity");
        let mut values = indices.iter();
        let mut out = String::new();
        for piece in &self.pieces {
            match piece {
                Piece::Literal(text) => out.push_str(text),
                Piece::Slot { pad } => {
                    let v = values.next().expect("arity checked");
                    out.push_str(&format!("{v:0pad$}", pad = *pad));
                }
            }
        }
        out.push_str(&self.extension);
        out
    }

    fn same_shape(&self, other: &FilePattern) -> bool {
        self.extension == other.extension
            && self.pieces.len() == other.pieces.len()
            && self.pieces.iter().zip(&other.pieces).all(|pair| match pair {
                (Piece::Literal(a), Piece::Literal(b)) => a == b,
                (Piece::Slot { .. }, Piece::Slot { .. }) => true,
                _ => false,
            })
    }
}

impl fmt::Display for FilePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for piece in &self.pieces {
            match piece {
                Piece::Literal(text) => f.write_str(text)?,
                Piece::Slot { pad: 0 } => f.write_str("{}")?,
                Piece::Slot { pad } => write!(f, "{{:0{pad}}}")?,
            }
        }
        f.write_str(&self.extension)
    }
}

/// Splits a filename into its pattern and index tuple.
///
/// A digit run with a leading zero and more than one digit fixes the pad
/// width to its length; a lone `0` is unpadded.
pub fn parse_filename(name: &str) -> Result<(FilePattern, Vec<u64>), SeriesError> {
    parse_with_runs(name).map(|(pattern, indices, _)| (pattern, indices))
}

/// Like [`parse_filename`], also returning the digit count of each run.
fn parse_with_runs(name: &str) -> Result<(FilePattern, Vec<u64>, Vec<usize>), SeriesError> {
    let dot = name
        .rfind('.')
        .filter(|&i| i > 0)
        .ok_or_else(|| SeriesError::NoExtension(name.to_string()))?;
    let (stem, extension) = name.split_at(dot);

    let mut pieces = Vec::new();
    let mut indices = Vec::new();
    let mut runs = Vec::new();
    let bytes = stem.as_bytes();
    let mut i = 0;
    let mut literal_start = 0;
    while i < bytes.len() {
        if !bytes[i].is_ascii_digit() {
            i += 1;
            continue;
        }
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let run = &stem[start..i];
        let Ok(value) = run.parse::<u64>() else {
            // Too long to be an index: keep it as literal text.
            continue;
        };
        if literal_start < start {
            pieces.push(Piece::Literal(stem[literal_start..start].to_string()));
        }
        let pad = if run.len() > 1 && run.starts_with('0') { run.len() } else { 0 };
        pieces.push(Piece::Slot { pad });
        indices.push(value);
        runs.push(run.len());
        literal_start = i;
    }
    if literal_start < stem.len() {
        pieces.push(Piece::Literal(stem[literal_start..].to_string()));
    }
    Ok((
        FilePattern {
            pieces,
            extension: extension.to_string(),
        },
        indices,
        runs,
    ))
}

/// A pattern plus the sorted, deduplicated index tuples present.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Serie {
    pattern: FilePattern,
    tuples: Vec<Vec<u64>>,
}

impl Serie {
    pub fn pattern(&self) -> &FilePattern {
        &self.pattern
    }

    pub fn tuples(&self) -> &[Vec<u64>] {
        &self.tuples
    }

    pub fn arity(&self) -> usize {
        self.pattern.arity()
    }

    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn filenames(&self) -> Vec<String> {
        self.tuples.iter().map(|t| self.pattern.render(t)).collect()
    }

    fn check_axis(&self, axis: usize) -> Result<(), SeriesError> {
        if axis < self.arity() {
            Ok(())
        } else {
            Err(SeriesError::AxisOutOfRange {
                axis,
                arity: self.arity(),
            })
        }
    }
}

/// Collects filenames sharing one pattern into a serie.
///
/// Per slot, all padded names must agree on the pad width, and unpadded
/// names must have at least that many digits; otherwise the first
/// offending name is reported.
pub fn build_serie<S: AsRef<str>>(names: &[S]) -> Result<Serie, SeriesError> {
    let first = names.first().ok_or(SeriesError::EmptyInput)?;
    let (mut pattern, _, _) = parse_with_runs(first.as_ref())?;
    let parsed: Vec<_> = names
        .iter()
        .map(|n| parse_with_runs(n.as_ref()).map(|p| (n.as_ref(), p)))
        .collect::<Result<_, _>>()?;

    let heterogeneous = |name: &str, pattern: &FilePattern| SeriesError::HeterogeneousSeries {
        name: name.to_string(),
        pattern: pattern.to_string(),
    };

    for (name, (other, _, _)) in &parsed {
        if !pattern.same_shape(other) {
            return Err(heterogeneous(name, &pattern));
        }
    }

    let slot_positions: Vec<usize> = pattern
        .pieces
        .iter()
        .enumerate()
        .filter(|(_, p)| matches!(p, Piece::Slot { .. }))
        .map(|(i, _)| i)
        .collect();
    for (slot, &pos) in slot_positions.iter().enumerate() {
        let mut width = 0;
        for (name, (other, _, _)) in &parsed {
            if let Piece::Slot { pad } = other.pieces[pos] {
                if pad > 0 {
                    if width > 0 && width != pad {
                        return Err(heterogeneous(name, &pattern));
                    }
                    width = pad;
                }
            }
        }
        if width > 0 {
            if let Some((name, _)) = parsed.iter().find(|(_, (_, _, runs))| runs[slot] < width) {
                return Err(heterogeneous(name, &pattern));
            }
        }
        pattern.pieces[pos] = Piece::Slot { pad: width };
    }

    let tuples: BTreeSet<Vec<u64>> = parsed.into_iter().map(|(_, (_, t, _))| t).collect();
    Ok(Serie {
        pattern,
        tuples: tuples.into_iter().collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AxisRange {
    pub min: u64,
    pub max: u64,
    /// Number of distinct values present, not the span.
    pub count: usize,
}

pub fn index_ranges(serie: &Serie) -> Vec<AxisRange> {
    (0..serie.arity())
        .map(|axis| {
            let values: BTreeSet<u64> = serie.tuples.iter().map(|t| t[axis]).collect();
            AxisRange {
                min: *values.first().expect("serie is non-empty"),
                max: *values.last().expect("serie is non-empty"),
                count: values.len(),
            }
        })
        .collect()
}

fn without(tuple: &[u64], axis: usize) -> Vec<u64> {
    let mut rest = tuple.to_vec();
    rest.remove(axis);
    rest
}

/// Groups filenames by their value on `axis`, ordered by that value; within
/// a group, files are ordered by the remaining axes.
pub fn groups_along_axis(serie: &Serie, axis: usize) -> Result<Vec<Vec<String>>, SeriesError> {
    serie.check_axis(axis)?;
    let mut keyed: Vec<(u64, Vec<u64>, &Vec<u64>)> = serie
        .tuples
        .iter()
        .map(|t| (t[axis], without(t, axis), t))
        .collect();
    keyed.sort();
    let mut groups: Vec<Vec<String>> = Vec::new();
    let mut current = None;
    for (value, _, tuple) in keyed {
        if current != Some(value) {
            groups.push(Vec::new());
            current = Some(value);
        }
        groups.last_mut().expect("pushed").push(serie.pattern.render(tuple));
    }
    Ok(groups)
}

/// Pairs each file with the one `step` further along `axis`, for every
/// combination of the other axes; pairs whose partner is absent are skipped.
pub fn make_pairs(serie: &Serie, axis: usize, step: i64) -> Result<Vec<(String, String)>, SeriesError> {
    serie.check_axis(axis)?;
    if step <= 0 {
        return Err(SeriesError::NonPositiveStep(step));
    }
    let present: BTreeSet<&Vec<u64>> = serie.tuples.iter().collect();
    let mut keyed: Vec<(Vec<u64>, u64, &Vec<u64>)> = serie
        .tuples
        .iter()
        .map(|t| (without(t, axis), t[axis], t))
        .collect();
    keyed.sort();
    let mut pairs = Vec::new();
    for (_, value, tuple) in keyed {
        let Some(next) = value.checked_add(step as u64) else {
            continue;
        };
        let mut partner = tuple.clone();
        partner[axis] = next;
        if present.contains(&partner) {
            pairs.push((serie.pattern.render(tuple), serie.pattern.render(&partner)));
        }
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    const SIX_IMAGES: [&str; 6] = [
        "im1_1.png", "im1_2.png", "im1_3.png", "im2_1.png", "im2_2.png", "im2_3.png",
    ];

    #[test]
    fn parse_examples() {
        let (pattern, tuple) = parse_filename("im1_2.png").unwrap();
        assert_eq!(
            pattern.pieces(),
            [
                Piece::Literal("im".into()),
                Piece::Slot { pad: 0 },
                Piece::Literal("_".into()),
                Piece::Slot { pad: 0 },
            ]
        );
        assert_eq!(pattern.extension(), ".png");
        assert_eq!(tuple, [1, 2]);

        let (pattern, tuple) = parse_filename("frame007.tif").unwrap();
        assert_eq!(pattern.pieces()[1], Piece::Slot { pad: 3 });
        assert_eq!(tuple, [7]);
        assert_eq!(pattern.render(&tuple), "frame007.tif");

        assert_eq!(parse_filename("readme"), Err(SeriesError::NoExtension("readme".into())));
        assert!(parse_filename(".hidden").is_err());
        let (p, t) = parse_filename("frame0.tif").unwrap();
        assert_eq!((p.pieces()[1].clone(), t), (Piece::Slot { pad: 0 }, vec![0]));
        let (p, t) = parse_filename("notes.txt").unwrap();
        assert_eq!((p.arity(), t.len()), (0, 0));
    }

    #[test]
    fn six_image_serie() {
        let serie = build_serie(&SIX_IMAGES).unwrap();
        assert_eq!(serie.len(), 6);
        assert_eq!(serie.tuples()[0], [1, 1]);
        assert_eq!(serie.tuples()[5], [2, 3]);
        assert_eq!(
            index_ranges(&serie),
            [
                AxisRange { min: 1, max: 2, count: 2 },
                AxisRange { min: 1, max: 3, count: 3 },
            ]
        );
        assert_eq!(
            groups_along_axis(&serie, 0).unwrap(),
            [
                vec!["im1_1.png", "im1_2.png", "im1_3.png"],
                vec!["im2_1.png", "im2_2.png", "im2_3.png"],
            ]
        );
        assert_eq!(
            groups_along_axis(&serie, 1).unwrap(),
            [
                vec!["im1_1.png", "im2_1.png"],
                vec!["im1_2.png", "im2_2.png"],
                vec!["im1_3.png", "im2_3.png"],
            ]
        );
        assert_eq!(
            groups_along_axis(&serie, 2),
            Err(SeriesError::AxisOutOfRange { axis: 2, arity: 2 })
        );
    }

    #[test]
    fn heterogeneous_inputs() {
        assert!(matches!(
            build_serie(&["a1.png", "b1.png"]),
            Err(SeriesError::HeterogeneousSeries { ref name, .. }) if name == "b1.png"
        ));
        assert!(build_serie(&["a1.png", "a1.tif"]).is_err());
        assert!(build_serie(&["a1_1.png", "a1.png"]).is_err());
        assert!(build_serie(&["f007.png", "f07.png"]).is_err());
        assert!(build_serie(&["f007.png", "f7.png"]).is_err());
        assert_eq!(build_serie::<&str>(&[]), Err(SeriesError::EmptyInput));
    }

    #[test]
    fn padding_merges_with_wide_unpadded_runs() {
        let serie = build_serie(&["f100.png", "f009.png", "f010.png"]).unwrap();
        assert_eq!(serie.pattern().pieces()[1], Piece::Slot { pad: 3 });
        assert_eq!(serie.filenames(), ["f009.png", "f010.png", "f100.png"]);
    }

    #[test]
    fn single_and_gapped() {
        let serie = build_serie(&["x1.png"]).unwrap();
        assert_eq!(index_ranges(&serie), [AxisRange { min: 1, max: 1, count: 1 }]);
        assert_eq!(groups_along_axis(&serie, 0).unwrap(), [vec!["x1.png"]]);

        let serie = build_serie(&["x3.png", "x1.png", "x1.png"]).unwrap();
        assert_eq!(index_ranges(&serie), [AxisRange { min: 1, max: 3, count: 2 }]);
        assert_eq!(groups_along_axis(&serie, 0).unwrap(), [vec!["x1.png"], vec!["x3.png"]]);
        assert!(make_pairs(&serie, 0, 1).unwrap().is_empty());
        assert_eq!(make_pairs(&serie, 0, 2).unwrap(), [("x1.png".into(), "x3.png".into())]);

        let literal = build_serie(&["notes.txt", "notes.txt"]).unwrap();
        assert_eq!(literal.filenames(), ["notes.txt"]);
        assert!(index_ranges(&literal).is_empty());
    }

    #[test]
    fn pairs() {
        let serie = build_serie(&SIX_IMAGES).unwrap();
        assert_eq!(make_pairs(&serie, 1, 5).unwrap(), []);
        assert_eq!(make_pairs(&serie, 1, 0), Err(SeriesError::NonPositiveStep(0)));
        assert_eq!(make_pairs(&serie, 1, -1), Err(SeriesError::NonPositiveStep(-1)));
        assert!(make_pairs(&serie, 3, 1).is_err());
    }
}
