//! Matrix Market coordinate and array files for complex and real data.
//!
//! Values are written with 17 significant digits, which round-trips every
//! `f64` exactly.

use std::io::{BufRead, Write};

use sghelm_core::sparse::CsrMatrix;
use sghelm_core::C64;

use crate::error::{Error, Result};

/// Scalars that can be stored in a Matrix Market file.
pub trait MtxScalar: Copy {
    const FIELD: &'static str;
    fn write_value(&self, out: &mut impl Write) -> std::io::Result<()>;
    fn from_parts(re: f64, im: f64) -> Self;
}

impl MtxScalar for f64 {
    const FIELD: &'static str = "real";

    fn write_value(&self, out: &mut impl Write) -> std::io::Result<()> {
        write!(out, "{:.16e}", self)
    }

    fn from_parts(re: f64, _im: f64) -> Self {
        re
    }
}

impl MtxScalar for C64 {
    const FIELD: &'static str = "complex";

    fn write_value(&self, out: &mut impl Write) -> std::io::Result<()> {
        write!(out, "{:.16e} {:.16e}", self.re, self.im)
    }

    fn from_parts(re: f64, im: f64) -> Self {
        C64::new(re, im)
    }
}

/// Writes a sparse matrix in coordinate general format.
pub fn write_matrix<T: MtxScalar + sghelm_core::scalar::Scalar>(
    out: &mut impl Write,
    m: &CsrMatrix<T>,
    comment: Option<&str>,
) -> Result<()> {
    writeln!(out, "%%MatrixMarket matrix coordinate {} general", T::FIELD)?;
    if let Some(c) = comment {
        for line in c.lines() {
            writeln!(out, "% {line}")?;
        }
    }
    writeln!(out, "{} {} {}", m.nrows(), m.ncols(), m.nnz())?;
    for (i, j, v) in m.iter() {
        write!(out, "{} {} ", i + 1, j + 1)?;
        v.write_value(out)?;
        writeln!(out)?;
    }
    Ok(())
}

/// Writes a vector as an `n × 1` dense array.
pub fn write_vector<T: MtxScalar>(out: &mut impl Write, v: &[T]) -> Result<()> {
    writeln!(out, "%%MatrixMarket matrix array {} general", T::FIELD)?;
    writeln!(out, "{} 1", v.len())?;
    for x in v {
        x.write_value(out)?;
        writeln!(out)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Real,
    Integer,
    Complex,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    Hermitian,
    SkewSymmetric,
}

struct Header {
    coordinate: bool,
    field: Field,
    symmetry: Symmetry,
}

struct Lines<R> {
    inner: R,
    line: usize,
    buf: String,
}

impl<R: BufRead> Lines<R> {
    /// Next line that is neither blank nor a comment.
    fn next_data(&mut self) -> Result<Option<&str>> {
        loop {
            self.buf.clear();
            if self.inner.read_line(&mut self.buf)? == 0 {
                return Ok(None);
            }
            self.line += 1;
            let t = self.buf.trim();
            if !t.is_empty() && !t.starts_with('%') {
                return Ok(Some(self.buf.trim()));
            }
        }
    }

    /// Next data line, or an error naming what was expected.
    fn need(&mut self, what: &str) -> Result<String> {
        match self.next_data()? {
            Some(t) => Ok(t.to_owned()),
            None => Err(self.err(what)),
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            line: self.line,
            msg: msg.into(),
        }
    }
}

fn parse_header<R: BufRead>(lines: &mut Lines<R>) -> Result<Header> {
    lines.buf.clear();
    lines.inner.read_line(&mut lines.buf)?;
    lines.line = 1;
    let words: Vec<String> = lines.buf.split_whitespace().map(|w| w.to_ascii_lowercase()).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(lines.err("missing %%MatrixMarket matrix header"));
    }
    let coordinate = match words[2].as_str() {
        "coordinate" => true,
        "array" => false,
        other => return Err(lines.err(format!("unsupported format {other}"))),
    };
    let field = match words[3].as_str() {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "complex" => Field::Complex,
        other => return Err(lines.err(format!("unsupported field {other}"))),
    };
    let symmetry = match words[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "hermitian" => Symmetry::Hermitian,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        other => return Err(lines.err(format!("unsupported symmetry {other}"))),
    };
    Ok(Header {
        coordinate,
        field,
        symmetry,
    })
}

fn parse_numbers<R: BufRead>(lines: &Lines<R>, text: &str) -> Result<Vec<f64>> {
    text.split_whitespace()
        .map(|w| w.parse::<f64>().map_err(|_| lines.err(format!("not a number: {w}"))))
        .collect()
}

fn parse_index<R: BufRead>(lines: &Lines<R>, text: &str) -> Result<Vec<usize>> {
    text.split_whitespace()
        .map(|w| w.parse::<usize>().map_err(|_| lines.err(format!("not an index: {w}"))))
        .collect()
}

fn value_of(field: Field, nums: &[f64]) -> Option<C64> {
    match (field, nums.len()) {
        (Field::Real | Field::Integer, 1) => Some(C64::new(nums[0], 0.0)),
        (Field::Complex, 2) => Some(C64::new(nums[0], nums[1])),
        _ => None,
    }
}

/// Reads a coordinate matrix; real files come back with zero imaginary part
/// and symmetric variants are expanded.
pub fn read_matrix(input: impl BufRead) -> Result<CsrMatrix<C64>> {
    let mut lines = Lines {
        inner: input,
        line: 0,
        buf: String::new(),
    };
    let header = parse_header(&mut lines)?;
    if !header.coordinate {
        return Err(lines.err("expected a coordinate matrix"));
    }
    let size_line = lines.need("missing size line")?;
    let size = parse_index(&lines, &size_line)?;
    if size.len() != 3 {
        return Err(lines.err("size line needs rows, columns and entries"));
    }
    let (nrows, ncols, nnz) = (size[0], size[1], size[2]);
    let mut triplets = Vec::with_capacity(nnz);
    for _ in 0..nnz {
        let text = lines.need("fewer entries than announced")?;
        let mut words = text.split_whitespace();
        let mut idx = [0usize; 2];
        for slot in idx.iter_mut() {
            let w = words.next().ok_or_else(|| lines.err("missing index"))?;
            *slot = w.parse().map_err(|_| lines.err(format!("not an index: {w}")))?;
        }
        let rest: Vec<&str> = words.collect();
        let nums = parse_numbers(&lines, &rest.join(" "))?;
        let v = value_of(header.field, &nums).ok_or_else(|| lines.err("wrong number of values"))?;
        let (i, j) = (idx[0], idx[1]);
        if i == 0 || j == 0 || i > nrows || j > ncols {
            return Err(lines.err(format!("entry ({i}, {j}) outside {nrows}×{ncols}")));
        }
        triplets.push((i - 1, j - 1, v));
        if i != j {
            match header.symmetry {
                Symmetry::General => {}
                Symmetry::Symmetric => triplets.push((j - 1, i - 1, v)),
                Symmetry::Hermitian => triplets.push((j - 1, i - 1, v.conj())),
                Symmetry::SkewSymmetric => triplets.push((j - 1, i - 1, -v)),
            }
        }
    }
    if lines.next_data()?.is_some() {
        return Err(lines.err("more entries than announced"));
    }
    Ok(CsrMatrix::from_triplets(nrows, ncols, &triplets)?)
}

/// Reads an `n × 1` array.
pub fn read_vector<T: MtxScalar>(input: impl BufRead) -> Result<Vec<T>> {
    let mut lines = Lines {
        inner: input,
        line: 0,
        buf: String::new(),
    };
    let header = parse_header(&mut lines)?;
    if header.coordinate {
        return Err(lines.err("expected an array"));
    }
    let size_line = lines.need("missing size line")?;
    let size = parse_index(&lines, &size_line)?;
    if size.len() != 2 || size[1] != 1 {
        return Err(lines.err("expected an n × 1 array"));
    }
    let mut out = Vec::with_capacity(size[0]);
    for _ in 0..size[0] {
        let text = lines.need("fewer values than announced")?;
        let nums = parse_numbers(&lines, &text)?;
        let v = value_of(header.field, &nums).ok_or_else(|| lines.err("wrong number of values"))?;
        out.push(T::from_parts(v.re, v.im));
    }
    Ok(out)
}
