//! Text matrix formats: SMS, MatrixMarket coordinate (integer, general)
//! and dense whitespace text.

use std::io::{BufRead, Write};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::matrix::{DenseMatrix, SparseMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixFormat {
    /// `m n M`, 1-based triplets `i j v`, terminator `0 0 0`.
    Sms,
    /// `%%MatrixMarket matrix coordinate integer general`.
    MatrixMarket,
    /// `m n` header then `m` rows of `n` values.
    DenseText,
}

impl FromStr for MatrixFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sms" => Ok(MatrixFormat::Sms),
            "mtx" | "mm" | "matrixmarket" => Ok(MatrixFormat::MatrixMarket),
            "dense" | "dense-text" | "txt" => Ok(MatrixFormat::DenseText),
            other => Err(Error::config(format!("unknown matrix format `{other}`"))),
        }
    }
}

/// A matrix as read from a file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MatrixData {
    Dense(DenseMatrix),
    Sparse(SparseMatrix),
}

impl MatrixData {
    pub fn shape(&self) -> (usize, usize) {
        match self {
            MatrixData::Dense(d) => d.shape(),
            MatrixData::Sparse(s) => s.shape(),
        }
    }

    pub fn nnz(&self) -> usize {
        match self {
            MatrixData::Dense(d) => d.nnz(),
            MatrixData::Sparse(s) => s.nnz(),
        }
    }

    pub fn density(&self) -> f64 {
        match self {
            MatrixData::Dense(d) => d.density(),
            MatrixData::Sparse(s) => s.density(),
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        match self {
            MatrixData::Dense(d) => d.clone(),
            MatrixData::Sparse(s) => s.to_dense(),
        }
    }

    pub fn to_sparse(&self) -> SparseMatrix {
        match self {
            MatrixData::Dense(d) => d.to_sparse(),
            MatrixData::Sparse(s) => s.clone(),
        }
    }
}

/// Guess the format from the first non-blank line.
pub fn detect_format(text: &str) -> MatrixFormat {
    let first = text.lines().map(str::trim).find(|l| !l.is_empty()).unwrap_or("");
    if first.starts_with("%%MatrixMarket") {
        return MatrixFormat::MatrixMarket;
    }
    let toks: Vec<&str> = first.split_whitespace().collect();
    if toks.len() == 3 && toks[2].chars().all(|c| c.is_ascii_alphabetic()) {
        return MatrixFormat::Sms;
    }
    MatrixFormat::DenseText
}

/// Token stream with 1-based line numbers, skipping `%` comments.
struct Tokens<'a> {
    lines: Vec<(usize, Vec<&'a str>)>,
    pos: (usize, usize),
    last_line: usize,
}

impl<'a> Tokens<'a> {
    fn new(text: &'a str, comment: Option<char>) -> Self {
        let lines = text
            .lines()
            .enumerate()
            .filter_map(|(i, l)| {
                let l = match comment {
                    Some(c) if l.trim_start().starts_with(c) => return None,
                    _ => l,
                };
                let toks: Vec<&str> = l.split_whitespace().collect();
                (!toks.is_empty()).then_some((i + 1, toks))
            })
            .collect();
        Tokens {
            lines,
            pos: (0, 0),
            last_line: 0,
        }
    }

    /// The remaining tokens of the next non-empty line.
    fn next_line(&mut self) -> Option<(usize, Vec<&'a str>)> {
        let (li, ti) = self.pos;
        let (num, toks) = self.lines.get(li)?;
        self.pos = (li + 1, 0);
        self.last_line = *num;
        Some((*num, toks[ti..].to_vec()))
    }

    fn next_token(&mut self) -> Option<(usize, &'a str)> {
        loop {
            let (li, ti) = self.pos;
            let (num, toks) = self.lines.get(li)?;
            if ti < toks.len() {
                self.pos = (li, ti + 1);
                self.last_line = *num;
                return Some((*num, toks[ti]));
            }
            self.pos = (li + 1, 0);
        }
    }
}

fn parse_usize(line: usize, tok: &str, what: &str) -> Result<usize> {
    tok.parse()
        .map_err(|_| Error::parse(line, format!("invalid {what} `{tok}`")))
}

fn parse_value(field: &PrimeField, line: usize, tok: &str) -> Result<i64> {
    let v: i128 = tok
        .parse()
        .map_err(|_| Error::parse(line, format!("value `{tok}` is not an integer")))?;
    Ok(field.from_i128(v))
}

fn read_all(mut r: impl BufRead) -> Result<String> {
    let mut s = String::new();
    r.read_to_string(&mut s)?;
    Ok(s)
}

/// Read a matrix; `format = None` auto-detects.
pub fn read_matrix(r: impl BufRead, format: Option<MatrixFormat>, field: PrimeField) -> Result<MatrixData> {
    let text = read_all(r)?;
    parse_matrix(&text, format, field)
}

pub fn parse_matrix(text: &str, format: Option<MatrixFormat>, field: PrimeField) -> Result<MatrixData> {
    match format.unwrap_or_else(|| detect_format(text)) {
        MatrixFormat::Sms => parse_sms(text, field).map(MatrixData::Sparse),
        MatrixFormat::MatrixMarket => parse_matrix_market(text, field).map(MatrixData::Sparse),
        MatrixFormat::DenseText => parse_dense_text(text, field).map(MatrixData::Dense),
    }
}

fn check_index(line: usize, i: usize, j: usize, m: usize, n: usize) -> Result<(usize, usize)> {
    if i == 0 || j == 0 || i > m || j > n {
        return Err(Error::parse(line, format!("index ({i}, {j}) outside {m}x{n}")));
    }
    Ok((i - 1, j - 1))
}

pub fn parse_sms(text: &str, field: PrimeField) -> Result<SparseMatrix> {
    let mut toks = Tokens::new(text, None);
    let (hl, header) = toks.next_line().ok_or_else(|| Error::parse(1, "empty input"))?;
    if header.len() != 3 || !header[2].chars().all(|c| c.is_ascii_alphabetic()) {
        return Err(Error::parse(hl, "SMS header must be `m n M`"));
    }
    let m = parse_usize(hl, header[0], "row count")?;
    let n = parse_usize(hl, header[1], "column count")?;
    let mut trip = Vec::new();
    loop {
        let Some((line, t)) = toks.next_line() else {
            return Err(Error::parse(toks.last_line + 1, "missing `0 0 0` terminator"));
        };
        if t.len() != 3 {
            return Err(Error::parse(line, "expected a triplet `i j v`"));
        }
        let i = parse_usize(line, t[0], "row index")?;
        let j = parse_usize(line, t[1], "column index")?;
        if i == 0 && j == 0 {
            break;
        }
        let (i, j) = check_index(line, i, j, m, n)?;
        trip.push((i, j, parse_value(&field, line, t[2])?));
    }
    if let Some((line, _)) = toks.next_line() {
        return Err(Error::parse(line, "content after `0 0 0` terminator"));
    }
    SparseMatrix::from_triplets(field, m, n, trip)
}

pub fn parse_matrix_market(text: &str, field: PrimeField) -> Result<SparseMatrix> {
    let banner = text.lines().next().unwrap_or("");
    let words: Vec<String> = banner.split_whitespace().map(str::to_ascii_lowercase).collect();
    if words.len() != 5 || words[0] != "%%matrixmarket" || words[1] != "matrix" {
        return Err(Error::parse(1, "missing %%MatrixMarket banner"));
    }
    if words[2] != "coordinate" || words[3] != "integer" || words[4] != "general" {
        return Err(Error::parse(
            1,
            "only `coordinate integer general` MatrixMarket files are supported",
        ));
    }
    let mut toks = Tokens::new(text, Some('%'));
    let (sl, size) = toks.next_line().ok_or_else(|| Error::parse(2, "missing size line"))?;
    if size.len() != 3 {
        return Err(Error::parse(sl, "size line must be `m n nnz`"));
    }
    let m = parse_usize(sl, size[0], "row count")?;
    let n = parse_usize(sl, size[1], "column count")?;
    let nnz = parse_usize(sl, size[2], "entry count")?;
    let mut trip = Vec::with_capacity(nnz);
    for _ in 0..nnz {
        let Some((line, t)) = toks.next_line() else {
            return Err(Error::parse(toks.last_line + 1, format!("expected {nnz} entries")));
        };
        if t.len() != 3 {
            return Err(Error::parse(line, "expected an entry `i j v`"));
        }
        let i = parse_usize(line, t[0], "row index")?;
        let j = parse_usize(line, t[1], "column index")?;
        let (i, j) = check_index(line, i, j, m, n)?;
        trip.push((i, j, parse_value(&field, line, t[2])?));
    }
    if let Some((line, _)) = toks.next_line() {
        return Err(Error::parse(line, "more entries than declared"));
    }
    SparseMatrix::from_triplets(field, m, n, trip)
}

pub fn parse_dense_text(text: &str, field: PrimeField) -> Result<DenseMatrix> {
    let mut toks = Tokens::new(text, Some('#'));
    let (hl, header) = toks.next_line().ok_or_else(|| Error::parse(1, "empty input"))?;
    if header.len() != 2 {
        return Err(Error::parse(hl, "dense header must be `m n`"));
    }
    let m = parse_usize(hl, header[0], "row count")?;
    let n = parse_usize(hl, header[1], "column count")?;
    let mut data = Vec::with_capacity(m * n);
    for _ in 0..m * n {
        let (line, t) = toks
            .next_token()
            .ok_or_else(|| Error::parse(toks.last_line + 1, format!("expected {} values", m * n)))?;
        data.push(parse_value(&field, line, t)?);
    }
    if let Some((line, _)) = toks.next_token() {
        return Err(Error::parse(line, "more values than declared"));
    }
    DenseMatrix::new(field, m, n, data)
}

/// Parse a right-hand side: a dense-text `n 1` column, or a bare list of
/// values.
pub fn parse_vector(text: &str, field: PrimeField) -> Result<Vec<i64>> {
    let first = text
        .lines()
        .map(str::trim)
        .find(|l| !l.is_empty() && !l.starts_with('#'))
        .unwrap_or("");
    if first.split_whitespace().count() == 2 {
        let d = parse_dense_text(text, field)?;
        if d.cols() == 1 {
            return Ok(d.into_data());
        }
        if d.rows() == 1 {
            return Ok(d.into_data());
        }
        return Err(Error::parse(1, "right-hand side must be a single column"));
    }
    let mut toks = Tokens::new(text, Some('#'));
    let mut out = Vec::new();
    while let Some((line, t)) = toks.next_token() {
        out.push(parse_value(&field, line, t)?);
    }
    Ok(out)
}

pub fn write_sparse(a: &SparseMatrix, format: MatrixFormat, w: &mut impl Write) -> Result<()> {
    match format {
        MatrixFormat::Sms => {
            writeln!(w, "{} {} M", a.rows(), a.cols())?;
            for (i, j, v) in a.triplets() {
                writeln!(w, "{} {} {}", i + 1, j + 1, v)?;
            }
            writeln!(w, "0 0 0")?;
        }
        MatrixFormat::MatrixMarket => {
            writeln!(w, "%%MatrixMarket matrix coordinate integer general")?;
            writeln!(w, "{} {} {}", a.rows(), a.cols(), a.nnz())?;
            for (i, j, v) in a.triplets() {
                writeln!(w, "{} {} {}", i + 1, j + 1, v)?;
            }
        }
        MatrixFormat::DenseText => write_dense(&a.to_dense(), format, w)?,
    }
    Ok(())
}

pub fn write_dense(a: &DenseMatrix, format: MatrixFormat, w: &mut impl Write) -> Result<()> {
    match format {
        MatrixFormat::DenseText => {
            writeln!(w, "{} {}", a.rows(), a.cols())?;
            for i in 0..a.rows() {
                let row: Vec<String> = a.row(i).iter().map(i64::to_string).collect();
                writeln!(w, "{}", row.join(" "))?;
            }
            Ok(())
        }
        _ => write_sparse(&a.to_sparse(), format, w),
    }
}

pub fn write_matrix(a: &MatrixData, format: MatrixFormat, w: &mut impl Write) -> Result<()> {
    match a {
        MatrixData::Dense(d) => write_dense(d, format, w),
        MatrixData::Sparse(s) => write_sparse(s, format, w),
    }
}

pub fn to_string(a: &MatrixData, format: MatrixFormat) -> String {
    let mut buf = Vec::new();
    write_matrix(a, format, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}
