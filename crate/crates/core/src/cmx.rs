//! CMX v1, the line-oriented text exchange format for matrices.
//!
//! ```text
//! #cmx 1
//! field complex
//! rows 2
//! cols 2
//! meta {"construction":"identity"}
//! 1.0:0.0 0:0
//! 0:0 1.0:0.0
//! ```
//!
//! Entries are written with the shortest decimal representation that parses
//! back to the same `f64`, which never exceeds 17 significant digits.

use crate::error::{Error, Result};
use crate::matrix::{Field, Matrix, Meta};
use num_complex::Complex64;
use std::fmt::Write as _;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

pub const MAGIC: &str = "#cmx 1";

fn fmt_f64(out: &mut String, v: f64) {
    if v == 0.0 && v.is_sign_positive() {
        out.push('0');
    } else {
        // Debug output is the shortest round-trip form and switches to
        // exponent notation for very large or small magnitudes.
        write!(out, "{v:?}").unwrap();
    }
}

pub fn to_string(a: &Matrix) -> String {
    let meta = serde_json::to_string(a.meta()).expect("meta is always serializable");
    let mut out = String::with_capacity(a.rows() * a.cols() * 24 + 64);
    writeln!(out, "{MAGIC}").unwrap();
    writeln!(out, "field {}", a.field()).unwrap();
    writeln!(out, "rows {}", a.rows()).unwrap();
    writeln!(out, "cols {}", a.cols()).unwrap();
    writeln!(out, "meta {meta}").unwrap();
    for j in 0..a.rows() {
        for (k, z) in a.row(j).iter().enumerate() {
            if k > 0 {
                out.push(' ');
            }
            fmt_f64(&mut out, z.re);
            if a.field() == Field::Complex {
                out.push(':');
                fmt_f64(&mut out, z.im);
            }
        }
        out.push('\n');
    }
    out
}

pub fn write_cmx(a: &Matrix, path: impl AsRef<Path>) -> Result<()> {
    let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
    f.write_all(to_string(a).as_bytes())?;
    f.flush()?;
    Ok(())
}

pub fn read_cmx(path: impl AsRef<Path>) -> Result<Matrix> {
    from_reader(std::fs::File::open(path)?)
}

pub fn from_str(s: &str) -> Result<Matrix> {
    from_reader(s.as_bytes())
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn header<'a>(line: &'a str, key: &str, lineno: usize) -> Result<&'a str> {
    line.strip_prefix(key)
        .and_then(|rest| rest.strip_prefix(' '))
        .ok_or_else(|| parse_err(lineno, format!("expected `{key} …`")))
}

fn parse_f64(tok: &str, lineno: usize) -> Result<f64> {
    tok.parse::<f64>()
        .map_err(|_| parse_err(lineno, format!("invalid number {tok:?}")))
}

pub fn from_reader(r: impl Read) -> Result<Matrix> {
    let mut lines = BufReader::new(r).lines().enumerate().map(|(i, l)| (i + 1, l));
    let mut next = |what: &str| -> Result<(usize, String)> {
        match lines.next() {
            Some((n, Ok(l))) => Ok((n, l.trim_end_matches('\r').to_owned())),
            Some((_, Err(e))) => Err(e.into()),
            None => Err(parse_err(0, format!("unexpected end of file, expected {what}"))),
        }
    };

    let (n, l) = next("magic line")?;
    if l != MAGIC {
        return Err(parse_err(n, format!("expected `{MAGIC}`")));
    }
    let (n, l) = next("field line")?;
    let field: Field = header(&l, "field", n)?
        .parse()
        .map_err(|_| parse_err(n, "field must be `real` or `complex`"))?;
    let (n, l) = next("rows line")?;
    let rows: usize = header(&l, "rows", n)?
        .parse()
        .map_err(|_| parse_err(n, "invalid row count"))?;
    let (n, l) = next("cols line")?;
    let cols: usize = header(&l, "cols", n)?
        .parse()
        .map_err(|_| parse_err(n, "invalid column count"))?;
    if rows == 0 || cols == 0 {
        return Err(parse_err(n, "dimensions must be positive"));
    }
    let (n, l) = next("meta line")?;
    let meta: Meta =
        serde_json::from_str(header(&l, "meta", n)?).map_err(|e| parse_err(n, format!("invalid meta JSON: {e}")))?;

    let mut data = Vec::with_capacity(rows * cols);
    for _ in 0..rows {
        let (n, l) = next("data line")?;
        let before = data.len();
        for tok in l.split(' ') {
            let z = match (field, tok.split_once(':')) {
                (Field::Complex, Some((re, im))) => Complex64::new(parse_f64(re, n)?, parse_f64(im, n)?),
                (Field::Real, None) => Complex64::new(parse_f64(tok, n)?, 0.0),
                (Field::Complex, None) => return Err(parse_err(n, format!("expected re:im, got {tok:?}"))),
                (Field::Real, Some(_)) => return Err(parse_err(n, "complex entry in real matrix")),
            };
            data.push(z);
        }
        if data.len() - before != cols {
            return Err(parse_err(
                n,
                format!("expected {cols} entries, found {}", data.len() - before),
            ));
        }
    }
    // trailing blank lines are tolerated, extra data is not
    for (n, l) in lines {
        if !l?.trim().is_empty() {
            return Err(parse_err(n, format!("more than {rows} data lines")));
        }
    }
    Ok(Matrix::from_entries(field, rows, cols, data)?.with_meta(meta))
}
