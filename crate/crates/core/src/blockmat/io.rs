//! Matrix serialization: CSV with `re+imi` cells (or re/im column pairs) and a
//! JSON envelope `{dim, entries}` where each entry is `[re, im]`.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Mat, C64};

pub type Rows = Vec<Vec<[f64; 2]>>;

pub fn mat_to_rows(m: &Mat) -> Rows {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

pub fn mat_from_rows(rows: &Rows, ncols_if_empty: usize) -> Result<Mat> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(ncols_if_empty, |r| r.len());
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Parse("ragged matrix rows".into()));
    }
    Ok(Mat::from_fn(nrows, ncols, |i, j| C64::new(rows[i][j][0], rows[i][j][1])))
}

/// Serde adapter for a single matrix stored as nested `[re, im]` rows.
pub mod serde_mat {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Shaped {
        rows: usize,
        cols: usize,
        entries: Rows,
    }

    pub fn serialize<S: Serializer>(m: &Mat, s: S) -> std::result::Result<S::Ok, S::Error> {
        Shaped { rows: m.nrows(), cols: m.ncols(), entries: mat_to_rows(m) }.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Mat, D::Error> {
        let sh = Shaped::deserialize(d)?;
        if sh.entries.len() != sh.rows {
            return Err(serde::de::Error::custom("row count mismatch"));
        }
        mat_from_rows(&sh.entries, sh.cols).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for a list of matrices.
pub mod serde_mats {
    use super::*;
    use serde::{Deserializer, Serializer};

    #[derive(Serialize, Deserialize)]
    struct Wrapped(#[serde(with = "super::serde_mat")] Mat);

    pub fn serialize<S: Serializer>(v: &[Mat], s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for m in v {
            seq.serialize_element(&Wrapped(m.clone()))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Mat>, D::Error> {
        let v: Vec<Wrapped> = Vec::deserialize(d)?;
        Ok(v.into_iter().map(|w| w.0).collect())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DenseEnvelope {
    pub dim: usize,
    pub entries: Rows,
}

pub fn format_complex(z: C64) -> String {
    let sign = if z.im < 0.0 { '-' } else { '+' };
    format!("{}{}{}i", z.re, sign, z.im.abs())
}

pub fn parse_complex(cell: &str) -> Result<C64> {
    let s: String = cell.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Parse(format!("not a complex number: {cell:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix('i').or_else(|| s.strip_suffix('j')) else {
        return s.parse::<f64>().map(|re| C64::new(re, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&p| (bytes[p] == b'+' || bytes[p] == b'-') && !matches!(bytes[p - 1], b'e' | b'E'));
    let (re_part, im_part) = match split {
        Some(p) => (&body[..p], &body[p..]),
        None => ("0", body),
    };
    let im = match im_part {
        "" | "+" => 1.0,
        "-" => -1.0,
        t => t.parse::<f64>().map_err(|_| bad())?,
    };
    let re = re_part.parse::<f64>().map_err(|_| bad())?;
    Ok(C64::new(re, im))
}

pub fn matrix_to_csv(m: &Mat) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format_complex(m[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Parses CSV text. Rows with exactly twice as many cells as there are rows
/// are read as `re,im` pairs.
pub fn matrix_from_csv(text: &str) -> Result<Mat> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let mut cells: Vec<Vec<String>> = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        if rec.iter().all(|c| c.is_empty()) {
            continue;
        }
        cells.push(rec.iter().map(|c| c.to_string()).collect());
    }
    let n = cells.len();
    if n == 0 {
        return Err(Error::Parse("empty matrix".into()));
    }
    let width = cells[0].len();
    if cells.iter().any(|r| r.len() != width) {
        return Err(Error::Parse("ragged csv rows".into()));
    }
    if width == 2 * n && n > 0 {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let re = cells[i][2 * j].parse::<f64>();
                let im = cells[i][2 * j + 1].parse::<f64>();
                match (re, im) {
                    (Ok(re), Ok(im)) => m[(i, j)] = C64::new(re, im),
                    _ => return Err(Error::Parse(format!("row {}: bad re/im pair", i + 1))),
                }
            }
        }
        return Ok(m);
    }
    let mut m = Mat::zeros(n, width);
    for i in 0..n {
        for j in 0..width {
            m[(i, j)] = parse_complex(&cells[i][j])?;
        }
    }
    Ok(m)
}

pub fn matrix_to_json(m: &Mat) -> Result<String> {
    Ok(serde_json::to_string(&DenseEnvelope { dim: m.nrows(), entries: mat_to_rows(m) })?)
}

pub fn matrix_from_json(text: &str) -> Result<Mat> {
    let env: DenseEnvelope = serde_json::from_str(text)?;
    if env.entries.len() != env.dim {
        return Err(Error::Parse("dim does not match entries".into()));
    }
    mat_from_rows(&env.entries, env.dim)
}

/// Reads a square matrix from a `.json` envelope or CSV file.
pub fn read_matrix(path: &Path) -> Result<Mat> {
    let text = std::fs::read_to_string(path)?;
    let m = if path.extension().is_some_and(|e| e == "json") || text.trim_start().starts_with('{') {
        matrix_from_json(&text)?
    } else {
        matrix_from_csv(&text)?
    };
    if m.nrows() != m.ncols() {
        return Err(Error::Parse(format!(
            "{}: matrix is {}x{}, expected square",
            path.display(),
            m.nrows(),
            m.ncols()
        )));
    }
    Ok(m)
}
