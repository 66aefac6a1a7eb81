//! Matrix text formats: row-major decimal lists.

use serde::ser::{SerializeSeq, Serializer};

use crate::error::{Error, Result};
use crate::symspace::Mat3;

/// Parses nine comma- or whitespace-separated decimals in row-major order.
pub fn parse_mat3(s: &str) -> Result<Mat3> {
    let vals: Vec<&str> = s
        .split(|c: char| c == ',' || c == ';' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .collect();
    if vals.len() != 9 {
        return Err(Error::validation(format!(
            "expected 9 matrix entries, got {}",
            vals.len()
        )));
    }
    let mut out = [0.0; 9];
    for (o, t) in out.iter_mut().zip(&vals) {
        *o = t
            .parse::<f64>()
            .map_err(|_| Error::validation(format!("not a decimal number: {t:?}")))?;
        if !o.is_finite() {
            return Err(Error::validation(format!("non-finite entry: {t:?}")));
        }
    }
    Ok(Mat3::from_row_slice(&out))
}

/// Row-major entries with 17 significant digits.
pub fn format_mat3(m: &Mat3) -> String {
    let mut parts = Vec::with_capacity(9);
    for i in 0..3 {
        for j in 0..3 {
            parts.push(format!("{:.16e}", m[(i, j)]));
        }
    }
    parts.join(",")
}

pub fn mat3_rows(m: &Mat3) -> [[f64; 3]; 3] {
    [0, 1, 2].map(|i| [0, 1, 2].map(|j| m[(i, j)]))
}

/// Serializes a 3×3 matrix as a list of three rows.
pub fn ser_mat3<S: Serializer>(m: &Mat3, s: S) -> std::result::Result<S::Ok, S::Error> {
    let mut seq = s.serialize_seq(Some(3))?;
    for row in mat3_rows(m) {
        seq.serialize_element(&row)?;
    }
    seq.end()
}
