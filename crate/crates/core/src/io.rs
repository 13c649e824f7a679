//! Plain-text matrix and JSON helpers shared by the kernel, metric and CLI layers.

use std::io::{Read, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::SquareMatrix;

/// Reads a headerless comma-separated square matrix.
pub fn read_matrix_csv<R: Read>(reader: R) -> Result<SquareMatrix> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows = Vec::new();
    for (line, record) in rdr.records().enumerate() {
        let record = record?;
        if record.len() == 1 && record[0].is_empty() {
            continue;
        }
        let row = record
            .iter()
            .map(|field| {
                field.parse::<f64>().map_err(|_| {
                    Error::Parse(format!("row {line}: `{field}` is not a number"))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Shape("empty matrix".into()));
    }
    let n = rows.len();
    if let Some((i, row)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(Error::Shape(format!(
            "{n} rows but row {i} has {} columns; matrix must be square",
            row.len()
        )));
    }
    SquareMatrix::from_rows(rows)
}

/// Writes a matrix in the same format `read_matrix_csv` accepts. Values use the
/// shortest representation that parses back to the identical `f64`.
pub fn write_matrix_csv<W: Write>(mut writer: W, m: &SquareMatrix) -> Result<()> {
    let mut line = String::new();
    for i in 0..m.n() {
        line.clear();
        for (j, v) in m.row(i).iter().enumerate() {
            if j > 0 {
                line.push(',');
            }
            line.push_str(&format_f64(*v));
        }
        line.push('\n');
        writer.write_all(line.as_bytes())?;
    }
    writer.flush()?;
    Ok(())
}

pub fn matrix_to_csv_string(m: &SquareMatrix) -> String {
    let mut buf = Vec::new();
    write_matrix_csv(&mut buf, m).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("csv output is ascii")
}

fn format_f64(v: f64) -> String {
    if v.is_finite() && v == v.trunc() && v.abs() < 1e15 {
        format!("{v:.1}")
    } else {
        format!("{v}")
    }
}

/// Pretty JSON with object keys in sorted order.
pub fn to_sorted_json<T: Serialize>(value: &T) -> Result<String> {
    // `serde_json::Value` objects are BTreeMaps, so going through it sorts keys.
    let value = serde_json::to_value(value)?;
    let mut out = serde_json::to_string_pretty(&value)?;
    out.push('\n');
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_minimal_matrix() {
        let m = read_matrix_csv("2,1\n1,2\n".as_bytes()).unwrap();
        assert_eq!(m.to_rows(), vec![vec![2.0, 1.0], vec![1.0, 2.0]]);
    }

    #[test]
    fn non_square_is_shape_error() {
        let err = read_matrix_csv("1,2,3\n4,5,6".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Shape(_)), "{err}");
    }

    #[test]
    fn garbage_is_parse_error() {
        let err = read_matrix_csv("1,x\n2,3".as_bytes()).unwrap_err();
        assert!(matches!(err, Error::Parse(_)), "{err}");
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let m = SquareMatrix::from_fn(5, |i, j| {
            if i == j {
                2.0
            } else {
                (i as f64 - j as f64).abs().powf(-0.7)
            }
        });
        let back = read_matrix_csv(matrix_to_csv_string(&m).as_bytes()).unwrap();
        for (a, b) in m.as_slice().iter().zip(back.as_slice()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn json_keys_are_sorted() {
        #[derive(Serialize)]
        struct Unsorted {
            zeta: u8,
            alpha: u8,
        }
        let s = to_sorted_json(&Unsorted { zeta: 1, alpha: 2 }).unwrap();
        assert!(s.find("alpha").unwrap() < s.find("zeta").unwrap());
    }
}
