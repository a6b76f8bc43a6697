//! Reader and writer for the symmetric coordinate text format
//! (`%%MatrixMarket matrix coordinate real symmetric`, 1-based indices,
//! lower triangle).

use super::{SparseError, SymCsc, SymTriplet};
use std::io::{BufRead, Write};

pub fn read_matrix_market<R: BufRead>(reader: R) -> Result<SymCsc, SparseError> {
    let mut lines = reader.lines().enumerate();
    let (line_no, header) = lines
        .next()
        .ok_or(SparseError::MatrixMarket { line: 1, msg: "empty input".into() })
        .and_then(|(i, l)| l.map(|l| (i + 1, l)).map_err(|e| SparseError::Io(e.to_string())))?;
    let header_lc = header.to_ascii_lowercase();
    if !header_lc.starts_with("%%matrixmarket matrix coordinate real symmetric") {
        return Err(SparseError::MatrixMarket {
            line: line_no,
            msg: format!("unsupported header: {header}"),
        });
    }

    let mut size: Option<(usize, usize, usize)> = None;
    let mut triplet = SymTriplet::new(0);
    let mut seen = 0usize;
    for (i, line) in lines {
        let line_no = i + 1;
        let line = line.map_err(|e| SparseError::Io(e.to_string()))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match size {
            None => {
                if fields.len() != 3 {
                    return Err(SparseError::MatrixMarket {
                        line: line_no,
                        msg: "expected `rows cols nnz`".into(),
                    });
                }
                let parse = |s: &str| {
                    s.parse::<usize>().map_err(|_| SparseError::MatrixMarket {
                        line: line_no,
                        msg: format!("bad integer `{s}`"),
                    })
                };
                let (rows, cols, nnz) = (parse(fields[0])?, parse(fields[1])?, parse(fields[2])?);
                if rows != cols {
                    return Err(SparseError::MatrixMarket {
                        line: line_no,
                        msg: "matrix must be square".into(),
                    });
                }
                triplet.n = rows;
                size = Some((rows, cols, nnz));
            }
            Some((n, _, _)) => {
                if fields.len() != 3 {
                    return Err(SparseError::MatrixMarket {
                        line: line_no,
                        msg: "expected `row col value`".into(),
                    });
                }
                let row: usize = fields[0].parse().map_err(|_| SparseError::MatrixMarket {
                    line: line_no,
                    msg: format!("bad row `{}`", fields[0]),
                })?;
                let col: usize = fields[1].parse().map_err(|_| SparseError::MatrixMarket {
                    line: line_no,
                    msg: format!("bad col `{}`", fields[1]),
                })?;
                let value: f64 = fields[2].parse().map_err(|_| SparseError::MatrixMarket {
                    line: line_no,
                    msg: format!("bad value `{}`", fields[2]),
                })?;
                if row < 1 || col < 1 || row > n || col > n {
                    return Err(SparseError::MatrixMarket {
                        line: line_no,
                        msg: format!("index ({row}, {col}) out of range for order {n}"),
                    });
                }
                triplet.push(row - 1, col - 1, value);
                seen += 1;
            }
        }
    }
    match size {
        Some((_, _, nnz)) if seen == nnz => SymCsc::from_triplets(&triplet),
        Some((_, _, nnz)) => Err(SparseError::MatrixMarket {
            line: 0,
            msg: format!("expected {nnz} entries, found {seen}"),
        }),
        None => Err(SparseError::MatrixMarket { line: 0, msg: "missing size line".into() }),
    }
}

pub fn write_matrix_market<W: Write>(a: &SymCsc, mut writer: W) -> Result<(), SparseError> {
    let io = |e: std::io::Error| SparseError::Io(e.to_string());
    writeln!(writer, "%%MatrixMarket matrix coordinate real symmetric").map_err(io)?;
    writeln!(writer, "{} {} {}", a.n, a.n, a.nnz()).map_err(io)?;
    for (r, c, v) in a.iter() {
        writeln!(writer, "{} {} {:.17e}", r + 1, c + 1, v).map_err(io)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::BufReader;

    #[test]
    fn round_trip() {
        let t = SymTriplet { n: 3, entries: vec![(0, 0, 1.5), (2, 0, -2.0), (2, 2, 3.25)] };
        let a = SymCsc::from_triplets(&t).unwrap();
        let mut buf = Vec::new();
        write_matrix_market(&a, &mut buf).unwrap();
        let b = read_matrix_market(BufReader::new(buf.as_slice())).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_general_header() {
        let text = "%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 1.0\n";
        assert!(read_matrix_market(BufReader::new(text.as_bytes())).is_err());
    }

    #[test]
    fn rejects_out_of_range_index() {
        let text = "%%MatrixMarket matrix coordinate real symmetric\n2 2 1\n3 1 1.0\n";
        assert!(read_matrix_market(BufReader::new(text.as_bytes())).is_err());
    }
}
