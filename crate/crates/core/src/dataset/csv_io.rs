use std::io::Write;
use std::path::Path;

use super::{encode_labels, PointSet};
use crate::{Error, Result};

/// Reads a point set from a CSV file. See [`parse_csv`] for the format.
pub fn load_csv(path: impl AsRef<Path>, label_column: Option<usize>) -> Result<PointSet> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let name = path
        .file_stem()
        .map_or_else(|| "points".to_string(), |s| s.to_string_lossy().into_owned());
    Ok(parse_csv(&bytes, label_column)?.with_name(name))
}

fn reader(bytes: &[u8]) -> csv::Reader<&[u8]> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(bytes)
}

fn records(bytes: &[u8]) -> Result<Vec<(usize, csv::StringRecord)>> {
    let mut out = Vec::new();
    for (idx, rec) in reader(bytes).into_records().enumerate() {
        let rec = rec.map_err(|e| Error::Csv {
            row: e.position().map_or(idx + 1, |p| p.line() as usize),
            message: e.to_string(),
        })?;
        let row = rec.position().map_or(idx + 1, |p| p.line() as usize);
        out.push((row, rec));
    }
    Ok(out)
}

fn is_header(rec: &csv::StringRecord, label_column: Option<usize>) -> bool {
    rec.iter()
        .enumerate()
        .any(|(c, cell)| Some(c) != label_column && cell.parse::<f64>().is_err())
}

/// Parses comma-separated rows of real numbers.
///
/// One header row is allowed and is recognised by a non-numeric cell outside
/// the label column. Rows and columns in errors are 1-based. Label tokens are
/// re-encoded to contiguous ids.
pub fn parse_csv(bytes: &[u8], label_column: Option<usize>) -> Result<PointSet> {
    let mut rows = records(bytes)?;
    if rows.first().is_some_and(|(_, rec)| is_header(rec, label_column)) {
        rows.remove(0);
    }
    let Some((_, first)) = rows.first() else {
        return Err(Error::Empty("no data rows".into()));
    };
    let arity = first.len();
    if let Some(lc) = label_column {
        if lc >= arity {
            return Err(Error::param(format!(
                "label column {lc} out of range for {arity} columns"
            )));
        }
    }
    let dim = arity - usize::from(label_column.is_some());
    if dim == 0 {
        return Err(Error::InvalidPointSet("no coordinate columns".into()));
    }

    let mut coords = Vec::with_capacity(rows.len() * dim);
    let mut tokens = Vec::new();
    for (row, rec) in &rows {
        if rec.len() != arity {
            return Err(Error::RaggedRow {
                row: *row,
                expected: arity,
                found: rec.len(),
            });
        }
        for (c, cell) in rec.iter().enumerate() {
            if Some(c) == label_column {
                tokens.push(cell.to_string());
                continue;
            }
            let v: f64 = cell.parse().map_err(|_| Error::NonNumeric {
                row: *row,
                column: c + 1,
                cell: cell.to_string(),
            })?;
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    row: *row,
                    column: c + 1,
                    cell: cell.to_string(),
                });
            }
            coords.push(v);
        }
    }
    let labels = label_column.map(|_| encode_labels(&tokens));
    PointSet::new("points", dim, coords, labels)
}

/// Index of a header column named `label` or `class`, if the first row is a
/// header.
pub fn detect_label_column(bytes: &[u8]) -> Option<usize> {
    let mut rdr = reader(bytes);
    let first = rdr.records().next()?.ok()?;
    if !is_header(&first, None) {
        return None;
    }
    first
        .iter()
        .position(|c| c.eq_ignore_ascii_case("label") || c.eq_ignore_ascii_case("class"))
}

/// Reads one label per row from `column`. A first row that is not an integer
/// while every other row is counts as a header.
pub fn parse_labels(bytes: &[u8], column: usize) -> Result<Vec<usize>> {
    let rows = records(bytes)?;
    let mut tokens = Vec::with_capacity(rows.len());
    for (row, rec) in &rows {
        let cell = rec.get(column).ok_or(Error::RaggedRow {
            row: *row,
            expected: column + 1,
            found: rec.len(),
        })?;
        tokens.push(cell.to_string());
    }
    let is_int = |t: &String| t.parse::<i64>().is_ok();
    if tokens.len() > 1 && !is_int(&tokens[0]) && tokens[1..].iter().all(is_int) {
        tokens.remove(0);
    }
    if tokens.is_empty() {
        return Err(Error::Empty("no labels".into()));
    }
    Ok(encode_labels(&tokens))
}

/// Writes `x0..x{d-1}[,label]` with a header row. Values use the shortest
/// representation that parses back to the same `f64`.
pub fn write_csv<W: Write>(ps: &PointSet, mut w: W) -> std::io::Result<()> {
    let mut header: Vec<String> = (0..ps.dim()).map(|d| format!("x{d}")).collect();
    if ps.labels().is_some() {
        header.push("label".into());
    }
    writeln!(w, "{}", header.join(","))?;
    for (i, p) in ps.points().enumerate() {
        let mut line = p.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
        if let Some(labels) = ps.labels() {
            line.push(',');
            line.push_str(&labels[i].to_string());
        }
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// One integer label per line, no header.
pub fn write_labels<W: Write>(labels: &[usize], mut w: W) -> std::io::Result<()> {
    for l in labels {
        writeln!(w, "{l}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_plain_rows() {
        let ps = parse_csv(b"0,0\n1,1\n2,2", None).unwrap();
        assert_eq!(ps.len(), 3);
        assert_eq!(ps.dim(), 2);
        assert_eq!(ps.point(2), &[2.0, 2.0]);
        assert!(ps.labels().is_none());
    }

    #[test]
    fn extracts_and_reencodes_labels() {
        let ps = parse_csv(b"0,0,a\n1,1,b", Some(2)).unwrap();
        assert_eq!(ps.labels(), Some(&[0, 1][..]));
        assert_eq!(ps.dim(), 2);
    }

    #[test]
    fn nan_reports_position() {
        match parse_csv(b"0,NaN", None) {
            Err(Error::NonFinite { row, column, .. }) => assert_eq!((row, column), (1, 2)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn ragged_and_non_numeric_rows() {
        assert!(matches!(
            parse_csv(b"0,0\n1\n", None),
            Err(Error::RaggedRow {
                row: 2,
                expected: 2,
                found: 1
            })
        ));
        assert!(matches!(
            parse_csv(b"0,0\n1,x\n", None),
            Err(Error::NonNumeric { row: 2, column: 2, .. })
        ));
        assert!(matches!(parse_csv(b"", None), Err(Error::Empty(_))));
        assert!(matches!(parse_csv(b"x,y\n", None), Err(Error::Empty(_))));
    }

    #[test]
    fn header_is_skipped_and_label_detected() {
        let text = b"x0,x1,label\n0.5,1,3\n2,3,1\n";
        assert_eq!(detect_label_column(text), Some(2));
        let ps = parse_csv(text, Some(2)).unwrap();
        assert_eq!(ps.len(), 2);
        assert_eq!(ps.labels(), Some(&[1, 0][..]));
        assert_eq!(detect_label_column(b"1,2\n"), None);
    }

    #[test]
    fn label_files() {
        assert_eq!(parse_labels(b"1\n0\n1\n", 0).unwrap(), vec![1, 0, 1]);
        assert_eq!(parse_labels(b"label\n2\n5\n", 0).unwrap(), vec![0, 1]);
        assert!(parse_labels(b"", 0).is_err());
    }

    #[test]
    fn write_then_parse_is_bit_exact() {
        let ps = PointSet::new(
            "p",
            2,
            vec![0.1, -1e-300, std::f64::consts::PI, 1.0 / 3.0],
            Some(vec![1, 0]),
        )
        .unwrap();
        let mut buf = Vec::new();
        write_csv(&ps, &mut buf).unwrap();
        let back = parse_csv(&buf, Some(2)).unwrap();
        assert_eq!(back.coords(), ps.coords());
        assert_eq!(back.labels(), ps.labels());
    }
}
