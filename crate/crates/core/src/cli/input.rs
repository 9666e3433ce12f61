use std::path::Path;

use crate::error::{Error, Result};
use crate::sample::{reduce_outputs, Sample};

/// Reads a headed CSV of inputs and outputs.
///
/// Columns whose names start with `y` are outputs and are reduced by their
/// maximum; without such columns the last column is the output. With
/// `log_y` every output is replaced by its natural log.
pub fn read_sample(path: &Path, log_y: bool) -> Result<Sample> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    let headers = reader
        .headers()
        .map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?
        .clone();
    let mut y_cols: Vec<usize> = headers
        .iter()
        .enumerate()
        .filter(|(_, h)| h.to_ascii_lowercase().starts_with('y'))
        .map(|(i, _)| i)
        .collect();
    if y_cols.is_empty() && !headers.is_empty() {
        y_cols.push(headers.len() - 1);
    }
    let x_cols: Vec<usize> = (0..headers.len()).filter(|i| !y_cols.contains(i)).collect();
    if x_cols.is_empty() || y_cols.is_empty() {
        return Err(Error::InvalidInput(format!(
            "{}: need at least one input and one output column",
            path.display()
        )));
    }

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::InvalidInput(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| -> Result<f64> {
            let raw = &record[i];
            match raw.parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(Error::InvalidInput(format!(
                    "line {line}: column {:?} has non-finite value {raw:?}",
                    &headers[i]
                ))),
            }
        };
        let x = x_cols.iter().map(|&i| field(i)).collect::<Result<Vec<_>>>()?;
        let mut ys = y_cols.iter().map(|&i| field(i)).collect::<Result<Vec<_>>>()?;
        if log_y {
            if let Some(bad) = ys.iter().find(|&&y| y <= 0.0) {
                return Err(Error::InvalidInput(format!(
                    "line {line}: output {bad} has no logarithm"
                )));
            }
            ys.iter_mut().for_each(|y| *y = y.ln());
        }
        rows.push((x, ys));
    }
    if rows.is_empty() {
        return Err(Error::InvalidInput(format!("{}: no data rows", path.display())));
    }
    reduce_outputs(rows)
}

/// Parses `start:stop:step` or a comma-separated list.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidInput(format!("cannot parse grid {spec:?}"));
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [start, stop, step] => {
            let start: f64 = start.trim().parse().map_err(|_| bad())?;
            let stop: f64 = stop.trim().parse().map_err(|_| bad())?;
            let step: f64 = step.trim().parse().map_err(|_| bad())?;
            if !(step > 0.0 && start.is_finite() && stop >= start) {
                return Err(bad());
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            Ok((0..count).map(|i| start + i as f64 * step).collect())
        }
        [_] => parse_list(spec),
        _ => Err(bad()),
    }
}

/// Parses a comma-separated list of finite numbers.
pub fn parse_list(spec: &str) -> Result<Vec<f64>> {
    let values = spec
        .split(',')
        .map(|v| match v.trim().parse::<f64>() {
            Ok(f) if f.is_finite() => Ok(f),
            _ => Err(Error::InvalidInput(format!("cannot parse {v:?} as a number"))),
        })
        .collect::<Result<Vec<_>>>()?;
    if values.is_empty() {
        return Err(Error::InvalidInput("empty list".into()));
    }
    Ok(values)
}

/// Parses a comma-separated list of positive integers.
pub fn parse_indices(spec: &str) -> Result<Vec<usize>> {
    spec.split(',')
        .map(|v| {
            v.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidInput(format!("cannot parse {v:?} as an index")))
        })
        .collect()
}

/// Formats a query point as `x1;x2;...`.
pub fn format_point(x: &[f64]) -> String {
    x.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(";")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("1:3:1").unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(parse_grid("0.5:1.0:0.25").unwrap(), vec![0.5, 0.75, 1.0]);
        assert_eq!(parse_grid("1,2.5").unwrap(), vec![1.0, 2.5]);
        assert!(parse_grid("3:1:1").is_err());
        assert!(parse_grid("1:2").is_err());
        assert!(parse_grid("a,b").is_err());
    }

    #[test]
    fn reads_outputs_and_rejects_bad_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        std::fs::File::create(&path)
            .unwrap()
            .write_all(b"x1,x2,y1,y2\n1,2,3,5\n2,1,4,1\n")
            .unwrap();
        let s = read_sample(&path, false).unwrap();
        assert_eq!(s.dim(), 2);
        assert_eq!(s.outputs(), &[5.0, 4.0]);

        std::fs::write(&path, "x,y\n1,2\n3,inf\n").unwrap();
        let err = read_sample(&path, false).unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");

        std::fs::write(&path, "a,b\n1,2\n").unwrap();
        assert_eq!(read_sample(&path, true).unwrap().outputs(), &[2f64.ln()]);
        std::fs::write(&path, "a,b\n1,0\n").unwrap();
        assert!(read_sample(&path, true).is_err());
    }
}
