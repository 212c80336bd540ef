//! Reading surfaces and `index,value` CSVs, writing result files.

use std::fs;
use std::io::Write;
use std::path::Path;

use cuspflow_core::surface::parse_surface_unchecked;
use cuspflow_core::{validate, IdealTriangulation, Metric};

use crate::error::CliError;

pub fn read_surface(path: &Path) -> Result<(IdealTriangulation, Metric), CliError> {
    let (tri, l0) = read_surface_unchecked(path)?;
    let report = validate(&tri, &l0);
    if !report.ok() {
        return Err(CliError::Invalid {
            path: path.to_path_buf(),
            report: report.to_string(),
        });
    }
    Ok((tri, l0))
}

pub fn read_surface_unchecked(path: &Path) -> Result<(IdealTriangulation, Metric), CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_surface_unchecked(&text).map_err(CliError::core(path))
}

/// Read rows `boundary_index,value` covering `1..=n` exactly once. An
/// optional header row and `#` comments are allowed.
pub fn read_indexed(path: &Path, n: usize) -> Result<Vec<f64>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(text.as_bytes());
    let mut values: Vec<Option<f64>> = vec![None; n];
    let mut first = true;
    for record in reader.records() {
        let bad = |line: u64, message: String| CliError::Input {
            path: path.to_path_buf(),
            line,
            message,
        };
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            bad(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let is_first = std::mem::replace(&mut first, false);
        if record.len() != 2 {
            return Err(bad(
                line,
                format!("expected 2 fields, found {}", record.len()),
            ));
        }
        let index = match record[0].parse::<usize>() {
            Ok(i) => i,
            Err(_) if is_first && record[1].parse::<f64>().is_err() => continue,
            Err(_) => return Err(bad(line, format!("bad boundary index {:?}", &record[0]))),
        };
        let value: f64 = record[1]
            .parse()
            .map_err(|_| bad(line, format!("bad number {:?}", &record[1])))?;
        if index == 0 || index > n {
            return Err(bad(
                line,
                format!("boundary index {index} out of range 1..={n}"),
            ));
        }
        if values[index - 1].replace(value).is_some() {
            return Err(bad(line, format!("boundary index {index} given twice")));
        }
    }
    values
        .iter()
        .enumerate()
        .map(|(k, v)| {
            v.ok_or_else(|| CliError::Input {
                path: path.to_path_buf(),
                line: 0,
                message: format!("no value for boundary index {}", k + 1),
            })
        })
        .collect()
}

/// Write `contents` produced by `fill` to `path`, or to `out` when `path` is
/// `None`.
pub fn emit(
    path: Option<&Path>,
    out: &mut dyn Write,
    fill: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
) -> Result<(), CliError> {
    match path {
        Some(p) => {
            let mut buf = Vec::new();
            fill(&mut buf).map_err(|e| CliError::io(p, e))?;
            fs::write(p, buf).map_err(|e| CliError::io(p, e))
        }
        None => fill(out).map_err(|e| CliError::io(Path::new("<stdout>"), e)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(text: &str, n: usize) -> Result<Vec<f64>, CliError> {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("v.csv");
        fs::write(&path, text).unwrap();
        read_indexed(&path, n)
    }

    #[test]
    fn header_comments_and_order() {
        assert_eq!(
            read("boundary_index,w\n# note\n2, 0.5\n1,-1e-3\n", 2).unwrap(),
            vec![-1e-3, 0.5]
        );
        assert_eq!(read("1,2\n2,3\n", 2).unwrap(), vec![2.0, 3.0]);
    }

    #[test]
    fn bad_rows_name_their_line() {
        let line = |r: Result<Vec<f64>, CliError>| match r {
            Err(CliError::Input { line, .. }) => line,
            other => panic!("{other:?}"),
        };
        assert_eq!(line(read("1,1\n1,2\n", 2)), 2);
        assert_eq!(line(read("1,1\n3,2\n", 2)), 2);
        assert_eq!(line(read("1,1\n2,x\n", 2)), 2);
        assert_eq!(line(read("1,1,1\n", 1)), 1);
        assert_eq!(line(read("1,1\n", 2)), 0);
        assert_eq!(line(read("a,b\nc,1\n", 1)), 2);
    }
}
