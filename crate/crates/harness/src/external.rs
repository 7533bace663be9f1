//! Results of optimizers run outside this crate.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One externally produced run, as read from a CSV with header
/// `algorithm,seed,final_best`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExternalRow {
    pub algorithm: String,
    pub seed: u64,
    pub final_best: f64,
}

/// Reads an external results file. Errors name the offending data row
/// (1-based, header excluded).
pub fn read_external(path: &Path) -> Result<Vec<ExternalRow>> {
    let file = std::fs::File::open(path).map_err(Error::io(path))?;
    let bad = |row: usize, msg: String| Error::External { path: path.to_path_buf(), row, msg };
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file);
    let headers = reader.headers().map_err(|e| bad(0, e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != ["algorithm", "seed", "final_best"] {
        return Err(bad(
            0,
            format!(
                "expected header `algorithm,seed,final_best`, found `{}`",
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    for (i, rec) in reader.deserialize::<ExternalRow>().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| bad(row, e.to_string()))?;
        if rec.algorithm.is_empty() {
            return Err(bad(row, "empty algorithm name".into()));
        }
        if !rec.final_best.is_finite() {
            return Err(bad(row, format!("final_best must be finite, got {}", rec.final_best)));
        }
        if !seen.insert((rec.algorithm.clone(), rec.seed)) {
            return Err(bad(row, format!("duplicate result for {} seed {}", rec.algorithm, rec.seed)));
        }
        rows.push(rec);
    }
    if rows.is_empty() {
        return Err(bad(0, "no data rows".into()));
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn file(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn reads_rows() {
        let f = file("algorithm,seed,final_best\nBayesOpt,0,12.5\nBayesOpt, 1 ,3e2\n");
        let rows = read_external(f.path()).unwrap();
        assert_eq!(rows[1], ExternalRow { algorithm: "BayesOpt".into(), seed: 1, final_best: 300.0 });
    }

    #[test]
    fn errors_name_the_row() {
        let f = file("algorithm,seed,final_best\nA,0,1.0\nA,1,abc\n");
        match read_external(f.path()).unwrap_err() {
            Error::External { row, .. } => assert_eq!(row, 2),
            e => panic!("unexpected {e}"),
        }
        let f = file("algorithm,seed,final_best\nA,0,1.0\nA,0,2.0\n");
        assert!(read_external(f.path()).unwrap_err().to_string().contains("row 2"));
        let f = file("algo,seed,value\nA,0,1.0\n");
        assert!(read_external(f.path()).unwrap_err().to_string().contains("header"));
        let f = file("algorithm,seed,final_best\nA,0,inf\n");
        assert!(read_external(f.path()).is_err());
        let f = file("algorithm,seed,final_best\nA,0\n");
        assert!(read_external(f.path()).unwrap_err().to_string().contains("row 1"));
    }
}
