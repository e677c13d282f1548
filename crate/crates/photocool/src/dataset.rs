//! Temperature-versus-power CSV files.
//!
//! Header `power_w,temperature_k` with an optional third column `sigma_k`.
//! Lines starting with `#` are ignored. Errors carry the 1-based file line.

use std::io::Read;
use std::path::Path;

use photocool_core::fitting::{validate_row, DataRow, Dataset};
use photocool_core::SystemParams;

#[derive(Debug, thiserror::Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {reason}")]
    Parse { line: u64, reason: String },
    #[error("line {line}: {reason}")]
    Invalid { line: u64, reason: String },
    #[error("{0}")]
    Dataset(photocool_core::Error),
}

const HEADER: [&str; 3] = ["power_w", "temperature_k", "sigma_k"];

/// Parse CSV text into rows, each tagged with its file line.
pub fn parse_rows(mut reader: impl Read) -> Result<Vec<(u64, DataRow)>, DatasetError> {
    let mut text = String::new();
    reader.read_to_string(&mut text).map_err(|e| DatasetError::Parse {
        line: 0,
        reason: e.to_string(),
    })?;
    // The csv reader does not count comment lines, so physical line numbers
    // of content lines are tracked here. The first one is the header.
    let content: Vec<u64> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty())
        .map(|(i, _)| i as u64 + 1)
        .collect();
    let physical = |record: usize| content.get(record).copied().unwrap_or(0);
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| csv_error(&e, physical(0)))?.clone();
    let names: Vec<&str> = header.iter().collect();
    if !(names == HEADER[..2] || names == HEADER[..]) {
        return Err(DatasetError::Parse {
            line: physical(0),
            reason: format!(
                "expected header `power_w,temperature_k[,sigma_k]`, got `{}`",
                names.join(",")
            ),
        });
    }
    let mut rows = Vec::new();
    for (k, record) in rdr.records().enumerate() {
        let line = physical(k + 1);
        let record = record.map_err(|e| csv_error(&e, line))?;
        let field = |i: usize| -> Result<f64, DatasetError> {
            let raw = &record[i];
            raw.parse::<f64>().map_err(|_| DatasetError::Parse {
                line,
                reason: format!("`{}` is not a number: `{raw}`", HEADER[i]),
            })
        };
        let sigma = match record.get(2) {
            Some("") | None => None,
            Some(_) => Some(field(2)?),
        };
        let row = DataRow {
            power: field(0)?,
            temperature: field(1)?,
            sigma,
        };
        validate_row(&row).map_err(|reason| DatasetError::Invalid { line, reason })?;
        rows.push((line, row));
    }
    Ok(rows)
}

fn csv_error(e: &csv::Error, line: u64) -> DatasetError {
    DatasetError::Parse {
        line,
        reason: e.to_string(),
    }
}

/// Build a validated dataset; row-level errors are reported by file line.
pub fn to_dataset(rows: Vec<(u64, DataRow)>, device: SystemParams) -> Result<Dataset, DatasetError> {
    let lines: Vec<u64> = rows.iter().map(|r| r.0).collect();
    Dataset::new(rows.into_iter().map(|r| r.1).collect(), device).map_err(|e| match e {
        photocool_core::Error::InvalidDataset { row, reason } if row >= 1 && row <= lines.len() => {
            DatasetError::Invalid {
                line: lines[row - 1],
                reason,
            }
        }
        other => DatasetError::Dataset(other),
    })
}

pub fn load_dataset(path: &Path, device: SystemParams) -> Result<Dataset, DatasetError> {
    let file = std::fs::File::open(path).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })?;
    to_dataset(parse_rows(file)?, device)
}

/// CSV text for `rows`, readable by [`parse_rows`].
pub fn to_csv(rows: &[DataRow], comment: Option<&str>) -> String {
    let with_sigma = rows.iter().any(|r| r.sigma.is_some());
    let mut out = String::new();
    if let Some(c) = comment {
        for l in c.lines() {
            out.push_str("# ");
            out.push_str(l);
            out.push('\n');
        }
    }
    out.push_str(if with_sigma { "power_w,temperature_k,sigma_k\n" } else { "power_w,temperature_k\n" });
    for r in rows {
        match (with_sigma, r.sigma) {
            (true, Some(s)) => out.push_str(&format!("{:e},{:e},{:e}\n", r.power, r.temperature, s)),
            (true, None) => out.push_str(&format!("{:e},{:e},\n", r.power, r.temperature)),
            (false, _) => out.push_str(&format!("{:e},{:e}\n", r.power, r.temperature)),
        }
    }
    out
}
