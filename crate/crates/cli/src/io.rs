//! CSV ingestion with coordinate-bearing error messages.
//!
//! The design matrix is a CSV with a header row of variable names and one
//! observation per row; the response is a single-column CSV whose header is
//! optional. All reported row numbers are 1-based data rows (the header is
//! row 0).

use anyhow::{anyhow, bail, Context, Result};
use ndarray::Array2;
use std::path::Path;

pub struct RawDesign {
    pub values: Array2<f64>,
    pub names: Vec<String>,
}

/// Reads a design CSV: header row of names, numeric body.
pub fn read_design(path: &Path) -> Result<RawDesign> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("cannot open design file {}", path.display()))?;
    let names: Vec<String> = reader
        .headers()
        .context("design file has no header row")?
        .iter()
        .map(str::to_string)
        .collect();
    let p = names.len();
    if p == 0 {
        bail!("design file {} has an empty header", path.display());
    }

    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("design row {}", i + 1))?;
        if record.len() != p {
            bail!(
                "design row {}: expected {} columns, found {}",
                i + 1,
                p,
                record.len()
            );
        }
        let mut row = Vec::with_capacity(p);
        for (j, cell) in record.iter().enumerate() {
            let v: f64 = cell.parse().map_err(|_| {
                anyhow!(
                    "design row {}, column {} ({:?}): non-numeric value {:?}",
                    i + 1,
                    j + 1,
                    names[j],
                    cell
                )
            })?;
            row.push(v);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        bail!("design file {} has no data rows", path.display());
    }
    let n = rows.len();
    let mut values = Array2::<f64>::zeros((n, p));
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            values[[i, j]] = v;
        }
    }
    Ok(RawDesign { values, names })
}

/// Reads a single-column response CSV; a non-numeric first line is treated
/// as a header.
pub fn read_response(path: &Path) -> Result<Vec<f64>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot open response file {}", path.display()))?;
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let cell = line.trim().trim_matches('"');
        if cell.is_empty() {
            continue;
        }
        match cell.parse::<f64>() {
            Ok(v) => values.push(v),
            Err(_) if i == 0 && values.is_empty() => {} // header line
            Err(_) => bail!("response row {}: non-numeric value {:?}", i + 1, cell),
        }
    }
    if values.is_empty() {
        bail!("response file {} has no data rows", path.display());
    }
    Ok(values)
}

/// Coerces a response to {-1, +1} labels; {0, 1} input is remapped.
pub fn coerce_labels(y: &[f64]) -> Result<Vec<f64>> {
    let in_pm = y.iter().all(|&v| v == 1.0 || v == -1.0);
    if in_pm {
        return Ok(y.to_vec());
    }
    let in_01 = y.iter().all(|&v| v == 0.0 || v == 1.0);
    if in_01 {
        return Ok(y.iter().map(|&v| if v == 0.0 { -1.0 } else { 1.0 }).collect());
    }
    let bad = y
        .iter()
        .position(|&v| v != 1.0 && v != -1.0 && v != 0.0)
        .unwrap_or(0);
    bail!(
        "logistic response must use labels {{-1,+1}} or {{0,1}}; row {} has {}",
        bad + 1,
        y[bad]
    )
}

/// Parses a comma-separated list of 1-based indices into 0-based ones.
pub fn parse_index_list(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|tok| {
            let tok = tok.trim();
            let v: usize = tok
                .parse()
                .map_err(|_| anyhow!("invalid index {tok:?} (expected 1-based integers)"))?;
            if v == 0 {
                bail!("indices are 1-based; got 0");
            }
            Ok(v - 1)
        })
        .collect()
}

/// Writes a file, creating the parent directory, and notes it on stderr.
pub fn write_output(dir: &Path, name: &str, contents: &str) -> Result<std::path::PathBuf> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))?;
    let path = dir.join(name);
    std::fs::write(&path, contents)
        .with_context(|| format!("cannot write {}", path.display()))?;
    eprintln!("wrote {}", path.display());
    Ok(path)
}
