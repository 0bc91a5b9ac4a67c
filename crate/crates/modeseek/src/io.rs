//! CSV ingestion and export.
//!
//! Datasets arrive as UTF-8 CSV with a header row naming coordinate columns
//! `x1..xd` plus optional `weight` and `bandwidth` columns ('.' decimal
//! separator). Trajectories leave as CSV with one row per recorded state;
//! run metadata (stop reason and friends) goes into a JSON sidecar.

use std::io::{Read, Write};
use std::path::Path;

use crate::density::DataSet;
use crate::error::{Error, Result};
use crate::meanshift::Trajectory;

/// Read a dataset from CSV text.
///
/// Coordinate columns must be named `x1`, `x2`, ..., contiguous from `x1`;
/// `weight` and `bandwidth` columns are optional. Column order is free.
pub fn read_dataset<R: Read>(reader: R) -> Result<DataSet> {
    let mut csv = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = csv
        .headers()
        .map_err(|e| csv_error(&e, 1))?
        .clone();

    let mut coord_cols: Vec<(usize, usize)> = Vec::new(); // (axis, column)
    let mut weight_col = None;
    let mut bandwidth_col = None;
    for (col, name) in headers.iter().enumerate() {
        let lower = name.to_ascii_lowercase();
        if let Some(axis) = lower.strip_prefix('x').and_then(|s| s.parse::<usize>().ok()) {
            if axis >= 1 {
                coord_cols.push((axis, col));
                continue;
            }
        }
        match lower.as_str() {
            "weight" => weight_col = Some(col),
            "bandwidth" => bandwidth_col = Some(col),
            other => {
                return Err(Error::Csv {
                    line: 1,
                    message: format!("unrecognized column `{other}`"),
                })
            }
        }
    }
    coord_cols.sort_unstable();
    if coord_cols.is_empty() {
        return Err(Error::Csv {
            line: 1,
            message: "no coordinate columns x1..xd found".into(),
        });
    }
    let d = coord_cols.len();
    if coord_cols[0].0 != 1 || coord_cols.last().unwrap().0 != d {
        return Err(Error::Csv {
            line: 1,
            message: format!("coordinate columns must be contiguous x1..x{d}"),
        });
    }

    let mut points = Vec::new();
    let mut weights = Vec::new();
    let mut bandwidths = Vec::new();
    for record in csv.records() {
        let record = record.map_err(|e| csv_error(&e, 0))?;
        let line = record
            .position()
            .map(csv::Position::line)
            .unwrap_or_default();
        let parse = |col: usize| -> Result<f64> {
            let field = record.get(col).ok_or_else(|| Error::Csv {
                line,
                message: format!("missing column {col}"),
            })?;
            field.parse::<f64>().map_err(|_| Error::Csv {
                line,
                message: format!("`{field}` is not a number"),
            })
        };
        for &(_, col) in &coord_cols {
            points.push(parse(col)?);
        }
        if let Some(col) = weight_col {
            weights.push(parse(col)?);
        }
        if let Some(col) = bandwidth_col {
            bandwidths.push(parse(col)?);
        }
    }
    if points.is_empty() {
        return Err(Error::Csv {
            line: 1,
            message: "no data rows".into(),
        });
    }

    let mut data = DataSet::new(points, d)?;
    if weight_col.is_some() {
        data = data.with_weights(weights)?;
    }
    if bandwidth_col.is_some() {
        data = data.with_bandwidths(bandwidths)?;
    }
    Ok(data)
}

/// Read a dataset from a CSV file.
pub fn read_dataset_file(path: &Path) -> Result<DataSet> {
    read_dataset(std::fs::File::open(path)?)
}

fn csv_error(e: &csv::Error, fallback_line: u64) -> Error {
    let line = match e.position() {
        Some(p) => p.line(),
        None => fallback_line,
    };
    Error::Csv {
        line,
        message: e.to_string(),
    }
}

/// Write a recorded trajectory as CSV with columns
/// `t, y1..yd, f, step_norm, grad_norm, f_check`.
///
/// `stride` downsamples long runs for plotting (every `stride`-th state;
/// the first and last states are always kept). Floats use the shortest
/// round-trip decimal form, so identical runs serialize byte-identically.
pub fn write_trajectory<W: Write>(traj: &Trajectory, stride: usize, out: W) -> Result<()> {
    assert!(stride >= 1);
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_owned()];
    for k in 1..=traj.d() {
        header.push(format!("y{k}"));
    }
    header.extend(["f", "step_norm", "grad_norm", "f_check"].map(str::to_owned));
    w.write_record(&header).map_err(|e| csv_error(&e, 0))?;

    let last = traj.len() - 1;
    for i in (0..traj.len()).filter(|i| i.is_multiple_of(stride) || *i == last) {
        let state = traj.state(i);
        let mut row = vec![state.t.to_string()];
        for v in state.position {
            row.push(v.to_string());
        }
        row.push(state.density.to_string());
        row.push(state.step_norm.to_string());
        row.push(state.grad_norm.to_string());
        row.push(state.f_check.to_string());
        w.write_record(&row).map_err(|e| csv_error(&e, 0))?;
    }
    w.flush()?;
    Ok(())
}

/// Stride that keeps a trajectory export at or under `max_rows` rows.
pub fn export_stride(states: usize, max_rows: usize) -> usize {
    states.div_ceil(max_rows.max(1)).max(1)
}
