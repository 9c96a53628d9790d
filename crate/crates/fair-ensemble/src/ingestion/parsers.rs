//! Per-dataset file parsers.
//!
//! Every parser returns raw parts (features, optional labels, optional
//! native groups); size checks against the expected roster happen in the
//! loader, so small shape-compatible files can be parsed by tests.

use std::path::Path;

use crate::core::Matrix;
use crate::error::{Error, Result};

pub struct RawParts {
    pub features: Matrix,
    pub labels: Option<Vec<u8>>,
    pub native_groups: Option<Vec<u32>>,
}

fn parse_err(path: &Path, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.display().to_string(),
        message: message.into(),
    }
}

fn read_delimited(path: &Path, has_headers: bool) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_headers)
        .flexible(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| parse_err(path, e.to_string()))?;
    let header = if has_headers {
        reader
            .headers()
            .map_err(|e| parse_err(path, e.to_string()))?
            .iter()
            .map(|s| s.to_string())
            .collect()
    } else {
        Vec::new()
    };
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| parse_err(path, e.to_string()))?;
        rows.push(record.iter().map(|s| s.to_string()).collect());
    }
    if rows.is_empty() {
        return Err(parse_err(path, "file holds no data rows"));
    }
    Ok((header, rows))
}

fn parse_f64(path: &Path, row: usize, col: usize, raw: &str) -> Result<f64> {
    raw.parse::<f64>().map_err(|_| {
        parse_err(
            path,
            format!("row {row}, column {col}: '{raw}' is not numeric"),
        )
    })
}

/// Communities and Crime.
///
/// Comma-separated, no header, 128 columns: 5 non-predictive leading
/// columns, 122 predictive attributes, crime rate last. '?' marks missing
/// values. Rows are all kept; feature columns containing any missing value
/// are dropped. The four population-percentage columns (offsets 7..=10)
/// become the protected attribute via argmax and are excluded from the
/// features; label = crime rate > 0.5.
pub fn parse_communities(path: &Path) -> Result<RawParts> {
    const NON_PREDICTIVE: usize = 5;
    const RACE_COLS: [usize; 4] = [7, 8, 9, 10];
    let (_, rows) = read_delimited(path, false)?;
    let width = rows[0].len();
    if width < 12 {
        return Err(parse_err(
            path,
            format!("expected at least 12 columns, found {width}"),
        ));
    }
    let goal_col = width - 1;

    let mut col_has_missing = vec![false; width];
    for row in &rows {
        if row.len() != width {
            return Err(parse_err(path, "ragged row widths"));
        }
        for (c, v) in row.iter().enumerate() {
            if v == "?" {
                col_has_missing[c] = true;
            }
        }
    }
    for &c in &RACE_COLS {
        if col_has_missing[c] {
            return Err(parse_err(
                path,
                format!("population-percentage column {c} has missing values"),
            ));
        }
    }
    if col_has_missing[goal_col] {
        return Err(parse_err(path, "crime-rate column has missing values"));
    }

    let feature_cols: Vec<usize> = (NON_PREDICTIVE..goal_col)
        .filter(|c| !col_has_missing[*c] && !RACE_COLS.contains(c))
        .collect();
    if feature_cols.is_empty() {
        return Err(parse_err(path, "no complete feature columns"));
    }

    let mut features = Vec::with_capacity(rows.len());
    let mut labels = Vec::with_capacity(rows.len());
    let mut groups = Vec::with_capacity(rows.len());
    for (r, row) in rows.iter().enumerate() {
        let mut feat = Vec::with_capacity(feature_cols.len());
        for &c in &feature_cols {
            feat.push(parse_f64(path, r, c, &row[c])?);
        }
        features.push(feat);
        let crime = parse_f64(path, r, goal_col, &row[goal_col])?;
        labels.push(u8::from(crime > 0.5));
        let mut best = 0usize;
        let mut best_v = f64::NEG_INFINITY;
        for (slot, &c) in RACE_COLS.iter().enumerate() {
            let v = parse_f64(path, r, c, &row[c])?;
            if v > best_v {
                best_v = v;
                best = slot;
            }
        }
        groups.push(best as u32);
    }
    Ok(RawParts {
        features: Matrix::from_rows(features)?,
        labels: Some(labels),
        native_groups: Some(groups),
    })
}

/// German Credit, numeric version.
///
/// Whitespace- or comma-separated numeric table; the last column is the
/// credit label (1 = good = inlier, 2 = bad = outlier), `group_column`
/// (0-based, default 8) carries the personal-status-by-gender code whose
/// distinct values map to groups in sorted order.
pub fn parse_german(path: &Path, group_column: usize) -> Result<RawParts> {
    let text = std::fs::read_to_string(path)?;
    let mut rows: Vec<Vec<String>> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let cells: Vec<String> = if line.contains(',') {
            line.split(',').map(|s| s.trim().to_string()).collect()
        } else {
            line.split_whitespace().map(|s| s.to_string()).collect()
        };
        rows.push(cells);
    }
    if rows.is_empty() {
        return Err(parse_err(path, "file holds no data rows"));
    }
    let width = rows[0].len();
    if rows.iter().any(|r| r.len() != width) {
        return Err(parse_err(path, "ragged row widths"));
    }
    let label_col = width - 1;
    if group_column >= label_col {
        return Err(parse_err(
            path,
            format!("group column {group_column} out of range (label column is {label_col})"),
        ));
    }

    let mut codes = Vec::with_capacity(rows.len());
    let mut labels = Vec::with_capacity(rows.len());
    let mut features = Vec::with_capacity(rows.len());
    for (r, row) in rows.iter().enumerate() {
        let label_raw = parse_f64(path, r, label_col, &row[label_col])?;
        let label = match label_raw as i64 {
            1 => 0u8,
            2 => 1u8,
            other => {
                return Err(parse_err(
                    path,
                    format!("row {r}: label {other} is neither 1 (good) nor 2 (bad)"),
                ))
            }
        };
        labels.push(label);
        codes.push(parse_f64(path, r, group_column, &row[group_column])? as i64);
        let mut feat = Vec::with_capacity(width - 2);
        for c in 0..label_col {
            if c == group_column {
                continue;
            }
            feat.push(parse_f64(path, r, c, &row[c])?);
        }
        features.push(feat);
    }

    let mut distinct = codes.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let groups: Vec<u32> = codes
        .iter()
        .map(|c| distinct.binary_search(c).expect("code collected") as u32)
        .collect();
    Ok(RawParts {
        features: Matrix::from_rows(features)?,
        labels: Some(labels),
        native_groups: Some(groups),
    })
}

/// Outlier-detection benchmark export: numeric columns, last column the
/// 0/1 outlier label, optional header row.
pub fn parse_labeled_table(path: &Path) -> Result<RawParts> {
    let (_, rows) = read_delimited(path, sniff_header(path)?)?;
    let width = rows[0].len();
    if width < 2 {
        return Err(parse_err(path, "need at least one feature and the label"));
    }
    let label_col = width - 1;
    let mut features = Vec::with_capacity(rows.len());
    let mut labels = Vec::with_capacity(rows.len());
    for (r, row) in rows.iter().enumerate() {
        if row.len() != width {
            return Err(parse_err(path, "ragged row widths"));
        }
        let mut feat = Vec::with_capacity(label_col);
        for c in 0..label_col {
            feat.push(parse_f64(path, r, c, &row[c])?);
        }
        features.push(feat);
        let raw = parse_f64(path, r, label_col, &row[label_col])?;
        if raw != 0.0 && raw != 1.0 {
            return Err(parse_err(
                path,
                format!("row {r}: label {raw} is neither 0 nor 1"),
            ));
        }
        labels.push(raw as u8);
    }
    Ok(RawParts {
        features: Matrix::from_rows(features)?,
        labels: Some(labels),
        native_groups: None,
    })
}

/// True when the first line contains any cell that does not parse as a
/// number (treated as a header row).
fn sniff_header(path: &Path) -> Result<bool> {
    let text = std::fs::read_to_string(path)?;
    let first = text
        .lines()
        .find(|l| !l.trim().is_empty())
        .ok_or_else(|| parse_err(path, "empty file"))?;
    Ok(first
        .split(',')
        .any(|cell| cell.trim().parse::<f64>().is_err()))
}

/// Self-describing cache/custom format: header row naming feature columns,
/// plus a `group` column (optional when groups are injected downstream) and
/// an optional `label` column.
pub fn parse_custom(path: &Path) -> Result<RawParts> {
    let (header, rows) = read_delimited(path, true)?;
    if header.is_empty() {
        return Err(parse_err(path, "missing header row"));
    }
    let group_col = header.iter().position(|h| h == "group");
    let label_col = header.iter().position(|h| h == "label");
    let feature_cols: Vec<usize> = (0..header.len())
        .filter(|c| Some(*c) != group_col && Some(*c) != label_col)
        .collect();
    if feature_cols.is_empty() {
        return Err(parse_err(path, "no feature columns"));
    }

    let mut features = Vec::with_capacity(rows.len());
    let mut groups_raw = group_col.map(|_| Vec::with_capacity(rows.len()));
    let mut labels = label_col.map(|_| Vec::with_capacity(rows.len()));
    for (r, row) in rows.iter().enumerate() {
        if row.len() != header.len() {
            return Err(parse_err(path, format!("row {r}: wrong column count")));
        }
        let mut feat = Vec::with_capacity(feature_cols.len());
        for &c in &feature_cols {
            feat.push(parse_f64(path, r, c, &row[c])?);
        }
        features.push(feat);
        if let (Some(c), Some(gs)) = (group_col, groups_raw.as_mut()) {
            let g = row[c].parse::<u32>().map_err(|_| {
                parse_err(path, format!("row {r}: group '{}' is not a u32", row[c]))
            })?;
            gs.push(g);
        }
        if let (Some(c), Some(ls)) = (label_col, labels.as_mut()) {
            let raw = parse_f64(path, r, c, &row[c])?;
            if raw != 0.0 && raw != 1.0 {
                return Err(parse_err(path, format!("row {r}: label {raw} not 0/1")));
            }
            ls.push(raw as u8);
        }
    }

    // Remap arbitrary group codes to contiguous ids in sorted order.
    let native_groups = groups_raw.map(|raw| {
        let mut distinct = raw.clone();
        distinct.sort_unstable();
        distinct.dedup();
        raw.iter()
            .map(|g| distinct.binary_search(g).expect("code collected") as u32)
            .collect()
    });
    Ok(RawParts {
        features: Matrix::from_rows(features)?,
        labels,
        native_groups,
    })
}
