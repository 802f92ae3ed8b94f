//! Matrix, vector, group and split file formats.
//!
//! Two matrix formats are supported and detected by content:
//!
//! * CSV (RFC 4180), row-major, optional header row, floats written with 17
//!   significant digits;
//! * binary: 8-byte magic `MPRJMAT1`, then rows and cols as 8-byte
//!   little-endian unsigned integers, then `rows·cols` little-endian IEEE-754
//!   doubles, row-major.
//!
//! Group files hold one group per line (comma-separated indices); split
//! files are CSV with `index,role` rows; edge files are CSV with `a,b` rows.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::{DMatrix, DVector};

use crate::error::{io_err, CliError, Result};

pub const MAGIC: &[u8; 8] = b"MPRJMAT1";

/// 17 significant digits; round-trips f64 through text within 1e-15.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn format_err(path: &Path, message: impl Into<String>) -> CliError {
    CliError::Format { path: path.to_path_buf(), message: message.into() }
}

pub fn write_matrix_bin(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).map_err(io_err(path))?);
    w.write_all(MAGIC).map_err(io_err(path))?;
    w.write_all(&(m.nrows() as u64).to_le_bytes()).map_err(io_err(path))?;
    w.write_all(&(m.ncols() as u64).to_le_bytes()).map_err(io_err(path))?;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            w.write_all(&m[(i, j)].to_le_bytes()).map_err(io_err(path))?;
        }
    }
    w.flush().map_err(io_err(path))
}

pub fn write_matrix_csv(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).map_err(io_err(path))?);
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| fmt_float(m[(i, j)])).collect();
        writeln!(w, "{}", row.join(",")).map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

fn read_matrix_bin(path: &Path, bytes: &[u8]) -> Result<DMatrix<f64>> {
    let header = 8 + 16;
    if bytes.len() < header {
        return Err(format_err(path, "truncated binary matrix header"));
    }
    let rows = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
    let cols = u64::from_le_bytes(bytes[16..24].try_into().unwrap()) as usize;
    let need = header + rows * cols * 8;
    if bytes.len() != need {
        return Err(format_err(
            path,
            format!("binary matrix holds {} bytes, expected {need}", bytes.len()),
        ));
    }
    let mut m = DMatrix::zeros(rows, cols);
    let mut offset = header;
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = f64::from_le_bytes(bytes[offset..offset + 8].try_into().unwrap());
            offset += 8;
        }
    }
    Ok(m)
}

fn read_matrix_csv(path: &Path, bytes: &[u8]) -> Result<DMatrix<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(bytes);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, record) in reader.records().enumerate() {
        let record = record.map_err(|e| format_err(path, e.to_string()))?;
        let mut row = Vec::with_capacity(record.len());
        let mut ok = true;
        for field in record.iter() {
            match field.trim().parse::<f64>() {
                Ok(v) => row.push(v),
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if !ok {
            // An optional header row is tolerated as the first record only.
            if lineno == 0 {
                continue;
            }
            return Err(format_err(path, format!("non-numeric field on line {}", lineno + 1)));
        }
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(format_err(
                    path,
                    format!("ragged row on line {}: {} fields vs {}", lineno + 1, row.len(), first.len()),
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(format_err(path, "empty matrix"));
    }
    let (r, c) = (rows.len(), rows[0].len());
    Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

/// Reads either format, detected by the magic bytes.
pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>> {
    let mut bytes = Vec::new();
    File::open(path)
        .map_err(io_err(path))?
        .read_to_end(&mut bytes)
        .map_err(io_err(path))?;
    if bytes.len() >= 8 && &bytes[..8] == MAGIC {
        read_matrix_bin(path, &bytes)
    } else {
        read_matrix_csv(path, &bytes)
    }
}

/// Vectors are stored as single-column matrices.
pub fn read_vector(path: &Path) -> Result<DVector<f64>> {
    let m = read_matrix(path)?;
    if m.ncols() == 1 {
        Ok(DVector::from_iterator(m.nrows(), m.iter().copied()))
    } else if m.nrows() == 1 {
        Ok(DVector::from_iterator(m.ncols(), m.iter().copied()))
    } else {
        Err(format_err(path, format!("expected a vector, found {}x{}", m.nrows(), m.ncols())))
    }
}

pub fn write_vector_bin(path: &Path, v: &DVector<f64>) -> Result<()> {
    write_matrix_bin(path, &DMatrix::from_column_slice(v.len(), 1, v.as_slice()))
}

/// One group per line, comma- or whitespace-separated indices.
pub fn read_groups(path: &Path, dim: usize) -> Result<matproj::GroupStructure> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut groups = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut group = Vec::new();
        for token in trimmed.split(|c: char| c == ',' || c.is_whitespace()) {
            if token.is_empty() {
                continue;
            }
            let idx: usize = token
                .parse()
                .map_err(|_| format_err(path, format!("bad index {token:?} on line {}", lineno + 1)))?;
            group.push(idx);
        }
        if !group.is_empty() {
            groups.push(group);
        }
    }
    matproj::GroupStructure::new(dim, groups).map_err(CliError::Solver)
}

pub fn write_groups(path: &Path, groups: &matproj::GroupStructure) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).map_err(io_err(path))?);
    for g in 0..groups.num_groups() {
        let members: Vec<String> = groups
            .members(g)
            .map_err(CliError::Solver)?
            .iter()
            .map(usize::to_string)
            .collect();
        writeln!(w, "{}", members.join(",")).map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Splits {
    pub train: Vec<usize>,
    pub val: Vec<usize>,
    pub test: Vec<usize>,
}

pub fn write_splits(path: &Path, splits: &Splits) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).map_err(io_err(path))?);
    writeln!(w, "index,role").map_err(io_err(path))?;
    for (role, list) in [("train", &splits.train), ("val", &splits.val), ("test", &splits.test)] {
        for &i in list {
            writeln!(w, "{i},{role}").map_err(io_err(path))?;
        }
    }
    w.flush().map_err(io_err(path))
}

pub fn read_splits(path: &Path) -> Result<Splits> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut splits = Splits::default();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || (lineno == 0 && trimmed.starts_with("index")) {
            continue;
        }
        let (idx, role) = trimmed
            .split_once(',')
            .ok_or_else(|| format_err(path, format!("bad split row on line {}", lineno + 1)))?;
        let idx: usize = idx
            .trim()
            .parse()
            .map_err(|_| format_err(path, format!("bad index on line {}", lineno + 1)))?;
        match role.trim() {
            "train" => splits.train.push(idx),
            "val" => splits.val.push(idx),
            "test" => splits.test.push(idx),
            other => return Err(format_err(path, format!("unknown role {other:?}"))),
        }
    }
    Ok(splits)
}

/// Undirected simple edge list: `a,b` per line.
pub fn read_edges(path: &Path) -> Result<Vec<(usize, usize)>> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut edges = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let (a, b) = trimmed
            .split_once(',')
            .ok_or_else(|| format_err(path, format!("bad edge on line {}", lineno + 1)))?;
        let a: usize = a.trim().parse().map_err(|_| {
            format_err(path, format!("bad endpoint on line {}", lineno + 1))
        })?;
        let b: usize = b.trim().parse().map_err(|_| {
            format_err(path, format!("bad endpoint on line {}", lineno + 1))
        })?;
        edges.push((a, b));
    }
    Ok(edges)
}

/// Selected indices, one per line with a header.
pub fn write_support_csv(path: &Path, support: &[usize]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).map_err(io_err(path))?);
    writeln!(w, "index").map_err(io_err(path))?;
    for &i in support {
        writeln!(w, "{i}").map_err(io_err(path))?;
    }
    w.flush().map_err(io_err(path))
}
