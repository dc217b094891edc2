//! Plain-text file formats.
//!
//! Vector: one decimal literal per line.
//! Matrix: a `rows cols` header line, then one line per row of
//! space-separated decimal literals.
//! DAG: an `m n` header line (m vertices, n edges), then n lines
//! `tail head` with 1-based vertex labels; edge order defines the flow
//! coordinates.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use oraclebench_core::combinatorial::Dag;
use oraclebench_core::{Matrix, Point};

fn parse_value(token: &str, path: &Path, line: usize) -> Result<f64> {
    let value: f64 = token
        .parse()
        .with_context(|| format!("{}:{line}: invalid decimal literal {token:?}", path.display()))?;
    if !value.is_finite() {
        bail!("{}:{line}: non-finite value {token:?}", path.display());
    }
    Ok(value)
}

pub fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading vector file {}", path.display()))?;
    let mut out = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let token = line.trim();
        if token.is_empty() {
            continue;
        }
        out.push(parse_value(token, path, idx + 1)?);
    }
    if out.is_empty() {
        bail!("{}: empty vector file", path.display());
    }
    Ok(out)
}

pub fn write_vector(path: &Path, values: &[f64]) -> Result<()> {
    let mut text = String::new();
    for v in values {
        text.push_str(&format!("{v}\n"));
    }
    fs::write(path, text).with_context(|| format!("writing vector file {}", path.display()))
}

pub fn read_matrix(path: &Path) -> Result<Matrix> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading matrix file {}", path.display()))?;
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (header_idx, header) = lines
        .next()
        .with_context(|| format!("{}: empty matrix file", path.display()))?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    if dims.len() != 2 {
        bail!(
            "{}:{}: matrix header must be `rows cols`",
            path.display(),
            header_idx + 1
        );
    }
    let rows: usize = dims[0]
        .parse()
        .with_context(|| format!("{}:{}: invalid row count", path.display(), header_idx + 1))?;
    let cols: usize = dims[1]
        .parse()
        .with_context(|| format!("{}:{}: invalid column count", path.display(), header_idx + 1))?;
    let mut data = Vec::with_capacity(rows * cols);
    let mut seen_rows = 0usize;
    for (idx, line) in lines {
        let mut count = 0usize;
        for token in line.split_whitespace() {
            data.push(parse_value(token, path, idx + 1)?);
            count += 1;
        }
        if count != cols {
            bail!(
                "{}:{}: expected {cols} entries in row, found {count}",
                path.display(),
                idx + 1
            );
        }
        seen_rows += 1;
    }
    if seen_rows != rows {
        bail!(
            "{}: expected {rows} matrix rows, found {seen_rows}",
            path.display()
        );
    }
    Matrix::new(rows, cols, data).map_err(Into::into)
}

pub fn write_matrix(path: &Path, matrix: &Matrix) -> Result<()> {
    let mut text = format!("{} {}\n", matrix.rows(), matrix.cols());
    for i in 0..matrix.rows() {
        let row: Vec<String> = matrix.row(i).iter().map(|v| format!("{v}")).collect();
        text.push_str(&row.join(" "));
        text.push('\n');
    }
    fs::write(path, text).with_context(|| format!("writing matrix file {}", path.display()))
}

/// Reads and topologically validates a DAG file.
pub fn read_dag(path: &Path) -> Result<Dag> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading DAG file {}", path.display()))?;
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (header_idx, header) = lines
        .next()
        .with_context(|| format!("{}: empty DAG file", path.display()))?;
    let dims: Vec<&str> = header.split_whitespace().collect();
    if dims.len() != 2 {
        bail!(
            "{}:{}: DAG header must be `vertices edges`",
            path.display(),
            header_idx + 1
        );
    }
    let vertices: usize = dims[0]
        .parse()
        .with_context(|| format!("{}:{}: invalid vertex count", path.display(), header_idx + 1))?;
    let edge_count: usize = dims[1]
        .parse()
        .with_context(|| format!("{}:{}: invalid edge count", path.display(), header_idx + 1))?;
    let mut edges = Vec::with_capacity(edge_count);
    for (idx, line) in lines {
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 2 {
            bail!("{}:{}: edge line must be `tail head`", path.display(), idx + 1);
        }
        let tail: usize = parts[0]
            .parse()
            .with_context(|| format!("{}:{}: invalid tail", path.display(), idx + 1))?;
        let head: usize = parts[1]
            .parse()
            .with_context(|| format!("{}:{}: invalid head", path.display(), idx + 1))?;
        if tail == 0 || head == 0 || tail > vertices || head > vertices {
            bail!(
                "{}:{}: vertex labels are 1-based and at most {vertices}",
                path.display(),
                idx + 1
            );
        }
        edges.push((tail - 1, head - 1));
    }
    if edges.len() != edge_count {
        bail!(
            "{}: expected {edge_count} edges, found {}",
            path.display(),
            edges.len()
        );
    }
    Dag::topo_sort(vertices, &edges)
        .with_context(|| format!("{}: invalid DAG", path.display()))
}

pub fn write_point(path: &Path, point: &Point) -> Result<()> {
    match point {
        Point::Vector(v) => write_vector(path, v),
        Point::Matrix(m) => write_matrix(path, m),
    }
}
