//! Dense `|V| x k` embedding tables and their text format.
//!
//! Text format: optional `#` metadata lines, then a header `node_count dim`,
//! then one line per node: the node id followed by `dim` floats written with
//! 17 significant digits, so values round-trip bit-exactly.

use std::io::{BufRead, Write};

use rand_distr::{Distribution, Normal};

use crate::{seeds, Error, Result};

/// Standard deviation of the Gaussian initialisation.
pub const INIT_STD: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    rows: usize,
    dim: usize,
    values: Vec<f64>,
}

impl EmbeddingMatrix {
    pub fn zeros(rows: usize, dim: usize) -> Self {
        EmbeddingMatrix {
            rows,
            dim,
            values: vec![0.0; rows * dim],
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if dim == 0 {
            return Err(Error::InvalidArgument("embedding rows must be non-empty".into()));
        }
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::InvalidArgument("ragged embedding rows".into()));
        }
        let n = rows.len();
        let values: Vec<f64> = rows.into_iter().flatten().collect();
        if values.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("embedding rows"));
        }
        Ok(EmbeddingMatrix { rows: n, dim, values })
    }

    /// i.i.d. `N(0, 0.1^2)` entries, reproducible per seed.
    pub fn gaussian(rows: usize, dim: usize, seed: u64) -> Result<Self> {
        if rows == 0 || dim == 0 {
            return Err(Error::InvalidArgument(format!(
                "embedding shape {rows}x{dim} must be positive"
            )));
        }
        let normal = Normal::new(0.0, INIT_STD).expect("valid normal");
        let mut rng = seeds::stream_rng(seed, &[]);
        let values = (0..rows * dim).map(|_| normal.sample(&mut rng)).collect();
        Ok(EmbeddingMatrix { rows, dim, values })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.values[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn dot(&self, i: usize, j: usize) -> f64 {
        dot(self.row(i), self.row(j))
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.row(i)
            .iter()
            .zip(self.row(j))
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|x| x.is_finite())
    }

    /// FNV-1a over the little-endian bytes of every entry.
    pub fn checksum(&self) -> u64 {
        let mut bytes = Vec::with_capacity(16 + self.values.len() * 8);
        self.encode(&mut bytes);
        seeds::checksum(&bytes)
    }

    pub(crate) fn encode(&self, out: &mut Vec<u8>) {
        out.extend_from_slice(&(self.rows as u64).to_le_bytes());
        out.extend_from_slice(&(self.dim as u64).to_le_bytes());
        for x in &self.values {
            out.extend_from_slice(&x.to_le_bytes());
        }
    }

    pub fn write_text<W: Write>(&self, mut out: W, metadata: &[String]) -> std::io::Result<()> {
        for line in metadata {
            writeln!(out, "# {line}")?;
        }
        writeln!(out, "{} {}", self.rows, self.dim)?;
        let mut line = String::new();
        for i in 0..self.rows {
            line.clear();
            line.push_str(&i.to_string());
            for x in self.row(i) {
                line.push(' ');
                line.push_str(&format!("{x:.16e}"));
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    pub fn read_text<R: BufRead>(reader: R) -> Result<Self> {
        let bad = |line: usize, message: String| Error::Parse {
            path: "<embedding>".into(),
            line,
            message,
        };
        let mut shape: Option<(usize, usize)> = None;
        let mut values = Vec::new();
        let mut seen = Vec::new();
        for (index, line) in reader.lines().enumerate() {
            let lineno = index + 1;
            let line = line.map_err(|e| Error::io("<embedding>", e))?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split_whitespace();
            match shape {
                None => {
                    let n = fields.next().and_then(|f| f.parse().ok());
                    let k = fields.next().and_then(|f| f.parse().ok());
                    match (n, k, fields.next()) {
                        (Some(n), Some(k), None) if n > 0 && k > 0 => {
                            shape = Some((n, k));
                            values = vec![0.0; n * k];
                            seen = vec![false; n];
                        }
                        _ => return Err(bad(lineno, "expected header `node_count dim`".into())),
                    }
                }
                Some((n, k)) => {
                    let id: usize = fields
                        .next()
                        .and_then(|f| f.parse().ok())
                        .filter(|&id| id < n)
                        .ok_or_else(|| bad(lineno, "bad node id".into()))?;
                    if seen[id] {
                        return Err(bad(lineno, format!("node {id} listed twice")));
                    }
                    seen[id] = true;
                    let row: Vec<f64> = fields
                        .map(|f| f.parse::<f64>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|e| bad(lineno, e.to_string()))?;
                    if row.len() != k {
                        return Err(bad(lineno, format!("expected {k} values, found {}", row.len())));
                    }
                    if row.iter().any(|x| !x.is_finite()) {
                        return Err(bad(lineno, "non-finite value".into()));
                    }
                    values[id * k..(id + 1) * k].copy_from_slice(&row);
                }
            }
        }
        let (rows, dim) = shape.ok_or_else(|| bad(0, "missing header".into()))?;
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(bad(0, format!("node {missing} has no row")));
        }
        Ok(EmbeddingMatrix { rows, dim, values })
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
