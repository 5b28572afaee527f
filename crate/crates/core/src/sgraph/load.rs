use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Edge, Sign, SignedGraph};
use crate::{Error, Result};

/// How the third column becomes a sign.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SignColumn {
    /// Positive values are Positive, negative values Negative; zero is rejected.
    ExplicitSign,
    /// Ratings at or above the threshold are Positive, below are Negative.
    RatingThreshold(f64),
}

impl SignColumn {
    fn classify(self, value: f64) -> Option<Sign> {
        match self {
            SignColumn::ExplicitSign if value > 0.0 => Some(Sign::Positive),
            SignColumn::ExplicitSign if value < 0.0 => Some(Sign::Negative),
            SignColumn::ExplicitSign => None,
            SignColumn::RatingThreshold(t) if value >= t => Some(Sign::Positive),
            SignColumn::RatingThreshold(_) => Some(Sign::Negative),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeListSpec {
    pub path: PathBuf,
    /// Column separator; `None` splits on runs of whitespace.
    pub delimiter: Option<char>,
    pub comment_prefix: char,
    pub sign_column: SignColumn,
}

impl EdgeListSpec {
    /// Canonical `u v sign` file with `#` comments.
    pub fn canonical(path: impl Into<PathBuf>) -> Self {
        EdgeListSpec {
            path: path.into(),
            delimiter: None,
            comment_prefix: '#',
            sign_column: SignColumn::ExplicitSign,
        }
    }

    /// Comma-separated `source,target,rating[,...]` ratings file.
    pub fn ratings_csv(path: impl Into<PathBuf>, threshold: f64) -> Self {
        EdgeListSpec {
            path: path.into(),
            delimiter: Some(','),
            comment_prefix: '#',
            sign_column: SignColumn::RatingThreshold(threshold),
        }
    }
}

/// Cleaning statistics gathered while loading.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadReport {
    pub data_lines: usize,
    pub comment_lines: usize,
    pub self_loops: usize,
    /// Lines repeating an unordered pair already seen (either direction).
    pub duplicate_lines: usize,
    /// Pairs seen with both signs where one sign had a strict majority.
    pub majority_resolved: usize,
    /// Pairs dropped because the sign vote was tied.
    pub conflicts: usize,
    /// Raw ids whose dense id differs from the raw value.
    pub remapped_ids: usize,
    pub nodes: usize,
    pub positive_edges: usize,
    pub negative_edges: usize,
}

impl LoadReport {
    pub fn log(&self, path: &Path) {
        log::info!(
            "loaded {}: nodes={} positive={} negative={} data_lines={} self_loops={} duplicates={} majority_resolved={} conflicts={} remapped_ids={}",
            path.display(),
            self.nodes,
            self.positive_edges,
            self.negative_edges,
            self.data_lines,
            self.self_loops,
            self.duplicate_lines,
            self.majority_resolved,
            self.conflicts,
            self.remapped_ids
        );
    }
}

pub fn load_edge_list(spec: &EdgeListSpec) -> Result<(SignedGraph, LoadReport)> {
    let file = File::open(&spec.path).map_err(|e| Error::io(&spec.path, e))?;
    let (g, report) = parse_edge_list(BufReader::new(file), spec)?;
    report.log(&spec.path);
    Ok((g, report))
}

#[derive(Default)]
struct PairVotes {
    positive: usize,
    negative: usize,
}

/// Parses an edge list from any reader; `spec.path` is only used in messages.
///
/// Raw ids are remapped to dense ids in order of first appearance. A
/// `# nodes N` directive (as written by [`SignedGraph::write_edge_list`])
/// switches to literal ids in `0..N`, which keeps isolated nodes and makes
/// the canonical format round-trip exactly.
pub fn parse_edge_list<R: BufRead>(reader: R, spec: &EdgeListSpec) -> Result<(SignedGraph, LoadReport)> {
    let mut report = LoadReport::default();
    let mut literal_nodes: Option<usize> = None;
    let mut ids: HashMap<u64, usize> = HashMap::new();
    let mut order: Vec<(usize, usize)> = Vec::new();
    let mut votes: HashMap<(usize, usize), PairVotes> = HashMap::new();

    let parse_err = |line: usize, message: String| Error::Parse {
        path: spec.path.clone(),
        line,
        message,
    };

    for (index, line) in reader.lines().enumerate() {
        let lineno = index + 1;
        let line = line.map_err(|e| Error::io(&spec.path, e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix(spec.comment_prefix) {
            report.comment_lines += 1;
            let mut words = rest.split_whitespace();
            if words.next() == Some("nodes") && report.data_lines == 0 {
                let n = words
                    .next()
                    .and_then(|w| w.parse::<usize>().ok())
                    .ok_or_else(|| parse_err(lineno, "malformed `nodes` directive".into()))?;
                literal_nodes = Some(n);
            }
            continue;
        }
        report.data_lines += 1;

        let fields: Vec<&str> = match spec.delimiter {
            None => trimmed.split_whitespace().collect(),
            Some(d) => trimmed.split(d).map(str::trim).collect(),
        };
        if fields.len() < 3 {
            return Err(parse_err(lineno, format!("expected at least 3 columns, found {}", fields.len())));
        }
        let raw_u: u64 = fields[0]
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad node id `{}`", fields[0])))?;
        let raw_v: u64 = fields[1]
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad node id `{}`", fields[1])))?;
        let value: f64 = fields[2]
            .parse()
            .map_err(|_| parse_err(lineno, format!("bad sign/rating `{}`", fields[2])))?;
        if !value.is_finite() {
            return Err(parse_err(lineno, format!("non-finite sign/rating `{}`", fields[2])));
        }
        let sign = spec
            .sign_column
            .classify(value)
            .ok_or_else(|| parse_err(lineno, "sign value 0 is neither positive nor negative".into()))?;

        let mut resolve = |raw: u64| -> Result<usize> {
            match literal_nodes {
                Some(n) => {
                    if (raw as u128) < n as u128 {
                        Ok(raw as usize)
                    } else {
                        Err(parse_err(lineno, format!("node {raw} out of declared range {n}")))
                    }
                }
                None => {
                    let next = ids.len();
                    Ok(*ids.entry(raw).or_insert(next))
                }
            }
        };
        let u = resolve(raw_u)?;
        let v = resolve(raw_v)?;
        if u == v {
            report.self_loops += 1;
            continue;
        }
        let key = if u < v { (u, v) } else { (v, u) };
        let entry = votes.entry(key).or_insert_with(|| {
            order.push(key);
            PairVotes::default()
        });
        if entry.positive + entry.negative > 0 {
            report.duplicate_lines += 1;
        }
        match sign {
            Sign::Positive => entry.positive += 1,
            Sign::Negative => entry.negative += 1,
        }
    }

    let node_count = literal_nodes.unwrap_or(ids.len());
    if node_count == 0 {
        return Err(Error::EmptyGraph(format!(
            "{} contains no nodes",
            spec.path.display()
        )));
    }
    report.remapped_ids = ids.iter().filter(|(&raw, &id)| raw != id as u64).count();

    let mut edges = Vec::with_capacity(order.len());
    for key in order {
        let v = &votes[&key];
        let sign = match v.positive.cmp(&v.negative) {
            std::cmp::Ordering::Greater => Sign::Positive,
            std::cmp::Ordering::Less => Sign::Negative,
            std::cmp::Ordering::Equal => {
                report.conflicts += 1;
                continue;
            }
        };
        if v.positive > 0 && v.negative > 0 {
            report.majority_resolved += 1;
        }
        edges.push(Edge::new(key.0, key.1, sign));
    }
    let g = SignedGraph::from_edges(node_count, edges)?;
    report.nodes = g.node_count();
    report.positive_edges = g.positive_edge_count();
    report.negative_edges = g.negative_edge_count();
    Ok((g, report))
}
