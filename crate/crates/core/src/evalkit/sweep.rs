use serde::{Deserialize, Serialize};

use super::kfold::{kfold_link_prediction, KFoldConfig};
use super::metrics::{mean, std_dev, MetricsReport};
use crate::sgraph::inject_sparsity;
use crate::{seeds, Result, SignedGraph};

pub const DEFAULT_FRACTIONS: [f64; 4] = [0.2, 0.4, 0.6, 0.8];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    /// Fraction of edges removed.
    pub fraction: f64,
    pub remaining_edges: Vec<usize>,
    pub averaged_micro_f1: Vec<f64>,
    pub mean_averaged_micro_f1: f64,
    pub std_averaged_micro_f1: f64,
    pub mean_standard_micro_f1: f64,
    pub reports: Vec<MetricsReport>,
}

/// For each removal fraction, evaluates `repeats` independently thinned
/// copies of `g` with the full train-and-predict pipeline.
pub fn sparsity_sweep(
    g: &SignedGraph,
    fractions: &[f64],
    repeats: usize,
    cfg: &KFoldConfig,
    seed: u64,
) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(fractions.len());
    for (fi, &fraction) in fractions.iter().enumerate() {
        let mut reports = Vec::with_capacity(repeats);
        let mut remaining = Vec::with_capacity(repeats);
        for r in 0..repeats {
            let sub = seeds::sub_seed(seed, &[seeds::streams::SPARSITY, fi as u64, r as u64]);
            let sparse = inject_sparsity(g, fraction, sub)?;
            remaining.push(sparse.edge_count());
            let report = kfold_link_prediction(&sparse, cfg)?;
            log::info!("sparsity {fraction}: repeat {r} averaged_micro_f1={:.4}", report.mean_averaged_micro_f1);
            reports.push(report);
        }
        let f1: Vec<f64> = reports.iter().map(|r| r.mean_averaged_micro_f1).collect();
        rows.push(SweepRow {
            fraction,
            remaining_edges: remaining,
            mean_averaged_micro_f1: mean(f1.iter().copied()),
            std_averaged_micro_f1: std_dev(&f1),
            mean_standard_micro_f1: mean(reports.iter().map(|r| r.mean_standard_micro_f1)),
            averaged_micro_f1: f1,
            reports,
        });
    }
    Ok(rows)
}

#[derive(Debug, Serialize)]
struct CsvRow {
    schema_version: u32,
    fraction: f64,
    repeats: usize,
    mean_averaged_micro_f1: f64,
    std_averaged_micro_f1: f64,
    mean_standard_micro_f1: f64,
    mean_remaining_edges: f64,
}

pub fn write_sweep_csv<W: std::io::Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let err = |e: csv::Error| crate::Error::Serialize(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(CsvRow {
            schema_version: super::metrics::SCHEMA_VERSION,
            fraction: r.fraction,
            repeats: r.averaged_micro_f1.len(),
            mean_averaged_micro_f1: r.mean_averaged_micro_f1,
            std_averaged_micro_f1: r.std_averaged_micro_f1,
            mean_standard_micro_f1: r.mean_standard_micro_f1,
            mean_remaining_edges: mean(r.remaining_edges.iter().map(|&n| n as f64)),
        })
        .map_err(err)?;
    }
    w.flush().map_err(|e| crate::Error::Serialize(e.to_string()))
}
