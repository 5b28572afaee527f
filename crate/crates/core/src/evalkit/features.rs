use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{EmbeddingMatrix, Error};

/// How two node embeddings combine into one edge vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeFeatureMode {
    L1,
    L2,
    Hadamard,
    #[serde(rename = "avg")]
    Average,
    Concat,
}

impl EdgeFeatureMode {
    pub const ALL: [EdgeFeatureMode; 5] = [
        EdgeFeatureMode::L1,
        EdgeFeatureMode::L2,
        EdgeFeatureMode::Hadamard,
        EdgeFeatureMode::Average,
        EdgeFeatureMode::Concat,
    ];

    pub fn output_dim(self, k: usize) -> usize {
        match self {
            EdgeFeatureMode::Concat => 2 * k,
            _ => k,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EdgeFeatureMode::L1 => "l1",
            EdgeFeatureMode::L2 => "l2",
            EdgeFeatureMode::Hadamard => "hadamard",
            EdgeFeatureMode::Average => "avg",
            EdgeFeatureMode::Concat => "concat",
        }
    }
}

impl fmt::Display for EdgeFeatureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EdgeFeatureMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s.to_ascii_lowercase().as_str() {
            "l1" => Ok(EdgeFeatureMode::L1),
            "l2" => Ok(EdgeFeatureMode::L2),
            "hadamard" => Ok(EdgeFeatureMode::Hadamard),
            "avg" | "average" => Ok(EdgeFeatureMode::Average),
            "concat" => Ok(EdgeFeatureMode::Concat),
            other => Err(Error::InvalidArgument(format!("unknown feature mode `{other}`"))),
        }
    }
}

/// Edge vector for `(u, v)`. `Concat` puts the lower node id first so the
/// result does not depend on argument order.
pub fn edge_features(emb: &EmbeddingMatrix, u: usize, v: usize, mode: EdgeFeatureMode) -> Vec<f64> {
    let (x, y) = (emb.row(u), emb.row(v));
    let zip = x.iter().zip(y);
    match mode {
        EdgeFeatureMode::L1 => zip.map(|(a, b)| (a - b).abs()).collect(),
        EdgeFeatureMode::L2 => zip.map(|(a, b)| (a - b) * (a - b)).collect(),
        EdgeFeatureMode::Hadamard => zip.map(|(a, b)| a * b).collect(),
        EdgeFeatureMode::Average => zip.map(|(a, b)| (a + b) / 2.0).collect(),
        EdgeFeatureMode::Concat => {
            let (first, second) = if u <= v { (x, y) } else { (y, x) };
            first.iter().chain(second).copied().collect()
        }
    }
}
