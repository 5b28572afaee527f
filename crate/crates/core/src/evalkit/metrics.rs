use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const SCHEMA_VERSION: u32 = 1;

/// Confusion counts with Positive as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub true_positive: usize,
    pub false_positive: usize,
    pub true_negative: usize,
    pub false_negative: usize,
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl Confusion {
    pub fn from_predictions(predicted: &[bool], actual: &[bool]) -> Self {
        let mut c = Confusion::default();
        for (&p, &a) in predicted.iter().zip(actual) {
            match (p, a) {
                (true, true) => c.true_positive += 1,
                (true, false) => c.false_positive += 1,
                (false, false) => c.true_negative += 1,
                (false, true) => c.false_negative += 1,
            }
        }
        c
    }

    pub fn total(&self) -> usize {
        self.true_positive + self.false_positive + self.true_negative + self.false_negative
    }

    pub fn precision_positive(&self) -> f64 {
        ratio(self.true_positive, self.true_positive + self.false_positive)
    }

    pub fn precision_negative(&self) -> f64 {
        ratio(self.true_negative, self.true_negative + self.false_negative)
    }

    pub fn recall_positive(&self) -> f64 {
        ratio(self.true_positive, self.true_positive + self.false_negative)
    }

    pub fn recall_negative(&self) -> f64 {
        ratio(self.true_negative, self.true_negative + self.false_positive)
    }

    /// Harmonic mean of the sign-averaged precision and the sign-averaged
    /// recall.
    pub fn averaged_micro_f1(&self) -> f64 {
        let p = (self.precision_positive() + self.precision_negative()) / 2.0;
        let r = (self.recall_positive() + self.recall_negative()) / 2.0;
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }

    /// Pooled micro-F1; equals accuracy for single-label binary prediction.
    pub fn standard_micro_f1(&self) -> f64 {
        ratio(self.true_positive + self.true_negative, self.total())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldMetrics {
    pub fold: usize,
    pub test_size: usize,
    pub precision_positive: f64,
    pub precision_negative: f64,
    pub recall_positive: f64,
    pub recall_negative: f64,
    pub averaged_micro_f1: f64,
    pub standard_micro_f1: f64,
    pub confusion: Confusion,
}

impl FoldMetrics {
    pub fn from_confusion(fold: usize, confusion: Confusion) -> Self {
        FoldMetrics {
            fold,
            test_size: confusion.total(),
            precision_positive: confusion.precision_positive(),
            precision_negative: confusion.precision_negative(),
            recall_positive: confusion.recall_positive(),
            recall_negative: confusion.recall_negative(),
            averaged_micro_f1: confusion.averaged_micro_f1(),
            standard_micro_f1: confusion.standard_micro_f1(),
            confusion,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub schema_version: u32,
    pub feature_mode: String,
    pub leakage: String,
    pub embedding_source: String,
    pub folds: Vec<FoldMetrics>,
    pub mean_averaged_micro_f1: f64,
    pub mean_standard_micro_f1: f64,
}

/// One CSV row per fold.
#[derive(Debug, Serialize)]
struct FoldRow<'a> {
    schema_version: u32,
    feature_mode: &'a str,
    leakage: &'a str,
    embedding_source: &'a str,
    fold: usize,
    test_size: usize,
    precision_positive: f64,
    precision_negative: f64,
    recall_positive: f64,
    recall_negative: f64,
    averaged_micro_f1: f64,
    standard_micro_f1: f64,
    true_positive: usize,
    false_positive: usize,
    true_negative: usize,
    false_negative: usize,
}

pub fn mean(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = xs.into_iter().fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// Population standard deviation.
pub fn std_dev(xs: &[f64]) -> f64 {
    let m = mean(xs.iter().copied());
    mean(xs.iter().map(|x| (x - m) * (x - m))).sqrt()
}

impl MetricsReport {
    pub fn new(feature_mode: String, leakage: String, embedding_source: String, folds: Vec<FoldMetrics>) -> Self {
        MetricsReport {
            schema_version: SCHEMA_VERSION,
            mean_averaged_micro_f1: mean(folds.iter().map(|f| f.averaged_micro_f1)),
            mean_standard_micro_f1: mean(folds.iter().map(|f| f.standard_micro_f1)),
            feature_mode,
            leakage,
            embedding_source,
            folds,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serialize(e.to_string()))
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for f in &self.folds {
            w.serialize(FoldRow {
                schema_version: self.schema_version,
                feature_mode: &self.feature_mode,
                leakage: &self.leakage,
                embedding_source: &self.embedding_source,
                fold: f.fold,
                test_size: f.test_size,
                precision_positive: f.precision_positive,
                precision_negative: f.precision_negative,
                recall_positive: f.recall_positive,
                recall_negative: f.recall_negative,
                averaged_micro_f1: f.averaged_micro_f1,
                standard_micro_f1: f.standard_micro_f1,
                true_positive: f.confusion.true_positive,
                false_positive: f.confusion.false_positive,
                true_negative: f.confusion.true_negative,
                false_negative: f.confusion.false_negative,
            })
            .map_err(|e| Error::Serialize(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::Serialize(e.to_string()))
    }
}
