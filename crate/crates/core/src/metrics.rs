//! Accuracy, macro precision/recall/F1 and per-class breakdowns.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::data::Label;
use crate::error::{CoreError, Result};

const CLASSES: usize = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub samples: usize,
    pub accuracy: f64,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub precision: [f64; 3],
    pub recall: [f64; 3],
    pub f1: [f64; 3],
    /// Recall of each class, the per-category accuracy.
    pub class_accuracy: [f64; 3],
    /// `confusion[gold][pred]`.
    pub confusion: [[usize; 3]; 3],
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

fn mean3(v: &[f64; 3]) -> f64 {
    v.iter().sum::<f64>() / CLASSES as f64
}

pub fn compute_metrics(preds: &[usize], golds: &[usize]) -> Result<MetricsReport> {
    if preds.len() != golds.len() {
        return Err(CoreError::Metrics(format!(
            "{} predictions for {} gold labels",
            preds.len(),
            golds.len()
        )));
    }
    if preds.is_empty() {
        return Err(CoreError::Metrics("no samples".into()));
    }
    let mut confusion = [[0usize; 3]; 3];
    for (&p, &g) in preds.iter().zip(golds) {
        if p >= CLASSES || g >= CLASSES {
            return Err(CoreError::Metrics(format!("label out of range: pred {p}, gold {g}")));
        }
        confusion[g][p] += 1;
    }
    Ok(from_confusion(confusion))
}

/// Metrics of a confusion matrix indexed `[gold][pred]`.
pub fn from_confusion(confusion: [[usize; 3]; 3]) -> MetricsReport {
    let samples: usize = confusion.iter().flatten().sum();
    let correct: usize = (0..CLASSES).map(|c| confusion[c][c]).sum();
    let mut precision = [0.0; 3];
    let mut recall = [0.0; 3];
    let mut f1 = [0.0; 3];
    for c in 0..CLASSES {
        let predicted: usize = (0..CLASSES).map(|g| confusion[g][c]).sum();
        let actual: usize = confusion[c].iter().sum();
        precision[c] = ratio(confusion[c][c], predicted);
        recall[c] = ratio(confusion[c][c], actual);
        let s = precision[c] + recall[c];
        f1[c] = if s == 0.0 { 0.0 } else { 2.0 * precision[c] * recall[c] / s };
    }
    MetricsReport {
        samples,
        accuracy: ratio(correct, samples),
        macro_precision: mean3(&precision),
        macro_recall: mean3(&recall),
        macro_f1: mean3(&f1),
        precision,
        recall,
        f1,
        class_accuracy: recall,
        confusion,
    }
}

impl MetricsReport {
    /// `(name, value)` for every scalar metric, in a fixed order.
    pub fn scalars(&self) -> Vec<(String, f64)> {
        let mut out = vec![
            ("accuracy".to_string(), self.accuracy),
            ("macro_precision".to_string(), self.macro_precision),
            ("macro_recall".to_string(), self.macro_recall),
            ("macro_f1".to_string(), self.macro_f1),
        ];
        for l in Label::ALL {
            out.push((format!("accuracy_{}", l.name()), self.class_accuracy[l.index()]));
        }
        out
    }

    /// Human-readable table.
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "samples          {}", self.samples);
        for (name, v) in self.scalars() {
            let _ = writeln!(s, "{name:<17}{v:.4}");
        }
        let _ = writeln!(s, "confusion (rows gold, cols predicted)");
        let _ = writeln!(s, "{:<10}{:>10}{:>10}{:>10}", "", "positive", "negative", "neutral");
        for l in Label::ALL {
            let r = self.confusion[l.index()];
            let _ = writeln!(s, "{:<10}{:>10}{:>10}{:>10}", l.name(), r[0], r[1], r[2]);
        }
        s
    }

    /// `key=value` lines; floats printed in full precision.
    pub fn to_kv(&self) -> String {
        let mut s = format!("samples={}\n", self.samples);
        for (name, v) in self.scalars() {
            let _ = writeln!(s, "{name}={v:?}");
        }
        for g in Label::ALL {
            for p in Label::ALL {
                let _ = writeln!(s, "confusion_{}_{}={}", g.name(), p.name(), self.confusion[g.index()][p.index()]);
            }
        }
        s
    }
}

/// Mean and population standard deviation of one metric across runs.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub name: String,
    pub mean: f64,
    pub std: f64,
}

impl Aggregate {
    /// `m±s` with two decimals.
    pub fn formatted(&self) -> String {
        format!("{:.2}±{:.2}", self.mean, self.std)
    }
}

pub fn aggregate_runs(reports: &[MetricsReport]) -> Result<Vec<Aggregate>> {
    if reports.len() < 2 {
        return Err(CoreError::Metrics(format!(
            "need at least 2 runs to aggregate, got {}",
            reports.len()
        )));
    }
    let per_run: Vec<Vec<(String, f64)>> = reports.iter().map(MetricsReport::scalars).collect();
    let n = reports.len() as f64;
    Ok((0..per_run[0].len())
        .map(|k| {
            let values: Vec<f64> = per_run.iter().map(|r| r[k].1).collect();
            let mean = values.iter().sum::<f64>() / n;
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            Aggregate {
                name: per_run[0][k].0.clone(),
                mean,
                std: var.sqrt(),
            }
        })
        .collect())
}

/// One `name m±s` line per metric.
pub fn format_aggregate(rows: &[Aggregate]) -> String {
    rows.iter().map(|a| format!("{} {}\n", a.name, a.formatted())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect() {
        let r = compute_metrics(&[0, 1, 2, 1], &[0, 1, 2, 1]).unwrap();
        for v in [r.accuracy, r.macro_precision, r.macro_recall, r.macro_f1] {
            assert_eq!(v, 1.0);
        }
    }

    #[test]
    fn errors() {
        assert!(compute_metrics(&[], &[]).is_err());
        assert!(compute_metrics(&[0], &[0, 1]).is_err());
        assert!(aggregate_runs(&[from_confusion([[1, 0, 0], [0; 3], [0; 3]])]).is_err());
    }

    #[test]
    fn tables_mention_every_metric() {
        let r = from_confusion([[5, 0, 0], [0, 3, 2], [0, 1, 4]]);
        assert!(r.to_table().contains("accuracy_negative"));
        assert!(r.to_kv().contains("accuracy=0.8\n"));
        assert!(r.to_kv().contains("confusion_negative_neutral=2\n"));
    }
}
