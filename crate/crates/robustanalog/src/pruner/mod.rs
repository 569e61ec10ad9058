//! Task-space pruning: cluster the full corner set in (standardized) metric
//! space and keep only the lowest-reward corner of each cluster plus the
//! nominal corner as the training task set.
//!
//! Clustering runs on raw metric vectors rather than scalar rewards: two
//! corners can share a bad reward while failing for unrelated reasons, and
//! the metric space keeps them apart.

pub mod kmeans;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};
pub use kmeans::{choose_k, kmeans, silhouette, KmeansResult, MIN_SILHOUETTE};

/// Per-corner measurements of one candidate sizing on the full corner set.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PerformanceMatrix {
    pub metric_names: Vec<String>,
    /// `metrics[corner][metric]`, all finite.
    pub metrics: Vec<Vec<f64>>,
    /// Raw reward r per corner (sum of violated deficits, <= 0).
    pub raw_rewards: Vec<f64>,
    /// Banded reward R per corner (0.2 on pass).
    pub shaped_rewards: Vec<f64>,
}

impl PerformanceMatrix {
    pub fn new(
        metric_names: Vec<String>,
        metrics: Vec<Vec<f64>>,
        raw_rewards: Vec<f64>,
        shaped_rewards: Vec<f64>,
    ) -> Result<Self> {
        if metrics.is_empty() {
            return Err(Error::config("performance matrix has no corners"));
        }
        if metrics.len() != raw_rewards.len() || metrics.len() != shaped_rewards.len() {
            return Err(Error::DimensionMismatch {
                context: "performance matrix rewards",
                expected: metrics.len(),
                got: raw_rewards.len().min(shaped_rewards.len()),
            });
        }
        for (i, row) in metrics.iter().enumerate() {
            if row.len() != metric_names.len() {
                return Err(Error::DimensionMismatch {
                    context: "performance matrix row",
                    expected: metric_names.len(),
                    got: row.len(),
                });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::non_finite(format!("performance matrix corner {i}")));
            }
        }
        if raw_rewards.iter().chain(shaped_rewards.iter()).any(|v| !v.is_finite()) {
            return Err(Error::non_finite("performance matrix rewards"));
        }
        Ok(PerformanceMatrix {
            metric_names,
            metrics,
            raw_rewards,
            shaped_rewards,
        })
    }

    pub fn corner_count(&self) -> usize {
        self.metrics.len()
    }
}

/// Per-column z-score with population standard deviation; zero-variance
/// columns map to all-zeros.
pub fn standardize_metrics(metrics: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let rows = metrics.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = metrics[0].len();
    let mut out = vec![vec![0.0; cols]; rows];
    for c in 0..cols {
        let mean = metrics.iter().map(|r| r[c]).sum::<f64>() / rows as f64;
        let var = metrics.iter().map(|r| (r[c] - mean).powi(2)).sum::<f64>() / rows as f64;
        let std = var.sqrt();
        if std > 0.0 {
            for r in 0..rows {
                out[r][c] = (metrics[r][c] - mean) / std;
            }
        }
    }
    out
}

/// The ordered training task set: the nominal corner first, then the selected
/// cluster representatives in ascending corner order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingTaskSet {
    corners: Vec<usize>,
}

impl TrainingTaskSet {
    pub fn new(nominal_index: usize, mut representatives: Vec<usize>) -> Self {
        representatives.retain(|&c| c != nominal_index);
        representatives.sort_unstable();
        representatives.dedup();
        let mut corners = Vec::with_capacity(representatives.len() + 1);
        corners.push(nominal_index);
        corners.extend(representatives);
        TrainingTaskSet { corners }
    }

    pub fn corners(&self) -> &[usize] {
        &self.corners
    }

    pub fn len(&self) -> usize {
        self.corners.len()
    }

    pub fn is_empty(&self) -> bool {
        false // always holds the nominal corner
    }

    pub fn contains(&self, corner: usize) -> bool {
        self.corners.contains(&corner)
    }
}

/// Clustering diagnostics for reporting and the optional pruning dump.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PruneReport {
    pub k: usize,
    /// Mean silhouette of the chosen clustering (absent when k = 1).
    pub silhouette: Option<f64>,
    pub labels: Vec<usize>,
    pub selected: Vec<usize>,
}

/// Select training tasks from full-set performance: standardize metrics,
/// choose k by silhouette, cluster, take each cluster's lowest-raw-reward
/// corner (ties to the lowest index), and prepend the nominal corner.
pub fn select_training_tasks(
    performance: &PerformanceMatrix,
    nominal_index: usize,
    seed: u64,
) -> Result<(TrainingTaskSet, PruneReport)> {
    let n = performance.corner_count();
    if nominal_index >= n {
        return Err(Error::InvalidTaskId {
            task_id: nominal_index,
            task_count: n,
        });
    }
    if n == 1 {
        let set = TrainingTaskSet::new(nominal_index, Vec::new());
        let report = PruneReport {
            k: 1,
            silhouette: None,
            labels: vec![0],
            selected: set.corners().to_vec(),
        };
        return Ok((set, report));
    }

    let standardized = standardize_metrics(&performance.metrics);
    let k = choose_k(&standardized, seed)?;
    let result = kmeans(&standardized, k, seed)?;
    let score = (k > 1).then(|| silhouette(&standardized, &result.labels, k));

    let mut representatives = Vec::with_capacity(k);
    for cluster in 0..k {
        let argmin = (0..n)
            .filter(|&i| result.labels[i] == cluster)
            .min_by(|&a, &b| {
                performance.raw_rewards[a]
                    .partial_cmp(&performance.raw_rewards[b])
                    .unwrap()
                    .then(a.cmp(&b))
            });
        if let Some(i) = argmin {
            representatives.push(i);
        }
    }

    let set = TrainingTaskSet::new(nominal_index, representatives);
    let report = PruneReport {
        k,
        silhouette: score,
        labels: result.labels,
        selected: set.corners().to_vec(),
    };
    Ok((set, report))
}

/// CSV dump of one pruning decision: per corner, metrics, rewards, cluster
/// label, and whether it was selected.
pub fn prune_report_csv(performance: &PerformanceMatrix, report: &PruneReport) -> String {
    let mut out = String::from("corner");
    for name in &performance.metric_names {
        out.push(',');
        out.push_str(name);
    }
    out.push_str(",raw_reward,shaped_reward,cluster,selected\n");
    for i in 0..performance.corner_count() {
        out.push_str(&format!("{i}"));
        for v in &performance.metrics[i] {
            out.push_str(&format!(",{v}"));
        }
        out.push_str(&format!(
            ",{},{},{},{}\n",
            performance.raw_rewards[i],
            performance.shaped_rewards[i],
            report.labels[i],
            report.selected.contains(&i)
        ));
    }
    out
}
