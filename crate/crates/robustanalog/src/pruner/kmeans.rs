//! Lloyd's k-means with k-means++ seeding, plus silhouette scoring for
//! choosing k.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::seeding::mix_seed;
use crate::{Error, Result};

const MOVEMENT_TOL: f64 = 1e-8;
const MAX_ITERATIONS: usize = 100;

#[derive(Clone, Debug)]
pub struct KmeansResult {
    /// Cluster index per point.
    pub labels: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    /// Final sum of squared point-to-centroid distances.
    pub inertia: f64,
    /// Inertia at the end of each Lloyd iteration; non-increasing.
    pub inertia_trace: Vec<f64>,
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn check_points(points: &[Vec<f64>]) -> Result<usize> {
    let dim = points
        .first()
        .ok_or_else(|| Error::config("kmeans: no points"))?
        .len();
    if dim == 0 {
        return Err(Error::config("kmeans: zero-dimensional points"));
    }
    for (i, p) in points.iter().enumerate() {
        if p.len() != dim {
            return Err(Error::DimensionMismatch {
                context: "kmeans point",
                expected: dim,
                got: p.len(),
            });
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::non_finite(format!("kmeans point {i}")));
        }
    }
    Ok(dim)
}

/// k-means++ seeding: first centroid uniform, then D²-weighted draws.
fn seed_centroids(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut centroids = Vec::with_capacity(k);
    centroids.push(points[rng.gen_range(0..points.len())].clone());
    let mut best = vec![f64::INFINITY; points.len()];
    while centroids.len() < k {
        let newest = centroids.last().unwrap();
        for (b, p) in best.iter_mut().zip(points) {
            *b = b.min(dist2(p, newest));
        }
        let total: f64 = best.iter().sum();
        let idx = if total > 0.0 {
            let mut u = rng.gen_range(0.0..total);
            let mut chosen = points.len() - 1;
            for (i, b) in best.iter().enumerate() {
                if u < *b {
                    chosen = i;
                    break;
                }
                u -= b;
            }
            chosen
        } else {
            // All remaining points coincide with a centroid.
            rng.gen_range(0..points.len())
        };
        centroids.push(points[idx].clone());
    }
    centroids
}

/// Cluster `points` into `k` groups. Deterministic per seed; stops when the
/// largest centroid movement drops below 1e-8 or after 100 iterations. An
/// empty cluster is repaired by handing it the point farthest from its
/// centroid (taken from a cluster with at least two members).
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64) -> Result<KmeansResult> {
    check_points(points)?;
    let n = points.len();
    if k == 0 || k > n {
        return Err(Error::config(format!(
            "kmeans: k = {k} outside [1, {n}]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = seed_centroids(points, k, &mut rng);
    let mut labels = vec![0usize; n];
    let mut trace = Vec::new();

    for _ in 0..MAX_ITERATIONS {
        // Assignment; ties go to the lowest cluster index.
        for (i, p) in points.iter().enumerate() {
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for (c, centroid) in centroids.iter().enumerate() {
                let d = dist2(p, centroid);
                if d < best_d {
                    best_d = d;
                    best = c;
                }
            }
            labels[i] = best;
        }

        // Repair empty clusters before the update step.
        let mut sizes = vec![0usize; k];
        for &l in &labels {
            sizes[l] += 1;
        }
        for c in 0..k {
            if sizes[c] > 0 {
                continue;
            }
            // A donor needs >= 2 members; with duplicated points none may
            // exist, in which case the cluster stays empty (harmless: the
            // remaining clusters already cover every distinct point).
            let donor = (0..n)
                .filter(|&i| sizes[labels[i]] >= 2)
                .max_by(|&a, &b| {
                    let da = dist2(&points[a], &centroids[labels[a]]);
                    let db = dist2(&points[b], &centroids[labels[b]]);
                    da.partial_cmp(&db).unwrap()
                });
            if let Some(donor) = donor {
                sizes[labels[donor]] -= 1;
                labels[donor] = c;
                sizes[c] += 1;
                centroids[c] = points[donor].clone();
            }
        }

        // Update step: centroids move to their members' mean; an empty
        // cluster keeps its centroid.
        let mut sums = vec![vec![0.0; points[0].len()]; k];
        for (p, &l) in points.iter().zip(&labels) {
            for (s, v) in sums[l].iter_mut().zip(p) {
                *s += v;
            }
        }
        let mut movement: f64 = 0.0;
        for c in 0..k {
            if sizes[c] == 0 {
                continue;
            }
            for s in sums[c].iter_mut() {
                *s /= sizes[c] as f64;
            }
            movement = movement.max(dist2(&sums[c], &centroids[c]).sqrt());
            centroids[c] = std::mem::take(&mut sums[c]);
        }

        let inertia: f64 = points
            .iter()
            .zip(&labels)
            .map(|(p, &l)| dist2(p, &centroids[l]))
            .sum();
        if let Some(&prev) = trace.last() {
            assert!(
                inertia <= prev + 1e-9 * f64::max(prev, 1.0),
                "inertia rose from {prev} to {inertia}"
            );
        }
        trace.push(inertia);

        if movement < MOVEMENT_TOL {
            break;
        }
    }

    let inertia = *trace.last().unwrap();
    Ok(KmeansResult {
        labels,
        centroids,
        inertia,
        inertia_trace: trace,
    })
}

/// Mean silhouette score over all points. Singleton clusters score 0 for
/// their member; identical points score 0.
pub fn silhouette(points: &[Vec<f64>], labels: &[usize], k: usize) -> f64 {
    let n = points.len();
    let mut sizes = vec![0usize; k];
    for &l in labels {
        sizes[l] += 1;
    }
    let mut total = 0.0;
    for i in 0..n {
        if sizes[labels[i]] <= 1 {
            continue; // s(i) = 0
        }
        // Mean distance from i to each cluster.
        let mut sum = vec![0.0; k];
        for j in 0..n {
            if i != j {
                sum[labels[j]] += dist2(&points[i], &points[j]).sqrt();
            }
        }
        let a = sum[labels[i]] / (sizes[labels[i]] - 1) as f64;
        let b = (0..k)
            .filter(|&c| c != labels[i] && sizes[c] > 0)
            .map(|c| sum[c] / sizes[c] as f64)
            .fold(f64::INFINITY, f64::min);
        let denom = a.max(b);
        if denom > 0.0 && b.is_finite() {
            total += (b - a) / denom;
        }
    }
    total / n as f64
}

/// Silhouette threshold below which the points are treated as one cluster.
pub const MIN_SILHOUETTE: f64 = 0.25;

/// Pick k by mean silhouette over k in {2, ..., min(4, n-1)}; ties prefer
/// the smaller k, and a best score under [`MIN_SILHOUETTE`] collapses to
/// k = 1. Needs at least 2 points.
pub fn choose_k(points: &[Vec<f64>], seed: u64) -> Result<usize> {
    check_points(points)?;
    let n = points.len();
    if n < 2 {
        return Err(Error::config("choose_k needs at least 2 points"));
    }
    let mut best_k = 1usize;
    let mut best_score = f64::NEG_INFINITY;
    for k in 2..=usize::min(4, n - 1) {
        let result = kmeans(points, k, mix_seed(seed, k as u64))?;
        let score = silhouette(points, &result.labels, k);
        if score > best_score {
            best_score = score;
            best_k = k;
        }
    }
    if best_score < MIN_SILHOUETTE {
        return Ok(1);
    }
    Ok(best_k)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn four_points() -> Vec<Vec<f64>> {
        vec![
            vec![0.0, 0.0],
            vec![0.0, 1.0],
            vec![10.0, 10.0],
            vec![10.0, 11.0],
        ]
    }

    /// Brute-force minimal-inertia 2-partition of a small point set.
    fn best_two_partition(points: &[Vec<f64>]) -> Vec<usize> {
        let n = points.len();
        let mut best = (f64::INFINITY, vec![0; n]);
        for mask in 1..(1u32 << n) - 1 {
            let labels: Vec<usize> = (0..n).map(|i| ((mask >> i) & 1) as usize).collect();
            let mut inertia = 0.0;
            for c in 0..2 {
                let members: Vec<&Vec<f64>> =
                    points.iter().zip(&labels).filter(|(_, &l)| l == c).map(|(p, _)| p).collect();
                if members.is_empty() {
                    inertia = f64::INFINITY;
                    break;
                }
                let dim = points[0].len();
                let mut mean = vec![0.0; dim];
                for p in &members {
                    for (m, v) in mean.iter_mut().zip(p.iter()) {
                        *m += v;
                    }
                }
                for m in mean.iter_mut() {
                    *m /= members.len() as f64;
                }
                for p in &members {
                    inertia += dist2(p, &mean);
                }
            }
            if inertia < best.0 {
                best = (inertia, labels);
            }
        }
        best.1
    }

    fn same_partition(a: &[usize], b: &[usize]) -> bool {
        (0..a.len()).all(|i| (0..a.len()).all(|j| (a[i] == a[j]) == (b[i] == b[j])))
    }

    #[test]
    fn recovers_the_planted_two_partition() {
        let points = four_points();
        let oracle = best_two_partition(&points);
        for seed in 0..5 {
            let r = kmeans(&points, 2, seed).unwrap();
            assert!(same_partition(&r.labels, &oracle), "seed {seed}: {:?}", r.labels);
        }
    }

    #[test]
    fn k_equals_n_gives_zero_inertia() {
        let r = kmeans(&four_points(), 4, 3).unwrap();
        assert_eq!(r.inertia, 0.0);
        let mut labels = r.labels.clone();
        labels.sort_unstable();
        assert_eq!(labels, vec![0, 1, 2, 3]);
    }

    #[test]
    fn k_one_centroid_is_the_mean() {
        let r = kmeans(&four_points(), 1, 0).unwrap();
        assert_eq!(r.centroids.len(), 1);
        assert!((r.centroids[0][0] - 5.0).abs() < 1e-12);
        assert!((r.centroids[0][1] - 5.5).abs() < 1e-12);
    }

    #[test]
    fn seeded_blobs_are_recovered_with_monotone_inertia() {
        use rand::{Rng, SeedableRng};
        use rand_chacha::ChaCha8Rng;
        for instance in 0..50u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + instance);
            let dim = rng.gen_range(2..=5);
            let spread = 0.5;
            let separation = 20.0;
            let mut points = Vec::new();
            let mut planted = Vec::new();
            for blob in 0..2 {
                let center: Vec<f64> =
                    (0..dim).map(|_| blob as f64 * separation + rng.gen_range(-1.0..1.0)).collect();
                for _ in 0..rng.gen_range(3..=10) {
                    points.push(
                        center
                            .iter()
                            .map(|c| c + rng.gen_range(-spread..spread))
                            .collect(),
                    );
                    planted.push(blob);
                }
            }
            let r = kmeans(&points, 2, instance).unwrap();
            assert!(
                same_partition(&r.labels, &planted),
                "instance {instance} mislabeled"
            );
            for w in r.inertia_trace.windows(2) {
                assert!(w[1] <= w[0] + 1e-9 * f64::max(w[0], 1.0));
            }
        }
    }

    #[test]
    fn choose_k_finds_two_blobs() {
        let points = four_points();
        assert_eq!(choose_k(&points, 7).unwrap(), 2);
    }

    #[test]
    fn choose_k_collapses_identical_points() {
        let points = vec![vec![1.0, 2.0]; 6];
        assert_eq!(choose_k(&points, 7).unwrap(), 1);
    }

    #[test]
    fn choose_k_is_deterministic() {
        let points = four_points();
        let a = choose_k(&points, 42).unwrap();
        let b = choose_k(&points, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(kmeans(&[], 1, 0).is_err());
        assert!(kmeans(&four_points(), 0, 0).is_err());
        assert!(kmeans(&four_points(), 5, 0).is_err());
        assert!(kmeans(&[vec![1.0], vec![f64::NAN]], 1, 0).is_err());
        assert!(kmeans(&[vec![1.0], vec![1.0, 2.0]], 1, 0).is_err());
    }
}
