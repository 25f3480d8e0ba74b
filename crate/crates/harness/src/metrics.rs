//! Solution quality measures: explained variance, sparsity, clustering.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rada_core::linalg::{sym_eigen_ascending, Mat};
use rada_core::Error;

use crate::error::{HarnessError, Result};

/// `⟨AAᵀ, X̂X̂ᵀ⟩` over its maximum on `St(d, r)`, the sum of the `r`
/// largest eigenvalues of `AAᵀ`.
pub fn normalized_variance(data: &Mat, x: &Mat, r: usize) -> Result<f64> {
    // AAᵀ and AᵀA share their nonzero spectrum; use the smaller Gram matrix.
    let gram = if data.nrows() <= data.ncols() {
        data * data.transpose()
    } else {
        data.tr_mul(data)
    };
    let (values, _) = sym_eigen_ascending(&gram);
    let top: f64 = values.iter().rev().take(r).sum();
    if !(top > 0.0) {
        return Err(HarnessError::ZeroVariance);
    }
    Ok(data.tr_mul(x).norm_squared() / top)
}

/// Percentage of entries with magnitude below `threshold`.
pub fn sparsity_percent(x: &Mat, threshold: f64) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    let small = x.iter().filter(|v| v.abs() < threshold).count();
    100.0 * small as f64 / x.len() as f64
}

pub const SPARSITY_THRESHOLD: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    /// Labels of the restart with the smallest within-cluster SSE.
    pub labels: Vec<usize>,
    pub sse: f64,
    /// `(sse, labels)` of every restart, in restart order.
    pub restarts: Vec<(f64, Vec<usize>)>,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum()
}

/// Within-cluster sum of squared distances to the cluster means.
pub fn within_sse(points: &[Vec<f64>], labels: &[usize], k: usize) -> f64 {
    let dim = points.first().map_or(0, Vec::len);
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (p, &l) in points.iter().zip(labels) {
        counts[l] += 1;
        for (s, v) in sums[l].iter_mut().zip(p) {
            *s += v;
        }
    }
    let means: Vec<Vec<f64>> = sums
        .into_iter()
        .zip(&counts)
        .map(|(s, &c)| s.into_iter().map(|v| v / c.max(1) as f64).collect())
        .collect();
    points.iter().zip(labels).map(|(p, &l)| sq_dist(p, &means[l])).sum()
}

/// Rows of `rows`, each scaled to unit norm (zero rows left as they are).
pub fn normalized_rows(rows: &Mat) -> Vec<Vec<f64>> {
    rows.row_iter()
        .map(|r| {
            let n = r.norm();
            let s = if n > 0.0 { 1.0 / n } else { 1.0 };
            r.iter().map(|v| v * s).collect()
        })
        .collect()
}

fn plus_plus(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut centers = vec![points[rng.random_range(0..n)].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut u = rng.random::<f64>() * total;
            let mut pick = n - 1;
            for (i, w) in d2.iter().enumerate() {
                if u < *w {
                    pick = i;
                    break;
                }
                u -= w;
            }
            pick
        } else {
            rng.random_range(0..n)
        };
        centers.push(points[next].clone());
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(sq_dist(p, &centers[centers.len() - 1]));
        }
    }
    centers
}

fn lloyd(points: &[Vec<f64>], mut centers: Vec<Vec<f64>>, max_iters: usize) -> Vec<usize> {
    let k = centers.len();
    let dim = points[0].len();
    let mut labels = vec![usize::MAX; points.len()];
    for _ in 0..max_iters {
        let mut changed = false;
        for (l, p) in labels.iter_mut().zip(points) {
            let best = (0..k)
                .min_by(|&a, &b| sq_dist(p, &centers[a]).total_cmp(&sq_dist(p, &centers[b])))
                .unwrap_or(0);
            if *l != best {
                *l = best;
                changed = true;
            }
        }
        if !changed {
            break;
        }
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &l) in points.iter().zip(&labels) {
            counts[l] += 1;
            for (s, v) in sums[l].iter_mut().zip(p) {
                *s += v;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                centers[c] = sums[c].iter().map(|v| v / counts[c] as f64).collect();
            } else {
                // Reseed an empty cluster at the point farthest from its center.
                let far = (0..points.len())
                    .max_by(|&a, &b| {
                        sq_dist(&points[a], &centers[labels[a]]).total_cmp(&sq_dist(&points[b], &centers[labels[b]]))
                    })
                    .unwrap_or(0);
                centers[c] = points[far].clone();
                labels[far] = c;
            }
        }
    }
    labels
}

/// Lloyd's algorithm on unit-normalized rows with k-means++ seeding,
/// keeping the best of `restarts` runs by within-cluster SSE.
pub fn kmeans(rows: &Mat, k: usize, restarts: usize, seed: u64) -> Result<Clustering> {
    let points = normalized_rows(rows);
    if k == 0 || points.len() < k {
        return Err(Error::DegenerateClustering { clusters: k }.into());
    }
    let mut distinct: Vec<&Vec<f64>> = Vec::new();
    for p in &points {
        if !distinct.contains(&p) {
            distinct.push(p);
            if distinct.len() >= k {
                break;
            }
        }
    }
    if distinct.len() < k {
        return Err(Error::DegenerateClustering { clusters: k }.into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut runs = Vec::with_capacity(restarts.max(1));
    for _ in 0..restarts.max(1) {
        let centers = plus_plus(&points, k, &mut rng);
        let labels = lloyd(&points, centers, 300);
        runs.push((within_sse(&points, &labels, k), labels));
    }
    let best = runs
        .iter()
        .enumerate()
        .min_by(|a, b| a.1 .0.total_cmp(&b.1 .0))
        .map_or(0, |(i, _)| i);
    Ok(Clustering {
        labels: runs[best].1.clone(),
        sse: runs[best].0,
        restarts: runs,
    })
}

fn entropy(counts: impl Iterator<Item = usize>, n: f64) -> f64 {
    counts
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// `I(a; b)/√(H(a) H(b))` with natural logarithms.
pub fn nmi(a: &[usize], b: &[usize]) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::EmptyInput.into());
    }
    if a.len() != b.len() {
        return Err(Error::ShapeMismatch {
            expected: (a.len(), 1),
            found: (b.len(), 1),
        }
        .into());
    }
    let n = a.len() as f64;
    // Ordered maps keep the summation order, and so the value, reproducible.
    let mut joint: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut ca: BTreeMap<usize, usize> = BTreeMap::new();
    let mut cb: BTreeMap<usize, usize> = BTreeMap::new();
    for (&u, &v) in a.iter().zip(b) {
        *joint.entry((u, v)).or_default() += 1;
        *ca.entry(u).or_default() += 1;
        *cb.entry(v).or_default() += 1;
    }
    let ha = entropy(ca.values().copied(), n);
    let hb = entropy(cb.values().copied(), n);
    if ha == 0.0 || hb == 0.0 {
        return Ok(if ha == 0.0 && hb == 0.0 { 1.0 } else { 0.0 });
    }
    let mut mi = 0.0;
    for (&(u, v), &c) in &joint {
        let pj = c as f64 / n;
        mi += pj * (pj * n * n / (ca[&u] as f64 * cb[&v] as f64)).ln();
    }
    Ok(mi / (ha * hb).sqrt())
}

/// Clusters the rows of an `N×m` SSC solution basis into `m` groups.
pub fn cluster_from_solution(x: &Mat, restarts: usize, seed: u64) -> Result<Clustering> {
    kmeans(x, x.ncols(), restarts, seed)
}

#[cfg(test)]
mod tests;
