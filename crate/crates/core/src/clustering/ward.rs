//! Ward agglomerative clustering with Lance-Williams cost updates.

use serde::{Deserialize, Serialize};

use super::{squared_distance, validate_points, ClusterError};

/// Relative slack under which two merge costs count as tied.
pub const TIE_TOLERANCE: f64 = 1e-10;

/// One agglomeration step. Leaves are `0..n`; the cluster created by merge
/// `i` gets id `n + i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Merge {
    pub cluster_a: usize,
    pub cluster_b: usize,
    /// Increase in total within-cluster sum of squares caused by the merge.
    pub cost: f64,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dendrogram {
    pub leaves: usize,
    pub merges: Vec<Merge>,
}

/// Ward linkage: each step merges the pair of clusters whose union raises
/// the within-cluster SSE the least, ties (within [`TIE_TOLERANCE`]) broken by
/// the lowest `(id_a, id_b)`.
/// Returns the full dendrogram and the flat labels for `k` clusters.
pub fn ward_cluster(points: &[Vec<f64>], k: usize) -> Result<(Dendrogram, Vec<usize>), ClusterError> {
    validate_points(points)?;
    let n = points.len();
    if n < 2 {
        return Err(ClusterError::TooFewPoints { needed: 2, got: n });
    }
    if k == 0 || k > n {
        return Err(ClusterError::InvalidK { k, n });
    }

    // Slot i holds a live cluster (or nothing once merged away). Costs are
    // indexed by slot; ids are tracked separately for tie-breaking.
    let mut cost = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = 0.5 * squared_distance(&points[i], &points[j]);
            cost[i][j] = d;
            cost[j][i] = d;
        }
    }
    let mut ids: Vec<usize> = (0..n).collect();
    let mut sizes = vec![1usize; n];
    let mut alive = vec![true; n];
    let mut merges = Vec::with_capacity(n - 1);

    for step in 0..(n - 1) {
        let mut min_cost = f64::INFINITY;
        for i in (0..n).filter(|&i| alive[i]) {
            for j in ((i + 1)..n).filter(|&j| alive[j]) {
                min_cost = min_cost.min(cost[i][j]);
            }
        }
        // Costs equal up to rounding are ties; the Lance-Williams recurrence
        // and a direct SSE evaluation disagree in the last bits.
        let cutoff = min_cost + TIE_TOLERANCE * min_cost.abs().max(1.0);
        let mut best: Option<(f64, usize, usize, usize, usize)> = None;
        for i in (0..n).filter(|&i| alive[i]) {
            for j in ((i + 1)..n).filter(|&j| alive[j]) {
                if cost[i][j] > cutoff {
                    continue;
                }
                let (lo, hi) = (ids[i].min(ids[j]), ids[i].max(ids[j]));
                if best.is_none_or(|(_, blo, bhi, _, _)| (lo, hi) < (blo, bhi)) {
                    best = Some((cost[i][j], lo, hi, i, j));
                }
            }
        }
        let (c, lo, hi, i, j) = best.expect("two live clusters remain");
        let (ni, nj) = (sizes[i] as f64, sizes[j] as f64);
        for m in 0..n {
            if !alive[m] || m == i || m == j {
                continue;
            }
            let nm = sizes[m] as f64;
            let updated = ((ni + nm) * cost[m][i] + (nj + nm) * cost[m][j] - nm * c)
                / (ni + nj + nm);
            cost[m][i] = updated;
            cost[i][m] = updated;
        }
        alive[j] = false;
        sizes[i] += sizes[j];
        ids[i] = n + step;
        merges.push(Merge {
            cluster_a: lo,
            cluster_b: hi,
            cost: c,
            size: sizes[i],
        });
    }

    let dendrogram = Dendrogram { leaves: n, merges };
    let labels = cut_dendrogram(&dendrogram, k);
    Ok((dendrogram, labels))
}

/// Flat labels after applying the first `leaves - k` merges. Labels are
/// numbered in order of each cluster's lowest point index.
pub fn cut_dendrogram(dendrogram: &Dendrogram, k: usize) -> Vec<usize> {
    let n = dendrogram.leaves;
    let k = k.clamp(1, n.max(1));
    let mut parent: Vec<usize> = (0..(2 * n).saturating_sub(1)).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (step, m) in dendrogram.merges.iter().take(n - k).enumerate() {
        let new_id = n + step;
        let ra = find(&mut parent, m.cluster_a);
        let rb = find(&mut parent, m.cluster_b);
        parent[ra] = new_id;
        parent[rb] = new_id;
    }
    let mut label_of_root = std::collections::HashMap::new();
    (0..n)
        .map(|i| {
            let root = find(&mut parent, i);
            let next = label_of_root.len();
            *label_of_root.entry(root).or_insert(next)
        })
        .collect()
}
