use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{squared_distance, validate_points, ClusterError};

pub const MAX_LLOYD_ITERATIONS: usize = 300;
/// k-means++ restarts per k when building an SSE curve.
pub const RESTARTS: u64 = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansResult {
    pub k: usize,
    pub assignments: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    pub sse: f64,
    pub iterations: usize,
    /// SSE after the initial assignment and after every Lloyd iteration.
    pub sse_trace: Vec<f64>,
    pub seed: u64,
}

fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, centroid) in centroids.iter().enumerate() {
        let d = squared_distance(point, centroid);
        // strict `<` keeps the lowest index on ties
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn assign(points: &[Vec<f64>], centroids: &[Vec<f64>]) -> Vec<usize> {
    points.iter().map(|p| nearest(p, centroids).0).collect()
}

fn total_sse(points: &[Vec<f64>], centroids: &[Vec<f64>], assignments: &[usize]) -> f64 {
    points
        .iter()
        .zip(assignments)
        .map(|(p, &c)| squared_distance(p, &centroids[c]))
        .sum()
}

fn kmeans_plus_plus(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut centroids = vec![points[rng.random_range(0..n)].clone()];
    let mut d2: Vec<f64> = points
        .iter()
        .map(|p| squared_distance(p, &centroids[0]))
        .collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = None;
            for (i, &d) in d2.iter().enumerate() {
                acc += d;
                if acc > target && d > 0.0 {
                    chosen = Some(i);
                    break;
                }
            }
            // rounding can leave `acc` just short of `target`
            chosen.unwrap_or_else(|| d2.iter().rposition(|&d| d > 0.0).expect("total > 0"))
        } else {
            rng.random_range(0..n)
        };
        let c = points[pick].clone();
        for (d, p) in d2.iter_mut().zip(points) {
            *d = d.min(squared_distance(p, &c));
        }
        centroids.push(c);
    }
    centroids
}

/// Means of the current assignment. An empty cluster takes over the point
/// farthest from its current centroid among clusters that can spare one.
fn update_centroids(
    points: &[Vec<f64>],
    assignments: &mut [usize],
    previous: &[Vec<f64>],
) -> Vec<Vec<f64>> {
    let k = previous.len();
    let dim = points[0].len();
    let mut counts = vec![0usize; k];
    for &a in assignments.iter() {
        counts[a] += 1;
    }
    for empty in 0..k {
        if counts[empty] > 0 {
            continue;
        }
        let mut far: Option<(usize, f64)> = None;
        for (i, p) in points.iter().enumerate() {
            let owner = assignments[i];
            if counts[owner] < 2 {
                continue;
            }
            let d = squared_distance(p, &previous[owner]);
            if far.is_none_or(|(_, best)| d > best) {
                far = Some((i, d));
            }
        }
        let (i, _) = far.expect("k <= n leaves a cluster with two or more points");
        counts[assignments[i]] -= 1;
        assignments[i] = empty;
        counts[empty] = 1;
    }
    let mut sums = vec![vec![0.0; dim]; k];
    for (p, &a) in points.iter().zip(assignments.iter()) {
        for (s, x) in sums[a].iter_mut().zip(p) {
            *s += x;
        }
    }
    for (s, &c) in sums.iter_mut().zip(&counts) {
        for v in s.iter_mut() {
            *v /= c as f64;
        }
    }
    sums
}

/// Lloyd's algorithm from a k-means++ start. Runs until the assignment stops
/// changing or [`MAX_LLOYD_ITERATIONS`] is reached. Deterministic in
/// `(points, k, seed)`.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64) -> Result<KMeansResult, ClusterError> {
    validate_points(points)?;
    let n = points.len();
    if k == 0 || k > n {
        return Err(ClusterError::InvalidK { k, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = kmeans_plus_plus(points, k, &mut rng);
    let mut assignments = assign(points, &centroids);
    let mut sse = total_sse(points, &centroids, &assignments);
    let mut sse_trace = vec![sse];
    let mut iterations = 0;
    let mut converged = false;

    while iterations < MAX_LLOYD_ITERATIONS {
        iterations += 1;
        centroids = update_centroids(points, &mut assignments, &centroids);
        let next = assign(points, &centroids);
        let next_sse = total_sse(points, &centroids, &next);
        debug_assert!(
            next_sse <= sse + 1e-9 * sse.max(1.0),
            "Lloyd step increased SSE: {sse} -> {next_sse}"
        );
        sse = next_sse;
        sse_trace.push(sse);
        if next == assignments {
            converged = true;
            break;
        }
        assignments = next;
    }
    if !converged {
        centroids = update_centroids(points, &mut assignments, &centroids);
        sse = total_sse(points, &centroids, &assignments);
        sse_trace.push(sse);
    }
    Ok(KMeansResult {
        k,
        assignments,
        centroids,
        sse,
        iterations,
        sse_trace,
        seed,
    })
}

pub(crate) fn restart_seed(base: u64, k: usize, restart: u64) -> u64 {
    base.wrapping_add(((k as u64) << 16) | restart)
}

/// Best of [`RESTARTS`] runs, minimum by `(sse, seed)`.
pub fn kmeans_best(points: &[Vec<f64>], k: usize, seed: u64) -> Result<KMeansResult, ClusterError> {
    let mut best: Option<KMeansResult> = None;
    for r in 0..RESTARTS {
        let run = kmeans(points, k, restart_seed(seed, k, r))?;
        let better = match &best {
            None => true,
            Some(b) => run.sse.total_cmp(&b.sse).then(run.seed.cmp(&b.seed)).is_lt(),
        };
        if better {
            best = Some(run);
        }
    }
    Ok(best.expect("RESTARTS > 0"))
}

/// `(k, best-of-restarts SSE)` for every k in `k_min..=k_max`.
pub fn sse_curve(
    points: &[Vec<f64>],
    k_min: usize,
    k_max: usize,
    seed: u64,
) -> Result<Vec<(usize, f64)>, ClusterError> {
    let n = points.len();
    if k_min == 0 || k_min > k_max || k_max > n {
        return Err(ClusterError::InvalidK { k: k_max, n });
    }
    (k_min..=k_max)
        .map(|k| kmeans_best(points, k, seed).map(|r| (k, r.sse)))
        .collect()
}

/// The interior k with the largest second difference
/// `(SSE(k-1) - SSE(k)) - (SSE(k) - SSE(k+1))`; ties go to the smaller k.
pub fn elbow_detect(curve: &[(usize, f64)]) -> Result<usize, ClusterError> {
    if curve.len() < 3 {
        return Err(ClusterError::Curve(format!(
            "need at least 3 points, got {}",
            curve.len()
        )));
    }
    if curve.windows(2).any(|w| w[1].0 != w[0].0 + 1) {
        return Err(ClusterError::Curve("k values must be consecutive".into()));
    }
    let mut best: Option<(usize, f64)> = None;
    for w in curve.windows(3) {
        let second = (w[0].1 - w[1].1) - (w[1].1 - w[2].1);
        if best.is_none_or(|(_, b)| second > b) {
            best = Some((w[1].0, second));
        }
    }
    Ok(best.expect("at least one window").0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(raw: &[&[f64]]) -> Vec<Vec<f64>> {
        raw.iter().map(|r| r.to_vec()).collect()
    }

    #[test]
    fn two_blob_fixture() {
        let p = pts(&[&[0.0, 0.0], &[0.0, 1.0], &[10.0, 0.0], &[10.0, 1.0]]);
        let r = kmeans_best(&p, 2, 42).unwrap();
        assert_eq!(r.sse, 1.0);
        assert_eq!(r.assignments[0], r.assignments[1]);
        assert_eq!(r.assignments[2], r.assignments[3]);
        assert_ne!(r.assignments[0], r.assignments[2]);
    }

    #[test]
    fn k1_is_mean() {
        let p = pts(&[&[0.0, 2.0], &[4.0, 4.0], &[2.0, 0.0]]);
        let r = kmeans(&p, 1, 7).unwrap();
        assert_eq!(r.centroids, vec![vec![2.0, 2.0]]);
        assert_eq!(r.sse, 16.0);
    }

    #[test]
    fn identical_points_have_zero_sse() {
        let p = vec![vec![0.3, 0.3]; 6];
        let r = kmeans(&p, 2, 1).unwrap();
        assert_eq!(r.sse, 0.0);
        assert!(r.assignments.iter().all(|&a| a < 2));
    }

    #[test]
    fn invalid_inputs() {
        let p = pts(&[&[0.0], &[1.0]]);
        assert!(matches!(kmeans(&p, 3, 0), Err(ClusterError::InvalidK { .. })));
        assert!(matches!(kmeans(&p, 0, 0), Err(ClusterError::InvalidK { .. })));
        assert!(matches!(
            kmeans(&pts(&[&[0.0], &[1.0, 2.0]]), 1, 0),
            Err(ClusterError::Dimension { .. })
        ));
    }

    #[test]
    fn curve_endpoints() {
        let p = pts(&[&[0.0], &[1.0], &[3.0], &[7.0]]);
        let c = sse_curve(&p, 1, 4, 3).unwrap();
        assert_eq!(c.len(), 4);
        // mean 2.75: 7.5625 + 3.0625 + 0.0625 + 18.0625
        assert_eq!(c[0], (1, 28.75));
        assert_eq!(c[3], (4, 0.0));
        let single = sse_curve(&p, 1, 1, 3).unwrap();
        assert_eq!(single, vec![(1, 28.75)]);
    }

    #[test]
    fn elbow_examples() {
        let curve: Vec<(usize, f64)> = [100.0, 60.0, 30.0, 28.0, 27.0, 26.0]
            .iter()
            .enumerate()
            .map(|(i, &s)| (i + 1, s))
            .collect();
        assert_eq!(elbow_detect(&curve).unwrap(), 3);

        let linear: Vec<(usize, f64)> = (1..=6).map(|k| (k, 60.0 - 10.0 * k as f64)).collect();
        assert_eq!(elbow_detect(&linear).unwrap(), 2);

        assert!(elbow_detect(&curve[..2]).is_err());
        assert!(elbow_detect(&[(1, 3.0), (2, 2.0), (4, 1.0)]).is_err());
    }
}
