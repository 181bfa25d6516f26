//! Independent reference computations for the numerical kernels. Nothing in
//! here calls into the code paths it is used to check.
#![allow(dead_code, clippy::needless_range_loop)]

/// Mann-Whitney U1 by enumerating every (a, b) pair.
pub fn brute_force_u(a: &[f64], b: &[f64]) -> (f64, f64) {
    let mut u1 = 0.0;
    for &x in a {
        for &y in b {
            if x > y {
                u1 += 1.0;
            } else if x == y {
                u1 += 0.5;
            }
        }
    }
    (u1, (a.len() * b.len()) as f64 - u1)
}

fn sse_of(points: &[Vec<f64>], members: &[usize]) -> f64 {
    let dim = points[0].len();
    let mut mean = vec![0.0; dim];
    for &m in members {
        for (acc, x) in mean.iter_mut().zip(&points[m]) {
            *acc += x;
        }
    }
    for v in &mut mean {
        *v /= members.len() as f64;
    }
    members
        .iter()
        .map(|&m| {
            points[m]
                .iter()
                .zip(&mean)
                .map(|(x, c)| (x - c) * (x - c))
                .sum::<f64>()
        })
        .sum()
}

/// Costs this close (relative) are treated as a tie.
pub const WARD_TIE: f64 = 1e-10;

/// Ward merge sequence recomputing within-cluster SSE from the raw points at
/// every step. Returns `(id_a, id_b, cost, size)` with scipy-style ids.
pub fn naive_ward(points: &[Vec<f64>]) -> Vec<(usize, usize, f64, usize)> {
    let n = points.len();
    let mut clusters: Vec<(usize, Vec<usize>)> = (0..n).map(|i| (i, vec![i])).collect();
    let mut out = Vec::new();
    for step in 0..n.saturating_sub(1) {
        let mut candidates = Vec::new();
        for x in 0..clusters.len() {
            for y in (x + 1)..clusters.len() {
                let mut union = clusters[x].1.clone();
                union.extend(&clusters[y].1);
                let delta = sse_of(points, &union)
                    - sse_of(points, &clusters[x].1)
                    - sse_of(points, &clusters[y].1);
                let lo = clusters[x].0.min(clusters[y].0);
                let hi = clusters[x].0.max(clusters[y].0);
                candidates.push((delta, lo, hi, x, y));
            }
        }
        let min = candidates.iter().map(|c| c.0).fold(f64::INFINITY, f64::min);
        let cutoff = min + WARD_TIE * min.abs().max(1.0);
        let best = candidates
            .into_iter()
            .filter(|c| c.0 <= cutoff)
            .min_by_key(|c| (c.1, c.2));
        let (cost, lo, hi, x, y) = best.unwrap();
        let mut members = clusters[x].1.clone();
        members.extend(&clusters[y].1);
        let size = members.len();
        clusters.remove(y);
        clusters.remove(x);
        clusters.push((n + step, members));
        out.push((lo, hi, cost, size));
    }
    out
}

/// Minimum SSE over every partition of the points into exactly `k`
/// non-empty groups (restricted growth strings).
pub fn exhaustive_kmeans_sse(points: &[Vec<f64>], k: usize) -> f64 {
    fn rec(points: &[Vec<f64>], k: usize, labels: &mut Vec<usize>, used: usize, best: &mut f64) {
        let n = points.len();
        if labels.len() == n {
            if used == k {
                let total: f64 = (0..k)
                    .map(|c| {
                        let members: Vec<usize> = (0..n).filter(|&i| labels[i] == c).collect();
                        sse_of(points, &members)
                    })
                    .sum();
                *best = best.min(total);
            }
            return;
        }
        let remaining = n - labels.len();
        if used + remaining < k {
            return;
        }
        for c in 0..=used.min(k - 1) {
            labels.push(c);
            rec(points, k, labels, used.max(c + 1), best);
            labels.pop();
        }
    }
    let mut best = f64::INFINITY;
    rec(points, k, &mut Vec::new(), 0, &mut best);
    best
}

/// KL(P || Q) for a 2-D layout, written out directly from the definition.
pub fn kl_reference(p: &[Vec<f64>], y: &[[f64; 2]]) -> f64 {
    let n = y.len();
    let kernel = |i: usize, j: usize| {
        let dx = y[i][0] - y[j][0];
        let dy = y[i][1] - y[j][1];
        1.0 / (1.0 + dx * dx + dy * dy)
    };
    let mut z = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                z += kernel(i, j);
            }
        }
    }
    let mut kl = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j && p[i][j] > 0.0 {
                kl += p[i][j] * (p[i][j] / (kernel(i, j) / z)).ln();
            }
        }
    }
    kl
}

/// Central finite-difference gradient of [`kl_reference`].
pub fn kl_finite_difference(p: &[Vec<f64>], y: &[[f64; 2]], h: f64) -> Vec<[f64; 2]> {
    let mut out = vec![[0.0; 2]; y.len()];
    let mut work = y.to_vec();
    for i in 0..y.len() {
        for d in 0..2 {
            work[i][d] = y[i][d] + h;
            let plus = kl_reference(p, &work);
            work[i][d] = y[i][d] - h;
            let minus = kl_reference(p, &work);
            work[i][d] = y[i][d];
            out[i][d] = (plus - minus) / (2.0 * h);
        }
    }
    out
}

/// Mean silhouette coefficient of labelled 2-D points.
pub fn silhouette(coords: &[[f64; 2]], labels: &[usize]) -> f64 {
    let n = coords.len();
    let dist = |i: usize, j: usize| {
        ((coords[i][0] - coords[j][0]).powi(2) + (coords[i][1] - coords[j][1]).powi(2)).sqrt()
    };
    let k = labels.iter().max().map_or(0, |m| m + 1);
    let mut total = 0.0;
    for i in 0..n {
        let mut sums = vec![0.0; k];
        let mut counts = vec![0usize; k];
        for j in 0..n {
            if i != j {
                sums[labels[j]] += dist(i, j);
                counts[labels[j]] += 1;
            }
        }
        let own = labels[i];
        if counts[own] == 0 {
            continue;
        }
        let a = sums[own] / counts[own] as f64;
        let b = (0..k)
            .filter(|&c| c != own && counts[c] > 0)
            .map(|c| sums[c] / counts[c] as f64)
            .fold(f64::INFINITY, f64::min);
        total += (b - a) / a.max(b);
    }
    total / n as f64
}

/// Two-sided p for a=[1,2,3], b=[4,5,6]: z = 4 / sqrt(5.25), p = erfc(z / sqrt 2),
/// evaluated beforehand in 30-digit arithmetic and frozen here.
pub const P_123_VS_456: f64 = 0.080_855_598_370_052_3;
/// `|U1 - n1 n2 / 2| - 0.5` over `sqrt(n1 n2 (n + 1) / 12)` for a=[1,2,3], b=[4,5,6].
pub const Z_123_VS_456: f64 = 1.745_743_121_887_939;
