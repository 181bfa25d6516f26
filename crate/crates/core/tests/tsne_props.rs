mod oracles;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scriptaffect::projection::{
    entropy_bits, joint_probabilities, kl_divergence, kl_gradient, pairwise_squared_distances,
    perplexity_calibration, tsne, TsneConfig,
};

fn random_points(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect())
        .collect()
}

fn two_blobs(rng: &mut ChaCha8Rng) -> (Vec<Vec<f64>>, Vec<usize>) {
    let mut pts = Vec::new();
    let mut labels = Vec::new();
    for (label, offset) in [(0usize, 0.0), (1, 20.0)] {
        for _ in 0..10 {
            pts.push((0..8).map(|_| offset + rng.random_range(-0.5..0.5)).collect());
            labels.push(label);
        }
    }
    (pts, labels)
}

#[test]
fn gradient_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let pts = random_points(&mut rng, 10, 5);
        let cond = perplexity_calibration(&pairwise_squared_distances(&pts), 2.5).unwrap();
        let p = joint_probabilities(&cond);
        let y: Vec<[f64; 2]> = (0..10)
            .map(|_| [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)])
            .collect();
        let analytic = kl_gradient(&p, &y);
        let numeric = oracles::kl_finite_difference(&p, &y, 1e-5);
        let diff: f64 = analytic
            .iter()
            .zip(&numeric)
            .map(|(a, b)| (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2))
            .sum::<f64>()
            .sqrt();
        let scale: f64 = numeric.iter().map(|g| g[0] * g[0] + g[1] * g[1]).sum::<f64>().sqrt();
        assert!(diff / scale < 1e-4, "relative error {}", diff / scale);
        assert!((kl_divergence(&p, &y) - oracles::kl_reference(&p, &y)).abs() < 1e-12);
    }
}

#[test]
fn calibrated_entropies_hit_target() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for perplexity in [2.0, 5.0, 12.0] {
        let pts = random_points(&mut rng, 40, 6);
        let cond = perplexity_calibration(&pairwise_squared_distances(&pts), perplexity).unwrap();
        for row in &cond {
            assert!((entropy_bits(row) - perplexity.log2()).abs() < 1e-5);
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn separated_blobs_stay_separated() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (pts, labels) = two_blobs(&mut rng);
    let emb = tsne(&pts, &TsneConfig::default()).unwrap();
    let s = oracles::silhouette(&emb.coords, &labels);
    assert!(s > 0.5, "silhouette {s}");
}

#[test]
fn kl_trace_descends_after_exaggeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (pts, _) = two_blobs(&mut rng);
    let cfg = TsneConfig::default();
    let emb = tsne(&pts, &cfg).unwrap();
    assert!(emb.coords.iter().flatten().all(|v| v.is_finite()));
    assert!(emb.kl_trace.iter().all(|&(_, kl)| kl >= 0.0));
    let post: Vec<f64> = emb
        .kl_trace
        .iter()
        .filter(|(it, _)| *it > cfg.exaggeration_iters)
        .map(|&(_, kl)| kl)
        .collect();
    assert!(post.last().unwrap() <= post.first().unwrap());
    for w in post.windows(2) {
        assert!(w[1] <= w[0] + 1e-3, "{post:?}");
    }
    assert_eq!(emb.kl_trace.last().unwrap().0, cfg.iterations);
    assert_eq!(tsne(&pts, &cfg).unwrap(), emb);
}

#[test]
fn duplicate_pair_lands_together() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut pts = random_points(&mut rng, 15, 4);
    pts.push(pts[3].clone());
    let dup = pts.len() - 1;
    let d = |c: &[[f64; 2]], i: usize, j: usize| {
        (c[i][0] - c[j][0]).powi(2) + (c[i][1] - c[j][1]).powi(2)
    };
    let seeds = 100u64;
    let good = (0..seeds)
        .filter(|&seed| {
            let cfg = TsneConfig {
                seed,
                ..TsneConfig::default()
            };
            let c = tsne(&pts, &cfg).unwrap().coords;
            let pair = d(&c, 3, dup);
            (0..pts.len())
                .filter(|&k| k != 3 && k != dup)
                .all(|k| pair < d(&c, 3, k) && pair < d(&c, dup, k))
        })
        .count();
    assert!(good as f64 >= 0.95 * seeds as f64, "{good}/{seeds}");
}
