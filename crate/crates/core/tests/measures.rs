//! Property tests for the dependence statistics.

use equilab::measures::{
    distance_correlation, evaluate, kraskov_mi, linfoot_normalize, pearson_r2, Sample, StatisticDescriptor,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Distance correlation straight from the definition: full distance matrices,
/// explicit double centering.
fn dcor_oracle(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len();
    let centered = |v: &[f64]| {
        let d: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| (v[i] - v[j]).abs()).collect()).collect();
        let row: Vec<f64> = d.iter().map(|r| r.iter().sum::<f64>() / n as f64).collect();
        let col: Vec<f64> = (0..n).map(|j| d.iter().map(|r| r[j]).sum::<f64>() / n as f64).collect();
        let all = row.iter().sum::<f64>() / n as f64;
        (0..n)
            .map(|i| (0..n).map(|j| d[i][j] - row[i] - col[j] + all).collect::<Vec<f64>>())
            .collect::<Vec<_>>()
    };
    let (a, b) = (centered(x), centered(y));
    let dot = |p: &Vec<Vec<f64>>, q: &Vec<Vec<f64>>| {
        p.iter()
            .zip(q)
            .map(|(r, s)| r.iter().zip(s).map(|(u, v)| u * v).sum::<f64>())
            .sum::<f64>()
            / (n * n) as f64
    };
    let (vxy, vx, vy) = (dot(&a, &b), dot(&a, &a), dot(&b, &b));
    if vx * vy <= 0.0 {
        return 0.0;
    }
    (vxy / (vx * vy).sqrt()).max(0.0).sqrt()
}

fn paired(n: std::ops::Range<usize>) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    n.prop_flat_map(|n| {
        (
            prop::collection::vec(-100.0..100.0f64, n),
            prop::collection::vec(-100.0..100.0f64, n),
        )
    })
}

fn s(x: &[f64], y: &[f64]) -> Sample {
    Sample::new(x.to_vec(), y.to_vec()).unwrap()
}

fn spread(v: &[f64]) -> f64 {
    v.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - v.iter().cloned().fold(f64::INFINITY, f64::min)
}

proptest! {
    #[test]
    fn dcor_matches_definition((x, y) in paired(2..50)) {
        prop_assume!(spread(&x) > 1e-6 && spread(&y) > 1e-6);
        let fast = distance_correlation(&s(&x, &y));
        prop_assert!((fast - dcor_oracle(&x, &y)).abs() < 1e-9);
    }

    #[test]
    fn pearson_r2_affine_invariant((x, y) in paired(3..60), a in 0.1..10.0f64, b in -50.0..50.0f64, c in -10.0..-0.1f64) {
        prop_assume!(spread(&x) > 1e-3 && spread(&y) > 1e-3);
        let base = pearson_r2(&s(&x, &y)).unwrap();
        let tx: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        let ty: Vec<f64> = y.iter().map(|v| c * v - b).collect();
        prop_assert!((pearson_r2(&s(&tx, &ty)).unwrap() - base).abs() < 1e-9);
        prop_assert!((0.0..=1.0).contains(&base));
    }

    #[test]
    fn dcor_scale_invariant_and_bounded((x, y) in paired(2..40), a in 0.5..4.0f64, b in -5.0..5.0f64) {
        prop_assume!(spread(&x) > 1e-3 && spread(&y) > 1e-3);
        let base = distance_correlation(&s(&x, &y));
        let tx: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        prop_assert!((distance_correlation(&s(&tx, &y)) - base).abs() < 1e-9);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&base));
    }

    #[test]
    fn ksg_invariant_under_shift_and_scale(seed in any::<u64>(), scale in prop::sample::select(vec![0.25, 0.5, 2.0, 4.0]), b in -3.0..3.0f64) {
        // power-of-two scales keep every distance comparison exact
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x: Vec<f64> = (0..200).map(|_| rng.sample(StandardNormal)).collect();
        let y: Vec<f64> = x.iter().map(|v| v + rng.sample::<f64, _>(StandardNormal)).collect();
        let base = kraskov_mi(&s(&x, &y), 6).unwrap();
        let tx: Vec<f64> = x.iter().map(|v| v * scale).collect();
        let ty: Vec<f64> = y.iter().map(|v| v * scale).collect();
        prop_assert!((kraskov_mi(&s(&tx, &ty), 6).unwrap() - base).abs() < 1e-9);
        let sx: Vec<f64> = x.iter().map(|v| v + b).collect();
        prop_assert!((kraskov_mi(&s(&sx, &y), 6).unwrap() - base).abs() < 0.05);
    }

    #[test]
    fn linfoot_monotone(a in 0.0..20.0f64, d in 0.0..5.0f64) {
        prop_assert!(linfoot_normalize(a) <= linfoot_normalize(a + d));
        prop_assert!((0.0..=1.0).contains(&linfoot_normalize(a)));
    }

    #[test]
    fn evaluate_is_deterministic((x, y) in paired(10..40)) {
        prop_assume!(spread(&x) > 1e-3 && spread(&y) > 1e-3);
        let sample = Sample::new(x, y).unwrap();
        for d in [StatisticDescriptor::pearson_r2(), StatisticDescriptor::distance_correlation(), StatisticDescriptor::kraskov_mi(3)] {
            let a = evaluate(&d, &sample).unwrap();
            let b = evaluate(&d, &sample).unwrap();
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }
}

#[test]
fn ksg_gaussian_small_scale() {
    // −½ ln(1 − ρ²) for ρ = 0.8
    let truth = -0.5 * (1.0f64 - 0.64).ln();
    let mut total = 0.0;
    for seed in 0..10 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut x = Vec::with_capacity(2000);
        let mut y = Vec::with_capacity(2000);
        for _ in 0..2000 {
            let a: f64 = rng.sample(StandardNormal);
            let b: f64 = rng.sample(StandardNormal);
            x.push(a);
            y.push(0.8 * a + 0.6 * b);
        }
        total += kraskov_mi(&s(&x, &y), 6).unwrap();
    }
    assert!((total / 10.0 - truth).abs() < 0.03, "mean {} vs {truth}", total / 10.0);
}
