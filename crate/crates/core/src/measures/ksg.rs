//! Kraskov–Stögbauer–Grassberger mutual information estimator.
//!
//! Estimator (1) of the KSG construction:
//!
//! ```text
//! I(X;Y) = ψ(k) + ψ(N) − ⟨ψ(n_x + 1) + ψ(n_y + 1)⟩
//! ```
//!
//! where ε_i is the max-norm distance from point i to its k-th nearest
//! neighbour in the joint space and n_x(i) counts points j ≠ i with
//! |x_i − x_j| < ε_i (strict), likewise n_y(i).
//!
//! Exact duplicate points make ε_i = 0 and bias the counts. An optional
//! seeded jitter of 1e-10 × coordinate range can be enabled to break them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::special::digamma;
use super::Sample;
use crate::{Error, Result};

pub const DEFAULT_K: usize = 6;
const JITTER_SCALE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KsgOptions {
    pub k: usize,
    /// Seed for tie-breaking jitter; `None` leaves the data untouched.
    pub jitter_seed: Option<u64>,
}

impl Default for KsgOptions {
    fn default() -> Self {
        KsgOptions {
            k: DEFAULT_K,
            jitter_seed: None,
        }
    }
}

/// KSG mutual information in nats. Not clamped: small samples can go negative.
pub fn kraskov_mi(sample: &Sample, k: usize) -> Result<f64> {
    kraskov_mi_with(sample, KsgOptions { k, jitter_seed: None })
}

pub fn kraskov_mi_with(sample: &Sample, opts: KsgOptions) -> Result<f64> {
    let n = sample.len();
    let k = opts.k;
    if k == 0 || k >= n {
        return Err(Error::KOutOfRange { k, n });
    }
    let (xs, ys) = match opts.jitter_seed {
        Some(seed) => jittered(sample, seed),
        None => (sample.xs().to_vec(), sample.ys().to_vec()),
    };

    let eps = kth_neighbor_distances(&xs, &ys, k);

    let mut sorted_x = xs.clone();
    sorted_x.sort_by(f64::total_cmp);
    let mut sorted_y = ys.clone();
    sorted_y.sort_by(f64::total_cmp);

    let mut avg = 0.0;
    for i in 0..n {
        let nx = count_within(&sorted_x, xs[i], eps[i]);
        let ny = count_within(&sorted_y, ys[i], eps[i]);
        avg += digamma(nx as f64 + 1.0) + digamma(ny as f64 + 1.0);
    }
    avg /= n as f64;
    Ok(digamma(k as f64) + digamma(n as f64) - avg)
}

fn jittered(sample: &Sample, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut shake = |v: &[f64]| {
        let (lo, hi) = v
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &x| (l.min(x), h.max(x)));
        let amp = JITTER_SCALE * (hi - lo);
        v.iter()
            .map(|&x| x + amp * rng.random_range(-1.0..1.0))
            .collect::<Vec<_>>()
    };
    let xs = shake(sample.xs());
    let ys = shake(sample.ys());
    (xs, ys)
}

/// Max-norm distance from each point to its k-th nearest neighbour.
///
/// Points are visited in x order; the search walks outward from each point
/// and stops on a side once |dx| alone reaches the current k-th best.
fn kth_neighbor_distances(xs: &[f64], ys: &[f64], k: usize) -> Vec<f64> {
    let n = xs.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]).then(a.cmp(&b)));

    let mut best = Vec::with_capacity(k + 1);
    let mut eps = vec![0.0; n];
    for (pos, &i) in order.iter().enumerate() {
        best.clear();
        let (xi, yi) = (xs[i], ys[i]);
        let mut left = pos;
        let mut right = pos + 1;
        loop {
            let dl = (left > 0).then(|| xi - xs[order[left - 1]]);
            let dr = (right < n).then(|| xs[order[right]] - xi);
            let (j, dx) = match (dl, dr) {
                (None, None) => break,
                (Some(l), Some(r)) if l <= r => {
                    left -= 1;
                    (order[left], l)
                }
                (Some(l), None) => {
                    left -= 1;
                    (order[left], l)
                }
                (_, Some(r)) => {
                    right += 1;
                    (order[right - 1], r)
                }
            };
            if best.len() == k && dx >= best[k - 1] {
                break;
            }
            let d = dx.max((yi - ys[j]).abs());
            insert_bounded(&mut best, d, k);
        }
        eps[i] = best[k - 1];
    }
    eps
}

fn insert_bounded(best: &mut Vec<f64>, d: f64, k: usize) {
    if best.len() == k {
        if d >= best[k - 1] {
            return;
        }
        best.pop();
    }
    let at = best.partition_point(|&b| b <= d);
    best.insert(at, d);
}

/// Number of j ≠ self with |v_j − v| < eps, given `sorted` containing v.
fn count_within(sorted: &[f64], v: f64, eps: f64) -> usize {
    if eps <= 0.0 {
        return 0;
    }
    let start = sorted.partition_point(|&u| u < v);
    let end = start + sorted[start..].partition_point(|&u| u - v < eps);
    let left = sorted[..start].partition_point(|&u| v - u >= eps);
    // v itself is counted in [left, end)
    end - left - 1
}

/// Linfoot's informational coefficient squared, 1 − e^(−2I) for I in nats.
///
/// Equals ρ² for a bivariate normal. Negative estimates clamp to 0.
pub fn linfoot_normalize(mi_nats: f64) -> f64 {
    if mi_nats <= 0.0 {
        return 0.0;
    }
    (-(-2.0 * mi_nats).exp_m1()).min(1.0)
}
