use super::Sample;
use crate::{Error, Result};

/// Sample Pearson correlation ρ̂.
///
/// Errors with [`Error::DegenerateVariance`] when either coordinate is constant.
pub fn pearson_r(sample: &Sample) -> Result<f64> {
    let n = sample.len() as f64;
    let mx = sample.xs().iter().sum::<f64>() / n;
    let my = sample.ys().iter().sum::<f64>() / n;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (&x, &y) in sample.xs().iter().zip(sample.ys()) {
        let dx = x - mx;
        let dy = y - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 {
        return Err(Error::DegenerateVariance("x"));
    }
    if syy == 0.0 {
        return Err(Error::DegenerateVariance("y"));
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Squared sample correlation, which targets R² directly for linear relationships.
pub fn pearson_r2(sample: &Sample) -> Result<f64> {
    pearson_r(sample).map(|r| r * r)
}

/// Sample distance correlation (Székely, Rizzo & Bakirov), the square root of
/// the V-statistic dCov²/√(dVar²ₓ·dVar²ᵧ).
///
/// Double-centering is applied through row sums rather than materialised
/// matrices: for a distance matrix `a` with row sums `r` and total `S`,
/// `Σ A_ij B_ij = Σ a_ij b_ij − (2/n) Σ r_i s_i + S·T/n²`.
/// A constant coordinate has zero distance variance and yields 0.
pub fn distance_correlation(sample: &Sample) -> f64 {
    let xs = sample.xs();
    let ys = sample.ys();
    let n = xs.len();
    let mut row_a = vec![0.0; n];
    let mut row_b = vec![0.0; n];
    let (mut sum_ab, mut sum_aa, mut sum_bb) = (0.0, 0.0, 0.0);
    for i in 0..n {
        for j in (i + 1)..n {
            let a = (xs[i] - xs[j]).abs();
            let b = (ys[i] - ys[j]).abs();
            row_a[i] += a;
            row_a[j] += a;
            row_b[i] += b;
            row_b[j] += b;
            sum_ab += a * b;
            sum_aa += a * a;
            sum_bb += b * b;
        }
    }
    let nf = n as f64;
    let total_a: f64 = row_a.iter().sum();
    let total_b: f64 = row_b.iter().sum();
    let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(p, q)| p * q).sum::<f64>();

    // off-diagonal pairs were visited once each
    let centered = |pair: f64, rows: f64, ta: f64, tb: f64| 2.0 * pair - 2.0 / nf * rows + ta * tb / (nf * nf);
    let dcov = centered(sum_ab, dot(&row_a, &row_b), total_a, total_b);
    let dvar_x = centered(sum_aa, dot(&row_a, &row_a), total_a, total_a);
    let dvar_y = centered(sum_bb, dot(&row_b, &row_b), total_b, total_b);

    let denom = dvar_x * dvar_y;
    if dvar_x <= 0.0 || dvar_y <= 0.0 || denom <= 0.0 {
        return 0.0;
    }
    (dcov / denom.sqrt()).clamp(0.0, 1.0).sqrt()
}
