use crate::{Error, Result};

/// Order-statistic quantile with linear interpolation between adjacent ranks
/// (Hyndman & Fan type 7). `p = 0` gives the minimum, `p = 1` the maximum.
///
/// `sorted` must be ascending.
pub fn quantile(sorted: &[f64], p: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::EmptyScores);
    }
    debug_assert!((0.0..=1.0).contains(&p), "p out of range: {p}");
    let m = sorted.len();
    let h = (m - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    if lo + 1 >= m {
        return Ok(sorted[m - 1]);
    }
    let frac = h - lo as f64;
    if frac == 0.0 {
        return Ok(sorted[lo]);
    }
    Ok(sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]))
}

/// Fraction of `sorted` strictly greater than `t`.
pub fn fraction_above(sorted: &[f64], t: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let at_or_below = sorted.partition_point(|&s| s <= t);
    (sorted.len() - at_or_below) as f64 / sorted.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(quantile(&[1.0, 2.0, 3.0, 4.0], 0.5).unwrap(), 2.5);
        for p in [0.0, 0.3, 1.0] {
            assert_eq!(quantile(&[5.0], p).unwrap(), 5.0);
        }
        // h = 0.95, value = 0 + 0.95 * 10
        assert_eq!(quantile(&[0.0, 10.0], 0.95).unwrap(), 9.5);
        assert_eq!(quantile(&[0.0, 1.0, 7.0], 0.0).unwrap(), 0.0);
        assert_eq!(quantile(&[0.0, 1.0, 7.0], 1.0).unwrap(), 7.0);
        assert!(matches!(quantile(&[], 0.5), Err(Error::EmptyScores)));
    }

    #[test]
    fn strict_fraction() {
        let s = [0.1, 0.2, 0.2, 0.5];
        assert_eq!(fraction_above(&s, 0.2), 0.25);
        assert_eq!(fraction_above(&s, 0.0), 1.0);
        assert_eq!(fraction_above(&s, 0.5), 0.0);
    }
}
