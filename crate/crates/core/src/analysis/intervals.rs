use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::quantile::quantile;
use super::ScoreGrid;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi, "interval [{lo}, {hi}] is reversed");
        Interval { lo, hi }
    }

    pub fn point(x: f64) -> Self {
        Interval { lo: x, hi: x }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }
}

/// Reliable interval at one grid level: the envelope of the central
/// (1 − α) intervals of every function's sampling distribution.
pub fn reliable_interval(grid: &ScoreGrid, level: usize, alpha: f64) -> Result<Interval> {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for cell in grid.cells_at(level) {
        lo = lo.min(quantile(cell, alpha / 2.0)?);
        hi = hi.max(quantile(cell, 1.0 - alpha / 2.0)?);
    }
    Ok(Interval::new(lo, hi))
}

/// Reliable intervals at every grid level, paired with their R² value.
pub fn reliable_curve(grid: &ScoreGrid, alpha: f64) -> Result<Vec<(f64, Interval)>> {
    (0..grid.num_levels())
        .map(|l| Ok((grid.x_grid[l], reliable_interval(grid, l, alpha)?)))
        .collect()
}

/// An interpretable interval and whether it had to be extrapolated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interpretable {
    pub interval: Interval,
    /// No grid x had `y` inside its reliable interval; the interval is the
    /// single x whose reliable interval lies nearest to `y`.
    pub extrapolated: bool,
}

/// Smallest interval containing every grid x whose reliable interval holds `y`.
pub fn interpretable_interval(reliable: &[(f64, Interval)], y: f64) -> Interpretable {
    let mut hits = reliable.iter().filter(|(_, r)| r.contains(y)).map(|&(x, _)| x);
    if let Some(first) = hits.next() {
        let (lo, hi) = hits.fold((first, first), |(lo, hi), x| (lo.min(x), hi.max(x)));
        return Interpretable {
            interval: Interval::new(lo, hi),
            extrapolated: false,
        };
    }
    let gap = |r: &Interval| if y < r.lo { r.lo - y } else { y - r.hi };
    let nearest = reliable
        .iter()
        .fold(None::<(f64, f64)>, |best, &(x, r)| match best {
            Some((_, g)) if g <= gap(&r) => best,
            _ => Some((x, gap(&r))),
        })
        .map_or(0.0, |(x, _)| x);
    Interpretable {
        interval: Interval::point(nearest),
        extrapolated: true,
    }
}

/// Reciprocal of an interval width; zero width is perfect equitability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Equitability {
    Finite(f64),
    Perfect,
}

impl Equitability {
    pub fn from_width(width: f64) -> Self {
        if width <= 0.0 {
            Equitability::Perfect
        } else {
            Equitability::Finite(1.0 / width)
        }
    }

    pub fn value(&self) -> f64 {
        match self {
            Equitability::Finite(v) => *v,
            Equitability::Perfect => f64::INFINITY,
        }
    }
}

impl Serialize for Equitability {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Equitability::Finite(v) => s.serialize_f64(*v),
            Equitability::Perfect => s.serialize_str("perfect"),
        }
    }
}

impl<'de> Deserialize<'de> for Equitability {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Text(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(Equitability::Finite(v)),
            Repr::Text(t) if t == "perfect" => Ok(Equitability::Perfect),
            Repr::Text(t) => Err(serde::de::Error::custom(format!("invalid equitability `{t}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReliableRow {
    pub x: f64,
    pub interval: Interval,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpretableRow {
    pub y: f64,
    pub interval: Interval,
    pub extrapolated: bool,
}

/// Reliable and interpretable intervals plus worst/average-case equitability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalTable {
    pub alpha: f64,
    pub reliable: Vec<ReliableRow>,
    pub interpretable: Vec<InterpretableRow>,
    /// Span of the y grid: lowest reliable lower end to highest upper end.
    pub y_range: (f64, f64),
    pub worst_case_width: f64,
    pub average_case_width: f64,
    pub worst_case_equitability: Equitability,
    pub average_case_equitability: Equitability,
    /// Index into `interpretable` of the widest interval (first on ties).
    pub widest: usize,
}

/// Interpretable intervals on a uniform grid of `y_grid_size` statistic values
/// spanning the reliable envelope, with widths measured in R² units.
pub fn equitability_summary(grid: &ScoreGrid, alpha: f64, y_grid_size: usize) -> Result<IntervalTable> {
    assert!(y_grid_size >= 2, "y grid needs at least two points");
    let curve = reliable_curve(grid, alpha)?;
    let y_lo = curve.iter().map(|(_, r)| r.lo).fold(f64::INFINITY, f64::min);
    let y_hi = curve.iter().map(|(_, r)| r.hi).fold(f64::NEG_INFINITY, f64::max);
    let interpretable: Vec<InterpretableRow> = (0..y_grid_size)
        .map(|i| {
            let y = if i + 1 == y_grid_size {
                y_hi
            } else {
                y_lo + (y_hi - y_lo) * i as f64 / (y_grid_size - 1) as f64
            };
            let it = interpretable_interval(&curve, y);
            InterpretableRow {
                y,
                interval: it.interval,
                extrapolated: it.extrapolated,
            }
        })
        .collect();
    let mut widest = 0;
    for (i, row) in interpretable.iter().enumerate() {
        if row.interval.width() > interpretable[widest].interval.width() {
            widest = i;
        }
    }
    let worst = interpretable[widest].interval.width();
    let average = interpretable.iter().map(|r| r.interval.width()).sum::<f64>() / interpretable.len() as f64;
    Ok(IntervalTable {
        alpha,
        reliable: curve
            .into_iter()
            .map(|(x, interval)| ReliableRow { x, interval })
            .collect(),
        interpretable,
        y_range: (y_lo, y_hi),
        worst_case_width: worst,
        average_case_width: average,
        worst_case_equitability: Equitability::from_width(worst),
        average_case_equitability: Equitability::from_width(average),
        widest,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::StatisticDescriptor;

    fn fine_grid(m: usize) -> Vec<f64> {
        (0..m).map(|i| i as f64 / (m - 1) as f64).collect()
    }

    #[test]
    fn reliable_single_function_ranks() {
        // 100 scores 0, 1/99, ..., 1: type-7 quantile at p is exactly p
        let cell: Vec<f64> = (0..100).map(|i| i as f64 / 99.0).collect();
        let g = ScoreGrid::from_scores(
            StatisticDescriptor::new("s"),
            vec!["f".into()],
            vec![0.0],
            vec![vec![cell]],
        )
        .unwrap();
        let r = reliable_interval(&g, 0, 0.1).unwrap();
        assert!((r.lo - 0.05).abs() < 1e-12 && (r.hi - 0.95).abs() < 1e-12, "{r:?}");
    }

    #[test]
    fn reliable_envelope_of_two() {
        // five-point cells whose 5% / 95% type-7 quantiles are (0.3, 0.6) and (0.4, 0.7)
        let cell = |lo: f64, hi: f64| vec![lo, lo, (lo + hi) / 2.0, hi, hi];
        let g = ScoreGrid::from_scores(
            StatisticDescriptor::new("s"),
            vec!["a".into(), "b".into()],
            vec![0.0],
            vec![vec![cell(0.3, 0.6)], vec![cell(0.4, 0.7)]],
        )
        .unwrap();
        let r = reliable_interval(&g, 0, 0.1).unwrap();
        assert_eq!((r.lo, r.hi), (0.3, 0.7));
    }

    #[test]
    fn reliable_constant_scores() {
        let g = ScoreGrid::from_scores(
            StatisticDescriptor::new("s"),
            vec!["a".into(), "b".into()],
            vec![0.0],
            vec![vec![vec![0.4; 30]], vec![vec![0.4; 30]]],
        )
        .unwrap();
        assert_eq!(reliable_interval(&g, 0, 0.1).unwrap(), Interval::point(0.4));
    }

    #[test]
    fn interpretable_band_inversion() {
        let xs = fine_grid(1001);
        let rel: Vec<_> = xs.iter().map(|&x| (x, Interval::new(x - 0.1, x + 0.1))).collect();
        let it = interpretable_interval(&rel, 0.5);
        assert!(!it.extrapolated);
        assert!((it.interval.lo - 0.4).abs() <= 1e-3 && (it.interval.hi - 0.6).abs() <= 1e-3);
    }

    #[test]
    fn interpretable_uninformative_and_perfect() {
        let xs = fine_grid(41);
        let flat: Vec<_> = xs.iter().map(|&x| (x, Interval::new(0.0, 1.0))).collect();
        assert_eq!(interpretable_interval(&flat, 0.37).interval, Interval::new(0.0, 1.0));
        let perfect: Vec<_> = xs.iter().map(|&x| (x, Interval::point(x))).collect();
        assert_eq!(interpretable_interval(&perfect, 0.3).interval, Interval::point(0.3));
    }

    #[test]
    fn interpretable_extrapolates_to_nearest() {
        let rel = vec![
            (0.0, Interval::new(0.0, 0.1)),
            (0.5, Interval::new(0.4, 0.5)),
            (1.0, Interval::new(0.8, 0.9)),
        ];
        let it = interpretable_interval(&rel, 0.95);
        assert!(it.extrapolated);
        assert_eq!(it.interval, Interval::point(1.0));
        let it = interpretable_interval(&rel, 0.3);
        assert_eq!(it.interval, Interval::point(0.5));
    }

    #[test]
    fn equitability_reciprocal() {
        assert_eq!(Equitability::from_width(0.2), Equitability::Finite(5.0));
        assert_eq!(Equitability::from_width(0.0), Equitability::Perfect);
        let text = serde_json::to_string(&[Equitability::Perfect, Equitability::Finite(2.0)]).unwrap();
        assert_eq!(text, r#"["perfect",2.0]"#);
    }

    #[test]
    fn perfect_statistic_summary() {
        let xs = fine_grid(41);
        let g = ScoreGrid::from_scores(
            StatisticDescriptor::new("s"),
            vec!["a".into()],
            xs.clone(),
            vec![xs.iter().map(|&x| vec![x * x; 25]).collect()],
        )
        .unwrap();
        let t = equitability_summary(&g, 0.1, 201).unwrap();
        assert_eq!(t.worst_case_equitability, Equitability::Perfect);
        assert_eq!(t.interpretable.len(), 201);
    }

    #[test]
    fn uninformative_statistic_summary() {
        let xs = fine_grid(41);
        let cell: Vec<f64> = (0..50).map(|i| i as f64 / 49.0).collect();
        let g = ScoreGrid::from_scores(
            StatisticDescriptor::new("s"),
            vec!["a".into()],
            xs.clone(),
            vec![xs.iter().map(|_| cell.clone()).collect()],
        )
        .unwrap();
        let t = equitability_summary(&g, 0.1, 201).unwrap();
        assert_eq!(t.worst_case_width, 1.0);
        assert_eq!(t.worst_case_equitability, Equitability::Finite(1.0));
    }
}
