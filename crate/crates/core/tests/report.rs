//! Table and figure output: formats, round trips and determinism.

use equilab::analysis::{
    detection_threshold, equitability_summary, power_surface, theorem1_consistency, Equitability, ScoreGrid,
};
use equilab::measures::{OutputUnit, StatisticDescriptor};
use equilab::report::{
    interval_plot_svg, intervals_csv, power_csv, power_heatmap_svg, write_tables, RunManifest, Summary,
};

fn x_grid(m: usize) -> Vec<f64> {
    (0..m).map(|i| i as f64 / (m - 1) as f64).collect()
}

/// Two functions whose scores spread around x and x² by a fixed pattern.
fn grid(m: usize) -> ScoreGrid {
    let xs = x_grid(m);
    let cells = |g: fn(f64) -> f64| -> Vec<Vec<f64>> {
        xs.iter()
            .map(|&x| (0..30).map(|r| g(x) + 0.02 * ((r * 7 % 30) as f64 - 14.5)).collect())
            .collect()
    };
    ScoreGrid::from_scores(
        StatisticDescriptor::new("synthetic"),
        vec!["a".into(), "b<&>".into()],
        xs.clone(),
        vec![cells(|x| x), cells(|x| x * x)],
    )
    .unwrap()
}

fn manifest() -> RunManifest {
    RunManifest {
        config_hash: "0".repeat(64),
        software_version: "test".into(),
        preset: "fig2".into(),
        design: "uniform-random".into(),
        noise: "y-only".into(),
        r2_mode: "denoised-design".into(),
        statistics: vec![StatisticDescriptor::new("synthetic")],
        functions: vec!["a".into(), "b<&>".into()],
        n: 0,
        replicates: 30,
        r2_levels: 11,
        y_grid_size: 21,
        alpha: 0.1,
        beta: 0.05,
        calibration_tol: 0.002,
        master_seed: 0,
    }
}

fn summary(g: &ScoreGrid, y_grid: usize) -> Summary {
    let table = equitability_summary(g, 0.1, y_grid).unwrap();
    let surface = power_surface(g, 0.05).unwrap();
    let det = detection_threshold(g, 0.05, 0.05).unwrap();
    let cons = theorem1_consistency(g, 0.1).unwrap();
    Summary::new(g, OutputUnit::UnitInterval, &table, &surface, &det, &cons, manifest())
}

#[test]
fn intervals_csv_has_one_row_per_grid_point() {
    let g = grid(11);
    let table = equitability_summary(&g, 0.1, 21).unwrap();
    let csv = intervals_csv(&table);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "kind,anchor,lo,hi,flag");
    assert_eq!(lines.len() - 1, 11 + 21);
    assert!(!csv.contains('\r'));
    for line in &lines[1..] {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols.len(), 5);
        let lo: f64 = cols[2].parse().unwrap();
        let hi: f64 = cols[3].parse().unwrap();
        assert!(lo <= hi);
    }
}

#[test]
fn summary_equitability_is_reciprocal_of_csv_width() {
    let g = grid(11);
    let table = equitability_summary(&g, 0.1, 21).unwrap();
    let worst = intervals_csv(&table)
        .lines()
        .filter(|l| l.starts_with("interpretable"))
        .map(|l| {
            let c: Vec<f64> = l.split(',').skip(2).take(2).map(|v| v.parse().unwrap()).collect();
            c[1] - c[0]
        })
        .fold(0.0, f64::max);
    let s = summary(&g, 21);
    assert_eq!(s.worst_case_width, worst);
    match s.worst_case_equitability {
        Equitability::Finite(e) => assert_eq!(e, 1.0 / worst),
        Equitability::Perfect => panic!("synthetic grid has nonzero width"),
    }
}

#[test]
fn single_level_power_csv_is_header_only() {
    let g = ScoreGrid::from_scores(
        StatisticDescriptor::new("s"),
        vec!["a".into()],
        vec![0.0],
        vec![vec![vec![0.1; 20]]],
    )
    .unwrap();
    let surface = power_surface(&g, 0.05).unwrap();
    assert_eq!(power_csv(&surface), "x0,x1,power,critical_value\n");
    let svg = power_heatmap_svg(&surface, "one row");
    roxmltree::Document::parse(&svg).unwrap();
}

#[test]
fn summary_json_round_trips_byte_identically() {
    let s = summary(&grid(11), 21);
    let text = s.to_canonical_json().unwrap();
    let back: Summary = serde_json::from_str(&text).unwrap();
    assert_eq!(back, s);
    assert_eq!(back.to_canonical_json().unwrap(), text);
    let value: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(equilab::report::canonical_json(&value).unwrap(), text);
}

#[test]
fn written_files_round_trip_numbers() {
    let g = grid(6);
    let table = equitability_summary(&g, 0.1, 11).unwrap();
    let surface = power_surface(&g, 0.05).unwrap();
    let s = summary(&g, 11);
    let dir = tempfile::tempdir().unwrap();
    let files = write_tables(&g, &table, &surface, &s, dir.path()).unwrap();
    assert_eq!(files.len(), 4);
    let power = std::fs::read_to_string(dir.path().join("power.csv")).unwrap();
    let rows: Vec<&str> = power.lines().skip(1).collect();
    assert_eq!(rows.len(), 6 * 5 / 2);
    let mut it = rows.iter();
    for row in &surface.rows {
        for &(x1, p) in row.power.iter().filter(|(x1, _)| *x1 > row.x0) {
            let c: Vec<f64> = it.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
            assert_eq!([c[0], c[1], c[2], c[3]], [row.x0, x1, p, row.critical_value]);
        }
    }
    let quant = std::fs::read_to_string(dir.path().join("quantiles.csv")).unwrap();
    assert_eq!(quant.lines().count(), 1 + 2 * 6 * 3);
}

#[test]
fn svgs_are_valid_deterministic_and_self_contained() {
    let g = grid(11);
    let table = equitability_summary(&g, 0.1, 21).unwrap();
    let surface = power_surface(&g, 0.05).unwrap();
    for svg in [
        interval_plot_svg(&g, &table).unwrap(),
        power_heatmap_svg(&surface, "synthetic"),
    ] {
        let doc = roxmltree::Document::parse(&svg).unwrap();
        assert_eq!(doc.root_element().tag_name().name(), "svg");
        assert!(!svg.contains("href"));
        assert!(!svg.contains("url("));
    }
    assert_eq!(
        interval_plot_svg(&g, &table).unwrap(),
        interval_plot_svg(&g, &table).unwrap()
    );
    assert_eq!(power_heatmap_svg(&surface, "t"), power_heatmap_svg(&surface, "t"));
}

#[test]
fn heatmap_has_one_cell_per_pair() {
    let g = grid(5);
    let surface = power_surface(&g, 0.05).unwrap();
    let svg = power_heatmap_svg(&surface, "t");
    let cells = svg.matches("<title>x0=").count();
    assert_eq!(cells, 5 * 6 / 2);
}

#[test]
fn perfect_statistic_bands_collapse() {
    let xs = x_grid(11);
    let g = ScoreGrid::from_scores(
        StatisticDescriptor::new("perfect"),
        vec!["a".into()],
        xs.clone(),
        vec![xs.iter().map(|&x| vec![x; 20]).collect()],
    )
    .unwrap();
    let table = equitability_summary(&g, 0.1, 21).unwrap();
    assert_eq!(table.worst_case_equitability, Equitability::Perfect);
    let svg = interval_plot_svg(&g, &table).unwrap();
    roxmltree::Document::parse(&svg).unwrap();
    let surface = power_surface(&g, 0.05).unwrap();
    // every off-diagonal cell is saturated
    assert!(surface
        .rows
        .iter()
        .all(|r| r.power.iter().all(|&(x1, p)| x1 == r.x0 || p == 1.0)));
}
