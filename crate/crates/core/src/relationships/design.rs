use super::FunctionSpec;

/// Number of fine-grid intervals used to measure arc length.
pub const ARC_GRID: usize = 10_000;

/// Cumulative polyline length of the graph of f on a uniform fine grid.
fn cumulative_length(function: &FunctionSpec) -> Vec<f64> {
    let h = 1.0 / ARC_GRID as f64;
    let mut cum = Vec::with_capacity(ARC_GRID + 1);
    cum.push(0.0);
    let mut prev = function.eval(0.0);
    let mut total = 0.0;
    for i in 1..=ARC_GRID {
        let y = function.eval(i as f64 * h);
        total += h.hypot(y - prev);
        cum.push(total);
        prev = y;
    }
    cum
}

/// Arc length of the graph from 0 to `x`, interpolated along the fine polyline.
pub fn arc_length_to(function: &FunctionSpec, x: f64) -> f64 {
    let cum = cumulative_length(function);
    length_at(&cum, x)
}

fn length_at(cum: &[f64], x: f64) -> f64 {
    let t = x.clamp(0.0, 1.0) * ARC_GRID as f64;
    let s = (t.floor() as usize).min(ARC_GRID - 1);
    let frac = t - s as f64;
    cum[s] + frac * (cum[s + 1] - cum[s])
}

/// `n` x-values whose points (x, f(x)) are equally spaced along the graph of f.
///
/// The graph is approximated by its polyline on [`ARC_GRID`] uniform steps
/// (well defined even for the step and spike functions) and cumulative length
/// is inverted by linear interpolation. Endpoints are exactly 0 and 1.
pub fn arc_length_design(function: &FunctionSpec, n: usize) -> Vec<f64> {
    assert!(n >= 2, "arc-length design needs n >= 2");
    let cum = cumulative_length(function);
    let total = cum[ARC_GRID];
    let h = 1.0 / ARC_GRID as f64;
    let mut xs = Vec::with_capacity(n);
    let mut seg = 0;
    for j in 0..n {
        if j == 0 {
            xs.push(0.0);
            continue;
        }
        if j == n - 1 {
            xs.push(1.0);
            continue;
        }
        let target = total * j as f64 / (n - 1) as f64;
        while seg + 1 < ARC_GRID && cum[seg + 1] < target {
            seg += 1;
        }
        let span = cum[seg + 1] - cum[seg];
        let frac = if span > 0.0 {
            ((target - cum[seg]) / span).clamp(0.0, 1.0)
        } else {
            0.0
        };
        xs.push((seg as f64 + frac) * h);
    }
    xs
}
