//! Exact star discrepancy for one- and two-dimensional point sets.

use crate::error::{Error, Result};
use crate::pointset::PointSet;

/// `sup_x |#{x_i in [0,x)}/n - vol([0,x))|` over anchored boxes.
///
/// The supremum is attained in the limit at corners built from point
/// coordinates and 1; each corner is evaluated both with the boundary points
/// counted (approached from above) and excluded (approached from below).
pub fn star_discrepancy(set: &PointSet) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::Contract("discrepancy of an empty set".into()));
    }
    let values = set.to_values();
    match set.dim() {
        1 => Ok(discrepancy_1d(values.iter().map(|p| p[0]).collect())),
        2 => Ok(discrepancy_2d(&values)),
        d => Err(Error::Unsupported(format!(
            "star discrepancy is only computed for d <= 2, got d = {d}"
        ))),
    }
}

fn discrepancy_1d(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let above = (i + 1) as f64 / n - x;
            let below = x - i as f64 / n;
            above.max(below)
        })
        .fold(0.0, f64::max)
}

fn grid(coords: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut g: Vec<f64> = coords.chain(std::iter::once(1.0)).collect();
    g.sort_by(f64::total_cmp);
    g.dedup();
    g
}

fn discrepancy_2d(points: &[Vec<f64>]) -> f64 {
    let n = points.len() as f64;
    let mut by_x: Vec<(f64, f64)> = points.iter().map(|p| (p[0], p[1])).collect();
    by_x.sort_by(|a, b| a.0.total_cmp(&b.0));
    let xs = grid(by_x.iter().map(|p| p.0));
    let ys = grid(by_x.iter().map(|p| p.1));

    let mut worst: f64 = 0.0;
    // ys of points with x < X (open) and x <= X (closed), kept sorted
    let mut open: Vec<f64> = Vec::with_capacity(by_x.len());
    let mut next = 0;
    for &x in &xs {
        while next < by_x.len() && by_x[next].0 < x {
            let y = by_x[next].1;
            let at = open.partition_point(|&v| v < y);
            open.insert(at, y);
            next += 1;
        }
        let mut closed = open.clone();
        let mut k = next;
        while k < by_x.len() && by_x[k].0 == x {
            let y = by_x[k].1;
            let at = closed.partition_point(|&v| v < y);
            closed.insert(at, y);
            k += 1;
        }
        for &y in &ys {
            let volume = x * y;
            let strictly_inside = open.partition_point(|&v| v < y) as f64;
            let touching = closed.partition_point(|&v| v <= y) as f64;
            worst = worst.max(touching / n - volume).max(volume - strictly_inside / n);
        }
    }
    worst
}
