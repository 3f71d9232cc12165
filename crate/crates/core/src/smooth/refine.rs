//! Discrete outer distance against the smooth one under refinement.
//!
//! A curve sampled at spacing `δ` in its parameter is continued outward; the
//! lattice point `(u, v)` is compared with the smooth chart at
//! `(s, t) = (r_u, v δ)`. Nothing here is asserted: the rows are reported.
//!
//! Continuing outward is a Cauchy problem for a discrete harmonic function and
//! amplifies rounding noise geometrically in the number of levels (the
//! checkerboard mode grows by roughly 5.8 per level), so past about 15 levels
//! the lattice values are dominated by noise.

use super::charts::outer_chart;
use super::curve::AnalyticCurve;
use super::AnalyticError;
use crate::geom::ConvexPolyline;
use crate::outer::propagate_outer;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RefinementRow {
    pub samples: usize,
    pub spacing: f64,
    pub levels: usize,
    /// Largest `|F_discrete - F_smooth|` along the centre column.
    pub max_f_error: f64,
    /// Largest distance between lattice and chart points on that column.
    pub max_point_error: f64,
    /// The smooth `F` at the top of the column, for scale.
    pub f_top: f64,
}

/// One row per entry of `sample_counts`, continuing each sampling up to
/// `t ≈ t_max`. Open curves are sampled symmetrically around the middle of
/// their default range; the circle as a regular polygon.
pub fn refinement_experiment(
    curve: &AnalyticCurve,
    t_max: f64,
    sample_counts: &[usize],
) -> Result<Vec<RefinementRow>, AnalyticError> {
    let (a, b, closed) = curve.default_range();
    let centre = 0.5 * (a + b);
    let mut rows = Vec::new();
    for &count in sample_counts {
        // An odd count puts a lattice column on the centre parameter.
        let n = if closed { count } else { count | 1 };
        let pts = curve.sample(n, a, b, closed)?;
        let spacing = if closed {
            (b - a) / n as f64
        } else {
            (b - a) / (n - 1) as f64
        };
        let poly = ConvexPolyline::new(pts, closed).map_err(|e| AnalyticError::InvalidCurve(e.to_string()))?;
        let mut levels = ((t_max / spacing).round() as usize).max(1);
        if !closed {
            levels = levels.min((n - 1) / 2);
        }
        let grid = propagate_outer(&poly, levels).map_err(|e| AnalyticError::InvalidCurve(e.to_string()))?;
        let (col, s) = if closed {
            (0, a)
        } else {
            (((n - 1) / 2) as isize, centre)
        };
        let mut row = RefinementRow {
            samples: n,
            spacing,
            levels,
            max_f_error: 0.0,
            max_point_error: 0.0,
            f_top: 0.0,
        };
        for v in 1..=levels {
            let smooth = outer_chart(curve, s, v as f64 * spacing)?;
            let (Some(p), Some(f)) = (grid.xy(col, v), grid.f(col, v)) else {
                break;
            };
            row.max_f_error = row.max_f_error.max((f - smooth.f).abs());
            row.max_point_error = row.max_point_error.max((p - smooth.q.xy()).norm());
            row.f_top = smooth.f;
        }
        rows.push(row);
    }
    Ok(rows)
}
