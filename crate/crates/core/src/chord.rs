//! Brute-force inner area distance straight from its definition: half the
//! smallest area a chord through `p` cuts off from the convex region.
//!
//! Open polylines are closed by the segment `c_0 c_{N-1}`; a chord is only
//! admissible when both of its endpoints lie on the polyline itself, and the
//! area counted is the cap on the polyline side. For closed polygons both sides
//! of a chord are caps and the smaller one is used.

use std::f64::consts::PI;

use thiserror::Error;

use crate::geom::{bracket2, shoelace_area, ConvexPolyline, Vec2};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChordError {
    #[error("point {0} is not strictly inside the region")]
    PointOutside(Vec2),
    #[error("line through the point does not meet the boundary twice")]
    DegenerateChord,
    #[error("chord leaves the curve through the closing segment")]
    Inadmissible,
    #[error("no admissible chord direction found")]
    NoValidChord,
    #[error("need at least 64 angular samples, got {0}")]
    TooFewSamples(usize),
}

/// Minimal chord through a query point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChordResult {
    pub half_area: f64,
    pub endpoint_a: Vec2,
    pub endpoint_b: Vec2,
    /// Distance from the query point to the chord midpoint.
    pub midpoint_residual: f64,
    /// Direction angle of the chord in `[0, π)`.
    pub theta: f64,
}

/// Default coarse scan resolution.
pub const DEFAULT_ANGULAR_SAMPLES: usize = 64;
/// Default golden-section iterations.
pub const DEFAULT_REFINE_ITERS: usize = 40;

fn ensure_inside(poly: &ConvexPolyline, p: Vec2) -> Result<(), ChordError> {
    let v = poly.vertices();
    let n = v.len();
    let scale = poly.diameter();
    let tol = 1e-14 * scale * scale;
    for k in 0..n {
        let a = v[k];
        let b = v[(k + 1) % n];
        let s = bracket2(b - a, p - a);
        // The closing segment of an open polyline is not part of the curve;
        // points on it are still admissible.
        let closing = !poly.is_closed() && k == n - 1;
        if (closing && s < -tol) || (!closing && s <= tol) {
            return Err(ChordError::PointOutside(p));
        }
    }
    Ok(())
}

/// Part of the convex loop `verts` with `[d, x - p] ≤ 0` (or `≥ 0` when
/// `upper`), as a vertex loop.
fn clip_half_plane(verts: &[Vec2], p: Vec2, d: Vec2, upper: bool) -> Vec<Vec2> {
    let side = |x: Vec2| {
        let s = bracket2(d, x - p);
        if upper {
            -s
        } else {
            s
        }
    };
    let n = verts.len();
    let mut out = Vec::with_capacity(n + 2);
    for k in 0..n {
        let a = verts[k];
        let b = verts[(k + 1) % n];
        let (sa, sb) = (side(a), side(b));
        if sa <= 0.0 {
            out.push(a);
        }
        if (sa < 0.0 && sb > 0.0) || (sa > 0.0 && sb < 0.0) {
            let t = sa / (sa - sb);
            out.push(a + (b - a) * t);
        }
    }
    out
}

/// Endpoints of the chord through `p` with direction `d`, as line parameters
/// `t_min < 0 < t_max` along `p + t d`.
fn chord_params(verts: &[Vec2], p: Vec2, d: Vec2) -> Option<(f64, f64)> {
    let n = verts.len();
    let mut t_min = f64::NEG_INFINITY;
    let mut t_max = f64::INFINITY;
    for k in 0..n {
        let a = verts[k];
        let e = verts[(k + 1) % n] - a;
        // Inside means [e, x - a] ≥ 0; along the line: [e, p - a] + t [e, d] ≥ 0.
        let c0 = bracket2(e, p - a);
        let c1 = bracket2(e, d);
        if c1 == 0.0 {
            if c0 < 0.0 {
                return None;
            }
            continue;
        }
        let t = -c0 / c1;
        if c1 > 0.0 {
            t_min = t_min.max(t);
        } else {
            t_max = t_max.min(t);
        }
    }
    (t_min.is_finite() && t_max.is_finite() && t_min < t_max).then_some((t_min, t_max))
}

fn direction(theta: f64) -> Vec2 {
    Vec2::new(theta.cos(), theta.sin())
}

/// Half-area and chord for a direction, without the inside test.
fn evaluate(poly: &ConvexPolyline, p: Vec2, theta: f64) -> Result<ChordResult, ChordError> {
    let verts = poly.vertices();
    let d = direction(theta);
    let (t_min, t_max) = chord_params(verts, p, d).ok_or(ChordError::DegenerateChord)?;
    let a = p + d * t_min;
    let b = p + d * t_max;
    let lower = shoelace_area(&clip_half_plane(verts, p, d, false)).abs();
    let upper = shoelace_area(&clip_half_plane(verts, p, d, true)).abs();

    let area = if poly.is_closed() {
        lower.min(upper)
    } else {
        let n = verts.len();
        let s0 = bracket2(d, verts[0] - p);
        let s1 = bracket2(d, verts[n - 1] - p);
        let tol = 1e-12 * poly.diameter() * d.norm();
        if (s0 < -tol && s1 > tol) || (s0 > tol && s1 < -tol) {
            return Err(ChordError::Inadmissible);
        }
        // The cap is the side away from the closing segment; when the chord
        // is the closing segment itself the whole region is the cap.
        let sum = s0 + s1;
        if sum > tol {
            lower
        } else if sum < -tol {
            upper
        } else {
            lower.max(upper)
        }
    };
    Ok(ChordResult {
        half_area: 0.5 * area,
        endpoint_a: a,
        endpoint_b: b,
        midpoint_residual: 0.5 * (t_min + t_max).abs() * d.norm(),
        theta,
    })
}

/// Half the area cut off by the line through `p` with direction angle `theta`.
pub fn cut_half_area(poly: &ConvexPolyline, p: Vec2, theta: f64) -> Result<f64, ChordError> {
    ensure_inside(poly, p)?;
    evaluate(poly, p, theta).map(|r| r.half_area)
}

/// Minimal chord through `p`: a coarse scan over `θ ∈ [0, π)` followed by
/// golden-section refinement in the bracket around the best sample.
/// Inadmissible directions count as `+∞`.
pub fn min_chord_area(
    poly: &ConvexPolyline,
    p: Vec2,
    angular_samples: usize,
    refine_iters: usize,
) -> Result<ChordResult, ChordError> {
    if angular_samples < 64 {
        return Err(ChordError::TooFewSamples(angular_samples));
    }
    ensure_inside(poly, p)?;
    let objective = |theta: f64| evaluate(poly, p, theta).map_or(f64::INFINITY, |r| r.half_area);

    let step = PI / angular_samples as f64;
    let (best_k, best_val) = (0..angular_samples)
        .map(|k| (k, objective(k as f64 * step)))
        .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
    if !best_val.is_finite() {
        return Err(ChordError::NoValidChord);
    }

    let theta = golden_section(
        objective,
        (best_k as f64 - 1.0) * step,
        (best_k as f64 + 1.0) * step,
        refine_iters,
    );
    let mut best = evaluate(poly, p, best_k as f64 * step)?;
    if let Ok(r) = evaluate(poly, p, theta) {
        if r.half_area <= best.half_area {
            best = r;
        }
    }
    best.theta = best.theta.rem_euclid(PI);
    Ok(best)
}

/// Golden-section search for a minimiser of a unimodal `g` on `[lo, hi]`.
pub fn golden_section(g: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, iters: usize) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut g1 = g(x1);
    let mut g2 = g(x2);
    for _ in 0..iters {
        if g1 <= g2 {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - inv_phi * (hi - lo);
            g1 = g(x1);
        } else {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + inv_phi * (hi - lo);
            g2 = g(x2);
        }
    }
    if g1 <= g2 {
        x1
    } else {
        x2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inner::{build_inner_grid, eval_bilinear};
    use crate::random::parabola_samples;

    fn unit_square() -> ConvexPolyline {
        ConvexPolyline::new(
            vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(1.0, 0.0),
                Vec2::new(1.0, 1.0),
                Vec2::new(0.0, 1.0),
            ],
            true,
        )
        .unwrap()
    }

    #[test]
    fn square_center_bisects() {
        let sq = unit_square();
        let c = Vec2::new(0.5, 0.5);
        for k in 0..12 {
            let h = cut_half_area(&sq, c, k as f64 * 0.37).unwrap();
            assert!((h - 0.25).abs() < 1e-15, "{h}");
        }
        let r = min_chord_area(&sq, c, 64, 40).unwrap();
        assert!((r.half_area - 0.25).abs() < 1e-15);
        assert!(r.midpoint_residual < 1e-12);
    }

    #[test]
    fn triangle_closing_chord() {
        let tri = ConvexPolyline::new(
            vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(2.0, 1.0)],
            false,
        )
        .unwrap();
        // p(0,2) lies on the closing segment; the chord along it cuts off the
        // whole triangle.
        let along = 1f64.atan2(2.0);
        let h = cut_half_area(&tri, Vec2::new(1.0, 0.5), along).unwrap();
        assert!((h - 0.25).abs() < 1e-15, "{h}");
        assert!(matches!(
            cut_half_area(&tri, Vec2::new(1.0, 0.6), along),
            Err(ChordError::PointOutside(_))
        ));
        // Slightly inside, the same direction cuts off almost the whole triangle.
        let h = cut_half_area(&tri, Vec2::new(1.0, 0.5 - 1e-9), along).unwrap();
        assert!((h - 0.25).abs() < 1e-8);
    }

    #[test]
    fn parabola_chord_through_grid_point() {
        let poly = parabola_samples(5);
        let p = Vec2::new(1.0, 1.0); // p(0, 2)
        let theta = 2f64.atan2(2.0);
        assert!((cut_half_area(&poly, p, theta).unwrap() - 0.25).abs() < 1e-15);
        let r = min_chord_area(&poly, p, 64, 40).unwrap();
        assert!((r.half_area - 0.25).abs() < 1e-6, "{r:?}");
        assert!(r.midpoint_residual < 1e-4);
    }

    #[test]
    fn parabola_bilinear_center() {
        let poly = parabola_samples(5);
        let g = build_inner_grid(&poly, 4).unwrap();
        let (pt, v) = eval_bilinear(&g, 0, 2, 0.5, 0.5).unwrap();
        let r = min_chord_area(&poly, pt, 64, 40).unwrap();
        assert!((r.half_area - v).abs() < 1e-6, "{} vs {}", r.half_area, v);
        assert!(r.midpoint_residual < 1e-6);
    }

    #[test]
    fn inadmissible_and_outside() {
        let poly = parabola_samples(5);
        let p = Vec2::new(2.0, 3.0);
        // A steep chord through this point exits through the closing segment.
        assert_eq!(cut_half_area(&poly, p, PI / 2.0), Err(ChordError::Inadmissible));
        assert!(matches!(
            cut_half_area(&poly, Vec2::new(2.0, -1.0), 0.0),
            Err(ChordError::PointOutside(_))
        ));
        assert_eq!(
            min_chord_area(&poly, p, 16, 40).unwrap_err(),
            ChordError::TooFewSamples(16)
        );
    }

    #[test]
    fn refinement_beats_dense_scan() {
        let poly = parabola_samples(7);
        let g = build_inner_grid(&poly, 6).unwrap();
        let (pt, _) = eval_bilinear(&g, 1, 4, 0.3, 0.6).unwrap();
        let r = min_chord_area(&poly, pt, 64, 40).unwrap();
        let dense = (0..64 * 16)
            .filter_map(|k| cut_half_area(&poly, pt, k as f64 * PI / 1024.0).ok())
            .fold(f64::INFINITY, f64::min);
        assert!(r.half_area <= dense + 1e-8);
    }

    #[test]
    fn golden_section_quadratic() {
        let x = golden_section(|x| (x - 0.3) * (x - 0.3), 0.0, 1.0, 60);
        assert!((x - 0.3).abs() < 1e-8);
    }
}
