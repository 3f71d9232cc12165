//! Isothermal tangent lines and the region they cut off with the curve.
//!
//! In the coordinates `u = s + t`, `v = s - t` the lines `P(u, v0)` and
//! `P(u0, v)` run from the outer point `P(u0, v0)` to the curve, touching it
//! at `C(v0)` and `C(u0)`.

use super::charts::{outer_chart, outer_point, require_inner};
use super::curve::AnalyticCurve;
use super::AnalyticError;
use crate::geom::{bracket2, shoelace_area, Vec2};
use crate::report::VerificationReport;

/// Outer point in isothermal-line coordinates.
/// Asymptotic parameters `(u0, v0)` at which the catalog curves are probed.
pub fn default_probe(curve: &AnalyticCurve) -> Option<(f64, f64)> {
    use AnalyticCurve::*;
    match curve {
        Parabola | Quartic => Some((1.0, -1.0)),
        Circle => Some((std::f64::consts::FRAC_PI_3, -std::f64::consts::FRAC_PI_3)),
        Hyperbola => Some((0.5, -0.5)),
        Cubic => Some((1.5, 0.5)),
        Polynomial(_) => None,
    }
}

pub fn isothermal_point(curve: &AnalyticCurve, u: f64, v: f64) -> Vec2 {
    outer_point(curve, 0.5 * (u + v), 0.5 * (u - v))
}

/// The two traces from `P(u0, v0)`: `P(u, v0)` for `u` from `u0` down to `v0`
/// and `P(u0, v)` for `v` from `v0` up to `u0`, with `n` segments each.
pub fn isothermal_traces(curve: &AnalyticCurve, u0: f64, v0: f64, n: usize) -> (Vec<Vec2>, Vec<Vec2>) {
    let n = n.max(1);
    let d = u0 - v0;
    let first = (0..=n)
        .map(|k| isothermal_point(curve, u0 - d * k as f64 / n as f64, v0))
        .collect();
    let second = (0..=n)
        .map(|k| isothermal_point(curve, u0, v0 + d * k as f64 / n as f64))
        .collect();
    (first, second)
}

#[derive(Clone, Debug, PartialEq)]
pub struct IsothermalReport {
    /// Sine of the angle between the trace `P(u0, ·)` and `C'(u0)` at `C(u0)`.
    pub tangency_u0: f64,
    /// Same for `P(·, v0)` and `C'(v0)` at `C(v0)`.
    pub tangency_v0: f64,
    /// Largest distance of a trace from the segment joining its ends, over
    /// the segment length (zero for straight traces).
    pub straightness: f64,
    /// First point where a trace meets the curve before its tangency point.
    pub crossing: Option<Vec2>,
}

impl IsothermalReport {
    pub fn crosses(&self) -> bool {
        self.crossing.is_some()
    }

    pub fn to_report(&self, tol: f64) -> VerificationReport {
        let mut r = VerificationReport::new("isothermal tangent lines");
        r.check("tangency at C(u0) (sine of angle)", self.tangency_u0, tol)
            .check("tangency at C(v0) (sine of angle)", self.tangency_v0, tol)
            .note(format!("trace straightness deviation {:.3e}", self.straightness));
        match self.crossing {
            Some(p) => r.note(format!("tangent lines cross the curve at {p}")),
            None => r.note("tangent lines do not cross the curve"),
        };
        r
    }
}

fn sine(a: Vec2, b: Vec2) -> f64 {
    bracket2(a, b).abs() / (a.norm() * b.norm())
}

fn segments_meet(p0: Vec2, p1: Vec2, q0: Vec2, q1: Vec2) -> Option<Vec2> {
    let r = p1 - p0;
    let s = q1 - q0;
    let denom = bracket2(r, s);
    if denom == 0.0 {
        return None;
    }
    let t = bracket2(q0 - p0, s) / denom;
    let w = bracket2(q0 - p0, r) / denom;
    ((0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&w)).then(|| p0 + r * t)
}

fn polyline_deviation(trace: &[Vec2]) -> f64 {
    let (a, b) = (trace[0], trace[trace.len() - 1]);
    let len = (b - a).norm();
    if len == 0.0 {
        return 0.0;
    }
    trace
        .iter()
        .map(|&p| bracket2(b - a, p - a).abs() / (len * len))
        .fold(0.0, f64::max)
}

/// First crossing of either trace with the curve, ignoring the last 2% of
/// each trace before its tangency point. The curve is sampled over its arc
/// `[v0, u0]` widened by a quarter of its length on each side.
fn first_crossing(curve: &AnalyticCurve, u0: f64, v0: f64, traces: [&[Vec2]; 2], n: usize) -> Option<Vec2> {
    let d = u0 - v0;
    let (lo, hi) = (v0 - 0.25 * d, u0 + 0.25 * d);
    let m = 4 * n;
    let arc: Vec<Vec2> = (0..=m)
        .map(|k| curve.point(lo + (hi - lo) * k as f64 / m as f64))
        .collect();
    let keep = ((n as f64) * 0.98).floor() as usize;
    for trace in traces {
        for w in trace[..=keep.min(trace.len() - 1)].windows(2) {
            for c in arc.windows(2) {
                if let Some(p) = segments_meet(w[0], w[1], c[0], c[1]) {
                    return Some(p);
                }
            }
        }
    }
    None
}

/// Tangency of both traces (by central differences along each trace) and
/// detection of early crossings.
pub fn isothermal_tangent_check(
    curve: &AnalyticCurve,
    u0: f64,
    v0: f64,
    n_samples: usize,
) -> Result<IsothermalReport, AnalyticError> {
    require_inner(u0, v0)?;
    let n = n_samples.max(8);
    let delta = 1e-5 * (u0 - v0).max(1e-3);
    let along_second = isothermal_point(curve, u0, u0 + delta) - isothermal_point(curve, u0, u0 - delta);
    let along_first = isothermal_point(curve, v0 + delta, v0) - isothermal_point(curve, v0 - delta, v0);
    let (first, second) = isothermal_traces(curve, u0, v0, n);
    Ok(IsothermalReport {
        tangency_u0: sine(along_second, curve.d1(u0)),
        tangency_v0: sine(along_first, curve.d1(v0)),
        straightness: polyline_deviation(&first).max(polyline_deviation(&second)),
        crossing: first_crossing(curve, u0, v0, [&first, &second], n),
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OuterArea {
    /// Area enclosed by the two traces and the arc `C(r)`, `v0 ≤ r ≤ u0`.
    pub region_area: f64,
    /// `F(P)` at the starting point.
    pub f_value: f64,
    /// `region_area / F`.
    pub ratio: f64,
}

impl OuterArea {
    /// Whether the area equals half of `F` to within `tol` in the ratio.
    pub fn matches_half(&self, tol: f64) -> bool {
        (self.ratio - 0.5).abs() <= tol
    }
}

/// Shoelace area of the loop trace → arc → trace with `n_samples` segments
/// on each piece. Refuses when the traces cross the curve.
pub fn outer_area_oracle(
    curve: &AnalyticCurve,
    u0: f64,
    v0: f64,
    n_samples: usize,
) -> Result<OuterArea, AnalyticError> {
    require_inner(u0, v0)?;
    let n = n_samples.max(8);
    let (first, second) = isothermal_traces(curve, u0, v0, n);
    let probe = n.min(1000);
    let (f2, s2) = isothermal_traces(curve, u0, v0, probe);
    if first_crossing(curve, u0, v0, [&f2, &s2], probe).is_some() {
        return Err(AnalyticError::CrossingTangents);
    }
    let d = u0 - v0;
    let mut loop_pts = first;
    loop_pts.extend((1..=n).map(|k| curve.point(v0 + d * k as f64 / n as f64)));
    // `second` runs from P(u0, v0) to C(u0); walk it backwards.
    loop_pts.extend(second.iter().rev().skip(1).take(n - 1));
    let region_area = shoelace_area(&loop_pts).abs();
    let f_value = outer_chart(curve, 0.5 * (u0 + v0), 0.5 * d)?.f;
    Ok(OuterArea {
        region_area,
        f_value,
        ratio: region_area / f_value,
    })
}
