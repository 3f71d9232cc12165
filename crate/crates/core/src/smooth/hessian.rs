//! Finite-difference checks of the Monge–Ampère identities. The distance is
//! known only through a chart, so each off-grid value is found by inverting
//! the chart with damped Newton.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;

use super::charts::{inner_chart, inner_point, outer_chart, outer_point, require_inner, require_outer};
use super::curve::AnalyticCurve;
use super::AnalyticError;
use crate::geom::{bracket2, Vec2};

/// Which side of the curve a chart describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Asymptotic parameters `(u, v)`, `u > v`; `det D²f = -1`.
    Inner,
    /// Isothermal parameters `(s, t)`, `t > 0`; `det D²F = +1`.
    Outer,
}

impl Side {
    pub fn target_det(self) -> f64 {
        match self {
            Side::Inner => -1.0,
            Side::Outer => 1.0,
        }
    }
}

/// Samples on which the identities are asserted: `|ω|` or `|Ω|` must exceed this.
pub const DEGENERACY_GUARD: f64 = 0.05;
/// Default finite-difference step.
pub const DEFAULT_STEP: f64 = 1e-3;

const NEWTON_TOL: f64 = 1e-12;
const NEWTON_MAX_ITERS: usize = 50;

/// Rectangle of chart parameters sampled on an `n × n` grid (corners included).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SampleRegion {
    pub a: (f64, f64),
    pub b: (f64, f64),
    pub n: usize,
}

impl SampleRegion {
    pub fn new(a: (f64, f64), b: (f64, f64), n: usize) -> Self {
        Self { a, b, n }
    }

    /// Regions away from chart degeneracies used by the acceptance checks.
    pub fn guarded(curve: &AnalyticCurve, side: Side) -> Result<Self, AnalyticError> {
        use AnalyticCurve::*;
        let n = 7;
        let r = match (side, curve) {
            (Side::Inner, Parabola) | (Side::Inner, Hyperbola) => ((0.5, 1.5), (-1.5, -0.5)),
            (Side::Inner, Circle) => ((0.3, 1.2), (-1.2, -0.3)),
            (Side::Inner, Cubic) | (Side::Inner, Quartic) => ((1.0, 2.0), (-0.5, 0.5)),
            (Side::Outer, Parabola) => ((-1.0, 1.0), (0.2, 1.0)),
            (Side::Outer, Circle) => ((0.0, FRAC_PI_2), (0.2, 1.0)),
            (Side::Outer, Hyperbola) => ((-0.5, 0.5), (0.2, 1.0)),
            (Side::Outer, Cubic) => ((0.5, 1.5), (0.2, 1.0)),
            (Side::Outer, Quartic) => ((1.0, 2.0), (0.2, 0.8)),
            (_, Polynomial(_)) => return Err(AnalyticError::UnsupportedKind("poly")),
        };
        Ok(Self::new(r.0, r.1, n))
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let lerp = |(lo, hi): (f64, f64), k: usize| {
            if self.n <= 1 {
                0.5 * (lo + hi)
            } else {
                lo + (hi - lo) * k as f64 / (self.n - 1) as f64
            }
        };
        (0..self.n).flat_map(move |i| (0..self.n).map(move |j| (lerp(self.a, i), lerp(self.b, j))))
    }
}

/// Point, distance and the two Jacobian columns of the chart at `(a, b)`.
fn chart(curve: &AnalyticCurve, side: Side, a: f64, b: f64) -> Result<(Vec2, f64, Vec2, Vec2, f64), AnalyticError> {
    match side {
        Side::Inner => {
            let ch = inner_chart(curve, a, b)?;
            Ok((ch.q.xy(), ch.f, curve.d1(a) * 0.5, curve.d1(b) * 0.5, ch.omega))
        }
        Side::Outer => {
            let ch = outer_chart(curve, a, b)?;
            let d = curve.d1_c(Complex64::new(a, b));
            // P_s = Re C'(z), P_t = -Im C'(z)
            Ok((
                ch.q.xy(),
                ch.f,
                Vec2::new(d[0].re, d[1].re),
                Vec2::new(-d[0].im, -d[1].im),
                ch.omega,
            ))
        }
    }
}

fn chart_point(curve: &AnalyticCurve, side: Side, a: f64, b: f64) -> Vec2 {
    match side {
        Side::Inner => inner_point(curve, a, b),
        Side::Outer => outer_point(curve, a, b),
    }
}

fn in_domain(side: Side, a: f64, b: f64) -> bool {
    match side {
        Side::Inner => require_inner(a, b).is_ok(),
        Side::Outer => require_outer(a, b).is_ok(),
    }
}

/// Chart parameters of the plane point `target`, starting from `seed`.
pub fn invert_chart(
    curve: &AnalyticCurve,
    side: Side,
    target: Vec2,
    seed: (f64, f64),
) -> Result<(f64, f64), AnalyticError> {
    let scale = 1.0 + target.norm();
    let (mut a, mut b) = seed;
    let mut res = target - chart_point(curve, side, a, b);
    for _ in 0..NEWTON_MAX_ITERS {
        if res.norm() <= 0.01 * NEWTON_TOL * scale {
            break;
        }
        let (_, _, ja, jb, _) = chart(curve, side, a, b)?;
        let det = bracket2(ja, jb);
        if det == 0.0 || !det.is_finite() {
            break;
        }
        // Solve [ja | jb] (da, db) = res by Cramer's rule.
        let da = bracket2(res, jb) / det;
        let db = bracket2(ja, res) / det;
        let mut lambda = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let (na, nb) = (a + lambda * da, b + lambda * db);
            if in_domain(side, na, nb) {
                let nres = target - chart_point(curve, side, na, nb);
                if nres.norm() < res.norm() {
                    (a, b, res) = (na, nb, nres);
                    accepted = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    if res.norm() <= NEWTON_TOL * scale {
        Ok((a, b))
    } else {
        Err(AnalyticError::ChartInversionFailed { residual: res.norm() })
    }
}

/// Distance at the plane point `target`, inverting the chart near `seed`.
fn value_at(curve: &AnalyticCurve, side: Side, target: Vec2, seed: (f64, f64)) -> Result<f64, AnalyticError> {
    let (a, b) = invert_chart(curve, side, target, seed)?;
    Ok(chart(curve, side, a, b)?.1)
}

fn hessian_plain(
    curve: &AnalyticCurve,
    side: Side,
    (a, b): (f64, f64),
    p: Vec2,
    f0: f64,
    h: f64,
) -> Result<[[f64; 2]; 2], AnalyticError> {
    let at = |dx: f64, dy: f64| value_at(curve, side, p + Vec2::new(dx, dy) * h, (a, b));
    let h2 = h * h;
    let fxx = (at(1.0, 0.0)? - 2.0 * f0 + at(-1.0, 0.0)?) / h2;
    let fyy = (at(0.0, 1.0)? - 2.0 * f0 + at(0.0, -1.0)?) / h2;
    let fxy = (at(1.0, 1.0)? - at(1.0, -1.0)? - at(-1.0, 1.0)? + at(-1.0, -1.0)?) / (4.0 * h2);
    Ok([[fxx, fxy], [fxy, fyy]])
}

/// Hessian of the distance with respect to the plane position at the chart
/// point `(a, b)`: central differences at `step` and `step / 2`, combined by
/// one Richardson extrapolation so the error is fourth order in `step`.
pub fn hessian_fd(
    curve: &AnalyticCurve,
    side: Side,
    a: f64,
    b: f64,
    step: f64,
) -> Result<[[f64; 2]; 2], AnalyticError> {
    if step <= 0.0 {
        return Err(AnalyticError::DomainViolation(format!(
            "step must be positive, got {step}"
        )));
    }
    let (p, f0, ..) = chart(curve, side, a, b)?;
    let coarse = hessian_plain(curve, side, (a, b), p, f0, step)?;
    let fine = hessian_plain(curve, side, (a, b), p, f0, 0.5 * step)?;
    let mut out = [[0.0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = (4.0 * fine[i][j] - coarse[i][j]) / 3.0;
        }
    }
    Ok(out)
}

/// Central-difference gradient of the distance at the chart point `(a, b)`,
/// Richardson-extrapolated from `step` and `step / 2`.
pub fn gradient_fd(curve: &AnalyticCurve, side: Side, a: f64, b: f64, step: f64) -> Result<Vec2, AnalyticError> {
    let (p, ..) = chart(curve, side, a, b)?;
    let central = |h: f64| -> Result<Vec2, AnalyticError> {
        let at = |dx: f64, dy: f64| value_at(curve, side, p + Vec2::new(dx, dy) * h, (a, b));
        Ok(Vec2::new(
            (at(1.0, 0.0)? - at(-1.0, 0.0)?) / (2.0 * h),
            (at(0.0, 1.0)? - at(0.0, -1.0)?) / (2.0 * h),
        ))
    };
    Ok((central(0.5 * step)? * 4.0 - central(step)?) / 3.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HessianResidual {
    /// `max |det D² - target|` over the checked samples.
    pub max_residual: f64,
    pub checked: usize,
    /// Samples skipped by the degeneracy guard.
    pub skipped: usize,
}

pub fn hessian_det_residual(
    curve: &AnalyticCurve,
    side: Side,
    region: &SampleRegion,
    step: f64,
) -> Result<HessianResidual, AnalyticError> {
    let mut out = HessianResidual {
        max_residual: 0.0,
        checked: 0,
        skipped: 0,
    };
    for (a, b) in region.points() {
        let (.., omega) = chart(curve, side, a, b)?;
        if omega.abs() <= DEGENERACY_GUARD {
            out.skipped += 1;
            continue;
        }
        let h = hessian_fd(curve, side, a, b, step)?;
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        out.max_residual = out.max_residual.max((det - side.target_det()).abs());
        out.checked += 1;
    }
    Ok(out)
}

/// Finite-difference values of `D²f(C'(u), C'(u))` and
/// `D²f(C'(u), C'(v)) - [C'(u), C'(v)]`; both vanish.
pub fn asymptotic_annihilation(curve: &AnalyticCurve, u: f64, v: f64, step: f64) -> Result<(f64, f64), AnalyticError> {
    let h = hessian_fd(curve, Side::Inner, u, v, step)?;
    let form = |x: Vec2, y: Vec2| x.x * (h[0][0] * y.x + h[0][1] * y.y) + x.y * (h[1][0] * y.x + h[1][1] * y.y);
    let (cu, cv) = (curve.d1(u), curve.d1(v));
    Ok((form(cu, cu).abs(), (form(cu, cv) - bracket2(cu, cv)).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smooth::charts::{grad_f, grad_outer};

    #[test]
    fn newton_recovers_parameters() {
        let curve = AnalyticCurve::Circle;
        let p = inner_point(&curve, 1.0, -0.4);
        let (u, v) = invert_chart(&curve, Side::Inner, p, (0.9, -0.3)).unwrap();
        assert!((u - 1.0).abs() < 1e-10 && (v + 0.4).abs() < 1e-10);
        let p = outer_point(&curve, 0.3, 0.7);
        let (s, t) = invert_chart(&curve, Side::Outer, p, (0.35, 0.6)).unwrap();
        assert!((s - 0.3).abs() < 1e-10 && (t - 0.7).abs() < 1e-10);
        // A point outside the circle has no inner chart parameters.
        let far = Vec2::new(3.0, 0.0);
        assert!(matches!(
            invert_chart(&curve, Side::Inner, far, (0.9, -0.3)),
            Err(AnalyticError::ChartInversionFailed { .. })
        ));
    }

    #[test]
    fn monge_ampere_on_catalog() {
        for curve in AnalyticCurve::CATALOG {
            for side in [Side::Inner, Side::Outer] {
                let region = SampleRegion::guarded(&curve, side).unwrap();
                let r = hessian_det_residual(&curve, side, &region, DEFAULT_STEP).unwrap();
                assert!(r.max_residual <= 1e-4, "{curve} {side:?}: {}", r.max_residual);
                assert!(r.checked > 0);
            }
        }
    }

    #[test]
    fn monge_ampere_on_unimodular_image() {
        let (c, s) = (0.6f64.cos(), 0.6f64.sin());
        for m in [[[c, -s], [s, c]], [[1.0, 0.3], [0.0, 1.0]]] {
            let img = AnalyticCurve::Parabola.affine_image(m, Vec2::new(1.0, 2.0)).unwrap();
            for side in [Side::Inner, Side::Outer] {
                let region = SampleRegion::guarded(&AnalyticCurve::Parabola, side).unwrap();
                let r = hessian_det_residual(&img, side, &region, DEFAULT_STEP).unwrap();
                assert!(r.max_residual <= 1e-4, "{side:?}: {}", r.max_residual);
            }
        }
    }

    #[test]
    fn gradients_match_differences() {
        for curve in AnalyticCurve::CATALOG {
            let inner = SampleRegion::guarded(&curve, Side::Inner).unwrap();
            let (u, v) = (0.5 * (inner.a.0 + inner.a.1), 0.5 * (inner.b.0 + inner.b.1) - 0.2);
            let fd = gradient_fd(&curve, Side::Inner, u, v, 1e-4).unwrap();
            assert!((fd - grad_f(&curve, u, v).unwrap()).norm() < 1e-5, "{curve} inner");
            let outer = SampleRegion::guarded(&curve, Side::Outer).unwrap();
            let (s, t) = (0.5 * (outer.a.0 + outer.a.1), 0.5 * (outer.b.0 + outer.b.1));
            let fd = gradient_fd(&curve, Side::Outer, s, t, 1e-4).unwrap();
            assert!((fd - grad_outer(&curve, s, t).unwrap()).norm() < 1e-5, "{curve} outer");
        }
    }

    #[test]
    fn asymptotic_directions_annihilate() {
        for curve in AnalyticCurve::CATALOG {
            let region = SampleRegion::guarded(&curve, Side::Inner).unwrap();
            for (u, v) in SampleRegion::new(region.a, region.b, 3).points() {
                let (a, b) = asymptotic_annihilation(&curve, u, v, DEFAULT_STEP).unwrap();
                assert!(a <= 1e-4 && b <= 1e-4, "{curve} at ({u},{v}): {a} {b}");
            }
        }
    }

    #[test]
    fn bad_step_and_kind() {
        assert!(hessian_fd(&AnalyticCurve::Parabola, Side::Inner, 1.0, -1.0, 0.0).is_err());
        let poly = AnalyticCurve::polynomial(vec![0.0, 1.0], vec![0.0, 0.0, 1.0]).unwrap();
        assert!(SampleRegion::guarded(&poly, Side::Inner).is_err());
    }
}
