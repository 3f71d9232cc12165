//! Inner charts `(u, v) ↦ q(u, v)` in asymptotic parameters and outer charts
//! `(s, t) ↦ Q(s, t)` in isothermal parameters.
//!
//! For any curve the inner distance has the closed expression
//! `f(u, v) = ¼ (G(u) - G(v) - [C(v), C(u)])` with `G' = [C, C']`, which is
//! exact for polynomial curves. The outer chart is its continuation to
//! `u = s + it`, `v = s - it`: `P = ½ (C(z) + C(z̄))`, `F = i f(z, z̄)`.

use num_complex::Complex64;

use super::curve::{cbracket, im, re, AnalyticCurve};
use super::AnalyticError;
use crate::geom::{bracket2, rot90, Vec2, Vec3};

#[inline]
fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

pub(crate) fn require_inner(u: f64, v: f64) -> Result<(), AnalyticError> {
    if u > v && u.is_finite() && v.is_finite() {
        Ok(())
    } else {
        Err(AnalyticError::DomainViolation(format!(
            "inner chart needs u > v, got ({u}, {v})"
        )))
    }
}

pub(crate) fn require_outer(s: f64, t: f64) -> Result<(), AnalyticError> {
    if t > 0.0 && s.is_finite() && t.is_finite() {
        Ok(())
    } else {
        Err(AnalyticError::DomainViolation(format!(
            "outer chart needs t > 0, got ({s}, {t})"
        )))
    }
}

/// `f(u, v)` continued to complex arguments.
pub fn inner_f_c(curve: &AnalyticCurve, u: Complex64, v: Complex64) -> Complex64 {
    (curve.g_c(u) - curve.g_c(v) - cbracket(curve.point_c(v), curve.point_c(u))) * 0.25
}

/// `ω(u, v) = ¼ [C'(v), C'(u)]` continued to complex arguments.
pub fn omega_c(curve: &AnalyticCurve, u: Complex64, v: Complex64) -> Complex64 {
    cbracket(curve.d1_c(v), curve.d1_c(u)) * 0.25
}

/// Inner distance from the antiderivative formula; defined for any `(u, v)`.
pub fn inner_f(curve: &AnalyticCurve, u: f64, v: f64) -> f64 {
    inner_f_c(curve, c(u), c(v)).re
}

/// `p(u, v) = ½ (C(u) + C(v))`.
pub fn inner_point(curve: &AnalyticCurve, u: f64, v: f64) -> Vec2 {
    (curve.point(u) + curve.point(v)) * 0.5
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InnerChart {
    pub f: f64,
    pub q: Vec3,
    pub omega: f64,
}

/// Catalog closed forms. Polynomial curves have none; use [`inner_chart`].
pub fn inner_closed(curve: &AnalyticCurve, u: f64, v: f64) -> Result<InnerChart, AnalyticError> {
    require_inner(u, v)?;
    let d = u - v;
    let (f, omega) = match curve {
        AnalyticCurve::Parabola => (d.powi(3) / 24.0, d / 4.0),
        AnalyticCurve::Circle => ((d - d.sin()) / 4.0, d.sin() / 4.0),
        AnalyticCurve::Hyperbola => {
            let sh = d.exp() - (-d).exp();
            (-d / 2.0 + sh / 4.0, sh / 4.0)
        }
        AnalyticCurve::Cubic => (d.powi(3) * (u + v) / 8.0, 0.75 * (u * u - v * v)),
        AnalyticCurve::Quartic => (
            (0.6 * u.powi(5) - 0.6 * v.powi(5) - u.powi(4) * v + u * v.powi(4)) / 4.0,
            u.powi(3) - v.powi(3),
        ),
        AnalyticCurve::Polynomial(_) => return Err(AnalyticError::UnsupportedKind("poly")),
    };
    Ok(InnerChart {
        f,
        q: inner_point(curve, u, v).lift(f),
        omega,
    })
}

/// Closed form for catalog curves, the antiderivative formula otherwise.
pub fn inner_chart(curve: &AnalyticCurve, u: f64, v: f64) -> Result<InnerChart, AnalyticError> {
    if curve.is_catalog() {
        return inner_closed(curve, u, v);
    }
    require_inner(u, v)?;
    let f = inner_f(curve, u, v);
    Ok(InnerChart {
        f,
        q: inner_point(curve, u, v).lift(f),
        omega: omega_c(curve, c(u), c(v)).re,
    })
}

/// Gradient of the inner distance at `p(u, v)`: `R(½ (C(u) - C(v)))`.
pub fn grad_f(curve: &AnalyticCurve, u: f64, v: f64) -> Result<Vec2, AnalyticError> {
    require_inner(u, v)?;
    Ok(rot90((curve.point(u) - curve.point(v)) * 0.5))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticCoeffs {
    /// `[p_u, p_uu]`
    pub a: f64,
    /// `-[p_v, p_vv]`
    pub b: f64,
    /// `[p_v, p_u]`
    pub omega: f64,
    /// `|∂a/∂v|` by central differences.
    pub a_v: f64,
    /// `|∂b/∂u|` by central differences.
    pub b_u: f64,
    /// `|ω + f_uv|` with `f_uv` by central differences of the chart's `f`.
    pub omega_plus_f_uv: f64,
}

fn abw(curve: &AnalyticCurve, u: f64, v: f64) -> (f64, f64, f64) {
    let (pu, pv) = (curve.d1(u) * 0.5, curve.d1(v) * 0.5);
    let (puu, pvv) = (curve.d2(u) * 0.5, curve.d2(v) * 0.5);
    (bracket2(pu, puu), -bracket2(pv, pvv), bracket2(pv, pu))
}

pub fn asymptotic_coeffs(curve: &AnalyticCurve, u: f64, v: f64) -> Result<AsymptoticCoeffs, AnalyticError> {
    require_inner(u, v)?;
    let (a, b, omega) = abw(curve, u, v);
    let h = 1e-4 * (1.0 + u.abs().max(v.abs()));
    let a_v = ((abw(curve, u, v + h).0 - abw(curve, u, v - h).0) / (2.0 * h)).abs();
    let b_u = ((abw(curve, u + h, v).1 - abw(curve, u - h, v).1) / (2.0 * h)).abs();
    let f = |x: f64, y: f64| inner_chart(curve, x, y).map(|ch| ch.f);
    let f_uv = (f(u + h, v + h)? - f(u + h, v - h)? - f(u - h, v + h)? + f(u - h, v - h)?) / (4.0 * h * h);
    Ok(AsymptoticCoeffs {
        a,
        b,
        omega,
        a_v,
        b_u,
        omega_plus_f_uv: (omega + f_uv).abs(),
    })
}

/// Pick invariant `j = a b / ω³`.
pub fn pick_invariant_inner(curve: &AnalyticCurve, u: f64, v: f64) -> Result<f64, AnalyticError> {
    require_inner(u, v)?;
    let (a, b, omega) = abw(curve, u, v);
    if omega.abs() < 1e-14 {
        return Err(AnalyticError::OmegaZero);
    }
    Ok(a * b / omega.powi(3))
}

/// `(π₁, π₂) = (p + R∇f, p - R∇f)`, the tangency points of the two asymptotic
/// lines through `p(u, v)`: `π₁ = C(v)` and `π₂ = C(u)`.
pub fn projections_pi(curve: &AnalyticCurve, u: f64, v: f64) -> Result<(Vec2, Vec2), AnalyticError> {
    let p = inner_point(curve, u, v);
    let r = rot90(grad_f(curve, u, v)?);
    Ok((p + r, p - r))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OuterChart {
    pub q: Vec3,
    pub f: f64,
    pub omega: f64,
}

/// Catalog closed forms of the outer chart.
pub fn outer_closed(curve: &AnalyticCurve, s: f64, t: f64) -> Result<OuterChart, AnalyticError> {
    require_outer(s, t)?;
    let (x, y, f, omega) = match curve {
        AnalyticCurve::Parabola => (s, (s * s - t * t) / 2.0, t.powi(3) / 3.0, t / 2.0),
        AnalyticCurve::Circle => (
            s.cos() * t.cosh(),
            s.sin() * t.cosh(),
            ((2.0 * t).sinh() / 2.0 - t) / 2.0,
            t.sinh() * t.cosh() / 2.0,
        ),
        AnalyticCurve::Hyperbola => (
            s.exp() * t.cos(),
            (-s).exp() * t.cos(),
            t - (2.0 * t).sin() / 2.0,
            (2.0 * t).sin() / 2.0,
        ),
        AnalyticCurve::Cubic => (s, s.powi(3) - 3.0 * s * t * t, 2.0 * t.powi(3) * s, 3.0 * s * t),
        AnalyticCurve::Quartic => (
            s,
            s.powi(4) - 6.0 * s * s * t * t + t.powi(4),
            4.0 * s * s * t.powi(3) - 0.8 * t.powi(5),
            6.0 * s * s * t - 2.0 * t.powi(3),
        ),
        AnalyticCurve::Polynomial(_) => return Err(AnalyticError::UnsupportedKind("poly")),
    };
    Ok(OuterChart {
        q: Vec3::new(x, y, f),
        f,
        omega,
    })
}

/// Outer chart by complex continuation, with the imaginary parts that must
/// cancel for a real curve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ContinuedOuter {
    pub chart: OuterChart,
    pub imag_point: f64,
    pub imag_f: f64,
    pub imag_omega: f64,
}

pub fn outer_continued(curve: &AnalyticCurve, s: f64, t: f64) -> Result<ContinuedOuter, AnalyticError> {
    require_outer(s, t)?;
    let z = Complex64::new(s, t);
    let zb = z.conj();
    let (cz, czb) = (curve.point_c(z), curve.point_c(zb));
    let p = [(cz[0] + czb[0]) * 0.5, (cz[1] + czb[1]) * 0.5];
    let f = Complex64::i() * inner_f_c(curve, z, zb);
    let omega = -Complex64::i() * omega_c(curve, z, zb);
    let f_re = f.re;
    Ok(ContinuedOuter {
        chart: OuterChart {
            q: re(p).lift(f_re),
            f: f_re,
            omega: omega.re,
        },
        imag_point: im(p).norm(),
        imag_f: f.im.abs(),
        imag_omega: omega.im.abs(),
    })
}

/// Closed form for catalog curves, continuation otherwise.
pub fn outer_chart(curve: &AnalyticCurve, s: f64, t: f64) -> Result<OuterChart, AnalyticError> {
    if curve.is_catalog() {
        outer_closed(curve, s, t)
    } else {
        outer_continued(curve, s, t).map(|c| c.chart)
    }
}

/// `P(s, t) = Re C(s + it)`.
pub fn outer_point(curve: &AnalyticCurve, s: f64, t: f64) -> Vec2 {
    re(curve.point_c(Complex64::new(s, t)))
}

/// Gradient of the outer distance at `P(s, t)`: `R(-Im C(s + it))`.
pub fn grad_outer(curve: &AnalyticCurve, s: f64, t: f64) -> Result<Vec2, AnalyticError> {
    require_outer(s, t)?;
    Ok(rot90(-im(curve.point_c(Complex64::new(s, t)))))
}

/// Corresponding inner and outer points for `u0 > v0`: `p = ½ (C(u0) + C(v0))`
/// and `P` at `s = (u0 + v0)/2`, `t = (u0 - v0)/2`.
pub fn correspondence(curve: &AnalyticCurve, u0: f64, v0: f64) -> Result<(Vec2, Vec2), AnalyticError> {
    require_inner(u0, v0)?;
    Ok((
        inner_point(curve, u0, v0),
        outer_point(curve, (u0 + v0) / 2.0, (u0 - v0) / 2.0),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chord::min_chord_area;
    use crate::geom::ConvexPolyline;
    use std::f64::consts::PI;

    const CASES: [(AnalyticCurve, f64, f64); 5] = [
        (AnalyticCurve::Parabola, 1.0, -1.0),
        (AnalyticCurve::Circle, 1.0, -0.8),
        (AnalyticCurve::Hyperbola, 0.9, -0.6),
        (AnalyticCurve::Cubic, 1.6, 0.4),
        (AnalyticCurve::Quartic, 1.5, 0.2),
    ];

    #[test]
    fn spot_values() {
        let p = inner_closed(&AnalyticCurve::Parabola, 1.0, -1.0).unwrap();
        assert!((p.f - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(p.q.xy(), Vec2::new(0.0, 0.5));
        let c = inner_closed(&AnalyticCurve::Circle, PI / 2.0, -PI / 2.0).unwrap();
        assert!((c.f - PI / 4.0).abs() < 1e-15);
        let o = outer_closed(&AnalyticCurve::Parabola, 0.0, 1.0).unwrap();
        assert_eq!(o.q, Vec3::new(0.0, -0.5, 1.0 / 3.0));
        assert_eq!(o.omega, 0.5);
        let o = outer_closed(&AnalyticCurve::Circle, 0.0, 1.0).unwrap();
        let want = Vec3::new(1f64.cosh(), 0.0, (2f64.sinh() / 2.0 - 1.0) / 2.0);
        assert!((o.q - want).norm() < 1e-15);
        let near = inner_closed(&AnalyticCurve::Hyperbola, 0.3 + 1e-7, 0.3).unwrap();
        assert!(near.f.abs() < 1e-15);
    }

    #[test]
    fn domain_and_kind_errors() {
        assert!(matches!(
            inner_closed(&AnalyticCurve::Parabola, 0.0, 0.0),
            Err(AnalyticError::DomainViolation(_))
        ));
        assert!(matches!(
            outer_closed(&AnalyticCurve::Parabola, 0.0, -1.0),
            Err(AnalyticError::DomainViolation(_))
        ));
        let poly = AnalyticCurve::Parabola
            .to_polynomial()
            .map(AnalyticCurve::Polynomial)
            .unwrap();
        assert_eq!(
            inner_closed(&poly, 1.0, 0.0),
            Err(AnalyticError::UnsupportedKind("poly"))
        );
        assert_eq!(
            outer_closed(&poly, 1.0, 1.0),
            Err(AnalyticError::UnsupportedKind("poly"))
        );
        assert!(grad_f(&poly, 0.0, 1.0).is_err());
    }

    #[test]
    fn closed_forms_match_antiderivative_formula() {
        for (curve, u, v) in CASES {
            let closed = inner_closed(&curve, u, v).unwrap();
            assert!((closed.f - inner_f(&curve, u, v)).abs() < 1e-13, "{curve}");
            assert!((closed.omega - omega_c(&curve, c(u), c(v)).re).abs() < 1e-13, "{curve}");
        }
    }

    /// Integrate `f_u = ¼ [C(u) - C(v), C'(u)]` from the diagonal with Simpson's rule.
    fn quadrature_f(curve: &AnalyticCurve, u: f64, v: f64) -> f64 {
        let n = 2000;
        let h = (u - v) / n as f64;
        let fu = |x: f64| 0.25 * bracket2(curve.point(x) - curve.point(v), curve.d1(x));
        let mut sum = fu(v) + fu(u);
        for k in 1..n {
            sum += fu(v + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        sum * h / 3.0
    }

    #[test]
    fn closed_forms_match_quadrature() {
        for (curve, u, v) in CASES {
            let closed = inner_closed(&curve, u, v).unwrap();
            assert!((closed.f - quadrature_f(&curve, u, v)).abs() < 1e-11, "{curve}");
        }
    }

    #[test]
    fn closed_forms_match_chord_oracle() {
        // Half the minimal area cut by a chord through p, on a dense polyline.
        for (curve, u, v) in CASES {
            // Keep the circle's total turning below π.
            let (a, b) = (v - 0.2 * (u - v), u + 0.2 * (u - v));
            let (a, b) = if curve == AnalyticCurve::Cubic {
                (a.max(0.05), b)
            } else {
                (a, b)
            };
            let poly = ConvexPolyline::new(curve.sample(6001, a, b, false).unwrap(), false).unwrap();
            let ch = inner_closed(&curve, u, v).unwrap();
            let res = min_chord_area(&poly, ch.q.xy(), 128, 60).unwrap();
            assert!(
                (res.half_area - ch.f).abs() < 1e-6,
                "{curve}: {} vs {}",
                res.half_area,
                ch.f
            );
            // The minimal chord touches the curve at C(u) and C(v).
            let ends = [res.endpoint_a, res.endpoint_b];
            for target in [curve.point(u), curve.point(v)] {
                let d = ends.iter().map(|e| (*e - target).norm()).fold(f64::INFINITY, f64::min);
                assert!(d < 1e-3, "{curve}");
            }
        }
    }

    #[test]
    fn gradient_and_projections() {
        assert_eq!(
            grad_f(&AnalyticCurve::Parabola, 1.0, -1.0).unwrap(),
            Vec2::new(-0.0, 1.0)
        );
        let g = grad_f(&AnalyticCurve::Circle, PI / 2.0, -PI / 2.0).unwrap();
        assert!((g - Vec2::new(-1.0, 0.0)).norm() < 1e-15);
        for (curve, u, v) in CASES {
            let (p1, p2) = projections_pi(&curve, u, v).unwrap();
            assert!((p1 - curve.point(v)).norm() < 1e-12);
            assert!((p2 - curve.point(u)).norm() < 1e-12);
        }
    }

    #[test]
    fn structure_coefficients() {
        let k = asymptotic_coeffs(&AnalyticCurve::Parabola, 0.7, -0.4).unwrap();
        assert!((k.a - 0.25).abs() < 1e-15 && (k.b + 0.25).abs() < 1e-15);
        assert!((k.omega - 1.1 / 4.0).abs() < 1e-15);
        let j = pick_invariant_inner(&AnalyticCurve::Parabola, 0.7, -0.4).unwrap();
        assert!((j + 4.0 / 1.1f64.powi(3)).abs() < 1e-12);
        let k = asymptotic_coeffs(&AnalyticCurve::Circle, 1.0, -0.5).unwrap();
        assert!((k.omega - 1.5f64.sin() / 4.0).abs() < 1e-15);
        for (curve, u, v) in CASES {
            let k = asymptotic_coeffs(&curve, u, v).unwrap();
            assert!(k.a_v < 1e-8 && k.b_u < 1e-8);
            assert!(k.omega_plus_f_uv < 1e-6, "{curve}: {}", k.omega_plus_f_uv);
            assert!(pick_invariant_inner(&curve, u, v).unwrap() != 0.0);
        }
        // ω vanishes for the cubic on u = -v.
        assert_eq!(
            pick_invariant_inner(&AnalyticCurve::Cubic, 1.0, -1.0),
            Err(AnalyticError::OmegaZero)
        );
    }

    #[test]
    fn pick_invariant_is_unimodular_invariant() {
        let m = [[2.0, 1.0], [3.0, 2.0]];
        for curve in [AnalyticCurve::Parabola, AnalyticCurve::Quartic] {
            let img = curve.affine_image(m, Vec2::new(0.3, -2.0)).unwrap();
            for (u, v) in [(1.2, 0.1), (1.9, 0.8)] {
                let j0 = pick_invariant_inner(&curve, u, v).unwrap();
                let j1 = pick_invariant_inner(&img, u, v).unwrap();
                assert!((j0 - j1).abs() < 1e-10 * j0.abs(), "{curve}");
            }
        }
    }

    #[test]
    fn outer_closed_forms_match_continuation() {
        for curve in AnalyticCurve::CATALOG {
            for (s, t) in [(0.3, 0.4), (1.1, 0.9), (-0.5, 0.2)] {
                let closed = outer_closed(&curve, s, t).unwrap();
                let cont = outer_continued(&curve, s, t).unwrap();
                let scale = 1.0 + closed.q.norm();
                assert!((closed.q - cont.chart.q).norm() < 1e-12 * scale, "{curve} at ({s},{t})");
                assert!((closed.omega - cont.chart.omega).abs() < 1e-12 * scale, "{curve} Ω");
                assert!(cont.imag_point < 1e-12 * scale);
                assert!(cont.imag_f < 1e-12 * scale);
                assert!(cont.imag_omega < 1e-12 * scale);
            }
        }
    }

    #[test]
    fn outer_boundary_and_correspondence() {
        for curve in AnalyticCurve::CATALOG {
            let o = outer_chart(&curve, 0.7, 1e-7).unwrap();
            assert!(o.f.abs() < 1e-12);
            assert!((o.q.xy() - curve.point(0.7)).norm() < 1e-6);
        }
        let (p, pp) = correspondence(&AnalyticCurve::Parabola, 1.0, -1.0).unwrap();
        assert_eq!(p, Vec2::new(0.0, 0.5));
        assert_eq!(pp, Vec2::new(0.0, -0.5));
        let (p, pp) = correspondence(&AnalyticCurve::Circle, 0.8, -0.8).unwrap();
        assert!(p.y.abs() < 1e-15 && pp.y.abs() < 1e-15);
        assert!(p.x > 0.0 && p.x < 1.0 && pp.x > 1.0);
        let (p, pp) = correspondence(&AnalyticCurve::Cubic, 1.0 + 1e-9, 1.0).unwrap();
        assert!((p - pp).norm() < 1e-8);
    }

    #[test]
    fn outer_reparametrization_independence() {
        // C(ψ(r)) with ψ(r) = r + r³ traces the same parabola.
        let curve = AnalyticCurve::Parabola.compose(&[0.0, 1.0, 0.0, 1.0]).unwrap();
        let mut worst: f64 = 0.0;
        for k in 0..20 {
            for l in 1..10 {
                let (s, t) = (-0.8 + 0.08 * k as f64, 0.05 * l as f64);
                let cont = outer_continued(&curve, s, t).unwrap();
                let q = cont.chart.q;
                let surface = (q.x * q.x - 2.0 * q.y).max(0.0).powf(1.5) / 3.0;
                worst = worst.max((q.z - surface).abs());
                assert!(cont.imag_f < 1e-12 * (1.0 + q.norm()));
            }
        }
        assert!(worst < 1e-5, "{worst}");
    }
}
