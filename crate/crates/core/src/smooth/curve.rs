//! Analytic plane curves that can be evaluated at complex parameters.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::AnalyticError;
use crate::geom::{ConvexPolyline, PolylineError, Vec2};

/// A point or vector of the complexified plane.
pub type CVec2 = [Complex64; 2];

/// `[a, b]` extended bilinearly to complex vectors.
#[inline]
pub fn cbracket(a: CVec2, b: CVec2) -> Complex64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub(crate) fn re(a: CVec2) -> Vec2 {
    Vec2::new(a[0].re, a[1].re)
}

#[inline]
pub(crate) fn im(a: CVec2) -> Vec2 {
    Vec2::new(a[0].im, a[1].im)
}

#[inline]
fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Plane curve given by two real polynomials in ascending powers, with
/// derivatives precomputed.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyCurve {
    x: Vec<f64>,
    y: Vec<f64>,
    dx: Vec<f64>,
    dy: Vec<f64>,
    ddx: Vec<f64>,
    ddy: Vec<f64>,
    /// Antiderivative of `x y' - y x'`, vanishing at 0.
    g: Vec<f64>,
}

fn derivative(p: &[f64]) -> Vec<f64> {
    p.iter().enumerate().skip(1).map(|(k, a)| k as f64 * a).collect()
}

fn product(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn horner(p: &[f64], z: Complex64) -> Complex64 {
    p.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

impl PolyCurve {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self, AnalyticError> {
        if x.is_empty() || y.is_empty() {
            return Err(AnalyticError::InvalidCurve("empty coefficient list".into()));
        }
        if x.iter().chain(&y).any(|a| !a.is_finite()) {
            return Err(AnalyticError::InvalidCurve("non-finite coefficient".into()));
        }
        let (dx, dy) = (derivative(&x), derivative(&y));
        if dx.iter().chain(&dy).all(|&a| a == 0.0) {
            return Err(AnalyticError::InvalidCurve("constant curve".into()));
        }
        let mut gp = product(&x, &dy);
        for (k, a) in product(&y, &dx).into_iter().enumerate() {
            if k < gp.len() {
                gp[k] -= a;
            } else {
                gp.push(-a);
            }
        }
        let mut g = vec![0.0];
        g.extend(gp.iter().enumerate().map(|(k, a)| a / (k + 1) as f64));
        Ok(Self {
            ddx: derivative(&dx),
            ddy: derivative(&dy),
            dx,
            dy,
            x,
            y,
            g,
        })
    }

    pub fn x_coeffs(&self) -> &[f64] {
        &self.x
    }

    pub fn y_coeffs(&self) -> &[f64] {
        &self.y
    }
}

/// The curve catalog plus arbitrary polynomial curves.
#[derive(Clone, Debug, PartialEq)]
pub enum AnalyticCurve {
    /// `(r, r²/2)`
    Parabola,
    /// `(cos r, sin r)`
    Circle,
    /// `(eʳ, e⁻ʳ)`
    Hyperbola,
    /// `(r, r³)`, convex for `r > 0`
    Cubic,
    /// `(r, r⁴)`
    Quartic,
    Polynomial(PolyCurve),
}

impl AnalyticCurve {
    pub const CATALOG: [AnalyticCurve; 5] = [
        AnalyticCurve::Parabola,
        AnalyticCurve::Circle,
        AnalyticCurve::Hyperbola,
        AnalyticCurve::Cubic,
        AnalyticCurve::Quartic,
    ];

    pub fn polynomial(x: Vec<f64>, y: Vec<f64>) -> Result<Self, AnalyticError> {
        PolyCurve::new(x, y).map(AnalyticCurve::Polynomial)
    }

    pub fn name(&self) -> &'static str {
        match self {
            AnalyticCurve::Parabola => "parabola",
            AnalyticCurve::Circle => "circle",
            AnalyticCurve::Hyperbola => "hyperbola",
            AnalyticCurve::Cubic => "cubic",
            AnalyticCurve::Quartic => "quartic",
            AnalyticCurve::Polynomial(_) => "poly",
        }
    }

    pub fn is_catalog(&self) -> bool {
        !matches!(self, AnalyticCurve::Polynomial(_))
    }

    /// Coefficient lists when the curve is polynomial.
    pub fn to_polynomial(&self) -> Option<PolyCurve> {
        let (x, y) = match self {
            AnalyticCurve::Parabola => (vec![0.0, 1.0], vec![0.0, 0.0, 0.5]),
            AnalyticCurve::Cubic => (vec![0.0, 1.0], vec![0.0, 0.0, 0.0, 1.0]),
            AnalyticCurve::Quartic => (vec![0.0, 1.0], vec![0.0, 0.0, 0.0, 0.0, 1.0]),
            AnalyticCurve::Polynomial(p) => return Some(p.clone()),
            _ => return None,
        };
        PolyCurve::new(x, y).ok()
    }

    /// Image of a polynomial curve under `x ↦ m·x + b`.
    pub fn affine_image(&self, m: [[f64; 2]; 2], b: Vec2) -> Result<Self, AnalyticError> {
        let p = self
            .to_polynomial()
            .ok_or(AnalyticError::UnsupportedKind(self.name()))?;
        let len = p.x.len().max(p.y.len());
        let at = |v: &[f64], k: usize| v.get(k).copied().unwrap_or(0.0);
        let mut x: Vec<f64> = (0..len)
            .map(|k| m[0][0] * at(&p.x, k) + m[0][1] * at(&p.y, k))
            .collect();
        let mut y: Vec<f64> = (0..len)
            .map(|k| m[1][0] * at(&p.x, k) + m[1][1] * at(&p.y, k))
            .collect();
        x[0] += b.x;
        y[0] += b.y;
        AnalyticCurve::polynomial(x, y)
    }

    /// Reparametrize a polynomial curve by a polynomial `ψ`: `r ↦ C(ψ(r))`.
    pub fn compose(&self, psi: &[f64]) -> Result<Self, AnalyticError> {
        let p = self
            .to_polynomial()
            .ok_or(AnalyticError::UnsupportedKind(self.name()))?;
        let sub = |coeffs: &[f64]| {
            coeffs.iter().rev().fold(Vec::new(), |acc: Vec<f64>, &a| {
                let mut next = product(&acc, psi);
                if next.is_empty() {
                    next.push(0.0);
                }
                next[0] += a;
                next
            })
        };
        AnalyticCurve::polynomial(sub(&p.x), sub(&p.y))
    }

    pub fn point_c(&self, z: Complex64) -> CVec2 {
        match self {
            AnalyticCurve::Parabola => [z, z * z * 0.5],
            AnalyticCurve::Circle => [z.cos(), z.sin()],
            AnalyticCurve::Hyperbola => [z.exp(), (-z).exp()],
            AnalyticCurve::Cubic => [z, z * z * z],
            AnalyticCurve::Quartic => [z, z.powi(4)],
            AnalyticCurve::Polynomial(p) => [horner(&p.x, z), horner(&p.y, z)],
        }
    }

    pub fn d1_c(&self, z: Complex64) -> CVec2 {
        match self {
            AnalyticCurve::Parabola => [c(1.0), z],
            AnalyticCurve::Circle => [-z.sin(), z.cos()],
            AnalyticCurve::Hyperbola => [z.exp(), -(-z).exp()],
            AnalyticCurve::Cubic => [c(1.0), z * z * 3.0],
            AnalyticCurve::Quartic => [c(1.0), z.powi(3) * 4.0],
            AnalyticCurve::Polynomial(p) => [horner(&p.dx, z), horner(&p.dy, z)],
        }
    }

    pub fn d2_c(&self, z: Complex64) -> CVec2 {
        match self {
            AnalyticCurve::Parabola => [c(0.0), c(1.0)],
            AnalyticCurve::Circle => [-z.cos(), -z.sin()],
            AnalyticCurve::Hyperbola => [z.exp(), (-z).exp()],
            AnalyticCurve::Cubic => [c(0.0), z * 6.0],
            AnalyticCurve::Quartic => [c(0.0), z * z * 12.0],
            AnalyticCurve::Polynomial(p) => [horner(&p.ddx, z), horner(&p.ddy, z)],
        }
    }

    /// `G` with `G' = [C, C']`.
    pub fn g_c(&self, z: Complex64) -> Complex64 {
        match self {
            AnalyticCurve::Parabola => z.powi(3) / 6.0,
            AnalyticCurve::Circle => z,
            AnalyticCurve::Hyperbola => z * -2.0,
            AnalyticCurve::Cubic => z.powi(4) * 0.5,
            AnalyticCurve::Quartic => z.powi(5) * 0.6,
            AnalyticCurve::Polynomial(p) => horner(&p.g, z),
        }
    }

    pub fn point(&self, r: f64) -> Vec2 {
        re(self.point_c(c(r)))
    }

    pub fn d1(&self, r: f64) -> Vec2 {
        re(self.d1_c(c(r)))
    }

    pub fn d2(&self, r: f64) -> Vec2 {
        re(self.d2_c(c(r)))
    }

    /// `n` samples over `[a, b]`. With `closed` the end point is left out so
    /// the samples form a closed polygon (e.g. a full turn of the circle).
    pub fn sample(&self, n: usize, a: f64, b: f64, closed: bool) -> Result<Vec<Vec2>, AnalyticError> {
        if n < 3 {
            return Err(AnalyticError::InvalidCurve(format!("need at least 3 samples, got {n}")));
        }
        let denom = if closed { n } else { n - 1 } as f64;
        Ok((0..n).map(|k| self.point(a + (b - a) * k as f64 / denom)).collect())
    }

    /// Default sampling range: a full turn for the circle, `[-1, 1]` for the
    /// parabola and hyperbola, and the convex branch `[0.25, 2]` for the
    /// cubic and quartic.
    pub fn default_range(&self) -> (f64, f64, bool) {
        match self {
            AnalyticCurve::Circle => (0.0, TAU, true),
            AnalyticCurve::Cubic | AnalyticCurve::Quartic => (0.25, 2.0, false),
            _ => (-1.0, 1.0, false),
        }
    }

    /// Sample and validate as a convex polyline.
    pub fn sample_polyline(
        &self,
        n: usize,
        a: f64,
        b: f64,
        closed: bool,
    ) -> Result<Result<ConvexPolyline, PolylineError>, AnalyticError> {
        Ok(ConvexPolyline::new(self.sample(n, a, b, closed)?, closed))
    }
}

impl fmt::Display for AnalyticCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnalyticCurve::Polynomial(p) => {
                let join = |v: &[f64]| v.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(",");
                write!(f, "poly:{};{}", join(&p.x), join(&p.y))
            }
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for AnalyticCurve {
    type Err = AnalyticError;

    /// `parabola | circle | hyperbola | cubic | quartic | poly:x0,x1,...;y0,y1,...`
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("poly:") {
            let (xs, ys) = rest
                .split_once(';')
                .ok_or_else(|| AnalyticError::InvalidCurve(format!("expected poly:x0,x1,..;y0,y1,.. in {s:?}")))?;
            let parse = |list: &str| -> Result<Vec<f64>, AnalyticError> {
                list.split(',')
                    .map(|t| {
                        t.trim()
                            .parse::<f64>()
                            .map_err(|e| AnalyticError::InvalidCurve(format!("coefficient {t:?}: {e}")))
                    })
                    .collect()
            };
            return AnalyticCurve::polynomial(parse(xs)?, parse(ys)?);
        }
        AnalyticCurve::CATALOG
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| AnalyticError::InvalidCurve(format!("unknown curve {s:?}")))
    }
}
