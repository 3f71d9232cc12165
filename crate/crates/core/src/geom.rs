//! Small-dimension vectors, determinant brackets and convex polyline validation.
//!
//! Everything downstream works with the bracket `[X, Y]` (the 2×2 determinant
//! with columns `X`, `Y`) and the anticlockwise quarter turn `R`.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub, SubAssign};
use std::sync::OnceLock;

use thiserror::Error;

/// A point or vector in the plane.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0.0, y: 0.0 };

    #[inline]
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Checked constructor: rejects NaN and infinite components.
    pub fn finite(x: f64, y: f64) -> Result<Self, PolylineError> {
        if x.is_finite() && y.is_finite() {
            Ok(Self { x, y })
        } else {
            Err(PolylineError::NonFinite)
        }
    }

    #[inline]
    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    #[inline]
    pub fn midpoint(self, other: Vec2) -> Vec2 {
        (self + other) * 0.5
    }

    /// Lift to space with the given height.
    #[inline]
    pub fn lift(self, z: f64) -> Vec3 {
        Vec3::new(self.x, self.y, z)
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    #[inline]
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl AddAssign for Vec2 {
    #[inline]
    fn add_assign(&mut self, o: Vec2) {
        self.x += o.x;
        self.y += o.y;
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    #[inline]
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl SubAssign for Vec2 {
    #[inline]
    fn sub_assign(&mut self, o: Vec2) {
        self.x -= o.x;
        self.y -= o.y;
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Mul<Vec2> for f64 {
    type Output = Vec2;
    #[inline]
    fn mul(self, v: Vec2) -> Vec2 {
        v * self
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    #[inline]
    fn div(self, s: f64) -> Vec2 {
        Vec2::new(self.x / s, self.y / s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    #[inline]
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl From<[f64; 2]> for Vec2 {
    fn from(a: [f64; 2]) -> Self {
        Vec2::new(a[0], a[1])
    }
}

impl From<Vec2> for [f64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

/// A point or vector in space.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    /// Vertical unit vector, the common affine normal direction.
    pub const E3: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 1.0 };

    #[inline]
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn finite(x: f64, y: f64, z: f64) -> Result<Self, PolylineError> {
        if x.is_finite() && y.is_finite() && z.is_finite() {
            Ok(Self { x, y, z })
        } else {
            Err(PolylineError::NonFinite)
        }
    }

    #[inline]
    pub fn dot(self, o: Vec3) -> f64 {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Vec3) -> Vec3 {
        Vec3::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    #[inline]
    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    #[inline]
    pub fn xy(self) -> Vec2 {
        Vec2::new(self.x, self.y)
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    #[inline]
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    #[inline]
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    #[inline]
    fn mul(self, s: f64) -> Vec3 {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    #[inline]
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// `[X, Y]`, the determinant of the 2×2 matrix with columns `X` and `Y`.
#[inline]
pub fn bracket2(a: Vec2, b: Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Anticlockwise rotation by ninety degrees. `[X, Y] = -X·R(Y)`.
#[inline]
pub fn rot90(v: Vec2) -> Vec2 {
    Vec2::new(-v.y, v.x)
}

/// `[X, Y, Z]`, the determinant of the 3×3 matrix with columns `X`, `Y`, `Z`.
#[inline]
pub fn bracket3(a: Vec3, b: Vec3, c: Vec3) -> f64 {
    a.dot(b.cross(c))
}

/// Default relative strictness threshold for convexity tests.
pub const DEFAULT_EPS_CONV: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolylineError {
    #[error("need at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("side {0} has zero length")]
    ZeroLengthSide(usize),
    #[error("not strictly convex: [L_{i}, L_{j}] = {bracket:e}")]
    NonConvex { i: usize, j: usize, bracket: f64 },
    #[error("closed polygon winds {0:.3} turns instead of one")]
    BadWinding(f64),
    #[error("non-finite coordinate")]
    NonFinite,
}

/// A validated, positively oriented, strictly convex polyline.
///
/// Sides are stored as half-vectors `L_i = (c_{i+1} - c_i) / 2`. An open
/// polyline with `N` vertices has `N - 1` sides, all pairwise positively
/// oriented (`[L_i, L_j] > 0` for `i < j`). A closed polygon has `N` sides, the
/// last one running from `c_{N-1}` back to `c_0`; positivity is then required
/// between consecutive sides and the polygon must wind exactly once.
#[derive(Clone, Debug)]
pub struct ConvexPolyline {
    vertices: Vec<Vec2>,
    half_sides: Vec<Vec2>,
    closed: bool,
    eps_conv: f64,
    diameter: OnceLock<f64>,
}

impl ConvexPolyline {
    pub fn new(vertices: Vec<Vec2>, closed: bool) -> Result<Self, PolylineError> {
        Self::with_tolerance(vertices, closed, DEFAULT_EPS_CONV)
    }

    /// Validate with a custom strictness threshold: the pair `(i, j)` passes
    /// when `[L_i, L_j] > eps_conv · |L_i| · |L_j|`, i.e. the sine of the turning
    /// angle between the two sides exceeds `eps_conv`.
    pub fn with_tolerance(vertices: Vec<Vec2>, closed: bool, eps_conv: f64) -> Result<Self, PolylineError> {
        let n = vertices.len();
        if n < 3 {
            return Err(PolylineError::TooFewVertices(n));
        }
        if vertices.iter().any(|v| !v.is_finite()) {
            return Err(PolylineError::NonFinite);
        }
        let sides = if closed { n } else { n - 1 };
        let half_sides: Vec<Vec2> = (0..sides)
            .map(|i| (vertices[(i + 1) % n] - vertices[i]) * 0.5)
            .collect();
        if let Some(i) = half_sides.iter().position(|l| l.norm() == 0.0) {
            return Err(PolylineError::ZeroLengthSide(i));
        }
        let poly = Self {
            vertices,
            half_sides,
            closed,
            eps_conv,
            diameter: OnceLock::new(),
        };
        if closed {
            poly.check_closed()?;
        } else {
            poly.check_open()?;
        }
        Ok(poly)
    }

    fn check_open(&self) -> Result<(), PolylineError> {
        let l = &self.half_sides;
        for i in 0..l.len() {
            for j in i + 1..l.len() {
                if !self.is_positive_pair(i, j) {
                    return Err(PolylineError::NonConvex {
                        i,
                        j,
                        bracket: bracket2(l[i], l[j]),
                    });
                }
            }
        }
        Ok(())
    }

    fn check_closed(&self) -> Result<(), PolylineError> {
        let m = self.half_sides.len();
        let mut turning = 0.0;
        for i in 0..m {
            let j = (i + 1) % m;
            if !self.is_positive_pair(i, j) {
                return Err(PolylineError::NonConvex {
                    i,
                    j,
                    bracket: bracket2(self.half_sides[i], self.half_sides[j]),
                });
            }
            let (a, b) = (self.half_sides[i], self.half_sides[j]);
            turning += bracket2(a, b).atan2(a.dot(b));
        }
        let turns = turning / std::f64::consts::TAU;
        if (turns - 1.0).abs() > 1e-6 {
            return Err(PolylineError::BadWinding(turns));
        }
        Ok(())
    }

    /// Whether `[L_i, L_j]` (side indices taken modulo the side count for
    /// closed polygons) clears the strictness threshold.
    #[inline]
    pub fn is_positive_pair(&self, i: usize, j: usize) -> bool {
        let a = self.half_side(i);
        let b = self.half_side(j);
        bracket2(a, b) > self.eps_conv * a.norm() * b.norm()
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    #[inline]
    pub fn is_closed(&self) -> bool {
        self.closed
    }

    #[inline]
    pub fn eps_conv(&self) -> f64 {
        self.eps_conv
    }

    #[inline]
    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    /// Vertex `c_i`; indices wrap for closed polygons.
    #[inline]
    pub fn vertex(&self, i: usize) -> Vec2 {
        if self.closed {
            self.vertices[i % self.vertices.len()]
        } else {
            self.vertices[i]
        }
    }

    #[inline]
    pub fn half_sides(&self) -> &[Vec2] {
        &self.half_sides
    }

    /// Half side `L_i = (c_{i+1} - c_i) / 2`; indices wrap for closed polygons.
    #[inline]
    pub fn half_side(&self, i: usize) -> Vec2 {
        if self.closed {
            self.half_sides[i % self.half_sides.len()]
        } else {
            self.half_sides[i]
        }
    }

    #[inline]
    pub fn side_count(&self) -> usize {
        self.half_sides.len()
    }

    /// Largest distance between two vertices, computed once on demand.
    pub fn diameter(&self) -> f64 {
        *self.diameter.get_or_init(|| {
            let v = &self.vertices;
            let mut d: f64 = 0.0;
            for i in 0..v.len() {
                for j in i + 1..v.len() {
                    d = d.max((v[i] - v[j]).norm());
                }
            }
            d
        })
    }

    /// For every starting side `i`, the largest `w` such that sides
    /// `i, …, i + w - 1` are pairwise positive. Open polylines simply return
    /// the number of remaining sides; closed polygons use a two-pointer sweep.
    pub fn positive_windows(&self) -> Vec<usize> {
        let m = self.half_sides.len();
        if !self.closed {
            return (0..m).map(|i| m - i).collect();
        }
        let mut out = vec![0; m];
        let mut end = 0usize; // exclusive, absolute index
        for (i, w) in out.iter_mut().enumerate() {
            if end <= i {
                end = i + 1;
            }
            // Side directions turn monotonically and consecutive sides are
            // positive, so a new side is positive against the whole window iff it
            // is positive against its first side.
            while end - i < m && self.is_positive_pair(i, end) {
                end += 1;
            }
            *w = end - i;
        }
        out
    }

    /// Apply `x ↦ m·x + b` to every vertex and revalidate.
    pub fn map_affine(&self, m: [[f64; 2]; 2], b: Vec2) -> Result<Self, PolylineError> {
        let verts = self
            .vertices
            .iter()
            .map(|v| Vec2::new(m[0][0] * v.x + m[0][1] * v.y, m[1][0] * v.x + m[1][1] * v.y) + b)
            .collect();
        Self::with_tolerance(verts, self.closed, self.eps_conv)
    }
}

/// Signed shoelace area of a closed vertex loop (positive when anticlockwise).
pub fn shoelace_area(points: &[Vec2]) -> f64 {
    let n = points.len();
    if n < 3 {
        return 0.0;
    }
    let o = points[0];
    let mut twice = 0.0;
    for k in 1..n - 1 {
        twice += bracket2(points[k] - o, points[k + 1] - o);
    }
    0.5 * twice
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn bracket2_examples() {
        assert_eq!(bracket2(Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)), 1.0);
        assert_eq!(bracket2(Vec2::new(0.5, 0.0), Vec2::new(0.5, 0.5)), 0.25);
        let a = Vec2::new(3.7, -1.2);
        assert_eq!(bracket2(a, a), 0.0);
    }

    #[test]
    fn rot90_examples() {
        assert_eq!(rot90(Vec2::new(1.0, 0.0)), Vec2::new(0.0, 1.0));
        assert_eq!(rot90(Vec2::new(0.0, 1.0)), Vec2::new(-1.0, 0.0));
    }

    #[test]
    fn bracket3_examples() {
        let e1 = Vec3::new(1.0, 0.0, 0.0);
        let e2 = Vec3::new(0.0, 1.0, 0.0);
        assert_eq!(bracket3(e1, e2, Vec3::E3), 1.0);
        assert_eq!(bracket3(e1, e2, e1), 0.0);
        assert_eq!(bracket3(e1, Vec3::new(0.0, 2.0, 0.0), Vec3::new(0.0, 0.0, 3.0)), 6.0);
    }

    #[test]
    fn parabola_samples_validate() {
        let verts: Vec<Vec2> = (0..5).map(|i| Vec2::new(i as f64, (i * i) as f64 / 2.0)).collect();
        let poly = ConvexPolyline::new(verts.clone(), false).unwrap();
        for i in 0..poly.side_count() {
            assert_eq!(poly.half_side(i), (verts[i + 1] - verts[i]) * 0.5);
            for j in i + 1..poly.side_count() {
                let b = bracket2(poly.half_side(i), poly.half_side(j));
                assert_eq!(b, (j - i) as f64 / 4.0);
            }
        }
    }

    #[test]
    fn rejects_collinear_and_clockwise() {
        let collinear = vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 1.0), Vec2::new(2.0, 2.0)];
        match ConvexPolyline::new(collinear, false) {
            Err(PolylineError::NonConvex { i: 0, j: 1, bracket }) => assert_eq!(bracket, 0.0),
            other => panic!("unexpected {other:?}"),
        }
        let cw: Vec<Vec2> = (0..5)
            .rev()
            .map(|i| Vec2::new(i as f64, (i * i) as f64 / 2.0))
            .collect();
        match ConvexPolyline::new(cw, false) {
            Err(PolylineError::NonConvex { bracket, .. }) => assert!(bracket < 0.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_degenerate_inputs() {
        assert_eq!(
            ConvexPolyline::new(vec![Vec2::ZERO, Vec2::new(1.0, 0.0)], false).unwrap_err(),
            PolylineError::TooFewVertices(2)
        );
        let dup = vec![Vec2::ZERO, Vec2::ZERO, Vec2::new(1.0, 1.0)];
        assert_eq!(
            ConvexPolyline::new(dup, false).unwrap_err(),
            PolylineError::ZeroLengthSide(0)
        );
        let nan = vec![Vec2::ZERO, Vec2::new(f64::NAN, 0.0), Vec2::new(1.0, 1.0)];
        assert_eq!(ConvexPolyline::new(nan, false).unwrap_err(), PolylineError::NonFinite);
        assert!(Vec2::finite(f64::INFINITY, 0.0).is_err());
    }

    #[test]
    fn closed_square_and_windows() {
        let sq = vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
        ];
        let poly = ConvexPolyline::new(sq, true).unwrap();
        assert_eq!(poly.side_count(), 4);
        // Opposite sides are parallel, so only adjacent pairs are positive.
        assert_eq!(poly.positive_windows(), vec![2, 2, 2, 2]);

        let n = 16;
        let ngon: Vec<Vec2> = (0..n)
            .map(|k| {
                let a = std::f64::consts::TAU * k as f64 / n as f64;
                Vec2::new(a.cos(), a.sin())
            })
            .collect();
        let poly = ConvexPolyline::new(ngon.clone(), true).unwrap();
        assert!(poly.positive_windows().iter().all(|&w| w == 8));
        // Twice around is not a simple convex polygon.
        let mut twice = ngon.clone();
        twice.extend(ngon.iter().map(|v| *v * 1.0));
        let err = ConvexPolyline::new(twice, true).unwrap_err();
        assert!(matches!(
            err,
            PolylineError::ZeroLengthSide(_) | PolylineError::BadWinding(_)
        ));
    }

    #[test]
    fn shoelace_unit_square() {
        let sq = [
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
        ];
        assert_eq!(shoelace_area(&sq), 1.0);
    }

    fn v2() -> impl Strategy<Value = Vec2> {
        (-1e3..1e3f64, -1e3..1e3f64).prop_map(|(x, y)| Vec2::new(x, y))
    }

    proptest! {
        #[test]
        fn bracket_antisymmetric_bilinear(a in v2(), b in v2(), c in v2(), s in -10.0..10.0f64) {
            prop_assert_eq!(bracket2(a, b), -bracket2(b, a));
            let lhs = bracket2(a * s + c, b);
            let rhs = s * bracket2(a, b) + bracket2(c, b);
            let scale = (a.norm() * s.abs() + c.norm()) * b.norm() + 1.0;
            prop_assert!((lhs - rhs).abs() <= 1e-12 * scale);
        }

        #[test]
        fn bracket_is_minus_dot_with_rotation(a in v2(), b in v2()) {
            let r = bracket2(a, b) + a.dot(rot90(b));
            prop_assert!(r.abs() <= 1e-12 * (a.norm() * b.norm() + 1.0));
        }

        #[test]
        fn four_quarter_turns_are_identity(a in v2()) {
            prop_assert_eq!(rot90(rot90(rot90(rot90(a)))), a);
        }

        #[test]
        fn windows_match_all_pairs(seed in any::<u64>(), n in 3usize..40) {
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let poly = crate::random::random_closed_polygon(&mut rng, n, 1.0);
            let brute: Vec<usize> = (0..n)
                .map(|i| {
                    let mut w = 1;
                    while w < n && (i..i + w).all(|k| poly.is_positive_pair(k, i + w)) {
                        w += 1;
                    }
                    w
                })
                .collect();
            prop_assert_eq!(poly.positive_windows(), brute);
        }
    }
}
