//! Outer area distance by discrete analytic continuation of a convex polyline.
//!
//! The coordinates `g = (X, Y)` live on the integer lattice `(u, v)` and the
//! conjugate field `h = (h₁, h₂)` on the dual lattice `(u + ½, v + ½)`. Row
//! `v = 0` is the input and `h(u + ½, ½) = L_u`. Each new row comes from the
//! discrete Cauchy–Riemann pair
//!
//! ```text
//! h(u+½, v+½) = h(u+½, v-½) + g(u+1, v) - g(u, v)
//! g(u, v+1)   = g(u, v) - (h(u+½, v+½) - h(u-½, v+½))
//! ```
//!
//! and the distance grows column-wise by `F(u, v+1) = F(u, v) + [h(u-½, v+½), h(u+½, v+½)]`.
//! Below the input the field is mirrored: `h(u + ½, -½) = -h(u + ½, ½)`.
//!
//! Open polylines lose one lattice point at each end per row, so row `v`
//! covers `u ∈ [v, N-1-v]`. Closed polygons are periodic in `u`.
//!
//! Indices in this module: `u` is an `isize` lattice column and the dual
//! accessors take the lower-left integer corner, so `h(u, v)` is
//! `h(u + ½, v + ½)`.

use thiserror::Error;

use crate::geom::{bracket2, ConvexPolyline, Vec2, Vec3};
use crate::report::VerificationReport;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OuterError {
    #[error("need at least one level")]
    NoLevels,
    #[error("levels {requested} exhaust the open polyline (maximum {max})")]
    LevelsOutOfRange { requested: usize, max: usize },
}

/// Number of rows an open polyline with `n` vertices supports; closed polygons
/// have no limit.
pub fn max_outer_levels(poly: &ConvexPolyline) -> Option<usize> {
    if poly.is_closed() {
        None
    } else {
        Some((poly.len() - 1) / 2)
    }
}

/// Half-integer dual field `h(u + ½, v + ½)` for `v ≥ 0`, one row per level.
#[derive(Clone, Debug)]
pub struct DualField {
    rows: Vec<Vec<Vec2>>,
    n: usize,
    closed: bool,
}

impl DualField {
    /// First index stored on row `v`.
    fn lo(&self, v: usize) -> isize {
        if self.closed {
            0
        } else {
            v as isize
        }
    }

    /// Number of rows (`v = 0 .. rows`).
    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    /// `h(u + ½, v + ½)`. Row `v = -1` is the mirror of row 0.
    pub fn get(&self, u: isize, v: isize) -> Option<Vec2> {
        if v == -1 {
            return self.get(u, 0).map(|x| -x);
        }
        if v < 0 {
            return None;
        }
        let row = self.rows.get(v as usize)?;
        if self.closed {
            return Some(row[u.rem_euclid(self.n as isize) as usize]);
        }
        let k = u - self.lo(v as usize);
        if k < 0 {
            return None;
        }
        row.get(k as usize).copied()
    }

    /// Inclusive `u` range of row `v`, `None` when the row is empty or absent.
    pub fn row_range(&self, v: usize) -> Option<(isize, isize)> {
        let row = self.rows.get(v)?;
        if row.is_empty() {
            return None;
        }
        let lo = self.lo(v);
        Some((lo, lo + row.len() as isize - 1))
    }
}

/// The seed row `h(u + ½, ½) = L_u`.
pub fn seed_h(poly: &ConvexPolyline) -> DualField {
    DualField {
        rows: vec![poly.half_sides().to_vec()],
        n: poly.len(),
        closed: poly.is_closed(),
    }
}

/// The discrete definite improper affine sphere `Q(u, v) = (X, Y, F)` together
/// with its conjugate field.
#[derive(Clone, Debug)]
pub struct OuterGrid {
    polyline: ConvexPolyline,
    levels: usize,
    g: Vec<Vec<Vec2>>,
    f: Vec<Vec<f64>>,
    h: DualField,
}

/// Continue the polyline outward by `levels` rows.
pub fn propagate_outer(poly: &ConvexPolyline, levels: usize) -> Result<OuterGrid, OuterError> {
    if levels == 0 {
        return Err(OuterError::NoLevels);
    }
    if let Some(max) = max_outer_levels(poly) {
        if levels > max {
            return Err(OuterError::LevelsOutOfRange { requested: levels, max });
        }
    }
    let n = poly.len();
    let closed = poly.is_closed();
    let mut h = seed_h(poly);
    let mut g = vec![poly.vertices().to_vec()];
    let mut f = vec![vec![0.0; n]];

    for v in 0..levels {
        // Row v + 1 of g and F from the dual row v.
        let hv = &h.rows[v];
        let (gv, fv) = (&g[v], &f[v]);
        let (gn, fnext): (Vec<Vec2>, Vec<f64>) = if closed {
            (0..n)
                .map(|u| {
                    let left = hv[(u + n - 1) % n];
                    let right = hv[u];
                    (gv[u] - (right - left), fv[u] + bracket2(left, right))
                })
                .unzip()
        } else {
            // Row v holds u ∈ [v, N-1-v] at offset v; hv holds u ∈ [v, N-2-v].
            (v + 1..n - 1 - v)
                .map(|u| {
                    let left = hv[u - 1 - v];
                    let right = hv[u - v];
                    let k = u - v;
                    (gv[k] - (right - left), fv[k] + bracket2(left, right))
                })
                .unzip()
        };
        g.push(gn);
        f.push(fnext);

        // Dual row v + 1 from dual row v and the new row of g.
        let gv1 = &g[v + 1];
        let hn: Vec<Vec2> = if closed {
            (0..n).map(|u| hv[u] + gv1[(u + 1) % n] - gv1[u]).collect()
        } else {
            let w = v + 1;
            // u ∈ [w, N-2-w]; may be empty on the last admissible row.
            (w..(n - 1).saturating_sub(w))
                .map(|u| hv[u - v] + gv1[u + 1 - w] - gv1[u - w])
                .collect()
        };
        h.rows.push(hn);
    }

    Ok(OuterGrid {
        polyline: poly.clone(),
        levels,
        g,
        f,
        h,
    })
}

impl OuterGrid {
    pub fn polyline(&self) -> &ConvexPolyline {
        &self.polyline
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn dual(&self) -> &DualField {
        &self.h
    }

    fn slot(&self, u: isize, v: usize) -> Option<usize> {
        let row = self.g.get(v)?;
        if self.polyline.is_closed() {
            return Some(u.rem_euclid(row.len() as isize) as usize);
        }
        let k = u - v as isize;
        (k >= 0 && (k as usize) < row.len()).then_some(k as usize)
    }

    /// Inclusive `u` range of row `v`. Closed polygons report one period.
    pub fn row_range(&self, v: usize) -> Option<(isize, isize)> {
        let row = self.g.get(v)?;
        if row.is_empty() {
            return None;
        }
        let lo = if self.polyline.is_closed() { 0 } else { v as isize };
        Some((lo, lo + row.len() as isize - 1))
    }

    /// `(X, Y)` at `(u, v)`.
    pub fn xy(&self, u: isize, v: usize) -> Option<Vec2> {
        self.slot(u, v).map(|k| self.g[v][k])
    }

    pub fn f(&self, u: isize, v: usize) -> Option<f64> {
        self.slot(u, v).map(|k| self.f[v][k])
    }

    pub fn q(&self, u: isize, v: usize) -> Option<Vec3> {
        Some(self.xy(u, v)?.lift(self.f(u, v)?))
    }

    /// `h(u + ½, v + ½)`; `v = -1` gives the mirror row.
    pub fn h(&self, u: isize, v: isize) -> Option<Vec2> {
        self.h.get(u, v)
    }

    /// Conormal `ν(u + ½, v + ½) = (-h₂, h₁, 1)`.
    pub fn conormal(&self, u: isize, v: isize) -> Option<Vec3> {
        self.h(u, v).map(conormal_of)
    }

    /// `F(u+1, v) - F(u, v) = -[h(u+½, v-½), h(u+½, v+½)]`.
    pub fn increment_u(&self, u: isize, v: usize) -> Option<f64> {
        let v = v as isize;
        Some(-bracket2(self.h(u, v - 1)?, self.h(u, v)?))
    }

    /// `F(u, v+1) - F(u, v) = [h(u-½, v+½), h(u+½, v+½)]`.
    pub fn increment_v(&self, u: isize, v: usize) -> Option<f64> {
        let v = v as isize;
        Some(bracket2(self.h(u - 1, v)?, self.h(u, v)?))
    }

    /// Every lattice point `(u, v)`, row by row.
    pub fn points(&self) -> impl Iterator<Item = (isize, usize)> + '_ {
        (0..=self.levels).flat_map(move |v| {
            let (lo, hi) = self.row_range(v).unwrap_or((0, -1));
            (lo..=hi).map(move |u| (u, v))
        })
    }

    /// Lower-left corners of the stored quads `(u,v), (u+1,v), (u+1,v+1), (u,v+1)`.
    pub fn quads(&self) -> impl Iterator<Item = (isize, usize)> + '_ {
        (0..self.levels).flat_map(move |v| {
            let (lo, hi) = match self.row_range(v + 1) {
                Some(r) if self.polyline.is_closed() => r,
                Some((lo, hi)) => (lo, hi - 1),
                None => (0, -1),
            };
            (lo..=hi).map(move |u| (u, v))
        })
    }

    pub fn max_abs_f(&self) -> f64 {
        self.f.iter().flatten().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// Side of the bounding box of all lattice points.
    fn coord_scale(&self) -> f64 {
        let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = -lo;
        for p in self.g.iter().flatten() {
            lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        (hi.x - lo.x).max(hi.y - lo.y).max(f64::MIN_POSITIVE)
    }

    /// `F` along column `u` for `v = 0..`, as far as the column is stored.
    pub fn column(&self, u: isize) -> Vec<f64> {
        (0..=self.levels).map_while(|v| self.f(u, v)).collect()
    }
}

pub fn conormal_of(h: Vec2) -> Vec3 {
    Vec3::new(-h.y, h.x, 1.0)
}

/// Discrete area form `A(u, v) = [v₃, v₂] + [v₁, v₄]` built from the four
/// neighbour differences of `(X, Y)` (right, up, left, down).
pub fn area_form(grid: &OuterGrid, u: isize, v: usize) -> Option<f64> {
    if v == 0 {
        return None;
    }
    let p = grid.xy(u, v)?;
    let v1 = grid.xy(u + 1, v)? - p;
    let v2 = grid.xy(u, v + 1)? - p;
    let v3 = grid.xy(u - 1, v)? - p;
    let v4 = grid.xy(u, v - 1)? - p;
    Some(bracket2(v3, v2) + bracket2(v1, v4))
}

fn laplacian(grid: &OuterGrid, u: isize, v: usize) -> Option<Vec3> {
    if v == 0 {
        return None;
    }
    let c = grid.q(u, v)?;
    Some(grid.q(u + 1, v)? + grid.q(u - 1, v)? + grid.q(u, v + 1)? + grid.q(u, v - 1)? - c * 4.0)
}

/// Largest path mismatch of the two F increments around a plaquette,
/// `|DFu(u,v) + DFv(u+1,v) - DFv(u,v) - DFu(u,v+1)|`, relative to the
/// largest `|F|` (absolute when F vanishes). Zero when there are no
/// plaquettes to check.
pub fn integrability_residual(grid: &OuterGrid) -> f64 {
    let scale = grid.max_abs_f().max(1.0e-300);
    let mut worst: f64 = 0.0;
    for (u, v) in grid.quads() {
        if let (Some(a), Some(b), Some(c), Some(d)) = (
            grid.increment_u(u, v),
            grid.increment_v(u + 1, v),
            grid.increment_v(u, v),
            grid.increment_u(u, v + 1),
        ) {
            worst = worst.max((a + b - c - d).abs());
        }
    }
    if grid.max_abs_f() > 0.0 {
        worst / scale
    } else {
        worst
    }
}

/// Residuals of the conditions defining a discrete definite improper affine
/// sphere, each relative to the grid's coordinate or value scale.
#[derive(Clone, Debug, PartialEq)]
pub struct DefiniteSphereReport {
    /// `|e · ν| / (|e| |ν|)` over every quad edge `e` and its conormal.
    pub max_planarity_residual: f64,
    /// Edge minus the conormal cross product it should equal.
    pub max_cross_identity_residual: f64,
    /// Horizontal part of the five-point laplacian of `Q`.
    pub max_harmonic_residual: f64,
    /// `|Δ(F) - A|`.
    pub max_laplacian_f_residual: f64,
    pub integrability_residual: f64,
    pub quads_checked: usize,
    pub points_checked: usize,
    /// Whether F is nondecreasing in `v` along every stored column.
    pub outward_growth: bool,
    pub pass: bool,
}

impl DefiniteSphereReport {
    pub fn to_report(&self, tol: f64) -> VerificationReport {
        let mut r = VerificationReport::new("discrete definite improper affine sphere");
        r.check("quad edges orthogonal to conormal", self.max_planarity_residual, tol)
            .check("edge = conormal cross product", self.max_cross_identity_residual, tol)
            .check("X, Y discrete harmonic (relative)", self.max_harmonic_residual, tol)
            .check("laplacian of F equals A (relative)", self.max_laplacian_f_residual, tol)
            .check("F increments integrable (relative)", self.integrability_residual, tol)
            .note(format!(
                "{} quads, {} interior points checked",
                self.quads_checked, self.points_checked
            ))
            .note(format!(
                "F nondecreasing outward along columns: {}",
                if self.outward_growth { "yes" } else { "no" }
            ));
        r
    }
}

pub fn verify_definite_sphere(grid: &OuterGrid, tol: f64) -> DefiniteSphereReport {
    let coord = grid.coord_scale();
    let mut value_scale = grid.max_abs_f();

    let mut planar: f64 = 0.0;
    let mut cross: f64 = 0.0;
    let mut quads = 0;
    let rel = |e: Vec3, n: Vec3| {
        let d = e.norm() * n.norm();
        if d > 0.0 {
            e.dot(n).abs() / d
        } else {
            0.0
        }
    };
    let diff = |a: Vec3, b: Vec3, zs: f64| {
        let d = a - b;
        (d.xy().norm() / coord).max(d.z.abs() / zs)
    };

    let mut areas = Vec::new();
    for (u, v) in grid.points() {
        if let Some(a) = area_form(grid, u, v) {
            value_scale = value_scale.max(a.abs());
            areas.push((u, v, a));
        }
    }
    let value_scale = value_scale.max(f64::MIN_POSITIVE);

    for (u, v) in grid.quads() {
        let vi = v as isize;
        let corners = (grid.q(u, v), grid.q(u + 1, v), grid.q(u + 1, v + 1), grid.q(u, v + 1));
        let (Some(q00), Some(q10), Some(q11), Some(q01)) = corners else {
            continue;
        };
        let Some(nu) = grid.conormal(u, vi) else {
            continue;
        };
        quads += 1;
        let edges = [q10 - q00, q11 - q10, q11 - q01, q01 - q00];
        for e in edges {
            planar = planar.max(rel(e, nu));
        }
        // Literal identities on the bottom and left edges; the top and right
        // edges are the bottom and left edges of neighbouring quads.
        if let Some(below) = grid.conormal(u, vi - 1) {
            cross = cross.max(diff(q10 - q00, nu.cross(below), value_scale));
        }
        if let Some(left) = grid.conormal(u - 1, vi) {
            cross = cross.max(diff(q01 - q00, -nu.cross(left), value_scale));
        }
    }

    let mut harmonic: f64 = 0.0;
    let mut lap_f: f64 = 0.0;
    let mut points = 0;
    for (u, v, a) in areas {
        if let Some(d) = laplacian(grid, u, v) {
            harmonic = harmonic.max(d.xy().norm() / coord);
            lap_f = lap_f.max((d.z - a).abs() / value_scale);
            points += 1;
        }
    }

    let integ = integrability_residual(grid);
    let outward_growth = column_starts(grid).all(|u| grid.column(u).windows(2).all(|w| w[1] >= w[0]));

    DefiniteSphereReport {
        max_planarity_residual: planar,
        max_cross_identity_residual: cross,
        max_harmonic_residual: harmonic,
        max_laplacian_f_residual: lap_f,
        integrability_residual: integ,
        quads_checked: quads,
        points_checked: points,
        outward_growth,
        pass: planar <= tol && cross <= tol && harmonic <= tol && lap_f <= tol && integ <= tol,
    }
}

fn column_starts(grid: &OuterGrid) -> impl Iterator<Item = isize> {
    let (lo, hi) = grid.row_range(0).unwrap_or((0, -1));
    lo..=hi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{parabola_samples, random_closed_polygon, random_open_polyline, regular_polygon};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn seed_is_half_side() {
        let h = seed_h(&parabola_samples(6));
        for u in 0..5 {
            let x = h.get(u, 0).unwrap();
            assert_eq!(x, Vec2::new(0.5, (2 * u + 1) as f64 / 4.0));
            assert_eq!(h.get(u, -1).unwrap(), -x);
        }
        assert!(h.get(5, 0).is_none());

        let n = 12;
        let poly = regular_polygon(n);
        let h = seed_h(&poly);
        let mut sum = Vec2::ZERO;
        for u in 0..n as isize {
            assert!((h.get(u, 0).unwrap().norm() - (PI / n as f64).sin()).abs() < 1e-15);
            sum += h.get(u, 0).unwrap() * 2.0;
        }
        assert!(sum.norm() < 1e-14);
    }

    #[test]
    fn parabola_first_row() {
        let g = propagate_outer(&parabola_samples(11), 1).unwrap();
        for u in 1..=9 {
            assert_eq!(g.f(u, 1), Some(0.25));
            let x = u as f64;
            assert_eq!(g.xy(u, 1), Some(Vec2::new(x, x * x / 2.0 - 0.5)));
        }
        assert!(g.f(0, 1).is_none() && g.f(10, 1).is_none());
        for u in 0..10 {
            assert_eq!(g.increment_u(u, 0), Some(0.0));
        }
    }

    #[test]
    fn parabola_lattice_values() {
        // X, Y follow the smooth chart exactly; F is v³/3 - v/12.
        let g = propagate_outer(&parabola_samples(21), 6).unwrap();
        for (u, v) in g.points() {
            let (x, t) = (u as f64, v as f64);
            let p = g.xy(u, v).unwrap();
            assert!((p.x - x).abs() < 1e-12);
            assert!((p.y - (x * x - t * t) / 2.0).abs() < 1e-9);
            assert!((g.f(u, v).unwrap() - (t.powi(3) / 3.0 - t / 12.0)).abs() < 1e-10);
            if let Some(a) = area_form(&g, u, v) {
                assert!((a - 2.0 * t).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn diamond_shrinks_and_errors() {
        let poly = parabola_samples(9);
        assert_eq!(max_outer_levels(&poly), Some(4));
        let g = propagate_outer(&poly, 4).unwrap();
        assert_eq!(g.row_range(4), Some((4, 4)));
        assert_eq!(g.dual().row_range(3), Some((3, 4)));
        assert_eq!(g.dual().row_range(4), None);
        assert_eq!(
            propagate_outer(&poly, 5).unwrap_err(),
            OuterError::LevelsOutOfRange { requested: 5, max: 4 }
        );
        assert_eq!(propagate_outer(&poly, 0).unwrap_err(), OuterError::NoLevels);
        assert!(verify_definite_sphere(&g, 1e-11).pass);
    }

    #[test]
    fn single_level_is_vacuous() {
        let g = propagate_outer(&parabola_samples(3), 1).unwrap();
        assert_eq!(integrability_residual(&g), 0.0);
    }

    #[test]
    fn parabola_sphere_residuals() {
        let g = propagate_outer(&parabola_samples(40), 3).unwrap();
        assert!(integrability_residual(&g) < 1e-12);
        let r = verify_definite_sphere(&g, 1e-11);
        assert!(r.pass, "{}", r.to_report(1e-11));
        assert!(r.outward_growth);
        assert!(r.points_checked > 0 && r.quads_checked > 0);
    }

    #[test]
    fn regular_polygons() {
        let g32 = propagate_outer(&regular_polygon(32), 5).unwrap();
        assert!(integrability_residual(&g32) < 1e-12);
        let r = verify_definite_sphere(&g32, 1e-11);
        assert!(r.pass, "{}", r.to_report(1e-11));
        // Rotational symmetry: F is the same on every column.
        for v in 0..=5 {
            let f0 = g32.f(0, v).unwrap();
            for u in 1..32 {
                assert!((g32.f(u, v).unwrap() - f0).abs() < 1e-12 * (1.0 + f0.abs()));
            }
        }
        let g16 = propagate_outer(&regular_polygon(16), 3).unwrap();
        assert!(verify_definite_sphere(&g16, 1e-11).max_planarity_residual < 1e-11);
        // Periodic access.
        assert_eq!(g16.xy(-1, 2), g16.xy(15, 2));
    }

    #[test]
    fn tampered_grid_fails() {
        let mut g = propagate_outer(&regular_polygon(20), 4).unwrap();
        g.f[2][5] += 1e-3;
        let r = verify_definite_sphere(&g, 1e-9);
        assert!(!r.pass);
        assert!(r.max_laplacian_f_residual > 1e-9);
    }

    #[test]
    fn random_inputs_verify() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let open = random_open_polyline(&mut rng, 25, 10.0);
            let g = propagate_outer(&open, 5).unwrap();
            let r = verify_definite_sphere(&g, 1e-10);
            assert!(r.pass, "{}", r.to_report(1e-10));
            let closed = random_closed_polygon(&mut rng, 30, 10.0);
            let g = propagate_outer(&closed, 5).unwrap();
            let r = verify_definite_sphere(&g, 1e-10);
            assert!(r.pass, "{}", r.to_report(1e-10));
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn row_zero_is_input(seed in any::<u64>(), n in 5usize..40, closed in any::<bool>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let poly = if closed {
                random_closed_polygon(&mut rng, n, 5.0)
            } else {
                random_open_polyline(&mut rng, n, 5.0)
            };
            let g = propagate_outer(&poly, 2).unwrap();
            for (u, c) in poly.vertices().iter().enumerate() {
                prop_assert_eq!(g.xy(u as isize, 0), Some(*c));
                prop_assert_eq!(g.f(u as isize, 0), Some(0.0));
            }
            for (u, v) in g.quads() {
                let nu = g.conormal(u, v as isize).unwrap();
                prop_assert_eq!(nu.z, 1.0);
            }
        }

        #[test]
        fn affine_equivariance(seed in any::<u64>(), a in -2.0f64..2.0, b in -2.0f64..2.0) {
            // X, Y follow affine maps of the input; F scales with the determinant.
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let poly = random_open_polyline(&mut rng, 15, 5.0);
            let m = [[1.0 + a * a, a], [b, 1.0 + a * b + 0.5]];
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            prop_assume!(det > 0.1);
            let img = poly.map_affine(m, Vec2::new(b, a)).unwrap();
            let g = propagate_outer(&poly, 4).unwrap();
            let gi = propagate_outer(&img, 4).unwrap();
            let scale = g.max_abs_f().max(1.0);
            for (u, v) in g.points() {
                let fa = g.f(u, v).unwrap() * det;
                prop_assert!((gi.f(u, v).unwrap() - fa).abs() <= 1e-9 * scale * det);
            }
        }
    }
}
