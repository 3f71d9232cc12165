//! Inner area distance of a convex polyline on the grid of chord midpoints.
//!
//! The grid point `p(i, j) = (c_i + c_j) / 2` is the midpoint of the chord
//! `c_i c_j`, and `f(i, j)` is half the area that chord cuts off, equal to
//! `Σ_{i ≤ k < l ≤ j-1} [L_k, L_l]`. Cells are filled level by level
//! (`level = j - i`) with the O(1) update
//!
//! ```text
//! f(i, j+1) = f(i, j) + f(i+1, j+1) - f(i+1, j) + [L_i, L_j]
//! ```
//!
//! starting from `f = 0` on levels 0 and 1. Inside each parallelogram spanned by
//! `L_i` and `L_j` the distance is bilinear in the two edge parameters.

use thiserror::Error;

use crate::geom::{bracket2, ConvexPolyline, Vec2, Vec3};
use crate::report::VerificationReport;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GridError {
    #[error("level {requested} out of range (maximum {max})")]
    LevelOutOfRange { requested: usize, max: usize },
    #[error("level {requested} crosses a window of total turning ≥ π (maximum {max})")]
    WindowTurningExceeded { requested: usize, max: usize },
    #[error("index ({i}, {j}) out of range")]
    IndexOutOfRange { i: usize, j: usize },
    #[error("parallelogram cell ({i}, {j}) is not stored")]
    CellNotStored { i: usize, j: usize },
    #[error("bilinear parameter {0} outside [0, 1]")]
    ParameterOutOfRange(f64),
}

/// Largest level a grid over this polyline may reach.
///
/// Open polylines go up to `N - 1` (the chord joining the two endpoints).
/// Closed polygons stop before any stored parallelogram would span two sides
/// that are not positively oriented, i.e. before a window turns by π.
pub fn max_level(poly: &ConvexPolyline) -> usize {
    if poly.is_closed() {
        poly.positive_windows().into_iter().min().unwrap_or(1).saturating_sub(1)
    } else {
        poly.len() - 1
    }
}

/// The discrete indefinite improper affine sphere `q(i, j) = (p(i, j), f(i, j))`.
#[derive(Clone, Debug)]
pub struct InnerGrid {
    polyline: ConvexPolyline,
    max_level: usize,
    /// Start of each level inside `f`.
    offsets: Vec<usize>,
    f: Vec<f64>,
}

impl InnerGrid {
    #[inline]
    pub fn polyline(&self) -> &ConvexPolyline {
        &self.polyline
    }

    #[inline]
    pub fn max_level(&self) -> usize {
        self.max_level
    }

    /// Number of cells stored on `level`.
    #[inline]
    pub fn level_len(&self, level: usize) -> usize {
        if self.polyline.is_closed() {
            self.polyline.len()
        } else {
            self.polyline.len() - level
        }
    }

    #[inline]
    pub fn cell_count(&self) -> usize {
        self.f.len()
    }

    /// Raw level-major values; level `k` holds `f(i, i + k)` for consecutive `i`.
    #[inline]
    pub fn level(&self, level: usize) -> &[f64] {
        &self.f[self.offsets[level]..self.offsets[level] + self.level_len(level)]
    }

    /// Normalised storage position of `(i, j)`, if stored. For closed polygons
    /// `i` wraps modulo `N` and `j` is taken relative to it.
    #[inline]
    fn slot(&self, i: usize, j: usize) -> Option<usize> {
        if j < i {
            return None;
        }
        let k = j - i;
        if k > self.max_level {
            return None;
        }
        let i = if self.polyline.is_closed() {
            i % self.polyline.len()
        } else {
            if j >= self.polyline.len() {
                return None;
            }
            i
        };
        Some(self.offsets[k] + i)
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.slot(i, j).is_some()
    }

    /// Area distance at the grid point `p(i, j)`.
    pub fn f(&self, i: usize, j: usize) -> Option<f64> {
        self.slot(i, j).map(|s| self.f[s])
    }

    /// Grid point `p(i, j) = (c_i + c_j) / 2`.
    pub fn p(&self, i: usize, j: usize) -> Option<Vec2> {
        self.slot(i, j)
            .map(|_| (self.polyline.vertex(i) + self.polyline.vertex(j)) * 0.5)
    }

    /// `q(i, j) = (p(i, j), f(i, j))`, assembled on the fly.
    pub fn q(&self, i: usize, j: usize) -> Option<Vec3> {
        Some(self.p(i, j)?.lift(self.f(i, j)?))
    }

    /// Parallelogram area `a_ij = [L_i, L_j]` of the cell at `(i, j)`. `None`
    /// when the cell is not stored, lies on level 0 (no parallelogram), or side
    /// `j` does not exist (the last column of an open polyline).
    pub fn parallelogram_area(&self, i: usize, j: usize) -> Option<f64> {
        self.slot(i, j)?;
        if j == i {
            return None;
        }
        if !self.polyline.is_closed() && j >= self.polyline.side_count() {
            return None;
        }
        Some(bracket2(self.polyline.half_side(i), self.polyline.half_side(j)))
    }

    pub fn max_f(&self) -> f64 {
        self.f.iter().copied().fold(0.0, f64::max)
    }

    /// Every stored cell `(i, j)` in level-major order. For closed polygons
    /// `i < N` and `j` is not reduced modulo `N`.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..=self.max_level).flat_map(move |k| (0..self.level_len(k)).map(move |i| (i, i + k)))
    }

    /// Storage position of a cell returned by [`cells`](Self::cells); used by
    /// mesh export to number vertices.
    pub fn cell_index(&self, i: usize, j: usize) -> Option<usize> {
        self.slot(i, j)
    }
}

/// Build the inner grid up to `max_level` with the level recurrence.
/// Work and storage are `O(N · max_level)`.
pub fn build_inner_grid(polyline: &ConvexPolyline, max_level: usize) -> Result<InnerGrid, GridError> {
    let n = polyline.len();
    let cap = self::max_level(polyline);
    if polyline.is_closed() {
        if max_level >= n {
            return Err(GridError::LevelOutOfRange {
                requested: max_level,
                max: cap,
            });
        }
        if max_level > cap {
            return Err(GridError::WindowTurningExceeded {
                requested: max_level,
                max: cap,
            });
        }
    } else if max_level > cap {
        return Err(GridError::LevelOutOfRange {
            requested: max_level,
            max: cap,
        });
    }

    let closed = polyline.is_closed();
    let level_len = |k: usize| if closed { n } else { n - k };
    let mut offsets = Vec::with_capacity(max_level + 2);
    let mut total = 0usize;
    for k in 0..=max_level {
        offsets.push(total);
        total += level_len(k);
    }
    offsets.push(total);

    // Levels 0 and 1 are the zero seed.
    let mut f = vec![0.0; total];
    let l = polyline.half_sides();
    for k in 1..max_level {
        let (done, rest) = f.split_at_mut(offsets[k + 1]);
        let prev = &done[offsets[k - 1]..offsets[k - 1] + level_len(k - 1)];
        let cur = &done[offsets[k]..offsets[k] + level_len(k)];
        let next = &mut rest[..level_len(k + 1)];
        if closed {
            // Interior of the level, then the wrap-around tail.
            let split = n - k;
            for i in 0..split {
                next[i] = cur[i] + cur[i + 1] - prev[i + 1] + bracket2(l[i], l[i + k]);
            }
            for i in split..n {
                let i1 = if i + 1 == n { 0 } else { i + 1 };
                next[i] = cur[i] + cur[i1] - prev[i1] + bracket2(l[i], l[i + k - n]);
            }
        } else {
            for (i, out) in next.iter_mut().enumerate() {
                *out = cur[i] + cur[i + 1] - prev[i + 1] + bracket2(l[i], l[i + k]);
            }
        }
    }

    Ok(InnerGrid {
        polyline: polyline.clone(),
        max_level,
        offsets,
        f,
    })
}

/// Literal double sum `Σ_{i ≤ k < l ≤ j-1} [L_k, L_l]`, quadratic in `j - i`.
/// Reference for the recurrence.
pub fn inner_f_direct(polyline: &ConvexPolyline, i: usize, j: usize) -> Result<f64, GridError> {
    let n = polyline.len();
    let in_range = if polyline.is_closed() {
        j >= i && j - i < n
    } else {
        j >= i && j < n
    };
    if !in_range {
        return Err(GridError::IndexOutOfRange { i, j });
    }
    let mut sum = 0.0;
    for k in i..j {
        for l in k + 1..j {
            sum += bracket2(polyline.half_side(k), polyline.half_side(l));
        }
    }
    Ok(sum)
}

/// Point and exact distance inside the parallelogram at `(i, j)`:
/// `p(i, j) + λ L_i + μ L_j` and the bilinear blend of the four corner values.
pub fn eval_bilinear(grid: &InnerGrid, i: usize, j: usize, lambda: f64, mu: f64) -> Result<(Vec2, f64), GridError> {
    for t in [lambda, mu] {
        if !(0.0..=1.0).contains(&t) {
            return Err(GridError::ParameterOutOfRange(t));
        }
    }
    let missing = GridError::CellNotStored { i, j };
    if j <= i || grid.parallelogram_area(i, j).is_none() {
        return Err(missing);
    }
    let (f00, f10, f01, f11) = match (grid.f(i, j), grid.f(i + 1, j), grid.f(i, j + 1), grid.f(i + 1, j + 1)) {
        (Some(a), Some(b), Some(c), Some(d)) => (a, b, c, d),
        _ => return Err(missing),
    };
    let poly = grid.polyline();
    let point = grid.p(i, j).ok_or(missing)? + poly.half_side(i) * lambda + poly.half_side(j) * mu;
    let value =
        (1.0 - lambda) * (1.0 - mu) * f00 + lambda * (1.0 - mu) * f10 + (1.0 - lambda) * mu * f01 + lambda * mu * f11;
    Ok((point, value))
}

/// Residuals of the two conditions defining a discrete indefinite improper
/// affine sphere.
#[derive(Clone, Debug, PartialEq)]
pub struct SphereCheckReport {
    /// Distance of the five-point cross to its plane over the cross diameter.
    pub max_coplanarity_residual: f64,
    /// Horizontal part of `q(i,j) + q(i+1,j+1) - q(i+1,j) - q(i,j+1)` over the
    /// polyline diameter.
    pub max_cross_difference_xy_residual: f64,
    /// `|vertical part + a_ij|` over the grid's value scale.
    pub max_cross_difference_z_error: f64,
    pub crosses_checked: usize,
    pub plaquettes_checked: usize,
    pub pass: bool,
}

impl SphereCheckReport {
    pub fn to_report(&self, tol: f64) -> VerificationReport {
        let mut r = VerificationReport::new("discrete indefinite improper affine sphere");
        r.check(
            "five-point cross coplanarity (relative)",
            self.max_coplanarity_residual,
            tol,
        )
        .check(
            "mixed difference horizontal part (relative)",
            self.max_cross_difference_xy_residual,
            tol,
        )
        .check(
            "mixed difference vertical part + a_ij (relative)",
            self.max_cross_difference_z_error,
            tol,
        )
        .note(format!(
            "{} crosses, {} plaquettes checked",
            self.crosses_checked, self.plaquettes_checked
        ));
        r
    }
}

/// Check coplanarity of every interior five-point cross and verticality of
/// every mixed second difference (which must equal `(0, 0, -a_ij)`).
pub fn verify_indefinite_sphere(grid: &InnerGrid, tol: f64) -> SphereCheckReport {
    let poly = grid.polyline();
    let n = poly.len();
    let closed = poly.is_closed();
    let diam = poly.diameter().max(f64::MIN_POSITIVE);

    let mut value_scale = grid.max_f();
    for (i, j) in grid.cells() {
        if let Some(a) = grid.parallelogram_area(i, j) {
            value_scale = value_scale.max(a.abs());
        }
    }
    let value_scale = value_scale.max(f64::MIN_POSITIVE);

    let mut coplanar: f64 = 0.0;
    let mut cross_xy: f64 = 0.0;
    let mut cross_z: f64 = 0.0;
    let mut crosses = 0;
    let mut plaquettes = 0;

    // Shift closed-polygon indices by N so `i - 1` never underflows.
    let shift = if closed { n } else { 0 };
    for (i0, j0) in grid.cells().collect::<Vec<_>>() {
        let (i, j) = (i0 + shift, j0 + shift);

        if let (Some(a), Some(q00), Some(q10), Some(q01), Some(q11)) = (
            grid.parallelogram_area(i, j),
            grid.q(i, j),
            grid.q(i + 1, j),
            grid.q(i, j + 1),
            grid.q(i + 1, j + 1),
        ) {
            if j > i {
                let d = q00 + q11 - q10 - q01;
                cross_xy = cross_xy.max(d.xy().norm() / diam);
                cross_z = cross_z.max((d.z + a).abs() / value_scale);
                plaquettes += 1;
            }
        }

        if i == 0 || j <= i {
            continue;
        }
        if let (Some(q0), Some(qa), Some(qb), Some(qc), Some(qd)) = (
            grid.q(i, j),
            grid.q(i + 1, j),
            grid.q(i, j + 1),
            grid.q(i - 1, j),
            grid.q(i, j - 1),
        ) {
            let normal = (qa - q0).cross(qb - q0);
            let nn = normal.norm();
            let pts = [q0, qa, qb, qc, qd];
            let mut cell_diam: f64 = 0.0;
            for s in 0..pts.len() {
                for t in s + 1..pts.len() {
                    cell_diam = cell_diam.max((pts[s] - pts[t]).norm());
                }
            }
            if nn > 0.0 && cell_diam > 0.0 {
                let dist = [qc, qd]
                    .iter()
                    .map(|&x| normal.dot(x - q0).abs() / nn)
                    .fold(0.0, f64::max);
                coplanar = coplanar.max(dist / cell_diam);
            } else {
                coplanar = f64::INFINITY;
            }
            crosses += 1;
        }
    }

    SphereCheckReport {
        max_coplanarity_residual: coplanar,
        max_cross_difference_xy_residual: cross_xy,
        max_cross_difference_z_error: cross_z,
        crosses_checked: crosses,
        plaquettes_checked: plaquettes,
        pass: coplanar <= tol && cross_xy <= tol && cross_z <= tol,
    }
}
