//! Random strictly convex inputs for tests, benches and the CLI.

use std::f64::consts::{PI, TAU};

use rand::Rng;

use crate::geom::{ConvexPolyline, Vec2};

/// Open strictly convex polyline with `n` vertices whose coordinates fit in
/// `[-extent, extent]²`. Side directions increase strictly and the total
/// turning stays below `0.9π`, so every pair of sides is positively oriented.
pub fn random_open_polyline<R: Rng + ?Sized>(rng: &mut R, n: usize, extent: f64) -> ConvexPolyline {
    assert!(n >= 3, "need at least 3 vertices");
    let sides = n - 1;
    let total = rng.gen_range(0.3 * PI..0.9 * PI);
    let mut steps: Vec<f64> = (0..sides).map(|_| rng.gen_range(0.2..1.0)).collect();
    let sum: f64 = steps.iter().sum();
    // steps[0] is the offset of the first side inside the turning budget.
    for s in &mut steps {
        *s *= total / sum;
    }
    let mut theta = rng.gen_range(0.0..TAU);
    let mut pts = Vec::with_capacity(n);
    let mut p = Vec2::ZERO;
    pts.push(p);
    for (k, step) in steps.iter().enumerate() {
        if k > 0 {
            theta += step;
        }
        let len = rng.gen_range(0.5..1.5);
        p += Vec2::new(theta.cos(), theta.sin()) * len;
        pts.push(p);
    }
    fit_to_box(&mut pts, extent);
    ConvexPolyline::new(pts, false).expect("generator produced a non-convex polyline")
}

/// Closed strictly convex polygon: `n` points at sorted random angles on a
/// random ellipse.
pub fn random_closed_polygon<R: Rng + ?Sized>(rng: &mut R, n: usize, extent: f64) -> ConvexPolyline {
    assert!(n >= 3, "need at least 3 vertices");
    let a = rng.gen_range(0.5..1.0);
    let b = rng.gen_range(0.5..1.0);
    let rot = rng.gen_range(0.0..TAU);
    let mut gaps: Vec<f64> = (0..n).map(|_| rng.gen_range(0.3..1.0)).collect();
    let sum: f64 = gaps.iter().sum();
    for g in &mut gaps {
        *g *= TAU / sum;
    }
    let mut angle: f64 = 0.0;
    let mut pts = Vec::with_capacity(n);
    for g in gaps {
        let e = Vec2::new(a * angle.cos(), b * angle.sin());
        pts.push(Vec2::new(
            rot.cos() * e.x - rot.sin() * e.y,
            rot.sin() * e.x + rot.cos() * e.y,
        ));
        angle += g;
    }
    fit_to_box(&mut pts, extent);
    ConvexPolyline::new(pts, true).expect("generator produced a non-convex polygon")
}

/// Regular `n`-gon inscribed in the unit circle, starting at `(1, 0)`.
pub fn regular_polygon(n: usize) -> ConvexPolyline {
    let pts = (0..n)
        .map(|k| {
            let a = TAU * k as f64 / n as f64;
            Vec2::new(a.cos(), a.sin())
        })
        .collect();
    ConvexPolyline::new(pts, true).expect("regular polygon")
}

/// Parabola samples `(k, k²/2)` for `k = 0..n`.
pub fn parabola_samples(n: usize) -> ConvexPolyline {
    let pts = (0..n)
        .map(|k| {
            let x = k as f64;
            Vec2::new(x, x * x / 2.0)
        })
        .collect();
    ConvexPolyline::new(pts, false).expect("parabola samples")
}

fn fit_to_box(pts: &mut [Vec2], extent: f64) {
    let (mut lo, mut hi) = (pts[0], pts[0]);
    for p in pts.iter() {
        lo = Vec2::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Vec2::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let center = lo.midpoint(hi);
    let half = 0.5 * (hi.x - lo.x).max(hi.y - lo.y);
    for p in pts.iter_mut() {
        *p = (*p - center) * (extent / half);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generators_stay_in_box() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [3, 5, 17, 64] {
            let open = random_open_polyline(&mut rng, n, 10.0);
            let closed = random_closed_polygon(&mut rng, n, 10.0);
            for p in open.vertices().iter().chain(closed.vertices()) {
                assert!(p.x.abs() <= 10.0 + 1e-9 && p.y.abs() <= 10.0 + 1e-9);
            }
            assert_eq!(open.len(), n);
            assert_eq!(closed.len(), n);
        }
    }
}
