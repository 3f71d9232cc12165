//! Fixtures shared by the criterion benches.

use areadist::random::{random_closed_polygon, random_open_polyline};
use areadist::ConvexPolyline;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn open_fixture(n: usize) -> ConvexPolyline {
    let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
    random_open_polyline(&mut rng, n, 10.0)
}

pub fn closed_fixture(n: usize) -> ConvexPolyline {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed ^ n as u64);
    random_closed_polygon(&mut rng, n, 10.0)
}
