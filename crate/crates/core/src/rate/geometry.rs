//! Seven flat-top hexagonal cells with circumradius 1 under wrap-around.
//!
//! Cell 0 is centered at the origin. Cells 1 to 6 surround it at distance
//! `√3`. The cluster tiles the plane by translations of length `√21`, and
//! distances are taken to the nearest translated copy, so every cell
//! borders every other.

use rand::Rng;

pub type Point = [f64; 2];

pub const NUM_CELLS: usize = 7;

/// Lower clamp on every link distance.
pub const MIN_DISTANCE: f64 = 0.05;

const SQRT3: f64 = 1.732_050_807_568_877_2;

fn rotate(p: Point, degrees: f64) -> Point {
    let (s, c) = degrees.to_radians().sin_cos();
    [c * p[0] - s * p[1], s * p[0] + c * p[1]]
}

pub fn cell_centers() -> [Point; NUM_CELLS] {
    let mut out = [[0.0, 0.0]; NUM_CELLS];
    for (k, c) in out.iter_mut().enumerate().skip(1) {
        *c = rotate([SQRT3, 0.0], 30.0 + 60.0 * (k - 1) as f64);
    }
    out
}

/// Translations of the cluster considered for wrap-around: the identity and
/// the six nearest copies.
pub fn wrap_shifts() -> [Point; NUM_CELLS] {
    let mut out = [[0.0, 0.0]; NUM_CELLS];
    for (k, s) in out.iter_mut().enumerate().skip(1) {
        *s = rotate([3.0, 2.0 * SQRT3], 60.0 * (k - 1) as f64);
    }
    out
}

/// Whether `p`, relative to a cell center, lies in the flat-top hexagon
/// with circumradius 1.
pub fn inside_hexagon(p: Point) -> bool {
    let (x, y) = (p[0].abs(), p[1].abs());
    y <= SQRT3 / 2.0 && SQRT3 * x + y <= SQRT3
}

/// A uniform point in the hexagon around `center`, by rejection from the
/// bounding box.
pub fn drop_user<R: Rng + ?Sized>(rng: &mut R, center: Point) -> Point {
    loop {
        let x = 2.0 * rng.random::<f64>() - 1.0;
        let y = SQRT3 * (rng.random::<f64>() - 0.5);
        if inside_hexagon([x, y]) {
            return [center[0] + x, center[1] + y];
        }
    }
}

/// Distance from `a` to the nearest wrap-around copy of `b`.
pub fn wrap_distance(a: Point, b: Point) -> f64 {
    wrap_shifts()
        .iter()
        .map(|s| (a[0] - b[0] - s[0]).hypot(a[1] - b[1] - s[1]))
        .fold(f64::INFINITY, f64::min)
}

/// Wrap-around distance clamped below at [`MIN_DISTANCE`].
pub fn link_distance(a: Point, b: Point) -> f64 {
    wrap_distance(a, b).max(MIN_DISTANCE)
}
