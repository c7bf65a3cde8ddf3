//! Polyline predicates: orientation, segment intersection and shoelace area.

use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

pub type Point = [f64; 2];

// Relative error bound of the floating-point determinant below.
const ORIENT_BOUND: f64 = (3.0 + 16.0 * f64::EPSILON) * f64::EPSILON;

/// Sign of the orientation of `(a, b, c)`: `Greater` for counterclockwise.
pub fn orient2d(a: Point, b: Point, c: Point) -> Ordering {
    let left = (a[0] - c[0]) * (b[1] - c[1]);
    let right = (a[1] - c[1]) * (b[0] - c[0]);
    let det = left - right;
    let bound = ORIENT_BOUND * (left.abs() + right.abs());
    if det > bound {
        Ordering::Greater
    } else if det < -bound {
        Ordering::Less
    } else {
        orient2d_exact(a, b, c)
    }
}

fn orient2d_exact(a: Point, b: Point, c: Point) -> Ordering {
    let q = |v: f64| BigRational::from_float(v).expect("finite coordinate");
    let (ax, ay, bx, by, cx, cy) = (q(a[0]), q(a[1]), q(b[0]), q(b[1]), q(c[0]), q(c[1]));
    let det = (&ax - &cx) * (&by - &cy) - (&ay - &cy) * (&bx - &cx);
    if det.is_zero() {
        Ordering::Equal
    } else if det.is_positive() {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

fn within_box(p: Point, q: Point, r: Point) -> bool {
    r[0] >= p[0].min(q[0]) && r[0] <= p[0].max(q[0]) && r[1] >= p[1].min(q[1]) && r[1] <= p[1].max(q[1])
}

/// Closed-segment intersection test `[p1, p2] ∩ [q1, q2] ≠ ∅`.
pub fn segments_intersect(p1: Point, p2: Point, q1: Point, q2: Point) -> bool {
    if p1[0].max(p2[0]) < q1[0].min(q2[0])
        || q1[0].max(q2[0]) < p1[0].min(p2[0])
        || p1[1].max(p2[1]) < q1[1].min(q2[1])
        || q1[1].max(q2[1]) < p1[1].min(p2[1])
    {
        return false;
    }
    let d1 = orient2d(q1, q2, p1);
    let d2 = orient2d(q1, q2, p2);
    let d3 = orient2d(p1, p2, q1);
    let d4 = orient2d(p1, p2, q2);
    use Ordering::*;
    if d1 != Equal && d2 != Equal && d1 != d2 && d3 != Equal && d4 != Equal && d3 != d4 {
        return true;
    }
    (d1 == Equal && within_box(q1, q2, p1))
        || (d2 == Equal && within_box(q1, q2, p2))
        || (d3 == Equal && within_box(p1, p2, q1))
        || (d4 == Equal && within_box(p1, p2, q2))
}

/// First pair of edges `(i, j)` of the closed polyline that touch, ignoring the
/// shared vertex of neighbouring edges. Edge `i` joins vertices `i` and `i + 1`.
pub fn first_self_intersection(points: &[Point]) -> Option<(usize, usize)> {
    let n = points.len();
    let edge = |i: usize| (points[i], points[(i + 1) % n]);
    for i in 0..n {
        let (a, b) = edge(i);
        // neighbouring edge folding back onto this one
        let c = points[(i + 2) % n];
        if orient2d(a, b, c) == Ordering::Equal && (c[0] - b[0]) * (b[0] - a[0]) + (c[1] - b[1]) * (b[1] - a[1]) < 0.0 {
            return Some((i, (i + 1) % n));
        }
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (p, q) = edge(j);
            if segments_intersect(a, b, p, q) {
                return Some((i, j));
            }
        }
    }
    None
}

/// Signed polygon area (positive for counterclockwise vertex order).
pub fn shoelace(points: &[Point]) -> f64 {
    let n = points.len();
    0.5 * (0..n)
        .map(|i| {
            let (p, q) = (points[i], points[(i + 1) % n]);
            p[0] * q[1] - p[1] * q[0]
        })
        .sum::<f64>()
}
