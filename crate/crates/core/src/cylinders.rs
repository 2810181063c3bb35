//! Cylinder triangles as mass carriers for bounding ball masses.
//!
//! `mu_k` splits into the leaves (cylinders of generation `k - 1`, side two
//! lattice units), each holding one unit at each of its three vertices. A
//! cylinder of side `s` therefore carries `3^log2(s)` units, all inside its
//! closed triangle.

use crate::lattice::ExactPoint;

/// An upright cylinder triangle with vertices `(a0, b0)`, `(a0 + s, b0)`,
/// `(a0 + s/2, b0 + s/2)`; `s == 0` marks a single point carrying one unit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Node {
    pub a0: i64,
    pub b0: i64,
    pub s: i64,
}

impl Node {
    pub fn root(level: u32) -> Self {
        Self {
            a0: 0,
            b0: 0,
            s: 1i64 << level,
        }
    }

    #[inline]
    pub fn units(&self) -> u64 {
        if self.s == 0 {
            1
        } else {
            3u64.pow(self.s.trailing_zeros())
        }
    }

    #[inline]
    pub fn is_point(&self) -> bool {
        self.s == 0
    }

    #[inline]
    pub fn vertices(&self) -> [(i64, i64); 3] {
        let (a, b, s) = (self.a0, self.b0, self.s);
        [(a, b), (a + s, b), (a + s / 2, b + s / 2)]
    }

    /// Children of a triangle: sub-triangles, or the three vertex points of a leaf.
    #[inline]
    pub fn children(&self) -> [Node; 3] {
        debug_assert!(self.s >= 2);
        if self.s == 2 {
            self.vertices().map(|(a0, b0)| Node { a0, b0, s: 0 })
        } else {
            let h = self.s / 2;
            let q = self.s / 4;
            let (a, b) = (self.a0, self.b0);
            [
                Node { a0: a, b0: b, s: h },
                Node {
                    a0: a + h,
                    b0: b,
                    s: h,
                },
                Node {
                    a0: a + q,
                    b0: b + q,
                    s: h,
                },
            ]
        }
    }

    /// `(near, far)`: a lower bound for the least squared distance from `c` to the
    /// closed triangle and the exact greatest one (attained at a vertex).
    #[inline]
    pub fn bounds(&self, c: &ExactPoint) -> (u64, u64) {
        if self.is_point() {
            let d = c.sq_distance_to(self.a0, self.b0);
            return (d, d);
        }
        let v = self.vertices();
        let far = v
            .iter()
            .map(|&(a, b)| c.sq_distance_to(a, b))
            .max()
            .unwrap_or(0);
        (near_sq(c, &v), far)
    }
}

/// Floor of the squared distance from `c` to the closed counter-clockwise
/// triangle `v`, in units of `c.scale()^-2`.
fn near_sq(c: &ExactPoint, v: &[(i64, i64); 3]) -> u64 {
    let den = c.den as i128;
    let (x, y) = (c.a as i128, c.b as i128);
    let p: [(i128, i128); 3] = v.map(|(a, b)| (a as i128 * den, b as i128 * den));
    let orient =
        |u: (i128, i128), w: (i128, i128)| (w.0 - u.0) * (y - u.1) - (w.1 - u.1) * (x - u.0);
    let inside = (0..3).all(|i| orient(p[i], p[(i + 1) % 3]) >= 0);
    if inside {
        return 0;
    }
    // metric da^2 + 3 db^2
    let q = |dx: i128, dy: i128| dx * dx + 3 * dy * dy;
    let dot = |ax: i128, ay: i128, bx: i128, by: i128| ax * bx + 3 * ay * by;
    let mut best = u64::MAX;
    for i in 0..3 {
        let (u, w) = (p[i], p[(i + 1) % 3]);
        let (ex, ey) = (w.0 - u.0, w.1 - u.1);
        let (dx, dy) = (x - u.0, y - u.1);
        let t = dot(dx, dy, ex, ey);
        let len2 = q(ex, ey);
        let d = if t <= 0 {
            q(dx, dy)
        } else if t >= len2 {
            q(x - w.0, y - w.1)
        } else {
            (q(dx, dy) * len2 - t * t) / len2
        };
        best = best.min(d as u64);
    }
    best
}
