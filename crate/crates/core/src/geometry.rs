//! Points, segments, the l¹ / l∞ point-to-segment distances, diamond squares
//! and the π/4 rigid motions.
//!
//! Both distances are convex and piecewise linear in the segment parameter,
//! so the minimum is attained at an endpoint or at one of at most four
//! breakpoints. Evaluating the objective there gives the exact minimum.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::{Error, Result, Scalar};

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point<S = f64> {
    pub x1: S,
    pub x2: S,
}

impl<S: Scalar> Point<S> {
    #[inline]
    pub fn new(x1: S, x2: S) -> Self {
        Point { x1, x2 }
    }

    #[inline]
    pub fn is_finite(&self) -> bool {
        self.x1.is_finite() && self.x2.is_finite()
    }

    #[inline]
    pub fn norm1(self) -> S {
        self.x1.abs() + self.x2.abs()
    }

    #[inline]
    pub fn norm_inf(self) -> S {
        self.x1.abs().max(self.x2.abs())
    }

    #[inline]
    pub fn norm2(self) -> S {
        self.x1.hypot(self.x2)
    }

    #[inline]
    pub fn d1(self, other: Self) -> S {
        (self - other).norm1()
    }

    #[inline]
    pub fn dinf(self, other: Self) -> S {
        (self - other).norm_inf()
    }

    #[inline]
    pub fn dist(self, other: Self) -> S {
        (self - other).norm2()
    }
}

impl<S: Scalar> Add for Point<S> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Point::new(self.x1 + o.x1, self.x2 + o.x2)
    }
}

impl<S: Scalar> Sub for Point<S> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Point::new(self.x1 - o.x1, self.x2 - o.x2)
    }
}

impl<S: Scalar> Mul<S> for Point<S> {
    type Output = Self;
    #[inline]
    fn mul(self, k: S) -> Self {
        Point::new(self.x1 * k, self.x2 * k)
    }
}

impl<S: Scalar> Neg for Point<S> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Point::new(-self.x1, -self.x2)
    }
}

/// Closed segment `[a, b]` with `a ≠ b`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment<S = f64> {
    pub a: Point<S>,
    pub b: Point<S>,
}

impl<S: Scalar> Segment<S> {
    pub fn new(a: Point<S>, b: Point<S>) -> Result<Self> {
        if a == b {
            return Err(Error::DegenerateSegment {
                x1: a.x1.to_f64().unwrap_or(f64::NAN),
                x2: a.x2.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Segment { a, b })
    }

    /// Constructor for callers that already guarantee `a ≠ b`.
    #[inline]
    pub(crate) fn new_unchecked(a: Point<S>, b: Point<S>) -> Self {
        debug_assert!(a != b);
        Segment { a, b }
    }

    #[inline]
    pub fn direction(&self) -> Point<S> {
        self.b - self.a
    }

    #[inline]
    pub fn length(&self) -> S {
        self.direction().norm2()
    }

    #[inline]
    pub fn at(&self, t: S) -> Point<S> {
        self.a + self.direction() * t
    }

    #[inline]
    pub fn midpoint(&self) -> Point<S> {
        self.at(S::lit(0.5))
    }

    /// Slope sign if the segment lies on a line of slope ±1 (within tolerance).
    pub fn diagonal_slope(&self) -> Option<i8> {
        let d = self.direction();
        let tol = S::rel_tol() * d.norm_inf();
        if (d.x1.abs() - d.x2.abs()).abs() > tol {
            return None;
        }
        Some(if (d.x1 > S::zero()) == (d.x2 > S::zero()) { 1 } else { -1 })
    }
}

/// Candidate parameters of a convex piecewise-linear objective on `[0, 1]`.
struct Candidates<S> {
    ts: [S; 6],
    len: usize,
}

impl<S: Scalar> Candidates<S> {
    fn new() -> Self {
        Candidates { ts: [S::zero(), S::one(), S::zero(), S::zero(), S::zero(), S::zero()], len: 2 }
    }

    /// Adds the root of `c0 + t·c1 = 0` when it falls inside `(0, 1)`.
    fn push_root(&mut self, c0: S, c1: S) {
        if c1 == S::zero() {
            return;
        }
        let t = -c0 / c1;
        if t > S::zero() && t < S::one() {
            self.ts[self.len] = t;
            self.len += 1;
        }
    }

    fn min_of(&self, f: impl Fn(S) -> S) -> S {
        self.ts[..self.len].iter().map(|&t| f(t)).fold(S::infinity(), S::min)
    }
}

/// l¹ distance from `p` to the closed segment `s`.
pub fn d1_point_segment<S: Scalar>(p: Point<S>, s: &Segment<S>) -> S {
    let r = p - s.a;
    let d = s.direction();
    let mut c = Candidates::new();
    c.push_root(r.x1, -d.x1);
    c.push_root(r.x2, -d.x2);
    c.min_of(|t| (r.x1 - t * d.x1).abs() + (r.x2 - t * d.x2).abs())
}

/// l∞ distance from `p` to the closed segment `s`.
pub fn dinf_point_segment<S: Scalar>(p: Point<S>, s: &Segment<S>) -> S {
    let r = p - s.a;
    let d = s.direction();
    let mut c = Candidates::new();
    c.push_root(r.x1, -d.x1);
    c.push_root(r.x2, -d.x2);
    c.push_root(r.x1 - r.x2, d.x2 - d.x1);
    c.push_root(r.x1 + r.x2, -(d.x1 + d.x2));
    c.min_of(|t| (r.x1 - t * d.x1).abs().max((r.x2 - t * d.x2).abs()))
}

/// Square with sides of slope ±1, given by its north vertex and the length of
/// its (vertical) diagonal.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiamondSquare<S = f64> {
    pub north: Point<S>,
    pub diag: S,
}

impl<S: Scalar> DiamondSquare<S> {
    pub fn new(north: Point<S>, diag: S) -> Result<Self> {
        if !(diag > S::zero()) || !north.is_finite() {
            return Err(Error::param("diag", "diamond diagonal must be positive and finite"));
        }
        Ok(DiamondSquare { north, diag })
    }

    #[inline]
    pub fn half(&self) -> S {
        self.diag * S::lit(0.5)
    }

    #[inline]
    pub fn center(&self) -> Point<S> {
        Point::new(self.north.x1, self.north.x2 - self.half())
    }

    #[inline]
    pub fn east(&self) -> Point<S> {
        Point::new(self.north.x1 + self.half(), self.north.x2 - self.half())
    }

    #[inline]
    pub fn south(&self) -> Point<S> {
        Point::new(self.north.x1, self.north.x2 - self.diag)
    }

    #[inline]
    pub fn west(&self) -> Point<S> {
        Point::new(self.north.x1 - self.half(), self.north.x2 - self.half())
    }

    /// Vertices in clockwise order starting at the north vertex.
    pub fn vertices(&self) -> [Point<S>; 4] {
        [self.north, self.east(), self.south(), self.west()]
    }

    /// Sides NE, SE, SW, NW.
    pub fn sides(&self) -> [Segment<S>; 4] {
        let [n, e, s, w] = self.vertices();
        [
            Segment::new_unchecked(n, e),
            Segment::new_unchecked(e, s),
            Segment::new_unchecked(s, w),
            Segment::new_unchecked(w, n),
        ]
    }

    /// North to south.
    pub fn vertical_diagonal(&self) -> Segment<S> {
        Segment::new_unchecked(self.north, self.south())
    }

    /// West to east.
    pub fn horizontal_diagonal(&self) -> Segment<S> {
        Segment::new_unchecked(self.west(), self.east())
    }

    #[inline]
    pub fn side_length(&self) -> S {
        self.diag * S::FRAC_1_SQRT_2()
    }

    #[inline]
    pub fn area(&self) -> S {
        self.diag * self.diag * S::lit(0.5)
    }

    /// Closed membership with a relative tolerance on the l¹ radius.
    #[inline]
    pub fn contains(&self, p: Point<S>) -> bool {
        (p - self.center()).norm1() <= self.half() * (S::one() + S::rel_tol())
    }

    /// Strict interior membership with margin `m` (in l¹).
    #[inline]
    pub fn contains_interior(&self, p: Point<S>, margin: S) -> bool {
        (p - self.center()).norm1() < self.half() - margin
    }

    /// The pyramid `d₁(p, ∂Q)` as the minimum over the four sides.
    pub fn pyramid(&self, p: Point<S>) -> S {
        self.sides().iter().map(|s| d1_point_segment(p, s)).fold(S::infinity(), S::min)
    }

    /// Constant gradient of the pyramid on the face containing `p`.
    pub fn gradient(&self, p: Point<S>) -> (i8, i8) {
        let c = self.center();
        let sgn = |x: S| if x > S::zero() { -1 } else { 1 };
        (sgn(p.x1 - c.x1), sgn(p.x2 - c.x2))
    }

    /// l∞ distance from `p` to the sides and both diagonals.
    pub fn dinf_to_skeleton(&self, p: Point<S>) -> S {
        let mut best = (p.x1 - self.north.x1).abs().min((p.x2 - self.center().x2).abs());
        for s in self.sides() {
            best = best.min(dinf_point_segment(p, &s));
        }
        best
    }
}

/// `Ref^reflect ∘ Rot^rot` scaled by `scale` and translated by `offset`,
/// where `Rot` is the counterclockwise π/4 rotation and `Ref` the reflection
/// in the vertical axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RigidMotion<S = f64> {
    /// Power of the π/4 rotation, in `0..8`.
    pub rot: u8,
    pub reflect: bool,
    pub scale: S,
    pub offset: Point<S>,
}

impl<S: Scalar> Default for RigidMotion<S> {
    fn default() -> Self {
        Self::identity()
    }
}

impl<S: Scalar> RigidMotion<S> {
    pub fn new(rot: u8, reflect: bool, scale: S, offset: Point<S>) -> Result<Self> {
        if !(scale > S::zero()) || !scale.is_finite() {
            return Err(Error::param("scale", "rigid motion scale must be positive"));
        }
        if !offset.is_finite() {
            return Err(Error::param("offset", "rigid motion offset must be finite"));
        }
        Ok(RigidMotion { rot: rot % 8, reflect, scale, offset })
    }

    pub fn identity() -> Self {
        RigidMotion { rot: 0, reflect: false, scale: S::one(), offset: Point::default() }
    }

    /// `Rot^k` with unit scale and no offset.
    pub fn rotation(k: u8) -> Self {
        RigidMotion { rot: k % 8, ..Self::identity() }
    }

    /// `Ref`.
    pub fn reflection() -> Self {
        RigidMotion { reflect: true, ..Self::identity() }
    }

    pub fn with_scale(mut self, scale: S) -> Self {
        self.scale = scale;
        self
    }

    pub fn with_offset(mut self, offset: Point<S>) -> Self {
        self.offset = offset;
        self
    }

    /// Odd rotation powers map axis-parallel squares onto diamonds.
    #[inline]
    pub fn makes_diamonds(&self) -> bool {
        self.rot % 2 == 1
    }

    fn rotate(k: u8, p: Point<S>) -> Point<S> {
        let r = S::FRAC_1_SQRT_2();
        let (c, s) = match k % 8 {
            0 => (S::one(), S::zero()),
            1 => (r, r),
            2 => (S::zero(), S::one()),
            3 => (-r, r),
            4 => (-S::one(), S::zero()),
            5 => (-r, -r),
            6 => (S::zero(), -S::one()),
            _ => (r, -r),
        };
        Point::new(c * p.x1 - s * p.x2, s * p.x1 + c * p.x2)
    }

    /// Linear part only.
    pub fn linear(&self, p: Point<S>) -> Point<S> {
        let q = Self::rotate(self.rot, p);
        if self.reflect {
            Point::new(-q.x1, q.x2)
        } else {
            q
        }
    }

    pub fn apply(&self, p: Point<S>) -> Point<S> {
        self.linear(p) * self.scale + self.offset
    }

    pub fn apply_segment(&self, s: &Segment<S>) -> Segment<S> {
        Segment::new_unchecked(self.apply(s.a), self.apply(s.b))
    }

    pub fn inverse(&self) -> Self {
        // (Ref^r Rot^k)^{-1} = Rot^{-k} Ref^r = Ref^r Rot^{(-1)^{r+1} k}
        let rot = if self.reflect { self.rot } else { (8 - self.rot) % 8 };
        let lin = RigidMotion { rot, reflect: self.reflect, scale: S::one(), offset: Point::default() };
        let inv_scale = S::one() / self.scale;
        let offset = -lin.linear(self.offset) * inv_scale;
        RigidMotion { rot, reflect: self.reflect, scale: inv_scale, offset }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Self) -> Self {
        // Ref^r2 Rot^k2 Ref^r1 Rot^k1 = Ref^(r1^r2) Rot^(k1 + (-1)^r1 k2)
        let k2 = if inner.reflect { (8 - self.rot) % 8 } else { self.rot };
        RigidMotion {
            rot: (inner.rot + k2) % 8,
            reflect: self.reflect ^ inner.reflect,
            scale: self.scale * inner.scale,
            offset: self.linear(inner.offset) * self.scale + self.offset,
        }
    }

    /// Image of the axis-parallel square `[x, x+side] × [y, y+side]`.
    /// `None` unless the motion turns it into a diamond.
    pub fn map_axis_square(&self, lower_left: Point<S>, side: S) -> Option<DiamondSquare<S>> {
        if !self.makes_diamonds() {
            return None;
        }
        let corners = [
            lower_left,
            lower_left + Point::new(side, S::zero()),
            lower_left + Point::new(side, side),
            lower_left + Point::new(S::zero(), side),
        ]
        .map(|c| self.apply(c));
        let north = corners.iter().copied().fold(corners[0], |a, b| if b.x2 > a.x2 { b } else { a });
        let south_x2 = corners.iter().map(|c| c.x2).fold(S::infinity(), S::min);
        Some(DiamondSquare { north, diag: north.x2 - south_x2 })
    }
}

/// Signed area of a closed polygon (counterclockwise positive).
pub fn polygon_area<S: Scalar>(vertices: &[Point<S>]) -> S {
    let n = vertices.len();
    let mut acc = S::zero();
    for i in 0..n {
        let (p, q) = (vertices[i], vertices[(i + 1) % n]);
        acc = acc + p.x1 * q.x2 - q.x1 * p.x2;
    }
    acc * S::lit(0.5)
}

/// Closed point-in-polygon test (boundary counts as inside within `tol`).
pub fn polygon_contains<S: Scalar>(vertices: &[Point<S>], p: Point<S>, tol: S) -> bool {
    let n = vertices.len();
    let mut inside = false;
    for i in 0..n {
        let (a, b) = (vertices[i], vertices[(i + 1) % n]);
        if a != b && dinf_point_segment(p, &Segment::new_unchecked(a, b)) <= tol {
            return true;
        }
        if (a.x2 > p.x2) != (b.x2 > p.x2) {
            let x = a.x1 + (p.x2 - a.x2) / (b.x2 - a.x2) * (b.x1 - a.x1);
            if p.x1 < x {
                inside = !inside;
            }
        }
    }
    inside
}

/// Proper or touching intersection test for two closed segments.
pub fn segments_intersect<S: Scalar>(s: &Segment<S>, t: &Segment<S>) -> bool {
    let orient = |a: Point<S>, b: Point<S>, c: Point<S>| {
        let v = (b.x1 - a.x1) * (c.x2 - a.x2) - (b.x2 - a.x2) * (c.x1 - a.x1);
        let scale = (b - a).norm_inf().max((c - a).norm_inf());
        if v.abs() <= S::rel_tol() * scale * scale {
            0
        } else if v > S::zero() {
            1
        } else {
            -1
        }
    };
    let on_seg = |a: Point<S>, b: Point<S>, c: Point<S>| {
        c.x1 >= a.x1.min(b.x1) && c.x1 <= a.x1.max(b.x1) && c.x2 >= a.x2.min(b.x2) && c.x2 <= a.x2.max(b.x2)
    };
    let (o1, o2) = (orient(s.a, s.b, t.a), orient(s.a, s.b, t.b));
    let (o3, o4) = (orient(t.a, t.b, s.a), orient(t.a, t.b, s.b));
    if o1 != o2 && o3 != o4 && o1 * o2 <= 0 && o3 * o4 <= 0 && (o1 != 0 || o2 != 0) {
        return true;
    }
    (o1 == 0 && on_seg(s.a, s.b, t.a))
        || (o2 == 0 && on_seg(s.a, s.b, t.b))
        || (o3 == 0 && on_seg(t.a, t.b, s.a))
        || (o4 == 0 && on_seg(t.a, t.b, s.b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn p(x1: f64, x2: f64) -> Point {
        Point::new(x1, x2)
    }

    fn seg(a: (f64, f64), b: (f64, f64)) -> Segment {
        Segment::new(p(a.0, a.1), p(b.0, b.1)).unwrap()
    }

    /// Dense sampling of the segment parameter.
    fn brute(pt: Point, s: &Segment, n: usize, f: fn(Point, Point) -> f64) -> f64 {
        (0..=n).map(|i| f(pt, s.at(i as f64 / n as f64))).fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn d1_examples() {
        assert_eq!(d1_point_segment(p(0.0, 0.0), &seg((1.0, 0.0), (1.0, 1.0))), 1.0);
        assert_eq!(d1_point_segment(p(0.0, 0.0), &seg((2.0, 0.0), (0.0, 2.0))), 2.0);
        // brute-force value over 10^6 samples: 1.0
        let s = seg((2.0, 0.0), (0.0, 2.0));
        let oracle = brute(p(3.0, 0.0), &s, 1_000_000, |a, b| a.d1(b));
        assert_relative_eq!(oracle, 1.0, epsilon = 1e-9);
        assert_relative_eq!(d1_point_segment(p(3.0, 0.0), &s), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn dinf_examples() {
        assert_eq!(dinf_point_segment(p(0.0, 0.0), &seg((1.0, -1.0), (1.0, 1.0))), 1.0);
        let s = seg((2.0, 0.0), (0.0, 2.0));
        let oracle = brute(p(0.0, 0.0), &s, 1_000_000, |a, b| a.dinf(b));
        assert_relative_eq!(oracle, 1.0, epsilon = 1e-9);
        assert_relative_eq!(dinf_point_segment(p(0.0, 0.0), &s), 1.0, epsilon = 1e-15);
        assert!(dinf_point_segment(s.at(0.3), &s) < 1e-15);
    }

    #[test]
    fn degenerate_segment_rejected() {
        assert!(matches!(Segment::new(p(1.0, 1.0), p(1.0, 1.0)), Err(Error::DegenerateSegment { .. })));
    }

    #[test]
    fn motion_examples() {
        let r = RigidMotion::<f64>::rotation(1).apply(p(1.0, 0.0));
        assert_relative_eq!(r.x1, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_relative_eq!(r.x2, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_eq!(RigidMotion::<f64>::reflection().apply(p(1.0, 2.0)), p(-1.0, 2.0));
    }

    #[test]
    fn compose_matches_sequential_application() {
        let q = p(0.3, -1.7);
        for k1 in 0..8u8 {
            for k2 in 0..8u8 {
                for (r1, r2) in [(false, false), (true, false), (false, true), (true, true)] {
                    let m1 = RigidMotion::new(k1, r1, 0.5, p(1.0, 2.0)).unwrap();
                    let m2 = RigidMotion::new(k2, r2, 3.0, p(-0.25, 0.5)).unwrap();
                    let a = m2.apply(m1.apply(q));
                    let b = m2.compose(&m1).apply(q);
                    assert_relative_eq!(a.x1, b.x1, epsilon = 1e-12);
                    assert_relative_eq!(a.x2, b.x2, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn odd_rotation_maps_axis_square_to_diamond() {
        let m = RigidMotion::<f64>::rotation(1).with_scale(std::f64::consts::SQRT_2);
        let d = m.map_axis_square(p(0.0, 0.0), 0.5).unwrap();
        assert_relative_eq!(d.north.x1, 0.0, epsilon = 1e-15);
        assert_relative_eq!(d.north.x2, 1.0, epsilon = 1e-15);
        assert_relative_eq!(d.diag, 1.0, epsilon = 1e-15);
        assert!(RigidMotion::<f64>::identity().map_axis_square(p(0.0, 0.0), 1.0).is_none());
    }

    #[test]
    fn diamond_pyramid_center_value() {
        let d = DiamondSquare::new(p(0.0, 1.0), 1.0).unwrap();
        assert_eq!(d.pyramid(p(0.0, 0.5)), 0.5);
        for v in d.vertices() {
            assert_eq!(d.pyramid(v), 0.0);
        }
        assert_eq!(d.pyramid(d.sides()[2].at(0.37)), 0.0);
    }

    #[test]
    fn diamond_gradient_faces() {
        let d = DiamondSquare::new(p(0.0, 1.0), 1.0).unwrap();
        // 3-point sampling inside each face: finite differences agree with the constant gradient
        for (q, g) in [((0.1, 0.6), (-1, -1)), ((-0.1, 0.6), (1, -1)), ((0.1, 0.4), (-1, 1)), ((-0.1, 0.4), (1, 1))] {
            let q = p(q.0, q.1);
            assert_eq!(d.gradient(q), g);
            let h = 1e-3;
            let gx = (d.pyramid(q + p(h, 0.0)) - d.pyramid(q - p(h, 0.0))) / (2.0 * h);
            let gy = (d.pyramid(q + p(0.0, h)) - d.pyramid(q - p(0.0, h))) / (2.0 * h);
            assert_relative_eq!(gx, g.0 as f64, epsilon = 1e-9);
            assert_relative_eq!(gy, g.1 as f64, epsilon = 1e-9);
        }
    }

    #[test]
    fn generic_over_f32() {
        let s = Segment::<f32>::new(Point::new(2.0, 0.0), Point::new(0.0, 2.0)).unwrap();
        assert!((d1_point_segment(Point::new(3.0f32, 0.0), &s) - 1.0).abs() < 1e-6);
        assert!((dinf_point_segment(Point::new(0.0f32, 0.0), &s) - 1.0).abs() < 1e-6);
    }

    /// Dense sampling followed by golden-section refinement around the best
    /// sample; the distance is convex along the segment.
    fn brute_refined(pt: Point, s: &Segment, f: fn(Point, Point) -> f64) -> f64 {
        let n = 100_000;
        let g = |t: f64| f(pt, s.at(t));
        let best = (0..=n).min_by(|&i, &j| g(i as f64 / n as f64).total_cmp(&g(j as f64 / n as f64))).unwrap();
        let (mut lo, mut hi) = ((best.max(1) - 1) as f64 / n as f64, (best + 1).min(n) as f64 / n as f64);
        let r = (5f64.sqrt() - 1.0) / 2.0;
        for _ in 0..80 {
            let (m1, m2) = (hi - r * (hi - lo), lo + r * (hi - lo));
            if g(m1) <= g(m2) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        g(best as f64 / n as f64).min(g(0.5 * (lo + hi)))
    }

    fn coord() -> impl Strategy<Value = f64> {
        -10.0..10.0f64
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn motion_round_trip(x in coord(), y in coord(), k in 0u8..8, r in any::<bool>(), sc in 0.1..10.0f64,
                             ox in coord(), oy in coord()) {
            let m = RigidMotion::new(k, r, sc, p(ox, oy)).unwrap();
            let q = m.inverse().apply(m.apply(p(x, y)));
            let tol = 1e-12 * (1.0 + x.abs().max(y.abs()) + ox.abs().max(oy.abs()) / sc);
            prop_assert!((q.x1 - x).abs() <= tol && (q.x2 - y).abs() <= tol, "{q:?} vs ({x}, {y})");
        }

        #[test]
        fn unit_scale_motions_preserve_length(x in coord(), y in coord(), u in coord(), v in coord(), k in 0u8..8,
                                              r in any::<bool>()) {
            let m = RigidMotion::new(k, r, 1.0, p(0.5, -0.25)).unwrap();
            let (a, b) = (p(x, y), p(u, v));
            prop_assert!((m.apply(a).dist(m.apply(b)) - a.dist(b)).abs() <= 1e-12 * (1.0 + a.dist(b)));
        }

        #[test]
        fn odd_rotations_swap_diagonal_and_axis_directions(k in 0u8..4, t in coord(), sign in prop::bool::ANY) {
            let m = RigidMotion::<f64>::rotation(2 * k + 1);
            let dir = if sign { p(t, t) } else { p(t, -t) };
            let img = m.linear(dir);
            prop_assert!(img.x1.abs().min(img.x2.abs()) <= 1e-12 * (1.0 + t.abs()));
            let axis = m.linear(p(t, 0.0));
            prop_assert!((axis.x1.abs() - axis.x2.abs()).abs() <= 1e-12 * (1.0 + t.abs()));
        }

        #[test]
        fn diagonal_segments_relate_to_euclidean(c in coord(), len in 0.1..10.0f64, t in 0.01..0.99f64,
                                                  off in coord(), up in any::<bool>()) {
            let dir = if up { p(1.0, 1.0) } else { p(1.0, -1.0) };
            let a = p(c, 0.5 * c);
            let s = Segment::new(a, a + dir * len).unwrap();
            let normal = p(-dir.x2, dir.x1) * std::f64::consts::FRAC_1_SQRT_2;
            let q = s.at(t) + normal * off;
            let e = off.abs();
            let tol = 1e-12 * (1.0 + c.abs() + len + e);
            prop_assert!((d1_point_segment(q, &s) - std::f64::consts::SQRT_2 * e).abs() <= 4.0 * tol);
            prop_assert!((dinf_point_segment(q, &s) - std::f64::consts::FRAC_1_SQRT_2 * e).abs() <= 4.0 * tol);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn distances_match_brute_force(x in coord(), y in coord(), ax in coord(), ay in coord(), bx in coord(),
                                       by in coord()) {
            prop_assume!(p(ax, ay).dist(p(bx, by)) > 1e-3);
            let s = seg((ax, ay), (bx, by));
            let q = p(x, y);
            prop_assert!((d1_point_segment(q, &s) - brute_refined(q, &s, |a, b| a.d1(b))).abs() <= 1e-9);
            prop_assert!((dinf_point_segment(q, &s) - brute_refined(q, &s, |a, b| a.dinf(b))).abs() <= 1e-9);
        }
    }

    #[test]
    fn polygon_helpers() {
        let sq = [p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)];
        assert_eq!(polygon_area(&sq), 1.0);
        assert!(polygon_contains(&sq, p(0.5, 0.5), 1e-12));
        assert!(polygon_contains(&sq, p(1.0, 0.5), 1e-12));
        assert!(!polygon_contains(&sq, p(1.5, 0.5), 1e-12));
        assert!(segments_intersect(&seg((0.0, 0.0), (1.0, 1.0)), &seg((0.0, 1.0), (1.0, 0.0))));
        assert!(!segments_intersect(&seg((0.0, 0.0), (1.0, 0.0)), &seg((0.0, 1.0), (1.0, 1.0))));
    }
}
