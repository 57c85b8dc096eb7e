//! The recursive square covering of a triangular domain.
//!
//! `q(T)` is the largest square with lower-left corner `(a, h(b))` whose
//! north-east corner lies on the graph of `h`; `u(T)` and `r(T)` are the two
//! triangular pieces left above and to the right of it. Words over `{u, r}`
//! index the squares `q(σ(T))`.

use std::fmt;
use std::io::Write;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::{bisect, dinf_to_graph, BoundaryFunction, TriangularDomain};
use crate::geometry::{DiamondSquare, Point, RigidMotion};
use crate::index::{Aabb, GridIndex};
use crate::quadrature::adaptive;
use crate::{Error, Result};

/// Pieces narrower than this fraction of the root width are dropped.
pub const DEGENERATE_REL: f64 = 1e-13;
/// Longest supported word.
pub const MAX_WORD_LEN: u32 = 128;

/// `{a ≤ x₁ ≤ b, floor ≤ x₂ ≤ h(x₁)}` with `floor = h(b)`.
#[derive(Clone, Debug)]
pub struct SubTriangle {
    pub a: f64,
    pub b: f64,
    pub floor: f64,
    pub h: Arc<BoundaryFunction>,
}

impl SubTriangle {
    pub fn root(tri: &TriangularDomain) -> Self {
        SubTriangle { a: tri.h.a(), b: tri.h.b(), floor: tri.floor(), h: tri.h.clone() }
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn height(&self) -> f64 {
        self.h.eval(self.a) - self.floor
    }

    pub fn area(&self) -> f64 {
        if self.h.affine_slope().is_some() {
            return 0.5 * self.width() * self.height();
        }
        let fl = self.floor;
        adaptive(|t| self.h.eval(t) - fl, self.a, self.b, 1e-15 * self.width().max(1e-300)).value
    }

    pub fn contains(&self, p: Point, tol: f64) -> bool {
        p.x1 >= self.a - tol && p.x1 <= self.b + tol && p.x2 >= self.floor - tol && p.x2 <= self.h.eval(p.x1) + tol
    }
}

/// Axis-parallel square `[x, x + side] × [y, y + side]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisSquare {
    pub x: f64,
    pub y: f64,
    pub side: f64,
}

impl AxisSquare {
    pub fn sw(&self) -> Point {
        Point::new(self.x, self.y)
    }

    pub fn ne(&self) -> Point {
        Point::new(self.x + self.side, self.y + self.side)
    }

    pub fn nw(&self) -> Point {
        Point::new(self.x, self.y + self.side)
    }

    pub fn se(&self) -> Point {
        Point::new(self.x + self.side, self.y)
    }

    pub fn aabb(&self) -> Aabb {
        Aabb { x0: self.x, y0: self.y, x1: self.x + self.side, y1: self.y + self.side }
    }

    /// Area of the intersection of the two squares.
    pub fn overlap(&self, o: &AxisSquare) -> f64 {
        let w = (self.x + self.side).min(o.x + o.side) - self.x.max(o.x);
        let h = (self.y + self.side).min(o.y + o.side) - self.y.max(o.y);
        if w > 0.0 && h > 0.0 {
            w * h
        } else {
            0.0
        }
    }
}

/// Result of one application of `q`, `u`, `r`.
#[derive(Clone, Debug)]
pub struct Split {
    pub x0: f64,
    pub square: AxisSquare,
    pub upper: Option<SubTriangle>,
    pub right: Option<SubTriangle>,
}

/// Splits `t` into `q(T)`, `u(T)` and `r(T)`. The abscissa `x₁⁰` solves
/// `h(x) − x − floor + a = 0`.
pub fn q_split(t: &SubTriangle) -> Result<Split> {
    let g = |x: f64| t.h.eval(x) - x - t.floor + t.a;
    let (ga, gb) = (g(t.a), g(t.b));
    if !(ga >= 0.0 && gb <= 0.0) {
        return Err(Error::RootNotBracketed { a: t.a, b: t.b, fa: ga, fb: gb });
    }
    let x0 = match t.h.affine_slope() {
        Some(m) if m == -1.0 => 0.5 * (t.a + t.b),
        Some(m) => (t.a + (t.h.eval(t.a) - t.floor) / (1.0 - m)).clamp(t.a, t.b),
        None => bisect(t.a, t.b, g),
    };
    let side = x0 - t.a;
    let square = AxisSquare { x: t.a, y: t.floor, side };
    let tiny = DEGENERATE_REL * t.width();
    let top = t.floor + side;
    let upper = (side > tiny && t.h.eval(t.a) - top > tiny).then(|| SubTriangle { a: t.a, b: x0, floor: top, h: t.h.clone() });
    let right = (t.b - x0 > tiny && side > tiny).then(|| SubTriangle { a: x0, b: t.b, floor: t.floor, h: t.h.clone() });
    Ok(Split { x0, square, upper, right })
}

/// Word over `{u, r}`, first letter applied first.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Word {
    bits: u128,
    len: u8,
}

impl Word {
    pub fn len(&self) -> u32 {
        self.len as u32
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Letter `i`: `'u'` or `'r'`.
    pub fn letter(&self, i: u32) -> char {
        if self.bits >> i & 1 == 1 {
            'r'
        } else {
            'u'
        }
    }

    fn push(self, right: bool) -> Self {
        Word { bits: self.bits | (u128::from(right) << self.len), len: self.len + 1 }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            write!(f, "{}", self.letter(i))?;
        }
        Ok(())
    }
}

/// `q(σ(T))` together with its word.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoveringSquare {
    pub square: AxisSquare,
    pub depth: u32,
    pub word: Word,
}

/// Squares of `𝒬(T)` up to the truncation.
#[derive(Clone, Debug)]
pub struct Covering {
    pub root: SubTriangle,
    pub squares: Vec<CoveringSquare>,
    pub min_side: f64,
    pub max_depth: u32,
    /// `area(T) − Σ side²`.
    pub residual_area: f64,
    /// Width and height of every sub-triangle left unexpanded by the
    /// truncation. Their `x₁` ranges are pairwise disjoint.
    pub leaves: Vec<(f64, f64)>,
    /// Built by [`generate_dyadic_covering`].
    pub dyadic: bool,
}

/// Breadth-first expansion of the words of `t`. A branch stops when its
/// square is smaller than `min_side` (the square is then left out) or when
/// the depth reaches `max_depth` (the square is kept).
pub fn generate_covering(t: &SubTriangle, min_side: f64, max_depth: u32) -> Result<Covering> {
    if !(min_side >= 0.0) {
        return Err(Error::param("min_side", "must be >= 0"));
    }
    if min_side == 0.0 && max_depth >= MAX_WORD_LEN {
        return Err(Error::param("max_depth", format!("must be < {MAX_WORD_LEN} when min_side = 0")));
    }
    let max_depth = max_depth.min(MAX_WORD_LEN - 1);
    let mut squares = Vec::new();
    let mut leaves = Vec::new();
    let mut frontier = vec![(t.clone(), Word::default())];
    for depth in 0..=max_depth {
        if frontier.is_empty() {
            break;
        }
        let splits: Vec<Result<Split>> = frontier.par_iter().map(|(s, _)| q_split(s)).collect();
        let mut next = Vec::with_capacity(if depth < max_depth { frontier.len() * 2 } else { 0 });
        for ((sub, word), split) in frontier.iter().zip(splits) {
            let split = split?;
            if split.square.side < min_side || split.square.side <= 0.0 {
                leaves.push((sub.width(), sub.height()));
                continue;
            }
            squares.push(CoveringSquare { square: split.square, depth, word: *word });
            for (child, right) in [(split.upper, false), (split.right, true)] {
                if let Some(c) = child {
                    if depth < max_depth {
                        next.push((c, word.push(right)));
                    } else {
                        leaves.push((c.width(), c.height()));
                    }
                }
            }
        }
        frontier = next;
    }
    let covered: f64 = squares.iter().map(|s| s.square.side * s.square.side).sum();
    let residual_area = (t.area() - covered).max(0.0);
    Ok(Covering { root: t.clone(), squares, min_side, max_depth, residual_area, leaves, dyadic: false })
}

/// Default truncation: `10⁻⁴` times the triangle diameter.
pub fn default_min_side(t: &SubTriangle) -> f64 {
    1e-4 * t.width().hypot(t.height())
}

/// The dyadic covering of `{0 ≤ x₁ ≤ 2w, 0 ≤ x₂ ≤ 2w − x₁}` with `levels`
/// levels below the first square. Under [`square_example_motion`] level `n`
/// consists of `2^n` diamonds of diagonal `w·2^{-n}` with north vertices on
/// `x₂ = w`.
pub fn generate_dyadic_covering(half_width: f64, levels: u32) -> Result<Covering> {
    if !(half_width > 0.0) {
        return Err(Error::param("half_width", "must be positive"));
    }
    let h = BoundaryFunction::affine(0.0, 2.0 * half_width, 2.0 * half_width, -1.0)?;
    let root = SubTriangle::root(&TriangularDomain::new(h));
    let mut c = generate_covering(&root, 0.0, levels)?;
    c.dyadic = true;
    Ok(c)
}

/// `Rot¹` scaled by `1/√2`: maps the dyadic root triangle onto the top
/// quarter of `(−w, w)²`.
pub fn square_example_motion() -> RigidMotion {
    RigidMotion::rotation(1).with_scale(std::f64::consts::FRAC_1_SQRT_2)
}

/// Diamonds of the dyadic covering in the square-example frame.
pub fn dyadic_diamonds(half_width: f64, levels: u32) -> Result<Vec<DiamondSquare>> {
    generate_dyadic_covering(half_width, levels)?.diamonds(&square_example_motion())
}

/// Layer `n` with `1/(n+1) < d ≤ 1/n`.
pub fn classify_layer(gamma_distance: f64) -> Result<u32> {
    if !(gamma_distance > 0.0 && gamma_distance <= 1.0) {
        return Err(Error::OutOfRange(format!("layer distance {gamma_distance} is not in (0, 1]")));
    }
    let mut n = (1.0 / gamma_distance).floor() as u32;
    n = n.max(1);
    while gamma_distance > 1.0 / n as f64 && n > 1 {
        n -= 1;
    }
    while gamma_distance <= 1.0 / (n + 1) as f64 {
        n += 1;
    }
    Ok(n)
}

/// Lengths of the intersections of one square with a layer.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerIntersection {
    pub index: usize,
    /// East side.
    pub e: f64,
    /// North side.
    pub n: f64,
    /// South-west to north-east diagonal, as its l∞ extent.
    pub d: f64,
    pub e_bound: f64,
    pub n_bound: f64,
    pub d_bound: f64,
}

impl LayerIntersection {
    /// All three bounds hold up to a relative tolerance.
    pub fn within_bounds(&self, rel: f64) -> bool {
        let ok = |v: f64, b: f64| v <= b + rel * b.abs().max(1e-300);
        ok(self.e, self.e_bound) && ok(self.n, self.n_bound) && ok(self.d, self.d_bound)
    }
}

/// Layer counts for `n = 1..=n_max` and the smallest `c` with `N_n ≤ c(n+1)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerProfile {
    pub counts: Vec<usize>,
    pub c: f64,
}

/// Side-length check of every square against `[(2+ε)^{-k}, (2−ε)^{-k}]`
/// scaled by the root width, with `k = depth + shift`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SideBoundReport {
    pub epsilon: f64,
    pub shift: u32,
    pub checked: usize,
    pub violations: usize,
    /// First few violations: `(depth, side, lower, upper)`.
    pub examples: Vec<(u32, f64, f64, f64)>,
}

/// Sampled check of `d∞(d⁻, γ) ≤ ((1+ε)/(2−ε))·side` on every `−`diagonal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagonalDistanceReport {
    pub epsilon: f64,
    pub checked_points: usize,
    pub violations: usize,
    /// Largest `d∞ / side` seen.
    pub max_ratio: f64,
    pub bound_ratio: f64,
}

impl Covering {
    pub fn len(&self) -> usize {
        self.squares.len()
    }

    pub fn is_empty(&self) -> bool {
        self.squares.is_empty()
    }

    /// `d∞(p, γ)` in the triangle frame.
    pub fn dinf(&self, p: Point) -> f64 {
        dinf_to_graph(&self.root.h, p)
    }

    pub fn deepest(&self) -> u32 {
        self.squares.iter().map(|s| s.depth).max().unwrap_or(0)
    }

    /// Image of every square under `motion` (needs an odd rotation power).
    pub fn diamonds(&self, motion: &RigidMotion) -> Result<Vec<DiamondSquare>> {
        self.squares
            .iter()
            .map(|s| motion.map_axis_square(s.square.sw(), s.square.side).ok_or(Error::NonDiamondMotion { part: 0 }))
            .collect()
    }

    /// Number of squares whose closure meets `L_n`.
    pub fn count_layer_squares(&self, n: u32) -> usize {
        if n == 0 {
            return 0;
        }
        let lo = 1.0 / (n + 1) as f64;
        self.squares.par_iter().filter(|s| self.dinf(s.square.sw()) > lo).count()
    }

    pub fn layer_profile(&self, n_max: u32) -> LayerProfile {
        let rho: Vec<f64> = self.squares.par_iter().map(|s| self.dinf(s.square.sw())).collect();
        let counts: Vec<usize> =
            (1..=n_max).map(|n| rho.iter().filter(|&&r| r > 1.0 / (n + 1) as f64).count()).collect();
        let c = counts.iter().enumerate().map(|(i, &k)| k as f64 / (i + 2) as f64).fold(0.0, f64::max);
        LayerProfile { counts, c }
    }

    /// East-side, north-side and diagonal intersections with `L_n` for every
    /// square meeting `L_n`, with the corresponding upper bounds.
    pub fn layer_intersection_stats(&self, n: u32) -> Vec<LayerIntersection> {
        if n == 0 {
            return Vec::new();
        }
        let (lo, hi) = (1.0 / (n + 1) as f64, 1.0 / n as f64);
        let band = 1.0 / (n as f64 * (n + 1) as f64);
        let h = &self.root.h;
        self.squares
            .par_iter()
            .enumerate()
            .filter_map(|(index, s)| {
                let q = s.square;
                let rho_sw = self.dinf(q.sw());
                if rho_sw <= lo {
                    return None;
                }
                let (x1, y1) = (q.x + q.side, q.y + q.side);
                // east side: ρ = c at y = h(x1 + c) − c
                let y_at = |c: f64| h.eval(x1 + c) - c;
                let e = (y1.min(y_at(lo)) - q.y.max(y_at(hi))).max(0.0);
                // north side: ρ = c at x = h⁻¹(y1 + c) − c
                let x_at = |c: f64| h.inverse(y1 + c) - c;
                let nn = (x1.min(x_at(lo)) - q.x.max(x_at(hi))).max(0.0);
                let d = (rho_sw.min(hi) - lo).max(0.0);
                let hx = h.eval(x1);
                Some(LayerIntersection {
                    index,
                    e,
                    n: nn,
                    d,
                    e_bound: h.eval(x1 + lo) - h.eval(x1 + hi) + band,
                    n_bound: h.inverse(hx + lo) - h.inverse(hx + hi) + band,
                    d_bound: band,
                })
            })
            .collect()
    }

    /// Checks every square of depth `≤ max_depth` against the side bounds.
    pub fn side_bound_check(&self, epsilon: f64, shift: u32, max_depth: u32) -> SideBoundReport {
        let scale = self.root.width();
        let mut rep = SideBoundReport { epsilon, shift, checked: 0, violations: 0, examples: Vec::new() };
        for s in self.squares.iter().filter(|s| s.depth <= max_depth) {
            let k = (s.depth + shift) as i32;
            let lower = scale * (2.0 + epsilon).powi(-k);
            let upper = scale * (2.0 - epsilon).powi(-k);
            let tol = 1e-12 * upper;
            rep.checked += 1;
            if s.square.side < lower - tol || s.square.side > upper + tol {
                rep.violations += 1;
                if rep.examples.len() < 8 {
                    rep.examples.push((s.depth, s.square.side, lower, upper));
                }
            }
        }
        rep
    }

    /// Samples `samples` points on each `−`diagonal.
    pub fn diagonal_distance_check(&self, epsilon: f64, samples: usize) -> DiagonalDistanceReport {
        let bound_ratio = (1.0 + epsilon) / (2.0 - epsilon);
        let per: Vec<(usize, f64)> = self
            .squares
            .par_iter()
            .map(|s| {
                let q = s.square;
                let mut bad = 0;
                let mut worst: f64 = 0.0;
                for k in 0..samples {
                    let t = if samples > 1 { k as f64 / (samples - 1) as f64 } else { 0.5 };
                    let p = Point::new(q.x + t * q.side, q.y + (1.0 - t) * q.side);
                    let r = self.dinf(p) / q.side;
                    worst = worst.max(r);
                    if r > bound_ratio * (1.0 + 1e-12) {
                        bad += 1;
                    }
                }
                (bad, worst)
            })
            .collect();
        DiagonalDistanceReport {
            epsilon,
            checked_points: per.len() * samples,
            violations: per.iter().map(|p| p.0).sum(),
            max_ratio: per.iter().map(|p| p.1).fold(0.0, f64::max),
            bound_ratio,
        }
    }

    /// Total pairwise interior overlap area.
    pub fn overlap_area(&self) -> f64 {
        let boxes: Vec<Aabb> = self.squares.iter().map(|s| s.square.aabb()).collect();
        let grid = GridIndex::from_boxes(&boxes, boxes.len().max(16) * 2);
        self.squares
            .par_iter()
            .enumerate()
            .map(|(i, s)| {
                grid.query_box(&boxes[i])
                    .into_iter()
                    .filter(|&j| j as usize > i)
                    .map(|j| s.square.overlap(&self.squares[j as usize].square))
                    .sum::<f64>()
            })
            .sum()
    }

    /// Squares with a corner above the graph or outside the root strip.
    pub fn containment_violations(&self) -> usize {
        let tol = 1e-10;
        self.squares
            .iter()
            .filter(|s| {
                let q = s.square;
                [q.sw(), q.se(), q.ne(), q.nw()].iter().any(|c| !self.root.contains(*c, tol))
            })
            .count()
    }

    /// One row per square: depth, word, corners, side.
    pub fn write_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "depth,word,x0,y0,x1,y1,side")?;
        for s in &self.squares {
            let q = s.square;
            writeln!(w, "{},{},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e}", s.depth, s.word, q.x, q.y, q.x + q.side, q.y + q.side, q.side)?;
        }
        Ok(())
    }
}

/// Bounds on the side of `q(T)` when `|h' + 1| ≤ ε`:
/// `max{b − a, h(a) − floor}/(2+ε) ≤ side ≤ min{b − a, h(a) − floor}/(2−ε)`.
pub fn first_square_bounds(t: &SubTriangle, epsilon: f64) -> (f64, f64) {
    let (w, h) = (t.width(), t.height());
    (w.max(h) / (2.0 + epsilon), w.min(h) / (2.0 - epsilon))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn tri(h: BoundaryFunction) -> SubTriangle {
        SubTriangle::root(&TriangularDomain::new(h))
    }

    fn iso() -> SubTriangle {
        tri(BoundaryFunction::affine(0.0, 1.0, 1.0, -1.0).unwrap())
    }

    #[test]
    fn isoceles_split() {
        let s = q_split(&iso()).unwrap();
        assert_eq!(s.x0, 0.5);
        assert_eq!(s.square, AxisSquare { x: 0.0, y: 0.0, side: 0.5 });
        let (u, r) = (s.upper.unwrap(), s.right.unwrap());
        assert_eq!((u.a, u.b, u.floor), (0.0, 0.5, 0.5));
        assert_eq!((r.a, r.b, r.floor), (0.5, 1.0, 0.0));
        assert_eq!(u.area(), r.area());
        assert_eq!(u.area(), 0.125);
        let (lo, hi) = first_square_bounds(&iso(), 1.0);
        assert!(lo <= 0.5 && 0.5 <= hi);
    }

    #[test]
    fn quadratic_split_golden_ratio() {
        let t = tri(BoundaryFunction::quadratic(0.0, 1.0, 1.0, 0.0, -1.0).unwrap());
        let x0 = q_split(&t).unwrap().x0;
        // bisection oracle on 1 − x² − x = 0
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while hi - lo > 1e-13 {
            let m = 0.5 * (lo + hi);
            if 1.0 - m * m - m > 0.0 { lo = m } else { hi = m }
        }
        assert_relative_eq!(x0, 0.5 * (lo + hi), epsilon = 1e-12);
        assert_relative_eq!(x0, (5f64.sqrt() - 1.0) / 2.0, epsilon = 1e-13);
    }

    #[test]
    fn isoceles_depth_two() {
        let c = generate_covering(&iso(), 0.0, 2).unwrap();
        assert_eq!(c.len(), 7);
        let mut sides: Vec<f64> = c.squares.iter().map(|s| s.square.side).collect();
        sides.sort_by(f64::total_cmp);
        assert_eq!(sides, vec![0.125, 0.125, 0.125, 0.125, 0.25, 0.25, 0.5]);
        assert_eq!(c.overlap_area(), 0.0);
        assert_eq!(c.containment_violations(), 0);
    }

    #[test]
    fn isoceles_residual_halves() {
        for m in 0..8 {
            let c = generate_covering(&iso(), 0.0, m).unwrap();
            assert_relative_eq!(c.residual_area, 0.5 * 0.5f64.powi(m as i32 + 1), epsilon = 1e-15);
            assert!(c.len() < (1usize << (m + 1)));
        }
    }

    #[test]
    fn dyadic_levels() {
        let c = generate_dyadic_covering(1.0, 1).unwrap();
        let d = c.diamonds(&square_example_motion()).unwrap();
        assert_eq!(d.len(), 3);
        assert_relative_eq!(d[0].diag, 1.0, epsilon = 1e-15);
        assert_relative_eq!(d[0].north.x2, 1.0, epsilon = 1e-15);
        let mut halves: Vec<f64> = d[1..].iter().map(|q| q.north.x1).collect();
        halves.sort_by(f64::total_cmp);
        assert_relative_eq!(halves[0], -0.5, epsilon = 1e-15);
        assert_relative_eq!(halves[1], 0.5, epsilon = 1e-15);
        for n in 0..6u32 {
            let d = dyadic_diamonds(1.0, n).unwrap();
            assert_eq!(d.len(), (1usize << (n + 1)) - 1);
        }
        // each level's horizontal diagonals have total length 1
        let d = dyadic_diamonds(1.0, 6).unwrap();
        for n in 0..=6 {
            let diag = 0.5f64.powi(n);
            let total: f64 = d.iter().filter(|q| (q.diag - diag).abs() < 1e-12).map(|q| q.diag).sum();
            assert_relative_eq!(total, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn layer_classification() {
        assert_eq!(classify_layer(0.3).unwrap(), 3);
        assert_eq!(classify_layer(1.0).unwrap(), 1);
        assert_eq!(classify_layer(0.2).unwrap(), 5);
        assert_eq!(classify_layer(1.0 / 7.0).unwrap(), 7);
        assert!(classify_layer(0.0).is_err());
        assert!(classify_layer(1.5).is_err());
    }

    #[test]
    fn empty_covering_counts_zero() {
        let c = generate_covering(&iso(), 10.0, 4).unwrap();
        assert!(c.is_empty());
        assert_eq!(c.count_layer_squares(3), 0);
        assert!(c.layer_intersection_stats(3).is_empty());
    }

    #[test]
    fn layer_stats_bounds_hold() {
        let t = tri(BoundaryFunction::quadratic(0.0, 1.0, 1.0, -0.95, -0.05).unwrap());
        let c = generate_covering(&t, 0.0, 9).unwrap();
        for n in 1..=20 {
            for s in c.layer_intersection_stats(n) {
                assert!(s.within_bounds(1e-9), "n = {n}: {s:?}");
            }
        }
        let prof = c.layer_profile(20);
        assert!(prof.c.is_finite() && prof.c > 0.0);
    }

    #[test]
    fn word_display() {
        let w = Word::default().push(false).push(true).push(true);
        assert_eq!(w.to_string(), "urr");
        assert_eq!(w.len(), 3);
    }

    #[test]
    fn csv_dump() {
        let c = generate_covering(&iso(), 0.0, 1).unwrap();
        let mut out = Vec::new();
        c.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert!(text.lines().nth(2).unwrap().starts_with("1,u,"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn coverings_are_disjoint_and_contained(c1 in -1.4f64..-0.6, c2 in -0.25f64..0.25, depth in 1u32..8) {
            // h(t) = 1 + c1 t + c2 t², decreasing on [0, 1] when c1 + 2 c2 < 0
            prop_assume!(c1 + 2.0 * c2 < -0.05 && 1.0 + c1 + c2 > 0.0);
            let t = tri(BoundaryFunction::quadratic(0.0, 1.0, 1.0, c1, c2).unwrap());
            let c = generate_covering(&t, 0.0, depth).unwrap();
            prop_assert!(c.overlap_area() <= 1e-14);
            prop_assert_eq!(c.containment_violations(), 0);
            prop_assert!(c.residual_area >= 0.0);
        }
    }
}
