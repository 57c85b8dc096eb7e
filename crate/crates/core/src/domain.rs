//! Compatible domains: ±1-slope polygons, triangular domains `T_h` under a
//! strictly decreasing boundary function, rigid-motion images of those, and
//! the canonical example domains.

use std::fmt;
use std::sync::Arc;

use dashu_int::UBig;
use serde::{Deserialize, Serialize};

use crate::analysis::choose_bad_n;
use crate::geometry::{polygon_area, polygon_contains, segments_intersect, Point, RigidMotion, Segment};
use crate::index::{Aabb, SegmentIndex};
use crate::quadrature::adaptive;
use crate::{Error, Result};

/// Relative tolerance of the polyline approximation of curved boundary arcs.
pub const POLYLINE_TOL: f64 = 1e-8;
/// Samples used by monotonicity validation and slope diagnostics.
const VALIDATION_SAMPLES: usize = 4096;

/// Closed-form or tabulated description of a boundary function, as read from
/// a domain spec file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum BoundarySpec {
    /// `h(t) = h0 + slope·(t − a)`.
    Affine { a: f64, b: f64, h0: f64, slope: f64 },
    /// `h(t) = c0 + c1·t + c2·t²`.
    Quadratic { a: f64, b: f64, c0: f64, c1: f64, c2: f64 },
    /// `h(t) = coef·(b − t)^exponent + offset`.
    Power {
        a: f64,
        b: f64,
        #[serde(default = "one")]
        coef: f64,
        exponent: f64,
        #[serde(default)]
        offset: f64,
    },
    /// Piecewise-linear through `(t, h)` samples.
    Table { points: Vec<(f64, f64)> },
}

fn one() -> f64 {
    1.0
}

type Fun = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Form {
    Spec(BoundarySpec),
    Custom { f: Fun, df: Option<Fun> },
}

/// Continuous strictly decreasing `h: [a, b] → ℝ`.
#[derive(Clone)]
pub struct BoundaryFunction {
    a: f64,
    b: f64,
    form: Form,
}

impl fmt::Debug for BoundaryFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.form {
            Form::Spec(s) => write!(f, "BoundaryFunction({s:?})"),
            Form::Custom { .. } => write!(f, "BoundaryFunction(custom on [{}, {}])", self.a, self.b),
        }
    }
}

impl BoundaryFunction {
    pub fn from_spec(spec: BoundarySpec) -> Result<Self> {
        let (a, b) = match &spec {
            BoundarySpec::Affine { a, b, slope, .. } => {
                if !(*slope < 0.0) {
                    return Err(Error::param("slope", "affine boundary must have negative slope"));
                }
                (*a, *b)
            }
            BoundarySpec::Quadratic { a, b, .. } => (*a, *b),
            BoundarySpec::Power { a, b, coef, exponent, .. } => {
                if !(*coef > 0.0 && *exponent > 0.0) {
                    return Err(Error::param("exponent", "power boundary needs coef > 0 and exponent > 0"));
                }
                (*a, *b)
            }
            BoundarySpec::Table { points } => {
                if points.len() < 2 {
                    return Err(Error::param("points", "table boundary needs at least two samples"));
                }
                for i in 1..points.len() {
                    let (s, hs) = points[i - 1];
                    let (t, ht) = points[i];
                    if !(t > s) {
                        return Err(Error::param("points", format!("abscissae must increase at sample {i}")));
                    }
                    if !(ht < hs) {
                        return Err(Error::NotDecreasing { s, hs, t, ht });
                    }
                }
                (points[0].0, points[points.len() - 1].0)
            }
        };
        Self::checked(a, b, Form::Spec(spec))
    }

    pub fn affine(a: f64, b: f64, h0: f64, slope: f64) -> Result<Self> {
        Self::from_spec(BoundarySpec::Affine { a, b, h0, slope })
    }

    pub fn quadratic(a: f64, b: f64, c0: f64, c1: f64, c2: f64) -> Result<Self> {
        Self::from_spec(BoundarySpec::Quadratic { a, b, c0, c1, c2 })
    }

    /// User-supplied `h` with an optional derivative.
    pub fn custom(
        a: f64,
        b: f64,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: Option<Box<dyn Fn(f64) -> f64 + Send + Sync>>,
    ) -> Result<Self> {
        let df: Option<Fun> = df.map(Arc::from);
        Self::checked(a, b, Form::Custom { f: Arc::new(f), df })
    }

    fn checked(a: f64, b: f64, form: Form) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::param("a", format!("need finite a < b, got [{a}, {b}]")));
        }
        let h = BoundaryFunction { a, b, form };
        let n = VALIDATION_SAMPLES;
        let mut prev = (a, h.eval(a));
        if !prev.1.is_finite() {
            return Err(Error::param("h", "h(a) is not finite"));
        }
        for i in 1..=n {
            let t = a + (b - a) * i as f64 / n as f64;
            let ht = h.eval(t);
            if !(ht < prev.1) {
                return Err(Error::NotDecreasing { s: prev.0, hs: prev.1, t, ht });
            }
            prev = (t, ht);
        }
        if h.has_derivative() {
            for i in 1..n {
                let t = a + (b - a) * i as f64 / n as f64;
                let d = h.derivative(t);
                if !(d < 0.0) {
                    return Err(Error::param("h", format!("derivative {d} at t = {t} is not negative")));
                }
            }
        }
        Ok(h)
    }

    #[inline]
    pub fn a(&self) -> f64 {
        self.a
    }

    #[inline]
    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn spec(&self) -> Option<&BoundarySpec> {
        match &self.form {
            Form::Spec(s) => Some(s),
            Form::Custom { .. } => None,
        }
    }

    /// `h(t)` with `t` clamped to `[a, b]`.
    pub fn eval(&self, t: f64) -> f64 {
        let t = t.clamp(self.a, self.b);
        match &self.form {
            Form::Spec(BoundarySpec::Affine { a, h0, slope, .. }) => h0 + slope * (t - a),
            Form::Spec(BoundarySpec::Quadratic { c0, c1, c2, .. }) => c0 + t * (c1 + t * c2),
            Form::Spec(BoundarySpec::Power { b, coef, exponent, offset, .. }) => coef * (b - t).powf(*exponent) + offset,
            Form::Spec(BoundarySpec::Table { points }) => {
                let k = points.partition_point(|p| p.0 <= t).clamp(1, points.len() - 1);
                let (t0, h0) = points[k - 1];
                let (t1, h1) = points[k];
                h0 + (h1 - h0) * (t - t0) / (t1 - t0)
            }
            Form::Custom { f, .. } => f(t),
        }
    }

    fn has_derivative(&self) -> bool {
        match &self.form {
            Form::Spec(BoundarySpec::Table { .. }) => false,
            Form::Spec(_) => true,
            Form::Custom { df, .. } => df.is_some(),
        }
    }

    /// `h'(t)` on the open interval; one-sided slopes for tables and a
    /// central difference for custom functions without a derivative.
    pub fn derivative(&self, t: f64) -> f64 {
        match &self.form {
            Form::Spec(BoundarySpec::Affine { slope, .. }) => *slope,
            Form::Spec(BoundarySpec::Quadratic { c1, c2, .. }) => c1 + 2.0 * c2 * t,
            Form::Spec(BoundarySpec::Power { b, coef, exponent, .. }) => -coef * exponent * (b - t).powf(exponent - 1.0),
            Form::Spec(BoundarySpec::Table { points }) => {
                let k = points.partition_point(|p| p.0 <= t).clamp(1, points.len() - 1);
                (points[k].1 - points[k - 1].1) / (points[k].0 - points[k - 1].0)
            }
            Form::Custom { df: Some(df), .. } => df(t),
            Form::Custom { f, .. } => {
                let d = 1e-7 * (self.b - self.a);
                let (lo, hi) = ((t - d).max(self.a), (t + d).min(self.b));
                (f(hi) - f(lo)) / (hi - lo)
            }
        }
    }

    /// Affine slope, if `h` is affine.
    pub fn affine_slope(&self) -> Option<f64> {
        match &self.form {
            Form::Spec(BoundarySpec::Affine { slope, .. }) => Some(*slope),
            _ => None,
        }
    }

    /// `h⁻¹(y)`, clamped: values above `h(a)` map to `a`, below `h(b)` to `b`.
    pub fn inverse(&self, y: f64) -> f64 {
        if y >= self.eval(self.a) {
            return self.a;
        }
        if y <= self.eval(self.b) {
            return self.b;
        }
        if let Form::Spec(BoundarySpec::Affine { a, h0, slope, .. }) = &self.form {
            return (a + (y - h0) / slope).clamp(self.a, self.b);
        }
        bisect(self.a, self.b, |t| self.eval(t) - y)
    }

    /// `sup |h'(t) + 1|` estimated on a uniform grid of the open interval.
    pub fn slope_deviation(&self) -> f64 {
        let n = VALIDATION_SAMPLES;
        (1..n)
            .map(|i| (self.derivative(self.a + (self.b - self.a) * i as f64 / n as f64) + 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// `(inf h', sup h')` on the same grid.
    pub fn slope_range(&self) -> (f64, f64) {
        let n = VALIDATION_SAMPLES;
        (1..n)
            .map(|i| self.derivative(self.a + (self.b - self.a) * i as f64 / n as f64))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), d| (lo.min(d), hi.max(d)))
    }

    /// Sign changes of `h' + 1` on a sample grid. Several changes hint that the
    /// boundary is tangent to a ±1 direction infinitely often; diagnostic only.
    pub fn tangency_sign_changes(&self) -> usize {
        let n = VALIDATION_SAMPLES;
        let mut last = 0i8;
        let mut changes = 0;
        for i in 1..n {
            let d = self.derivative(self.a + (self.b - self.a) * i as f64 / n as f64) + 1.0;
            let s = if d > 0.0 { 1 } else if d < 0.0 { -1 } else { 0 };
            if s != 0 {
                if last != 0 && s != last {
                    changes += 1;
                }
                last = s;
            }
        }
        changes
    }

    /// Arc length of the graph.
    pub fn graph_length(&self) -> f64 {
        self.polyline(POLYLINE_TOL * (self.b - self.a)).windows(2).map(|w| w[0].dist(w[1])).sum()
    }

    /// Polyline through graph points whose vertical deviation from `h` is
    /// below `tol`.
    pub fn polyline(&self, tol: f64) -> Vec<Point> {
        if let Form::Spec(BoundarySpec::Affine { .. }) = self.form {
            return vec![Point::new(self.a, self.eval(self.a)), Point::new(self.b, self.eval(self.b))];
        }
        if let Form::Spec(BoundarySpec::Table { points }) = &self.form {
            return points.iter().map(|&(t, h)| Point::new(t, h)).collect();
        }
        let mut out = vec![Point::new(self.a, self.eval(self.a))];
        let n0 = 64;
        for i in 0..n0 {
            let s = self.a + (self.b - self.a) * i as f64 / n0 as f64;
            let t = self.a + (self.b - self.a) * (i + 1) as f64 / n0 as f64;
            self.refine(s, t, tol, 0, &mut out);
        }
        out
    }

    fn refine(&self, s: f64, t: f64, tol: f64, depth: u32, out: &mut Vec<Point>) {
        let (hs, ht) = (self.eval(s), self.eval(t));
        let dev = [0.25, 0.5, 0.75]
            .iter()
            .map(|&q| {
                let x = s + q * (t - s);
                (self.eval(x) - (hs + q * (ht - hs))).abs()
            })
            .fold(0.0, f64::max);
        if dev <= tol || depth >= 40 {
            out.push(Point::new(t, ht));
            return;
        }
        let m = 0.5 * (s + t);
        self.refine(s, m, tol, depth + 1, out);
        self.refine(m, t, tol, depth + 1, out);
    }
}

/// Root of a sign-changing `g` on `[lo, hi]` by bisection to full precision.
/// `g(lo) ≥ 0 ≥ g(hi)` or the reverse.
pub(crate) fn bisect(mut lo: f64, mut hi: f64, g: impl Fn(f64) -> f64) -> f64 {
    let lo_pos = g(lo) >= 0.0;
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if m <= lo || m >= hi {
            break;
        }
        if (g(m) >= 0.0) == lo_pos {
            lo = m;
        } else {
            hi = m;
        }
    }
    0.5 * (lo + hi)
}

/// `T_h = {a ≤ x₁ ≤ b, h(b) ≤ x₂ ≤ h(x₁)}`.
#[derive(Clone, Debug)]
pub struct TriangularDomain {
    pub h: Arc<BoundaryFunction>,
}

impl TriangularDomain {
    pub fn new(h: BoundaryFunction) -> Self {
        TriangularDomain { h: Arc::new(h) }
    }

    pub fn floor(&self) -> f64 {
        self.h.eval(self.h.b())
    }

    pub fn area(&self) -> f64 {
        let fl = self.floor();
        adaptive(|t| self.h.eval(t) - fl, self.h.a(), self.h.b(), 1e-14).value
    }

    pub fn contains(&self, p: Point, tol: f64) -> bool {
        p.x1 >= self.h.a() - tol
            && p.x1 <= self.h.b() + tol
            && p.x2 >= self.floor() - tol
            && p.x2 <= self.h.eval(p.x1) + tol
    }

    /// `d∞(p, graph h)` for `p` in `T_h`: the root `ρ ≥ 0` of
    /// `p.x2 + ρ = h(p.x1 + ρ)`.
    pub fn dinf_to_graph(&self, p: Point) -> f64 {
        dinf_to_graph(&self.h, p)
    }

    /// Vertices of the outline (graph polyline, then the two legs).
    pub fn outline(&self, tol: f64) -> Vec<Point> {
        let mut pts = self.h.polyline(tol);
        pts.push(Point::new(self.h.a(), self.floor()));
        pts
    }
}

/// `d∞` from a point under the graph to the graph of a decreasing `h`.
pub fn dinf_to_graph(h: &BoundaryFunction, p: Point) -> f64 {
    let g = |r: f64| h.eval(p.x1 + r) - p.x2 - r;
    if g(0.0) <= 0.0 {
        return 0.0;
    }
    if let Some(m) = h.affine_slope() {
        let r = g(0.0) / (1.0 - m);
        return r.max(0.0);
    }
    let hi = (h.inverse(p.x2) - p.x1).max(0.0);
    if g(hi) >= 0.0 {
        return hi;
    }
    bisect(0.0, hi, g)
}

/// A triangular part and the motion placing it in the domain frame.
#[derive(Clone, Debug)]
pub struct TrianglePart {
    pub tri: TriangularDomain,
    pub motion: RigidMotion,
    /// Covered by the closed-form dyadic covering instead of the generic one.
    pub dyadic: bool,
}

impl TrianglePart {
    pub fn contains(&self, p: Point, tol: f64) -> bool {
        let q = self.motion.inverse().apply(p);
        self.tri.contains(q, tol / self.motion.scale)
    }

    pub fn area(&self) -> f64 {
        self.tri.area() * self.motion.scale * self.motion.scale
    }
}

/// Simple polygon all of whose edges have slope +1 or −1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopePolygon {
    vertices: Vec<Point>,
}

impl SlopePolygon {
    /// Validates slopes and simplicity; the result is counterclockwise.
    pub fn new(vertices: Vec<Point>) -> Result<Self> {
        let n = vertices.len();
        if n < 4 {
            return Err(Error::param("vertices", "a ±1-slope polygon needs at least 4 vertices"));
        }
        let scale = Aabb::of_points(vertices.iter().copied()).diameter();
        let tol = 1e-12 * scale.max(1.0);
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            if !a.is_finite() {
                return Err(Error::param("vertices", format!("vertex {i} is not finite")));
            }
            let d = b - a;
            if d.norm_inf() <= tol || (d.x1.abs() - d.x2.abs()).abs() > tol {
                return Err(Error::BadEdgeSlope { index: i });
            }
        }
        for i in 0..n {
            let si = Segment::new_unchecked(vertices[i], vertices[(i + 1) % n]);
            for j in i + 1..n {
                if j == i + 1 || (i == 0 && j == n - 1) {
                    continue;
                }
                let sj = Segment::new_unchecked(vertices[j], vertices[(j + 1) % n]);
                if segments_intersect(&si, &sj) {
                    return Err(Error::SelfIntersecting { first: i, second: j });
                }
            }
        }
        Ok(Self::oriented(vertices))
    }

    /// Skips the quadratic simplicity test; for outlines built internally.
    pub(crate) fn new_trusted(vertices: Vec<Point>) -> Self {
        Self::oriented(vertices)
    }

    fn oriented(mut vertices: Vec<Point>) -> Self {
        if polygon_area(&vertices) < 0.0 {
            vertices.reverse();
        }
        SlopePolygon { vertices }
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn area(&self) -> f64 {
        polygon_area(&self.vertices)
    }

    pub fn edges(&self) -> Vec<Segment> {
        let n = self.vertices.len();
        (0..n).map(|i| Segment::new_unchecked(self.vertices[i], self.vertices[(i + 1) % n])).collect()
    }

    pub fn contains(&self, p: Point, tol: f64) -> bool {
        polygon_contains(&self.vertices, p, tol)
    }
}

/// One cell of a staircase: the rectangle `[s0, s1] × [0, height]` before the
/// rotation, and its image.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StairCell {
    pub n: u32,
    pub s0: f64,
    pub s1: f64,
    pub height: f64,
    pub image: [Point; 4],
}

/// Which builder produced a domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainKind {
    UnitSquare,
    StaircaseGood,
    StaircaseBad,
    Triangle,
    Polygon,
}

/// A polygon part plus rigid-motion images of triangular parts.
#[derive(Clone, Debug)]
pub struct CompatibleDomain {
    pub kind: DomainKind,
    pub polygon_part: Option<SlopePolygon>,
    pub triangle_parts: Vec<TrianglePart>,
    /// Staircase cells, when the domain is a staircase.
    pub cells: Vec<StairCell>,
    /// Area of the truncated part of an infinite domain (upper bound).
    pub leftover_area: f64,
    boundary: SegmentIndex,
    outline: Vec<Point>,
    bounds: Aabb,
}

impl CompatibleDomain {
    fn assemble(
        kind: DomainKind,
        polygon_part: Option<SlopePolygon>,
        triangle_parts: Vec<TrianglePart>,
        boundary: Vec<Segment>,
        outline: Vec<Point>,
    ) -> Self {
        let bounds = Aabb::of_points(boundary.iter().flat_map(|s| [s.a, s.b]));
        CompatibleDomain {
            kind,
            polygon_part,
            triangle_parts,
            cells: Vec::new(),
            leftover_area: 0.0,
            boundary: SegmentIndex::new(boundary),
            outline,
            bounds,
        }
    }

    pub fn bounds(&self) -> Aabb {
        self.bounds
    }

    pub fn diameter(&self) -> f64 {
        self.bounds.diameter()
    }

    /// Segments of `∂Ω` (curved arcs as polylines).
    pub fn boundary_segments(&self) -> &[Segment] {
        self.boundary.segments()
    }

    /// Closed outline of the domain, for rendering.
    pub fn outline(&self) -> &[Point] {
        &self.outline
    }

    pub fn area(&self) -> f64 {
        self.polygon_part.as_ref().map_or(0.0, SlopePolygon::area)
            + self.triangle_parts.iter().map(TrianglePart::area).sum::<f64>()
    }

    /// Membership in the closure, with tolerance `1e-12·diam`.
    pub fn contains(&self, p: Point) -> bool {
        let tol = 1e-12 * self.diameter();
        self.bounds.contains(p, tol)
            && (self.polygon_part.as_ref().is_some_and(|poly| poly.contains(p, tol))
                || self.triangle_parts.iter().any(|t| t.contains(p, tol)))
    }

    /// `d₁(p, ∂Ω)`; `p` must lie in the closure.
    pub fn d1_to_boundary(&self, p: Point) -> Result<f64> {
        if !self.contains(p) {
            return Err(Error::OutsideDomain { x1: p.x1, x2: p.x2 });
        }
        Ok(self.d1_to_boundary_unchecked(p))
    }

    /// `d₁(p, ∂Ω)` without the membership test.
    pub fn d1_to_boundary_unchecked(&self, p: Point) -> f64 {
        self.boundary.nearest_d1(p)
    }
}

/// `(−s, s)²` split into four triangles by its diagonals, each the image of
/// `{0 ≤ x₁ ≤ 2s, 0 ≤ x₂ ≤ 2s − x₁}` under `Rot^{2j+1}` scaled by `1/√2`.
pub fn build_unit_square(half_side: f64) -> Result<CompatibleDomain> {
    if !(half_side > 0.0 && half_side.is_finite()) {
        return Err(Error::param("half_side", "must be positive and finite"));
    }
    let s = half_side;
    let h = BoundaryFunction::affine(0.0, 2.0 * s, 2.0 * s, -1.0)?;
    let tri = TriangularDomain::new(h);
    let parts = (0..4u8)
        .map(|j| TrianglePart {
            tri: tri.clone(),
            motion: RigidMotion::rotation(2 * j + 1).with_scale(std::f64::consts::FRAC_1_SQRT_2),
            dyadic: true,
        })
        .collect();
    let corners = vec![Point::new(s, s), Point::new(-s, s), Point::new(-s, -s), Point::new(s, -s)];
    let boundary = (0..4).map(|i| Segment::new_unchecked(corners[i], corners[(i + 1) % 4])).collect();
    Ok(CompatibleDomain::assemble(DomainKind::UnitSquare, None, parts, boundary, corners))
}

/// `t_n = 1 − 2^{-n}`.
pub fn tread_start(n: u32) -> f64 {
    1.0 - 0.5f64.powi(n as i32)
}

/// Default staircase heights `h_n = 2^{-n-1}`.
pub fn default_good_heights(depth: u32) -> Vec<f64> {
    (1..=depth).map(|n| 0.5f64.powi(n as i32 + 1)).collect()
}

fn staircase_outline(steps: &[(f64, f64, f64)]) -> Vec<Point> {
    // steps: (s0, s1, height), consecutive, left to right
    let mut pts = vec![Point::new(0.0, 0.0)];
    let last = steps.last().expect("at least one step");
    pts.push(Point::new(last.1, 0.0));
    for &(s0, s1, h) in steps.iter().rev() {
        let top_right = Point::new(s1, h);
        if pts.last() != Some(&top_right) {
            pts.push(top_right);
        }
        pts.push(Point::new(s0, h));
    }
    pts.dedup();
    pts
}

fn rotated_cells(steps: &[(u32, f64, f64, f64)], motion: &RigidMotion) -> Vec<StairCell> {
    steps
        .iter()
        .map(|&(n, s0, s1, h)| StairCell {
            n,
            s0,
            s1,
            height: h,
            image: [Point::new(s0, 0.0), Point::new(s1, 0.0), Point::new(s1, h), Point::new(s0, h)].map(|p| motion.apply(p)),
        })
        .collect()
}

/// `Rot(S_f)` for `f = Σ h_n χ_(t_{n−1}, t_n)`, truncated after `depth` treads.
pub fn build_staircase_good(depth: u32, heights: &[f64]) -> Result<CompatibleDomain> {
    if depth == 0 || heights.len() != depth as usize {
        return Err(Error::param("heights", format!("need exactly {depth} heights and depth >= 1")));
    }
    for (i, &h) in heights.iter().enumerate() {
        let n = i as i32 + 1;
        if !(h > 0.0 && h < 0.5f64.powi(n)) {
            return Err(Error::param("heights", format!("h_{n} = {h} violates 0 < h_n < 2^-n")));
        }
    }
    let motion = RigidMotion::rotation(1);
    let steps: Vec<(u32, f64, f64, f64)> =
        (1..=depth).map(|n| (n, tread_start(n - 1), tread_start(n), heights[n as usize - 1])).collect();
    let flat: Vec<(f64, f64, f64)> = steps.iter().map(|s| (s.1, s.2, s.3)).collect();
    let outline: Vec<Point> = staircase_outline(&flat).into_iter().map(|p| motion.apply(p)).collect();
    let poly = SlopePolygon::new_trusted(outline.clone());
    let boundary = poly.edges();
    let mut dom = CompatibleDomain::assemble(DomainKind::StaircaseGood, Some(poly), Vec::new(), boundary, outline);
    dom.cells = rotated_cells(&steps, &motion);
    dom.leftover_area = 0.25f64.powi(depth as i32) / 3.0;
    Ok(dom)
}

/// Deepest tread supported by [`build_staircase_bad`].
pub const BAD_STAIRCASE_MAX_DEPTH: u32 = 6;

/// The staircase whose every cell forces unit jump length, kept implicit:
/// tread `n` carries `N_n` steps, which is far too many to enumerate beyond
/// the first tread.
#[derive(Clone, Debug, PartialEq)]
pub struct BadStaircase {
    pub depth: u32,
    /// `N_n` for `n = 1..=depth`.
    pub steps: Vec<UBig>,
}

impl BadStaircase {
    /// `g^N_(a,b)(s) = (b − a)(N − j)/N` on `[a + j(b−a)/N, a + (j+1)(b−a)/N)`.
    pub fn g(n_steps: u64, a: f64, b: f64, s: f64) -> f64 {
        if s < a || s >= b || n_steps == 0 {
            return 0.0;
        }
        let w = (b - a) / n_steps as f64;
        let j = (((s - a) / w).floor() as u64).min(n_steps - 1);
        (b - a) * (n_steps - j) as f64 / n_steps as f64
    }

    /// `f(s) = 2^{-n} + g_n(s)` on tread `n`; zero past the last tread.
    pub fn f(&self, s: f64) -> f64 {
        for n in 1..=self.depth {
            let (a, b) = (tread_start(n - 1), tread_start(n));
            if s >= a && s < b {
                let nn = u64::try_from(&self.steps[n as usize - 1]).unwrap_or(u64::MAX);
                return 0.5f64.powi(n as i32) + Self::g(nn, a, b, s);
            }
        }
        0.0
    }

    /// Interval of tread `n` before the rotation.
    pub fn tread(&self, n: u32) -> (f64, f64) {
        (tread_start(n - 1), tread_start(n))
    }

    /// `true` when the cells `C_n` have pairwise disjoint interiors; they sit
    /// over disjoint tread intervals.
    pub fn cells_disjoint(&self) -> bool {
        (1..self.depth).all(|n| self.tread(n).1 <= self.tread(n + 1).0)
    }

    /// Materializes the polygon when it has at most `max_vertices` vertices.
    pub fn domain(&self, max_vertices: usize) -> Result<CompatibleDomain> {
        let total: UBig = self.steps.iter().sum();
        let need = total * UBig::from(2u8) + UBig::from(4u8);
        if need > UBig::from(max_vertices) {
            return Err(Error::Resource(format!(
                "bad staircase of depth {} needs {need} vertices, limit is {max_vertices}",
                self.depth
            )));
        }
        let mut flat = Vec::new();
        let mut cells = Vec::new();
        for n in 1..=self.depth {
            let nn = u64::try_from(&self.steps[n as usize - 1]).expect("checked above");
            let (a, b) = self.tread(n);
            let w = (b - a) / nn as f64;
            let base = 0.5f64.powi(n as i32);
            for j in 0..nn {
                let s0 = a + j as f64 * w;
                let s1 = if j + 1 == nn { b } else { a + (j + 1) as f64 * w };
                flat.push((s0, s1, base + (b - a) * (nn - j) as f64 / nn as f64));
            }
            cells.push((n, a, b, base));
        }
        let motion = RigidMotion::rotation(1);
        let outline: Vec<Point> = staircase_outline(&flat).into_iter().map(|p| motion.apply(p)).collect();
        let poly = SlopePolygon::new_trusted(outline.clone());
        let boundary = poly.edges();
        let mut dom = CompatibleDomain::assemble(DomainKind::StaircaseBad, Some(poly), Vec::new(), boundary, outline);
        dom.cells = rotated_cells(&cells, &motion);
        Ok(dom)
    }
}

/// The implicit bad staircase with `N_n = choose_bad_N(n)` steps on tread `n`.
pub fn build_staircase_bad(depth: u32) -> Result<BadStaircase> {
    if depth == 0 {
        return Err(Error::param("depth", "must be >= 1"));
    }
    if depth > BAD_STAIRCASE_MAX_DEPTH {
        return Err(Error::Resource(format!(
            "bad staircase depth {depth} exceeds {BAD_STAIRCASE_MAX_DEPTH}: step counts grow double-exponentially"
        )));
    }
    let steps = (1..=depth).map(choose_bad_n).collect::<Result<Vec<_>>>()?;
    Ok(BadStaircase { depth, steps })
}

/// Single triangular part with the identity motion.
pub fn build_triangle_domain(h: BoundaryFunction) -> Result<CompatibleDomain> {
    build_triangle_domain_rotated(h, RigidMotion::identity())
}

/// Single triangular part placed by `motion`. Solutions need an odd rotation
/// power so that covering squares become diamonds.
pub fn build_triangle_domain_rotated(h: BoundaryFunction, motion: RigidMotion) -> Result<CompatibleDomain> {
    let tri = TriangularDomain::new(h);
    let diam = (tri.h.b() - tri.h.a()).hypot(tri.h.eval(tri.h.a()) - tri.floor());
    let outline_t = tri.outline(POLYLINE_TOL * diam);
    let outline: Vec<Point> = outline_t.iter().map(|&p| motion.apply(p)).collect();
    let n = outline.len();
    let boundary = (0..n)
        .filter(|&i| outline[i] != outline[(i + 1) % n])
        .map(|i| Segment::new_unchecked(outline[i], outline[(i + 1) % n]))
        .collect();
    let part = TrianglePart { tri, motion, dyadic: false };
    Ok(CompatibleDomain::assemble(DomainKind::Triangle, None, vec![part], boundary, outline))
}

/// A ±1-slope polygon domain.
pub fn build_polygon(vertices: Vec<Point>) -> Result<CompatibleDomain> {
    let poly = SlopePolygon::new(vertices)?;
    let boundary = poly.edges();
    let outline = poly.vertices().to_vec();
    Ok(CompatibleDomain::assemble(DomainKind::Polygon, Some(poly), Vec::new(), boundary, outline))
}

/// Rigid motion as written in a domain spec file.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MotionSpec {
    #[serde(default)]
    pub rot: u8,
    #[serde(default)]
    pub reflect: bool,
    #[serde(default = "one")]
    pub scale: f64,
    #[serde(default)]
    pub offset: (f64, f64),
}

impl MotionSpec {
    pub fn to_motion(self) -> Result<RigidMotion> {
        RigidMotion::new(self.rot, self.reflect, self.scale, Point::new(self.offset.0, self.offset.1))
    }
}

/// Domain spec file contents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    UnitSquare {
        #[serde(default = "one")]
        half_side: f64,
    },
    StaircaseGood {
        depth: u32,
        #[serde(default)]
        heights: Option<Vec<f64>>,
    },
    StaircaseBad {
        depth: u32,
        #[serde(default = "default_max_vertices")]
        max_vertices: usize,
    },
    Triangle {
        h: BoundarySpec,
        #[serde(default)]
        motion: Option<MotionSpec>,
    },
    Polygon {
        vertices: Vec<(f64, f64)>,
    },
}

fn default_max_vertices() -> usize {
    1_000_000
}

/// Builds the domain described by `spec`.
pub fn build_from_spec(spec: &DomainSpec) -> Result<CompatibleDomain> {
    match spec {
        DomainSpec::UnitSquare { half_side } => build_unit_square(*half_side),
        DomainSpec::StaircaseGood { depth, heights } => {
            let hs = heights.clone().unwrap_or_else(|| default_good_heights(*depth));
            build_staircase_good(*depth, &hs)
        }
        DomainSpec::StaircaseBad { depth, max_vertices } => build_staircase_bad(*depth)?.domain(*max_vertices),
        DomainSpec::Triangle { h, motion } => {
            let h = BoundaryFunction::from_spec(h.clone())?;
            match motion {
                Some(m) => build_triangle_domain_rotated(h, m.to_motion()?),
                None => build_triangle_domain(h),
            }
        }
        DomainSpec::Polygon { vertices } => build_polygon(vertices.iter().map(|&(x, y)| Point::new(x, y)).collect()),
    }
}
