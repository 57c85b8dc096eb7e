//! The candidate solution `v`: one l¹ distance pyramid per covering piece,
//! zero on the uncovered residual. Also extracts the jump set of both
//! partial derivatives as exact segments.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covering::{default_min_side, generate_covering, Covering, SubTriangle, Word};
use crate::domain::{CompatibleDomain, DomainKind, SlopePolygon};
use crate::geometry::{polygon_contains, DiamondSquare, Point, Segment};
use crate::index::{Aabb, GridIndex};
use crate::{Error, Result};

/// Hard cap on the number of pieces of one solution.
pub const MAX_PIECES: usize = 1 << 24;

/// Covering truncation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BuildOptions {
    /// Depth of the exact dyadic coverings.
    pub levels: u32,
    /// Depth cap for the generic coverings.
    pub max_depth: u32,
    /// Smallest square side kept by the generic coverings, in the triangle
    /// frame; `None` means `10⁻⁴` times the triangle diameter.
    pub min_side: Option<f64>,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions { levels: 8, max_depth: 20, min_side: None }
    }
}

impl BuildOptions {
    /// Both depths set to `n`.
    pub fn levels(n: u32) -> Self {
        BuildOptions { levels: n, max_depth: n, min_side: None }
    }
}

/// Where a piece comes from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum PieceSource {
    Triangle { part: usize, word: Word },
    Polygon { rect: usize },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub square: DiamondSquare,
    pub source: PieceSource,
    /// Covering depth for triangle parts, cell index for staircases, 0 for
    /// other polygon pieces.
    pub depth: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JumpKind {
    Side,
    /// Vertical diagonal: jump of `v_{x₁}`.
    PlusDiagonal,
    /// Horizontal diagonal: jump of `v_{x₂}`.
    MinusDiagonal,
}

impl JumpKind {
    pub fn name(self) -> &'static str {
        match self {
            JumpKind::Side => "side",
            JumpKind::PlusDiagonal => "plus_diagonal",
            JumpKind::MinusDiagonal => "minus_diagonal",
        }
    }
}

/// Partials that jump across a segment.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Affects {
    pub x1: bool,
    pub x2: bool,
}

impl Affects {
    pub const BOTH: Affects = Affects { x1: true, x2: true };

    pub fn count(self) -> u32 {
        u32::from(self.x1) + u32::from(self.x2)
    }

    pub fn label(self) -> &'static str {
        match (self.x1, self.x2) {
            (true, true) => "x1|x2",
            (true, false) => "x1",
            (false, true) => "x2",
            (false, false) => "none",
        }
    }
}

/// Jump amplitude of each partial: the partials take the values ±1.
pub const AMPLITUDE: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct JumpSegment {
    pub seg: Segment,
    pub kind: JumpKind,
    pub affects: Affects,
    /// Smallest depth among the pieces carrying the segment.
    pub depth: u32,
    /// The segment lies on `∂Ω`, where the jump measure of `Ω` puts no mass.
    pub on_boundary: bool,
}

/// `v` together with its pieces and a point-location index.
#[derive(Clone, Debug)]
pub struct SolutionField {
    domain: CompatibleDomain,
    pieces: Vec<Piece>,
    coverings: Vec<Covering>,
    residual_area: f64,
    leftovers: Vec<(f64, f64)>,
    index: GridIndex,
    options: BuildOptions,
}

impl SolutionField {
    pub fn domain(&self) -> &CompatibleDomain {
        &self.domain
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    /// Coverings of the triangle parts, in part order.
    pub fn coverings(&self) -> &[Covering] {
        &self.coverings
    }

    /// Area of the domain not covered by pieces.
    pub fn residual_area(&self) -> f64 {
        self.residual_area
    }

    /// Untiled rectangles of the polygon part, as `(W, H)` in the
    /// `(x₁+x₂, x₂−x₁)` frame.
    pub fn polygon_leftovers(&self) -> &[(f64, f64)] {
        &self.leftovers
    }

    pub fn options(&self) -> BuildOptions {
        self.options
    }

    pub fn max_depth(&self) -> u32 {
        self.pieces.iter().map(|p| p.depth).max().unwrap_or(0)
    }

    /// Index of a piece whose closure contains `p`.
    pub fn piece_at(&self, p: Point) -> Option<usize> {
        self.index.candidates(p).iter().map(|&i| i as usize).find(|&i| self.pieces[i].square.contains(p))
    }

    /// Index of a piece whose open interior contains `p`.
    pub fn piece_interior_at(&self, p: Point) -> Option<usize> {
        self.index
            .candidates(p)
            .iter()
            .map(|&i| i as usize)
            .find(|&i| self.pieces[i].square.contains_interior(p, 0.0))
    }

    /// `v(p)`, with `v = 0` on the residual.
    pub fn eval(&self, p: Point) -> Result<f64> {
        if !self.domain.contains(p) {
            return Err(Error::OutsideDomain { x1: p.x1, x2: p.x2 });
        }
        Ok(self.eval_unchecked(p))
    }

    /// `v(p)` without the membership test; 0 off the pieces.
    pub fn eval_unchecked(&self, p: Point) -> f64 {
        self.piece_at(p).map_or(0.0, |i| self.pieces[i].square.pyramid(p).max(0.0))
    }

    /// Face gradient at `p`: `Some((0, 0))` on the residual, `None` outside `Ω`.
    fn probe(&self, p: Point) -> Option<(i8, i8)> {
        match self.piece_interior_at(p) {
            Some(i) => Some(self.pieces[i].square.gradient(p)),
            None if self.domain.contains(p) => Some((0, 0)),
            None => None,
        }
    }

    /// Plain-text raster of `v` on an `nx × ny` grid of cell centers over the
    /// bounding box; `nan` outside the domain.
    pub fn write_raster(&self, mut w: impl Write, nx: usize, ny: usize) -> std::io::Result<()> {
        let b = self.domain.bounds();
        writeln!(w, "# nx={nx} ny={ny} x0={:.9e} y0={:.9e} x1={:.9e} y1={:.9e}", b.x0, b.y0, b.x1, b.y1)?;
        let rows: Vec<String> = (0..ny)
            .into_par_iter()
            .map(|j| {
                let y = b.y1 - (j as f64 + 0.5) * b.height() / ny as f64;
                (0..nx)
                    .map(|i| {
                        let p = Point::new(b.x0 + (i as f64 + 0.5) * b.width() / nx as f64, y);
                        match self.eval(p) {
                            Ok(v) => format!("{v:.9e}"),
                            Err(_) => "nan".to_string(),
                        }
                    })
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect();
        for r in rows {
            writeln!(w, "{r}")?;
        }
        Ok(())
    }
}

/// `v(p)`; errors when `p` is outside the domain.
pub fn eval_v(s: &SolutionField, p: Point) -> Result<f64> {
    s.eval(p)
}

/// Maps the square `[u0, u0+s] × [w0, w0+s]` of the `(u, w) = (x₁+x₂, x₂−x₁)`
/// frame back to a diamond.
fn uw_square(u0: f64, w0: f64, s: f64) -> DiamondSquare {
    DiamondSquare { north: Point::new(0.5 * (u0 - w0), 0.5 * (u0 + w0) + s), diag: s }
}

/// Rectangles `[u0, u1] × [w0, w1]` of the `(u, w)` frame tiling the polygon,
/// one per vertical slab and cross-section interval.
fn slab_rectangles(poly: &SlopePolygon, tol: f64) -> Result<Vec<[f64; 4]>> {
    let uw: Vec<(f64, f64)> = poly.vertices().iter().map(|p| (p.x1 + p.x2, p.x2 - p.x1)).collect();
    let n = uw.len();
    let mut us: Vec<f64> = uw.iter().map(|v| v.0).collect();
    us.sort_by(f64::total_cmp);
    us.dedup_by(|a, b| (*a - *b).abs() <= tol);
    // edges of constant w (the others are constant u)
    let flat: Vec<(f64, f64, f64)> = (0..n)
        .filter_map(|i| {
            let (a, b) = (uw[i], uw[(i + 1) % n]);
            ((a.1 - b.1).abs() <= tol).then(|| (a.0.min(b.0), a.0.max(b.0), 0.5 * (a.1 + b.1)))
        })
        .collect();
    let mut rects = Vec::new();
    for k in 0..us.len().saturating_sub(1) {
        let (u0, u1) = (us[k], us[k + 1]);
        let um = 0.5 * (u0 + u1);
        let mut ws: Vec<f64> = flat.iter().filter(|e| e.0 < um && um < e.1).map(|e| e.2).collect();
        ws.sort_by(f64::total_cmp);
        if !ws.len().is_multiple_of(2) {
            return Err(Error::Decomposition(format!("odd crossing count in slab u ∈ [{u0}, {u1}]")));
        }
        for pair in ws.chunks(2) {
            if pair[1] - pair[0] > tol {
                rects.push([u0, u1, pair[0], pair[1]]);
            }
        }
    }
    Ok(rects)
}

/// Greedy square tiling of a rectangle: `⌊W/H⌋` squares of side `H`, then
/// the same on the remainder. Returns the untiled remainder `(W, H)`.
fn euclid_tiling(r: [f64; 4], min_side: f64, out: &mut Vec<(f64, f64, f64)>) -> Option<(f64, f64)> {
    let [mut u0, u1, mut w0, w1] = r;
    let scale = (u1 - u0).max(w1 - w0);
    let eps = 1e-12 * scale;
    loop {
        let (wd, ht) = (u1 - u0, w1 - w0);
        if wd <= eps || ht <= eps {
            return None;
        }
        if wd.min(ht) < min_side || out.len() >= MAX_PIECES {
            return Some((wd, ht));
        }
        if wd >= ht {
            let k = ((wd + eps) / ht).floor().max(1.0) as usize;
            for i in 0..k {
                out.push((u0 + i as f64 * ht, w0, ht));
            }
            u0 += k as f64 * ht;
        } else {
            let k = ((ht + eps) / wd).floor().max(1.0) as usize;
            for i in 0..k {
                out.push((u0, w0 + i as f64 * wd, wd));
            }
            w0 += k as f64 * wd;
        }
    }
}

/// Builds `v` on `dom`: coverings of the triangle parts mapped through their
/// motions, and a square tiling of the polygon part.
pub fn build_solution(dom: &CompatibleDomain, opts: &BuildOptions) -> Result<SolutionField> {
    let mut pieces = Vec::new();
    let mut coverings = Vec::new();
    let mut residual = 0.0;
    let mut leftovers = Vec::new();
    for (k, part) in dom.triangle_parts.iter().enumerate() {
        if !part.motion.makes_diamonds() {
            return Err(Error::NonDiamondMotion { part: k });
        }
        let root = SubTriangle::root(&part.tri);
        let cov = if part.dyadic {
            if opts.levels > 22 {
                return Err(Error::Resource(format!("{} dyadic levels exceed the piece limit", opts.levels)));
            }
            generate_covering(&root, 0.0, opts.levels)?
        } else {
            let min_side = opts.min_side.unwrap_or_else(|| default_min_side(&root));
            generate_covering(&root, min_side, opts.max_depth)?
        };
        let mut cov = cov;
        cov.dyadic = part.dyadic;
        let diamonds = cov.diamonds(&part.motion).map_err(|_| Error::NonDiamondMotion { part: k })?;
        pieces.extend(diamonds.into_iter().zip(&cov.squares).map(|(d, s)| Piece {
            square: d,
            source: PieceSource::Triangle { part: k, word: s.word },
            depth: s.depth,
        }));
        residual += cov.residual_area * part.motion.scale * part.motion.scale;
        coverings.push(cov);
        if pieces.len() > MAX_PIECES {
            return Err(Error::Resource(format!("more than {MAX_PIECES} pieces")));
        }
    }
    if let Some(poly) = &dom.polygon_part {
        let tol = 1e-12 * dom.diameter().max(1.0);
        let rects = slab_rectangles(poly, tol)?;
        let min_side = opts.min_side.unwrap_or(1e-4 * dom.diameter());
        let mut squares = Vec::new();
        for (ri, r) in rects.iter().enumerate() {
            let start = squares.len();
            if let Some((wd, ht)) = euclid_tiling(*r, min_side, &mut squares) {
                residual += wd * ht;
                leftovers.push((wd, ht));
            }
            for &(u0, w0, s) in &squares[start..] {
                let square = uw_square(u0, w0, s);
                let depth = if dom.kind == DomainKind::StaircaseGood || dom.kind == DomainKind::StaircaseBad {
                    let c = square.center();
                    dom.cells.iter().find(|cell| polygon_contains(&cell.image, c, tol)).map_or(0, |cell| cell.n)
                } else {
                    0
                };
                pieces.push(Piece { square, source: PieceSource::Polygon { rect: ri }, depth });
            }
            if pieces.len() > MAX_PIECES {
                return Err(Error::Resource(format!("more than {MAX_PIECES} pieces")));
            }
        }
    }
    let boxes: Vec<Aabb> = pieces.iter().map(|p| Aabb::of_points(p.square.vertices())).collect();
    let index = GridIndex::from_boxes(&boxes, (2 * boxes.len()).max(64));
    Ok(SolutionField { domain: dom.clone(), pieces, coverings, residual_area: residual, leftovers, index, options: *opts })
}

/// One piece side on a line of slope `sigma`, parametrized by `x₁`.
struct SideEntry {
    key: f64,
    t0: f64,
    t1: f64,
    depth: u32,
}

/// The jump set: both diagonals of every piece, and the piece sides merged
/// along their supporting lines. Each side interval is classified by probing
/// the face gradients on both sides.
pub fn jump_segments(s: &SolutionField) -> Vec<JumpSegment> {
    let mut out = Vec::with_capacity(s.pieces.len() * 4);
    for p in &s.pieces {
        out.push(JumpSegment {
            seg: p.square.vertical_diagonal(),
            kind: JumpKind::PlusDiagonal,
            affects: Affects { x1: true, x2: false },
            depth: p.depth,
            on_boundary: false,
        });
        out.push(JumpSegment {
            seg: p.square.horizontal_diagonal(),
            kind: JumpKind::MinusDiagonal,
            affects: Affects { x1: false, x2: true },
            depth: p.depth,
            on_boundary: false,
        });
    }
    let tol = 1e-12 * s.domain.diameter().max(1.0);
    for sigma in [1i8, -1] {
        let mut entries: Vec<SideEntry> = Vec::new();
        for p in &s.pieces {
            for side in p.square.sides() {
                if side.diagonal_slope() != Some(sigma) {
                    continue;
                }
                let key = if sigma > 0 { side.a.x2 - side.a.x1 } else { side.a.x2 + side.a.x1 };
                let (t0, t1) = (side.a.x1.min(side.b.x1), side.a.x1.max(side.b.x1));
                entries.push(SideEntry { key, t0, t1, depth: p.depth });
            }
        }
        entries.sort_by(|a, b| a.key.total_cmp(&b.key).then(a.t0.total_cmp(&b.t0)));
        let mut lines: Vec<(f64, Vec<SideEntry>)> = Vec::new();
        for e in entries {
            match lines.last_mut() {
                Some((k, v)) if (e.key - v.last().map_or(*k, |l| l.key)).abs() <= tol => v.push(e),
                _ => lines.push((e.key, vec![e])),
            }
        }
        let per_line: Vec<Vec<JumpSegment>> =
            lines.into_par_iter().map(|(key, mut es)| line_segments(s, sigma, key, &mut es, tol)).collect();
        out.extend(per_line.into_iter().flatten());
    }
    out
}

fn line_segments(s: &SolutionField, sigma: i8, key: f64, es: &mut [SideEntry], tol: f64) -> Vec<JumpSegment> {
    es.sort_by(|a, b| a.t0.total_cmp(&b.t0));
    let mut cuts: Vec<f64> = es.iter().flat_map(|e| [e.t0, e.t1]).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() <= tol);
    let point = |t: f64| Point::new(t, if sigma > 0 { key + t } else { key - t });
    let normal = if sigma > 0 { Point::new(-1.0, 1.0) } else { Point::new(1.0, 1.0) };
    let mut out: Vec<JumpSegment> = Vec::new();
    let mut next = 0;
    let mut active: Vec<usize> = Vec::new();
    for w in cuts.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        if t1 - t0 <= tol {
            continue;
        }
        while next < es.len() && es[next].t0 <= t0 + tol {
            active.push(next);
            next += 1;
        }
        active.retain(|&i| es[i].t1 >= t1 - tol);
        if active.is_empty() {
            continue;
        }
        let depth = active.iter().map(|&i| es[i].depth).min().unwrap_or(0);
        let m = point(0.5 * (t0 + t1));
        let delta = 1e-3 * (t1 - t0);
        let (ga, gb) = (s.probe(m + normal * delta), s.probe(m - normal * delta));
        let (affects, on_boundary) = match (ga, gb) {
            (Some(a), Some(b)) if a == (0, 0) || b == (0, 0) => (Affects::BOTH, false),
            (Some(a), Some(b)) => (Affects { x1: a.0 != b.0, x2: a.1 != b.1 }, false),
            _ => (Affects::BOTH, true),
        };
        if let Some(last) = out.last_mut() {
            if (last.seg.b.x1 - t0).abs() <= tol && last.affects == affects && last.on_boundary == on_boundary && last.depth == depth {
                last.seg.b = point(t1);
                continue;
            }
        }
        out.push(JumpSegment {
            seg: Segment::new_unchecked(point(t0), point(t1)),
            kind: JumpKind::Side,
            affects,
            depth,
            on_boundary,
        });
    }
    out
}

/// One row per segment: endpoints, kind, affected partials, depth, boundary flag.
pub fn write_jump_csv(segments: &[JumpSegment], mut w: impl Write) -> std::io::Result<()> {
    writeln!(w, "x1_a,x2_a,x1_b,x2_b,kind,affects,depth,on_boundary")?;
    for j in segments {
        writeln!(
            w,
            "{:.9e},{:.9e},{:.9e},{:.9e},{},{},{},{}",
            j.seg.a.x1,
            j.seg.a.x2,
            j.seg.b.x1,
            j.seg.b.x2,
            j.kind.name(),
            j.affects.label(),
            j.depth,
            j.on_boundary
        )?;
    }
    Ok(())
}
