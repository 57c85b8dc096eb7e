//! Uniform bucket grids for point location among pieces and nearest-segment
//! queries against a boundary.

use crate::geometry::{d1_point_segment, Point, Segment};

/// Axis-aligned box `[x0, x1] × [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Aabb {
    pub fn empty() -> Self {
        Aabb { x0: f64::INFINITY, y0: f64::INFINITY, x1: f64::NEG_INFINITY, y1: f64::NEG_INFINITY }
    }

    pub fn of_points(points: impl IntoIterator<Item = Point>) -> Self {
        let mut b = Aabb::empty();
        for p in points {
            b.include(p);
        }
        b
    }

    pub fn include(&mut self, p: Point) {
        self.x0 = self.x0.min(p.x1);
        self.y0 = self.y0.min(p.x2);
        self.x1 = self.x1.max(p.x1);
        self.y1 = self.y1.max(p.x2);
    }

    pub fn union(mut self, o: &Aabb) -> Self {
        self.x0 = self.x0.min(o.x0);
        self.y0 = self.y0.min(o.y0);
        self.x1 = self.x1.max(o.x1);
        self.y1 = self.y1.max(o.y1);
        self
    }

    pub fn is_empty(&self) -> bool {
        !(self.x0 <= self.x1 && self.y0 <= self.y1)
    }

    pub fn width(&self) -> f64 {
        self.x1 - self.x0
    }

    pub fn height(&self) -> f64 {
        self.y1 - self.y0
    }

    pub fn diameter(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn contains(&self, p: Point, tol: f64) -> bool {
        p.x1 >= self.x0 - tol && p.x1 <= self.x1 + tol && p.x2 >= self.y0 - tol && p.x2 <= self.y1 + tol
    }
}

/// Bucket grid in compressed-row layout: `items[offsets[c]..offsets[c+1]]`
/// lists the ids stored in cell `c`.
#[derive(Clone, Debug)]
pub struct GridIndex {
    bounds: Aabb,
    cell: f64,
    nx: usize,
    ny: usize,
    offsets: Vec<u32>,
    items: Vec<u32>,
}

impl GridIndex {
    /// Grid over `bounds` with roughly `target_cells` square cells.
    fn layout(bounds: Aabb, target_cells: usize) -> (f64, usize, usize) {
        let w = bounds.width().max(f64::MIN_POSITIVE);
        let h = bounds.height().max(f64::MIN_POSITIVE);
        let target = target_cells.clamp(1, 1 << 24) as f64;
        let mut cell = (w * h / target).sqrt();
        if !(cell > 0.0) || !cell.is_finite() {
            cell = w.max(h).max(1e-300);
        }
        let nx = ((w / cell).ceil() as usize).clamp(1, 1 << 13);
        let ny = ((h / cell).ceil() as usize).clamp(1, 1 << 13);
        let cell = (w / nx as f64).max(h / ny as f64);
        (cell, nx, ny)
    }

    /// Builds the grid from an iterator of `(id, cell list)` pairs produced by
    /// `cells_of`, which receives the grid geometry.
    fn build(bounds: Aabb, target_cells: usize, count: usize, cells_of: impl Fn(usize, &GridGeom, &mut Vec<usize>)) -> Self {
        let (cell, nx, ny) = Self::layout(bounds, target_cells);
        let geom = GridGeom { x0: bounds.x0, y0: bounds.y0, cell, nx, ny };
        let mut pairs: Vec<(u32, u32)> = Vec::new();
        let mut buf = Vec::new();
        for id in 0..count {
            buf.clear();
            cells_of(id, &geom, &mut buf);
            pairs.extend(buf.iter().map(|&c| (c as u32, id as u32)));
        }
        let mut offsets = vec![0u32; nx * ny + 1];
        for &(c, _) in &pairs {
            offsets[c as usize + 1] += 1;
        }
        for i in 0..nx * ny {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets.clone();
        let mut items = vec![0u32; pairs.len()];
        for &(c, id) in &pairs {
            items[fill[c as usize] as usize] = id;
            fill[c as usize] += 1;
        }
        GridIndex { bounds, cell, nx, ny, offsets, items }
    }

    /// Index of items given by bounding boxes.
    pub fn from_boxes(boxes: &[Aabb], target_cells: usize) -> Self {
        let bounds = boxes.iter().fold(Aabb::empty(), |b, o| b.union(o));
        let bounds = if bounds.is_empty() { Aabb { x0: 0.0, y0: 0.0, x1: 1.0, y1: 1.0 } } else { bounds };
        Self::build(bounds, target_cells, boxes.len(), |id, g, out| {
            let b = &boxes[id];
            let (i0, j0) = g.cell_of(b.x0, b.y0);
            let (i1, j1) = g.cell_of(b.x1, b.y1);
            for j in j0..=j1 {
                for i in i0..=i1 {
                    out.push(j * g.nx + i);
                }
            }
        })
    }

    /// Index of segments; each segment is stored in the cells it crosses.
    pub fn from_segments(segments: &[Segment], target_cells: usize) -> Self {
        let bounds = Aabb::of_points(segments.iter().flat_map(|s| [s.a, s.b]));
        let bounds = if bounds.is_empty() { Aabb { x0: 0.0, y0: 0.0, x1: 1.0, y1: 1.0 } } else { bounds };
        Self::build(bounds, target_cells, segments.len(), |id, g, out| {
            let s = &segments[id];
            let (lo, hi) = if s.a.x1 <= s.b.x1 { (s.a, s.b) } else { (s.b, s.a) };
            let (i0, _) = g.cell_of(lo.x1, lo.x2);
            let (i1, _) = g.cell_of(hi.x1, hi.x2);
            let pad = g.cell * 1e-9;
            for i in i0..=i1 {
                let cx0 = (g.x0 + i as f64 * g.cell).max(lo.x1);
                let cx1 = (g.x0 + (i + 1) as f64 * g.cell).min(hi.x1);
                let y_at = |x: f64| {
                    if hi.x1 == lo.x1 {
                        None
                    } else {
                        Some(lo.x2 + (x - lo.x1) / (hi.x1 - lo.x1) * (hi.x2 - lo.x2))
                    }
                };
                let (ya, yb) = match (y_at(cx0), y_at(cx1)) {
                    (Some(a), Some(b)) => (a, b),
                    _ => (lo.x2, hi.x2),
                };
                let (_, j0) = g.cell_of(0.0, ya.min(yb) - pad);
                let (_, j1) = g.cell_of(0.0, ya.max(yb) + pad);
                for j in j0..=j1 {
                    out.push(j * g.nx + i);
                }
            }
        })
    }

    #[inline]
    fn geom(&self) -> GridGeom {
        GridGeom { x0: self.bounds.x0, y0: self.bounds.y0, cell: self.cell, nx: self.nx, ny: self.ny }
    }

    #[inline]
    fn bucket(&self, i: usize, j: usize) -> &[u32] {
        let c = j * self.nx + i;
        &self.items[self.offsets[c] as usize..self.offsets[c + 1] as usize]
    }

    /// Candidate ids near `p` (empty when `p` is outside the indexed bounds).
    pub fn candidates(&self, p: Point) -> &[u32] {
        let tol = self.cell * 1e-9;
        if !self.bounds.contains(p, tol) {
            return &[];
        }
        let (i, j) = self.geom().cell_of(p.x1, p.x2);
        self.bucket(i, j)
    }

    /// Distinct ids stored in cells meeting `b`.
    pub fn query_box(&self, b: &Aabb) -> Vec<u32> {
        let g = self.geom();
        let (i0, j0) = g.cell_of(b.x0, b.y0);
        let (i1, j1) = g.cell_of(b.x1, b.y1);
        let mut out = Vec::new();
        for j in j0..=j1 {
            for i in i0..=i1 {
                out.extend_from_slice(self.bucket(i, j));
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Minimum of `dist(id)` over indexed ids, where `dist` dominates the l∞
    /// distance from `p` to the item. Cells are searched in rings of growing
    /// radius until no unvisited cell can hold a closer item.
    pub fn nearest(&self, p: Point, mut dist: impl FnMut(u32) -> f64) -> f64 {
        let g = self.geom();
        let (ci, cj) = g.cell_of(p.x1, p.x2);
        let mut best = f64::INFINITY;
        let max_r = self.nx.max(self.ny);
        for r in 0..=max_r {
            let (ri, rj) = (r as isize, r as isize);
            let (i0, i1) = (ci as isize - ri, ci as isize + ri);
            let (j0, j1) = (cj as isize - rj, cj as isize + rj);
            for j in j0..=j1 {
                if j < 0 || j >= self.ny as isize {
                    continue;
                }
                let on_edge_row = j == j0 || j == j1;
                let mut i = i0;
                while i <= i1 {
                    if i >= 0 && i < self.nx as isize {
                        for &id in self.bucket(i as usize, j as usize) {
                            best = best.min(dist(id));
                        }
                    }
                    i = if on_edge_row || i == i1 { i + 1 } else { i1 };
                }
            }
            let bx0 = self.bounds.x0 + i0 as f64 * self.cell;
            let bx1 = self.bounds.x0 + (i1 + 1) as f64 * self.cell;
            let by0 = self.bounds.y0 + j0 as f64 * self.cell;
            let by1 = self.bounds.y0 + (j1 + 1) as f64 * self.cell;
            let gap = (p.x1 - bx0).min(bx1 - p.x1).min(p.x2 - by0).min(by1 - p.x2).max(0.0);
            let covers_all = i0 <= 0 && j0 <= 0 && i1 >= self.nx as isize - 1 && j1 >= self.ny as isize - 1;
            if best <= gap || covers_all {
                break;
            }
        }
        best
    }
}

#[derive(Clone, Copy, Debug)]
struct GridGeom {
    x0: f64,
    y0: f64,
    cell: f64,
    nx: usize,
    ny: usize,
}

impl GridGeom {
    #[inline]
    fn cell_of(&self, x: f64, y: f64) -> (usize, usize) {
        let clamp = |v: f64, n: usize| {
            if v.is_nan() || v < 0.0 {
                0
            } else {
                (v as usize).min(n - 1)
            }
        };
        (clamp((x - self.x0) / self.cell, self.nx), clamp((y - self.y0) / self.cell, self.ny))
    }
}

/// Nearest-boundary queries in the l¹ metric.
#[derive(Clone, Debug)]
pub struct SegmentIndex {
    segments: Vec<Segment>,
    grid: GridIndex,
}

impl SegmentIndex {
    pub fn new(segments: Vec<Segment>) -> Self {
        let grid = GridIndex::from_segments(&segments, (segments.len() * 2).max(16));
        SegmentIndex { segments, grid }
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    /// `min_s d₁(p, s)` over the indexed segments.
    pub fn nearest_d1(&self, p: Point) -> f64 {
        if self.segments.is_empty() {
            return f64::INFINITY;
        }
        self.grid.nearest(p, |id| d1_point_segment(p, &self.segments[id as usize]))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn nearest_matches_linear_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let segs: Vec<Segment> = (0..300)
            .map(|_| {
                let a = Point::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
                let b = a + Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                Segment::new(a, b).unwrap()
            })
            .collect();
        let idx = SegmentIndex::new(segs.clone());
        for _ in 0..2000 {
            let p = Point::new(rng.gen_range(-8.0..8.0), rng.gen_range(-8.0..8.0));
            let scan = segs.iter().map(|s| d1_point_segment(p, s)).fold(f64::INFINITY, f64::min);
            assert_eq!(idx.nearest_d1(p), scan);
        }
    }

    #[test]
    fn box_candidates_cover_members() {
        let boxes: Vec<Aabb> =
            (0..10).map(|i| Aabb { x0: i as f64, y0: 0.0, x1: i as f64 + 1.0, y1: 1.0 }).collect();
        let g = GridIndex::from_boxes(&boxes, 40);
        for i in 0..10 {
            let p = Point::new(i as f64 + 0.5, 0.5);
            assert!(g.candidates(p).contains(&(i as u32)));
        }
        assert!(g.candidates(Point::new(20.0, 0.5)).is_empty());
    }
}
