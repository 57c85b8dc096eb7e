//! The weighted jump functional `F(v) = Σᵢ ∫_Ω H(d₁(x, ∂Ω)) d|D v_{xᵢ}|`
//! evaluated over the exact jump segments of a [`SolutionField`].
//!
//! Each partial jumps by [`AMPLITUDE`] across its jump set, so a segment
//! contributes `2·∫_seg H(d₁(x, ∂Ω)) dℋ¹` once per affected partial.
//! Segments on `∂Ω` contribute nothing.

use std::collections::BTreeMap;
use std::f64::consts::{LN_2, SQRT_2};
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::covering::classify_layer;
use crate::domain::CompatibleDomain;
use crate::geometry::Segment;
use crate::quadrature::adaptive;
use crate::series::{classify_increments, Trend};
use crate::solution::{jump_segments, JumpKind, JumpSegment, SolutionField, AMPLITUDE};
use crate::weights::{admissibility_check, Verdict, Weight};
use crate::Result;

/// Deepest layer with its own bucket; deeper layers share bucket `LAYER_CAP + 1`.
pub const LAYER_CAP: u32 = 64;
/// Quadrature error target relative to `length · max H` per segment.
pub const QUAD_REL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PerPartial {
    pub x1: f64,
    pub x2: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PerKind {
    pub side: f64,
    pub plus_diagonal: f64,
    pub minus_diagonal: f64,
    /// `plus_diagonal + minus_diagonal`.
    pub diagonals: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalReport {
    pub weight: Weight,
    pub total: f64,
    pub per_partial: PerPartial,
    /// Contribution of the segments carried by pieces of each depth.
    pub per_depth: BTreeMap<u32, f64>,
    /// Contribution of each layer `1/(n+1) < d₁ ≤ 1/n` (layer 0: `d₁ > 1`).
    pub per_layer: BTreeMap<u32, f64>,
    pub per_kind: PerKind,
    /// Upper bound on the part cut off by the truncation; `None` when no
    /// finite bound is available.
    pub tail_bound: Option<f64>,
    pub quadrature_error_estimate: f64,
    pub segments: usize,
    pub boundary_segments: usize,
}

impl FunctionalReport {
    /// Per-depth contributions as a dense vector indexed by depth.
    pub fn depth_series(&self) -> Vec<f64> {
        let n = self.per_depth.keys().max().map_or(0, |&d| d as usize + 1);
        let mut v = vec![0.0; n];
        for (&d, &c) in &self.per_depth {
            v[d as usize] = c;
        }
        v
    }

    pub fn write_depth_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "depth,contribution")?;
        for (d, c) in &self.per_depth {
            writeln!(w, "{d},{c:.9e}")?;
        }
        Ok(())
    }

    pub fn write_layer_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "layer,contribution")?;
        for (n, c) in &self.per_layer {
            writeln!(w, "{n},{c:.9e}")?;
        }
        Ok(())
    }
}

/// `∫_seg H(d₁(x, ∂Ω)) dℋ¹` split by layer.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SegmentIntegral {
    pub value: f64,
    pub error: f64,
    pub layers: Vec<(u32, f64)>,
}

fn layer_of(d: f64) -> u32 {
    if d > 1.0 {
        0
    } else {
        classify_layer(d).map_or(LAYER_CAP + 1, |n| n.min(LAYER_CAP + 1))
    }
}

/// Splits `[0, len]` into intervals on which `d` is affine, testing three
/// interior points against the chord.
fn affine_pieces(d: &impl Fn(f64) -> f64, len: f64, tol: f64) -> Vec<(f64, f64, f64, f64)> {
    fn rec(d: &impl Fn(f64) -> f64, t0: f64, t1: f64, d0: f64, d1: f64, tol: f64, min_len: f64, depth: u32, out: &mut Vec<(f64, f64, f64, f64)>) {
        let tm = 0.5 * (t0 + t1);
        let dm = d(tm);
        let lin = |t: f64| d0 + (d1 - d0) * (t - t0) / (t1 - t0);
        let straight = (dm - lin(tm)).abs() <= tol && {
            let (q1, q3) = (0.5 * (t0 + tm), 0.5 * (tm + t1));
            (d(q1) - lin(q1)).abs() <= tol && (d(q3) - lin(q3)).abs() <= tol
        };
        if straight || depth >= 48 || t1 - t0 <= min_len {
            out.push((t0, t1, d0, d1));
            return;
        }
        rec(d, t0, tm, d0, dm, tol, min_len, depth + 1, out);
        rec(d, tm, t1, dm, d1, tol, min_len, depth + 1, out);
    }
    let mut out = Vec::new();
    rec(d, 0.0, len, d(0.0), d(len), tol, 1e-12 * len, 0, &mut out);
    out
}

/// `∫_seg H(d₁(x, ∂Ω)) dℋ¹(x)`, split at every layer boundary crossing.
pub fn segment_integral(dom: &CompatibleDomain, w: &Weight, seg: &Segment) -> SegmentIntegral {
    let len = seg.length();
    let mut out = SegmentIntegral::default();
    if !(len > 0.0) || w.is_zero() {
        return out;
    }
    let at = |t: f64| seg.at(t / len);
    let dist = |t: f64| dom.d1_to_boundary_unchecked(at(t));
    let tol = 1e-12 * dom.diameter().max(len);
    let mut layers: BTreeMap<u32, f64> = BTreeMap::new();
    for (t0, t1, d0, d1) in affine_pieces(&dist, len, tol) {
        let mut cuts = vec![t0, t1];
        if d0 != d1 {
            let (lo, hi) = (d0.min(d1), d0.max(d1));
            for k in 1..=LAYER_CAP + 1 {
                let c = 1.0 / k as f64;
                if c > lo && c < hi {
                    cuts.push(t0 + (c - d0) / (d1 - d0) * (t1 - t0));
                }
            }
            cuts.sort_by(f64::total_cmp);
        }
        let slope = (d1 - d0) / (t1 - t0);
        for win in cuts.windows(2) {
            let (a, b) = (win[0], win[1]);
            if b <= a {
                continue;
            }
            let da = d0 + slope * (a - t0);
            let db = d0 + slope * (b - t0);
            let layer = layer_of(0.5 * (da + db));
            let (v, e) = if da == db {
                (w.eval(da.max(0.0)) * (b - a), 0.0)
            } else {
                let h_max = w.eval(da.max(db).max(0.0));
                let q = adaptive(|t| w.eval((d0 + slope * (t - t0)).max(0.0)), a, b, QUAD_REL_TOL * (b - a) * h_max);
                (q.value, q.error)
            };
            out.value += v;
            out.error += e;
            *layers.entry(layer).or_insert(0.0) += v;
        }
    }
    out.layers = layers.into_iter().collect();
    out
}

/// `F(v)` with breakdowns and the tail bound.
pub fn evaluate_functional(s: &SolutionField, w: &Weight) -> Result<FunctionalReport> {
    w.validate()?;
    let segs = jump_segments(s);
    Ok(evaluate_segments(s, &segs, w))
}

/// `F_old(v)`: the same with `H ≡ 1`.
pub fn evaluate_unweighted(s: &SolutionField) -> Result<FunctionalReport> {
    evaluate_functional(s, &Weight::constant(1.0))
}

/// [`evaluate_functional`] over an already extracted jump set.
pub fn evaluate_segments(s: &SolutionField, segs: &[JumpSegment], w: &Weight) -> FunctionalReport {
    let dom = s.domain();
    let integrals: Vec<Option<SegmentIntegral>> = segs
        .par_iter()
        .map(|j| (!j.on_boundary && j.affects.count() > 0).then(|| segment_integral(dom, w, &j.seg)))
        .collect();
    let mut rep = FunctionalReport {
        weight: w.clone(),
        total: 0.0,
        per_partial: PerPartial::default(),
        per_depth: BTreeMap::new(),
        per_layer: BTreeMap::new(),
        per_kind: PerKind::default(),
        tail_bound: None,
        quadrature_error_estimate: 0.0,
        segments: segs.len(),
        boundary_segments: segs.iter().filter(|j| j.on_boundary).count(),
    };
    for (j, int) in segs.iter().zip(integrals) {
        let Some(int) = int else { continue };
        let mult = AMPLITUDE * j.affects.count() as f64;
        let c = mult * int.value;
        rep.total += c;
        rep.quadrature_error_estimate += mult * int.error;
        if j.affects.x1 {
            rep.per_partial.x1 += AMPLITUDE * int.value;
        }
        if j.affects.x2 {
            rep.per_partial.x2 += AMPLITUDE * int.value;
        }
        *rep.per_depth.entry(j.depth).or_insert(0.0) += c;
        for (n, v) in int.layers {
            *rep.per_layer.entry(n).or_insert(0.0) += mult * v;
        }
        match j.kind {
            JumpKind::Side => rep.per_kind.side += c,
            JumpKind::PlusDiagonal => rep.per_kind.plus_diagonal += c,
            JumpKind::MinusDiagonal => rep.per_kind.minus_diagonal += c,
        }
    }
    rep.per_kind.diagonals = rep.per_kind.plus_diagonal + rep.per_kind.minus_diagonal;
    let tail = tail_bound(s, w);
    rep.tail_bound = tail.is_finite().then_some(tail);
    rep
}

/// `∫₀^c H(t)/t dt`, closed form where available; `+∞` when divergent or
/// undecidable.
pub fn h_over_t_integral(w: &Weight, c: f64) -> f64 {
    if !(c > 0.0) || w.is_zero() {
        return 0.0;
    }
    match *w {
        Weight::Power { alpha } if alpha > 0.0 => c.powf(alpha) / alpha,
        Weight::LogPower { beta } if beta > 1.0 => {
            if c <= 1.0 {
                (1.0 - c.ln()).powf(1.0 - beta) / (beta - 1.0)
            } else {
                1.0 / (beta - 1.0) + c.ln()
            }
        }
        Weight::Table { .. } => {
            if w.eval(0.0) > 0.0 {
                return f64::INFINITY;
            }
            let top = c.ln();
            let blocks: Vec<f64> = (0..200)
                .map(|k| {
                    let hi = top - k as f64 * LN_2;
                    adaptive(|s| w.eval_log(s), hi - LN_2, hi, 1e-14).value
                })
                .collect();
            let rep = classify_increments(&blocks);
            if rep.trend == Trend::Converges {
                rep.limit_estimate
            } else {
                f64::INFINITY
            }
        }
        _ => f64::INFINITY,
    }
}

/// Upper bound on the contribution of everything the truncation left out.
///
/// * Dyadic parts of half-width `w` cut after level `m`: level `n` adds at
///   most `(4+8√2)·w·H(w·2^{-n})`, summed against `∫ H(t)/t dt`.
/// * Generic parts with `|h'+1| ≤ ε < 1`: each unexpanded sub-triangle of
///   width `W` and height `H'` has depth-`j` squares of side at most
///   `L(2−ε)^{-j}`, `L = min(W, H')/(2−ε)`, whose total width per depth is
///   at most `W`.
/// * Untiled polygon rectangles `W × H'`: the greedy tiling has total side
///   at most `W + H'`.
///
/// Returns `+∞` for inadmissible weights and for generic parts with `ε ≥ 1`.
pub fn tail_bound(s: &SolutionField, w: &Weight) -> f64 {
    if w.is_zero() {
        return 0.0;
    }
    if admissibility_check(w).verdict != Verdict::Admissible {
        return f64::INFINITY;
    }
    let dom = s.domain();
    let mut total = 0.0;
    for (part, cov) in dom.triangle_parts.iter().zip(s.coverings()) {
        let sc = part.motion.scale;
        if cov.dyadic {
            let half = cov.root.width() * sc / SQRT_2;
            let cut = half * 0.5f64.powi(cov.max_depth as i32);
            total += (4.0 + 8.0 * SQRT_2) * half * h_over_t_integral(w, cut) / LN_2;
        } else if !cov.leaves.is_empty() {
            let eps = part.tri.h.slope_deviation();
            if eps >= 1.0 {
                return f64::INFINITY;
            }
            let q = 2.0 - eps;
            let width: f64 = cov.leaves.iter().map(|l| l.0).sum();
            let l_max = cov.leaves.iter().map(|l| l.0.min(l.1) / q).fold(0.0, f64::max);
            let c = SQRT_2 * sc * l_max;
            total += (16.0 + 4.0 * SQRT_2) * sc * width * (w.eval(c) + h_over_t_integral(w, c) / q.ln());
        }
    }
    let rects: f64 = s.polygon_leftovers().iter().map(|r| r.0 + r.1).sum();
    if rects > 0.0 {
        total += (4.0 + 8.0 * SQRT_2) * rects * w.eval(SQRT_2 * dom.diameter());
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{build_polygon, build_staircase_good, build_triangle_domain_rotated, build_unit_square, default_good_heights, BoundaryFunction};
    use crate::geometry::{Point, RigidMotion};
    use crate::solution::{build_solution, BuildOptions};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn diamond() -> SolutionField {
        let dom = build_polygon(vec![Point::new(0.0, 1.0), Point::new(-0.5, 0.5), Point::new(0.0, 0.0), Point::new(0.5, 0.5)]).unwrap();
        build_solution(&dom, &BuildOptions::default()).unwrap()
    }

    #[test]
    fn zero_weight_gives_zero() {
        let r = evaluate_functional(&diamond(), &Weight::constant(0.0)).unwrap();
        assert_eq!(r.total, 0.0);
        assert_eq!(r.tail_bound, Some(0.0));
    }

    #[test]
    fn single_diamond_only_diagonals_count() {
        let r = evaluate_unweighted(&diamond()).unwrap();
        assert_relative_eq!(r.total, 4.0, epsilon = 1e-12);
        assert_eq!(r.per_kind.side, 0.0);
        assert_relative_eq!(r.per_partial.x1, 2.0, epsilon = 1e-12);
        assert_eq!(r.boundary_segments, 4);
    }

    #[test]
    fn quadrature_matches_trapezoid() {
        let dom = build_unit_square(1.0).unwrap();
        let w = Weight::power(0.5);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let a = Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let b = Point::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            let seg = Segment::new(a, b).unwrap();
            let q = segment_integral(&dom, &w, &seg);
            // oracle: trapezoid rule on the closed-form distance
            let n = 100_000;
            let f = |t: f64| {
                let p = seg.at(t);
                (1.0 - p.x1.abs()).min(1.0 - p.x2.abs()).sqrt()
            };
            let mut acc = 0.5 * (f(0.0) + f(1.0));
            for i in 1..n {
                acc += f(i as f64 / n as f64);
            }
            let trap = acc / n as f64 * seg.length();
            assert!((q.value - trap).abs() <= 1e-6 * trap, "{} vs {trap}", q.value);
            let layered: f64 = q.layers.iter().map(|l| l.1).sum();
            assert_relative_eq!(layered, q.value, max_relative = 1e-12);
        }
    }

    #[test]
    fn totals_grow_with_depth_and_tails_shrink() {
        let dom = build_unit_square(1.0).unwrap();
        let w = Weight::power(1.0);
        let mut prev = 0.0;
        let mut prev_tail = f64::INFINITY;
        for m in 1..7 {
            let r = evaluate_functional(&build_solution(&dom, &BuildOptions::levels(m)).unwrap(), &w).unwrap();
            assert!(r.total >= prev);
            let tail = r.tail_bound.unwrap();
            assert!(tail < prev_tail);
            prev = r.total;
            prev_tail = tail;
            let depth_sum: f64 = r.per_depth.values().sum();
            let layer_sum: f64 = r.per_layer.values().sum();
            let kind_sum = r.per_kind.side + r.per_kind.diagonals;
            assert_relative_eq!(r.total, r.per_partial.x1 + r.per_partial.x2, max_relative = 1e-12);
            for s in [depth_sum, layer_sum, kind_sum] {
                assert!((s - r.total).abs() <= 1e-12 * r.total + r.quadrature_error_estimate);
            }
        }
    }

    #[test]
    fn constant_weight_has_no_tail() {
        let dom = build_unit_square(1.0).unwrap();
        let v = build_solution(&dom, &BuildOptions::levels(3)).unwrap();
        assert!(tail_bound(&v, &Weight::constant(1.0)).is_infinite());
        assert!(evaluate_unweighted(&v).unwrap().tail_bound.is_none());
    }

    #[test]
    fn staircase_total_is_bounded() {
        for depth in [3, 5, 7] {
            let dom = build_staircase_good(depth, &default_good_heights(depth)).unwrap();
            let r = evaluate_unweighted(&build_solution(&dom, &BuildOptions::default()).unwrap()).unwrap();
            assert!(r.total < 16.0);
            for (&n, &c) in &r.per_depth {
                assert!(c <= 2.0 * 8.0 * 0.5f64.powi(n as i32) + 1e-12, "cell {n}: {c}");
            }
        }
    }

    #[test]
    fn generic_triangle_tail_is_finite() {
        let h = BoundaryFunction::quadratic(0.0, 1.0, 1.0, -0.95, -0.05).unwrap();
        let dom = build_triangle_domain_rotated(h, RigidMotion::rotation(1)).unwrap();
        let opts = BuildOptions { levels: 6, max_depth: 6, min_side: Some(0.0) };
        let coarse = tail_bound(&build_solution(&dom, &opts).unwrap(), &Weight::power(1.0));
        let opts = BuildOptions { max_depth: 9, ..opts };
        let fine = tail_bound(&build_solution(&dom, &opts).unwrap(), &Weight::power(1.0));
        assert!(fine.is_finite() && fine < coarse);
    }

    #[test]
    fn h_over_t_closed_forms() {
        assert_relative_eq!(h_over_t_integral(&Weight::power(0.5), 0.25), 1.0, epsilon = 1e-15);
        assert_relative_eq!(h_over_t_integral(&Weight::log_power(2.0), 1.0), 1.0, epsilon = 1e-15);
        let table = Weight::table(vec![(0.0, 0.0), (1.0, 1.0)]).unwrap();
        assert_relative_eq!(h_over_t_integral(&table, 0.5), 0.5, epsilon = 1e-9);
        assert!(h_over_t_integral(&Weight::constant(1.0), 0.5).is_infinite());
    }
}
