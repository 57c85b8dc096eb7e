//! Verification and counterexample machinery: grid eikonal residuals, the
//! slicing inequality, the comparison bound `v ≤ d₁(·, ∂Ω)`, the step counts
//! and per-cell jump lower bound of the bad staircase, and the `t > 1`
//! Hausdorff premeasure demonstration.

use dashu_float::round::mode::HalfEven;
use dashu_float::FBig;
use dashu_int::UBig;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::BadStaircase;
use crate::geometry::{Point, Segment};
use crate::solution::{JumpSegment, SolutionField};
use crate::{Error, Result};

/// Residual tolerance of the grid eikonal check.
pub const EIKONAL_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridCheckReport {
    pub grid_size: (usize, usize),
    pub exclusion_radius: f64,
    pub eligible_points: usize,
    pub pass_points: usize,
    /// `max ||∂v/∂xᵢ| − 1|` over eligible nodes (0 when none).
    pub max_residual: f64,
    /// Nodes inside the domain but near the jump set or on the residual.
    pub excluded: usize,
    /// No node was eligible.
    pub flagged: bool,
}

impl GridCheckReport {
    pub fn pass_rate(&self) -> f64 {
        if self.eligible_points == 0 {
            0.0
        } else {
            self.pass_points as f64 / self.eligible_points as f64
        }
    }
}

/// Central differences of `v` with step `exclusion_radius/4` at the cell
/// centers of a `grid × grid` lattice over the bounding box. A node is
/// eligible when it lies in a piece at l∞ distance more than
/// `exclusion_radius` from that piece's sides and diagonals; other pieces'
/// jump segments are farther away since piece interiors are disjoint.
pub fn eikonal_grid_check(s: &SolutionField, grid: usize, exclusion_radius: f64) -> Result<GridCheckReport> {
    if grid < 16 {
        return Err(Error::param("grid", "must be >= 16"));
    }
    if !(exclusion_radius > 0.0) {
        return Err(Error::param("exclusion_radius", "must be positive"));
    }
    let b = s.domain().bounds();
    let (dx, dy) = (b.width() / grid as f64, b.height() / grid as f64);
    let h = exclusion_radius / 4.0;
    let rows: Vec<(usize, usize, usize, f64)> = (0..grid)
        .into_par_iter()
        .map(|j| {
            let y = b.y0 + (j as f64 + 0.5) * dy;
            let (mut eligible, mut pass, mut excluded, mut worst) = (0, 0, 0, 0.0f64);
            for i in 0..grid {
                let p = Point::new(b.x0 + (i as f64 + 0.5) * dx, y);
                if !s.domain().contains(p) {
                    continue;
                }
                let ok = s.piece_interior_at(p).is_some_and(|k| s.pieces()[k].square.dinf_to_skeleton(p) > exclusion_radius);
                if !ok {
                    excluded += 1;
                    continue;
                }
                let v = |q: Point| s.eval_unchecked(q);
                let gx = (v(p + Point::new(h, 0.0)) - v(p - Point::new(h, 0.0))) / (2.0 * h);
                let gy = (v(p + Point::new(0.0, h)) - v(p - Point::new(0.0, h))) / (2.0 * h);
                let r = (gx.abs() - 1.0).abs().max((gy.abs() - 1.0).abs());
                eligible += 1;
                if r < EIKONAL_TOL {
                    pass += 1;
                }
                worst = worst.max(r);
            }
            (eligible, pass, excluded, worst)
        })
        .collect();
    let eligible_points = rows.iter().map(|r| r.0).sum();
    Ok(GridCheckReport {
        grid_size: (grid, grid),
        exclusion_radius,
        eligible_points,
        pass_points: rows.iter().map(|r| r.1).sum(),
        max_residual: rows.iter().map(|r| r.3).fold(0.0, f64::max),
        excluded: rows.iter().map(|r| r.2).sum(),
        flagged: eligible_points == 0,
    })
}

/// Direction of the slicing lines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SliceDirection {
    /// Lines `x₂ = c`.
    Horizontal,
    /// Lines `x₁ = c`.
    Vertical,
}

/// `∫ ℋ⁰(E ∩ {line at c}) dc` by the midpoint rule on `n_lines` lines over
/// the extent of `E`. A segment crosses the lines in its half-open range;
/// segments parallel to the lines count 0.
pub fn slicing_count(segments: &[JumpSegment], direction: SliceDirection, n_lines: usize) -> Result<f64> {
    if n_lines < 2 {
        return Err(Error::param("n_lines", "must be >= 2"));
    }
    let span = |s: &Segment| match direction {
        SliceDirection::Horizontal => (s.a.x2.min(s.b.x2), s.a.x2.max(s.b.x2)),
        SliceDirection::Vertical => (s.a.x1.min(s.b.x1), s.a.x1.max(s.b.x1)),
    };
    let (lo, hi) = segments
        .iter()
        .map(|j| span(&j.seg))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |acc, r| (acc.0.min(r.0), acc.1.max(r.1)));
    if segments.is_empty() || !(hi > lo) {
        return Ok(0.0);
    }
    let step = (hi - lo) / n_lines as f64;
    // line k sits at lo + (k + 1/2)·step; a range [a, b) holds lines ⌈(a−lo)/step − 1/2⌉ .. ⌈(b−lo)/step − 1/2⌉
    let mut diff = vec![0i64; n_lines + 1];
    for j in segments {
        let (a, b) = span(&j.seg);
        if b <= a {
            continue;
        }
        let first = (((a - lo) / step - 0.5).ceil().max(0.0) as usize).min(n_lines);
        let end = (((b - lo) / step - 0.5).ceil().max(0.0) as usize).min(n_lines);
        if end > first {
            diff[first] += 1;
            diff[end] -= 1;
        }
    }
    let mut count = 0i64;
    let mut total = 0i64;
    for d in &diff[..n_lines] {
        count += d;
        total += count;
    }
    Ok(total as f64 * step)
}

/// Slicing integral against total length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlicingReport {
    pub direction: SliceDirection,
    pub n_lines: usize,
    pub integral: f64,
    pub total_length: f64,
    /// `integral ≤ total_length·(1 + 10⁻³)`.
    pub holds: bool,
}

pub fn slicing_check(segments: &[JumpSegment], direction: SliceDirection, n_lines: usize) -> Result<SlicingReport> {
    let integral = slicing_count(segments, direction, n_lines)?;
    let total_length: f64 = segments.iter().map(|j| j.seg.length()).sum();
    Ok(SlicingReport { direction, n_lines, integral, total_length, holds: integral <= total_length * (1.0 + 1e-3) })
}

/// Random-point check of `0 ≤ v ≤ d₁(·, ∂Ω)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub samples: usize,
    pub violations: usize,
    /// Largest `v / d₁` seen.
    pub max_ratio: f64,
    /// Largest `v − d₁` seen (negative when every sample is strict).
    pub max_excess: f64,
}

/// Draws `samples` points uniformly from the domain (rejection from the
/// bounding box) with a ChaCha generator seeded by `seed`.
pub fn comparison_bound_check(s: &SolutionField, samples: usize, seed: u64) -> ComparisonReport {
    let dom = s.domain();
    let b = dom.bounds();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(samples);
    let mut attempts = 0usize;
    while points.len() < samples && attempts < samples.saturating_mul(1000).max(1000) {
        attempts += 1;
        let p = Point::new(rng.gen_range(b.x0..=b.x1), rng.gen_range(b.y0..=b.y1));
        if dom.contains(p) {
            points.push(p);
        }
    }
    let per: Vec<(bool, f64, f64)> = points
        .par_iter()
        .map(|&p| {
            let v = s.eval_unchecked(p);
            let d = dom.d1_to_boundary_unchecked(p);
            let ratio = if d > 0.0 { v / d } else if v > 0.0 { f64::INFINITY } else { 0.0 };
            (!(v >= 0.0 && v <= d), ratio, v - d)
        })
        .collect();
    ComparisonReport {
        samples: points.len(),
        violations: per.iter().filter(|r| r.0).count(),
        max_ratio: per.iter().map(|r| r.1).fold(0.0, f64::max),
        max_excess: per.iter().map(|r| r.2).fold(f64::NEG_INFINITY, f64::max),
    }
}

type Big = FBig<HalfEven, 2>;

/// Working precision (bits) of the step-count computation.
const BITS: usize = 400;
/// Largest tread index whose step count is computed.
pub const BAD_N_MAX: u32 = 6;

fn big(x: u64) -> Big {
    Big::from(x).with_precision(BITS).value()
}

fn sqrt2() -> Big {
    big(2).sqrt()
}

/// The per-cell lower bound `(√2/(3·2^{n+1}))·ln((√2/12)·N + 1) − √2/(3·2^{n+2})`
/// evaluated at high precision.
fn bad_bound_big(n: u32, steps: &UBig) -> Big {
    let s2 = sqrt2();
    let p2 = big(1u64 << (n + 1));
    let coef = &s2 / (big(3) * &p2);
    let arg = &s2 / big(12) * Big::from(steps.clone()).with_precision(BITS).value() + big(1);
    &coef * arg.ln() - &coef / big(2)
}

/// The lower bound for tread `n` with `steps` steps, rounded to `f64`.
pub fn bad_bound_value(n: u32, steps: &UBig) -> f64 {
    bad_bound_big(n, steps).to_f64().value()
}

/// Whether the lower bound for tread `n` reaches 1 (decided at high precision).
pub fn bad_bound_holds(n: u32, steps: &UBig) -> bool {
    bad_bound_big(n, steps) >= big(1)
}

/// Smallest `N` whose tread-`n` lower bound is at least 1:
/// `N = ⌈(12/√2)·(exp(3·2^{n+1}/√2 + 1/2) − 1)⌉`.
pub fn choose_bad_n(n: u32) -> Result<UBig> {
    if n == 0 {
        return Err(Error::param("n", "tread index starts at 1"));
    }
    if n > BAD_N_MAX {
        return Err(Error::Resource(format!(
            "step count for tread {n} exceeds the supported range (n <= {BAD_N_MAX})"
        )));
    }
    let s2 = sqrt2();
    let k = big(3 * (1u64 << (n + 1))) / &s2 + big(1) / big(2);
    let x = (k.exp() - big(1)) * big(12) / &s2;
    let ceil = x.ceil().to_int().value();
    let mut steps = UBig::try_from(ceil).map_err(|_| Error::OutOfRange("negative step count".into()))?;
    // guard against a threshold sitting on an integer within rounding
    while !bad_bound_holds(n, &steps) {
        steps += UBig::ONE;
    }
    while steps > UBig::ONE && bad_bound_holds(n, &(&steps - UBig::ONE)) {
        steps -= UBig::ONE;
    }
    Ok(steps)
}

/// Per-cell jump-length lower bound of the bad staircase.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StaircaseLowerBound {
    pub n: u32,
    /// `N_n` as a decimal string (it may exceed 64 bits).
    pub steps: String,
    /// `ℋ¹(σ_n) = √2/(3·2^n)`.
    pub sigma_length: f64,
    /// `h_n = √2/(2^{n+1} N_n)`.
    pub h_n: f64,
    /// `∫₀^{ℋ¹(σ)/4} ⌊ℋ¹(σ)/(2(t + h_n))⌋ dt`, integrated piecewise exactly.
    pub bound: f64,
    /// The same integral by the midpoint rule in `ln(t + h_n)` (when requested).
    pub midpoint: Option<f64>,
    /// The smooth lower bound obtained by dropping the floor.
    pub smooth_bound: f64,
}

/// Euler–Mascheroni constant.
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Harmonic number `H_k`; exact summation up to `10⁶`, asymptotic beyond.
fn harmonic(k: &UBig) -> f64 {
    match u64::try_from(k) {
        Ok(0) => 0.0,
        Ok(m) if m <= 1_000_000 => (1..=m).rev().map(|i| 1.0 / i as f64).sum(),
        _ => {
            let kf = ubig_to_f64(k);
            kf.ln() + EULER_GAMMA + 0.5 / kf - 1.0 / (12.0 * kf * kf)
        }
    }
}

fn ubig_to_f64(k: &UBig) -> f64 {
    Big::from(k.clone()).to_f64().value()
}

/// `∫₀^{L/4} ⌊L/(2(t + h))⌋ dt` for tread `n` with `N_n` steps.
pub fn bad_staircase_lower_bound(stairs: &BadStaircase, n: u32, n_strips: usize) -> Result<StaircaseLowerBound> {
    if n == 0 || n > stairs.depth {
        return Err(Error::param("n", format!("tread {n} is not in 1..={}", stairs.depth)));
    }
    let steps = &stairs.steps[n as usize - 1];
    lower_bound_for_steps(n, steps, n_strips)
}

/// [`bad_staircase_lower_bound`] for an explicit step count.
pub fn lower_bound_for_steps(n: u32, steps: &UBig, n_strips: usize) -> Result<StaircaseLowerBound> {
    if *steps == UBig::ZERO {
        return Err(Error::param("steps", "must be >= 1"));
    }
    let nf = ubig_to_f64(steps);
    let s2 = std::f64::consts::SQRT_2;
    let pow = 2f64.powi(n as i32);
    let len = s2 / (3.0 * pow);
    let a = len / 2.0;
    let t_max = len / 4.0;
    let h = s2 / (2.0 * pow * nf);
    // ⌊a/h⌋ = ⌊N/3⌋ exactly
    let k0 = steps / UBig::from(3u8);
    let k1 = ((a / (t_max + h)).floor() as u64).min(u64::try_from(&k0).unwrap_or(u64::MAX));
    let k1b = UBig::from(k1);
    let bound = t_max * k1 as f64 + a * (harmonic(&k0) - harmonic(&k1b)) - h * ubig_to_f64(&(&k0 - &k1b));
    let midpoint = (n_strips > 0).then(|| {
        let (s0, s1) = (h.ln(), (t_max + h).ln());
        let ds = (s1 - s0) / n_strips as f64;
        (0..n_strips)
            .map(|i| {
                let s = s0 + (i as f64 + 0.5) * ds;
                let x = s.exp();
                (a / x).floor() * x * ds
            })
            .sum()
    });
    let smooth_bound = a * ((t_max + h) / h).ln() - t_max;
    Ok(StaircaseLowerBound { n, steps: steps.to_string(), sigma_length: len, h_n: h, bound, midpoint, smooth_bound })
}

/// Cover sums `Σ ⌈ℓ_i/δ⌉·δ^t` of a segment set at `δ = 10⁻¹ … 10⁻⁴`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VanishingNote {
    pub t: f64,
    pub total_length: f64,
    pub deltas: Vec<f64>,
    pub cover_sums: Vec<f64>,
    /// Cover sums strictly decrease as `δ` shrinks (expected for `t > 1`).
    pub decreasing: bool,
}

/// Demonstrates that a finite-length segment set has vanishing
/// `t`-dimensional premeasure for `t > 1`: covering each segment by
/// `⌈ℓ/δ⌉` sets of diameter `δ` gives a sum of order `δ^{t−1}·length`.
pub fn higher_t_vanishing_note(segments: &[Segment], t: f64) -> VanishingNote {
    let deltas = vec![1e-1, 1e-2, 1e-3, 1e-4];
    let total_length = segments.iter().map(Segment::length).sum();
    let cover_sums: Vec<f64> = deltas
        .iter()
        .map(|&d: &f64| segments.iter().map(|s| (s.length() / d).ceil() * d.powf(t)).sum())
        .collect();
    let decreasing = !segments.is_empty() && cover_sums.windows(2).all(|w| w[1] < w[0]);
    VanishingNote { t, total_length, deltas, cover_sums, decreasing }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::{build_polygon, build_unit_square};
    use crate::solution::{build_solution, jump_segments, Affects, BuildOptions, JumpKind};

    fn js(a: (f64, f64), b: (f64, f64)) -> JumpSegment {
        JumpSegment {
            seg: Segment::new(Point::new(a.0, a.1), Point::new(b.0, b.1)).unwrap(),
            kind: JumpKind::Side,
            affects: Affects::BOTH,
            depth: 0,
            on_boundary: false,
        }
    }

    #[test]
    fn slicing_examples() {
        let v = slicing_count(&[js((0.0, 0.0), (0.0, 2.0))], SliceDirection::Horizontal, 1000).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
        let h = [js((0.0, 0.0), (2.0, 0.0))];
        assert_eq!(slicing_count(&h, SliceDirection::Horizontal, 1000).unwrap(), 0.0);
        let d = [js((0.0, 0.0), (1.0, 1.0))];
        let v = slicing_count(&d, SliceDirection::Horizontal, 1000).unwrap();
        assert!((v - 1.0).abs() < 1e-12 && v <= std::f64::consts::SQRT_2);
        assert!(slicing_count(&d, SliceDirection::Vertical, 1).is_err());
    }

    #[test]
    fn grid_check_single_diamond() {
        let dom = build_polygon(vec![Point::new(0.0, 1.0), Point::new(-0.5, 0.5), Point::new(0.0, 0.0), Point::new(0.5, 0.5)]).unwrap();
        let v = build_solution(&dom, &BuildOptions::default()).unwrap();
        let r = eikonal_grid_check(&v, 256, 4.0 / 256.0).unwrap();
        assert!(r.eligible_points > 0);
        assert_eq!(r.pass_points, r.eligible_points);
        assert!(r.max_residual < 1e-9);
        let coarse = eikonal_grid_check(&v, 16, 10.0).unwrap();
        assert!(coarse.flagged && coarse.eligible_points == 0);
        assert!(eikonal_grid_check(&v, 8, 0.1).is_err());
    }

    #[test]
    fn grid_pass_rate_monotone_in_exclusion() {
        let v = build_solution(&build_unit_square(1.0).unwrap(), &BuildOptions::levels(5)).unwrap();
        let mut prev = 0.0;
        for k in 1..4 {
            let r = eikonal_grid_check(&v, 128, k as f64 * 2.0 / 128.0).unwrap();
            assert!(r.pass_rate() >= prev);
            prev = r.pass_rate();
        }
    }

    #[test]
    fn unit_square_slicing_and_comparison() {
        let v = build_solution(&build_unit_square(1.0).unwrap(), &BuildOptions::levels(6)).unwrap();
        let segs = jump_segments(&v);
        for d in [SliceDirection::Horizontal, SliceDirection::Vertical] {
            assert!(slicing_check(&segs, d, 4096).unwrap().holds);
        }
        let c = comparison_bound_check(&v, 5000, 3);
        assert_eq!(c.samples, 5000);
        assert_eq!(c.violations, 0);
        assert!(c.max_ratio <= 1.0);
    }

    #[test]
    fn bad_n_values() {
        let expect = ["67744", "328121913", "7695857226580876", "4233509269237334249126808552377"];
        for (i, e) in expect.iter().enumerate() {
            let n = i as u32 + 1;
            let v = choose_bad_n(n).unwrap();
            assert_eq!(v.to_string(), *e);
            assert!(bad_bound_holds(n, &v));
            assert!(!bad_bound_holds(n, &(&v - UBig::ONE)));
        }
        assert!(matches!(choose_bad_n(7), Err(Error::Resource(_))));
    }

    #[test]
    fn closed_form_matches_f64_threshold() {
        // f64 oracle of the threshold for n = 1
        let s2 = std::f64::consts::SQRT_2;
        let x = (12.0 / s2) * ((12.0 / s2 + 0.5).exp() - 1.0);
        assert_eq!(x.ceil() as u64, 67744);
    }

    #[test]
    fn lower_bound_examples() {
        for n in 1..=4 {
            let steps = choose_bad_n(n).unwrap();
            let lb = lower_bound_for_steps(n, &steps, 200_000).unwrap();
            assert!(lb.bound >= 1.0, "n = {n}: {}", lb.bound);
            assert!(lb.bound >= lb.smooth_bound);
            let mid = lb.midpoint.unwrap();
            assert!((mid - lb.bound).abs() < 1e-3 * lb.bound, "{mid} vs {}", lb.bound);
        }
        let one = lower_bound_for_steps(1, &UBig::ONE, 1000).unwrap();
        assert!(one.bound < 1.0);
        let h = lower_bound_for_steps(2, &UBig::from(10u8), 0).unwrap().h_n;
        assert_eq!(h, std::f64::consts::SQRT_2 / (8.0 * 10.0));
    }

    #[test]
    fn vanishing_note_examples() {
        let unit = [Segment::new(Point::new(0.0, 0.0), Point::new(1.0, 0.0)).unwrap()];
        let note = higher_t_vanishing_note(&unit, 1.5);
        assert!((note.cover_sums[1] - 0.1).abs() < 1e-12);
        assert!(note.decreasing);
        let flat = higher_t_vanishing_note(&unit, 1.0);
        assert!(flat.cover_sums.iter().all(|s| (s - 1.0).abs() < 1e-9));
        let empty = higher_t_vanishing_note(&[], 1.5);
        assert!(empty.cover_sums.iter().all(|&s| s == 0.0));
    }
}
