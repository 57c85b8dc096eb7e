//! Verification suite run by `eikonal verify`.

use std::path::Path;

use sbv_eikonal::analysis::{comparison_bound_check, eikonal_grid_check, slicing_check, SliceDirection};
use sbv_eikonal::covering::{AxisSquare, Covering};
use sbv_eikonal::solution::{JumpSegment, SolutionField};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::config::{CliError, CliResult, VerifyFlags};

/// Largest layer index examined by the layer checks.
pub const LAYER_N_MAX: u32 = 20;
/// Relative slack of the intersection-length bounds.
pub const INTERSECTION_REL_TOL: f64 = 1e-9;
/// Points sampled on each `−`diagonal.
pub const DIAGONAL_SAMPLES: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    /// Reported without a pass/fail verdict.
    Info,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub status: Status,
    pub detail: String,
    pub data: Value,
}

impl CheckResult {
    fn new(name: impl Into<String>, pass: bool, detail: String, data: Value) -> Self {
        let status = if pass { Status::Pass } else { Status::Fail };
        CheckResult { name: name.into(), status, detail, data }
    }

    fn info(name: impl Into<String>, detail: String, data: Value) -> Self {
        CheckResult { name: name.into(), status: Status::Info, detail, data }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub flags: VerifyFlags,
    pub grid: usize,
    pub samples: usize,
    pub seed: u64,
    pub lines: usize,
    /// Added to the depth in the exponent of the side-length bounds.
    pub side_shift: u32,
}

pub fn run(s: &SolutionField, segs: &[JumpSegment], o: &VerifyOptions) -> CliResult<Vec<CheckResult>> {
    let mut out = Vec::new();
    if o.flags.eikonal {
        out.push(eikonal(s, o.grid)?);
    }
    if o.flags.bounds {
        let c = comparison_bound_check(s, o.samples, o.seed);
        out.push(CheckResult::new(
            "distance-bound",
            c.violations == 0,
            format!(
                "{} samples, {} with v > d1 or v < 0, max v/d1 {:.6}, max v - d1 {:.3e}",
                c.samples, c.violations, c.max_ratio, c.max_excess
            ),
            json!(c),
        ));
        for (i, cov) in s.coverings().iter().enumerate() {
            out.extend(covering_bounds(i, cov, o.side_shift));
        }
    }
    if o.flags.layers {
        for (i, cov) in s.coverings().iter().enumerate() {
            out.extend(layers(i, cov));
        }
        if s.coverings().is_empty() {
            out.push(CheckResult::info("layers", "no triangular parts".into(), Value::Null));
        }
    }
    if o.flags.slicing {
        for dir in [SliceDirection::Horizontal, SliceDirection::Vertical] {
            let r = slicing_check(segs, dir, o.lines)?;
            let name = match dir {
                SliceDirection::Horizontal => "slicing-horizontal",
                SliceDirection::Vertical => "slicing-vertical",
            };
            out.push(CheckResult::new(
                name,
                r.holds,
                format!("integral {:.9} vs jump length {:.9} over {} lines", r.integral, r.total_length, r.n_lines),
                json!(r),
            ));
        }
    }
    Ok(out)
}

fn eikonal(s: &SolutionField, grid: usize) -> CliResult<CheckResult> {
    let b = s.domain().bounds();
    let cell = (b.x1 - b.x0).max(b.y1 - b.y0) / grid as f64;
    let r = eikonal_grid_check(s, grid, 2.0 * cell)?;
    let pass = !r.flagged && r.pass_points == r.eligible_points;
    Ok(CheckResult::new(
        "eikonal-grid",
        pass,
        format!(
            "{}/{} eligible nodes pass, {} excluded, max residual {:.3e}",
            r.pass_points, r.eligible_points, r.excluded, r.max_residual
        ),
        json!(r),
    ))
}

fn covering_bounds(part: usize, cov: &Covering, shift: u32) -> Vec<CheckResult> {
    let mut out = Vec::new();
    if cov.is_empty() {
        return out;
    }
    let area = cov.root.area();
    let overlap = cov.overlap_area();
    let outside = cov.containment_violations();
    out.push(CheckResult::new(
        format!("part{part}-disjointness"),
        overlap <= 1e-12 * area && outside == 0,
        format!("{} squares, overlap area {overlap:.3e}, {outside} outside the triangle", cov.len()),
        json!({ "squares": cov.len(), "overlap_area": overlap, "outside": outside }),
    ));
    let eps = cov.root.h.slope_deviation();
    if eps >= 1.0 {
        out.push(CheckResult::info(
            format!("part{part}-side-bounds"),
            format!("slope deviation {eps:.3} >= 1, bounds not applicable"),
            json!({ "epsilon": eps }),
        ));
        return out;
    }
    let sb = cov.side_bound_check(eps, shift, cov.deepest());
    out.push(CheckResult::new(
        format!("part{part}-side-bounds"),
        sb.violations == 0,
        format!("epsilon {eps:.3e}, exponent depth+{shift}: {}/{} squares outside the bounds", sb.violations, sb.checked),
        json!(sb),
    ));
    let dd = cov.diagonal_distance_check(eps, DIAGONAL_SAMPLES);
    out.push(CheckResult::new(
        format!("part{part}-diagonal-distance"),
        dd.violations == 0,
        format!("max ratio {:.6} vs bound {:.6}, {} violations", dd.max_ratio, dd.bound_ratio, dd.violations),
        json!(dd),
    ));
    out
}

fn layers(part: usize, cov: &Covering) -> Vec<CheckResult> {
    let profile = cov.layer_profile(LAYER_N_MAX);
    let mut out = vec![CheckResult::info(
        format!("part{part}-layer-counts"),
        format!("N_n for n = 1..{LAYER_N_MAX}: {:?}, smallest c with N_n <= c(n+1): {:.4}", profile.counts, profile.c),
        json!(profile),
    )];
    let mut checked = 0usize;
    let mut bad = Vec::new();
    for n in 1..=LAYER_N_MAX {
        for st in cov.layer_intersection_stats(n) {
            checked += 1;
            if !st.within_bounds(INTERSECTION_REL_TOL) && bad.len() < 8 {
                bad.push(json!({ "n": n, "stats": st }));
            }
        }
    }
    out.push(CheckResult::new(
        format!("part{part}-intersection-lengths"),
        bad.is_empty(),
        format!("{checked} square/layer pairs, {} over the bounds", bad.len()),
        json!({ "checked": checked, "examples": bad }),
    ));
    out
}

/// One row of a covering CSV; `part` is absent in single-covering files.
#[derive(Debug, Deserialize)]
struct CsvSquare {
    x0: f64,
    y0: f64,
    side: f64,
    #[serde(default)]
    part: usize,
}

/// Pairwise interior-disjointness of the squares listed in a covering CSV.
pub fn csv_disjointness(path: &Path) -> CliResult<CheckResult> {
    let mut rdr = csv::Reader::from_path(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let mut rows: Vec<CsvSquare> = Vec::new();
    for (i, r) in rdr.deserialize().enumerate() {
        rows.push(r.map_err(|e| CliError::Config(format!("{}:{}: {e}", path.display(), i + 2)))?);
    }
    let mut overlaps = Vec::new();
    let mut parts: Vec<usize> = rows.iter().map(|r| r.part).collect();
    parts.sort_unstable();
    parts.dedup();
    for part in parts {
        let mut sq: Vec<(usize, AxisSquare)> = rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.part == part)
            .map(|(i, r)| (i, AxisSquare { x: r.x0, y: r.y0, side: r.side }))
            .collect();
        sq.sort_by(|a, b| a.1.x.total_cmp(&b.1.x));
        for (k, &(i, a)) in sq.iter().enumerate() {
            for &(j, b) in &sq[k + 1..] {
                if b.x >= a.x + a.side {
                    break;
                }
                let ov = a.overlap(&b);
                if ov > 1e-12 * a.side.min(b.side).powi(2) {
                    overlaps.push(json!({ "rows": [i + 2, j + 2], "area": ov }));
                }
            }
        }
    }
    Ok(CheckResult::new(
        "csv-disjointness",
        overlaps.is_empty(),
        match overlaps.first() {
            None => format!("{} squares, pairwise disjoint", rows.len()),
            Some(first) => format!("{} overlapping pairs, first at CSV rows {}", overlaps.len(), first["rows"]),
        },
        json!({ "squares": rows.len(), "overlaps": overlaps.iter().take(8).collect::<Vec<_>>() }),
    ))
}
