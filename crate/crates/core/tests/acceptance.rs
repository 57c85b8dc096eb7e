//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion, then
//! fails if any criterion failed.

use std::f64::consts::{FRAC_1_SQRT_2, PI, SQRT_2};
use std::time::Instant;

use dashu_int::UBig;
use sbv_eikonal::analysis::{
    bad_bound_holds, choose_bad_n, comparison_bound_check, eikonal_grid_check, slicing_check, SliceDirection,
};
use sbv_eikonal::covering::{generate_covering, generate_dyadic_covering, SubTriangle};
use sbv_eikonal::domain::{
    build_polygon, build_staircase_good, build_triangle_domain_rotated, build_unit_square, default_good_heights,
    BoundaryFunction, TriangularDomain,
};
use sbv_eikonal::functional::{evaluate_functional, evaluate_segments, evaluate_unweighted};
use sbv_eikonal::geometry::{Point, RigidMotion};
use sbv_eikonal::solution::{build_solution, jump_segments, BuildOptions, JumpKind};
use sbv_eikonal::weights::{admissibility_check, condensation_sum, Verdict, Weight};

struct Outcome {
    id: u32,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn report(id: u32, name: &'static str, pass: bool, detail: String, notes: &[String]) -> Outcome {
    println!("{} criterion {id} ({name}): {detail}", if pass { "PASS" } else { "FAIL" });
    for n in notes {
        println!("    note: {n}");
    }
    Outcome { id, name, pass, detail }
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let c = generate_dyadic_covering(1.0, 12).unwrap();
    let counts: Vec<usize> = (1..=11).map(|m| c.count_layer_squares(m)).collect();
    let secs = t.elapsed().as_secs_f64();
    let mismatches: Vec<String> = counts
        .iter()
        .enumerate()
        .filter(|(i, &k)| k != i + 2)
        .map(|(i, &k)| format!("m={} count={k}", i + 1))
        .collect();
    // oracle: level k holds 2^k squares of depth extent 2^{-k}; they meet L_m iff 2^k ≤ m
    let oracle: Vec<usize> = (1..=11usize).map(|m| (0..).take_while(|&k| 1usize << k <= m).map(|k| 1usize << k).sum()).collect();
    let pass = mismatches.is_empty() && secs < 1.0;
    report(
        1,
        "layer count m+1",
        pass,
        format!("counts {counts:?} vs m+1, {} mismatches, {secs:.3}s", mismatches.len()),
        &[format!("geometric oracle 2^(floor(log2 m)+1)-1 = {oracle:?}, agrees: {}", oracle == counts)],
    )
}

fn criterion_2() -> Outcome {
    let t = Instant::now();
    let dom = build_unit_square(1.0).unwrap();
    let v = build_solution(&dom, &BuildOptions::levels(14)).unwrap();
    let w = Weight::power(1.0);
    let top: Vec<_> = jump_segments(&v)
        .into_iter()
        .filter(|j| j.kind == JumpKind::MinusDiagonal && j.seg.midpoint().x2 > j.seg.midpoint().x1.abs())
        .collect();
    let computed = evaluate_segments(&v, &top, &w).total;
    let secs = t.elapsed().as_secs_f64();
    // oracle: level k has 2^k horizontal diagonals of length 2^-k centred at
    // x = (2i+1)/2^k − 1, height 1 − 2^{-k-1}; midpoint rule with H∘d₁ in closed form
    let mut oracle = 0.0;
    let per_level = 100_000 / 15;
    for k in 0..=14u32 {
        let n_diag = 1usize << k;
        let len = 0.5f64.powi(k as i32);
        let y = 1.0 - 0.5 * len;
        let pts = (per_level / n_diag).max(1);
        for i in 0..n_diag {
            let cx = (2 * i + 1) as f64 * len / 2.0 * 2.0 - 1.0;
            let cx = if k == 0 { 0.0 } else { cx };
            let dx = len / pts as f64;
            for p in 0..pts {
                let x = cx - 0.5 * len + (p as f64 + 0.5) * dx;
                let d = (1.0 - x.abs()).min(1.0 - y.abs());
                oracle += 2.0 * d * dx;
            }
        }
    }
    let bound = 2.0 * (1..=14).map(|n| 0.5f64.powi(n)).sum::<f64>();
    let rel = (computed - oracle).abs() / oracle;
    let pass = computed <= bound && rel < 1e-6 && secs < 10.0;
    report(
        2,
        "horizontal-diagonal series bound",
        pass,
        format!("computed {computed:.12} bound {bound:.12} oracle {oracle:.12} rel {rel:.2e}, {secs:.2}s"),
        &[format!(
            "levels 0..=14 give 2·Σ_{{n=1}}^{{15}} 2^-n = {:.12}; excess over the bound {:.3e}",
            2.0 * (1..=15).map(|n| 0.5f64.powi(n)).sum::<f64>(),
            computed - bound
        )],
    )
}

fn criterion_3() -> Outcome {
    let t = Instant::now();
    let dom = build_unit_square(1.0).unwrap();
    let v12 = build_solution(&dom, &BuildOptions::levels(12)).unwrap();
    let segs = jump_segments(&v12);
    let unweighted = evaluate_segments(&v12, &segs, &Weight::constant(1.0)).depth_series();
    let base = unweighted[4];
    let linear = (5..=12).all(|k| unweighted[k] >= 0.5 * base);
    let w = Weight::power(0.5);
    let r12 = evaluate_segments(&v12, &segs, &w);
    let inc = r12.depth_series();
    let ratios: Vec<f64> = (8..12).map(|k| inc[k + 1] / inc[k]).collect();
    let decays = ratios.iter().all(|&r| r <= 0.9);
    let v14 = build_solution(&dom, &BuildOptions::levels(14)).unwrap();
    let r14 = evaluate_functional(&v14, &w).unwrap();
    let change = (r14.total - r12.total).abs() / r12.total;
    let secs = t.elapsed().as_secs_f64();
    let pass = linear && decays && change < 0.01 && secs < 30.0;
    report(
        3,
        "divergence vs convergence",
        pass,
        format!(
            "unweighted depth-4 {base:.6}, min depth 5..12 {:.6}; power(0.5) ratios {:?}; total change 12→14 {:.3e}; {secs:.2}s",
            unweighted[5..=12].iter().copied().fold(f64::INFINITY, f64::min),
            ratios.iter().map(|r| format!("{r:.4}")).collect::<Vec<_>>(),
            change
        ),
        &[],
    )
}

fn criterion_4() -> Outcome {
    let t = Instant::now();
    let total = |depth: u32| {
        let dom = build_staircase_good(depth, &default_good_heights(depth)).unwrap();
        evaluate_unweighted(&build_solution(&dom, &BuildOptions::default()).unwrap()).unwrap().total
    };
    let (t6, t8) = (total(6), total(8));
    let bound = 2.0 * (1..=8).map(|n| 8.0 * 0.5f64.powi(n)).sum::<f64>();
    let change = (t8 - t6).abs() / t6;
    let mut bad_ok = true;
    let mut ns = Vec::new();
    for n in 1..=3 {
        let steps = choose_bad_n(n).unwrap();
        bad_ok &= bad_bound_holds(n, &steps) && !bad_bound_holds(n, &(&steps - UBig::ONE));
        ns.push(steps.to_string());
    }
    let secs = t.elapsed().as_secs_f64();
    let pass = t8 <= bound && bound <= 16.0 && change < 0.01 && bad_ok && secs < 5.0;
    report(
        4,
        "staircase pair",
        pass,
        format!("good total depth 8 {t8:.9} ≤ {bound:.6}; depth 6→8 change {:.3}%; N_1..3 = {ns:?} minimal: {bad_ok}; {secs:.2}s", change * 100.0),
        &[],
    )
}

fn criterion_5() -> Outcome {
    let t = Instant::now();
    let dom = build_unit_square(1.0).unwrap();
    let v = build_solution(&dom, &BuildOptions::levels(8)).unwrap();
    let r = eikonal_grid_check(&v, 512, 2.0 * 2.0 / 512.0).unwrap();
    let diamond = build_polygon(vec![Point::new(0.0, 1.0), Point::new(-0.5, 0.5), Point::new(0.0, 0.0), Point::new(0.5, 0.5)]).unwrap();
    let vd = build_solution(&diamond, &BuildOptions::default()).unwrap();
    let rd = eikonal_grid_check(&vd, 512, 2.0 * 1.0 / 512.0).unwrap();
    let secs = t.elapsed().as_secs_f64();
    let pass = r.eligible_points > 0
        && r.pass_rate() >= 0.99
        && rd.eligible_points > 0
        && rd.pass_points == rd.eligible_points
        && rd.max_residual < 1e-9
        && secs < 10.0;
    report(
        5,
        "eikonal property",
        pass,
        format!(
            "square: {}/{} eligible pass, max residual {:.2e}, excluded {}; diamond: {}/{} pass, max residual {:.2e}; {secs:.2}s",
            r.pass_points, r.eligible_points, r.max_residual, r.excluded, rd.pass_points, rd.eligible_points, rd.max_residual
        ),
        &[],
    )
}

fn criterion_6() -> Outcome {
    let t = Instant::now();
    let convex = BoundaryFunction::quadratic(0.0, 1.0, 1.0, -1.05, 0.05).unwrap();
    let domains = [("unit square", build_unit_square(1.0).unwrap(), BuildOptions::levels(8)),
        ("good staircase", build_staircase_good(6, &default_good_heights(6)).unwrap(), BuildOptions::default()),
        (
            "L polygon",
            build_polygon(vec![
                Point::new(0.0, 0.0),
                Point::new(1.0, 1.0),
                Point::new(0.5, 1.5),
                Point::new(0.0, 1.0),
                Point::new(-0.5, 1.5),
                Point::new(-1.0, 1.0),
            ])
            .unwrap(),
            BuildOptions::default(),
        ),
        (
            "rotated triangle",
            build_triangle_domain_rotated(convex, RigidMotion::rotation(1)).unwrap(),
            BuildOptions { levels: 10, max_depth: 14, min_side: None },
        )];
    let mut pass = true;
    let mut parts = Vec::new();
    let mut notes = Vec::new();
    for (k, (name, dom, opts)) in domains.iter().enumerate() {
        let v = build_solution(dom, opts).unwrap();
        let c = comparison_bound_check(&v, 100_000, 1000 + k as u64);
        pass &= c.samples == 100_000 && c.violations == 0;
        parts.push(format!("{name}: {} samples, {} violations, max v/d₁ {:.6}", c.samples, c.violations, c.max_ratio));
        notes.push(format!("{name}: max v − d₁ = {:.3e}", c.max_excess));
    }
    let secs = t.elapsed().as_secs_f64();
    report(6, "comparison bound 0 ≤ v ≤ d₁", pass, format!("{}; {secs:.2}s", parts.join("; ")), &notes)
}

fn criterion_7() -> Outcome {
    let t = Instant::now();
    let h = BoundaryFunction::quadratic(0.0, 1.0, 1.0, -0.95, -0.05).unwrap();
    let eps_grid = (0..=10_000)
        .map(|i| {
            let x = i as f64 / 10_000.0;
            (-1.0 + 0.05 * (1.0 - 2.0 * x) + 1.0).abs()
        })
        .fold(0.0, f64::max);
    let eps = 0.05;
    let root = SubTriangle::root(&TriangularDomain::new(h));
    let c = generate_covering(&root, 0.0, 10).unwrap();
    let sides = c.side_bound_check(eps, 0, 10);
    let shifted = c.side_bound_check(eps, 1, 10);
    let diag = c.diagonal_distance_check(eps, 100);
    let secs = t.elapsed().as_secs_f64();
    let pass = eps_grid <= eps + 1e-15 && sides.violations == 0 && diag.violations == 0;
    report(
        7,
        "side-length and diagonal-distance bounds",
        pass,
        format!(
            "sup|h'+1| = {eps_grid:.4}; side bounds (2.05)^-i..(1.95)^-i: {}/{} violations; diagonal distance: {}/{} violations, max ratio {:.4} ≤ {:.4}; {secs:.2}s",
            sides.violations, sides.checked, diag.violations, diag.checked_points, diag.max_ratio, diag.bound_ratio
        ),
        &[
            format!("first violations (depth, side, lower, upper): {:?}", &sides.examples[..sides.examples.len().min(3)]),
            format!("with exponent i+1: {}/{} violations", shifted.violations, shifted.checked),
        ],
    )
}

fn criterion_8() -> Outcome {
    let t = Instant::now();
    let c = generate_dyadic_covering(1.0, 12).unwrap();
    let scale = FRAC_1_SQRT_2;
    let mut worst_d: f64 = 0.0;
    let mut worst_side: f64 = 0.0;
    let mut checked = 0usize;
    let mut bad = 0usize;
    for n in 1..=20u32 {
        let band = 1.0 / (n as f64 * (n + 1) as f64);
        for s in c.layer_intersection_stats(n) {
            checked += 1;
            let side = s.e.max(s.n) * scale;
            worst_d = worst_d.max(s.d / band);
            worst_side = worst_side.max(side / (SQRT_2 * band));
            if s.d > band * (1.0 + 1e-12) || side > SQRT_2 * band * (1.0 + 1e-12) {
                bad += 1;
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    report(
        8,
        "intersection-length bounds",
        bad == 0,
        format!("{checked} square-layer pairs, {bad} violations; max d_n/bound {worst_d:.12}, max side/bound {worst_side:.12}; {secs:.2}s"),
        &[],
    )
}

fn criterion_9() -> Outcome {
    let t = Instant::now();
    let v = build_solution(&build_unit_square(1.0).unwrap(), &BuildOptions::levels(10)).unwrap();
    let segs = jump_segments(&v);
    let h = slicing_check(&segs, SliceDirection::Horizontal, 100_000).unwrap();
    let vert = slicing_check(&segs, SliceDirection::Vertical, 100_000).unwrap();
    let secs = t.elapsed().as_secs_f64();
    report(
        9,
        "slicing inequality",
        h.holds && vert.holds,
        format!(
            "{} segments, length {:.6}; horizontal {:.6}, vertical {:.6}; {secs:.2}s",
            segs.len(),
            h.total_length,
            h.integral,
            vert.integral
        ),
        &[],
    )
}

fn criterion_10() -> Outcome {
    let t = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for a in [0.25, 0.5, 1.0, 2.0] {
        let v = admissibility_check(&Weight::power(a)).verdict;
        ok &= v == Verdict::Admissible;
        parts.push(format!("power({a}) {v:?}"));
    }
    for (name, w) in [("constant(1)", Weight::constant(1.0)), ("log_power(1)", Weight::log_power(1.0))] {
        let v = admissibility_check(&w).verdict;
        ok &= v == Verdict::Inadmissible;
        parts.push(format!("{name} {v:?}"));
    }
    // direct summation oracles
    let n = 10_000usize;
    let p1 = condensation_sum(&Weight::power(1.0), n).unwrap();
    let direct_sq: f64 = (1..=n).map(|k| 1.0 / (k as f64 * k as f64)).sum();
    let direct_dy: f64 = (1..=n.min(1000)).map(|k| 0.5f64.powi(k as i32)).sum();
    let c1 = condensation_sum(&Weight::constant(1.0), n).unwrap();
    let harmonic: f64 = (1..=n).map(|k| 1.0 / k as f64).sum();
    let errs = [
        (p1.harmonic[n - 1] - direct_sq).abs(),
        (p1.harmonic[n - 1] - PI * PI / 6.0).abs(),
        (p1.dyadic[n - 1] - direct_dy).abs(),
        (c1.harmonic[n - 1] - harmonic).abs(),
    ];
    ok &= errs.iter().all(|&e| e < 1e-3);
    let secs = t.elapsed().as_secs_f64();
    report(
        10,
        "weight admissibility",
        ok,
        format!("{}; condensation errors {:?}; {secs:.2}s", parts.join(", "), errs.map(|e| format!("{e:.2e}"))),
        &[],
    )
}

#[test]
fn acceptance() {
    let outcomes = vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(),
    ];
    let failed: Vec<String> = outcomes.iter().filter(|o| !o.pass).map(|o| format!("{} ({}): {}", o.id, o.name, o.detail)).collect();
    println!("{} of {} criteria pass", outcomes.len() - failed.len(), outcomes.len());
    assert!(failed.is_empty(), "failed criteria:\n{}", failed.join("\n"));
}
