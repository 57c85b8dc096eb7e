//! `eikonal`: build SBV eikonal solutions on compatible domains, evaluate the
//! weighted jump functional, run the verification suite and render figures.
//!
//! Exit status: 0 on success, 1 when a verification check fails, 2 on usage,
//! configuration, filesystem or resource errors. `EIKONAL_THREADS` caps the
//! worker threads.

mod config;
mod svg;
mod verify;

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use sbv_eikonal::domain::{CompatibleDomain, DomainKind};
use sbv_eikonal::functional::{evaluate_functional, FunctionalReport};
use sbv_eikonal::series::{classify_increments, TrendReport};
use sbv_eikonal::solution::{build_solution, jump_segments, write_jump_csv, BuildOptions, JumpSegment, SolutionField};
use sbv_eikonal::weights::{admissibility_check, Admissibility, Verdict, Weight};
use serde::Serialize;

use config::{CliError, CliResult, RunConfig, SpecSource, VerifyFlags};

#[derive(Parser)]
#[command(name = "eikonal", version, about = "SBV solutions of the planar eikonal system")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the domain, covering and solution; write the covering CSV and an SVG.
    Build(BuildArgs),
    /// Evaluate the weighted jump functional.
    Evaluate(EvaluateArgs),
    /// Run the verification checks; exit 1 if any fails.
    Verify(VerifyArgs),
    /// Write an SVG rendering only.
    Render(RenderArgs),
    /// Consolidated JSON report: build summary, layer profiles and functional.
    Report(ReportArgs),
}

#[derive(Args)]
struct Common {
    /// Run config file (JSON); flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Domain spec file (JSON).
    #[arg(long)]
    domain: Option<PathBuf>,
    /// Depth of the dyadic coverings; also the generic depth cap unless --max-depth is given.
    #[arg(long)]
    levels: Option<u32>,
    /// Depth cap of the generic coverings.
    #[arg(long)]
    max_depth: Option<u32>,
    /// Smallest kept square side of the generic coverings, in the triangle frame.
    #[arg(long)]
    min_side: Option<f64>,
}

#[derive(Args)]
struct BuildArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    out_svg: Option<PathBuf>,
    /// Covering CSV (one row per square of every triangular part).
    #[arg(long)]
    out_csv: Option<PathBuf>,
    /// Build summary JSON.
    #[arg(long)]
    out_json: Option<PathBuf>,
    /// Jump segment CSV.
    #[arg(long)]
    jumps_csv: Option<PathBuf>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    common: Common,
    /// Weight spec: inline JSON or a path.
    #[arg(long)]
    weight: Option<String>,
    /// Report JSON (printed to stdout when omitted).
    #[arg(long)]
    out_json: Option<PathBuf>,
    /// Per-depth contributions CSV.
    #[arg(long)]
    out_csv: Option<PathBuf>,
    /// Per-layer contributions CSV.
    #[arg(long)]
    layer_csv: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Check {
    Eikonal,
    Bounds,
    Slicing,
    Layers,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    /// Checks to run (default: all).
    #[arg(long, value_enum, value_delimiter = ',')]
    checks: Vec<Check>,
    /// Lattice size of the eikonal grid check.
    #[arg(long, default_value_t = 256)]
    grid: usize,
    /// Seed of the random samples.
    #[arg(long)]
    seed: Option<u64>,
    /// Random points of the distance-bound check.
    #[arg(long, default_value_t = 100_000)]
    samples: usize,
    /// Lines per direction of the slicing check.
    #[arg(long, default_value_t = 10_000)]
    lines: usize,
    /// Offset added to the depth in the side-length exponent.
    #[arg(long, default_value_t = 1)]
    side_shift: u32,
    /// Also check pairwise disjointness of the squares in this covering CSV.
    #[arg(long)]
    covering_csv: Option<PathBuf>,
    /// Consolidated report JSON.
    #[arg(long)]
    out_json: Option<PathBuf>,
}

#[derive(Args)]
struct RenderArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    out_svg: Option<PathBuf>,
    /// Leave out the pieces.
    #[arg(long)]
    no_pieces: bool,
    /// Leave out the jump segments.
    #[arg(long)]
    no_jumps: bool,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    common: Common,
    /// Weight spec: inline JSON or a path; the functional is skipped when absent.
    #[arg(long)]
    weight: Option<String>,
    /// Report JSON (printed to stdout when omitted).
    #[arg(long)]
    out_json: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    let res = match cli.command {
        Command::Build(a) => cmd_build(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Render(a) => cmd_render(a),
        Command::Report(a) => cmd_report(a),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("EIKONAL_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("EIKONAL_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot configure {n} threads: {e}")))
}

/// Config file merged with the command-line flags.
fn resolve(c: &Common) -> CliResult<RunConfig> {
    let mut cfg = match &c.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(d) = &c.domain {
        cfg.domain = Some(SpecSource::Path(d.clone()));
    }
    if c.levels.is_some() {
        cfg.covering.levels = c.levels;
        if c.max_depth.is_none() {
            cfg.covering.max_depth = None;
        }
    }
    if c.max_depth.is_some() {
        cfg.covering.max_depth = c.max_depth;
    }
    if c.min_side.is_some() {
        cfg.covering.min_side = c.min_side;
    }
    Ok(cfg)
}

fn build(cfg: &RunConfig) -> CliResult<(SolutionField, Vec<JumpSegment>)> {
    let src = cfg.domain.as_ref().ok_or_else(|| CliError::Config("no domain given (use --domain)".into()))?;
    let dom = config::build_domain(src)?;
    let s = build_solution(&dom, &cfg.build_options())?;
    let segs = jump_segments(&s);
    Ok((s, segs))
}

fn weight(arg: &Option<String>, cfg: &RunConfig) -> CliResult<Option<Weight>> {
    match (arg, &cfg.weight) {
        (Some(a), _) => config::parse_weight_arg(a).map(Some),
        (None, Some(src)) => config::load_weight(src).map(Some),
        (None, None) => Ok(None),
    }
}

fn pick(flag: &Option<PathBuf>, fallback: &Option<PathBuf>) -> Option<PathBuf> {
    flag.clone().or_else(|| fallback.clone())
}

#[derive(Serialize)]
struct CoveringSummary {
    part: usize,
    dyadic: bool,
    squares: usize,
    deepest: u32,
    residual_area: f64,
    leaves: usize,
}

#[derive(Serialize)]
struct BuildSummary {
    kind: DomainKind,
    area: f64,
    leftover_area: f64,
    options: BuildOptions,
    pieces: usize,
    pieces_by_depth: BTreeMap<u32, usize>,
    coverings: Vec<CoveringSummary>,
    residual_area: f64,
    polygon_leftovers: usize,
    jump_segments: usize,
    boundary_segments: usize,
    jump_length: f64,
}

fn summarize(s: &SolutionField, segs: &[JumpSegment]) -> BuildSummary {
    let dom: &CompatibleDomain = s.domain();
    let mut by_depth = BTreeMap::new();
    for p in s.pieces() {
        *by_depth.entry(p.depth).or_insert(0) += 1;
    }
    BuildSummary {
        kind: dom.kind,
        area: dom.area(),
        leftover_area: dom.leftover_area,
        options: s.options(),
        pieces: s.pieces().len(),
        pieces_by_depth: by_depth,
        coverings: s
            .coverings()
            .iter()
            .enumerate()
            .map(|(part, c)| CoveringSummary {
                part,
                dyadic: c.dyadic,
                squares: c.len(),
                deepest: c.deepest(),
                residual_area: c.residual_area,
                leaves: c.leaves.len(),
            })
            .collect(),
        residual_area: s.residual_area(),
        polygon_leftovers: s.polygon_leftovers().len(),
        jump_segments: segs.iter().filter(|j| !j.on_boundary).count(),
        boundary_segments: segs.iter().filter(|j| j.on_boundary).count(),
        jump_length: segs.iter().filter(|j| !j.on_boundary).map(|j| j.seg.length()).sum(),
    }
}

fn write_covering_csv(s: &SolutionField, path: &Path) -> CliResult<()> {
    config::write_with(path, |w| {
        writeln!(w, "part,depth,word,x0,y0,x1,y1,side")?;
        for (part, c) in s.coverings().iter().enumerate() {
            for q in &c.squares {
                let sq = q.square;
                writeln!(
                    w,
                    "{part},{},{},{:.9e},{:.9e},{:.9e},{:.9e},{:.9e}",
                    q.depth,
                    q.word,
                    sq.x,
                    sq.y,
                    sq.x + sq.side,
                    sq.y + sq.side,
                    sq.side
                )?;
            }
        }
        Ok(())
    })
}

fn write_svg(s: &SolutionField, segs: &[JumpSegment], path: &Path, opts: svg::RenderOptions) -> CliResult<()> {
    config::write_with(path, |w| svg::write_svg(s, segs, opts, w))
}

fn print_json<T: Serialize>(value: &T) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn cmd_build(a: BuildArgs) -> CliResult<ExitCode> {
    let cfg = resolve(&a.common)?;
    let (s, segs) = build(&cfg)?;
    let summary = summarize(&s, &segs);
    if let Some(p) = pick(&a.out_csv, &cfg.outputs.csv) {
        write_covering_csv(&s, &p)?;
    }
    if let Some(p) = pick(&a.out_svg, &cfg.outputs.svg) {
        write_svg(&s, &segs, &p, svg::RenderOptions::default())?;
    }
    if let Some(p) = &a.jumps_csv {
        config::write_with(p, |w| write_jump_csv(&segs, w))?;
    }
    if let Some(p) = pick(&a.out_json, &cfg.outputs.json) {
        config::write_json(&p, &summary)?;
    }
    println!(
        "pieces: {}  coverings: {}  residual area: {:.6e}  jump segments: {}  jump length: {:.9}",
        summary.pieces,
        summary.coverings.len(),
        summary.residual_area,
        summary.jump_segments,
        summary.jump_length
    );
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct Evaluation {
    functional: FunctionalReport,
    admissibility: Admissibility,
    depth_trend: TrendReport,
}

fn evaluate(s: &SolutionField, w: &Weight) -> CliResult<Evaluation> {
    let admissibility = admissibility_check(w);
    if admissibility.verdict == Verdict::Inadmissible {
        eprintln!("warning: weight is not admissible (the integral of H(t)/t near 0 diverges); tail bound is +inf");
    }
    let functional = evaluate_functional(s, w)?;
    let depth_trend = classify_increments(&functional.depth_series());
    Ok(Evaluation { functional, admissibility, depth_trend })
}

fn fmt_tail(t: Option<f64>) -> String {
    t.map_or_else(|| "inf".to_string(), |t| format!("{t:.9e}"))
}

fn cmd_evaluate(a: EvaluateArgs) -> CliResult<ExitCode> {
    let cfg = resolve(&a.common)?;
    let w = weight(&a.weight, &cfg)?.ok_or_else(|| CliError::Config("no weight given (use --weight)".into()))?;
    let (s, _) = build(&cfg)?;
    let ev = evaluate(&s, &w)?;
    if let Some(p) = pick(&a.out_csv, &cfg.outputs.csv) {
        config::write_with(&p, |out| ev.functional.write_depth_csv(out))?;
    }
    if let Some(p) = &a.layer_csv {
        config::write_with(p, |out| ev.functional.write_layer_csv(out))?;
    }
    match pick(&a.out_json, &cfg.outputs.json) {
        Some(p) => config::write_json(&p, &ev)?,
        None => print_json(&ev)?,
    }
    let trend = serde_json::to_value(ev.depth_trend.trend).map_err(|e| CliError::Io(e.to_string()))?;
    eprintln!(
        "total: {:.12e}  tail bound: {}  per-depth trend: {}",
        ev.functional.total,
        fmt_tail(ev.functional.tail_bound),
        trend.as_str().unwrap_or("?")
    );
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct VerifyReport {
    passed: bool,
    checks: Vec<verify::CheckResult>,
}

fn cmd_verify(a: VerifyArgs) -> CliResult<ExitCode> {
    let cfg = resolve(&a.common)?;
    let flags = if a.checks.is_empty() {
        cfg.verify.filter(VerifyFlags::any).unwrap_or(VerifyFlags::ALL)
    } else {
        VerifyFlags {
            eikonal: a.checks.contains(&Check::Eikonal),
            bounds: a.checks.contains(&Check::Bounds),
            slicing: a.checks.contains(&Check::Slicing),
            layers: a.checks.contains(&Check::Layers),
        }
    };
    if a.grid < 16 {
        return Err(CliError::Config(format!("--grid must be at least 16, got {}", a.grid)));
    }
    let mut checks = Vec::new();
    if let Some(p) = &a.covering_csv {
        checks.push(verify::csv_disjointness(p)?);
    }
    if cfg.domain.is_some() || a.covering_csv.is_none() {
        let (s, segs) = build(&cfg)?;
        let opts = verify::VerifyOptions {
            flags,
            grid: a.grid,
            samples: a.samples,
            seed: a.seed.or(cfg.seed).unwrap_or(0),
            lines: a.lines,
            side_shift: a.side_shift,
        };
        checks.extend(verify::run(&s, &segs, &opts)?);
    }
    for c in &checks {
        let tag = match c.status {
            verify::Status::Pass => "PASS",
            verify::Status::Fail => "FAIL",
            verify::Status::Info => "INFO",
        };
        println!("{tag} {}: {}", c.name, c.detail);
    }
    let passed = checks.iter().all(|c| c.status != verify::Status::Fail);
    if let Some(p) = pick(&a.out_json, &cfg.outputs.json) {
        config::write_json(&p, &VerifyReport { passed, checks })?;
    }
    Ok(if passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn cmd_render(a: RenderArgs) -> CliResult<ExitCode> {
    let cfg = resolve(&a.common)?;
    let path = pick(&a.out_svg, &cfg.outputs.svg).ok_or_else(|| CliError::Config("no output given (use --out-svg)".into()))?;
    let (s, segs) = build(&cfg)?;
    write_svg(&s, &segs, &path, svg::RenderOptions { pieces: !a.no_pieces, jumps: !a.no_jumps })?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct LayerSummary {
    part: usize,
    profile: sbv_eikonal::covering::LayerProfile,
}

#[derive(Serialize)]
struct FullReport {
    build: BuildSummary,
    layers: Vec<LayerSummary>,
    evaluation: Option<Evaluation>,
}

fn cmd_report(a: ReportArgs) -> CliResult<ExitCode> {
    let cfg = resolve(&a.common)?;
    let w = weight(&a.weight, &cfg)?;
    let (s, segs) = build(&cfg)?;
    let layers = s
        .coverings()
        .iter()
        .enumerate()
        .map(|(part, c)| LayerSummary { part, profile: c.layer_profile(verify::LAYER_N_MAX) })
        .collect();
    let evaluation = w.map(|w| evaluate(&s, &w)).transpose()?;
    let report = FullReport { build: summarize(&s, &segs), layers, evaluation };
    match pick(&a.out_json, &cfg.outputs.json) {
        Some(p) => config::write_json(&p, &report)?,
        None => print_json(&report)?,
    }
    Ok(ExitCode::SUCCESS)
}
