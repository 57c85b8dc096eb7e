//! Run configuration and spec-file loading.
//!
//! A domain spec is a JSON object tagged by `kind`:
//!
//! ```text
//! {"kind": "unit_square", "half_side": 1.0}
//! {"kind": "staircase_good", "depth": 8, "heights": [..]}        heights optional
//! {"kind": "staircase_bad", "depth": 3, "max_vertices": 1000000}  max_vertices optional
//! {"kind": "triangle", "h": {"form": "affine", "a": 0, "b": 1, "h0": 2, "slope": -1},
//!  "motion": {"rot": 1, "reflect": false, "scale": 0.7071067811865476, "offset": [0, 0]}}
//! {"kind": "polygon", "vertices": [[0, 0], [1, 1], [0, 2], [-1, 1]]}
//! ```
//!
//! Boundary functions for `triangle` use `form` = `affine` (`a, b, h0, slope`),
//! `quadratic` (`a, b, c0, c1, c2`), `power` (`a, b, coef, exponent, offset`)
//! or `table` (`points: [[t, h], ..]`).
//!
//! A weight spec is either inline JSON or a path to a JSON file:
//! `{"form": "power", "alpha": 0.5}`, `{"form": "log_power", "beta": 2}`,
//! `{"form": "constant", "c": 1}` or `{"form": "table", "points": [[t, H], ..]}`.
//!
//! A run config file (`--config`) bundles the same settings; flags given on
//! the command line take precedence:
//!
//! ```text
//! {"domain": "square.json", "weight": {"form": "power", "alpha": 1},
//!  "covering": {"levels": 8, "max_depth": 20, "min_side": null},
//!  "outputs": {"svg": "out.svg", "csv": "out.csv", "json": "out.json"},
//!  "verify": {"eikonal": true, "bounds": true, "slicing": true, "layers": true},
//!  "seed": 7}
//! ```
//!
//! Relative paths inside a config file are resolved against its directory.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use sbv_eikonal::domain::{build_from_spec, CompatibleDomain, DomainSpec};
use sbv_eikonal::solution::BuildOptions;
use sbv_eikonal::weights::Weight;
use serde::de::DeserializeOwned;
use serde::Deserialize;

/// Failure that maps to exit status 2.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Library(sbv_eikonal::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Io(m) => write!(f, "filesystem error: {m}"),
            CliError::Library(e) => write!(f, "{e}"),
        }
    }
}

impl From<sbv_eikonal::Error> for CliError {
    fn from(e: sbv_eikonal::Error) -> Self {
        CliError::Library(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// A spec given either inline or as a path.
#[derive(Clone, Debug, Deserialize)]
#[serde(untagged)]
pub enum SpecSource<T> {
    Path(PathBuf),
    Inline(T),
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoveringConfig {
    pub levels: Option<u32>,
    pub max_depth: Option<u32>,
    pub min_side: Option<f64>,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub svg: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyFlags {
    #[serde(default)]
    pub eikonal: bool,
    #[serde(default)]
    pub bounds: bool,
    #[serde(default)]
    pub slicing: bool,
    #[serde(default)]
    pub layers: bool,
}

impl VerifyFlags {
    pub const ALL: VerifyFlags = VerifyFlags { eikonal: true, bounds: true, slicing: true, layers: true };

    pub fn any(&self) -> bool {
        self.eikonal || self.bounds || self.slicing || self.layers
    }
}

/// Contents of a `--config` file.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub domain: Option<SpecSource<DomainSpec>>,
    pub weight: Option<SpecSource<Weight>>,
    #[serde(default)]
    pub covering: CoveringConfig,
    #[serde(default)]
    pub outputs: OutputConfig,
    pub verify: Option<VerifyFlags>,
    pub seed: Option<u64>,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = read_text(path)?;
        let mut cfg: RunConfig = parse_json(&text, &path.display().to_string())?;
        let base = path.parent().unwrap_or(Path::new(""));
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        if let Some(SpecSource::Path(p)) = &mut cfg.domain {
            rebase(p);
        }
        if let Some(SpecSource::Path(p)) = &mut cfg.weight {
            rebase(p);
        }
        for p in [&mut cfg.outputs.svg, &mut cfg.outputs.csv, &mut cfg.outputs.json].into_iter().flatten() {
            rebase(p);
        }
        Ok(cfg)
    }

    pub fn build_options(&self) -> BuildOptions {
        let d = BuildOptions::default();
        let c = &self.covering;
        BuildOptions {
            levels: c.levels.unwrap_or(d.levels),
            max_depth: c.max_depth.or(c.levels).unwrap_or(d.max_depth),
            min_side: c.min_side,
        }
    }
}

fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

/// Parses JSON, reporting errors as `origin:line:column: message`.
pub fn parse_json<T: DeserializeOwned>(text: &str, origin: &str) -> CliResult<T> {
    serde_json::from_str(text).map_err(|e| {
        let (line, col) = if e.line() > 0 { (e.line(), e.column()) } else { locate_field(text, &e.to_string()) };
        CliError::Config(format!("{origin}:{line}:{col}: {e}"))
    })
}

/// Errors raised inside tagged enums carry no position; point at the first
/// occurrence of the field, variant or value named in the message instead.
fn locate_field(text: &str, msg: &str) -> (usize, usize) {
    let named = [msg.split('`').nth(1), msg.split('"').nth(1)];
    let at = named.into_iter().flatten().filter(|n| !n.is_empty()).find_map(|n| {
        text.find(&format!("\"{n}\"")).or_else(|| if n.len() > 1 { text.find(n) } else { None })
    });
    match at {
        Some(i) => {
            let before = &text[..i];
            let line = before.matches('\n').count() + 1;
            let col = before.rfind('\n').map_or(i, |nl| i - nl - 1) + 1;
            (line, col)
        }
        None => (1, 1),
    }
}

pub fn load_domain_spec(src: &SpecSource<DomainSpec>) -> CliResult<DomainSpec> {
    match src {
        SpecSource::Inline(s) => Ok(s.clone()),
        SpecSource::Path(p) => parse_json(&read_text(p)?, &p.display().to_string()),
    }
}

pub fn build_domain(src: &SpecSource<DomainSpec>) -> CliResult<CompatibleDomain> {
    Ok(build_from_spec(&load_domain_spec(src)?)?)
}

/// `--weight` argument: inline JSON when it starts with `{`, else a path.
pub fn parse_weight_arg(arg: &str) -> CliResult<Weight> {
    if arg.trim_start().starts_with('{') {
        finish_weight(parse_json(arg, "--weight")?)
    } else {
        load_weight(&SpecSource::Path(PathBuf::from(arg)))
    }
}

pub fn load_weight(src: &SpecSource<Weight>) -> CliResult<Weight> {
    match src {
        SpecSource::Inline(w) => finish_weight(w.clone()),
        SpecSource::Path(p) => finish_weight(parse_json(&read_text(p)?, &p.display().to_string())?),
    }
}

fn finish_weight(w: Weight) -> CliResult<Weight> {
    w.validate()?;
    Ok(w)
}

/// Creates `path` for writing; the parent directory must exist.
pub fn create(path: &Path) -> CliResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

pub fn write_with(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> CliResult<()> {
    let mut w = create(path)?;
    f(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> CliResult<()> {
    write_with(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value).map_err(std::io::Error::other)?;
        writeln!(w)
    })
}
