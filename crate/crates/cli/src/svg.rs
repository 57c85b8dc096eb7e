//! Self-contained SVG rendering of a solution: the domain boundary, the
//! pieces colored by depth and the jump segments colored by kind.

use std::io::{self, Write};

use sbv_eikonal::geometry::Point;
use sbv_eikonal::solution::{JumpKind, JumpSegment, SolutionField};

/// Output width in pixels; the height follows the aspect ratio.
const WIDTH_PX: f64 = 800.0;

/// Formats `x` with 9 significant digits, without trailing zeros.
pub fn sig9(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x.is_finite() { "0".into() } else { format!("{x}") };
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-6..=15).contains(&exp) {
        return format!("{x:.8e}");
    }
    let decimals = (8 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

fn xy(p: Point) -> String {
    format!("{},{}", sig9(p.x1), sig9(-p.x2))
}

fn depth_color(depth: u32, max_depth: u32) -> String {
    let t = if max_depth == 0 { 0.0 } else { depth as f64 / max_depth as f64 };
    format!("hsl({:.0},70%,{:.0}%)", 240.0 * (1.0 - t), 80.0 - 25.0 * t)
}

fn kind_color(kind: JumpKind) -> &'static str {
    match kind {
        JumpKind::Side => "#222222",
        JumpKind::PlusDiagonal => "#c0392b",
        JumpKind::MinusDiagonal => "#2471a3",
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RenderOptions {
    pub pieces: bool,
    pub jumps: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions { pieces: true, jumps: true }
    }
}

pub fn write_svg(s: &SolutionField, jumps: &[JumpSegment], opts: RenderOptions, mut w: impl Write) -> io::Result<()> {
    let b = s.domain().bounds();
    let (bw, bh) = (b.x1 - b.x0, b.y1 - b.y0);
    let pad = 0.02 * bw.max(bh);
    let (vw, vh) = (bw + 2.0 * pad, bh + 2.0 * pad);
    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="{} {} {} {}">"#,
        sig9(WIDTH_PX),
        sig9((WIDTH_PX * vh / vw).round()),
        sig9(b.x0 - pad),
        sig9(-b.y1 - pad),
        sig9(vw),
        sig9(vh)
    )?;
    if opts.pieces {
        let max_depth = s.pieces().iter().map(|p| p.depth).max().unwrap_or(0);
        writeln!(w, r#"<g id="pieces" stroke="none">"#)?;
        for p in s.pieces() {
            let pts: Vec<String> = p.square.vertices().iter().map(|&v| xy(v)).collect();
            writeln!(
                w,
                r#"<polygon class="piece" data-depth="{}" fill="{}" points="{}"/>"#,
                p.depth,
                depth_color(p.depth, max_depth),
                pts.join(" ")
            )?;
        }
        writeln!(w, "</g>")?;
    }
    let outline: Vec<String> = s.domain().outline().iter().map(|&v| xy(v)).collect();
    writeln!(
        w,
        r#"<polygon id="boundary" fill="none" stroke="black" stroke-width="1.5" vector-effect="non-scaling-stroke" points="{}"/>"#,
        outline.join(" ")
    )?;
    if opts.jumps {
        writeln!(w, r#"<g id="jumps" stroke-width="0.75" vector-effect="non-scaling-stroke">"#)?;
        for j in jumps.iter().filter(|j| !j.on_boundary) {
            writeln!(
                w,
                r#"<line class="{}" stroke="{}" vector-effect="non-scaling-stroke" x1="{}" y1="{}" x2="{}" y2="{}"/>"#,
                j.kind.name(),
                kind_color(j.kind),
                sig9(j.seg.a.x1),
                sig9(-j.seg.a.x2),
                sig9(j.seg.b.x1),
                sig9(-j.seg.b.x2)
            )?;
        }
        writeln!(w, "</g>")?;
    }
    writeln!(w, "</svg>")
}

#[cfg(test)]
mod tests {
    use super::*;
    use sbv_eikonal::domain::build_unit_square;
    use sbv_eikonal::solution::{build_solution, jump_segments, BuildOptions};

    #[test]
    fn nine_significant_digits() {
        assert_eq!(sig9(0.0), "0");
        assert_eq!(sig9(1.0), "1");
        assert_eq!(sig9(-0.5), "-0.5");
        assert_eq!(sig9(std::f64::consts::PI), "3.14159265");
        assert_eq!(sig9(1234.5678912345), "1234.56789");
        assert_eq!(sig9(0.000123456789123), "0.000123456789");
        assert_eq!(sig9(-1e-20), "-1.00000000e-20");
    }

    #[test]
    fn one_polygon_per_piece() {
        let dom = build_unit_square(1.0).unwrap();
        let s = build_solution(&dom, &BuildOptions::levels(2)).unwrap();
        let segs = jump_segments(&s);
        let mut buf = Vec::new();
        write_svg(&s, &segs, RenderOptions::default(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.matches(r#"class="piece""#).count(), s.pieces().len());
        assert_eq!(text.matches("<line ").count(), segs.iter().filter(|j| !j.on_boundary).count());
        assert!(text.starts_with("<svg") && text.trim_end().ends_with("</svg>"));
    }
}
