//! Sampling of the diagonal screen and its serialization as CSV, SVG and JSON.
//!
//! Function-graph curves are sampled uniformly over their band with both ends
//! included. Both caustic branches carry the band-end points, so the two
//! polylines meet there.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{
    caustic_y, coalescences, gates, normalize_unchecked, ridge_x, ridge_y, screen_bounds, GateLabel, Gates,
    ScreenBounds,
};
use crate::kinematics::TraceReport;
use crate::sides::QuadSides;

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_RESOLUTION: usize = 512;
pub const MIN_RESOLUTION: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Svg,
    Json,
}

impl OutputFormat {
    pub fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Svg => "svg",
            OutputFormat::Json => "json",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RenderSpec {
    /// Samples per axis.
    pub resolution: usize,
    pub format: OutputFormat,
    pub overlay: Option<TraceReport>,
    /// Map onto the unit square `[b-a, b+a] x [d-a, d+a] -> [0, 1]^2`.
    pub normalized: bool,
}

impl RenderSpec {
    pub fn new(resolution: usize, format: OutputFormat, normalized: bool) -> Result<Self> {
        if resolution < MIN_RESOLUTION {
            return Err(Error::Resolution(resolution));
        }
        Ok(RenderSpec { resolution, format, overlay: None, normalized })
    }

    pub fn with_overlay(mut self, trace: TraceReport) -> Self {
        self.overlay = Some(trace);
        self
    }
}

impl Default for RenderSpec {
    fn default() -> Self {
        RenderSpec { resolution: DEFAULT_RESOLUTION, format: OutputFormat::Svg, overlay: None, normalized: false }
    }
}

/// Curve names in CSV order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum CurveName {
    CausticUpper,
    CausticLower,
    RidgeX,
    RidgeY,
    GateN,
    GateS,
    GateE,
    GateW,
    Trace,
}

impl CurveName {
    pub const ALL: [CurveName; 9] = [
        CurveName::CausticUpper,
        CurveName::CausticLower,
        CurveName::RidgeX,
        CurveName::RidgeY,
        CurveName::GateN,
        CurveName::GateS,
        CurveName::GateE,
        CurveName::GateW,
        CurveName::Trace,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CurveName::CausticUpper => "caustic_upper",
            CurveName::CausticLower => "caustic_lower",
            CurveName::RidgeX => "ridge_x",
            CurveName::RidgeY => "ridge_y",
            CurveName::GateN => "gate_N",
            CurveName::GateS => "gate_S",
            CurveName::GateE => "gate_E",
            CurveName::GateW => "gate_W",
            CurveName::Trace => "trace",
        }
    }

    fn gate(g: GateLabel) -> CurveName {
        match g {
            GateLabel::N => CurveName::GateN,
            GateLabel::S => CurveName::GateS,
            GateLabel::E => CurveName::GateE,
            GateLabel::W => CurveName::GateW,
        }
    }
}

impl std::str::FromStr for CurveName {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        CurveName::ALL.into_iter().find(|c| c.as_str() == s).ok_or_else(|| format!("unknown curve `{s}`"))
    }
}

/// Sampled screen in raw diagonal lengths. Normalization is applied on output.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScreenGeometry {
    pub sides: QuadSides,
    pub bounds: ScreenBounds,
    pub caustic_upper: Vec<[f64; 2]>,
    pub caustic_lower: Vec<[f64; 2]>,
    /// Ridge of the fold along `x`: points `(x, y_ridge(x))`.
    pub ridge_x_curve: Vec<[f64; 2]>,
    /// Ridge of the fold along `y`: points `(x_ridge(y), y)`, ascending in `x`.
    pub ridge_y_curve: Vec<[f64; 2]>,
    pub gates: Gates,
    /// Coinciding gate pairs such as `N=W`.
    pub coalescences: Vec<String>,
    /// Corners of the coincidences, such as `NW`.
    pub coalescence_corners: Vec<String>,
    /// The caustic is symmetric under `x <-> y` (`a = c` or `b = d`).
    pub piero_line: bool,
    pub normalized: bool,
    /// Trace path in screen coordinates, in path order.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<[f64; 2]>>,
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| if i + 1 == n { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
}

/// Samples caustic branches and ridges, locates gates and coalescences.
///
/// Any valid labeling is accepted; ranges follow the labels as given.
pub fn build_screen(sides: &QuadSides, spec: &RenderSpec) -> Result<ScreenGeometry> {
    if spec.resolution < MIN_RESOLUTION {
        return Err(Error::Resolution(spec.resolution));
    }
    let bounds = screen_bounds(sides);
    let n = spec.resolution;
    let mut caustic_upper = Vec::with_capacity(n);
    let mut caustic_lower = Vec::with_capacity(n);
    let mut ridge_x_curve = Vec::with_capacity(n);
    for x in linspace(bounds.x_min, bounds.x_max, n) {
        let br = caustic_y(sides, x)?;
        caustic_upper.push([x, br.upper]);
        caustic_lower.push([x, br.lower]);
        ridge_x_curve.push([x, ridge_y(sides, x)?]);
    }
    let mut ridge_y_curve = Vec::with_capacity(n);
    for y in linspace(bounds.y_min, bounds.y_max, n) {
        ridge_y_curve.push([ridge_x(sides, y)?, y]);
    }
    ridge_y_curve.sort_by(|p, q| p[0].total_cmp(&q[0]));
    let g = gates(sides);
    let co = coalescences(sides, &g);
    let tol = 1e-12 * sides.longest();
    let piero_line = (sides.a - sides.c).abs() <= tol || (sides.b - sides.d).abs() <= tol;
    Ok(ScreenGeometry {
        sides: *sides,
        bounds,
        caustic_upper,
        caustic_lower,
        ridge_x_curve,
        ridge_y_curve,
        gates: g,
        coalescences: co.iter().map(|c| c.label()).collect(),
        coalescence_corners: co.iter().map(|c| c.corner()).collect(),
        piero_line,
        normalized: spec.normalized,
        trace: spec.overlay.as_ref().map(|t| t.screen_path()),
    })
}

impl ScreenGeometry {
    fn out(&self, p: [f64; 2]) -> [f64; 2] {
        if self.normalized {
            normalize_unchecked(&self.sides, p)
        } else {
            p
        }
    }

    /// Non-empty curves in CSV order, in output coordinates.
    pub fn curves(&self) -> Vec<(CurveName, Vec<[f64; 2]>)> {
        let mut out = Vec::new();
        let mut add = |name: CurveName, pts: &[[f64; 2]]| {
            if !pts.is_empty() {
                out.push((name, pts.iter().map(|&p| self.out(p)).collect::<Vec<_>>()));
            }
        };
        add(CurveName::CausticUpper, &self.caustic_upper);
        add(CurveName::CausticLower, &self.caustic_lower);
        add(CurveName::RidgeX, &self.ridge_x_curve);
        add(CurveName::RidgeY, &self.ridge_y_curve);
        for gl in GateLabel::ALL {
            let mut pts: Vec<[f64; 2]> = self.gates.points_of(gl).map(|p| [p.x, p.y]).collect();
            pts.sort_by(|p, q| p[0].total_cmp(&q[0]).then(p[1].total_cmp(&q[1])));
            add(CurveName::gate(gl), &pts);
        }
        if let Some(t) = &self.trace {
            add(CurveName::Trace, t);
        }
        out
    }

    /// Normalized output on a screen whose bands are not the `2a` square.
    pub fn square_warning(&self) -> bool {
        self.normalized && !self.bounds.square_assumption_holds
    }
}

/// `v` with 12 significant digits in positional notation.
pub fn fmt_sig(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v.is_finite() { "0.00000000000".to_string() } else { v.to_string() };
    }
    let mag = v.abs().log10().floor() as i32;
    let decimals = (11 - mag).max(0) as usize;
    let s = format!("{v:.decimals$}");
    // rounding may carry into a new leading digit, as in 9.99..9 -> 10.0..0
    let carried = s.trim_start_matches('-').parse::<f64>().is_ok_and(|r| r >= 10f64.powi(mag + 1));
    if carried && decimals > 0 {
        let d = decimals - 1;
        return format!("{v:.d$}");
    }
    s
}

/// 12 significant digits with trailing zeros removed, for console output.
pub fn fmt_trim(v: f64) -> String {
    let s = fmt_sig(v);
    let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
    if s == "-0" {
        "0".to_string()
    } else {
        s
    }
}

fn point_outside_unit(p: [f64; 2]) -> bool {
    let tol = 1e-9;
    p.iter().any(|&t| t < -tol || t > 1.0 + tol)
}

/// CSV text: header `curve,x,y`, plus a `flag` column on normalized
/// non-square screens marking points outside the unit square.
pub fn csv_string(sg: &ScreenGeometry) -> String {
    let flag = sg.square_warning();
    let mut s = String::from(if flag { "curve,x,y,flag\n" } else { "curve,x,y\n" });
    for (name, pts) in sg.curves() {
        for p in pts {
            write!(s, "{},{},{}", name.as_str(), fmt_sig(p[0]), fmt_sig(p[1])).unwrap();
            if flag {
                s.push_str(if point_outside_unit(p) { ",1" } else { ",0" });
            }
            s.push('\n');
        }
    }
    s
}

pub fn emit_csv(sg: &ScreenGeometry, path: &Path) -> Result<()> {
    write_file(path, csv_string(sg).as_bytes())
}

/// Curves read back from [`csv_string`] output, in file order.
pub fn parse_csv(text: &str) -> Result<Vec<(CurveName, Vec<[f64; 2]>)>> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(Error::Csv { line: 1, reason: "empty file".into() })?;
    if header != "curve,x,y" && header != "curve,x,y,flag" {
        return Err(Error::Csv { line: 1, reason: format!("unexpected header `{header}`") });
    }
    let mut out: Vec<(CurveName, Vec<[f64; 2]>)> = Vec::new();
    for (i, line) in lines {
        let bad = |reason: String| Error::Csv { line: i + 1, reason };
        let mut fields = line.split(',');
        let name: CurveName = fields.next().unwrap_or_default().parse().map_err(bad)?;
        let mut num = || -> Result<f64> {
            let f = fields.next().ok_or_else(|| bad("missing field".into()))?;
            f.parse().map_err(|e| bad(format!("{f}: {e}")))
        };
        let p = [num()?, num()?];
        match out.last_mut() {
            Some((n, pts)) if *n == name => pts.push(p),
            _ => out.push((name, vec![p])),
        }
    }
    Ok(out)
}

const VIEW: f64 = 600.0;
const MARGIN: f64 = 60.0;

struct Frame {
    x0: f64,
    y0: f64,
    scale: f64,
}

impl Frame {
    fn map(&self, p: [f64; 2]) -> (f64, f64) {
        (MARGIN + (p[0] - self.x0) * self.scale, VIEW - MARGIN - (p[1] - self.y0) * self.scale)
    }
}

fn polyline(s: &mut String, frame: &Frame, pts: &[[f64; 2]], attrs: &str) {
    if pts.is_empty() {
        return;
    }
    s.push_str("  <polyline fill=\"none\" ");
    s.push_str(attrs);
    s.push_str(" points=\"");
    for (i, &p) in pts.iter().enumerate() {
        let (u, v) = frame.map(p);
        if i > 0 {
            s.push(' ');
        }
        write!(s, "{u:.3},{v:.3}").unwrap();
    }
    s.push_str("\"/>\n");
}

/// Static SVG 1.1 drawing of the screen on a square viewport. Identical input
/// gives identical bytes.
pub fn svg_string(sg: &ScreenGeometry) -> String {
    let b = &sg.bounds;
    let lo = sg.out([b.x_min, b.y_min]);
    let hi = sg.out([b.x_max, b.y_max]);
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(f64::MIN_POSITIVE);
    let frame = Frame { x0: lo[0], y0: lo[1], scale: (VIEW - 2.0 * MARGIN) / span };
    let mut s = String::new();
    writeln!(
        s,
        "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{VIEW}\" height=\"{VIEW}\" viewBox=\"0 0 {VIEW} {VIEW}\" font-family=\"sans-serif\" font-size=\"12\">"
    )
    .unwrap();
    writeln!(s, "  <rect x=\"0\" y=\"0\" width=\"{VIEW}\" height=\"{VIEW}\" fill=\"white\"/>").unwrap();
    let (bx0, by1) = frame.map(lo);
    let (bx1, by0) = frame.map(hi);
    writeln!(
        s,
        "  <rect x=\"{bx0:.3}\" y=\"{by0:.3}\" width=\"{:.3}\" height=\"{:.3}\" fill=\"none\" stroke=\"black\"/>",
        bx1 - bx0,
        by1 - by0
    )
    .unwrap();
    let axis_labels = [
        (bx0, by1 + 18.0, "middle", fmt_trim(lo[0])),
        (bx1, by1 + 18.0, "middle", fmt_trim(hi[0])),
        (bx0 - 6.0, by1 + 4.0, "end", fmt_trim(lo[1])),
        (bx0 - 6.0, by0 + 4.0, "end", fmt_trim(hi[1])),
    ];
    for (u, v, anchor, text) in axis_labels {
        writeln!(s, "  <text x=\"{u:.3}\" y=\"{v:.3}\" text-anchor=\"{anchor}\">{text}</text>").unwrap();
    }
    writeln!(s, "  <text x=\"{:.3}\" y=\"{:.3}\" text-anchor=\"middle\">x</text>", (bx0 + bx1) / 2.0, by1 + 36.0)
        .unwrap();
    writeln!(s, "  <text x=\"{:.3}\" y=\"{:.3}\" text-anchor=\"middle\">y</text>", bx0 - 36.0, (by0 + by1) / 2.0)
        .unwrap();
    if sg.square_warning() {
        writeln!(
            s,
            "  <text x=\"{:.3}\" y=\"24\" text-anchor=\"middle\" fill=\"#b00000\">warning: bands differ from the 2a square; normalized coordinates leave [0,1]</text>",
            VIEW / 2.0
        )
        .unwrap();
    }
    if sg.piero_line {
        // y = x clipped to the screen rectangle
        let t0 = lo[0].max(lo[1]);
        let t1 = hi[0].min(hi[1]);
        if t1 > t0 {
            let (u0, v0) = frame.map([t0, t0]);
            let (u1, v1) = frame.map([t1, t1]);
            writeln!(
                s,
                "  <line x1=\"{u0:.3}\" y1=\"{v0:.3}\" x2=\"{u1:.3}\" y2=\"{v1:.3}\" stroke=\"#888888\" stroke-width=\"1\"/>"
            )
            .unwrap();
        }
    }
    let curves = sg.curves();
    let get = |n: CurveName| curves.iter().find(|(c, _)| *c == n).map(|(_, p)| p.as_slice()).unwrap_or(&[]);
    polyline(&mut s, &frame, get(CurveName::CausticUpper), "stroke=\"#1f4e9c\" stroke-width=\"2\"");
    polyline(&mut s, &frame, get(CurveName::CausticLower), "stroke=\"#1f4e9c\" stroke-width=\"2\"");
    polyline(&mut s, &frame, get(CurveName::RidgeX), "stroke=\"#2a8c3c\" stroke-dasharray=\"6 4\"");
    polyline(&mut s, &frame, get(CurveName::RidgeY), "stroke=\"#8c2a7a\" stroke-dasharray=\"6 4\"");
    polyline(&mut s, &frame, get(CurveName::Trace), "stroke=\"#d0661a\" stroke-width=\"1.5\"");

    // group gate points that coincide so each spot gets one joint label
    let mut spots: Vec<([f64; 2], Vec<GateLabel>)> = Vec::new();
    let tol = 1e-6 * 2.0 * sg.sides.a;
    for p in &sg.gates.points {
        let q = [p.x, p.y];
        match spots.iter_mut().find(|(r, _)| (r[0] - q[0]).hypot(r[1] - q[1]) <= tol) {
            Some((_, labels)) => {
                if !labels.contains(&p.gate) {
                    labels.push(p.gate)
                }
            }
            None => spots.push((q, vec![p.gate])),
        }
    }
    for (q, labels) in spots {
        let (u, v) = frame.map(sg.out(q));
        let text: Vec<&str> = labels.iter().map(|g| g.as_str()).collect();
        writeln!(s, "  <circle cx=\"{u:.3}\" cy=\"{v:.3}\" r=\"4\" fill=\"#c00000\"/>").unwrap();
        writeln!(s, "  <text x=\"{:.3}\" y=\"{:.3}\" fill=\"#c00000\">{}</text>", u + 6.0, v - 6.0, text.join("="))
            .unwrap();
    }
    s.push_str("</svg>\n");
    s
}

pub fn emit_svg(sg: &ScreenGeometry, path: &Path) -> Result<()> {
    write_file(path, svg_string(sg).as_bytes())
}

#[derive(Serialize)]
struct Versioned<'a, T: Serialize> {
    schema: u32,
    #[serde(flatten)]
    body: &'a T,
}

/// Pretty JSON with a leading `"schema": 1` field.
pub fn json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(&Versioned { schema: SCHEMA_VERSION, body: value })?;
    s.push('\n');
    Ok(s)
}

pub fn emit_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    write_file(path, json_string(value)?.as_bytes())
}

/// Trace samples as CSV, one row per sample in path order.
pub fn trace_csv_string(tr: &TraceReport) -> String {
    let mut s = String::from("step,path,theta,branch,x,y,signed_area,shape\n");
    for (i, smp) in tr.samples.iter().enumerate() {
        let c = &smp.config;
        let branch = match c.branch {
            crate::kinematics::Branch::ElbowUp => "up",
            crate::kinematics::Branch::ElbowDown => "down",
        };
        writeln!(
            s,
            "{i},{},{},{branch},{},{},{},{}",
            fmt_sig(smp.path),
            fmt_sig(c.theta),
            fmt_sig(c.diagonals.x),
            fmt_sig(c.diagonals.y),
            fmt_sig(c.signed_area),
            c.shape
        )
        .unwrap();
    }
    s
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(bytes)?;
    Ok(())
}
