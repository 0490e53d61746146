//! Closed-form geometry of a quadrilateral read as a flattened tetrahedron.
//!
//! Every quantity here is a function of the four sides plus one or both
//! diagonals. The triads `{a, b, x}` and `{c, d, x}` hinge on `x`; the triads
//! `{a, d, y}` and `{c, b, y}` hinge on `y`. The caustic is the locus of
//! diagonal pairs realized by planar quadrilaterals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sides::QuadSides;
use crate::{COINCIDENCE_TOL, REL_TOL};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagonalPair {
    pub x: f64,
    pub y: f64,
}

impl DiagonalPair {
    pub fn new(x: f64, y: f64) -> Self {
        DiagonalPair { x, y }
    }
}

/// Which diagonal plays the role of the free variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

impl Axis {
    /// The two side pairs whose triads hinge on this diagonal.
    fn pairs(self, s: &QuadSides) -> [(f64, f64); 2] {
        match self {
            Axis::X => [(s.a, s.b), (s.c, s.d)],
            Axis::Y => [(s.a, s.d), (s.c, s.b)],
        }
    }

    fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
        }
    }

    pub fn other(self) -> Axis {
        match self {
            Axis::X => Axis::Y,
            Axis::Y => Axis::X,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScreenBounds {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    /// True when the feasible bands are exactly `[b-a, b+a]` and `[d-a, d+a]`.
    pub square_assumption_holds: bool,
}

impl ScreenBounds {
    pub fn band(&self, axis: Axis) -> (f64, f64) {
        match axis {
            Axis::X => (self.x_min, self.x_max),
            Axis::Y => (self.y_min, self.y_max),
        }
    }
}

/// The two solutions of the caustic equation at one abscissa. They coincide
/// at the ends of the band, except where the band starts at zero length.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CausticBranches {
    pub lower: f64,
    pub upper: f64,
}

impl CausticBranches {
    /// Distinct values, ascending.
    pub fn values(&self) -> Vec<f64> {
        if (self.upper - self.lower).abs() <= REL_TOL * self.upper.max(1.0) {
            vec![self.upper]
        } else {
            vec![self.lower, self.upper]
        }
    }
}

/// `16 F^2` for a triangle with sides `p`, `q` and a third side `t`, in the
/// factored form `[(p+q)^2 - t^2][t^2 - (q-p)^2]`.
fn heron16(p: f64, q: f64, t: f64) -> f64 {
    ((p + q).powi(2) - t * t) * (t * t - (q - p).powi(2))
}

/// Clamps radicands that are negative only through rounding.
fn radicand(value: f64, scale: f64, context: &'static str) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else if value >= -REL_TOL * scale {
        Ok(0.0)
    } else {
        Err(Error::NegativeRadicand { value, context })
    }
}

/// `b^2 + d^2 - a^2 - c^2`, the side term shared by every screen equation.
pub fn side_term(s: &QuadSides) -> f64 {
    s.b * s.b + s.d * s.d - s.a * s.a - s.c * s.c
}

/// Triangle area from three sides.
///
/// Degenerate (collinear) triads give exactly zero; a triad violating the
/// triangle inequality beyond rounding is an error.
pub fn heron_area(p: f64, q: f64, r: f64) -> Result<f64> {
    if p < 0.0 || q < 0.0 || r < 0.0 {
        return Err(Error::TriangleInequality { p, q, r });
    }
    let scale = (p + q + r).powi(4);
    let v = radicand(heron16(p, q, r), scale, "heron").map_err(|_| Error::TriangleInequality { p, q, r })?;
    Ok(v.sqrt() / 4.0)
}

/// Quadrilateral area from its sides and both diagonals.
pub fn bretschneider_area(s: &QuadSides, diag: DiagonalPair) -> Result<f64> {
    let d = side_term(s);
    let four_xy = 4.0 * diag.x * diag.x * diag.y * diag.y;
    let v = radicand(four_xy - d * d, four_xy.max(d * d).max(1.0), "bretschneider")?;
    Ok(v.sqrt() / 4.0)
}

/// Feasible band of a diagonal: both of its triads must close.
pub fn diagonal_band(s: &QuadSides, axis: Axis) -> (f64, f64) {
    let [(p1, q1), (p2, q2)] = axis.pairs(s);
    ((q1 - p1).abs().max((q2 - p2).abs()), (p1 + q1).min(p2 + q2))
}

fn check_band(s: &QuadSides, axis: Axis, t: f64) -> Result<f64> {
    let (lo, hi) = diagonal_band(s, axis);
    let tol = REL_TOL * hi.max(1.0);
    if !t.is_finite() || t < lo - tol || t > hi + tol {
        return Err(Error::OutOfBand { what: axis.name(), value: t, lo, hi });
    }
    Ok(t.clamp(lo, hi))
}

/// Caustic solutions for the diagonal opposite `axis`, given that diagonal's
/// partner `t`.
pub fn caustic_branches(s: &QuadSides, axis: Axis, t: f64) -> Result<CausticBranches> {
    let t = check_band(s, axis, t)?;
    let [(p1, q1), (p2, q2)] = axis.pairs(s);
    let scale = (p1 + q1).max(p2 + q2);
    if t <= 1e-12 * scale {
        // zero-width endpoint: both triads fold flat (p1 = q1, p2 = q2)
        let (s1, s2) = (p1 + q1, p2 + q2);
        return Ok(CausticBranches { lower: (s1 - s2).abs() / 2.0, upper: (s1 + s2) / 2.0 });
    }
    let d = side_term(s);
    let f1 = heron16(p1, q1, t).max(0.0).sqrt();
    let f2 = heron16(p2, q2, t).max(0.0).sqrt();
    let upper = (d * d + (f1 + f2).powi(2)).sqrt() / (2.0 * t);
    let lower = (d * d + (f1 - f2).powi(2)).sqrt() / (2.0 * t);
    Ok(CausticBranches { lower, upper })
}

/// Caustic `y` values at diagonal `x`.
pub fn caustic_y(s: &QuadSides, x: f64) -> Result<CausticBranches> {
    caustic_branches(s, Axis::X, x)
}

/// Caustic `x` values at diagonal `y`.
pub fn caustic_x(s: &QuadSides, y: f64) -> Result<CausticBranches> {
    caustic_branches(s, Axis::Y, y)
}

/// Ridge: the partner diagonal at which folding along `t` by a right
/// dihedral angle gives the largest tetrahedron.
pub fn ridge(s: &QuadSides, axis: Axis, t: f64) -> Result<f64> {
    let t = check_band(s, axis, t)?;
    let [(p1, q1), (p2, q2)] = axis.pairs(s);
    let scale = (p1 + q1).max(p2 + q2);
    if t <= 1e-12 * scale {
        let (s1, s2) = (p1 + q1, p2 + q2);
        return Ok((s1 * s1 + s2 * s2).sqrt() / 2.0);
    }
    let d = side_term(s);
    let sum = d * d + heron16(p1, q1, t).max(0.0) + heron16(p2, q2, t).max(0.0);
    Ok(sum.sqrt() / (2.0 * t))
}

pub fn ridge_y(s: &QuadSides, x: f64) -> Result<f64> {
    ridge(s, Axis::X, x)
}

pub fn ridge_x(s: &QuadSides, y: f64) -> Result<f64> {
    ridge(s, Axis::Y, y)
}

/// Polynomial form of the caustic equation,
/// `(4x^2y^2 - D^2 - P - Q)^2 - 4PQ`, divided by `L^16` with `L` the longest
/// side. Zero exactly on the caustic.
pub fn caustic_residual(s: &QuadSides, p: DiagonalPair) -> f64 {
    let d = side_term(s);
    let hp = heron16(s.a, s.b, p.x);
    let hq = heron16(s.c, s.d, p.x);
    let lhs = 4.0 * p.x * p.x * p.y * p.y - d * d - hp - hq;
    let l = s.longest().max(p.x).max(p.y);
    (lhs * lhs - 4.0 * hp * hq) / l.powi(8)
}

/// Folded quadrilateral: sides, the hinge diagonal `x` and the dihedral angle
/// `phi` between faces `{a, b, x}` and `{c, d, x}`.
///
/// `phi` is the fold angle of the tetrahedron, not the crank angle of the
/// linkage.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TetraVolumeInput {
    pub sides: QuadSides,
    pub x: f64,
    pub phi: f64,
}

pub fn tetra_volume(inp: &TetraVolumeInput) -> Result<f64> {
    let s = &inp.sides;
    if !(0.0..=std::f64::consts::PI).contains(&inp.phi) {
        return Err(Error::DihedralOutOfRange(inp.phi));
    }
    let x = check_band(s, Axis::X, inp.x)?;
    if inp.phi == 0.0 || inp.phi == std::f64::consts::PI || x == 0.0 {
        return Ok(0.0);
    }
    let f1 = heron_area(s.a, s.b, x)?;
    let f2 = heron_area(s.c, s.d, x)?;
    Ok(2.0 / (3.0 * x) * f1 * f2 * inp.phi.sin())
}

/// True feasible bands, flagged against the square `[b-a, b+a] x [d-a, d+a]`.
pub fn screen_bounds(s: &QuadSides) -> ScreenBounds {
    let (x_min, x_max) = diagonal_band(s, Axis::X);
    let (y_min, y_max) = diagonal_band(s, Axis::Y);
    let tol = 1e-12 * s.longest();
    let same = |u: f64, v: f64| (u - v).abs() <= tol;
    let square_assumption_holds =
        same(x_min, s.b - s.a) && same(x_max, s.b + s.a) && same(y_min, s.d - s.a) && same(y_max, s.d + s.a);
    ScreenBounds { x_min, x_max, y_min, y_max, square_assumption_holds }
}

/// Maps a diagonal pair onto the unit square `[b-a, b+a] x [d-a, d+a] -> [0, 1]^2`.
pub fn normalize_screen(s: &QuadSides, p: DiagonalPair) -> Result<[f64; 2]> {
    let [u, v] = normalize_unchecked(s, [p.x, p.y]);
    let tol = REL_TOL;
    for (what, t, raw) in [("x", u, p.x), ("y", v, p.y)] {
        if !(-tol..=1.0 + tol).contains(&t) {
            let (lo, hi) = if what == "x" { (s.b - s.a, s.b + s.a) } else { (s.d - s.a, s.d + s.a) };
            return Err(Error::OutOfBand { what, value: raw, lo, hi });
        }
    }
    Ok([u, v])
}

pub fn denormalize_screen(s: &QuadSides, uv: [f64; 2]) -> DiagonalPair {
    let w = 2.0 * s.a;
    DiagonalPair { x: s.b - s.a + uv[0] * w, y: s.d - s.a + uv[1] * w }
}

/// Normalization without the bounds check, for curves on non-square screens.
pub fn normalize_unchecked(s: &QuadSides, p: [f64; 2]) -> [f64; 2] {
    let w = 2.0 * s.a;
    [(p[0] - (s.b - s.a)) / w, (p[1] - (s.d - s.a)) / w]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateLabel {
    N,
    S,
    E,
    W,
}

impl GateLabel {
    pub const ALL: [GateLabel; 4] = [GateLabel::N, GateLabel::S, GateLabel::E, GateLabel::W];

    pub fn as_str(self) -> &'static str {
        match self {
            GateLabel::N => "N",
            GateLabel::S => "S",
            GateLabel::E => "E",
            GateLabel::W => "W",
        }
    }
}

impl std::fmt::Display for GateLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GatePoint {
    pub gate: GateLabel,
    pub x: f64,
    pub y: f64,
}

/// Points where the caustic touches the ends of the diagonal bands.
///
/// W and E sit at `x_min` and `x_max`, S and N at `y_min` and `y_max`. A band
/// starting at zero length is touched twice (both branches reach it); the
/// second touch is kept in `points` only when its branch does not run along
/// the screen edge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gates {
    #[serde(rename = "y_W")]
    pub y_w: f64,
    #[serde(rename = "y_E")]
    pub y_e: f64,
    #[serde(rename = "x_S")]
    pub x_s: f64,
    #[serde(rename = "x_N")]
    pub x_n: f64,
    /// Every gate point, primary ones first in N, S, E, W order.
    pub points: Vec<GatePoint>,
}

impl Gates {
    pub fn points_of(&self, gate: GateLabel) -> impl Iterator<Item = &GatePoint> {
        self.points.iter().filter(move |p| p.gate == gate)
    }

    pub fn primary(&self, gate: GateLabel) -> GatePoint {
        *self.points_of(gate).next().expect("each gate has a primary point")
    }
}

/// Values at which the caustic meets the band end `t` of `axis`.
fn gate_values(s: &QuadSides, axis: Axis, t: f64) -> Vec<f64> {
    let br = caustic_branches(s, axis, t).expect("band ends are feasible");
    if (br.upper - br.lower).abs() <= REL_TOL * br.upper.max(1.0) {
        return vec![(br.upper + br.lower) / 2.0];
    }
    // two touches: drop a branch that lies along the screen edge throughout
    let (lo, hi) = diagonal_band(s, axis);
    let mid = caustic_branches(s, axis, (lo + hi) / 2.0).expect("band midpoint is feasible");
    let (olo, ohi) = diagonal_band(s, axis.other());
    let tol = REL_TOL * ohi.max(1.0);
    let mut out = Vec::new();
    if (mid.upper - ohi).abs() > tol {
        out.push(br.upper);
    }
    if (mid.lower - olo).abs() > tol {
        out.push(br.lower);
    }
    if out.is_empty() {
        out.push(br.upper);
    }
    out
}

/// Gate coordinates, evaluated on the true band ends. Where the square screen
/// holds these are the closed forms at `x = b -+ a` and `y = d -+ a`.
pub fn gates(s: &QuadSides) -> Gates {
    let b = screen_bounds(s);
    let n = gate_values(s, Axis::Y, b.y_max);
    let so = gate_values(s, Axis::Y, b.y_min);
    let e = gate_values(s, Axis::X, b.x_max);
    let w = gate_values(s, Axis::X, b.x_min);

    let mut points = vec![
        GatePoint { gate: GateLabel::N, x: n[0], y: b.y_max },
        GatePoint { gate: GateLabel::S, x: so[0], y: b.y_min },
        GatePoint { gate: GateLabel::E, x: b.x_max, y: e[0] },
        GatePoint { gate: GateLabel::W, x: b.x_min, y: w[0] },
    ];
    points.extend(n.iter().skip(1).map(|&x| GatePoint { gate: GateLabel::N, x, y: b.y_max }));
    points.extend(so.iter().skip(1).map(|&x| GatePoint { gate: GateLabel::S, x, y: b.y_min }));
    points.extend(e.iter().skip(1).map(|&y| GatePoint { gate: GateLabel::E, x: b.x_max, y }));
    points.extend(w.iter().skip(1).map(|&y| GatePoint { gate: GateLabel::W, x: b.x_min, y }));
    Gates { y_w: w[0], y_e: e[0], x_s: so[0], x_n: n[0], points }
}

/// Two gates meeting at one point of the screen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coalescence {
    pub first: GateLabel,
    pub second: GateLabel,
}

impl Coalescence {
    /// `N=W` style label.
    pub fn label(&self) -> String {
        format!("{}={}", self.first, self.second)
    }

    /// Corner name such as `NW`, or the joined labels for opposite gates.
    pub fn corner(&self) -> String {
        format!("{}{}", self.first, self.second)
    }
}

/// Gate pairs whose points coincide within [`COINCIDENCE_TOL`] normalized
/// units.
pub fn coalescences(s: &QuadSides, g: &Gates) -> Vec<Coalescence> {
    use GateLabel::*;
    let w = 2.0 * s.a;
    let pairs = [(N, W), (S, E), (S, W), (N, E), (N, S), (E, W)];
    pairs
        .into_iter()
        .filter(|&(p, q)| {
            g.points_of(p).any(|u| g.points_of(q).any(|v| ((u.x - v.x) / w).hypot((u.y - v.y) / w) <= COINCIDENCE_TOL))
        })
        .map(|(first, second)| Coalescence { first, second })
        .collect()
}
