//! Planar four-bar position analysis and configuration-cycle tracing.
//!
//! The ground link lies on the positive horizontal axis from the origin. The
//! input link pivots at the origin with crank angle `theta` measured from the
//! ground direction; the output link pivots at `(g, 0)`. The coupler joint is
//! found by intersecting a circle of radius `h` about the input tip with one
//! of radius `b_out` about the output pivot.
//!
//! Vertices are stored in quadrilateral order `V_ab, V_bc, V_cd, V_da`, where
//! `V_ab` joins sides `a` and `b`. Diagonal `x` joins `V_da` and `V_bc`,
//! diagonal `y` joins `V_ab` and `V_cd`.

use std::f64::consts::{PI, TAU};

use serde::Serialize;

use crate::classification::{classify_case, grashof_test, Movement, ReggeVariables};
use crate::error::{Error, Result};
use crate::geometry::{screen_bounds, Axis, DiagonalPair, GateLabel, ScreenBounds};
use crate::sides::{Label, QuadSides};

pub type Point = [f64; 2];

fn sub(p: Point, q: Point) -> Point {
    [p[0] - q[0], p[1] - q[1]]
}

fn dist(p: Point, q: Point) -> f64 {
    (p[0] - q[0]).hypot(p[1] - q[1])
}

fn cross(o: Point, p: Point, q: Point) -> f64 {
    (p[0] - o[0]) * (q[1] - o[1]) - (p[1] - o[1]) * (q[0] - o[0])
}

/// Roles of the four sides: ground, input, coupler (floating) and output.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LinkageAssignment {
    pub ground: Label,
    pub input: Label,
    pub coupler: Label,
    pub output: Label,
    pub g: f64,
    pub a_in: f64,
    pub h: f64,
    pub b_out: f64,
    /// Side lengths by label.
    pub sides: [f64; 4],
}

impl LinkageAssignment {
    /// `input` must share a joint with `ground`; the coupler is the side
    /// opposite the ground.
    pub fn new(sides: &QuadSides, ground: Label, input: Label) -> Result<Self> {
        if !ground.is_adjacent(input) {
            return Err(Error::InvalidAssignment { ground, input });
        }
        let coupler = ground.opposite();
        let output = input.opposite();
        Ok(LinkageAssignment {
            ground,
            input,
            coupler,
            output,
            g: sides.get(ground),
            a_in: sides.get(input),
            h: sides.get(coupler),
            b_out: sides.get(output),
            sides: sides.as_array(),
        })
    }

    /// Grounds `ground` and drives the alphabetically first of its neighbors.
    pub fn with_ground(sides: &QuadSides, ground: Label) -> Self {
        Self::new(sides, ground, ground.neighbors()[0]).expect("neighbors are adjacent")
    }

    /// Same ground, with the input and output links exchanged.
    pub fn swapped(&self) -> Self {
        LinkageAssignment { input: self.output, output: self.input, a_in: self.b_out, b_out: self.a_in, ..*self }
    }

    pub fn quad_sides(&self) -> QuadSides {
        QuadSides::from_array(self.sides).expect("assignment built from valid sides")
    }

    fn scale(&self) -> f64 {
        self.g.max(self.a_in).max(self.h).max(self.b_out)
    }

    /// Distance from the input tip to the output pivot at crank angle `theta`.
    pub fn floating_diagonal(&self, theta: f64) -> f64 {
        (self.g * self.g + self.a_in * self.a_in - 2.0 * self.g * self.a_in * theta.cos()).max(0.0).sqrt()
    }

    fn coupler_band(&self) -> (f64, f64) {
        ((self.h - self.b_out).abs(), self.h + self.b_out)
    }

    fn feasible(&self, theta: f64) -> bool {
        let f = self.floating_diagonal(theta);
        let (lo, hi) = self.coupler_band();
        let tol = 1e-12 * self.scale();
        f >= lo - tol && f <= hi + tol
    }

    /// Vertex index of the joint between two adjacent sides.
    fn joint(l1: Label, l2: Label) -> usize {
        if (l1.index() + 1) % 4 == l2.index() {
            l1.index()
        } else {
            l2.index()
        }
    }

    /// Vertex indices of (ground pivot, input tip, coupler joint, output pivot).
    fn joint_indices(&self) -> [usize; 4] {
        [
            Self::joint(self.ground, self.input),
            Self::joint(self.input, self.coupler),
            Self::joint(self.coupler, self.output),
            Self::joint(self.output, self.ground),
        ]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// Coupler joint to the left of the line from input tip to output pivot.
    ElbowUp,
    ElbowDown,
}

impl Branch {
    pub fn other(self) -> Branch {
        match self {
            Branch::ElbowUp => Branch::ElbowDown,
            Branch::ElbowDown => Branch::ElbowUp,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Convex,
    Concave,
    Biconcave,
    Degenerate,
}

impl std::fmt::Display for Shape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Shape::Convex => "convex",
            Shape::Concave => "concave",
            Shape::Biconcave => "biconcave",
            Shape::Degenerate => "degenerate",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Configuration {
    pub theta: f64,
    /// `V_ab, V_bc, V_cd, V_da`.
    pub vertices: [Point; 4],
    pub branch: Branch,
    pub diagonals: DiagonalPair,
    pub signed_area: f64,
    pub shape: Shape,
    /// Sign of the signed area; zero for flat configurations.
    pub chirality: i8,
    /// Coupler and output links aligned (tangential circle intersection).
    pub singular: bool,
}

impl Configuration {
    fn from_vertices(theta: f64, vertices: [Point; 4], branch: Branch, singular: bool) -> Self {
        let diagonals = DiagonalPair { x: dist(vertices[3], vertices[1]), y: dist(vertices[0], vertices[2]) };
        let signed_area = shoelace(&vertices);
        let scale2 = vertex_scale(&vertices).powi(2);
        let chirality = if signed_area.abs() <= 1e-9 * scale2 { 0 } else { signed_area.signum() as i8 };
        let mut cfg = Configuration {
            theta,
            vertices,
            branch,
            diagonals,
            signed_area,
            shape: Shape::Degenerate,
            chirality,
            singular,
        };
        cfg.shape = shape_classify(&cfg);
        cfg
    }

    /// Signed areas of the four vertex triangles, indexed by the omitted
    /// vertex. Omitting `V_ab` or `V_cd` leaves a triad on `x`; omitting
    /// `V_bc` or `V_da` leaves a triad on `y`.
    pub fn triad_areas(&self) -> [f64; 4] {
        let v = &self.vertices;
        [cross(v[1], v[2], v[3]), cross(v[0], v[2], v[3]), cross(v[0], v[1], v[3]), cross(v[0], v[1], v[2])]
    }

    fn wrap(theta: f64) -> f64 {
        let t = theta.rem_euclid(TAU);
        if t > PI {
            t - TAU
        } else {
            t
        }
    }
}

fn shoelace(v: &[Point; 4]) -> f64 {
    (0..4).map(|i| v[i][0] * v[(i + 1) % 4][1] - v[(i + 1) % 4][0] * v[i][1]).sum::<f64>() / 2.0
}

fn vertex_scale(v: &[Point; 4]) -> f64 {
    let mut m: f64 = 0.0;
    for i in 0..4 {
        for j in i + 1..4 {
            m = m.max(dist(v[i], v[j]));
        }
    }
    m.max(f64::MIN_POSITIVE)
}

/// Convex, concave or biconcave by the number of diagonals that separate the
/// other two vertices; degenerate when any three vertices are collinear.
pub fn shape_classify(cfg: &Configuration) -> Shape {
    let v = &cfg.vertices;
    let tol = 1e-9 * vertex_scale(v).powi(2);
    if cfg.triad_areas().iter().any(|t| t.abs() <= tol) {
        return Shape::Degenerate;
    }
    let inner =
        (0..2).filter(|&i| cross(v[i], v[i + 2], v[i + 1]) * cross(v[i], v[i + 2], v[(i + 3) % 4]) < 0.0).count();
    match inner {
        2 => Shape::Convex,
        1 => Shape::Concave,
        _ => Shape::Biconcave,
    }
}

/// Places the four joints for one crank angle and branch.
pub fn solve_position(asg: &LinkageAssignment, theta: f64, branch: Branch) -> Result<Configuration> {
    let candidates = coupler_candidates(asg, theta)?;
    let p = match candidates {
        Candidates::Two { up, down, singular } => {
            let p = if branch == Branch::ElbowUp { up } else { down };
            return Ok(place(asg, theta, p, branch, singular));
        }
        // flat fold with the input tip on the output pivot: any joint on the
        // output circle closes; take the one along the input direction
        Candidates::Circle { center, radius } => [center[0] + radius * theta.cos(), center[1] + radius * theta.sin()],
    };
    Ok(place(asg, theta, p, branch, true))
}

enum Candidates {
    Two { up: Point, down: Point, singular: bool },
    Circle { center: Point, radius: f64 },
}

fn coupler_candidates(asg: &LinkageAssignment, theta: f64) -> Result<Candidates> {
    let scale = asg.scale();
    let tip = [asg.a_in * theta.cos(), asg.a_in * theta.sin()];
    let pivot = [asg.g, 0.0];
    let [dx, dy] = sub(pivot, tip);
    let f = dx.hypot(dy);
    let (lo, hi) = asg.coupler_band();
    let tol = 1e-9 * scale;
    if f < lo - tol || f > hi + tol {
        return Err(Error::InfeasibleAngle { theta, f, lo, hi });
    }
    if f <= 1e-12 * scale {
        return Ok(Candidates::Circle { center: pivot, radius: asg.b_out });
    }
    let (h, o) = (asg.h, asg.b_out);
    let m = (h * h - o * o + f * f) / (2.0 * f);
    let q = (h * h - m * m).max(0.0).sqrt();
    let mid = [tip[0] + m * dx / f, tip[1] + m * dy / f];
    let n = [-dy / f, dx / f];
    Ok(Candidates::Two {
        up: [mid[0] + q * n[0], mid[1] + q * n[1]],
        down: [mid[0] - q * n[0], mid[1] - q * n[1]],
        singular: q <= 1e-6 * scale,
    })
}

fn place(asg: &LinkageAssignment, theta: f64, coupler_joint: Point, branch: Branch, singular: bool) -> Configuration {
    let [iv_ground, iv_tip, iv_joint, iv_pivot] = asg.joint_indices();
    let mut v = [[0.0; 2]; 4];
    v[iv_ground] = [0.0, 0.0];
    v[iv_tip] = [asg.a_in * theta.cos(), asg.a_in * theta.sin()];
    v[iv_joint] = coupler_joint;
    v[iv_pivot] = [asg.g, 0.0];
    Configuration::from_vertices(Configuration::wrap(theta), v, branch, singular)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AngleLimits {
    pub full_circle: bool,
    /// For a rocker that reaches neither `0` nor `pi` this is the upper
    /// interval; its mirror `[-theta_max, -theta_min]` is also feasible.
    pub theta_min: f64,
    pub theta_max: f64,
    pub includes_zero: bool,
    pub includes_pi: bool,
}

impl AngleLimits {
    pub fn movement(&self) -> Movement {
        Movement::from_reach(self.includes_zero, self.includes_pi)
    }
}

/// Crank angles for which the coupler and output can close the loop.
pub fn input_angle_limits(asg: &LinkageAssignment) -> Result<AngleLimits> {
    let (g, a) = (asg.g, asg.a_in);
    let (lo, hi) = asg.coupler_band();
    let c_lo = (g * g + a * a - hi * hi) / (2.0 * g * a);
    let c_hi = (g * g + a * a - lo * lo) / (2.0 * g * a);
    let tol = 1e-12;
    if c_lo > 1.0 + tol || c_hi < -1.0 - tol {
        return Err(Error::NoFeasibleAngle);
    }
    let includes_zero = c_hi >= 1.0 - tol;
    let includes_pi = c_lo <= -1.0 + tol;
    let acos = |c: f64| c.clamp(-1.0, 1.0).acos();
    let (theta_min, theta_max) = match (includes_zero, includes_pi) {
        (true, true) => (-PI, PI),
        (true, false) => (-acos(c_lo), acos(c_lo)),
        (false, true) => (acos(c_hi), TAU - acos(c_hi)),
        (false, false) => (acos(c_hi), acos(c_lo)),
    };
    Ok(AngleLimits { full_circle: includes_zero && includes_pi, theta_min, theta_max, includes_zero, includes_pi })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MovementReport {
    pub input: Movement,
    pub output: Movement,
    pub table_input: Movement,
    pub table_output: Movement,
    /// Geometric movements equal the table row for these side labels.
    pub agrees_with_table: bool,
}

/// Input and output movement types for this ground choice, compared with the
/// 27-case table row of the side labels.
pub fn movement_types(asg: &LinkageAssignment) -> Result<MovementReport> {
    let input = input_angle_limits(asg)?.movement();
    let output = input_angle_limits(&asg.swapped())?.movement();
    let rv = ReggeVariables::from_array(asg.sides);
    let case = classify_case(&rv, grashof_test(asg.sides));
    Ok(MovementReport {
        input,
        output,
        table_input: case.input_movement,
        table_output: case.output_movement,
        agrees_with_table: input == case.input_movement && output == case.output_movement,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceSample {
    /// Cumulative input-angle traversal from the start.
    pub path: f64,
    pub config: Configuration,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GateEvent {
    pub theta: f64,
    pub path: f64,
    pub gate: GateLabel,
    /// Both diagonals at band ends: the linkage lies flat on one line.
    pub fold: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChiralityProfile {
    SingleChiralityPerBranch,
    BothChiralitiesOnOnePath,
    /// Every sample is flat.
    Flat,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceOptions {
    pub samples_per_turn: usize,
    /// `None` starts on the branch with the larger enclosed area.
    pub start_branch: Option<Branch>,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions { samples_per_turn: 720, start_branch: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceReport {
    pub assignment: LinkageAssignment,
    pub samples: Vec<TraceSample>,
    pub theta_range: AngleLimits,
    pub movement_input: Movement,
    pub movement_output: Movement,
    pub gate_events: Vec<GateEvent>,
    /// `2 pi` times the number of passes through the E gate.
    pub cycle_period: f64,
    pub chirality_profile: ChiralityProfile,
    pub input_traversal: f64,
    /// Rocker limits located by bisection, in the order reached.
    pub limit_angles: Vec<f64>,
    /// Flat fold configurations met on the way.
    pub fold_events: usize,
    /// A tangential or fully folded crossing was continued by extrapolating
    /// the joint path rather than by a physical rule.
    pub continued_by_extrapolation: bool,
    pub start_branch: Branch,
}

impl TraceReport {
    pub fn screen_path(&self) -> Vec<[f64; 2]> {
        self.samples.iter().map(|s| [s.config.diagonals.x, s.config.diagonals.y]).collect()
    }

    /// Period as a multiple of a full turn.
    pub fn turns(&self) -> f64 {
        self.cycle_period / TAU
    }

    /// Gates and intermediate shapes in path order, with repeats collapsed.
    pub fn shape_sequence(&self) -> Vec<ShapeStep> {
        let mut items: Vec<(f64, u8, ShapeStep)> = Vec::new();
        for s in &self.samples {
            if s.config.shape != Shape::Degenerate {
                items.push((s.path, 1, ShapeStep::Shape(s.config.shape)));
            }
        }
        for e in &self.gate_events {
            items.push((e.path, 0, ShapeStep::Gate(e.gate)));
        }
        items.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.cmp(&q.1)));
        let mut out: Vec<ShapeStep> = Vec::new();
        for (_, _, step) in items {
            if out.last() != Some(&step) {
                out.push(step);
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ShapeStep {
    Gate(GateLabel),
    Shape(Shape),
}

struct Tracer<'a> {
    asg: &'a LinkageAssignment,
    scale: f64,
    samples: Vec<TraceSample>,
    limit_angles: Vec<f64>,
    extrapolated: bool,
}

impl Tracer<'_> {
    /// Angle of the nearest tangential or flat-fold crossing in `(from, to]`.
    fn special_between(&self, from: f64, to: f64) -> Option<f64> {
        let (lo, hi) = self.asg.coupler_band();
        let tol = 1e-9 * self.scale;
        let (a, b) = if from < to { (from, to) } else { (to, from) };
        let mut best: Option<f64> = None;
        let k0 = (a / PI).floor() as i64;
        let k1 = (b / PI).ceil() as i64;
        for k in k0..=k1 {
            let t = k as f64 * PI;
            let inside = if from < to { t > from && t <= to } else { t < from && t >= to };
            if !inside {
                continue;
            }
            let f = self.asg.floating_diagonal(t);
            if ((f - lo).abs() <= tol || (f - hi).abs() <= tol)
                && best.is_none_or(|b0| (t - from).abs() < (b0 - from).abs())
            {
                best = Some(t);
            }
        }
        best
    }

    /// Joint position predicted by linear extrapolation to angle `theta`.
    fn predict(&self, theta: f64) -> Option<Point> {
        let n = self.samples.len();
        if n < 2 {
            return None;
        }
        let idx = self.asg.joint_indices()[2];
        let (p1, p0) = (&self.samples[n - 1], &self.samples[n - 2]);
        let (t1, t0) = (p1.path, p0.path);
        let dt = (theta - self.last_theta()).abs();
        let ratio = if t1 > t0 { dt / (t1 - t0) } else { 1.0 };
        let (v1, v0) = (p1.config.vertices[idx], p0.config.vertices[idx]);
        Some([v1[0] + (v1[0] - v0[0]) * ratio, v1[1] + (v1[1] - v0[1]) * ratio])
    }

    fn last_theta(&self) -> f64 {
        self.samples.last().map(|s| s.config.theta).unwrap_or(0.0)
    }

    /// Solves at `theta`, picking the candidate nearest the extrapolated path.
    fn solve_nearest(&mut self, theta: f64, branch: Branch) -> Result<Configuration> {
        let Some(pred) = self.predict(theta) else {
            return solve_position(self.asg, theta, branch);
        };
        self.extrapolated = true;
        match coupler_candidates(self.asg, theta)? {
            Candidates::Two { up, down, singular } => {
                let (p, b) =
                    if dist(up, pred) <= dist(down, pred) { (up, Branch::ElbowUp) } else { (down, Branch::ElbowDown) };
                Ok(place(self.asg, theta, p, b, singular))
            }
            Candidates::Circle { center, radius } => {
                // the approach direction forces the joint onto the input line
                let u = [radius * theta.cos(), radius * theta.sin()];
                let fwd = [center[0] + u[0], center[1] + u[1]];
                let back = [center[0] - u[0], center[1] - u[1]];
                let p = if dist(fwd, pred) <= dist(back, pred) { fwd } else { back };
                Ok(place(self.asg, theta, p, branch, true))
            }
        }
    }

    /// Boundary between a feasible `good` angle and an infeasible `bad` one.
    fn bisect_limit(&self, mut good: f64, mut bad: f64) -> f64 {
        for _ in 0..200 {
            let mid = 0.5 * (good + bad);
            if mid == good || mid == bad {
                break;
            }
            if self.asg.feasible(mid) {
                good = mid;
            } else {
                bad = mid;
            }
        }
        good
    }
}

/// Follows the linkage from a feasible start until the initial configuration
/// recurs with the same direction of motion.
///
/// At a rocker limit the crank reverses and the coupler joint passes to the
/// other branch. Tangential touches and flat folds of boundary linkages are
/// crossed by choosing the joint position closest to the linear
/// extrapolation of the path.
pub fn trace_cycle(asg: &LinkageAssignment, opts: TraceOptions) -> Result<TraceReport> {
    let per_turn = opts.samples_per_turn.max(16);
    let step = TAU / per_turn as f64;
    let limits = input_angle_limits(asg)?;
    let bounds = screen_bounds(&asg.quad_sides());
    let mut tr = Tracer { asg, scale: asg.scale(), samples: Vec::new(), limit_angles: Vec::new(), extrapolated: false };

    let mut theta0 = if limits.full_circle { PI } else { 0.5 * (limits.theta_min + limits.theta_max) };
    if tr.special_between(theta0 - 1e-9, theta0 + 1e-9).is_some() {
        theta0 += 0.5 * step;
    }
    let start_branch = match opts.start_branch {
        Some(b) => b,
        None => {
            let up = solve_position(asg, theta0, Branch::ElbowUp)?;
            let down = solve_position(asg, theta0, Branch::ElbowDown)?;
            if down.signed_area.abs() > up.signed_area.abs() * (1.0 + 1e-9) {
                Branch::ElbowDown
            } else {
                Branch::ElbowUp
            }
        }
    };
    let first = solve_position(asg, theta0, start_branch)?;
    let start_joint = first.vertices[asg.joint_indices()[2]];
    tr.samples.push(TraceSample { path: 0.0, config: first });

    let mut theta = theta0;
    let mut dir = 1.0;
    let mut branch = start_branch;
    let mut path = 0.0;
    let mut pending_extrapolation = false;
    let max_path = 4.0 * TAU;
    // current step; halved while a link turns faster than the crank
    let mut h = step;

    let closing = loop {
        if path > max_path {
            return Err(Error::NonConvergentCycle { turns: 4 });
        }
        let target = theta + dir * h;
        let special = tr.special_between(theta, target);
        // next crossing of the start angle in the starting direction
        let restart = if dir > 0.0 && path > 0.0 {
            let k = ((theta - theta0) / TAU).floor() + 1.0;
            let t = theta0 + k * TAU;
            // tolerance absorbs rounding accumulated over many steps
            (t <= target + 1e-9 * step).then_some(t)
        } else {
            None
        };
        let mut next = target;
        if let Some(s) = special {
            next = s;
        }
        if let Some(r) = restart {
            if special.is_none_or(|s| (r - theta).abs() <= (s - theta).abs()) {
                next = r;
            }
        }
        let is_restart = restart == Some(next);
        let is_special = special == Some(next) && !is_restart;

        if !asg.feasible(next) {
            let lim = tr.bisect_limit(theta, next);
            path += (lim - theta).abs();
            let cfg = solve_position(asg, lim, branch)?;
            tr.samples.push(TraceSample { path, config: cfg });
            tr.limit_angles.push(Configuration::wrap(lim));
            theta = lim;
            dir = -dir;
            branch = branch.other();
            h = step;
            continue;
        }

        let cfg = if pending_extrapolation || is_special {
            tr.solve_nearest(next, branch)?
        } else {
            solve_position(asg, next, branch)?
        };
        let last = &tr.samples.last().expect("trace starts with one sample").config;
        if !is_special && !pending_extrapolation && h > 1e-6 * step && link_turn(asg, last, &cfg) > step {
            h *= 0.5;
            continue;
        }
        branch = cfg.branch;
        path += (next - theta).abs();
        pending_extrapolation = is_special;
        theta = next;
        h = (2.0 * h).min(step);

        if is_restart {
            let joint = cfg.vertices[asg.joint_indices()[2]];
            if dist(joint, start_joint) <= 1e-6 * tr.scale {
                break TraceSample { path, config: cfg };
            }
        }
        tr.samples.push(TraceSample { path, config: cfg });
    };

    // the closing step back onto the start can still cross a gate
    let mut walk = tr.samples.clone();
    walk.push(closing);
    let mut gate_events = locate_gate_events(&tr, &walk, &bounds);
    // events at the closing point repeat those of the start sample
    gate_events.retain(|e| e.path < closing.path - 1e-9 * TAU);
    gate_events.sort_by(|p, q| p.path.total_cmp(&q.path).then(p.gate.cmp(&q.gate)));
    let e_passes = gate_events.iter().filter(|e| e.gate == GateLabel::E).count();
    let fold_events = count_folds(&gate_events);
    let (pos, neg) = tr.samples.iter().fold((0, 0), |(p, n), s| match s.config.chirality {
        1 => (p + 1, n),
        -1 => (p, n + 1),
        _ => (p, n),
    });
    let chirality_profile = match (pos > 0, neg > 0) {
        (true, true) => ChiralityProfile::BothChiralitiesOnOnePath,
        (false, false) => ChiralityProfile::Flat,
        _ => ChiralityProfile::SingleChiralityPerBranch,
    };
    let movement_output = input_angle_limits(&asg.swapped())?.movement();
    Ok(TraceReport {
        assignment: *asg,
        samples: tr.samples,
        theta_range: limits,
        movement_input: limits.movement(),
        movement_output,
        gate_events,
        cycle_period: TAU * e_passes as f64,
        chirality_profile,
        input_traversal: path,
        limit_angles: tr.limit_angles,
        fold_events,
        continued_by_extrapolation: tr.extrapolated,
        start_branch,
    })
}

/// Largest rotation of the coupler or output link between two configurations.
fn link_turn(asg: &LinkageAssignment, c0: &Configuration, c1: &Configuration) -> f64 {
    let [_, tip, joint, pivot] = asg.joint_indices();
    let angle = |c: &Configuration, from: usize| {
        let d = sub(c.vertices[joint], c.vertices[from]);
        d[1].atan2(d[0])
    };
    [tip, pivot]
        .into_iter()
        .map(|from| (angle(c1, from) - angle(c0, from) + PI).rem_euclid(TAU) - PI)
        .fold(0.0, |m, d| m.max(d.abs()))
}

fn count_folds(events: &[GateEvent]) -> usize {
    let mut paths: Vec<f64> = events.iter().filter(|e| e.fold).map(|e| e.path).collect();
    paths.dedup_by(|p, q| (*p - *q).abs() <= 1e-9);
    paths.len()
}

/// Gates met along the path: zeros of the triad areas, found at samples or
/// by bisection between samples of the same branch.
fn locate_gate_events(tr: &Tracer<'_>, samples: &[TraceSample], bounds: &ScreenBounds) -> Vec<GateEvent> {
    let asg = tr.asg;
    let tol = 1e-9 * tr.scale * tr.scale;
    let mut events: Vec<GateEvent> = Vec::new();

    for w in samples.windows(2) {
        let (s0, s1) = (&w[0], &w[1]);
        record_gates(&mut events, &s0.config, s0.path, None, bounds, tol);
        let (a0, a1) = (s0.config.triad_areas(), s1.config.triad_areas());
        // a segment ending at a singular sample lies on its regular end's branch
        let seg_branch = match (s0.config.singular, s1.config.singular) {
            (false, false) if s0.config.branch == s1.config.branch => Some(s0.config.branch),
            (false, true) => Some(s0.config.branch),
            (true, false) => Some(s1.config.branch),
            _ => None,
        };
        for i in 0..4 {
            if a0[i].abs() <= tol || a1[i].abs() <= tol || a0[i].signum() == a1[i].signum() {
                continue;
            }
            let Some(seg_branch) = seg_branch else {
                continue;
            };
            // the crank angle is monotone between consecutive samples
            let t0 = unwrap_near(s0.config.theta, s0.config.theta);
            let t1 = unwrap_near(s1.config.theta, t0);
            let (mut lo, mut hi) = (t0, t1);
            let sign0 = a0[i].signum();
            let mut root = None;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid == lo || mid == hi {
                    break;
                }
                let Ok(c) = solve_position(asg, mid, seg_branch) else { break };
                let v = c.triad_areas()[i];
                root = Some(c);
                if v.signum() == sign0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            if let Some(c) = root {
                let path = s0.path + (lo - t0).abs();
                let c = solve_position(asg, lo, seg_branch).unwrap_or(c);
                record_gates(&mut events, &c, path, Some(i), bounds, tol);
            }
        }
    }
    if let Some(last) = samples.last() {
        record_gates(&mut events, &last.config, last.path, None, bounds, tol);
    }
    events
}

/// Records the gates of a configuration whose triad areas vanish. A triad
/// located by bisection is counted even if its area is not quite zero.
fn record_gates(
    events: &mut Vec<GateEvent>,
    cfg: &Configuration,
    path: f64,
    root_triad: Option<usize>,
    bounds: &ScreenBounds,
    tol: f64,
) {
    let areas = cfg.triad_areas();
    let hit = |i: usize| root_triad == Some(i) || areas[i].abs() <= tol;
    let on_x = hit(0) || hit(2);
    let on_y = hit(1) || hit(3);
    let fold = on_x && on_y;
    let mut push = |gate: GateLabel| {
        if !events.iter().any(|e| e.gate == gate && (e.path - path).abs() <= 1e-9 * TAU) {
            events.push(GateEvent { theta: cfg.theta, path, gate, fold });
        }
    };
    if on_x {
        push(nearest_end(bounds, Axis::X, cfg.diagonals.x, GateLabel::W, GateLabel::E));
    }
    if on_y {
        push(nearest_end(bounds, Axis::Y, cfg.diagonals.y, GateLabel::S, GateLabel::N));
    }
}

fn unwrap_near(theta: f64, reference: f64) -> f64 {
    reference + (theta - reference + PI).rem_euclid(TAU) - PI
}

fn nearest_end(bounds: &ScreenBounds, axis: Axis, value: f64, low: GateLabel, high: GateLabel) -> GateLabel {
    let (lo, hi) = bounds.band(axis);
    if (value - lo).abs() <= (value - hi).abs() {
        low
    } else {
        high
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sides(a: f64, b: f64, c: f64, d: f64) -> QuadSides {
        QuadSides::new(a, b, c, d).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
    }

    #[test]
    fn square_linkage_at_right_angle() {
        let asg = LinkageAssignment::with_ground(&sides(100.0, 100.0, 100.0, 100.0), Label::A);
        let up = solve_position(&asg, PI / 2.0, Branch::ElbowUp).unwrap();
        let down = solve_position(&asg, PI / 2.0, Branch::ElbowDown).unwrap();
        // one branch is the square, the other folds the coupler back
        let square = if up.signed_area.abs() > down.signed_area.abs() { up } else { down };
        assert!(close(square.diagonals.x, 100.0 * 2f64.sqrt(), 1e-12));
        assert!(close(square.diagonals.y, 100.0 * 2f64.sqrt(), 1e-12));
        assert!(close(square.signed_area.abs(), 10000.0, 1e-12));
        assert_eq!(square.shape, Shape::Convex);
    }

    #[test]
    fn east_gate_of_general_case() {
        let asg = LinkageAssignment::new(&sides(30.0, 45.0, 60.0, 55.0), Label::B, Label::A).unwrap();
        assert_eq!((asg.coupler, asg.output), (Label::D, Label::C));
        let cfg = solve_position(&asg, PI, Branch::ElbowUp).unwrap();
        assert!(close(cfg.diagonals.x, 75.0, 1e-12));
        assert!(close(cfg.diagonals.y.powi(2), 1905.0, 1e-9));
        assert_eq!(cfg.shape, Shape::Degenerate);
    }

    #[test]
    fn conjugate_at_zero_angle() {
        let asg = LinkageAssignment::new(&sides(65.0, 50.0, 35.0, 40.0), Label::A, Label::B).unwrap();
        assert!(close(asg.floating_diagonal(0.0), 15.0, 1e-12));
        let up = solve_position(&asg, 0.0, Branch::ElbowUp).unwrap();
        let down = solve_position(&asg, 0.0, Branch::ElbowDown).unwrap();
        assert!(!up.singular);
        assert!(close(up.signed_area, -down.signed_area, 1e-9));
    }

    #[test]
    fn infeasible_angle_is_rejected() {
        let asg = LinkageAssignment::new(&sides(65.0, 50.0, 35.0, 40.0), Label::A, Label::B).unwrap();
        assert!(matches!(solve_position(&asg, PI, Branch::ElbowUp), Err(Error::InfeasibleAngle { .. })));
    }

    #[test]
    fn assignment_requires_adjacent_input() {
        let s = sides(30.0, 45.0, 60.0, 55.0);
        assert!(matches!(LinkageAssignment::new(&s, Label::A, Label::C), Err(Error::InvalidAssignment { .. })));
        let asg = LinkageAssignment::with_ground(&s, Label::B);
        assert_eq!(asg.input, Label::A);
        assert_eq!(LinkageAssignment::with_ground(&s, Label::A).input, Label::B);
    }

    #[test]
    fn angle_limit_examples() {
        let crank = LinkageAssignment::new(&sides(30.0, 45.0, 60.0, 55.0), Label::B, Label::A).unwrap();
        let l = input_angle_limits(&crank).unwrap();
        assert!(l.full_circle);
        assert_eq!(l.movement(), Movement::Crank);

        let rocker = LinkageAssignment::new(&sides(65.0, 50.0, 35.0, 40.0), Label::A, Label::B).unwrap();
        let l = input_angle_limits(&rocker).unwrap();
        assert!(close(l.theta_max, (11.0f64 / 65.0).acos(), 1e-12));
        assert!(l.includes_zero && !l.includes_pi);
        assert_eq!(l.movement(), Movement::ZeroRocker);

        let eq = LinkageAssignment::with_ground(&sides(100.0, 100.0, 100.0, 100.0), Label::A);
        assert!(input_angle_limits(&eq).unwrap().full_circle);
    }

    #[test]
    fn mirror_branches() {
        let asg = LinkageAssignment::new(&sides(30.0, 45.0, 60.0, 55.0), Label::B, Label::A).unwrap();
        for k in 0..36 {
            let t = k as f64 * TAU / 36.0;
            let up = solve_position(&asg, t, Branch::ElbowUp).unwrap();
            let mirror = solve_position(&asg, -t, Branch::ElbowDown).unwrap();
            assert!(close(up.signed_area, -mirror.signed_area, 1e-9));
            assert!(close(up.diagonals.x, mirror.diagonals.x, 1e-12));
            assert!(close(up.diagonals.y, mirror.diagonals.y, 1e-9));
        }
    }

    #[test]
    fn movement_cross_check_for_equilateral() {
        let asg = LinkageAssignment::with_ground(&sides(100.0, 100.0, 100.0, 100.0), Label::A);
        let m = movement_types(&asg).unwrap();
        assert_eq!((m.input, m.output), (Movement::Crank, Movement::Crank));
        assert!(m.agrees_with_table);
    }

    fn trace(s: [f64; 4], ground: Label, input: Label) -> TraceReport {
        let asg = LinkageAssignment::new(&QuadSides::from_array(s).unwrap(), ground, input).unwrap();
        trace_cycle(&asg, TraceOptions::default()).unwrap()
    }

    #[test]
    fn crank_cycle_of_general_case() {
        let r = trace([30.0, 45.0, 60.0, 55.0], Label::B, Label::A);
        assert!(close(r.cycle_period, TAU, 1e-12));
        assert!(r.limit_angles.is_empty());
        assert_eq!(r.fold_events, 0);
        use GateLabel::*;
        use Shape::*;
        let seq = r.shape_sequence();
        let expected = [
            ShapeStep::Gate(E),
            ShapeStep::Shape(Concave),
            ShapeStep::Gate(S),
            ShapeStep::Shape(Biconcave),
            ShapeStep::Gate(W),
            ShapeStep::Shape(Concave),
            ShapeStep::Gate(N),
            ShapeStep::Shape(Convex),
        ];
        assert_eq!(seq, expected);
        assert_eq!(r.chirality_profile, ChiralityProfile::SingleChiralityPerBranch);
    }

    #[test]
    fn rocker_cycle_of_conjugate_case() {
        let r = trace([65.0, 50.0, 35.0, 40.0], Label::A, Label::B);
        assert!(close(r.cycle_period, 2.0 * TAU, 1e-12));
        let expected = (11.0f64 / 65.0).acos();
        assert_eq!(r.limit_angles.len(), 2);
        for lim in &r.limit_angles {
            assert!((lim.abs() - expected).abs() < 1e-9);
        }
        assert_eq!(r.movement_input, Movement::ZeroRocker);
        assert_eq!(r.chirality_profile, ChiralityProfile::BothChiralitiesOnOnePath);
    }

    #[test]
    fn equilateral_cycle_passes_two_folds() {
        let r = trace([100.0; 4], Label::A, Label::B);
        assert!(close(r.cycle_period, TAU, 1e-12));
        assert_eq!(r.fold_events, 2);
        assert!(r.continued_by_extrapolation);
    }

    #[test]
    fn trace_stays_on_closed_linkage() {
        let r = trace([30.0, 45.0, 60.0, 55.0], Label::C, Label::B);
        for s in &r.samples {
            let v = &s.config.vertices;
            let lens = [dist(v[3], v[0]), dist(v[0], v[1]), dist(v[1], v[2]), dist(v[2], v[3])];
            for (l, want) in lens.iter().zip([30.0, 45.0, 60.0, 55.0]) {
                assert!(close(*l, want, 1e-9), "{l} vs {want}");
            }
        }
    }
}
