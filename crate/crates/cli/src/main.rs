//! `quadscreen` command-line front end.
//!
//! Exit codes: 0 on success, 2 for invalid input, 3 for I/O failures.

use std::f64::consts::TAU;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use quadscreen::classification::{
    classify_case, grashof_test, regge_conjugate, CaseReport, GrashofReport, ReggeVariables,
};
use quadscreen::geometry::{coalescences, gates, screen_bounds, GateLabel};
use quadscreen::kinematics::{
    movement_types, trace_cycle, Branch, ChiralityProfile, LinkageAssignment, TraceOptions, TraceReport,
};
use quadscreen::render::{
    build_screen, emit_csv, emit_json, emit_svg, fmt_trim, trace_csv_string, OutputFormat, RenderSpec,
    DEFAULT_RESOLUTION,
};
use quadscreen::symmetry::{symmetry_orbit, SixTuple};
use quadscreen::{Error, Label, QuadSides};

use serde::Serialize;

/// Writes a line to stdout. A closed pipe (e.g. `| head`) ends the process
/// quietly instead of panicking.
macro_rules! out {
    ($($arg:tt)*) => { emit(format_args!("{}\n", format_args!($($arg)*))) };
}

macro_rules! out_raw {
    ($($arg:tt)*) => { emit(format_args!($($arg)*)) };
}

fn emit(args: std::fmt::Arguments<'_>) {
    use std::io::Write;
    if let Err(e) = std::io::stdout().lock().write_fmt(args) {
        std::process::exit(if e.kind() == std::io::ErrorKind::BrokenPipe { 0 } else { 3 });
    }
}

#[derive(Parser)]
#[command(name = "quadscreen", version, about = "Quadrilateral diagonal screens, four-bar classification and traces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Regge variables, Grashof verdict, movement case and the conjugate quadruple.
    Classify {
        #[command(flatten)]
        sides: SidesArg,
        /// Keep the labels as given instead of relabeling canonically.
        #[arg(long)]
        no_canonical: bool,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Sample the screen and write it to files.
    Screen {
        #[command(flatten)]
        sides: SidesArg,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Gate coordinates and coalescences.
    Gates {
        #[command(flatten)]
        sides: SidesArg,
        #[arg(long)]
        canonical: bool,
    },
    /// Follow the four-bar linkage through one configuration cycle.
    Trace {
        #[command(flatten)]
        sides: SidesArg,
        /// Fixed link.
        #[arg(long)]
        ground: Label,
        /// Driven link; defaults to the first neighbor of the ground in label order.
        #[arg(long)]
        input: Option<Label>,
        #[arg(long, default_value_t = 720)]
        samples_per_turn: usize,
        /// Starting branch; by default the one enclosing the larger area.
        #[arg(long)]
        branch: Option<BranchArg>,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Size of the symmetry orbit of a six-tuple `a b x c d y`.
    Orbit {
        #[arg(num_args = 6, value_names = ["A", "B", "X", "C", "D", "Y"], allow_negative_numbers = true)]
        entries: Vec<f64>,
        /// Print every member as JSON.
        #[arg(long)]
        full: bool,
    },
}

#[derive(Args)]
struct SidesArg {
    /// Four side lengths in cyclic order a b c d.
    #[arg(num_args = 4, value_names = ["A", "B", "C", "D"], allow_negative_numbers = true, required = true)]
    sides: Vec<f64>,
}

impl SidesArg {
    fn raw(&self) -> [f64; 4] {
        [self.sides[0], self.sides[1], self.sides[2], self.sides[3]]
    }
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    resolution: usize,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = FormatArg::All)]
    format: FormatArg,
    /// Write coordinates mapped onto the unit square.
    #[arg(long)]
    normalized: bool,
    /// Relabel the sides canonically before computing.
    #[arg(long)]
    canonical: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Svg,
    Json,
    All,
}

impl FormatArg {
    fn formats(self) -> Vec<OutputFormat> {
        match self {
            FormatArg::Csv => vec![OutputFormat::Csv],
            FormatArg::Svg => vec![OutputFormat::Svg],
            FormatArg::Json => vec![OutputFormat::Json],
            FormatArg::All => vec![OutputFormat::Csv, OutputFormat::Svg, OutputFormat::Json],
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum BranchArg {
    Up,
    Down,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Io(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn run(cmd: Command) -> quadscreen::Result<()> {
    match cmd {
        Command::Classify { sides, no_canonical, json } => cmd_classify(sides.raw(), !no_canonical, json),
        Command::Screen { sides, output } => cmd_screen(sides.raw(), &output),
        Command::Gates { sides, canonical } => cmd_gates(sides.raw(), canonical),
        Command::Trace { sides, ground, input, samples_per_turn, branch, output } => {
            let branch = branch.map(|b| match b {
                BranchArg::Up => Branch::ElbowUp,
                BranchArg::Down => Branch::ElbowDown,
            });
            cmd_trace(sides.raw(), ground, input, samples_per_turn, branch, &output)
        }
        Command::Orbit { entries, full } => cmd_orbit(&entries, full),
    }
}

fn tuple(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|&x| fmt_trim(x)).collect();
    format!("({})", parts.join(", "))
}

/// Parses the sides and echoes the relabeling, if any.
fn load_sides(raw: [f64; 4], canonical: bool) -> quadscreen::Result<QuadSides> {
    load_sides_quiet(raw, canonical, false)
}

fn load_sides_quiet(raw: [f64; 4], canonical: bool, quiet: bool) -> quadscreen::Result<QuadSides> {
    let canon = QuadSides::canonicalize(raw)?;
    if canonical {
        let from: Vec<String> = canon.original_order.iter().map(|&i| Label::from_index(i).to_string()).collect();
        if quiet {
            return Ok(canon);
        }
        out!("canonical order: {} taken from input positions ({})", tuple(&canon.as_array()), from.join(", "));
        Ok(canon)
    } else {
        let q = QuadSides::from_array(raw)?;
        if !q.canonical && !quiet {
            out!("input order kept; canonical order would be {}", tuple(&canon.as_array()));
        }
        Ok(q)
    }
}

#[derive(Serialize)]
struct ClassifyReport {
    sides: QuadSides,
    regge: ReggeVariables,
    case: CaseReport,
    conjugate: ConjugateReport,
}

#[derive(Serialize)]
struct ConjugateReport {
    sides: QuadSides,
    regge: ReggeVariables,
    case: CaseReport,
}

fn grashof_text(g: &GrashofReport) -> String {
    if g.boundary {
        format!("{} (boundary)", g.satisfied)
    } else {
        g.satisfied.to_string()
    }
}

fn cmd_classify(raw: [f64; 4], canonical: bool, json: bool) -> quadscreen::Result<()> {
    // in JSON mode the relabeling is carried by `original_order`
    let q = load_sides_quiet(raw, canonical, json)?;
    let rv = ReggeVariables::from_sides(&q);
    let case = classify_case(&rv, grashof_test(q.as_array()));
    let conj = regge_conjugate(&q)?;
    let crv = ReggeVariables::from_sides(&conj);
    let ccase = classify_case(&crv, grashof_test(conj.as_array()));
    if json {
        let report = ClassifyReport {
            sides: q,
            regge: rv,
            case,
            conjugate: ConjugateReport { sides: conj, regge: crv, case: ccase },
        };
        out_raw!("{}", quadscreen::render::json_string(&report)?);
        return Ok(());
    }
    out!("sides (a, b, c, d) = {}", tuple(&q.as_array()));
    out!("s = {}, r = {}, u = {}, v = {}", fmt_trim(rv.s), fmt_trim(rv.r), fmt_trim(rv.u), fmt_trim(rv.v));
    out!("T0..T3 = {}", tuple(&[rv.t0, rv.t1, rv.t2, rv.t3]));
    out!("Grashof: {}", grashof_text(&case.grashof));
    out!("case {}", case.case_id);
    out!("input {}, output {}", case.input_movement, case.output_movement);
    out!("conjugate {}: Grashof {}, case {}", tuple(&conj.as_array()), grashof_text(&ccase.grashof), ccase.case_id);
    Ok(())
}

fn bounds_line(q: &QuadSides) -> String {
    let b = screen_bounds(q);
    format!("x ∈ [{},{}], y ∈ [{},{}]", fmt_trim(b.x_min), fmt_trim(b.x_max), fmt_trim(b.y_min), fmt_trim(b.y_max))
}

fn coalescence_line(labels: &[String], corners: &[String]) -> String {
    if labels.is_empty() {
        return "coalescences: none".to_string();
    }
    let parts: Vec<String> = labels.iter().zip(corners).map(|(l, c)| format!("{l} ({c})")).collect();
    format!("coalescences: {}", parts.join(", "))
}

fn ensure_dir(dir: &Path) -> quadscreen::Result<()> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

fn write_screen(
    q: &QuadSides,
    output: &OutputArgs,
    overlay: Option<TraceReport>,
    stem: &str,
) -> quadscreen::Result<()> {
    let mut spec = RenderSpec::new(output.resolution, OutputFormat::Svg, output.normalized)?;
    if let Some(t) = overlay {
        spec = spec.with_overlay(t);
    }
    let sg = build_screen(q, &spec)?;
    ensure_dir(&output.out)?;
    for fmt in output.format.formats() {
        let path = output.out.join(format!("{stem}.{}", fmt.extension()));
        match fmt {
            OutputFormat::Csv => emit_csv(&sg, &path)?,
            OutputFormat::Svg => emit_svg(&sg, &path)?,
            OutputFormat::Json => emit_json(&sg, &path)?,
        }
        out!("wrote {}", path.display());
    }
    if sg.square_warning() {
        out!("warning: bands differ from the 2a square; normalized points may leave [0,1]");
    }
    Ok(())
}

fn cmd_screen(raw: [f64; 4], output: &OutputArgs) -> quadscreen::Result<()> {
    let q = load_sides(raw, output.canonical)?;
    out!("{}", bounds_line(&q));
    let g = gates(&q);
    let co = coalescences(&q, &g);
    let labels: Vec<String> = co.iter().map(|c| c.label()).collect();
    let corners: Vec<String> = co.iter().map(|c| c.corner()).collect();
    out!("{}", coalescence_line(&labels, &corners));
    let tol = 1e-12 * q.longest();
    let piero = (q.a - q.c).abs() <= tol || (q.b - q.d).abs() <= tol;
    out!("Piero line: {}", if piero { "on" } else { "off" });
    write_screen(&q, output, None, "screen")
}

fn cmd_gates(raw: [f64; 4], canonical: bool) -> quadscreen::Result<()> {
    let q = load_sides(raw, canonical)?;
    out!("{}", bounds_line(&q));
    let g = gates(&q);
    for gl in GateLabel::ALL {
        for p in g.points_of(gl) {
            out!("{gl} = ({}, {})", fmt_trim(p.x), fmt_trim(p.y));
        }
    }
    out!("y_W^2 = {}, y_E^2 = {}", fmt_trim(g.y_w * g.y_w), fmt_trim(g.y_e * g.y_e));
    out!("x_S^2 = {}, x_N^2 = {}", fmt_trim(g.x_s * g.x_s), fmt_trim(g.x_n * g.x_n));
    let co = coalescences(&q, &g);
    let labels: Vec<String> = co.iter().map(|c| c.label()).collect();
    let corners: Vec<String> = co.iter().map(|c| c.corner()).collect();
    out!("{}", coalescence_line(&labels, &corners));
    Ok(())
}

fn cycle_text(period: f64) -> String {
    let k = (period / TAU).round() as i64;
    if k == 1 {
        "2π".to_string()
    } else {
        format!("{}π", 2 * k)
    }
}

fn cmd_trace(
    raw: [f64; 4],
    ground: Label,
    input: Option<Label>,
    samples_per_turn: usize,
    branch: Option<Branch>,
    output: &OutputArgs,
) -> quadscreen::Result<()> {
    let q = load_sides(raw, output.canonical)?;
    let asg = match input {
        Some(i) => LinkageAssignment::new(&q, ground, i)?,
        None => LinkageAssignment::with_ground(&q, ground),
    };
    out!(
        "ground {} = {}, input {} = {}, coupler {} = {}, output {} = {}",
        asg.ground,
        fmt_trim(asg.g),
        asg.input,
        fmt_trim(asg.a_in),
        asg.coupler,
        fmt_trim(asg.h),
        asg.output,
        fmt_trim(asg.b_out)
    );
    let mv = movement_types(&asg)?;
    out!(
        "input {}, output {}{}",
        mv.input,
        mv.output,
        if mv.agrees_with_table { "" } else { " (differs from the table row for these labels)" }
    );
    let tr = trace_cycle(&asg, TraceOptions { samples_per_turn, start_branch: branch })?;
    let chir = match tr.chirality_profile {
        ChiralityProfile::SingleChiralityPerBranch => "single chirality",
        ChiralityProfile::BothChiralitiesOnOnePath => "both chiralities",
        ChiralityProfile::Flat => "flat",
    };
    out!("cycle {}, {chir}", cycle_text(tr.cycle_period));
    out!("cycle_period = {}", fmt_trim(tr.cycle_period));
    out!("input traversal = {}", fmt_trim(tr.input_traversal));
    for lim in &tr.limit_angles {
        out!("rocker limit at theta = {}", fmt_trim(*lim));
    }
    out!("fold events: {}", tr.fold_events);
    let gates_seen: Vec<&str> = tr.gate_events.iter().map(|e| e.gate.as_str()).collect();
    out!("gates in order: {}", gates_seen.join(" "));
    if tr.continued_by_extrapolation {
        out!("note: singular crossings continued by path extrapolation");
    }

    ensure_dir(&output.out)?;
    let formats = output.format.formats();
    if formats.contains(&OutputFormat::Json) {
        let path = output.out.join("trace.json");
        emit_json(&tr, &path)?;
        out!("wrote {}", path.display());
    }
    if formats.contains(&OutputFormat::Csv) {
        let path = output.out.join("trace.csv");
        std::fs::write(&path, trace_csv_string(&tr))?;
        out!("wrote {}", path.display());
    }
    if formats.contains(&OutputFormat::Svg) {
        let svg_only = OutputArgs {
            resolution: output.resolution,
            out: output.out.clone(),
            format: FormatArg::Svg,
            normalized: output.normalized,
            canonical: output.canonical,
        };
        write_screen(&q, &svg_only, Some(tr), "trace")?;
    }
    Ok(())
}

fn cmd_orbit(entries: &[f64], full: bool) -> quadscreen::Result<()> {
    if let Some((index, &value)) = entries.iter().enumerate().find(|(_, v)| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::NegativeEntry { index, value });
    }
    let t = SixTuple::new(entries[0], entries[1], entries[2], entries[3], entries[4], entries[5]);
    let orbit = symmetry_orbit(&t);
    out!("orbit size: {}", orbit.len());
    if full {
        out_raw!("{}", quadscreen::render::json_string(&orbit)?);
    }
    Ok(())
}
