use thiserror::Error;

use crate::sides::Label;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("side {label} has non-positive or non-finite length {value}")]
    NonPositiveLength { label: Label, value: f64 },

    #[error("side {label} = {value} is not shorter than the sum of the other three ({rest})")]
    PolygonInequality { label: Label, value: f64, rest: f64 },

    #[error("lengths ({p}, {q}, {r}) violate the triangle inequality")]
    TriangleInequality { p: f64, q: f64, r: f64 },

    #[error("negative radicand {value} in {context}")]
    NegativeRadicand { value: f64, context: &'static str },

    #[error("{what} = {value} lies outside the feasible band [{lo}, {hi}]")]
    OutOfBand { what: &'static str, value: f64, lo: f64, hi: f64 },

    #[error("six-tuple entry {index} = {value} is negative or non-finite")]
    NegativeEntry { index: usize, value: f64 },

    #[error("dihedral angle {0} is outside [0, pi]")]
    DihedralOutOfRange(f64),

    #[error("Regge conjugate has non-positive side {label} = {value}")]
    InvalidConjugate { label: Label, value: f64 },

    #[error("input link {input} is not adjacent to ground link {ground}")]
    InvalidAssignment { ground: Label, input: Label },

    #[error("crank angle {theta} rad is infeasible: floating diagonal {f} outside [{lo}, {hi}]")]
    InfeasibleAngle { theta: f64, f: f64, lo: f64, hi: f64 },

    #[error("no crank angle closes the linkage")]
    NoFeasibleAngle,

    #[error("configuration cycle did not close within {turns} turns of input traversal")]
    NonConvergentCycle { turns: u32 },

    #[error("resolution {0} is below the minimum of 16")]
    Resolution(usize),

    #[error("malformed CSV at line {line}: {reason}")]
    Csv { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
