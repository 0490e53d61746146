//! Grashof test, Regge variables and the 27 sign cases of the four-bar.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sides::{Label, QuadSides};

/// Semiperimeter and the three half-differences of the `{a b x; c d y}`
/// arrangement, plus the four linkage combinations `T0..T3`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReggeVariables {
    pub s: f64,
    /// Columns: `[(a + c) - (b + d)] / 2`.
    pub r: f64,
    /// Rows: `[(a + b) - (c + d)] / 2`.
    pub u: f64,
    /// Diagonals: `[(a + d) - (b + c)] / 2`.
    pub v: f64,
    pub t0: f64,
    pub t1: f64,
    pub t2: f64,
    pub t3: f64,
}

impl ReggeVariables {
    /// Computed in the labeling given, canonical or not.
    pub fn from_sides(q: &QuadSides) -> Self {
        Self::from_array(q.as_array())
    }

    pub fn from_array([a, b, c, d]: [f64; 4]) -> Self {
        let s = (a + b + c + d) / 2.0;
        let r = ((a + c) - (b + d)) / 2.0;
        let u = ((a + b) - (c + d)) / 2.0;
        let v = ((a + d) - (b + c)) / 2.0;
        // T1..T3 taken as the doubled Regge variables, in this labeling
        ReggeVariables { s, r, u, v, t0: 2.0 * s, t1: 2.0 * r, t2: 2.0 * u, t3: 2.0 * v }
    }

    /// Inverse transform back to `(a, b, c, d)`.
    pub fn to_sides(&self) -> [f64; 4] {
        let (s, r, u, v) = (self.s, self.r, self.u, self.v);
        [(s + r + u + v) / 2.0, (s - r + u - v) / 2.0, (s + r - u - v) / 2.0, (s - r - u + v) / 2.0]
    }

    pub fn triple(&self) -> [f64; 3] {
        [self.r, self.u, self.v]
    }

    /// Signs of `(r, u, v)`, zero within `1e-12 * s`.
    pub fn sign_triple(&self) -> [Sign; 3] {
        let tol = 1e-12 * self.s.abs();
        self.triple().map(|t| Sign::of(t, tol))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    #[serde(rename = "-")]
    Minus,
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "+")]
    Plus,
}

impl Sign {
    pub fn of(v: f64, tol: f64) -> Sign {
        if v > tol {
            Sign::Plus
        } else if v < -tol {
            Sign::Minus
        } else {
            Sign::Zero
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Minus => Sign::Plus,
            Sign::Zero => Sign::Zero,
            Sign::Plus => Sign::Minus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Minus => "-",
            Sign::Zero => "0",
            Sign::Plus => "+",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrashofReport {
    pub s_len: f64,
    pub l_len: f64,
    pub p_len: f64,
    pub q_len: f64,
    pub satisfied: bool,
    /// `s + l = p + q` within tolerance.
    pub boundary: bool,
}

/// Shortest plus longest against the remaining two.
pub fn grashof_test(lengths: [f64; 4]) -> GrashofReport {
    let mut sorted = lengths;
    sorted.sort_by(f64::total_cmp);
    let [s_len, p_len, q_len, l_len] = sorted;
    let lhs = s_len + l_len;
    let rhs = p_len + q_len;
    let tol = 1e-12 * (lhs + rhs);
    let boundary = (lhs - rhs).abs() <= tol;
    GrashofReport { s_len, l_len, p_len, q_len, satisfied: boundary || lhs < rhs, boundary }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Movement {
    #[serde(rename = "crank")]
    Crank,
    #[serde(rename = "rocker")]
    Rocker,
    #[serde(rename = "0-rocker")]
    ZeroRocker,
    #[serde(rename = "pi-rocker")]
    PiRocker,
}

impl Movement {
    /// Movement type from whether the angle range reaches `0` and `pi`.
    pub fn from_reach(includes_zero: bool, includes_pi: bool) -> Movement {
        match (includes_zero, includes_pi) {
            (true, true) => Movement::Crank,
            (false, false) => Movement::Rocker,
            (true, false) => Movement::ZeroRocker,
            (false, true) => Movement::PiRocker,
        }
    }
}

impl fmt::Display for Movement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Movement::Crank => "crank",
            Movement::Rocker => "rocker",
            Movement::ZeroRocker => "0-rocker",
            Movement::PiRocker => "π-rocker",
        })
    }
}

/// Row identifier of the 27-case table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CaseId {
    /// Roman numeral 1..=4, primed or not.
    General { numeral: u8, primed: bool },
    /// Cases 1..=19, at least one Regge variable zero.
    Symmetric(u8),
}

impl CaseId {
    pub fn is_symmetric(&self) -> bool {
        matches!(self, CaseId::Symmetric(_))
    }
}

impl fmt::Display for CaseId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            CaseId::General { numeral, primed } => {
                let roman = ["I", "II", "III", "IV"][numeral as usize - 1];
                write!(f, "{roman}{}", if primed { "′" } else { "" })
            }
            CaseId::Symmetric(n) => write!(f, "{n}"),
        }
    }
}

impl Serialize for CaseId {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.serialize_str(&self.to_string())
    }
}

pub struct CaseRow {
    pub id: CaseId,
    pub signs: [Sign; 3],
    pub input: Movement,
    pub output: Movement,
}

const fn g(numeral: u8, primed: bool) -> CaseId {
    CaseId::General { numeral, primed }
}

const fn n(k: u8) -> CaseId {
    CaseId::Symmetric(k)
}

macro_rules! row {
    ($id:expr, $r:ident $u:ident $v:ident, $i:ident, $o:ident) => {
        CaseRow { id: $id, signs: [Sign::$r, Sign::$u, Sign::$v], input: Movement::$i, output: Movement::$o }
    };
}

/// Signs of `(r, u, v)` with the input and output movements of each case.
pub static CASE_TABLE: [CaseRow; 27] = [
    row!(g(1, false), Minus Minus Plus, Crank, Crank),
    row!(g(1, true), Plus Plus Minus, ZeroRocker, PiRocker),
    row!(g(2, false), Plus Minus Minus, Rocker, Crank),
    row!(g(2, true), Minus Plus Plus, PiRocker, PiRocker),
    row!(g(3, false), Minus Plus Minus, Rocker, Rocker),
    row!(g(3, true), Plus Minus Plus, PiRocker, ZeroRocker),
    row!(g(4, false), Plus Plus Plus, Crank, Rocker),
    row!(g(4, true), Minus Minus Minus, ZeroRocker, ZeroRocker),
    row!(n(1), Zero Plus Plus, Crank, PiRocker),
    row!(n(2), Plus Zero Plus, Crank, ZeroRocker),
    row!(n(3), Minus Zero Plus, Crank, Crank),
    row!(n(4), Zero Minus Plus, Crank, Crank),
    row!(n(5), Plus Plus Zero, Crank, PiRocker),
    row!(n(6), Minus Plus Zero, PiRocker, PiRocker),
    row!(n(7), Plus Minus Zero, PiRocker, Crank),
    row!(n(8), Minus Minus Zero, Crank, Crank),
    row!(n(9), Zero Plus Minus, ZeroRocker, PiRocker),
    row!(n(10), Plus Zero Minus, ZeroRocker, Crank),
    row!(n(11), Minus Zero Minus, ZeroRocker, ZeroRocker),
    row!(n(12), Zero Minus Minus, ZeroRocker, Crank),
    row!(n(13), Zero Zero Plus, Crank, Crank),
    row!(n(14), Zero Plus Zero, Crank, PiRocker),
    row!(n(15), Plus Zero Zero, Crank, Crank),
    row!(n(16), Minus Zero Zero, Crank, Crank),
    row!(n(17), Zero Minus Zero, Crank, Crank),
    row!(n(18), Zero Zero Minus, ZeroRocker, Crank),
    row!(n(19), Zero Zero Zero, Crank, Crank),
];

pub fn lookup_case(signs: [Sign; 3]) -> &'static CaseRow {
    CASE_TABLE.iter().find(|row| row.signs == signs).expect("the 27 sign triples are exhaustive")
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CaseReport {
    pub case_id: CaseId,
    pub sign_triple: [Sign; 3],
    pub input_movement: Movement,
    pub output_movement: Movement,
    pub grashof: GrashofReport,
    /// Cases 1..=19.
    pub regge_symmetric_class: bool,
}

/// Table lookup on the signs of `(r, u, v)`. The Grashof verdict is attached
/// as computed, never inferred from the case.
pub fn classify_case(rv: &ReggeVariables, grashof: GrashofReport) -> CaseReport {
    let sign_triple = rv.sign_triple();
    let row = lookup_case(sign_triple);
    CaseReport {
        case_id: row.id,
        sign_triple,
        input_movement: row.input,
        output_movement: row.output,
        grashof,
        regge_symmetric_class: row.id.is_symmetric(),
    }
}

/// `(s - a, s - b, s - c, s - d)` in the same labeling.
pub fn regge_conjugate(q: &QuadSides) -> Result<QuadSides> {
    let s = q.semiperimeter();
    let conj = q.as_array().map(|v| s - v);
    for (i, &v) in conj.iter().enumerate() {
        if v <= 0.0 {
            return Err(Error::InvalidConjugate { label: Label::from_index(i), value: v });
        }
    }
    QuadSides::from_array(conj)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SignLawRecord {
    pub original: [f64; 3],
    pub conjugate: [f64; 3],
    pub s: f64,
    pub s_conjugate: f64,
    /// `(r', u', v') = -(r, u, v)` and `s' = s` within rounding.
    pub holds: bool,
}

pub fn conjugation_sign_law(q: &QuadSides) -> Result<SignLawRecord> {
    let conj = regge_conjugate(q)?;
    let rv = ReggeVariables::from_sides(q);
    let rc = ReggeVariables::from_sides(&conj);
    let tol = 1e-12 * rv.s;
    let holds = (rv.s - rc.s).abs() <= tol && rv.triple().iter().zip(rc.triple()).all(|(o, c)| (o + c).abs() <= tol);
    Ok(SignLawRecord { original: rv.triple(), conjugate: rc.triple(), s: rv.s, s_conjugate: rc.s, holds })
}
