//! Side quadruples and their canonical labeling.
//!
//! Sides are always read in cyclic order `a -> b -> c -> d`, so `a` and `c`
//! are opposite, as are `b` and `d`. The diagonal `x` separates `{a, b}` from
//! `{c, d}` and the diagonal `y` separates `{a, d}` from `{c, b}`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    A,
    B,
    C,
    D,
}

impl Label {
    pub const ALL: [Label; 4] = [Label::A, Label::B, Label::C, Label::D];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Label {
        Self::ALL[i % 4]
    }

    pub fn opposite(self) -> Label {
        Self::from_index(self.index() + 2)
    }

    /// The two sides sharing a joint with `self`, in label order.
    pub fn neighbors(self) -> [Label; 2] {
        let mut n = [Self::from_index(self.index() + 1), Self::from_index(self.index() + 3)];
        n.sort();
        n
    }

    pub fn is_adjacent(self, other: Label) -> bool {
        self != other && self.opposite() != other
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            Label::A => 'a',
            Label::B => 'b',
            Label::C => 'c',
            Label::D => 'd',
        };
        write!(f, "{c}")
    }
}

impl std::str::FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "a" | "A" => Ok(Label::A),
            "b" | "B" => Ok(Label::B),
            "c" | "C" => Ok(Label::C),
            "d" | "D" => Ok(Label::D),
            _ => Err(format!("unknown side label `{s}` (expected a, b, c or d)")),
        }
    }
}

/// Four side lengths of a quadrilateral in cyclic order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadSides {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    /// `a` shortest, `c` opposite `a`, `d >= b`.
    pub canonical: bool,
    /// `original_order[i]` is the input position of the side now labeled `i`.
    pub original_order: [usize; 4],
}

impl QuadSides {
    /// Validates the sides in the given labeling; no reordering takes place.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let sides = [a, b, c, d];
        validate(&sides)?;
        Ok(QuadSides { a, b, c, d, canonical: is_canonical(&sides), original_order: [0, 1, 2, 3] })
    }

    pub fn from_array(s: [f64; 4]) -> Result<Self> {
        Self::new(s[0], s[1], s[2], s[3])
    }

    /// Relabels a cyclic quadruple so that `a` is the shortest side, `c` is
    /// opposite `a` and `d` is the longer of the remaining two.
    ///
    /// Only the eight relabelings that preserve the cycle are considered, so
    /// the opposite pairs are unchanged. Among qualifying relabelings the one
    /// moving the fewest sides wins, then the lexicographically smallest.
    pub fn canonicalize(raw: [f64; 4]) -> Result<Self> {
        validate(&raw)?;
        let mut best: Option<(usize, [usize; 4])> = None;
        for perm in dihedral_perms() {
            let s = perm.map(|i| raw[i]);
            if !is_canonical(&s) {
                continue;
            }
            let moved = perm.iter().enumerate().filter(|(i, p)| *i != **p).count();
            let candidate = (moved, perm);
            if best.is_none_or(|b| candidate < b) {
                best = Some(candidate);
            }
        }
        // the shortest side can always be rotated to `a` and reflected to get d >= b
        let (_, perm) = best.expect("some dihedral relabeling is canonical");
        let s = perm.map(|i| raw[i]);
        Ok(QuadSides { a: s[0], b: s[1], c: s[2], d: s[3], canonical: true, original_order: perm })
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn get(&self, label: Label) -> f64 {
        self.as_array()[label.index()]
    }

    pub fn semiperimeter(&self) -> f64 {
        (self.a + self.b + self.c + self.d) / 2.0
    }

    pub fn longest(&self) -> f64 {
        self.as_array().into_iter().fold(0.0, f64::max)
    }

    /// The sides in the order they were originally supplied.
    pub fn to_original(&self) -> [f64; 4] {
        let s = self.as_array();
        let mut out = [0.0; 4];
        for (label, &pos) in self.original_order.iter().enumerate() {
            out[pos] = s[label];
        }
        out
    }
}

fn validate(s: &[f64; 4]) -> Result<()> {
    for (i, &v) in s.iter().enumerate() {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::NonPositiveLength { label: Label::from_index(i), value: v });
        }
    }
    let total: f64 = s.iter().sum();
    for (i, &v) in s.iter().enumerate() {
        let rest = total - v;
        if v >= rest {
            return Err(Error::PolygonInequality { label: Label::from_index(i), value: v, rest });
        }
    }
    Ok(())
}

fn is_canonical(s: &[f64; 4]) -> bool {
    s[0] <= s[1] && s[0] <= s[2] && s[0] <= s[3] && s[3] >= s[1]
}

/// The eight relabelings of a 4-cycle: four rotations and four reflections.
fn dihedral_perms() -> impl Iterator<Item = [usize; 4]> {
    (0..4).flat_map(|k| {
        let rot = [k, (k + 1) % 4, (k + 2) % 4, (k + 3) % 4];
        let refl = [k, (k + 3) % 4, (k + 2) % 4, (k + 1) % 4];
        [rot, refl]
    })
}
