//! Six-tuples `{a b x; c d y}` and their 144-element symmetry group.
//!
//! The group is generated by column permutations, exchange of upper and lower
//! entries in two columns at once, and Regge's linear transform acting on the
//! last two columns. Orbits are built by closure under these generators.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

/// Columns are `(a, c)`, `(b, d)` and `(x, y)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SixTuple {
    pub upper: [f64; 3],
    pub lower: [f64; 3],
}

impl SixTuple {
    pub fn new(a: f64, b: f64, x: f64, c: f64, d: f64, y: f64) -> Self {
        SixTuple { upper: [a, b, x], lower: [c, d, y] }
    }

    /// `{a, b, x}`, `{c, d, x}`, `{a, d, y}`, `{c, b, y}`.
    pub fn triads(&self) -> [[f64; 3]; 4] {
        let [a, b, x] = self.upper;
        let [c, d, y] = self.lower;
        [[a, b, x], [c, d, x], [a, d, y], [c, b, y]]
    }

    pub fn entries(&self) -> [f64; 6] {
        let [a, b, x] = self.upper;
        let [c, d, y] = self.lower;
        [a, b, x, c, d, y]
    }

    pub fn is_nonnegative(&self) -> bool {
        self.entries().iter().all(|&v| v >= 0.0)
    }

    fn scale(&self) -> f64 {
        self.entries().iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    fn approx_eq(&self, other: &SixTuple, tol: f64) -> bool {
        self.entries().iter().zip(other.entries()).all(|(p, q)| (p - q).abs() <= tol)
    }

    fn swap_columns(&self, i: usize, j: usize) -> SixTuple {
        let mut t = *self;
        t.upper.swap(i, j);
        t.lower.swap(i, j);
        t
    }

    fn flip_columns(&self, i: usize, j: usize) -> SixTuple {
        let mut t = *self;
        for k in [i, j] {
            std::mem::swap(&mut t.upper[k], &mut t.lower[k]);
        }
        t
    }

    /// Regge's transform with the first column held fixed.
    pub fn regge_transform(&self) -> SixTuple {
        let [j1, j2, j3] = self.upper;
        let [j4, j5, j6] = self.lower;
        SixTuple {
            upper: [j1, (j2 + j5 + j3 - j6) / 2.0, (j2 + j3 + j6 - j5) / 2.0],
            lower: [j4, (j2 + j5 + j6 - j3) / 2.0, (j3 + j5 + j6 - j2) / 2.0],
        }
    }

    /// The quadruple transform `(s-a, s-b, s-c, s-d)` with the diagonal
    /// column untouched.
    pub fn regge_conjugate(&self) -> SixTuple {
        let [a, b, x] = self.upper;
        let [c, d, y] = self.lower;
        let s = (a + b + c + d) / 2.0;
        SixTuple::new(s - a, s - b, x, s - c, s - d, y)
    }
}

/// Closed triangle inequality on each of the four triads.
pub fn triad_feasible(t: &SixTuple) -> bool {
    let tol = 1e-12 * t.scale().max(1.0);
    t.triads().iter().all(|&[p, q, r]| {
        p >= -tol && q >= -tol && r >= -tol && p <= q + r + tol && q <= p + r + tol && r <= p + q + tol
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct OrbitMember {
    pub tuple: SixTuple,
    /// All six entries non-negative.
    pub valid: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Orbit {
    /// Sorted lexicographically by entries.
    pub members: Vec<OrbitMember>,
}

impl Orbit {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, t: &SixTuple) -> bool {
        let tol = 1e-9 * t.scale().max(1.0);
        self.members.iter().any(|m| m.tuple.approx_eq(t, tol))
    }
}

/// Generators of the 144-group.
pub fn generators() -> [fn(&SixTuple) -> SixTuple; 4] {
    [|t| t.swap_columns(0, 1), |t| t.swap_columns(1, 2), |t| t.flip_columns(0, 1), SixTuple::regge_transform]
}

/// Orbit of `t` under the 144-group, de-duplicated at `1e-9` relative.
pub fn symmetry_orbit(t: &SixTuple) -> Orbit {
    let tol = 1e-9 * t.scale().max(1.0);
    let mut seen = vec![*t];
    let mut queue = VecDeque::from([*t]);
    while let Some(cur) = queue.pop_front() {
        for gen in generators() {
            let img = gen(&cur);
            if !seen.iter().any(|s| s.approx_eq(&img, tol)) {
                seen.push(img);
                queue.push_back(img);
            }
        }
    }
    seen.sort_by(|p, q| {
        p.entries()
            .iter()
            .zip(q.entries())
            .map(|(u, v)| u.total_cmp(&v))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Orbit { members: seen.into_iter().map(|tuple| OrbitMember { valid: tuple.is_nonnegative(), tuple }).collect() }
}
