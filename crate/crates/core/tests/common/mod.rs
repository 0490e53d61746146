//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls into the library: each oracle rebuilds the quantity
//! from coordinates or from a classical identity.

#![allow(dead_code)]

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det<const N: usize>(mut m: [[f64; N]; N]) -> f64 {
    let mut det = 1.0;
    for col in 0..N {
        let pivot = (col..N).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs())).unwrap();
        if m[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= m[col][col];
        let pivot_row = m[col];
        for row in m.iter_mut().skip(col + 1) {
            let f = row[col] / pivot_row[col];
            for (v, p) in row.iter_mut().zip(pivot_row).skip(col) {
                *v -= f * p;
            }
        }
    }
    det
}

/// Cayley-Menger determinant of the tetrahedron with vertices
/// `V_ab, V_bc, V_cd, V_da`, i.e. `288 V^2`.
///
/// Edges: `b = V_ab V_bc`, `c = V_bc V_cd`, `d = V_cd V_da`, `a = V_da V_ab`,
/// `y = V_ab V_cd`, `x = V_bc V_da`.
pub fn cayley_menger(a: f64, b: f64, c: f64, d: f64, x: f64, y: f64) -> f64 {
    let mut e = [[0.0; 4]; 4];
    let mut set = |i: usize, j: usize, len: f64| {
        e[i][j] = len * len;
        e[j][i] = len * len;
    };
    set(0, 1, b);
    set(1, 2, c);
    set(2, 3, d);
    set(3, 0, a);
    set(0, 2, y);
    set(1, 3, x);
    let mut m = [[1.0; 5]; 5];
    m[0][0] = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            m[i + 1][j + 1] = e[i][j];
        }
    }
    det(m)
}

/// Cayley-Menger determinant scaled by the sixth power of the longest edge.
pub fn cayley_menger_relative(a: f64, b: f64, c: f64, d: f64, x: f64, y: f64) -> f64 {
    let l = [a, b, c, d, x, y].into_iter().fold(0.0, f64::max);
    cayley_menger(a, b, c, d, x, y) / l.powi(6)
}

/// Apex of a triangle on base `(0,0)-(base,0)` with distances `r0` from the
/// origin and `r1` from the far end, above the axis.
pub fn apex(base: f64, r0: f64, r1: f64) -> [f64; 2] {
    let px = (base * base + r0 * r0 - r1 * r1) / (2.0 * base);
    let py = (r0 * r0 - px * px).max(0.0).sqrt();
    [px, py]
}

/// The two planar values of `y` for diagonal `x`, built from coordinates:
/// `V_bc` at the origin, `V_da` at `(x, 0)`, `V_ab` above the axis and `V_cd`
/// above (folded) or below (open).
pub fn planar_y(a: f64, b: f64, c: f64, d: f64, x: f64) -> (f64, f64) {
    let vab = apex(x, b, a);
    let vcd = apex(x, c, d);
    let dist = |p: [f64; 2], q: [f64; 2]| (p[0] - q[0]).hypot(p[1] - q[1]);
    let same = dist(vab, vcd);
    let opposite = dist(vab, [vcd[0], -vcd[1]]);
    (same.min(opposite), same.max(opposite))
}

/// Stewart's theorem: cevian from the apex of a triangle with sides `p`, `q`
/// meeting the base `m + n` at the split `(m, n)`, with `m` adjacent to `q`.
pub fn stewart_cevian(p: f64, q: f64, m: f64, n: f64) -> f64 {
    ((p * p * m + q * q * n) / (m + n) - m * n).sqrt()
}

pub fn shoelace(v: &[[f64; 2]]) -> f64 {
    let n = v.len();
    (0..n).map(|i| v[i][0] * v[(i + 1) % n][1] - v[(i + 1) % n][0] * v[i][1]).sum::<f64>() / 2.0
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

/// True when no side reaches the sum of the other three.
pub fn polygon_ok(s: [f64; 4]) -> bool {
    let total: f64 = s.iter().sum();
    s.iter().all(|&v| v > 0.0 && v < total - v)
}
