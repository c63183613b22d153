//! Integer matrix normal forms (Smith form with transforms) and the lattice
//! helpers built on it.

pub type Mat = Vec<Vec<i128>>;

pub fn to_i128(rows: &[Vec<i64>]) -> Mat {
    rows.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect()
}

pub fn identity(n: usize) -> Mat {
    (0..n).map(|i| (0..n).map(|j| i128::from(i == j)).collect()).collect()
}

/// `u * a * v = diag(d_1, ..., d_r, 0, ...)` with `d_i | d_{i+1}`, `d_i > 0`.
#[derive(Clone, Debug)]
pub struct Smith {
    pub invariants: Vec<i128>,
    pub u: Mat,
    pub v: Mat,
}

impl Smith {
    pub fn rank(&self) -> usize {
        self.invariants.len()
    }
}

pub fn smith(a: &Mat, cols: usize) -> Smith {
    let m = a.len();
    let n = cols;
    let mut a = a.clone();
    let mut u = identity(m);
    let mut v = identity(n);
    let mut t = 0;
    while t < m.min(n) {
        // pivot: smallest nonzero absolute value in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..m {
            for j in t..n {
                if a[i][j] != 0 && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        u.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        for row in v.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut dirty = false;
            for i in t + 1..m {
                if a[i][t] != 0 {
                    let q = a[i][t].div_euclid(a[t][t]);
                    for j in 0..n {
                        a[i][j] -= q * a[t][j];
                    }
                    for j in 0..m {
                        u[i][j] -= q * u[t][j];
                    }
                    if a[i][t] != 0 {
                        dirty = true;
                    }
                }
            }
            for j in t + 1..n {
                if a[t][j] != 0 {
                    let q = a[t][j].div_euclid(a[t][t]);
                    for row in a.iter_mut() {
                        row[j] -= q * row[t];
                    }
                    for row in v.iter_mut() {
                        row[j] -= q * row[t];
                    }
                    if a[t][j] != 0 {
                        dirty = true;
                    }
                }
            }
            if !dirty {
                // divisibility of the trailing block
                let mut fix = None;
                'outer: for i in t + 1..m {
                    for j in t + 1..n {
                        if a[i][j] % a[t][t] != 0 {
                            fix = Some(i);
                            break 'outer;
                        }
                    }
                }
                match fix {
                    None => break,
                    Some(i) => {
                        for j in 0..n {
                            a[t][j] += a[i][j];
                        }
                        for j in 0..m {
                            u[t][j] += u[i][j];
                        }
                        continue;
                    }
                }
            }
            // move the smallest entry of row/column t into the pivot
            let mut best = (t, t);
            for i in t..m {
                if a[i][t] != 0 && a[i][t].abs() < a[best.0][best.1].abs() {
                    best = (i, t);
                }
            }
            for j in t..n {
                if a[t][j] != 0 && a[t][j].abs() < a[best.0][best.1].abs() {
                    best = (t, j);
                }
            }
            if best.0 != t {
                a.swap(t, best.0);
                u.swap(t, best.0);
            }
            if best.1 != t {
                for row in a.iter_mut() {
                    row.swap(t, best.1);
                }
                for row in v.iter_mut() {
                    row.swap(t, best.1);
                }
            }
        }
        if a[t][t] < 0 {
            for j in 0..n {
                a[t][j] = -a[t][j];
            }
            for j in 0..m {
                u[t][j] = -u[t][j];
            }
        }
        t += 1;
    }
    let invariants = (0..m.min(n)).map(|i| a[i][i]).take_while(|&d| d != 0).collect();
    Smith { invariants, u, v }
}

pub fn rank(rows: &[Vec<i64>], cols: usize) -> usize {
    smith(&to_i128(rows), cols).rank()
}

/// Basis of `{ r in Z^k : sum r_i rows_i = 0 }`.
pub fn left_kernel(rows: &[Vec<i64>], cols: usize) -> Vec<Vec<i64>> {
    let s = smith(&to_i128(rows), cols);
    s.u[s.rank()..].iter().map(|r| r.iter().map(|&x| x as i64).collect()).collect()
}

/// Some integer `x` with `sum x_i rows_i = target`, if one exists.
pub fn solve_left(rows: &[Vec<i64>], cols: usize, target: &[i64]) -> Option<Vec<i64>> {
    let k = rows.len();
    if k == 0 {
        return target.iter().all(|&t| t == 0).then(Vec::new);
    }
    let s = smith(&to_i128(rows), cols);
    // x A = t  with  U A V = D  =>  (x U^{-1}) D = t V
    let tv: Vec<i128> = (0..cols).map(|j| (0..cols).map(|i| target[i] as i128 * s.v[i][j]).sum()).collect();
    let r = s.rank();
    let mut y = vec![0i128; k];
    for j in 0..cols {
        if j < r {
            if tv[j] % s.invariants[j] != 0 {
                return None;
            }
            y[j] = tv[j] / s.invariants[j];
        } else if tv[j] != 0 {
            return None;
        }
    }
    let x: Vec<i64> = (0..k).map(|j| (0..k).map(|i| y[i] * s.u[i][j]).sum::<i128>() as i64).collect();
    Some(x)
}

/// A basis (as rows) of the lattice spanned by `rows`.
pub fn lattice_basis(rows: &[Vec<i64>], cols: usize) -> Vec<Vec<i64>> {
    let s = smith(&to_i128(rows), cols);
    let r = s.rank();
    // rows of U A span the same lattice; the first r are D V^{-1}, a basis
    let a = to_i128(rows);
    (0..r)
        .map(|i| (0..cols).map(|j| (0..rows.len()).map(|l| s.u[i][l] * a[l][j]).sum::<i128>() as i64).collect())
        .collect()
}

/// Map `Z^cols -> Z^(cols - r)` whose kernel is the saturation of the span of
/// `rows`, together with a flag telling whether the span was already saturated.
pub fn quotient_projection(rows: &[Vec<i64>], cols: usize) -> (Vec<Vec<i64>>, bool) {
    let s = smith(&to_i128(rows), cols);
    let r = s.rank();
    let saturated = s.invariants.iter().all(|&d| d == 1);
    // x -> (x V)[r..]
    let proj = (0..cols).map(|i| (r..cols).map(|j| s.v[i][j] as i64).collect()).collect();
    (proj, saturated)
}

pub fn apply_rows(x: &[i64], m: &[Vec<i64>], out_dim: usize) -> Vec<i64> {
    (0..out_dim).map(|j| x.iter().zip(m).map(|(a, row)| a * row[j]).sum()).collect()
}

pub fn det(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    // Bareiss fraction-free elimination
    let mut a: Mat = to_i128(m);
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(k, i);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
        }
        prev = a[k][k];
    }
    if n == 0 {
        1
    } else {
        sign * a[n - 1][n - 1]
    }
}
