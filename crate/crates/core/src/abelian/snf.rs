//! Dense Smith normal form over `Z` with unimodular transforms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Matrix = Vec<Vec<BigInt>>;

/// `row_transform * A * col_transform = diag(diagonal)` (padded with zeros
/// to the shape of `A`), with `d_i | d_{i+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfCertificate {
    pub rows: usize,
    pub cols: usize,
    pub diagonal: Vec<BigInt>,
    pub row_transform: Matrix,
    pub col_transform: Matrix,
}

pub fn identity(n: usize) -> Matrix {
    (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix, inner: usize, cols: usize) -> Matrix {
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut s = BigInt::zero();
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            s += &row[k] * &b[k][j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn determinant(m: &Matrix) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = m.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    sign * &a[n - 1][n - 1]
}

struct State {
    a: Matrix,
    u: Option<Matrix>,
    v: Option<Matrix>,
    m: usize,
    n: usize,
}

impl State {
    fn swap_rows(&mut self, i: usize, j: usize) {
        if i != j {
            self.a.swap(i, j);
            if let Some(u) = &mut self.u {
                u.swap(i, j);
            }
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i != j {
            for row in &mut self.a {
                row.swap(i, j);
            }
            if let Some(v) = &mut self.v {
                for row in v.iter_mut() {
                    row.swap(i, j);
                }
            }
        }
    }

    /// row_dst += q * row_src
    fn add_row(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for k in 0..self.n {
            if !self.a[src][k].is_zero() {
                let d = q * &self.a[src][k];
                self.a[dst][k] += d;
            }
        }
        if let Some(u) = &mut self.u {
            for k in 0..self.m {
                if !u[src][k].is_zero() {
                    let d = q * &u[src][k];
                    u[dst][k] += d;
                }
            }
        }
    }

    /// col_dst += q * col_src
    fn add_col(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for row in &mut self.a {
            if !row[src].is_zero() {
                let d = q * &row[src];
                row[dst] += d;
            }
        }
        if let Some(v) = &mut self.v {
            for row in v.iter_mut() {
                if !row[src].is_zero() {
                    let d = q * &row[src];
                    row[dst] += d;
                }
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in &mut self.a[i] {
            *x = -&*x;
        }
        if let Some(u) = &mut self.u {
            for x in &mut u[i] {
                *x = -&*x;
            }
        }
    }

    /// Moves the entry of least absolute value in the trailing block to (t, t).
    fn place_min(&mut self, t: usize) -> bool {
        let mut best: Option<(usize, usize)> = None;
        for i in t..self.m {
            for j in t..self.n {
                let x = &self.a[i][j];
                if !x.is_zero() && best.is_none_or(|(bi, bj)| x.abs() < self.a[bi][bj].abs()) {
                    best = Some((i, j));
                    if x.abs().is_one() {
                        break;
                    }
                }
            }
        }
        match best {
            None => false,
            Some((i, j)) => {
                self.swap_rows(t, i);
                self.swap_cols(t, j);
                true
            }
        }
    }

    fn run(&mut self) {
        let steps = self.m.min(self.n);
        for t in 0..steps {
            if !self.place_min(t) {
                break;
            }
            loop {
                let mut dirty = false;
                for i in t + 1..self.m {
                    if !self.a[i][t].is_zero() {
                        let q = -self.a[i][t].div_floor(&self.a[t][t]);
                        self.add_row(i, t, &q);
                        if !self.a[i][t].is_zero() {
                            dirty = true;
                        }
                    }
                }
                for j in t + 1..self.n {
                    if !self.a[t][j].is_zero() {
                        let q = -self.a[t][j].div_floor(&self.a[t][t]);
                        self.add_col(j, t, &q);
                        if !self.a[t][j].is_zero() {
                            dirty = true;
                        }
                    }
                }
                if dirty {
                    // A smaller remainder appeared in row or column t.
                    self.place_min_in_cross(t);
                    continue;
                }
                let p = self.a[t][t].clone();
                let bad = (t + 1..self.m).find(|&i| (t + 1..self.n).any(|j| !(&self.a[i][j] % &p).is_zero()));
                match bad {
                    Some(i) => self.add_row(t, i, &BigInt::one()),
                    None => break,
                }
            }
            if self.a[t][t].is_negative() {
                self.negate_row(t);
            }
        }
    }

    fn place_min_in_cross(&mut self, t: usize) {
        let mut best = (t, t);
        for i in t..self.m {
            let x = &self.a[i][t];
            if !x.is_zero() && x.abs() < self.a[best.0][best.1].abs() {
                best = (i, t);
            }
        }
        for j in t..self.n {
            let x = &self.a[t][j];
            if !x.is_zero() && x.abs() < self.a[best.0][best.1].abs() {
                best = (t, j);
            }
        }
        self.swap_rows(t, best.0);
        self.swap_cols(t, best.1);
    }

    fn diagonal(&self) -> Vec<BigInt> {
        (0..self.m.min(self.n)).map(|i| self.a[i][i].clone()).collect()
    }
}

fn run(a: &Matrix, cols: usize, transforms: bool) -> State {
    let m = a.len();
    let mut st = State {
        a: a.clone(),
        u: transforms.then(|| identity(m)),
        v: transforms.then(|| identity(cols)),
        m,
        n: cols,
    };
    st.run();
    st
}

/// Smith normal form of an `rows x cols` matrix, with transforms.
pub fn smith_normal_form(a: &Matrix, cols: usize) -> SnfCertificate {
    let st = run(a, cols, true);
    SnfCertificate {
        rows: st.m,
        cols,
        diagonal: st.diagonal(),
        row_transform: st.u.unwrap(),
        col_transform: st.v.unwrap(),
    }
}

/// Diagonal only; cheaper when no witness is needed.
pub fn smith_diagonal(a: &Matrix, cols: usize) -> Vec<BigInt> {
    run(a, cols, false).diagonal()
}

impl SnfCertificate {
    /// Re-checks the certificate against the original matrix: the
    /// reconstruction identity, unimodularity and the divisibility chain.
    pub fn verify(&self, a: &Matrix) -> bool {
        let (m, n) = (self.rows, self.cols);
        if a.len() != m || a.iter().any(|r| r.len() != n) {
            return false;
        }
        let ua = mat_mul(&self.row_transform, a, m, n);
        let uav = mat_mul(&ua, &self.col_transform, n, n);
        for (i, row) in uav.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                let want = if i == j { self.diagonal[i].clone() } else { BigInt::zero() };
                if *x != want {
                    return false;
                }
            }
        }
        if !determinant(&self.row_transform).abs().is_one() || !determinant(&self.col_transform).abs().is_one() {
            return false;
        }
        self.divisibility_holds()
    }

    pub fn divisibility_holds(&self) -> bool {
        self.diagonal.windows(2).all(|w| {
            if w[0].is_zero() {
                w[1].is_zero()
            } else {
                (&w[1] % &w[0]).is_zero()
            }
        }) && self.diagonal.iter().all(|d| !d.is_negative())
    }
}
