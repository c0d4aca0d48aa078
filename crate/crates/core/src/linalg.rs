//! Exact linear algebra over the rationals.
//!
//! Matrices are plain row-major `Vec<Vec<Rational>>`. Subspaces are stored in
//! reduced row-echelon form, so two subspaces are equal iff their bases are
//! syntactically equal.

use num_traits::{One, Zero};

use crate::rational::Rational;

pub type Vector = Vec<Rational>;
pub type Matrix = Vec<Vec<Rational>>;

pub fn zeros(rows: usize, cols: usize) -> Matrix {
    vec![vec![Rational::zero(); cols]; rows]
}

pub fn identity(n: usize) -> Matrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Rational::one();
    }
    m
}

pub fn unit(n: usize, i: usize) -> Vector {
    let mut v = vec![Rational::zero(); n];
    v[i] = Rational::one();
    v
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn is_zero(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn transpose(m: &Matrix) -> Matrix {
    if m.is_empty() {
        return Vec::new();
    }
    (0..m[0].len())
        .map(|j| m.iter().map(|row| row[j].clone()).collect())
        .collect()
}

pub fn mat_mul(a: &Matrix, b: &Matrix) -> Matrix {
    let inner = b.len();
    let cols = if inner == 0 { 0 } else { b[0].len() };
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut s = Rational::zero();
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

pub fn mat_vec(a: &Matrix, v: &[Rational]) -> Vector {
    a.iter().map(|row| dot(row, v)).collect()
}

/// Row vector times matrix: `(v M)_j = sum_k v_k M[k][j]`.
pub fn vec_mat(v: &[Rational], m: &Matrix) -> Vector {
    let cols = if m.is_empty() { 0 } else { m[0].len() };
    (0..cols)
        .map(|j| {
            let mut s = Rational::zero();
            for (k, vk) in v.iter().enumerate() {
                if !vk.is_zero() && !m[k][j].is_zero() {
                    s += vk * &m[k][j];
                }
            }
            s
        })
        .collect()
}

/// Reduced row-echelon form. Returns the nonzero rows and their pivot columns.
pub fn rref(m: &Matrix) -> (Matrix, Vec<usize>) {
    let mut a: Matrix = m.clone();
    let rows = a.len();
    if rows == 0 {
        return (Vec::new(), Vec::new());
    }
    let cols = a[0].len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for x in a[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    a.truncate(r);
    (a, pivots)
}

pub fn rank(m: &Matrix) -> usize {
    rref(m).1.len()
}

/// Basis of `{x : M x = 0}` for an `r x cols` matrix.
pub fn kernel(m: &Matrix, cols: usize) -> Vec<Vector> {
    let (r, pivots) = rref(m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![Rational::zero(); cols];
            v[f] = Rational::one();
            for (row, &p) in r.iter().zip(&pivots) {
                v[p] = -row[f].clone();
            }
            v
        })
        .collect()
}

pub fn determinant(m: &Matrix) -> Rational {
    let n = m.len();
    let mut a = m.clone();
    let mut det = Rational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else {
            return Rational::zero();
        };
        if p != c {
            a.swap(p, c);
            det = -det;
        }
        det *= &a[c][c];
        let inv = a[c][c].recip();
        for i in c + 1..n {
            if a[i][c].is_zero() {
                continue;
            }
            let f = &a[i][c] * &inv;
            for j in c..n {
                let t = &f * &a[c][j];
                a[i][j] -= t;
            }
        }
    }
    det
}

/// Solve `M x = b` for square nonsingular `M`; `None` if singular.
pub fn solve(m: &Matrix, b: &[Rational]) -> Option<Vector> {
    let n = m.len();
    let aug: Matrix = m
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let (r, pivots) = rref(&aug);
    if pivots.len() != n || pivots.iter().enumerate().any(|(i, &p)| p != i) {
        return None;
    }
    Some(r.iter().map(|row| row[n].clone()).collect())
}

/// Pfaffian of a skew-symmetric matrix by congruence elimination.
///
/// Each step clears row/column `k` and `k+1` against the pivot pair using
/// unimodular congruences, so the Pfaffian is the signed product of pivots.
pub fn pfaffian(m: &Matrix) -> Rational {
    let n = m.len();
    if n % 2 == 1 {
        return Rational::zero();
    }
    let mut a = m.clone();
    let mut pf = Rational::one();
    let mut k = 0;
    while k < n {
        let Some(j) = (k + 1..n).find(|&j| !a[k][j].is_zero()) else {
            return Rational::zero();
        };
        if j != k + 1 {
            a.swap(j, k + 1);
            for row in a.iter_mut() {
                row.swap(j, k + 1);
            }
            pf = -pf;
        }
        let piv = a[k][k + 1].clone();
        pf *= &piv;
        // clear a[k][i] with column k+1, then a[k+1][i] with column k
        for (src, target_row) in [(k + 1, k), (k, k + 1)] {
            let denom = a[target_row][src].clone();
            for i in k + 2..n {
                if a[target_row][i].is_zero() {
                    continue;
                }
                let f = &a[target_row][i] / &denom;
                for r in 0..n {
                    let t = &f * &a[r][src];
                    a[r][i] -= t;
                }
                for c in 0..n {
                    let t = &f * &a[src][c];
                    a[i][c] -= t;
                }
            }
        }
        k += 2;
    }
    pf
}

/// Subspace of `Q^ambient` with a canonical (RREF) basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vector>,
}

impl Subspace {
    pub fn span(ambient: usize, vectors: &[Vector]) -> Self {
        let (basis, _) = rref(&vectors.to_vec());
        let basis = basis.into_iter().map(|v| { debug_assert_eq!(v.len(), ambient); v }).collect();
        Self { ambient, basis }
    }

    pub fn zero(ambient: usize) -> Self {
        Self { ambient, basis: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        Self { ambient, basis: identity(ambient) }
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vector] {
        &self.basis
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        if is_zero(v) {
            return true;
        }
        let mut m = self.basis.clone();
        m.push(v.to_vec());
        rank(&m) == self.basis.len()
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut m = self.basis.clone();
        m.extend(other.basis.iter().cloned());
        Subspace::span(self.ambient, &m)
    }

    /// Vectors `a` with `a . v = 0` for all `v` in the subspace.
    pub fn annihilator(&self) -> Subspace {
        Subspace::span(self.ambient, &kernel(&self.basis, self.ambient))
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        if self.is_zero() || other.is_zero() {
            return Subspace::zero(self.ambient);
        }
        let ann = other.annihilator();
        // x = sum c_i u_i with a . x = 0 for each annihilator row a
        let constraints: Matrix = ann
            .basis
            .iter()
            .map(|a| self.basis.iter().map(|u| dot(a, u)).collect())
            .collect();
        if constraints.is_empty() {
            return self.clone();
        }
        let coeffs = kernel(&constraints, self.basis.len());
        let vecs: Vec<Vector> = coeffs.iter().map(|c| combine(&self.basis, c, self.ambient)).collect();
        Subspace::span(self.ambient, &vecs)
    }

    /// Greedy complement: standard basis vectors, in index order, that extend
    /// the subspace without creating dependence.
    pub fn greedy_complement(&self) -> Vec<usize> {
        let mut acc = self.basis.clone();
        let mut r = acc.len();
        let mut chosen = Vec::new();
        for i in 0..self.ambient {
            if r == self.ambient {
                break;
            }
            acc.push(unit(self.ambient, i));
            let nr = rank(&acc);
            if nr > r {
                chosen.push(i);
                r = nr;
            } else {
                acc.pop();
            }
        }
        chosen
    }
}

pub fn combine(vectors: &[Vector], coeffs: &[Rational], ambient: usize) -> Vector {
    let mut out = vec![Rational::zero(); ambient];
    for (v, c) in vectors.iter().zip(coeffs) {
        if c.is_zero() {
            continue;
        }
        for (o, x) in out.iter_mut().zip(v) {
            *o += c * x;
        }
    }
    out
}
