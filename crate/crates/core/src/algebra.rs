//! Nilpotent Lie algebras over the rationals.
//!
//! An algebra is given by structure constants `c[i][j][k]` with
//! `[X_i, X_j] = sum_k c[i][j][k] X_k`. Group elements are stored by their
//! logarithm (exponential coordinates of the first kind); multiplication is the
//! BCH series, which is a finite sum for nilpotent algebras.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Zero};
use serde::Serialize;

use crate::bch;
use crate::coadjoint::Functional;
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Subspace, Vector};
use crate::rational::{self, Rational};

/// Element of the Lie algebra in the fixed basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlgebraElement {
    pub coords: Vector,
}

/// Group element `g = exp(X)`, stored as `X`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupElement {
    pub log_coords: Vector,
}

impl AlgebraElement {
    pub fn new(coords: Vector) -> Self {
        Self { coords }
    }

    pub fn zero(n: usize) -> Self {
        Self { coords: vec![Rational::zero(); n] }
    }

    pub fn basis(n: usize, i: usize) -> Self {
        Self { coords: linalg::unit(n, i) }
    }

    pub fn from_ints(v: &[i64]) -> Self {
        Self { coords: v.iter().map(|&x| rational::int(x)).collect() }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        linalg::is_zero(&self.coords)
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self { coords: self.coords.iter().map(|x| x * s).collect() }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(rational::to_f64).collect()
    }
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: &AlgebraElement) -> AlgebraElement {
        AlgebraElement { coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: &AlgebraElement) -> AlgebraElement {
        AlgebraElement { coords: self.coords.iter().zip(&rhs.coords).map(|(a, b)| a - b).collect() }
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        AlgebraElement { coords: self.coords.iter().map(|a| -a.clone()).collect() }
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(rational::format).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl GroupElement {
    pub fn exp(x: AlgebraElement) -> Self {
        Self { log_coords: x.coords }
    }

    pub fn identity(n: usize) -> Self {
        Self { log_coords: vec![Rational::zero(); n] }
    }

    pub fn log(&self) -> AlgebraElement {
        AlgebraElement { coords: self.log_coords.clone() }
    }

    pub fn inverse(&self) -> Self {
        Self { log_coords: self.log_coords.iter().map(|a| -a.clone()).collect() }
    }
}

/// Outcome of [`LieAlgebra::validate`]. Violations are listed, not raised.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    /// `(i, j, k)` with `i <= j` and `c[i][j][k] + c[j][i][k] != 0` (0-based).
    pub antisymmetry_violations: Vec<(usize, usize, usize)>,
    /// `(i, j, k)` with `i < j < k` whose Jacobi sum is nonzero (0-based).
    pub jacobi_violations: Vec<(usize, usize, usize)>,
    /// Length of the lower central series, `None` if it stalls above zero.
    pub nilpotency_class: Option<usize>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.antisymmetry_violations.is_empty()
            && self.jacobi_violations.is_empty()
            && self.nilpotency_class.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LieAlgebra {
    names: Vec<String>,
    structure: Vec<Vec<Vec<Rational>>>,
    class: usize,
}

impl LieAlgebra {
    /// Builds and validates. Fails unless antisymmetry, Jacobi and
    /// nilpotency all hold.
    pub fn new(names: Vec<String>, structure: Vec<Vec<Vec<Rational>>>) -> Result<Self> {
        let alg = Self::unchecked(names, structure)?;
        let report = alg.validate();
        if !report.antisymmetry_violations.is_empty() {
            let (i, j, k) = report.antisymmetry_violations[0];
            return Err(Error::InvalidAlgebra(format!(
                "antisymmetry violated at ({}, {}, {})",
                i + 1,
                j + 1,
                k + 1
            )));
        }
        if !report.jacobi_violations.is_empty() {
            let (i, j, k) = report.jacobi_violations[0];
            return Err(Error::InvalidAlgebra(format!(
                "Jacobi identity violated at ({}, {}, {})",
                i + 1,
                j + 1,
                k + 1
            )));
        }
        match report.nilpotency_class {
            Some(c) => Ok(Self { class: c, ..alg }),
            None => {
                let stable = alg.lower_central_series_raw().last().map(Subspace::dim).unwrap_or(0);
                Err(Error::NotNilpotent { stable_dim: stable })
            }
        }
    }

    /// Shape check only. Use [`LieAlgebra::validate`] to inspect the rest.
    pub fn unchecked(names: Vec<String>, structure: Vec<Vec<Vec<Rational>>>) -> Result<Self> {
        let n = structure.len();
        if n == 0 || names.len() != n {
            return Err(Error::BadShape { n: names.len().max(n) });
        }
        if structure.iter().any(|row| row.len() != n || row.iter().any(|v| v.len() != n)) {
            return Err(Error::BadShape { n });
        }
        Ok(Self { names, structure, class: 0 })
    }

    /// Convenience constructor from `(i, j, k, value)` entries (0-based);
    /// the antisymmetric partner of each entry is filled in.
    pub fn from_brackets(names: &[&str], entries: &[(usize, usize, usize, Rational)]) -> Result<Self> {
        let n = names.len();
        let mut c = vec![vec![vec![Rational::zero(); n]; n]; n];
        for (i, j, k, v) in entries {
            c[*i][*j][*k] = v.clone();
            c[*j][*i][*k] = -v.clone();
        }
        Self::new(names.iter().map(|s| s.to_string()).collect(), c)
    }

    pub fn dim(&self) -> usize {
        self.structure.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn structure(&self) -> &[Vec<Vec<Rational>>] {
        &self.structure
    }

    /// Nilpotency class of a validated algebra.
    pub fn class(&self) -> usize {
        self.class
    }

    pub fn validate(&self) -> ValidationReport {
        let n = self.dim();
        let c = &self.structure;
        let mut antisymmetry_violations = Vec::new();
        for i in 0..n {
            for j in i..n {
                for k in 0..n {
                    if !(&c[i][j][k] + &c[j][i][k]).is_zero() {
                        antisymmetry_violations.push((i, j, k));
                    }
                }
            }
        }
        let mut jacobi_violations = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    if !self.jacobi(i, j, k).is_zero() {
                        jacobi_violations.push((i, j, k));
                    }
                }
            }
        }
        let series = self.lower_central_series_raw();
        let nilpotency_class = series.last().filter(|s| s.is_zero()).map(|_| series.len() - 1);
        ValidationReport { antisymmetry_violations, jacobi_violations, nilpotency_class }
    }

    /// `[X_i,[X_j,X_k]] + [X_j,[X_k,X_i]] + [X_k,[X_i,X_j]]`.
    pub fn jacobi(&self, i: usize, j: usize, k: usize) -> AlgebraElement {
        let n = self.dim();
        let e = |a| AlgebraElement::basis(n, a);
        let t1 = self.br(&e(i), &self.br(&e(j), &e(k)));
        let t2 = self.br(&e(j), &self.br(&e(k), &e(i)));
        let t3 = self.br(&e(k), &self.br(&e(i), &e(j)));
        &(&t1 + &t2) + &t3
    }

    pub fn bracket(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
        self.check(x.dim())?;
        self.check(y.dim())?;
        Ok(self.br(x, y))
    }

    pub(crate) fn check(&self, got: usize) -> Result<()> {
        if got == self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.dim(), got })
        }
    }

    /// Bracket without dimension checks.
    pub(crate) fn br(&self, x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
        AlgebraElement { coords: self.br_vec(&x.coords, &y.coords) }
    }

    pub(crate) fn br_vec(&self, x: &[Rational], y: &[Rational]) -> Vector {
        let n = self.dim();
        let mut out = vec![Rational::zero(); n];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() || i == j {
                    continue;
                }
                let row = &self.structure[i][j];
                let mut w: Option<Rational> = None;
                for (k, ck) in row.iter().enumerate() {
                    if ck.is_zero() {
                        continue;
                    }
                    let w = w.get_or_insert_with(|| xi * yj);
                    out[k] += &*w * ck;
                }
            }
        }
        out
    }

    /// Float bracket, used by the Monte-Carlo and grid code.
    pub fn br_f64(&self, x: &[f64], y: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut out = vec![0.0; n];
        for i in 0..n {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..n {
                if y[j] == 0.0 || i == j {
                    continue;
                }
                for k in 0..n {
                    let c = &self.structure[i][j][k];
                    if !c.is_zero() {
                        out[k] += x[i] * y[j] * rational::to_f64(c);
                    }
                }
            }
        }
        out
    }

    /// `[g, V]` for a subspace `V`.
    pub fn bracket_with_algebra(&self, v: &Subspace) -> Subspace {
        let n = self.dim();
        let mut gens = Vec::new();
        for i in 0..n {
            let e = linalg::unit(n, i);
            for b in v.basis() {
                gens.push(self.br_vec(&e, b));
            }
        }
        Subspace::span(n, &gens)
    }

    pub fn is_ideal(&self, v: &Subspace) -> bool {
        v.contains_subspace(&self.bracket_with_algebra(v))
    }

    pub fn is_subalgebra(&self, v: &Subspace) -> bool {
        let b = v.basis();
        b.iter().all(|x| b.iter().all(|y| v.contains(&self.br_vec(x, y))))
    }

    fn lower_central_series_raw(&self) -> Vec<Subspace> {
        let n = self.dim();
        let mut series = vec![Subspace::full(n)];
        loop {
            let last = series.last().unwrap();
            if last.is_zero() {
                return series;
            }
            let next = self.bracket_with_algebra(last);
            if next.dim() == last.dim() {
                return series;
            }
            series.push(next);
        }
    }

    /// `g = C^1 ⊃ C^2 ⊃ ... ⊃ 0`, ending with the zero subspace.
    pub fn lower_central_series(&self) -> Result<Vec<Subspace>> {
        let series = self.lower_central_series_raw();
        let last = series.last().unwrap();
        if !last.is_zero() {
            return Err(Error::NotNilpotent { stable_dim: last.dim() });
        }
        Ok(series)
    }

    pub fn center(&self) -> Subspace {
        let n = self.dim();
        // x in center iff [x, X_j] = 0 for all j: one block of n equations per j
        let mut rows: Matrix = Vec::new();
        for j in 0..n {
            for k in 0..n {
                rows.push((0..n).map(|i| self.structure[i][j][k].clone()).collect());
            }
        }
        Subspace::span(n, &linalg::kernel(&rows, n))
    }

    /// Matrix of `ad(x)`: column `j` holds `[x, X_j]`.
    pub fn ad_matrix(&self, x: &AlgebraElement) -> Matrix {
        let n = self.dim();
        let cols: Vec<Vector> = (0..n).map(|j| self.br_vec(&x.coords, &linalg::unit(n, j))).collect();
        linalg::transpose(&cols)
    }

    /// `Ad(exp x) = exp(ad x)`; the series stops since `ad x` is nilpotent.
    pub fn big_ad(&self, x: &AlgebraElement) -> Matrix {
        let n = self.dim();
        let ad = self.ad_matrix(x);
        let mut result = linalg::identity(n);
        let mut term = linalg::identity(n);
        for k in 1..=n {
            term = linalg::mat_mul(&term, &ad);
            let inv_k = Rational::new(One::one(), k.into());
            for row in term.iter_mut() {
                for v in row.iter_mut() {
                    *v *= &inv_k;
                }
            }
            if term.iter().all(|r| linalg::is_zero(r)) {
                break;
            }
            for (rr, tr) in result.iter_mut().zip(&term) {
                for (a, b) in rr.iter_mut().zip(tr) {
                    *a += b;
                }
            }
        }
        result
    }

    /// `Ad*(g) l = l ∘ Ad(g)^{-1}`.
    pub fn coadjoint_action(&self, g: &GroupElement, ell: &Functional) -> Result<Functional> {
        self.check(g.log_coords.len())?;
        self.check(ell.coords.len())?;
        let inv = self.big_ad(&(-&g.log()));
        Ok(Functional { coords: linalg::vec_mat(&ell.coords, &inv) })
    }

    /// `log(exp(x) exp(y))`.
    pub fn bch_product(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
        self.check(x.dim())?;
        self.check(y.dim())?;
        let class = self.effective_class();
        bch::product(self, class, x, y)
    }

    pub fn bch_product_f64(&self, x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
        let class = self.effective_class();
        bch::product_f64(self, class, x, y)
    }

    pub fn group_mul(&self, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
        Ok(GroupElement::exp(self.bch_product(&g.log(), &h.log())?))
    }

    fn effective_class(&self) -> usize {
        if self.class > 0 {
            self.class
        } else {
            // unvalidated algebra: fall back to the raw series length
            self.lower_central_series_raw().len().saturating_sub(1).max(1)
        }
    }

    /// Value `l([x, y])`.
    pub fn form(&self, ell: &Functional, x: &[Rational], y: &[Rational]) -> Rational {
        linalg::dot(&ell.coords, &self.br_vec(x, y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::rational::{int, rat};

    #[test]
    fn heisenberg_validates_class_two() {
        let r = presets::heisenberg(1).validate();
        assert!(r.ok());
        assert_eq!(r.nilpotency_class, Some(2));
    }

    #[test]
    fn abelian_class_one() {
        let r = presets::abelian(3).validate();
        assert!(r.ok());
        assert_eq!(r.nilpotency_class, Some(1));
    }

    #[test]
    fn antisymmetry_violation_is_reported() {
        let n = 3;
        let mut c = vec![vec![vec![int(0); n]; n]; n];
        c[0][1][2] = int(1);
        let names = vec!["X".into(), "Y".into(), "Z".into()];
        let alg = LieAlgebra::unchecked(names.clone(), c.clone()).unwrap();
        let r = alg.validate();
        assert_eq!(r.antisymmetry_violations, vec![(0, 1, 2)]);
        assert!(!r.ok());
        assert!(matches!(LieAlgebra::new(names, c), Err(Error::InvalidAlgebra(_))));
    }

    #[test]
    fn jacobi_violation_is_reported() {
        // [a,b] = c, [b,c] = b: J(a,b,c) = c
        let alg = {
            let n = 3;
            let mut c = vec![vec![vec![int(0); n]; n]; n];
            let mut set = |i: usize, j: usize, k: usize, v: i64| {
                c[i][j][k] = int(v);
                c[j][i][k] = int(-v);
            };
            set(0, 1, 2, 1);
            set(1, 2, 1, 1);
            LieAlgebra::unchecked(vec!["a".into(), "b".into(), "c".into()], c).unwrap()
        };
        let r = alg.validate();
        assert!(r.antisymmetry_violations.is_empty());
        assert_eq!(r.jacobi_violations, vec![(0, 1, 2)]);
    }

    #[test]
    fn non_nilpotent_rejected() {
        // [X, Y] = Y: solvable, not nilpotent
        let err = LieAlgebra::from_brackets(&["X", "Y"], &[(0, 1, 1, int(1))]).unwrap_err();
        assert!(matches!(err, Error::NotNilpotent { stable_dim: 1 }));
    }

    #[test]
    fn bracket_examples() {
        let h = presets::heisenberg(1);
        let x = AlgebraElement::basis(3, 0);
        let y = AlgebraElement::basis(3, 1);
        assert_eq!(h.bracket(&x, &y).unwrap(), AlgebraElement::basis(3, 2));
        assert_eq!(h.bracket(&y, &x).unwrap(), -&AlgebraElement::basis(3, 2));
        assert!(h.bracket(&x, &AlgebraElement::zero(4)).is_err());

        let e = presets::engel();
        let x1 = AlgebraElement::basis(4, 0);
        let x2_plus_x3 = AlgebraElement::from_ints(&[0, 1, 1, 0]);
        assert_eq!(e.bracket(&x1, &x2_plus_x3).unwrap(), AlgebraElement::from_ints(&[0, 0, 1, 1]));
    }

    #[test]
    fn central_series_examples() {
        let h = presets::heisenberg(1);
        let s = h.lower_central_series().unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s[1], Subspace::span(3, &[linalg::unit(3, 2)]));
        assert_eq!(h.center(), Subspace::span(3, &[linalg::unit(3, 2)]));

        let e = presets::engel();
        let s = e.lower_central_series().unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s[1], Subspace::span(4, &[linalg::unit(4, 2), linalg::unit(4, 3)]));
        assert_eq!(s[2], Subspace::span(4, &[linalg::unit(4, 3)]));
        assert!(s[3].is_zero());
        assert_eq!(e.center(), Subspace::span(4, &[linalg::unit(4, 3)]));

        let a = presets::abelian(3);
        let s = a.lower_central_series().unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(a.center(), Subspace::full(3));
    }

    #[test]
    fn coadjoint_examples() {
        let h = presets::heisenberg(1);
        let zstar = Functional::from_ints(&[0, 0, 1]);
        let id = GroupElement::identity(3);
        assert_eq!(h.coadjoint_action(&id, &zstar).unwrap(), zstar);
        let gx = GroupElement::exp(AlgebraElement::basis(3, 0));
        // Z* - Y*
        assert_eq!(h.coadjoint_action(&gx, &zstar).unwrap(), Functional::from_ints(&[0, -1, 1]));
        let gz = GroupElement::exp(AlgebraElement::basis(3, 2).scale(&rat(7, 3)));
        let ell = Functional::new(vec![rat(1, 2), int(-4), rat(5, 3)]);
        assert_eq!(h.coadjoint_action(&gz, &ell).unwrap(), ell);
    }

    #[test]
    fn bch_examples() {
        let h = presets::heisenberg(1);
        let x = AlgebraElement::basis(3, 0);
        let y = AlgebraElement::basis(3, 1);
        let xy = h.bch_product(&x, &y).unwrap();
        assert_eq!(xy, AlgebraElement::new(vec![int(1), int(1), rat(1, 2)]));
        let yx = h.bch_product(&y, &x).unwrap();
        assert_eq!(&xy - &yx, AlgebraElement::basis(3, 2));
        let v = AlgebraElement::new(vec![rat(2, 3), int(-1), rat(5, 7)]);
        assert!(h.bch_product(&v, &-&v).unwrap().is_zero());
    }
}
