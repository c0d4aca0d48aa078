//! Vergne polarizations and the character `χ_l(exp X) = e^{2πi l(X)}`.

use num_complex::Complex64;
use num_traits::Zero;

use crate::algebra::{AlgebraElement, LieAlgebra};
use crate::coadjoint::{self, Functional};
use crate::error::{Error, Result};
use crate::linalg::{self, Subspace, Vector};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarizationResult {
    pub subalgebra: Subspace,
    pub subordinate_ok: bool,
    pub dimension_ok: bool,
    pub subalgebra_ok: bool,
    /// `l` itself; the character only ever sees its restriction to `p`.
    pub character: Functional,
}

impl PolarizationResult {
    pub fn basis(&self) -> Vec<AlgebraElement> {
        self.subalgebra.basis().iter().cloned().map(AlgebraElement::new).collect()
    }
}

/// Full flag of ideals `0 = g_0 ⊂ g_1 ⊂ ... ⊂ g_n = g` refining the lower
/// central series. Each layer `C^k / C^{k+1}` is filled from the RREF basis of
/// `C^k`, highest basis index first.
pub fn ideal_flag(alg: &LieAlgebra) -> Result<Vec<Subspace>> {
    let n = alg.dim();
    let series = alg.lower_central_series()?;
    let mut flag = vec![Subspace::zero(n)];
    let mut current = Subspace::zero(n);
    for layer in series.iter().rev().skip(1) {
        let mut candidates: Vec<Vector> = layer.basis().to_vec();
        candidates.reverse();
        for v in candidates {
            if current.contains(&v) {
                continue;
            }
            let mut b = current.basis().to_vec();
            b.push(v);
            current = Subspace::span(n, &b);
            flag.push(current.clone());
        }
    }
    debug_assert_eq!(flag.len(), n + 1);
    Ok(flag)
}

/// `{X ∈ V : l([X, V]) = 0}`.
fn restricted_stabilizer(alg: &LieAlgebra, ell: &Functional, v: &Subspace) -> Subspace {
    let b = v.basis();
    let form: Vec<Vec<Rational>> = b.iter().map(|x| b.iter().map(|y| alg.form(ell, x, y)).collect()).collect();
    let ker = linalg::kernel(&form, b.len());
    let vecs: Vec<Vector> = ker.iter().map(|c| linalg::combine(b, c, alg.dim())).collect();
    Subspace::span(alg.dim(), &vecs)
}

pub fn vergne_polarization(alg: &LieAlgebra, ell: &Functional) -> Result<PolarizationResult> {
    alg.check(ell.coords.len())?;
    let n = alg.dim();
    let flag = ideal_flag(alg)?;
    let mut p = Subspace::zero(n);
    for g_j in flag.iter().skip(1) {
        p = p.sum(&restricted_stabilizer(alg, ell, g_j));
    }
    let b = p.basis();
    let subordinate_ok = b.iter().all(|x| b.iter().all(|y| alg.form(ell, x, y).is_zero()));
    let subalgebra_ok = alg.is_subalgebra(&p);
    let orbit_dim = coadjoint::stabilizer(alg, ell)?.orbit_dim;
    let dimension_ok = p.dim() == n - orbit_dim / 2;
    if !(subordinate_ok && subalgebra_ok && dimension_ok) {
        return Err(Error::Inconsistent(format!(
            "Vergne construction: subordinate {subordinate_ok}, subalgebra {subalgebra_ok}, dimension {dimension_ok}"
        )));
    }
    Ok(PolarizationResult { subalgebra: p, subordinate_ok, dimension_ok, subalgebra_ok, character: ell.clone() })
}

/// `e^{2πi l(x)}` for `x ∈ p`. The phase is reduced mod 1 exactly first.
pub fn character_eval(pol: &PolarizationResult, x: &AlgebraElement) -> Result<Complex64> {
    if x.dim() != pol.subalgebra.ambient() {
        return Err(Error::DimensionMismatch { expected: pol.subalgebra.ambient(), got: x.dim() });
    }
    if !pol.subalgebra.contains(&x.coords) {
        return Err(Error::NotInPolarization);
    }
    let phase = rational::frac(&pol.character.eval(&x.coords));
    let theta = 2.0 * std::f64::consts::PI * rational::to_f64(&phase);
    Ok(Complex64::from_polar(1.0, theta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presets;
    use crate::rational::{int, rat};

    fn span(n: usize, idx: &[usize]) -> Subspace {
        Subspace::span(n, &idx.iter().map(|&i| linalg::unit(n, i)).collect::<Vec<_>>())
    }

    #[test]
    fn heisenberg_polarization() {
        let h = presets::heisenberg(1);
        let flag = ideal_flag(&h).unwrap();
        assert_eq!(flag[1], span(3, &[2]));
        assert_eq!(flag[2], span(3, &[1, 2]));
        let p = vergne_polarization(&h, &Functional::from_ints(&[0, 0, 1])).unwrap();
        assert_eq!(p.subalgebra, span(3, &[1, 2]));
        assert!(p.subordinate_ok && p.dimension_ok && p.subalgebra_ok);
    }

    #[test]
    fn abelian_polarization_is_everything() {
        let a = presets::abelian(3);
        let p = vergne_polarization(&a, &Functional::new(vec![rat(1, 2), int(3), int(-1)])).unwrap();
        assert_eq!(p.subalgebra, Subspace::full(3));
    }

    #[test]
    fn engel_polarization() {
        let e = presets::engel();
        let p = vergne_polarization(&e, &Functional::from_ints(&[0, 0, 0, 1])).unwrap();
        assert_eq!(p.subalgebra, span(4, &[1, 2, 3]));
    }

    #[test]
    fn character_values() {
        let h = presets::heisenberg(1);
        let p = vergne_polarization(&h, &Functional::from_ints(&[0, 0, 1])).unwrap();
        let one = character_eval(&p, &AlgebraElement::zero(3)).unwrap();
        assert!((one - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        let z = AlgebraElement::basis(3, 2);
        assert!((character_eval(&p, &z).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(matches!(character_eval(&p, &AlgebraElement::basis(3, 0)), Err(Error::NotInPolarization)));

        let p = vergne_polarization(&h, &Functional::dual_basis(3, 2, rat(3, 2))).unwrap();
        assert!((character_eval(&p, &z).unwrap() - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
    }
}
