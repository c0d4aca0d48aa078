//! Per-functional orbit data: the skew form `B_l(X, Y) = l([X, Y])`, the
//! stabilizer `g(l)`, flatness, and the Pfaffian formal dimension.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::algebra::{AlgebraElement, GroupElement, LieAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{self, Matrix, Subspace, Vector};
use crate::rational::{self, Rational};

/// Haar convention behind every formal dimension and covolume in this crate.
pub const NORMALIZATION_TAG: &str = "haar=lebesgue/exp-first-kind; quotient=greedy-complement-chart";

/// Element of the dual space: `coords[i] = l(X_i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Functional {
    pub coords: Vector,
}

impl Functional {
    pub fn new(coords: Vector) -> Self {
        Self { coords }
    }

    pub fn zero(n: usize) -> Self {
        Self { coords: vec![Rational::zero(); n] }
    }

    pub fn from_ints(v: &[i64]) -> Self {
        Self { coords: v.iter().map(|&x| rational::int(x)).collect() }
    }

    /// `scale * X_i^*`.
    pub fn dual_basis(n: usize, i: usize, scale: Rational) -> Self {
        let mut coords = vec![Rational::zero(); n];
        coords[i] = scale;
        Self { coords }
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        linalg::dot(&self.coords, x)
    }

    pub fn is_zero(&self) -> bool {
        linalg::is_zero(&self.coords)
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(rational::to_f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stabilizer {
    /// `B[i][j] = l([X_i, X_j])`.
    pub form: Matrix,
    pub algebra: Subspace,
    pub orbit_dim: usize,
}

/// Witnesses for the two flatness tests.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FlatnessCertificate {
    pub flat: bool,
    /// `[g, g(l)] ⊆ g(l)`.
    pub ideal_test: bool,
    /// `Ad*(g) l - l` vanishes on `g(l)` for the probe group elements.
    pub affine_test: bool,
    /// `(i, stabilizer basis index)` with `[X_i, s] ∉ g(l)`, when not flat.
    pub ideal_witness: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormalDimension {
    pub pfaffian: Rational,
    pub d_pi: Rational,
    pub normalization_tag: &'static str,
    /// Basis indices spanning the complement chart.
    pub complement: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrbitAnalysis {
    pub stabilizer_basis: Vec<AlgebraElement>,
    pub orbit_dim: usize,
    pub flat: bool,
    /// Pfaffian of `B` on the complement chart; `1` for a point orbit.
    pub pfaffian: Rational,
    /// `|pfaffian|`, or `0` when the orbit is a point.
    pub formal_dimension: Rational,
    pub square_integrable: bool,
    pub normalization_tag: &'static str,
}

pub fn skew_form(alg: &LieAlgebra, ell: &Functional) -> Matrix {
    let n = alg.dim();
    (0..n)
        .map(|i| (0..n).map(|j| alg.form(ell, &linalg::unit(n, i), &linalg::unit(n, j))).collect())
        .collect()
}

pub fn stabilizer(alg: &LieAlgebra, ell: &Functional) -> Result<Stabilizer> {
    alg.check(ell.coords.len())?;
    let n = alg.dim();
    let form = skew_form(alg, ell);
    let ker = linalg::kernel(&form, n);
    let algebra = Subspace::span(n, &ker);
    let orbit_dim = n - algebra.dim();
    debug_assert_eq!(orbit_dim % 2, 0);
    Ok(Stabilizer { form, algebra, orbit_dim })
}

fn ideal_test(alg: &LieAlgebra, stab: &Subspace) -> Option<(usize, usize)> {
    let n = alg.dim();
    for i in 0..n {
        let e = linalg::unit(n, i);
        for (s, b) in stab.basis().iter().enumerate() {
            if !stab.contains(&alg.br_vec(&e, b)) {
                return Some((i, s));
            }
        }
    }
    None
}

/// Probe elements `exp(t X_i)` and `exp(t (X_i + X_j))`, `t = 1..=class`.
///
/// `t ↦ (Ad*(exp tX) l - l)(Y)` for `Y ∈ g(l)` is a polynomial of degree at
/// most `class` without constant or linear term, so vanishing at these `t`
/// forces it to vanish identically; the pairwise sums recover the polarized
/// quadratic term, which is what equivalence with the ideal test needs.
fn affine_probes(alg: &LieAlgebra) -> Vec<AlgebraElement> {
    let n = alg.dim();
    let class = alg.class().max(1);
    let mut dirs = Vec::new();
    for i in 0..n {
        dirs.push(AlgebraElement::basis(n, i));
        for j in i + 1..n {
            dirs.push(&AlgebraElement::basis(n, i) + &AlgebraElement::basis(n, j));
        }
    }
    let mut out = Vec::new();
    for d in &dirs {
        for t in 1..=class {
            out.push(d.scale(&rational::int(t as i64)));
        }
    }
    out
}

fn affine_test(alg: &LieAlgebra, ell: &Functional, stab: &Subspace) -> Result<bool> {
    for x in affine_probes(alg) {
        let moved = alg.coadjoint_action(&GroupElement::exp(x), ell)?;
        let diff: Vector = moved.coords.iter().zip(&ell.coords).map(|(a, b)| a - b).collect();
        if stab.basis().iter().any(|s| !linalg::dot(&diff, s).is_zero()) {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn is_flat(alg: &LieAlgebra, ell: &Functional) -> Result<FlatnessCertificate> {
    let stab = stabilizer(alg, ell)?;
    let witness = ideal_test(alg, &stab.algebra);
    let ideal = witness.is_none();
    let affine = affine_test(alg, ell, &stab.algebra)?;
    if ideal != affine {
        return Err(Error::Inconsistent(format!(
            "flatness: ideal test {ideal} but affine test {affine}"
        )));
    }
    Ok(FlatnessCertificate { flat: ideal, ideal_test: ideal, affine_test: affine, ideal_witness: witness })
}

/// Pfaffian of `B` restricted to `span(vectors)`.
pub fn restricted_pfaffian(alg: &LieAlgebra, ell: &Functional, vectors: &[Vector]) -> Rational {
    let m: Matrix = vectors
        .iter()
        .map(|a| vectors.iter().map(|b| alg.form(ell, a, b)).collect())
        .collect();
    linalg::pfaffian(&m)
}

/// `|Pf(B|_W)| / |det P|`, where `P` expresses `W` modulo `g(l)` in the
/// greedy complement chart. Independent of the choice of `W`.
pub fn formal_dimension_in_basis(alg: &LieAlgebra, ell: &Functional, complement: &[Vector]) -> Result<Rational> {
    let stab = stabilizer(alg, ell)?;
    if complement.len() != stab.orbit_dim {
        return Err(Error::Input(format!(
            "complement basis has {} vectors, orbit dimension is {}",
            complement.len(),
            stab.orbit_dim
        )));
    }
    let chart = stab.algebra.greedy_complement();
    let p = quotient_coordinates(&stab.algebra, &chart, complement)
        .ok_or_else(|| Error::Input("vectors are not a complement to the stabilizer".into()))?;
    let det = linalg::determinant(&p);
    if det.is_zero() {
        return Err(Error::Input("vectors are not a complement to the stabilizer".into()));
    }
    let pf = restricted_pfaffian(alg, ell, complement);
    Ok(pf.abs() / det.abs())
}

/// Coordinates of `vectors` modulo `sub` in the chart spanned by the standard
/// basis vectors listed in `chart`. Row `a` holds the coordinates of vector `a`.
pub(crate) fn quotient_coordinates(sub: &Subspace, chart: &[usize], vectors: &[Vector]) -> Option<Matrix> {
    let n = sub.ambient();
    // columns: chart units then subspace basis; solve for each vector
    let mut cols: Vec<Vector> = chart.iter().map(|&i| linalg::unit(n, i)).collect();
    cols.extend(sub.basis().iter().cloned());
    if cols.len() != n {
        return None;
    }
    let m = linalg::transpose(&cols);
    vectors
        .iter()
        .map(|v| linalg::solve(&m, v).map(|c| c[..chart.len()].to_vec()))
        .collect()
}

pub fn formal_dimension(alg: &LieAlgebra, ell: &Functional) -> Result<FormalDimension> {
    let cert = is_flat(alg, ell)?;
    let stab = stabilizer(alg, ell)?;
    if stab.orbit_dim == 0 {
        return Err(Error::Character);
    }
    if !cert.flat {
        return Err(Error::NotSquareIntegrable);
    }
    let n = alg.dim();
    let complement = stab.algebra.greedy_complement();
    let vecs: Vec<Vector> = complement.iter().map(|&i| linalg::unit(n, i)).collect();
    let pfaffian = restricted_pfaffian(alg, ell, &vecs);
    Ok(FormalDimension { d_pi: pfaffian.abs(), pfaffian, normalization_tag: NORMALIZATION_TAG, complement })
}

pub fn analyze(alg: &LieAlgebra, ell: &Functional) -> Result<OrbitAnalysis> {
    let stab = stabilizer(alg, ell)?;
    let cert = is_flat(alg, ell)?;
    let n = alg.dim();
    let complement = stab.algebra.greedy_complement();
    let vecs: Vec<Vector> = complement.iter().map(|&i| linalg::unit(n, i)).collect();
    let pfaffian = restricted_pfaffian(alg, ell, &vecs);
    let formal_dimension = if stab.orbit_dim == 0 { Rational::zero() } else { pfaffian.abs() };
    Ok(OrbitAnalysis {
        stabilizer_basis: stab.algebra.basis().iter().cloned().map(AlgebraElement::new).collect(),
        orbit_dim: stab.orbit_dim,
        flat: cert.flat,
        square_integrable: cert.flat && stab.orbit_dim > 0,
        pfaffian,
        formal_dimension,
        normalization_tag: NORMALIZATION_TAG,
    })
}

/// `candidate ∈ ell0 + k^⊥`, exactly.
pub fn affine_membership(ell0: &Functional, k: &Subspace, candidate: &Functional) -> bool {
    let diff: Vector = candidate.coords.iter().zip(&ell0.coords).map(|(a, b)| a - b).collect();
    k.basis().iter().all(|v| linalg::dot(&diff, v).is_zero())
}

/// Tolerance version for numeric candidates. The basis of `k` is normalized
/// to unit Euclidean length before pairing.
pub fn affine_membership_numeric(ell0: &Functional, k: &Subspace, candidate: &[f64], tol: f64) -> bool {
    affine_residual(ell0, k, candidate) <= tol
}

pub fn affine_residual(ell0: &Functional, k: &Subspace, candidate: &[f64]) -> f64 {
    let base = ell0.to_f64();
    let diff: Vec<f64> = candidate.iter().zip(&base).map(|(a, b)| a - b).collect();
    k.basis()
        .iter()
        .map(|v| {
            let vf: Vec<f64> = v.iter().map(rational::to_f64).collect();
            let norm = vf.iter().map(|x| x * x).sum::<f64>().sqrt();
            (diff.iter().zip(&vf).map(|(a, b)| a * b).sum::<f64>() / norm).abs()
        })
        .fold(0.0, f64::max)
}
