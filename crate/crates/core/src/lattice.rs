//! Uniform subgroups given by rational generators, their covolumes, and the
//! density product `covol(p(Γ)) · d_π` on `G / pker(π)`.
//!
//! Generators `γ_k = exp(Y_k)` are expected to form a strong Malcev basis:
//! every tail `span{Y_k, ..., Y_n}` is an ideal, and every element of `Γ` is
//! `γ_1^{m_1} ... γ_n^{m_n}` with integer exponents.

use nalgebra::{DMatrix, DVector};
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::algebra::{AlgebraElement, GroupElement, LieAlgebra};
use crate::coadjoint::{self, Functional};
use crate::error::{Error, Result};
use crate::kernels;
use crate::linalg::{self, Matrix, Subspace, Vector};
use crate::rational::{self, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeSpec {
    pub generators: Vec<GroupElement>,
    pub declared_malcev: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DensityVerdict {
    /// `covol(p(Γ)) · d_π > 1`: every lattice-orbit coherent subsystem is incomplete.
    IncompleteByTheorem,
    /// Product `<= 1`; the necessary condition does not exclude completeness.
    NotExcluded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloEstimate {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: usize,
}

impl MonteCarloEstimate {
    /// Half-width of the 95% normal confidence interval.
    pub fn half_width_95(&self) -> f64 {
        1.96 * self.std_error
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Covolume {
    /// `|det|` of the log-coordinate matrix.
    pub determinant: Rational,
    /// True for class <= 2, where the determinant is reported as exact.
    pub exact: bool,
    /// Fundamental-domain estimate, always present for class >= 3.
    pub monte_carlo: Option<MonteCarloEstimate>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectedLattice {
    /// Quotient generators in complement-chart coordinates.
    pub generators: Vec<Vector>,
    pub chart: Vec<usize>,
    pub covol_quotient: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityReport {
    pub covol_g: Rational,
    pub covol_g_exact: bool,
    pub covol_quotient: Rational,
    pub d_pi: Rational,
    pub product: Rational,
    pub verdict: DensityVerdict,
    pub measure_scale: Rational,
}

impl LatticeSpec {
    pub fn new(alg: &LieAlgebra, generators: Vec<GroupElement>, declared_malcev: bool) -> Result<Self> {
        let n = alg.dim();
        if generators.len() != n {
            return Err(Error::Input(format!("lattice needs {n} generators, got {}", generators.len())));
        }
        for g in &generators {
            alg.check(g.log_coords.len())?;
        }
        let spec = Self { generators, declared_malcev };
        if linalg::determinant(&spec.log_matrix()).is_zero() {
            return Err(Error::SingularLattice);
        }
        Ok(spec)
    }

    /// Generators `exp(scale_i X_i)` along the basis.
    pub fn diagonal(alg: &LieAlgebra, scales: &[Rational]) -> Result<Self> {
        let n = alg.dim();
        let gens = scales
            .iter()
            .enumerate()
            .map(|(i, s)| GroupElement::exp(AlgebraElement::basis(n, i).scale(s)))
            .collect();
        Self::new(alg, gens, true)
    }

    /// Row `k` is `log γ_k`.
    pub fn log_matrix(&self) -> Matrix {
        self.generators.iter().map(|g| g.log_coords.clone()).collect()
    }

    fn tails_are_ideals(&self, alg: &LieAlgebra) -> Option<usize> {
        let m = self.log_matrix();
        (1..m.len()).find(|&k| !alg.is_ideal(&Subspace::span(alg.dim(), &m[k..].to_vec())))
    }

    /// Declared flag plus a structural check of the ideal chain.
    pub fn check_malcev(&self, alg: &LieAlgebra) -> Result<()> {
        if !self.declared_malcev {
            return Err(Error::NotMalcev("generators not declared as a Malcev basis".into()));
        }
        if let Some(k) = self.tails_are_ideals(alg) {
            return Err(Error::NotMalcev(format!("span of generators {}.. is not an ideal", k + 1)));
        }
        Ok(())
    }

    /// Integer-word closure for all generator pairs: `γ_i γ_j`, `γ_i γ_j^{-1}`,
    /// `γ_i^{-1} γ_j` and `γ_i^{-1}` must have integer Malcev exponents.
    pub fn check_subgroup(&self, alg: &LieAlgebra) -> Result<()> {
        self.check_malcev(alg)?;
        let n = self.generators.len();
        for i in 0..n {
            let gi = &self.generators[i];
            let mut words = vec![(format!("γ{}^-1", i + 1), gi.inverse())];
            for j in 0..n {
                let gj = &self.generators[j];
                words.push((format!("γ{}·γ{}", i + 1, j + 1), alg.group_mul(gi, gj)?));
                words.push((format!("γ{}·γ{}^-1", i + 1, j + 1), alg.group_mul(gi, &gj.inverse())?));
                words.push((format!("γ{}^-1·γ{}", i + 1, j + 1), alg.group_mul(&gi.inverse(), gj)?));
            }
            for (label, g) in words {
                let t = malcev_exponents(alg, self, &g)?;
                if let Some(bad) = t.iter().find(|x| !x.is_integer()) {
                    return Err(Error::NotMalcev(format!(
                        "{label} has non-integer exponent {}",
                        rational::format(bad)
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Exponents `t` with `g = γ_1^{t_1} ... γ_n^{t_n}`.
pub fn malcev_exponents(alg: &LieAlgebra, lattice: &LatticeSpec, g: &GroupElement) -> Result<Vec<Rational>> {
    let rows = lattice.log_matrix();
    let cols = linalg::transpose(&rows);
    let n = rows.len();
    let mut cur = g.log();
    let mut t = Vec::with_capacity(n);
    for (k, row) in rows.iter().enumerate() {
        let c = linalg::solve(&cols, &cur.coords).ok_or(Error::SingularLattice)?;
        if c[..k].iter().any(|x| !x.is_zero()) {
            return Err(Error::NotMalcev("generator tails do not form a flag of ideals".into()));
        }
        let tk = c[k].clone();
        let step = AlgebraElement::new(row.iter().map(|y| -(y * &tk)).collect());
        cur = alg.bch_product(&step, &cur)?;
        t.push(tk);
    }
    if !cur.is_zero() {
        return Err(Error::Inconsistent("Malcev decomposition left a remainder".into()));
    }
    Ok(t)
}

fn malcev_exponents_f64(alg: &LieAlgebra, rows: &[Vec<f64>], lu: &nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>, g: &[f64]) -> Result<Vec<f64>> {
    let mut cur = g.to_vec();
    let mut t = Vec::with_capacity(rows.len());
    for (k, row) in rows.iter().enumerate() {
        let c = lu
            .solve(&DVector::from_vec(cur.clone()))
            .ok_or(Error::SingularLattice)?;
        let tk = c[k];
        let step: Vec<f64> = row.iter().map(|y| -y * tk).collect();
        cur = alg.bch_product_f64(&step, &cur)?;
        t.push(tk);
    }
    Ok(t)
}

fn word_f64(alg: &LieAlgebra, rows: &[Vec<f64>], t: &[f64]) -> Result<Vec<f64>> {
    let n = rows.len();
    let mut acc = vec![0.0; n];
    for (row, tk) in rows.iter().zip(t) {
        let step: Vec<f64> = row.iter().map(|y| y * tk).collect();
        acc = alg.bch_product_f64(&acc, &step)?;
    }
    Ok(acc)
}

/// Measures the fundamental domain `{γ_1^{t_1}...γ_n^{t_n} : t ∈ [0,1)^n}` by
/// rejection sampling in a bounding box of first-kind coordinates.
pub fn monte_carlo_covolume(alg: &LieAlgebra, lattice: &LatticeSpec, samples: usize, seed: u64) -> Result<MonteCarloEstimate> {
    lattice.check_malcev(alg)?;
    let n = alg.dim();
    let rows: Vec<Vec<f64>> = lattice.log_matrix().iter().map(|r| r.iter().map(rational::to_f64).collect()).collect();
    let cols = DMatrix::from_fn(n, n, |r, c| rows[c][r]);
    let lu = cols.lu();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // bounding box from cube corners and interior points
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    let probe = |t: &[f64], lo: &mut Vec<f64>, hi: &mut Vec<f64>| -> Result<()> {
        let x = word_f64(alg, &rows, t)?;
        for i in 0..n {
            lo[i] = lo[i].min(x[i]);
            hi[i] = hi[i].max(x[i]);
        }
        Ok(())
    };
    for mask in 0..(1usize << n) {
        let t: Vec<f64> = (0..n).map(|i| ((mask >> i) & 1) as f64).collect();
        probe(&t, &mut lo, &mut hi)?;
    }
    for _ in 0..(200 * n) {
        let t: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
        probe(&t, &mut lo, &mut hi)?;
    }
    for i in 0..n {
        let pad = 0.1 * (hi[i] - lo[i]).max(1e-12);
        lo[i] -= pad;
        hi[i] += pad;
    }
    let box_vol: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();

    let mut hits = 0usize;
    for _ in 0..samples {
        let x: Vec<f64> = (0..n).map(|i| lo[i] + (hi[i] - lo[i]) * rng.random::<f64>()).collect();
        let t = malcev_exponents_f64(alg, &rows, &lu, &x)?;
        if t.iter().all(|&v| (0.0..1.0).contains(&v)) {
            hits += 1;
        }
    }
    let p = hits as f64 / samples as f64;
    Ok(MonteCarloEstimate {
        estimate: box_vol * p,
        std_error: box_vol * (p * (1.0 - p) / samples as f64).sqrt(),
        samples,
    })
}

pub const MONTE_CARLO_SAMPLES: usize = 20_000;

pub fn covolume(alg: &LieAlgebra, lattice: &LatticeSpec) -> Result<Covolume> {
    covolume_seeded(alg, lattice, kernels::DEFAULT_SEED)
}

pub fn covolume_seeded(alg: &LieAlgebra, lattice: &LatticeSpec, seed: u64) -> Result<Covolume> {
    lattice.check_malcev(alg)?;
    let det = linalg::determinant(&lattice.log_matrix()).abs();
    if det.is_zero() {
        return Err(Error::SingularLattice);
    }
    if alg.class() <= 2 {
        return Ok(Covolume { determinant: det, exact: true, monte_carlo: None });
    }
    let mc = monte_carlo_covolume(alg, lattice, MONTE_CARLO_SAMPLES, seed)?;
    Ok(Covolume { determinant: det, exact: false, monte_carlo: Some(mc) })
}

pub fn project_lattice(alg: &LieAlgebra, lattice: &LatticeSpec, pker: &Subspace) -> Result<ProjectedLattice> {
    let n = alg.dim();
    let (inside, outside): (Vec<Vector>, Vec<Vector>) =
        lattice.log_matrix().into_iter().partition(|v| pker.contains(v));
    if Subspace::span(n, &inside) != *pker {
        return Err(Error::NotAdapted);
    }
    let chart = pker.greedy_complement();
    let generators = coadjoint::quotient_coordinates(pker, &chart, &outside).ok_or(Error::NotAdapted)?;
    let covol_quotient = linalg::determinant(&generators).abs();
    if covol_quotient.is_zero() {
        return Err(Error::NotAdapted);
    }
    Ok(ProjectedLattice { generators, chart, covol_quotient })
}

pub fn density_report(alg: &LieAlgebra, ell: &Functional, lattice: &LatticeSpec) -> Result<DensityReport> {
    density_report_scaled(alg, ell, lattice, &rational::one())
}

/// Same report with the invariant measure on `G / pker` multiplied by `scale`:
/// the quotient covolume scales by `scale`, the formal dimension by `1/scale`.
pub fn density_report_scaled(alg: &LieAlgebra, ell: &Functional, lattice: &LatticeSpec, scale: &Rational) -> Result<DensityReport> {
    density_report_seeded(alg, ell, lattice, scale, kernels::DEFAULT_SEED)
}

/// The projective kernel is sampled with `seed`; covolume Monte-Carlo uses it too.
pub fn density_report_seeded(
    alg: &LieAlgebra,
    ell: &Functional,
    lattice: &LatticeSpec,
    scale: &Rational,
    seed: u64,
) -> Result<DensityReport> {
    if !scale.is_positive() {
        return Err(Error::Input("measure scale must be positive".into()));
    }
    let cert = coadjoint::is_flat(alg, ell)?;
    if !cert.flat {
        return Err(Error::HypothesesUnmet);
    }
    let fd = coadjoint::formal_dimension(alg, ell)?;
    let kernel = kernels::projective_kernel_seeded(alg, ell, seed)?;
    lattice.check_subgroup(alg)?;
    let covol = covolume_seeded(alg, lattice, seed)?;
    let proj = project_lattice(alg, lattice, &kernel.pker)?;
    let covol_quotient = &proj.covol_quotient * scale;
    let d_pi = &fd.d_pi / scale;
    let product = &covol_quotient * &d_pi;
    let verdict = if product > rational::one() {
        DensityVerdict::IncompleteByTheorem
    } else {
        DensityVerdict::NotExcluded
    };
    Ok(DensityReport {
        covol_g: covol.determinant,
        covol_g_exact: covol.exact,
        covol_quotient,
        d_pi,
        product,
        verdict,
        measure_scale: scale.clone(),
    })
}

/// `Γ_{α,β}` in `h_1`: generators `exp(αX)`, `exp(βY)`, `exp(αβZ)`.
pub fn heisenberg_lattice(alg: &LieAlgebra, alpha: &Rational, beta: &Rational) -> Result<LatticeSpec> {
    LatticeSpec::diagonal(alg, &[alpha.clone(), beta.clone(), alpha * beta])
}
