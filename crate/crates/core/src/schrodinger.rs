//! Schrödinger representation `π_λ` of the Heisenberg group `H^1` on a
//! periodic grid of `[-R, R)`.
//!
//! With `dπ(X) = d/dx`, `dπ(Y) = 2πiλx` and `dπ(Z) = 2πiλ`,
//!
//! ```text
//! π(exp(pX) exp(qY) exp(tZ)) f(x) = e^{2πiλ(t + pq)} e^{2πiλqx} f(x + p)
//! ```
//!
//! Translations use Fourier shifts. All reductions run in index order, so
//! results do not depend on the rayon schedule.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::algebra::LieAlgebra;
use crate::coadjoint::{self, Functional};
use crate::error::{Error, Result};
use crate::presets;
use crate::rational::{self, Rational};

pub const DEFAULT_HALF_WIDTH: f64 = 12.0;
pub const DEFAULT_SAMPLES: usize = 4096;
/// Relative spectral/boundary energy above which a state is flagged as having heavy tails.
const TAIL_TOLERANCE: f64 = 1e-12;
const COMPLEX_RESIDUAL: f64 = 1e-6;
pub const COMPLETENESS_THRESHOLD: f64 = 1e-4;
const LEVELS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub half_width: f64,
    pub samples: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { half_width: DEFAULT_HALF_WIDTH, samples: DEFAULT_SAMPLES }
    }
}

impl GridSpec {
    pub fn new(half_width: f64, samples: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width >= 4.0) {
            return Err(Error::Grid(format!("half width R = {half_width} must be >= 4")));
        }
        if samples < 64 || samples % 2 != 0 {
            return Err(Error::Grid(format!("sample count N = {samples} must be even and >= 64")));
        }
        Ok(Self { half_width, samples })
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / self.samples as f64
    }

    pub fn point(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.step()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.samples).map(|j| self.point(j)).collect()
    }

    /// Signed DFT frequency of bin `k`, in cycles per unit length.
    pub fn frequency(&self, k: usize) -> f64 {
        let n = self.samples as i64;
        let k = k as i64;
        let signed = if k < n / 2 { k } else { k - n };
        signed as f64 / (2.0 * self.half_width)
    }

    pub fn nyquist(&self) -> f64 {
        self.samples as f64 / (4.0 * self.half_width)
    }

    /// Largest admissible translation `R/2`.
    pub fn safe_shift(&self) -> f64 {
        self.half_width / 2.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    grid: GridSpec,
    samples: Vec<Complex64>,
    norm: f64,
}

fn inner_raw(a: &[Complex64], b: &[Complex64], h: f64) -> Complex64 {
    a.iter().zip(b).fold(Complex64::new(0.0, 0.0), |acc, (x, y)| acc + x * y.conj()) * h
}

impl StateVector {
    pub fn new(grid: GridSpec, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.samples {
            return Err(Error::DimensionMismatch { expected: grid.samples, got: samples.len() });
        }
        if samples.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Input("state has non-finite samples".into()));
        }
        let norm = inner_raw(&samples, &samples, grid.step()).re.sqrt();
        Ok(Self { grid, samples, norm })
    }

    pub fn from_fn(grid: GridSpec, f: impl Fn(f64) -> Complex64) -> Self {
        let samples = grid.points().into_iter().map(f).collect();
        Self::new(grid, samples).expect("finite samples")
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }

    /// `⟨self, other⟩`, linear in the first slot.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        inner_raw(&self.samples, &other.samples, self.grid.step())
    }

    pub fn normalized(&self) -> Result<Self> {
        if self.norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        let s = 1.0 / self.norm;
        Self::new(self.grid, self.samples.iter().map(|z| z * s).collect())
    }

    pub fn distance(&self, other: &StateVector) -> f64 {
        let d: Vec<Complex64> = self.samples.iter().zip(&other.samples).map(|(a, b)| a - b).collect();
        inner_raw(&d, &d, self.grid.step()).re.sqrt()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self::new(self.grid, self.samples.iter().map(|z| z * c).collect()).expect("finite samples")
    }
}

/// `2^{1/4} e^{-πx²}`.
pub fn gaussian(grid: GridSpec) -> StateVector {
    translated_gaussian(grid, 0.0)
}

pub fn translated_gaussian(grid: GridSpec, a: f64) -> StateVector {
    let c = 2f64.powf(0.25);
    StateVector::from_fn(grid, |x| Complex64::new(c * (-PI * (x - a) * (x - a)).exp(), 0.0))
}

/// Orthonormal Hermite functions `h_0, ..., h_{count-1}` built on `e^{-πx²}`.
pub fn hermite_functions(grid: GridSpec, count: usize) -> Vec<StateVector> {
    let xs = grid.points();
    let s = (2.0 * PI).sqrt();
    let scale = (2.0 * PI).powf(0.25);
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(count);
    for k in 0..count {
        let row: Vec<f64> = match k {
            0 => xs.iter().map(|x| scale * PI.powf(-0.25) * (-PI * x * x).exp()).collect(),
            _ => xs
                .iter()
                .enumerate()
                .map(|(j, x)| {
                    let u = s * x;
                    let prev = out[k - 1][j];
                    let prev2 = if k >= 2 { out[k - 2][j] } else { 0.0 };
                    (2.0 / k as f64).sqrt() * u * prev - ((k - 1) as f64 / k as f64).sqrt() * prev2
                })
                .collect(),
        };
        out.push(row);
    }
    out.into_iter()
        .map(|r| StateVector::new(grid, r.into_iter().map(|v| Complex64::new(v, 0.0)).collect()).expect("finite"))
        .collect()
}

pub fn hermite(grid: GridSpec, k: usize) -> StateVector {
    hermite_functions(grid, k + 1).pop().expect("k + 1 >= 1")
}

/// Sum of three modulated Gaussian bumps with seeded random parameters.
pub fn random_smooth(grid: GridSpec, seed: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bumps: Vec<(Complex64, f64, f64, f64)> = (0..3)
        .map(|_| {
            let c = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            (c, rng.random_range(0.5..2.0), rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))
        })
        .collect();
    StateVector::from_fn(grid, |x| {
        bumps
            .iter()
            .map(|(c, a, b, w)| c * (-PI * a * (x - b) * (x - b)).exp() * Complex64::from_polar(1.0, 2.0 * PI * w * x))
            .sum()
    })
}

/// Independent complex normal samples on `|x| <= 2`, zero elsewhere.
pub fn random_rough(grid: GridSpec, seed: u64) -> StateVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples = grid
        .points()
        .into_iter()
        .map(|x| {
            let z = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            if x.abs() <= 2.0 {
                z
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    StateVector::new(grid, samples).expect("finite")
}

/// Group element `exp(pX) exp(qY) exp(tZ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HeisenbergPoint {
    pub p: f64,
    pub q: f64,
    pub t: f64,
}

impl HeisenbergPoint {
    pub fn new(p: f64, q: f64, t: f64) -> Self {
        Self { p, q, t }
    }

    pub fn identity() -> Self {
        Self::new(0.0, 0.0, 0.0)
    }

    /// First-kind coordinates `log g = pX + qY + (t + pq/2)Z`.
    pub fn log(&self) -> [f64; 3] {
        [self.p, self.q, self.t + self.p * self.q / 2.0]
    }

    pub fn from_log(l: &[f64]) -> Self {
        Self::new(l[0], l[1], l[2] - l[0] * l[1] / 2.0)
    }

    pub fn inverse(&self) -> Self {
        let l = self.log();
        Self::from_log(&[-l[0], -l[1], -l[2]])
    }

    /// Product through the BCH series on `h_1`.
    pub fn mul(&self, other: &Self) -> Self {
        let h = presets::heisenberg(1);
        let l = h.bch_product_f64(&self.log(), &other.log()).expect("class 2");
        Self::from_log(&l)
    }
}

/// `Ad*(g) l = l ∘ Ad(g^{-1})` on `h_1*`, evaluated through the float bracket.
pub fn coadjoint_numeric(g: &HeisenbergPoint, ell: &[f64; 3]) -> [f64; 3] {
    let h = presets::heisenberg(1);
    let neg: Vec<f64> = g.log().iter().map(|v| -v).collect();
    let mut out = [0.0; 3];
    for (i, slot) in out.iter_mut().enumerate() {
        // Ad(exp(-L)) e_i = e_i - [L, e_i]   (class 2)
        let mut e = [0.0; 3];
        e[i] = 1.0;
        let b = h.br_f64(&neg, &e);
        *slot = (0..3).map(|k| ell[k] * (e[k] + b[k])).sum();
    }
    out
}

/// Cross-section of `G -> G/Z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Section {
    /// `σ(p, q) = exp(pX) exp(qY)`.
    TranslateFirst,
    /// `σ(p, q) = exp(qY) exp(pX)`.
    ModulateFirst,
}

impl Section {
    pub fn point(&self, p: f64, q: f64) -> HeisenbergPoint {
        match self {
            Section::TranslateFirst => HeisenbergPoint::new(p, q, 0.0),
            Section::ModulateFirst => HeisenbergPoint::new(p, q, -p * q),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentMap {
    /// `J̃ = J / 2π` on `(X, Y, Z)`.
    pub values: [f64; 3],
    pub raw: [f64; 3],
    pub tail_warning: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymplecticReport {
    pub moment: [f64; 3],
    pub affine_residual: f64,
    pub membership_ok: bool,
    pub stabilizer_dim: usize,
    pub pker_dim: usize,
    pub stabilizer_ok: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexOrbitReport {
    pub dim_s: usize,
    pub dim_s_plus_conj: usize,
    pub singular_values: Vec<f64>,
    pub complex: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CompletenessSignal {
    Completeness,
    Incompleteness,
    Inconclusive,
    Empty,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncationLevel {
    pub probes: usize,
    /// Phase-space radius `sqrt(probes / π)` covered by the probe subspace.
    pub radius: f64,
    pub sigma_min: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompletenessReport {
    pub alpha: f64,
    pub beta: f64,
    pub lattice_points: usize,
    pub levels: Vec<TruncationLevel>,
    pub signal: CompletenessSignal,
}

impl CompletenessReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("probes,radius,sigma_min\n");
        for l in &self.levels {
            s.push_str(&format!("{},{:.6},{:.6e}\n", l.probes, l.radius, l.sigma_min));
        }
        s
    }
}

fn classify_levels(levels: &[TruncationLevel]) -> CompletenessSignal {
    let Some(last) = levels.last() else {
        return CompletenessSignal::Empty;
    };
    if levels.len() < 2 {
        return CompletenessSignal::Inconclusive;
    }
    let prev = &levels[levels.len() - 2];
    let above = levels.iter().all(|l| l.sigma_min >= COMPLETENESS_THRESHOLD);
    if above && last.sigma_min >= 0.5 * prev.sigma_min {
        return CompletenessSignal::Completeness;
    }
    let decreasing = levels.windows(2).all(|w| w[1].sigma_min <= w[0].sigma_min * (1.0 + 1e-9) + 1e-14);
    if decreasing && last.sigma_min < COMPLETENESS_THRESHOLD {
        return CompletenessSignal::Incompleteness;
    }
    CompletenessSignal::Inconclusive
}

pub struct SchrodingerRep {
    lambda: Rational,
    lambda_f: f64,
    grid: GridSpec,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    algebra: LieAlgebra,
}

impl std::fmt::Debug for SchrodingerRep {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SchrodingerRep").field("lambda", &self.lambda_f).field("grid", &self.grid).finish()
    }
}

impl SchrodingerRep {
    pub fn new(lambda: &Rational, grid: GridSpec) -> Result<Self> {
        if num_traits::Zero::is_zero(lambda) {
            return Err(Error::Input("lambda must be nonzero".into()));
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            lambda: lambda.clone(),
            lambda_f: rational::to_f64(lambda),
            grid,
            forward: planner.plan_fft_forward(grid.samples),
            inverse: planner.plan_fft_inverse(grid.samples),
            algebra: presets::heisenberg(1),
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda_f
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    /// `λZ*`, the orbit representative.
    pub fn functional(&self) -> Functional {
        Functional::dual_basis(3, 2, self.lambda.clone())
    }

    fn check_grid(&self, f: &StateVector) -> Result<()> {
        if f.grid != self.grid {
            return Err(Error::Grid("state lives on a different grid".into()));
        }
        Ok(())
    }

    fn spectrum(&self, f: &[Complex64]) -> Vec<Complex64> {
        let mut buf = f.to_vec();
        self.forward.process(&mut buf);
        buf
    }

    fn from_spectrum(&self, mut buf: Vec<Complex64>) -> Vec<Complex64> {
        self.inverse.process(&mut buf);
        let s = 1.0 / self.grid.samples as f64;
        buf.iter_mut().for_each(|z| *z *= s);
        buf
    }

    /// `f(x + p)` by Fourier shift.
    fn translate(&self, f: &[Complex64], p: f64) -> Vec<Complex64> {
        if p == 0.0 {
            return f.to_vec();
        }
        let mut spec = self.spectrum(f);
        for (k, z) in spec.iter_mut().enumerate() {
            *z *= Complex64::from_polar(1.0, 2.0 * PI * self.grid.frequency(k) * p);
        }
        self.from_spectrum(spec)
    }

    /// Spectral derivative; the Nyquist bin is dropped.
    fn derivative(&self, f: &[Complex64]) -> Vec<Complex64> {
        let n = self.grid.samples;
        let mut spec = self.spectrum(f);
        for (k, z) in spec.iter_mut().enumerate() {
            if k == n / 2 {
                *z = Complex64::new(0.0, 0.0);
            } else {
                *z *= Complex64::new(0.0, 2.0 * PI * self.grid.frequency(k));
            }
        }
        self.from_spectrum(spec)
    }

    fn apply_raw(&self, g: &HeisenbergPoint, f: &[Complex64]) -> Vec<Complex64> {
        let shifted = self.translate(f, g.p);
        let lam = self.lambda_f;
        let central = 2.0 * PI * lam * (g.t + g.p * g.q);
        shifted
            .into_iter()
            .enumerate()
            .map(|(j, z)| z * Complex64::from_polar(1.0, central + 2.0 * PI * lam * g.q * self.grid.point(j)))
            .collect()
    }

    pub fn apply_pi(&self, g: &HeisenbergPoint, f: &StateVector) -> Result<StateVector> {
        self.check_grid(f)?;
        let limit = self.grid.safe_shift();
        if !(g.p.is_finite() && g.q.is_finite() && g.t.is_finite()) {
            return Err(Error::Input("group element has non-finite coordinates".into()));
        }
        if g.p.abs() > limit {
            return Err(Error::OutsideWindow { p: g.p, limit });
        }
        StateVector::new(self.grid, self.apply_raw(g, &f.samples))
    }

    /// True when spectral or boundary energy is not negligible.
    fn heavy_tails(&self, f: &[Complex64]) -> bool {
        let n = self.grid.samples;
        let total: f64 = f.iter().map(|z| z.norm_sqr()).sum();
        if total == 0.0 {
            return false;
        }
        let spec = self.spectrum(f);
        let spec_total: f64 = spec.iter().map(|z| z.norm_sqr()).sum();
        let high: f64 = spec
            .iter()
            .enumerate()
            .filter(|(k, _)| self.grid.frequency(*k).abs() > self.grid.nyquist() / 2.0)
            .map(|(_, z)| z.norm_sqr())
            .sum();
        let edge: f64 = (0..n)
            .filter(|&j| self.grid.point(j).abs() > 0.9 * self.grid.half_width)
            .map(|j| f[j].norm_sqr())
            .sum();
        high / spec_total > TAIL_TOLERANCE || edge / total > TAIL_TOLERANCE
    }

    pub fn moment_map(&self, eta: &StateVector) -> Result<MomentMap> {
        self.check_grid(eta)?;
        if eta.norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        let h = self.grid.step();
        let nn = eta.norm * eta.norm;
        let d = self.derivative(&eta.samples);
        let jx = (inner_raw(&d, &eta.samples, h) / Complex64::new(0.0, 2.0 * PI * nn)).re;
        let mean_x: f64 =
            (0..self.grid.samples).map(|j| self.grid.point(j) * eta.samples[j].norm_sqr()).sum::<f64>() * h / nn;
        let values = [jx, self.lambda_f * mean_x, self.lambda_f];
        Ok(MomentMap {
            values,
            raw: values.map(|v| 2.0 * PI * v),
            tail_warning: self.heavy_tails(&eta.samples),
        })
    }

    pub fn symplectic_orbit_test(&self, eta: &StateVector) -> Result<SymplecticReport> {
        let j = self.moment_map(eta)?;
        let center = self.algebra.center();
        let residual = coadjoint::affine_residual(&self.functional(), &center, &j.values);
        let membership_ok = residual <= 1e-6;
        // numeric stabilizer dimension of J̃ from the skew form
        let n = 3;
        let form = DMatrix::from_fn(n, n, |a, b| {
            let mut ea = [0.0; 3];
            let mut eb = [0.0; 3];
            ea[a] = 1.0;
            eb[b] = 1.0;
            let br = self.algebra.br_f64(&ea, &eb);
            (0..n).map(|k| j.values[k] * br[k]).sum::<f64>()
        });
        let sv = form.singular_values();
        let top = sv.max();
        let rank = sv.iter().filter(|&&s| s > 1e-8 * top.max(1.0)).count();
        let stabilizer_dim = n - rank;
        let pker_dim = center.dim();
        let stabilizer_ok = stabilizer_dim == pker_dim;
        Ok(SymplecticReport {
            moment: j.values,
            affine_residual: residual,
            membership_ok,
            stabilizer_dim,
            pker_dim,
            stabilizer_ok,
            pass: membership_ok && stabilizer_ok,
        })
    }

    pub fn complex_orbit_test(&self, eta: &StateVector) -> Result<ComplexOrbitReport> {
        self.check_grid(eta)?;
        if eta.norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        let n = self.grid.samples;
        let h = self.grid.step();
        let lam = self.lambda_f;
        let e = &eta.samples;
        let cols: [Vec<Complex64>; 3] = [
            self.derivative(e),
            (0..n).map(|j| e[j] * Complex64::new(0.0, 2.0 * PI * lam * self.grid.point(j))).collect(),
            e.iter().map(|z| z * Complex64::new(0.0, 2.0 * PI * lam)).collect(),
        ];
        let scale = cols.iter().map(|c| inner_raw(c, c, h).re.sqrt()).fold(0.0, f64::max);
        let nn = eta.norm * eta.norm;
        let sh = h.sqrt();
        let mut w = DMatrix::<Complex64>::zeros(n, 3);
        for (a, c) in cols.iter().enumerate() {
            let coef = inner_raw(c, e, h) / nn;
            for j in 0..n {
                w[(j, a)] = (c[j] - coef * e[j]) * sh;
            }
        }
        let svd = w.svd(false, true);
        let v_t = svd.v_t.as_ref().expect("requested V^H");
        let mut null: Vec<[Complex64; 3]> = Vec::new();
        for (i, &s) in svd.singular_values.iter().enumerate() {
            if s < COMPLEX_RESIDUAL * scale {
                null.push([v_t[(i, 0)].conj(), v_t[(i, 1)].conj(), v_t[(i, 2)].conj()]);
            }
        }
        let dim_s = null.len();
        let dim_s_plus_conj = if dim_s == 0 {
            0
        } else {
            let m = DMatrix::<Complex64>::from_fn(2 * dim_s, 3, |r, c| {
                if r < dim_s {
                    null[r][c]
                } else {
                    null[r - dim_s][c].conj()
                }
            });
            m.singular_values().iter().filter(|&&s| s > 1e-8).count()
        };
        let mut singular_values: Vec<f64> = svd.singular_values.iter().map(|s| s / scale).collect();
        singular_values.sort_by(|a, b| b.total_cmp(a));
        Ok(ComplexOrbitReport { dim_s, dim_s_plus_conj, singular_values, complex: dim_s_plus_conj == 3 })
    }

    /// Reciprocal of `∫∫ |⟨η, π(p, q, 0)η⟩|² dp dq` over `|p|, |q| <= R/2` for
    /// unit `η`. For each grid shift `p`, the `q`-integral is an FFT of
    /// `η(x) conj(η(x+p))` sampled at frequencies `λq`.
    pub fn admissibility_constant(&self, eta: &StateVector) -> Result<f64> {
        self.check_grid(eta)?;
        let eta = eta.normalized()?;
        let n = self.grid.samples;
        let h = self.grid.step();
        let lam = self.lambda_f.abs();
        let window = self.grid.safe_shift();
        let freq_limit = lam * window;
        if freq_limit >= self.grid.nyquist() {
            return Err(Error::Aliasing { freq: freq_limit, limit: self.grid.nyquist() });
        }
        let m_max = (window / h).floor() as i64;
        let dq = 1.0 / (2.0 * self.grid.half_width * lam);
        let band = 0.8 * window;
        let e = &eta.samples;
        let rows: Vec<(f64, f64)> = (-m_max..=m_max)
            .into_par_iter()
            .map(|m| {
                let g: Vec<Complex64> = (0..n)
                    .map(|j| {
                        let s = (j as i64 + m).rem_euclid(n as i64) as usize;
                        e[j] * e[s].conj()
                    })
                    .collect();
                let spec = self.spectrum(&g);
                let wp = if m.abs() == m_max { 0.5 } else { 1.0 };
                let p_out = (m as f64 * h).abs() > band;
                let mut total = 0.0;
                let mut outer = 0.0;
                for (k, z) in spec.iter().enumerate() {
                    let xi = self.grid.frequency(k);
                    if xi.abs() > freq_limit {
                        continue;
                    }
                    let v = (h * h) * z.norm_sqr() * wp * h * dq;
                    total += v;
                    if p_out || (xi / lam).abs() > band {
                        outer += v;
                    }
                }
                (total, outer)
            })
            .collect();
        let (total, outer) = rows.iter().fold((0.0, 0.0), |acc, r| (acc.0 + r.0, acc.1 + r.1));
        if !(total > 0.0) || outer / total > 1e-6 {
            return Err(Error::NotConverged { mass: if total > 0.0 { outer / total } else { 1.0 } });
        }
        Ok(1.0 / total)
    }

    pub fn subsystem_completeness(&self, alpha: f64, beta: f64, eta: &StateVector, probe_count: usize) -> Result<CompletenessReport> {
        self.subsystem_completeness_with(Section::TranslateFirst, alpha, beta, eta, probe_count)
    }

    /// Smallest singular value of the analysis map `f ↦ (⟨f, π(σ(γ))η⟩)_γ`
    /// restricted to the first `K` Hermite functions, for `K` growing to
    /// `probe_count`, over lattice points `(mα, nβ)` with `|mα|, |nβ| <= R/2`.
    pub fn subsystem_completeness_with(
        &self,
        section: Section,
        alpha: f64,
        beta: f64,
        eta: &StateVector,
        probe_count: usize,
    ) -> Result<CompletenessReport> {
        self.check_grid(eta)?;
        if !(alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
            return Err(Error::Input("alpha and beta must be positive".into()));
        }
        let eta = eta.normalized()?;
        let window = self.grid.safe_shift();
        let bandwidth = self.bandwidth(&eta.samples);
        let max_freq = self.lambda_f.abs() * window + bandwidth;
        if max_freq >= self.grid.nyquist() {
            return Err(Error::Aliasing { freq: max_freq, limit: self.grid.nyquist() });
        }
        if probe_count == 0 {
            return Ok(CompletenessReport {
                alpha,
                beta,
                lattice_points: 0,
                levels: Vec::new(),
                signal: CompletenessSignal::Empty,
            });
        }
        let mm = (window / alpha + 1e-9).floor() as i64;
        let nm = (window / beta + 1e-9).floor() as i64;
        let points: Vec<(f64, f64)> = (-mm..=mm)
            .flat_map(|m| (-nm..=nm).map(move |k| (m as f64 * alpha, k as f64 * beta)))
            .collect();
        let probes = hermite_functions(self.grid, probe_count);
        let h = self.grid.step();
        let rows: Vec<Vec<Complex64>> = points
            .par_iter()
            .map(|&(p, q)| {
                let v = self.apply_raw(&section.point(p, q), &eta.samples);
                probes.iter().map(|phi| inner_raw(&phi.samples, &v, h)).collect()
            })
            .collect();
        let mut ks: Vec<usize> = (1..=LEVELS).map(|j| (probe_count * j).div_ceil(LEVELS)).collect();
        ks.dedup();
        let levels = ks
            .into_iter()
            .map(|k| {
                let a = DMatrix::<Complex64>::from_fn(rows.len(), k, |r, c| rows[r][c]);
                let sigma_min = a.singular_values().iter().copied().fold(f64::INFINITY, f64::min);
                TruncationLevel { probes: k, radius: (k as f64 / PI).sqrt(), sigma_min }
            })
            .collect::<Vec<_>>();
        let signal = classify_levels(&levels);
        Ok(CompletenessReport { alpha, beta, lattice_points: points.len(), levels, signal })
    }

    /// Frequency beyond which the spectral energy of `f` is below the tail tolerance.
    fn bandwidth(&self, f: &[Complex64]) -> f64 {
        let spec = self.spectrum(f);
        let total: f64 = spec.iter().map(|z| z.norm_sqr()).sum();
        let mut bins: Vec<(f64, f64)> = spec.iter().enumerate().map(|(k, z)| (self.grid.frequency(k).abs(), z.norm_sqr())).collect();
        bins.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut tail = 0.0;
        for (xi, e) in bins {
            tail += e;
            if tail > TAIL_TOLERANCE * total {
                return xi;
            }
        }
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn small() -> GridSpec {
        GridSpec::new(8.0, 1024).unwrap()
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(3.0, 1024).is_err());
        assert!(GridSpec::new(8.0, 63).is_err());
        assert!(GridSpec::new(8.0, 65).is_err());
        let g = GridSpec::default();
        assert_eq!(g.samples, 4096);
        assert!((g.step() - 24.0 / 4096.0).abs() < 1e-15);
    }

    #[test]
    fn hermite_functions_are_orthonormal() {
        let hs = hermite_functions(small(), 12);
        for (i, a) in hs.iter().enumerate() {
            for (j, b) in hs.iter().enumerate() {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((a.inner(b).re - expected).abs() < 1e-10, "{i} {j}");
            }
        }
        assert!((gaussian(small()).distance(&hs[0])) < 1e-12);
    }

    #[test]
    fn identity_and_central_character() {
        let rep = SchrodingerRep::new(&int(1), small()).unwrap();
        let f = random_smooth(small(), 3);
        let same = rep.apply_pi(&HeisenbergPoint::identity(), &f).unwrap();
        assert!(same.distance(&f) < 1e-12);
        let z = rep.apply_pi(&HeisenbergPoint::new(0.0, 0.0, 0.5), &f).unwrap();
        assert!(z.distance(&f.scale(Complex64::new(-1.0, 0.0))) < 1e-12);
    }

    #[test]
    fn window_is_enforced() {
        let rep = SchrodingerRep::new(&int(1), small()).unwrap();
        let f = gaussian(small());
        assert!(matches!(rep.apply_pi(&HeisenbergPoint::new(4.5, 0.0, 0.0), &f), Err(Error::OutsideWindow { .. })));
    }

    #[test]
    fn commutator_acts_by_central_character() {
        let lam = rat(3, 2);
        let rep = SchrodingerRep::new(&lam, small()).unwrap();
        let f = random_smooth(small(), 11);
        let x = HeisenbergPoint::new(1.0, 0.0, 0.0);
        let y = HeisenbergPoint::new(0.0, 1.0, 0.0);
        let mut v = rep.apply_pi(&y.inverse(), &f).unwrap();
        v = rep.apply_pi(&x.inverse(), &v).unwrap();
        v = rep.apply_pi(&y, &v).unwrap();
        v = rep.apply_pi(&x, &v).unwrap();
        let expected = f.scale(Complex64::from_polar(1.0, 2.0 * PI * 1.5));
        assert!(v.distance(&expected) < 1e-8 * f.norm());
    }

    #[test]
    fn group_law_and_unitarity() {
        let rep = SchrodingerRep::new(&rat(-2, 3), small()).unwrap();
        let f = random_smooth(small(), 5);
        let g = HeisenbergPoint::new(0.7, -1.3, 0.25);
        let g2 = HeisenbergPoint::new(-1.1, 0.4, -0.6);
        let a = rep.apply_pi(&g, &rep.apply_pi(&g2, &f).unwrap()).unwrap();
        let b = rep.apply_pi(&g.mul(&g2), &f).unwrap();
        assert!(a.distance(&b) < 1e-8 * f.norm());
        assert!((a.norm() - f.norm()).abs() < 1e-10 * f.norm());
    }

    #[test]
    fn moment_map_examples() {
        let grid = GridSpec::default();
        let rep = SchrodingerRep::new(&int(1), grid).unwrap();
        let j = rep.moment_map(&gaussian(grid)).unwrap();
        for (a, b) in j.values.iter().zip([0.0, 0.0, 1.0]) {
            assert!((a - b).abs() < 1e-8);
        }
        assert!(!j.tail_warning);
        let shifted = rep.moment_map(&translated_gaussian(grid, 0.8)).unwrap();
        assert!((shifted.values[1] - 0.8).abs() < 1e-6);
        assert!(rep.moment_map(&random_rough(grid, 1)).unwrap().tail_warning);
    }

    #[test]
    fn coadjoint_numeric_matches_exact_action() {
        use crate::algebra::{AlgebraElement, GroupElement};
        let h = presets::heisenberg(1);
        let ell = Functional::new(vec![rat(1, 3), int(-2), rat(5, 2)]);
        let logc = vec![rat(1, 2), rat(-3, 4), int(2)];
        let exact = h.coadjoint_action(&GroupElement::exp(AlgebraElement::new(logc.clone())), &ell).unwrap();
        let g = HeisenbergPoint::from_log(&logc.iter().map(rational::to_f64).collect::<Vec<_>>());
        let ef: Vec<f64> = ell.to_f64();
        let num = coadjoint_numeric(&g, &[ef[0], ef[1], ef[2]]);
        for (a, b) in num.iter().zip(exact.to_f64()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn complex_orbit_dichotomy() {
        let grid = GridSpec::default();
        let rep = SchrodingerRep::new(&int(1), grid).unwrap();
        let g = rep.complex_orbit_test(&gaussian(grid)).unwrap();
        assert_eq!((g.dim_s, g.dim_s_plus_conj), (2, 3));
        assert!(g.complex);
        let h1 = rep.complex_orbit_test(&hermite(grid, 1)).unwrap();
        assert_eq!((h1.dim_s, h1.dim_s_plus_conj), (1, 1));
        let r = rep.complex_orbit_test(&random_rough(grid, 2)).unwrap();
        assert_eq!((r.dim_s, r.dim_s_plus_conj), (1, 1));
    }

    #[test]
    fn admissibility_gaussian() {
        let grid = GridSpec::default();
        for lam in [int(1), rat(3, 2)] {
            let rep = SchrodingerRep::new(&lam, grid).unwrap();
            let d = rep.admissibility_constant(&gaussian(grid)).unwrap();
            let exact = rational::to_f64(&lam);
            assert!((d - exact).abs() / exact < 1e-3, "{d}");
        }
    }

    #[test]
    fn probe_count_zero_is_empty() {
        let rep = SchrodingerRep::new(&int(1), small()).unwrap();
        let r = rep.subsystem_completeness(0.5, 1.0, &gaussian(small()), 0).unwrap();
        assert_eq!(r.signal, CompletenessSignal::Empty);
        assert!(r.levels.is_empty());
    }

    #[test]
    fn level_classification() {
        let lv = |s: &[f64]| -> Vec<TruncationLevel> {
            s.iter().map(|&sigma_min| TruncationLevel { probes: 1, radius: 0.0, sigma_min }).collect()
        };
        assert_eq!(classify_levels(&lv(&[0.9, 0.8, 0.8])), CompletenessSignal::Completeness);
        assert_eq!(classify_levels(&lv(&[0.9, 1e-3, 1e-9])), CompletenessSignal::Incompleteness);
        assert_eq!(classify_levels(&lv(&[0.9, 0.1, 0.01])), CompletenessSignal::Inconclusive);
        assert_eq!(classify_levels(&[]), CompletenessSignal::Empty);
    }
}
