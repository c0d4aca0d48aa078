//! Finite Weyl-Heisenberg model on `C^n`: translations `T`, modulations `M`
//! and subgroups `Λ ⊂ Z_n × Z_n`. Completeness of `{M^b T^a η : (a, b) ∈ Λ}`
//! forces `|Λ| >= n`, the finite form of `covol · d <= 1` with
//! `covol(Λ) = n² / |Λ|` and `d = 1/n` under counting measure.

use std::collections::HashSet;
use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_integer::Integer;
use rand::SeedableRng;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

pub const MAX_EXHAUSTIVE: usize = 12;
pub const MAX_DIM: usize = 64;
pub const RANK_THRESHOLD: f64 = 1e-9;
pub const RANDOM_PANEL: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FiniteWH {
    pub n: usize,
}

impl FiniteWH {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Input(format!("n = {n} must be at least 2")));
        }
        if n > MAX_DIM {
            return Err(Error::TooLarge { n, max: MAX_DIM });
        }
        Ok(Self { n })
    }

    /// `(T^a v)[k] = v[k - a]`.
    pub fn translate(&self, v: &[Complex64], a: usize) -> Vec<Complex64> {
        let n = self.n;
        (0..n).map(|k| v[(k + n - a % n) % n]).collect()
    }

    /// `(M^b v)[k] = e^{2πibk/n} v[k]`.
    pub fn modulate(&self, v: &[Complex64], b: usize) -> Vec<Complex64> {
        let n = self.n;
        (0..n)
            .map(|k| v[k] * Complex64::from_polar(1.0, 2.0 * PI * ((b * k) % n) as f64 / n as f64))
            .collect()
    }

    /// `M^b T^a η`.
    pub fn element(&self, a: usize, b: usize, eta: &[Complex64]) -> Vec<Complex64> {
        self.modulate(&self.translate(eta, a), b)
    }

    /// `Σ_{(a,b) ∈ Z_n²} |⟨f, M^b T^a η⟩|²`, which equals `n ‖f‖² ‖η‖²`.
    pub fn orthogonality_sum(&self, f: &[Complex64], eta: &[Complex64]) -> f64 {
        let mut total = 0.0;
        for a in 0..self.n {
            for b in 0..self.n {
                let v = self.element(a, b, eta);
                total += inner(f, &v).norm_sqr();
            }
        }
        total
    }
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).fold(Complex64::new(0.0, 0.0), |acc, (x, y)| acc + x * y.conj())
}

fn norm_sqr(a: &[Complex64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubgroupSpec {
    pub n: usize,
    pub generators: Vec<(usize, usize)>,
    /// Sorted lexicographically.
    pub elements: Vec<(usize, usize)>,
    pub order: usize,
}

impl SubgroupSpec {
    /// Subgroup generated by `gens`, reduced mod `n`.
    pub fn generated(n: usize, gens: &[(usize, usize)]) -> Self {
        let gens: Vec<(usize, usize)> = gens.iter().map(|&(a, b)| (a % n, b % n)).collect();
        let mut seen = vec![false; n * n];
        let mut elements = vec![(0, 0)];
        seen[0] = true;
        let mut i = 0;
        while i < elements.len() {
            let (a, b) = elements[i];
            for &(ga, gb) in &gens {
                let next = ((a + ga) % n, (b + gb) % n);
                let idx = next.0 * n + next.1;
                if !seen[idx] {
                    seen[idx] = true;
                    elements.push(next);
                }
            }
            i += 1;
        }
        elements.sort_unstable();
        Self { n, order: elements.len(), generators: gens, elements }
    }

    pub fn is_closed(&self) -> bool {
        let set: HashSet<_> = self.elements.iter().copied().collect();
        set.contains(&(0, 0))
            && self
                .elements
                .iter()
                .all(|&(a, b)| self.elements.iter().all(|&(c, d)| set.contains(&((a + c) % self.n, (b + d) % self.n))))
    }

    /// `covol(Λ) · d` with counting measure scaled by `c`: `(c n² / |Λ|) · 1/(c n)`.
    pub fn density_product(&self, c: &Rational) -> Rational {
        let n = self.n as i64;
        let covol = c * rational::rat(n * n, self.order as i64);
        let d = rational::one() / (c * rational::int(n));
        covol * d
    }

    fn key(&self) -> Vec<u64> {
        let mut bits = vec![0u64; (self.n * self.n).div_ceil(64)];
        for &(a, b) in &self.elements {
            let i = a * self.n + b;
            bits[i / 64] |= 1 << (i % 64);
        }
        bits
    }
}

/// Every subgroup of `Z_n × Z_n`, sorted by order then elements. Each is
/// generated by at most two elements, so all pairs are closed and deduplicated.
pub fn enumerate_subgroups(n: usize) -> Result<Vec<SubgroupSpec>> {
    if n < 2 {
        return Err(Error::Input(format!("n = {n} must be at least 2")));
    }
    if n > MAX_EXHAUSTIVE {
        return Err(Error::TooLarge { n, max: MAX_EXHAUSTIVE });
    }
    let all: Vec<(usize, usize)> = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (i, &g) in all.iter().enumerate() {
        for &h in &all[i..] {
            let gens = if h == (0, 0) {
                vec![g]
            } else if g == (0, 0) {
                vec![h]
            } else {
                vec![g, h]
            };
            let s = SubgroupSpec::generated(n, &gens);
            if seen.insert(s.key()) {
                out.push(s);
            }
        }
    }
    out.sort_by(|a, b| (a.order, &a.elements).cmp(&(b.order, &b.elements)));
    Ok(out)
}

/// `Σ_{a | n} Σ_{b | n} gcd(a, b)`.
pub fn subgroup_count(n: usize) -> usize {
    let divs: Vec<usize> = (1..=n).filter(|d| n % d == 0).collect();
    divs.iter().map(|&a| divs.iter().map(|&b| a.gcd(&b)).sum::<usize>()).sum()
}

pub fn system_rank(wh: &FiniteWH, subgroup: &SubgroupSpec, eta: &[Complex64]) -> Result<usize> {
    if eta.len() != wh.n {
        return Err(Error::DimensionMismatch { expected: wh.n, got: eta.len() });
    }
    if subgroup.n != wh.n {
        return Err(Error::DimensionMismatch { expected: wh.n, got: subgroup.n });
    }
    if norm_sqr(eta) == 0.0 {
        return Err(Error::ZeroVector);
    }
    let cols: Vec<Vec<Complex64>> = subgroup.elements.iter().map(|&(a, b)| wh.element(a, b, eta)).collect();
    let m = DMatrix::<Complex64>::from_fn(wh.n, cols.len(), |r, c| cols[c][r]);
    let sv = m.singular_values();
    let top = sv.iter().copied().fold(0.0, f64::max);
    Ok(sv.iter().filter(|&&s| s > RANK_THRESHOLD * top).count())
}

pub fn gaussian_window(n: usize) -> Vec<Complex64> {
    let c = n as f64 / 2.0;
    (0..n).map(|k| Complex64::new((-PI * (k as f64 - c).powi(2) / n as f64).exp(), 0.0)).collect()
}

pub fn random_window(n: usize, rng: &mut ChaCha8Rng) -> Vec<Complex64> {
    (0..n).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect()
}

/// All-ones, each basis vector, the finite Gaussian, then 20 seeded complex
/// Gaussian vectors.
pub fn window_panel(n: usize, seed: u64) -> Vec<(String, Vec<Complex64>)> {
    let mut panel = vec![("ones".to_string(), vec![Complex64::new(1.0, 0.0); n])];
    for k in 0..n {
        let mut e = vec![Complex64::new(0.0, 0.0); n];
        e[k] = Complex64::new(1.0, 0.0);
        panel.push((format!("e{k}"), e));
    }
    panel.push(("gaussian".to_string(), gaussian_window(n)));
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64).wrapping_mul(0x9e37_79b9));
    for i in 0..RANDOM_PANEL {
        panel.push((format!("random{i}"), random_window(n, &mut rng)));
    }
    panel
}

/// Window by name: `ones`, `gaussian`, `e<k>`, or `random` (seeded).
pub fn named_window(n: usize, name: &str, seed: u64) -> Result<Vec<Complex64>> {
    match name {
        "ones" => Ok(vec![Complex64::new(1.0, 0.0); n]),
        "gaussian" => Ok(gaussian_window(n)),
        "random" => Ok(random_window(n, &mut ChaCha8Rng::seed_from_u64(seed))),
        _ => {
            let k: usize = name
                .strip_prefix('e')
                .and_then(|s| s.parse().ok())
                .filter(|&k| k < n)
                .ok_or_else(|| Error::Input(format!("unknown window '{name}'")))?;
            let mut e = vec![Complex64::new(0.0, 0.0); n];
            e[k] = Complex64::new(1.0, 0.0);
            Ok(e)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanEntry {
    pub n: usize,
    pub subgroup_index: usize,
    pub order: usize,
    pub generators: Vec<(usize, usize)>,
    pub density_product: String,
    pub complete_windows: usize,
    pub panel_size: usize,
}

impl ScanEntry {
    pub fn any_complete(&self) -> bool {
        self.complete_windows > 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub n_max: usize,
    pub seed: u64,
    pub entries: Vec<ScanEntry>,
    pub violations: usize,
    /// Subgroups with `|Λ| >= n` for which some panel window was complete.
    pub sufficiency_hits: usize,
    pub sufficiency_candidates: usize,
}

impl ScanReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,subgroup,order,density_product,complete_windows,panel_size\n");
        for e in &self.entries {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                e.n, e.subgroup_index, e.order, e.density_product, e.complete_windows, e.panel_size
            ));
        }
        s
    }
}

pub fn density_scan(n_max: usize, seed: u64) -> Result<ScanReport> {
    let mut entries = Vec::new();
    for n in 2..=n_max {
        let wh = FiniteWH::new(n)?;
        let subs = enumerate_subgroups(n)?;
        let panel = window_panel(n, seed);
        let cells: Vec<Result<ScanEntry>> = subs
            .par_iter()
            .enumerate()
            .map(|(idx, s)| {
                let mut complete = 0;
                for (name, eta) in &panel {
                    if system_rank(&wh, s, eta)? == n {
                        if s.order < n {
                            return Err(Error::NecessityViolated(format!(
                                "n = {n}, Λ = {:?} (order {}), window {name} = {eta:?} is complete",
                                s.generators, s.order
                            )));
                        }
                        complete += 1;
                    }
                }
                Ok(ScanEntry {
                    n,
                    subgroup_index: idx,
                    order: s.order,
                    generators: s.generators.clone(),
                    density_product: rational::format(&s.density_product(&rational::one())),
                    complete_windows: complete,
                    panel_size: panel.len(),
                })
            })
            .collect();
        for c in cells {
            entries.push(c?);
        }
    }
    let candidates: Vec<&ScanEntry> = entries.iter().filter(|e| e.order >= e.n).collect();
    Ok(ScanReport {
        n_max,
        seed,
        violations: 0,
        sufficiency_hits: candidates.iter().filter(|e| e.any_complete()).count(),
        sufficiency_candidates: candidates.len(),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn commutation_relation() {
        let wh = FiniteWH::new(5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v = random_window(5, &mut rng);
        let mt = wh.modulate(&wh.translate(&v, 1), 1);
        let tm = wh.translate(&wh.modulate(&v, 1), 1);
        let w = Complex64::from_polar(1.0, 2.0 * PI / 5.0);
        for (a, b) in mt.iter().zip(&tm) {
            assert!((a - w * b).norm() < 1e-12);
        }
        let back = wh.translate(&v, 5);
        assert_eq!(back, v);
    }

    #[test]
    fn orthogonality_relation() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in [2, 3, 6, 8] {
            let wh = FiniteWH::new(n).unwrap();
            let f = random_window(n, &mut rng);
            let eta = random_window(n, &mut rng);
            let expected = n as f64 * norm_sqr(&f) * norm_sqr(&eta);
            assert!((wh.orthogonality_sum(&f, &eta) - expected).abs() < 1e-10 * expected);
        }
    }

    #[test]
    fn subgroup_counts() {
        let two = enumerate_subgroups(2).unwrap();
        assert_eq!(two.iter().map(|s| s.order).collect::<Vec<_>>(), vec![1, 2, 2, 2, 4]);
        assert_eq!(enumerate_subgroups(3).unwrap().len(), 6);
        for n in 2..=12 {
            let subs = enumerate_subgroups(n).unwrap();
            assert_eq!(subs.len(), subgroup_count(n), "n = {n}");
            assert_eq!(subs[0].order, 1);
            assert_eq!(subs.last().unwrap().order, n * n);
            assert!(subs.iter().all(|s| s.is_closed() && (n * n) % s.order == 0));
        }
        assert!(matches!(enumerate_subgroups(13), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn rank_examples() {
        let wh = FiniteWH::new(4).unwrap();
        let ones = vec![Complex64::new(1.0, 0.0); 4];
        let translations = SubgroupSpec::generated(4, &[(1, 0)]);
        assert_eq!(translations.order, 4);
        assert_eq!(system_rank(&wh, &translations, &ones).unwrap(), 1);
        let e0 = named_window(4, "e0", 0).unwrap();
        assert_eq!(system_rank(&wh, &translations, &e0).unwrap(), 4);
        let full = SubgroupSpec::generated(4, &[(1, 0), (0, 1)]);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        assert_eq!(system_rank(&wh, &full, &random_window(4, &mut rng)).unwrap(), 4);
        for s in enumerate_subgroups(4).unwrap().iter().filter(|s| s.order == 2) {
            assert!(system_rank(&wh, s, &random_window(4, &mut rng)).unwrap() <= 2);
        }
        assert!(matches!(system_rank(&wh, &full, &[Complex64::new(0.0, 0.0); 4]), Err(Error::ZeroVector)));

        let wh6 = FiniteWH::new(6).unwrap();
        let diag = SubgroupSpec::generated(6, &[(1, 1)]);
        assert_eq!(diag.order, 6);
        assert_eq!(system_rank(&wh6, &diag, &random_window(6, &mut rng)).unwrap(), 6);
    }

    #[test]
    fn density_product_is_scale_free() {
        let s = SubgroupSpec::generated(6, &[(2, 0), (0, 3)]);
        for c in [rat(1, 7), int(1), int(13)] {
            assert_eq!(s.density_product(&c), rat(6, s.order as i64));
        }
    }

    #[test]
    fn small_scan_has_no_violations() {
        let r = density_scan(5, 1).unwrap();
        assert_eq!(r.violations, 0);
        assert_eq!(r.entries.len(), (2..=5).map(subgroup_count).sum::<usize>());
        assert!(r.sufficiency_hits > 0);
    }
}
