//! Projective kernel `pker(π) = ⋂_{l' ∈ O} G(l')` at the Lie-algebra level,
//! and the coherent-state classification built on it.
//!
//! Only connected (Lie-algebra) data is computed; disconnected stabilizers
//! are not detected.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{AlgebraElement, GroupElement, LieAlgebra};
use crate::coadjoint::{self, Functional};
use crate::error::{Error, Result};
use crate::linalg::Subspace;
use crate::rational::{self, Rational};

pub const DEFAULT_SEED: u64 = 0x5eed_0b17;
/// Printed with every kernel report.
pub const SCOPE_NOTE: &str = "connected stabilizers only (Lie-algebra level); disconnected G_[eta] not detected";

const RANDOM_SAMPLES: usize = 40;
const VERIFY_SAMPLES: usize = 20;
const MAX_SWEEPS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KernelAnalysis {
    pub pker: Subspace,
    pub equals_stabilizer: bool,
    pub samples_used: usize,
    pub verified: bool,
}

impl KernelAnalysis {
    pub fn basis(&self) -> Vec<AlgebraElement> {
        self.pker.basis().iter().cloned().map(AlgebraElement::new).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// Orbit is a point: `π` is a character.
    Character,
    /// Flat orbit: coherent-state representation based on the orbit, `H = pker(π)`.
    CoherentState { pker: Subspace, d_pi: Rational },
    /// Non-flat orbit: no coherent-state system based on a space homeomorphic to the orbit.
    NotCoherentState { pker: Subspace },
}

impl Verdict {
    pub fn summary(&self) -> &'static str {
        match self {
            Verdict::Character => "character (one-dimensional representation)",
            Verdict::CoherentState { .. } => "coherent-state representation based on O_pi; H = pker(pi)",
            Verdict::NotCoherentState { .. } => {
                "no pi-system of coherent states based on a G-space homeomorphic to O_pi"
            }
        }
    }
}

pub(crate) fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    let p: i64 = rng.random_range(-4..=4);
    let q: i64 = rng.random_range(1..=3);
    rational::rat(p, q)
}

pub(crate) fn random_element(rng: &mut ChaCha8Rng, n: usize) -> AlgebraElement {
    AlgebraElement::new((0..n).map(|_| random_rational(rng)).collect())
}

fn orbit_stabilizer(alg: &LieAlgebra, ell: &Functional, x: AlgebraElement) -> Result<(Functional, Subspace)> {
    let point = alg.coadjoint_action(&GroupElement::exp(x), ell)?;
    let stab = coadjoint::stabilizer(alg, &point)?.algebra;
    Ok((point, stab))
}

pub fn projective_kernel(alg: &LieAlgebra, ell: &Functional) -> Result<KernelAnalysis> {
    projective_kernel_seeded(alg, ell, DEFAULT_SEED)
}

pub fn projective_kernel_seeded(alg: &LieAlgebra, ell: &Functional, seed: u64) -> Result<KernelAnalysis> {
    let n = alg.dim();
    let base = coadjoint::stabilizer(alg, ell)?.algebra;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut k = base.clone();
    let mut samples = 0;

    let mut first_sweep: Vec<AlgebraElement> = Vec::new();
    for i in 0..n {
        for t in [rational::int(1), rational::rat(1, 2)] {
            first_sweep.push(AlgebraElement::basis(n, i).scale(&t));
        }
    }
    let mut sweep = first_sweep;
    for _ in 0..MAX_SWEEPS {
        sweep.extend((0..RANDOM_SAMPLES).map(|_| random_element(&mut rng, n)));
        let before = k.clone();
        for x in sweep.drain(..) {
            let (_, stab) = orbit_stabilizer(alg, ell, x)?;
            k = k.intersect(&stab);
            samples += 1;
        }
        if k == before {
            break;
        }
    }

    if !alg.is_ideal(&k) {
        return Err(Error::SamplingInsufficient { point: "intersection is not an ideal".into() });
    }
    for _ in 0..VERIFY_SAMPLES {
        let (point, stab) = orbit_stabilizer(alg, ell, random_element(&mut rng, n))?;
        samples += 1;
        if !stab.contains_subspace(&k) {
            let coords: Vec<String> = point.coords.iter().map(rational::format).collect();
            return Err(Error::SamplingInsufficient { point: format!("({})", coords.join(", ")) });
        }
    }
    Ok(KernelAnalysis { equals_stabilizer: k == base, pker: k, samples_used: samples, verified: true })
}

pub fn classify_representation(alg: &LieAlgebra, ell: &Functional) -> Result<Verdict> {
    classify_representation_seeded(alg, ell, DEFAULT_SEED)
}

pub fn classify_representation_seeded(alg: &LieAlgebra, ell: &Functional, seed: u64) -> Result<Verdict> {
    let stab = coadjoint::stabilizer(alg, ell)?;
    if stab.orbit_dim == 0 {
        return Ok(Verdict::Character);
    }
    let kernel = projective_kernel_seeded(alg, ell, seed)?;
    let flat = coadjoint::is_flat(alg, ell)?.flat;
    if flat {
        if !kernel.equals_stabilizer {
            return Err(Error::Inconsistent("flat orbit but pker differs from the stabilizer".into()));
        }
        let d_pi = coadjoint::formal_dimension(alg, ell)?.d_pi;
        Ok(Verdict::CoherentState { pker: kernel.pker, d_pi })
    } else {
        Ok(Verdict::NotCoherentState { pker: kernel.pker })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;
    use crate::presets;
    use crate::rational::int;

    fn span(n: usize, idx: &[usize]) -> Subspace {
        Subspace::span(n, &idx.iter().map(|&i| linalg::unit(n, i)).collect::<Vec<_>>())
    }

    #[test]
    fn heisenberg_pker_is_center() {
        let h = presets::heisenberg(1);
        let k = projective_kernel(&h, &Functional::from_ints(&[0, 0, 1])).unwrap();
        assert_eq!(k.pker, h.center());
        assert!(k.verified && k.equals_stabilizer);
    }

    #[test]
    fn free_two_step_pker_exceeds_center() {
        let f = presets::free_two_step(3);
        let k = projective_kernel(&f, &Functional::dual_basis(6, 3, int(1))).unwrap();
        assert_eq!(k.pker.dim(), 4);
        assert!(k.equals_stabilizer);
        assert_eq!(f.center().dim(), 3);
    }

    #[test]
    fn engel_pker() {
        let e = presets::engel();
        let k = projective_kernel(&e, &Functional::from_ints(&[0, 0, 0, 1])).unwrap();
        assert_eq!(k.pker, span(4, &[3]));
        assert!(!k.equals_stabilizer);
    }

    #[test]
    fn classification() {
        let h = presets::heisenberg(1);
        match classify_representation(&h, &Functional::from_ints(&[0, 0, 1])).unwrap() {
            Verdict::CoherentState { pker, d_pi } => {
                assert_eq!(pker, h.center());
                assert_eq!(d_pi, int(1));
            }
            v => panic!("unexpected {v:?}"),
        }
        let e = presets::engel();
        assert!(matches!(
            classify_representation(&e, &Functional::from_ints(&[0, 0, 0, 1])).unwrap(),
            Verdict::NotCoherentState { .. }
        ));
        for alg in [presets::heisenberg(1), presets::engel(), presets::free_two_step(3)] {
            let n = alg.dim();
            assert_eq!(classify_representation(&alg, &Functional::zero(n)).unwrap(), Verdict::Character);
        }
    }
}
