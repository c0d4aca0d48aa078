use orbitlab::algebra::{AlgebraElement, GroupElement, LieAlgebra};
use orbitlab::coadjoint::Functional;
use orbitlab::lattice::{self, DensityVerdict, LatticeSpec};
use orbitlab::presets;
use orbitlab::rational::{self, int, rat, Rational};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_positive(rng: &mut ChaCha8Rng) -> Rational {
    rat(rng.random_range(1..=9), rng.random_range(1..=7))
}

#[test]
fn heisenberg_density_product_is_alpha_beta_lambda() {
    let h = presets::heisenberg(1);
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    for _ in 0..50 {
        let (a, b) = (random_positive(&mut rng), random_positive(&mut rng));
        let mut lam = random_positive(&mut rng);
        if rng.random_bool(0.5) {
            lam = -lam;
        }
        let l = lattice::heisenberg_lattice(&h, &a, &b).unwrap();
        let r = lattice::density_report(&h, &Functional::dual_basis(3, 2, lam.clone()), &l).unwrap();
        let ab = &a * &b;
        assert_eq!(r.covol_g, &ab * &ab);
        assert_eq!(r.covol_quotient, ab);
        assert_eq!(r.d_pi, rational::abs(&lam));
        assert_eq!(r.product, &ab * rational::abs(&lam));
        let expected = if r.product > rational::one() {
            DensityVerdict::IncompleteByTheorem
        } else {
            DensityVerdict::NotExcluded
        };
        assert_eq!(r.verdict, expected);
    }
}

#[test]
fn product_is_measure_independent() {
    let h = presets::heisenberg(1);
    let ell = Functional::dual_basis(3, 2, rat(3, 2));
    let l = lattice::heisenberg_lattice(&h, &rat(2, 3), &int(2)).unwrap();
    let base = lattice::density_report(&h, &ell, &l).unwrap();
    for c in [rat(1, 7), int(1), int(13)] {
        let r = lattice::density_report_scaled(&h, &ell, &l, &c).unwrap();
        assert_eq!(r.covol_quotient, &base.covol_quotient * &c);
        assert_eq!(r.d_pi, &base.d_pi / &c);
        assert_eq!(r.product, base.product);
    }
}

/// Fraction of the points `γ_1^{a_1}...γ_n^{a_n}`, `0 <= a_i < box`, of a
/// lattice that lie in a sublattice, by exact Malcev decomposition.
fn membership_fraction(alg: &LieAlgebra, big: &LatticeSpec, sub: &LatticeSpec, side: i64) -> Rational {
    let n = alg.dim();
    let mut inside = 0i64;
    let mut total = 0i64;
    let mut idx = vec![0i64; n];
    loop {
        let mut g = GroupElement::identity(n);
        for (k, &e) in idx.iter().enumerate() {
            let step = GroupElement::exp(big.generators[k].log().scale(&int(e)));
            g = alg.group_mul(&g, &step).unwrap();
        }
        let t = lattice::malcev_exponents(alg, sub, &g).unwrap();
        if t.iter().all(|x| x.is_integer()) {
            inside += 1;
        }
        total += 1;
        let mut k = 0;
        loop {
            if k == n {
                return rat(inside, total);
            }
            idx[k] += 1;
            if idx[k] < side {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

#[test]
fn sublattice_covolume_scales_with_index() {
    let a = presets::abelian(2);
    let z2 = LatticeSpec::diagonal(&a, &[int(1), int(1)]).unwrap();
    let h = presets::heisenberg(1);
    let zh = lattice::heisenberg_lattice(&h, &int(1), &int(1)).unwrap();
    for k in 1..=5i64 {
        let skew = LatticeSpec::new(
            &a,
            vec![
                GroupElement::exp(AlgebraElement::from_ints(&[k, 0])),
                GroupElement::exp(AlgebraElement::from_ints(&[1, 1])),
            ],
            true,
        )
        .unwrap();
        skew.check_subgroup(&a).unwrap();
        let index = rational::one() / membership_fraction(&a, &z2, &skew, k);
        assert_eq!(lattice::covolume(&a, &skew).unwrap().determinant, index);
        assert_eq!(index, int(k));

        for sub in [
            LatticeSpec::diagonal(&h, &[int(k), int(1), int(k)]).unwrap(),
            LatticeSpec::diagonal(&h, &[int(1), int(k), int(k)]).unwrap(),
        ] {
            sub.check_subgroup(&h).unwrap();
            let index = rational::one() / membership_fraction(&h, &zh, &sub, k);
            assert_eq!(lattice::covolume(&h, &sub).unwrap().determinant, index, "k = {k}");
        }
    }
}

#[test]
fn monte_carlo_agrees_with_determinant() {
    let cases = [
        (presets::engel(), vec![int(1), int(1), rat(1, 2), rat(1, 6)]),
        (presets::strictly_upper(4), vec![int(1), int(2), int(1), int(1), rat(1, 2), int(1)]),
        (presets::heisenberg(1), vec![int(1), int(2), int(2)]),
    ];
    for (alg, scales) in cases {
        let l = LatticeSpec::diagonal(&alg, &scales).unwrap();
        let det = rational::to_f64(&lattice::covolume(&alg, &l).unwrap().determinant);
        let mc = lattice::monte_carlo_covolume(&alg, &l, 40_000, 17).unwrap();
        assert!(
            (mc.estimate - det).abs() < 4.0 * mc.std_error + 1e-12,
            "{:?}: {} vs {det} (se {})",
            alg.names(),
            mc.estimate,
            mc.std_error
        );
        assert!(mc.std_error < 0.05 * det);
    }
}

#[test]
fn class_three_covolume_reports_estimate() {
    let e = presets::engel();
    let l = LatticeSpec::diagonal(&e, &[int(1), int(1), int(1), int(1)]).unwrap();
    let c = lattice::covolume(&e, &l).unwrap();
    assert!(!c.exact);
    let mc = c.monte_carlo.expect("class 3 estimate");
    assert!((mc.estimate - 1.0).abs() < 4.0 * mc.std_error);
}

#[test]
fn engel_preset_lattice_is_a_subgroup() {
    let e = presets::engel();
    let l = LatticeSpec::diagonal(&e, &[int(1), int(1), rat(1, 2), rat(1, 6)]).unwrap();
    l.check_subgroup(&e).unwrap();
}
