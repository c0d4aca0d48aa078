use orbitlab::coadjoint::{self, Functional};
use orbitlab::lattice::{self, DensityVerdict};
use orbitlab::presets;
use orbitlab::rational::{self, int, rat};
use orbitlab::schrodinger::{self, CompletenessSignal, GridSpec, HeisenbergPoint, SchrodingerRep, Section};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn small() -> GridSpec {
    GridSpec::new(10.0, 2048).unwrap()
}

fn random_point(rng: &mut ChaCha8Rng, reach: f64) -> HeisenbergPoint {
    HeisenbergPoint::new(
        rng.random_range(-reach..reach),
        rng.random_range(-reach..reach),
        rng.random_range(-1.0..1.0),
    )
}

#[test]
fn unitarity_and_group_law() {
    let grid = small();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for lam in [int(1), rat(-3, 2), rat(1, 3)] {
        let rep = SchrodingerRep::new(&lam, grid).unwrap();
        for seed in 0..10 {
            let f = schrodinger::random_smooth(grid, seed);
            let g = random_point(&mut rng, 2.0);
            let h = random_point(&mut rng, 2.0);
            let gf = rep.apply_pi(&g, &f).unwrap();
            assert!((gf.norm() - f.norm()).abs() <= 1e-10 * f.norm());
            let composed = rep.apply_pi(&g, &rep.apply_pi(&h, &f).unwrap()).unwrap();
            let direct = rep.apply_pi(&g.mul(&h), &f).unwrap();
            assert!(composed.distance(&direct) < 1e-8 * f.norm());
        }
    }
}

#[test]
fn moment_map_is_equivariant() {
    let grid = small();
    let lam = rat(3, 2);
    let rep = SchrodingerRep::new(&lam, grid).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for seed in 0..50 {
        let eta = schrodinger::random_smooth(grid, 100 + seed);
        let g = random_point(&mut rng, 2.5);
        let moved = rep.moment_map(&rep.apply_pi(&g, &eta).unwrap()).unwrap().values;
        let j = rep.moment_map(&eta).unwrap().values;
        let expected = schrodinger::coadjoint_numeric(&g, &j);
        let err: f64 = moved.iter().zip(&expected).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        assert!(err < 1e-6, "seed {seed}: {err}");
    }
}

#[test]
fn moment_set_lies_in_flat_orbit() {
    let grid = small();
    let h = presets::heisenberg(1);
    for lam in [int(1), int(-2)] {
        let rep = SchrodingerRep::new(&lam, grid).unwrap();
        let ell0 = Functional::dual_basis(3, 2, lam.clone());
        for seed in 0..50 {
            let j = rep.moment_map(&schrodinger::random_smooth(grid, seed)).unwrap();
            assert!(!j.tail_warning);
            assert!(coadjoint::affine_membership_numeric(&ell0, &h.center(), &j.values, 1e-6));
        }
    }
}

#[test]
fn symplectic_test_passes_for_smooth_vectors() {
    let grid = GridSpec::default();
    let one = SchrodingerRep::new(&int(1), grid).unwrap();
    assert!(one.symplectic_orbit_test(&schrodinger::gaussian(grid)).unwrap().pass);
    assert!(one.symplectic_orbit_test(&schrodinger::hermite(grid, 3)).unwrap().pass);
    let two = SchrodingerRep::new(&int(2), grid).unwrap();
    let r = two.symplectic_orbit_test(&schrodinger::random_smooth(grid, 42)).unwrap();
    assert!(r.pass);
    assert!((r.moment[2] - 2.0).abs() < 1e-12);
}

#[test]
fn admissibility_is_covariant() {
    let grid = GridSpec::default();
    let rep = SchrodingerRep::new(&int(1), grid).unwrap();
    let eta = schrodinger::hermite(grid, 2);
    let base = rep.admissibility_constant(&eta).unwrap();
    assert!((base - 1.0).abs() < 1e-3);
    let moved = rep.apply_pi(&HeisenbergPoint::new(0.7, -0.4, 0.3), &eta).unwrap();
    let d = rep.admissibility_constant(&moved).unwrap();
    assert!((d - base).abs() < 1e-4 * base, "{d} vs {base}");
}

#[test]
fn admissibility_rejects_unconverged_window() {
    let grid = GridSpec::new(4.0, 1024).unwrap();
    let rep = SchrodingerRep::new(&int(1), grid).unwrap();
    let wide = schrodinger::StateVector::from_fn(grid, |x| num_complex::Complex64::new((-0.3 * x * x).exp(), 0.0));
    assert!(matches!(rep.admissibility_constant(&wide), Err(orbitlab::Error::NotConverged { .. })));
}

#[test]
fn subsystem_never_contradicts_density_theorem() {
    let h = presets::heisenberg(1);
    let grid = GridSpec::default();
    for (a, b, lam) in [(rat(1, 1), rat(2, 1), int(1)), (rat(3, 2), rat(1, 1), int(1)), (rat(1, 2), rat(2, 1), int(2))] {
        let l = lattice::heisenberg_lattice(&h, &a, &b).unwrap();
        let report = lattice::density_report(&h, &Functional::dual_basis(3, 2, lam.clone()), &l).unwrap();
        let rep = SchrodingerRep::new(&lam, grid).unwrap();
        let s = rep
            .subsystem_completeness(rational::to_f64(&a), rational::to_f64(&b), &schrodinger::gaussian(grid), 48)
            .unwrap();
        assert_eq!(report.verdict, DensityVerdict::IncompleteByTheorem);
        assert_ne!(s.signal, CompletenessSignal::Completeness);
    }
}

#[test]
fn completeness_verdict_is_section_independent() {
    let grid = GridSpec::default();
    let rep = SchrodingerRep::new(&int(1), grid).unwrap();
    let eta = schrodinger::gaussian(grid);
    for (a, b) in [(0.5, 1.0), (1.0, 2.0)] {
        let s1 = rep.subsystem_completeness_with(Section::TranslateFirst, a, b, &eta, 32).unwrap();
        let s2 = rep.subsystem_completeness_with(Section::ModulateFirst, a, b, &eta, 32).unwrap();
        assert_eq!(s1.signal, s2.signal);
        for (x, y) in s1.levels.iter().zip(&s2.levels) {
            assert!((x.sigma_min - y.sigma_min).abs() <= 1e-9 * x.sigma_min.max(1e-6));
        }
    }
}

#[test]
fn csv_curve_has_one_row_per_level() {
    let grid = GridSpec::default();
    let rep = SchrodingerRep::new(&int(1), grid).unwrap();
    let r = rep.subsystem_completeness(0.5, 1.0, &schrodinger::gaussian(grid), 16).unwrap();
    let csv = r.to_csv();
    assert!(csv.starts_with("probes,radius,sigma_min\n"));
    assert_eq!(csv.lines().count(), 1 + r.levels.len());
}

#[test]
fn modulation_aliasing_is_detected() {
    let grid = GridSpec::new(12.0, 64).unwrap();
    let rep = SchrodingerRep::new(&int(3), grid).unwrap();
    let r = rep.subsystem_completeness(0.5, 1.0, &schrodinger::gaussian(grid), 8);
    assert!(matches!(r, Err(orbitlab::Error::Aliasing { .. })));
}
