use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nearly_toeplitz::experiment::random_bordered;
use nearly_toeplitz::jacobi::BorderedJacobi;
use nearly_toeplitz::laws::LawSpec;
use nearly_toeplitz::recover::{continued_fraction_g, find_atoms, recover_density};

fn random_laws(rng: &mut ChaCha8Rng) -> Vec<LawSpec> {
    vec![
        LawSpec::wigner(),
        LawSpec::marchenko_pastur(rng.gen_range(1.0..8.0)).unwrap(),
        LawSpec::kesten_mckay(rng.gen_range(2.0..8.0)).unwrap(),
        LawSpec::wachter(rng.gen_range(1.0..6.0), rng.gen_range(1.0..6.0)).unwrap(),
    ]
}

#[test]
fn exact_recovery_for_random_law_parameters() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        for law in random_laws(&mut rng) {
            let rec = recover_density(&law.jacobi_params(), 256).unwrap();
            assert!(rec.suspected_atoms.is_empty(), "{law:?}");
            assert!(rec.min_raw_value >= -1e-9, "{law:?}");
            for (&x, &d) in rec.grid.iter().zip(&rec.values) {
                assert!((d - law.density(x)).abs() <= 1e-10 * (1.0 + law.density(x)), "{law:?} at {x}");
            }
        }
    }
}

#[test]
fn random_bordered_mass_is_conserved() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..30 {
        let j = random_bordered(&mut rng, 3);
        let rec = recover_density(&j, 20_000).unwrap();
        let total = rec.continuous_mass() + rec.atom_mass();
        assert!((total - 1.0).abs() <= 1e-3, "total {total} for {j:?}");
    }
}

#[test]
fn cauchy_decays_like_one_over_x() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for k in [0, 1, 3, 5] {
        let j = random_bordered(&mut rng, k);
        let scale = 1e3 * (1.0 + j.tail_alpha().abs() + j.tail_beta());
        for x in [-scale, scale] {
            let g = continued_fraction_g(&j, x).unwrap();
            assert!((g.re * x - 1.0).abs() < 1e-2, "k={k} x={x}");
        }
    }
}

#[test]
fn marchenko_pastur_interior_matches_closed_form() {
    let law = LawSpec::marchenko_pastur(2.0).unwrap();
    let j = law.jacobi_params();
    for i in 1..50 {
        let x = law.support().lo + law.support().width() * i as f64 / 50.0;
        let d = -continued_fraction_g(&j, x).unwrap().im / std::f64::consts::PI;
        assert!((d - law.density(x)).abs() <= 1e-10);
    }
}

#[test]
fn pure_toeplitz_has_no_atoms() {
    let j = BorderedJacobi::toeplitz(0.7, 1.3).unwrap();
    assert!(find_atoms(&j).is_empty());
    let rec = recover_density(&j, 1000).unwrap();
    assert!((rec.continuous_mass() - 1.0).abs() < 1e-3);
}
