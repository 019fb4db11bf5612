mod common;

use kinexp::diagnostics::*;
use kinexp::integrator::OdeSystem;
use kinexp::kinetics::IsobaricReactor;
use nalgebra::{Complex, DMatrix};
use proptest::prelude::*;

use common::*;

/// Max distance from each computed eigenvalue to the nearest unused expected one.
fn spectrum_distance(found: &[Complex<f64>], expected: &[Complex<f64>]) -> f64 {
    assert_eq!(found.len(), expected.len());
    let mut used = vec![false; expected.len()];
    let mut worst = 0.0f64;
    for z in found {
        let (j, d) = expected
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, e)| (j, (z - e).norm()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        used[j] = true;
        worst = worst.max(d);
    }
    worst
}

fn as_complex(eigs: &[(f64, f64)]) -> Vec<Complex<f64>> {
    eigs.iter().map(|&(re, im)| Complex::new(re, im)).collect()
}

#[test]
fn known_spectrum_recovered() {
    let mut r = rng(11);
    for n in [1, 2, 5, 30, 80] {
        let eigs = random_spectrum(&mut r, n, -1e3, 10.0, 200.0);
        let a = matrix_with_spectrum(&mut r, &eigs);
        let found = eigenvalues_dense(&a).unwrap();
        assert!(spectrum_distance(&found, &as_complex(&eigs)) <= 1e-9 * a.norm(), "n = {n}");
    }
}

#[test]
fn conjugate_pairs_are_exact() {
    let mut r = rng(12);
    let eigs = random_spectrum(&mut r, 40, -10.0, 10.0, 10.0);
    let found = eigenvalues_dense(&matrix_with_spectrum(&mut r, &eigs)).unwrap();
    for z in found.iter().filter(|z| z.im != 0.0) {
        assert!(found.contains(&z.conj()));
    }
}

#[test]
fn shape_and_finiteness_errors() {
    assert!(matches!(eigenvalues_dense(&DMatrix::zeros(2, 3)), Err(EigenError::BadShape { .. })));
    let n = EIGEN_MAX_DIM + 1;
    assert!(matches!(eigenvalues_dense(&DMatrix::zeros(n, n)), Err(EigenError::BadShape { .. })));
    let mut a = DMatrix::identity(3, 3);
    a[(1, 2)] = f64::NAN;
    assert_eq!(eigenvalues_dense(&a), Err(EigenError::NonFinite));
    assert!(eigenvalues_dense(&DMatrix::zeros(0, 0)).unwrap().is_empty());
}

#[test]
fn defective_and_zero_matrices() {
    let jordan = DMatrix::from_row_slice(3, 3, &[2.0, 1.0, 0.0, 0.0, 2.0, 1.0, 0.0, 0.0, 2.0]);
    for z in eigenvalues_dense(&jordan).unwrap() {
        // A 3x3 Jordan block perturbs eigenvalues by about eps^(1/3).
        assert!((z - Complex::new(2.0, 0.0)).norm() < 1e-4);
    }
    assert!(eigenvalues_dense(&DMatrix::zeros(4, 4)).unwrap().iter().all(|z| z.norm() == 0.0));
}

#[test]
fn toy_jacobian_matches_schur() {
    let (mech, cfg, y0) = toy();
    let reactor = IsobaricReactor::new(&mech, cfg.pressure, cfg.reverse_rate);
    let jac = reactor.jacobian(&y0).unwrap();
    let ours = eigenvalues_dense(&jac).unwrap();
    let schur: Vec<Complex<f64>> = jac.clone().complex_eigenvalues().iter().copied().collect();
    assert!(spectrum_distance(&ours, &schur) <= 1e-10 * jac.norm());
    let a = spectrum_bounds(0.0, &ours);
    let b = spectrum_bounds(0.0, &schur);
    assert!((a.alpha - b.alpha).abs() <= 1e-10 * jac.norm());
    assert!((a.omega - b.omega).abs() <= 1e-10 * jac.norm() * jac.norm());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn permutation_invariant(seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut r = rng(seed);
        let n = 12;
        let a = DMatrix::from_fn(n, n, |_, _| rand::Rng::gen_range(&mut r, -5.0..5.0));
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut r);
        let p = DMatrix::from_fn(n, n, |i, j| if perm[i] == j { 1.0 } else { 0.0 });
        let pa = &p * &a * p.transpose();
        let d = spectrum_distance(&eigenvalues_dense(&pa).unwrap(), &eigenvalues_dense(&a).unwrap());
        prop_assert!(d <= 1e-9 * a.norm(), "{d:e}");
    }

    #[test]
    fn shift_moves_spectrum(seed in any::<u64>(), s in -100.0..100.0f64) {
        let mut r = rng(seed);
        let n = 10;
        let a = DMatrix::from_fn(n, n, |_, _| rand::Rng::gen_range(&mut r, -5.0..5.0));
        let shifted = &a + DMatrix::identity(n, n) * s;
        let base: Vec<Complex<f64>> = eigenvalues_dense(&a).unwrap().iter().map(|z| z + s).collect();
        let d = spectrum_distance(&eigenvalues_dense(&shifted).unwrap(), &base);
        prop_assert!(d <= 1e-9 * shifted.norm(), "{d:e}");
        let (x, y) = (spectrum_bounds(0.0, &base), spectrum_bounds(0.0, &eigenvalues_dense(&shifted).unwrap()));
        prop_assert!((x.alpha - y.alpha).abs() <= 1e-9 * shifted.norm());
    }

    #[test]
    fn symmetric_spectrum_is_real(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = 15;
        let g = DMatrix::from_fn(n, n, |_, _| rand::Rng::gen_range(&mut r, -1.0..1.0));
        let a = &g + g.transpose();
        let found = eigenvalues_dense(&a).unwrap();
        let exact = a.clone().symmetric_eigenvalues();
        prop_assert!(found.iter().all(|z| z.im.abs() <= 1e-9 * a.norm()));
        let exact: Vec<Complex<f64>> = exact.iter().map(|&v| Complex::new(v, 0.0)).collect();
        prop_assert!(spectrum_distance(&found, &exact) <= 1e-9 * a.norm());
        prop_assert!(spectrum_bounds(0.0, &found).beta <= 2e-9 * a.norm());
    }
}
