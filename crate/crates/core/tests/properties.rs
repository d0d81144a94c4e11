//! Randomized invariants of the numerical kernels and the file formats.

use chain_entanglement::concurrence::pair_concurrence;
use chain_entanglement::correlators::pair_correlators;
use chain_entanglement::free_fermion::{solve_chain, ChainSpec};
use chain_entanglement::numerics::{determinant, symm_eigen, Matrix, SymMatrix};
use chain_entanglement::output::{parse_csv, parse_json, to_csv, to_json};
use chain_entanglement::scan::{linspace, run_scan, KappaRule, Observable, ScanSpec};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::path::Path;

fn random_symmetric(dim: usize, seed: u64) -> SymMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lower = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in 0..=i {
            lower[i * dim + j] = rng.gen_range(-1.0..1.0);
        }
    }
    SymMatrix::from_lower_fn(dim, |i, j| lower[i * dim + j])
}

fn reconstruction_error(m: &SymMatrix) -> (f64, f64) {
    let e = symm_eigen(m).unwrap();
    let n = m.dim();
    let mut recon: f64 = 0.0;
    let mut ortho: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let r: f64 = (0..n)
                .map(|k| e.component(i, k) * e.eigenvalues[k] * e.component(j, k))
                .sum();
            recon = recon.max((r - m.get(i, j)).abs());
            let o: f64 = (0..n).map(|k| e.component(k, i) * e.component(k, j)).sum();
            ortho = ortho.max((o - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    (recon, ortho)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn eigen_reconstruction(dim in 1usize..40, seed in any::<u64>()) {
        let m = random_symmetric(dim, seed);
        let (recon, ortho) = reconstruction_error(&m);
        prop_assert!(recon < 1e-11 * dim as f64, "reconstruction {}", recon);
        prop_assert!(ortho < 1e-11 * dim as f64, "orthogonality {}", ortho);
        let e = symm_eigen(&m).unwrap();
        prop_assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn determinant_is_multiplicative(dim in 1usize..9, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut gen = || Matrix::from_fn(dim, dim, |_, _| rng.gen_range(-2.0..2.0));
        let (a, b) = (gen(), gen());
        let ab = Matrix::from_fn(dim, dim, |i, j| (0..dim).map(|k| a.get(i, k) * b.get(k, j)).sum());
        let (da, db, dab) = (determinant(&a).unwrap(), determinant(&b).unwrap(), determinant(&ab).unwrap());
        prop_assert!((dab - da * db).abs() <= 1e-10 * (1.0 + (da * db).abs()));
    }

    #[test]
    fn concurrence_bounds(n in 3usize..30, lambda in 0.0f64..3.0, kappa in 0.0f64..3.0, d in 1usize..3) {
        let sol = solve_chain(&ChainSpec::new(n, lambda, kappa).unwrap()).unwrap();
        let pc = pair_correlators(&sol.contractions, 1, 1 + d).unwrap();
        let (rdm, c) = pair_concurrence(&pc).unwrap();
        prop_assert!((rdm.trace() - 1.0).abs() < 1e-12);
        prop_assert!((0.0..=1.0).contains(&c.c));
        prop_assert_eq!(c.c, c.c_star.max(0.0));
        prop_assert!(c.lambdas.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn scan_formats_round_trip(n in 4usize..12, kappa in 0.0f64..2.0, points in 3usize..8) {
        let spec = ScanSpec::chain(n, KappaRule::TimesLambda(kappa), linspace(0.1, 2.0, points), vec![(1, 2), (2, n)])
            .with_outputs(&Observable::CHAIN)
            .with_derivative(true);
        let s = run_scan(&spec, 1).unwrap();
        prop_assert_eq!(&parse_json(&to_json(&s).unwrap(), Path::new("mem")).unwrap(), &s);
        let t = parse_csv(&to_csv(&s).unwrap(), Path::new("mem")).unwrap();
        prop_assert_eq!(&t.params, &s.params);
        prop_assert_eq!(&t.columns, &s.columns);
    }
}

#[test]
fn eigen_reconstruction_large() {
    for (dim, seed) in [(120, 1), (300, 2)] {
        let (recon, ortho) = reconstruction_error(&random_symmetric(dim, seed));
        assert!(
            recon < 1e-10 && ortho < 1e-10,
            "dim {dim}: {recon:e} {ortho:e}"
        );
    }
}

#[test]
fn degenerate_spectrum() {
    // Path graph on a cycle has doubly degenerate eigenvalues 2cos(2πk/n).
    let n = 12;
    let m = SymMatrix::from_lower_fn(n, |i, j| {
        if i - j == 1 || (i == n - 1 && j == 0) {
            1.0
        } else {
            0.0
        }
    });
    let (recon, ortho) = reconstruction_error(&m);
    assert!(recon < 1e-12 && ortho < 1e-12);
    let e = symm_eigen(&m).unwrap();
    assert!((e.eigenvalues[0] + 2.0).abs() < 1e-12);
    assert!((e.eigenvalues[n - 1] - 2.0).abs() < 1e-12);
}
