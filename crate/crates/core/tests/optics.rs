mod common;

use std::f64::consts::FRAC_1_SQRT_2;

use common::{creation_operator_probabilities, naive_permanent, random_complex};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use qorc_core::optics::{fock_dimension, output_distribution, permanent, ComplexMatrix, FockBasis, FockState};
use qorc_core::stochastic::{haar_unitary, SeededRng};

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[test]
fn ryser_matches_permutation_sum() {
    let mut rng = SeededRng::new(7);
    for n in 1..=6 {
        for _ in 0..100 {
            let a = random_complex(n, &mut rng);
            let fast = permanent(&a).unwrap();
            let slow = naive_permanent(&a);
            let rel = (fast - slow).norm() / slow.norm().max(1e-300);
            assert!(rel <= 1e-12, "n={n} rel={rel}");
        }
    }
}

#[test]
fn hong_ou_mandel_dip() {
    let bs = ComplexMatrix::from_rows(&[
        vec![c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2)],
        vec![c(FRAC_1_SQRT_2), c(-FRAC_1_SQRT_2)],
    ])
    .unwrap();
    let basis = FockBasis::enumerate(2, 2).unwrap();
    let p = output_distribution(&bs, &FockState::new(vec![1, 1]), &basis).unwrap();
    let at = |occ: Vec<u32>| p[basis.index_of(&FockState::new(occ)).unwrap()];
    assert!(at(vec![1, 1]).abs() <= 1e-12);
    assert!((at(vec![2, 0]) - 0.5).abs() <= 1e-12);
    assert!((at(vec![0, 2]) - 0.5).abs() <= 1e-12);
}

#[test]
fn permuted_identity_moves_photons_deterministically() {
    // Mode i goes to mode perm[i].
    let perm = [2usize, 0, 3, 1];
    let u = DMatrix::from_fn(4, 4, |r, col| if r == perm[col] { c(1.0) } else { c(0.0) });
    let u = ComplexMatrix::new(u).unwrap();
    let input = FockState::new(vec![2, 1, 0, 0]);
    let basis = FockBasis::enumerate(4, 3).unwrap();
    let p = output_distribution(&u, &input, &basis).unwrap();
    let expected = basis.index_of(&FockState::new(vec![1, 0, 2, 0])).unwrap();
    for (i, v) in p.iter().enumerate() {
        let want = if i == expected { 1.0 } else { 0.0 };
        assert!((v - want).abs() <= 1e-12, "state {} p={v}", basis.states()[i]);
    }
}

#[test]
fn distribution_matches_creation_operator_expansion() {
    let mut rng = SeededRng::new(11);
    for (m, input) in [
        (3, vec![1, 1, 1]),
        (4, vec![2, 0, 1, 0]),
        (5, vec![1, 1, 0, 0, 0]),
        (3, vec![0, 3, 0]),
    ] {
        let u = haar_unitary(m, &mut rng).unwrap();
        let n: u32 = input.iter().sum();
        let basis = FockBasis::enumerate(m, n as usize).unwrap();
        let p = output_distribution(&u, &FockState::new(input.clone()), &basis).unwrap();
        let oracle = creation_operator_probabilities(&u, &input);
        for (state, prob) in basis.states().iter().zip(&p) {
            let want = oracle.get(state.occupations()).copied().unwrap_or(0.0);
            assert!((prob - want).abs() <= 1e-12, "{state}: {prob} vs {want}");
        }
    }
}

#[test]
fn reservoir_dimensions() {
    assert_eq!(fock_dimension(12, 3).unwrap(), 364);
    assert_eq!(fock_dimension(10, 4).unwrap(), 715);
    assert_eq!(fock_dimension(16, 2).unwrap(), 136);
}

fn brute_force_count(m: usize, n: u32) -> usize {
    // Occupation vectors of length m summing to n, counted by recursion.
    fn go(m: usize, n: u32) -> usize {
        if m == 1 {
            return 1;
        }
        (0..=n).map(|k| go(m - 1, n - k)).sum()
    }
    go(m, n)
}

proptest! {
    #[test]
    fn basis_is_complete_and_unique(m in 1usize..7, n in 0usize..6) {
        let basis = FockBasis::enumerate(m, n).unwrap();
        prop_assert_eq!(basis.len(), brute_force_count(m, n as u32));
        prop_assert_eq!(basis.len() as u64, fock_dimension(m, n).unwrap());
        let mut seen = std::collections::HashSet::new();
        for (i, s) in basis.states().iter().enumerate() {
            prop_assert_eq!(s.photons(), n);
            prop_assert!(seen.insert(s.occupations().to_vec()));
            prop_assert_eq!(basis.index_of(s), Some(i));
        }
    }

    #[test]
    fn haar_output_is_a_distribution(seed in any::<u64>(), m in 2usize..7, n in 1usize..4) {
        let u = haar_unitary(m, &mut SeededRng::new(seed)).unwrap();
        let basis = FockBasis::enumerate(m, n).unwrap();
        let input = FockState::first_modes(m, n.min(m)).unwrap();
        prop_assume!(input.photons() == n);
        let p = output_distribution(&u, &input, &basis).unwrap();
        prop_assert!(p.iter().all(|&v| v >= 0.0));
        prop_assert!((p.iter().sum::<f64>() - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn permanent_is_invariant_under_transpose(seed in any::<u64>(), n in 1usize..6) {
        let a = random_complex(n, &mut SeededRng::new(seed));
        let t = ComplexMatrix::new(a.as_matrix().transpose()).unwrap();
        let (x, y) = (permanent(&a).unwrap(), permanent(&t).unwrap());
        prop_assert!((x - y).norm() <= 1e-10 * x.norm().max(1.0));
    }
}

#[test]
fn non_unitary_is_rejected() {
    let a = ComplexMatrix::new(DMatrix::from_element(2, 2, c(1.0))).unwrap();
    let basis = FockBasis::enumerate(2, 1).unwrap();
    assert!(output_distribution(&a, &FockState::new(vec![1, 0]), &basis).is_err());
}
