mod common;

use common::{ridge_conjugate_gradient, ridge_objective};
use nalgebra::DMatrix;
use proptest::prelude::*;
use qorc_core::readout::{evaluate, RidgeModel};
use qorc_core::stochastic::SeededRng;

fn gaussian(rows: usize, cols: usize, rng: &mut SeededRng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.normal())
}

#[test]
fn closed_form_matches_iterative_minimiser() {
    let mut rng = SeededRng::new(21);
    for (n, p, alpha) in [(50, 10, 0.5), (200, 300, 1.0), (200, 300, 100.0)] {
        let f = gaussian(n, p, &mut rng);
        let z = gaussian(n, 20, &mut rng).add_scalar(3.0);
        let model = RidgeModel::fit(&f, &z, alpha).unwrap();
        let (w, b) = ridge_conjugate_gradient(&f, &z, alpha, 1e-13);
        let rel_w = (&model.weights - &w).norm() / w.norm();
        let rel_b = (&model.intercept - &b).norm() / b.norm();
        assert!(rel_w <= 1e-6 && rel_b <= 1e-6, "{n}x{p}: {rel_w} {rel_b}");
        let ours = model.objective(&f, &z).unwrap();
        let oracle = ridge_objective(&f, &z, &w, &b, alpha);
        assert!(ours <= oracle * (1.0 + 1e-10), "{ours} vs {oracle}");
        assert!(model.normal_equation_residual(&f, &z) <= 1e-8);
    }
}

#[test]
fn metrics_against_hand_values() {
    let z_true = DMatrix::from_row_slice(2, 2, &[0.0, 0.0, 1.0, 1.0]);
    let z_pred = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 1.0, 3.0]);
    let s_true = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 3.0, 2.0, 1.0]);
    let s_pred = DMatrix::from_row_slice(2, 3, &[1.0, 2.0, 5.0, 3.0, 2.0, 1.0]);
    let r = evaluate(&z_pred, &z_true, &s_pred, &s_true).unwrap();
    // Squared norms 1 and 4.
    assert_eq!(r.latent_mse, 2.5);
    assert!((r.surface_rmse - (4.0f64 / 6.0).sqrt()).abs() < 1e-15);
    // SSE 5, SST around the grand mean 0.5 is 1.
    assert!((r.r2 - (1.0 - 5.0)).abs() < 1e-15);
    assert_eq!(r.per_day_surface_rmse.len(), 2);
    assert!((r.per_day_surface_rmse[0] - (4.0f64 / 3.0).sqrt()).abs() < 1e-15);
    assert_eq!(r.per_day_surface_rmse[1], 0.0);
}

proptest! {
    #[test]
    fn ridge_objective_is_minimal(seed in any::<u64>(), alpha in 0.01f64..50.0) {
        let mut rng = SeededRng::new(seed);
        let f = gaussian(30, 6, &mut rng);
        let z = gaussian(30, 3, &mut rng);
        let model = RidgeModel::fit(&f, &z, alpha).unwrap();
        let best = model.objective(&f, &z).unwrap();
        let mut nudged = model.clone();
        nudged.weights[(rng.below(3), rng.below(6))] += 1e-3;
        prop_assert!(nudged.objective(&f, &z).unwrap() > best);
        let mut shifted = model.clone();
        shifted.intercept[rng.below(3)] -= 1e-3;
        prop_assert!(shifted.objective(&f, &z).unwrap() > best);
    }

    #[test]
    fn predictions_are_row_independent(seed in any::<u64>()) {
        let mut rng = SeededRng::new(seed);
        let f = gaussian(20, 4, &mut rng);
        let z = gaussian(20, 2, &mut rng);
        let model = RidgeModel::fit(&f, &z, 1.0).unwrap();
        let all = model.predict(&f).unwrap();
        for i in 0..20 {
            let one = model.predict_one(f.row(i).iter().copied().collect::<Vec<_>>().as_slice()).unwrap();
            for (a, b) in one.iter().zip(all.row(i).iter()) {
                prop_assert!((a - b).abs() <= 1e-12);
            }
        }
    }
}
