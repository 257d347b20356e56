use std::f64::consts::{FRAC_PI_2, TAU};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;
use qorc_core::optics::{output_distribution, ComplexMatrix};
use qorc_core::reservoir::{encode_phases, Ensemble, FeatureStandardizer, Reservoir, ReservoirSpec};
use qorc_core::stochastic::SeededRng;

fn context(rng: &mut SeededRng, scale: f64) -> Vec<f64> {
    (0..120).map(|_| scale * rng.normal()).collect()
}

#[test]
fn every_block_is_a_distribution() {
    let ensemble = Ensemble::sandwich(ReservoirSpec::default_ensemble(), 42, 120).unwrap();
    assert_eq!(ensemble.feature_len(), 1215);
    let mut offsets = ensemble.block_offsets();
    offsets.push(ensemble.feature_len());
    let mut rng = SeededRng::new(8);
    for _ in 0..100 {
        let f = ensemble.features(&context(&mut rng, 2.0)).unwrap();
        assert!(f.iter().all(|&v| (0.0..=1.0).contains(&v)));
        for w in offsets.windows(2) {
            let s: f64 = f[w[0]..w[1]].iter().sum();
            assert!((s - 1.0).abs() <= 1e-10);
        }
    }
}

#[test]
fn circuit_is_the_prescribed_product() {
    let r = Reservoir::sandwich(ReservoirSpec::new("R9", 6, 2), 3, 120).unwrap();
    let x = context(&mut SeededRng::new(1), 1.0);
    let phases: Vec<f64> = (0..6)
        .map(|i| {
            let s = r.projection().row(i).dot(&DVector::from_column_slice(&x).transpose());
            TAU / (1.0 + (-s).exp())
        })
        .collect();
    let d = DMatrix::from_fn(6, 6, |i, j| {
        if i == j {
            Complex64::from_polar(1.0, phases[i])
        } else {
            Complex64::default()
        }
    });
    let expected = r.second_unitary().unwrap().as_matrix() * d * r.first_unitary().as_matrix();
    let got = r.circuit(&x).unwrap();
    assert!((got.as_matrix() - &expected).camax() <= 1e-13);
    let probs = r.features(&x).unwrap();
    let oracle = output_distribution(&ComplexMatrix::new(expected).unwrap(), r.input_state(), r.basis()).unwrap();
    for (a, b) in probs.iter().zip(&oracle) {
        assert!((a - b).abs() <= 1e-13);
    }
}

#[test]
fn features_ignore_the_projection_null_space() {
    let r = Reservoir::sandwich(ReservoirSpec::new("R1", 12, 3), 42, 120).unwrap();
    let w = r.projection();
    let mut rng = SeededRng::new(4);
    for _ in 0..10 {
        let x = DVector::from_vec(context(&mut rng, 1.0));
        let v = DVector::from_vec(context(&mut rng, 3.0));
        // Remove the row-space component; rows of W are orthonormal.
        let null = &v - w.transpose() * (w * &v);
        let y = &x + null;
        let a = r.features(x.as_slice()).unwrap();
        let b = r.features(y.as_slice()).unwrap();
        let diff = a.iter().zip(&b).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        assert!(diff <= 1e-12, "{diff}");
    }
}

#[test]
fn single_layout_differs_from_sandwich_and_ignores_context() {
    let spec = ReservoirSpec::single_ablation();
    let sandwich = Reservoir::sandwich(spec.clone(), 42, 120).unwrap();
    let single = Reservoir::single(spec, 42, 120).unwrap();
    assert_eq!(single.first_unitary(), sandwich.first_unitary());
    assert_eq!(single.feature_len(), 364);
    let mut rng = SeededRng::new(6);
    let x = context(&mut rng, 1.0);
    let y = context(&mut rng, 1.0);
    let a = single.features(&x).unwrap();
    assert_ne!(a, sandwich.features(&x).unwrap());
    // Phases on singly occupied input modes are global per photon, so the
    // output distribution equals that of U1 alone.
    let bare = output_distribution(single.first_unitary(), single.input_state(), single.basis()).unwrap();
    let b = single.features(&y).unwrap();
    for ((p, q), r) in a.iter().zip(&b).zip(&bare) {
        assert!((p - r).abs() <= 1e-12 && (q - r).abs() <= 1e-12);
    }
}

#[test]
fn standardizer_treats_rounding_noise_as_constant() {
    let q = DMatrix::from_fn(10, 2, |i, j| if j == 0 { 0.25 + i as f64 * 1e-18 } else { i as f64 });
    let s = FeatureStandardizer::fit(&q).unwrap();
    assert_eq!(s.constant, vec![true, false]);
    let t = s.apply(&q).unwrap();
    assert!(t.column(0).amax() <= 1e-15);
    assert!(t.column(1).mean().abs() <= 1e-12);
    let var = t.column(1).iter().map(|v| v * v).sum::<f64>() / 10.0;
    assert!((var - 1.0).abs() <= 1e-12);
}

proptest! {
    #[test]
    fn phases_are_lipschitz(seed in any::<u64>()) {
        let r = Reservoir::sandwich(ReservoirSpec::new("R2", 10, 4), 42, 120).unwrap();
        let mut rng = SeededRng::new(seed);
        let x = context(&mut rng, 2.0);
        let dx = context(&mut rng, 1e-3);
        let y: Vec<f64> = x.iter().zip(&dx).map(|(a, b)| a + b).collect();
        let px = encode_phases(r.projection(), &x).unwrap();
        let py = encode_phases(r.projection(), &y).unwrap();
        let dphi = px.iter().zip(&py).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let norm = dx.iter().map(|v| v * v).sum::<f64>().sqrt();
        // 2 pi times the logistic slope bound 1/4, times ||W|| = 1.
        prop_assert!(dphi <= FRAC_PI_2 * norm * (1.0 + 1e-9));
        let fx = r.features(&x).unwrap();
        let fy = r.features(&y).unwrap();
        let df = fx.iter().zip(&fy).map(|(a, b)| (a - b).abs()).sum::<f64>();
        // Each of the 4 photons sees ||dU|| <= max |dphi|, so the output
        // state moves by at most 4 |dphi| and the L1 distance of the
        // distributions by at most twice that.
        prop_assert!(df <= 2.0 * 4.0 * FRAC_PI_2 * norm * (1.0 + 1e-9), "feature jump {df} for step {norm}");
    }

    #[test]
    fn extraction_is_pure(seed in any::<u64>()) {
        let e = Ensemble::sandwich(ReservoirSpec::default_ensemble(), seed % 1000, 120).unwrap();
        let x = DMatrix::from_fn(3, 120, |i, j| ((i * 120 + j) as f64).sin());
        let a = e.feature_matrix(&x).unwrap();
        let b = e.feature_matrix(&x).unwrap();
        prop_assert_eq!(a.as_slice(), b.as_slice());
    }
}
