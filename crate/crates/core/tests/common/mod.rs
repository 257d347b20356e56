//! Independent reference implementations used as test oracles.
#![allow(dead_code)]

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use qorc_core::autoencoder::AeWeights;
use qorc_core::optics::ComplexMatrix;
use qorc_core::stochastic::SeededRng;

pub fn random_complex(n: usize, rng: &mut SeededRng) -> ComplexMatrix {
    let m = DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.normal(), rng.normal()));
    ComplexMatrix::new(m).unwrap()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Sum over all n! permutations.
pub fn naive_permanent(a: &ComplexMatrix) -> Complex64 {
    let n = a.nrows();
    permutations(n)
        .iter()
        .map(|p| (0..n).map(|i| a.get(i, p[i])).product::<Complex64>())
        .sum()
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Output probabilities by expanding the product of creation operators
/// `prod_i (sum_j U[j, mode_i] a_j^dag)` into monomials. Keys are output
/// occupation vectors.
pub fn creation_operator_probabilities(u: &ComplexMatrix, input: &[u32]) -> HashMap<Vec<u32>, f64> {
    let m = u.nrows();
    let mut poly: HashMap<Vec<u32>, Complex64> = HashMap::new();
    poly.insert(vec![0; m], Complex64::new(1.0, 0.0));
    let mut norm = 1.0;
    for (mode, &count) in input.iter().enumerate() {
        norm *= factorial(count);
        for _ in 0..count {
            let mut next: HashMap<Vec<u32>, Complex64> = HashMap::new();
            for (occ, c) in &poly {
                for j in 0..m {
                    let mut o = occ.clone();
                    o[j] += 1;
                    *next.entry(o).or_default() += c * u.get(j, mode);
                }
            }
            poly = next;
        }
    }
    poly.into_iter()
        .map(|(occ, c)| {
            let weight: f64 = occ.iter().map(|&t| factorial(t)).product();
            let p = c.norm_sqr() * weight / norm;
            (occ, p)
        })
        .collect()
}

/// `q`-th percentile (0..=100) with linear interpolation between order
/// statistics at fractional rank `q/100 * (n-1)`.
pub fn percentile_oracle(values: &[f64], q: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let rank = q / 100.0 * (v.len() - 1) as f64;
    let lo = rank.floor() as usize;
    let hi = rank.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (rank - lo as f64)
}

/// Minimises `sum ||z_i - W f_i - b||^2 + alpha ||W||_F^2` by conjugate
/// gradients on the uncentred problem with an explicit intercept column.
/// Returns `(W, b)` with `W` outputs x features.
pub fn ridge_conjugate_gradient(
    f: &DMatrix<f64>,
    z: &DMatrix<f64>,
    alpha: f64,
    tol: f64,
) -> (DMatrix<f64>, DVector<f64>) {
    let (n, p) = f.shape();
    let x = f.clone().insert_column(p, 1.0);
    let mut penalty = DVector::from_element(p + 1, alpha);
    penalty[p] = 0.0;
    let apply = |v: &DVector<f64>| -> DVector<f64> {
        let xv = &x * v;
        x.transpose() * xv + penalty.component_mul(v)
    };
    let mut w = DMatrix::zeros(z.ncols(), p);
    let mut b = DVector::zeros(z.ncols());
    for k in 0..z.ncols() {
        let rhs = x.transpose() * z.column(k);
        let mut sol = DVector::zeros(p + 1);
        let mut r = rhs.clone();
        let mut d = r.clone();
        let mut rr = r.dot(&r);
        let stop = tol * tol * rhs.dot(&rhs);
        for _ in 0..(20 * (p + 1) + n) {
            if rr <= stop {
                break;
            }
            let ad = apply(&d);
            let step = rr / d.dot(&ad);
            sol += step * &d;
            r -= step * ad;
            let rr_new = r.dot(&r);
            d = &r + (rr_new / rr) * d;
            rr = rr_new;
        }
        w.row_mut(k).copy_from(&sol.rows(0, p).transpose());
        b[k] = sol[p];
    }
    (w, b)
}

pub fn ridge_objective(f: &DMatrix<f64>, z: &DMatrix<f64>, w: &DMatrix<f64>, b: &DVector<f64>, alpha: f64) -> f64 {
    let mut pred = f * w.transpose();
    for mut row in pred.row_iter_mut() {
        row += b.transpose();
    }
    (z - pred).norm_squared() + alpha * w.norm_squared()
}

/// Worst relative error between manual and central-difference gradients
/// over `per_layer` weights and `per_layer / 4` biases from every layer.
/// Gradients below `floor` in magnitude are compared against `floor`.
pub fn gradient_check(
    weights: &AeWeights,
    batch: &DMatrix<f64>,
    masks: Option<&DMatrix<f64>>,
    lambda: f64,
    per_layer: usize,
    rng: &mut SeededRng,
) -> (f64, usize) {
    let h = 1e-5;
    let floor = 1e-6;
    let (_, grads) = weights.loss_and_gradients(batch, masks, lambda).unwrap();
    let analytic = grads.flatten();
    let base = weights.flatten();
    let mut offset = 0;
    let mut picks = Vec::new();
    for layer in weights.layers() {
        let nw = layer.weights.len();
        let nb = layer.bias.len();
        for _ in 0..per_layer {
            picks.push(offset + rng.below(nw));
        }
        for _ in 0..(per_layer / 4).max(1) {
            picks.push(offset + nw + rng.below(nb));
        }
        offset += nw + nb;
    }
    let mut probe = weights.clone();
    let loss_at = |probe: &mut AeWeights, params: &[f64]| {
        probe.set_flat(params).unwrap();
        probe.loss(batch, masks, lambda).unwrap().total()
    };
    let mut worst: f64 = 0.0;
    for &i in &picks {
        let mut p = base.clone();
        p[i] = base[i] + h;
        let up = loss_at(&mut probe, &p);
        p[i] = base[i] - h;
        let down = loss_at(&mut probe, &p);
        let numeric = (up - down) / (2.0 * h);
        let denom = analytic[i].abs().max(numeric.abs()).max(floor);
        worst = worst.max((analytic[i] - numeric).abs() / denom);
    }
    (worst, picks.len())
}
