//! Seeded randomness.
//!
//! Every random stream is a ChaCha20 generator (`rand_chacha`, 20 rounds)
//! seeded from a 64-bit value through `SeedableRng::seed_from_u64`. Named
//! sub-streams hang off one master seed: the sub-seed for a label is the
//! SipHash-2-4 digest (keys `0, 0`) of the master seed's little-endian bytes
//! followed by the UTF-8 label. Labels in use:
//!
//! - `"{reservoir}.U1"`, `"{reservoir}.U2"`, `"{reservoir}.W"` for the fixed
//!   circuit parameters
//! - `"ae.init"`, `"ae.shuffle.epoch{E}"`, `"ae.mask.epoch{E}.batch{B}"` for
//!   autoencoder training
//! - `"synthetic"` for the data generator

use std::hash::Hasher;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;
use siphasher::sip::SipHasher24;

use crate::error::{Error, Result};
use crate::optics::ComplexMatrix;

pub const DEFAULT_SEED: u64 = 42;

/// Sub-seed for `label` under `master`.
pub fn derive_seed(master: u64, label: &str) -> u64 {
    let mut h = SipHasher24::new_with_keys(0, 0);
    h.write(&master.to_le_bytes());
    h.write(label.as_bytes());
    h.finish()
}

#[derive(Clone, Debug)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha20Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream for `label` derived from `master`.
    pub fn derived(master: u64, label: &str) -> Self {
        Self::new(derive_seed(master, label))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    pub fn uniform_range(&mut self, low: f64, high: f64) -> f64 {
        low + (high - low) * self.uniform()
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        use rand::seq::SliceRandom;
        items.shuffle(&mut self.inner);
    }
}

impl RngCore for SeededRng {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Haar-distributed `m x m` unitary.
///
/// QR-decomposes a matrix of i.i.d. standard complex Gaussians and multiplies
/// each column of `Q` by the phase of the matching diagonal entry of `R`,
/// which makes the distribution exactly Haar.
pub fn haar_unitary(m: usize, rng: &mut SeededRng) -> Result<ComplexMatrix> {
    if m == 0 {
        return Err(Error::invalid("unitary dimension must be at least 1"));
    }
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let z = DMatrix::from_fn(m, m, |_, _| Complex64::new(rng.normal() * scale, rng.normal() * scale));
    let qr = z.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..m {
        let d = r[(j, j)];
        let norm = d.norm();
        let phase = if norm > 0.0 { d / norm } else { Complex64::new(1.0, 0.0) };
        for i in 0..m {
            q[(i, j)] *= phase;
        }
    }
    ComplexMatrix::new(q)
}

/// `rows x cols` real matrix with orthonormal rows, from orthonormalising
/// i.i.d. Gaussian rows.
pub fn orthonormal_projection(rows: usize, cols: usize, rng: &mut SeededRng) -> Result<DMatrix<f64>> {
    if rows == 0 || rows > cols {
        return Err(Error::invalid(format!(
            "orthonormal projection needs 1 <= rows <= cols, got {rows}x{cols}"
        )));
    }
    // Sample row-major so the stream order matches the row layout.
    let gaussian = DMatrix::from_row_iterator(rows, cols, (0..rows * cols).map(|_| rng.normal()));
    let qr = gaussian.transpose().qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..rows {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    Ok(q.transpose())
}

/// Entries i.i.d. Bernoulli(`keep_prob`) as 0.0 / 1.0.
pub fn bernoulli_mask(length: usize, keep_prob: f64, rng: &mut SeededRng) -> Result<Vec<f64>> {
    if !(0.0..=1.0).contains(&keep_prob) {
        return Err(Error::invalid(format!("keep probability {keep_prob} outside [0, 1]")));
    }
    Ok((0..length)
        .map(|_| if rng.uniform() < keep_prob { 1.0 } else { 0.0 })
        .collect())
}

/// `max |W W^T - I|`.
pub fn orthonormality_deviation(w: &DMatrix<f64>) -> f64 {
    let gram = w * w.transpose();
    let mut worst = 0.0f64;
    for i in 0..gram.nrows() {
        for j in 0..gram.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((gram[(i, j)] - target).abs());
        }
    }
    worst
}
