//! Exact linear-optics simulation in the Fock basis.
//!
//! An `m`-mode interferometer is described by an `m x m` unitary `U` whose
//! element `U[(i, j)]` is the amplitude for a photon entering mode `j` to
//! leave in mode `i`. For an input occupation `s` and output occupation `t`
//! the transition probability is
//!
//! ```text
//! p(t | s) = |perm(U[t, s])|^2 / (prod_j s_j! * prod_i t_i!)
//! ```
//!
//! where `U[t, s]` repeats row `i` of `U` `t_i` times and column `j` `s_j`
//! times.

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default ceiling on the number of states a basis may hold.
pub const DEFAULT_BASIS_CAP: usize = 10_000;

/// Default ceiling on the permanent size (Ryser is `O(2^n n)`).
pub const DEFAULT_PERMANENT_CAP: usize = 12;

/// Tolerance on `max |U^dag U - I|` accepted by [`output_distribution`].
pub const UNITARITY_TOLERANCE: f64 = 1e-10;

/// Photon occupation numbers across modes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FockState {
    occupations: Vec<u32>,
}

impl FockState {
    pub fn new(occupations: Vec<u32>) -> Self {
        Self { occupations }
    }

    /// One photon in each of the first `photons` modes.
    pub fn first_modes(modes: usize, photons: usize) -> Result<Self> {
        if photons > modes {
            return Err(Error::invalid(format!(
                "cannot place {photons} single photons in {modes} modes"
            )));
        }
        let occupations = (0..modes).map(|i| u32::from(i < photons)).collect();
        Ok(Self { occupations })
    }

    pub fn occupations(&self) -> &[u32] {
        &self.occupations
    }

    pub fn modes(&self) -> usize {
        self.occupations.len()
    }

    pub fn photons(&self) -> usize {
        self.occupations.iter().map(|&k| k as usize).sum()
    }

    /// Mode indices with multiplicity, e.g. `(2, 0, 1)` gives `[0, 0, 2]`.
    pub fn mode_list(&self) -> Vec<usize> {
        self.occupations
            .iter()
            .enumerate()
            .flat_map(|(mode, &k)| std::iter::repeat_n(mode, k as usize))
            .collect()
    }

    fn factorial_product(&self) -> f64 {
        self.occupations
            .iter()
            .map(|&k| (1..=k).map(f64::from).product::<f64>())
            .product()
    }
}

impl fmt::Display for FockState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|")?;
        for (i, k) in self.occupations.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
        }
        write!(f, ">")
    }
}

/// `binom(n + m - 1, n)`: the number of ways to put `n` indistinguishable
/// photons into `m` modes.
pub fn fock_dimension(modes: usize, photons: usize) -> Result<u64> {
    if modes == 0 {
        return Err(Error::invalid("mode count must be at least 1"));
    }
    let overflow = || Error::Overflow(format!("fock_dimension({modes}, {photons})"));
    // prod_{i=1..n} (m - 1 + i) / i; every prefix is itself a binomial so the
    // division is exact.
    let mut acc: u128 = 1;
    for i in 1..=photons as u128 {
        let factor = (modes as u128 - 1).checked_add(i).ok_or_else(overflow)?;
        acc = acc.checked_mul(factor).ok_or_else(overflow)? / i;
    }
    u64::try_from(acc).map_err(|_| overflow())
}

/// All occupation vectors of `photons` photons over `modes` modes.
///
/// States are listed in reverse-lexicographic order of their occupation
/// vectors: `(n,0,..,0)` first and `(0,..,0,n)` last. Feature vectors are
/// indexed in this order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FockBasis {
    modes: usize,
    photons: usize,
    states: Vec<FockState>,
}

impl FockBasis {
    pub fn enumerate(modes: usize, photons: usize) -> Result<Self> {
        Self::enumerate_capped(modes, photons, DEFAULT_BASIS_CAP)
    }

    pub fn enumerate_capped(modes: usize, photons: usize, cap: usize) -> Result<Self> {
        let dim = fock_dimension(modes, photons)?;
        if dim > cap as u64 {
            return Err(Error::BasisTooLarge {
                modes,
                photons,
                dim,
                cap,
            });
        }
        let mut states = Vec::with_capacity(dim as usize);
        let mut current = vec![0u32; modes];
        fill_states(&mut current, 0, photons as u32, &mut states);
        debug_assert_eq!(states.len() as u64, dim);
        Ok(Self { modes, photons, states })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn photons(&self) -> usize {
        self.photons
    }

    pub fn states(&self) -> &[FockState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, state: &FockState) -> Option<usize> {
        self.states.iter().position(|s| s == state)
    }
}

fn fill_states(current: &mut Vec<u32>, mode: usize, remaining: u32, out: &mut Vec<FockState>) {
    if mode + 1 == current.len() {
        current[mode] = remaining;
        out.push(FockState::new(current.clone()));
        current[mode] = 0;
        return;
    }
    for k in (0..=remaining).rev() {
        current[mode] = k;
        fill_states(current, mode + 1, remaining - k, out);
    }
    current[mode] = 0;
}

/// Dense complex matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    pub fn new(inner: DMatrix<Complex64>) -> Result<Self> {
        if inner.nrows() == 0 && inner.ncols() != 0 || inner.ncols() == 0 && inner.nrows() != 0 {
            return Err(Error::shape("matrix must not have one empty dimension"));
        }
        if inner.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::invalid("matrix has non-finite entries"));
        }
        Ok(Self(inner))
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::shape("ragged rows"));
        }
        Self::new(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn nrows(&self) -> usize {
        self.0.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.0.nrows() == self.0.ncols()
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }

    pub fn mul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.ncols() != other.nrows() {
            return Err(Error::shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.nrows(),
                self.ncols(),
                other.nrows(),
                other.ncols()
            )));
        }
        Ok(Self(&self.0 * &other.0))
    }

    /// `max |U^dag U - I|` over all entries; infinite for non-square input.
    pub fn unitarity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let gram = self.0.adjoint() * &self.0;
        let n = gram.nrows();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, j)] - target).norm());
            }
        }
        worst
    }
}

/// Permanent via Ryser's formula with Gray-code subset updates.
pub fn permanent(a: &ComplexMatrix) -> Result<Complex64> {
    permanent_capped(a, DEFAULT_PERMANENT_CAP)
}

pub fn permanent_capped(a: &ComplexMatrix, cap: usize) -> Result<Complex64> {
    if !a.is_square() {
        return Err(Error::shape(format!(
            "permanent needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let n = a.nrows();
    if n > cap {
        return Err(Error::invalid(format!(
            "permanent of a {n}x{n} matrix exceeds the size cap {cap}"
        )));
    }
    Ok(ryser(n, |i, j| a.0[(i, j)]))
}

/// perm(A) = (-1)^n sum_{S subset cols} (-1)^{|S|} prod_i sum_{j in S} a_ij,
/// visiting subsets in Gray-code order so each step touches one column.
fn ryser(n: usize, entry: impl Fn(usize, usize) -> Complex64) -> Complex64 {
    if n == 0 {
        return Complex64::new(1.0, 0.0);
    }
    let mut row_sums = vec![Complex64::new(0.0, 0.0); n];
    let mut total = Complex64::new(0.0, 0.0);
    let mut gray_prev: u64 = 0;
    for k in 1..(1u64 << n) {
        let gray = k ^ (k >> 1);
        let col = (gray ^ gray_prev).trailing_zeros() as usize;
        if gray & (1 << col) != 0 {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s += entry(i, col);
            }
        } else {
            for (i, s) in row_sums.iter_mut().enumerate() {
                *s -= entry(i, col);
            }
        }
        let prod: Complex64 = row_sums.iter().product();
        if gray.count_ones() % 2 == 1 {
            total -= prod;
        } else {
            total += prod;
        }
        gray_prev = gray;
    }
    if n % 2 == 1 {
        -total
    } else {
        total
    }
}

/// Output probabilities over `basis` for `input` sent through `unitary`.
pub fn output_distribution(unitary: &ComplexMatrix, input: &FockState, basis: &FockBasis) -> Result<Vec<f64>> {
    let deviation = unitary.unitarity_deviation();
    if deviation > UNITARITY_TOLERANCE {
        return Err(Error::NotUnitary {
            deviation,
            tolerance: UNITARITY_TOLERANCE,
        });
    }
    transition_probabilities(unitary, input, basis)
}

/// Same as [`output_distribution`] without the unitarity check; callers
/// guarantee `unitary` is unitary by construction.
pub(crate) fn transition_probabilities(
    unitary: &ComplexMatrix,
    input: &FockState,
    basis: &FockBasis,
) -> Result<Vec<f64>> {
    let m = basis.modes();
    if unitary.nrows() != m || input.modes() != m {
        return Err(Error::shape(format!(
            "unitary is {}x{}, input has {} modes, basis has {m}",
            unitary.nrows(),
            unitary.ncols(),
            input.modes()
        )));
    }
    if input.photons() != basis.photons() {
        return Err(Error::PhotonMismatch {
            expected: basis.photons(),
            found: input.photons(),
        });
    }
    let n = basis.photons();
    if n > DEFAULT_PERMANENT_CAP {
        return Err(Error::invalid(format!(
            "{n} photons exceed the permanent size cap {DEFAULT_PERMANENT_CAP}"
        )));
    }
    let cols = input.mode_list();
    let input_norm = input.factorial_product();
    let u = unitary.as_matrix();
    let probs = basis
        .states()
        .iter()
        .map(|out| {
            let rows = out.mode_list();
            let amp = ryser(n, |i, j| u[(rows[i], cols[j])]);
            amp.norm_sqr() / (input_norm * out.factorial_product())
        })
        .collect();
    Ok(probs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn dimension_table() {
        assert_eq!(fock_dimension(12, 3).unwrap(), 364);
        assert_eq!(fock_dimension(10, 4).unwrap(), 715);
        assert_eq!(fock_dimension(16, 2).unwrap(), 136);
        assert_eq!(fock_dimension(7, 0).unwrap(), 1);
        assert_eq!(fock_dimension(1, 5).unwrap(), 1);
    }

    #[test]
    fn dimension_rejects_zero_modes_and_overflow() {
        assert!(matches!(fock_dimension(0, 3), Err(Error::InvalidArgument(_))));
        assert!(matches!(fock_dimension(1000, 1000), Err(Error::Overflow(_))));
    }

    #[test]
    fn small_bases_in_reverse_lex_order() {
        let b = FockBasis::enumerate(2, 1).unwrap();
        let occ: Vec<_> = b.states().iter().map(|s| s.occupations().to_vec()).collect();
        assert_eq!(occ, vec![vec![1, 0], vec![0, 1]]);

        let b = FockBasis::enumerate(3, 2).unwrap();
        let occ: Vec<_> = b.states().iter().map(|s| s.occupations().to_vec()).collect();
        assert_eq!(
            occ,
            vec![
                vec![2, 0, 0],
                vec![1, 1, 0],
                vec![1, 0, 1],
                vec![0, 2, 0],
                vec![0, 1, 1],
                vec![0, 0, 2]
            ]
        );
        assert_eq!(FockBasis::enumerate(16, 2).unwrap().len(), 136);
    }

    #[test]
    fn basis_cap_is_enforced() {
        let err = FockBasis::enumerate(20, 5).unwrap_err();
        assert!(matches!(err, Error::BasisTooLarge { dim: 42504, .. }));
        assert!(FockBasis::enumerate_capped(20, 5, 50_000).is_ok());
    }

    #[test]
    fn permanent_small_cases() {
        let id = ComplexMatrix::identity(4);
        assert!((permanent(&id).unwrap() - c(1.0, 0.0)).norm() < 1e-15);

        let (a, b, cc, d) = (c(1.0, 2.0), c(-0.5, 0.3), c(0.7, -1.1), c(2.0, 0.0));
        let m = ComplexMatrix::from_rows(&[vec![a, b], vec![cc, d]]).unwrap();
        assert!((permanent(&m).unwrap() - (a * d + b * cc)).norm() < 1e-14);

        let ones = ComplexMatrix::from_rows(&vec![vec![c(1.0, 0.0); 3]; 3]).unwrap();
        assert!((permanent(&ones).unwrap() - c(6.0, 0.0)).norm() < 1e-14);

        let empty = ComplexMatrix::new(DMatrix::zeros(0, 0)).unwrap();
        assert_eq!(permanent(&empty).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn permanent_rejects_non_square_and_oversize() {
        let m = ComplexMatrix::new(DMatrix::zeros(2, 3)).unwrap();
        assert!(matches!(permanent(&m), Err(Error::Shape(_))));
        let big = ComplexMatrix::identity(13);
        assert!(permanent(&big).is_err());
        assert!(permanent_capped(&big, 13).is_ok());
    }

    #[test]
    fn identity_passes_photons_through() {
        let basis = FockBasis::enumerate(3, 1).unwrap();
        let input = FockState::new(vec![1, 0, 0]);
        let p = output_distribution(&ComplexMatrix::identity(3), &input, &basis).unwrap();
        assert_eq!(p, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn non_unitary_and_mismatched_inputs_are_rejected() {
        let basis = FockBasis::enumerate(2, 1).unwrap();
        let scaled = ComplexMatrix::new(DMatrix::identity(2, 2) * c(1.1, 0.0)).unwrap();
        let input = FockState::new(vec![1, 0]);
        assert!(matches!(
            output_distribution(&scaled, &input, &basis),
            Err(Error::NotUnitary { .. })
        ));
        let two = FockState::new(vec![1, 1]);
        assert!(matches!(
            output_distribution(&ComplexMatrix::identity(2), &two, &basis),
            Err(Error::PhotonMismatch { expected: 1, found: 2 })
        ));
    }

    #[test]
    fn first_modes_input() {
        let s = FockState::first_modes(5, 3).unwrap();
        assert_eq!(s.occupations(), &[1, 1, 1, 0, 0]);
        assert_eq!(s.mode_list(), vec![0, 1, 2]);
        assert!(FockState::first_modes(2, 3).is_err());
        assert_eq!(FockState::new(vec![2, 0, 1]).to_string(), "|2,0,1>");
    }
}
