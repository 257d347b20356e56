//! Fixed photonic reservoirs.
//!
//! A reservoir projects the classical context `x` onto `m` phases,
//! `phi_i = 2 pi * logistic((W x)_i)`, programs them into a phase layer
//! between two fixed Haar unitaries, `U = U2 diag(e^{i phi}) U1`, and reads
//! out the full Fock-basis output distribution for one photon in each of the
//! first `n` modes. Nothing in a reservoir is trained.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::autoencoder::sigmoid;
use crate::error::{Error, Result};
use crate::optics::{self, ComplexMatrix, FockBasis, FockState};
use crate::stochastic::{self, haar_unitary, orthonormal_projection, SeededRng};

/// Width of the windowed context vector for `d = 20`, `k = 5`.
pub const CONTEXT_DIM: usize = 120;

/// Tolerance used when accepting stored circuit parameters.
const PARAMETER_TOLERANCE: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReservoirSpec {
    pub label: String,
    pub modes: usize,
    pub photons: usize,
}

impl ReservoirSpec {
    pub fn new(label: impl Into<String>, modes: usize, photons: usize) -> Self {
        Self {
            label: label.into(),
            modes,
            photons,
        }
    }

    /// The three-reservoir ensemble: cubic, quartic and pairwise photon
    /// correlations, 364 + 715 + 136 = 1,215 features.
    pub fn default_ensemble() -> Vec<Self> {
        vec![Self::new("R1", 12, 3), Self::new("R2", 10, 4), Self::new("R3", 16, 2)]
    }

    /// Single reservoir used by the no-sandwich ablation.
    pub fn single_ablation() -> Self {
        Self::new("R1", 12, 3)
    }

    pub fn seed_label(&self, part: &str) -> String {
        format!("{}.{part}", self.label)
    }

    pub fn feature_len(&self) -> Result<usize> {
        Ok(optics::fock_dimension(self.modes, self.photons)? as usize)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CircuitLayout {
    /// `U2 PS(phi) U1`
    Sandwich,
    /// `U1 PS(phi)`
    Single,
}

#[derive(Clone, Debug)]
pub struct Reservoir {
    spec: ReservoirSpec,
    layout: CircuitLayout,
    first: ComplexMatrix,
    second: Option<ComplexMatrix>,
    projection: DMatrix<f64>,
    input: FockState,
    basis: FockBasis,
}

/// `phi_i = 2 pi * logistic(sum_j W_ij x_j)`.
pub fn encode_phases(projection: &DMatrix<f64>, x: &[f64]) -> Result<Vec<f64>> {
    if projection.ncols() != x.len() {
        return Err(Error::shape(format!(
            "projection expects {} inputs, got {}",
            projection.ncols(),
            x.len()
        )));
    }
    Ok(projection
        .row_iter()
        .map(|row| {
            let s: f64 = row.iter().zip(x).map(|(w, v)| w * v).sum();
            TAU * sigmoid(s)
        })
        .collect())
}

impl Reservoir {
    /// Draws `U1`, `U2` and `W` from the sub-streams `"{label}.U1"`,
    /// `"{label}.U2"` and `"{label}.W"` of `master_seed`.
    pub fn sandwich(spec: ReservoirSpec, master_seed: u64, context_dim: usize) -> Result<Self> {
        let u1 = haar_unitary(spec.modes, &mut SeededRng::derived(master_seed, &spec.seed_label("U1")))?;
        let u2 = haar_unitary(spec.modes, &mut SeededRng::derived(master_seed, &spec.seed_label("U2")))?;
        let w = orthonormal_projection(
            spec.modes,
            context_dim,
            &mut SeededRng::derived(master_seed, &spec.seed_label("W")),
        )?;
        Self::from_parts(spec, CircuitLayout::Sandwich, u1, Some(u2), w)
    }

    /// Same `U1` and `W` as [`Reservoir::sandwich`] for the same spec and
    /// seed, without the second unitary.
    pub fn single(spec: ReservoirSpec, master_seed: u64, context_dim: usize) -> Result<Self> {
        let u1 = haar_unitary(spec.modes, &mut SeededRng::derived(master_seed, &spec.seed_label("U1")))?;
        let w = orthonormal_projection(
            spec.modes,
            context_dim,
            &mut SeededRng::derived(master_seed, &spec.seed_label("W")),
        )?;
        Self::from_parts(spec, CircuitLayout::Single, u1, None, w)
    }

    /// Reassembles a reservoir from stored parameters.
    pub fn from_parts(
        spec: ReservoirSpec,
        layout: CircuitLayout,
        first: ComplexMatrix,
        second: Option<ComplexMatrix>,
        projection: DMatrix<f64>,
    ) -> Result<Self> {
        let m = spec.modes;
        let check = |u: &ComplexMatrix| -> Result<()> {
            if u.nrows() != m || !u.is_square() {
                return Err(Error::shape(format!(
                    "{}: unitary is {}x{}, expected {m}x{m}",
                    spec.label,
                    u.nrows(),
                    u.ncols()
                )));
            }
            let deviation = u.unitarity_deviation();
            if deviation > PARAMETER_TOLERANCE {
                return Err(Error::NotUnitary {
                    deviation,
                    tolerance: PARAMETER_TOLERANCE,
                });
            }
            Ok(())
        };
        check(&first)?;
        match (layout, &second) {
            (CircuitLayout::Sandwich, Some(u)) => check(u)?,
            (CircuitLayout::Single, None) => {}
            _ => {
                return Err(Error::invalid(format!(
                    "{}: layout {layout:?} does not match the number of unitaries",
                    spec.label
                )))
            }
        }
        if projection.nrows() != m {
            return Err(Error::shape(format!(
                "{}: projection has {} rows, expected {m}",
                spec.label,
                projection.nrows()
            )));
        }
        let deviation = stochastic::orthonormality_deviation(&projection);
        if deviation > PARAMETER_TOLERANCE {
            return Err(Error::invalid(format!(
                "{}: projection rows are not orthonormal (deviation {deviation:e})",
                spec.label
            )));
        }
        let input = FockState::first_modes(m, spec.photons)?;
        let basis = FockBasis::enumerate(m, spec.photons)?;
        Ok(Self {
            spec,
            layout,
            first,
            second,
            projection,
            input,
            basis,
        })
    }

    pub fn spec(&self) -> &ReservoirSpec {
        &self.spec
    }

    pub fn layout(&self) -> CircuitLayout {
        self.layout
    }

    pub fn first_unitary(&self) -> &ComplexMatrix {
        &self.first
    }

    pub fn second_unitary(&self) -> Option<&ComplexMatrix> {
        self.second.as_ref()
    }

    pub fn projection(&self) -> &DMatrix<f64> {
        &self.projection
    }

    pub fn input_state(&self) -> &FockState {
        &self.input
    }

    pub fn basis(&self) -> &FockBasis {
        &self.basis
    }

    pub fn feature_len(&self) -> usize {
        self.basis.len()
    }

    pub fn context_dim(&self) -> usize {
        self.projection.ncols()
    }

    /// The data-dependent circuit unitary for context `x`.
    pub fn circuit(&self, x: &[f64]) -> Result<ComplexMatrix> {
        let phases = encode_phases(&self.projection, x)?;
        let shifts: Vec<Complex64> = phases.iter().map(|&p| Complex64::from_polar(1.0, p)).collect();
        let u = match (self.layout, &self.second) {
            (CircuitLayout::Sandwich, Some(u2)) => {
                // diag(e^{i phi}) U1 scales the rows of U1.
                let mut inner = self.first.as_matrix().clone();
                for (i, s) in shifts.iter().enumerate() {
                    inner.row_mut(i).iter_mut().for_each(|v| *v *= *s);
                }
                u2.as_matrix() * inner
            }
            _ => {
                // U1 diag(e^{i phi}) scales the columns of U1.
                let mut outer = self.first.as_matrix().clone();
                for (j, s) in shifts.iter().enumerate() {
                    outer.column_mut(j).iter_mut().for_each(|v| *v *= *s);
                }
                outer
            }
        };
        ComplexMatrix::new(u)
    }

    /// Fock-basis output probabilities for context `x`.
    pub fn features(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid("context vector has non-finite entries"));
        }
        let u = self.circuit(x)?;
        optics::transition_probabilities(&u, &self.input, &self.basis)
    }

    /// Features for every row of `contexts`.
    pub fn feature_matrix(&self, contexts: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let mut out = DMatrix::zeros(contexts.nrows(), self.feature_len());
        for (i, row) in contexts.row_iter().enumerate() {
            let x: Vec<f64> = row.iter().copied().collect();
            let f = self.features(&x)?;
            out.row_mut(i).copy_from_slice(&f);
        }
        Ok(out)
    }
}

/// Reservoirs whose features are concatenated in order.
#[derive(Clone, Debug)]
pub struct Ensemble {
    reservoirs: Vec<Reservoir>,
}

impl Ensemble {
    pub fn new(reservoirs: Vec<Reservoir>) -> Result<Self> {
        if reservoirs.is_empty() {
            return Err(Error::invalid("ensemble needs at least one reservoir"));
        }
        let dim = reservoirs[0].context_dim();
        if reservoirs.iter().any(|r| r.context_dim() != dim) {
            return Err(Error::shape("reservoirs disagree on context width"));
        }
        Ok(Self { reservoirs })
    }

    /// Sandwich reservoirs for each spec.
    pub fn sandwich(specs: Vec<ReservoirSpec>, master_seed: u64, context_dim: usize) -> Result<Self> {
        let reservoirs = specs
            .into_iter()
            .map(|s| Reservoir::sandwich(s, master_seed, context_dim))
            .collect::<Result<Vec<_>>>()?;
        Self::new(reservoirs)
    }

    pub fn reservoirs(&self) -> &[Reservoir] {
        &self.reservoirs
    }

    pub fn feature_len(&self) -> usize {
        self.reservoirs.iter().map(Reservoir::feature_len).sum()
    }

    /// Start offset of each reservoir's block.
    pub fn block_offsets(&self) -> Vec<usize> {
        self.reservoirs
            .iter()
            .scan(0, |acc, r| {
                let start = *acc;
                *acc += r.feature_len();
                Some(start)
            })
            .collect()
    }

    pub fn features(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut out = Vec::with_capacity(self.feature_len());
        for r in &self.reservoirs {
            out.extend(r.features(x)?);
        }
        Ok(out)
    }

    pub fn feature_matrix(&self, contexts: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let mut out = DMatrix::zeros(contexts.nrows(), self.feature_len());
        for (i, row) in contexts.row_iter().enumerate() {
            let x: Vec<f64> = row.iter().copied().collect();
            let f = self.features(&x)?;
            out.row_mut(i).copy_from_slice(&f);
        }
        Ok(out)
    }
}

/// Relative spread below which a feature counts as constant.
pub const CONSTANT_TOLERANCE: f64 = 1e-12;

/// Per-feature standardisation with training mean and population standard
/// deviation. Features whose deviation is zero up to rounding
/// (`sigma <= CONSTANT_TOLERANCE * max(|mu|, 1)`) get `sigma = 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct FeatureStandardizer {
    pub mean: DVector<f64>,
    pub std: DVector<f64>,
    pub constant: Vec<bool>,
}

impl FeatureStandardizer {
    pub fn fit(train: &DMatrix<f64>) -> Result<Self> {
        let n = train.nrows();
        if n < 2 {
            return Err(Error::InsufficientData(format!(
                "standardizer needs at least 2 rows, got {n}"
            )));
        }
        let nf = n as f64;
        let mean = train.row_mean().transpose();
        let mut std = DVector::zeros(train.ncols());
        let mut constant = vec![false; train.ncols()];
        for (j, col) in train.column_iter().enumerate() {
            let var = col.iter().map(|v| (v - mean[j]).powi(2)).sum::<f64>() / nf;
            let sd = var.sqrt();
            if sd > CONSTANT_TOLERANCE * mean[j].abs().max(1.0) {
                std[j] = sd;
            } else {
                std[j] = 1.0;
                constant[j] = true;
            }
        }
        Ok(Self { mean, std, constant })
    }

    pub fn apply(&self, q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if q.ncols() != self.mean.len() {
            return Err(Error::shape(format!(
                "standardizer fitted on {} features, got {}",
                self.mean.len(),
                q.ncols()
            )));
        }
        Ok(DMatrix::from_fn(q.nrows(), q.ncols(), |i, j| {
            (q[(i, j)] - self.mean[j]) / self.std[j]
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_context_gives_pi_phases() {
        let w = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0]);
        let phases = encode_phases(&w, &[0.0; 3]).unwrap();
        assert_eq!(phases, vec![std::f64::consts::PI; 2]);
    }

    #[test]
    fn hand_computed_phases() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let w = DMatrix::from_row_slice(2, 3, &[s, s, 0.0, 0.0, 0.0, 1.0]);
        let x = [0.4, -1.0, 2.0];
        let phases = encode_phases(&w, &x).unwrap();
        let a = s * 0.4 - s;
        let expected0 = TAU / (1.0 + (-a).exp());
        let expected1 = TAU / (1.0 + (-2.0f64).exp());
        assert!((phases[0] - expected0).abs() < 1e-14);
        assert!((phases[1] - expected1).abs() < 1e-14);
    }

    #[test]
    fn phases_saturate_towards_two_pi() {
        let w = DMatrix::from_row_slice(1, 2, &[1.0, 0.0]);
        let p = encode_phases(&w, &[1e3, 0.0]).unwrap();
        assert!((p[0] - TAU).abs() < 1e-12);
    }

    #[test]
    fn default_specs_and_lengths() {
        let ens = Ensemble::sandwich(ReservoirSpec::default_ensemble(), 42, CONTEXT_DIM).unwrap();
        let lens: Vec<_> = ens.reservoirs().iter().map(Reservoir::feature_len).collect();
        assert_eq!(lens, vec![364, 715, 136]);
        assert_eq!(ens.block_offsets(), vec![0, 364, 1079]);
        assert_eq!(ens.feature_len(), 1215);
    }

    #[test]
    fn sandwich_unitaries_are_distinct() {
        let r = Reservoir::sandwich(ReservoirSpec::new("R3", 16, 2), 42, CONTEXT_DIM).unwrap();
        assert_ne!(r.first_unitary(), r.second_unitary().unwrap());
    }

    #[test]
    fn from_parts_validates() {
        let r = Reservoir::sandwich(ReservoirSpec::new("A", 4, 2), 1, 6).unwrap();
        let bad = ComplexMatrix::new(r.first_unitary().as_matrix() * Complex64::new(2.0, 0.0)).unwrap();
        let err = Reservoir::from_parts(
            r.spec().clone(),
            CircuitLayout::Sandwich,
            bad,
            r.second_unitary().cloned(),
            r.projection().clone(),
        );
        assert!(matches!(err, Err(Error::NotUnitary { .. })));
        let err = Reservoir::from_parts(
            r.spec().clone(),
            CircuitLayout::Single,
            r.first_unitary().clone(),
            r.second_unitary().cloned(),
            r.projection().clone(),
        );
        assert!(err.is_err());
    }

    #[test]
    fn standardizer_defining_properties() {
        let q = DMatrix::from_fn(30, 4, |i, j| if j == 3 { 0.25 } else { ((i * (j + 3)) % 7) as f64 });
        let s = FeatureStandardizer::fit(&q).unwrap();
        assert_eq!(s.constant, vec![false, false, false, true]);
        let t = s.apply(&q).unwrap();
        for j in 0..3 {
            let col = t.column(j);
            let mean = col.mean();
            let sd = (col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / 30.0).sqrt();
            assert!(mean.abs() < 1e-10);
            assert!((sd - 1.0).abs() < 1e-8);
        }
        assert!(t.column(3).iter().all(|&v| v == 0.0));
        assert!(s.apply(&DMatrix::zeros(2, 5)).is_err());
    }
}
