//! Sparse denoising autoencoder with hand-written backpropagation.
//!
//! Encoder `input -> h1 (ReLU) -> h2 (ReLU) -> latent (ELU)`, decoder
//! `latent -> h2 (ReLU) -> h1 (ReLU) -> input (sigmoid)`. The surface model
//! uses `224 -> 128 -> 64 -> 20`.
//!
//! Loss over a batch of `N` samples:
//!
//! ```text
//! L = (1/N) sum_t ||g(f(S_t * m_t)) - S_t||^2 + lambda (1/N) sum_t ||f(S_t * m_t)||_1
//! ```
//!
//! Masks multiply the encoder input only; the target is always clean.
//! Internally activations are stored feature-major (one column per sample).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::stochastic::{bernoulli_mask, SeededRng};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AeShape {
    pub input: usize,
    pub hidden1: usize,
    pub hidden2: usize,
    pub latent: usize,
}

impl AeShape {
    pub const SURFACE: AeShape = AeShape {
        input: 224,
        hidden1: 128,
        hidden2: 64,
        latent: 20,
    };

    /// `(fan_in, fan_out, activation)` for the six layers in forward order.
    pub fn layers(&self) -> [(usize, usize, Activation); 6] {
        [
            (self.input, self.hidden1, Activation::Relu),
            (self.hidden1, self.hidden2, Activation::Relu),
            (self.hidden2, self.latent, Activation::Elu),
            (self.latent, self.hidden2, Activation::Relu),
            (self.hidden2, self.hidden1, Activation::Relu),
            (self.hidden1, self.input, Activation::Sigmoid),
        ]
    }
}

/// Index of the bottleneck layer within [`AeShape::layers`].
const BOTTLENECK: usize = 2;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Activation {
    Relu,
    Elu,
    Sigmoid,
}

pub fn elu(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        x.exp_m1()
    }
}

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

impl Activation {
    fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Relu => x.max(0.0),
            Activation::Elu => elu(x),
            Activation::Sigmoid => sigmoid(x),
        }
    }

    /// Derivative given pre-activation `z` and output `a`.
    fn derivative(self, z: f64, a: f64) -> f64 {
        match self {
            Activation::Relu => {
                if z > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Elu => {
                if z > 0.0 {
                    1.0
                } else {
                    a + 1.0
                }
            }
            Activation::Sigmoid => a * (1.0 - a),
        }
    }
}

/// One fully connected layer, `weights` is `fan_out x fan_in`.
#[derive(Clone, Debug, PartialEq)]
pub struct Dense {
    pub weights: DMatrix<f64>,
    pub bias: DVector<f64>,
    pub activation: Activation,
}

impl Dense {
    fn forward(&self, input: &DMatrix<f64>) -> (DMatrix<f64>, DMatrix<f64>) {
        let mut pre = &self.weights * input;
        for mut col in pre.column_iter_mut() {
            col += &self.bias;
        }
        let act = pre.map(|z| self.activation.apply(z));
        (pre, act)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AeWeights {
    shape: AeShape,
    layers: Vec<Dense>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossParts {
    pub reconstruction: f64,
    pub sparsity: f64,
}

impl LossParts {
    pub fn total(&self) -> f64 {
        self.reconstruction + self.sparsity
    }
}

struct ForwardCache {
    pre: Vec<DMatrix<f64>>,
    act: Vec<DMatrix<f64>>,
}

impl AeWeights {
    pub fn zeros(shape: AeShape) -> Self {
        let layers = shape
            .layers()
            .iter()
            .map(|&(fan_in, fan_out, activation)| Dense {
                weights: DMatrix::zeros(fan_out, fan_in),
                bias: DVector::zeros(fan_out),
                activation,
            })
            .collect();
        Self { shape, layers }
    }

    /// Uniform Glorot initialisation, zero biases.
    pub fn glorot(shape: AeShape, rng: &mut SeededRng) -> Self {
        let mut w = Self::zeros(shape);
        for layer in &mut w.layers {
            let (fan_out, fan_in) = layer.weights.shape();
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            // Row-major draw order.
            for i in 0..fan_out {
                for j in 0..fan_in {
                    layer.weights[(i, j)] = rng.uniform_range(-limit, limit);
                }
            }
        }
        w
    }

    /// Builds weights from explicit layers, checking every shape.
    pub fn from_layers(shape: AeShape, layers: Vec<(DMatrix<f64>, DVector<f64>)>) -> Result<Self> {
        let spec = shape.layers();
        if layers.len() != spec.len() {
            return Err(Error::shape(format!("expected 6 layers, got {}", layers.len())));
        }
        let layers = layers
            .into_iter()
            .zip(spec)
            .enumerate()
            .map(|(k, ((weights, bias), (fan_in, fan_out, activation)))| {
                if weights.shape() != (fan_out, fan_in) || bias.len() != fan_out {
                    return Err(Error::shape(format!(
                        "layer {k}: expected {fan_out}x{fan_in} weights and {fan_out} biases, got {:?} and {}",
                        weights.shape(),
                        bias.len()
                    )));
                }
                Ok(Dense {
                    weights,
                    bias,
                    activation,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { shape, layers })
    }

    pub fn shape(&self) -> AeShape {
        self.shape
    }

    pub fn layers(&self) -> &[Dense] {
        &self.layers
    }

    pub fn layers_mut(&mut self) -> &mut [Dense] {
        &mut self.layers
    }

    pub fn param_count(&self) -> usize {
        self.layers.iter().map(|l| l.weights.len() + l.bias.len()).sum()
    }

    /// All parameters, layer by layer, weights (column-major) then biases.
    pub fn flatten(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.param_count());
        for l in &self.layers {
            out.extend_from_slice(l.weights.as_slice());
            out.extend_from_slice(l.bias.as_slice());
        }
        out
    }

    pub fn set_flat(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.param_count() {
            return Err(Error::shape(format!(
                "expected {} parameters, got {}",
                self.param_count(),
                params.len()
            )));
        }
        let mut offset = 0;
        for l in &mut self.layers {
            let n = l.weights.len();
            l.weights.as_mut_slice().copy_from_slice(&params[offset..offset + n]);
            offset += n;
            let n = l.bias.len();
            l.bias.as_mut_slice().copy_from_slice(&params[offset..offset + n]);
            offset += n;
        }
        Ok(())
    }

    fn check_rows(&self, x: &DMatrix<f64>, width: usize, what: &str) -> Result<()> {
        if x.ncols() != width {
            return Err(Error::shape(format!(
                "{what} expects {width} columns, got {}",
                x.ncols()
            )));
        }
        Ok(())
    }

    fn run(&self, range: std::ops::Range<usize>, cols: DMatrix<f64>) -> DMatrix<f64> {
        self.layers[range].iter().fold(cols, |a, layer| layer.forward(&a).1)
    }

    /// Encodes each row of `surfaces` (N x input) into a row of latent codes.
    pub fn encode_batch(&self, surfaces: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.check_rows(surfaces, self.shape.input, "encode")?;
        Ok(self.run(0..3, surfaces.transpose()).transpose())
    }

    /// Decodes each row of `codes` (N x latent).
    pub fn decode_batch(&self, codes: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        self.check_rows(codes, self.shape.latent, "decode")?;
        Ok(self.run(3..6, codes.transpose()).transpose())
    }

    pub fn encode(&self, surface: &[f64]) -> Result<Vec<f64>> {
        let row = DMatrix::from_row_slice(1, surface.len(), surface);
        Ok(self.encode_batch(&row)?.as_slice().to_vec())
    }

    pub fn decode(&self, code: &[f64]) -> Result<Vec<f64>> {
        let row = DMatrix::from_row_slice(1, code.len(), code);
        Ok(self.decode_batch(&row)?.as_slice().to_vec())
    }

    fn forward_cached(&self, input_cols: DMatrix<f64>) -> ForwardCache {
        let mut pre = Vec::with_capacity(6);
        let mut act = Vec::with_capacity(7);
        act.push(input_cols);
        for layer in &self.layers {
            let (z, a) = layer.forward(act.last().expect("non-empty"));
            pre.push(z);
            act.push(a);
        }
        ForwardCache { pre, act }
    }

    /// Loss on clean rows `batch` (N x input) with optional input `masks` of
    /// the same shape.
    pub fn loss(&self, batch: &DMatrix<f64>, masks: Option<&DMatrix<f64>>, lambda: f64) -> Result<LossParts> {
        let (inputs, target) = self.prepare(batch, masks)?;
        let cache = self.forward_cached(inputs);
        Ok(loss_from_cache(&cache, &target, lambda))
    }

    /// Loss and its gradient with respect to every parameter. The returned
    /// weights hold gradients in place of values. The L1 subgradient at
    /// exactly zero is zero.
    pub fn loss_and_gradients(
        &self,
        batch: &DMatrix<f64>,
        masks: Option<&DMatrix<f64>>,
        lambda: f64,
    ) -> Result<(LossParts, AeWeights)> {
        let (inputs, target) = self.prepare(batch, masks)?;
        let n = target.ncols() as f64;
        let cache = self.forward_cached(inputs);
        let parts = loss_from_cache(&cache, &target, lambda);

        let mut grads = AeWeights::zeros(self.shape);
        // d/d(output activation)
        let mut upstream = (&cache.act[6] - &target) * (2.0 / n);
        for k in (0..6).rev() {
            if k == BOTTLENECK && lambda != 0.0 {
                let z = &cache.act[k + 1];
                upstream += z.map(|v| lambda * signum0(v) / n);
            }
            let layer = &self.layers[k];
            let pre = &cache.pre[k];
            let act = &cache.act[k + 1];
            let delta = upstream.zip_zip_map(pre, act, |g, z, a| g * layer.activation.derivative(z, a));
            grads.layers[k].weights = &delta * cache.act[k].transpose();
            grads.layers[k].bias = delta.column_sum();
            if k > 0 {
                upstream = layer.weights.tr_mul(&delta);
            }
        }
        Ok((parts, grads))
    }

    fn prepare(&self, batch: &DMatrix<f64>, masks: Option<&DMatrix<f64>>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
        self.check_rows(batch, self.shape.input, "loss")?;
        if batch.nrows() == 0 {
            return Err(Error::shape("empty batch"));
        }
        let target = batch.transpose();
        let inputs = match masks {
            Some(m) => {
                if m.shape() != batch.shape() {
                    return Err(Error::shape(format!(
                        "mask shape {:?} differs from batch shape {:?}",
                        m.shape(),
                        batch.shape()
                    )));
                }
                target.component_mul(&m.transpose())
            }
            None => target.clone(),
        };
        Ok((inputs, target))
    }

    /// Mean squared-norm reconstruction error on clean inputs.
    pub fn reconstruction_mse(&self, rows: &DMatrix<f64>) -> Result<f64> {
        Ok(self.loss(rows, None, 0.0)?.reconstruction)
    }

    /// Mean L1 norm of the latent codes of `rows`.
    pub fn mean_latent_l1(&self, rows: &DMatrix<f64>) -> Result<f64> {
        let z = self.encode_batch(rows)?;
        Ok(z.iter().map(|v| v.abs()).sum::<f64>() / rows.nrows() as f64)
    }
}

fn signum0(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn loss_from_cache(cache: &ForwardCache, target: &DMatrix<f64>, lambda: f64) -> LossParts {
    let n = target.ncols() as f64;
    let reconstruction = (&cache.act[6] - target).norm_squared() / n;
    let l1: f64 = cache.act[BOTTLENECK + 1].iter().map(|v| v.abs()).sum();
    LossParts {
        reconstruction,
        sparsity: lambda * l1 / n,
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AeTrainConfig {
    pub sparsity: f64,
    pub keep_prob: f64,
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub batch_size: usize,
    pub max_epochs: usize,
    pub patience: usize,
    /// Trailing training rows held out for early stopping.
    pub validation_rows: usize,
}

impl Default for AeTrainConfig {
    fn default() -> Self {
        Self {
            sparsity: 1e-4,
            keep_prob: 0.85,
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            batch_size: 32,
            max_epochs: 1000,
            patience: 30,
            validation_rows: 50,
        }
    }
}

struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    step: i32,
    m: Vec<f64>,
    v: Vec<f64>,
}

impl Adam {
    fn new(cfg: &AeTrainConfig, params: usize) -> Self {
        Self {
            lr: cfg.learning_rate,
            beta1: cfg.beta1,
            beta2: cfg.beta2,
            eps: cfg.epsilon,
            step: 0,
            m: vec![0.0; params],
            v: vec![0.0; params],
        }
    }

    fn update(&mut self, weights: &mut AeWeights, grads: &AeWeights) {
        self.step += 1;
        let c1 = 1.0 - self.beta1.powi(self.step);
        let c2 = 1.0 - self.beta2.powi(self.step);
        let mut k = 0;
        for (layer, grad) in weights.layers.iter_mut().zip(&grads.layers) {
            let pairs = layer
                .weights
                .as_mut_slice()
                .iter_mut()
                .zip(grad.weights.as_slice())
                .chain(layer.bias.as_mut_slice().iter_mut().zip(grad.bias.as_slice()));
            for (p, &g) in pairs {
                self.m[k] = self.beta1 * self.m[k] + (1.0 - self.beta1) * g;
                self.v[k] = self.beta2 * self.v[k] + (1.0 - self.beta2) * g * g;
                let m_hat = self.m[k] / c1;
                let v_hat = self.v[k] / c2;
                *p -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
                k += 1;
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub validation_mse: f64,
    pub best_validation_mse: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainingLog {
    pub epochs: Vec<EpochRecord>,
    pub best_epoch: usize,
    pub stopped_early: bool,
    /// Rows used for gradient steps and for early stopping, as offsets into
    /// the training matrix.
    pub fit_rows: std::ops::Range<usize>,
    pub validation_rows: std::ops::Range<usize>,
}

/// Mini-batch Adam on `rows` (N x input, preprocessed). The last
/// `config.validation_rows` rows are held out and early stopping keeps the
/// weights with the best clean reconstruction MSE on them.
pub fn train_autoencoder(
    rows: &DMatrix<f64>,
    shape: AeShape,
    config: &AeTrainConfig,
    master_seed: u64,
) -> Result<(AeWeights, TrainingLog)> {
    let n = rows.nrows();
    if config.validation_rows == 0 || n < config.validation_rows + 2 {
        return Err(Error::InsufficientData(format!(
            "autoencoder needs more than {} rows plus a validation block, got {n}",
            config.validation_rows
        )));
    }
    if config.batch_size == 0 {
        return Err(Error::invalid("batch size must be positive"));
    }
    let n_fit = n - config.validation_rows;
    let fit = rows.rows(0, n_fit).into_owned();
    let val = rows.rows(n_fit, config.validation_rows).into_owned();

    let mut weights = AeWeights::glorot(shape, &mut SeededRng::derived(master_seed, "ae.init"));
    let mut adam = Adam::new(config, weights.param_count());
    let mut best = weights.clone();
    let mut best_val = f64::INFINITY;
    let mut best_epoch = 0;
    let mut since_best = 0;
    let mut epochs = Vec::new();
    let mut stopped_early = false;

    for epoch in 0..config.max_epochs {
        let mut order: Vec<usize> = (0..n_fit).collect();
        SeededRng::derived(master_seed, &format!("ae.shuffle.epoch{epoch}")).shuffle(&mut order);
        let mut loss_sum = 0.0;
        for (b, chunk) in order.chunks(config.batch_size).enumerate() {
            let batch = fit.select_rows(chunk);
            let mut mask_rng = SeededRng::derived(master_seed, &format!("ae.mask.epoch{epoch}.batch{b}"));
            let mask = bernoulli_mask(batch.len(), config.keep_prob, &mut mask_rng)?;
            let mask = DMatrix::from_row_slice(batch.nrows(), batch.ncols(), &mask);
            let (parts, grads) = weights.loss_and_gradients(&batch, Some(&mask), config.sparsity)?;
            let loss = parts.total();
            if !loss.is_finite() {
                return Err(Error::NonFiniteLoss { epoch, batch: b, loss });
            }
            loss_sum += loss * chunk.len() as f64;
            adam.update(&mut weights, &grads);
        }
        let val_mse = weights.reconstruction_mse(&val)?;
        if !val_mse.is_finite() {
            return Err(Error::NonFiniteLoss {
                epoch,
                batch: usize::MAX,
                loss: val_mse,
            });
        }
        if val_mse < best_val {
            best_val = val_mse;
            best = weights.clone();
            best_epoch = epoch;
            since_best = 0;
        } else {
            since_best += 1;
        }
        epochs.push(EpochRecord {
            epoch,
            train_loss: loss_sum / n_fit as f64,
            validation_mse: val_mse,
            best_validation_mse: best_val,
        });
        log::debug!(
            "ae epoch {epoch}: train {:.6e} val {val_mse:.6e}",
            loss_sum / n_fit as f64
        );
        if since_best >= config.patience {
            stopped_early = true;
            break;
        }
    }
    Ok((
        best,
        TrainingLog {
            epochs,
            best_epoch,
            stopped_early,
            fit_rows: 0..n_fit,
            validation_rows: n_fit..n,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TINY: AeShape = AeShape {
        input: 3,
        hidden1: 2,
        hidden2: 2,
        latent: 1,
    };

    #[test]
    fn elu_values() {
        assert_eq!(elu(0.0), 0.0);
        assert_eq!(elu(1.0), 1.0);
        assert!((elu(-1.0) - (std::f64::consts::E.recip() - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn zero_weights_encode_to_zero_and_decode_to_half() {
        let w = AeWeights::zeros(AeShape::SURFACE);
        let z = w.encode(&[0.3; 224]).unwrap();
        assert_eq!(z, vec![0.0; 20]);
        let s = w.decode(&[0.7; 20]).unwrap();
        assert!(s.iter().all(|&v| v == 0.5));
    }

    #[test]
    fn large_output_bias_saturates_to_one() {
        let mut w = AeWeights::zeros(AeShape::SURFACE);
        w.layers_mut()[5].bias.fill(50.0);
        let s = w.decode(&[0.0; 20]).unwrap();
        assert!(s.iter().all(|&v| v > 1.0 - 1e-15 && v <= 1.0));
    }

    #[test]
    fn shape_mismatches_are_errors() {
        let w = AeWeights::zeros(AeShape::SURFACE);
        assert!(matches!(w.encode(&[0.0; 10]), Err(Error::Shape(_))));
        assert!(w.decode(&[0.0; 19]).is_err());
        let bad = AeWeights::from_layers(TINY, vec![(DMatrix::zeros(2, 3), DVector::zeros(2))]);
        assert!(bad.is_err());
    }

    #[test]
    fn hand_worked_encoder() {
        // 3 -> 2 (ReLU) -> 2 (ReLU) -> 1 (ELU)
        let mut w = AeWeights::zeros(TINY);
        let l = w.layers_mut();
        l[0].weights = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 0.0, -1.0, 0.0]);
        l[0].bias = DVector::from_vec(vec![0.0, 0.1]);
        l[1].weights = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 0.5, -2.0]);
        l[1].bias = DVector::from_vec(vec![-1.0, 0.0]);
        l[2].weights = DMatrix::from_row_slice(1, 2, &[1.0, -1.0]);
        l[2].bias = DVector::from_vec(vec![0.0]);
        // x = (0.4, 0.05, 0.9): h1 = (relu(0.4), relu(0.05)) = (0.4, 0.05)
        // h2 = (relu(0.45 - 1), relu(0.2 - 0.1)) = (0, 0.1)
        // z = elu(0 - 0.1) = e^{-0.1} - 1
        let z = w.encode(&[0.4, 0.05, 0.9]).unwrap();
        assert!((z[0] - ((-0.1f64).exp() - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn batch_matches_rowwise() {
        let w = AeWeights::glorot(AeShape::SURFACE, &mut SeededRng::new(3));
        let mut rng = SeededRng::new(4);
        let x = DMatrix::from_fn(5, 224, |_, _| rng.uniform());
        let z = w.encode_batch(&x).unwrap();
        for i in 0..5 {
            let row: Vec<f64> = x.row(i).iter().copied().collect();
            let zi = w.encode(&row).unwrap();
            for (a, b) in zi.iter().zip(z.row(i).iter()) {
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn loss_terms_isolate() {
        // Zero weights with output bias 0 reconstruct 0.5 everywhere and z = 0.
        let w = AeWeights::zeros(TINY);
        let x = DMatrix::from_element(4, 3, 0.5);
        let parts = w.loss(&x, None, 1.0).unwrap();
        assert_eq!(parts.total(), 0.0);

        // Only the bottleneck bias is nonzero: z = elu(b) for every sample.
        let mut w = AeWeights::zeros(TINY);
        w.layers_mut()[2].bias[0] = 0.3;
        let parts = w.loss(&x, None, 0.01).unwrap();
        assert!((parts.sparsity - 0.01 * 0.3).abs() < 1e-15);
    }

    #[test]
    fn masks_touch_inputs_only() {
        let w = AeWeights::glorot(TINY, &mut SeededRng::new(9));
        let x = DMatrix::from_row_slice(2, 3, &[0.2, 0.4, 0.6, 0.8, 0.1, 0.3]);
        let zero_mask = DMatrix::zeros(2, 3);
        let masked = w.loss(&x, Some(&zero_mask), 0.0).unwrap();
        // Masked-to-zero input behaves like encoding zeros, but the target is x.
        let zeros = DMatrix::zeros(2, 3);
        let recon = w.decode_batch(&w.encode_batch(&zeros).unwrap()).unwrap();
        let expected = (&recon - &x).norm_squared() / 2.0;
        assert!((masked.reconstruction - expected).abs() < 1e-14);
    }

    #[test]
    fn training_is_deterministic_with_monotone_best_curve() {
        let mut rng = SeededRng::new(11);
        let x = DMatrix::from_fn(40, 3, |_, _| rng.uniform());
        let cfg = AeTrainConfig {
            max_epochs: 15,
            validation_rows: 8,
            batch_size: 8,
            ..Default::default()
        };
        let (a, log_a) = train_autoencoder(&x, TINY, &cfg, 42).unwrap();
        let (b, log_b) = train_autoencoder(&x, TINY, &cfg, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(log_a, log_b);
        for pair in log_a.epochs.windows(2) {
            assert!(pair[1].best_validation_mse <= pair[0].best_validation_mse);
        }
        assert_eq!(log_a.fit_rows, 0..32);
        assert_eq!(log_a.validation_rows, 32..40);
    }

    #[test]
    fn too_few_rows_is_an_error() {
        let x = DMatrix::zeros(10, 3);
        let err = train_autoencoder(&x, TINY, &AeTrainConfig::default(), 1).unwrap_err();
        assert!(matches!(err, Error::InsufficientData(_)));
    }
}
