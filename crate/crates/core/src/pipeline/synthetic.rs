//! Synthetic swaption-like surface panels.
//!
//! Five smooth spatial bases on the 14 x 16 tenor-maturity grid (products of
//! triangular hats, i.e. bilinear bumps) are driven by AR(1) factors. On top
//! sit a slow level drift, heteroskedastic noise with a persistent log
//! volatility, and occasional jump days that shock the factors with
//! Laplace-distributed moves. Values are floored at a small positive price.

use nalgebra::DMatrix;

use crate::stochastic::SeededRng;

use super::panel::{SurfacePanel, GRID_MATURITIES, GRID_TENORS, SURFACE_DIM};

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticConfig {
    pub days: usize,
    pub autocorrelation: f64,
    pub jump_probability: f64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            days: 500,
            autocorrelation: 0.98,
            jump_probability: 0.02,
        }
    }
}

/// `(tenor centre, maturity centre, tenor half-width, maturity half-width)`
/// in grid-normalised coordinates.
const BUMPS: [(f64, f64, f64, f64); 5] = [
    (0.5, 0.5, 1.6, 1.6),
    (0.0, 0.5, 1.2, 2.0),
    (0.5, 1.0, 2.0, 1.2),
    (0.5, 0.4, 0.6, 0.6),
    (1.0, 0.0, 0.9, 0.9),
];

/// Loading of each factor onto prices (bp).
const FACTOR_SCALE: [f64; 5] = [40.0, 18.0, 14.0, 9.0, 6.0];
/// Innovation standard deviation of each factor.
const FACTOR_SHOCK: [f64; 5] = [0.20, 0.20, 0.20, 0.20, 0.20];

const FLOOR: f64 = 1.0;

fn hat(x: f64, centre: f64, half_width: f64) -> f64 {
    (1.0 - (x - centre).abs() / half_width).max(0.0)
}

/// Basis surfaces, `5 x 224`, flattened tenor-major.
pub fn spatial_bases() -> DMatrix<f64> {
    DMatrix::from_fn(BUMPS.len(), SURFACE_DIM, |k, idx| {
        let (ct, cm, wt, wm) = BUMPS[k];
        let a = (idx / GRID_MATURITIES) as f64 / (GRID_TENORS - 1) as f64;
        let b = (idx % GRID_MATURITIES) as f64 / (GRID_MATURITIES - 1) as f64;
        hat(a, ct, wt) * hat(b, cm, wm)
    })
}

fn laplace(rng: &mut SeededRng, scale: f64) -> f64 {
    let u = rng.uniform() - 0.5;
    -scale * u.signum() * (1.0 - 2.0 * u.abs()).max(f64::MIN_POSITIVE).ln()
}

/// Surface panel plus the latent factor paths that generated it.
#[derive(Clone, Debug)]
pub struct SyntheticPanel {
    pub panel: SurfacePanel,
    /// `days x 5`.
    pub factors: DMatrix<f64>,
}

pub fn generate(config: &SyntheticConfig, seed: u64) -> SyntheticPanel {
    let mut rng = SeededRng::derived(seed, "synthetic");
    let days = config.days;
    let phi = config.autocorrelation;
    let k = BUMPS.len();
    let bases = spatial_bases();

    // Base shape: level rises with maturity, slight hump in tenor.
    let base: Vec<f64> = (0..SURFACE_DIM)
        .map(|idx| {
            let a = (idx / GRID_MATURITIES) as f64 / (GRID_TENORS - 1) as f64;
            let b = (idx % GRID_MATURITIES) as f64 / (GRID_MATURITIES - 1) as f64;
            120.0 + 160.0 * b.sqrt() + 50.0 * a * (1.0 - 0.5 * a)
        })
        .collect();

    let stationary = (1.0 - phi * phi).max(1e-12).sqrt().recip();
    let mut f: Vec<f64> = (0..k).map(|j| FACTOR_SHOCK[j] * stationary * rng.normal()).collect();
    let mut log_vol = 0.0f64;
    let drift_period = days as f64 * 1.3;

    let mut factors = DMatrix::zeros(days, k);
    let mut values = DMatrix::zeros(days, SURFACE_DIM);
    for t in 0..days {
        let jump = rng.uniform() < config.jump_probability;
        for j in 0..k {
            let mut shock = FACTOR_SHOCK[j] * rng.normal();
            if jump {
                shock += laplace(&mut rng, 3.0 * FACTOR_SHOCK[j]);
            }
            f[j] = phi * f[j] + shock;
            factors[(t, j)] = f[j];
        }
        log_vol = 0.95 * log_vol + 0.25 * rng.normal();
        let noise_sd = 0.8 * log_vol.exp();
        let drift = 25.0 * (std::f64::consts::TAU * t as f64 / drift_period).sin();
        for idx in 0..SURFACE_DIM {
            let mut v = base[idx] + drift;
            for j in 0..k {
                v += FACTOR_SCALE[j] * f[j] * bases[(j, idx)];
            }
            v += noise_sd * rng.normal();
            values[(t, idx)] = v.max(FLOOR);
        }
    }
    let dates = super::panel::business_days(days);
    SyntheticPanel {
        panel: SurfacePanel::new(dates, values).expect("generator produces a valid panel"),
        factors,
    }
}

/// Lag-1 sample autocorrelation (mean removed).
pub fn lag1_autocorrelation(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let num: f64 = x.windows(2).map(|w| (w[0] - mean) * (w[1] - mean)).sum();
    let den: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
    num / den
}
