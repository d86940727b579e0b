//! Achievable rate and noisy channel estimation.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::channel::ChannelMatrix;
use crate::error::{Error, Result};

/// Noise powers and the number `K` of averaged channel estimates per
/// sounded configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Receiver noise power in the rate expression.
    pub sigma_sq: f64,
    /// Per-entry variance of a single channel-estimate perturbation.
    pub est_noise_sigma_sq: f64,
    /// Number of estimates averaged per configuration.
    pub estimates_per_config: usize,
}

impl NoiseModel {
    pub fn new(sigma_sq: f64, est_noise_sigma_sq: f64, estimates_per_config: usize) -> Result<Self> {
        let m = Self {
            sigma_sq,
            est_noise_sigma_sq,
            estimates_per_config,
        };
        m.validate()?;
        Ok(m)
    }

    /// Noiseless estimation (true rates), useful as an idealized reference.
    pub fn noiseless(sigma_sq: f64) -> Result<Self> {
        Self::new(sigma_sq, 0.0, 1)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_sq > 0.0) || !self.sigma_sq.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "sigma_sq must be positive, got {}",
                self.sigma_sq
            )));
        }
        if !(self.est_noise_sigma_sq >= 0.0) || !self.est_noise_sigma_sq.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "est_noise_sigma_sq must be nonnegative, got {}",
                self.est_noise_sigma_sq
            )));
        }
        if self.estimates_per_config == 0 {
            return Err(Error::InvalidParameter(
                "estimates_per_config must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// `log2 det(I + Q^H Q / sigma^2)` in bits/s/Hz, computed on the Gram matrix
/// of the smaller side via a Cholesky factorization.
pub fn achievable_rate(q: &ChannelMatrix, sigma_sq: f64) -> Result<f64> {
    if !(sigma_sq > 0.0) || !sigma_sq.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "sigma_sq must be positive, got {sigma_sq}"
        )));
    }
    if q.iter().any(|e| !e.re.is_finite() || !e.im.is_finite()) {
        return Err(Error::NonFinite("channel matrix"));
    }
    // det(I + Q^H Q / s) = det(I + Q Q^H / s); use the smaller Gram.
    let gram = if q.ncols() <= q.nrows() {
        q.adjoint() * q
    } else {
        q * q.adjoint()
    };
    let n = gram.nrows();
    let inv_sigma = Complex64::new(1.0 / sigma_sq, 0.0);
    let mut a = gram * inv_sigma;
    for i in 0..n {
        a[(i, i)] += Complex64::new(1.0, 0.0);
    }
    if let Some(chol) = a.clone().cholesky() {
        let mut rate = 0.0;
        for i in 0..n {
            rate += 2.0 * chol.l_dirty()[(i, i)].re.log2();
        }
        return Ok(rate.max(0.0));
    }
    // Hermitian PD up to rounding; fall back to an eigendecomposition.
    let eig = nalgebra::SymmetricEigen::new(a);
    let rate: f64 = eig
        .eigenvalues
        .iter()
        .map(|&ev| ev.max(1.0).log2())
        .sum();
    Ok(rate)
}

/// `Q_hat = Q + mean of K i.i.d. circularly-symmetric complex Gaussian
/// perturbation matrices` with per-entry variance `est_noise_sigma_sq`, so
/// the averaged perturbation has per-entry variance `est_noise_sigma_sq / K`.
///
/// With `est_noise_sigma_sq == 0` the input is returned unchanged and the
/// stream is not consumed.
pub fn estimate_cascade<R: Rng>(
    q_true: &ChannelMatrix,
    model: &NoiseModel,
    rng: &mut R,
) -> ChannelMatrix {
    if model.est_noise_sigma_sq == 0.0 {
        return q_true.clone();
    }
    let std = (model.est_noise_sigma_sq / 2.0).sqrt();
    let normal = Normal::new(0.0, std).expect("finite std");
    let k = model.estimates_per_config as f64;
    let mut acc = DMatrix::zeros(q_true.nrows(), q_true.ncols());
    for _ in 0..model.estimates_per_config {
        for e in acc.iter_mut() {
            *e += Complex64::new(normal.sample(rng), normal.sample(rng));
        }
    }
    q_true + acc / Complex64::new(k, 0.0)
}
