//! Geometric multipath channel synthesis.
//!
//! Channels are sums of rank-one path contributions over uniform linear
//! arrays. `G` (source to RIS) is `N_I x N_S`, `H` (RIS to destination) is
//! `N_D x N_I`, and the end-to-end cascade is `Q = H * Phi * G` for a
//! diagonal unit-modulus phase matrix `Phi`.

use std::f64::consts::PI;
use std::io::{BufRead, Write};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ris::RisConfig;

/// Dense complex channel matrix (`G`, `H`, `Q`, or a noisy estimate of `Q`).
pub type ChannelMatrix = DMatrix<Complex64>;

/// Element count and normalized spacing `d/lambda` of a uniform linear array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayGeometry {
    pub num_elements: usize,
    pub spacing_over_lambda: f64,
}

impl ArrayGeometry {
    pub fn new(num_elements: usize, spacing_over_lambda: f64) -> Result<Self> {
        if num_elements == 0 {
            return Err(Error::InvalidParameter(
                "num_elements must be at least 1".into(),
            ));
        }
        if !(spacing_over_lambda > 0.0) || !spacing_over_lambda.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "spacing_over_lambda must be a positive real, got {spacing_over_lambda}"
            )));
        }
        Ok(Self {
            num_elements,
            spacing_over_lambda,
        })
    }

    /// Half-wavelength spacing, the usual setup.
    pub fn half_wavelength(num_elements: usize) -> Result<Self> {
        Self::new(num_elements, 0.5)
    }
}

/// Array response (steering) vector: entry `n` (1-based) is
/// `exp(j 2 pi (d/lambda) (n-1) sin(angle))`.
pub fn array_response(angle: f64, geometry: &ArrayGeometry) -> DVector<Complex64> {
    let c = 2.0 * PI * geometry.spacing_over_lambda * angle.sin();
    DVector::from_fn(geometry.num_elements, |n, _| {
        Complex64::from_polar(1.0, c * n as f64)
    })
}

/// Per-channel list of (complex gain, departure angle, arrival angle) triples.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSet {
    gains: Vec<Complex64>,
    departure_angles: Vec<f64>,
    arrival_angles: Vec<f64>,
}

impl PathSet {
    pub fn new(
        gains: Vec<Complex64>,
        departure_angles: Vec<f64>,
        arrival_angles: Vec<f64>,
    ) -> Result<Self> {
        if gains.is_empty() {
            return Err(Error::Empty("PathSet needs at least one path"));
        }
        if gains.len() != departure_angles.len() || gains.len() != arrival_angles.len() {
            return Err(Error::InvalidParameter(format!(
                "path list lengths differ: {} gains, {} departure, {} arrival",
                gains.len(),
                departure_angles.len(),
                arrival_angles.len()
            )));
        }
        for (&d, &a) in departure_angles.iter().zip(&arrival_angles) {
            if !d.is_finite() || !a.is_finite() {
                return Err(Error::NonFinite("path angles"));
            }
        }
        if gains.iter().any(|g| !g.re.is_finite() || !g.im.is_finite()) {
            return Err(Error::NonFinite("path gains"));
        }
        Ok(Self {
            gains,
            departure_angles,
            arrival_angles,
        })
    }

    pub fn len(&self) -> usize {
        self.gains.len()
    }

    pub fn is_empty(&self) -> bool {
        false // at least one path by construction
    }

    pub fn gains(&self) -> &[Complex64] {
        &self.gains
    }

    pub fn departure_angles(&self) -> &[f64] {
        &self.departure_angles
    }

    pub fn arrival_angles(&self) -> &[f64] {
        &self.arrival_angles
    }

    /// Writes rows `l,re,im,theta,eta` (1-based path index, gain, departure,
    /// arrival), with a header line.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "l,re,im,theta,eta")?;
        for l in 0..self.len() {
            writeln!(
                w,
                "{},{},{},{},{}",
                l + 1,
                self.gains[l].re,
                self.gains[l].im,
                self.departure_angles[l],
                self.arrival_angles[l]
            )?;
        }
        Ok(())
    }

    /// Reads the format produced by [`PathSet::write_csv`].
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut gains = Vec::new();
        let mut departures = Vec::new();
        let mut arrivals = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line.starts_with('l')) {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 5 {
                return Err(Error::Parse(format!(
                    "path CSV line {}: expected 5 fields, found {}",
                    lineno + 1,
                    fields.len()
                )));
            }
            let parse = |s: &str| -> Result<f64> {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("path CSV line {}: {e}", lineno + 1)))
            };
            gains.push(Complex64::new(parse(fields[1])?, parse(fields[2])?));
            departures.push(parse(fields[3])?);
            arrivals.push(parse(fields[4])?);
        }
        Self::new(gains, departures, arrivals)
    }
}

/// `sum_l gain_l * a_rx(arrival_l) * a_tx(departure_l)^H`, size
/// `rx.num_elements x tx.num_elements`.
pub fn synthesize_channel(
    paths: &PathSet,
    rx_geometry: &ArrayGeometry,
    tx_geometry: &ArrayGeometry,
) -> ChannelMatrix {
    let mut m = DMatrix::zeros(rx_geometry.num_elements, tx_geometry.num_elements);
    for l in 0..paths.len() {
        let ar = array_response(paths.arrival_angles[l], rx_geometry);
        let at = array_response(paths.departure_angles[l], tx_geometry);
        m += (ar * at.adjoint()) * paths.gains[l];
    }
    m
}

fn default_theta_g_range() -> (f64, f64) {
    (-PI, PI)
}
fn default_half_range() -> (f64, f64) {
    (-PI / 2.0, PI / 2.0)
}
fn default_eta_h_range() -> (f64, f64) {
    (-PI / 3.0, PI / 3.0)
}

/// Random-channel sampler parameters: array geometries, path counts, per-role
/// angle ranges (radians), and per-path gain power profiles (must sum to 1).
///
/// Empty power profiles mean equal power `1/L` per path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelScenario {
    pub source: ArrayGeometry,
    pub ris: ArrayGeometry,
    pub destination: ArrayGeometry,
    pub num_paths_g: usize,
    pub num_paths_h: usize,
    #[serde(default = "default_theta_g_range")]
    pub theta_g_range: (f64, f64),
    #[serde(default = "default_half_range")]
    pub eta_g_range: (f64, f64),
    #[serde(default = "default_half_range")]
    pub theta_h_range: (f64, f64),
    #[serde(default = "default_eta_h_range")]
    pub eta_h_range: (f64, f64),
    #[serde(default)]
    pub power_profile_g: Vec<f64>,
    #[serde(default)]
    pub power_profile_h: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
}

impl ChannelScenario {
    pub fn new(
        source: ArrayGeometry,
        ris: ArrayGeometry,
        destination: ArrayGeometry,
        num_paths_g: usize,
        num_paths_h: usize,
    ) -> Result<Self> {
        let s = Self {
            source,
            ris,
            destination,
            num_paths_g,
            num_paths_h,
            theta_g_range: default_theta_g_range(),
            eta_g_range: default_half_range(),
            theta_h_range: default_half_range(),
            eta_h_range: default_eta_h_range(),
            power_profile_g: Vec::new(),
            power_profile_h: Vec::new(),
            seed: 0,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_paths_g == 0 || self.num_paths_h == 0 {
            return Err(Error::InvalidParameter(
                "path counts must be positive".into(),
            ));
        }
        for (name, range) in [
            ("theta_g_range", self.theta_g_range),
            ("eta_g_range", self.eta_g_range),
            ("theta_h_range", self.theta_h_range),
            ("eta_h_range", self.eta_h_range),
        ] {
            if !(range.0.is_finite() && range.1.is_finite() && range.0 < range.1) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be a finite nonempty interval, got {range:?}"
                )));
            }
        }
        for (name, profile, len) in [
            ("power_profile_g", &self.power_profile_g, self.num_paths_g),
            ("power_profile_h", &self.power_profile_h, self.num_paths_h),
        ] {
            if profile.is_empty() {
                continue;
            }
            if profile.len() != len {
                return Err(Error::InvalidParameter(format!(
                    "{name} has {} entries, expected {len}",
                    profile.len()
                )));
            }
            if profile.iter().any(|&p| !(p > 0.0)) {
                return Err(Error::InvalidParameter(format!(
                    "{name} entries must be positive"
                )));
            }
            let sum: f64 = profile.iter().sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must sum to 1, got {sum}"
                )));
            }
        }
        Ok(())
    }

    fn profile(&self, for_g: bool) -> Vec<f64> {
        let (profile, len) = if for_g {
            (&self.power_profile_g, self.num_paths_g)
        } else {
            (&self.power_profile_h, self.num_paths_h)
        };
        if profile.is_empty() {
            vec![1.0 / len as f64; len]
        } else {
            profile.clone()
        }
    }

    /// TOML round-trip helpers; the schema is the struct field names.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let s: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }
}

/// Draws one `(G, H)` path-set realization. Angles are uniform within the
/// per-role ranges, gains are circularly-symmetric complex Gaussian with
/// per-path variance from the power profile. The draw order is fixed
/// (G paths first, then H; per path: departure, arrival, Re gain, Im gain)
/// so a given stream always produces the same realization.
pub fn sample_channel_pair<R: Rng>(
    scenario: &ChannelScenario,
    rng: &mut R,
) -> Result<(PathSet, PathSet)> {
    scenario.validate()?;
    let draw = |rng: &mut R,
                count: usize,
                dep: (f64, f64),
                arr: (f64, f64),
                profile: &[f64]|
     -> Result<PathSet> {
        let std_normal = Normal::new(0.0, 1.0).expect("unit normal");
        let mut gains = Vec::with_capacity(count);
        let mut departures = Vec::with_capacity(count);
        let mut arrivals = Vec::with_capacity(count);
        for l in 0..count {
            departures.push(dep.0 + (dep.1 - dep.0) * rng.gen::<f64>());
            arrivals.push(arr.0 + (arr.1 - arr.0) * rng.gen::<f64>());
            let s = (profile[l] / 2.0).sqrt();
            gains.push(Complex64::new(
                s * std_normal.sample(rng),
                s * std_normal.sample(rng),
            ));
        }
        PathSet::new(gains, departures, arrivals)
    };
    let g = draw(
        rng,
        scenario.num_paths_g,
        scenario.theta_g_range,
        scenario.eta_g_range,
        &scenario.profile(true),
    )?;
    let h = draw(
        rng,
        scenario.num_paths_h,
        scenario.theta_h_range,
        scenario.eta_h_range,
        &scenario.profile(false),
    )?;
    Ok((g, h))
}

/// `Q = H * Phi * G` with `Phi = diag(exp(j phi_k))` from `config`.
pub fn compose_cascade(
    h: &ChannelMatrix,
    config: &RisConfig,
    g: &ChannelMatrix,
) -> Result<ChannelMatrix> {
    let n_i = config.len();
    if h.ncols() != n_i {
        return Err(Error::DimensionMismatch {
            context: "compose_cascade (H columns vs RIS size)",
            expected: (h.nrows(), n_i),
            found: (h.nrows(), h.ncols()),
        });
    }
    if g.nrows() != n_i {
        return Err(Error::DimensionMismatch {
            context: "compose_cascade (G rows vs RIS size)",
            expected: (n_i, g.ncols()),
            found: (g.nrows(), g.ncols()),
        });
    }
    let mut scaled = g.clone();
    for (k, &phase) in config.phases().iter().enumerate() {
        let f = Complex64::from_polar(1.0, phase);
        for v in scaled.row_mut(k).iter_mut() {
            *v *= f;
        }
    }
    Ok(h * scaled)
}

/// Precomputed per-element rank-one cascade terms `C_k = h_k g_k^T`, so that
/// `Q(config) = sum_k exp(j phi_k) C_k`. Used by the search loops, which
/// evaluate many configurations against the same `(H, G)` pair.
pub struct CascadeEvaluator {
    n_d: usize,
    n_s: usize,
    n_i: usize,
    /// k-major layout, column-major within each `N_D x N_S` block.
    terms: Vec<Complex64>,
}

impl CascadeEvaluator {
    pub fn new(h: &ChannelMatrix, g: &ChannelMatrix) -> Result<Self> {
        if h.ncols() != g.nrows() {
            return Err(Error::DimensionMismatch {
                context: "CascadeEvaluator (H columns vs G rows)",
                expected: (h.ncols(), h.ncols()),
                found: (h.ncols(), g.nrows()),
            });
        }
        let (n_d, n_i, n_s) = (h.nrows(), h.ncols(), g.ncols());
        let mut terms = Vec::with_capacity(n_i * n_d * n_s);
        for k in 0..n_i {
            for s in 0..n_s {
                for d in 0..n_d {
                    terms.push(h[(d, k)] * g[(k, s)]);
                }
            }
        }
        Ok(Self {
            n_d,
            n_s,
            n_i,
            terms,
        })
    }

    pub fn dims(&self) -> (usize, usize, usize) {
        (self.n_d, self.n_i, self.n_s)
    }

    /// Cascade `Q` for an arbitrary configuration.
    pub fn compose(&self, config: &RisConfig) -> Result<ChannelMatrix> {
        if config.len() != self.n_i {
            return Err(Error::DimensionMismatch {
                context: "CascadeEvaluator::compose",
                expected: (self.n_i, 1),
                found: (config.len(), 1),
            });
        }
        let block = self.n_d * self.n_s;
        let mut q = vec![Complex64::new(0.0, 0.0); block];
        for (k, &phase) in config.phases().iter().enumerate() {
            let f = Complex64::from_polar(1.0, phase);
            let terms = &self.terms[k * block..(k + 1) * block];
            for (acc, &t) in q.iter_mut().zip(terms) {
                *acc += f * t;
            }
        }
        Ok(DMatrix::from_vec(self.n_d, self.n_s, q))
    }

    pub(crate) fn block_terms(&self, k: usize) -> &[Complex64] {
        let block = self.n_d * self.n_s;
        &self.terms[k * block..(k + 1) * block]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ris::{config_from_angles, AnglePair, RisConfig};
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn geom(n: usize) -> ArrayGeometry {
        ArrayGeometry::half_wavelength(n).unwrap()
    }

    #[test]
    fn array_response_boresight_is_all_ones() {
        let v = array_response(0.0, &geom(4));
        for e in v.iter() {
            assert_relative_eq!(e.re, 1.0, epsilon = 1e-15);
            assert_relative_eq!(e.im, 0.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn array_response_single_element_is_one() {
        let v = array_response(1.234, &geom(1));
        assert_eq!(v.len(), 1);
        assert_relative_eq!(v[0].re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn array_response_endfire_two_elements() {
        // angle pi/2, d/lambda 0.5, N 2 -> [1, exp(j pi)] = [1, -1]
        let v = array_response(PI / 2.0, &geom(2));
        assert_relative_eq!(v[1].re, -1.0, epsilon = 1e-12);
        assert_relative_eq!(v[1].im, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn array_response_unit_modulus() {
        let g = ArrayGeometry::new(17, 0.37).unwrap();
        for &angle in &[-1.2, -0.3, 0.0, 0.7, 1.5] {
            for e in array_response(angle, &g).iter() {
                assert_relative_eq!(e.norm(), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn synthesize_single_boresight_path_is_all_ones() {
        let p = PathSet::new(vec![Complex64::new(1.0, 0.0)], vec![0.0], vec![0.0]).unwrap();
        let m = synthesize_channel(&p, &geom(2), &geom(2));
        for e in m.iter() {
            assert_relative_eq!(e.re, 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn synthesize_single_path_rank_and_norm() {
        let gain = Complex64::new(0.4, -1.1);
        let p = PathSet::new(vec![gain], vec![0.3], vec![-0.8]).unwrap();
        let m = synthesize_channel(&p, &geom(5), &geom(3));
        assert_relative_eq!(m.norm(), gain.norm() * (15.0f64).sqrt(), epsilon = 1e-12);
        let sv = m.clone().svd(false, false).singular_values;
        assert!(sv[1] < 1e-10 * sv[0]);
    }

    #[test]
    fn sum_form_matches_matrix_product_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let scenario = ChannelScenario::new(geom(3), geom(8), geom(4), 2, 2).unwrap();
        let (pg, _) = sample_channel_pair(&scenario, &mut rng).unwrap();
        let sum = synthesize_channel(&pg, &geom(8), &geom(3));
        // A(eta) diag(rho) A(theta)^H
        let mut a_arr = DMatrix::zeros(8, pg.len());
        let mut a_dep = DMatrix::zeros(3, pg.len());
        for l in 0..pg.len() {
            a_arr.set_column(l, &array_response(pg.arrival_angles()[l], &geom(8)));
            a_dep.set_column(l, &array_response(pg.departure_angles()[l], &geom(3)));
        }
        let d = DMatrix::from_diagonal(&DVector::from_vec(pg.gains().to_vec()));
        let prod = a_arr * d * a_dep.adjoint();
        assert!((sum - prod).norm() < 1e-12);
    }

    #[test]
    fn sampling_is_deterministic_given_seed() {
        let scenario = ChannelScenario::new(geom(2), geom(6), geom(4), 3, 3).unwrap();
        let a = sample_channel_pair(&scenario, &mut ChaCha8Rng::seed_from_u64(42)).unwrap();
        let b = sample_channel_pair(&scenario, &mut ChaCha8Rng::seed_from_u64(42)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sampled_gain_power_matches_profile() {
        let scenario = ChannelScenario::new(geom(2), geom(4), geom(4), 4, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 10_000;
        let mut acc = vec![0.0; 4];
        for _ in 0..n {
            let (pg, _) = sample_channel_pair(&scenario, &mut rng).unwrap();
            for (a, g) in acc.iter_mut().zip(pg.gains()) {
                *a += g.norm_sqr();
            }
        }
        for a in acc {
            let mean = a / n as f64;
            assert!((mean - 0.25).abs() < 0.25 * 0.05, "mean power {mean}");
        }
    }

    #[test]
    fn sampled_angles_respect_ranges() {
        let scenario = ChannelScenario::new(geom(2), geom(4), geom(4), 3, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let (pg, ph) = sample_channel_pair(&scenario, &mut rng).unwrap();
            for &eta in pg.arrival_angles() {
                assert!((-PI / 2.0..=PI / 2.0).contains(&eta));
            }
            for &eta in ph.arrival_angles() {
                assert!((-PI / 3.0..=PI / 3.0).contains(&eta));
            }
            for &theta in ph.departure_angles() {
                assert!((-PI / 2.0..=PI / 2.0).contains(&theta));
            }
        }
    }

    #[test]
    fn cascade_identity_phases_is_plain_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let scenario = ChannelScenario::new(geom(2), geom(6), geom(3), 2, 2).unwrap();
        let (pg, ph) = sample_channel_pair(&scenario, &mut rng).unwrap();
        let g = synthesize_channel(&pg, &geom(6), &geom(2));
        let h = synthesize_channel(&ph, &geom(3), &geom(6));
        let q = compose_cascade(&h, &RisConfig::neutral(6), &g).unwrap();
        assert!((q - &h * &g).norm() < 1e-12);
    }

    #[test]
    fn cascade_scalar_case() {
        let h = DMatrix::from_element(1, 1, Complex64::new(0.5, 0.2));
        let g = DMatrix::from_element(1, 1, Complex64::new(-1.0, 0.3));
        let mut cfg = RisConfig::neutral(1);
        cfg.set_phase(0, 0.7);
        let q = compose_cascade(&h, &cfg, &g).unwrap();
        let expect = h[(0, 0)] * Complex64::from_polar(1.0, 0.7) * g[(0, 0)];
        assert!((q[(0, 0)] - expect).norm() < 1e-15);
    }

    #[test]
    fn cascade_rejects_dimension_mismatch() {
        let h = DMatrix::from_element(2, 3, Complex64::new(1.0, 0.0));
        let g = DMatrix::from_element(4, 2, Complex64::new(1.0, 0.0));
        assert!(compose_cascade(&h, &RisConfig::neutral(3), &g).is_err());
    }

    #[test]
    fn cascade_frobenius_norm_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        let scenario = ChannelScenario::new(geom(2), geom(5), geom(3), 2, 2).unwrap();
        for _ in 0..100 {
            let (pg, ph) = sample_channel_pair(&scenario, &mut rng).unwrap();
            let g = synthesize_channel(&pg, &geom(5), &geom(2));
            let h = synthesize_channel(&ph, &geom(3), &geom(5));
            let mut cfg = RisConfig::neutral(5);
            for k in 0..5 {
                cfg.set_phase(k, rng.gen::<f64>() * 2.0 * PI);
            }
            let q = compose_cascade(&h, &cfg, &g).unwrap();
            assert!(q.norm() <= h.norm() * g.norm() * (1.0 + 1e-12));
        }
    }

    #[test]
    fn evaluator_matches_compose_cascade() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let scenario = ChannelScenario::new(geom(2), geom(7), geom(4), 3, 2).unwrap();
        let (pg, ph) = sample_channel_pair(&scenario, &mut rng).unwrap();
        let g = synthesize_channel(&pg, &geom(7), &geom(2));
        let h = synthesize_channel(&ph, &geom(4), &geom(7));
        let eval = CascadeEvaluator::new(&h, &g).unwrap();
        let pair = AnglePair::new(0.3, -0.6).unwrap();
        let cfg = config_from_angles(&pair, &geom(7));
        let a = eval.compose(&cfg).unwrap();
        let b = compose_cascade(&h, &cfg, &g).unwrap();
        assert!((a - b).norm() < 1e-10);
    }

    #[test]
    fn linearity_in_gains() {
        let p = PathSet::new(
            vec![Complex64::new(0.2, 0.5), Complex64::new(-0.4, 0.1)],
            vec![0.3, -0.2],
            vec![0.1, 0.9],
        )
        .unwrap();
        let c = Complex64::new(2.0, -3.0);
        let scaled = PathSet::new(
            p.gains().iter().map(|g| g * c).collect(),
            p.departure_angles().to_vec(),
            p.arrival_angles().to_vec(),
        )
        .unwrap();
        let m1 = synthesize_channel(&p, &geom(4), &geom(3)) * c;
        let m2 = synthesize_channel(&scaled, &geom(4), &geom(3));
        assert!((&m1 - &m2).norm() <= 1e-12 * m1.norm());
    }

    #[test]
    fn pathset_csv_round_trip() {
        let p = PathSet::new(
            vec![Complex64::new(0.25, -0.125), Complex64::new(1.5, 2.0)],
            vec![0.5, -0.25],
            vec![0.125, 1.0],
        )
        .unwrap();
        let mut buf = Vec::new();
        p.write_csv(&mut buf).unwrap();
        let q = PathSet::read_csv(&buf[..]).unwrap();
        assert_eq!(p, q);
    }

    #[test]
    fn scenario_toml_round_trip() {
        let s = ChannelScenario::new(geom(2), geom(120), geom(4), 3, 3).unwrap();
        let text = s.to_toml().unwrap();
        let t = ChannelScenario::from_toml(&text).unwrap();
        assert_eq!(s, t);
    }
}
