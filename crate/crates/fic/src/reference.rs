//! Baseline single-shot search and the exhaustive-search rate oracle.
//!
//! The oracle searches the same per-sub-block angle-pair parameterization as
//! the iterative search, but with a dense noiseless grid plus local
//! refinement passes, and serves as the `C_opt` reference for the normalized
//! rate-loss metric. Oracle results can be cached on disk keyed by channel
//! content.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channel::{ArrayGeometry, CascadeEvaluator, ChannelMatrix};
use crate::error::{Error, Result};
use crate::fic::{run_multipath, FicResult, GridSchedule};
use crate::rate::{achievable_rate, NoiseModel};
use crate::ris::{config_from_angles, freeze_block, overlay_configs, AnglePair, RisConfig};

/// Dense-grid oracle parameters. `angle_resolution` is the number of grid
/// points per axis (a power of two, at least 32, so coarser grids nest into
/// finer ones); each refinement pass shrinks the search window tenfold
/// around the running best point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleSpec {
    pub angle_resolution: usize,
    pub refine_rounds: usize,
}

impl Default for OracleSpec {
    fn default() -> Self {
        Self {
            angle_resolution: 256,
            refine_rounds: 3,
        }
    }
}

impl OracleSpec {
    pub fn validate(&self) -> Result<()> {
        if self.angle_resolution < 32 || !self.angle_resolution.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "angle_resolution must be a power of two >= 32, got {}",
                self.angle_resolution
            )));
        }
        Ok(())
    }
}

/// Baseline scheme: the first-iteration grid evaluated once (`I = 1`),
/// with the same `M`-step freezing procedure as the iterative search so
/// multipath comparisons are like-for-like.
pub fn run_bas<R: Rng>(
    h: &ChannelMatrix,
    g: &ChannelMatrix,
    ris: &ArrayGeometry,
    l1: usize,
    num_blocks: usize,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<FicResult> {
    let schedule = GridSchedule::new(vec![l1], 1)?;
    run_multipath(h, g, ris, num_blocks, &schedule, noise, rng)
}

/// One normalized rate-loss sample `(c_opt - c_hat) / c_opt`. Negative
/// samples (the search beating the surrogate oracle) are returned as-is;
/// callers flag them.
pub fn rate_loss(c_opt: f64, c_hat: f64) -> Result<f64> {
    if !(c_opt > 0.0) || !c_opt.is_finite() {
        return Err(Error::NonPositiveReferenceRate(c_opt));
    }
    Ok((c_opt - c_hat) / c_opt)
}

/// Fast per-step rate evaluation against a partially frozen configuration:
/// `Q(omega) = Q_frozen + sum_{k unfrozen} exp(j omega k) C_k`.
struct StepEvaluator<'a> {
    eval: &'a CascadeEvaluator,
    spacing_factor: f64,
    fixed: Vec<Complex64>,
    frozen: Vec<bool>,
}

impl<'a> StepEvaluator<'a> {
    fn new(eval: &'a CascadeEvaluator, ris: &ArrayGeometry, base: &RisConfig) -> Self {
        let (n_d, _, n_s) = eval.dims();
        let mut fixed = vec![Complex64::new(0.0, 0.0); n_d * n_s];
        for (k, (&frozen, &phase)) in base
            .frozen_mask()
            .iter()
            .zip(base.phases())
            .enumerate()
        {
            if frozen {
                let f = Complex64::from_polar(1.0, phase);
                for (acc, &t) in fixed.iter_mut().zip(eval.block_terms(k)) {
                    *acc += f * t;
                }
            }
        }
        Self {
            eval,
            spacing_factor: 2.0 * PI * ris.spacing_over_lambda,
            fixed,
            frozen: base.frozen_mask().to_vec(),
        }
    }

    /// Noiseless achievable rate at the given angle couple, writing new
    /// phases only to the unfrozen elements.
    fn true_rate(&self, theta: f64, eta: f64, sigma_sq: f64, scratch: &mut [Complex64]) -> f64 {
        let omega = self.spacing_factor * (theta.sin() - eta.sin());
        scratch.copy_from_slice(&self.fixed);
        let (n_d, n_i, n_s) = self.eval.dims();
        let rot = Complex64::from_polar(1.0, omega);
        let mut factor = Complex64::new(1.0, 0.0);
        for k in 0..n_i {
            if !self.frozen[k] {
                let terms = self.eval.block_terms(k);
                for (acc, &t) in scratch.iter_mut().zip(terms) {
                    *acc += factor * t;
                }
            }
            factor *= rot;
        }
        gram_rate(scratch, n_d, n_s, sigma_sq)
    }
}

/// `log2 det(I + Q^H Q / sigma^2)` for a column-major `n_d x n_s` buffer,
/// with closed forms for the 1- and 2-column cases.
fn gram_rate(q: &[Complex64], n_d: usize, n_s: usize, sigma_sq: f64) -> f64 {
    match n_s {
        1 => {
            let g11: f64 = q.iter().map(|e| e.norm_sqr()).sum();
            (1.0 + g11 / sigma_sq).log2()
        }
        2 => {
            let (c1, c2) = q.split_at(n_d);
            let mut g11 = 0.0;
            let mut g22 = 0.0;
            let mut g12 = Complex64::new(0.0, 0.0);
            for d in 0..n_d {
                g11 += c1[d].norm_sqr();
                g22 += c2[d].norm_sqr();
                g12 += c1[d].conj() * c2[d];
            }
            let a = 1.0 + g11 / sigma_sq;
            let b = 1.0 + g22 / sigma_sq;
            let det = a * b - g12.norm_sqr() / (sigma_sq * sigma_sq);
            det.max(1.0).log2()
        }
        _ => {
            let m = nalgebra::DMatrix::from_column_slice(n_d, n_s, q);
            achievable_rate(&m, sigma_sq).unwrap_or(0.0)
        }
    }
}

fn grid_axis(center: f64, width: f64, resolution: usize) -> Vec<f64> {
    let half = PI / 2.0;
    (0..resolution)
        .map(|i| (center + width * (i as f64 / resolution as f64 - 0.5)).clamp(-half, half))
        .collect()
}

/// Best true rate over the same `M`-step angle-pair parameterization as the
/// iterative search, found by a dense noiseless grid per step plus local
/// refinements. Returns the rate and the configuration achieving it.
pub fn oracle_optimal_rate(
    h: &ChannelMatrix,
    g: &ChannelMatrix,
    ris: &ArrayGeometry,
    num_blocks: usize,
    sigma_sq: f64,
    spec: &OracleSpec,
) -> Result<(f64, RisConfig)> {
    spec.validate()?;
    if num_blocks == 0 || ris.num_elements % num_blocks != 0 {
        return Err(Error::InvalidParameter(format!(
            "num_blocks {} must divide N_I {}",
            num_blocks, ris.num_elements
        )));
    }
    let eval = CascadeEvaluator::new(h, g)?;
    let (n_d, _, n_s) = eval.dims();
    let mut scratch = vec![Complex64::new(0.0, 0.0); n_d * n_s];
    let mut base = RisConfig::neutral(ris.num_elements);
    let mut best_rate = f64::NEG_INFINITY;
    let mut best_config = base.clone();
    for step in 1..=num_blocks {
        let se = StepEvaluator::new(&eval, ris, &base);
        let r = spec.angle_resolution;
        let mut step_best = (f64::NEG_INFINITY, 0.0f64, 0.0f64);
        let mut search = |thetas: &[f64], etas: &[f64], step_best: &mut (f64, f64, f64)| {
            for &theta in thetas {
                for &eta in etas {
                    let rate = se.true_rate(theta, eta, sigma_sq, &mut scratch);
                    if rate > step_best.0 {
                        *step_best = (rate, theta, eta);
                    }
                }
            }
        };
        // full-range pass, then shrinking local passes around the running best
        let axis = grid_axis(0.0, PI, r);
        search(&axis, &axis, &mut step_best);
        let mut width = PI;
        for _ in 0..spec.refine_rounds {
            width /= 10.0;
            let thetas = grid_axis(step_best.1, width, r);
            let etas = grid_axis(step_best.2, width, r);
            search(&thetas, &etas, &mut step_best);
        }
        let pair = AnglePair::clamped(step_best.1, step_best.2);
        let cfg = overlay_configs(&base, &config_from_angles(&pair, ris))?;
        let canonical = achievable_rate(&eval.compose(&cfg)?, sigma_sq)?;
        if canonical > best_rate {
            best_rate = canonical;
            best_config = cfg.clone();
        }
        base = freeze_block(&cfg, step, num_blocks)?;
    }
    Ok((best_rate, best_config))
}

/// Disk cache for oracle results, keyed by the channel content, the RIS
/// geometry, the block count, the noise power, and the oracle parameters.
///
/// File format (versioned, one result per file):
/// ```text
/// ficcache v1
/// c_opt=<decimal f64>
/// phases=<comma-separated decimal f64>
/// blocks=<comma-separated usize>
/// frozen=<comma-separated 0/1>
/// ```
pub struct OracleCache {
    dir: PathBuf,
}

pub const CACHE_DIR_ENV: &str = "FIC_CACHE_DIR";
const CACHE_VERSION: &str = "ficcache v1";

impl OracleCache {
    /// `FIC_CACHE_DIR` wins over the explicit directory; with neither, a
    /// `fic-oracle-cache` directory under the system temp dir is used.
    pub fn resolve(explicit: Option<&Path>) -> PathBuf {
        if let Ok(dir) = std::env::var(CACHE_DIR_ENV) {
            if !dir.is_empty() {
                return PathBuf::from(dir);
            }
        }
        explicit
            .map(Path::to_path_buf)
            .unwrap_or_else(|| std::env::temp_dir().join("fic-oracle-cache"))
    }

    pub fn new(dir: PathBuf) -> Result<Self> {
        std::fs::create_dir_all(&dir)?;
        Ok(Self { dir })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn key(
        h: &ChannelMatrix,
        g: &ChannelMatrix,
        ris: &ArrayGeometry,
        num_blocks: usize,
        sigma_sq: f64,
        spec: &OracleSpec,
    ) -> String {
        let mut hasher = Sha256::new();
        hasher.update(CACHE_VERSION.as_bytes());
        hasher.update(ris.num_elements.to_le_bytes());
        hasher.update(ris.spacing_over_lambda.to_le_bytes());
        hasher.update(num_blocks.to_le_bytes());
        hasher.update(sigma_sq.to_le_bytes());
        hasher.update(spec.angle_resolution.to_le_bytes());
        hasher.update(spec.refine_rounds.to_le_bytes());
        for m in [h, g] {
            hasher.update(m.nrows().to_le_bytes());
            hasher.update(m.ncols().to_le_bytes());
            for e in m.iter() {
                hasher.update(e.re.to_le_bytes());
                hasher.update(e.im.to_le_bytes());
            }
        }
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Returns the cached oracle result for this channel, computing and
    /// storing it on a miss.
    pub fn get_or_compute(
        &self,
        h: &ChannelMatrix,
        g: &ChannelMatrix,
        ris: &ArrayGeometry,
        num_blocks: usize,
        sigma_sq: f64,
        spec: &OracleSpec,
    ) -> Result<(f64, RisConfig)> {
        let key = Self::key(h, g, ris, num_blocks, sigma_sq, spec);
        let path = self.dir.join(format!("{key}.txt"));
        if path.exists() {
            if let Ok(parsed) = Self::parse(&std::fs::read_to_string(&path)?) {
                return Ok(parsed);
            }
            // corrupt or stale entry; recompute below
        }
        let (c_opt, config) = oracle_optimal_rate(h, g, ris, num_blocks, sigma_sq, spec)?;
        let tmp = self.dir.join(format!("{key}.tmp"));
        std::fs::write(&tmp, Self::render(c_opt, &config))?;
        std::fs::rename(&tmp, &path)?;
        Ok((c_opt, config))
    }

    fn render(c_opt: f64, config: &RisConfig) -> String {
        let join_f = |v: &[f64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let blocks = config
            .block_assignment()
            .iter()
            .map(|b| b.to_string())
            .collect::<Vec<_>>()
            .join(",");
        let frozen = config
            .frozen_mask()
            .iter()
            .map(|&f| if f { "1" } else { "0" })
            .collect::<Vec<_>>()
            .join(",");
        format!(
            "{CACHE_VERSION}\nc_opt={c_opt}\nphases={}\nblocks={blocks}\nfrozen={frozen}\n",
            join_f(config.phases())
        )
    }

    fn parse(text: &str) -> Result<(f64, RisConfig)> {
        let mut lines = text.lines();
        if lines.next() != Some(CACHE_VERSION) {
            return Err(Error::Parse("cache version mismatch".into()));
        }
        let mut c_opt = None;
        let mut phases: Option<Vec<f64>> = None;
        let mut blocks: Option<Vec<usize>> = None;
        let mut frozen: Option<Vec<bool>> = None;
        for line in lines {
            let Some((k, v)) = line.split_once('=') else {
                continue;
            };
            match k {
                "c_opt" => {
                    c_opt = Some(
                        v.parse::<f64>()
                            .map_err(|e| Error::Parse(format!("cache c_opt: {e}")))?,
                    )
                }
                "phases" => {
                    phases = Some(
                        v.split(',')
                            .map(|s| s.parse::<f64>())
                            .collect::<std::result::Result<_, _>>()
                            .map_err(|e| Error::Parse(format!("cache phases: {e}")))?,
                    )
                }
                "blocks" => {
                    blocks = Some(
                        v.split(',')
                            .map(|s| s.parse::<usize>())
                            .collect::<std::result::Result<_, _>>()
                            .map_err(|e| Error::Parse(format!("cache blocks: {e}")))?,
                    )
                }
                "frozen" => {
                    frozen = Some(v.split(',').map(|s| s == "1").collect())
                }
                _ => {}
            }
        }
        let (Some(c_opt), Some(phases), Some(blocks), Some(frozen)) =
            (c_opt, phases, blocks, frozen)
        else {
            return Err(Error::Parse("cache entry incomplete".into()));
        };
        if phases.len() != blocks.len() || phases.len() != frozen.len() || phases.is_empty() {
            return Err(Error::Parse("cache entry length mismatch".into()));
        }
        let mut csv = String::from("index,phase,block,frozen\n");
        for k in 0..phases.len() {
            csv.push_str(&format!(
                "{},{},{},{}\n",
                k + 1,
                phases[k],
                blocks[k],
                u8::from(frozen[k])
            ));
        }
        let config = RisConfig::read_csv(csv.as_bytes())?;
        Ok((c_opt, config))
    }
}
