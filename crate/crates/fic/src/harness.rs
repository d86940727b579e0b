//! Monte Carlo campaign front end.
//!
//! A campaign samples seeded channel realizations, obtains the oracle rate
//! `C_opt` per channel (cached on disk), runs the requested methods over
//! schedule/K sweeps, and reports the averaged normalized rate loss per
//! `(method, schedule, K, P, I)` cell as CSV. Channel realizations are
//! shared across cells within a trial so method curves are paired-sample
//! comparable.

use std::fmt;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::channel::{
    compose_cascade, sample_channel_pair, synthesize_channel, ChannelScenario,
};
use crate::error::{Error, Result};
use crate::fic::{estimation_time, run_multipath, GridSchedule};
use crate::rate::{achievable_rate, NoiseModel};
use crate::reference::{rate_loss, run_bas, OracleCache, OracleSpec};

/// Search method under comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Fic,
    Bas,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Fic => write!(f, "FIC"),
            Method::Bas => write!(f, "BAS"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "FIC" | "fic" => Ok(Method::Fic),
            "BAS" | "bas" => Ok(Method::Bas),
            other => Err(Error::Parse(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseSettings {
    pub sigma_sq: f64,
    pub est_noise_sigma_sq: f64,
}

fn default_k_values() -> Vec<usize> {
    vec![1]
}

fn default_methods() -> Vec<Method> {
    vec![Method::Fic, Method::Bas]
}

fn default_bas_grids() -> Vec<usize> {
    vec![9, 16, 25, 36, 64, 100, 225, 400]
}

fn default_trials() -> usize {
    100
}

/// Full campaign description; loadable from TOML.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CampaignConfig {
    pub scenario: ChannelScenario,
    pub noise: NoiseSettings,
    #[serde(default = "default_k_values")]
    pub k_values: Vec<usize>,
    pub schedules: Vec<GridSchedule>,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default = "default_bas_grids")]
    pub bas_grids: Vec<usize>,
    /// Sub-block count `M`; defaults to `min(L_G, L_H)`.
    #[serde(default)]
    pub num_blocks: Option<usize>,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub base_seed: u64,
    pub output_path: PathBuf,
    #[serde(default)]
    pub oracle: OracleSpec,
    #[serde(default)]
    pub cache_dir: Option<PathBuf>,
}

impl CampaignConfig {
    pub fn num_blocks(&self) -> usize {
        self.num_blocks
            .unwrap_or_else(|| self.scenario.num_paths_g.min(self.scenario.num_paths_h))
    }

    pub fn validate(&self) -> Result<()> {
        self.scenario.validate()?;
        self.oracle.validate()?;
        NoiseModel::new(self.noise.sigma_sq, self.noise.est_noise_sigma_sq, 1)?;
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.methods.is_empty() {
            return Err(Error::Config("no methods selected".into()));
        }
        if self.k_values.is_empty() || self.k_values.contains(&0) {
            return Err(Error::Config("k_values must be positive".into()));
        }
        if self.methods.contains(&Method::Fic) && self.schedules.is_empty() {
            return Err(Error::Config("FIC selected but no schedules given".into()));
        }
        if self.methods.contains(&Method::Bas) && self.bas_grids.is_empty() {
            return Err(Error::Config("BAS selected but no grids given".into()));
        }
        for &l1 in &self.bas_grids {
            crate::fic::perfect_sqrt(l1)?;
        }
        let m = self.num_blocks();
        if m == 0 || self.scenario.ris.num_elements % m != 0 {
            return Err(Error::Config(format!(
                "num_blocks {m} must divide N_I {}",
                self.scenario.ris.num_elements
            )));
        }
        Ok(())
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let c: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }
}

/// Aggregated result of one `(method, schedule, K, P, I)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub method: Method,
    pub schedule: String,
    pub k: usize,
    pub p: usize,
    pub i: usize,
    pub t: f64,
    pub mean_eps: f64,
    pub std_eps: f64,
    /// Fraction of trials where the method beat the surrogate oracle.
    pub neg_frac: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CampaignReport {
    pub rows: Vec<ReportRow>,
}

impl CampaignReport {
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "method,schedule,k,p,i,t,mean_eps,std_eps,neg_frac")?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                r.method, r.schedule, r.k, r.p, r.i, r.t, r.mean_eps, r.std_eps, r.neg_frac
            )?;
        }
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut buf = Vec::new();
        self.write_csv(&mut buf)?;
        std::fs::write(path, buf)
            .map_err(|e| Error::Config(format!("cannot write {}: {e}", path.display())))
    }

    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut rows = Vec::new();
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line.starts_with("method")) {
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 9 {
                return Err(Error::Parse(format!(
                    "report line {}: expected 9 fields, found {}",
                    lineno + 1,
                    f.len()
                )));
            }
            let err = |e: String| Error::Parse(format!("report line {}: {e}", lineno + 1));
            rows.push(ReportRow {
                method: f[0].parse()?,
                schedule: f[1].to_string(),
                k: f[2].parse().map_err(|e: std::num::ParseIntError| err(e.to_string()))?,
                p: f[3].parse().map_err(|e: std::num::ParseIntError| err(e.to_string()))?,
                i: f[4].parse().map_err(|e: std::num::ParseIntError| err(e.to_string()))?,
                t: f[5].parse().map_err(|e: std::num::ParseFloatError| err(e.to_string()))?,
                mean_eps: f[6].parse().map_err(|e: std::num::ParseFloatError| err(e.to_string()))?,
                std_eps: f[7].parse().map_err(|e: std::num::ParseFloatError| err(e.to_string()))?,
                neg_frac: f[8].parse().map_err(|e: std::num::ParseFloatError| err(e.to_string()))?,
            });
        }
        Ok(Self { rows })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        Self::read_csv(std::io::BufReader::new(file))
    }

    /// Smallest mean rate loss attained by a method anywhere in the report.
    pub fn min_eps(&self, method: Method) -> Option<f64> {
        self.rows
            .iter()
            .filter(|r| r.method == method)
            .map(|r| r.mean_eps)
            .min_by(|a, b| a.partial_cmp(b).expect("finite eps"))
    }
}

/// Independent stream for one labeled unit of work, derived from the
/// campaign base seed.
pub fn derive_rng(base_seed: u64, label: &str, indices: &[u64]) -> ChaCha8Rng {
    let mut hasher = Sha256::new();
    hasher.update(base_seed.to_le_bytes());
    hasher.update(label.as_bytes());
    for &i in indices {
        hasher.update(i.to_le_bytes());
    }
    let digest = hasher.finalize();
    let mut seed = [0u8; 32];
    seed.copy_from_slice(&digest);
    ChaCha8Rng::from_seed(seed)
}

#[derive(Clone)]
enum Cell {
    Fic { s_idx: usize, k: usize, i: usize },
    Bas { l1: usize, k: usize },
}

/// Runs the campaign and writes the report CSV to `config.output_path`.
/// Byte-identical output for identical `(config, base_seed)`.
pub fn run_campaign(config: &CampaignConfig) -> Result<CampaignReport> {
    config.validate()?;
    let m = config.num_blocks();
    let scenario = &config.scenario;
    let ris = scenario.ris;
    let cache = OracleCache::new(OracleCache::resolve(config.cache_dir.as_deref()))?;

    // fixed cell order: FIC sweeps first, then BAS
    let mut cells = Vec::new();
    if config.methods.contains(&Method::Fic) {
        for (s_idx, schedule) in config.schedules.iter().enumerate() {
            for &k in &config.k_values {
                for i in 1..=schedule.num_iterations() {
                    cells.push(Cell::Fic { s_idx, k, i });
                }
            }
        }
    }
    if config.methods.contains(&Method::Bas) {
        for &l1 in &config.bas_grids {
            for &k in &config.k_values {
                cells.push(Cell::Bas { l1, k });
            }
        }
    }

    let mut samples: Vec<Vec<f64>> = vec![Vec::with_capacity(config.trials); cells.len()];
    for trial in 0..config.trials as u64 {
        let mut crng = derive_rng(config.base_seed, "channel", &[trial]);
        let (pg, ph) = sample_channel_pair(scenario, &mut crng)?;
        let g = synthesize_channel(&pg, &ris, &scenario.source);
        let h = synthesize_channel(&ph, &scenario.destination, &ris);
        let (c_opt, _) = cache.get_or_compute(
            &h,
            &g,
            &ris,
            m,
            config.noise.sigma_sq,
            &config.oracle,
        )?;
        for (cell, bucket) in cells.iter().zip(samples.iter_mut()) {
            let eps = match cell {
                Cell::Fic { s_idx, k, i } => {
                    let schedule = config.schedules[*s_idx].truncated(*i)?;
                    let noise = NoiseModel::new(
                        config.noise.sigma_sq,
                        config.noise.est_noise_sigma_sq,
                        *k,
                    )?;
                    let mut rng = derive_rng(
                        config.base_seed,
                        "fic",
                        &[trial, *s_idx as u64, *k as u64, *i as u64],
                    );
                    let res = run_multipath(&h, &g, &ris, m, &schedule, &noise, &mut rng)?;
                    let q = compose_cascade(&h, &res.best_config, &g)?;
                    rate_loss(c_opt, achievable_rate(&q, config.noise.sigma_sq)?)?
                }
                Cell::Bas { l1, k } => {
                    let noise = NoiseModel::new(
                        config.noise.sigma_sq,
                        config.noise.est_noise_sigma_sq,
                        *k,
                    )?;
                    let mut rng =
                        derive_rng(config.base_seed, "bas", &[trial, *l1 as u64, *k as u64]);
                    let res = run_bas(&h, &g, &ris, *l1, m, &noise, &mut rng)?;
                    let q = compose_cascade(&h, &res.best_config, &g)?;
                    rate_loss(c_opt, achievable_rate(&q, config.noise.sigma_sq)?)?
                }
            };
            bucket.push(eps);
        }
    }

    let rows = cells
        .iter()
        .zip(&samples)
        .map(|(cell, eps)| {
            let n = eps.len() as f64;
            let mean = eps.iter().sum::<f64>() / n;
            let var = if eps.len() > 1 {
                eps.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / (n - 1.0)
            } else {
                0.0
            };
            let neg = eps.iter().filter(|&&e| e < 0.0).count() as f64 / n;
            match cell {
                Cell::Fic { s_idx, k, i } => {
                    let schedule = &config.schedules[*s_idx];
                    let truncated = schedule.truncated(*i).expect("validated");
                    ReportRow {
                        method: Method::Fic,
                        schedule: schedule.label(),
                        k: *k,
                        p: schedule.num_starts(),
                        i: *i,
                        t: estimation_time(*k as f64, m, &truncated),
                        mean_eps: mean,
                        std_eps: var.sqrt(),
                        neg_frac: neg,
                    }
                }
                Cell::Bas { l1, k } => ReportRow {
                    method: Method::Bas,
                    schedule: l1.to_string(),
                    k: *k,
                    p: 1,
                    i: 1,
                    t: (*k * m * l1) as f64,
                    mean_eps: mean,
                    std_eps: var.sqrt(),
                    neg_frac: neg,
                },
            }
        })
        .collect();

    let report = CampaignReport { rows };
    report.save(&config.output_path)?;
    Ok(report)
}

/// Smallest sounding time at which a method's mean rate-loss curve first
/// drops to the target, linearly interpolated between measured points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeToTarget {
    Reached(f64),
    NotReached,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FicBasComparison {
    pub t_fic: TimeToTarget,
    pub t_bas: TimeToTarget,
    /// `100 (T_BAS - T_FIC) / T_BAS` when both methods reach the target.
    pub reduction_percent: Option<f64>,
}

fn time_to_target(points: &mut Vec<(f64, f64)>, target: f64) -> TimeToTarget {
    if points.is_empty() {
        return TimeToTarget::NotReached;
    }
    points.sort_by(|a, b| a.partial_cmp(b).expect("finite points"));
    // lower envelope: best eps seen per unique T, running minimum over T
    let mut envelope: Vec<(f64, f64)> = Vec::new();
    for &(t, e) in points.iter() {
        match envelope.last_mut() {
            Some(last) if last.0 == t => last.1 = last.1.min(e),
            _ => {
                let best = envelope.last().map(|l| l.1).unwrap_or(f64::INFINITY);
                envelope.push((t, e.min(best)));
            }
        }
    }
    if envelope[0].1 <= target {
        return TimeToTarget::Reached(envelope[0].0);
    }
    for w in envelope.windows(2) {
        let (t1, e1) = w[0];
        let (t2, e2) = w[1];
        if e1 > target && e2 <= target {
            let frac = (e1 - target) / (e1 - e2);
            return TimeToTarget::Reached(t1 + frac * (t2 - t1));
        }
    }
    TimeToTarget::NotReached
}

/// Time-to-target comparison of the two methods at a given rate-loss target.
pub fn compare_fic_bas(report: &CampaignReport, target_eps: f64) -> FicBasComparison {
    let collect = |method: Method| -> Vec<(f64, f64)> {
        report
            .rows
            .iter()
            .filter(|r| r.method == method)
            .map(|r| (r.t, r.mean_eps))
            .collect()
    };
    let mut fic_points = collect(Method::Fic);
    let mut bas_points = collect(Method::Bas);
    let t_fic = time_to_target(&mut fic_points, target_eps);
    let t_bas = time_to_target(&mut bas_points, target_eps);
    let reduction = match (t_fic, t_bas) {
        (TimeToTarget::Reached(tf), TimeToTarget::Reached(tb)) if tb > 0.0 => {
            Some(100.0 * (tb - tf) / tb)
        }
        _ => None,
    };
    FicBasComparison {
        t_fic,
        t_bas,
        reduction_percent: reduction,
    }
}
