//! Iterative RIS configuration search over adaptively refined 2D angle grids.
//!
//! Each sounded configuration is parameterized by an (AoD, AoA) couple at the
//! RIS. The first iteration covers `[-pi/2, pi/2]^2` with a coarse grid; each
//! later iteration shrinks the grid around the couple whose (noisy) rate
//! estimate won the previous iteration. Multipath channels are handled in
//! `M` interleaved sub-block steps, freezing one block per step.

use rand::Rng;

use crate::channel::{ArrayGeometry, CascadeEvaluator, ChannelMatrix};
use crate::error::{Error, Result};
use crate::rate::{achievable_rate, estimate_cascade, NoiseModel};
use crate::ris::{config_from_angles, freeze_block, overlay_configs, AnglePair, RisConfig};

use std::f64::consts::PI;

/// Integer square root if `n` is a perfect square.
pub(crate) fn perfect_sqrt(n: usize) -> Result<usize> {
    let r = (n as f64).sqrt().round() as usize;
    if r * r == n && n > 0 {
        Ok(r)
    } else {
        Err(Error::NotPerfectSquare(n))
    }
}

/// Per-iteration grid sizes `(L_1, ..., L_I)` plus the number of starting
/// points `P` used by the multi-start variant.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(try_from = "RawGridSchedule", into = "RawGridSchedule")]
pub struct GridSchedule {
    sizes: Vec<usize>,
    num_starts: usize,
}

#[derive(serde::Serialize, serde::Deserialize)]
struct RawGridSchedule {
    sizes: Vec<usize>,
    #[serde(default = "one")]
    num_starts: usize,
}

fn one() -> usize {
    1
}

impl TryFrom<RawGridSchedule> for GridSchedule {
    type Error = Error;
    fn try_from(raw: RawGridSchedule) -> Result<Self> {
        GridSchedule::new(raw.sizes, raw.num_starts)
    }
}

impl From<GridSchedule> for RawGridSchedule {
    fn from(s: GridSchedule) -> Self {
        RawGridSchedule {
            sizes: s.sizes,
            num_starts: s.num_starts,
        }
    }
}

impl GridSchedule {
    pub fn new(sizes: Vec<usize>, num_starts: usize) -> Result<Self> {
        if sizes.is_empty() {
            return Err(Error::Empty("grid schedule"));
        }
        for &l in &sizes {
            perfect_sqrt(l)?;
        }
        if num_starts == 0 {
            return Err(Error::InvalidParameter(
                "num_starts must be at least 1".into(),
            ));
        }
        if num_starts > sizes[0] {
            return Err(Error::InvalidParameter(format!(
                "num_starts {} exceeds first grid size {}",
                num_starts, sizes[0]
            )));
        }
        Ok(Self { sizes, num_starts })
    }

    /// Constant `L_i = l` for `iterations` iterations, single start.
    pub fn uniform(l: usize, iterations: usize) -> Result<Self> {
        Self::new(vec![l; iterations], 1)
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn num_starts(&self) -> usize {
        self.num_starts
    }

    pub fn num_iterations(&self) -> usize {
        self.sizes.len()
    }

    /// `gamma_i = sqrt(prod_{k<=i} L_k)` for 1-based `i`.
    pub fn gamma(&self, i: usize) -> f64 {
        let prod: u128 = self.sizes[..i].iter().map(|&l| l as u128).product();
        (prod as f64).sqrt()
    }

    /// Same schedule truncated to the first `iterations` grids.
    pub fn truncated(&self, iterations: usize) -> Result<Self> {
        if iterations == 0 || iterations > self.sizes.len() {
            return Err(Error::InvalidParameter(format!(
                "cannot truncate schedule of length {} to {iterations}",
                self.sizes.len()
            )));
        }
        Self::new(self.sizes[..iterations].to_vec(), self.num_starts)
    }

    /// Label like `64-36-9` used in campaign CSV output.
    pub fn label(&self) -> String {
        self.sizes
            .iter()
            .map(|l| l.to_string())
            .collect::<Vec<_>>()
            .join("-")
    }
}

/// First-iteration grid: `L_1` angle couples tiling `[-pi/2, pi/2]^2` with
/// cell side `pi / sqrt(L_1)`, enumerated row-major in theta.
pub fn initial_grid(l1: usize) -> Result<Vec<AnglePair>> {
    let root = perfect_sqrt(l1)?;
    let rootf = root as f64;
    let step = PI / rootf;
    let mut pairs = Vec::with_capacity(l1);
    for l in 0..l1 {
        let theta = step * ((l / root) as f64 - rootf / 2.0) + step / 2.0;
        let eta = step * ((l % root) as f64 - rootf / 2.0) + step / 2.0;
        pairs.push(AnglePair::clamped(theta, eta));
    }
    Ok(pairs)
}

/// Refined grid centered on the previously selected couple. `gamma_prev` is
/// `gamma_{i-1}`; the new grid has cell side `pi / gamma_i` with
/// `gamma_i = gamma_prev * sqrt(L_i)`, and spans the previous cell. Points
/// are clamped to `[-pi/2, pi/2]`.
pub fn refined_grid(center: &AnglePair, gamma_prev: f64, li: usize) -> Result<Vec<AnglePair>> {
    let root = perfect_sqrt(li)?;
    if !(gamma_prev > 0.0) || !gamma_prev.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "gamma_prev must be positive, got {gamma_prev}"
        )));
    }
    let rootf = root as f64;
    let gamma_i = gamma_prev * rootf;
    let step = PI / gamma_i;
    let mut pairs = Vec::with_capacity(li);
    for l in 0..li {
        let theta = step * ((l / root) as f64 - rootf / 2.0) + step / 2.0 + center.theta;
        let eta = step * ((l % root) as f64 - rootf / 2.0) + step / 2.0 + center.eta;
        pairs.push(AnglePair::clamped(theta, eta));
    }
    Ok(pairs)
}

/// Index of the maximum, ties broken by lowest index (0-based).
pub fn select_best(estimated_rates: &[f64]) -> Result<usize> {
    if estimated_rates.is_empty() {
        return Err(Error::Empty("estimated rates"));
    }
    if estimated_rates.iter().any(|r| !r.is_finite()) {
        return Err(Error::NonFinite("estimated rates"));
    }
    let mut best = 0;
    for (i, &r) in estimated_rates.iter().enumerate().skip(1) {
        if r > estimated_rates[best] {
            best = i;
        }
    }
    Ok(best)
}

/// Total sounding time `T_0 * M * (L_1 + P * sum_{i>=2} L_i)`.
pub fn estimation_time(t0: f64, num_blocks: usize, schedule: &GridSchedule) -> f64 {
    let tail: usize = schedule.sizes()[1..].iter().sum();
    t0 * num_blocks as f64 * (schedule.sizes()[0] + schedule.num_starts() * tail) as f64
}

/// One evaluated grid: the couples explored at `(step, chain, iteration)`,
/// their estimated rates, and the 0-based index that won the arg max.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationTrace {
    pub step: usize,
    pub chain: usize,
    pub iteration: usize,
    pub pairs: Vec<AnglePair>,
    pub estimated_rates: Vec<f64>,
    pub selected: usize,
}

/// Search outcome: the configuration with the highest estimated rate seen
/// anywhere in the run, the audit trail, and the sounding budget spent.
#[derive(Debug, Clone, PartialEq)]
pub struct FicResult {
    pub best_config: RisConfig,
    pub best_estimated_rate: f64,
    pub trace: Vec<IterationTrace>,
    pub total_estimates: u64,
    pub per_block_angles: Vec<AnglePair>,
}

impl FicResult {
    /// Writes the trace as CSV rows
    /// `step,chain,iteration,l,theta,eta,estimated_rate,selected`
    /// with 1-based `l`.
    pub fn write_trace_csv<W: std::io::Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "step,chain,iteration,l,theta,eta,estimated_rate,selected")?;
        for t in &self.trace {
            for (l, (pair, rate)) in t.pairs.iter().zip(&t.estimated_rates).enumerate() {
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{}",
                    t.step,
                    t.chain,
                    t.iteration,
                    l + 1,
                    pair.theta,
                    pair.eta,
                    rate,
                    u8::from(l == t.selected)
                )?;
            }
        }
        Ok(())
    }
}

struct BestTracker {
    rate: f64,
    config: Option<RisConfig>,
    pair: Option<AnglePair>,
}

impl BestTracker {
    fn new() -> Self {
        Self {
            rate: f64::NEG_INFINITY,
            config: None,
            pair: None,
        }
    }

    fn observe(&mut self, rate: f64, config: &RisConfig, pair: &AnglePair) {
        if rate > self.rate {
            self.rate = rate;
            self.config = Some(config.clone());
            self.pair = Some(*pair);
        }
    }
}

struct StepOutcome {
    best_pair: AnglePair,
    best_config: RisConfig,
}

/// One sub-block step: full multi-start grid search over the unfrozen
/// elements on top of `base`. Consumes the stream once per sounded
/// configuration, in grid order, chains interleaved per iteration.
#[allow(clippy::too_many_arguments)]
fn run_block<R: Rng>(
    eval: &CascadeEvaluator,
    ris: &ArrayGeometry,
    base: &RisConfig,
    schedule: &GridSchedule,
    noise: &NoiseModel,
    step: usize,
    rng: &mut R,
    trace: &mut Vec<IterationTrace>,
    global: &mut BestTracker,
    estimates: &mut u64,
) -> Result<StepOutcome> {
    let mut step_best = BestTracker::new();
    let evaluate = |pair: &AnglePair,
                        rng: &mut R,
                        step_best: &mut BestTracker,
                        global: &mut BestTracker,
                        estimates: &mut u64|
     -> Result<f64> {
        let cfg = overlay_configs(base, &config_from_angles(pair, ris))?;
        let q = eval.compose(&cfg)?;
        let q_hat = estimate_cascade(&q, noise, rng);
        let rate = achievable_rate(&q_hat, noise.sigma_sq)?;
        *estimates += noise.estimates_per_config as u64;
        step_best.observe(rate, &cfg, pair);
        global.observe(rate, &cfg, pair);
        Ok(rate)
    };

    // Iteration 1: common coarse grid.
    let pairs = initial_grid(schedule.sizes()[0])?;
    let mut rates = Vec::with_capacity(pairs.len());
    for pair in &pairs {
        rates.push(evaluate(pair, rng, &mut step_best, global, estimates)?);
    }
    let selected = select_best(&rates)?;

    // Top-P distinct first-iteration couples seed the refinement chains.
    let p = schedule.num_starts();
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.sort_by(|&a, &b| {
        rates[b]
            .partial_cmp(&rates[a])
            .expect("finite rates")
            .then(a.cmp(&b))
    });
    let mut centers: Vec<AnglePair> = order[..p].iter().map(|&i| pairs[i]).collect();

    trace.push(IterationTrace {
        step,
        chain: 0,
        iteration: 1,
        pairs,
        estimated_rates: rates,
        selected,
    });

    for i in 2..=schedule.num_iterations() {
        let li = schedule.sizes()[i - 1];
        let gamma_prev = schedule.gamma(i - 1);
        for (chain, center) in centers.iter_mut().enumerate() {
            let grid = refined_grid(center, gamma_prev, li)?;
            let mut grid_rates = Vec::with_capacity(grid.len());
            for pair in &grid {
                grid_rates.push(evaluate(pair, rng, &mut step_best, global, estimates)?);
            }
            let sel = select_best(&grid_rates)?;
            *center = grid[sel];
            trace.push(IterationTrace {
                step,
                chain,
                iteration: i,
                pairs: grid,
                estimated_rates: grid_rates,
                selected: sel,
            });
        }
    }

    Ok(StepOutcome {
        best_pair: step_best.pair.expect("at least one evaluation"),
        best_config: step_best.config.expect("at least one evaluation"),
    })
}

fn check_channel_dims(
    h: &ChannelMatrix,
    g: &ChannelMatrix,
    ris: &ArrayGeometry,
) -> Result<()> {
    if h.ncols() != ris.num_elements || g.nrows() != ris.num_elements {
        return Err(Error::DimensionMismatch {
            context: "FIC channel inputs vs RIS size",
            expected: (ris.num_elements, ris.num_elements),
            found: (h.ncols(), g.nrows()),
        });
    }
    Ok(())
}

/// Single-start search over all unfrozen elements (`P` forced to 1).
pub fn run_single_path<R: Rng>(
    h: &ChannelMatrix,
    g: &ChannelMatrix,
    ris: &ArrayGeometry,
    schedule: &GridSchedule,
    noise: &NoiseModel,
    frozen_base: &RisConfig,
    rng: &mut R,
) -> Result<FicResult> {
    let single = GridSchedule::new(schedule.sizes().to_vec(), 1)?;
    run_multi_start(h, g, ris, &single, noise, frozen_base, rng)
}

/// Multi-start search: the `P` best first-iteration couples each seed an
/// independent refinement chain; the best estimated configuration across all
/// chains is returned.
pub fn run_multi_start<R: Rng>(
    h: &ChannelMatrix,
    g: &ChannelMatrix,
    ris: &ArrayGeometry,
    schedule: &GridSchedule,
    noise: &NoiseModel,
    frozen_base: &RisConfig,
    rng: &mut R,
) -> Result<FicResult> {
    check_channel_dims(h, g, ris)?;
    noise.validate()?;
    if frozen_base.len() != ris.num_elements {
        return Err(Error::DimensionMismatch {
            context: "frozen base vs RIS size",
            expected: (ris.num_elements, 1),
            found: (frozen_base.len(), 1),
        });
    }
    let eval = CascadeEvaluator::new(h, g)?;
    let mut trace = Vec::new();
    let mut global = BestTracker::new();
    let mut estimates = 0u64;
    let outcome = run_block(
        &eval,
        ris,
        frozen_base,
        schedule,
        noise,
        1,
        rng,
        &mut trace,
        &mut global,
        &mut estimates,
    )?;
    Ok(FicResult {
        best_config: global.config.expect("evaluations happened"),
        best_estimated_rate: global.rate,
        trace,
        total_estimates: estimates,
        per_block_angles: vec![outcome.best_pair],
    })
}

/// Full multipath procedure in `num_blocks` steps. Each step reruns the grid
/// search over the still-unfrozen elements (rates always computed on the
/// fully composed configuration, frozen phases included), then freezes the
/// interleaved block for that step.
pub fn run_multipath<R: Rng>(
    h: &ChannelMatrix,
    g: &ChannelMatrix,
    ris: &ArrayGeometry,
    num_blocks: usize,
    schedule: &GridSchedule,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<FicResult> {
    check_channel_dims(h, g, ris)?;
    noise.validate()?;
    if num_blocks == 0 || ris.num_elements % num_blocks != 0 {
        return Err(Error::InvalidParameter(format!(
            "num_blocks {} must divide N_I {}",
            num_blocks, ris.num_elements
        )));
    }
    let eval = CascadeEvaluator::new(h, g)?;
    let mut trace = Vec::new();
    let mut global = BestTracker::new();
    let mut estimates = 0u64;
    let mut base = RisConfig::neutral(ris.num_elements);
    let mut per_block = Vec::with_capacity(num_blocks);
    for step in 1..=num_blocks {
        let outcome = run_block(
            &eval,
            ris,
            &base,
            schedule,
            noise,
            step,
            rng,
            &mut trace,
            &mut global,
            &mut estimates,
        )?;
        per_block.push(outcome.best_pair);
        base = freeze_block(&outcome.best_config, step, num_blocks)?;
    }
    Ok(FicResult {
        best_config: global.config.expect("evaluations happened"),
        best_estimated_rate: global.rate,
        trace,
        total_estimates: estimates,
        per_block_angles: per_block,
    })
}
