//! Simulator for RIS-assisted mmWave uplinks.
//!
//! The crate synthesizes geometric multipath channels, searches RIS phase
//! configurations with an adaptively refined 2D angle grid, and compares the
//! resulting rate-loss-versus-sounding-time tradeoff against a single-shot
//! baseline and an exhaustive-search oracle.
//!
//! See the `examples/` directory for one runnable example per capability and
//! the `fic` binary for the campaign CLI.

pub mod channel;
pub mod error;
pub mod fic;
pub mod harness;
pub mod rate;
pub mod reference;
pub mod ris;

pub use channel::{
    array_response, compose_cascade, sample_channel_pair, synthesize_channel, ArrayGeometry,
    CascadeEvaluator, ChannelMatrix, ChannelScenario, PathSet,
};
pub use error::{Error, Result};
pub use fic::{
    estimation_time, initial_grid, refined_grid, run_multi_start, run_multipath,
    run_single_path, select_best, FicResult, GridSchedule, IterationTrace,
};
pub use harness::{
    compare_fic_bas, derive_rng, run_campaign, CampaignConfig, CampaignReport,
    FicBasComparison, Method, NoiseSettings, ReportRow, TimeToTarget,
};
pub use rate::{achievable_rate, estimate_cascade, NoiseModel};
pub use reference::{oracle_optimal_rate, rate_loss, run_bas, OracleCache, OracleSpec};
pub use ris::{
    config_from_angles, freeze_block, overlay_configs, quantize_phases, AnglePair, RisConfig,
};
