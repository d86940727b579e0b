//! The exhaustive-search oracle (with its disk cache) and the single-shot
//! baseline, which anchor the normalized rate-loss metric.
//!
//! Run with: cargo run --example oracle_and_baseline

use fic::channel::{
    compose_cascade, sample_channel_pair, synthesize_channel, ArrayGeometry, ChannelScenario,
};
use fic::fic::{run_multipath, GridSchedule};
use fic::rate::{achievable_rate, NoiseModel};
use fic::reference::{rate_loss, run_bas, OracleCache, OracleSpec};

fn main() -> fic::Result<()> {
    let ris = ArrayGeometry::half_wavelength(60)?;
    let scenario = ChannelScenario::new(
        ArrayGeometry::half_wavelength(2)?,
        ris,
        ArrayGeometry::half_wavelength(4)?,
        3,
        3,
    )?;
    let sigma_sq = 10f64.powf(1.5);
    let num_blocks = 3;

    let mut rng = fic::harness::derive_rng(9, "channel", &[0]);
    let (pg, ph) = sample_channel_pair(&scenario, &mut rng)?;
    let g = synthesize_channel(&pg, &ris, &scenario.source);
    let h = synthesize_channel(&ph, &scenario.destination, &ris);

    // cached on disk; FIC_CACHE_DIR overrides the directory
    let cache = OracleCache::new(OracleCache::resolve(None))?;
    let spec = OracleSpec::default();
    let (c_opt, _) = cache.get_or_compute(&h, &g, &ris, num_blocks, sigma_sq, &spec)?;
    println!("oracle rate C_opt = {c_opt:.4} bits/s/Hz (cache: {})", cache.dir().display());

    let noise = NoiseModel::new(sigma_sq, sigma_sq, 1)?;
    let true_rate = |cfg| -> fic::Result<f64> {
        achievable_rate(&compose_cascade(&h, &cfg, &g)?, sigma_sq)
    };

    let mut rng = fic::harness::derive_rng(9, "bas", &[0]);
    let bas = run_bas(&h, &g, &ris, 100, num_blocks, &noise, &mut rng)?;
    println!(
        "baseline (L1 = 100)  : eps = {:.4} at T = {}",
        rate_loss(c_opt, true_rate(bas.best_config)?)?,
        bas.total_estimates
    );

    let schedule = GridSchedule::new(vec![64, 36, 9, 9], 1)?;
    let mut rng = fic::harness::derive_rng(9, "fic", &[0]);
    let fic = run_multipath(&h, &g, &ris, num_blocks, &schedule, &noise, &mut rng)?;
    println!(
        "iterative (64-36-9-9): eps = {:.4} at T = {}",
        rate_loss(c_opt, true_rate(fic.best_config)?)?,
        fic.total_estimates
    );
    Ok(())
}
