//! A small Monte Carlo campaign from a TOML config: paired channel trials,
//! a CSV report of mean rate loss per (method, schedule, K, P, I) cell, and
//! the time-to-target comparison of the two methods.
//!
//! Run with: cargo run --example campaign

use fic::harness::{compare_fic_bas, run_campaign, CampaignConfig, Method, TimeToTarget};

fn main() -> fic::Result<()> {
    let output = std::env::temp_dir().join("fic_campaign_example.csv");
    let text = format!(
        r#"
trials = 20
base_seed = 42
output_path = "{}"
bas_grids = [9, 25, 64, 100]

[scenario]
num_paths_g = 2
num_paths_h = 2
[scenario.source]
num_elements = 2
spacing_over_lambda = 0.5
[scenario.ris]
num_elements = 32
spacing_over_lambda = 0.5
[scenario.destination]
num_elements = 4
spacing_over_lambda = 0.5

[noise]
sigma_sq = 31.6227766016838
est_noise_sigma_sq = 31.6227766016838

[[schedules]]
sizes = [25, 9, 9, 9]

[oracle]
angle_resolution = 64
refine_rounds = 2
"#,
        output.display()
    );
    let config = CampaignConfig::from_toml(&text)?;
    let report = run_campaign(&config)?;
    println!("report ({} rows) written to {}", report.rows.len(), output.display());

    println!("\nmethod schedule    K P I T     mean_eps std_eps neg_frac");
    for r in &report.rows {
        println!(
            "{:<6} {:<11} {} {} {} {:<5} {:<8.4} {:<7.4} {:.2}",
            r.method.to_string(),
            r.schedule,
            r.k,
            r.p,
            r.i,
            r.t,
            r.mean_eps,
            r.std_eps,
            r.neg_frac
        );
    }

    let target = report.min_eps(Method::Fic).unwrap().max(report.min_eps(Method::Bas).unwrap())
        + 0.02;
    let cmp = compare_fic_bas(&report, target);
    let show = |t| match t {
        TimeToTarget::Reached(v) => format!("{v:.1}"),
        TimeToTarget::NotReached => "not reached".into(),
    };
    println!("\ntarget eps {target:.4}: T_FIC = {}, T_BAS = {}", show(cmp.t_fic), show(cmp.t_bas));
    if let Some(r) = cmp.reduction_percent {
        println!("sounding-time reduction: {r:.1}%");
    }
    Ok(())
}
