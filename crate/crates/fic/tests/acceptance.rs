//! End-to-end acceptance checks, one test per criterion. Each prints a
//! single PASS/FAIL line (visible with `--nocapture`; always on failure).
//!
//! Heavy criteria share one Monte Carlo campaign and one on-disk oracle
//! cache under the cargo target tmp dir, so reruns are cheap.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use fic::channel::{
    array_response, compose_cascade, sample_channel_pair, synthesize_channel, ArrayGeometry,
    ChannelMatrix, ChannelScenario,
};
use fic::fic::{
    estimation_time, initial_grid, refined_grid, run_multipath, run_single_path, GridSchedule,
};
use fic::harness::{
    compare_fic_bas, derive_rng, run_campaign, CampaignConfig, CampaignReport, Method,
    NoiseSettings, TimeToTarget,
};
use fic::rate::{achievable_rate, estimate_cascade, NoiseModel};
use fic::reference::{rate_loss, OracleCache, OracleSpec};
use fic::ris::{config_from_angles, AnglePair, RisConfig};

const BASE_SEED: u64 = 2026;

fn geom(n: usize) -> ArrayGeometry {
    ArrayGeometry::half_wavelength(n).unwrap()
}

fn sigma_sq_minus_15_db() -> f64 {
    // unit total channel power at SNR -15 dB
    10f64.powf(1.5)
}

fn tmp_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR"))
}

fn shared_cache_dir() -> PathBuf {
    tmp_dir().join("oracle-cache")
}

fn verdict(criterion: &str, pass: bool) {
    println!("criterion {criterion}: {}", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {criterion} failed");
}

fn paper_scenario() -> ChannelScenario {
    ChannelScenario::new(geom(2), geom(120), geom(4), 3, 3).unwrap()
}

fn paper_campaign_config() -> CampaignConfig {
    CampaignConfig {
        scenario: paper_scenario(),
        noise: NoiseSettings {
            sigma_sq: sigma_sq_minus_15_db(),
            est_noise_sigma_sq: sigma_sq_minus_15_db(),
        },
        k_values: vec![1],
        schedules: vec![GridSchedule::new(
            vec![64, 36, 9, 9, 9, 9, 9, 9, 9, 9],
            1,
        )
        .unwrap()],
        methods: vec![Method::Fic, Method::Bas],
        bas_grids: vec![9, 16, 25, 36, 64, 100, 225, 400],
        num_blocks: None,
        trials: 100,
        base_seed: BASE_SEED,
        output_path: tmp_dir().join("acceptance_report.csv"),
        oracle: OracleSpec::default(),
        cache_dir: Some(shared_cache_dir()),
    }
}

fn paper_report() -> &'static CampaignReport {
    static REPORT: OnceLock<CampaignReport> = OnceLock::new();
    REPORT.get_or_init(|| run_campaign(&paper_campaign_config()).unwrap())
}

fn single_path_channels(
    scenario: &ChannelScenario,
    seed_label: u64,
    trial: u64,
) -> (ChannelMatrix, ChannelMatrix, f64, AnglePair) {
    let mut rng = derive_rng(seed_label, "channel", &[trial]);
    let (pg, ph) = sample_channel_pair(scenario, &mut rng).unwrap();
    let g = synthesize_channel(&pg, &scenario.ris, &scenario.source);
    let h = synthesize_channel(&ph, &scenario.destination, &scenario.ris);
    let gain = (pg.gains()[0] * ph.gains()[0]).norm();
    let pair = AnglePair::new(ph.departure_angles()[0], pg.arrival_angles()[0]).unwrap();
    (h, g, gain, pair)
}

#[test]
fn criterion_01_alignment_identity_and_closed_form() {
    let n_i = 32;
    let scenario = ChannelScenario::new(geom(2), geom(n_i), geom(4), 1, 1).unwrap();
    let sigma_sq = 10.0;
    let mut pass = true;
    let mut check_rng = ChaCha8Rng::seed_from_u64(99);
    for trial in 0..100u64 {
        let (h, g, gain, pair) = single_path_channels(&scenario, 100, trial);
        let cfg = config_from_angles(&pair, &geom(n_i));

        // |alpha^H(theta_H) Phi alpha(eta_G)| = N_I
        let a_theta = array_response(pair.theta, &geom(n_i));
        let a_eta = array_response(pair.eta, &geom(n_i));
        let mut acc = Complex64::new(0.0, 0.0);
        for k in 0..n_i {
            acc += a_theta[k].conj() * Complex64::from_polar(1.0, cfg.phases()[k]) * a_eta[k];
        }
        pass &= (acc.norm() - n_i as f64).abs() <= 1e-9 * n_i as f64;

        // true rate matches log2(1 + |rho_G rho_H|^2 N_I^2 N_S N_D / sigma^2)
        let q = compose_cascade(&h, &cfg, &g).unwrap();
        let rate = achievable_rate(&q, sigma_sq).unwrap();
        let closed =
            (1.0 + gain * gain * (n_i * n_i) as f64 * 2.0 * 4.0 / sigma_sq).log2();
        pass &= (rate - closed).abs() <= 1e-9 * closed;

        // beats 1000 random unit-modulus diagonal configurations
        for _ in 0..1000 {
            let mut random = RisConfig::neutral(n_i);
            for k in 0..n_i {
                random.set_phase(k, check_rng.gen::<f64>() * 2.0 * PI);
            }
            let qr = compose_cascade(&h, &random, &g).unwrap();
            pass &= achievable_rate(&qr, sigma_sq).unwrap() <= rate + 1e-12;
        }
    }
    verdict("1 (alignment identity and closed-form rate)", pass);
}

#[test]
fn criterion_02_grid_geometry() {
    let mut pass = true;

    let grid = initial_grid(9).unwrap();
    pass &= grid.len() == 9;
    // row-major in theta over {-pi/3, 0, pi/3}^2; the center point is exact
    pass &= grid[4].theta == 0.0 && grid[4].eta == 0.0;
    for (l, p) in grid.iter().enumerate() {
        let axis = [-PI / 3.0, 0.0, PI / 3.0];
        pass &= (p.theta - axis[l / 3]).abs() <= 1e-15;
        pass &= (p.eta - axis[l % 3]).abs() <= 1e-15;
    }

    // schedule (25, 9): gamma_2 = sqrt(25 * 9) = 15 exactly, cell side pi/15
    let schedule = GridSchedule::new(vec![25, 9], 1).unwrap();
    pass &= schedule.gamma(1) == 5.0;
    pass &= schedule.gamma(2) == 15.0;
    let refined = refined_grid(&AnglePair::new(0.0, 0.0).unwrap(), 5.0, 9).unwrap();
    pass &= refined.len() == 9;
    pass &= refined[4].theta == 0.0 && refined[4].eta == 0.0;
    for (l, p) in refined.iter().enumerate() {
        let axis = [-PI / 15.0, 0.0, PI / 15.0];
        pass &= (p.theta - axis[l / 3]).abs() <= 1e-15;
        pass &= (p.eta - axis[l % 3]).abs() <= 1e-15;
    }
    // the refined grid spans exactly the previous cell side pi/5
    pass &= (refined[8].theta - refined[0].theta - (PI / 5.0 - PI / 15.0)).abs() <= 1e-15;

    verdict("2 (grid geometry)", pass);
}

#[test]
fn criterion_03_timing_formula() {
    let a = GridSchedule::uniform(9, 4).unwrap();
    let b = GridSchedule::new(vec![64, 9, 9], 4).unwrap();
    let pass = estimation_time(1.0, 3, &a) == 108.0 && estimation_time(1.0, 1, &b) == 136.0;
    verdict("3 (estimation time formula, 108 and 136)", pass);
}

#[test]
fn criterion_04_noiseless_single_path_convergence() {
    let n_i = 16;
    let scenario = ChannelScenario::new(geom(2), geom(n_i), geom(4), 1, 1).unwrap();
    let sigma_sq = 10.0;
    let schedule = GridSchedule::uniform(9, 6).unwrap();
    let noise = NoiseModel::noiseless(sigma_sq).unwrap();
    let mut hits = 0;
    for trial in 0..200u64 {
        let (h, g, gain, _) = single_path_channels(&scenario, 400, trial);
        let mut rng = derive_rng(400, "fic", &[trial]);
        let res = run_single_path(
            &h,
            &g,
            &geom(n_i),
            &schedule,
            &noise,
            &RisConfig::neutral(n_i),
            &mut rng,
        )
        .unwrap();
        let q = compose_cascade(&h, &res.best_config, &g).unwrap();
        let rate = achievable_rate(&q, sigma_sq).unwrap();
        let opt = (1.0 + gain * gain * (n_i * n_i) as f64 * 2.0 * 4.0 / sigma_sq).log2();
        if rate >= (1.0 - 1e-3) * opt {
            hits += 1;
        }
    }
    println!("criterion 4 detail: {hits}/200 trials within 1e-3 of the closed form");
    verdict("4 (noiseless single-path convergence >= 95%)", hits >= 190);
}

#[test]
fn criterion_05_mean_loss_below_bound_within_budget() {
    let report = paper_report();
    let best = report
        .rows
        .iter()
        .filter(|r| r.method == Method::Fic && r.t <= 1e3)
        .map(|r| (r.t, r.mean_eps))
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    let (t, eps) = best.expect("FIC rows within budget");
    println!("criterion 5 detail: best FIC mean eps {eps:.4} at T = {t}");
    verdict("5 (mean rate loss <= 0.15 at some T <= 1000)", eps <= 0.15);
}

#[test]
fn criterion_06_fic_beats_bas_time_to_target() {
    let report = paper_report();
    let fic_min = report.min_eps(Method::Fic).unwrap();
    let bas_min = report.min_eps(Method::Bas).unwrap();
    let target = fic_min.max(bas_min) + 0.02;
    let cmp = compare_fic_bas(report, target);
    let (t_fic, t_bas) = match (cmp.t_fic, cmp.t_bas) {
        (TimeToTarget::Reached(a), TimeToTarget::Reached(b)) => (a, b),
        _ => {
            verdict("6 (FIC vs BAS time-to-target reduction)", false);
            return;
        }
    };
    let reduction = cmp.reduction_percent.unwrap();
    println!(
        "criterion 6 detail: target eps {target:.4}, T_FIC {t_fic:.1}, T_BAS {t_bas:.1}, \
         reduction {reduction:.1}%"
    );
    verdict(
        "6 (FIC vs BAS time-to-target reduction >= 20%)",
        reduction >= 20.0 && reduction > 0.0,
    );
}

#[test]
fn criterion_07_k_averaging() {
    // per-entry variance of the averaged perturbation scales as 1/K
    let q: ChannelMatrix = DMatrix::zeros(1, 1);
    let sigma_e = 0.7;
    let mut pass = true;
    for (k, seed) in [(1usize, 21u64), (2, 22), (4, 23)] {
        let model = NoiseModel::new(1.0, sigma_e, k).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 10_000;
        let mut acc = 0.0;
        for _ in 0..n {
            acc += estimate_cascade(&q, &model, &mut rng)[(0, 0)].norm_sqr();
        }
        let var = acc / n as f64;
        let expect = sigma_e / k as f64;
        pass &= (var - expect).abs() <= 0.05 * expect;
    }

    // the large-T saturation floor of mean eps is non-increasing in K
    let mut config = paper_campaign_config();
    config.k_values = vec![1, 2, 4];
    config.output_path = tmp_dir().join("acceptance_k_report.csv");
    let report = run_campaign(&config).unwrap();
    let max_i = config.schedules[0].num_iterations();
    let floor = |k: usize| {
        report
            .rows
            .iter()
            .find(|r| r.method == Method::Fic && r.k == k && r.i == max_i)
            .map(|r| r.mean_eps)
            .unwrap()
    };
    let (f1, f2, f4) = (floor(1), floor(2), floor(4));
    println!("criterion 7 detail: eps floor K=1 {f1:.4}, K=2 {f2:.4}, K=4 {f4:.4}");
    pass &= f2 <= f1 && f4 <= f2;
    verdict("7 (K-averaging variance and eps floor)", pass);
}

#[test]
fn criterion_08_multi_start() {
    // noiseless paired comparison: the P = 4 chains evaluate a superset of
    // the P = 1 chain, so the mean loss can only improve
    let scenario = paper_scenario();
    let sigma_sq = sigma_sq_minus_15_db();
    let noise = NoiseModel::noiseless(sigma_sq).unwrap();
    let sizes = vec![64, 36, 9, 9];
    let s1 = GridSchedule::new(sizes.clone(), 1).unwrap();
    let s4 = GridSchedule::new(sizes, 4).unwrap();
    let cache = OracleCache::new(shared_cache_dir()).unwrap();
    let trials = 100u64;
    let mut pass = true;
    let (mut sum1, mut sum4) = (0.0, 0.0);
    for trial in 0..trials {
        let mut rng = derive_rng(BASE_SEED, "channel", &[trial]);
        let (pg, ph) = sample_channel_pair(&scenario, &mut rng).unwrap();
        let g = synthesize_channel(&pg, &scenario.ris, &scenario.source);
        let h = synthesize_channel(&ph, &scenario.destination, &scenario.ris);
        let (c_opt, _) = cache
            .get_or_compute(&h, &g, &scenario.ris, 3, sigma_sq, &OracleSpec::default())
            .unwrap();
        let eps = |schedule: &GridSchedule| {
            let mut rng = derive_rng(800, "fic", &[trial]);
            let res = run_multipath(&h, &g, &scenario.ris, 3, schedule, &noise, &mut rng).unwrap();
            let q = compose_cascade(&h, &res.best_config, &g).unwrap();
            let loss = rate_loss(c_opt, achievable_rate(&q, sigma_sq).unwrap()).unwrap();
            (loss, res.total_estimates)
        };
        let (e1, t1) = eps(&s1);
        let (e4, t4) = eps(&s4);
        sum1 += e1;
        sum4 += e4;
        // sounding time grows by exactly the formula factor
        pass &= t1 as f64 == estimation_time(1.0, 3, &s1);
        pass &= t4 as f64 == estimation_time(1.0, 3, &s4);
    }
    let (m1, m4) = (sum1 / trials as f64, sum4 / trials as f64);
    println!(
        "criterion 8 detail: mean eps P=1 {m1:.4}, P=4 {m4:.4}, T {} vs {}",
        estimation_time(1.0, 3, &s1),
        estimation_time(1.0, 3, &s4)
    );
    pass &= m4 <= m1;
    verdict("8 (multi-start lowers mean eps at the formula cost)", pass);
}

#[test]
fn criterion_09_rate_function_invariances() {
    let mut rng = ChaCha8Rng::seed_from_u64(900);
    let mut random_matrix = |rows: usize, cols: usize| -> ChannelMatrix {
        DMatrix::from_fn(rows, cols, |_, _| {
            Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
        })
    };
    let mut pass = true;
    for i in 0..100 {
        let (rows, cols) = ([(4usize, 2usize), (3, 3), (2, 5)])[i % 3];
        let q = random_matrix(rows, cols);
        let sigma_sq = 0.25 + (i as f64) * 0.01;
        let rate = achievable_rate(&q, sigma_sq).unwrap();

        let sv = q.clone().svd(false, false).singular_values;
        let svd_rate: f64 = sv.iter().map(|s| (1.0 + s * s / sigma_sq).log2()).sum();
        pass &= (rate - svd_rate).abs() <= 1e-9 * svd_rate.max(1.0);

        let rotated = &q * Complex64::from_polar(1.0, 2.0 * (i as f64 + 0.3));
        pass &= (achievable_rate(&rotated, sigma_sq).unwrap() - rate).abs()
            <= 1e-9 * rate.max(1.0);

        let u = random_matrix(rows, rows).qr().q();
        let v = random_matrix(cols, cols).qr().q();
        let transformed = &u * &q * &v;
        pass &= (achievable_rate(&transformed, sigma_sq).unwrap() - rate).abs()
            <= 1e-9 * rate.max(1.0);
    }
    verdict("9 (rate invariances within 1e-9)", pass);
}

#[test]
fn criterion_10_campaign_determinism() {
    let mut config = CampaignConfig {
        scenario: ChannelScenario::new(geom(2), geom(16), geom(4), 2, 2).unwrap(),
        noise: NoiseSettings {
            sigma_sq: 10.0,
            est_noise_sigma_sq: 10.0,
        },
        k_values: vec![1, 2],
        schedules: vec![GridSchedule::new(vec![16, 9], 1).unwrap()],
        methods: vec![Method::Fic, Method::Bas],
        bas_grids: vec![9, 25],
        num_blocks: None,
        trials: 5,
        base_seed: 7,
        output_path: tmp_dir().join("determinism_a.csv"),
        oracle: OracleSpec {
            angle_resolution: 32,
            refine_rounds: 1,
        },
        cache_dir: Some(shared_cache_dir()),
    };
    run_campaign(&config).unwrap();
    let a = std::fs::read(&config.output_path).unwrap();
    config.output_path = tmp_dir().join("determinism_b.csv");
    run_campaign(&config).unwrap();
    let b = std::fs::read(&config.output_path).unwrap();
    verdict("10 (byte-identical campaign reruns)", a == b);
}
