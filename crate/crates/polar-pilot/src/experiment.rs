//! Monte-Carlo FER/BER/MSE sweeps.
//!
//! Each worker owns a [`Link`] and a ChaCha8 stream seeded with
//! `seed + worker index`. Work proceeds in rounds: every worker simulates
//! its share of the round, the shares are merged in worker order and the
//! stop rule is checked. The result depends only on the configuration,
//! the seed and the worker count, never on thread scheduling.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use polar_pilot_core::codec::PilotCode;
use polar_pilot_core::construction::{
    construct_info_set, info_set_from_order, parse_reliability_order, validate_code_spec, CodeSpec, ConstructionMethod,
};
use polar_pilot_core::pilots::{compute_d, select_eps, select_ueps, select_ueps_split, PilotPlan, Scheme};
use polar_pilot_core::sim::{Link, StopRule, Tally};

use crate::config::ExperimentConfig;
use crate::HarnessError;

/// One CSV row per sweep point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub scheme: String,
    pub estimator: String,
    pub fd_hz: f64,
    pub ebno_db: f64,
    pub frames: u64,
    pub frame_errors: u64,
    pub fer: f64,
    pub bit_errors: u64,
    pub ber: f64,
    pub mse_pilots: f64,
    pub mse_full: f64,
    pub throughput: f64,
    pub wall_time_s: f64,
}

impl ResultRow {
    /// The point stopped on the frame cap rather than on the error count.
    pub fn hit_frame_cap(&self, stop: &StopRule) -> bool {
        self.frames >= stop.max_frames && self.frame_errors < stop.min_frame_errors
    }
}

/// Code from the configured construction.
pub fn build_spec(cfg: &ExperimentConfig) -> Result<CodeSpec, HarnessError> {
    if !cfg.n.is_power_of_two() || cfg.n < 2 {
        return Err(polar_pilot_core::Error::NotPowerOfTwo(cfg.n).into());
    }
    let n = cfg.n.trailing_zeros();
    let spec = match &cfg.reliability_order {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let order = parse_reliability_order(&text)?;
            construct_info_set(n, cfg.k, cfg.design_ebno_db, &ConstructionMethod::ExternalOrder(order))?
        }
        None => construct_info_set(n, cfg.k, cfg.design_ebno_db, &ConstructionMethod::from_name(&cfg.method)?)?,
    };
    Ok(spec)
}

/// Reads a reliability-order file and takes its first `k` entries.
pub fn info_set_from_file(path: &std::path::Path, k: usize) -> Result<polar_pilot_core::IndexSet, HarnessError> {
    let order = parse_reliability_order(&std::fs::read_to_string(path)?)?;
    Ok(info_set_from_order(&order, k)?)
}

/// Pilot plan for the configured scheme and counts.
pub fn build_plan(
    spec: &CodeSpec,
    scheme: Scheme,
    pilots: usize,
    info_pilots: Option<usize>,
) -> Result<PilotPlan, HarnessError> {
    let plan = match (scheme, info_pilots) {
        (Scheme::Ueps, None) => select_ueps(spec, pilots)?,
        (Scheme::Ueps, Some(i)) => {
            let frozen = pilots
                .checked_sub(i)
                .ok_or(polar_pilot_core::Error::TooManyPilots { requested: i, available: pilots })?;
            select_ueps_split(spec, frozen, i)?
        }
        (Scheme::Eps, None) => select_eps(spec, pilots)?,
        (Scheme::Eps, Some(i)) => {
            let d = compute_d(spec.block_len())?;
            let d_f = d.difference(spec.info_set())?.len();
            select_eps(spec, d_f + i)?
        }
        (Scheme::TraditionalInsertion, _) => PilotPlan::traditional(spec, pilots),
    };
    Ok(plan)
}

/// Validated code and plan of a configuration.
pub fn build_code(cfg: &ExperimentConfig) -> Result<PilotCode, HarnessError> {
    let spec = build_spec(cfg)?;
    if !validate_code_spec(&spec).all_pass() {
        return Err(polar_pilot_core::Error::InvalidCodeSpec("constructed information set fails validation").into());
    }
    let plan = build_plan(&spec, cfg.scheme, cfg.pilots, cfg.info_pilots)?;
    Ok(PilotCode::new(spec, plan)?)
}

/// Runs one sweep point to the stop rule.
pub fn run_point(
    cfg: &ExperimentConfig,
    code: &PilotCode,
    fd_hz: f64,
    ebno_db: f64,
    decode: bool,
    pool: &rayon::ThreadPool,
) -> Result<Tally, HarnessError> {
    let mut links = (0..cfg.workers)
        .map(|_| {
            Link::new(code.clone(), fd_hz, cfg.symbol_period(), ebno_db, cfg.estimator)
                .map(|l| l.with_min_sum(cfg.min_sum))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut rngs: Vec<ChaCha8Rng> =
        (0..cfg.workers as u64).map(|w| ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(w))).collect();
    let mut total = Tally::default();
    let workers = cfg.workers as u64;
    loop {
        let done = if decode { cfg.stop.done(&total) } else { total.frames >= cfg.stop.max_frames };
        if done {
            break;
        }
        let round = cfg.stop.remaining(&total).min(cfg.batch * workers);
        let quotas: Vec<u64> = (0..workers).map(|w| round / workers + u64::from(w < round % workers)).collect();
        let parts: Vec<Result<Tally, HarnessError>> = pool.install(|| {
            links
                .par_iter_mut()
                .zip(rngs.par_iter_mut())
                .zip(quotas.par_iter())
                .map(|((link, rng), &quota)| {
                    let mut t = Tally::default();
                    for _ in 0..quota {
                        t.add(&link.run_frame(rng, decode)?);
                    }
                    Ok(t)
                })
                .collect()
        });
        for part in parts {
            total.merge(&part?);
        }
    }
    Ok(total)
}

fn sweep(cfg: &ExperimentConfig, decode: bool, timing: bool) -> Result<Vec<ResultRow>, HarnessError> {
    cfg.validate()?;
    let code = build_code(cfg)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build()?;
    let throughput = code.plan().effective_rate(code.spec());
    cfg.sweep()
        .into_iter()
        .map(|(fd_hz, ebno_db)| {
            let start = Instant::now();
            let t = run_point(cfg, &code, fd_hz, ebno_db, decode, &pool)?;
            Ok(ResultRow {
                scheme: cfg.scheme.name().into(),
                estimator: cfg.estimator.name().into(),
                fd_hz,
                ebno_db,
                frames: t.frames,
                frame_errors: t.frame_errors,
                fer: t.fer(),
                bit_errors: t.bit_errors,
                ber: t.ber(),
                mse_pilots: t.mse_pilots(),
                mse_full: t.mse_full(),
                throughput,
                wall_time_s: if timing { start.elapsed().as_secs_f64() } else { 0.0 },
            })
        })
        .collect()
}

/// FER/BER sweep; every point runs until `min_frame_errors` or
/// `max_frames`.
pub fn run_fer(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>, HarnessError> {
    sweep(cfg, true, true)
}

/// Channel-estimation MSE sweep; every point runs `max_frames` frames
/// without decoding.
pub fn run_mse(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>, HarnessError> {
    sweep(cfg, false, true)
}

/// As [`run_fer`] / [`run_mse`] with `wall_time_s` fixed to zero so that
/// repeated runs produce identical output.
pub fn run_untimed(cfg: &ExperimentConfig, decode: bool) -> Result<Vec<ResultRow>, HarnessError> {
    sweep(cfg, decode, false)
}
