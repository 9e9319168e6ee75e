//! Flat `key = value` experiment configuration.
//!
//! One setting per line, `#` starts a comment. List-valued keys
//! (`ebno_db`, `fd_hz`) take comma-separated values; the sweep is their
//! cartesian product, Doppler-major.
//!
//! ```text
//! scheme = eps
//! n = 256
//! k = 147
//! pilots = 64
//! info_pilots = 45
//! estimator = mmse
//! fd_hz = 50
//! ebno_db = 4, 6, 8, 10
//! ```

use std::path::PathBuf;
use std::str::FromStr;

use polar_pilot_core::estimation::EstimatorKind;
use polar_pilot_core::pilots::Scheme;
use polar_pilot_core::sim::StopRule;

use crate::HarnessError;

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scheme: Scheme,
    /// Block length `N`.
    pub n: usize,
    pub k: usize,
    /// Total pilot count `K_p`.
    pub pilots: usize,
    /// Pilots inside `A`. For UEPS this fixes the split of `pilots`; for EPS
    /// the plan takes all of `D_f` plus this many from `D_i`.
    pub info_pilots: Option<usize>,
    pub design_ebno_db: f64,
    /// `ga` or `bec`; ignored when `reliability_order` is set.
    pub method: String,
    pub reliability_order: Option<PathBuf>,
    pub estimator: EstimatorKind,
    pub fd_hz: Vec<f64>,
    pub ebno_db: Vec<f64>,
    pub symbol_rate: f64,
    pub stop: StopRule,
    pub seed: u64,
    pub workers: usize,
    /// Frames per worker between stop-rule checks.
    pub batch: u64,
    pub min_sum: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scheme: Scheme::Eps,
            n: 256,
            k: 128,
            pilots: 64,
            info_pilots: None,
            design_ebno_db: 3.0,
            method: "ga".into(),
            reliability_order: None,
            estimator: EstimatorKind::Mmse,
            fd_hz: vec![50.0],
            ebno_db: vec![10.0],
            symbol_rate: 256_000.0,
            stop: StopRule::default(),
            seed: 1,
            workers: 1,
            batch: 200,
            min_sum: false,
        }
    }
}

impl ExperimentConfig {
    /// Sweep points `(fd_hz, ebno_db)` in run order.
    pub fn sweep(&self) -> Vec<(f64, f64)> {
        self.fd_hz.iter().flat_map(|&fd| self.ebno_db.iter().map(move |&eb| (fd, eb))).collect()
    }

    pub fn symbol_period(&self) -> f64 {
        1.0 / self.symbol_rate
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |msg: &str| Err(HarnessError::Config { line: 0, message: msg.into() });
        if self.fd_hz.is_empty() || self.ebno_db.is_empty() {
            return bad("sweep is empty");
        }
        if self.workers == 0 {
            return bad("workers must be at least 1");
        }
        if self.batch == 0 {
            return bad("batch must be at least 1");
        }
        if !(self.symbol_rate > 0.0) {
            return bad("symbol_rate must be positive");
        }
        if self.stop.max_frames == 0 || self.stop.min_frame_errors == 0 {
            return bad("max_frames and min_frame_errors must be at least 1");
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let mut cfg = Self::default();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| HarnessError::Config { line: line_no, message };
            let (key, value) =
                line.split_once('=').ok_or_else(|| err(format!("expected key = value, got `{line}`")))?;
            let (key, value) = (key.trim(), value.trim());
            cfg.set(key, value).map_err(err)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Applies one setting; the error is a message without location.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "scheme" => self.scheme = Scheme::from_name(value).ok_or_else(|| format!("unknown scheme `{value}`"))?,
            "n" => self.n = num(key, value)?,
            "k" => self.k = num(key, value)?,
            "pilots" => self.pilots = num(key, value)?,
            "info_pilots" => self.info_pilots = Some(num(key, value)?),
            "design_ebno_db" => self.design_ebno_db = num(key, value)?,
            "method" => self.method = value.to_string(),
            "reliability_order" => self.reliability_order = Some(PathBuf::from(value)),
            "estimator" => self.estimator = EstimatorKind::from_name(value).map_err(|e| e.to_string())?,
            "fd_hz" => self.fd_hz = list(key, value)?,
            "ebno_db" => self.ebno_db = list(key, value)?,
            "symbol_rate" => self.symbol_rate = num(key, value)?,
            "max_frames" => self.stop.max_frames = num(key, value)?,
            "min_frame_errors" => self.stop.min_frame_errors = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            "workers" => self.workers = num(key, value)?,
            "batch" => self.batch = num(key, value)?,
            "min_sum" => self.min_sum = num(key, value)?,
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }
}

fn num<T: FromStr>(key: &str, value: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    value.parse().map_err(|e| format!("{key}: cannot parse `{value}`: {e}"))
}

fn list(key: &str, value: &str) -> Result<Vec<f64>, String> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty()).map(|s| num(key, s)).collect()
}
