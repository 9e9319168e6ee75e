//! Pilot-aided channel estimation: LS at the pilots, optional MMSE (Wiener)
//! refinement, linear interpolation to the remaining positions, and BPSK
//! LLR formation.

use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::channel::{cholesky, cholesky_solve, jakes_autocorr, noise_n0};
use crate::codec::clamp_llr;
use crate::error::{Error, Result};
use crate::gf2::IndexSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimatorKind {
    Ls,
    Mmse,
    /// The true gains; a reference bound, not an estimator.
    PerfectCsi,
}

impl EstimatorKind {
    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::Ls => "ls",
            EstimatorKind::Mmse => "mmse",
            EstimatorKind::PerfectCsi => "perfect",
        }
    }

    pub fn from_name(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "ls" => Ok(EstimatorKind::Ls),
            "mmse" => Ok(EstimatorKind::Mmse),
            "perfect" | "perfect_csi" => Ok(EstimatorKind::PerfectCsi),
            other => Err(Error::UnknownMethod(other.to_string())),
        }
    }
}

/// Estimator settings. The MMSE filter uses the Jakes correlation of the
/// given Doppler and symbol period, and the noise level `1/(R·Eb/N0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig {
    pub kind: EstimatorKind,
    pub ebno_db: f64,
    pub rate_for_noise: f64,
    pub fd_hz: f64,
    pub symbol_period: f64,
}

impl EstimatorConfig {
    pub fn new(kind: EstimatorKind, ebno_db: f64, rate_for_noise: f64, fd_hz: f64, symbol_period: f64) -> Result<Self> {
        if !(rate_for_noise > 0.0) {
            return Err(Error::InvalidScenario("rate for the noise level must be positive"));
        }
        if !(symbol_period > 0.0) || !(fd_hz >= 0.0) {
            return Err(Error::InvalidScenario("correlation model needs f_d >= 0 and T > 0"));
        }
        Ok(Self { kind, ebno_db, rate_for_noise, fd_hz, symbol_period })
    }

    pub fn n0(&self) -> f64 {
        noise_n0(self.ebno_db, self.rate_for_noise)
    }

    pub fn autocorr(&self, lag: i64) -> f64 {
        jakes_autocorr(lag, self.fd_hz, self.symbol_period)
    }
}

/// `h̃_p = y_p / s_p`.
pub fn ls_estimate(y_pilots: &[Complex64], pilot_symbols: &[f64]) -> Result<Vec<Complex64>> {
    if y_pilots.len() != pilot_symbols.len() {
        return Err(Error::LengthMismatch { expected: pilot_symbols.len(), got: y_pilots.len() });
    }
    y_pilots
        .iter()
        .zip(pilot_symbols)
        .map(|(&y, &s)| if s == 0.0 { Err(Error::ZeroPilotSymbol) } else { Ok(y / s) })
        .collect()
}

/// Precomputed `W = R_hh (R_hh + N0·I)^{-1}` for fixed pilot positions.
#[derive(Debug, Clone, PartialEq)]
pub struct WienerFilter {
    size: usize,
    /// Row-major `size × size`.
    matrix: Vec<f64>,
}

impl WienerFilter {
    /// `positions` are 1-based transmit-stream positions of the pilots.
    pub fn new(positions: &IndexSet, config: &EstimatorConfig) -> Result<Self> {
        let p = positions.len();
        if p == 0 {
            return Err(Error::NoPilots);
        }
        let n0 = config.n0();
        if !(n0 > 0.0) {
            return Err(Error::NonPositiveNoise);
        }
        let pos = positions.as_slice();
        let mut r = vec![0.0; p * p];
        for i in 0..p {
            for j in 0..p {
                r[i * p + j] = config.autocorr(pos[i] as i64 - pos[j] as i64);
            }
        }
        let mut loaded = r.clone();
        for i in 0..p {
            loaded[i * p + i] += n0;
        }
        let l = cholesky(&loaded, p).map_err(|_| Error::Singular(p))?;
        // R and R + N0·I commute, so W = (R + N0·I)^{-1} R: solve column by column
        let mut matrix = vec![0.0; p * p];
        let mut col = vec![0.0; p];
        for j in 0..p {
            for i in 0..p {
                col[i] = r[i * p + j];
            }
            cholesky_solve(&l, p, &mut col);
            for i in 0..p {
                matrix[i * p + j] = col[i];
            }
        }
        Ok(Self { size: p, matrix })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn apply(&self, h_tilde: &[Complex64]) -> Result<Vec<Complex64>> {
        if h_tilde.len() != self.size {
            return Err(Error::LengthMismatch { expected: self.size, got: h_tilde.len() });
        }
        let p = self.size;
        Ok((0..p)
            .map(|i| {
                self.matrix[i * p..(i + 1) * p]
                    .iter()
                    .zip(h_tilde)
                    .fold(Complex64::new(0.0, 0.0), |acc, (&w, &h)| acc + h * w)
            })
            .collect())
    }
}

/// `ĥ_P = R_hh (R_hh + N0·I)^{-1} h̃_P`; builds the filter on every call.
pub fn mmse_estimate(h_tilde: &[Complex64], positions: &IndexSet, config: &EstimatorConfig) -> Result<Vec<Complex64>> {
    WienerFilter::new(positions, config)?.apply(h_tilde)
}

/// Linear interpolation of pilot estimates over `1..=len`, real and
/// imaginary parts separately, holding the nearest pilot value outside the
/// first and last pilot.
pub fn interpolate_linear(positions: &IndexSet, estimates: &[Complex64], len: usize) -> Result<Vec<Complex64>> {
    if positions.is_empty() {
        return Err(Error::NoPilots);
    }
    if positions.len() != estimates.len() {
        return Err(Error::LengthMismatch { expected: positions.len(), got: estimates.len() });
    }
    let pos = positions.as_slice();
    if pos[pos.len() - 1] > len {
        return Err(Error::IndexOutOfRange { index: pos[pos.len() - 1], universe: len });
    }
    let mut out = vec![Complex64::new(0.0, 0.0); len];
    for v in out.iter_mut().take(pos[0]) {
        *v = estimates[0];
    }
    for v in out.iter_mut().skip(pos[pos.len() - 1] - 1) {
        *v = estimates[estimates.len() - 1];
    }
    for (w, e) in pos.windows(2).zip(estimates.windows(2)) {
        let (a, b) = (w[0], w[1]);
        let span = (b - a) as f64;
        for i in a..=b {
            let t = (i - a) as f64 / span;
            out[i - 1] = e[0] * (1.0 - t) + e[1] * t;
        }
    }
    Ok(out)
}

/// `4·Re(conj(ĥ)·y) / N0`, clamped to `±LLR_MAX`.
pub fn channel_llrs(y: &[Complex64], h_hat: &[Complex64], n0: f64) -> Result<Vec<f64>> {
    if y.len() != h_hat.len() {
        return Err(Error::LengthMismatch { expected: h_hat.len(), got: y.len() });
    }
    if !(n0 > 0.0) {
        return Err(Error::NonPositiveNoise);
    }
    Ok(y.iter().zip(h_hat).map(|(y, h)| clamp_llr(4.0 * (h.conj() * y).re / n0)).collect())
}

/// Pilot and full-block estimates of one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelEstimate {
    pub at_pilots: Vec<Complex64>,
    pub full: Vec<Complex64>,
}

/// Estimator for fixed pilot positions, holding the Wiener matrix for MMSE.
#[derive(Debug, Clone)]
pub struct PilotEstimator {
    kind: EstimatorKind,
    positions: IndexSet,
    wiener: Option<WienerFilter>,
}

impl PilotEstimator {
    /// `positions` index the transmit stream (1-based, universe = stream
    /// length). LS and MMSE need at least one pilot.
    pub fn new(config: &EstimatorConfig, positions: IndexSet) -> Result<Self> {
        let wiener = match config.kind {
            EstimatorKind::Mmse => Some(WienerFilter::new(&positions, config)?),
            EstimatorKind::Ls if positions.is_empty() => return Err(Error::NoPilots),
            _ => None,
        };
        Ok(Self { kind: config.kind, positions, wiener })
    }

    pub fn kind(&self) -> EstimatorKind {
        self.kind
    }

    pub fn positions(&self) -> &IndexSet {
        &self.positions
    }

    /// `y` is the whole received stream, `pilot_symbols` the BPSK pilot
    /// values in position order, `true_h` is used only for perfect CSI.
    pub fn estimate(&self, y: &[Complex64], pilot_symbols: &[f64], true_h: &[Complex64]) -> Result<ChannelEstimate> {
        let len = self.positions.universe();
        if y.len() != len {
            return Err(Error::LengthMismatch { expected: len, got: y.len() });
        }
        if self.kind == EstimatorKind::PerfectCsi {
            if true_h.len() != len {
                return Err(Error::LengthMismatch { expected: len, got: true_h.len() });
            }
            let at_pilots = self.positions.iter().map(|p| true_h[p - 1]).collect();
            return Ok(ChannelEstimate { at_pilots, full: true_h.to_vec() });
        }
        let y_p: Vec<Complex64> = self.positions.iter().map(|p| y[p - 1]).collect();
        let ls = ls_estimate(&y_p, pilot_symbols)?;
        let at_pilots = match &self.wiener {
            Some(w) => w.apply(&ls)?,
            None => ls,
        };
        let full = interpolate_linear(&self.positions, &at_pilots, len)?;
        Ok(ChannelEstimate { at_pilots, full })
    }
}
