//! Per-frame link simulation and error/MSE bookkeeping.
//!
//! A [`Link`] owns everything one worker needs: the validated code, an SC
//! decoder, a fading generator with its cached Cholesky factor and the pilot
//! estimator with its cached Wiener matrix. Randomness comes only from the
//! RNG handed to [`Link::run_frame`].

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;

use crate::channel::{bpsk, transmit_into, ChannelRealization, FadingGenerator, FadingScenario};
use crate::codec::{LlrMode, PilotCode, ScDecoder};
use crate::error::{Error, Result};
use crate::estimation::{channel_llrs, EstimatorConfig, EstimatorKind, PilotEstimator};
use crate::gf2::IndexSet;
use crate::pilots::Scheme;

/// 1-based stream positions of `num_pilots` pilots inserted after every
/// `N / num_pilots` coded symbols, in a stream of `N + num_pilots` symbols.
pub fn insertion_positions(block_len: usize, num_pilots: usize) -> Result<Vec<usize>> {
    if num_pilots == 0 {
        return Ok(Vec::new());
    }
    if num_pilots > block_len || !block_len.is_multiple_of(num_pilots) {
        return Err(Error::SpacingInfeasible { pilots: num_pilots, n: block_len });
    }
    let step = block_len / num_pilots + 1;
    Ok((1..=num_pilots).map(|k| k * step).collect())
}

/// Interleaves `pilot_bits` into `code_bits` at `positions` (1-based, ascending).
pub fn insert_pilots(code_bits: &[u8], positions: &[usize], pilot_bits: &[u8]) -> Result<Vec<u8>> {
    if positions.len() != pilot_bits.len() {
        return Err(Error::LengthMismatch { expected: positions.len(), got: pilot_bits.len() });
    }
    let total = code_bits.len() + positions.len();
    let mut out = Vec::with_capacity(total);
    let (mut c, mut p) = (0, 0);
    for i in 1..=total {
        if p < positions.len() && positions[p] == i {
            out.push(pilot_bits[p]);
            p += 1;
        } else if c < code_bits.len() {
            out.push(code_bits[c]);
            c += 1;
        } else {
            return Err(Error::InvalidPlan(alloc::format!("insertion position {} beyond the stream", positions[p])));
        }
    }
    if p != positions.len() {
        return Err(Error::InvalidPlan(alloc::format!("insertion position {} beyond the stream", positions[p])));
    }
    Ok(out)
}

/// Drops the entries at `positions` (1-based, ascending).
pub fn remove_pilots<T: Copy>(stream: &[T], positions: &[usize]) -> Vec<T> {
    let mut p = 0;
    let mut out = Vec::with_capacity(stream.len().saturating_sub(positions.len()));
    for (i, &v) in stream.iter().enumerate() {
        if p < positions.len() && positions[p] == i + 1 {
            p += 1;
        } else {
            out.push(v);
        }
    }
    out
}

/// Result of one simulated frame.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FrameOutcome {
    pub frame_error: bool,
    pub bit_errors: usize,
    pub info_bits: usize,
    /// Sum of `|ĥ - h|²` over pilot positions.
    pub se_pilots: f64,
    pub pilot_count: usize,
    /// Sum of `|ĥ - h|²` over the whole transmitted block.
    pub se_full: f64,
    pub full_count: usize,
}

/// Running totals of a sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Tally {
    pub frames: u64,
    pub frame_errors: u64,
    pub bit_errors: u64,
    pub info_bits: u64,
    pub se_pilots: f64,
    pub pilot_samples: u64,
    pub se_full: f64,
    pub full_samples: u64,
}

impl Tally {
    pub fn add(&mut self, o: &FrameOutcome) {
        self.frames += 1;
        self.frame_errors += o.frame_error as u64;
        self.bit_errors += o.bit_errors as u64;
        self.info_bits += o.info_bits as u64;
        self.se_pilots += o.se_pilots;
        self.pilot_samples += o.pilot_count as u64;
        self.se_full += o.se_full;
        self.full_samples += o.full_count as u64;
    }

    pub fn merge(&mut self, other: &Tally) {
        self.frames += other.frames;
        self.frame_errors += other.frame_errors;
        self.bit_errors += other.bit_errors;
        self.info_bits += other.info_bits;
        self.se_pilots += other.se_pilots;
        self.pilot_samples += other.pilot_samples;
        self.se_full += other.se_full;
        self.full_samples += other.full_samples;
    }

    pub fn fer(&self) -> f64 {
        ratio(self.frame_errors as f64, self.frames)
    }

    pub fn ber(&self) -> f64 {
        ratio(self.bit_errors as f64, self.info_bits)
    }

    pub fn mse_pilots(&self) -> f64 {
        ratio(self.se_pilots, self.pilot_samples)
    }

    pub fn mse_full(&self) -> f64 {
        ratio(self.se_full, self.full_samples)
    }
}

fn ratio(num: f64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num / den as f64
    }
}

/// Stop a point after `min_frame_errors` frame errors or `max_frames` frames.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StopRule {
    pub max_frames: u64,
    pub min_frame_errors: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self { max_frames: 200_000, min_frame_errors: 100 }
    }
}

impl StopRule {
    pub fn new(max_frames: u64, min_frame_errors: u64) -> Result<Self> {
        if max_frames == 0 || min_frame_errors == 0 {
            return Err(Error::InvalidScenario("stop rule needs max_frames >= 1 and min_frame_errors >= 1"));
        }
        Ok(Self { max_frames, min_frame_errors })
    }

    pub fn done(&self, t: &Tally) -> bool {
        t.frames >= self.max_frames || t.frame_errors >= self.min_frame_errors
    }

    /// Frames still allowed before the frame cap.
    pub fn remaining(&self, t: &Tally) -> u64 {
        self.max_frames.saturating_sub(t.frames)
    }
}

/// One worker's transmit/receive chain for a fixed code, plan and operating
/// point.
#[derive(Debug, Clone)]
pub struct Link {
    code: PilotCode,
    mode: LlrMode,
    scenario: FadingScenario,
    generator: FadingGenerator,
    estimator: PilotEstimator,
    decoder: ScDecoder,
    /// Inserted pilot positions in the stream (insertion baseline only).
    inserted: Vec<usize>,
    /// BPSK symbols at the estimator's pilot positions.
    pilot_symbols: Vec<f64>,
    info: Vec<u8>,
    codeword: Vec<u8>,
    stream: Vec<u8>,
    realization: ChannelRealization,
    received: Vec<Complex64>,
}

impl Link {
    /// Noise is scaled with the plan's effective rate (`R_p` for pilot
    /// selection, `R_t` for insertion). Insertion decodes in mode `L`,
    /// pilot selection in `L_f ∪ L_i`.
    pub fn new(
        code: PilotCode,
        fd_hz: f64,
        symbol_period: f64,
        ebno_db: f64,
        estimator: EstimatorKind,
    ) -> Result<Self> {
        let spec = code.spec();
        let plan = code.plan();
        let rate = plan.effective_rate(spec);
        let scenario = FadingScenario::new(fd_hz, symbol_period, ebno_db, rate, 0)?;
        let n = spec.block_len();
        let (inserted, positions, pilot_symbols, mode) = if plan.scheme() == Scheme::TraditionalInsertion {
            let ins = insertion_positions(n, plan.pilot_count())?;
            let total = n + ins.len();
            let positions = IndexSet::new(total, ins.iter().copied())?;
            let symbols = vec![bpsk(0); ins.len()];
            (ins, positions, symbols, LlrMode::L)
        } else {
            let symbols = plan.pilot_values().iter().map(|&b| bpsk(b)).collect();
            (Vec::new(), plan.pilot_positions().clone(), symbols, LlrMode::LfAndI)
        };
        let config = EstimatorConfig::new(estimator, ebno_db, rate, fd_hz, symbol_period)?;
        let estimator = PilotEstimator::new(&config, positions)?;
        let total = n + inserted.len();
        Ok(Self {
            decoder: ScDecoder::new(n)?,
            generator: FadingGenerator::new(&scenario),
            mode,
            scenario,
            estimator,
            inserted,
            pilot_symbols,
            info: vec![0; code.payload_len()],
            codeword: vec![0; n],
            stream: Vec::with_capacity(total),
            realization: ChannelRealization {
                h: vec![Complex64::new(0.0, 0.0); total],
                z_variance: scenario.n0() / 2.0,
            },
            received: vec![Complex64::new(0.0, 0.0); total],
            code,
        })
    }

    pub fn with_mode(mut self, mode: LlrMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_min_sum(mut self, min_sum: bool) -> Self {
        self.decoder = self.decoder.with_min_sum(min_sum);
        self
    }

    pub fn scenario(&self) -> &FadingScenario {
        &self.scenario
    }

    pub fn code(&self) -> &PilotCode {
        &self.code
    }

    /// Symbols per transmitted block.
    pub fn stream_len(&self) -> usize {
        self.received.len()
    }

    /// Simulates one frame. With `decode = false` only the estimation errors
    /// are measured.
    pub fn run_frame<R: Rng + ?Sized>(&mut self, rng: &mut R, decode: bool) -> Result<FrameOutcome> {
        for b in self.info.iter_mut() {
            *b = rng.random::<bool>() as u8;
        }
        self.code.encode_into(&self.info, &mut self.codeword)?;
        let total = self.received.len();
        self.stream.clear();
        if self.inserted.is_empty() {
            self.stream.extend_from_slice(&self.codeword);
        } else {
            let zeros = vec![0u8; self.inserted.len()];
            self.stream = insert_pilots(&self.codeword, &self.inserted, &zeros)?;
        }
        self.generator.generate_into(total, rng, &mut self.realization.h)?;
        transmit_into(&self.stream, &self.realization, rng, &mut self.received)?;

        let est = self.estimator.estimate(&self.received, &self.pilot_symbols, &self.realization.h)?;
        let se_pilots: f64 = self
            .estimator
            .positions()
            .iter()
            .zip(&est.at_pilots)
            .map(|(p, e)| (e - self.realization.h[p - 1]).norm_sqr())
            .sum();
        let se_full: f64 = est.full.iter().zip(&self.realization.h).map(|(e, h)| (e - h).norm_sqr()).sum();
        let mut outcome = FrameOutcome {
            se_pilots,
            pilot_count: self.estimator.positions().len(),
            se_full,
            full_count: total,
            ..FrameOutcome::default()
        };
        if !decode {
            return Ok(outcome);
        }

        let (y, h_hat) = if self.inserted.is_empty() {
            (self.received.clone(), est.full)
        } else {
            (remove_pilots(&self.received, &self.inserted), remove_pilots(&est.full, &self.inserted))
        };
        let llrs = channel_llrs(&y, &h_hat, self.scenario.n0())?;
        let word = self.code.init_llrs(&llrs, self.mode)?;
        let decided = self.code.decode(&mut self.decoder, &word)?;
        let bit_errors = decided.iter().zip(&self.info).filter(|(a, b)| a != b).count();
        outcome.bit_errors = bit_errors;
        outcome.frame_error = bit_errors > 0;
        outcome.info_bits = self.info.len();
        Ok(outcome)
    }
}
