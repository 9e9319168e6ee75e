//! Polar encoding and successive-cancellation decoding.
//!
//! `G_N = F^{⊗n}` with `F = [[1,0],[1,1]]` and no bit reversal, so the
//! butterfly works in place: at every stage the lower half of a block
//! accumulates the upper half.
//!
//! Systematic encoding over an encoding set `C` (the information set, or
//! `A ∪ P_f` with pilots) never inverts anything. With `G_C̄C = 0` and
//! `G_CC` an involution, `u_C = x_C·G_CC`, and `x_C·G_CC` is the `C` part of
//! one butterfly pass over the vector that holds `x_C` and zeros elsewhere.

use alloc::vec;
use alloc::vec::Vec;

use crate::construction::{validate_code_spec, CodeSpec};
use crate::error::{Error, Result};
use crate::pilots::{validate_plan, PilotPlan};
use crate::LLR_MAX;

/// In-place `x = u·G_N` for `N = bits.len()`, a power of two.
pub fn polar_transform(bits: &mut [u8]) {
    let n = bits.len();
    debug_assert!(n.is_power_of_two());
    let mut half = 1;
    while half < n {
        for block in bits.chunks_exact_mut(2 * half) {
            let (lo, hi) = block.split_at_mut(half);
            for (a, b) in lo.iter_mut().zip(hi.iter()) {
                *a ^= *b;
            }
        }
        half *= 2;
    }
}

/// `x = u·G_N` where `u` carries `info_bits` on `A` and the frozen values
/// on `Ā`.
pub fn encode_nonsystematic(spec: &CodeSpec, info_bits: &[u8]) -> Result<Vec<u8>> {
    check_len(spec.k(), info_bits.len())?;
    let mut u = spec.frozen_vector();
    for (pos, &b) in spec.info_set().iter().zip(info_bits) {
        u[pos - 1] = b & 1;
    }
    polar_transform(&mut u);
    Ok(u)
}

/// Systematic encoding: the codeword equals `info_bits` on `A`. The spec is
/// validated on every call; use [`PilotCode`] to validate once.
pub fn encode_systematic(spec: &CodeSpec, info_bits: &[u8]) -> Result<Vec<u8>> {
    PilotCode::systematic(spec.clone())?.encode(info_bits)
}

/// Pilot-aware systematic encoding: payload on `A \ P_i`, pilot values on
/// `P_f ∪ P_i`.
pub fn encode_with_pilots(spec: &CodeSpec, plan: &PilotPlan, info_bits: &[u8]) -> Result<Vec<u8>> {
    PilotCode::new(spec.clone(), plan.clone())?.encode(info_bits)
}

fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, got })
    }
}

/// A validated code plus pilot plan, ready to encode, prepare decoder input
/// and read decisions out.
#[derive(Debug, Clone)]
pub struct PilotCode {
    spec: CodeSpec,
    plan: PilotPlan,
    /// 0-based positions of `C`.
    encoding: Vec<usize>,
    /// 0-based positions of `A \ P_i`, ascending.
    payload: Vec<usize>,
    /// 0-based pilot positions with their bit values.
    pilots: Vec<(usize, u8)>,
    /// Frozen values on `C̄`, zero on `C`.
    frozen: Vec<u8>,
}

impl PilotCode {
    /// Validates the spec (`G_ĀA = 0`, contiguity, involution) and the plan
    /// (all checks of [`validate_plan`]).
    pub fn new(spec: CodeSpec, plan: PilotPlan) -> Result<Self> {
        if !validate_code_spec(&spec).all_pass() {
            return Err(Error::InvalidCodeSpec("information set does not allow efficient systematic encoding"));
        }
        if plan.encoding_set().universe() != spec.block_len() {
            return Err(Error::UniverseMismatch { left: plan.encoding_set().universe(), right: spec.block_len() });
        }
        let report = validate_plan(&spec, &plan)?;
        if !report.all_pass() {
            return Err(Error::InvalidPlan(alloc::format!("{report:?}")));
        }
        let encoding: Vec<usize> = plan.encoding_set().iter().map(|p| p - 1).collect();
        let payload: Vec<usize> = plan.payload_positions(&spec).iter().map(|p| p - 1).collect();
        let pilots: Vec<(usize, u8)> =
            plan.pilot_positions().iter().map(|p| p - 1).zip(plan.pilot_values().iter().copied()).collect();
        let mut frozen = spec.frozen_vector();
        for &c in &encoding {
            frozen[c] = 0;
        }
        Ok(Self { spec, plan, encoding, payload, pilots, frozen })
    }

    /// Plain systematic code without pilots.
    pub fn systematic(spec: CodeSpec) -> Result<Self> {
        let plan = PilotPlan::traditional(&spec, 0);
        Self::new(spec, plan)
    }

    pub fn spec(&self) -> &CodeSpec {
        &self.spec
    }

    pub fn plan(&self) -> &PilotPlan {
        &self.plan
    }

    pub fn block_len(&self) -> usize {
        self.spec.block_len()
    }

    /// Information bits per codeword, `K - |P_i|`.
    pub fn payload_len(&self) -> usize {
        self.payload.len()
    }

    pub fn encode(&self, info_bits: &[u8]) -> Result<Vec<u8>> {
        let mut x = vec![0u8; self.block_len()];
        self.encode_into(info_bits, &mut x)?;
        Ok(x)
    }

    /// Encodes into `out` (length `N`), reusing its storage.
    pub fn encode_into(&self, info_bits: &[u8], out: &mut [u8]) -> Result<()> {
        check_len(self.payload.len(), info_bits.len())?;
        check_len(self.block_len(), out.len())?;
        out.fill(0);
        for (&pos, &b) in self.payload.iter().zip(info_bits) {
            out[pos] = b & 1;
        }
        for &(pos, v) in &self.pilots {
            out[pos] = v;
        }
        // (x_C, 0)·G_N restricted to C is u_C
        polar_transform(out);
        let mut keep = 0;
        for (i, bit) in out.iter_mut().enumerate() {
            if keep < self.encoding.len() && self.encoding[keep] == i {
                keep += 1;
            } else {
                *bit = self.frozen[i];
            }
        }
        polar_transform(out);
        Ok(())
    }

    /// Decoder input for the given channel LLRs (clamped to `±LLR_MAX`).
    ///
    /// Frozen bits always get a prior of `±LLR_MAX` (sign from the frozen
    /// value). `L_f` moves the certainty of frozen pilots from the prior to
    /// the channel side; `L_i` pins the channel side of information pilots.
    /// Modes `L` and `L_i` keep the frozen prior on `P_f`, so they describe
    /// the transmitted codeword only when `P_f` is empty.
    pub fn init_llrs(&self, received: &[f64], mode: LlrMode) -> Result<LlrWord> {
        let n = self.block_len();
        check_len(n, received.len())?;
        let mut channel: Vec<f64> = received.iter().map(|&l| clamp_llr(l)).collect();
        let mut prior = vec![0.0; n];
        for (pos, &v) in self.spec.frozen_set().iter().zip(self.spec.frozen_values()) {
            prior[pos - 1] = certain(v);
        }
        let pinned = |set: &crate::gf2::IndexSet, channel: &mut [f64]| {
            for (&(pos, v), pilot) in self.pilots.iter().zip(self.plan.pilot_positions().iter()) {
                if set.contains(pilot) {
                    channel[pos] = certain(v);
                }
            }
        };
        if matches!(mode, LlrMode::Lf | LlrMode::LfAndI) {
            pinned(self.plan.frozen_pilots(), &mut channel);
            for p in self.plan.frozen_pilots().iter() {
                prior[p - 1] = 0.0;
            }
        }
        if matches!(mode, LlrMode::Li | LlrMode::LfAndI) {
            pinned(self.plan.info_pilots(), &mut channel);
        }
        Ok(LlrWord { channel, prior })
    }

    /// Runs the decoder and reads the payload from the re-encoded decision
    /// `x̂ = û·G_N` at `A \ P_i`.
    pub fn decode(&self, decoder: &mut ScDecoder, llrs: &LlrWord) -> Result<Vec<u8>> {
        let out = decoder.decode(llrs)?;
        Ok(self.payload.iter().map(|&p| out.x_hat[p]).collect())
    }
}

/// `±LLR_MAX` for a known bit.
#[inline]
fn certain(bit: u8) -> f64 {
    if bit & 1 == 0 {
        LLR_MAX
    } else {
        -LLR_MAX
    }
}

#[inline]
pub fn clamp_llr(l: f64) -> f64 {
    l.clamp(-LLR_MAX, LLR_MAX)
}

/// Which pilot knowledge enters the decoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LlrMode {
    /// Frozen priors only.
    L,
    /// Frozen pilots known on the channel side, their priors released.
    Lf,
    /// Information pilots known on the channel side.
    Li,
    /// Both; the operating mode for pilot selection.
    LfAndI,
}

/// Decoder input: channel LLRs on the codeword side and prior LLRs on the
/// source side. Positive means bit 0.
#[derive(Debug, Clone, PartialEq)]
pub struct LlrWord {
    pub channel: Vec<f64>,
    pub prior: Vec<f64>,
}

impl LlrWord {
    /// Number of entries at `±LLR_MAX` on the (prior, channel) sides.
    pub fn clamped_counts(&self) -> (usize, usize) {
        let count = |v: &[f64]| v.iter().filter(|l| l.abs() >= LLR_MAX).count();
        (count(&self.prior), count(&self.channel))
    }
}

/// Decisions of one SC run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScOutput {
    pub u_hat: Vec<u8>,
    /// `û·G_N`.
    pub x_hat: Vec<u8>,
}

/// Successive-cancellation decoder with per-frame scratch buffers; one
/// instance per worker.
#[derive(Debug, Clone)]
pub struct ScDecoder {
    block_len: usize,
    min_sum: bool,
    /// Node LLRs: a node of size `m` keeps its input at `[m, 2m)`.
    alpha: Vec<f64>,
}

impl ScDecoder {
    pub fn new(block_len: usize) -> Result<Self> {
        crate::gf2::log2_exact(block_len)?;
        Ok(Self { block_len, min_sum: false, alpha: vec![0.0; 2 * block_len] })
    }

    /// Replace the exact check-node update by min-sum.
    pub fn with_min_sum(mut self, min_sum: bool) -> Self {
        self.min_sum = min_sum;
        self
    }

    pub fn block_len(&self) -> usize {
        self.block_len
    }

    pub fn decode(&mut self, llrs: &LlrWord) -> Result<ScOutput> {
        let n = self.block_len;
        check_len(n, llrs.channel.len())?;
        check_len(n, llrs.prior.len())?;
        let mut u_hat = vec![0u8; n];
        let mut x_hat = vec![0u8; n];
        self.decode_into(llrs, &mut u_hat, &mut x_hat)?;
        Ok(ScOutput { u_hat, x_hat })
    }

    pub fn decode_into(&mut self, llrs: &LlrWord, u_hat: &mut [u8], x_hat: &mut [u8]) -> Result<()> {
        let n = self.block_len;
        check_len(n, llrs.channel.len())?;
        check_len(n, llrs.prior.len())?;
        check_len(n, u_hat.len())?;
        check_len(n, x_hat.len())?;
        for (a, &l) in self.alpha[n..].iter_mut().zip(&llrs.channel) {
            *a = clamp_llr(l);
        }
        let min_sum = self.min_sum;
        node(&mut self.alpha, n, &llrs.prior, u_hat, x_hat, min_sum);
        Ok(())
    }
}

/// Decodes the subtree whose input LLRs sit at `alpha[m..2m]`; `prior` and
/// `u_hat` are the source-side slices of this subtree, `out` receives the
/// re-encoded bits of size `m`.
fn node(alpha: &mut [f64], m: usize, prior: &[f64], u_hat: &mut [u8], out: &mut [u8], min_sum: bool) {
    if m == 1 {
        let p = prior[0];
        let bit = if p.abs() >= LLR_MAX { p < 0.0 } else { alpha[1] + p < 0.0 };
        u_hat[0] = bit as u8;
        out[0] = bit as u8;
        return;
    }
    let h = m / 2;
    let (lo, hi) = alpha.split_at_mut(m);
    let (parent_l, parent_r) = hi[..m].split_at(h);
    for ((c, &a), &b) in lo[h..].iter_mut().zip(parent_l).zip(parent_r) {
        *c = if min_sum { f_min_sum(a, b) } else { f_exact(a, b) };
    }
    let (prior_l, prior_r) = prior.split_at(h);
    let (u_l, u_r) = u_hat.split_at_mut(h);
    let (out_l, out_r) = out.split_at_mut(h);
    node(alpha, h, prior_l, u_l, out_l, min_sum);

    let (lo, hi) = alpha.split_at_mut(m);
    let (parent_l, parent_r) = hi[..m].split_at(h);
    for (((c, &a), &b), &bit) in lo[h..].iter_mut().zip(parent_l).zip(parent_r).zip(out_l.iter()) {
        *c = g(a, b, bit);
    }
    node(alpha, h, prior_r, u_r, out_r, min_sum);
    for (l, &r) in out_l.iter_mut().zip(out_r.iter()) {
        *l ^= r;
    }
}

/// `2·atanh(tanh(a/2)·tanh(c/2))` in the overflow-free form
/// `sgn·(min(|a|,|c|) + ln(1+e^{-(|a|+|c|)}) - ln(1+e^{-||a|-|c||}))`.
#[inline]
pub fn f_exact(a: f64, c: f64) -> f64 {
    let (x, y) = (a.abs(), c.abs());
    let mag = x.min(y) + libm::log1p(libm::exp(-(x + y))) - libm::log1p(libm::exp(-(x - y).abs()));
    let mag = mag.max(0.0);
    if (a < 0.0) != (c < 0.0) {
        -mag
    } else {
        mag
    }
}

#[inline]
pub fn f_min_sum(a: f64, c: f64) -> f64 {
    let mag = a.abs().min(c.abs());
    if (a < 0.0) != (c < 0.0) {
        -mag
    } else {
        mag
    }
}

/// `c + (1 - 2b)·a`, with `b` the already decided partial sum.
#[inline]
pub fn g(a: f64, c: f64, b: u8) -> f64 {
    if b & 1 == 0 {
        c + a
    } else {
        c - a
    }
}

/// Convenience wrapper: validates, decodes and returns `(û, payload)`.
pub fn sc_decode(spec: &CodeSpec, plan: &PilotPlan, llrs: &LlrWord) -> Result<(Vec<u8>, Vec<u8>)> {
    let code = PilotCode::new(spec.clone(), plan.clone())?;
    let mut decoder = ScDecoder::new(spec.block_len())?;
    let out = decoder.decode(llrs)?;
    let info = code.payload.iter().map(|&p| out.x_hat[p]).collect();
    Ok((out.u_hat, info))
}

/// Channel LLRs of a noiseless BPSK transmission of `x`.
pub fn noiseless_llrs(x: &[u8]) -> Vec<f64> {
    x.iter().map(|&b| certain(b)).collect()
}
