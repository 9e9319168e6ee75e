//! Flat correlated Rayleigh fading with BPSK and complex AWGN.
//!
//! `y_i = h_i·s_i + z_i` with `s_i = 1 - 2x_i`. The gains form a zero-mean
//! circularly symmetric complex Gaussian vector with unit power and
//! covariance `J0(2π f_d |i-j| T)`, drawn through a Cholesky factor of the
//! diagonally loaded covariance. Every block is drawn independently.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::construction::db_to_linear;
use crate::error::{Error, Result};

/// Diagonal loading added to the fading covariance before factorisation.
pub const COVARIANCE_LOADING: f64 = 1e-9;

/// Bessel function of the first kind, order zero.
///
/// Power series up to `|x| = 2`, Miller's backward recurrence with the
/// normalisation `J0 + 2ΣJ_{2k} = 1` beyond.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x <= 2.0 {
        let q = -x * x / 4.0;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..40 {
            term *= q / ((k * k) as f64);
            sum += term;
            if term.abs() < 1e-18 {
                break;
            }
        }
        return sum;
    }
    let start = 2 * ((x + 30.0 + 12.0 * libm::sqrt(x)) as usize / 2);
    let mut next = 0.0; // J_{k+1}
    let mut cur = 1e-300; // J_k
    let mut norm = 0.0;
    let mut j0 = 0.0;
    for k in (1..=start).rev() {
        let prev = 2.0 * k as f64 / x * cur - next;
        next = cur;
        cur = prev;
        // cur now holds J_{k-1}
        if (k - 1) % 2 == 0 && k > 1 {
            norm += 2.0 * cur;
        }
        if k == 1 {
            j0 = cur;
        }
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
        }
    }
    j0 / (norm + j0)
}

/// `J0(2π f_d |k| T)`.
pub fn jakes_autocorr(lag: i64, fd_hz: f64, symbol_period: f64) -> f64 {
    bessel_j0(2.0 * PI * fd_hz * lag.unsigned_abs() as f64 * symbol_period)
}

/// One operating point of the channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FadingScenario {
    fd_hz: f64,
    symbol_period: f64,
    ebno_db: f64,
    effective_rate: f64,
    seed: u64,
}

impl FadingScenario {
    pub fn new(fd_hz: f64, symbol_period: f64, ebno_db: f64, effective_rate: f64, seed: u64) -> Result<Self> {
        if !(fd_hz >= 0.0 && fd_hz.is_finite()) {
            return Err(Error::InvalidScenario("Doppler frequency must be finite and non-negative"));
        }
        if !(symbol_period > 0.0 && symbol_period.is_finite()) {
            return Err(Error::InvalidScenario("symbol period must be positive"));
        }
        if !(effective_rate > 0.0 && effective_rate <= 1.0) {
            return Err(Error::InvalidScenario("effective rate must lie in (0, 1]"));
        }
        if ebno_db.is_nan() {
            return Err(Error::InvalidScenario("Eb/N0 is NaN"));
        }
        Ok(Self { fd_hz, symbol_period, ebno_db, effective_rate, seed })
    }

    /// Symbol period from a symbol rate in symbols per second.
    pub fn from_symbol_rate(
        fd_hz: f64,
        symbol_rate: f64,
        ebno_db: f64,
        effective_rate: f64,
        seed: u64,
    ) -> Result<Self> {
        Self::new(fd_hz, 1.0 / symbol_rate, ebno_db, effective_rate, seed)
    }

    pub fn with_ebno_db(self, ebno_db: f64) -> Result<Self> {
        Self::new(self.fd_hz, self.symbol_period, ebno_db, self.effective_rate, self.seed)
    }

    pub fn fd_hz(&self) -> f64 {
        self.fd_hz
    }

    pub fn symbol_period(&self) -> f64 {
        self.symbol_period
    }

    pub fn ebno_db(&self) -> f64 {
        self.ebno_db
    }

    pub fn effective_rate(&self) -> f64 {
        self.effective_rate
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// `N0 = 1 / (R·Eb/N0)` for unit symbol energy.
    pub fn n0(&self) -> f64 {
        noise_n0(self.ebno_db, self.effective_rate)
    }

    pub fn autocorr(&self, lag: i64) -> f64 {
        jakes_autocorr(lag, self.fd_hz, self.symbol_period)
    }
}

/// `N0 = 1 / (R·10^{Eb/N0 / 10})`.
pub fn noise_n0(ebno_db: f64, rate: f64) -> f64 {
    1.0 / (rate * db_to_linear(ebno_db))
}

/// Fading gains of one block and the noise variance per real dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    pub h: Vec<Complex64>,
    pub z_variance: f64,
}

/// Draws fading blocks for a fixed Doppler and symbol period. Cholesky
/// factors are cached per block length.
#[derive(Debug, Clone)]
pub struct FadingGenerator {
    fd_hz: f64,
    symbol_period: f64,
    factors: BTreeMap<usize, Vec<f64>>,
}

impl FadingGenerator {
    pub fn new(scenario: &FadingScenario) -> Self {
        Self { fd_hz: scenario.fd_hz, symbol_period: scenario.symbol_period, factors: BTreeMap::new() }
    }

    /// Row-major lower Cholesky factor of the loaded covariance of `len`
    /// consecutive symbols.
    pub fn factor(&mut self, len: usize) -> Result<&[f64]> {
        if !self.factors.contains_key(&len) {
            let r: Vec<f64> = (0..len).map(|k| jakes_autocorr(k as i64, self.fd_hz, self.symbol_period)).collect();
            let mut cov = vec![0.0; len * len];
            for i in 0..len {
                for j in 0..len {
                    cov[i * len + j] = r[i.abs_diff(j)];
                }
                cov[i * len + i] += COVARIANCE_LOADING;
            }
            let l = cholesky(&cov, len)?;
            self.factors.insert(len, l);
        }
        Ok(&self.factors[&len])
    }

    /// Gains for `len` symbols. The noise variance is `N0/2` of the scenario.
    pub fn generate<R: Rng + ?Sized>(
        &mut self,
        scenario: &FadingScenario,
        len: usize,
        rng: &mut R,
    ) -> Result<ChannelRealization> {
        let mut h = vec![Complex64::new(0.0, 0.0); len];
        self.generate_into(len, rng, &mut h)?;
        Ok(ChannelRealization { h, z_variance: scenario.n0() / 2.0 })
    }

    pub fn generate_into<R: Rng + ?Sized>(&mut self, len: usize, rng: &mut R, h: &mut [Complex64]) -> Result<()> {
        if len == 0 {
            return Err(Error::InvalidScenario("fading block must have at least one symbol"));
        }
        if h.len() != len {
            return Err(Error::LengthMismatch { expected: len, got: h.len() });
        }
        let scale = core::f64::consts::FRAC_1_SQRT_2;
        let w: Vec<Complex64> = (0..len)
            .map(|_| {
                let re: f64 = StandardNormal.sample(rng);
                let im: f64 = StandardNormal.sample(rng);
                Complex64::new(re * scale, im * scale)
            })
            .collect();
        let l = self.factor(len)?;
        for (i, out) in h.iter_mut().enumerate() {
            let row = &l[i * len..i * len + i + 1];
            *out = row.iter().zip(&w).fold(Complex64::new(0.0, 0.0), |acc, (&c, &z)| acc + z * c);
        }
        Ok(())
    }
}

/// Lower Cholesky factor (row-major) of a symmetric positive definite
/// matrix. Fails with the first non-positive pivot.
pub fn cholesky(a: &[f64], n: usize) -> Result<Vec<f64>> {
    if a.len() != n * n {
        return Err(Error::DimensionMismatch("cholesky input is not n x n"));
    }
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let dot: f64 = (0..j).map(|k| l[i * n + k] * l[j * n + k]).sum();
            let v = a[i * n + j] - dot;
            if i == j {
                if !(v > 0.0) {
                    return Err(Error::NotPositiveDefinite(i));
                }
                l[i * n + i] = libm::sqrt(v);
            } else {
                l[i * n + j] = v / l[j * n + j];
            }
        }
    }
    Ok(l)
}

/// Solves `L·Lᵀ·x = b` in place given the factor from [`cholesky`].
pub fn cholesky_solve<T>(l: &[f64], n: usize, b: &mut [T])
where
    T: Copy + core::ops::Sub<Output = T> + core::ops::Mul<f64, Output = T> + core::ops::Div<f64, Output = T>,
{
    for i in 0..n {
        let mut v = b[i];
        for k in 0..i {
            v = v - b[k] * l[i * n + k];
        }
        b[i] = v / l[i * n + i];
    }
    for i in (0..n).rev() {
        let mut v = b[i];
        for k in i + 1..n {
            v = v - b[k] * l[k * n + i];
        }
        b[i] = v / l[i * n + i];
    }
}

/// BPSK over the faded channel: `y_i = h_i·(1 - 2x_i) + z_i`, with
/// `Re z`, `Im z` of variance `z_variance`.
pub fn transmit<R: Rng + ?Sized>(x: &[u8], realization: &ChannelRealization, rng: &mut R) -> Result<Vec<Complex64>> {
    let mut y = vec![Complex64::new(0.0, 0.0); x.len()];
    transmit_into(x, realization, rng, &mut y)?;
    Ok(y)
}

pub fn transmit_into<R: Rng + ?Sized>(
    x: &[u8],
    realization: &ChannelRealization,
    rng: &mut R,
    y: &mut [Complex64],
) -> Result<()> {
    if x.len() != realization.h.len() {
        return Err(Error::LengthMismatch { expected: realization.h.len(), got: x.len() });
    }
    if y.len() != x.len() {
        return Err(Error::LengthMismatch { expected: x.len(), got: y.len() });
    }
    let sd = libm::sqrt(realization.z_variance);
    for ((out, &bit), &h) in y.iter_mut().zip(x).zip(&realization.h) {
        let s = bpsk(bit);
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        *out = h * s + Complex64::new(re * sd, im * sd);
    }
    Ok(())
}

/// `0 → +1`, `1 → -1`.
#[inline]
pub fn bpsk(bit: u8) -> f64 {
    1.0 - 2.0 * (bit & 1) as f64
}
