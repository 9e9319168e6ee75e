//! Information-set construction and validation.
//!
//! Bit-channel reliabilities come from one of three proxies: Gaussian
//! approximation density evolution for BPSK over AWGN, the BEC
//! Bhattacharyya recursion, or an externally supplied reliability order.
//! The K most reliable channels form `A`; equal reliabilities are broken
//! toward the larger index.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::gf2::{self, IndexSet};

/// Crossover of the two branches of the GA `φ` approximation. Chosen where
/// the branches intersect so that `φ` stays continuous and decreasing.
pub const PHI_CROSSOVER: f64 = 14.394_352_942_168_442;

#[derive(Debug, Clone, PartialEq)]
pub enum ConstructionMethod {
    /// Gaussian approximation of the LLR mean through the polar transform.
    GaussianApproximation,
    /// `Z⁻ = 2Z - Z²`, `Z⁺ = Z²`. Without an explicit erasure probability the
    /// start value is the BPSK-AWGN Bhattacharyya bound `exp(-R·Eb/N0)`.
    BhattacharyyaBec { erasure_probability: Option<f64> },
    /// 1-based indices, most reliable first; must be a permutation of `1..=N`.
    ExternalOrder(Vec<usize>),
}

impl ConstructionMethod {
    /// Parses the short CLI names `ga` and `bec`. External orders need their
    /// data and are built with [`parse_reliability_order`].
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "ga" | "gaussian_approximation" => Ok(Self::GaussianApproximation),
            "bec" | "bhattacharyya_bec" => Ok(Self::BhattacharyyaBec { erasure_probability: None }),
            other => Err(Error::UnknownMethod(other.to_string())),
        }
    }
}

/// A polar code: block length `N = 2^n`, information set `A` and the values
/// of the frozen bits (ascending over `Ā`).
#[derive(Debug, Clone, PartialEq)]
pub struct CodeSpec {
    n: u32,
    info_set: IndexSet,
    frozen_values: Vec<u8>,
}

impl CodeSpec {
    /// All-zero frozen bits. Structural validity is not checked here; see
    /// [`validate_code_spec`].
    pub fn new(info_set: IndexSet) -> Result<Self> {
        let n = gf2::log2_exact(info_set.universe())?;
        if n > gf2::MAX_KRON_EXPONENT {
            return Err(Error::ExponentOutOfRange { n, max: gf2::MAX_KRON_EXPONENT });
        }
        if info_set.is_empty() {
            return Err(Error::InvalidInfoLength { k: 0, n: info_set.universe() });
        }
        let frozen_len = info_set.universe() - info_set.len();
        Ok(Self { n, info_set, frozen_values: vec![0; frozen_len] })
    }

    pub fn with_frozen_values(mut self, values: Vec<u8>) -> Result<Self> {
        if values.len() != self.frozen_values.len() {
            return Err(Error::LengthMismatch { expected: self.frozen_values.len(), got: values.len() });
        }
        self.frozen_values = values.into_iter().map(|v| v & 1).collect();
        Ok(self)
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn block_len(&self) -> usize {
        1 << self.n
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.info_set.len()
    }

    pub fn rate(&self) -> f64 {
        self.k() as f64 / self.block_len() as f64
    }

    pub fn info_set(&self) -> &IndexSet {
        &self.info_set
    }

    pub fn frozen_set(&self) -> IndexSet {
        self.info_set.complement()
    }

    pub fn frozen_values(&self) -> &[u8] {
        &self.frozen_values
    }

    /// Frozen values laid out over `1..=N` (0 at information positions).
    pub fn frozen_vector(&self) -> Vec<u8> {
        let mut u = vec![0u8; self.block_len()];
        for (pos, &v) in self.frozen_set().iter().zip(&self.frozen_values) {
            u[pos - 1] = v;
        }
        u
    }

    /// `G_ĀA = 0`, checked through cover relations: `A` must be closed
    /// under setting any single zero bit of `i - 1`.
    pub fn is_upward_closed(&self) -> bool {
        is_upward_closed(&self.info_set)
    }
}

pub(crate) fn is_upward_closed(set: &IndexSet) -> bool {
    let size = set.universe();
    let mask = set.mask();
    set.iter().all(|i| {
        let z = i - 1;
        (0..usize::BITS)
            .map(|t| 1usize << t)
            .take_while(|&bit| bit < size)
            .filter(|&bit| z & bit == 0)
            .all(|bit| mask[z | bit])
    })
}

/// Outcome of the three structural checks on a [`CodeSpec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CodeValidation {
    /// `G_ĀA` is all-zero.
    pub frozen_info_zero: bool,
    /// `A` is domination contiguous.
    pub contiguous: bool,
    /// `G_AA · G_AA = I`.
    pub involution: bool,
}

impl CodeValidation {
    pub fn all_pass(&self) -> bool {
        self.frozen_info_zero && self.contiguous && self.involution
    }
}

/// Runs the checks by explicit submatrix extraction and multiplication.
pub fn validate_code_spec(spec: &CodeSpec) -> CodeValidation {
    let g = gf2::kron_power(spec.n()).expect("exponent validated by CodeSpec::new");
    let a = spec.info_set();
    let ac = spec.frozen_set();
    let g_fa = gf2::submatrix(&g, &ac, a).expect("sets lie inside G");
    let g_aa = gf2::submatrix(&g, a, a).expect("sets lie inside G");
    CodeValidation {
        frozen_info_zero: gf2::is_zero(&g_fa),
        contiguous: gf2::is_domination_contiguous(a, spec.n()).expect("sets lie inside G"),
        involution: gf2::is_involution(&g_aa).expect("square by construction"),
    }
}

/// Ranks bit channels by reliability, most reliable first, ties toward the
/// larger index. Returned indices are 1-based.
pub fn rank_by_reliability(reliability: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..reliability.len()).collect();
    idx.sort_by(|&a, &b| match reliability[b].total_cmp(&reliability[a]) {
        Ordering::Equal => b.cmp(&a),
        o => o,
    });
    idx.into_iter().map(|i| i + 1).collect()
}

/// Takes the first `k` entries of a most-reliable-first order.
pub fn info_set_from_order(order: &[usize], k: usize) -> Result<IndexSet> {
    let size = order.len();
    if k == 0 || k > size {
        return Err(Error::InvalidInfoLength { k, n: size });
    }
    IndexSet::new(size, order[..k].iter().copied())
}

/// Builds the code for `(N = 2^n, K)` at a design Eb/N0 in dB.
///
/// The Eb/N0 is converted to the channel SNR with `R = K/N`.
pub fn construct_info_set(n: u32, k: usize, design_ebno_db: f64, method: &ConstructionMethod) -> Result<CodeSpec> {
    if n == 0 || n > gf2::MAX_KRON_EXPONENT {
        return Err(Error::ExponentOutOfRange { n, max: gf2::MAX_KRON_EXPONENT });
    }
    let size = 1usize << n;
    if k == 0 || k > size {
        return Err(Error::InvalidInfoLength { k, n: size });
    }
    if !design_ebno_db.is_finite() {
        return Err(Error::NonFiniteDesignPoint);
    }
    let rate = k as f64 / size as f64;
    let esno = rate * db_to_linear(design_ebno_db);
    let order = match method {
        ConstructionMethod::GaussianApproximation => rank_by_reliability(&ga_llr_means(n, 4.0 * esno)),
        ConstructionMethod::BhattacharyyaBec { erasure_probability } => {
            let z0 = erasure_probability.unwrap_or_else(|| libm::exp(-esno));
            if !(0.0..=1.0).contains(&z0) {
                return Err(Error::InvalidReliabilityOrder("erasure probability outside [0, 1]".into()));
            }
            let z = bec_bhattacharyya(n, z0);
            let neg: Vec<f64> = z.iter().map(|v| -v).collect();
            rank_by_reliability(&neg)
        }
        ConstructionMethod::ExternalOrder(order) => {
            check_permutation(order, size)?;
            order.clone()
        }
    };
    let spec = CodeSpec::new(info_set_from_order(&order, k)?)?;
    if !spec.is_upward_closed() {
        return Err(Error::InvalidCodeSpec("reliability order yields G_ĀA != 0"));
    }
    Ok(spec)
}

fn check_permutation(order: &[usize], size: usize) -> Result<()> {
    if order.len() != size {
        return Err(Error::InvalidReliabilityOrder(alloc::format!("expected {size} entries, found {}", order.len())));
    }
    let mut seen = vec![false; size];
    for &i in order {
        if i == 0 || i > size || core::mem::replace(&mut seen[i - 1], true) {
            return Err(Error::InvalidReliabilityOrder(alloc::format!("bad or repeated index {i}")));
        }
    }
    Ok(())
}

/// Parses the reliability-order text format: one 1-based index per line,
/// most reliable first. Blank lines and `#` comments are skipped.
pub fn parse_reliability_order(text: &str) -> Result<Vec<usize>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.parse::<usize>().map_err(|e| Error::InvalidReliabilityOrder(alloc::format!("`{l}`: {e}"))))
        .collect()
}

pub fn format_reliability_order(order: &[usize]) -> String {
    let mut s = String::new();
    for i in order {
        s.push_str(&i.to_string());
        s.push('\n');
    }
    s
}

#[inline]
pub fn db_to_linear(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}

/// Bhattacharyya parameters of the `2^n` bit channels of a BEC(`z0`).
/// Index `i` (0-based) gets the transform sequence read from its bits,
/// most significant first; a 0 bit is the degraded branch.
pub fn bec_bhattacharyya(n: u32, z0: f64) -> Vec<f64> {
    polarize(n, z0, |z| 2.0 * z - z * z, |z| z * z)
}

/// Mean LLR of each bit channel under the Gaussian approximation, starting
/// from channel LLR mean `mu0` (`4·Es/N0` for BPSK).
pub fn ga_llr_means(n: u32, mu0: f64) -> Vec<f64> {
    polarize(n, mu0, ga_check_node, |m| 2.0 * m)
}

fn polarize(n: u32, start: f64, minus: impl Fn(f64) -> f64, plus: impl Fn(f64) -> f64) -> Vec<f64> {
    let mut cur = vec![start];
    for _ in 0..n {
        let mut next = Vec::with_capacity(cur.len() * 2);
        for &v in &cur {
            next.push(minus(v));
            next.push(plus(v));
        }
        cur = next;
    }
    cur
}

/// `ln φ(x)` for the two-branch approximation
///
/// ```text
/// φ(x) = exp(-0.4527 x^0.86 + 0.0218)               x <  PHI_CROSSOVER
///      = sqrt(π/x) · exp(-x/4) · (1 - 10/(7x))       x >= PHI_CROSSOVER
/// ```
///
/// capped at 0 (φ ≤ 1). Working in the log domain keeps large means from
/// underflowing.
pub fn ln_phi(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x < PHI_CROSSOVER {
        (-0.4527 * libm::pow(x, 0.86) + 0.0218).min(0.0)
    } else {
        0.5 * libm::log(core::f64::consts::PI / x) - x / 4.0 + libm::log(1.0 - 10.0 / (7.0 * x))
    }
}

/// Inverse of [`ln_phi`] by bisection; monotone in `target`.
pub fn ln_phi_inverse(target: f64) -> f64 {
    if target >= 0.0 {
        return 0.0;
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while ln_phi(hi) > target {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if ln_phi(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Check-node GA update: `φ⁻¹(1 - (1 - φ(μ))²)`, evaluated as
/// `φ⁻¹(φ(μ)·(2 - φ(μ)))` in the log domain.
pub fn ga_check_node(mu: f64) -> f64 {
    let l = ln_phi(mu);
    let t = l + libm::log(2.0 - libm::exp(l));
    ln_phi_inverse(t)
}
