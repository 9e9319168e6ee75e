//! Pilot selection from coded symbols.
//!
//! Pilots taken from the frozen part `P_f ⊆ Ā` turn their `u` bits from
//! frozen into solved bits, so the encoder works over `C = A ∪ P_f`. The
//! selection stays efficiently encodable exactly when `G_C̄C = 0`. Two
//! selections guarantee that:
//!
//! * UEPS: `P_f ⊆ S`, the frozen positions whose column inside the frozen
//!   rows of `G_N` has weight one.
//! * EPS: `P_f = D ∩ Ā` with `D = {4, 8, …, N}`; `G_D̄D = 0` for every `N`.
//!
//! Pilots inside `A` (`P_i`) are free in both cases; they replace
//! information bits.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::construction::CodeSpec;
use crate::error::{Error, Result};
use crate::gf2::{self, IndexSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Ueps,
    Eps,
    /// Extra pilot symbols inserted between coded symbols; the code itself
    /// carries no pilots.
    TraditionalInsertion,
}

impl Scheme {
    pub fn name(self) -> &'static str {
        match self {
            Scheme::Ueps => "ueps",
            Scheme::Eps => "eps",
            Scheme::TraditionalInsertion => "traditional",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "ueps" => Some(Scheme::Ueps),
            "eps" => Some(Scheme::Eps),
            "traditional" | "traditional_insertion" | "insertion" => Some(Scheme::TraditionalInsertion),
            _ => None,
        }
    }
}

/// Pilot positions for one code plus the derived encoding set `C`.
#[derive(Debug, Clone, PartialEq)]
pub struct PilotPlan {
    scheme: Scheme,
    frozen_pilots: IndexSet,
    info_pilots: IndexSet,
    pilot_positions: IndexSet,
    pilot_values: Vec<u8>,
    encoding_set: IndexSet,
    inserted_pilots: usize,
}

impl PilotPlan {
    /// Checks `P_f ⊆ Ā`, `P_i ⊆ A` (disjointness follows) and builds
    /// `C = A ∪ P_f`. Pilot values default to zero.
    pub fn new(scheme: Scheme, spec: &CodeSpec, frozen_pilots: IndexSet, info_pilots: IndexSet) -> Result<Self> {
        let a = spec.info_set();
        if frozen_pilots.universe() != spec.block_len() || info_pilots.universe() != spec.block_len() {
            return Err(Error::InvalidPlan(format!("pilot sets must live in 1..={}", spec.block_len())));
        }
        if let Some(p) = frozen_pilots.iter().find(|&p| a.contains(p)) {
            return Err(Error::InvalidPlan(format!("frozen pilot {p} lies in A")));
        }
        if let Some(p) = info_pilots.iter().find(|&p| !a.contains(p)) {
            return Err(Error::InvalidPlan(format!("information pilot {p} lies outside A")));
        }
        if scheme == Scheme::TraditionalInsertion && !(frozen_pilots.is_empty() && info_pilots.is_empty()) {
            return Err(Error::InvalidPlan("pilot insertion carries no pilots inside the codeword".into()));
        }
        let pilot_positions = frozen_pilots.union(&info_pilots)?;
        let encoding_set = a.union(&frozen_pilots)?;
        let count = pilot_positions.len();
        Ok(Self {
            scheme,
            frozen_pilots,
            info_pilots,
            pilot_positions,
            pilot_values: vec![0; count],
            encoding_set,
            inserted_pilots: 0,
        })
    }

    /// Plan for the pilot-insertion baseline: the codeword is plain
    /// systematic and `inserted` pilot symbols travel beside it.
    pub fn traditional(spec: &CodeSpec, inserted: usize) -> Self {
        let empty = IndexSet::empty(spec.block_len());
        let mut plan = Self::new(Scheme::TraditionalInsertion, spec, empty.clone(), empty)
            .expect("empty pilot sets are always valid");
        plan.inserted_pilots = inserted;
        plan
    }

    /// Values over [`Self::pilot_positions`], ascending.
    pub fn with_pilot_values(mut self, values: Vec<u8>) -> Result<Self> {
        if values.len() != self.pilot_positions.len() {
            return Err(Error::LengthMismatch { expected: self.pilot_positions.len(), got: values.len() });
        }
        self.pilot_values = values.into_iter().map(|v| v & 1).collect();
        Ok(self)
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    /// `P_f`.
    pub fn frozen_pilots(&self) -> &IndexSet {
        &self.frozen_pilots
    }

    /// `P_i`.
    pub fn info_pilots(&self) -> &IndexSet {
        &self.info_pilots
    }

    /// `P_f ∪ P_i`.
    pub fn pilot_positions(&self) -> &IndexSet {
        &self.pilot_positions
    }

    pub fn pilot_values(&self) -> &[u8] {
        &self.pilot_values
    }

    /// `C = A ∪ P_f`.
    pub fn encoding_set(&self) -> &IndexSet {
        &self.encoding_set
    }

    /// Pilot symbols per block: selected pilots, or inserted ones for the
    /// insertion baseline.
    pub fn pilot_count(&self) -> usize {
        match self.scheme {
            Scheme::TraditionalInsertion => self.inserted_pilots,
            _ => self.pilot_positions.len(),
        }
    }

    /// Information bits carried per block, `K - |P_i|`.
    pub fn payload_len(&self, spec: &CodeSpec) -> usize {
        spec.k() - self.info_pilots.len()
    }

    /// Transmitted symbols per block.
    pub fn transmit_len(&self, spec: &CodeSpec) -> usize {
        spec.block_len() + if self.scheme == Scheme::TraditionalInsertion { self.inserted_pilots } else { 0 }
    }

    /// Information bits per transmitted symbol: `R_p` for pilot selection,
    /// `R_t` for insertion.
    pub fn effective_rate(&self, spec: &CodeSpec) -> f64 {
        self.payload_len(spec) as f64 / self.transmit_len(spec) as f64
    }

    /// Information positions that carry payload, `A \ P_i`.
    pub fn payload_positions(&self, spec: &CodeSpec) -> IndexSet {
        spec.info_set().difference(&self.info_pilots).expect("same universe")
    }
}

/// `S = { j ∈ Ā : w(G_{Ā, j}) = 1 }`. Column `j` of the frozen rows has a
/// one in row `i` iff `(i-1) ⪰ (j-1)`, and always on the diagonal, so `j`
/// qualifies when no other frozen index dominates it.
pub fn compute_s(spec: &CodeSpec) -> IndexSet {
    let frozen = spec.frozen_set();
    let zero_based: Vec<usize> = frozen.iter().map(|i| i - 1).collect();
    let members = zero_based
        .iter()
        .filter(|&&j| zero_based.iter().filter(|&&i| gf2::dominates_unchecked(i, j)).count() == 1)
        .map(|&j| j + 1);
    IndexSet::new(spec.block_len(), members).expect("subset of the frozen set")
}

/// `D = {4k : 1 ≤ k ≤ N/4}`.
pub fn compute_d(block_len: usize) -> Result<IndexSet> {
    gf2::log2_exact(block_len)?;
    if block_len < 4 {
        return Err(Error::InvalidPlan(format!("D needs N >= 4, got {block_len}")));
    }
    IndexSet::new(block_len, (1..=block_len / 4).map(|k| 4 * k))
}

/// Longest run of consecutive non-pilot positions in `1..=N` for the given
/// pilot positions (any order).
pub fn max_pilot_gap(block_len: usize, pilots: &[usize]) -> usize {
    let mut occupied = vec![false; block_len];
    for &p in pilots {
        occupied[p - 1] = true;
    }
    let mut best = 0;
    let mut run = 0;
    for &o in &occupied {
        run = if o { 0 } else { run + 1 };
        best = best.max(run);
    }
    best
}

/// Greedily adds `count` pilots from `candidates` (1-based, ascending) so as
/// to minimise the longest run of non-pilot positions. Ties go to the
/// smaller sum of squared run lengths, then to the smaller index.
fn spread_pilots(block_len: usize, existing: &[usize], candidates: &[usize], count: usize) -> Vec<usize> {
    let mut occupied = vec![false; block_len];
    for &p in existing {
        occupied[p - 1] = true;
    }
    let mut picked = Vec::with_capacity(count);
    for _ in 0..count {
        // run containing each free position: (start, end) inclusive, 0-based
        let mut runs: Vec<(usize, usize)> = Vec::new();
        let mut run_of = vec![usize::MAX; block_len];
        let mut i = 0;
        while i < block_len {
            if occupied[i] {
                i += 1;
                continue;
            }
            let start = i;
            while i < block_len && !occupied[i] {
                run_of[i] = runs.len();
                i += 1;
            }
            runs.push((start, i - 1));
        }
        let lens: Vec<usize> = runs.iter().map(|&(s, e)| e - s + 1).collect();
        let sum_sq: usize = lens.iter().map(|l| l * l).sum();
        // largest run length and how often it occurs, plus the runner-up
        let top = lens.iter().copied().max().unwrap_or(0);
        let top_count = lens.iter().filter(|&&l| l == top).count();
        let second = lens.iter().copied().filter(|&l| l < top).max().unwrap_or(0);

        let mut best: Option<(usize, usize, usize)> = None;
        for &c in candidates {
            let z = c - 1;
            if occupied[z] {
                continue;
            }
            let r = run_of[z];
            let (s, e) = runs[r];
            let (left, right) = (z - s, e - z);
            let others = if lens[r] == top && top_count == 1 { second } else { top };
            let new_max = others.max(left).max(right);
            let new_sq = sum_sq - lens[r] * lens[r] + left * left + right * right;
            let key = (new_max, new_sq, c);
            if best.is_none_or(|b| key < b) {
                best = Some(key);
            }
        }
        let Some((_, _, c)) = best else { break };
        occupied[c - 1] = true;
        picked.push(c);
    }
    picked.sort_unstable();
    picked
}

/// UEPS with `num_pilots` in total: the smallest `min(num_pilots, |S|)`
/// members of `S` become `P_f`, the rest are spread over `A`.
pub fn select_ueps(spec: &CodeSpec, num_pilots: usize) -> Result<PilotPlan> {
    let s = compute_s(spec);
    let available = s.len() + spec.k();
    if num_pilots > available {
        return Err(Error::TooManyPilots { requested: num_pilots, available });
    }
    let frozen = num_pilots.min(s.len());
    select_ueps_split(spec, frozen, num_pilots - frozen)
}

/// UEPS with an explicit split: the `frozen_count` smallest members of `S`
/// plus `info_count` pilots spread over `A`.
pub fn select_ueps_split(spec: &CodeSpec, frozen_count: usize, info_count: usize) -> Result<PilotPlan> {
    let s = compute_s(spec);
    if frozen_count > s.len() {
        return Err(Error::TooManyPilots { requested: frozen_count, available: s.len() });
    }
    if info_count > spec.k() {
        return Err(Error::TooManyPilots { requested: info_count, available: spec.k() });
    }
    let pf: Vec<usize> = s.as_slice()[..frozen_count].to_vec();
    let pi = spread_pilots(spec.block_len(), &pf, spec.info_set().as_slice(), info_count);
    let n = spec.block_len();
    PilotPlan::new(Scheme::Ueps, spec, IndexSet::new(n, pf)?, IndexSet::new(n, pi)?)
}

/// EPS with `num_pilots` in total. All of `D_f = D ∩ Ā` is taken; the
/// remaining pilots come evenly from `D_i = D ∩ A`.
pub fn select_eps(spec: &CodeSpec, num_pilots: usize) -> Result<PilotPlan> {
    let n = spec.block_len();
    let d = compute_d(n)?;
    let d_f = d.difference(spec.info_set())?;
    let d_i = d.intersection(spec.info_set())?;
    if num_pilots < d_f.len() {
        return Err(Error::TooFewPilots { requested: num_pilots, required: d_f.len() });
    }
    if num_pilots > d.len() {
        return Err(Error::TooManyPilots { requested: num_pilots, available: d.len() });
    }
    let needed = num_pilots - d_f.len();
    let m = d_i.len();
    // centred even subsampling: the k-th pick is element ⌊(2k+1)·m / 2·needed⌋
    let pi = (0..needed).map(|k| d_i.as_slice()[(2 * k + 1) * m / (2 * needed)]);
    PilotPlan::new(Scheme::Eps, spec, d_f, IndexSet::new(n, pi)?)
}

/// Outcome of [`validate_plan`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlanValidation {
    /// `G_C̄C = 0`.
    pub complement_zero: bool,
    /// `G_CC · G_CC = I`.
    pub involution: bool,
    /// `C` is domination contiguous.
    pub contiguous: bool,
    /// Every column of `G_C̄C` beyond those of `G_ĀA` is a column of `G_ĀĀ`.
    pub added_columns_from_frozen: bool,
    /// The scheme's own rule: `P_f ⊆ S` for UEPS, `P_f = D ∩ Ā` for EPS,
    /// no in-code pilots for insertion.
    pub scheme_rule: bool,
}

impl PlanValidation {
    pub fn all_pass(&self) -> bool {
        self.complement_zero && self.involution && self.contiguous && self.added_columns_from_frozen && self.scheme_rule
    }
}

pub fn validate_plan(spec: &CodeSpec, plan: &PilotPlan) -> Result<PlanValidation> {
    let n = spec.block_len();
    if plan.encoding_set().universe() != n {
        return Err(Error::UniverseMismatch { left: plan.encoding_set().universe(), right: n });
    }
    let g = gf2::kron_power(spec.n())?;
    let c = plan.encoding_set();
    let cc = c.complement();
    let frozen = spec.frozen_set();
    let g_ccc = gf2::submatrix(&g, &cc, c)?;
    let g_cc = gf2::submatrix(&g, c, c)?;

    // Columns of G_C̄C that are not columns of G_ĀA are exactly the P_f
    // columns; they must equal the matching block of G_ĀĀ.
    let g_ff = gf2::submatrix(&g, &frozen, &frozen)?;
    let pos_in_frozen = |set: &IndexSet| -> Option<IndexSet> {
        let idx: Option<Vec<usize>> =
            set.iter().map(|p| frozen.as_slice().binary_search(&p).ok().map(|k| k + 1)).collect();
        idx.and_then(|v| IndexSet::new(frozen.len().max(1), v).ok())
    };
    let added_columns_from_frozen = match (pos_in_frozen(&cc), pos_in_frozen(plan.frozen_pilots())) {
        (Some(rows), Some(cols)) if !frozen.is_empty() => {
            let direct = gf2::submatrix(&g, &cc, plan.frozen_pilots())?;
            direct == gf2::submatrix(&g_ff, &rows, &cols)?
        }
        (Some(_), Some(_)) => plan.frozen_pilots().is_empty(),
        _ => false,
    };

    let scheme_rule = match plan.scheme() {
        Scheme::Ueps => plan.frozen_pilots().is_subset(&compute_s(spec)),
        Scheme::Eps => {
            let d = compute_d(n)?;
            *plan.frozen_pilots() == d.difference(spec.info_set())? && plan.info_pilots().is_subset(&d)
        }
        Scheme::TraditionalInsertion => plan.pilot_positions().is_empty(),
    };

    Ok(PlanValidation {
        complement_zero: gf2::is_zero(&g_ccc),
        involution: gf2::is_involution(&g_cc)?,
        contiguous: gf2::is_domination_contiguous(c, spec.n())?,
        added_columns_from_frozen,
        scheme_rule,
    })
}

/// Throughput figures for a plan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThroughputReport {
    /// `K / N`.
    pub rate: f64,
    /// `K_p / N`.
    pub alpha: f64,
    /// `(K - |P_i|) / N`, pilots selected from the codeword.
    pub rate_selection: f64,
    /// `K / (N + K_p)`, the same pilots inserted instead.
    pub rate_insertion: f64,
    /// `(1 - α)(1 + α)`.
    pub gamma: f64,
    /// `rate_selection / rate_insertion`.
    pub gamma_exact: f64,
}

/// `γ = (1 - α)(1 + α)`.
pub fn gamma(alpha: f64) -> f64 {
    (1.0 - alpha) * (1.0 + alpha)
}

pub fn throughput(plan: &PilotPlan, spec: &CodeSpec) -> ThroughputReport {
    let n = spec.block_len() as f64;
    let k = spec.k() as f64;
    let kp = plan.pilot_count() as f64;
    let rate_selection = (k - plan.info_pilots().len() as f64) / n;
    let rate_insertion = k / (n + kp);
    let alpha = kp / n;
    ThroughputReport {
        rate: k / n,
        alpha,
        rate_selection,
        rate_insertion,
        gamma: gamma(alpha),
        gamma_exact: rate_selection / rate_insertion,
    }
}
