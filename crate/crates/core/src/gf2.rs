//! Dense GF(2) matrices and the binary-domination order.
//!
//! `G_N = F^{⊗n}` with `F = [[1,0],[1,1]]` has the closed form
//! `G(i,j) = 1 ⇔ (i-1) ⪰ (j-1)`, where `a ⪰ b` means every set bit of `b`
//! is also set in `a`. Everything structural about pilot selection reduces
//! to submatrices of `G_N` and this partial order.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

/// Largest Kronecker exponent accepted by [`kron_power`].
pub const MAX_KRON_EXPONENT: u32 = 16;

const WORD: usize = 64;

/// Dense matrix over GF(2), one packed run of `u64` words per row.
///
/// Rows and columns are 0-based. Matrices with a zero dimension are allowed
/// so that submatrices over empty index sets (e.g. the frozen rows of a
/// rate-1 code) are representable.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = cols.div_ceil(WORD);
        Self { rows, cols, stride, words: vec![0; rows * stride] }
    }

    pub fn identity(size: usize) -> Self {
        let mut m = Self::zeros(size, size);
        for i in 0..size {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from rows of 0/1 bytes. Any nonzero byte is a one.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::DimensionMismatch("ragged rows"));
            }
            for (j, &b) in row.iter().enumerate() {
                m.set(i, j, b != 0);
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> bool {
        assert!(row < self.rows && col < self.cols, "bit index out of bounds");
        (self.words[row * self.stride + col / WORD] >> (col % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        assert!(row < self.rows && col < self.cols, "bit index out of bounds");
        let w = &mut self.words[row * self.stride + col / WORD];
        let mask = 1u64 << (col % WORD);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    fn row_words(&self, row: usize) -> &[u64] {
        &self.words[row * self.stride..(row + 1) * self.stride]
    }

    fn row_words_mut(&mut self, row: usize) -> &mut [u64] {
        &mut self.words[row * self.stride..(row + 1) * self.stride]
    }

    /// Hamming weight of one column.
    pub fn column_weight(&self, col: usize) -> usize {
        (0..self.rows).filter(|&r| self.get(r, col)).count()
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in self.ones_in_row(r) {
                t.set(c, r, true);
            }
        }
        t
    }

    /// Column indices of the ones in `row`, ascending.
    pub fn ones_in_row(&self, row: usize) -> impl Iterator<Item = usize> + '_ {
        self.row_words(row).iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            core::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * WORD + bit)
            })
        })
    }

    /// Multiplies a 0/1 row vector by this matrix: `v · M`.
    pub fn left_mul_vec(&self, v: &[u8]) -> Result<Vec<u8>> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch("vector length vs matrix rows"));
        }
        let mut acc = vec![0u64; self.stride];
        for (r, &b) in v.iter().enumerate() {
            if b & 1 == 1 {
                for (a, w) in acc.iter_mut().zip(self.row_words(r)) {
                    *a ^= *w;
                }
            }
        }
        Ok((0..self.cols).map(|c| ((acc[c / WORD] >> (c % WORD)) & 1) as u8).collect())
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                f.write_str(if self.get(r, c) { "1" } else { "0" })?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Ordered set of 1-based positions drawn from `{1..=universe}`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct IndexSet {
    universe: usize,
    members: Vec<usize>,
}

impl IndexSet {
    /// Validates and sorts `members`; rejects out-of-range and duplicate
    /// indices.
    pub fn new<I: IntoIterator<Item = usize>>(universe: usize, members: I) -> Result<Self> {
        let mut members: Vec<usize> = members.into_iter().collect();
        members.sort_unstable();
        for w in members.windows(2) {
            if w[0] == w[1] {
                return Err(Error::DuplicateIndex(w[0]));
            }
        }
        if let Some(&bad) = members.iter().find(|&&i| i == 0 || i > universe) {
            return Err(Error::IndexOutOfRange { index: bad, universe });
        }
        Ok(Self { universe, members })
    }

    pub fn empty(universe: usize) -> Self {
        Self { universe, members: Vec::new() }
    }

    /// `{1..=universe}`.
    pub fn full(universe: usize) -> Self {
        Self { universe, members: (1..=universe).collect() }
    }

    /// Builds the set of positions `i` with `mask[i - 1] == true`.
    pub fn from_mask(mask: &[bool]) -> Self {
        Self {
            universe: mask.len(),
            members: mask.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i + 1).collect(),
        }
    }

    #[inline]
    pub fn universe(&self) -> usize {
        self.universe
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.members.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Members ascending, 1-based.
    #[inline]
    pub fn as_slice(&self) -> &[usize] {
        &self.members
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().copied()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.members.binary_search(&index).is_ok()
    }

    /// Membership mask indexed 0-based (`mask[i - 1]` for position `i`).
    pub fn mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.universe];
        for &i in &self.members {
            m[i - 1] = true;
        }
        m
    }

    pub fn complement(&self) -> Self {
        let mask = self.mask();
        Self { universe: self.universe, members: (1..=self.universe).filter(|&i| !mask[i - 1]).collect() }
    }

    fn check_universe(&self, other: &Self) -> Result<()> {
        if self.universe != other.universe {
            return Err(Error::UniverseMismatch { left: self.universe, right: other.universe });
        }
        Ok(())
    }

    pub fn union(&self, other: &Self) -> Result<Self> {
        self.check_universe(other)?;
        let mut members: Vec<usize> = self.members.iter().chain(&other.members).copied().collect();
        members.sort_unstable();
        members.dedup();
        Ok(Self { universe: self.universe, members })
    }

    pub fn intersection(&self, other: &Self) -> Result<Self> {
        self.check_universe(other)?;
        Ok(Self {
            universe: self.universe,
            members: self.members.iter().copied().filter(|&i| other.contains(i)).collect(),
        })
    }

    pub fn difference(&self, other: &Self) -> Result<Self> {
        self.check_universe(other)?;
        Ok(Self {
            universe: self.universe,
            members: self.members.iter().copied().filter(|&i| !other.contains(i)).collect(),
        })
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.universe == other.universe && self.members.iter().all(|&i| other.contains(i))
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.members.iter().all(|&i| !other.contains(i))
    }
}

fn check_exponent(n: u32) -> Result<()> {
    if n == 0 || n > MAX_KRON_EXPONENT {
        return Err(Error::ExponentOutOfRange { n, max: MAX_KRON_EXPONENT });
    }
    Ok(())
}

/// `F^{⊗n}` without bit-reversal.
pub fn kron_power(n: u32) -> Result<BitMatrix> {
    check_exponent(n)?;
    let size = 1usize << n;
    let mut g = BitMatrix::zeros(size, size);
    for row in 0..size {
        // every submask of `row`
        let mut sub = row;
        loop {
            g.set(row, sub, true);
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & row;
        }
    }
    Ok(g)
}

/// `i ⪰ j` on 1-based positions: the binary expansion of `i - 1` covers
/// every set bit of `j - 1`.
pub fn dominates(i: usize, j: usize, n: u32) -> Result<bool> {
    check_exponent(n)?;
    let size = 1usize << n;
    for idx in [i, j] {
        if idx == 0 || idx > size {
            return Err(Error::IndexOutOfRange { index: idx, universe: size });
        }
    }
    Ok(dominates_unchecked(i - 1, j - 1))
}

/// Domination on 0-based indices.
#[inline]
pub(crate) fn dominates_unchecked(a: usize, b: usize) -> bool {
    a & b == b
}

/// `G_{rows, cols}` with rows and columns taken in ascending index order.
pub fn submatrix(g: &BitMatrix, rows: &IndexSet, cols: &IndexSet) -> Result<BitMatrix> {
    for (set, bound) in [(rows, g.rows()), (cols, g.cols())] {
        if let Some(&bad) = set.as_slice().last().filter(|&&i| i > bound) {
            return Err(Error::IndexOutOfRange { index: bad, universe: bound });
        }
    }
    let mut out = BitMatrix::zeros(rows.len(), cols.len());
    for (a, r) in rows.iter().enumerate() {
        for (b, c) in cols.iter().enumerate() {
            if g.get(r - 1, c - 1) {
                out.set(a, b, true);
            }
        }
    }
    Ok(out)
}

/// Matrix product over GF(2): XOR rows of `b` selected by the ones of `a`.
pub fn gf2_multiply(a: &BitMatrix, b: &BitMatrix) -> Result<BitMatrix> {
    if a.cols() != b.rows() {
        return Err(Error::DimensionMismatch("inner dimensions differ"));
    }
    let mut out = BitMatrix::zeros(a.rows(), b.cols());
    for r in 0..a.rows() {
        let ones: Vec<usize> = a.ones_in_row(r).collect();
        let dst = out.row_words_mut(r);
        for k in ones {
            for (d, s) in dst.iter_mut().zip(b.row_words(k)) {
                *d ^= *s;
            }
        }
    }
    Ok(out)
}

/// `M · M = I` over GF(2).
pub fn is_involution(m: &BitMatrix) -> Result<bool> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    Ok(gf2_multiply(m, m)? == BitMatrix::identity(m.rows()))
}

/// Inverse of a unit lower-triangular matrix by forward substitution:
/// row `i` of the inverse is `e_i ⊕ Σ_{k<i, M(i,k)=1} inv_k`.
pub fn gf2_invert_lower_triangular(m: &BitMatrix) -> Result<BitMatrix> {
    if !m.is_square() {
        return Err(Error::NotSquare { rows: m.rows(), cols: m.cols() });
    }
    let size = m.rows();
    for r in 0..size {
        if m.ones_in_row(r).any(|c| c > r) {
            return Err(Error::NotLowerTriangular);
        }
        if !m.get(r, r) {
            return Err(Error::Singular(r));
        }
    }
    let mut inv = BitMatrix::identity(size);
    for r in 0..size {
        let below: Vec<usize> = m.ones_in_row(r).filter(|&c| c < r).collect();
        for k in below {
            let (head, tail) = inv.words.split_at_mut(r * inv.stride);
            let src = &head[k * inv.stride..(k + 1) * inv.stride];
            for (d, s) in tail[..inv.stride].iter_mut().zip(src) {
                *d ^= *s;
            }
        }
    }
    Ok(inv)
}

/// Domination contiguity of `set` inside `{1..=2^n}`: whenever
/// `(h-1) ⪰ (i-1) ⪰ (j-1)` with `h, j` in the set, `i` is in the set too.
///
/// The quantifier over `i` is evaluated directly, enumerating exactly the
/// indices sandwiched between each dominating pair `(h, j)`.
pub fn is_domination_contiguous(set: &IndexSet, n: u32) -> Result<bool> {
    check_exponent(n)?;
    let size = 1usize << n;
    if let Some(&bad) = set.as_slice().last().filter(|&&i| i > size) {
        return Err(Error::IndexOutOfRange { index: bad, universe: size });
    }
    let mut member = vec![false; size];
    for i in set.iter() {
        member[i - 1] = true;
    }
    let zero_based: Vec<usize> = set.iter().map(|i| i - 1).collect();
    for &h in &zero_based {
        for &j in &zero_based {
            if !dominates_unchecked(h, j) {
                continue;
            }
            // i - 1 = j | s for every submask s of (h & !j)
            let free = h & !j;
            let mut s = free;
            loop {
                if !member[j | s] {
                    return Ok(false);
                }
                if s == 0 {
                    break;
                }
                s = (s - 1) & free;
            }
        }
    }
    Ok(true)
}

pub fn is_zero(m: &BitMatrix) -> bool {
    m.words.iter().all(|&w| w == 0)
}

/// `K × N` selection matrix `E` with `E(i, a_i) = 1`, where `a_i` is the
/// i-th smallest member of `set`.
pub fn selection_matrix(set: &IndexSet) -> Result<BitMatrix> {
    if set.is_empty() {
        return Err(Error::DimensionMismatch("selection matrix needs a nonempty set"));
    }
    let mut e = BitMatrix::zeros(set.len(), set.universe());
    for (row, idx) in set.iter().enumerate() {
        e.set(row, idx - 1, true);
    }
    Ok(e)
}

/// Bit-reversal permutation on `{0..2^n}` (0-based). The generator used
/// throughout is `F^{⊗n}` without it; provided for callers that want
/// Arıkan's `B F^{⊗n}` ordering.
pub fn bit_reversal_permutation(n: u32) -> Result<Vec<usize>> {
    check_exponent(n)?;
    let size = 1usize << n;
    Ok((0..size).map(|i| i.reverse_bits() >> (usize::BITS - n)).collect())
}

/// `log2(len)` for a power-of-two block length.
pub fn log2_exact(len: usize) -> Result<u32> {
    if len == 0 || !len.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(len));
    }
    Ok(len.trailing_zeros())
}
