//! Dense GF(2) vectors and matrices.
//!
//! Bits are packed little-endian into `u64` words. Positions inside a
//! [`BitVector`] are 0-based; [`support`] is the one place that speaks in
//! 1-based positions, because supports are what end up in coalitions and
//! files.
//!
//! The polar kernels live here too: `G_N` is the `n`-fold Kronecker power of
//! `[[1,0],[1,1]]` and `H_N` the power of `[[1,1],[0,1]]`, both in natural
//! (non bit-reversed) order.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

const WORD: usize = 64;

/// Largest exponent accepted by [`polar_generator`] and [`dual_generator`].
pub const DEFAULT_MAX_EXPONENT: u32 = 20;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A fixed-length vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self::zeros(len);
        for w in v.words.iter_mut() {
            *w = u64::MAX;
        }
        v.clear_tail();
        v
    }

    /// Unit vector with a single one at 0-based `index`.
    pub fn unit(len: usize, index: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(index, true);
        v
    }

    pub fn from_bits(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b & 1 == 1 {
                v.set(i, true);
            }
        }
        v
    }

    pub fn from_bools(bits: impl IntoIterator<Item = bool>) -> Self {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut v = Self::zeros(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Low `len` bits of `mask`, bit `i` of the mask becoming position `i`.
    pub fn from_mask(len: usize, mask: u64) -> Self {
        assert!(len <= WORD);
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = mask;
            v.clear_tail();
        }
        v
    }

    fn clear_tail(&mut self) {
        let rem = self.len % WORD;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, index: usize) -> bool {
        assert!(
            index < self.len,
            "bit index {index} out of range {}",
            self.len
        );
        (self.words[index / WORD] >> (index % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, index: usize, value: bool) {
        assert!(
            index < self.len,
            "bit index {index} out of range {}",
            self.len
        );
        let mask = 1u64 << (index % WORD);
        if value {
            self.words[index / WORD] |= mask;
        } else {
            self.words[index / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, index: usize) {
        assert!(index < self.len);
        self.words[index / WORD] ^= 1u64 << (index % WORD);
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    /// `self ^= other`. Panics on length mismatch.
    #[inline]
    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "xor of unequal lengths");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn xor(&self, other: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn and(&self, other: &BitVector) -> BitVector {
        assert_eq!(self.len, other.len);
        BitVector {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len, "dot of unequal lengths");
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones & 1 == 1
    }

    /// Support containment without the length check; callers guarantee equal lengths.
    #[inline]
    pub(crate) fn covers_unchecked(&self, other: &BitVector) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| b & !a == 0)
    }

    /// 0-based indices of the set bits, ascending.
    pub fn ones_iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let tz = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(wi * WORD + tz)
                }
            })
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn to_bits(&self) -> Vec<u8> {
        self.iter().map(u8::from).collect()
    }

    /// Sub-vector at the given 0-based positions, in the order given.
    pub fn select(&self, positions: &[usize]) -> BitVector {
        BitVector::from_bools(positions.iter().map(|&i| self.get(i)))
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in self.iter() {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({self})")
    }
}

impl FromStr for BitVector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let mut v = BitVector::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                other => return Err(Error::Argument(format!("invalid bit character {other:?}"))),
            }
        }
        Ok(v)
    }
}

/// 1-based positions of the nonzero entries.
pub fn support(v: &BitVector) -> Vec<usize> {
    v.ones_iter().map(|i| i + 1).collect()
}

pub fn weight(v: &BitVector) -> usize {
    v.weight()
}

/// True iff `support(b) ⊆ support(a)`.
pub fn covers(a: &BitVector, b: &BitVector) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::Shape(format!(
            "covers: lengths {} and {} differ",
            a.len(),
            b.len()
        )));
    }
    Ok(a.covers_unchecked(b))
}

/// Row-major dense matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitVector>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix {
            cols,
            rows: vec![BitVector::zeros(cols); rows],
        }
    }

    pub fn identity(size: usize) -> Self {
        BitMatrix {
            cols: size,
            rows: (0..size).map(|i| BitVector::unit(size, i)).collect(),
        }
    }

    /// Builds a matrix from rows of identical length. An empty row list is
    /// allowed (e.g. the dual of a full-rate code) and takes `cols` from the
    /// argument.
    pub fn from_rows(rows: Vec<BitVector>, cols: usize) -> Result<Self> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(Error::Shape(format!(
                "row of length {} in a matrix with {cols} columns",
                bad.len()
            )));
        }
        Ok(BitMatrix { cols, rows })
    }

    pub fn from_bits(rows: &[&[u8]]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        Self::from_rows(rows.iter().map(|r| BitVector::from_bits(r)).collect(), cols)
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        self.rows[r].set(c, value);
    }

    pub fn column(&self, c: usize) -> BitVector {
        BitVector::from_bools(self.rows.iter().map(|r| r.get(c)))
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.nrows());
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.ones_iter() {
                t.rows[c].set(r, true);
            }
        }
        t
    }

    /// Rows at the given 0-based indices, in the order given.
    pub fn select_rows(&self, indices: &[usize]) -> BitMatrix {
        BitMatrix {
            cols: self.cols,
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
        }
    }

    /// Columns at the given 0-based indices, in the order given.
    pub fn select_columns(&self, indices: &[usize]) -> BitMatrix {
        BitMatrix {
            cols: indices.len(),
            rows: self.rows.iter().map(|r| r.select(indices)).collect(),
        }
    }

    /// Row-vector product `x · self`.
    pub fn left_mul(&self, x: &BitVector) -> Result<BitVector> {
        if x.len() != self.nrows() {
            return Err(Error::Shape(format!(
                "vector of length {} times {}x{} matrix",
                x.len(),
                self.nrows(),
                self.cols
            )));
        }
        let mut out = BitVector::zeros(self.cols);
        for i in x.ones_iter() {
            out.xor_assign(&self.rows[i]);
        }
        Ok(out)
    }

    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.nrows() {
            return Err(Error::Shape(format!(
                "{}x{} times {}x{}",
                self.nrows(),
                self.cols,
                other.nrows(),
                other.cols
            )));
        }
        let rows = self
            .rows
            .iter()
            .map(|r| other.left_mul(r))
            .collect::<Result<Vec<_>>>()?;
        Ok(BitMatrix {
            cols: other.cols,
            rows,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(BitVector::is_zero)
    }

    /// Reduced row echelon basis of the row space (nonzero rows only).
    pub fn row_basis(&self) -> Vec<BitVector> {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for c in 0..self.cols {
            let Some(pivot) = (rank..rows.len()).find(|&r| rows[r].get(c)) else {
                continue;
            };
            rows.swap(rank, pivot);
            let pivot_row = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row.get(c) {
                    row.xor_assign(&pivot_row);
                }
            }
            rank += 1;
        }
        rows.truncate(rank);
        rows
    }

    pub fn rank(&self) -> usize {
        self.row_basis().len()
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.rows.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{r}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.nrows(), self.cols)?;
        write!(f, "{self}")
    }
}

impl FromStr for BitMatrix {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let rows = s
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .map(BitVector::from_str)
            .collect::<Result<Vec<_>>>()?;
        let cols = rows.first().map_or(0, BitVector::len);
        BitMatrix::from_rows(rows, cols)
    }
}

/// Kronecker product over GF(2).
pub fn kron(a: &BitMatrix, b: &BitMatrix) -> BitMatrix {
    let cols = a.ncols() * b.ncols();
    let mut rows = Vec::with_capacity(a.nrows() * b.nrows());
    for arow in a.rows() {
        for brow in b.rows() {
            let mut out = BitVector::zeros(cols);
            for j in arow.ones_iter() {
                for c in brow.ones_iter() {
                    out.set(j * b.ncols() + c, true);
                }
            }
            rows.push(out);
        }
    }
    BitMatrix { cols, rows }
}

fn check_exponent(n: u32, cap: u32) -> Result<usize> {
    if n > cap {
        return Err(Error::Size(format!(
            "kernel exponent {n} exceeds cap {cap}"
        )));
    }
    Ok(1usize << n)
}

/// Row `i` (0-based) of `G_N`: ones exactly at the columns whose index bits
/// are a subset of the bits of `i`.
pub fn polar_row(n: u32, i: usize) -> BitVector {
    let size = 1usize << n;
    assert!(i < size);
    let mut row = BitVector::zeros(size);
    // enumerate submasks of i
    let mut sub = i;
    loop {
        row.set(sub, true);
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & i;
    }
    row
}

/// Row `i` (0-based) of `H_N`: ones at the columns whose index bits are a
/// superset of the bits of `i`.
pub fn dual_row(n: u32, i: usize) -> BitVector {
    let size = 1usize << n;
    assert!(i < size);
    let mut row = BitVector::zeros(size);
    let free = !i & (size - 1);
    let mut sub = free;
    loop {
        row.set(i | sub, true);
        if sub == 0 {
            break;
        }
        sub = (sub - 1) & free;
    }
    row
}

/// `G_N = [[1,0],[1,1]]^{⊗n}` with the default exponent cap.
pub fn polar_generator(n: u32) -> Result<BitMatrix> {
    polar_generator_capped(n, DEFAULT_MAX_EXPONENT)
}

pub fn polar_generator_capped(n: u32, cap: u32) -> Result<BitMatrix> {
    let size = check_exponent(n, cap)?;
    Ok(BitMatrix {
        cols: size,
        rows: (0..size).map(|i| polar_row(n, i)).collect(),
    })
}

/// `H_N = [[1,1],[0,1]]^{⊗n}`, equal to `G_N` transposed.
pub fn dual_generator(n: u32) -> Result<BitMatrix> {
    dual_generator_capped(n, DEFAULT_MAX_EXPONENT)
}

pub fn dual_generator_capped(n: u32, cap: u32) -> Result<BitMatrix> {
    let size = check_exponent(n, cap)?;
    Ok(BitMatrix {
        cols: size,
        rows: (0..size).map(|i| dual_row(n, i)).collect(),
    })
}

/// Solves `x · m = target` for a row-combination vector `x`.
///
/// Gauss-Jordan elimination with the unknowns (rows of `m`) processed in
/// ascending order and the lowest-index equation taken as pivot; free
/// unknowns are set to zero. The answer is therefore a deterministic
/// function of `(m, target)`. Returns `Ok(None)` when `target` is outside the
/// row space.
pub fn solve(m: &BitMatrix, target: &BitVector) -> Result<Option<BitVector>> {
    if target.len() != m.ncols() {
        return Err(Error::Shape(format!(
            "solve: target length {} but matrix has {} columns",
            target.len(),
            m.ncols()
        )));
    }
    let unknowns = m.nrows();
    // One equation per column of m; bit `unknowns` holds the right-hand side.
    let mut eqs: Vec<BitVector> = (0..m.ncols())
        .map(|c| {
            let mut e = BitVector::zeros(unknowns + 1);
            for r in 0..unknowns {
                if m.get(r, c) {
                    e.set(r, true);
                }
            }
            if target.get(c) {
                e.set(unknowns, true);
            }
            e
        })
        .collect();

    let mut pivots = Vec::new();
    let mut rank = 0;
    for var in 0..unknowns {
        let Some(p) = (rank..eqs.len()).find(|&e| eqs[e].get(var)) else {
            continue;
        };
        eqs.swap(rank, p);
        let pivot = eqs[rank].clone();
        for (e, eq) in eqs.iter_mut().enumerate() {
            if e != rank && eq.get(var) {
                eq.xor_assign(&pivot);
            }
        }
        pivots.push(var);
        rank += 1;
    }
    if eqs[rank..].iter().any(|e| e.get(unknowns)) {
        return Ok(None);
    }
    let mut x = BitVector::zeros(unknowns);
    for (i, &var) in pivots.iter().enumerate() {
        if eqs[i].get(unknowns) {
            x.set(var, true);
        }
    }
    Ok(Some(x))
}
