//! Access structure of the sharing scheme built on a [`CodeSpec`].
//!
//! Shares are `t_i = u · g_i` where `g_i` is column `i` of `G_U`, and the
//! secret is `t_p`. A set of positions `T` is qualified iff `g_p` lies in the
//! span of `{g_i : i ∈ T}`, equivalently iff some codeword `c` of the dual
//! code (the row space of `H_U`) has `c_p = 1` and `supp(c) ⊆ T ∪ {p}`.
//! Minimal access sets are the supports, minus `p`, of the minimal dual
//! codewords with `c_p = 1`.
//!
//! Two modes are supported. In [`Mode::Full`] every share, including those
//! at frozen positions, is held by a member. In [`Mode::Effective`] the
//! frozen-position shares are a public transcript, so those columns join
//! every coalition's span for free.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::construction::{dual_submatrix, generator_submatrix, CodeSpec};
use crate::error::{Error, Result};
use crate::gf2::{self, BitMatrix, BitVector};

/// Largest dual dimension `N − k` accepted by the enumerating operations.
pub const MAX_DUAL_DIMENSION: usize = 24;

/// Largest code dimension accepted by [`all_minimal_check`] and
/// [`theorem1_count_check`].
pub const MAX_ENUMERATED_DIMENSION: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Full,
    Effective,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Full => "full",
            Mode::Effective => "effective",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Mode::Full),
            "effective" => Ok(Mode::Effective),
            other => Err(Error::Argument(format!("unknown mode {other:?}"))),
        }
    }
}

/// An ascending set of 1-based share positions.
///
/// The empty coalition is representable: in effective mode the public
/// transcript alone can be qualified.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Coalition {
    members: Vec<usize>,
}

impl Coalition {
    pub fn new(members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut members: Vec<usize> = members.into_iter().collect();
        if members.contains(&0) {
            return Err(Error::Argument("positions are 1-based".into()));
        }
        members.sort_unstable();
        members.dedup();
        Ok(Coalition { members })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, position: usize) -> bool {
        self.members.binary_search(&position).is_ok()
    }

    pub fn is_subset_of(&self, other: &Coalition) -> bool {
        self.members.iter().all(|m| other.contains(*m))
    }

    /// Checks the coalition against a code and secret position.
    pub fn validate(&self, spec: &CodeSpec, p: usize) -> Result<()> {
        if self.contains(p) {
            return Err(Error::Argument(format!(
                "coalition contains the secret position {p}"
            )));
        }
        if let Some(&bad) = self.members.iter().find(|&&m| m > spec.block_length()) {
            return Err(Error::Argument(format!(
                "position {bad} outside 1..={}",
                spec.block_length()
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Coalition {
    /// `P2,P4,P6`; the empty coalition prints as `-`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.members.is_empty() {
            return f.write_str("-");
        }
        let labels: Vec<String> = self.members.iter().map(|m| format!("P{m}")).collect();
        f.write_str(&labels.join(","))
    }
}

impl FromStr for Coalition {
    type Err = Error;

    /// Accepts `P4,P6`, `4,6` and `-` (empty).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "-" || s.is_empty() {
            return Ok(Coalition::default());
        }
        let members = s
            .split(',')
            .map(|tok| {
                let tok = tok.trim();
                let digits = tok
                    .strip_prefix('P')
                    .or_else(|| tok.strip_prefix('p'))
                    .unwrap_or(tok);
                digits
                    .parse::<usize>()
                    .map_err(|_| Error::Argument(format!("bad coalition member {tok:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Coalition::new(members)
    }
}

/// Columns of `G_U`, one length-`k` vector per position.
#[derive(Debug, Clone)]
pub struct ShareColumns {
    columns: BitMatrix,
    frozen: Vec<usize>,
    info_set: Vec<usize>,
}

impl ShareColumns {
    pub fn new(spec: &CodeSpec) -> Self {
        ShareColumns {
            columns: generator_submatrix(spec).transpose(),
            frozen: spec.frozen_set().to_vec(),
            info_set: spec.information_set().to_vec(),
        }
    }

    /// `g_i` for 1-based position `i`.
    pub fn column(&self, position: usize) -> &BitVector {
        self.columns.row(position - 1)
    }

    fn check_p(&self, p: usize) -> Result<()> {
        if self.info_set.binary_search(&p).is_err() {
            return Err(Error::Argument(format!(
                "secret position {p} is not in the information set"
            )));
        }
        Ok(())
    }

    /// Positions whose columns may be combined: the coalition, plus the
    /// frozen positions in effective mode.
    pub fn span_positions(&self, coalition: &Coalition, mode: Mode) -> Vec<usize> {
        let mut positions = coalition.members().to_vec();
        if mode == Mode::Effective {
            positions.extend_from_slice(&self.frozen);
            positions.sort_unstable();
            positions.dedup();
        }
        positions
    }

    /// Positions `S` (ascending) with `g_p = Σ_{i∈S} g_i`, or `None` when
    /// `g_p` is outside the span of the given positions.
    pub fn combination(&self, p: usize, positions: &[usize]) -> Option<Vec<usize>> {
        let m = self
            .columns
            .select_rows(&positions.iter().map(|i| i - 1).collect::<Vec<_>>());
        let x = gf2::solve(&m, self.column(p)).expect("columns share length k")?;
        Some(x.ones_iter().map(|j| positions[j]).collect())
    }
}

/// Qualification verdict; `combination` lists the positions whose shares sum
/// to the secret.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Qualification {
    pub combination: Vec<usize>,
}

/// Column-span qualification test. Returns the reconstruction combination
/// when the coalition is qualified.
pub fn is_qualified(
    spec: &CodeSpec,
    p: usize,
    coalition: &Coalition,
    mode: Mode,
) -> Result<Option<Qualification>> {
    let cols = ShareColumns::new(spec);
    cols.check_p(p)?;
    coalition.validate(spec, p)?;
    let positions = cols.span_positions(coalition, mode);
    Ok(cols
        .combination(p, &positions)
        .map(|combination| Qualification { combination }))
}

fn check_dual_bound(spec: &CodeSpec) -> Result<()> {
    let r = spec.block_length() - spec.dimension();
    if r > MAX_DUAL_DIMENSION {
        return Err(Error::Size(format!(
            "dual dimension {r} exceeds the enumeration bound {MAX_DUAL_DIMENSION}"
        )));
    }
    Ok(())
}

/// Walks every vector of `span(basis)` in Gray-code order, zero first.
fn for_each_codeword(basis: &[BitVector], len: usize, mut visit: impl FnMut(&BitVector)) {
    let mut word = BitVector::zeros(len);
    visit(&word);
    for step in 1u64..(1u64 << basis.len()) {
        word.xor_assign(&basis[step.trailing_zeros() as usize]);
        visit(&word);
    }
}

/// Every codeword of the dual code `span(H_U)` whose `p`-th coordinate is 1,
/// sorted.
pub fn enumerate_p_codewords(spec: &CodeSpec, p: usize) -> Result<Vec<BitVector>> {
    check_dual_bound(spec)?;
    if p == 0 || p > spec.block_length() {
        return Err(Error::Argument(format!("position {p} out of range")));
    }
    let h_u = dual_submatrix(spec);
    let mut out = Vec::new();
    for_each_codeword(h_u.rows(), spec.block_length(), |c| {
        if c.get(p - 1) {
            out.push(c.clone());
        }
    });
    out.sort();
    Ok(out)
}

/// Keeps the words whose support contains no other word's support.
fn minimal_words(words: &[BitVector]) -> Vec<BitVector> {
    let mut by_weight: Vec<&BitVector> = words.iter().collect();
    by_weight.sort_by_key(|w| w.weight());
    let mut kept: Vec<BitVector> = Vec::new();
    for w in by_weight {
        if !kept.iter().any(|k| w.covers_unchecked(k)) {
            kept.push(w.clone());
        }
    }
    kept.sort();
    kept
}

/// Minimal p-codewords: dual codewords with `c_p = 1` covering no other
/// nonzero dual codeword.
pub fn minimal_p_codewords(spec: &CodeSpec, p: usize) -> Result<Vec<BitVector>> {
    Ok(minimal_words(&enumerate_p_codewords(spec, p)?))
}

/// Drops every set that contains another set of the family, then sorts
/// lexicographically.
pub fn minimalize(sets: impl IntoIterator<Item = Coalition>) -> Vec<Coalition> {
    let mut sets: Vec<Coalition> = sets.into_iter().collect();
    sets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    sets.dedup();
    let mut kept: Vec<Coalition> = Vec::new();
    for s in sets {
        if !kept.iter().any(|k| k.is_subset_of(&s)) {
            kept.push(s);
        }
    }
    kept.sort();
    kept
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AccessStructure {
    pub p: usize,
    pub mode: Mode,
    /// Lexicographically sorted antichain of coalitions.
    pub minimal_sets: Vec<Coalition>,
    /// Positions present in every minimal set.
    pub dictators: Vec<usize>,
}

impl AccessStructure {
    /// Number of minimal sets each position belongs to.
    pub fn membership_counts(&self) -> BTreeMap<usize, usize> {
        let mut counts = BTreeMap::new();
        for s in &self.minimal_sets {
            for &m in s.members() {
                *counts.entry(m).or_insert(0) += 1;
            }
        }
        counts
    }

    /// True when the empty coalition is qualified, i.e. the public
    /// transcript alone determines the secret.
    pub fn public_transcript_reveals_secret(&self) -> bool {
        self.minimal_sets.iter().any(Coalition::is_empty)
    }

    /// Membership test against the minimal sets (monotone closure).
    pub fn admits(&self, coalition: &Coalition) -> bool {
        self.minimal_sets.iter().any(|m| m.is_subset_of(coalition))
    }
}

fn without(support: &[usize], drop: impl Fn(usize) -> bool) -> Coalition {
    Coalition {
        members: support.iter().copied().filter(|&i| !drop(i)).collect(),
    }
}

/// Exact minimal access sets, by enumeration of the dual code.
pub fn minimal_access_sets(spec: &CodeSpec, p: usize, mode: Mode) -> Result<AccessStructure> {
    if spec.info_row(p).is_none() {
        return Err(Error::Argument(format!(
            "secret position {p} is not in the information set"
        )));
    }
    let words = minimal_p_codewords(spec, p)?;
    let sets = words.iter().map(|c| {
        let supp = gf2::support(c);
        match mode {
            Mode::Full => without(&supp, |i| i == p),
            Mode::Effective => without(&supp, |i| i == p || spec.is_frozen(i)),
        }
    });
    let minimal_sets = minimalize(sets);
    let mut structure = AccessStructure {
        p,
        mode,
        minimal_sets,
        dictators: Vec::new(),
    };
    if !structure.minimal_sets.is_empty() {
        structure.dictators = dictator_analysis(&structure)?;
    }
    Ok(structure)
}

/// Positions present in every minimal access set.
pub fn dictator_analysis(structure: &AccessStructure) -> Result<Vec<usize>> {
    let (first, rest) = structure
        .minimal_sets
        .split_first()
        .ok_or_else(|| Error::Argument("access structure has no minimal sets".into()))?;
    Ok(first
        .members()
        .iter()
        .copied()
        .filter(|m| rest.iter().all(|s| s.contains(*m)))
        .collect())
}

/// A coalition read off a single row of `H_U`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowCoalition {
    /// Frozen index labelling the `H_U` row (1-based).
    pub frozen_index: usize,
    pub members: Coalition,
}

/// One coalition per `H_U` row with a 1 at `p`: the row's support minus `p`,
/// and in effective mode minus the frozen positions too.
///
/// Every such coalition is qualified, but rows are only a basis of the dual
/// code, so the family is generally neither complete nor minimal; compare
/// [`minimal_access_sets`].
pub fn row_coalitions(spec: &CodeSpec, p: usize, mode: Mode) -> Result<Vec<RowCoalition>> {
    if spec.info_row(p).is_none() {
        return Err(Error::Argument(format!(
            "secret position {p} is not in the information set"
        )));
    }
    let h_u = dual_submatrix(spec);
    Ok(spec
        .frozen_set()
        .iter()
        .zip(h_u.rows())
        .filter(|(_, row)| row.get(p - 1))
        .map(|(&frozen_index, row)| {
            let supp = gf2::support(row);
            let members = match mode {
                Mode::Full => without(&supp, |i| i == p),
                Mode::Effective => without(&supp, |i| i == p || spec.is_frozen(i)),
            };
            RowCoalition {
                frozen_index,
                members,
            }
        })
        .collect())
}

/// Qualification by the dual-codeword criterion, built once per `(spec, p)`.
#[derive(Debug, Clone)]
pub struct DualCodewordTest {
    p: usize,
    size: usize,
    frozen_mask: BitVector,
    codewords: Vec<BitVector>,
}

impl DualCodewordTest {
    pub fn new(spec: &CodeSpec, p: usize) -> Result<Self> {
        let mut frozen_mask = BitVector::zeros(spec.block_length());
        for &i in spec.frozen_set() {
            frozen_mask.set(i - 1, true);
        }
        Ok(DualCodewordTest {
            p,
            size: spec.block_length(),
            frozen_mask,
            codewords: minimal_p_codewords(spec, p)?,
        })
    }

    /// True iff some dual codeword with `c_p = 1` is supported inside the
    /// coalition, `p`, and (effective mode) the frozen positions.
    pub fn qualifies(&self, coalition: &Coalition, mode: Mode) -> bool {
        let mut allowed = if mode == Mode::Effective {
            self.frozen_mask.clone()
        } else {
            BitVector::zeros(self.size)
        };
        allowed.set(self.p - 1, true);
        for &m in coalition.members() {
            allowed.set(m - 1, true);
        }
        self.codewords.iter().any(|c| allowed.covers_unchecked(c))
    }
}

/// Outcome of the weight-ratio and exhaustive minimality tests on a code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinimalityReport {
    /// `w_min / w_max > 1/2` over the nonzero codewords.
    pub sufficient_by_weight: bool,
    /// Every nonzero codeword is minimal, by pairwise cover checks.
    pub exact: bool,
    pub min_weight: usize,
    pub max_weight: usize,
}

fn code_words(gen: &BitMatrix) -> Result<Vec<BitVector>> {
    let basis = gen.row_basis();
    if basis.len() > MAX_ENUMERATED_DIMENSION {
        return Err(Error::Size(format!(
            "code dimension {} exceeds {MAX_ENUMERATED_DIMENSION}",
            basis.len()
        )));
    }
    let mut words = Vec::with_capacity(1 << basis.len());
    for_each_codeword(&basis, gen.ncols(), |c| {
        if !c.is_zero() {
            words.push(c.clone());
        }
    });
    Ok(words)
}

/// A nonzero word is minimal iff no other nonzero word has a support
/// contained in its own. Such a word is strictly lighter, so only lighter
/// words are compared.
fn minimal_flags(words: &[BitVector]) -> Vec<bool> {
    let mut order: Vec<usize> = (0..words.len()).collect();
    order.sort_by_key(|&i| words[i].weight());
    let mut flags = vec![true; words.len()];
    for (pos, &i) in order.iter().enumerate() {
        let w = words[i].weight();
        flags[i] = !order[..pos]
            .iter()
            .take_while(|&&j| words[j].weight() < w)
            .any(|&j| words[i].covers_unchecked(&words[j]));
    }
    flags
}

/// Compares the weight-ratio sufficient condition for "every nonzero
/// codeword is minimal" with the exhaustive answer.
pub fn all_minimal_check(gen: &BitMatrix) -> Result<MinimalityReport> {
    let words = code_words(gen)?;
    if words.is_empty() {
        return Err(Error::Argument("generator spans the zero code".into()));
    }
    let min_weight = words.iter().map(BitVector::weight).min().unwrap();
    let max_weight = words.iter().map(BitVector::weight).max().unwrap();
    Ok(MinimalityReport {
        sufficient_by_weight: 2 * min_weight > max_weight,
        exact: minimal_flags(&words).into_iter().all(|f| f),
        min_weight,
        max_weight,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CountReport {
    /// Codewords of `span(gen)` with a 1 at `p`.
    pub p_codewords: usize,
    /// Those among them that are minimal: the minimal access sets.
    pub minimal_p_codewords: usize,
    /// `2^{d−1}` for code dimension `d`.
    pub expected: usize,
    pub holds: bool,
}

/// For a code whose nonzero codewords are all minimal, checks that exactly
/// `2^{d−1}` minimal codewords have a 1 at position `p` (1-based).
pub fn theorem1_count_check(gen: &BitMatrix, p: usize) -> Result<CountReport> {
    if p == 0 || p > gen.ncols() {
        return Err(Error::Argument(format!("position {p} out of range")));
    }
    if gen.column(p - 1).is_zero() {
        return Err(Error::Argument(format!(
            "column {p} of the generator is zero"
        )));
    }
    let words = code_words(gen)?;
    let flags = minimal_flags(&words);
    if !flags.iter().all(|&f| f) {
        return Err(Error::Argument(
            "not every nonzero codeword is minimal".into(),
        ));
    }
    let d = gen.rank();
    let p_codewords = words.iter().filter(|w| w.get(p - 1)).count();
    let minimal_p_codewords = words
        .iter()
        .zip(&flags)
        .filter(|(w, &f)| f && w.get(p - 1))
        .count();
    let expected = 1usize << (d - 1);
    Ok(CountReport {
        p_codewords,
        minimal_p_codewords,
        expected,
        holds: p_codewords == expected && minimal_p_codewords == expected,
    })
}
