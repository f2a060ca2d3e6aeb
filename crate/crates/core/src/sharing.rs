//! Dealer and combiner.
//!
//! The dealer draws `u` uniformly among the `2^{k-1}` information vectors
//! with `u · g_p = s`, encodes `t = u · G_U` (offset by the coset of any
//! nonzero frozen values) and hands `t_i` to member `P_i` for `i ∈ A \ {p}`.
//! Values at frozen positions form the public part of the dealing; `t_p` is
//! the secret itself and never leaves the dealer.

use std::collections::BTreeMap;

use rand::{CryptoRng, Rng};

use crate::access::{Coalition, Mode, ShareColumns};
use crate::construction::{encode, generator_submatrix, CodeSpec};
use crate::error::{Error, Result};
use crate::format::code_digest;
use crate::gf2::{self, BitVector};

/// Largest dimension accepted by [`security_audit`].
pub const MAX_AUDIT_DIMENSION: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    /// Held by member `P_i`, `i ∈ A \ {p}`.
    Member,
    /// Frozen-position value published with the dealing.
    Public,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Share {
    pub position: usize,
    pub bit: bool,
    pub role: Role,
}

impl Share {
    pub fn member(position: usize, bit: bool) -> Self {
        Share {
            position,
            bit,
            role: Role::Member,
        }
    }

    pub fn public(position: usize, bit: bool) -> Self {
        Share {
            position,
            bit,
            role: Role::Public,
        }
    }
}

/// One sharing of one secret bit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dealing {
    pub code_digest: u64,
    pub p: usize,
    /// Ascending by position.
    pub member_shares: Vec<Share>,
    /// Ascending by position.
    pub public_values: Vec<Share>,
}

impl Dealing {
    pub fn member_share(&self, position: usize) -> Option<Share> {
        self.member_shares
            .iter()
            .copied()
            .find(|s| s.position == position)
    }

    /// The shares a coalition would pool, along with the public values.
    /// Coalition members at frozen positions contribute their public value as
    /// an ordinary share (the full-mode reading).
    pub fn bundle_for(&self, coalition: &Coalition) -> ShareBundle {
        let shares = self
            .member_shares
            .iter()
            .chain(&self.public_values)
            .filter(|s| coalition.contains(s.position))
            .copied()
            .collect();
        ShareBundle {
            shares,
            public_values: self.public_values.clone(),
        }
    }
}

/// Shares pooled by a coalition for one secret bit.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ShareBundle {
    pub shares: Vec<Share>,
    pub public_values: Vec<Share>,
}

/// `encode(spec, 0)`: the coset offset added to every codeword.
fn coset_offset(spec: &CodeSpec) -> BitVector {
    encode(spec, &BitVector::zeros(spec.dimension())).expect("dimension matches")
}

/// Shares one secret bit.
pub fn deal<R: CryptoRng + Rng + ?Sized>(spec: &CodeSpec, secret: bool, rng: &mut R) -> Dealing {
    deal_with_digest(spec, code_digest(spec), secret, rng)
}

fn deal_with_digest<R: Rng + ?Sized>(
    spec: &CodeSpec,
    digest: u64,
    secret: bool,
    rng: &mut R,
) -> Dealing {
    let g_u = generator_submatrix(spec);
    let p = spec.secret_position();
    let offset = coset_offset(spec);
    let g_p = g_u.column(p - 1);
    let pivot = g_p
        .ones_iter()
        .next()
        .expect("G_N is invertible, so no column of G_U at an information index is zero");

    let mut u = BitVector::zeros(spec.dimension());
    for j in 0..spec.dimension() {
        if j != pivot && rng.random::<bool>() {
            u.set(j, true);
        }
    }
    // fix the pivot so that t_p = u · g_p ⊕ offset_p = secret
    let current = u.dot(&g_p) ^ offset.get(p - 1);
    if current != secret {
        u.flip(pivot);
    }
    let mut t = g_u.left_mul(&u).expect("u has length k");
    t.xor_assign(&offset);
    debug_assert_eq!(t.get(p - 1), secret);

    let member_shares = spec
        .information_set()
        .iter()
        .filter(|&&i| i != p)
        .map(|&i| Share::member(i, t.get(i - 1)))
        .collect();
    let public_values = spec
        .frozen_set()
        .iter()
        .map(|&i| Share::public(i, t.get(i - 1)))
        .collect();
    Dealing {
        code_digest: digest,
        p,
        member_shares,
        public_values,
    }
}

/// Non-cryptographic dealing for Monte-Carlo work.
pub(crate) fn deal_for_simulation<R: Rng + ?Sized>(
    spec: &CodeSpec,
    digest: u64,
    secret: bool,
    rng: &mut R,
) -> Dealing {
    deal_with_digest(spec, digest, secret, rng)
}

/// Validates share positions and returns the (position, bit) pairs used for
/// reconstruction, ascending.
fn pooled_values(spec: &CodeSpec, bundle: &ShareBundle, mode: Mode) -> Result<Vec<(usize, bool)>> {
    let p = spec.secret_position();
    let mut pooled: BTreeMap<usize, bool> = BTreeMap::new();
    for s in &bundle.shares {
        if s.position == p {
            return Err(Error::Argument(format!(
                "a share at the secret position {p} was supplied"
            )));
        }
        if s.position == 0 || s.position > spec.block_length() {
            return Err(Error::Argument(format!(
                "share position {} out of range",
                s.position
            )));
        }
        if pooled.insert(s.position, s.bit).is_some() {
            return Err(Error::Argument(format!(
                "duplicate share at position {}",
                s.position
            )));
        }
    }
    if mode == Mode::Effective {
        for s in &bundle.public_values {
            if !spec.is_frozen(s.position) {
                return Err(Error::Argument(format!(
                    "public value at non-frozen position {}",
                    s.position
                )));
            }
            match pooled.insert(s.position, s.bit) {
                Some(bit) if bit != s.bit => return Err(Error::Integrity),
                _ => {}
            }
        }
    }
    Ok(pooled.into_iter().collect())
}

/// Recovers the secret bit from pooled shares. In effective mode the
/// bundle's public values join the span.
///
/// Inconsistent shares are reported only when the supplied positions
/// over-determine the codeword; otherwise a tampered share silently changes
/// the answer.
pub fn reconstruct(spec: &CodeSpec, bundle: &ShareBundle, mode: Mode) -> Result<bool> {
    let pooled = pooled_values(spec, bundle, mode)?;
    reconstruct_pooled(
        spec,
        &ShareColumns::new(spec),
        &coset_offset(spec),
        &pooled,
        mode,
    )
}

pub(crate) fn reconstruct_pooled(
    spec: &CodeSpec,
    columns: &ShareColumns,
    offset: &BitVector,
    pooled: &[(usize, bool)],
    mode: Mode,
) -> Result<bool> {
    let p = spec.secret_position();
    let positions: Vec<usize> = pooled.iter().map(|&(i, _)| i).collect();
    let values: BTreeMap<usize, bool> = pooled.iter().copied().collect();

    // integrity: some u must reproduce every supplied bit
    let rows: Vec<BitVector> = positions
        .iter()
        .map(|&i| columns.column(i).clone())
        .collect();
    let system = gf2::BitMatrix::from_rows(rows, spec.dimension())?.transpose();
    let observed = BitVector::from_bools(pooled.iter().map(|&(i, b)| b ^ offset.get(i - 1)));
    if !positions.is_empty() && gf2::solve(&system, &observed)?.is_none() {
        return Err(Error::Integrity);
    }

    let combination = columns
        .combination(p, &positions)
        .ok_or(Error::Unqualified { mode })?;
    let mut s = offset.get(p - 1);
    for i in combination {
        s ^= values[&i] ^ offset.get(i - 1);
    }
    Ok(s)
}

/// Shares a bit string, one independent dealing per bit.
pub fn deal_string<R: CryptoRng + Rng + ?Sized>(
    spec: &CodeSpec,
    secret: &[bool],
    rng: &mut R,
) -> Result<Vec<Dealing>> {
    if secret.is_empty() {
        return Err(Error::Argument("secret bit string is empty".into()));
    }
    let digest = code_digest(spec);
    Ok(secret
        .iter()
        .map(|&bit| deal_with_digest(spec, digest, bit, rng))
        .collect())
}

pub fn reconstruct_string(
    spec: &CodeSpec,
    bundles: &[ShareBundle],
    mode: Mode,
) -> Result<Vec<bool>> {
    if bundles.is_empty() {
        return Err(Error::Argument("no share bundles supplied".into()));
    }
    bundles.iter().map(|b| reconstruct(spec, b, mode)).collect()
}

/// Posterior of the secret as seen by a coalition, tabulated per observed
/// share assignment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditReport {
    /// Observed positions, ascending (coalition, plus frozen positions in
    /// effective mode).
    pub observed: Vec<usize>,
    /// For each assignment of bits to `observed`: how many information
    /// vectors produce it with secret 0 and with secret 1.
    pub counts: BTreeMap<BitVector, [u64; 2]>,
}

impl AuditReport {
    /// Every observable assignment leaves both secret values equally likely.
    pub fn is_balanced(&self) -> bool {
        self.counts.values().all(|[a, b]| a == b)
    }

    /// Every observable assignment pins the secret down.
    pub fn is_determined(&self) -> bool {
        self.counts.values().all(|[a, b]| *a == 0 || *b == 0)
    }

    pub fn assignments(&self) -> usize {
        self.counts.len()
    }
}

/// Exhaustive secrecy audit over all `2^k` information vectors.
pub fn security_audit(
    spec: &CodeSpec,
    p: usize,
    coalition: &Coalition,
    mode: Mode,
) -> Result<AuditReport> {
    let k = spec.dimension();
    if k > MAX_AUDIT_DIMENSION {
        return Err(Error::Size(format!(
            "dimension {k} exceeds the audit bound {MAX_AUDIT_DIMENSION}"
        )));
    }
    if spec.info_row(p).is_none() {
        return Err(Error::Argument(format!(
            "secret position {p} is not in the information set"
        )));
    }
    coalition.validate(spec, p)?;
    let observed = ShareColumns::new(spec).span_positions(coalition, mode);
    let g_u = generator_submatrix(spec);
    let offset = coset_offset(spec);

    // Gray-code walk over u; `t` tracks u · G_U ⊕ offset
    let mut t = offset.clone();
    let mut counts: BTreeMap<BitVector, [u64; 2]> = BTreeMap::new();
    let mut record = |t: &BitVector| {
        let view = BitVector::from_bools(observed.iter().map(|&i| t.get(i - 1)));
        counts.entry(view).or_insert([0, 0])[usize::from(t.get(p - 1))] += 1;
    };
    record(&t);
    for step in 1u64..(1u64 << k) {
        t.xor_assign(g_u.row(step.trailing_zeros() as usize));
        record(&t);
    }
    Ok(AuditReport { observed, counts })
}

/// True when the published frozen-position values alone determine the
/// secret for this code.
pub fn public_values_reveal_secret(spec: &CodeSpec) -> bool {
    let cols = ShareColumns::new(spec);
    let public = cols.span_positions(&Coalition::default(), Mode::Effective);
    cols.combination(spec.secret_position(), &public).is_some()
}
