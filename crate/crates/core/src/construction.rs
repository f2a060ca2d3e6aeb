//! Polar code construction: per-index reliabilities, the information set,
//! the generator/dual submatrices and the two encoders.
//!
//! Indices handed in and out of this module are 1-based. The synthetic
//! channel of index `i` is reached by reading the bits of `i - 1` most
//! significant first, a 0 bit applying the "minus" (check) transform and a 1
//! bit the "plus" (variable) transform. No bit-reversal is applied anywhere,
//! matching `x = u · G_N` with `G_N` in natural Kronecker order.

use crate::channel::{q_function, ChannelModel};
use crate::error::{Error, Result};
use crate::gf2::{self, dual_row, polar_row, BitMatrix, BitVector};

/// Largest block-length exponent accepted by [`build_code`].
pub const MAX_CODE_EXPONENT: u32 = 20;

/// A constructed polar code together with its sharing position `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeSpec {
    channel: ChannelModel,
    n: u32,
    info_set: Vec<usize>,
    frozen: Vec<usize>,
    p: usize,
    reliability: Vec<f64>,
    frozen_values: BitVector,
}

impl CodeSpec {
    /// Assembles and validates a code from explicit parts. `info_set` may be
    /// in any order; it is stored ascending.
    pub fn from_parts(
        channel: ChannelModel,
        n: u32,
        info_set: Vec<usize>,
        p: usize,
        reliability: Vec<f64>,
        frozen_values: BitVector,
    ) -> Result<Self> {
        channel.validate()?;
        if n > MAX_CODE_EXPONENT {
            return Err(Error::Size(format!(
                "exponent {n} exceeds {MAX_CODE_EXPONENT}"
            )));
        }
        let size = 1usize << n;
        let mut info_set = info_set;
        info_set.sort_unstable();
        info_set.dedup();
        if info_set.is_empty() {
            return Err(Error::Config("information set is empty".into()));
        }
        if let Some(&bad) = info_set.iter().find(|&&i| i == 0 || i > size) {
            return Err(Error::Config(format!("index {bad} outside 1..={size}")));
        }
        if !info_set.contains(&p) {
            return Err(Error::Config(format!(
                "secret position {p} is not in the information set"
            )));
        }
        if reliability.len() != size {
            return Err(Error::Shape(format!(
                "reliability vector has {} entries, expected {size}",
                reliability.len()
            )));
        }
        let frozen: Vec<usize> = (1..=size)
            .filter(|i| info_set.binary_search(i).is_err())
            .collect();
        if frozen_values.len() != frozen.len() {
            return Err(Error::Shape(format!(
                "{} frozen values for {} frozen positions",
                frozen_values.len(),
                frozen.len()
            )));
        }
        let spec = CodeSpec {
            channel,
            n,
            info_set,
            frozen,
            p,
            reliability,
            frozen_values,
        };
        debug_assert!(generator_submatrix(&spec)
            .mul(&dual_submatrix(&spec).transpose())
            .map(|m| m.is_zero())
            .unwrap_or(false));
        Ok(spec)
    }

    pub fn channel(&self) -> ChannelModel {
        self.channel
    }

    pub fn exponent(&self) -> u32 {
        self.n
    }

    pub fn block_length(&self) -> usize {
        1 << self.n
    }

    pub fn dimension(&self) -> usize {
        self.info_set.len()
    }

    /// The information set `A`, ascending and 1-based.
    pub fn information_set(&self) -> &[usize] {
        &self.info_set
    }

    /// The frozen set `A^c`, ascending and 1-based.
    pub fn frozen_set(&self) -> &[usize] {
        &self.frozen
    }

    pub fn secret_position(&self) -> usize {
        self.p
    }

    pub fn reliability(&self) -> &[f64] {
        &self.reliability
    }

    pub fn frozen_values(&self) -> &BitVector {
        &self.frozen_values
    }

    pub fn is_frozen(&self, position: usize) -> bool {
        self.frozen.binary_search(&position).is_ok()
    }

    /// Row of `G_U` holding information index `position`, if any.
    pub fn info_row(&self, position: usize) -> Option<usize> {
        self.info_set.binary_search(&position).ok()
    }

    pub fn with_secret_position(&self, p: usize) -> Result<Self> {
        if self.info_row(p).is_none() {
            return Err(Error::Config(format!(
                "secret position {p} is not in the information set"
            )));
        }
        Ok(CodeSpec { p, ..self.clone() })
    }

    /// Same code with nonzero fixed bits on the frozen positions (a coset).
    pub fn with_frozen_values(&self, values: BitVector) -> Result<Self> {
        CodeSpec::from_parts(
            self.channel,
            self.n,
            self.info_set.clone(),
            self.p,
            self.reliability.clone(),
            values,
        )
    }

    /// Sub-code keeping only `subset` of the information set. The secret
    /// position is kept when it survives, otherwise it moves to the most
    /// reliable index of the subset.
    pub fn restrict_information_set(&self, subset: &[usize]) -> Result<Self> {
        if let Some(bad) = subset.iter().find(|i| self.info_row(**i).is_none()) {
            return Err(Error::Config(format!(
                "index {bad} is not in the information set"
            )));
        }
        let p = if subset.contains(&self.p) {
            self.p
        } else {
            best_index(&self.reliability, subset)
                .ok_or_else(|| Error::Config("empty subset".into()))?
        };
        let frozen = self.block_length() - {
            let mut s = subset.to_vec();
            s.sort_unstable();
            s.dedup();
            s.len()
        };
        CodeSpec::from_parts(
            self.channel,
            self.n,
            subset.to_vec(),
            p,
            self.reliability.clone(),
            BitVector::zeros(frozen),
        )
    }
}

fn check_block_length(size: usize) -> Result<u32> {
    if size == 0 || !size.is_power_of_two() {
        return Err(Error::Shape(format!(
            "block length {size} is not a power of two"
        )));
    }
    let n = size.trailing_zeros();
    if n > MAX_CODE_EXPONENT {
        return Err(Error::Size(format!(
            "block length 2^{n} exceeds 2^{MAX_CODE_EXPONENT}"
        )));
    }
    Ok(n)
}

/// Expands a scalar polarization recursion into per-index values: level by
/// level, entry `j` spawns `minus(v)` at `2j` and `plus(v)` at `2j + 1`, so
/// the first transform applied is the most significant bit of the index.
fn evolve(initial: f64, n: u32, minus: impl Fn(f64) -> f64, plus: impl Fn(f64) -> f64) -> Vec<f64> {
    let mut level = vec![initial];
    for _ in 0..n {
        level = level.iter().flat_map(|&v| [minus(v), plus(v)]).collect();
    }
    level
}

/// Exact Bhattacharyya parameters of the synthetic channels of BEC(ε).
pub fn bec_reliabilities(epsilon: f64, size: usize) -> Result<Vec<f64>> {
    let n = check_block_length(size)?;
    ChannelModel::bec(epsilon)?;
    Ok(bhattacharyya_evolution(epsilon, n))
}

/// `z⁻ = 2z − z²`, `z⁺ = z²`. Exact on the BEC, an upper-bound heuristic on
/// other channels.
fn bhattacharyya_evolution(z: f64, n: u32) -> Vec<f64> {
    evolve(z, n, |z| 2.0 * z - z * z, |z| z * z)
}

const GA_ALPHA: f64 = -0.4527;
const GA_BETA: f64 = 0.0218;
const GA_GAMMA: f64 = 0.86;
const GA_SWITCH: f64 = 10.0;
const GA_TOLERANCE: f64 = 1e-9;

/// The Gaussian-approximation function relating a consistent-Gaussian LLR
/// mean to its check-node message statistic.
pub fn ga_phi(x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else if x < GA_SWITCH {
        (GA_ALPHA * x.powf(GA_GAMMA) + GA_BETA).exp()
    } else {
        (std::f64::consts::PI / x).sqrt() * (-x / 4.0).exp() * (1.0 - 10.0 / (7.0 * x))
    }
}

/// Inverse of [`ga_phi`] by bisection.
pub fn ga_phi_inverse(y: f64) -> f64 {
    if y >= 1.0 {
        return 0.0;
    }
    let mut hi = 1.0;
    while ga_phi(hi) > y {
        hi *= 2.0;
        if !hi.is_finite() {
            return f64::INFINITY;
        }
    }
    let mut lo = 0.0;
    for _ in 0..400 {
        if hi - lo <= GA_TOLERANCE {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if ga_phi(mid) > y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn ga_check_node(m: f64) -> f64 {
    let phi = ga_phi(m);
    let y = 1.0 - (1.0 - phi) * (1.0 - phi);
    if y <= f64::MIN_POSITIVE {
        // φ underflowed: on the tail φ(x) ~ e^{-x/4}, and doubling φ shifts x by 4 ln 2
        return m - 4.0 * std::f64::consts::LN_2;
    }
    ga_phi_inverse(y)
}

/// Mean LLR of every synthetic channel of the BiAWGN(σ) under the Gaussian
/// approximation.
pub fn awgn_mean_llrs(sigma: f64, size: usize) -> Result<Vec<f64>> {
    let n = check_block_length(size)?;
    ChannelModel::bi_awgn(sigma)?;
    Ok(evolve(2.0 / (sigma * sigma), n, ga_check_node, |m| 2.0 * m))
}

/// Estimated bit-error probability `Q(sqrt(m/2))` of each synthetic channel
/// of the BiAWGN(σ); lower is better.
pub fn awgn_reliabilities(sigma: f64, size: usize) -> Result<Vec<f64>> {
    Ok(awgn_mean_llrs(sigma, size)?
        .into_iter()
        .map(|m| q_function((m / 2.0).sqrt()))
        .collect())
}

/// Per-index scores for any supported channel. The BSC has no exact
/// recursion; it uses the Bhattacharyya evolution seeded with `Z(BSC)`.
pub fn reliabilities(channel: &ChannelModel, size: usize) -> Result<Vec<f64>> {
    match *channel {
        ChannelModel::Bec(e) => bec_reliabilities(e, size),
        ChannelModel::BiAwgn(s) => awgn_reliabilities(s, size),
        ChannelModel::Bsc(_) => {
            let n = check_block_length(size)?;
            Ok(bhattacharyya_evolution(channel.bhattacharyya()?, n))
        }
    }
}

/// The `k` indices with the smallest scores, ties going to the smaller
/// index, returned ascending and 1-based.
pub fn select_information_set(reliability: &[f64], k: usize) -> Result<Vec<usize>> {
    if k == 0 || k > reliability.len() {
        return Err(Error::Argument(format!(
            "dimension {k} not in 1..={}",
            reliability.len()
        )));
    }
    let mut order: Vec<usize> = (0..reliability.len()).collect();
    order.sort_by(|&a, &b| reliability[a].total_cmp(&reliability[b]).then(a.cmp(&b)));
    let mut set: Vec<usize> = order[..k].iter().map(|i| i + 1).collect();
    set.sort_unstable();
    Ok(set)
}

/// Most reliable index of `candidates`; ties go to the larger index, which
/// keeps the all-plus index `N` when scores underflow together.
fn best_index(reliability: &[f64], candidates: &[usize]) -> Option<usize> {
    candidates.iter().copied().min_by(|&a, &b| {
        reliability[a - 1]
            .total_cmp(&reliability[b - 1])
            .then(b.cmp(&a))
    })
}

/// Constructs the `(2^n, k)` polar code for `channel` with zero frozen
/// values. Without an explicit `p` the secret sits at the most reliable
/// information index.
pub fn build_code(channel: ChannelModel, n: u32, k: usize, p: Option<usize>) -> Result<CodeSpec> {
    if n > MAX_CODE_EXPONENT {
        return Err(Error::Size(format!(
            "exponent {n} exceeds {MAX_CODE_EXPONENT}"
        )));
    }
    let size = 1usize << n;
    let reliability = reliabilities(&channel, size)?;
    let info_set = select_information_set(&reliability, k)?;
    let p = match p {
        Some(p) if info_set.binary_search(&p).is_ok() => p,
        Some(p) => {
            return Err(Error::Config(format!(
                "requested secret position {p} is not in the information set {}",
                join(&info_set)
            )))
        }
        None => best_index(&reliability, &info_set).expect("k >= 1"),
    };
    CodeSpec::from_parts(
        channel,
        n,
        info_set,
        p,
        reliability,
        BitVector::zeros(size - k),
    )
}

pub(crate) fn join(indices: &[usize]) -> String {
    indices
        .iter()
        .map(usize::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

/// `G_U`: the rows of `G_N` at the information set, ascending.
pub fn generator_submatrix(spec: &CodeSpec) -> BitMatrix {
    rows_of(spec, spec.information_set(), polar_row)
}

/// `H_U`: the rows of `H_N` at the frozen set, ascending.
pub fn dual_submatrix(spec: &CodeSpec) -> BitMatrix {
    rows_of(spec, spec.frozen_set(), dual_row)
}

fn rows_of(spec: &CodeSpec, indices: &[usize], row: fn(u32, usize) -> BitVector) -> BitMatrix {
    let rows = indices
        .iter()
        .map(|&i| row(spec.exponent(), i - 1))
        .collect();
    BitMatrix::from_rows(rows, spec.block_length()).expect("rows of a kernel share its width")
}

/// Coset encoder `x = u_A · G_N(A) ⊕ u_{A^c} · G_N(A^c)` with the stored
/// frozen values as `u_{A^c}`.
pub fn encode(spec: &CodeSpec, info_bits: &BitVector) -> Result<BitVector> {
    if info_bits.len() != spec.dimension() {
        return Err(Error::Shape(format!(
            "{} information bits for a code of dimension {}",
            info_bits.len(),
            spec.dimension()
        )));
    }
    let mut x = generator_submatrix(spec).left_mul(info_bits)?;
    for (slot, &i) in spec.frozen_set().iter().enumerate() {
        if spec.frozen_values().get(slot) {
            x.xor_assign(&polar_row(spec.exponent(), i - 1));
        }
    }
    Ok(x)
}

/// Systematic encoder: the codeword of `span(G_U)` whose coordinates on the
/// information set equal `info_bits`, obtained by solving
/// `[x_F x_U] · H_U^T = 0` for `x_F`.
pub fn systematic_encode(spec: &CodeSpec, info_bits: &BitVector) -> Result<BitVector> {
    if info_bits.len() != spec.dimension() {
        return Err(Error::Shape(format!(
            "{} information bits for a code of dimension {}",
            info_bits.len(),
            spec.dimension()
        )));
    }
    let size = spec.block_length();
    let mut x = BitVector::zeros(size);
    for (slot, &i) in spec.information_set().iter().enumerate() {
        x.set(i - 1, info_bits.get(slot));
    }
    let frozen: Vec<usize> = spec.frozen_set().iter().map(|i| i - 1).collect();
    if frozen.is_empty() {
        return Ok(x);
    }
    let h_u = dual_submatrix(spec);
    // parity each dual row sees from the information coordinates
    let rhs = BitVector::from_bools(h_u.rows().iter().map(|h| h.dot(&x)));
    // x_F · (H_U restricted to F)^T = rhs
    let system = h_u.select_columns(&frozen).transpose();
    let x_f = gf2::solve(&system, &rhs)?
        .expect("H_U restricted to the frozen columns is a triangular, invertible block");
    for (slot, &i) in frozen.iter().enumerate() {
        x.set(i, x_f.get(slot));
    }
    Ok(x)
}

/// Weight of column `j` (1-based) of `G_N`: two to the number of zero bits
/// in the `n`-bit expansion of `j - 1`.
pub fn column_weight(j: usize, size: usize) -> Result<usize> {
    let n = check_block_length(size)?;
    if j == 0 || j > size {
        return Err(Error::Argument(format!("column {j} not in 1..={size}")));
    }
    let zeros = n - (j - 1).count_ones();
    Ok(1 << zeros)
}

/// Weight of row `i` (1-based) of `G_N`.
pub fn row_weight(i: usize) -> usize {
    1 << (i - 1).count_ones()
}

/// Largest subset of the information set whose `G_N` rows share one weight;
/// between classes of equal size the heavier weight wins.
pub fn select_equal_weight_rows(spec: &CodeSpec) -> Vec<usize> {
    let mut classes: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for &i in spec.information_set() {
        classes.entry(row_weight(i)).or_default().push(i);
    }
    classes
        .into_iter()
        .max_by(|(wa, a), (wb, b)| a.len().cmp(&b.len()).then(wa.cmp(wb)))
        .map(|(_, rows)| rows)
        .unwrap_or_default()
}
