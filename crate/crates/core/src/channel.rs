//! Binary-input memoryless symmetric channels.
//!
//! Capacity and Bhattacharyya parameter use base-2 logarithms. The BiAWGN
//! capacity has no closed form and is evaluated by 64-node Gauss-Hermite
//! quadrature over the conditional output density; the Bhattacharyya
//! parameter of the BiAWGN is the closed form `exp(-1/(2σ²))`.

use std::f64::consts::{LN_2, SQRT_2};
use std::fmt;
use std::num::NonZeroUsize;
use std::str::FromStr;
use std::sync::OnceLock;

use gauss_quad::hermite::GaussHermite;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

/// Node count of the quadrature rule used for the BiAWGN capacity.
pub const HERMITE_NODES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ChannelModel {
    /// Binary erasure channel with erasure probability ε.
    Bec(f64),
    /// Binary symmetric channel with crossover probability δ ≤ 1/2.
    Bsc(f64),
    /// Binary-input AWGN with BPSK mapping 0 → +1, 1 → −1 and noise deviation σ.
    BiAwgn(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReceivedSymbol {
    Bit(bool),
    Erasure,
    Real(f64),
}

impl ReceivedSymbol {
    /// Hard decision on the symbol; `None` for an erasure. A BiAWGN output of
    /// exactly zero decides for 0.
    pub fn hard_decision(&self) -> Option<bool> {
        match *self {
            ReceivedSymbol::Bit(b) => Some(b),
            ReceivedSymbol::Erasure => None,
            ReceivedSymbol::Real(y) => Some(y < 0.0),
        }
    }
}

impl ChannelModel {
    pub fn bec(epsilon: f64) -> Result<Self> {
        ChannelModel::Bec(epsilon).validated()
    }

    pub fn bsc(delta: f64) -> Result<Self> {
        ChannelModel::Bsc(delta).validated()
    }

    pub fn bi_awgn(sigma: f64) -> Result<Self> {
        ChannelModel::BiAwgn(sigma).validated()
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            ChannelModel::Bec(e) if (0.0..=1.0).contains(&e) => Ok(()),
            ChannelModel::Bsc(d) if (0.0..=0.5).contains(&d) => Ok(()),
            ChannelModel::BiAwgn(s) if s > 0.0 && s.is_finite() => Ok(()),
            ChannelModel::Bec(e) => Err(Error::Domain(format!(
                "BEC erasure probability {e} not in [0, 1]"
            ))),
            ChannelModel::Bsc(d) => Err(Error::Domain(format!(
                "BSC crossover probability {d} not in [0, 1/2]"
            ))),
            ChannelModel::BiAwgn(s) => Err(Error::Domain(format!(
                "AWGN sigma {s} must be positive and finite"
            ))),
        }
    }

    fn validated(self) -> Result<Self> {
        self.validate().map(|_| self)
    }

    pub fn parameter(&self) -> f64 {
        match *self {
            ChannelModel::Bec(x) | ChannelModel::Bsc(x) | ChannelModel::BiAwgn(x) => x,
        }
    }

    /// Symmetric capacity `I(W)` in bits per channel use.
    pub fn capacity(&self) -> Result<f64> {
        self.validate()?;
        Ok(match *self {
            ChannelModel::Bec(e) => 1.0 - e,
            ChannelModel::Bsc(d) => 1.0 - binary_entropy(d),
            ChannelModel::BiAwgn(s) => awgn_capacity(s),
        })
    }

    /// Bhattacharyya parameter `Z(W)`.
    pub fn bhattacharyya(&self) -> Result<f64> {
        self.validate()?;
        Ok(match *self {
            ChannelModel::Bec(e) => e,
            ChannelModel::Bsc(d) => 2.0 * (d * (1.0 - d)).sqrt(),
            ChannelModel::BiAwgn(s) => (-1.0 / (2.0 * s * s)).exp(),
        })
    }

    /// Sends one bit through the channel. The model is assumed valid.
    pub fn transmit<R: Rng + ?Sized>(&self, bit: bool, rng: &mut R) -> ReceivedSymbol {
        match *self {
            ChannelModel::Bec(e) => {
                if rng.random::<f64>() < e {
                    ReceivedSymbol::Erasure
                } else {
                    ReceivedSymbol::Bit(bit)
                }
            }
            ChannelModel::Bsc(d) => ReceivedSymbol::Bit(bit ^ (rng.random::<f64>() < d)),
            ChannelModel::BiAwgn(s) => {
                let noise = Normal::new(0.0, s).expect("validated sigma");
                let x = if bit { -1.0 } else { 1.0 };
                ReceivedSymbol::Real(x + noise.sample(rng))
            }
        }
    }
}

impl fmt::Display for ChannelModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            ChannelModel::Bec(e) => write!(f, "bec:{e}"),
            ChannelModel::Bsc(d) => write!(f, "bsc:{d}"),
            ChannelModel::BiAwgn(s) => write!(f, "awgn:{s}"),
        }
    }
}

impl FromStr for ChannelModel {
    type Err = Error;

    /// Parses `bec:<ε>`, `bsc:<δ>` or `awgn:<σ>`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, value) = s.trim().split_once(':').ok_or_else(|| {
            Error::Argument(format!("channel {s:?}: expected <kind>:<parameter>"))
        })?;
        let value: f64 = value
            .parse()
            .map_err(|_| Error::Argument(format!("channel {s:?}: bad parameter {value:?}")))?;
        match kind {
            "bec" => ChannelModel::bec(value),
            "bsc" => ChannelModel::bsc(value),
            "awgn" => ChannelModel::bi_awgn(value),
            other => Err(Error::Argument(format!("unknown channel kind {other:?}"))),
        }
    }
}

/// `h2(p) = -p log2 p - (1-p) log2 (1-p)`, zero at the endpoints.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    term(p) + term(1.0 - p)
}

/// `ln(1 + e^a)` without overflow.
fn softplus(a: f64) -> f64 {
    a.max(0.0) + (-a.abs()).exp().ln_1p()
}

fn hermite_rule() -> &'static GaussHermite {
    static RULE: OnceLock<GaussHermite> = OnceLock::new();
    RULE.get_or_init(|| GaussHermite::new(NonZeroUsize::new(HERMITE_NODES).unwrap()))
}

/// By symmetry `I(W) = 1 - E[log2(1 + e^{-L})]` with `L = 2Y/σ²` and
/// `Y ~ N(1, σ²)`. Substituting `Y = 1 + σ√2·x` turns the expectation into a
/// Gauss-Hermite integral against `e^{-x²}/√π`.
fn awgn_capacity(sigma: f64) -> f64 {
    let s2 = sigma * sigma;
    let integral = hermite_rule().integrate(|x| {
        let y = 1.0 + sigma * SQRT_2 * x;
        softplus(-2.0 * y / s2)
    });
    let expected = integral / std::f64::consts::PI.sqrt() / LN_2;
    (1.0 - expected).clamp(0.0, 1.0)
}

/// Gaussian tail `Q(x) = P(N(0,1) > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * statrs::function::erf::erfc(x / SQRT_2)
}
