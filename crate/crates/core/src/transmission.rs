//! Monte-Carlo distribution of shares over a noisy channel.
//!
//! Every trial deals a fresh random secret, sends each share and public value
//! through the code's channel, and lets each coalition try to reconstruct
//! from what arrived. Erased symbols are missing; BSC and AWGN outputs are
//! hard-decided. Trial `i` draws from its own ChaCha20 stream keyed by
//! `mix(seed, i)`, and the per-trial counts are integers, so a report does not
//! depend on the number of worker threads.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::access::{Coalition, Mode, ShareColumns};
use crate::channel::ReceivedSymbol;
use crate::construction::{encode, CodeSpec};
use crate::error::{Error, Result};
use crate::format::code_digest;
use crate::gf2::BitVector;
use crate::sharing::{deal_for_simulation, reconstruct_pooled};

/// SplitMix64 applied to `seed + (i + 1)·γ`.
pub fn mix(seed: u64, i: u64) -> u64 {
    let mut z = seed.wrapping_add(i.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub trials: u64,
    pub seed: u64,
    pub mode: Mode,
    /// Indexed by position − 1. `None` at `p`, which is never sent.
    pub per_position_failure: Vec<Option<f64>>,
    pub coalition_success: Vec<(Coalition, f64)>,
}

impl SimReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("position,failure_rate\n");
        for (i, rate) in self.per_position_failure.iter().enumerate() {
            if let Some(rate) = rate {
                let _ = writeln!(out, "{},{rate:.6}", i + 1);
            }
        }
        out.push_str("\ncoalition,success_rate\n");
        for (coalition, rate) in &self.coalition_success {
            let _ = writeln!(out, "\"{coalition}\",{rate:.6}");
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
struct Tally {
    position_failures: Vec<u64>,
    coalition_successes: Vec<u64>,
}

impl Tally {
    fn new(positions: usize, coalitions: usize) -> Self {
        Tally {
            position_failures: vec![0; positions],
            coalition_successes: vec![0; coalitions],
        }
    }

    fn merge(mut self, other: Tally) -> Tally {
        for (a, b) in self
            .position_failures
            .iter_mut()
            .zip(other.position_failures)
        {
            *a += b;
        }
        for (a, b) in self
            .coalition_successes
            .iter_mut()
            .zip(other.coalition_successes)
        {
            *a += b;
        }
        self
    }
}

struct Trial<'a> {
    spec: &'a CodeSpec,
    columns: ShareColumns,
    offset: BitVector,
    digest: u64,
    coalitions: &'a [Coalition],
    mode: Mode,
    seed: u64,
}

impl Trial<'_> {
    fn run(&self, index: u64, tally: &mut Tally) {
        let mut rng = ChaCha20Rng::seed_from_u64(mix(self.seed, index));
        let secret: bool = rng.random();
        let dealing = deal_for_simulation(self.spec, self.digest, secret, &mut rng);
        let channel = self.spec.channel();

        // received[i - 1]: hard decision at position i, None when erased or p
        let mut received: Vec<Option<bool>> = vec![None; self.spec.block_length()];
        for share in dealing.member_shares.iter().chain(&dealing.public_values) {
            let symbol: ReceivedSymbol = channel.transmit(share.bit, &mut rng);
            let decided = symbol.hard_decision();
            if decided != Some(share.bit) {
                tally.position_failures[share.position - 1] += 1;
            }
            received[share.position - 1] = decided;
        }

        for (c, coalition) in self.coalitions.iter().enumerate() {
            let pooled: Vec<(usize, bool)> = (1..=self.spec.block_length())
                .filter(|&i| {
                    coalition.contains(i)
                        || (self.mode == Mode::Effective && self.spec.is_frozen(i))
                })
                .filter_map(|i| received[i - 1].map(|b| (i, b)))
                .collect();
            let outcome =
                reconstruct_pooled(self.spec, &self.columns, &self.offset, &pooled, self.mode);
            if outcome == Ok(secret) {
                tally.coalition_successes[c] += 1;
            }
        }
    }
}

/// Runs `trials` trials on the global thread pool.
pub fn simulate(
    spec: &CodeSpec,
    coalitions: &[Coalition],
    mode: Mode,
    trials: u64,
    seed: u64,
) -> Result<SimReport> {
    simulate_inner(spec, coalitions, mode, trials, seed)
}

/// As [`simulate`], on a dedicated pool of `workers` threads.
pub fn simulate_with_workers(
    spec: &CodeSpec,
    coalitions: &[Coalition],
    mode: Mode,
    trials: u64,
    seed: u64,
    workers: usize,
) -> Result<SimReport> {
    if workers == 0 {
        return Err(Error::Argument("worker count must be positive".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    pool.install(|| simulate_inner(spec, coalitions, mode, trials, seed))
}

fn simulate_inner(
    spec: &CodeSpec,
    coalitions: &[Coalition],
    mode: Mode,
    trials: u64,
    seed: u64,
) -> Result<SimReport> {
    if trials == 0 {
        return Err(Error::Argument("trial count must be positive".into()));
    }
    let p = spec.secret_position();
    for coalition in coalitions {
        coalition.validate(spec, p)?;
    }
    let trial = Trial {
        spec,
        columns: ShareColumns::new(spec),
        offset: encode(spec, &BitVector::zeros(spec.dimension()))?,
        digest: code_digest(spec),
        coalitions,
        mode,
        seed,
    };
    let size = spec.block_length();
    let empty = || Tally::new(size, coalitions.len());
    let tally = (0..trials)
        .into_par_iter()
        .fold(empty, |mut tally, i| {
            trial.run(i, &mut tally);
            tally
        })
        .reduce(empty, Tally::merge);

    let n = trials as f64;
    let per_position_failure = tally
        .position_failures
        .iter()
        .enumerate()
        .map(|(i, &f)| (i + 1 != p).then(|| f as f64 / n))
        .collect();
    let coalition_success = coalitions
        .iter()
        .cloned()
        .zip(tally.coalition_successes.iter().map(|&s| s as f64 / n))
        .collect();
    Ok(SimReport {
        trials,
        seed,
        mode,
        per_position_failure,
        coalition_success,
    })
}
