//! Seeded Monte-Carlo runner for the branching process: single traces and
//! parallel replicate studies with exact integer aggregation.
//!
//! Reproducibility contract: every replicate owns a `ChaCha8` stream seeded
//! from the master seed and the replicate index through a 64-bit mixing
//! function, and all aggregation is integer arithmetic, so a study's output
//! is bit-identical for any thread count and any execution order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::OffspringModel;

/// Default generation cap for extinction studies: beyond 60 generations the
/// residual extinction mass is negligible against Monte-Carlo error for every
/// admissible intensity.
pub const DEFAULT_DEPTH_CAP: u32 = 60;

/// Largest intensity the inversion sampler accepts; model intensities in
/// practice stay an order of magnitude below.
pub const MAX_SAMPLER_LAMBDA: f64 = 30.0;

/// Population at which a replicate is declared a survivor and censored: the
/// chance a line this large still dies out is below alpha^500, zero for every
/// practical purpose.
const SURVIVAL_THRESHOLD: u64 = 500;

/// Censoring is deferred until this generation so the early populations
/// feeding the conditioned-mass estimators stay exact.
const CENSOR_MIN_GENERATION: u32 = 4;

/// Derives the RNG seed of one replicate from the master seed: the replicate
/// counter is spread by the golden-ratio increment, then finalized with the
/// splitmix64 avalanche so neighbouring indices land far apart.
pub fn replicate_seed(master_seed: u64, replicate: u64) -> u64 {
    let counter = replicate
        .wrapping_add(1)
        .wrapping_mul(0x9E37_79B9_7F4A_7C15);
    let mut z = master_seed.wrapping_add(counter);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Poisson sampler by inversion (sequential search through the CDF).
///
/// Exact and allocation-free; one uniform draw per sample. Restricted to
/// `lambda <= 30`, where the expected search length stays short.
#[derive(Clone, Copy, Debug)]
pub struct PoissonSampler {
    lambda: f64,
    p_zero: f64,
}

impl PoissonSampler {
    pub fn new(lambda: f64) -> Result<Self> {
        if !lambda.is_finite() || lambda <= 0.0 || lambda > MAX_SAMPLER_LAMBDA {
            return Err(Error::Domain {
                what: "inversion sampler requires 0 < lambda <= 30",
                value: lambda,
            });
        }
        Ok(Self {
            lambda,
            p_zero: (-lambda).exp(),
        })
    }

    /// Draws one offspring count.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.random();
        let mut n = 0u64;
        let mut p = self.p_zero;
        let mut acc = p;
        while u > acc {
            n += 1;
            p *= self.lambda / n as f64;
            acc += p;
            // Guards the u ~ 1 tail once the terms underflow.
            if p < f64::MIN_POSITIVE {
                break;
            }
        }
        n
    }
}

/// Per-generation populations of one simulated decomposition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenerationTrace {
    z: Vec<u64>,
    extinct_at: Option<u32>,
}

impl GenerationTrace {
    /// Population counts `Z(0), Z(1), ...` up to extinction or the cap.
    pub fn z(&self) -> &[u64] {
        &self.z
    }

    /// First generation with zero population, if the line died within the cap.
    pub fn extinct_at(&self) -> Option<u32> {
        self.extinct_at
    }

    /// Total elements through generation `n`: the sum of `z[0..=n]`, with
    /// generations past extinction contributing zero.
    pub fn truncated_total(&self, n: u32) -> u64 {
        self.z
            .iter()
            .take(n as usize + 1)
            .sum()
    }
}

/// Simulates the per-generation populations for one seed.
///
/// `z[k+1]` is the sum of `z[k]` independent offspring draws; the run stops
/// at extinction or after `depth_cap` generations. Identical inputs give a
/// bit-identical trace. Cost is proportional to the population, which grows
/// like `lambda^k` on surviving lines — keep the cap sensible.
///
/// # Examples
///
/// ```
/// let model = decomp::OffspringModel::new(2.0).unwrap();
/// let a = decomp::simulate_trace(&model, 42, 6).unwrap();
/// let b = decomp::simulate_trace(&model, 42, 6).unwrap();
/// assert_eq!(a, b);
/// assert_eq!(a.z()[0], 1);
/// ```
pub fn simulate_trace(
    model: &OffspringModel<f64>,
    seed: u64,
    depth_cap: u32,
) -> Result<GenerationTrace> {
    let sampler = PoissonSampler::new(model.lambda())?;
    require_depth_cap(depth_cap)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut z = vec![1u64];
    let mut extinct_at = None;
    for gen in 1..=depth_cap {
        let parents = *z.last().expect("nonempty");
        let mut next = 0u64;
        for _ in 0..parents {
            next += sampler.sample(&mut rng);
        }
        z.push(next);
        if next == 0 {
            extinct_at = Some(gen);
            break;
        }
    }
    Ok(GenerationTrace { z, extinct_at })
}

pub(crate) fn require_depth_cap(depth_cap: u32) -> Result<()> {
    if depth_cap == 0 {
        return Err(Error::Domain {
            what: "depth cap must be at least 1",
            value: 0.0,
        });
    }
    Ok(())
}

/// A point estimate with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
}

/// Aggregates of a replicate study.
///
/// Truncated-total statistics are reported only when no replicate was
/// censored by the survival short-circuit, so they are never biased;
/// extinction and conditioned-mass estimates are unaffected by censoring.
#[derive(Clone, Debug, PartialEq)]
pub struct SimulationSummary {
    pub replicates: u64,
    pub depth_cap: u32,
    /// Frequency of extinction within the cap, with binomial standard error.
    pub extinction: Estimate,
    /// Replicates declared survivors early by the population short-circuit.
    pub censored_replicates: u64,
    /// Mean total elements through `depth_cap`; `None` if any censoring.
    pub truncated_total_mean: Option<Estimate>,
    /// Unbiased sample variance of the truncated total; `None` if censored.
    pub truncated_total_var: Option<f64>,
    cond_mass: [Option<Estimate>; 3],
}

impl SimulationSummary {
    /// Monte-Carlo estimate of `E[Z(n); Z(n+1) = 0]` for `n` in `1..=3`;
    /// `None` when `n + 1` exceeds the depth cap (the indicator generation
    /// was never simulated) or `n` is out of range.
    pub fn cond_mass_estimate(&self, n: u32) -> Option<Estimate> {
        if (1..=3).contains(&n) {
            self.cond_mass[(n - 1) as usize]
        } else {
            None
        }
    }
}

/// One replicate reduced to what the study aggregates.
struct ReplicateOutcome {
    extinct_at: Option<u32>,
    censored: bool,
    total: u64,
    /// Populations `z[0..=4]`, zero past extinction; indices above the cap
    /// are never read.
    early: [u64; 5],
}

fn run_replicate(sampler: &PoissonSampler, seed: u64, depth_cap: u32) -> ReplicateOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut early = [0u64; 5];
    early[0] = 1;
    let mut pop = 1u64;
    let mut total = 1u64;
    let mut extinct_at = None;
    let mut censored = false;
    for gen in 1..=depth_cap {
        let mut next = 0u64;
        for _ in 0..pop {
            next += sampler.sample(&mut rng);
        }
        if (gen as usize) < early.len() {
            early[gen as usize] = next;
        }
        total += next;
        pop = next;
        if next == 0 {
            extinct_at = Some(gen);
            break;
        }
        if gen >= CENSOR_MIN_GENERATION && gen < depth_cap && next >= SURVIVAL_THRESHOLD {
            censored = true;
            break;
        }
    }
    ReplicateOutcome {
        extinct_at,
        censored,
        total,
        early,
    }
}

/// Exact integer partial sums; associative and commutative, so any rayon
/// partitioning reduces to the same numbers.
#[derive(Clone, Default)]
struct Accumulator {
    extinct: u64,
    censored: u64,
    total_sum: u128,
    total_sq_sum: u128,
    cond_sum: [u128; 3],
    cond_sq_sum: [u128; 3],
}

impl Accumulator {
    fn absorb(&mut self, outcome: &ReplicateOutcome, depth_cap: u32) {
        self.extinct += outcome.extinct_at.is_some() as u64;
        self.censored += outcome.censored as u64;
        if !outcome.censored {
            self.total_sum += outcome.total as u128;
            self.total_sq_sum += (outcome.total as u128) * (outcome.total as u128);
        }
        for n in 1..=3u32 {
            if n < depth_cap && outcome.early[(n + 1) as usize] == 0 {
                let v = outcome.early[n as usize] as u128;
                self.cond_sum[(n - 1) as usize] += v;
                self.cond_sq_sum[(n - 1) as usize] += v * v;
            }
        }
    }

    fn merge(mut self, other: Self) -> Self {
        self.extinct += other.extinct;
        self.censored += other.censored;
        self.total_sum += other.total_sum;
        self.total_sq_sum += other.total_sq_sum;
        for i in 0..3 {
            self.cond_sum[i] += other.cond_sum[i];
            self.cond_sq_sum[i] += other.cond_sq_sum[i];
        }
        self
    }
}

/// Unbiased mean/variance from exact integer sums over `r` observations.
fn mean_var_from_sums(r: u64, sum: u128, sq_sum: u128) -> (f64, f64) {
    let rf = r as f64;
    let mean = sum as f64 / rf;
    // r * Σx² - (Σx)² is exact in u128 and never negative.
    let num = r as u128 * sq_sum - sum * sum;
    let var = num as f64 / (rf * (rf - 1.0));
    (mean, var)
}

/// Runs `replicates` independent decompositions and aggregates them.
///
/// Deterministic in `(model, replicates, depth_cap, master_seed)` alone:
/// thread count and scheduling cannot change a single output bit.
///
/// # Examples
///
/// ```
/// let model = decomp::OffspringModel::new(2.0).unwrap();
/// let a = decomp::run_study(&model, 500, 10, 7).unwrap();
/// let b = decomp::run_study(&model, 500, 10, 7).unwrap();
/// assert_eq!(a, b);
/// ```
pub fn run_study(
    model: &OffspringModel<f64>,
    replicates: u64,
    depth_cap: u32,
    master_seed: u64,
) -> Result<SimulationSummary> {
    let sampler = PoissonSampler::new(model.lambda())?;
    require_depth_cap(depth_cap)?;
    if replicates < 100 {
        return Err(Error::Domain {
            what: "study needs at least 100 replicates for meaningful standard errors",
            value: replicates as f64,
        });
    }
    let acc = (0..replicates)
        .into_par_iter()
        .fold(Accumulator::default, |mut acc, r| {
            let outcome = run_replicate(&sampler, replicate_seed(master_seed, r), depth_cap);
            acc.absorb(&outcome, depth_cap);
            acc
        })
        .reduce(Accumulator::default, Accumulator::merge);

    let rf = replicates as f64;
    let freq = acc.extinct as f64 / rf;
    let extinction = Estimate {
        value: freq,
        std_error: (freq * (1.0 - freq) / rf).sqrt(),
    };
    let (truncated_total_mean, truncated_total_var) = if acc.censored == 0 {
        let (mean, var) = mean_var_from_sums(replicates, acc.total_sum, acc.total_sq_sum);
        (
            Some(Estimate {
                value: mean,
                std_error: (var / rf).sqrt(),
            }),
            Some(var),
        )
    } else {
        (None, None)
    };
    let mut cond_mass = [None; 3];
    for n in 1..=3u32 {
        if n < depth_cap {
            let i = (n - 1) as usize;
            let (mean, var) = mean_var_from_sums(replicates, acc.cond_sum[i], acc.cond_sq_sum[i]);
            cond_mass[i] = Some(Estimate {
                value: mean,
                std_error: (var / rf).sqrt(),
            });
        }
    }
    Ok(SimulationSummary {
        replicates,
        depth_cap,
        extinction,
        censored_replicates: acc.censored,
        truncated_total_mean,
        truncated_total_var,
        cond_mass,
    })
}
