//! Triangular law of the decomposition-horizon level `G` on `0..=K+1`.
//!
//! The law rises linearly to its mode `K_m = ceil((K+1)/2)` and falls
//! linearly afterwards, with exact rational weights; the even-`K` branch uses
//! two different denominators, `(K+1)(K+2)` rising and `K(K+1)` falling, and
//! still sums to one exactly. All probabilities are `Ratio<u64>`, so every
//! identity here is checked in exact arithmetic, not floating point.

use num_rational::Ratio;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::model::max_horizon;
use crate::scalar::Scalar;

/// Exact probability weight of a horizon level.
pub type ExactProb = Ratio<u64>;

/// Largest supported maximum horizon: keeps `(K+1)(K+2)` inside `u64`.
pub const MAX_SUPPORTED_K: u64 = 4_294_967_294;

/// Distribution of the horizon level for a process with maximum horizon `K`.
///
/// Stores only the closed-form summary (mode, mean, expected horizon);
/// individual weights come from [`HorizonDistribution::prob`] on demand and
/// [`HorizonDistribution::probs`] materializes the full vector of `K + 2`
/// weights indexed by level `0..=K+1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HorizonDistribution {
    k: u64,
    k_m: u64,
    k_bar: u64,
    mean: ExactProb,
}

impl HorizonDistribution {
    /// Builds the law for maximum horizon `k >= 1`.
    ///
    /// # Examples
    ///
    /// ```
    /// use decomp::horizon::HorizonDistribution;
    /// let law = HorizonDistribution::new(5).unwrap();
    /// assert_eq!(law.k_m(), 3);
    /// assert_eq!(law.k_bar(), 3);
    /// ```
    pub fn new(k: u64) -> Result<Self> {
        if k < 1 {
            return Err(Error::Domain {
                what: "horizon law requires a maximum horizon k >= 1",
                value: k as f64,
            });
        }
        if k > MAX_SUPPORTED_K {
            return Err(Error::Domain {
                what: "horizon law supports k up to 4294967294",
                value: k as f64,
            });
        }
        let k_m = (k + 1).div_ceil(2);
        // The mean has a closed form: (K+1)/2 for odd K, K/2 + 2/3 for even;
        // k_bar is its ceiling. Verified against the defining sum in tests.
        let (mean, k_bar) = if k % 2 == 1 {
            (Ratio::new(k + 1, 2), k.div_ceil(2))
        } else {
            (Ratio::new(3 * k + 4, 6), k / 2 + 1)
        };
        Ok(Self { k, k_m, k_bar, mean })
    }

    /// Maximum horizon `K`.
    pub fn k(&self) -> u64 {
        self.k
    }

    /// Mode of the law, `K_m = ceil((K+1)/2)`.
    pub fn k_m(&self) -> u64 {
        self.k_m
    }

    /// Expected horizon `K-bar`: the ceiling of the exact mean.
    pub fn k_bar(&self) -> u64 {
        self.k_bar
    }

    /// Exact mean of the law.
    pub fn mean(&self) -> ExactProb {
        self.mean
    }

    /// Exact weight `P{G = n}`; zero outside the support `1..=K`.
    pub fn prob(&self, n: u64) -> ExactProb {
        if n == 0 || n > self.k {
            return Ratio::zero();
        }
        let k = self.k;
        if k.is_multiple_of(2) {
            if n <= self.k_m {
                Ratio::new(4 * n, (k + 1) * (k + 2))
            } else {
                Ratio::new(4 * (k + 1 - n), k * (k + 1))
            }
        } else {
            let denom = (k + 1) * (k + 1);
            if n <= self.k_m {
                Ratio::new(4 * n, denom)
            } else {
                Ratio::new(4 * (k + 1 - n), denom)
            }
        }
    }

    /// Weight `P{G = n}` as a float.
    pub fn prob_f64(&self, n: u64) -> f64 {
        let r = self.prob(n);
        *r.numer() as f64 / *r.denom() as f64
    }

    /// The full weight vector for levels `0..=K+1` (length `K + 2`).
    ///
    /// Allocates `K + 2` entries; prefer [`HorizonDistribution::prob`] for
    /// very large `K`.
    pub fn probs(&self) -> Vec<ExactProb> {
        (0..=self.k + 1).map(|n| self.prob(n)).collect()
    }
}

/// Horizon law for a given maximum horizon; see [`HorizonDistribution`].
pub fn horizon_distribution(k: u64) -> Result<HorizonDistribution> {
    HorizonDistribution::new(k)
}

/// Expected decomposition horizon for intensity `lambda`: the `k_bar` of the
/// horizon law at `K = max_horizon(lambda)`.
///
/// # Examples
///
/// ```
/// assert_eq!(decomp::expected_horizon(5.0_f64).unwrap(), 3);
/// assert_eq!(decomp::expected_horizon(8.0_f64).unwrap(), 4);
/// ```
pub fn expected_horizon<S: Scalar>(lambda: S) -> Result<u64> {
    let (_, k_max) = max_horizon(lambda)?;
    Ok(HorizonDistribution::new(k_max)?.k_bar())
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn law_is_an_exact_probability_distribution(k in 1u64..400) {
            let law = HorizonDistribution::new(k).unwrap();
            let probs = law.probs();
            prop_assert_eq!(probs.len() as u64, k + 2);
            let sum: ExactProb = probs.iter().copied().sum();
            prop_assert_eq!(sum, Ratio::from_integer(1));
            prop_assert!(probs[0].is_zero());
            prop_assert!(probs[(k + 1) as usize].is_zero());
            // Mode location: no weight exceeds the one at k_m.
            let peak = law.prob(law.k_m());
            for p in &probs {
                prop_assert!(*p <= peak);
            }
        }

        #[test]
        fn mean_sits_inside_the_support(k in 1u64..400) {
            let law = HorizonDistribution::new(k).unwrap();
            let mean = law.mean();
            prop_assert!(mean >= Ratio::from_integer(1));
            prop_assert!(mean <= Ratio::from_integer(k));
            prop_assert!(law.k_bar() >= 1);
            prop_assert!(law.k_bar() <= k);
        }
    }
}
