//! Total element counts of the decomposition tree: moments at a fixed depth
//! and at the random horizon level.

use crate::error::Result;
use crate::horizon::HorizonDistribution;
use crate::model::{pow_u64, require_supercritical};
use crate::scalar::{cast, Scalar};

/// Predicted totals for a process with intensity `lambda`: moments of `T(n)`
/// at the fixed depth `n = k_bar` and of `T(G)` over the random horizon `G`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TotalsPrediction<S: Scalar> {
    /// `E[T(k_bar)]` at the expected horizon.
    pub mean_fixed: S,
    /// `D[T(k_bar)]` at the expected horizon.
    pub var_fixed: S,
    /// `E[T(G)]`, the horizon-law mixture of the fixed-depth means.
    pub mean_random: S,
    /// `D[T(G)]`, via the mixture of second moments.
    pub var_random: S,
}

/// Expected total `E[T(n)] = (lambda^(n+1) - 1) / (lambda - 1)`: the
/// geometric-progression sum of the per-generation means.
///
/// # Examples
///
/// ```
/// let e: f64 = decomp::expected_total_fixed(2.0, 2).unwrap();
/// assert_eq!(e, 7.0); // 1 + 2 + 4
/// ```
pub fn expected_total_fixed<S: Scalar>(lambda: S, n: u64) -> Result<S> {
    require_supercritical(lambda)?;
    Ok((pow_u64(lambda, n + 1) - S::one()) / (lambda - S::one()))
}

/// Variance `D[T(n)]` of the total through depth `n`:
///
/// ```text
/// lambda^n (lambda^n - 1) / (lambda - 1)
///   + (2 lambda + 1)/(lambda - 1)
///     * ((lambda^(2n) - 1)/(lambda^2 - 1) - (lambda^n - 1)/(lambda - 1))
/// ```
pub fn variance_total_fixed<S: Scalar>(lambda: S, n: u64) -> Result<S> {
    require_supercritical(lambda)?;
    let lam_n = pow_u64(lambda, n);
    Ok(variance_from_power(lambda, lam_n))
}

/// The variance formula given `lambda^n`, shared with the streaming mixture.
fn variance_from_power<S: Scalar>(lambda: S, lam_n: S) -> S {
    let one = S::one();
    let lam_2n = lam_n * lam_n;
    let head = lam_n * (lam_n - one) / (lambda - one);
    let weight = (cast::<S>(2.0) * lambda + one) / (lambda - one);
    let tail = (lam_2n - one) / (lambda * lambda - one) - (lam_n - one) / (lambda - one);
    head + weight * tail
}

/// Moments of the total at the random horizon `G`, mixing the fixed-depth
/// moments over the horizon law at `K = max_horizon(lambda)`, plus the
/// fixed-depth moments at `n = k_bar` for reference.
///
/// Streams the support in one pass with running powers of `lambda`, so the
/// cost is linear in `K` with no allocation; if the mixture overflows `S`
/// the affected moments are reported as infinity.
///
/// # Examples
///
/// ```
/// let t = decomp::totals_random_horizon(5.0_f64).unwrap();
/// assert!((t.mean_random - 6004.0 / 9.0).abs() < 1e-9);
/// ```
pub fn totals_random_horizon<S: Scalar>(lambda: S) -> Result<TotalsPrediction<S>> {
    let profile = crate::model::extinction_probability(lambda)?;
    let law = HorizonDistribution::new(profile.k_max)?;
    totals_with_law(lambda, &law)
}

/// Mixture moments over an explicit horizon law; the public entry point ties
/// the law to `max_horizon(lambda)`.
pub(crate) fn totals_with_law<S: Scalar>(
    lambda: S,
    law: &HorizonDistribution,
) -> Result<TotalsPrediction<S>> {
    require_supercritical(lambda)?;
    let one = S::one();
    let mut mean_random = S::zero();
    let mut second_moment = S::zero();
    // Running powers: lambda^(n+1) for the mean, lambda^n for the variance.
    let mut lam_next = lambda;
    let mut lam_n = one;
    for n in 0..=law.k() {
        let p = cast::<S>(law.prob_f64(n));
        if p > S::zero() {
            let e_t = (lam_next - one) / (lambda - one);
            let d_t = variance_from_power(lambda, lam_n);
            mean_random = mean_random + p * e_t;
            second_moment = second_moment + p * (d_t + e_t * e_t);
        }
        if !mean_random.is_finite() || !second_moment.is_finite() {
            break;
        }
        lam_next = lam_next * lambda;
        lam_n = lam_n * lambda;
    }
    let var_random = (second_moment - mean_random * mean_random).max(S::zero());
    let k_bar = law.k_bar();
    Ok(TotalsPrediction {
        mean_fixed: expected_total_fixed(lambda, k_bar)?,
        var_fixed: variance_total_fixed(lambda, k_bar)?,
        mean_random,
        var_random,
    })
}
