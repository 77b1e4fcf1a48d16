//! Fitting the branching intensity to observed decomposition sizes and
//! testing the Poisson hypothesis.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::model::poisson_pmf;
use crate::special::{gamma_q, student_t_quantile};

/// Expected-count floor below which a chi-square bin must be pooled with a
/// neighbor for the asymptotic distribution to hold.
pub const MIN_EXPECTED_PER_BIN: f64 = 5.0;

/// Minimum pooled bins for a meaningful test (degrees of freedom >= 1).
pub const MIN_BINS: usize = 3;

/// Observed decomposition sizes as a histogram: `counts[size]` is how many
/// sampled units decomposed into `size` elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleHistogram {
    counts: BTreeMap<u64, u64>,
    n: u64,
    total_elements: u64,
}

impl SampleHistogram {
    /// Builds a histogram from `(size, count)` pairs. Duplicate sizes are
    /// summed; zero counts are dropped. An empty sample is refused.
    pub fn from_counts<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u64, u64)>,
    {
        let mut counts = BTreeMap::new();
        for (size, count) in pairs {
            if count == 0 {
                continue;
            }
            *counts.entry(size).or_insert(0) += count;
        }
        let n: u64 = counts.values().sum();
        if n == 0 {
            return Err(Error::DegenerateSample {
                n: 0,
                what: "no observations",
            });
        }
        let total_elements = counts.iter().map(|(&s, &c)| s * c).sum();
        Ok(SampleHistogram {
            counts,
            n,
            total_elements,
        })
    }

    /// Sample size (number of observed decompositions).
    pub fn len(&self) -> u64 {
        self.n
    }

    /// Histograms are never empty, but the predicate completes the pair.
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Sum of all observed sizes.
    pub fn total_elements(&self) -> u64 {
        self.total_elements
    }

    /// Size/count pairs in ascending size order.
    pub fn counts(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        self.counts.iter().map(|(&s, &c)| (s, c))
    }

    /// Largest observed size.
    pub fn max_size(&self) -> u64 {
        *self.counts.keys().next_back().expect("nonempty")
    }

    /// Sample mean size.
    pub fn mean(&self) -> f64 {
        self.total_elements as f64 / self.n as f64
    }
}

/// Parses observation text in either supported shape:
///
/// * CSV with a `size,count` header line, one histogram row per line;
/// * raw samples, one integer size per line.
///
/// Blank lines are skipped; a UTF-8 BOM on the first line is ignored.
/// Errors carry the 1-based line number.
pub fn ingest_histogram(text: &str) -> Result<SampleHistogram> {
    let mut lines = text.lines().enumerate();
    let header = loop {
        match lines.next() {
            Some((idx, raw)) => {
                let line = raw.trim_start_matches('\u{feff}').trim();
                if line.is_empty() {
                    continue;
                }
                break (idx, line.to_owned());
            }
            None => {
                return Err(Error::Parse {
                    line: 1,
                    message: "no observations".to_owned(),
                })
            }
        }
    };
    let csv = header.1.eq_ignore_ascii_case("size,count");
    let mut pairs = Vec::new();
    if !csv {
        pairs.push(parse_raw_line(header.0, &header.1)?);
    }
    for (idx, raw) in lines {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        pairs.push(if csv {
            parse_csv_line(idx, line)?
        } else {
            parse_raw_line(idx, line)?
        });
    }
    SampleHistogram::from_counts(pairs).map_err(|_| Error::Parse {
        line: 1,
        message: "no observations".to_owned(),
    })
}

fn parse_csv_line(idx: usize, line: &str) -> Result<(u64, u64)> {
    let mut fields = line.split(',');
    let (size, count) = match (fields.next(), fields.next(), fields.next()) {
        (Some(size), Some(count), None) => (size.trim(), count.trim()),
        _ => {
            return Err(Error::Parse {
                line: idx + 1,
                message: format!("expected `size,count`, found `{line}`"),
            })
        }
    };
    Ok((
        parse_field(idx, size, "size")?,
        parse_field(idx, count, "count")?,
    ))
}

fn parse_raw_line(idx: usize, line: &str) -> Result<(u64, u64)> {
    Ok((parse_field(idx, line, "size")?, 1))
}

fn parse_field(idx: usize, field: &str, what: &str) -> Result<u64> {
    field.parse().map_err(|_| Error::Parse {
        line: idx + 1,
        message: format!("invalid {what} `{field}`"),
    })
}

/// Maximum-likelihood fit of the branching intensity with a confidence
/// interval for the mean.
#[derive(Clone, Debug, PartialEq)]
pub struct FitReport {
    /// Fitted intensity: the sample mean size.
    pub lambda_hat: f64,
    /// Lower confidence bound for the mean size.
    pub ci_low: f64,
    /// Upper confidence bound for the mean size.
    pub ci_high: f64,
    /// Confidence level the interval was built at.
    pub confidence: f64,
    /// Sample size.
    pub n: u64,
    /// Sample standard deviation of the sizes.
    pub sample_std: f64,
    /// Poisson goodness-of-fit result, when the sample supports one.
    pub gof: Option<GofReport>,
}

/// Fits the intensity as the sample mean and brackets it with a Student-t
/// confidence interval.
///
/// The mean of a Poisson sample is its maximum-likelihood intensity
/// estimate; with dispersion unknown a priori the t interval
/// `mean ± t_{(1+c)/2, n-1} * s / sqrt(n)` is used rather than assuming the
/// Poisson variance. Needs at least two observations.
///
/// # Examples
///
/// ```
/// let hist = decomp::SampleHistogram::from_counts([(4, 3), (5, 4), (6, 3)]).unwrap();
/// let fit = decomp::fit_lambda(&hist, 0.95).unwrap();
/// assert!((fit.lambda_hat - 5.0).abs() < 1e-12);
/// assert!(fit.ci_low < 5.0 && 5.0 < fit.ci_high);
/// ```
pub fn fit_lambda(hist: &SampleHistogram, confidence: f64) -> Result<FitReport> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::Domain {
            what: "confidence level must lie strictly between 0 and 1",
            value: confidence,
        });
    }
    let n = hist.n;
    if n < 2 {
        return Err(Error::DegenerateSample {
            n,
            what: "a confidence interval needs at least 2 observations",
        });
    }
    let mean = hist.mean();
    // n * sum(c * s^2) - total^2 is exact in u128, so the variance does not
    // suffer catastrophic cancellation for large samples.
    let sum_sq: u128 = hist
        .counts
        .iter()
        .map(|(&s, &c)| (s as u128) * (s as u128) * (c as u128))
        .sum();
    let numerator = (n as u128) * sum_sq - (hist.total_elements as u128).pow(2);
    let variance = numerator as f64 / (n as f64 * (n - 1) as f64);
    let sample_std = variance.sqrt();
    let t = student_t_quantile((1.0 + confidence) / 2.0, (n - 1) as f64)?;
    let half_width = t * sample_std / (n as f64).sqrt();
    Ok(FitReport {
        lambda_hat: mean,
        ci_low: mean - half_width,
        ci_high: mean + half_width,
        confidence,
        n,
        sample_std,
        gof: None,
    })
}

/// One pooled bin of the goodness-of-fit statistic.
#[derive(Clone, Debug, PartialEq)]
pub struct GofBin {
    /// Smallest size the bin covers.
    pub min_size: u64,
    /// Largest size the bin covers; `None` for the open upper tail.
    pub max_size: Option<u64>,
    /// Observed count.
    pub observed: u64,
    /// Expected count under the fitted Poisson law.
    pub expected: f64,
}

/// Pearson chi-square test of the Poisson hypothesis.
#[derive(Clone, Debug, PartialEq)]
pub struct GofReport {
    /// The chi-square statistic.
    pub statistic: f64,
    /// Degrees of freedom: pooled bins minus two (one for the total, one
    /// for the fitted intensity).
    pub df: u64,
    /// Upper-tail probability of the statistic.
    pub p_value: f64,
    /// Whether the hypothesis is rejected at `significance`.
    pub rejected: bool,
    /// Significance level the verdict was taken at.
    pub significance: f64,
    /// The pooled bins the statistic was computed from.
    pub bins: Vec<GofBin>,
}

/// Tests whether the observed sizes are consistent with a Poisson law at
/// the fitted intensity.
///
/// Bins start as the singleton sizes `0..=max` plus an open tail, then
/// neighbors are pooled until every bin expects at least
/// [`MIN_EXPECTED_PER_BIN`] observations: first the deficient runs at
/// both extremes collapse inward, then any remaining deficient interior
/// bin absorbs its right neighbor (its left one if it is last). Fewer than
/// [`MIN_BINS`] surviving bins means the sample cannot support the test.
pub fn poisson_gof(hist: &SampleHistogram, significance: f64) -> Result<GofReport> {
    if !(significance > 0.0 && significance < 1.0) {
        return Err(Error::Domain {
            what: "significance level must lie strictly between 0 and 1",
            value: significance,
        });
    }
    let lambda = hist.mean();
    let n = hist.n as f64;
    let max = hist.max_size();
    // Singleton bins 0..=max plus the open tail beyond max.
    let mut bins: Vec<GofBin> = Vec::with_capacity(max as usize + 2);
    let mut tail_mass = 1.0;
    for size in 0..=max {
        let p: f64 = poisson_pmf(lambda, size)?;
        tail_mass -= p;
        bins.push(GofBin {
            min_size: size,
            max_size: Some(size),
            observed: hist.counts.get(&size).copied().unwrap_or(0),
            expected: n * p,
        });
    }
    bins.push(GofBin {
        min_size: max + 1,
        max_size: None,
        observed: 0,
        expected: n * tail_mass.max(0.0),
    });

    pool_bins(&mut bins);
    if bins.len() < MIN_BINS {
        return Err(Error::InsufficientData { bins: bins.len() });
    }

    let statistic: f64 = bins
        .iter()
        .map(|b| {
            let d = b.observed as f64 - b.expected;
            d * d / b.expected
        })
        .sum();
    let df = (bins.len() - 2) as u64;
    let p_value = gamma_q(df as f64 / 2.0, statistic / 2.0)?;
    Ok(GofReport {
        statistic,
        df,
        p_value,
        rejected: p_value < significance,
        significance,
        bins,
    })
}

/// Convenience: the fit plus its goodness-of-fit verdict in one call. A
/// sample too small to test still fits; `gof` is then `None`.
pub fn fit_with_gof(
    hist: &SampleHistogram,
    confidence: f64,
    significance: f64,
) -> Result<FitReport> {
    let mut fit = fit_lambda(hist, confidence)?;
    fit.gof = match poisson_gof(hist, significance) {
        Ok(gof) => Some(gof),
        Err(Error::InsufficientData { .. }) => None,
        Err(e) => return Err(e),
    };
    Ok(fit)
}

fn merge_into(bins: &mut Vec<GofBin>, keep: usize, absorb: usize) {
    debug_assert!(keep.abs_diff(absorb) == 1);
    let absorbed = bins.remove(absorb);
    let keep = if absorb < keep { keep - 1 } else { keep };
    let kept = &mut bins[keep];
    kept.observed += absorbed.observed;
    kept.expected += absorbed.expected;
    kept.min_size = kept.min_size.min(absorbed.min_size);
    kept.max_size = match (kept.max_size, absorbed.max_size) {
        (Some(a), Some(b)) => Some(a.max(b)),
        _ => None,
    };
}

fn pool_bins(bins: &mut Vec<GofBin>) {
    // Collapse the deficient run at the low extreme into its right neighbor.
    while bins.len() > 1 && bins[0].expected < MIN_EXPECTED_PER_BIN {
        merge_into(bins, 1, 0);
    }
    // Likewise at the high extreme, inward.
    while bins.len() > 1 && bins[bins.len() - 1].expected < MIN_EXPECTED_PER_BIN {
        let last = bins.len() - 1;
        merge_into(bins, last - 1, last);
    }
    // Interior: a deficient bin absorbs its right neighbor and is re-checked
    // in place; the final bin absorbs leftward instead.
    let mut i = 0;
    while i < bins.len() {
        if bins[i].expected >= MIN_EXPECTED_PER_BIN || bins.len() == 1 {
            i += 1;
            continue;
        }
        if i + 1 < bins.len() {
            merge_into(bins, i, i + 1);
        } else {
            merge_into(bins, i - 1, i);
            i -= 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-12;

    fn project2() -> SampleHistogram {
        SampleHistogram::from_counts([
            (2, 6),
            (3, 9),
            (4, 10),
            (5, 13),
            (6, 3),
            (7, 4),
            (8, 3),
        ])
        .unwrap()
    }

    #[test]
    fn histogram_counts_and_totals() {
        let h = project2();
        assert_eq!(h.len(), 48);
        assert_eq!(h.total_elements(), 214);
        assert_eq!(h.max_size(), 8);
        assert!((h.mean() - 214.0 / 48.0).abs() < TOL);
    }

    #[test]
    fn duplicate_sizes_sum_and_zero_counts_drop() {
        let h = SampleHistogram::from_counts([(3, 2), (5, 0), (3, 1), (4, 4)]).unwrap();
        let pairs: Vec<_> = h.counts().collect();
        assert_eq!(pairs, vec![(3, 3), (4, 4)]);
        assert_eq!(h.len(), 7);
    }

    #[test]
    fn empty_samples_are_refused() {
        assert!(SampleHistogram::from_counts([]).is_err());
        assert!(SampleHistogram::from_counts([(4, 0)]).is_err());
    }

    #[test]
    fn ingest_csv_histogram() {
        let text = "size,count\n2,6\n3,9\n4,10\n5,13\n6,3\n7,4\n8,3\n";
        let h = ingest_histogram(text).unwrap();
        assert_eq!(h, project2());
    }

    #[test]
    fn ingest_tolerates_bom_blank_lines_and_spacing() {
        let text = "\u{feff}size,count\n\n 2 , 6 \n3,9\n";
        let h = ingest_histogram(text).unwrap();
        let pairs: Vec<_> = h.counts().collect();
        assert_eq!(pairs, vec![(2, 6), (3, 9)]);
    }

    #[test]
    fn ingest_raw_samples() {
        let text = "4\n5\n4\n6\n";
        let h = ingest_histogram(text).unwrap();
        let pairs: Vec<_> = h.counts().collect();
        assert_eq!(pairs, vec![(4, 2), (5, 1), (6, 1)]);
    }

    #[test]
    fn ingest_sums_duplicate_csv_rows() {
        let h = ingest_histogram("size,count\n3,2\n3,5\n").unwrap();
        assert_eq!(h.counts().collect::<Vec<_>>(), vec![(3, 7)]);
    }

    #[test]
    fn ingest_errors_carry_line_numbers() {
        let err = ingest_histogram("size,count\n2,6\nbogus\n").unwrap_err();
        assert!(err.to_string().starts_with("line 3:"), "{err}");
        let err = ingest_histogram("size,count\n2,6,9\n").unwrap_err();
        assert!(err.to_string().starts_with("line 2:"), "{err}");
        let err = ingest_histogram("4\nx\n").unwrap_err();
        assert!(err.to_string().starts_with("line 2:"), "{err}");
        let err = ingest_histogram("\n\n").unwrap_err();
        assert!(err.to_string().starts_with("line 1:"), "{err}");
    }

    #[test]
    #[allow(clippy::type_complexity)]
    fn fit_matches_frozen_project_values() {
        // (pairs, n, total, mean, sample std, ci at 95%)
        let cases: [(&[(u64, u64)], u64, u64, f64, f64, f64, f64); 5] = [
            (
                &[
                    (2, 8),
                    (3, 5),
                    (4, 7),
                    (5, 7),
                    (6, 7),
                    (7, 3),
                    (8, 3),
                    (9, 4),
                    (11, 2),
                    (12, 1),
                    (13, 1),
                ],
                48,
                264,
                5.5,
                2.85090504480035,
                4.67218346679571,
                6.32781653320429,
            ),
            (
                &[(2, 6), (3, 9), (4, 10), (5, 13), (6, 3), (7, 4), (8, 3)],
                48,
                214,
                4.45833333333333,
                1.67533208309651,
                3.97186760571314,
                4.94479906095352,
            ),
            (
                &[(2, 8), (3, 10), (4, 6), (5, 4), (6, 2), (7, 2)],
                32,
                116,
                3.625,
                1.47560813051389,
                3.09298653614506,
                4.15701346385494,
            ),
            (
                &[
                    (2, 2),
                    (3, 5),
                    (4, 3),
                    (5, 5),
                    (6, 2),
                    (7, 2),
                    (8, 2),
                    (9, 1),
                    (11, 1),
                ],
                23,
                118,
                5.1304347826087,
                2.34141270149779,
                4.11793200412691,
                6.14293756109048,
            ),
            (
                &[(2, 4), (3, 6), (4, 0), (5, 3), (6, 1)],
                14,
                47,
                3.35714285714286,
                1.33630620956212,
                2.5855826226925,
                4.12870309159322,
            ),
        ];
        for (pairs, n, total, mean, std, lo, hi) in cases {
            let h = SampleHistogram::from_counts(pairs.iter().copied()).unwrap();
            assert_eq!(h.len(), n);
            assert_eq!(h.total_elements(), total);
            let fit = fit_lambda(&h, 0.95).unwrap();
            assert!((fit.lambda_hat - mean).abs() < 1e-11, "mean for n={n}");
            assert!((fit.sample_std - std).abs() < 1e-11, "std for n={n}");
            assert!((fit.ci_low - lo).abs() < 1e-10, "ci_low for n={n}");
            assert!((fit.ci_high - hi).abs() < 1e-10, "ci_high for n={n}");
        }
    }

    #[test]
    fn fit_needs_two_observations_and_a_real_confidence_level() {
        let h = SampleHistogram::from_counts([(4, 1)]).unwrap();
        assert!(fit_lambda(&h, 0.95).is_err());
        let h = project2();
        assert!(fit_lambda(&h, 0.0).is_err());
        assert!(fit_lambda(&h, 1.0).is_err());
    }

    #[test]
    fn constant_sample_gives_a_point_interval() {
        let h = SampleHistogram::from_counts([(5, 12)]).unwrap();
        let fit = fit_lambda(&h, 0.95).unwrap();
        assert_eq!(fit.lambda_hat, 5.0);
        assert_eq!(fit.sample_std, 0.0);
        assert_eq!(fit.ci_low, 5.0);
        assert_eq!(fit.ci_high, 5.0);
    }

    #[test]
    fn gof_matches_frozen_project1_values() {
        let h = SampleHistogram::from_counts([
            (2, 8),
            (3, 5),
            (4, 7),
            (5, 7),
            (6, 7),
            (7, 3),
            (8, 3),
            (9, 4),
            (11, 2),
            (12, 1),
            (13, 1),
        ])
        .unwrap();
        let gof = poisson_gof(&h, 0.05).unwrap();
        let spans: Vec<(u64, Option<u64>, u64)> = gof
            .bins
            .iter()
            .map(|b| (b.min_size, b.max_size, b.observed))
            .collect();
        assert_eq!(
            spans,
            vec![
                (0, Some(3), 13),
                (4, Some(4), 7),
                (5, Some(5), 7),
                (6, Some(6), 7),
                (7, Some(7), 3),
                (8, None, 11),
            ]
        );
        assert!((gof.statistic - 3.21091460024158).abs() < 1e-10);
        assert_eq!(gof.df, 4);
        assert!((gof.p_value - 0.523169857008208).abs() < 1e-10);
        assert!(!gof.rejected);
    }

    #[test]
    fn gof_matches_frozen_project2_values() {
        let gof = poisson_gof(&project2(), 0.05).unwrap();
        let spans: Vec<(u64, Option<u64>, u64)> = gof
            .bins
            .iter()
            .map(|b| (b.min_size, b.max_size, b.observed))
            .collect();
        assert_eq!(
            spans,
            vec![
                (0, Some(2), 6),
                (3, Some(3), 9),
                (4, Some(4), 10),
                (5, Some(5), 13),
                (6, Some(6), 3),
                (7, None, 7),
            ]
        );
        assert!((gof.statistic - 5.43131035159365).abs() < 1e-10);
        assert_eq!(gof.df, 4);
        assert!((gof.p_value - 0.245833659266292).abs() < 1e-10);
        assert!(!gof.rejected);
    }

    #[test]
    fn gof_matches_frozen_project3_values() {
        let h = SampleHistogram::from_counts([(2, 8), (3, 10), (4, 6), (5, 4), (6, 2), (7, 2)])
            .unwrap();
        let gof = poisson_gof(&h, 0.05).unwrap();
        let spans: Vec<(u64, Option<u64>)> =
            gof.bins.iter().map(|b| (b.min_size, b.max_size)).collect();
        assert_eq!(
            spans,
            vec![(0, Some(2)), (3, Some(3)), (4, Some(4)), (5, None)]
        );
        assert!((gof.statistic - 2.04514852205406).abs() < 1e-10);
        assert_eq!(gof.df, 2);
        assert!((gof.p_value - 0.359667868446316).abs() < 1e-10);
        assert!(!gof.rejected);
    }

    #[test]
    fn gof_pools_interior_bins_rightward() {
        let h = SampleHistogram::from_counts([
            (2, 2),
            (3, 5),
            (4, 3),
            (5, 5),
            (6, 2),
            (7, 2),
            (8, 2),
            (9, 1),
            (11, 1),
        ])
        .unwrap();
        let gof = poisson_gof(&h, 0.05).unwrap();
        let spans: Vec<(u64, Option<u64>, u64)> = gof
            .bins
            .iter()
            .map(|b| (b.min_size, b.max_size, b.observed))
            .collect();
        assert_eq!(
            spans,
            vec![(0, Some(3), 7), (4, Some(5), 8), (6, None, 8)]
        );
        assert!((gof.statistic - 0.501551775957198).abs() < 1e-10);
        assert_eq!(gof.df, 1);
        assert!((gof.p_value - 0.478819077730833).abs() < 1e-10);
        assert!(!gof.rejected);
    }

    #[test]
    fn gof_refuses_samples_that_pool_below_three_bins() {
        let h = SampleHistogram::from_counts([(2, 4), (3, 6), (5, 3), (6, 1)]).unwrap();
        match poisson_gof(&h, 0.05) {
            Err(Error::InsufficientData { bins }) => assert_eq!(bins, 2),
            other => panic!("expected InsufficientData, got {other:?}"),
        }
    }

    #[test]
    fn fit_with_gof_downgrades_insufficiency_to_none() {
        let h = SampleHistogram::from_counts([(2, 4), (3, 6), (5, 3), (6, 1)]).unwrap();
        let fit = fit_with_gof(&h, 0.95, 0.05).unwrap();
        assert!(fit.gof.is_none());
        let fit = fit_with_gof(&project2(), 0.95, 0.05).unwrap();
        assert!(fit.gof.is_some());
    }

    #[test]
    fn gof_bin_expectations_sum_to_the_sample_size() {
        for h in [
            project2(),
            SampleHistogram::from_counts([(2, 8), (3, 10), (4, 6), (5, 4), (6, 2), (7, 2)])
                .unwrap(),
        ] {
            let gof = poisson_gof(&h, 0.05).unwrap();
            let expected: f64 = gof.bins.iter().map(|b| b.expected).sum();
            let observed: u64 = gof.bins.iter().map(|b| b.observed).sum();
            assert!((expected - h.len() as f64).abs() < 1e-9);
            assert_eq!(observed, h.len());
            for b in &gof.bins {
                assert!(b.expected >= MIN_EXPECTED_PER_BIN);
            }
        }
    }

    #[test]
    fn estimator_recovers_the_intensity_on_simulated_samples() {
        use crate::sim::{replicate_seed, PoissonSampler};
        use rand::SeedableRng;
        use rand_chacha::ChaCha8Rng;

        let lambda = 4.5;
        let n = 10_000u64;
        let sampler = PoissonSampler::new(lambda).unwrap();
        let bound = 4.0 * (lambda / n as f64).sqrt();
        let mut hits = 0;
        for trial in 0..100 {
            let mut rng = ChaCha8Rng::seed_from_u64(replicate_seed(0xF17, trial));
            let mut counts = BTreeMap::new();
            for _ in 0..n {
                *counts.entry(sampler.sample(&mut rng)).or_insert(0u64) += 1;
            }
            let h = SampleHistogram::from_counts(counts).unwrap();
            let fit = fit_lambda(&h, 0.95).unwrap();
            if (fit.lambda_hat - lambda).abs() < bound {
                hits += 1;
            }
        }
        assert!(hits >= 99, "only {hits}/100 within 4 standard errors");
    }
}

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(300))]

        #[test]
        fn interval_brackets_the_estimate(
            sizes in proptest::collection::vec((0u64..40, 1u64..20), 2..12),
            confidence in 0.5f64..0.999,
        ) {
            let h = SampleHistogram::from_counts(sizes).unwrap();
            prop_assume!(h.len() >= 2);
            let fit = fit_lambda(&h, confidence).unwrap();
            prop_assert!(fit.ci_low <= fit.lambda_hat + 1e-12);
            prop_assert!(fit.lambda_hat <= fit.ci_high + 1e-12);
        }

        #[test]
        fn zero_count_rows_do_not_change_the_test(
            sizes in proptest::collection::vec((0u64..25, 1u64..15), 3..10),
            ghost in 0u64..25,
        ) {
            let base = SampleHistogram::from_counts(sizes.iter().copied()).unwrap();
            let mut padded = sizes.clone();
            padded.push((ghost, 0));
            let with_ghost = SampleHistogram::from_counts(padded).unwrap();
            prop_assert_eq!(&base, &with_ghost);
            let a = poisson_gof(&base, 0.05);
            let b = poisson_gof(&with_ghost, 0.05);
            match (a, b) {
                (Ok(x), Ok(y)) => {
                    prop_assert!((x.statistic - y.statistic).abs() < 1e-12);
                    prop_assert_eq!(x.df, y.df);
                }
                (Err(_), Err(_)) => {}
                other => prop_assert!(false, "diverged: {:?}", other.0.is_ok()),
            }
        }

        #[test]
        fn pooled_bins_always_meet_the_expectation_floor(
            sizes in proptest::collection::vec((0u64..30, 1u64..25), 2..12),
        ) {
            let h = SampleHistogram::from_counts(sizes).unwrap();
            if let Ok(gof) = poisson_gof(&h, 0.05) {
                prop_assert!(gof.bins.len() >= MIN_BINS);
                for b in &gof.bins {
                    prop_assert!(b.expected >= MIN_EXPECTED_PER_BIN);
                }
                prop_assert!(gof.statistic.is_finite());
                prop_assert!((0.0..=1.0).contains(&gof.p_value));
            }
        }
    }
}
