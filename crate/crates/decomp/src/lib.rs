//! Hierarchical decomposition modeled as a branching process.
//!
//! A unit of work decomposes into a random number of child elements, each
//! child decomposes in turn, and so on; the number of children per element
//! follows a Poisson law with intensity `lambda`. For `lambda > 1` the
//! process is supercritical: decomposition either dies out early (with the
//! extinction probability `alpha`) or grows geometrically until it is cut
//! off at some horizon. This crate computes the closed-form consequences —
//! extinction probability, the horizon at which decomposition stops, element
//! totals with their dispersion — fits the intensity to observed
//! decomposition sizes, checks the Poisson hypothesis, and cross-validates
//! everything with deterministic Monte-Carlo simulation.
//!
//! The numeric core is generic over the floating scalar (see [`scalar`]);
//! the crate root exposes `f64` aliases for the common case, and horizon
//! probabilities are exact rationals.
//!
//! # Examples
//!
//! ```
//! // A sample of observed decomposition sizes ...
//! let hist = decomp::SampleHistogram::from_counts([(4, 12), (5, 18), (6, 12)]).unwrap();
//! let fit = decomp::fit_lambda(&hist, 0.95).unwrap();
//! // ... predicts the element count of the whole hierarchy.
//! let est = decomp::estimate_project(&fit).unwrap();
//! assert!(est.lower_bound < est.expected_elements);
//! assert!(est.expected_elements < est.upper_bound);
//! ```

pub mod error;
pub mod estimate;
pub mod fit;
pub mod horizon;
pub mod model;
pub mod scalar;
pub mod sim;
pub mod special;
pub mod totals;
pub mod tree;

pub use error::{Error, Result};
pub use estimate::{
    estimate_project, load_histogram, sweep, verify_bundled, write_sweep_csv, ProjectEstimate,
    ProjectVerification, ReportedProject, SweepRow, VerifyReport, MAX_SWEEP_POINTS,
    REPORTED_PROJECTS,
};
pub use fit::{
    fit_lambda, fit_with_gof, ingest_histogram, poisson_gof, FitReport, GofBin, GofReport,
    SampleHistogram, MIN_BINS, MIN_EXPECTED_PER_BIN,
};
pub use horizon::{
    expected_horizon, horizon_distribution, ExactProb, HorizonDistribution, MAX_SUPPORTED_K,
};
pub use model::{
    conditioned_extinction_mass, extinction_probability, iterated_pgf, iterated_pgf_derivative,
    lambda_from_detail, max_horizon, offspring_pgf, poisson_pmf, resource_limited_depth,
    resource_total, SUPERCRITICAL_MARGIN,
};
pub use scalar::Scalar;
pub use sim::{
    replicate_seed, run_study, simulate_trace, Estimate, GenerationTrace, PoissonSampler,
    SimulationSummary, DEFAULT_DEPTH_CAP, MAX_SAMPLER_LAMBDA,
};
pub use totals::{expected_total_fixed, totals_random_horizon, variance_total_fixed};
pub use tree::{export_tree, simulate_tree, DecompositionTree, TreeFormat, MAX_TREE_NODES};

/// The Poisson offspring law at `f64` precision; the generic form lives at
/// [`model::OffspringModel`].
pub type OffspringModel = model::OffspringModel<f64>;

/// Extinction profile at `f64` precision; the generic form lives at
/// [`model::ExtinctionProfile`].
pub type ExtinctionProfile = model::ExtinctionProfile<f64>;

/// Totals prediction at `f64` precision; the generic form lives at
/// [`totals::TotalsPrediction`].
pub type TotalsPrediction = totals::TotalsPrediction<f64>;
