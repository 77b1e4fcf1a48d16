//! Command-line front end for the decomposition model.
//!
//! Every command is deterministic: the same invocation produces the same
//! bytes on stdout. Exit codes: 0 on success, 1 when a computation or
//! verification fails, 2 for usage and validation errors.

mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use decomp::error::Error;
use decomp::fit::{fit_lambda, poisson_gof, GofReport};
use decomp::sim::Estimate;
use decomp::tree::TreeFormat;
use decomp::{
    estimate_project, load_histogram, run_study, simulate_tree, sweep, verify_bundled,
    write_sweep_csv, OffspringModel, ProjectEstimate, VerifyReport, DEFAULT_DEPTH_CAP,
};
use render::{jnum, jstr, TextBlock, TextTable};

#[derive(Parser)]
#[command(
    name = "decomp",
    about = "Hierarchical decomposition as a supercritical branching process",
    after_help = "Set DECOMP_COLOR=1 to colorize verify verdicts."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form predictions for a given mean decomposition factor
    Predict {
        /// Mean offspring count per element (must exceed 1)
        #[arg(long)]
        lambda: f64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Estimate the decomposition factor from observed subtask counts
    Fit {
        /// CSV file of per-element subtask counts
        #[arg(long)]
        input: PathBuf,
        /// Confidence level for the interval on lambda
        #[arg(long, default_value_t = 0.95)]
        confidence: f64,
        /// Significance level for the goodness-of-fit test
        #[arg(long, default_value_t = 0.05)]
        significance: f64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Fit a sample, then project total effort with uncertainty bands
    Estimate {
        /// CSV file of per-element subtask counts
        #[arg(long)]
        input: PathBuf,
        /// Confidence level for the interval on lambda
        #[arg(long, default_value_t = 0.95)]
        confidence: f64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Monte-Carlo check of the closed forms
    Simulate {
        /// Mean offspring count per element (must exceed 1)
        #[arg(long)]
        lambda: f64,
        /// Master seed; replicate seeds derive from it
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of independent replicates
        #[arg(long, default_value_t = 100_000)]
        replicates: u64,
        /// Generation at which unfinished replicates stop
        #[arg(long, default_value_t = DEFAULT_DEPTH_CAP)]
        depth_cap: u32,
        /// Materialize one tree from the master seed instead of a study
        #[arg(long, value_enum)]
        export_tree: Option<TreeArg>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Tabulate predictions across a range of decomposition factors
    Sweep {
        /// Lowest lambda (must exceed 1)
        #[arg(long)]
        min: f64,
        /// Highest lambda
        #[arg(long)]
        max: f64,
        /// Grid step
        #[arg(long)]
        step: f64,
        /// Resource budget for the feasible-depth column
        #[arg(long, default_value_t = 1000.0)]
        budget: f64,
        /// Write the table here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Re-fit the bundled project data and check totals against the bands
    Verify {
        /// Directory holding project1.csv through project5.csv
        #[arg(long, default_value = "data")]
        data: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum TreeArg {
    Json,
    Dot,
}

enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(Failure::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(Failure::Lib(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::Subcritical { .. } | Error::Domain { .. } => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}

fn run(command: Command) -> Result<ExitCode, Failure> {
    match command {
        Command::Predict { lambda, format } => {
            require_format(format, "predict")?;
            cmd_predict(lambda, format)
        }
        Command::Fit {
            input,
            confidence,
            significance,
            format,
        } => {
            require_format(format, "fit")?;
            cmd_fit(&input, confidence, significance, format)
        }
        Command::Estimate {
            input,
            confidence,
            format,
        } => {
            require_format(format, "estimate")?;
            cmd_estimate(&input, confidence, format)
        }
        Command::Simulate {
            lambda,
            seed,
            replicates,
            depth_cap,
            export_tree,
            format,
        } => {
            require_format(format, "simulate")?;
            cmd_simulate(lambda, seed, replicates, depth_cap, export_tree, format)
        }
        Command::Sweep {
            min,
            max,
            step,
            budget,
            out,
            format,
        } => {
            if format == Format::Json {
                return Err(Failure::Usage(
                    "sweep emits csv; --format json is not supported".to_owned(),
                ));
            }
            cmd_sweep(min, max, step, budget, out.as_deref())
        }
        Command::Verify { data, format } => {
            require_format(format, "verify")?;
            cmd_verify(&data, format)
        }
    }
}

/// Every command except sweep renders text or JSON.
fn require_format(format: Format, command: &str) -> Result<(), Failure> {
    if format == Format::Csv {
        return Err(Failure::Usage(format!(
            "csv output is only available for sweep, not {command}"
        )));
    }
    Ok(())
}

fn cmd_predict(lambda: f64, format: Format) -> Result<ExitCode, Failure> {
    let model = OffspringModel::new(lambda)?;
    let profile = model.extinction_profile();
    let horizon = decomp::horizon_distribution(profile.k_max)?;
    let totals = decomp::totals_random_horizon(lambda)?;
    match format {
        Format::Text => {
            let mut block = TextBlock::new();
            block
                .row("lambda", lambda)
                .row("alpha", profile.alpha)
                .row("gamma", profile.gamma)
                .row("k_max", profile.k_max)
                .row("k_bar", horizon.k_bar())
                .row("e_t_fixed", totals.mean_fixed)
                .row("sd_fixed", totals.var_fixed.sqrt())
                .row("e_t_random", totals.mean_random)
                .row("sd_random", totals.var_random.sqrt());
            print!("{}", block.render());
        }
        Format::Json => {
            println!(
                "{{\"lambda\":{},\"alpha\":{},\"gamma\":{},\"k_max\":{},\"k_bar\":{},\
                 \"e_t_fixed\":{},\"sd_fixed\":{},\"e_t_random\":{},\"sd_random\":{}}}",
                jnum(lambda),
                jnum(profile.alpha),
                jnum(profile.gamma),
                profile.k_max,
                horizon.k_bar(),
                jnum(totals.mean_fixed),
                jnum(totals.var_fixed.sqrt()),
                jnum(totals.mean_random),
                jnum(totals.var_random.sqrt()),
            );
        }
        Format::Csv => unreachable!(),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_fit(
    input: &std::path::Path,
    confidence: f64,
    significance: f64,
    format: Format,
) -> Result<ExitCode, Failure> {
    let histogram = load_histogram(input)?;
    let fit = fit_lambda(&histogram, confidence)?;
    let (gof, gof_note) = match poisson_gof(&histogram, significance) {
        Ok(report) => (Some(report), None),
        Err(e @ Error::InsufficientData { .. }) => (None, Some(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    match format {
        Format::Text => {
            let mut block = TextBlock::new();
            block
                .row("input", input.display())
                .row("n", fit.n)
                .row("total_elements", histogram.total_elements())
                .row("lambda_hat", fit.lambda_hat)
                .row("sample_std", fit.sample_std)
                .row("confidence", confidence)
                .row(
                    "ci",
                    format!("[{}, {}]", fit.ci_low, fit.ci_high),
                );
            match (&gof, &gof_note) {
                (Some(g), _) => {
                    block
                        .row("gof_statistic", g.statistic)
                        .row("gof_df", g.df)
                        .row("gof_p_value", g.p_value)
                        .row(
                            "gof_verdict",
                            if g.rejected {
                                format!("rejected at significance {}", g.significance)
                            } else {
                                format!("not rejected at significance {}", g.significance)
                            },
                        );
                }
                (None, Some(note)) => {
                    block.row("gof_verdict", format!("skipped: {note}"));
                }
                (None, None) => unreachable!(),
            }
            print!("{}", block.render());
        }
        Format::Json => {
            println!(
                "{{\"input\":{},\"n\":{},\"total_elements\":{},\"lambda_hat\":{},\
                 \"sample_std\":{},\"confidence\":{},\"ci_low\":{},\"ci_high\":{},\
                 \"gof\":{},\"gof_note\":{}}}",
                jstr(&input.display().to_string()),
                fit.n,
                histogram.total_elements(),
                jnum(fit.lambda_hat),
                jnum(fit.sample_std),
                jnum(confidence),
                jnum(fit.ci_low),
                jnum(fit.ci_high),
                gof.as_ref().map_or("null".to_owned(), gof_json),
                gof_note.as_deref().map_or("null".to_owned(), jstr),
            );
        }
        Format::Csv => unreachable!(),
    }
    Ok(ExitCode::SUCCESS)
}

fn gof_json(g: &GofReport) -> String {
    let bins: Vec<String> = g
        .bins
        .iter()
        .map(|b| {
            format!(
                "{{\"min_size\":{},\"max_size\":{},\"observed\":{},\"expected\":{}}}",
                b.min_size,
                b.max_size.map_or("null".to_owned(), |m| m.to_string()),
                b.observed,
                jnum(b.expected),
            )
        })
        .collect();
    format!(
        "{{\"statistic\":{},\"df\":{},\"p_value\":{},\"significance\":{},\"rejected\":{},\
         \"bins\":[{}]}}",
        jnum(g.statistic),
        g.df,
        jnum(g.p_value),
        jnum(g.significance),
        g.rejected,
        bins.join(","),
    )
}

fn cmd_estimate(
    input: &std::path::Path,
    confidence: f64,
    format: Format,
) -> Result<ExitCode, Failure> {
    let histogram = load_histogram(input)?;
    let fit = fit_lambda(&histogram, confidence)?;
    let est = estimate_project(&fit)?;
    match format {
        Format::Text => {
            let mut block = TextBlock::new();
            block
                .row("input", input.display())
                .row("lambda_hat", fit.lambda_hat)
                .row("ci", format!("[{}, {}]", est.ci_low, est.ci_high))
                .row("k_max", est.k_max)
                .row("horizon_expected", est.horizon_expected)
                .row(
                    "horizon_range",
                    format!("[{}, {}]", est.horizon_range.0, est.horizon_range.1),
                )
                .row(
                    "expected_elements",
                    format!("{} ({})", est.expected_elements, est.expected_floor()),
                )
                .row(
                    "lower_bound",
                    format!("{} ({})", est.lower_bound, est.lower_floor()),
                )
                .row(
                    "upper_bound",
                    format!("{} ({})", est.upper_bound, est.upper_floor()),
                );
            print!("{}", block.render());
        }
        Format::Json => {
            println!("{}", estimate_json(input, &est));
        }
        Format::Csv => unreachable!(),
    }
    Ok(ExitCode::SUCCESS)
}

fn estimate_json(input: &std::path::Path, est: &ProjectEstimate) -> String {
    format!(
        "{{\"input\":{},\"lambda_hat\":{},\"ci_low\":{},\"ci_high\":{},\"k_max\":{},\
         \"horizon_expected\":{},\"horizon_low\":{},\"horizon_high\":{},\
         \"expected_elements\":{},\"expected_floor\":{},\"lower_bound\":{},\"lower_floor\":{},\
         \"upper_bound\":{},\"upper_floor\":{}}}",
        jstr(&input.display().to_string()),
        jnum(est.lambda_hat),
        jnum(est.ci_low),
        jnum(est.ci_high),
        est.k_max,
        est.horizon_expected,
        est.horizon_range.0,
        est.horizon_range.1,
        jnum(est.expected_elements),
        est.expected_floor(),
        jnum(est.lower_bound),
        est.lower_floor(),
        jnum(est.upper_bound),
        est.upper_floor(),
    )
}

fn cmd_simulate(
    lambda: f64,
    seed: u64,
    replicates: u64,
    depth_cap: u32,
    export_tree: Option<TreeArg>,
    format: Format,
) -> Result<ExitCode, Failure> {
    let model = OffspringModel::new(lambda)?;
    if let Some(tree_format) = export_tree {
        let tree = simulate_tree(&model, seed, depth_cap)?;
        let rendered = decomp::export_tree(
            &tree,
            match tree_format {
                TreeArg::Json => TreeFormat::Json,
                TreeArg::Dot => TreeFormat::Dot,
            },
        );
        print!("{rendered}");
        return Ok(ExitCode::SUCCESS);
    }
    let summary = run_study(&model, replicates, depth_cap, seed)?;
    let estimate_text = |e: &Estimate| format!("{} (se {})", e.value, e.std_error);
    match format {
        Format::Text => {
            let mut block = TextBlock::new();
            block
                .row("lambda", lambda)
                .row("seed", seed)
                .row("replicates", summary.replicates)
                .row("depth_cap", summary.depth_cap)
                .row("extinction", estimate_text(&summary.extinction))
                .row("censored_replicates", summary.censored_replicates);
            match &summary.truncated_total_mean {
                Some(mean) => block.row("total_mean", estimate_text(mean)),
                None => block.row("total_mean", "n/a (censored replicates)"),
            };
            match summary.truncated_total_var {
                Some(var) => block.row("total_var", var),
                None => block.row("total_var", "n/a (censored replicates)"),
            };
            for n in 1..=3u32 {
                let key = format!("cond_mass_{n}");
                match summary.cond_mass_estimate(n) {
                    Some(e) => block.row(&key, estimate_text(&e)),
                    None => block.row(&key, "n/a (beyond depth cap)"),
                };
            }
            print!("{}", block.render());
        }
        Format::Json => {
            let estimate_json = |e: &Estimate| {
                format!(
                    "{{\"value\":{},\"std_error\":{}}}",
                    jnum(e.value),
                    jnum(e.std_error)
                )
            };
            let cond: Vec<String> = (1..=3u32)
                .map(|n| {
                    summary
                        .cond_mass_estimate(n)
                        .map_or("null".to_owned(), |e| {
                            format!(
                                "{{\"n\":{},\"value\":{},\"std_error\":{}}}",
                                n,
                                jnum(e.value),
                                jnum(e.std_error)
                            )
                        })
                })
                .collect();
            println!(
                "{{\"lambda\":{},\"seed\":{},\"replicates\":{},\"depth_cap\":{},\
                 \"extinction\":{},\"censored_replicates\":{},\"truncated_total_mean\":{},\
                 \"truncated_total_var\":{},\"cond_mass\":[{}]}}",
                jnum(lambda),
                seed,
                summary.replicates,
                summary.depth_cap,
                estimate_json(&summary.extinction),
                summary.censored_replicates,
                summary
                    .truncated_total_mean
                    .as_ref()
                    .map_or("null".to_owned(), estimate_json),
                summary
                    .truncated_total_var
                    .map_or("null".to_owned(), jnum),
                cond.join(","),
            );
        }
        Format::Csv => unreachable!(),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_sweep(
    min: f64,
    max: f64,
    step: f64,
    budget: f64,
    out: Option<&std::path::Path>,
) -> Result<ExitCode, Failure> {
    let rows = sweep(min, max, step, budget)?;
    let csv = write_sweep_csv(&rows);
    match out {
        Some(path) => std::fs::write(path, csv).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?,
        None => print!("{csv}"),
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(data: &std::path::Path, format: Format) -> Result<ExitCode, Failure> {
    let report = verify_bundled(data)?;
    match format {
        Format::Text => print!("{}", verify_text(&report)),
        Format::Json => println!("{}", verify_json(&report)),
        Format::Csv => unreachable!(),
    }
    Ok(if report.all_inside {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn color_enabled() -> bool {
    matches!(
        std::env::var("DECOMP_COLOR").ok().as_deref(),
        Some("1" | "true" | "always" | "yes")
    )
}

fn verdict(inside: bool, color: bool) -> String {
    match (inside, color) {
        (true, true) => "\u{1b}[32minside\u{1b}[0m".to_owned(),
        (true, false) => "inside".to_owned(),
        (false, true) => "\u{1b}[31moutside\u{1b}[0m".to_owned(),
        (false, false) => "outside".to_owned(),
    }
}

fn verify_text(report: &VerifyReport) -> String {
    let color = color_enabled();
    let mut table = TextTable::new();
    table.row(vec![
        "project".into(),
        "file".into(),
        "observed".into(),
        "published".into(),
        "band_low".into(),
        "band_high".into(),
        "verdict".into(),
    ]);
    for p in &report.projects {
        let inside = p.observed_total_inside && p.reported_total_inside;
        table.row(vec![
            p.reported.name.to_owned(),
            p.reported.file.to_owned(),
            p.observed_total.to_string(),
            p.reported.total_elements.to_string(),
            p.estimate.lower_bound.to_string(),
            p.estimate.upper_bound.to_string(),
            verdict(inside, color),
        ]);
    }
    let mut out = table.render();
    let mut notes: Vec<String> = Vec::new();
    for p in &report.projects {
        let mut parts: Vec<String> = Vec::new();
        if !p.lambda_matches_reported {
            parts.push(format!(
                "published lambda {} differs from refit {}",
                p.reported.lambda_hat, p.fit.lambda_hat
            ));
        }
        if !p.total_matches_reported {
            parts.push(format!(
                "published total {} differs from observed {}",
                p.reported.total_elements, p.observed_total
            ));
        }
        if !p.bounds_match_reported {
            parts.push(format!(
                "published bounds [{}, {}] differ from reconstruction [{}, {}]",
                p.reported.lower,
                p.reported.upper,
                p.reconstruction.lower_floor(),
                p.reconstruction.upper_floor()
            ));
        }
        if !parts.is_empty() {
            notes.push(format!("  {}: {}", p.reported.name, parts.join("; ")));
        }
    }
    if !notes.is_empty() {
        out.push_str("\nnotes:\n");
        for note in &notes {
            out.push_str(note);
            out.push('\n');
        }
    }
    out.push('\n');
    let verdict_line = if report.all_inside {
        "all totals inside their model bands"
    } else {
        "verification failed: totals outside their model bands"
    };
    if color {
        let code = if report.all_inside { "32" } else { "31" };
        out.push_str(&format!("\u{1b}[{code}m{verdict_line}\u{1b}[0m\n"));
    } else {
        out.push_str(verdict_line);
        out.push('\n');
    }
    out
}

fn verify_json(report: &VerifyReport) -> String {
    let projects: Vec<String> = report
        .projects
        .iter()
        .map(|p| {
            format!(
                "{{\"name\":{},\"file\":{},\"lambda_hat\":{},\"ci_low\":{},\"ci_high\":{},\
                 \"observed_total\":{},\"expected_elements\":{},\"lower_bound\":{},\
                 \"upper_bound\":{},\"observed_total_inside\":{},\"reported_total_inside\":{},\
                 \"reported\":{{\"lambda_hat\":{},\"ci_low\":{},\"ci_high\":{},\
                 \"total_elements\":{},\"expected\":{},\"lower\":{},\"upper\":{}}},\
                 \"reconstruction\":{{\"expected_floor\":{},\"lower_floor\":{},\
                 \"upper_floor\":{}}},\"lambda_matches_reported\":{},\
                 \"total_matches_reported\":{},\"bounds_match_reported\":{}}}",
                jstr(p.reported.name),
                jstr(p.reported.file),
                jnum(p.fit.lambda_hat),
                jnum(p.fit.ci_low),
                jnum(p.fit.ci_high),
                p.observed_total,
                jnum(p.estimate.expected_elements),
                jnum(p.estimate.lower_bound),
                jnum(p.estimate.upper_bound),
                p.observed_total_inside,
                p.reported_total_inside,
                jnum(p.reported.lambda_hat),
                jnum(p.reported.ci_low),
                jnum(p.reported.ci_high),
                p.reported.total_elements,
                p.reported.expected,
                p.reported.lower,
                p.reported.upper,
                p.reconstruction.expected_floor(),
                p.reconstruction.lower_floor(),
                p.reconstruction.upper_floor(),
                p.lambda_matches_reported,
                p.total_matches_reported,
                p.bounds_match_reported,
            )
        })
        .collect();
    format!(
        "{{\"all_inside\":{},\"projects\":[{}]}}",
        report.all_inside,
        projects.join(",")
    )
}
