use std::path::PathBuf;

use thiserror::Error;

/// Errors shared by the model, simulation, fitting, and estimation layers.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the domain of the requested quantity.
    #[error("{what} (got {value})")]
    Domain { what: &'static str, value: f64 },

    /// The offspring mean does not describe a supercritical process.
    #[error("model requires lambda > 1 (got {lambda})")]
    Subcritical { lambda: f64 },

    /// An iterative routine exhausted its iteration budget.
    #[error("{what} failed to converge")]
    Convergence { what: &'static str },

    /// Malformed observation data.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Too few observations to form the requested statistic.
    #[error("sample of size {n} is too small: {what}")]
    DegenerateSample { n: u64, what: &'static str },

    /// Too few populated bins survive pooling to run a goodness-of-fit test.
    #[error("only {bins} bins after pooling; the test needs at least 3")]
    InsufficientData { bins: usize },

    /// File access failed.
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subcritical_message_names_the_requirement() {
        let msg = Error::Subcritical { lambda: 0.9 }.to_string();
        assert!(msg.contains("model requires lambda > 1"));
        assert!(msg.contains("0.9"));
    }

    #[test]
    fn parse_message_carries_line_number() {
        let err = Error::Parse {
            line: 17,
            message: "expected `size,count`".into(),
        };
        assert!(err.to_string().starts_with("line 17:"));
    }
}
