use envderiv::Error;
use serde::Serialize;

/// Everything that ends a run with a nonzero exit code.
#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Verification(String),
    /// A proven bound was breached; the report is still written.
    #[error("{0}")]
    Claim(String),
}

#[derive(Serialize)]
struct Record<'a> {
    error: &'a str,
    message: String,
    exit_code: i32,
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Core(Error::SizeCap { .. }) => 3,
            Failure::Core(Error::GeometryInfeasible(_) | Error::VerificationMismatch { .. }) => 4,
            Failure::Core(_) | Failure::Usage(_) => 2,
            Failure::Verification(_) => 4,
            Failure::Claim(_) => 5,
        }
    }

    fn kind(&self) -> &'static str {
        match self.exit_code() {
            3 => "size_cap",
            4 => "verification_failure",
            5 => "claim_violation",
            _ => "invalid_input",
        }
    }

    /// One-line JSON error record.
    pub fn record(&self) -> String {
        let r = Record { error: self.kind(), message: self.to_string(), exit_code: self.exit_code() };
        serde_json::to_string(&r).expect("record serializes")
    }
}

pub type CliResult<T> = Result<T, Failure>;
