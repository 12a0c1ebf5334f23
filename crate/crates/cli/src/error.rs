use poisson_grad::expr::ExprError;
use poisson_grad::Error;
use thiserror::Error;

/// Failures of a command, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{}", expr_message(.context, .source_text, .error))]
    Expr {
        context: String,
        source_text: String,
        error: ExprError,
    },

    #[error("format error: {0}")]
    Format(String),

    #[error("{0}")]
    Runtime(String),
}

fn expr_message(context: &str, source: &str, error: &ExprError) -> String {
    let (line, col) = error.line_col(source);
    let text_line = source.lines().nth(line - 1).unwrap_or("");
    format!(
        "expression parse error in {context} at line {line}, column {col}: {}\n  {text_line}\n  {}^",
        error.message,
        " ".repeat(col - 1)
    )
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Runtime(_) => 1,
            CliError::Config(_) | CliError::Format(_) => 3,
            CliError::Expr { .. } => 4,
        }
    }

    pub(crate) fn expr(context: &str, source: &str, error: ExprError) -> Self {
        CliError::Expr {
            context: context.to_string(),
            source_text: source.to_string(),
            error,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidGrid(_)
            | Error::InvalidPotential(_)
            | Error::InvalidConfig(_)
            | Error::MissingPeriods
            | Error::ComponentMismatch { .. }
            | Error::NonZeroMean { .. }
            | Error::AxisOutOfRange { .. } => CliError::Config(e.to_string()),
            Error::Format(msg) => CliError::Format(msg),
            Error::GridMismatch => CliError::Format(e.to_string()),
            Error::Expr(error) => CliError::Expr {
                context: "expression".into(),
                source_text: String::new(),
                error,
            },
            Error::NonFinite { .. }
            | Error::PotentialDomain { .. }
            | Error::GaugeViolation { .. }
            | Error::Io(_) => CliError::Runtime(e.to_string()),
        }
    }
}
