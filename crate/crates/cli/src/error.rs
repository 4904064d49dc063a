use loves::analysis::AnalysisError;
use loves::backtrack::BacktrackError;
use loves::names::NamesError;
use loves::EngineError;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("malformed digit string {input:?}: {source}")]
    Digits { input: String, source: EngineError },
    #[error("cannot read roster {path}: {source}")]
    RosterFile {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid roster {path}: {source}")]
    Roster { path: String, source: NamesError },
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("{0}")]
    Undetermined(String),
    #[error("{0}")]
    Invalid(String),
    #[error("thread pool: {0}")]
    ThreadPool(String),
    #[error("output: {0}")]
    Output(String),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Digits { .. } => "malformed_digits",
            CliError::RosterFile { .. } => "missing_roster",
            CliError::Roster { .. } => "invalid_roster",
            CliError::Budget(_) => "budget_exceeded",
            CliError::Undetermined(_) => "undetermined",
            CliError::Invalid(_) => "invalid_argument",
            CliError::ThreadPool(_) => "thread_pool",
            CliError::Output(_) => "output",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Digits { .. } => 3,
            CliError::RosterFile { .. } | CliError::Roster { .. } => 4,
            CliError::Budget(_) => 5,
            CliError::Undetermined(_) => 6,
            CliError::Invalid(_) => 7,
            CliError::ThreadPool(_) | CliError::Output(_) => 1,
        }
    }

    /// One-line JSON rendering for stderr.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Body<'a> {
            kind: &'a str,
            message: String,
        }
        #[derive(Serialize)]
        struct Wrapper<'a> {
            error: Body<'a>,
        }
        serde_json::to_string(&Wrapper {
            error: Body {
                kind: self.kind(),
                message: self.to_string(),
            },
        })
        .expect("error body serializes")
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        match e {
            EngineError::Undetermined { .. } => CliError::Undetermined(e.to_string()),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        match e {
            AnalysisError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
            AnalysisError::Engine(inner) => inner.into(),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<NamesError> for CliError {
    fn from(e: NamesError) -> Self {
        match e {
            NamesError::Engine(inner) => inner.into(),
            NamesError::Analysis(inner) => inner.into(),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

impl From<BacktrackError> for CliError {
    fn from(e: BacktrackError) -> Self {
        CliError::Invalid(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Output(e.to_string())
    }
}
