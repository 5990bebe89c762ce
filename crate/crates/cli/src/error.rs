use serde::Serialize;

/// CLI failure with its exit code: 1 for invalid input or I/O, 2 for
/// numerical breakdown or failed self-tests.
#[derive(Debug)]
pub enum CliError {
    Invalid { field: String, reason: String },
    Numerical(String),
    Io(String),
    SelftestFailed(Vec<u32>),
}

#[derive(Serialize)]
struct Record<'a> {
    error: &'a str,
    exit_code: i32,
    message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    field: Option<&'a str>,
}

impl CliError {
    pub fn invalid(field: &str, reason: impl Into<String>) -> Self {
        CliError::Invalid { field: field.to_string(), reason: reason.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid { .. } | CliError::Io(_) => 1,
            CliError::Numerical(_) | CliError::SelftestFailed(_) => 2,
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Invalid { .. } => "validation",
            CliError::Numerical(_) => "numerical",
            CliError::Io(_) => "io",
            CliError::SelftestFailed(_) => "selftest",
        }
    }

    /// Single-line JSON error record for stderr.
    pub fn record(&self) -> String {
        let field = match self {
            CliError::Invalid { field, .. } => Some(field.as_str()),
            _ => None,
        };
        let rec = Record { error: self.kind(), exit_code: self.exit_code(), message: self.to_string(), field };
        serde_json::to_string(&rec).expect("error record serializes")
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Invalid { field, reason } => write!(f, "invalid `{field}`: {reason}"),
            CliError::Numerical(m) | CliError::Io(m) => f.write_str(m),
            CliError::SelftestFailed(ids) => write!(f, "failed criteria: {ids:?}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<lpplab_core::Error> for CliError {
    fn from(e: lpplab_core::Error) -> Self {
        use lpplab_core::Error as E;
        match e {
            E::InvalidInput { field, reason } => CliError::Invalid { field, reason },
            E::Breakdown(m) => CliError::Numerical(m),
            other => CliError::invalid("input", other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
