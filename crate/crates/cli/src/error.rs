use std::process::ExitCode;

/// Process-level failure classes. Config problems (including parameter values
/// the library rejects up front) exit 2, runtime numerical diagnostics exit 3,
/// convergence failures exit 4, plain I/O trouble exits 1.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] sqcav::Error),

    #[error("io error ({path}): {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn config(path: &str, msg: impl AsRef<str>) -> Self {
        CliError::Config(format!("{}: {}", path, msg.as_ref()))
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } => 1,
            CliError::Core(e) => match e {
                sqcav::Error::NonHermitian { .. }
                | sqcav::Error::NormDrift { .. }
                | sqcav::Error::TraceDrift { .. }
                | sqcav::Error::PositivityLost { .. }
                | sqcav::Error::TrackingAmbiguous { .. } => 3,
                sqcav::Error::Convergence(_) | sqcav::Error::InsufficientOscillation { .. } => 4,
                // Everything else is a precondition on user-supplied numbers.
                _ => 2,
            },
        }
    }

    pub fn exit(&self) -> ExitCode {
        ExitCode::from(self.exit_code())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
