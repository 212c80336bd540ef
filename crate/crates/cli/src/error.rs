use std::fmt;
use std::io;
use std::path::{Path, PathBuf};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io {
        path: PathBuf,
        source: io::Error,
    },
    /// A malformed row in a factor or target CSV.
    Input {
        path: PathBuf,
        line: u64,
        message: String,
    },
    Core {
        path: Option<PathBuf>,
        source: cuspflow_core::Error,
    },
    /// A surface that parsed but failed validation.
    Invalid {
        path: PathBuf,
        report: String,
    },
    /// A diagnostic check above its threshold.
    Check(String),
}

impl CliError {
    pub fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn core(path: &Path) -> impl FnOnce(cuspflow_core::Error) -> Self + '_ {
        move |source| CliError::Core {
            path: Some(path.to_path_buf()),
            source,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io { .. } => "io",
            CliError::Input { .. } => "input",
            CliError::Core { source, .. } => source.code(),
            CliError::Invalid { .. } => "invalid",
            CliError::Check(_) => "check",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 64,
            CliError::Core { source, .. } if source.is_numeric() => 2,
            CliError::Core {
                source: cuspflow_core::Error::Options(_),
                ..
            } => 64,
            CliError::Check(_) => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Check(m) => f.write_str(m),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Input {
                path,
                line,
                message,
            } => write!(f, "{}:{line}: {message}", path.display()),
            CliError::Core {
                path: Some(path),
                source: cuspflow_core::Error::Parse { line, message },
            } => {
                write!(f, "{}:{line}: {message}", path.display())
            }
            CliError::Core {
                path: Some(path),
                source,
            } => write!(f, "{}: {source}", path.display()),
            CliError::Core { path: None, source } => write!(f, "{source}"),
            CliError::Invalid { path, report } => write!(f, "{}: {report}", path.display()),
        }
    }
}

impl std::error::Error for CliError {}
