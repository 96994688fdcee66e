use stencil_dse::Error;

pub const OK: u8 = 0;
pub const PARSE: u8 = 2;
pub const INVALID: u8 = 3;
pub const INFEASIBLE: u8 = 4;
pub const VERIFY: u8 = 5;
pub const IO: u8 = 6;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("{0}")]
    Usage(String),
    #[error("verification failed: {0}")]
    Verify(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => PARSE,
            CliError::Verify(_) => VERIFY,
            CliError::Core(e) => match e {
                Error::Io(_) => IO,
                Error::Json(_) | Error::GridFormat(_) => PARSE,
                Error::EmptyResult(_) | Error::InfeasibleProjection(_) => INFEASIBLE,
                _ => INVALID,
            },
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Core(Error::Io(e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_are_distinct() {
        let codes = [OK, PARSE, INVALID, INFEASIBLE, VERIFY, IO];
        for (i, a) in codes.iter().enumerate() {
            assert!(codes[i + 1..].iter().all(|b| a != b));
        }
        assert_eq!(
            CliError::Core(Error::EmptyResult("x".into())).code(),
            INFEASIBLE
        );
        assert_eq!(
            CliError::Core(Error::BlockTooSmallForHalo { bsize: 2, halo: 2 }).code(),
            INVALID
        );
        assert_eq!(CliError::Verify("x".into()).code(), VERIFY);
    }
}
