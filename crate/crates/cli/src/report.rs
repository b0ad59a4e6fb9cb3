use serde::Serialize;
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Serialize)]
pub struct Envelope<'a, P> {
    pub version: &'static str,
    pub config_hash: String,
    pub seed: u64,
    pub command: &'a str,
    pub payload: P,
}

/// Hex SHA-256 of the raw config file.
pub fn config_hash(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

pub fn render<P: Serialize>(env: &Envelope<'_, P>) -> String {
    let mut s = serde_json::to_string_pretty(env).expect("reports serialize");
    s.push('\n');
    s
}

#[derive(Debug, Serialize)]
pub struct ErrorPayload {
    pub error: ErrorBody,
}

#[derive(Debug, Serialize)]
pub struct ErrorBody {
    pub kind: &'static str,
    pub message: String,
}

pub fn core_error_kind(e: &lorch_core::Error) -> &'static str {
    use lorch_core::Error::*;
    match e {
        Dimension { .. } => "DimensionMismatch",
        ParamCount { .. } => "ParamCount",
        InvalidRoles => "InvalidRoles",
        UnsupportedAlgebra(_) => "UnsupportedAlgebra",
        SingularElement { .. } => "SingularElement",
        Parse { .. } => "ParseError",
        Arity(_) => "ArityError",
        Domain { .. } => "DomainError",
        NotAlgebrizable { .. } => "NotAlgebrizable",
        NoAlgebraFound { .. } => "NoAlgebraFound",
        NonConvergence { .. } => "NonConvergence",
        PathThroughSingularSet { .. } => "PathThroughSingularSet",
        NewtonDivergence { .. } => "NewtonDivergence",
        StepTooLarge { .. } => "StepTooLarge",
        TrajectoryInterrupted { .. } => "TrajectoryInterrupted",
        InvalidArgument(_) => "InvalidArgument",
    }
}

/// Shortest decimal that reads back to the same `f64`.
pub fn csv_number(x: f64) -> String {
    format!("{x:?}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_sha256_hex() {
        assert_eq!(
            config_hash(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }

    #[test]
    fn csv_numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 1e300, 0.0, 123456789.125] {
            assert_eq!(csv_number(x).parse::<f64>().unwrap(), x);
        }
    }
}
