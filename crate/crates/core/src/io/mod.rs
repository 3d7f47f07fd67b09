//! Quiver loading, argument parsing helpers and the on-disk result cache.

pub mod cache;

use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::IntVector;
use crate::quiver::ValuedQuiver;

pub use cache::Cache;

/// Reads and validates a quiver file.
pub fn load_quiver(path: impl AsRef<Path>) -> Result<ValuedQuiver> {
    ValuedQuiver::load(path)
}

/// Whether an error stems from reading or validating input rather than
/// from a computation.
pub fn is_input_error(e: &Error) -> bool {
    matches!(e, Error::Io(_) | Error::Json(_) | Error::Invalid(_) | Error::Parse(_) | Error::DimensionMismatch { .. })
}

/// `a,b,c` or `(a,b,c)`.
pub fn parse_vector(s: &str) -> Result<IntVector> {
    s.trim().parse().map_err(|_| Error::Parse(format!("cannot parse vector '{s}'")))
}

/// Semicolon-separated vectors, e.g. `1,0,0;1,2,0`.
pub fn parse_vector_list(s: &str) -> Result<Vec<IntVector>> {
    s.split(';').filter(|x| !x.trim().is_empty()).map(parse_vector).collect()
}

/// Operand of the oracle commands: a root (`root:1,1,0` or bare `1,1,0`)
/// or explicit representation digits (`rep:DIMS/DIGITS`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RepArg {
    Root(IntVector),
    Rep { dims: Vec<usize>, digits: Vec<u32> },
}

pub fn parse_rep_arg(s: &str) -> Result<RepArg> {
    if let Some(rest) = s.strip_prefix("rep:") {
        let (dims, digits) =
            rest.split_once('/').ok_or_else(|| Error::Parse(format!("expected rep:DIMS/DIGITS, got '{s}'")))?;
        let dims = parse_vector(dims)?.0.into_iter().map(|x| x as usize).collect();
        let digits = digits
            .split(',')
            .filter(|x| !x.is_empty())
            .map(|x| x.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad digit '{x}'"))))
            .collect::<Result<_>>()?;
        return Ok(RepArg::Rep { dims, digits });
    }
    Ok(RepArg::Root(parse_vector(s.strip_prefix("root:").unwrap_or(s))?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_operands() {
        assert_eq!(parse_rep_arg("1,1,0").unwrap(), RepArg::Root(IntVector(vec![1, 1, 0])));
        assert_eq!(parse_rep_arg("root:(0,1)").unwrap(), RepArg::Root(IntVector(vec![0, 1])));
        assert_eq!(parse_rep_arg("rep:1,1/1").unwrap(), RepArg::Rep { dims: vec![1, 1], digits: vec![1] });
        assert!(parse_rep_arg("rep:1,1").is_err());
        assert_eq!(parse_vector_list("1,0;0,1;").unwrap().len(), 2);
    }

    #[test]
    fn missing_file_is_input_error() {
        let e = load_quiver("/nonexistent/q.json").unwrap_err();
        assert!(is_input_error(&e));
    }
}
