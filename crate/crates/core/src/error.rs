use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),
    #[error("direction must be non-zero")]
    ZeroDirection,
    #[error("intersection is empty or lower-dimensional")]
    EmptyOrDegenerateIntersection,
    #[error("map is singular (scale or determinant is zero)")]
    SingularMap,
    #[error("origin is not an interior point of the body")]
    OriginNotInterior,
    #[error("body is not Minkowski centered (deviation {deviation:e})")]
    NotCentered { deviation: f64 },
    #[error("inner body is not contained in the outer body (excess {excess:e})")]
    NotContained { excess: f64 },
    #[error("gauge body is not 0-symmetric (deviation {deviation:e})")]
    GaugeNotSymmetric { deviation: f64 },
    #[error("{name} = {value} is outside its domain {domain}")]
    OutOfDomain {
        name: &'static str,
        value: f64,
        domain: &'static str,
    },
    #[error("infeasible parameters: {0}")]
    InfeasibleParams(String),
    #[error("target outside the attainable region: {0}")]
    OutOfRegion(String),
    #[error("asymmetry {s} is not above the golden ratio; canonicalization is undefined")]
    AsymmetryTooSmall { s: f64 },
    #[error("linear program failed: {0}")]
    Solver(&'static str),
    #[error("parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub(crate) fn check_domain(
    name: &'static str,
    value: f64,
    lo: f64,
    hi: f64,
    domain: &'static str,
) -> Result<()> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(())
    } else {
        Err(Error::OutOfDomain {
            name,
            value,
            domain,
        })
    }
}
