use thiserror::Error;

/// Errors raised by the height engines and their substrate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("valuation of zero is undefined")]
    ZeroValuation,

    #[error("{0} is not a prime")]
    NotPrime(String),

    #[error("polynomial: {0}")]
    Polynomial(String),

    #[error("module generators span a rank-{rank} lattice, need rank 2")]
    RankDeficient { rank: usize },

    #[error("precision: {0}")]
    Precision(String),

    #[error("argument {arg} outside the domain {domain}")]
    Domain { arg: String, domain: &'static str },

    #[error("root finder: {0}")]
    RootFinding(String),

    #[error("singular curve: discriminant vanishes")]
    SingularCurve,

    #[error("Weierstrass equation: {0}")]
    Curve(String),

    #[error("inconsistent Igusa data at p = {p}: {detail}")]
    Consistency { p: u64, detail: String },

    #[error("could not factor {0} by trial division; supply the missing primes")]
    Factorization(String),

    #[error("imaginary part is not positive definite")]
    NotPositiveDefinite,

    #[error("chi10 is indistinguishable from 0 at this precision (raise precision, or the point lies on the product-of-elliptic-curves locus)")]
    Chi10Vanishes,

    #[error("matrix is not symplectic")]
    NotSymplectic,

    #[error("lambda Z + mu is numerically singular")]
    SingularAction,

    #[error("Siegel reduction did not converge within {0} iterations")]
    ReductionCap(usize),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("point is outside the Siegel fundamental domain")]
    OutsideFundamentalDomain,

    #[error("tau selection: {0}")]
    Tau(String),

    #[error("cusp distance: {0}")]
    Cusp(String),

    #[error("character: {0}")]
    Character(String),

    #[error("unknown normalization convention {0:?}")]
    Convention(String),

    #[error("{0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
