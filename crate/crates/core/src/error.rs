use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("empty generator list")]
    EmptyGenerators,

    #[error("generator at position {0} is zero")]
    ZeroGenerator(usize),

    #[error("generators have gcd {0}, expected 1")]
    NotCoprime(u64),

    /// `n_i a_i` is not in the semigroup generated by the earlier generators.
    #[error("semigroup is not free: n_{0} a_{0} is not generated by a_0..a_{prev}", prev = .0 - 1)]
    NotFree(usize),

    #[error("{0} is not an element of the semigroup")]
    NotMember(u64),

    #[error("gap scan reached limit {0} before the semigroup stabilized")]
    LimitExceeded(u64),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("internal consistency check failed: {0}")]
    Internal(String),

    #[error("relation needs exact division {num}/{den}")]
    NonIntegralRelation { num: u64, den: u64 },

    #[error("delta enumeration hit the safety cap {0}")]
    CapExceeded(u64),

    #[error("graded profile not certified after {0} window widenings")]
    WindowNotCertified(usize),

    #[error("conductor {conductor} exceeds work limit {limit}")]
    WorkLimitExceeded { conductor: u64, limit: u64 },

    #[error("arithmetic overflow")]
    Overflow,
}

impl Error {
    /// Stable short name used in machine-readable error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::EmptyGenerators => "EmptyGenerators",
            Error::ZeroGenerator(_) => "ZeroGenerator",
            Error::NotCoprime(_) => "NotCoprime",
            Error::NotFree(_) => "NotFree",
            Error::NotMember(_) => "NotMember",
            Error::LimitExceeded(_) => "LimitExceeded",
            Error::Precondition(_) => "Precondition",
            Error::Internal(_) => "Internal",
            Error::NonIntegralRelation { .. } => "NonIntegralRelation",
            Error::CapExceeded(_) => "CapExceeded",
            Error::WindowNotCertified(_) => "WindowNotCertified",
            Error::WorkLimitExceeded { .. } => "WorkLimitExceeded",
            Error::Overflow => "Overflow",
        }
    }
}
