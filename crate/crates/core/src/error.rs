//! Error type shared by every module.

use num_bigint::BigInt;

/// Everything that can go wrong in the library.
///
/// The CLI maps `FactorLimitExceeded` and `ModulusTooLarge` to exit code 3
/// (resource limits); every other variant is a malformed or out-of-domain
/// input and maps to exit code 2.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("not invertible: gcd({a}, {modulus}) != 1")]
    NotInvertible { a: BigInt, modulus: BigInt },

    #[error("factor limit exceeded: cofactor {cofactor} has no prime factor <= {bound} and resists the deterministic primality certificate")]
    FactorLimitExceeded { cofactor: BigInt, bound: u64 },

    #[error("invalid modulus {0}: expected an odd prime")]
    InvalidModulus(BigInt),

    #[error("{a} is not a quadratic residue modulo {p}")]
    NonResidue { a: BigInt, p: BigInt },

    #[error("moduli {0} and {1} are not coprime")]
    ModuliNotCoprime(BigInt, BigInt),

    #[error("degenerate form: the Gram matrix is singular")]
    DegenerateForm,

    #[error("modulus {modulus} exceeds the enumeration bound {bound}")]
    ModulusTooLarge { modulus: BigInt, bound: u64 },

    #[error("solution ({x}, {y}, {z}) mod {modulus} has no liftable coordinate")]
    NotLiftable {
        x: BigInt,
        y: BigInt,
        z: BigInt,
        modulus: BigInt,
    },

    #[error("no primitive isotropic vector exists: {0}")]
    NoSolution(String),

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
}

impl Error {
    /// True for errors caused by configured resource limits rather than by
    /// the input being out of domain.
    pub fn is_limit(&self) -> bool {
        matches!(
            self,
            Error::FactorLimitExceeded { .. } | Error::ModulusTooLarge { .. }
        )
    }
}
