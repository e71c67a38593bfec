//! Exact arithmetic over ℚ and ℚ[x_1..x_d] and the linear-algebra kernels
//! used by every other crate: ranks, kernels, Smith normal form and
//! certified homology of finite complexes.

pub mod chain;
pub mod field;
pub mod matrix;
pub mod poly;
pub mod qmat;
pub mod ring;

use thiserror::Error;

pub use chain::{HomologyReport, RankCertificate, SeqComplex};
pub use field::{Field, Fp};
pub use matrix::{RankResult, RankStrategy, RingMatrix, Smith};
pub use poly::{Mono, Poly};
pub use qmat::{Echelon, Insert, QMat, SparseVec, Subquotient};
pub use ring::{BaseRing, RingKind};

pub type Rat = num_rational::BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExactAlgError {
    #[error("{op} is not supported on this base ring; requires {required}")]
    UnsupportedBase { op: &'static str, required: &'static str },
    #[error("division by zero")]
    DivisionByZero,
    #[error("polynomial is not divisible")]
    NotDivisible,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

/// Binomial coefficient, zero outside `0 ≤ k ≤ n`.
pub fn binomial(n: i64, k: i64) -> i64 {
    if k < 0 || n < 0 || k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: i64 = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}
