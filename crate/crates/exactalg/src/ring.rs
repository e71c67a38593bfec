//! Base rings: ℚ or a polynomial ring ℚ[x_1..x_d] with its coordinate derivations.

use serde::{Deserialize, Serialize};

use crate::poly::Poly;
use crate::ExactAlgError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RingKind {
    RationalField,
    PolynomialRing,
}

/// Coefficient ring of an algebroid. Characteristic zero by construction.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BaseRing {
    kind: RingKind,
    variables: Vec<String>,
}

impl BaseRing {
    pub fn rationals() -> Self {
        BaseRing { kind: RingKind::RationalField, variables: Vec::new() }
    }

    /// ℚ[vars]; an empty variable list gives ℚ.
    pub fn polynomial<S: Into<String>>(vars: impl IntoIterator<Item = S>) -> Self {
        let variables: Vec<String> = vars.into_iter().map(Into::into).collect();
        if variables.is_empty() {
            return BaseRing::rationals();
        }
        BaseRing { kind: RingKind::PolynomialRing, variables }
    }

    pub fn kind(&self) -> RingKind {
        self.kind
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    pub fn nvars(&self) -> usize {
        self.variables.len()
    }

    pub fn is_field(&self) -> bool {
        self.kind == RingKind::RationalField
    }

    pub fn is_univariate(&self) -> bool {
        self.nvars() == 1
    }

    /// The formal partial derivative ∂/∂x_i.
    pub fn derivation(&self, i: usize, f: &Poly) -> Poly {
        debug_assert!(i < self.nvars());
        f.derivative(i)
    }

    /// Whether `f` only uses the declared variables.
    pub fn contains(&self, f: &Poly) -> bool {
        f.num_vars_used() <= self.nvars()
    }

    pub fn parse(&self, src: &str) -> Result<Poly, ExactAlgError> {
        Poly::parse(src, &self.variables)
    }

    pub fn display(&self, f: &Poly) -> String {
        f.display_with(&self.variables)
    }
}
