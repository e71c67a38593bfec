//! K-classes as Euler characteristics of the transform's components and the
//! binomial Chern recombination.

use exactalg::binomial;
use sections::{derived_sections_window, GradedModulePresentation, SectionsTable, TruncationPolicy};
use serde::{Deserialize, Serialize};

use crate::emodule::EModule;
use crate::BeilinsonError;

/// components[j] = χ([Rωπ M]_{−j}) = Σ_c (−1)^c rank R^cωπ(M)_{−j}.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KClassVector {
    pub components: Vec<i64>,
}

impl KClassVector {
    /// Σ_c (−1)^c [M^c] for E-modules M^c sitting in cohomological degree c,
    /// each split into its vertex components.
    pub fn of_emodules(parts: &[EModule]) -> Self {
        let n = parts.first().map(|p| p.n).unwrap_or(0);
        let mut components = vec![0i64; n + 1];
        for p in parts {
            let sign = if p.cohomological_degree % 2 == 0 { 1 } else { -1 };
            for (j, d) in p.dims.iter().enumerate() {
                components[j] += sign * *d as i64;
            }
        }
        KClassVector { components }
    }

    pub fn add(&self, other: &Self) -> Self {
        KClassVector { components: self.components.iter().zip(&other.components).map(|(a, b)| a + b).collect() }
    }

    /// Σ_{j ≤ i} C(i, j)·k_j.
    pub fn chern(&self, i: usize) -> i64 {
        self.components.iter().enumerate().take(i + 1).map(|(j, k)| binomial(i as i64, j as i64) * k).sum()
    }
}

pub fn k_class(m: &GradedModulePresentation, policy: TruncationPolicy) -> Result<(KClassVector, SectionsTable), BeilinsonError> {
    let n = m.algebra().n();
    let table = derived_sections_window(m, (-(n as i64), 0), n, policy)?;
    if !table.conclusive {
        return Err(BeilinsonError::Inconclusive(format!("sections of {} did not stabilize", m.label)));
    }
    let components = (0..=n).map(|j| table.euler_characteristic(-(j as i64))).collect();
    Ok((KClassVector { components }, table))
}

pub fn chern(m: &GradedModulePresentation, i: usize, policy: TruncationPolicy) -> Result<i64, BeilinsonError> {
    Ok(k_class(m, policy)?.0.chern(i))
}
