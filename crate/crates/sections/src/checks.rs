//! The relative Gorenstein property and the vanishing of R^kτ(Ũ).

use std::sync::Arc;

use exactalg::binomial;
use koszul::{left_koszul, verify_resolution, Augmentation, ResolutionReport};
use quaddual::QuadraticDual;
use rees::ReesAlgebra;
use serde::{Deserialize, Serialize};

use crate::ext::Cell;
use crate::module::GradedModulePresentation;
use crate::table::{derived_sections_window, TruncationPolicy};
use crate::SectionsError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GorensteinReport {
    pub n: usize,
    /// Ext^{n+1} sits at position 0 of the dualized complex.
    pub line_degree: i64,
    pub line_weight: i64,
    pub homology: ResolutionReport,
    pub pass: bool,
}

/// Hom(K_left, Ũ) should resolve ω_L(n+1)[−n−1]: homology only at the end
/// (position 0 after dualizing), one rank-one line in degree −(n+1).
pub fn gorenstein_verify(
    alg: Arc<ReesAlgebra>,
    dual: &QuadraticDual,
    max_degree: i64,
) -> Result<GorensteinReport, SectionsError> {
    let n = alg.n();
    let mut d = left_koszul(alg, dual)?.dual();
    let top = d.terms[0].generators.first().cloned().ok_or_else(|| SectionsError::Malformed("empty top term".into()))?;
    d.augmentation = Some(Augmentation { label: "ω_L(n+1)".into(), lines: vec![(top.degree, top.weight)] });
    let homology = verify_resolution(&d, max_degree)?;
    let pass = homology.pass && d.terms[0].rank() == 1 && top.degree == -(n as i64 + 1);
    Ok(GorensteinReport { n, line_degree: top.degree, line_weight: top.weight, homology, pass })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TauVanishingReport {
    pub n: usize,
    pub degrees: (i64, i64),
    pub kmax: usize,
    pub cells: Vec<Cell>,
    /// Cells with j > −n−1 or k ≠ n+1 that are nonzero or not certified.
    pub violations: Vec<(usize, i64)>,
    /// rank R^{n+1}τ(Ũ)_j against dim Ũ_{−j−n−1}, the graded dual of Ũ
    /// shifted by n + 1.
    pub top_matches_dual: bool,
    pub pass: bool,
}

/// R^kτ(Ũ)_j = 0 whenever j > −n−1 or k ≠ n+1, for k ≤ `kmax` and j in `degrees`.
pub fn tau_vanishing_verify(
    alg: Arc<ReesAlgebra>,
    degrees: (i64, i64),
    kmax: usize,
    policy: TruncationPolicy,
) -> Result<TauVanishingReport, SectionsError> {
    let n = alg.n();
    let u = GradedModulePresentation::free(alg.clone(), &[0])?;
    let table = derived_sections_window(&u, degrees, kmax.max(1) - 1, policy)?;
    let cells: Vec<Cell> = table.torsion.into_iter().filter(|c| c.k <= kmax).collect();
    let top = n + 1;
    let violations: Vec<(usize, i64)> = cells
        .iter()
        .filter(|c| (c.j > -(top as i64) || c.k != top) && (c.rank != 0 || !c.certified()))
        .map(|c| (c.k, c.j))
        .collect();
    let top_matches_dual = cells.iter().filter(|c| c.k == top).all(|c| {
        let expect = binomial(-c.j - 1, n as i64) as usize;
        c.rank == expect && c.certified()
    });
    let pass = violations.is_empty() && top_matches_dual;
    Ok(TauVanishingReport { n, degrees, kmax, cells, violations, top_matches_dual, pass })
}
