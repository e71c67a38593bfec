//! ωπ(Ĩ) = Ĩ for homogenized left ideals.

use std::sync::Arc;

use rees::ReesAlgebra;
use sections::{derived_sections_window, homogenize_ideal, parse_generators, Cell, IdealSummary, TruncationPolicy};
use serde::{Deserialize, Serialize};

use crate::BeilinsonError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SaturationOptions {
    pub degrees: (i64, i64),
    /// Generators of Ĩ are searched through this degree.
    pub top: i64,
    /// t-saturation depth.
    pub depth: u32,
    /// Relations of the presentation are complete through this degree.
    pub exact_through: i64,
}

impl Default for SaturationOptions {
    fn default() -> Self {
        SaturationOptions { degrees: (-1, 3), top: 5, depth: 3, exact_through: 12 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SaturationReport {
    pub ideal: IdealSummary,
    pub degrees: (i64, i64),
    pub torsion: Vec<Cell>,
    pub sections: Vec<Cell>,
    /// τ(Ĩ) = R¹τ(Ĩ) = 0, certified, in the window.
    pub torsion_free: bool,
    /// rank ωπ(Ĩ)_j = dim Ĩ_j in the window.
    pub sections_match: bool,
    pub pass: bool,
}

pub fn ideal_saturation_check(
    alg: Arc<ReesAlgebra>,
    generators: &[&str],
    options: SaturationOptions,
    policy: TruncationPolicy,
) -> Result<SaturationReport, BeilinsonError> {
    let gens = parse_generators(&alg, generators)?;
    let ideal = homogenize_ideal(alg, &gens, options.top, options.depth, options.exact_through)?;
    let m = &ideal.presentation;
    let table = derived_sections_window(m, options.degrees, 0, policy)?;
    let torsion: Vec<Cell> = table.torsion.iter().filter(|c| c.k <= 1).cloned().collect();
    let torsion_free = torsion.iter().all(|c| c.certified() && c.rank == 0);
    let sections_match = (options.degrees.0..=options.degrees.1).all(|j| {
        let expect = if j < 0 { Some(0) } else { ideal.pieces.get(j as usize).map(|p| p.len()) };
        let Some(expect) = expect else { return false };
        table.sections.iter().any(|c| c.k == 0 && c.j == j && c.certified() && c.rank == expect)
    });
    let pass = torsion_free
        && sections_match
        && ideal.summary.saturation_stable
        && ideal.summary.presentation_consistent;
    Ok(SaturationReport {
        ideal: ideal.summary,
        degrees: options.degrees,
        torsion,
        sections: table.sections,
        torsion_free,
        sections_match,
        pass,
    })
}
