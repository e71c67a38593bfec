//! Windowed tables of R^kτ and R^kωπ with stabilization certificates.

use serde::{Deserialize, Serialize};

use crate::ext::{Cell, ExtEngine, TorsionOrSections};
use crate::module::GradedModulePresentation;
use crate::SectionsError;

/// Truncation parameters shared by every window computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    /// Smallest truncation ever tried.
    pub n0: u32,
    /// Extra truncations allowed beyond the window width + rank + 3.
    pub extra_budget: u32,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy { n0: 1, extra_budget: 0 }
    }
}

impl TruncationPolicy {
    /// First truncation for degree j: max(n0, g − j − n) with g the top degree
    /// among generators and relations. For Ũ(−g) this is where
    /// Ext(Ũ/Ũ_{≥N}, Ũ(−g))_j stops moving; below it the values can sit on a
    /// zero plateau that the N/N+1 comparison cannot tell from the limit.
    pub fn start(&self, m: &GradedModulePresentation, j: i64) -> u32 {
        let n = m.algebra().n() as i64;
        let g = m
            .generators
            .iter()
            .copied()
            .chain(m.relations.iter().map(|r| r.degree))
            .max()
            .unwrap_or(0);
        (g - j - n).max(self.n0 as i64).max(1) as u32
    }

    pub fn budget(&self, m: &GradedModulePresentation, start: u32, window: (i64, i64)) -> u32 {
        let width = (window.1 - window.0 + 1).max(1) as u32;
        start + width + m.algebra().n() as u32 + 3 + self.extra_budget
    }
}

/// Ranks of R^kτ(M)_j over a window: one certified cell per degree.
pub fn torsion_window(
    m: &GradedModulePresentation,
    k: usize,
    degrees: (i64, i64),
    policy: TruncationPolicy,
) -> Result<Vec<Cell>, SectionsError> {
    let mut engine = ExtEngine::new(m, k);
    let mut out = Vec::new();
    for j in degrees.0..=degrees.1 {
        let start = policy.start(m, j);
        let budget = policy.budget(m, start, degrees);
        let (_, cells) = engine.stabilize(&[(TorsionOrSections::Torsion, k, j)], start, budget)?;
        out.extend(cells);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SectionsTable {
    pub label: String,
    pub degrees: (i64, i64),
    /// R^kωπ is tabulated for k ≤ kmax, R^kτ for k ≤ kmax + 1.
    pub kmax: usize,
    pub policy: TruncationPolicy,
    /// (j, dim M_j).
    pub module_ranks: Vec<(i64, usize)>,
    /// (j, truncation at which the whole column j was certified).
    pub truncations: Vec<(i64, Option<u32>)>,
    pub torsion: Vec<Cell>,
    pub sections: Vec<Cell>,
    /// dim M_j − rank ωπ(M)_j = rank τ(M)_j − rank R¹τ(M)_j for every j.
    pub four_term_holds: bool,
    /// rank R^kωπ(M)_j = rank R^{k+1}τ(M)_j for 1 ≤ k ≤ kmax.
    pub shift_identity_holds: bool,
    pub conclusive: bool,
}

impl SectionsTable {
    fn find(cells: &[Cell], k: usize, j: i64) -> Option<&Cell> {
        cells.iter().find(|c| c.k == k && c.j == j)
    }

    pub fn sections_rank(&self, k: usize, j: i64) -> Option<usize> {
        Self::find(&self.sections, k, j).map(|c| c.rank)
    }

    pub fn torsion_rank(&self, k: usize, j: i64) -> Option<usize> {
        Self::find(&self.torsion, k, j).map(|c| c.rank)
    }

    pub fn module_rank(&self, j: i64) -> Option<usize> {
        self.module_ranks.iter().find(|(d, _)| *d == j).map(|(_, r)| *r)
    }

    /// χ_j = Σ_k (−1)^k rank R^kωπ(M)_j over the tabulated k.
    pub fn euler_characteristic(&self, j: i64) -> i64 {
        (0..=self.kmax)
            .map(|k| {
                let r = self.sections_rank(k, j).unwrap_or(0) as i64;
                if k % 2 == 0 {
                    r
                } else {
                    -r
                }
            })
            .sum()
    }

    /// Degrees in the window where some R^{k≥1}ωπ(M) is nonzero.
    pub fn higher_support(&self) -> Vec<i64> {
        let mut out: Vec<i64> = self.sections.iter().filter(|c| c.k >= 1 && c.rank > 0).map(|c| c.j).collect();
        out.dedup();
        out
    }
}

/// R^kτ(M)_j and R^kωπ(M)_j for j in `degrees`, k ≤ `kmax`, certified per
/// degree at a common truncation.
pub fn derived_sections_window(
    m: &GradedModulePresentation,
    degrees: (i64, i64),
    kmax: usize,
    policy: TruncationPolicy,
) -> Result<SectionsTable, SectionsError> {
    let mut engine = ExtEngine::new(m, kmax + 1);
    let mut torsion = Vec::new();
    let mut sections = Vec::new();
    let mut truncations = Vec::new();
    let mut module_ranks = Vec::new();
    for j in degrees.0..=degrees.1 {
        module_ranks.push((j, m.dim(j)?));
        let mut cells: Vec<(TorsionOrSections, usize, i64)> =
            (0..=kmax + 1).map(|k| (TorsionOrSections::Torsion, k, j)).collect();
        cells.extend((0..=kmax).map(|k| (TorsionOrSections::Sections, k, j)));
        let start = policy.start(m, j);
        let budget = policy.budget(m, start, degrees);
        let (n, out) = engine.stabilize(&cells, start, budget)?;
        truncations.push((j, n));
        for c in out {
            match c.functor {
                TorsionOrSections::Torsion => torsion.push(c),
                TorsionOrSections::Sections => sections.push(c),
            }
        }
    }
    let mut table = SectionsTable {
        label: m.label.clone(),
        degrees,
        kmax,
        policy,
        module_ranks,
        conclusive: truncations.iter().all(|(_, n)| n.is_some()),
        truncations,
        torsion,
        sections,
        four_term_holds: false,
        shift_identity_holds: false,
    };
    table.four_term_holds = (degrees.0..=degrees.1).all(|j| {
        let r = |x: Option<usize>| x.unwrap_or(0) as i64;
        r(table.module_rank(j)) - r(table.sections_rank(0, j)) == r(table.torsion_rank(0, j)) - r(table.torsion_rank(1, j))
    });
    table.shift_identity_holds = (degrees.0..=degrees.1)
        .all(|j| (1..=kmax).all(|k| table.sections_rank(k, j) == table.torsion_rank(k + 1, j)));
    Ok(table)
}
