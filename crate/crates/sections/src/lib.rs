//! Graded torsion R^kτ (TorsionFunctor) and derived sections R^kωπ of finitely
//! presented graded Ũ-modules over a point, computed in a degree window as
//! Ext out of the truncations Ũ/Ũ_{≥N} and certified by comparing N with
//! N + 1. Also the relative Gorenstein check on the dualized Koszul complex
//! (any base) and the vanishing pattern of R^kτ(Ũ).
//!
//! The anchor of the algebroid is never called τ here; it is the AnchorMap of
//! the presentation.

mod checks;
mod ext;
mod ideal;
mod module;
mod table;

use koszul::KoszulError;
use rees::ReesError;
use thiserror::Error;

pub use checks::{gorenstein_verify, tau_vanishing_verify, GorensteinReport, TauVanishingReport};
pub use ext::{Cell, CellData, CellStatus, ExtEngine, Stabilization, TorsionOrSections, TruncationResolution};
pub use ideal::{homogenize_ideal, parse_generators, HomogenizedIdeal, IdealSummary};
pub use module::{GradedModulePresentation, Relation};
pub use table::{derived_sections_window, torsion_window, SectionsTable, TruncationPolicy};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SectionsError {
    #[error("derived sections need a point base")]
    NeedsPointBase,
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("relation {relation} is not homogeneous in generator {generator}")]
    NotHomogeneous { relation: usize, generator: usize },
    #[error("degree {degree} lies beyond the presentation's exact range (through {exact_through})")]
    BeyondPresentation { degree: i64, exact_through: i64 },
    #[error("chain lift failed at step {step}, generator {generator}")]
    NotLiftable { step: usize, generator: usize },
    #[error(transparent)]
    Rees(#[from] ReesError),
    #[error(transparent)]
    Koszul(#[from] KoszulError),
}
