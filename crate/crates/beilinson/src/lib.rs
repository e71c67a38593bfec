//! The tilting algebra E, the transform M ↦ RHom(T, πM) into left E-modules
//! and its inverse, K-classes with the Chern recombination, and the
//! saturation check for homogenized ideals. Everything here needs a point
//! base.

mod algebra;
mod emodule;
mod ktheory;
mod saturation;
mod tail;
mod transform;

use rees::ReesError;
use sections::SectionsError;
use thiserror::Error;

pub use algebra::{AssociativityReport, BeilinsonAlgebra, EElement};
pub use emodule::{find_isomorphism, hom_dim, hom_space, EModule, EModuleRecord, ModuleCheck, ProjectiveResolution};
pub use ktheory::{chern, k_class, KClassVector};
pub use saturation::{ideal_saturation_check, SaturationOptions, SaturationReport};
pub use tail::{homology_vanishes, tail_isomorphism, TailModule};
pub use transform::{
    inverse_transform, roundtrip_check, transform, InverseTransform, RoundTripMethod, RoundTripReport, TailWindow, Transform,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BeilinsonError {
    #[error("the tilting algebra needs a point base")]
    NeedsPointBase,
    #[error("construction check failed: {0}")]
    Construction(String),
    #[error("stabilization inconclusive: {0}")]
    Inconclusive(String),
    #[error("no projective resolution within {0} steps")]
    NoFiniteResolution(usize),
    #[error(transparent)]
    Sections(#[from] SectionsError),
    #[error(transparent)]
    Rees(#[from] ReesError),
}
