//! Homogenization Ĩ ⊂ Ũ of a left ideal I ⊂ U given by filtered generators.
//!
//! Ĩ_e = {v ∈ Ũ_e : t^m v ∈ J} where J = Ũ·{f̃} is generated by the
//! homogenized generators; m runs up to a fixed saturation depth.

use std::sync::Arc;

use exactalg::{Echelon, Insert, QMat, Rat, SparseVec};
use rees::resolution::{FreeMap, FreeModule, Resolution};
use rees::{shift_t, ReesAlgebra, ReesElement};
use serde::{Deserialize, Serialize};

use crate::module::GradedModulePresentation;
use crate::SectionsError;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdealSummary {
    pub generators: Vec<String>,
    pub filtration_degrees: Vec<u32>,
    /// Minimal homogeneous generators of Ĩ found through `generated_through`.
    pub saturated_generators: Vec<(i64, String)>,
    pub generated_through: i64,
    /// (e, dim Ĩ_e).
    pub dims: Vec<(i64, usize)>,
    /// Depth m and m − 1 gave the same Ĩ_e in every degree.
    pub saturation_stable: bool,
    /// Presentation pieces agree with Ĩ_e through `generated_through`.
    pub presentation_consistent: bool,
}

pub struct HomogenizedIdeal {
    pub summary: IdealSummary,
    /// Ĩ_e as subspaces of Ũ_e (row bases), e = 0..=generated_through.
    pub pieces: Vec<Vec<SparseVec<Rat>>>,
    pub presentation: GradedModulePresentation,
}

fn span(rows: Vec<SparseVec<Rat>>, ncols: usize) -> Echelon<Rat> {
    let mut e = Echelon::new(ncols, false);
    for r in rows {
        e.insert(r);
    }
    e
}

/// {v ∈ Ũ_e : t^m v ∈ J_{e+m}} as a row basis.
fn colon_t(alg: &ReesAlgebra, j: &FreeMap, e: i64, m: u32) -> Result<Vec<SparseVec<Rat>>, SectionsError> {
    let de = alg.dim(e);
    let target = alg.dim(e + m as i64);
    let basis = alg.graded_piece(e as u32).basis.clone();
    let mut tm: Vec<SparseVec<Rat>> = Vec::with_capacity(de);
    for b in basis {
        tm.push(alg.qcoords(&shift_t(&ReesElement::monomial(b), m), (e + m as i64) as u32)?);
    }
    // rows [t^m v_i ; generators of J]; kernel vectors give preimages
    let jm = j.matrix_at(alg, e + m as i64)?;
    let stacked = QMat::from_rows(target, tm.into_iter().chain(jm.rows).collect());
    let mut out = span(Vec::new(), de);
    let mut rows = Vec::new();
    for k in stacked.left_kernel() {
        let v: SparseVec<Rat> = k.into_iter().filter(|(i, _)| *i < de).collect();
        if !v.is_empty() {
            if let Insert::NewPivot(_) = out.insert(v.clone()) {
                rows.push(v);
            }
        }
    }
    Ok(rows)
}

/// Homogenize the left ideal generated by `gens` (elements of U, written
/// without t). Generators of Ĩ are searched through degree `top`; the
/// returned presentation has relations complete through `exact_through`.
pub fn homogenize_ideal(
    alg: Arc<ReesAlgebra>,
    gens: &[ReesElement],
    top: i64,
    depth: u32,
    exact_through: i64,
) -> Result<HomogenizedIdeal, SectionsError> {
    if !alg.base_is_field() {
        return Err(SectionsError::NeedsPointBase);
    }
    let degs: Vec<u32> = gens.iter().map(|g| alg.filtration_degree(g)).collect();
    let mut images = Vec::with_capacity(gens.len());
    for (g, &d) in gens.iter().zip(&degs) {
        images.push(alg.qcoords(&alg.homogenize(g, d)?, d)?);
    }
    let j = FreeMap {
        source: FreeModule::new(degs.iter().map(|&d| d as i64).collect()),
        target: FreeModule::new(vec![0]),
        shift: 0,
        images,
    };
    let depth = depth.max(1);
    let mut pieces = Vec::new();
    let mut stable = true;
    for e in 0..=top {
        let sat = colon_t(&alg, &j, e, depth)?;
        let prev = colon_t(&alg, &j, e, depth - 1)?;
        stable &= sat.len() == prev.len();
        pieces.push(sat);
    }
    // minimal generators degree by degree
    let mut gen_degrees = Vec::new();
    let mut gen_images: Vec<SparseVec<Rat>> = Vec::new();
    for e in 0..=top {
        let de = alg.dim(e);
        let partial = FreeMap {
            source: FreeModule::new(gen_degrees.clone()),
            target: FreeModule::new(vec![0]),
            shift: 0,
            images: gen_images.clone(),
        };
        let mut ech = span(partial.matrix_at(&alg, e)?.rows, de);
        for v in &pieces[e as usize] {
            if let Insert::NewPivot(_) = ech.insert(v.clone()) {
                gen_degrees.push(e);
                gen_images.push(v.clone());
            }
        }
    }
    let d1 = FreeMap {
        source: FreeModule::new(gen_degrees.clone()),
        target: FreeModule::new(vec![0]),
        shift: 0,
        images: gen_images.clone(),
    };
    let presentation = if gen_degrees.is_empty() {
        GradedModulePresentation::new(alg.clone(), "0", Vec::new(), Vec::new())?
    } else {
        let res = Resolution::build(&alg, d1, 2, exact_through)?;
        let rels = res.maps[1]
            .source
            .degrees
            .iter()
            .zip(&res.maps[1].images)
            .map(|(d, v)| (*d, v.clone()))
            .collect();
        let mut p = GradedModulePresentation::from_coordinates(alg.clone(), "Ĩ", gen_degrees.clone(), rels)?;
        p.exact_through = Some(exact_through);
        p
    };
    let mut consistent = true;
    for e in 0..=top.min(exact_through) {
        consistent &= presentation.dim(e)? == pieces[e as usize].len();
    }
    let to_element = |d: i64, v: &SparseVec<Rat>| {
        let basis = &alg.graded_piece(d as u32).basis;
        let mut x = ReesElement::zero();
        for (i, c) in v {
            x = x.add(&ReesElement::monomial(basis[*i].clone()).scale(c));
        }
        alg.display(&x)
    };
    let summary = IdealSummary {
        generators: gens.iter().map(|g| alg.display(g)).collect(),
        filtration_degrees: degs,
        saturated_generators: gen_degrees.iter().zip(&gen_images).map(|(d, v)| (*d, to_element(*d, v))).collect(),
        generated_through: top,
        dims: pieces.iter().enumerate().map(|(e, p)| (e as i64, p.len())).collect(),
        saturation_stable: stable,
        presentation_consistent: consistent,
    };
    Ok(HomogenizedIdeal { summary, pieces, presentation })
}

/// Parse generators written in the generator names (no t).
pub fn parse_generators(alg: &ReesAlgebra, gens: &[&str]) -> Result<Vec<ReesElement>, SectionsError> {
    gens.iter().map(|g| alg.parse(g).map_err(SectionsError::from)).collect()
}
