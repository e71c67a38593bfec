//! Finitely presented graded left Ũ-modules over a point base.
//!
//! M = coker(F_1 → F_0) with F_0 = ⊕ Ũ(−d_g). Twists follow M(s)_e = M_{e+s},
//! so Ũ(s) has its generator in degree −s. The piece M_e is F_0,e modulo the
//! relation span; coordinates are taken on the non-pivot columns of that span.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use exactalg::{Echelon, Rat, SparseVec};
use num_traits::{One, Zero};
use rees::resolution::{left_mul, FreeMap, FreeModule};
use rees::{ReesAlgebra, ReesElement};

use crate::SectionsError;

#[derive(Clone, Debug, PartialEq)]
pub struct Relation {
    pub degree: i64,
    /// One entry per generator of F_0; entry g is homogeneous of degree
    /// `degree − d_g` (or zero).
    pub entries: Vec<ReesElement>,
}

struct Piece {
    ech: Echelon<Rat>,
    free_cols: Vec<usize>,
    coord_of: BTreeMap<usize, usize>,
}

#[derive(Default)]
struct Cache {
    pieces: BTreeMap<i64, Arc<Piece>>,
    actions: BTreeMap<(u32, i64), Arc<Vec<SparseVec<Rat>>>>,
}

pub struct GradedModulePresentation {
    alg: Arc<ReesAlgebra>,
    pub label: String,
    pub generators: Vec<i64>,
    pub relations: Vec<Relation>,
    /// Pieces are only guaranteed correct through this degree (relations were
    /// computed up to it); `None` means the presentation is exact.
    pub exact_through: Option<i64>,
    rel_map: FreeMap,
    cache: Mutex<Cache>,
}

impl std::fmt::Debug for GradedModulePresentation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GradedModulePresentation")
            .field("label", &self.label)
            .field("generators", &self.generators)
            .field("relations", &self.relations.len())
            .finish()
    }
}

impl Clone for GradedModulePresentation {
    fn clone(&self) -> Self {
        GradedModulePresentation {
            alg: self.alg.clone(),
            label: self.label.clone(),
            generators: self.generators.clone(),
            relations: self.relations.clone(),
            exact_through: self.exact_through,
            rel_map: self.rel_map.clone(),
            cache: Mutex::new(Cache::default()),
        }
    }
}

impl GradedModulePresentation {
    pub fn new(
        alg: Arc<ReesAlgebra>,
        label: impl Into<String>,
        generators: Vec<i64>,
        relations: Vec<Relation>,
    ) -> Result<Self, SectionsError> {
        if !alg.base_is_field() {
            return Err(SectionsError::NeedsPointBase);
        }
        let target = FreeModule::new(generators.clone());
        let mut images = Vec::with_capacity(relations.len());
        for (r, rel) in relations.iter().enumerate() {
            if rel.entries.len() != generators.len() {
                return Err(SectionsError::Malformed(format!("relation {r} has {} entries", rel.entries.len())));
            }
            let (off, _) = target.layout(&alg, rel.degree);
            let mut v = Vec::new();
            for (g, x) in rel.entries.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                let k = rel.degree - generators[g];
                if k < 0 || !x.is_homogeneous() || x.degree() != Some(k as u32) {
                    return Err(SectionsError::NotHomogeneous { relation: r, generator: g });
                }
                for (i, c) in alg.qcoords(x, k as u32)? {
                    v.push((off[g] + i, c));
                }
            }
            images.push(v);
        }
        let rel_map = FreeMap {
            source: FreeModule::new(relations.iter().map(|r| r.degree).collect()),
            target,
            shift: 0,
            images,
        };
        Ok(GradedModulePresentation {
            alg,
            label: label.into(),
            generators,
            relations,
            exact_through: None,
            rel_map,
            cache: Mutex::new(Cache::default()),
        })
    }

    /// Relations given as coordinate vectors of F_0 in their degree.
    pub fn from_coordinates(
        alg: Arc<ReesAlgebra>,
        label: impl Into<String>,
        generators: Vec<i64>,
        relations: Vec<(i64, SparseVec<Rat>)>,
    ) -> Result<Self, SectionsError> {
        let target = FreeModule::new(generators.clone());
        let mut rels = Vec::with_capacity(relations.len());
        for (d, v) in &relations {
            let (off, _) = target.layout(&alg, *d);
            let mut entries = vec![ReesElement::zero(); generators.len()];
            for (pos, c) in v {
                let g = off.partition_point(|o| o <= pos) - 1;
                let k = (d - generators[g]) as u32;
                let m = alg.graded_piece(k).basis[pos - off[g]].clone();
                entries[g] = entries[g].add(&ReesElement::monomial(m).scale(c));
            }
            rels.push(Relation { degree: *d, entries });
        }
        Self::new(alg, label, generators, rels)
    }

    /// Ũ(s₁) ⊕ Ũ(s₂) ⊕ …
    pub fn free(alg: Arc<ReesAlgebra>, twists: &[i64]) -> Result<Self, SectionsError> {
        let label = twists.iter().map(|s| format!("Ũ({s})")).collect::<Vec<_>>().join(" ⊕ ");
        Self::new(alg, label, twists.iter().map(|s| -s).collect(), Vec::new())
    }

    /// ℚ placed in degree d, i.e. Ũ(−d)/Ũ_{≥1}(−d).
    pub fn residue_field(alg: Arc<ReesAlgebra>, degree: i64) -> Result<Self, SectionsError> {
        let rels = (0..=alg.n())
            .map(|g| Relation { degree: degree + 1, entries: vec![alg.gen_element(g)] })
            .collect();
        Self::new(alg, format!("ℚ[{degree}]"), vec![degree], rels)
    }

    pub fn algebra(&self) -> &Arc<ReesAlgebra> {
        &self.alg
    }

    /// M(s), with M(s)_e = M_{e+s}.
    pub fn twist(&self, s: i64) -> Self {
        let mut out = self.clone();
        out.label = format!("({})({s})", self.label);
        out.generators = self.generators.iter().map(|d| d - s).collect();
        for r in &mut out.relations {
            r.degree -= s;
        }
        out.exact_through = self.exact_through.map(|d| d - s);
        out.rel_map.source.degrees = out.relations.iter().map(|r| r.degree).collect();
        out.rel_map.target.degrees = out.generators.clone();
        out
    }

    pub fn direct_sum(&self, other: &Self) -> Result<Self, SectionsError> {
        let (a, b) = (self.generators.len(), other.generators.len());
        let mut rels = Vec::new();
        for r in &self.relations {
            let mut e = r.entries.clone();
            e.extend(std::iter::repeat(ReesElement::zero()).take(b));
            rels.push(Relation { degree: r.degree, entries: e });
        }
        for r in &other.relations {
            let mut e = vec![ReesElement::zero(); a];
            e.extend(r.entries.iter().cloned());
            rels.push(Relation { degree: r.degree, entries: e });
        }
        let mut gens = self.generators.clone();
        gens.extend(other.generators.iter().copied());
        let mut out = Self::new(self.alg.clone(), format!("{} ⊕ {}", self.label, other.label), gens, rels)?;
        out.exact_through = match (self.exact_through, other.exact_through) {
            (Some(x), Some(y)) => Some(x.min(y)),
            (x, y) => x.or(y),
        };
        Ok(out)
    }

    pub fn min_generator_degree(&self) -> Option<i64> {
        self.generators.iter().copied().min()
    }

    pub fn max_generator_degree(&self) -> Option<i64> {
        self.generators.iter().copied().max()
    }

    pub fn free_module(&self) -> &FreeModule {
        &self.rel_map.target
    }

    fn check_range(&self, e: i64) -> Result<(), SectionsError> {
        match self.exact_through {
            Some(d) if e > d => Err(SectionsError::BeyondPresentation { degree: e, exact_through: d }),
            _ => Ok(()),
        }
    }

    fn piece(&self, e: i64) -> Result<Arc<Piece>, SectionsError> {
        self.check_range(e)?;
        if let Some(p) = self.cache.lock().unwrap().pieces.get(&e) {
            return Ok(p.clone());
        }
        let ncols = self.rel_map.target.dim(&self.alg, e);
        let mut ech = Echelon::<Rat>::new(ncols, false);
        for r in self.rel_map.matrix_at(&self.alg, e)?.rows {
            ech.insert(r);
        }
        let pivots: std::collections::BTreeSet<usize> = ech.pivot_cols().copied().collect();
        let free_cols: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
        let coord_of = free_cols.iter().enumerate().map(|(i, c)| (*c, i)).collect();
        let p = Arc::new(Piece { ech, free_cols, coord_of });
        self.cache.lock().unwrap().pieces.insert(e, p.clone());
        Ok(p)
    }

    /// dim_ℚ M_e.
    pub fn dim(&self, e: i64) -> Result<usize, SectionsError> {
        Ok(self.piece(e)?.free_cols.len())
    }

    /// Coordinates in M_e of an element of F_0,e.
    pub fn reduce(&self, e: i64, v: &SparseVec<Rat>) -> Result<SparseVec<Rat>, SectionsError> {
        let p = self.piece(e)?;
        let (res, _) = p.ech.reduce(v.clone(), true);
        Ok(res.into_iter().map(|(c, x)| (p.coord_of[&c], x)).collect())
    }

    /// The element of F_0,e representing basis vector μ of M_e.
    pub fn lift(&self, e: i64, mu: usize) -> Result<SparseVec<Rat>, SectionsError> {
        Ok(vec![(self.piece(e)?.free_cols[mu], Rat::one())])
    }

    /// u·m for u the basis monomials of Ũ_k and m the basis of M_e: entry
    /// `u·dim M_e + μ` holds the coordinates of u·m_μ in M_{e+k}.
    pub fn action(&self, k: u32, e: i64) -> Result<Arc<Vec<SparseVec<Rat>>>, SectionsError> {
        if let Some(a) = self.cache.lock().unwrap().actions.get(&(k, e)) {
            return Ok(a.clone());
        }
        let src = self.piece(e)?;
        let nk = self.alg.dim(k as i64);
        let mut out = Vec::with_capacity(nk * src.free_cols.len());
        for u in 0..nk {
            for &c in &src.free_cols {
                let w = left_mul(&self.alg, &self.rel_map.target, e, k, u, &vec![(c, Rat::one())])?;
                out.push(self.reduce(e + k as i64, &w)?);
            }
        }
        let out = Arc::new(out);
        self.cache.lock().unwrap().actions.insert((k, e), out.clone());
        Ok(out)
    }

    /// dim M_e ≥ dim F_0,e − dim F_1,e, the alternating-sum bound from the
    /// free presentation.
    pub fn hilbert_bound_holds(&self, e: i64) -> Result<bool, SectionsError> {
        let f0 = self.rel_map.target.dim(&self.alg, e) as i64;
        let f1 = self.rel_map.source.dim(&self.alg, e) as i64;
        Ok(self.dim(e)? as i64 >= f0 - f1 && self.dim(e)? as i64 <= f0)
    }
}

/// Row-vector helper: entries of `v` placed at offset `off`, scaled by `c`.
pub(crate) fn shifted(v: &SparseVec<Rat>, off: usize, c: &Rat, acc: &mut BTreeMap<usize, Rat>) {
    for (i, x) in v {
        *acc.entry(off + i).or_insert_with(Rat::zero) += c * x;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use algebroid::abelian;

    #[test]
    fn residue_field_is_one_dimensional() {
        let alg = Arc::new(ReesAlgebra::new(abelian(1)));
        let k = GradedModulePresentation::residue_field(alg, 5).unwrap();
        let dims: Vec<usize> = (3..=8).map(|e| k.dim(e).unwrap()).collect();
        assert_eq!(dims, vec![0, 0, 1, 0, 0, 0]);
        assert!(k.action(1, 5).unwrap().iter().all(|v| v.is_empty()));
    }

    #[test]
    fn twist_moves_generators_down() {
        let alg = Arc::new(ReesAlgebra::new(abelian(1)));
        let m = GradedModulePresentation::free(alg, &[-1]).unwrap();
        assert_eq!(m.generators, vec![1]);
        // Ũ(−1)_j = Ũ_{j−1}, of dimension j in two variables
        assert_eq!((0..5).map(|j| m.dim(j).unwrap()).collect::<Vec<_>>(), vec![0, 1, 2, 3, 4]);
        assert_eq!(m.twist(1).dim(0).unwrap(), 1);
    }
}
