//! Graded free left Ũ-modules over a field base and minimal free resolutions
//! built degree by degree.
//!
//! A free module ⊕_g Ũ(−d_g) has, in degree p, the basis of pairs (g, m) with
//! m running over the PBW basis of Ũ_{p−d_g}; blocks are laid out in generator
//! order. Maps are row-image matrices, so composition is a matrix product in
//! the order the maps are applied.

use std::collections::BTreeMap;
use std::sync::Arc;

use exactalg::qmat::axpy;
use exactalg::{Echelon, Insert, QMat, Rat, SparseVec};
use num_traits::{One, Zero};

use crate::{ReesAlgebra, ReesError};

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FreeModule {
    pub degrees: Vec<i64>,
}

impl FreeModule {
    pub fn new(degrees: Vec<i64>) -> Self {
        FreeModule { degrees }
    }

    pub fn rank(&self) -> usize {
        self.degrees.len()
    }

    /// Block offsets and total dimension in degree p.
    pub fn layout(&self, alg: &ReesAlgebra, p: i64) -> (Vec<usize>, usize) {
        let mut offsets = Vec::with_capacity(self.degrees.len());
        let mut total = 0;
        for &d in &self.degrees {
            offsets.push(total);
            total += alg.dim(p - d);
        }
        (offsets, total)
    }

    pub fn dim(&self, alg: &ReesAlgebra, p: i64) -> usize {
        self.layout(alg, p).1
    }

    pub fn min_degree(&self) -> Option<i64> {
        self.degrees.iter().copied().min()
    }

    /// Position of generator g itself (the pair (g, 1)) in degree d_g.
    pub fn generator_position(&self, alg: &ReesAlgebra, g: usize) -> usize {
        self.layout(alg, self.degrees[g]).0[g]
    }
}

/// u · v where u is the basis monomial `u_idx` of Ũ_{u_deg} and v is an element
/// of `module` in degree q.
pub fn left_mul(
    alg: &ReesAlgebra,
    module: &FreeModule,
    q: i64,
    u_deg: u32,
    u_idx: usize,
    v: &SparseVec<Rat>,
) -> Result<SparseVec<Rat>, ReesError> {
    if v.is_empty() {
        return Ok(Vec::new());
    }
    let (src_off, _) = module.layout(alg, q);
    let (dst_off, _) = module.layout(alg, q + u_deg as i64);
    let mut acc: BTreeMap<usize, Rat> = BTreeMap::new();
    for (pos, c) in v {
        // last block starting at or before pos; empty blocks share offsets
        let g = src_off.partition_point(|o| o <= pos) - 1;
        let b_deg = (q - module.degrees[g]) as u32;
        let table = alg.qmul_table(u_deg, b_deg)?;
        let nb = alg.dim(b_deg as i64);
        let b_idx = pos - src_off[g];
        for (k, x) in &table[u_idx * nb + b_idx] {
            *acc.entry(dst_off[g] + k).or_insert_with(Rat::zero) += c * x;
        }
    }
    Ok(acc.into_iter().filter(|(_, x)| !x.is_zero()).collect())
}

/// Homomorphism of free left modules sending generator g to `images[g]`, an
/// element of `target` in degree d_g + `shift`.
#[derive(Clone, Debug)]
pub struct FreeMap {
    pub source: FreeModule,
    pub target: FreeModule,
    pub shift: i64,
    pub images: Vec<SparseVec<Rat>>,
}

impl FreeMap {
    /// Row-image matrix from degree p of the source to degree p + shift of the target.
    pub fn matrix_at(&self, alg: &ReesAlgebra, p: i64) -> Result<QMat, ReesError> {
        let ncols = self.target.dim(alg, p + self.shift);
        let mut rows = Vec::new();
        for (g, &d) in self.source.degrees.iter().enumerate() {
            let k = p - d;
            if k < 0 {
                continue;
            }
            let q = d + self.shift;
            for u in 0..alg.dim(k) {
                rows.push(left_mul(alg, &self.target, q, k as u32, u, &self.images[g])?);
            }
        }
        Ok(QMat::from_rows(ncols, rows))
    }

    pub fn compose(&self, then: &FreeMap, alg: &ReesAlgebra) -> Result<FreeMap, ReesError> {
        let mut images = Vec::with_capacity(self.images.len());
        for (g, v) in self.images.iter().enumerate() {
            let q = self.source.degrees[g] + self.shift;
            images.push(then.matrix_at(alg, q)?.apply(v));
        }
        Ok(FreeMap { source: self.source.clone(), target: then.target.clone(), shift: self.shift + then.shift, images })
    }
}

/// P_0 ← P_1 ← P_2 ← …, with `maps[k]: P_{k+1} → P_k`. Generators of every
/// P_k are complete through internal degree `max_degree`.
#[derive(Clone, Debug)]
pub struct Resolution {
    pub modules: Vec<FreeModule>,
    pub maps: Vec<FreeMap>,
    pub max_degree: i64,
}

impl Resolution {
    /// Extend a presentation `d1: P_1 → P_0` to a resolution of length `length`
    /// with generators through degree `max_degree`. New syzygy generators are
    /// chosen minimally: a kernel vector becomes a generator only if it is not
    /// already in the submodule generated below it.
    pub fn build(alg: &ReesAlgebra, d1: FreeMap, length: usize, max_degree: i64) -> Result<Self, ReesError> {
        assert_eq!(d1.shift, 0, "resolution maps have degree 0");
        let mut modules = vec![d1.target.clone(), d1.source.clone()];
        let mut maps = vec![d1];
        while maps.len() < length {
            let d = maps.last().unwrap();
            let lo = d.source.min_degree().unwrap_or(max_degree + 1);
            let mut next = FreeMap { source: FreeModule::default(), target: d.source.clone(), shift: 0, images: Vec::new() };
            for p in lo..=max_degree {
                let kernel = d.matrix_at(alg, p)?.left_kernel();
                if kernel.is_empty() {
                    continue;
                }
                let mut ech = Echelon::<Rat>::new(d.source.dim(alg, p), false);
                for r in next.matrix_at(alg, p)?.rows {
                    ech.insert(r);
                }
                for v in kernel {
                    if let Insert::NewPivot(_) = ech.insert(v.clone()) {
                        next.source.degrees.push(p);
                        next.images.push(v);
                    }
                }
            }
            modules.push(next.source.clone());
            maps.push(next);
        }
        Ok(Resolution { modules, maps, max_degree })
    }

    /// Minimal resolution of Ũ/Ũ_{≥n} (n ≥ 1) as a left module.
    pub fn of_truncation(alg: &ReesAlgebra, n: u32, length: usize, max_degree: i64) -> Result<Self, ReesError> {
        let gens = alg.dim(n as i64);
        let d1 = FreeMap {
            source: FreeModule::new(vec![n as i64; gens]),
            target: FreeModule::new(vec![0]),
            shift: 0,
            images: (0..gens).map(|k| vec![(k, Rat::one())]).collect(),
        };
        Resolution::build(alg, d1, length, max_degree)
    }

    /// Whether every differential lands in Ũ_{≥1}·P, i.e. has no unit entries
    /// on generators.
    pub fn is_minimal(&self, alg: &ReesAlgebra) -> bool {
        self.maps.iter().all(|d| {
            d.images.iter().enumerate().all(|(g, v)| {
                let q = d.source.degrees[g];
                let (off, _) = d.target.layout(alg, q);
                d.target.degrees.iter().enumerate().all(|(h, &dh)| {
                    dh != q || !v.iter().any(|(pos, _)| *pos == off[h])
                })
            })
        })
    }

    /// Lift a map φ: P_a → P_0 (any shift) with φ ∘ ε vanishing on the image
    /// of d to a chain map φ_k: P_{a+k} → P_k for k < `steps`, satisfying
    /// d_k ∘ φ_k = φ_{k−1} ∘ d_{a+k} in the row-image sense.
    pub fn lift(&self, alg: &ReesAlgebra, a: usize, phi0: FreeMap, steps: usize) -> Result<Vec<FreeMap>, LiftError> {
        let mut out = vec![phi0];
        for k in 1..steps {
            if a + k >= self.modules.len() || k >= self.modules.len() {
                break;
            }
            let src = &self.modules[a + k];
            let d_src = &self.maps[a + k - 1];
            let d_tgt = &self.maps[k - 1];
            let prev = out.last().unwrap();
            let shift = prev.shift;
            let mut images = Vec::with_capacity(src.rank());
            let mut solvers: BTreeMap<i64, Arc<Echelon<Rat>>> = BTreeMap::new();
            for (g, &d) in src.degrees.iter().enumerate() {
                let w = prev.matrix_at(alg, d)?.apply(&d_src.images[g]);
                let q = d + shift;
                let ech = match solvers.get(&q) {
                    Some(e) => e.clone(),
                    None => {
                        let m = d_tgt.matrix_at(alg, q)?;
                        let mut e = Echelon::new(m.ncols, true);
                        for r in m.rows {
                            e.insert(r);
                        }
                        let e = Arc::new(e);
                        solvers.insert(q, e.clone());
                        e
                    }
                };
                images.push(ech.express(&w).ok_or(LiftError::NotLiftable { step: k, generator: g })?);
            }
            out.push(FreeMap { source: src.clone(), target: self.modules[k].clone(), shift, images });
        }
        Ok(out)
    }

    /// Coefficients on generators (the part of v on pairs (g, 1)); this is the
    /// reduction P_k → ℚ ⊗ P_k.
    pub fn generator_part(alg: &ReesAlgebra, module: &FreeModule, p: i64, v: &SparseVec<Rat>) -> SparseVec<Rat> {
        let (off, _) = module.layout(alg, p);
        let mut out = Vec::new();
        for (g, &d) in module.degrees.iter().enumerate() {
            if d == p {
                if let Some((_, c)) = v.iter().find(|(pos, _)| *pos == off[g]) {
                    out.push((g, c.clone()));
                }
            }
        }
        out
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum LiftError {
    #[error(transparent)]
    Rees(#[from] ReesError),
    #[error("no lift at step {step} for generator {generator}")]
    NotLiftable { step: usize, generator: usize },
}

/// v − w for sparse vectors.
pub fn sub_vec(v: &SparseVec<Rat>, w: &SparseVec<Rat>) -> SparseVec<Rat> {
    axpy(v, &-Rat::one(), w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use algebroid::{abelian, sl2};
    use exactalg::binomial;

    #[test]
    fn residue_field_of_polynomial_ring_has_koszul_ranks() {
        // ℚ[t, x, y]: Betti numbers 1, 3, 3, 1 in degrees 0..3
        let alg = ReesAlgebra::new(abelian(2));
        let r = Resolution::of_truncation(&alg, 1, 4, 5).unwrap();
        let ranks: Vec<usize> = r.modules.iter().map(|m| m.rank()).collect();
        assert_eq!(ranks, vec![1, 3, 3, 1, 0]);
        for (k, m) in r.modules.iter().enumerate() {
            assert!(m.degrees.iter().all(|&d| d == k as i64));
        }
        assert!(r.is_minimal(&alg));
    }

    #[test]
    fn sl2_residue_field_resolution_is_linear() {
        let alg = ReesAlgebra::new(sl2());
        let r = Resolution::of_truncation(&alg, 1, 5, 5).unwrap();
        for (k, m) in r.modules.iter().enumerate() {
            assert_eq!(m.rank() as i64, binomial(4, k as i64));
            assert!(m.degrees.iter().all(|&d| d == k as i64));
        }
    }

    #[test]
    fn differentials_compose_to_zero() {
        let alg = ReesAlgebra::new(sl2());
        let r = Resolution::of_truncation(&alg, 2, 4, 6).unwrap();
        for k in 1..r.maps.len() {
            let comp = r.maps[k].compose(&r.maps[k - 1], &alg).unwrap();
            assert!(comp.images.iter().all(|v| v.is_empty()));
        }
        // Ũ_{≥2} over ℚ[t,e,f,h]: 10 generators
        assert_eq!(r.modules[1].rank(), 10);
    }
}
