//! Ω^i as kernels of Koszul boundaries and the resolution of the diagonal
//! K_Δ^i = ker(k_right: 𝕂^{i,0} → 𝕂^{i,−1}) with boundary k_left.

use std::collections::BTreeMap;
use std::sync::Arc;

use exactalg::{Echelon, Insert, QMat, Rat, SparseVec};
use num_traits::{One, Zero};
use quaddual::QuadraticDual;
use rees::ReesAlgebra;
use serde::{Deserialize, Serialize};

use crate::{build_bicomplex, left_koszul, right_koszul, GradedComplex, KoszulError, Side};

/// Degreewise generators of the kernel of the i-th boundary of a Koszul
/// complex. Vectors are coordinates in term i of the complex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OmegaModule {
    pub side: Side,
    pub i: usize,
    pub max_degree: i64,
    /// ℚ-dimension of the kernel in each internal degree.
    pub dims: BTreeMap<i64, usize>,
    pub generators: Vec<(i64, Vec<(usize, String)>)>,
    #[serde(skip)]
    raw: Vec<(i64, SparseVec<Rat>)>,
}

impl OmegaModule {
    pub fn is_zero(&self) -> bool {
        self.dims.values().all(|&d| d == 0)
    }

    pub fn dim(&self, degree: i64) -> usize {
        self.dims.get(&degree).copied().unwrap_or(0)
    }

    pub fn generator_degrees(&self) -> Vec<i64> {
        self.raw.iter().map(|(d, _)| *d).collect()
    }

    pub fn raw_generators(&self) -> &[(i64, SparseVec<Rat>)] {
        &self.raw
    }
}

/// v · u (right) or u · v (left) for v in term i of `c` in degree e and u the
/// basis monomial `u_idx` of Ũ_k.
fn act(c: &GradedComplex, i: usize, e: i64, v: &SparseVec<Rat>, k: i64, u_idx: usize) -> Result<SparseVec<Rat>, KoszulError> {
    let alg = c.algebra();
    let (src, _) = c.layout(i, e);
    let (dst, _) = c.layout(i, e + k);
    let nk = alg.dim(k);
    let mut acc: BTreeMap<usize, Rat> = BTreeMap::new();
    for (pos, x) in v {
        let g = src.partition_point(|o| o <= pos) - 1;
        let b = pos - src[g];
        let bd = e - c.terms[i].generators[g].degree;
        let nb = alg.dim(bd);
        let entry = match c.side {
            Side::Right => alg.qmul_table(bd as u32, k as u32)?[b * nk + u_idx].clone(),
            Side::Left => alg.qmul_table(k as u32, bd as u32)?[u_idx * nb + b].clone(),
        };
        for (col, y) in entry {
            *acc.entry(dst[g] + col).or_insert_with(Rat::zero) += x * &y;
        }
    }
    Ok(acc.into_iter().filter(|(_, x)| !x.is_zero()).collect())
}

fn kernel_module(c: &GradedComplex, i: usize, max_degree: i64) -> Result<OmegaModule, KoszulError> {
    if !c.algebra().base_is_field() {
        return Err(KoszulError::NeedsPointBase);
    }
    let mut m = OmegaModule { side: c.side, i, max_degree, dims: BTreeMap::new(), generators: Vec::new(), raw: Vec::new() };
    if i >= c.len() {
        return Ok(m);
    }
    for q in c.min_twist()..=max_degree {
        let dim = c.dim(i, q);
        let kernel: Vec<SparseVec<Rat>> = if i == 0 {
            (0..dim).map(|k| vec![(k, Rat::one())]).collect()
        } else {
            c.boundary_qmat(i, q)?.left_kernel()
        };
        m.dims.insert(q, kernel.len());
        if kernel.is_empty() {
            continue;
        }
        let mut ech = Echelon::<Rat>::new(dim, false);
        for (e, v) in &m.raw {
            for u in 0..c.algebra().dim(q - e) {
                ech.insert(act(c, i, *e, v, q - e, u)?);
            }
        }
        for v in kernel {
            if let Insert::NewPivot(_) = ech.insert(v.clone()) {
                m.raw.push((q, v));
            }
        }
    }
    m.generators = m.raw.iter().map(|(d, v)| (*d, v.iter().map(|(k, x)| (*k, x.to_string())).collect())).collect();
    Ok(m)
}

/// Ω^i_R = ker((Ũ^⊥i)* ⊗ Ũ(−i) → (Ũ^⊥(i−1))* ⊗ Ũ(−i+1)) in degrees ≤ D.
pub fn omega_r(alg: Arc<ReesAlgebra>, dual: &QuadraticDual, i: usize, max_degree: i64) -> Result<OmegaModule, KoszulError> {
    kernel_module(&right_koszul(alg, dual)?, i, max_degree)
}

/// Ω^i_L, the kernel of the i-th left Koszul boundary.
pub fn omega_l(alg: Arc<ReesAlgebra>, dual: &QuadraticDual, i: usize, max_degree: i64) -> Result<OmegaModule, KoszulError> {
    kernel_module(&left_koszul(alg, dual)?, i, max_degree)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BidegreeReport {
    pub p: i64,
    pub q: i64,
    /// dim K_Δ^i in bidegree (p, q), i = 0..=n+1.
    pub term_dims: Vec<usize>,
    pub homology: Vec<usize>,
    pub target_rank: usize,
    pub augmentation_kills_image: bool,
    pub augmentation_surjective: bool,
    /// dim K_Δ^i = dim U^{p−i} · dim Ω^i_R(i)_q for every i.
    pub factorization_holds: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalResolution {
    pub n: usize,
    pub window: (i64, i64),
    pub omega: Vec<OmegaModule>,
    pub bidegrees: Vec<BidegreeReport>,
    pub top_omega_vanishes: bool,
    pub pass: bool,
}

/// Resolution of the diagonal, checked in every bidegree (p, q) ≤ (P, Q).
pub fn diagonal_resolution(
    alg: Arc<ReesAlgebra>,
    dual: &QuadraticDual,
    window: (i64, i64),
) -> Result<DiagonalResolution, KoszulError> {
    let (pmax, qmax) = window;
    let n = alg.n();
    let bc = build_bicomplex(alg.clone(), dual)?;
    let right = right_koszul(alg.clone(), dual)?;
    let omega = (0..=n + 1).map(|i| kernel_module(&right, i, qmax + n as i64 + 1)).collect::<Result<Vec<_>, _>>()?;
    let top_omega_vanishes = omega[n + 1].is_zero();
    let mut bidegrees = Vec::new();
    for p in 0..=pmax {
        for q in 0..=qmax {
            bidegrees.push(bidegree(&bc, &omega, p, q)?);
        }
    }
    let pass = top_omega_vanishes && bidegrees.iter().all(|b| b.pass);
    Ok(DiagonalResolution { n, window, omega, bidegrees, top_omega_vanishes, pass })
}

fn bidegree(bc: &crate::Bicomplex, omega: &[OmegaModule], p: i64, q: i64) -> Result<BidegreeReport, KoszulError> {
    let alg = bc.algebra();
    let top = bc.n() as i64 + 1;
    let mut kernels: Vec<QMat> = Vec::new();
    for i in 0..=top {
        let dim = bc.term_dim(i, 0, p, q);
        let z = if i == 0 {
            QMat::identity(dim)
        } else {
            QMat::from_rows(dim, bc.k_right(i, 0, p, q)?.left_kernel())
        };
        kernels.push(z);
    }
    let term_dims: Vec<usize> = kernels.iter().map(|z| z.nrows).collect();
    // restricted boundaries Z_i · k_left, as maps into the ambient 𝕂^{i−1,0}
    let mut images = vec![QMat::zeros(0, 0)];
    for i in 1..=top {
        images.push(kernels[i as usize].mul(&bc.k_left(i, 0, p, q)?));
    }
    let rank = |i: usize| -> usize {
        if i == 0 || i > top as usize {
            return 0;
        }
        let m = &images[i];
        let lb = m.rank_lower_bound();
        if lb == m.nrows.min(m.ncols) {
            lb
        } else {
            m.rank()
        }
    };
    let ranks: Vec<usize> = (0..=top as usize + 1).map(rank).collect();
    let homology: Vec<usize> = (0..=top as usize).map(|i| term_dims[i] - ranks[i] - ranks[i + 1]).collect();
    // multiplication U^p ⊗ U^q → U^{p+q}
    let (np, nq) = (alg.dim(p), alg.dim(q));
    let table = alg.qmul_table(p as u32, q as u32)?;
    let aug = QMat::from_rows(alg.dim(p + q), (0..np * nq).map(|k| table[k].clone()).collect());
    let augmentation_kills_image = images.get(1).map_or(true, |m| m.mul(&aug).is_zero());
    let target_rank = alg.dim(p + q);
    let augmentation_surjective = aug.rank() == target_rank;
    let factorization_holds = (0..=top as usize).all(|i| {
        term_dims[i] == alg.dim(p - i as i64) * omega.get(i).map_or(0, |o| o.dim(q + i as i64))
    });
    let pass = homology[0] == target_rank
        && homology.iter().skip(1).all(|&h| h == 0)
        && augmentation_kills_image
        && augmentation_surjective
        && factorization_holds;
    Ok(BidegreeReport {
        p,
        q,
        term_dims,
        homology,
        target_rank,
        augmentation_kills_image,
        augmentation_surjective,
        factorization_holds,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use algebroid::abelian;

    #[test]
    fn first_syzygy_of_t_and_x() {
        let p = abelian(1);
        let dual = QuadraticDual::build(&p);
        let alg = Arc::new(ReesAlgebra::new(p));
        let om = omega_r(alg.clone(), &dual, 1, 5).unwrap();
        assert_eq!(om.generator_degrees(), vec![2]);
        assert_eq!(om.dim(2), 1);
        assert!(omega_r(alg.clone(), &dual, 2, 5).unwrap().is_zero());
        assert!(omega_r(alg.clone(), &dual, 3, 5).unwrap().is_zero());
        let all = omega_r(alg, &dual, 0, 3).unwrap();
        assert_eq!(all.generator_degrees(), vec![0]);
    }
}
