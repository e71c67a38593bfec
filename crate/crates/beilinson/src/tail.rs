//! Graded pieces in a degree range together with the Ũ_1-action, for
//! comparing two modules in qgr by their tails.

use std::collections::BTreeMap;

use exactalg::{QMat, Rat, SparseVec, Subquotient};
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rees::resolution::{left_mul, FreeMap, FreeModule};
use rees::ReesAlgebra;
use sections::GradedModulePresentation;

use crate::algebra::finish;
use crate::emodule::random_combination;
use crate::BeilinsonError;

#[derive(Clone, Debug)]
pub struct TailModule {
    pub lo: i64,
    pub hi: i64,
    /// dims[e − lo].
    pub dims: Vec<usize>,
    /// actions[e − lo][u] for lo ≤ e < hi: row-image matrix of the basis
    /// monomial u of Ũ_1, from degree e to e + 1.
    pub actions: Vec<Vec<QMat>>,
}

impl TailModule {
    pub fn from_presentation(m: &GradedModulePresentation, lo: i64, hi: i64) -> Result<Self, BeilinsonError> {
        let alg = m.algebra();
        let d1 = alg.dim(1);
        let mut dims = Vec::new();
        for e in lo..=hi {
            dims.push(m.dim(e)?);
        }
        let mut actions = Vec::new();
        for e in lo..hi {
            let (dm, dn) = (dims[(e - lo) as usize], dims[(e - lo + 1) as usize]);
            let table = m.action(1, e)?;
            let mats = (0..d1)
                .map(|u| QMat::from_rows(dn, (0..dm).map(|mu| table[u * dm + mu].clone()).collect()))
                .collect();
            actions.push(mats);
        }
        Ok(TailModule { lo, hi, dims, actions })
    }

    /// H_k of the free complex `maps[k−1]: terms[k] → terms[k−1]`.
    pub fn from_homology(
        alg: &ReesAlgebra,
        terms: &[FreeModule],
        maps: &[FreeMap],
        k: usize,
        lo: i64,
        hi: i64,
    ) -> Result<Self, BeilinsonError> {
        let d1 = alg.dim(1);
        let mut subs = Vec::new();
        for e in lo..=hi {
            let Some(module) = terms.get(k) else {
                subs.push(Subquotient::new(0, &[], &[]));
                continue;
            };
            let ambient = module.dim(alg, e);
            let z = if k == 0 {
                (0..ambient).map(|i| vec![(i, Rat::from_integer(1.into()))]).collect()
            } else {
                maps[k - 1].matrix_at(alg, e)?.left_kernel()
            };
            let b = match maps.get(k) {
                Some(d) => d.matrix_at(alg, e)?.rows,
                None => Vec::new(),
            };
            subs.push(Subquotient::new(ambient, &b, &z));
        }
        let dims: Vec<usize> = subs.iter().map(|s| s.dim()).collect();
        let mut actions = Vec::new();
        for e in lo..hi {
            let (src, tgt) = (&subs[(e - lo) as usize], &subs[(e - lo + 1) as usize]);
            let mut mats = Vec::with_capacity(d1);
            for u in 0..d1 {
                let mut rows = Vec::with_capacity(src.dim());
                for z in &src.reps {
                    let w = left_mul(alg, &terms[k], e, 1, u, z)?;
                    rows.push(tgt.coords(&w).ok_or_else(|| BeilinsonError::Construction("action left the cycles".into()))?);
                }
                mats.push(QMat::from_rows(tgt.dim(), rows));
            }
            actions.push(mats);
        }
        Ok(TailModule { lo, hi, dims, actions })
    }

    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|d| *d == 0)
    }
}

/// H_k of the free complex vanishes in degrees lo..=hi: rank d_k + rank d_{k+1}
/// = dim F_k, with modular lower bounds first (they can only undercount).
pub fn homology_vanishes(
    alg: &ReesAlgebra,
    terms: &[FreeModule],
    maps: &[FreeMap],
    k: usize,
    lo: i64,
    hi: i64,
) -> Result<bool, BeilinsonError> {
    let Some(module) = terms.get(k) else { return Ok(true) };
    for e in lo..=hi {
        let dim = module.dim(alg, e);
        if dim == 0 {
            continue;
        }
        let out = if k == 0 { None } else { Some(maps[k - 1].matrix_at(alg, e)?) };
        let inc = match maps.get(k) {
            Some(d) => Some(d.matrix_at(alg, e)?),
            None => None,
        };
        let lb = |m: &Option<QMat>| m.as_ref().map(|m| m.rank_lower_bound()).unwrap_or(0);
        if lb(&out) + lb(&inc) == dim {
            continue;
        }
        let exact = |m: &Option<QMat>| m.as_ref().map(|m| m.rank()).unwrap_or(0);
        if exact(&out) + exact(&inc) != dim {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Graded maps Φ_e: A_e → B_e over the tail with Φ_{e+1}(u·x) = u·Φ_e(x)
/// for u ∈ Ũ_1; returns the number of independent solutions and whether a
/// seeded random one is invertible in every degree.
pub fn tail_isomorphism(a: &TailModule, b: &TailModule, seed: u64) -> (usize, bool) {
    if a.dims != b.dims || a.lo != b.lo || a.hi != b.hi {
        return (0, false);
    }
    let degrees = a.dims.len();
    let mut off = Vec::with_capacity(degrees);
    let mut unknowns = 0;
    for d in &a.dims {
        off.push(unknowns);
        unknowns += d * d;
    }
    let mut rows: Vec<BTreeMap<usize, Rat>> = vec![BTreeMap::new(); unknowns];
    let mut col = 0;
    for t in 0..degrees.saturating_sub(1) {
        let (da, dn) = (a.dims[t], a.dims[t + 1]);
        for (au, bu) in a.actions[t].iter().zip(&b.actions[t]) {
            // equation entries (x, r): x ∈ A_e, r ∈ B_{e+1}
            for x in 0..da {
                for (p, c) in &au.rows[x] {
                    for r in 0..dn {
                        let k = off[t + 1] + p * dn + r;
                        *rows[k].entry(col + x * dn + r).or_insert_with(Rat::zero) += c;
                    }
                }
            }
            for p in 0..da {
                for q in 0..da {
                    let k = off[t] + p * da + q;
                    for (r, c) in &bu.rows[q] {
                        *rows[k].entry(col + p * dn + r).or_insert_with(Rat::zero) -= c;
                    }
                }
            }
            col += da * dn;
        }
    }
    if unknowns == 0 {
        return (0, true);
    }
    let kernel: Vec<SparseVec<Rat>> = if col == 0 {
        (0..unknowns).map(|i| vec![(i, Rat::from_integer(1.into()))]).collect()
    } else {
        QMat::from_rows(col, rows.into_iter().map(finish).collect()).left_kernel()
    };
    if kernel.is_empty() {
        return (0, false);
    }
    let space: Vec<Vec<QMat>> = kernel
        .iter()
        .map(|k| {
            (0..degrees)
                .map(|t| {
                    let d = a.dims[t];
                    let mut r: Vec<SparseVec<Rat>> = vec![Vec::new(); d];
                    for (u, c) in k {
                        if *u >= off[t] && *u < off[t] + d * d {
                            r[(u - off[t]) / d].push(((u - off[t]) % d, c.clone()));
                        }
                    }
                    QMat::from_rows(d, r)
                })
                .collect()
        })
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..4 {
        let phi = random_combination(&space, &mut rng);
        if phi.iter().zip(&a.dims).all(|(m, d)| m.rank() == *d) {
            return (space.len(), true);
        }
    }
    (space.len(), false)
}
