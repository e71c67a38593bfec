//! Koszul complexes of the Rees algebra Ũ against its quadratic dual, the
//! Koszul bicomplex, the modules Ω^i and the resolution of the diagonal.
//!
//! A generator of K^i is a dual basis vector φ_β of (Ũ^⊥i)*, paired with the
//! basis monomial b_β of the dual algebra, and sits in internal degree i.
//! Writing j_0 = e, j_k = σ_k for the degree-one generators of the dual and
//! u_0 = t, u_k = l_k for the dual basis of U¹, the left boundary is
//!
//!   k(w ⊗ φ_β) = Σ_{γ,d} w · c · u_d ⊗ φ_γ,   c = φ_β(b_γ · j_d),
//!
//! where φ_β reads the coefficient of b_β with functions on the right. The
//! right boundary is the mirror: φ_β ⊗ w ↦ Σ φ_γ ⊗ u_d · c · w with
//! c = φ_β(j_d · b_γ) read with functions on the left.

mod bicomplex;
mod diagonal;
mod exactness;

use std::collections::BTreeMap;
use std::sync::Arc;

use algebroid::AlgebroidPresentation;
use exactalg::{BaseRing, ExactAlgError, Mono, Poly, QMat, Rat, RingMatrix, SparseVec};
use num_traits::Zero;
use quaddual::{DualElement, DualError, DualMono, QuadraticDual};
use rees::{Pbw, ReesAlgebra, ReesElement, ReesError};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bicomplex::{build_bicomplex, Bicomplex, TotalReport};
pub use diagonal::{diagonal_resolution, omega_l, omega_r, BidegreeReport, DiagonalResolution, OmegaModule};
pub use exactness::{
    verify_resolution, verify_resolution_with, ExactnessStrategy, HomologyEntry, ResolutionReport, StrategyChoice,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KoszulError {
    #[error("construction bug: {0}")]
    ConstructionBug(String),
    #[error("operation needs a point base")]
    NeedsPointBase,
    #[error("position {0} out of range")]
    OutOfRange(i64),
    #[error("boundary is not homogeneous for the weight grading")]
    NotWeightHomogeneous,
    #[error(transparent)]
    Rees(#[from] ReesError),
    #[error(transparent)]
    Dual(#[from] DualError),
    #[error(transparent)]
    Exact(#[from] ExactAlgError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    /// Left Ũ-modules; coefficients multiply on the left.
    Left,
    Right,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Generator {
    pub degree: i64,
    /// Weight under the algebroid's weight grading (0 when there is none).
    pub weight: i64,
    pub label: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FreeTerm {
    pub generators: Vec<Generator>,
}

impl FreeTerm {
    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    /// (twist, multiplicity) pairs in order of first appearance.
    pub fn summands(&self) -> Vec<(i64, usize)> {
        let mut out: Vec<(i64, usize)> = Vec::new();
        for g in &self.generators {
            match out.iter_mut().find(|(d, _)| *d == g.degree) {
                Some((_, m)) => *m += 1,
                None => out.push((g.degree, 1)),
            }
        }
        out
    }
}

/// Expected homology at position 0: a direct sum of rank-one free O-lines,
/// each given by (internal degree, weight).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Augmentation {
    pub label: String,
    pub lines: Vec<(i64, i64)>,
}

impl Augmentation {
    pub fn rank_in_degree(&self, p: i64) -> usize {
        self.lines.iter().filter(|(d, _)| *d == p).count()
    }
}

/// Complex of free graded Ũ-modules with homological indexing:
/// `maps[i]: terms[i+1] → terms[i]`.
#[derive(Clone, Debug)]
pub struct GradedComplex {
    alg: Arc<ReesAlgebra>,
    pub label: String,
    pub side: Side,
    pub weighted: bool,
    pub terms: Vec<FreeTerm>,
    /// `maps[i][g][h]`: coefficient in Ũ of target generator h in the image of
    /// source generator g, written to the left of h (left modules) or to its
    /// right (right modules).
    pub maps: Vec<Vec<Vec<ReesElement>>>,
    pub augmentation: Option<Augmentation>,
}

impl GradedComplex {
    pub fn algebra(&self) -> &Arc<ReesAlgebra> {
        &self.alg
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Offsets of the generator blocks and total O-rank of term i in degree p.
    pub fn layout(&self, i: usize, p: i64) -> (Vec<usize>, usize) {
        let mut off = Vec::with_capacity(self.terms[i].rank());
        let mut total = 0;
        for g in &self.terms[i].generators {
            off.push(total);
            total += self.alg.dim(p - g.degree);
        }
        (off, total)
    }

    pub fn dim(&self, i: usize, p: i64) -> usize {
        if i >= self.terms.len() {
            0
        } else {
            self.layout(i, p).1
        }
    }

    pub fn min_twist(&self) -> i64 {
        self.terms.iter().flat_map(|t| t.generators.iter().map(|g| g.degree)).min().unwrap_or(0)
    }

    /// Image of the basis element (g, u) of term i under the boundary, as
    /// polynomial coordinates on term i−1 in degree p.
    fn boundary_row(&self, i: usize, g: usize, u: &Pbw, p: i64) -> Result<Vec<(usize, Poly)>, KoszulError> {
        let (off, _) = self.layout(i - 1, p);
        let um = ReesElement::monomial(u.clone());
        let mut row = Vec::new();
        for (h, img) in self.maps[i - 1][g].iter().enumerate() {
            if img.is_zero() {
                continue;
            }
            let prod = match self.side {
                Side::Left => self.alg.mul(&um, img),
                Side::Right => self.alg.right_form(&self.alg.mul(img, &um)),
            };
            let deg = p - self.terms[i - 1].generators[h].degree;
            let piece = self.alg.graded_piece(deg as u32);
            for (m, f) in prod.terms {
                let k = piece.index_of(&m).ok_or(ReesError::NotHomogeneous(deg as u32))?;
                row.push((off[h] + k, f));
            }
        }
        Ok(row)
    }

    /// Row-image matrix of the boundary term i → term i−1 in degree p.
    pub fn boundary_matrix(&self, i: usize, p: i64) -> Result<RingMatrix, KoszulError> {
        if i == 0 || i >= self.terms.len() {
            return Err(KoszulError::OutOfRange(i as i64));
        }
        let ncols = self.dim(i - 1, p);
        let mut entries = Vec::new();
        for (g, gen) in self.terms[i].generators.iter().enumerate() {
            let k = p - gen.degree;
            if k < 0 {
                continue;
            }
            for u in &self.alg.graded_piece(k as u32).basis {
                let mut r = vec![Poly::zero(); ncols];
                for (c, f) in self.boundary_row(i, g, u, p)? {
                    r[c] = &r[c] + &f;
                }
                entries.push(r);
            }
        }
        let mut m = RingMatrix::zeros(entries.len(), ncols);
        m.entries = entries;
        Ok(m)
    }

    /// Row-image ℚ-matrix of the boundary term i → term i−1 in degree p (point base).
    pub fn boundary_qmat(&self, i: usize, p: i64) -> Result<QMat, KoszulError> {
        if !self.alg.base_is_field() {
            return Err(KoszulError::NeedsPointBase);
        }
        if i == 0 || i >= self.terms.len() {
            return Err(KoszulError::OutOfRange(i as i64));
        }
        let (off, ncols) = self.layout(i - 1, p);
        let mut rows = Vec::new();
        for (g, gen) in self.terms[i].generators.iter().enumerate() {
            let k = p - gen.degree;
            if k < 0 {
                continue;
            }
            let nk = self.alg.dim(k);
            let mut blocks = Vec::new();
            for (h, img) in self.maps[i - 1][g].iter().enumerate() {
                if img.is_zero() {
                    continue;
                }
                let e = (gen.degree - self.terms[i - 1].generators[h].degree) as u32;
                let table = match self.side {
                    Side::Left => self.alg.qmul_table(k as u32, e)?,
                    Side::Right => self.alg.qmul_table(e, k as u32)?,
                };
                blocks.push((off[h], e, self.alg.qcoords(img, e)?, table));
            }
            for u in 0..nk {
                let mut acc: BTreeMap<usize, Rat> = BTreeMap::new();
                for (o, e, coords, table) in &blocks {
                    let ne = self.alg.dim(*e as i64);
                    for (b, c) in coords {
                        let entry = match self.side {
                            Side::Left => &table[u * ne + b],
                            Side::Right => &table[b * nk + u],
                        };
                        for (col, x) in entry {
                            *acc.entry(o + col).or_insert_with(Rat::zero) += c * x;
                        }
                    }
                }
                rows.push(acc.into_iter().filter(|(_, x)| !x.is_zero()).collect::<SparseVec<Rat>>());
            }
        }
        Ok(QMat::from_rows(ncols, rows))
    }

    /// First i with maps[i] ∘ maps[i+1] ≠ 0, checked on generators in Ũ.
    pub fn first_nonzero_square(&self) -> Option<usize> {
        for i in 0..self.maps.len().saturating_sub(1) {
            let (outer, inner) = (&self.maps[i + 1], &self.maps[i]);
            for row in outer {
                for k in 0..self.terms[i].rank() {
                    let mut acc = ReesElement::zero();
                    for (h, a) in row.iter().enumerate() {
                        let b = &inner[h][k];
                        if a.is_zero() || b.is_zero() {
                            continue;
                        }
                        let prod = match self.side {
                            Side::Left => self.alg.mul(a, b),
                            Side::Right => self.alg.mul(b, a),
                        };
                        acc = acc.add(&prod);
                    }
                    if !acc.is_zero() {
                        return Some(i + 1);
                    }
                }
            }
        }
        None
    }

    /// The same complex with the top boundary replaced by zero.
    pub fn without_top_boundary(&self) -> GradedComplex {
        let mut c = self.clone();
        if let Some(top) = c.maps.last_mut() {
            for row in top.iter_mut() {
                for x in row.iter_mut() {
                    *x = ReesElement::zero();
                }
            }
        }
        c.label = format!("{} (top boundary removed)", self.label);
        c
    }

    /// Hom_Ũ(−, Ũ) applied term by term, reindexed so that position j holds
    /// the dual of term len−1−j. The result lives on the opposite side.
    pub fn dual(&self) -> GradedComplex {
        let top = self.terms.len() - 1;
        let terms = (0..=top)
            .map(|j| FreeTerm {
                generators: self.terms[top - j]
                    .generators
                    .iter()
                    .map(|g| Generator { degree: -g.degree, weight: -g.weight, label: format!("{}^∨", g.label) })
                    .collect(),
            })
            .collect::<Vec<_>>();
        let maps = (0..top)
            .map(|j| {
                let old = &self.maps[top - j - 1];
                let (ns, nt) = (self.terms[top - j - 1].rank(), self.terms[top - j].rank());
                (0..ns).map(|h| (0..nt).map(|g| old[g][h].clone()).collect()).collect()
            })
            .collect();
        GradedComplex {
            alg: self.alg.clone(),
            label: format!("Hom({}, Ũ)", self.label),
            side: match self.side {
                Side::Left => Side::Right,
                Side::Right => Side::Left,
            },
            weighted: self.weighted,
            terms,
            maps,
            augmentation: None,
        }
    }
}

fn dual_weight(m: &DualMono, w: &[i64]) -> i64 {
    -m.sigmas().iter().map(|&k| w[k]).sum::<i64>()
}

fn koszul_terms(alg: &ReesAlgebra, dual: &QuadraticDual) -> (Vec<FreeTerm>, bool) {
    let pres = alg.presentation();
    let grading = pres.weight_grading();
    let w = grading.clone().unwrap_or_else(|| vec![0; pres.rank()]);
    let n = alg.n() as i64;
    let terms = (0..=n + 1)
        .map(|i| FreeTerm {
            generators: dual
                .basis(i)
                .iter()
                .map(|m| Generator { degree: i, weight: -dual_weight(m, &w), label: format!("({})*", dual.display(&DualElement::term(Poly::one(), *m))) })
                .collect(),
        })
        .collect();
    (terms, grading.is_some())
}

fn check_square(c: GradedComplex) -> Result<GradedComplex, KoszulError> {
    match c.first_nonzero_square() {
        Some(i) => Err(KoszulError::ConstructionBug(format!("{}: boundary squared is nonzero at position {i}", c.label))),
        None => Ok(c),
    }
}

/// K^i = Ũ(−i) ⊗ (Ũ^⊥i)*, i = 0..n+1, augmented to O in degree 0.
pub fn left_koszul(alg: Arc<ReesAlgebra>, dual: &QuadraticDual) -> Result<GradedComplex, KoszulError> {
    let (terms, weighted) = koszul_terms(&alg, dual);
    let n = alg.n();
    let mut maps = Vec::with_capacity(n + 1);
    for i in 1..=n as i64 + 1 {
        let mut images = vec![vec![ReesElement::zero(); dual.rank(i - 1)]; dual.rank(i)];
        for (gamma, b) in dual.basis(i - 1).iter().enumerate() {
            let bg = DualElement::term(Poly::one(), *b);
            for d in 0..=n {
                let prod = dual.right_form(&dual.mul(&bg, &dual.generator(d)));
                for (m, c) in prod.terms {
                    let beta = dual.index_of(&m).ok_or(KoszulError::ConstructionBug("product left the basis".into()))?;
                    images[beta][gamma].add_term(alg.gen_mono(d), c);
                }
            }
        }
        maps.push(images);
    }
    let c = GradedComplex {
        alg,
        label: "left Koszul complex".into(),
        side: Side::Left,
        weighted,
        terms,
        maps,
        augmentation: Some(Augmentation { label: "O".into(), lines: vec![(0, 0)] }),
    };
    check_square(c)
}

/// (Ũ^⊥i)* ⊗ Ũ(−i), i = 0..n+1, as right modules, augmented to O in degree 0.
pub fn right_koszul(alg: Arc<ReesAlgebra>, dual: &QuadraticDual) -> Result<GradedComplex, KoszulError> {
    let (terms, weighted) = koszul_terms(&alg, dual);
    let n = alg.n();
    let mut maps = Vec::with_capacity(n + 1);
    for i in 1..=n as i64 + 1 {
        let mut images = vec![vec![ReesElement::zero(); dual.rank(i - 1)]; dual.rank(i)];
        for (gamma, b) in dual.basis(i - 1).iter().enumerate() {
            let bg = DualElement::term(Poly::one(), *b);
            for d in 0..=n {
                let prod = dual.mul(&dual.generator(d), &bg);
                for (m, c) in prod.terms {
                    let beta = dual.index_of(&m).ok_or(KoszulError::ConstructionBug("product left the basis".into()))?;
                    images[beta][gamma] = images[beta][gamma].add(&alg.mono_times_func(&alg.gen_mono(d), &c));
                }
            }
        }
        maps.push(images);
    }
    let c = GradedComplex {
        alg,
        label: "right Koszul complex".into(),
        side: Side::Right,
        weighted,
        terms,
        maps,
        augmentation: Some(Augmentation { label: "O".into(), lines: vec![(0, 0)] }),
    };
    check_square(c)
}

/// Constant-coefficient data at a point: structure functions evaluated there,
/// anchor dropped (a point has no derivations).
pub fn specialize(pres: &AlgebroidPresentation, point: &[Rat]) -> AlgebroidPresentation {
    let n = pres.rank();
    let ev = |f: &Poly| Poly::constant(f.eval(point));
    AlgebroidPresentation {
        base: BaseRing::rationals(),
        names: pres.names.clone(),
        bracket: pres.bracket.iter().map(|r| r.iter().map(|c| c.iter().map(ev).collect()).collect()).collect(),
        anchor: vec![Vec::new(); n],
    }
}

/// Monomials of total degree `d` in `nvars` variables.
pub(crate) fn monomials_of_degree(nvars: usize, d: u32) -> Vec<Mono> {
    fn rec(left: usize, d: u32, cur: &mut Vec<u32>, out: &mut Vec<Mono>) {
        if left == 1 {
            cur.push(d);
            out.push(Mono::from_exps(cur));
            cur.pop();
            return;
        }
        for a in (0..=d).rev() {
            cur.push(a);
            rec(left - 1, d - a, cur, out);
            cur.pop();
        }
    }
    if nvars == 0 {
        return if d == 0 { vec![Mono::one()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    rec(nvars, d, &mut Vec::new(), &mut out);
    out
}

/// Weight of a PBW monomial: Σ α_k w_k (t has weight 0).
pub(crate) fn pbw_weight(m: &Pbw, w: &[i64]) -> i64 {
    m[1..].iter().zip(w).map(|(a, x)| *a as i64 * x).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use algebroid::{abelian, sl2, weyl};

    fn complex(p: AlgebroidPresentation, left: bool) -> GradedComplex {
        let dual = QuadraticDual::build(&p);
        let alg = Arc::new(ReesAlgebra::new(p));
        if left {
            left_koszul(alg, &dual).unwrap()
        } else {
            right_koszul(alg, &dual).unwrap()
        }
    }

    #[test]
    fn term_ranks_follow_the_dual() {
        let c = complex(sl2(), true);
        let ranks: Vec<usize> = c.terms.iter().map(|t| t.rank()).collect();
        assert_eq!(ranks, vec![1, 4, 6, 4, 1]);
        assert_eq!(c.terms[2].summands(), vec![(2, 6)]);
        let w = complex(weyl(1), true);
        assert_eq!(w.terms.iter().map(|t| t.rank()).collect::<Vec<_>>(), vec![1, 2, 1]);
    }

    #[test]
    fn squares_vanish_on_both_sides() {
        for p in [abelian(1), abelian(2), weyl(1), sl2()] {
            assert_eq!(complex(p.clone(), true).first_nonzero_square(), None);
            assert_eq!(complex(p, false).first_nonzero_square(), None);
        }
    }

    #[test]
    fn point_and_polynomial_matrices_agree() {
        let c = complex(sl2(), true);
        let r = complex(sl2(), false);
        for p in 1..4 {
            for i in 1..c.len() {
                let q = c.boundary_qmat(i, p).unwrap();
                let m = c.boundary_matrix(i, p).unwrap();
                assert_eq!(RingMatrix::from_qmat_transposed(&q).transpose(), m);
                let q = r.boundary_qmat(i, p).unwrap();
                let m = r.boundary_matrix(i, p).unwrap();
                assert_eq!(RingMatrix::from_qmat_transposed(&q).transpose(), m);
            }
        }
    }

    #[test]
    fn dual_complex_reverses_terms() {
        let c = complex(abelian(1), true);
        let d = c.dual();
        assert_eq!(d.side, Side::Right);
        assert_eq!(d.terms[0].generators[0].degree, -2);
        assert_eq!(d.terms[2].generators[0].degree, 0);
        assert_eq!(d.first_nonzero_square(), None);
    }

    #[test]
    fn monomial_enumeration() {
        assert_eq!(monomials_of_degree(2, 3).len(), 4);
        assert_eq!(monomials_of_degree(0, 0).len(), 1);
        assert_eq!(monomials_of_degree(3, 2).len(), 6);
    }
}
