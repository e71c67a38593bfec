//! The block upper-triangular algebra E with (i, j)-block U^{j−i}.
//!
//! Vertex i stands for position −i. A block element a ∈ E_{ij} = Ũ_{j−i}
//! acts from position −j to position −i, and E_{ij} · E_{jk} ⊂ E_{ik} is the
//! product of Ũ. Blocks are kept separately and never assembled into a dense
//! matrix of the total dimension.

use std::collections::BTreeMap;
use std::sync::Arc;

use exactalg::{Rat, SparseVec};
use num_traits::{One, Zero};
use rees::ReesAlgebra;
use serde::{Deserialize, Serialize};

use crate::BeilinsonError;

/// Sum of block elements, keyed by (row vertex, column vertex).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EElement {
    pub blocks: BTreeMap<(usize, usize), SparseVec<Rat>>,
}

impl EElement {
    pub fn block(i: usize, j: usize, v: SparseVec<Rat>) -> Self {
        let mut blocks = BTreeMap::new();
        if !v.is_empty() {
            blocks.insert((i, j), v);
        }
        EElement { blocks }
    }

    pub fn is_zero(&self) -> bool {
        self.blocks.values().all(|v| v.is_empty())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AssociativityReport {
    pub triples_checked: usize,
    pub failures: usize,
    pub idempotents_ok: bool,
}

pub struct BeilinsonAlgebra {
    alg: Arc<ReesAlgebra>,
    pub n: usize,
    pub report: AssociativityReport,
}

pub(crate) fn add_scaled(acc: &mut BTreeMap<usize, Rat>, v: &SparseVec<Rat>, c: &Rat) {
    for (i, x) in v {
        *acc.entry(*i).or_insert_with(Rat::zero) += c * x;
    }
}

pub(crate) fn finish(acc: BTreeMap<usize, Rat>) -> SparseVec<Rat> {
    acc.into_iter().filter(|(_, x)| !x.is_zero()).collect()
}

impl BeilinsonAlgebra {
    /// Builds E for an algebroid over a point and checks associativity on
    /// every basis triple and the idempotent relations.
    pub fn build(alg: Arc<ReesAlgebra>) -> Result<Self, BeilinsonError> {
        if !alg.base_is_field() {
            return Err(BeilinsonError::NeedsPointBase);
        }
        let n = alg.n();
        let mut e = BeilinsonAlgebra {
            alg,
            n,
            report: AssociativityReport { triples_checked: 0, failures: 0, idempotents_ok: false },
        };
        e.report = e.check()?;
        if e.report.failures > 0 || !e.report.idempotents_ok {
            return Err(BeilinsonError::Construction(format!(
                "{} associativity failures out of {}",
                e.report.failures, e.report.triples_checked
            )));
        }
        Ok(e)
    }

    pub fn algebra(&self) -> &Arc<ReesAlgebra> {
        &self.alg
    }

    pub fn vertices(&self) -> usize {
        self.n + 1
    }

    pub fn block_dim(&self, i: usize, j: usize) -> usize {
        if j < i || j > self.n {
            0
        } else {
            self.alg.dim((j - i) as i64)
        }
    }

    pub fn total_dim(&self) -> usize {
        (0..=self.n).flat_map(|i| (i..=self.n).map(move |j| (i, j))).map(|(i, j)| self.block_dim(i, j)).sum()
    }

    /// Dimensions of the blocks (0, j), j = 0..=n.
    pub fn top_row(&self) -> Vec<usize> {
        (0..=self.n).map(|j| self.block_dim(0, j)).collect()
    }

    /// x·y for x ∈ E_{ij} and y ∈ E_{jk}, as coordinates in E_{ik}.
    pub fn mul_blocks(&self, i: usize, j: usize, k: usize, x: &SparseVec<Rat>, y: &SparseVec<Rat>) -> Result<SparseVec<Rat>, BeilinsonError> {
        if j < i || k < j {
            return Ok(Vec::new());
        }
        let (s, r) = ((j - i) as u32, (k - j) as u32);
        let table = self.alg.qmul_table(s, r)?;
        let nr = self.alg.dim(r as i64);
        let mut acc = BTreeMap::new();
        for (a, ca) in x {
            for (b, cb) in y {
                add_scaled(&mut acc, &table[a * nr + b], &(ca * cb));
            }
        }
        Ok(finish(acc))
    }

    pub fn mul(&self, x: &EElement, y: &EElement) -> Result<EElement, BeilinsonError> {
        let mut out: BTreeMap<(usize, usize), BTreeMap<usize, Rat>> = BTreeMap::new();
        for (&(i, j), u) in &x.blocks {
            for (&(j2, k), v) in &y.blocks {
                if j != j2 {
                    continue;
                }
                let w = self.mul_blocks(i, j, k, u, v)?;
                add_scaled(out.entry((i, k)).or_default(), &w, &Rat::one());
            }
        }
        Ok(EElement {
            blocks: out.into_iter().map(|(k, v)| (k, finish(v))).filter(|(_, v)| !v.is_empty()).collect(),
        })
    }

    /// e_i: the unit of the diagonal block (i, i).
    pub fn idempotent(&self, i: usize) -> EElement {
        EElement::block(i, i, vec![(0, Rat::one())])
    }

    pub fn unit(&self) -> EElement {
        let mut blocks = BTreeMap::new();
        for i in 0..=self.n {
            blocks.insert((i, i), vec![(0, Rat::one())]);
        }
        EElement { blocks }
    }

    fn check(&self) -> Result<AssociativityReport, BeilinsonError> {
        let n = self.n;
        let mut checked = 0;
        let mut failures = 0;
        let basis = |d: usize| -> Vec<SparseVec<Rat>> { (0..d).map(|a| vec![(a, Rat::one())]).collect() };
        for i in 0..=n {
            for j in i..=n {
                for k in j..=n {
                    for l in k..=n {
                        let (bx, by, bz) = (basis(self.block_dim(i, j)), basis(self.block_dim(j, k)), basis(self.block_dim(k, l)));
                        for x in &bx {
                            for y in &by {
                                let xy = self.mul_blocks(i, j, k, x, y)?;
                                for z in &bz {
                                    let left = self.mul_blocks(i, k, l, &xy, z)?;
                                    let right = self.mul_blocks(i, j, l, x, &self.mul_blocks(j, k, l, y, z)?)?;
                                    checked += 1;
                                    if left != right {
                                        failures += 1;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        let mut idempotents_ok = true;
        for i in 0..=n {
            for j in 0..=n {
                let p = self.mul(&self.idempotent(i), &self.idempotent(j))?;
                let expect = if i == j { self.idempotent(i) } else { EElement::default() };
                idempotents_ok &= p == expect;
            }
        }
        let one = self.unit();
        for i in 0..=n {
            for j in i..=n {
                for x in basis(self.block_dim(i, j)) {
                    let e = EElement::block(i, j, x);
                    idempotents_ok &= self.mul(&one, &e)? == e && self.mul(&e, &one)? == e;
                }
            }
        }
        Ok(AssociativityReport { triples_checked: checked, failures, idempotents_ok })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use algebroid::abelian;

    #[test]
    fn idempotents_are_orthogonal() {
        let e = BeilinsonAlgebra::build(Arc::new(ReesAlgebra::new(abelian(1)))).unwrap();
        let p = e.mul(&e.idempotent(0), &e.idempotent(1)).unwrap();
        assert!(p.is_zero());
        assert_eq!(e.mul(&e.idempotent(1), &e.idempotent(1)).unwrap(), e.idempotent(1));
    }

    #[test]
    fn blocks_below_diagonal_vanish() {
        let e = BeilinsonAlgebra::build(Arc::new(ReesAlgebra::new(abelian(2)))).unwrap();
        assert_eq!(e.block_dim(2, 0), 0);
        assert_eq!(e.block_dim(0, 2), 6);
    }
}
