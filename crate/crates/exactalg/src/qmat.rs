//! Sparse matrices over ℚ and incremental row echelon forms.
//!
//! Matrices use the row-image convention: a linear map V → W is stored as a
//! `dim V × dim W` matrix whose i-th row is the image of the i-th basis vector.
//! Composition `g ∘ f` is therefore the product `F · G`.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::field::{Field, Fp};
use crate::Rat;

/// Sparse vector as a column-sorted list of nonzero entries.
pub type SparseVec<F> = Vec<(usize, F)>;

/// `a + c·b` on sparse vectors.
pub fn axpy<F: Field>(a: &SparseVec<F>, c: &F, b: &SparseVec<F>) -> SparseVec<F> {
    if c.is_nil() {
        return a.clone();
    }
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        if j >= b.len() || (i < a.len() && a[i].0 < b[j].0) {
            out.push(a[i].clone());
            i += 1;
        } else if i >= a.len() || b[j].0 < a[i].0 {
            out.push((b[j].0, c.mul(&b[j].1)));
            j += 1;
        } else {
            let v = a[i].1.add(&c.mul(&b[j].1));
            if !v.is_nil() {
                out.push((a[i].0, v));
            }
            i += 1;
            j += 1;
        }
    }
    out
}

pub fn scale_vec<F: Field>(a: &SparseVec<F>, c: &F) -> SparseVec<F> {
    if c.is_nil() {
        return Vec::new();
    }
    a.iter().map(|(i, x)| (*i, x.mul(c))).collect()
}

/// Collect unsorted (index, value) pairs into a canonical sparse vector.
pub fn collect_sparse<F: Field, I: IntoIterator<Item = (usize, F)>>(it: I) -> SparseVec<F> {
    let mut m: BTreeMap<usize, F> = BTreeMap::new();
    for (i, v) in it {
        if v.is_nil() {
            continue;
        }
        match m.get_mut(&i) {
            Some(x) => *x = x.add(&v),
            None => {
                m.insert(i, v);
            }
        }
    }
    m.into_iter().filter(|(_, v)| !v.is_nil()).collect()
}

/// Sparse ℚ matrix (row-image convention).
#[derive(Clone, Debug, PartialEq)]
pub struct QMat {
    pub nrows: usize,
    pub ncols: usize,
    pub rows: Vec<SparseVec<Rat>>,
}

impl QMat {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        QMat { nrows, ncols, rows: vec![Vec::new(); nrows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMat::zeros(n, n);
        for i in 0..n {
            m.rows[i].push((i, Rat::from_integer(1.into())));
        }
        m
    }

    pub fn from_rows(ncols: usize, rows: Vec<SparseVec<Rat>>) -> Self {
        debug_assert!(rows.iter().all(|r| r.iter().all(|(c, _)| *c < ncols)));
        QMat { nrows: rows.len(), ncols, rows }
    }

    pub fn from_dense(d: &[Vec<Rat>]) -> Self {
        let ncols = d.first().map(|r| r.len()).unwrap_or(0);
        let rows = d
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(_, x)| !x.is_zero())
                    .map(|(i, x)| (i, x.clone()))
                    .collect()
            })
            .collect();
        QMat::from_rows(ncols, rows)
    }

    pub fn from_i64(d: &[Vec<i64>]) -> Self {
        let dense: Vec<Vec<Rat>> = d
            .iter()
            .map(|r| r.iter().map(|&x| Rat::from_integer(x.into())).collect())
            .collect();
        let mut m = QMat::from_dense(&dense);
        if d.is_empty() {
            m.ncols = 0;
        }
        m
    }

    pub fn get(&self, r: usize, c: usize) -> Rat {
        self.rows[r]
            .binary_search_by_key(&c, |(i, _)| *i)
            .map(|k| self.rows[r][k].1.clone())
            .unwrap_or_else(|_| Rat::zero())
    }

    pub fn to_dense(&self) -> Vec<Vec<Rat>> {
        let mut d = vec![vec![Rat::zero(); self.ncols]; self.nrows];
        for (r, row) in self.rows.iter().enumerate() {
            for (c, v) in row {
                d[r][*c] = v.clone();
            }
        }
        d
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.is_empty())
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    pub fn transpose(&self) -> QMat {
        let mut rows: Vec<SparseVec<Rat>> = vec![Vec::new(); self.ncols];
        for (r, row) in self.rows.iter().enumerate() {
            for (c, v) in row {
                rows[*c].push((r, v.clone()));
            }
        }
        QMat { nrows: self.ncols, ncols: self.nrows, rows }
    }

    /// Product `self · other`.
    pub fn mul(&self, other: &QMat) -> QMat {
        assert_eq!(self.ncols, other.nrows, "dimension mismatch in product");
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let mut acc: BTreeMap<usize, Rat> = BTreeMap::new();
                for (k, a) in row {
                    for (c, b) in &other.rows[*k] {
                        *acc.entry(*c).or_insert_with(Rat::zero) += a * b;
                    }
                }
                acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
            })
            .collect();
        QMat { nrows: self.nrows, ncols: other.ncols, rows }
    }

    /// Row vector times matrix.
    pub fn apply(&self, v: &SparseVec<Rat>) -> SparseVec<Rat> {
        let mut acc: BTreeMap<usize, Rat> = BTreeMap::new();
        for (k, a) in v {
            for (c, b) in &self.rows[*k] {
                *acc.entry(*c).or_insert_with(Rat::zero) += a * b;
            }
        }
        acc.into_iter().filter(|(_, v)| !v.is_zero()).collect()
    }

    pub fn sub(&self, other: &QMat) -> QMat {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let m1 = Rat::from_integer((-1).into());
        let rows = self.rows.iter().zip(&other.rows).map(|(a, b)| axpy(a, &m1, b)).collect();
        QMat { nrows: self.nrows, ncols: self.ncols, rows }
    }

    pub fn add(&self, other: &QMat) -> QMat {
        assert_eq!((self.nrows, self.ncols), (other.nrows, other.ncols));
        let one = Rat::from_integer(1.into());
        let rows = self.rows.iter().zip(&other.rows).map(|(a, b)| axpy(a, &one, b)).collect();
        QMat { nrows: self.nrows, ncols: self.ncols, rows }
    }

    pub fn scale(&self, c: &Rat) -> QMat {
        QMat {
            nrows: self.nrows,
            ncols: self.ncols,
            rows: self.rows.iter().map(|r| scale_vec(r, c)).collect(),
        }
    }

    /// Stack the rows of `other` below `self`.
    pub fn vstack(&self, other: &QMat) -> QMat {
        assert_eq!(self.ncols, other.ncols);
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        QMat { nrows: rows.len(), ncols: self.ncols, rows }
    }

    /// Exact rank over ℚ.
    pub fn rank(&self) -> usize {
        let mut e = Echelon::<Rat>::new(self.ncols, false);
        for r in &self.rows {
            e.insert(r.clone());
        }
        e.rank()
    }

    /// Reduce modulo p = 2^61 − 1; `None` if some denominator vanishes mod p.
    pub fn to_fp(&self) -> Option<Vec<SparseVec<Fp>>> {
        self.rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|(c, v)| Fp::from_rat(v).map(|f| (*c, f)))
                    .filter(|x| !matches!(x, Some((_, f)) if f.0 == 0))
                    .collect::<Option<Vec<_>>>()
            })
            .collect()
    }

    /// Rank modulo p = 2^61 − 1. This is a lower bound on the rank over ℚ.
    /// Falls back to the exact rank if a denominator vanishes mod p.
    pub fn rank_lower_bound(&self) -> usize {
        match self.to_fp() {
            Some(rows) => {
                let mut e = Echelon::<Fp>::new(self.ncols, false);
                for r in rows {
                    e.insert(r);
                }
                e.rank()
            }
            None => self.rank(),
        }
    }

    /// Basis of `{v : v · self = 0}`, i.e. the kernel of the represented map.
    pub fn left_kernel(&self) -> Vec<SparseVec<Rat>> {
        let mut e = Echelon::<Rat>::new(self.ncols, true);
        let mut ker = Vec::new();
        for r in &self.rows {
            if let Insert::Dependent(c) = e.insert(r.clone()) {
                ker.push(c);
            }
        }
        ker
    }

    /// Some `x` with `x · self = target`, if one exists.
    pub fn solve_left(&self, target: &SparseVec<Rat>) -> Option<SparseVec<Rat>> {
        let mut e = Echelon::<Rat>::new(self.ncols, true);
        for r in &self.rows {
            e.insert(r.clone());
        }
        e.express(target)
    }

    /// Reduced row echelon basis of the row space.
    pub fn row_space(&self) -> Vec<SparseVec<Rat>> {
        let mut e = Echelon::<Rat>::new(self.ncols, false);
        for r in &self.rows {
            e.insert(r.clone());
        }
        e.rows
    }
}

/// Outcome of inserting a vector into an [`Echelon`].
#[derive(Clone, Debug)]
pub enum Insert<F> {
    /// The vector was independent; its residual now pivots at this column.
    NewPivot(usize),
    /// The vector was dependent. When tracking, carries the kernel relation
    /// among the inserted vectors (coefficient per insertion index).
    Dependent(SparseVec<F>),
}

/// Incrementally built row echelon form with optional tracking of each stored
/// row as a combination of the inserted vectors.
#[derive(Clone, Debug)]
pub struct Echelon<F: Field> {
    pub ncols: usize,
    pivot_of: BTreeMap<usize, usize>,
    pub rows: Vec<SparseVec<F>>,
    combos: Option<Vec<SparseVec<F>>>,
    inserted: usize,
}

impl<F: Field> Echelon<F> {
    pub fn new(ncols: usize, track: bool) -> Self {
        Echelon {
            ncols,
            pivot_of: BTreeMap::new(),
            rows: Vec::new(),
            combos: if track { Some(Vec::new()) } else { None },
            inserted: 0,
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn inserted(&self) -> usize {
        self.inserted
    }

    pub fn pivot_cols(&self) -> impl Iterator<Item = &usize> {
        self.pivot_of.keys()
    }

    pub fn pivot_row(&self, col: usize) -> Option<usize> {
        self.pivot_of.get(&col).copied()
    }

    /// Reduce `v` against the stored rows. Returns the residual and the
    /// coefficients (per stored row) that were subtracted.
    pub fn reduce(&self, v: SparseVec<F>, full: bool) -> (SparseVec<F>, Vec<(usize, F)>) {
        let mut v = v;
        let mut used = Vec::new();
        let mut pos = 0;
        while pos < v.len() {
            let (col, coeff) = (v[pos].0, v[pos].1.clone());
            match self.pivot_of.get(&col) {
                Some(&r) => {
                    // stored rows are normalized to leading coefficient 1
                    v = axpy(&v, &coeff.neg(), &self.rows[r]);
                    used.push((r, coeff));
                    // entry at `col` cancelled; everything before is untouched
                }
                None => {
                    if !full {
                        break;
                    }
                    pos += 1;
                }
            }
        }
        (v, used)
    }

    fn combo_of(&self, used: &[(usize, F)]) -> SparseVec<F> {
        let combos = self.combos.as_ref().expect("tracking enabled");
        let mut acc: SparseVec<F> = Vec::new();
        for (r, c) in used {
            acc = axpy(&acc, c, &combos[*r]);
        }
        acc
    }

    pub fn insert(&mut self, v: SparseVec<F>) -> Insert<F> {
        let idx = self.inserted;
        self.inserted += 1;
        let (res, used) = self.reduce(v, false);
        if res.is_empty() {
            if self.combos.is_some() {
                // e_idx − Σ c_r combo_r
                let sub = self.combo_of(&used);
                let rel = axpy(&vec![(idx, F::unit())], &F::unit().neg(), &sub);
                return Insert::Dependent(rel);
            }
            return Insert::Dependent(Vec::new());
        }
        let (col, lead) = (res[0].0, res[0].1.clone());
        let inv = lead.inv();
        let row = scale_vec(&res, &inv);
        if self.combos.is_some() {
            let sub = self.combo_of(&used);
            let c = axpy(&vec![(idx, F::unit())], &F::unit().neg(), &sub);
            let c = scale_vec(&c, &inv);
            self.combos.as_mut().unwrap().push(c);
        }
        self.pivot_of.insert(col, self.rows.len());
        self.rows.push(row);
        Insert::NewPivot(col)
    }

    /// Whether `v` lies in the span of the inserted vectors.
    pub fn contains(&self, v: &SparseVec<F>) -> bool {
        self.reduce(v.clone(), false).0.is_empty()
    }

    /// Express `v` as a combination of inserted vectors (tracking required).
    pub fn express(&self, v: &SparseVec<F>) -> Option<SparseVec<F>> {
        let (res, used) = self.reduce(v.clone(), false);
        if !res.is_empty() {
            return None;
        }
        Some(self.combo_of(&used))
    }

    /// Coefficients of `v` on the stored rows, if `v` is in the span.
    pub fn coords(&self, v: &SparseVec<F>) -> Option<Vec<(usize, F)>> {
        let (res, used) = self.reduce(v.clone(), false);
        if res.is_empty() {
            Some(used)
        } else {
            None
        }
    }
}

/// Quotient `Z / B` of subspaces of a common ambient space, with chosen
/// representatives and a coordinate map.
#[derive(Clone, Debug)]
pub struct Subquotient {
    ech: Echelon<Rat>,
    /// stored-row index → class index, for rows coming from `Z`
    class_of_row: BTreeMap<usize, usize>,
    pub reps: Vec<SparseVec<Rat>>,
}

impl Subquotient {
    /// `b` must span a subspace of the span of `z`.
    pub fn new(ambient: usize, b: &[SparseVec<Rat>], z: &[SparseVec<Rat>]) -> Self {
        let mut ech = Echelon::new(ambient, false);
        for v in b {
            ech.insert(v.clone());
        }
        let mut class_of_row = BTreeMap::new();
        let mut reps = Vec::new();
        for v in z {
            if let Insert::NewPivot(_) = ech.insert(v.clone()) {
                let r = ech.rows.len() - 1;
                class_of_row.insert(r, reps.len());
                reps.push(ech.rows[r].clone());
            }
        }
        Subquotient { ech, class_of_row, reps }
    }

    pub fn dim(&self) -> usize {
        self.reps.len()
    }

    /// Coordinates of the class of `v` (which must lie in `Z`).
    pub fn coords(&self, v: &SparseVec<Rat>) -> Option<SparseVec<Rat>> {
        let used = self.ech.coords(v)?;
        Some(collect_sparse(
            used.into_iter().filter_map(|(r, c)| self.class_of_row.get(&r).map(|k| (*k, c))),
        ))
    }
}
