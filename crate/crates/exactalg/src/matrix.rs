//! Matrices over a base ring: rank, kernels and Smith normal form.
//!
//! Unlike [`QMat`], these use the textbook convention: the matrix acts on
//! column vectors, `m · v`.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::poly::Poly;
use crate::qmat::QMat;
use crate::ring::BaseRing;
use crate::{ExactAlgError, Rat};

#[derive(Clone, Debug, PartialEq)]
pub struct RingMatrix {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<Vec<Poly>>,
    pub row_degrees: Option<Vec<i64>>,
    pub col_degrees: Option<Vec<i64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RankStrategy {
    ExactFractionField,
    Evaluation { points: usize, seed: u64 },
}

impl RankStrategy {
    pub fn evaluation_default(seed: u64) -> Self {
        RankStrategy::Evaluation { points: 3, seed }
    }
}

/// A rank together with the strategy that produced it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankResult {
    pub rank: usize,
    pub strategy: RankStrategy,
}

/// Sampling range for evaluation points.
pub const EVAL_BOUND: i64 = 1_000_000;

#[derive(Clone, Debug, PartialEq)]
pub struct Smith {
    pub left: RingMatrix,
    pub diag: Vec<Poly>,
    pub right: RingMatrix,
}

impl RingMatrix {
    pub fn new(entries: Vec<Vec<Poly>>) -> Self {
        let rows = entries.len();
        let cols = entries.first().map(|r| r.len()).unwrap_or(0);
        assert!(entries.iter().all(|r| r.len() == cols), "ragged matrix");
        RingMatrix { rows, cols, entries, row_degrees: None, col_degrees: None }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        RingMatrix {
            rows,
            cols,
            entries: vec![vec![Poly::zero(); cols]; rows],
            row_degrees: None,
            col_degrees: None,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = RingMatrix::zeros(n, n);
        for i in 0..n {
            m.entries[i][i] = Poly::one();
        }
        m
    }

    pub fn from_qmat_transposed(q: &QMat) -> Self {
        // row-image QMat (dim V × dim W) → column-action matrix (dim W × dim V)
        let mut m = RingMatrix::zeros(q.ncols, q.nrows);
        for (r, row) in q.rows.iter().enumerate() {
            for (c, v) in row {
                m.entries[*c][r] = Poly::constant(v.clone());
            }
        }
        m
    }

    pub fn parse(ring: &BaseRing, rows: &[&[&str]]) -> Result<Self, ExactAlgError> {
        let entries = rows
            .iter()
            .map(|r| r.iter().map(|s| ring.parse(s)).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(RingMatrix::new(entries))
    }

    pub fn with_degrees(mut self, rows: Vec<i64>, cols: Vec<i64>) -> Self {
        assert_eq!(rows.len(), self.rows);
        assert_eq!(cols.len(), self.cols);
        self.row_degrees = Some(rows);
        self.col_degrees = Some(cols);
        self
    }

    /// Every nonzero entry has degree `row label − column label` under `deg`
    /// (which returns `None` on inhomogeneous input).
    pub fn degree_labels_consistent(&self, deg: impl Fn(&Poly) -> Option<i64>) -> bool {
        let (Some(rd), Some(cd)) = (&self.row_degrees, &self.col_degrees) else {
            return true;
        };
        for i in 0..self.rows {
            for j in 0..self.cols {
                let e = &self.entries[i][j];
                if !e.is_zero() && deg(e) != Some(rd[i] - cd[j]) {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|r| r.iter().all(|e| e.is_zero()))
    }

    pub fn is_constant(&self) -> bool {
        self.entries.iter().all(|r| r.iter().all(|e| e.is_constant()))
    }

    pub fn num_vars_used(&self) -> usize {
        self.entries
            .iter()
            .flat_map(|r| r.iter().map(|e| e.num_vars_used()))
            .max()
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &RingMatrix) -> RingMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = RingMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.entries[i][k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other.entries[k][j];
                    if !b.is_zero() {
                        out.entries[i][j] = &out.entries[i][j] + &(a * b);
                    }
                }
            }
        }
        out
    }

    pub fn apply(&self, v: &[Poly]) -> Vec<Poly> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let mut acc = Poly::zero();
                for j in 0..self.cols {
                    if !self.entries[i][j].is_zero() && !v[j].is_zero() {
                        acc = &acc + &(&self.entries[i][j] * &v[j]);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn transpose(&self) -> RingMatrix {
        let mut m = RingMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.entries[j][i] = self.entries[i][j].clone();
            }
        }
        m.row_degrees = self.col_degrees.clone();
        m.col_degrees = self.row_degrees.clone();
        m
    }

    /// Constant matrix as a row-image [`QMat`] of the column action.
    pub fn to_qmat_transposed(&self) -> Option<QMat> {
        let mut rows = vec![Vec::new(); self.cols];
        for i in 0..self.rows {
            for (j, row) in rows.iter_mut().enumerate() {
                let c = self.entries[i][j].as_constant()?;
                if !c.is_zero() {
                    row.push((i, c));
                }
            }
        }
        Some(QMat::from_rows(self.rows, rows))
    }

    pub fn eval(&self, point: &[Rat]) -> QMat {
        let mut rows = vec![Vec::new(); self.cols];
        for i in 0..self.rows {
            for (j, row) in rows.iter_mut().enumerate() {
                let c = self.entries[i][j].eval(point);
                if !c.is_zero() {
                    row.push((i, c));
                }
            }
        }
        QMat::from_rows(self.rows, rows)
    }

    pub fn rank(&self, strategy: RankStrategy) -> Result<RankResult, ExactAlgError> {
        let rank = match strategy {
            RankStrategy::ExactFractionField => {
                if let Some(q) = self.to_qmat_transposed() {
                    q.rank()
                } else {
                    self.bareiss_rank()?
                }
            }
            RankStrategy::Evaluation { points, seed } => {
                if points == 0 {
                    return Err(ExactAlgError::InvalidArgument("evaluation needs at least one point".into()));
                }
                let nv = self.num_vars_used();
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut best = 0;
                for _ in 0..points {
                    let pt: Vec<Rat> = (0..nv)
                        .map(|_| Rat::from_integer(rng.gen_range(-EVAL_BOUND..=EVAL_BOUND).into()))
                        .collect();
                    best = best.max(self.eval(&pt).rank());
                }
                best
            }
        };
        Ok(RankResult { rank, strategy })
    }

    /// Fraction-free (Bareiss) elimination over the polynomial ring; the
    /// number of pivots is the rank over the fraction field.
    fn bareiss_rank(&self) -> Result<usize, ExactAlgError> {
        let mut a = self.entries.clone();
        let (m, n) = (self.rows, self.cols);
        let mut prev = Poly::one();
        let mut rank = 0;
        let mut col = 0;
        while rank < m && col < n {
            let Some(p) = (rank..m).find(|&i| !a[i][col].is_zero()) else {
                col += 1;
                continue;
            };
            a.swap(rank, p);
            for i in rank + 1..m {
                for j in col + 1..n {
                    let num = &(&a[rank][col] * &a[i][j]) - &(&a[i][col] * &a[rank][j]);
                    a[i][j] = num.exact_div(&prev)?;
                }
                a[i][col] = Poly::zero();
            }
            prev = a[rank][col].clone();
            rank += 1;
            col += 1;
        }
        Ok(rank)
    }

    /// Generators of `{v : m · v = 0}` as column vectors.
    pub fn kernel_basis(&self) -> Result<Vec<Vec<Poly>>, ExactAlgError> {
        if let Some(q) = self.to_qmat_transposed() {
            return Ok(q
                .left_kernel()
                .into_iter()
                .map(|v| {
                    let mut col = vec![Poly::zero(); self.cols];
                    for (i, c) in v {
                        col[i] = Poly::constant(c);
                    }
                    col
                })
                .collect());
        }
        if self.num_vars_used() > 1 {
            return Err(ExactAlgError::UnsupportedBase {
                op: "kernel_basis",
                required: "constant matrices per internal degree (weight-graded strategy)",
            });
        }
        let s = self.smith_normal_form()?;
        let r = s.diag.iter().filter(|d| !d.is_zero()).count();
        Ok((r..self.cols)
            .map(|j| (0..self.cols).map(|i| s.right.entries[i][j].clone()).collect())
            .collect())
    }

    /// Smith normal form over ℚ or ℚ[x]: `left · m · right = diag(d_1, d_2, ...)`
    /// with monic `d_i` and `d_i | d_{i+1}`.
    pub fn smith_normal_form(&self) -> Result<Smith, ExactAlgError> {
        if self.num_vars_used() > 1 {
            return Err(ExactAlgError::UnsupportedBase {
                op: "smith_normal_form",
                required: "ℚ or a univariate polynomial ring",
            });
        }
        let (m, n) = (self.rows, self.cols);
        let mut a = self.entries.clone();
        let mut left = RingMatrix::identity(m);
        let mut right = RingMatrix::identity(n);
        let kmax = m.min(n);
        for k in 0..kmax {
            loop {
                // pivot: nonzero entry of least degree in the trailing block
                let mut best: Option<(u32, usize, usize)> = None;
                for i in k..m {
                    for j in k..n {
                        if let Some(d) = a[i][j].total_degree() {
                            if best.map_or(true, |(bd, _, _)| d < bd) {
                                best = Some((d, i, j));
                            }
                        }
                    }
                }
                let Some((_, pi, pj)) = best else { break };
                a.swap(k, pi);
                left.entries.swap(k, pi);
                for row in a.iter_mut() {
                    row.swap(k, pj);
                }
                for row in right.entries.iter_mut() {
                    row.swap(k, pj);
                }
                let piv = a[k][k].clone();
                let mut clean = true;
                for i in k + 1..m {
                    if a[i][k].is_zero() {
                        continue;
                    }
                    let (q, r) = a[i][k].div_rem(&piv)?;
                    if !r.is_zero() {
                        clean = false;
                    }
                    row_axpy(&mut a, i, k, &(-q.clone()));
                    row_axpy(&mut left.entries, i, k, &(-q));
                }
                for j in k + 1..n {
                    if a[k][j].is_zero() {
                        continue;
                    }
                    let (q, r) = a[k][j].div_rem(&piv)?;
                    if !r.is_zero() {
                        clean = false;
                    }
                    col_axpy(&mut a, j, k, &(-q.clone()));
                    col_axpy(&mut right.entries, j, k, &(-q));
                }
                if !clean {
                    continue;
                }
                // divisibility of the trailing block by the pivot
                let mut bad_row = None;
                'scan: for i in k + 1..m {
                    for j in k + 1..n {
                        if !a[i][j].is_zero() && !piv.divides(&a[i][j])? {
                            bad_row = Some(i);
                            break 'scan;
                        }
                    }
                }
                match bad_row {
                    Some(i) => {
                        row_axpy(&mut a, k, i, &Poly::one());
                        row_axpy(&mut left.entries, k, i, &Poly::one());
                    }
                    None => break,
                }
            }
            if !a[k][k].is_zero() {
                let lc = a[k][k].ulead();
                if !lc.is_one() {
                    let inv = Poly::constant(lc.recip());
                    for x in a[k].iter_mut() {
                        *x = &*x * &inv;
                    }
                    for x in left.entries[k].iter_mut() {
                        *x = &*x * &inv;
                    }
                }
            }
        }
        let diag = (0..kmax).map(|k| a[k][k].clone()).collect();
        Ok(Smith { left, diag, right })
    }

    /// Determinant by fraction-free elimination (square matrices).
    pub fn determinant(&self) -> Result<Poly, ExactAlgError> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut a = self.entries.clone();
        let mut prev = Poly::one();
        let mut sign = Rat::one();
        for k in 0..n {
            let Some(p) = (k..n).find(|&i| !a[i][k].is_zero()) else {
                return Ok(Poly::zero());
            };
            if p != k {
                a.swap(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &(&a[k][k] * &a[i][j]) - &(&a[i][k] * &a[k][j]);
                    a[i][j] = num.exact_div(&prev)?;
                }
            }
            prev = a[k][k].clone();
        }
        Ok(if n == 0 { Poly::one() } else { a[n - 1][n - 1].scale(&sign) })
    }
}

/// `row_dst += c · row_src`
fn row_axpy(a: &mut [Vec<Poly>], dst: usize, src: usize, c: &Poly) {
    if c.is_zero() {
        return;
    }
    let add: Vec<Poly> = a[src].iter().map(|x| x * c).collect();
    for (x, y) in a[dst].iter_mut().zip(add) {
        *x = &*x + &y;
    }
}

/// `col_dst += c · col_src`
fn col_axpy(a: &mut [Vec<Poly>], dst: usize, src: usize, c: &Poly) {
    if c.is_zero() {
        return;
    }
    for row in a.iter_mut() {
        if !row[src].is_zero() {
            let y = &row[src] * c;
            row[dst] = &row[dst] + &y;
        }
    }
}
