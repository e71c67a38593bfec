//! The Rees algebra Ũ = ⊕ U^i t^i of the order filtration on the enveloping
//! algebra of a Lie algebroid, as a PBW rewriting system.
//!
//! Generators are ordered t < l_1 < … < l_n. Normal forms are ordered
//! monomials t^a l^α with coefficients from O on the left. Products are
//! reduced with
//!
//! * l_j · l_i → l_i · l_j + [l_j, l_i] · t   (j > i)
//! * l_i · f   → f · l_i + τ(l_i)(f) · t      (f ∈ O)
//! * t central.
//!
//! Each rule application either removes an inversion at fixed Rees degree or
//! trades an l for a t, so rewriting terminates.

mod element;
mod parse;
pub mod resolution;

use std::collections::HashMap;
use std::sync::Arc;

use algebroid::AlgebroidPresentation;
use exactalg::{binomial, Poly, Rat, RingMatrix, SparseVec};
use parking_lot::RwLock;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use element::{pbw_degree, Pbw, ReesElement};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReesError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("element is not homogeneous of degree {0}")]
    NotHomogeneous(u32),
    #[error("operation needs the base to be a field")]
    NeedsFieldBase,
}

/// A letter of a word in Ũ.
#[derive(Clone, Debug, PartialEq)]
pub enum Letter {
    T,
    /// l_k, 0-based.
    L(usize),
    F(Poly),
}

/// Ordered PBW basis of one graded piece U^i t^i.
#[derive(Debug)]
pub struct GradedPiece {
    pub degree: u32,
    pub basis: Vec<Pbw>,
    index: HashMap<Pbw, usize>,
}

impl GradedPiece {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, m: &[u32]) -> Option<usize> {
        self.index.get(m).copied()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PbwReport {
    pub pass: bool,
    pub max_degree: u32,
    pub ranks: Vec<usize>,
    pub expected_ranks: Vec<usize>,
    pub pairs_checked: usize,
    /// Products whose normal form has terms with extra powers of t.
    pub products_with_corrections: usize,
    pub first_failure: Option<String>,
}

pub struct ReesAlgebra {
    pres: AlgebroidPresentation,
    n: usize,
    gen_memo: RwLock<HashMap<(Pbw, usize), Arc<ReesElement>>>,
    pieces: RwLock<HashMap<u32, Arc<GradedPiece>>>,
    qtables: RwLock<HashMap<(u32, u32), Arc<Vec<SparseVec<Rat>>>>>,
}

impl std::fmt::Debug for ReesAlgebra {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ReesAlgebra").field("names", &self.pres.names).finish()
    }
}

impl ReesAlgebra {
    pub fn new(pres: AlgebroidPresentation) -> Self {
        let n = pres.rank();
        ReesAlgebra {
            pres,
            n,
            gen_memo: RwLock::new(HashMap::new()),
            pieces: RwLock::new(HashMap::new()),
            qtables: RwLock::new(HashMap::new()),
        }
    }

    pub fn presentation(&self) -> &AlgebroidPresentation {
        &self.pres
    }

    /// Rank n of L.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn base_is_field(&self) -> bool {
        self.pres.base.is_field()
    }

    /// Generator names in PBW order, starting with `t`.
    pub fn generator_names(&self) -> Vec<String> {
        std::iter::once("t".to_string()).chain(self.pres.names.iter().cloned()).collect()
    }

    pub fn one(&self) -> Pbw {
        vec![0; self.n + 1]
    }

    /// Generator g as a monomial: g = 0 is t, g = k ≥ 1 is l_k (1-based).
    pub fn gen_mono(&self, g: usize) -> Pbw {
        let mut m = self.one();
        m[g] = 1;
        m
    }

    pub fn gen_element(&self, g: usize) -> ReesElement {
        ReesElement::monomial(self.gen_mono(g))
    }

    pub fn memo_size(&self) -> usize {
        self.gen_memo.read().len()
    }

    /// m · g for a PBW monomial m and generator g.
    pub fn mono_times_gen(&self, m: &Pbw, g: usize) -> Arc<ReesElement> {
        let key = (m.clone(), g);
        if let Some(v) = self.gen_memo.read().get(&key) {
            return v.clone();
        }
        let v = Arc::new(self.mono_times_gen_uncached(m, g));
        self.gen_memo.write().insert(key, v.clone());
        v
    }

    fn mono_times_gen_uncached(&self, m: &Pbw, g: usize) -> ReesElement {
        let last = (1..=self.n).rev().find(|&j| m[j] > 0);
        match last {
            Some(j) if g > 0 && j > g => {
                // m = m'·l_j;  l_j l_g = l_g l_j + [l_j, l_g] t
                let mut mp = m.clone();
                mp[j] -= 1;
                let mut out = ReesElement::zero();
                let left = self.mono_times_gen(&mp, g);
                for (mm, f) in &left.terms {
                    out.add_scaled(f, &self.mono_times_gen(mm, j));
                }
                let br = self.pres.bracket_of(j - 1, g - 1);
                for (r, c) in br.iter().enumerate() {
                    if c.is_zero() {
                        continue;
                    }
                    // m'·(c l_r)·t = (m'·c)·l_r·t
                    let mc = self.mono_times_func(&mp, c);
                    for (mm, f) in &mc.terms {
                        let x = self.mono_times_gen(mm, r + 1);
                        out.add_scaled(f, &shift_t(&x, 1));
                    }
                }
                out
            }
            _ => {
                let mut r = m.clone();
                r[g] += 1;
                ReesElement::monomial(r)
            }
        }
    }

    /// m · f for f ∈ O, in left normal form.
    pub fn mono_times_func(&self, m: &Pbw, f: &Poly) -> ReesElement {
        if f.is_constant() {
            return ReesElement::term(f.clone(), m.clone());
        }
        let Some(k) = (1..=self.n).rev().find(|&j| m[j] > 0) else {
            return ReesElement::term(f.clone(), m.clone());
        };
        // m = m'·l_k;  l_k f = f l_k + τ_k(f) t
        let mut mp = m.clone();
        mp[k] -= 1;
        let mut out = ReesElement::zero();
        let a = self.mono_times_func(&mp, f);
        for (mm, h) in &a.terms {
            out.add_scaled(h, &self.mono_times_gen(mm, k));
        }
        let df = self.pres.anchor_apply(k - 1, f);
        if !df.is_zero() {
            let b = self.mono_times_func(&mp, &df);
            out = out.add(&shift_t(&b, 1));
        }
        out
    }

    /// Product of two PBW monomials.
    pub fn mul_mono(&self, a: &Pbw, b: &Pbw) -> ReesElement {
        let mut cur = ReesElement::monomial(a.clone());
        // t is central: collect its power at the end
        for g in 1..=self.n {
            for _ in 0..b[g] {
                let mut next = ReesElement::zero();
                for (m, f) in &cur.terms {
                    next.add_scaled(f, &self.mono_times_gen(m, g));
                }
                cur = next;
            }
        }
        shift_t(&cur, b[0])
    }

    pub fn mul(&self, a: &ReesElement, b: &ReesElement) -> ReesElement {
        let mut out = ReesElement::zero();
        for (m, f) in &a.terms {
            for (mb, g) in &b.terms {
                // f·m·g·mb = f·(m·g)·mb
                let mg = self.mono_times_func(m, g);
                for (mm, h) in &mg.terms {
                    let fh = f * h;
                    out.add_scaled(&fh, &self.mul_mono(mm, mb));
                }
            }
        }
        out
    }

    /// Normal form of a word in t, the l_k and elements of O.
    pub fn normal_form(&self, word: &[Letter]) -> ReesElement {
        let mut cur = ReesElement::monomial(self.one());
        for letter in word {
            let x = match letter {
                Letter::T => self.gen_element(0),
                Letter::L(k) => self.gen_element(k + 1),
                Letter::F(f) => ReesElement::term(f.clone(), self.one()),
            };
            cur = self.mul(&cur, &x);
        }
        cur
    }

    /// Rewrite Σ f·m as Σ m·g (coefficients on the right).
    pub fn right_form(&self, a: &ReesElement) -> ReesElement {
        let mut out = ReesElement::zero();
        for (m, f) in &a.terms {
            out = out.add(&self.right_form_term(f, m));
        }
        out
    }

    fn right_form_term(&self, f: &Poly, m: &Pbw) -> ReesElement {
        if f.is_constant() {
            return ReesElement::term(f.clone(), m.clone());
        }
        let Some(i) = (1..=self.n).find(|&j| m[j] > 0) else {
            return ReesElement::term(f.clone(), m.clone());
        };
        // f l_i rest = l_i (f rest) − t (τ_i(f) rest)
        let mut rest = m.clone();
        rest[i] -= 1;
        let mut out = ReesElement::zero();
        for (mm, h) in &self.right_form_term(f, &rest).terms {
            let mut p = mm.clone();
            p[i] += 1;
            out.add_term(p, h.clone());
        }
        let df = self.pres.anchor_apply(i - 1, f);
        if !df.is_zero() {
            for (mm, h) in &self.right_form_term(&df, &rest).terms {
                let mut p = mm.clone();
                p[0] += 1;
                out.add_term(p, -h);
            }
        }
        out
    }

    /// Inverse of [`right_form`](Self::right_form): Σ m·g ↦ left normal form.
    pub fn from_right_form(&self, r: &ReesElement) -> ReesElement {
        let mut out = ReesElement::zero();
        for (m, g) in &r.terms {
            out = out.add(&self.mono_times_func(m, g));
        }
        out
    }

    /// The ordered PBW basis of U^i t^i.
    pub fn graded_piece(&self, i: u32) -> Arc<GradedPiece> {
        if let Some(p) = self.pieces.read().get(&i) {
            return p.clone();
        }
        let mut basis = Vec::new();
        compositions(i, self.n + 1, &mut vec![], &mut basis);
        // descending lex on (a, α): t^i first
        basis.sort_by(|a, b| b.cmp(a));
        let index = basis.iter().enumerate().map(|(k, m)| (m.clone(), k)).collect();
        let p = Arc::new(GradedPiece { degree: i, basis, index });
        self.pieces.write().insert(i, p.clone());
        p
    }

    /// Rank of U^i over O.
    pub fn dim(&self, i: i64) -> usize {
        if i < 0 {
            0
        } else {
            self.graded_piece(i as u32).rank()
        }
    }

    /// Coefficient vector of a homogeneous element of degree i.
    pub fn coords(&self, a: &ReesElement, i: u32) -> Result<Vec<Poly>, ReesError> {
        let piece = self.graded_piece(i);
        let mut v = vec![Poly::zero(); piece.rank()];
        for (m, f) in &a.terms {
            let k = piece.index_of(m).ok_or(ReesError::NotHomogeneous(i))?;
            v[k] = f.clone();
        }
        Ok(v)
    }

    /// Sparse ℚ coordinates (base must be a field).
    pub fn qcoords(&self, a: &ReesElement, i: u32) -> Result<SparseVec<Rat>, ReesError> {
        let piece = self.graded_piece(i);
        let mut v = Vec::with_capacity(a.terms.len());
        for (m, f) in &a.terms {
            let k = piece.index_of(m).ok_or(ReesError::NotHomogeneous(i))?;
            let c = f.as_constant().ok_or(ReesError::NeedsFieldBase)?;
            v.push((k, c));
        }
        v.sort_by_key(|(k, _)| *k);
        Ok(v)
    }

    /// Products of basis monomials over a field base: entry `a·dim_j + b` holds
    /// the coordinates of basis_i[a]·basis_j[b] in U^{i+j}.
    pub fn qmul_table(&self, i: u32, j: u32) -> Result<Arc<Vec<SparseVec<Rat>>>, ReesError> {
        if !self.base_is_field() {
            return Err(ReesError::NeedsFieldBase);
        }
        if let Some(t) = self.qtables.read().get(&(i, j)) {
            return Ok(t.clone());
        }
        let (pi, pj) = (self.graded_piece(i), self.graded_piece(j));
        let mut table = Vec::with_capacity(pi.rank() * pj.rank());
        for a in &pi.basis {
            for b in &pj.basis {
                table.push(self.qcoords(&self.mul_mono(a, b), i + j)?);
            }
        }
        let t = Arc::new(table);
        self.qtables.write().insert((i, j), t.clone());
        Ok(t)
    }

    /// Matrix of U^i ⊗ U^j → U^{i+j} on PBW bases; column (p, q) ↦ p·dim_j + q.
    pub fn mult_matrix(&self, i: u32, j: u32) -> RingMatrix {
        let (pi, pj, pk) = (self.graded_piece(i), self.graded_piece(j), self.graded_piece(i + j));
        let mut m = RingMatrix::zeros(pk.rank(), pi.rank() * pj.rank());
        for (p, a) in pi.basis.iter().enumerate() {
            for (q, b) in pj.basis.iter().enumerate() {
                let prod = self.mul_mono(a, b);
                for (mm, f) in &prod.terms {
                    let r = pk.index_of(mm).expect("products are homogeneous");
                    m.entries[r][p * pj.rank() + q] = f.clone();
                }
            }
        }
        m
    }

    /// Check that Ũ/t reproduces Sym_O L: products agree with the
    /// commutative product modulo t, functions commute modulo t, and graded
    /// ranks are C(n+i, i).
    pub fn pbw_check(&self, max_degree: u32) -> PbwReport {
        let mut report = PbwReport {
            pass: true,
            max_degree,
            ranks: Vec::new(),
            expected_ranks: Vec::new(),
            pairs_checked: 0,
            products_with_corrections: 0,
            first_failure: None,
        };
        let fail = |r: &mut PbwReport, msg: String| {
            if r.first_failure.is_none() {
                r.first_failure = Some(msg);
            }
            r.pass = false;
        };
        for i in 0..=max_degree {
            let rank = self.graded_piece(i).rank();
            let expect = binomial((self.n + i as usize) as i64, i as i64) as usize;
            report.ranks.push(rank);
            report.expected_ranks.push(expect);
            if rank != expect {
                fail(&mut report, format!("rank of degree {i} is {rank}, expected {expect}"));
            }
        }
        let test_funcs: Vec<Poly> = (0..self.pres.nvars()).map(Poly::var).collect();
        for i in 0..=max_degree {
            for j in 0..=(max_degree - i) {
                let (pi, pj) = (self.graded_piece(i), self.graded_piece(j));
                for a in &pi.basis {
                    for b in &pj.basis {
                        report.pairs_checked += 1;
                        let prod = self.mul_mono(a, b);
                        if prod.degree().is_some_and(|d| d != i + j) || !prod.is_homogeneous() {
                            fail(&mut report, format!("{a:?}·{b:?} is not homogeneous"));
                            continue;
                        }
                        let sum: Pbw = a.iter().zip(b).map(|(x, y)| x + y).collect();
                        let lead = prod.coeff(&sum);
                        let extra = prod.terms.keys().filter(|m| **m != sum).collect::<Vec<_>>();
                        if !lead.is_one() || extra.iter().any(|m| m[0] <= sum[0]) {
                            fail(&mut report, format!("{a:?}·{b:?} differs from the symmetric product mod t"));
                        }
                        if !extra.is_empty() {
                            report.products_with_corrections += 1;
                        }
                    }
                }
            }
            for a in &self.graded_piece(i).basis {
                for f in &test_funcs {
                    let prod = self.mono_times_func(a, f);
                    let modt: Vec<_> = prod.terms.iter().filter(|(m, _)| m[0] == a[0]).collect();
                    if modt.len() != 1 || modt[0].0 != a || modt[0].1 != f {
                        fail(&mut report, format!("{a:?}·{f} does not commute mod t"));
                    }
                }
            }
        }
        report
    }

    /// Parse an expression in t, the generator names and the base variables;
    /// juxtaposition and `*` are the (noncommutative) product of Ũ.
    pub fn parse(&self, src: &str) -> Result<ReesElement, ReesError> {
        parse::parse(self, src)
    }

    /// Homogenize an element of U (given without t) to Rees degree `d`:
    /// each term m is multiplied by t^{d − deg m}.
    pub fn homogenize(&self, u: &ReesElement, d: u32) -> Result<ReesElement, ReesError> {
        let mut out = ReesElement::zero();
        for (m, f) in &u.terms {
            let deg = pbw_degree(m);
            if deg > d {
                return Err(ReesError::NotHomogeneous(d));
            }
            let mut mm = m.clone();
            mm[0] += d - deg;
            out.add_term(mm, f.clone());
        }
        Ok(out)
    }

    /// Largest total degree of a t-free rewrite of `u` (its filtration degree).
    pub fn filtration_degree(&self, u: &ReesElement) -> u32 {
        u.terms.keys().map(|m| pbw_degree(&m[1..])).max().unwrap_or(0)
    }

    pub fn display(&self, a: &ReesElement) -> String {
        if a.is_zero() {
            return "0".into();
        }
        let names = self.generator_names();
        let parts: Vec<String> = a
            .terms
            .iter()
            .rev()
            .map(|(m, f)| {
                let mut factors = Vec::new();
                for (g, &e) in m.iter().enumerate() {
                    match e {
                        0 => {}
                        1 => factors.push(names[g].clone()),
                        _ => factors.push(format!("{}^{}", names[g], e)),
                    }
                }
                let coeff = self.pres.base.display(f);
                if factors.is_empty() {
                    coeff
                } else if f.is_one() {
                    factors.join("*")
                } else {
                    format!("({coeff})*{}", factors.join("*"))
                }
            })
            .collect();
        parts.join(" + ")
    }
}

/// Multiply every monomial by t^k.
pub fn shift_t(a: &ReesElement, k: u32) -> ReesElement {
    if k == 0 {
        return a.clone();
    }
    ReesElement {
        terms: a
            .terms
            .iter()
            .map(|(m, f)| {
                let mut mm = m.clone();
                mm[0] += k;
                (mm, f.clone())
            })
            .collect(),
    }
}

fn compositions(total: u32, parts: usize, prefix: &mut Vec<u32>, out: &mut Vec<Pbw>) {
    if parts == 1 {
        prefix.push(total);
        out.push(prefix.clone());
        prefix.pop();
        return;
    }
    for k in 0..=total {
        prefix.push(k);
        compositions(total - k, parts - 1, prefix, out);
        prefix.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use algebroid::{abelian, sl2, weyl};

    #[test]
    fn sl2_straightening() {
        let u = ReesAlgebra::new(sl2());
        // f·e = e·f − h·t
        let fe = u.normal_form(&[Letter::L(1), Letter::L(0)]);
        assert_eq!(fe, u.parse("e*f - h*t").unwrap());
    }

    #[test]
    fn weyl_commutation() {
        let u = ReesAlgebra::new(weyl(1));
        let x = Poly::var(0);
        let lx = u.normal_form(&[Letter::L(0), Letter::F(x.clone())]);
        let mut expect = ReesElement::term(x, vec![0, 1]);
        expect.add_term(vec![1, 0], Poly::one());
        assert_eq!(lx, expect);
    }

    #[test]
    fn graded_piece_ranks() {
        assert_eq!(ReesAlgebra::new(sl2()).graded_piece(2).rank(), 10);
        assert_eq!(ReesAlgebra::new(weyl(1)).graded_piece(0).rank(), 1);
        assert_eq!(ReesAlgebra::new(abelian(1)).graded_piece(5).rank(), 6);
    }

    #[test]
    fn right_form_roundtrip_weyl() {
        let u = ReesAlgebra::new(weyl(1));
        let a = u.parse("x^2*dx^2 + 3*x*dx*t - t^2").unwrap();
        let r = u.right_form(&a);
        assert_eq!(u.from_right_form(&r), a);
        // x·∂ = ∂·x − t
        let xd = u.parse("x*dx").unwrap();
        let mut expect = ReesElement::term(Poly::var(0), vec![0, 1]);
        expect.add_term(vec![1, 0], Poly::from_int(-1));
        assert_eq!(u.right_form(&xd), expect);
    }
}
