//! The quadratic dual Ũ^⊥ of the Rees algebra, realized on the basis
//! σ_S·e^ε (S ⊆ {1..n} increasing, ε ∈ {0, 1}) with coefficients from O on the
//! left.
//!
//! Multiplication rules:
//!
//! * σ_a σ_b = −σ_b σ_a, e² = 0
//! * f σ = σ f for f ∈ O
//! * e f = f e − Σ_k τ(l_k)(f) σ_k
//! * e σ_k = −σ_k e + μ(σ_k), with μ the L-exterior derivative in wedge form.

mod ext;
mod frobenius;
mod jets;
mod relations;

use std::collections::BTreeMap;

use algebroid::AlgebroidPresentation;
use exactalg::{binomial, Poly, Rat};
use num_traits::Zero;
use rees::ReesError;
use thiserror::Error;

pub use ext::{ext_algebra_check, ExtReport, Orientation};
pub use frobenius::{frobenius_pairing, FrobeniusPairing};
pub use jets::JetBimodule;
pub use relations::{
    evaluate_on_r, l_exterior_derivative, lemma_relations, r_spanning_set, verify_dual_relations, verify_relations,
    DualRelation, RelationReport, Tensor2, USquared,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DualError {
    #[error("theorem violation: {0}")]
    TheoremViolation(String),
    #[error("operation needs a point base")]
    NeedsPointBase,
    #[error("degree {0} out of range")]
    OutOfRange(i64),
    #[error(transparent)]
    Rees(#[from] ReesError),
}

/// Basis monomial σ_S·e^ε: bit k of `mask` is σ_{k+1}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DualMono {
    pub mask: u32,
    pub e: bool,
}

impl DualMono {
    pub const ONE: DualMono = DualMono { mask: 0, e: false };

    pub fn degree(&self) -> u32 {
        self.mask.count_ones() + self.e as u32
    }

    pub fn sigmas(&self) -> Vec<usize> {
        (0..32).filter(|k| self.mask >> k & 1 == 1).collect()
    }
}

/// Σ f_m · m with left coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DualElement {
    pub terms: BTreeMap<DualMono, Poly>,
}

impl DualElement {
    pub fn zero() -> Self {
        DualElement::default()
    }

    pub fn term(f: Poly, m: DualMono) -> Self {
        let mut d = DualElement::zero();
        d.add_term(m, f);
        d
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: DualMono, f: Poly) {
        if f.is_zero() {
            return;
        }
        let e = self.terms.entry(m).or_insert_with(Poly::zero);
        *e = &*e + &f;
        if e.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn add_scaled(&mut self, f: &Poly, other: &DualElement) {
        for (m, g) in &other.terms {
            self.add_term(*m, f * g);
        }
    }

    pub fn add(&self, other: &DualElement) -> DualElement {
        let mut out = self.clone();
        out.add_scaled(&Poly::one(), other);
        out
    }

    pub fn scale(&self, c: &Rat) -> DualElement {
        let mut out = DualElement::zero();
        out.add_scaled(&Poly::constant(c.clone()), self);
        out
    }
}

/// σ_S σ_T as ±σ_{S∪T}, or `None` when S and T meet.
pub fn wedge(s: u32, t: u32) -> Option<(u32, bool)> {
    if s & t != 0 {
        return None;
    }
    // sign: number of pairs (a ∈ S, b ∈ T) with a > b
    let mut inversions = 0;
    let mut tt = t;
    while tt != 0 {
        let b = tt.trailing_zeros();
        inversions += (s >> (b + 1)).count_ones();
        tt &= tt - 1;
    }
    Some((s | t, inversions % 2 == 1))
}

#[derive(Clone, Debug)]
pub struct QuadraticDual {
    pres: AlgebroidPresentation,
    n: usize,
    /// μ(σ_k) in wedge form: pairs (mask of σ_cσ_d with c < d, coefficient).
    mu: Vec<Vec<(u32, Poly)>>,
    bases: Vec<Vec<DualMono>>,
}

impl QuadraticDual {
    /// Build Ũ^⊥ for the algebroid underlying `alg`.
    pub fn build(pres: &AlgebroidPresentation) -> Self {
        let n = pres.rank();
        assert!(n < 31, "rank too large for the bitmask basis");
        let mut mu = Vec::with_capacity(n);
        for k in 0..n {
            let sigma: Vec<Poly> = (0..n).map(|j| if j == k { Poly::one() } else { Poly::zero() }).collect();
            let m = l_exterior_derivative(pres, &sigma);
            let mut terms = Vec::new();
            for c in 0..n {
                for d in c + 1..n {
                    // wedge coefficient of σ_cσ_d under the nested pairing
                    let coeff = &m[d][c] - &m[c][d];
                    if !coeff.is_zero() {
                        terms.push(((1u32 << c) | (1u32 << d), coeff));
                    }
                }
            }
            mu.push(terms);
        }
        let mut bases = vec![Vec::new(); n + 2];
        for mask in 0u32..(1 << n) {
            for e in [false, true] {
                let m = DualMono { mask, e };
                bases[m.degree() as usize].push(m);
            }
        }
        for b in &mut bases {
            // σ_S before σ_S e; within each, increasing index sets in lex order
            b.sort_by_key(|m| (m.e, m.sigmas()));
        }
        QuadraticDual { pres: pres.clone(), n, mu, bases }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn presentation(&self) -> &AlgebroidPresentation {
        &self.pres
    }

    /// Wedge form of μ(σ_k).
    pub fn mu(&self, k: usize) -> DualElement {
        let mut out = DualElement::zero();
        for (mask, c) in &self.mu[k] {
            out.add_term(DualMono { mask: *mask, e: false }, c.clone());
        }
        out
    }

    pub fn basis(&self, i: i64) -> &[DualMono] {
        if i < 0 || i as usize >= self.bases.len() {
            &[]
        } else {
            &self.bases[i as usize]
        }
    }

    /// Rank of Ũ^⊥i over O.
    pub fn rank(&self, i: i64) -> usize {
        self.basis(i).len()
    }

    /// C(n, i) + C(n, i−1).
    pub fn expected_rank(&self, i: i64) -> usize {
        let n = self.n as i64;
        (binomial(n, i) + binomial(n, i - 1)) as usize
    }

    pub fn index_of(&self, m: &DualMono) -> Option<usize> {
        self.basis(m.degree() as i64).iter().position(|x| x == m)
    }

    pub fn one(&self) -> DualElement {
        DualElement::term(Poly::one(), DualMono::ONE)
    }

    pub fn e(&self) -> DualElement {
        DualElement::term(Poly::one(), DualMono { mask: 0, e: true })
    }

    /// σ_k, 0-based.
    pub fn sigma(&self, k: usize) -> DualElement {
        DualElement::term(Poly::one(), DualMono { mask: 1 << k, e: false })
    }

    /// Degree-one generator g: g = 0 is e, g = k ≥ 1 is σ_k (1-based), dual to
    /// the basis t, l_1, …, l_n of U¹.
    pub fn generator(&self, g: usize) -> DualElement {
        if g == 0 {
            self.e()
        } else {
            self.sigma(g - 1)
        }
    }

    /// m · f for a basis monomial and f ∈ O, in left form.
    pub fn mono_times_func(&self, m: &DualMono, f: &Poly) -> DualElement {
        let mut out = DualElement::term(f.clone(), *m);
        if m.e {
            // σ_S e f = f σ_S e − Σ_k τ_k(f) σ_S σ_k
            for k in 0..self.n {
                let df = self.pres.anchor_apply(k, f);
                if df.is_zero() {
                    continue;
                }
                if let Some((mask, neg)) = wedge(m.mask, 1 << k) {
                    let c = if neg { df } else { -&df };
                    out.add_term(DualMono { mask, e: false }, c);
                }
            }
        }
        out
    }

    /// e · σ_T as a left-form element.
    fn e_times_sigmas(&self, t: u32) -> DualElement {
        let ts: Vec<usize> = (0..self.n).filter(|k| t >> k & 1 == 1).collect();
        let mut out = DualElement::zero();
        let sign = if ts.len() % 2 == 1 { -Poly::one() } else { Poly::one() };
        out.add_term(DualMono { mask: t, e: true }, sign);
        // Σ_j (−1)^j σ_{t_0..t_{j−1}} μ(σ_{t_j}) σ_{t_{j+1}..}
        for (j, &tj) in ts.iter().enumerate() {
            let before: u32 = ts[..j].iter().map(|k| 1u32 << k).sum();
            let after: u32 = ts[j + 1..].iter().map(|k| 1u32 << k).sum();
            for (mm, c) in &self.mu[tj] {
                // μ has even degree, so it commutes past σ_before
                let Some((m1, s1)) = wedge(before, *mm) else { continue };
                let Some((m2, s2)) = wedge(m1, after) else { continue };
                let neg = (j % 2 == 1) ^ s1 ^ s2;
                out.add_term(DualMono { mask: m2, e: false }, if neg { -c } else { c.clone() });
            }
        }
        out
    }

    /// Product of basis monomials.
    pub fn mul_mono(&self, a: &DualMono, b: &DualMono) -> DualElement {
        let mut out = DualElement::zero();
        if !a.e {
            if let Some((mask, neg)) = wedge(a.mask, b.mask) {
                let c = if neg { -Poly::one() } else { Poly::one() };
                out.add_term(DualMono { mask, e: b.e }, c);
            }
            return out;
        }
        for (m, c) in &self.e_times_sigmas(b.mask).terms {
            if m.e && b.e {
                continue;
            }
            if let Some((mask, neg)) = wedge(a.mask, m.mask) {
                let c = if neg { -c } else { c.clone() };
                out.add_term(DualMono { mask, e: m.e || b.e }, c);
            }
        }
        out
    }

    pub fn mul(&self, a: &DualElement, b: &DualElement) -> DualElement {
        let mut out = DualElement::zero();
        for (ma, f) in &a.terms {
            for (mb, g) in &b.terms {
                for (m, h) in &self.mono_times_func(ma, g).terms {
                    let fh = f * h;
                    out.add_scaled(&fh, &self.mul_mono(m, mb));
                }
            }
        }
        out
    }

    /// Left multiplication by f ∈ O.
    pub fn func_times(&self, f: &Poly, a: &DualElement) -> DualElement {
        let mut out = DualElement::zero();
        out.add_scaled(f, a);
        out
    }

    /// Rewrite with coefficients on the right: f σ_S e = σ_S e f + Σ_k σ_S σ_k τ_k(f).
    /// The result maps each monomial to its right coefficient.
    pub fn right_form(&self, a: &DualElement) -> DualElement {
        let mut out = DualElement::zero();
        for (m, f) in &a.terms {
            out.add_term(*m, f.clone());
            if m.e {
                for k in 0..self.n {
                    let df = self.pres.anchor_apply(k, f);
                    if df.is_zero() {
                        continue;
                    }
                    if let Some((mask, neg)) = wedge(m.mask, 1 << k) {
                        out.add_term(DualMono { mask, e: false }, if neg { -&df } else { df });
                    }
                }
            }
        }
        out
    }

    /// Inverse of [`right_form`](Self::right_form).
    pub fn from_right_form(&self, r: &DualElement) -> DualElement {
        let mut out = DualElement::zero();
        for (m, g) in &r.terms {
            out = out.add(&self.mono_times_func(m, g));
        }
        out
    }

    /// Coordinates in the basis of degree i (left coefficients).
    pub fn coords(&self, a: &DualElement, i: i64) -> Result<Vec<Poly>, DualError> {
        let mut v = vec![Poly::zero(); self.rank(i)];
        for (m, f) in &a.terms {
            if m.degree() as i64 != i {
                return Err(DualError::OutOfRange(m.degree() as i64));
            }
            v[self.index_of(m).expect("basis monomial")] = f.clone();
        }
        Ok(v)
    }

    /// Element from coordinates in degree i.
    pub fn from_coords(&self, v: &[Poly], i: i64) -> DualElement {
        let mut out = DualElement::zero();
        for (m, f) in self.basis(i).iter().zip(v) {
            out.add_term(*m, f.clone());
        }
        out
    }

    /// Structure constants c with basis_i[a]·basis_j[b] = Σ_c c·basis_{i+j}[c].
    pub fn product_table(&self, i: i64, j: i64) -> Vec<Vec<Vec<Poly>>> {
        self.basis(i)
            .iter()
            .map(|a| self.basis(j).iter().map(|b| self.coords(&self.mul_mono(a, b), i + j).unwrap()).collect())
            .collect()
    }

    /// Exhaustive associativity over basis triples of total degree ≤ `max_degree`,
    /// also multiplying by the base variables in the middle slot.
    pub fn associativity_failures(&self, max_degree: i64) -> Vec<(DualMono, DualMono, DualMono)> {
        let all: Vec<DualMono> = (0..=self.n as i64 + 1).flat_map(|i| self.basis(i).to_vec()).collect();
        let mut bad = Vec::new();
        for a in &all {
            for b in &all {
                for c in &all {
                    if (a.degree() + b.degree() + c.degree()) as i64 > max_degree {
                        continue;
                    }
                    let (ea, eb, ec) = (
                        DualElement::term(Poly::one(), *a),
                        DualElement::term(Poly::one(), *b),
                        DualElement::term(Poly::one(), *c),
                    );
                    if self.mul(&self.mul(&ea, &eb), &ec) != self.mul(&ea, &self.mul(&eb, &ec)) {
                        bad.push((*a, *b, *c));
                    }
                    for v in 0..self.pres.nvars() {
                        let x = DualElement::term(Poly::var(v), DualMono::ONE);
                        let l = self.mul(&self.mul(&ea, &x), &eb);
                        let r = self.mul(&ea, &self.mul(&x, &eb));
                        if l != r {
                            bad.push((*a, DualMono::ONE, *b));
                        }
                    }
                }
            }
        }
        bad
    }

    /// Closure of Λ•L* under multiplication and the bimodule quotient map
    /// σ_S e ↦ σ_S onto Λ•L*(−1): returns true when both hold on basis pairs
    /// and function multiples.
    pub fn structure_sequence_holds(&self) -> bool {
        let all: Vec<DualMono> = (0..=self.n as i64 + 1).flat_map(|i| self.basis(i).to_vec()).collect();
        let sub: Vec<&DualMono> = all.iter().filter(|m| !m.e).collect();
        for a in &sub {
            for b in &sub {
                if self.mul_mono(a, b).terms.keys().any(|m| m.e) {
                    return false;
                }
            }
        }
        // quotient by Λ•L*: x ↦ (e-part). It must intertwine left and right
        // multiplication by functions and by σ's (up to the Koszul sign).
        let quot = |x: &DualElement| -> BTreeMap<u32, Poly> {
            x.terms.iter().filter(|(m, _)| m.e).map(|(m, f)| (m.mask, f.clone())).collect()
        };
        let mut funcs = vec![Poly::one()];
        funcs.extend((0..self.pres.nvars()).map(Poly::var));
        for m in all.iter().filter(|m| m.e) {
            let x = DualElement::term(Poly::one(), *m);
            for f in &funcs {
                let fx = DualElement::term(f.clone(), DualMono::ONE);
                // (x f) has e-part f σ_S
                let q = quot(&self.mul(&x, &fx));
                if q != BTreeMap::from([(m.mask, f.clone())]) {
                    return false;
                }
            }
            for k in 0..self.n {
                let s = self.sigma(k);
                let q = quot(&self.mul(&s, &x));
                let expect: BTreeMap<u32, Poly> = wedge(1 << k, m.mask)
                    .map(|(mask, neg)| (mask, if neg { -Poly::one() } else { Poly::one() }))
                    .into_iter()
                    .collect();
                if q != expect {
                    return false;
                }
            }
        }
        true
    }

    /// ω_L trivialized by σ_{1..n}·e, the single basis vector of degree n+1.
    pub fn omega(&self) -> DualMono {
        DualMono { mask: (1u32 << self.n) - 1, e: true }
    }

    pub fn display(&self, a: &DualElement) -> String {
        if a.is_zero() {
            return "0".into();
        }
        let parts: Vec<String> = a
            .terms
            .iter()
            .map(|(m, f)| {
                let mut factors: Vec<String> = m.sigmas().iter().map(|k| format!("{}*", self.pres.names[*k])).collect();
                if m.e {
                    factors.push("e".into());
                }
                let mono = if factors.is_empty() { "1".into() } else { factors.join("·") };
                if f.is_one() {
                    mono
                } else {
                    format!("({})·{}", self.pres.base.display(f), mono)
                }
            })
            .collect();
        parts.join(" + ")
    }
}

pub(crate) fn is_unit_constant(p: &Poly) -> bool {
    p.as_constant().is_some_and(|c| !c.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;
    use algebroid::{abelian, sl2, weyl};

    use num_traits::One;

    fn one_rat() -> Rat {
        Rat::one()
    }

    #[test]
    fn wedge_signs() {
        assert_eq!(wedge(0b01, 0b10), Some((0b11, false)));
        assert_eq!(wedge(0b10, 0b01), Some((0b11, true)));
        assert_eq!(wedge(0b101, 0b010), Some((0b111, true)));
        assert_eq!(wedge(0b1, 0b1), None);
    }

    #[test]
    fn ranks_match_structure_theorem() {
        for p in [abelian(1), abelian(2), weyl(1), sl2()] {
            let d = QuadraticDual::build(&p);
            for i in -1..=(p.rank() as i64 + 2) {
                assert_eq!(d.rank(i), d.expected_rank(i), "degree {i}");
            }
            assert_eq!(d.rank(p.rank() as i64 + 1), 1);
        }
    }

    #[test]
    fn weyl_relations() {
        let d = QuadraticDual::build(&weyl(1));
        let (s, e) = (d.sigma(0), d.e());
        let x = DualElement::term(Poly::var(0), DualMono::ONE);
        assert!(d.mul(&s, &s).is_zero());
        assert!(d.mul(&e, &e).is_zero());
        assert_eq!(d.mul(&s, &e), d.mul(&e, &s).scale(&-one_rat()));
        // x e − e x = σ
        let lhs = d.mul(&x, &e).add(&d.mul(&e, &x).scale(&-one_rat()));
        assert_eq!(lhs, s);
    }

    #[test]
    fn sl2_e_sigma_relation_has_mu_term() {
        let d = QuadraticDual::build(&sl2());
        // μ(h*) = c^h_{ef} σ_e σ_f = σ_e σ_f
        let mu_h = d.mu(2);
        assert_eq!(mu_h, DualElement::term(Poly::one(), DualMono { mask: 0b011, e: false }));
        let lhs = d.mul(&d.e(), &d.sigma(2)).add(&d.mul(&d.sigma(2), &d.e()));
        assert_eq!(lhs, mu_h);
    }

    #[test]
    fn associativity_and_structure_sequence() {
        for p in [abelian(2), weyl(1), sl2()] {
            let d = QuadraticDual::build(&p);
            assert!(d.associativity_failures(p.rank() as i64 + 1).is_empty());
            assert!(d.structure_sequence_holds());
        }
    }
}
