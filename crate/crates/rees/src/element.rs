//! Elements of the Rees algebra in PBW normal form with left coefficients.

use std::collections::BTreeMap;

use exactalg::{Poly, Rat};

/// PBW monomial t^a l_1^{α_1} ⋯ l_n^{α_n}, stored as `[a, α_1, …, α_n]`.
pub type Pbw = Vec<u32>;

pub fn pbw_degree(m: &[u32]) -> u32 {
    m.iter().sum()
}

/// Σ f_m · m with f_m ∈ O on the left; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ReesElement {
    pub terms: BTreeMap<Pbw, Poly>,
}

impl ReesElement {
    pub fn zero() -> Self {
        ReesElement { terms: BTreeMap::new() }
    }

    pub fn monomial(m: Pbw) -> Self {
        ReesElement::term(Poly::one(), m)
    }

    pub fn term(f: Poly, m: Pbw) -> Self {
        let mut e = ReesElement::zero();
        e.add_term(m, f);
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, m: Pbw, f: Poly) {
        if f.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(f);
            }
            Entry::Occupied(mut o) => {
                let s = o.get() + &f;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    /// `self += f · other` (f multiplies each left coefficient).
    pub fn add_scaled(&mut self, f: &Poly, other: &ReesElement) {
        if f.is_zero() {
            return;
        }
        for (m, g) in &other.terms {
            self.add_term(m.clone(), f * g);
        }
    }

    pub fn add(&self, other: &ReesElement) -> ReesElement {
        let mut out = self.clone();
        out.add_scaled(&Poly::one(), other);
        out
    }

    pub fn sub(&self, other: &ReesElement) -> ReesElement {
        let mut out = self.clone();
        out.add_scaled(&Poly::from_int(-1), other);
        out
    }

    /// Left multiplication by an element of O.
    pub fn scale_left(&self, f: &Poly) -> ReesElement {
        let mut out = ReesElement::zero();
        out.add_scaled(f, self);
        out
    }

    pub fn scale(&self, c: &Rat) -> ReesElement {
        self.scale_left(&Poly::constant(c.clone()))
    }

    /// Common Rees degree, if homogeneous (zero counts as homogeneous of any degree).
    pub fn degree(&self) -> Option<u32> {
        let mut it = self.terms.keys().map(|m| pbw_degree(m));
        let d = it.next()?;
        if it.all(|e| e == d) {
            Some(d)
        } else {
            None
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.terms.keys().map(|m| pbw_degree(m));
        match it.next() {
            None => true,
            Some(d) => it.all(|e| e == d),
        }
    }

    /// Drop every term containing t (reduction modulo t).
    pub fn mod_t(&self) -> ReesElement {
        ReesElement { terms: self.terms.iter().filter(|(m, _)| m[0] == 0).map(|(m, f)| (m.clone(), f.clone())).collect() }
    }

    /// Substitute t = 1, returning coefficients on the ordered monomials l^α.
    pub fn dehomogenize(&self) -> BTreeMap<Vec<u32>, Poly> {
        let mut out: BTreeMap<Vec<u32>, Poly> = BTreeMap::new();
        for (m, f) in &self.terms {
            let key = m[1..].to_vec();
            let e = out.entry(key).or_insert_with(Poly::zero);
            *e = &*e + f;
        }
        out.retain(|_, f| !f.is_zero());
        out
    }

    pub fn coeff(&self, m: &[u32]) -> Poly {
        self.terms.get(m).cloned().unwrap_or_else(Poly::zero)
    }
}
