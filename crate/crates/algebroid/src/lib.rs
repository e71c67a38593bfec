//! Lie algebroid presentations: a free O-module L = ⊕ O·l_i over a polynomial
//! base ring O, with structure functions for the bracket and coefficients for
//! the anchor map L → Der(O).

use exactalg::{int, BaseRing, Poly, Rat};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebroidError {
    #[error("presentation fails validation: {0}")]
    Invalid(String),
    #[error("malformed presentation: {0}")]
    Malformed(String),
    #[error(transparent)]
    Arith(#[from] exactalg::ExactAlgError),
}

/// Anchor coefficients: `AnchorMap[i][m]` is the coefficient of ∂/∂x_m in τ(l_i).
pub type AnchorMap = Vec<Vec<Poly>>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AlgebroidPresentation {
    pub base: BaseRing,
    pub names: Vec<String>,
    /// `bracket[i][j][k]` = c^k_{ij}, with [l_i, l_j] = Σ_k c^k_{ij} l_k.
    pub bracket: Vec<Vec<Vec<Poly>>>,
    pub anchor: AnchorMap,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Axiom {
    Antisymmetry,
    AnchorCompatibility,
    Jacobi,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomResult {
    pub axiom: Axiom,
    pub pass: bool,
    /// Offending generator names, e.g. `["e", "f", "h"]`.
    pub counterexample: Option<Vec<String>>,
    /// Nonzero residual, printed in the generators and base variables.
    pub residual: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub results: Vec<AxiomResult>,
}

impl ValidationReport {
    pub fn pass(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }

    pub fn get(&self, axiom: Axiom) -> &AxiomResult {
        self.results.iter().find(|r| r.axiom == axiom).expect("all axioms reported")
    }
}

impl AlgebroidPresentation {
    pub fn new(
        base: BaseRing,
        names: Vec<String>,
        bracket: Vec<Vec<Vec<Poly>>>,
        anchor: AnchorMap,
    ) -> Result<Self, AlgebroidError> {
        let n = names.len();
        if n == 0 {
            return Err(AlgebroidError::Malformed("rank must be positive".into()));
        }
        let shape_ok = bracket.len() == n
            && bracket.iter().all(|r| r.len() == n && r.iter().all(|c| c.len() == n))
            && anchor.len() == n
            && anchor.iter().all(|a| a.len() == base.nvars());
        if !shape_ok {
            return Err(AlgebroidError::Malformed("bracket or anchor has the wrong shape".into()));
        }
        let all_in_base = bracket.iter().flatten().flatten().chain(anchor.iter().flatten()).all(|p| base.contains(p));
        if !all_in_base {
            return Err(AlgebroidError::Malformed("coefficient uses an undeclared variable".into()));
        }
        Ok(AlgebroidPresentation { base, names, bracket, anchor })
    }

    pub fn rank(&self) -> usize {
        self.names.len()
    }

    pub fn nvars(&self) -> usize {
        self.base.nvars()
    }

    /// Bracket of two generators as a coefficient vector.
    pub fn bracket_of(&self, i: usize, j: usize) -> &[Poly] {
        &self.bracket[i][j]
    }

    /// d_{τ(l_i)}(f).
    pub fn anchor_apply(&self, i: usize, f: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for (m, a) in self.anchor[i].iter().enumerate() {
            if !a.is_zero() {
                acc = &acc + &(a * &self.base.derivation(m, f));
            }
        }
        acc
    }

    /// Whether the anchor vanishes identically.
    pub fn anchor_is_zero(&self) -> bool {
        self.anchor.iter().flatten().all(|p| p.is_zero())
    }

    /// [a, b] for a, b ∈ L given as coefficient vectors.
    pub fn bracket_elements(&self, a: &[Poly], b: &[Poly]) -> Vec<Poly> {
        let n = self.rank();
        let mut out = vec![Poly::zero(); n];
        for i in 0..n {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if b[j].is_zero() {
                    continue;
                }
                // [f l_i, g l_j] = fg[l_i,l_j] + f τ_i(g) l_j − g τ_j(f) l_i
                let fg = &a[i] * &b[j];
                for k in 0..n {
                    let c = &self.bracket[i][j][k];
                    if !c.is_zero() {
                        out[k] = &out[k] + &(&fg * c);
                    }
                }
                out[j] = &out[j] + &(&a[i] * &self.anchor_apply(i, &b[j]));
                out[i] = &out[i] - &(&b[j] * &self.anchor_apply(j, &a[i]));
            }
        }
        out
    }

    fn unit_vec(&self, i: usize) -> Vec<Poly> {
        let mut v = vec![Poly::zero(); self.rank()];
        v[i] = Poly::one();
        v
    }

    fn show_vec(&self, v: &[Poly]) -> String {
        let parts: Vec<String> = v
            .iter()
            .zip(&self.names)
            .filter(|(c, _)| !c.is_zero())
            .map(|(c, name)| format!("({})*{}", self.base.display(c), name))
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    fn names_of(&self, idx: &[usize]) -> Vec<String> {
        idx.iter().map(|&i| self.names[i].clone()).collect()
    }

    /// Check antisymmetry, anchor compatibility and the Jacobi identity as
    /// exact polynomial identities.
    ///
    /// Anchor compatibility is the condition τ([l_i,l_j]) = [τ(l_i), τ(l_j)],
    /// tested on all monomials of degree ≤ 2 in the base variables; it is what
    /// the Leibniz rule [l_i, f l_j] = f[l_i,l_j] + τ(l_i)(f) l_j requires of the
    /// structure functions for the Jacobi identity to hold on f·l_k.
    pub fn validate(&self) -> ValidationReport {
        let n = self.rank();
        let mut results = Vec::new();

        let mut anti = AxiomResult { axiom: Axiom::Antisymmetry, pass: true, counterexample: None, residual: None };
        'anti: for i in 0..n {
            for j in i..n {
                for k in 0..n {
                    let s = &self.bracket[i][j][k] + &self.bracket[j][i][k];
                    if !s.is_zero() {
                        anti.pass = false;
                        anti.counterexample = Some(self.names_of(&[i, j, k]));
                        anti.residual = Some(self.base.display(&s));
                        break 'anti;
                    }
                }
            }
        }
        results.push(anti);

        let mut comp = AxiomResult { axiom: Axiom::AnchorCompatibility, pass: true, counterexample: None, residual: None };
        let tests = test_monomials(self.nvars());
        'comp: for i in 0..n {
            for j in 0..n {
                for f in &tests {
                    let lhs: Poly = self.bracket[i][j]
                        .iter()
                        .enumerate()
                        .fold(Poly::zero(), |acc, (k, c)| &acc + &(c * &self.anchor_apply(k, f)));
                    let rhs = &self.anchor_apply(i, &self.anchor_apply(j, f)) - &self.anchor_apply(j, &self.anchor_apply(i, f));
                    let r = &lhs - &rhs;
                    if !r.is_zero() {
                        comp.pass = false;
                        comp.counterexample = Some(self.names_of(&[i, j]));
                        comp.residual = Some(format!("on {}: {}", self.base.display(f), self.base.display(&r)));
                        break 'comp;
                    }
                }
            }
        }
        results.push(comp);

        let mut jac = AxiomResult { axiom: Axiom::Jacobi, pass: true, counterexample: None, residual: None };
        'jac: for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    let r = self.jacobiator(i, j, k);
                    if r.iter().any(|p| !p.is_zero()) {
                        jac.pass = false;
                        jac.counterexample = Some(self.names_of(&[i, j, k]));
                        jac.residual = Some(self.show_vec(&r));
                        break 'jac;
                    }
                }
            }
        }
        results.push(jac);
        ValidationReport { results }
    }

    /// [[l_i,l_j],l_k] + [[l_j,l_k],l_i] + [[l_k,l_i],l_j], computed with the
    /// table exactly as given (no antisymmetrization).
    pub fn jacobiator(&self, i: usize, j: usize, k: usize) -> Vec<Poly> {
        let mut out = vec![Poly::zero(); self.rank()];
        for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
            let inner = self.bracket[a][b].clone();
            let t = self.bracket_elements(&inner, &self.unit_vec(c));
            for (o, x) in out.iter_mut().zip(t) {
                *o = &*o + &x;
            }
        }
        out
    }

    /// Bracket and anchor scaled by ħ.
    pub fn scaled(&self, hbar: &Rat) -> Self {
        let s = |p: &Poly| p.scale(hbar);
        AlgebroidPresentation {
            base: self.base.clone(),
            names: self.names.clone(),
            bracket: self.bracket.iter().map(|r| r.iter().map(|c| c.iter().map(s).collect()).collect()).collect(),
            anchor: self.anchor.iter().map(|a| a.iter().map(s).collect()).collect(),
        }
    }

    /// Integer weights for the generators l_i, with every base variable of
    /// weight 1, making all structure functions and anchor coefficients
    /// homogeneous. `None` if no such grading is found.
    pub fn weight_grading(&self) -> Option<Vec<i64>> {
        let n = self.rank();
        let mut w = vec![0i64; n];
        for i in 0..n {
            if let Some((m, _)) = self.anchor[i].iter().flat_map(|a| a.terms()).next() {
                w[i] = m.degree() as i64 - 1;
            }
        }
        for i in 0..n {
            for a in &self.anchor[i] {
                if a.terms().any(|(m, _)| m.degree() as i64 - 1 != w[i]) {
                    return None;
                }
            }
            for j in 0..n {
                for k in 0..n {
                    if self.bracket[i][j][k].terms().any(|(m, _)| m.degree() as i64 + w[k] != w[i] + w[j]) {
                        return None;
                    }
                }
            }
        }
        Some(w)
    }

    /// Deterministic text form used for content hashing.
    pub fn canonical_string(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("vars={:?};names={:?};", self.base.variables(), self.names));
        for i in 0..self.rank() {
            for j in 0..self.rank() {
                for k in 0..self.rank() {
                    let c = &self.bracket[i][j][k];
                    if !c.is_zero() {
                        s.push_str(&format!("c[{i},{j}->{k}]={};", self.base.display(c)));
                    }
                }
            }
            for (m, a) in self.anchor[i].iter().enumerate() {
                if !a.is_zero() {
                    s.push_str(&format!("a[{i},{m}]={};", self.base.display(a)));
                }
            }
        }
        s
    }
}

/// Monomials of degree ≤ 2 in `nvars` variables.
fn test_monomials(nvars: usize) -> Vec<Poly> {
    let mut out = vec![Poly::one()];
    for a in 0..nvars {
        out.push(Poly::var(a));
        for b in a..nvars {
            out.push(&Poly::var(a) * &Poly::var(b));
        }
    }
    out
}

/// One bracket entry of a Lie algebra table: [l_i, l_j] = Σ coeff·l_k, i < j.
#[derive(Clone, Debug, PartialEq)]
pub struct TableEntry {
    pub i: usize,
    pub j: usize,
    pub terms: Vec<(usize, Rat)>,
}

/// Structure constants of a finite-dimensional Lie algebra over ℚ.
#[derive(Clone, Debug, PartialEq)]
pub struct LieTable {
    pub names: Vec<String>,
    pub entries: Vec<TableEntry>,
}

impl LieTable {
    /// sl₂ in the basis e < f < h: [e,f] = h, [h,e] = 2e, [h,f] = −2f.
    pub fn sl2() -> Self {
        LieTable {
            names: vec!["e".into(), "f".into(), "h".into()],
            entries: vec![
                TableEntry { i: 0, j: 1, terms: vec![(2, int(1))] },
                TableEntry { i: 0, j: 2, terms: vec![(0, int(-2))] },
                TableEntry { i: 1, j: 2, terms: vec![(1, int(2))] },
            ],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Builtin {
    Abelian(usize),
    LieAlgebra(LieTable),
    TangentAffine(usize),
    Weyl(usize),
}

fn default_names(n: usize) -> Vec<String> {
    if n <= 3 {
        ["x", "y", "z"][..n].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=n).map(|i| format!("l{i}")).collect()
    }
}

fn coordinate_names(d: usize) -> Vec<String> {
    if d == 1 {
        vec!["x".into()]
    } else {
        (1..=d).map(|i| format!("x{i}")).collect()
    }
}

fn zero_bracket(n: usize) -> Vec<Vec<Vec<Poly>>> {
    vec![vec![vec![Poly::zero(); n]; n]; n]
}

pub fn builtin(b: &Builtin) -> Result<AlgebroidPresentation, AlgebroidError> {
    let p = match b {
        Builtin::Abelian(n) => {
            let n = *n;
            AlgebroidPresentation::new(BaseRing::rationals(), default_names(n), zero_bracket(n), vec![vec![]; n])?
        }
        Builtin::LieAlgebra(table) => {
            let n = table.names.len();
            let mut br = zero_bracket(n);
            for e in &table.entries {
                if e.i >= n || e.j >= n || e.terms.iter().any(|(k, _)| *k >= n) {
                    return Err(AlgebroidError::Malformed("table index out of range".into()));
                }
                for (k, c) in &e.terms {
                    br[e.i][e.j][*k] = &br[e.i][e.j][*k] + &Poly::constant(c.clone());
                    br[e.j][e.i][*k] = &br[e.j][e.i][*k] - &Poly::constant(c.clone());
                }
            }
            AlgebroidPresentation::new(BaseRing::rationals(), table.names.clone(), br, vec![vec![]; n])?
        }
        Builtin::TangentAffine(d) | Builtin::Weyl(d) => {
            let d = *d;
            let vars = coordinate_names(d);
            let names = vars.iter().map(|v| format!("d{v}")).collect();
            let anchor = (0..d).map(|i| (0..d).map(|m| if i == m { Poly::one() } else { Poly::zero() }).collect()).collect();
            AlgebroidPresentation::new(BaseRing::polynomial(vars), names, zero_bracket(d), anchor)?
        }
    };
    let report = p.validate();
    if !report.pass() {
        let bad: Vec<String> = report.results.iter().filter(|r| !r.pass).map(|r| format!("{:?}", r.axiom)).collect();
        return Err(AlgebroidError::Invalid(bad.join(", ")));
    }
    Ok(p)
}

pub fn sl2() -> AlgebroidPresentation {
    builtin(&Builtin::LieAlgebra(LieTable::sl2())).expect("sl2 is a Lie algebra")
}

pub fn abelian(n: usize) -> AlgebroidPresentation {
    builtin(&Builtin::Abelian(n)).expect("abelian data is valid")
}

pub fn weyl(d: usize) -> AlgebroidPresentation {
    builtin(&Builtin::Weyl(d)).expect("tangent data is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_validate() {
        for b in [Builtin::Abelian(2), Builtin::LieAlgebra(LieTable::sl2()), Builtin::TangentAffine(2), Builtin::Weyl(1)] {
            assert!(builtin(&b).unwrap().validate().pass());
        }
    }

    #[test]
    fn abelian_has_zero_data() {
        let p = abelian(2);
        assert_eq!(p.rank(), 2);
        assert!(p.base.is_field());
        assert!(p.bracket.iter().flatten().flatten().all(|c| c.is_zero()));
    }

    #[test]
    fn weyl_anchor_is_d_dx() {
        let p = weyl(1);
        assert_eq!(p.rank(), 1);
        assert_eq!(p.anchor_apply(0, &Poly::parse("x^3", &["x".into()]).unwrap()), Poly::parse("3*x^2", &["x".into()]).unwrap());
    }

    #[test]
    fn weight_grading_of_tangent() {
        assert_eq!(weyl(2).weight_grading(), Some(vec![-1, -1]));
        assert_eq!(sl2().weight_grading(), Some(vec![0, 0, 0]));
    }
}
