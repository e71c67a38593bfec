//! Degree-two relations of Ũ^⊥ checked as functionals on U¹ ⊗_O U¹.
//!
//! J¹ has the basis e, σ_1..σ_n dual to t, l_1..l_n. A tensor j ⊗ j' pairs
//! with ∂ ⊗ ∂' by j'(∂ · j(∂')), and f ∈ O acts on a functional by
//! (f·j)(u) = j(u f).

use std::collections::BTreeMap;

use algebroid::AlgebroidPresentation;
use exactalg::{Poly, Rat, RankStrategy, RingMatrix};
use serde::{Deserialize, Serialize};

use crate::{DualMono, QuadraticDual};

/// Σ f_{ab} g_a ⊗ g_b over the generators g_0 = e, g_k = σ_k, left coefficients.
pub type Tensor2 = BTreeMap<(usize, usize), Poly>;

/// Σ r_{cd} b_c ⊗ b_d over b_0 = t, b_k = l_k, left coefficients.
pub type USquared = BTreeMap<(usize, usize), Poly>;

fn add_to(m: &mut BTreeMap<(usize, usize), Poly>, k: (usize, usize), f: Poly) {
    if f.is_zero() {
        return;
    }
    let e = m.entry(k).or_insert_with(Poly::zero);
    *e = &*e + &f;
    if e.is_zero() {
        m.remove(&k);
    }
}

/// μ(σ)(l_a ⊗ l_b) = ½[τ(l_a)(σ(l_b)) − τ(l_b)(σ(l_a)) − σ([l_a, l_b])] for
/// σ = Σ_k σ_k·f_k given by its values f_k = σ(l_k).
pub fn l_exterior_derivative(pres: &AlgebroidPresentation, sigma: &[Poly]) -> Vec<Vec<Poly>> {
    let n = pres.rank();
    let half = Rat::new(1.into(), 2.into());
    let mut out = vec![vec![Poly::zero(); n]; n];
    for a in 0..n {
        for b in 0..n {
            let mut v = &pres.anchor_apply(a, &sigma[b]) - &pres.anchor_apply(b, &sigma[a]);
            for (k, c) in pres.bracket_of(a, b).iter().enumerate() {
                v = &v - &(c * &sigma[k]);
            }
            out[a][b] = v.scale(&half);
        }
    }
    out
}

/// Spanning set of R = ker(U¹ ⊗ U¹ → U²): t⊗l − l⊗t and
/// ∂⊗∂' − ∂'⊗∂ − [∂, ∂']⊗t for ∂ = h·l_a, ∂' = l_b with h ∈ {1, x_1, …}.
pub fn r_spanning_set(pres: &AlgebroidPresentation) -> Vec<(String, USquared)> {
    let n = pres.rank();
    let mut out = Vec::new();
    for a in 0..n {
        let mut r = USquared::new();
        add_to(&mut r, (0, a + 1), Poly::one());
        add_to(&mut r, (a + 1, 0), -Poly::one());
        out.push((format!("t⊗{0} − {0}⊗t", pres.names[a]), r));
    }
    let mut hs = vec![Poly::one()];
    hs.extend((0..pres.nvars()).map(Poly::var));
    for h in &hs {
        for a in 0..n {
            for b in 0..n {
                if a == b && h.is_constant() {
                    continue;
                }
                // (h l_a)⊗l_b − (l_b h)⊗l_a − [h l_a, l_b]⊗t
                let mut r = USquared::new();
                add_to(&mut r, (a + 1, b + 1), h.clone());
                add_to(&mut r, (b + 1, a + 1), -h);
                let dh = pres.anchor_apply(b, h);
                add_to(&mut r, (0, a + 1), -&dh);
                for (k, c) in pres.bracket_of(a, b).iter().enumerate() {
                    add_to(&mut r, (k + 1, 0), -&(h * c));
                }
                add_to(&mut r, (a + 1, 0), dh);
                let label = if h.is_one() {
                    format!("[{}, {}]", pres.names[a], pres.names[b])
                } else {
                    format!("[({})·{}, {}]", pres.base.display(h), pres.names[a], pres.names[b])
                };
                out.push((label, r));
            }
        }
    }
    out
}

/// (f·g_a)(b_d) = g_a(b_d f).
fn scaled_gen_on(pres: &AlgebroidPresentation, f: &Poly, a: usize, d: usize) -> Poly {
    let mut v = if a == d { f.clone() } else { Poly::zero() };
    if a == 0 && d >= 1 {
        v = &v + &pres.anchor_apply(d - 1, f);
    }
    v
}

/// g_b(b_c · v) for v ∈ O.
fn gen_on_times(pres: &AlgebroidPresentation, b: usize, c: usize, v: &Poly) -> Poly {
    let mut out = if b == c { v.clone() } else { Poly::zero() };
    if b == 0 && c >= 1 {
        out = &out + &pres.anchor_apply(c - 1, v);
    }
    out
}

/// Pairing of a tensor with an element of U¹ ⊗ U¹.
pub fn evaluate_on_r(pres: &AlgebroidPresentation, phi: &Tensor2, r: &USquared) -> Poly {
    let mut acc = Poly::zero();
    for ((c, d), rcd) in r {
        for ((a, b), f) in phi {
            let v = scaled_gen_on(pres, f, *a, *d);
            if v.is_zero() {
                continue;
            }
            acc = &acc + &(rcd * &gen_on_times(pres, *b, *c, &v));
        }
    }
    acc
}

#[derive(Clone, Debug)]
pub struct DualRelation {
    pub label: String,
    pub tensor: Tensor2,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationReport {
    pub pass: bool,
    pub relations_checked: usize,
    pub r_elements: usize,
    /// Rank over the fraction field of the relation set inside J¹ ⊗ J¹;
    /// equals C(n+2, 2) when the relations span the whole annihilator of R.
    pub relation_rank: usize,
    pub expected_rank: usize,
    /// Degree-one check: f·e − e·f = Σ_k τ_k(f)·σ_k as functionals on U¹.
    pub bimodule_relation_holds: bool,
    /// (relation, R element, printed residual) for every nonzero pairing.
    pub residuals: Vec<(String, String, String)>,
}

fn lift_mono(m: &DualMono) -> Vec<usize> {
    let mut g: Vec<usize> = m.sigmas().iter().map(|k| k + 1).collect();
    if m.e {
        g.push(0);
    }
    g
}

impl QuadraticDual {
    /// g_a ⊗ g_b − (normal form of g_a·g_b lifted to tensors) for every pair
    /// whose product is not itself a basis monomial.
    pub fn degree_two_relations(&self) -> Vec<DualRelation> {
        let n = self.n();
        let mut out = Vec::new();
        for a in 0..=n {
            for b in 0..=n {
                let nf = self.mul(&self.generator(a), &self.generator(b));
                let mut t = Tensor2::new();
                add_to(&mut t, (a, b), Poly::one());
                for (m, f) in &nf.terms {
                    let g = lift_mono(m);
                    add_to(&mut t, (g[0], g[1]), -f);
                }
                if t.is_empty() {
                    continue;
                }
                let name = |g: usize| if g == 0 { "e".to_string() } else { format!("{}*", self.presentation().names[g - 1]) };
                out.push(DualRelation { label: format!("{}·{}", name(a), name(b)), tensor: t });
            }
        }
        out
    }
}

/// The defining relations written with full tensors: e⊗e,
/// σ_a⊗σ_b + σ_b⊗σ_a, and σ⊗e + e⊗σ − μ(σ) with μ(σ) the tensor whose
/// pairing is the L-exterior derivative.
pub fn lemma_relations(pres: &AlgebroidPresentation) -> Vec<DualRelation> {
    let n = pres.rank();
    let mut out = Vec::new();
    out.push(DualRelation { label: "e⊗e".into(), tensor: Tensor2::from([((0, 0), Poly::one())]) });
    for a in 0..n {
        for b in a..n {
            let mut t = Tensor2::new();
            add_to(&mut t, (a + 1, b + 1), Poly::one());
            add_to(&mut t, (b + 1, a + 1), Poly::one());
            out.push(DualRelation { label: format!("{0}*⊗{1}* + {1}*⊗{0}*", pres.names[a], pres.names[b]), tensor: t });
        }
    }
    for k in 0..n {
        let sigma: Vec<Poly> = (0..n).map(|j| if j == k { Poly::one() } else { Poly::zero() }).collect();
        let m = l_exterior_derivative(pres, &sigma);
        let mut t = Tensor2::new();
        add_to(&mut t, (k + 1, 0), Poly::one());
        add_to(&mut t, (0, k + 1), Poly::one());
        // (σ_c⊗σ_d)(l_a⊗l_b) = δ_{cb}δ_{da}: coefficient of σ_c⊗σ_d is μ(l_d⊗l_c)
        for c in 0..n {
            for d in 0..n {
                add_to(&mut t, (c + 1, d + 1), -&m[d][c]);
            }
        }
        out.push(DualRelation { label: format!("{0}*⊗e + e⊗{0}* − μ({0}*)", pres.names[k]), tensor: t });
    }
    out
}

/// Pair every relation with every element of the R spanning set.
pub fn verify_relations(pres: &AlgebroidPresentation, rels: &[DualRelation]) -> RelationReport {
    let n = pres.rank();
    let rs = r_spanning_set(pres);
    let mut residuals = Vec::new();
    for rel in rels {
        for (label, r) in &rs {
            let v = evaluate_on_r(pres, &rel.tensor, r);
            if !v.is_zero() {
                residuals.push((rel.label.clone(), label.clone(), pres.base.display(&v)));
            }
        }
    }
    let n1 = n + 1;
    let rows: Vec<Vec<Poly>> = rels
        .iter()
        .map(|rel| {
            let mut row = vec![Poly::zero(); n1 * n1];
            for ((a, b), f) in &rel.tensor {
                row[a * n1 + b] = f.clone();
            }
            row
        })
        .collect();
    let relation_rank = if rows.is_empty() {
        0
    } else {
        RingMatrix::new(rows).rank(RankStrategy::ExactFractionField).map(|r| r.rank).unwrap_or(0)
    };
    let expected_rank = (n1 * (n1 + 1)) / 2;
    let bimodule_relation_holds = bimodule_relation_holds(pres);
    RelationReport {
        pass: residuals.is_empty() && bimodule_relation_holds,
        relations_checked: rels.len(),
        r_elements: rs.len(),
        relation_rank,
        expected_rank,
        bimodule_relation_holds,
        residuals,
    }
}

fn bimodule_relation_holds(pres: &AlgebroidPresentation) -> bool {
    let n = pres.rank();
    (0..pres.nvars()).all(|v| {
        let f = Poly::var(v);
        (0..=n).all(|c| {
            // (f·e)(b_c) − (e·f)(b_c) against Σ_k τ_k(f) σ_k(b_c)
            let lhs = &scaled_gen_on(pres, &f, 0, c) - &(if c == 0 { f.clone() } else { Poly::zero() });
            let rhs = if c >= 1 { pres.anchor_apply(c - 1, &f) } else { Poly::zero() };
            lhs == rhs
        })
    })
}

/// Check that the product table of `dual` is cut out by functionals killing R,
/// and that its relations span the full annihilator.
pub fn verify_dual_relations(dual: &QuadraticDual) -> RelationReport {
    let mut rels = dual.degree_two_relations();
    rels.extend(lemma_relations(dual.presentation()));
    let table_only = dual.degree_two_relations();
    let mut report = verify_relations(dual.presentation(), &rels);
    report.relation_rank = verify_relations(dual.presentation(), &table_only).relation_rank;
    report.pass &= report.relation_rank == report.expected_rank;
    report
}
