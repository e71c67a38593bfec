//! Left E-modules: one finite-dimensional component per vertex and the action
//! maps E_{il} ⊗ M_{−l} → M_{−i}.

use std::collections::BTreeMap;

use exactalg::{Echelon, Insert, QMat, Rat, SparseVec};
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{add_scaled, finish, BeilinsonAlgebra};
use crate::BeilinsonError;

#[derive(Clone, Debug, PartialEq)]
pub struct EModule {
    pub n: usize,
    pub label: String,
    /// The k of R^kωπ this module was read off from; 0 for modules built
    /// directly.
    pub cohomological_degree: usize,
    /// dims[i] = dim M_{−i}.
    pub dims: Vec<usize>,
    /// (i, l) with i < l: one row-image matrix M_{−l} → M_{−i} per basis
    /// monomial of U^{l−i}.
    pub actions: BTreeMap<(usize, usize), Vec<QMat>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EModuleRecord {
    pub label: String,
    pub cohomological_degree: usize,
    pub dims: Vec<usize>,
    /// (i, l, rank of U^{l−i} ⊗ M_{−l} → M_{−i}).
    pub action_ranks: Vec<(usize, usize, usize)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleCheck {
    pub triples_checked: usize,
    pub failures: usize,
    /// Over a point base every action map is ℚ-linear by construction.
    pub base_linear: bool,
}

impl ModuleCheck {
    pub fn pass(&self) -> bool {
        self.failures == 0 && self.base_linear
    }
}

fn unit_vec(i: usize) -> SparseVec<Rat> {
    vec![(i, Rat::one())]
}

impl EModule {
    pub fn zero(n: usize, cohomological_degree: usize) -> Self {
        EModule { n, label: "0".into(), cohomological_degree, dims: vec![0; n + 1], actions: BTreeMap::new() }
    }

    /// The simple module at vertex l.
    pub fn simple(n: usize, l: usize) -> Self {
        let mut dims = vec![0; n + 1];
        dims[l] = 1;
        EModule { n, label: format!("S{l}"), cohomological_degree: 0, dims, actions: BTreeMap::new() }
    }

    /// E·e_l, with components E_{il} = U^{l−i} and actions by multiplication.
    pub fn projective(e: &BeilinsonAlgebra, l: usize) -> Result<Self, BeilinsonError> {
        let n = e.n;
        let dims = (0..=n).map(|i| e.block_dim(i, l)).collect();
        let mut actions = BTreeMap::new();
        for i in 0..=l {
            for j in i + 1..=l {
                let mut mats = Vec::with_capacity(e.block_dim(i, j));
                for a in 0..e.block_dim(i, j) {
                    let rows = (0..e.block_dim(j, l))
                        .map(|y| e.mul_blocks(i, j, l, &unit_vec(a), &unit_vec(y)))
                        .collect::<Result<Vec<_>, _>>()?;
                    mats.push(QMat::from_rows(e.block_dim(i, l), rows));
                }
                actions.insert((i, j), mats);
            }
        }
        Ok(EModule { n, label: format!("Ee{l}"), cohomological_degree: 0, dims, actions })
    }

    pub fn is_zero(&self) -> bool {
        self.dims.iter().all(|d| *d == 0)
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// a·x for a the basis monomial `a` of E_{il} and x ∈ M_{−l}.
    pub fn act(&self, i: usize, l: usize, a: usize, x: &SparseVec<Rat>) -> SparseVec<Rat> {
        if i == l {
            return x.clone();
        }
        match self.actions.get(&(i, l)) {
            Some(m) => m[a].apply(x),
            None => Vec::new(),
        }
    }

    fn matrix(&self, i: usize, l: usize, a: usize) -> QMat {
        self.actions.get(&(i, l)).map(|m| m[a].clone()).unwrap_or_else(|| QMat::zeros(self.dims[l], self.dims[i]))
    }

    /// a·(b·x) = (ab)·x for every basis a ∈ E_{ij}, b ∈ E_{jl}, i < j < l.
    pub fn verify(&self, e: &BeilinsonAlgebra) -> Result<ModuleCheck, BeilinsonError> {
        let n = self.n;
        let mut checked = 0;
        let mut failures = 0;
        for ((i, l), mats) in &self.actions {
            let shape_ok = mats.len() == e.block_dim(*i, *l)
                && mats.iter().all(|m| m.nrows == self.dims[*l] && m.ncols == self.dims[*i]);
            if !shape_ok {
                failures += 1;
            }
        }
        for i in 0..=n {
            for j in i + 1..=n {
                for l in j + 1..=n {
                    if self.dims[l] == 0 || self.dims[i] == 0 {
                        continue;
                    }
                    for a in 0..e.block_dim(i, j) {
                        for b in 0..e.block_dim(j, l) {
                            let lhs = self.matrix(j, l, b).mul(&self.matrix(i, j, a));
                            let ab = e.mul_blocks(i, j, l, &unit_vec(a), &unit_vec(b))?;
                            let mut rhs = QMat::zeros(self.dims[l], self.dims[i]);
                            for (c, x) in &ab {
                                rhs = rhs.add(&self.matrix(i, l, *c).scale(x));
                            }
                            checked += 1;
                            if !lhs.sub(&rhs).is_zero() {
                                failures += 1;
                            }
                        }
                    }
                }
            }
        }
        Ok(ModuleCheck { triples_checked: checked, failures, base_linear: true })
    }

    pub fn direct_sum(parts: &[EModule]) -> Self {
        let n = parts.first().map(|p| p.n).unwrap_or(0);
        let mut dims = vec![0; n + 1];
        for p in parts {
            for (i, d) in p.dims.iter().enumerate() {
                dims[i] += d;
            }
        }
        let mut actions = BTreeMap::new();
        for i in 0..=n {
            for l in i + 1..=n {
                let count = parts.iter().find_map(|p| p.actions.get(&(i, l)).map(|m| m.len()));
                let Some(count) = count else { continue };
                let mut mats = Vec::with_capacity(count);
                for a in 0..count {
                    let mut rows = Vec::with_capacity(dims[l]);
                    let mut col = 0;
                    for p in parts {
                        let m = p.matrix(i, l, a);
                        for r in m.rows {
                            rows.push(r.into_iter().map(|(c, x)| (c + col, x)).collect());
                        }
                        col += p.dims[i];
                    }
                    mats.push(QMat::from_rows(dims[i], rows));
                }
                actions.insert((i, l), mats);
            }
        }
        let label = parts.iter().map(|p| p.label.clone()).collect::<Vec<_>>().join(" ⊕ ");
        let c = parts.first().map(|p| p.cohomological_degree).unwrap_or(0);
        EModule { n, label, cohomological_degree: c, dims, actions }
    }

    /// The submodule of components at vertices 0..=m (actions only lower the
    /// vertex index, so this is closed).
    pub fn lower_part(&self, m: usize) -> Self {
        let mut out = self.clone();
        for i in m + 1..=self.n {
            out.dims[i] = 0;
        }
        out.actions.retain(|(_, l), _| *l <= m);
        out.label = format!("{}≤{m}", self.label);
        out
    }

    /// The quotient by `lower_part(m)`.
    pub fn upper_part(&self, m: usize) -> Self {
        let mut out = self.clone();
        for i in 0..=m.min(self.n) {
            out.dims[i] = 0;
        }
        out.actions.retain(|(i, _), _| *i > m);
        out.label = format!("{}>{m}", self.label);
        out
    }

    pub fn record(&self) -> EModuleRecord {
        let mut action_ranks = Vec::new();
        for ((i, l), mats) in &self.actions {
            let mut ech = Echelon::<Rat>::new(self.dims[*i], false);
            for m in mats {
                for r in &m.rows {
                    ech.insert(r.clone());
                }
            }
            action_ranks.push((*i, *l, ech.rank()));
        }
        EModuleRecord {
            label: self.label.clone(),
            cohomological_degree: self.cohomological_degree,
            dims: self.dims.clone(),
            action_ranks,
        }
    }
}

/// Basis of Hom_E(P, Q): families Φ_v: P_{−v} → Q_{−v} with
/// Φ_i(a·x) = a·Φ_l(x).
pub fn hom_space(p: &EModule, q: &EModule) -> Vec<Vec<QMat>> {
    let n = p.n;
    let mut off = Vec::with_capacity(n + 1);
    let mut unknowns = 0;
    for v in 0..=n {
        off.push(unknowns);
        unknowns += p.dims[v] * q.dims[v];
    }
    let mut rows: Vec<BTreeMap<usize, Rat>> = vec![BTreeMap::new(); unknowns];
    let mut col = 0;
    for i in 0..=n {
        for l in i + 1..=n {
            let count = p.actions.get(&(i, l)).or(q.actions.get(&(i, l))).map(|m| m.len()).unwrap_or(0);
            for a in 0..count {
                let (ap, aq) = (p.matrix(i, l, a), q.matrix(i, l, a));
                // equation entries (x, r): x ∈ P_{−l}, r ∈ Q_{−i}
                let w = q.dims[i];
                for x in 0..p.dims[l] {
                    for (pp, c) in &ap.rows[x] {
                        for r in 0..w {
                            let u = off[i] + pp * q.dims[i] + r;
                            *rows[u].entry(col + x * w + r).or_insert_with(Rat::zero) += c;
                        }
                    }
                }
                for pp in 0..p.dims[l] {
                    for qq in 0..q.dims[l] {
                        let u = off[l] + pp * q.dims[l] + qq;
                        for (r, c) in &aq.rows[qq] {
                            *rows[u].entry(col + pp * w + r).or_insert_with(Rat::zero) -= c;
                        }
                    }
                }
                col += p.dims[l] * w;
            }
        }
    }
    let m = QMat::from_rows(col, rows.into_iter().map(finish).collect());
    let kernel = if col == 0 { (0..unknowns).map(unit_vec).collect() } else { m.left_kernel() };
    kernel.into_iter().map(|k| unpack(p, q, &off, &k)).collect()
}

fn unpack(p: &EModule, q: &EModule, off: &[usize], k: &SparseVec<Rat>) -> Vec<QMat> {
    (0..=p.n)
        .map(|v| {
            let mut rows: Vec<BTreeMap<usize, Rat>> = vec![BTreeMap::new(); p.dims[v]];
            for (u, c) in k {
                if *u >= off[v] && *u < off[v] + p.dims[v] * q.dims[v] {
                    let r = u - off[v];
                    rows[r / q.dims[v]].insert(r % q.dims[v], c.clone());
                }
            }
            QMat::from_rows(q.dims[v], rows.into_iter().collect::<Vec<_>>().into_iter().map(finish).collect())
        })
        .collect()
}

pub fn hom_dim(p: &EModule, q: &EModule) -> usize {
    hom_space(p, q).len()
}

/// Seeded random element of `space`, with small integer coefficients.
pub(crate) fn random_combination(space: &[Vec<QMat>], rng: &mut ChaCha8Rng) -> Vec<QMat> {
    let mut out: Vec<QMat> = space[0].iter().map(|m| QMat::zeros(m.nrows, m.ncols)).collect();
    for phi in space {
        let c = Rat::from_integer(rng.gen_range(-7i64..=7).into());
        for (o, m) in out.iter_mut().zip(phi) {
            *o = o.add(&m.scale(&c));
        }
    }
    out
}

/// An isomorphism P → Q found as a random element of Hom_E(P, Q), if one
/// turns up within a few seeded draws.
pub fn find_isomorphism(p: &EModule, q: &EModule, seed: u64) -> Option<Vec<QMat>> {
    if p.dims != q.dims {
        return None;
    }
    if p.is_zero() {
        return Some(Vec::new());
    }
    let space = hom_space(p, q);
    if space.is_empty() {
        return None;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..4 {
        let phi = random_combination(&space, &mut rng);
        if phi.iter().zip(&p.dims).all(|(m, d)| m.rank() == *d) {
            return Some(phi);
        }
    }
    None
}

/// Projective resolution F_• → P by sums of E·e_l.
#[derive(Clone, Debug)]
pub struct ProjectiveResolution {
    pub n: usize,
    /// Vertices of the generators of F_k.
    pub generators: Vec<Vec<usize>>,
    /// images[0][g]: the generator's image in P_{−l_g}; images[k][g] for
    /// k ≥ 1: its image in F_{k−1} at vertex l_g, in coordinates
    /// ⊕_{g'} E_{l_g, l_{g'}}.
    pub images: Vec<Vec<SparseVec<Rat>>>,
}

/// Free module F = ⊕_g E·e_{l_g}: offsets at vertex i.
fn free_layout(e: &BeilinsonAlgebra, gens: &[usize], i: usize) -> (Vec<usize>, usize) {
    let mut off = Vec::with_capacity(gens.len());
    let mut total = 0;
    for &l in gens {
        off.push(total);
        total += e.block_dim(i, l);
    }
    (off, total)
}

/// a·y in F for a ∈ E_{ij} basis and y ∈ F at vertex j.
fn free_act(e: &BeilinsonAlgebra, gens: &[usize], i: usize, j: usize, a: usize, y: &SparseVec<Rat>) -> Result<SparseVec<Rat>, BeilinsonError> {
    let (src, _) = free_layout(e, gens, j);
    let (dst, _) = free_layout(e, gens, i);
    let mut acc = BTreeMap::new();
    for (g, &l) in gens.iter().enumerate() {
        if l < j {
            continue;
        }
        let w = e.block_dim(j, l);
        let part: SparseVec<Rat> =
            y.iter().filter(|(c, _)| *c >= src[g] && *c < src[g] + w).map(|(c, x)| (c - src[g], x.clone())).collect();
        if part.is_empty() {
            continue;
        }
        let prod = e.mul_blocks(i, j, l, &unit_vec(a), &part)?;
        let shifted: SparseVec<Rat> = prod.into_iter().map(|(c, x)| (c + dst[g], x)).collect();
        add_scaled(&mut acc, &shifted, &Rat::one());
    }
    Ok(finish(acc))
}

/// Vertex generators of M: complements of the images arriving from higher
/// vertices.
fn generators(m: &EModule) -> Vec<(usize, SparseVec<Rat>)> {
    let mut out = Vec::new();
    for l in (0..=m.n).rev() {
        if m.dims[l] == 0 {
            continue;
        }
        let mut ech = Echelon::<Rat>::new(m.dims[l], false);
        for j in l + 1..=m.n {
            if let Some(mats) = m.actions.get(&(l, j)) {
                for a in mats {
                    for r in &a.rows {
                        ech.insert(r.clone());
                    }
                }
            }
        }
        for mu in 0..m.dims[l] {
            if let Insert::NewPivot(_) = ech.insert(unit_vec(mu)) {
                out.push((l, unit_vec(mu)));
            }
        }
    }
    out
}

impl ProjectiveResolution {
    pub fn build(e: &BeilinsonAlgebra, p: &EModule) -> Result<Self, BeilinsonError> {
        let n = e.n;
        let mut current = p.clone();
        // embedding of `current` into the previous free module, per vertex
        let mut embed: Option<Vec<Vec<SparseVec<Rat>>>> = None;
        let mut all_gens = Vec::new();
        let mut all_images = Vec::new();
        for _level in 0..=n + 2 {
            if current.is_zero() {
                return Ok(ProjectiveResolution { n, generators: all_gens, images: all_images });
            }
            let gens = generators(&current);
            let verts: Vec<usize> = gens.iter().map(|(l, _)| *l).collect();
            let images = gens
                .iter()
                .map(|(l, x)| match &embed {
                    None => x.clone(),
                    Some(b) => combine(&b[*l], x),
                })
                .collect();
            all_gens.push(verts.clone());
            all_images.push(images);
            // kernel of F → current, vertex by vertex
            let mut kernel: Vec<Vec<SparseVec<Rat>>> = Vec::with_capacity(n + 1);
            for i in 0..=n {
                let mut rows = Vec::new();
                for (l, x) in &gens {
                    for b in 0..e.block_dim(i, *l) {
                        rows.push(if i == *l { x.clone() } else { current.act(i, *l, b, x) });
                    }
                }
                let pi = QMat::from_rows(current.dims[i], rows.clone());
                let k = if current.dims[i] == 0 { (0..rows.len()).map(unit_vec).collect() } else { pi.left_kernel() };
                kernel.push(k);
            }
            let mut next = EModule::zero(n, 0);
            next.dims = kernel.iter().map(|k| k.len()).collect();
            for i in 0..=n {
                if next.dims[i] == 0 {
                    continue;
                }
                let (_, width) = free_layout(e, &verts, i);
                let mut ech = Echelon::<Rat>::new(width, true);
                for r in &kernel[i] {
                    ech.insert(r.clone());
                }
                for j in i + 1..=n {
                    if next.dims[j] == 0 {
                        continue;
                    }
                    let mut mats = Vec::with_capacity(e.block_dim(i, j));
                    for a in 0..e.block_dim(i, j) {
                        let mut rows = Vec::with_capacity(next.dims[j]);
                        for y in &kernel[j] {
                            let w = free_act(e, &verts, i, j, a, y)?;
                            rows.push(ech.express(&w).ok_or_else(|| BeilinsonError::Construction("kernel not closed under E".into()))?);
                        }
                        mats.push(QMat::from_rows(next.dims[i], rows));
                    }
                    next.actions.insert((i, j), mats);
                }
            }
            current = next;
            embed = Some(kernel);
        }
        Err(BeilinsonError::NoFiniteResolution(n + 2))
    }

    pub fn length(&self) -> usize {
        self.generators.len()
    }
}

fn combine(basis: &[SparseVec<Rat>], x: &SparseVec<Rat>) -> SparseVec<Rat> {
    let mut acc = BTreeMap::new();
    for (i, c) in x {
        add_scaled(&mut acc, &basis[*i], c);
    }
    finish(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use algebroid::abelian;
    use rees::ReesAlgebra;
    use std::sync::Arc;

    #[test]
    fn simple_on_the_line_has_a_two_step_resolution() {
        let e = BeilinsonAlgebra::build(Arc::new(ReesAlgebra::new(abelian(1)))).unwrap();
        let r = ProjectiveResolution::build(&e, &EModule::simple(1, 1)).unwrap();
        assert_eq!(r.generators, vec![vec![1], vec![0, 0]]);
    }

    #[test]
    fn projective_hom_is_a_block() {
        let e = BeilinsonAlgebra::build(Arc::new(ReesAlgebra::new(abelian(1)))).unwrap();
        let (p0, p1) = (EModule::projective(&e, 0).unwrap(), EModule::projective(&e, 1).unwrap());
        assert_eq!(hom_dim(&p0, &p1), 2);
        assert_eq!(hom_dim(&p1, &p0), 0);
        assert_eq!(hom_dim(&p1, &p1), 1);
    }
}
