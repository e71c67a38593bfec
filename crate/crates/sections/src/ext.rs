//! Ext^k_{Gr}(Ũ/Ũ_{≥N}, M) and Ext^k(Ũ_{≥N}, M) from linear resolutions of
//! the truncations, and the comparison maps between truncations N + 1 and N.
//!
//! Hom(P_k, M)_j has one block M_{d_g + j} per generator g of P_k. All maps
//! are row-image: pulling back along φ: S → T sends a row of Hom(T, M) to a
//! row of Hom(S, M).

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use exactalg::{Echelon, QMat, Rat, Subquotient};
use num_traits::One;
use rees::resolution::{FreeMap, FreeModule};
use rees::ReesAlgebra;
use serde::{Deserialize, Serialize};

use crate::module::{shifted, GradedModulePresentation};
use crate::SectionsError;

/// Minimal resolution P_0 = Ũ ← P_1 ← P_2 ← … of Ũ/Ũ_{≥N}; P_k is generated in
/// degree N + k − 1 for k ≥ 1. `maps[k]: P_{k+1} → P_k`.
#[derive(Clone, Debug)]
pub struct TruncationResolution {
    pub truncation: u32,
    pub modules: Vec<FreeModule>,
    pub maps: Vec<FreeMap>,
    /// Each kernel one degree above the generators is spanned by the next
    /// differential, for every level built.
    pub linear: bool,
}

pub(crate) fn rank(m: &QMat) -> usize {
    if m.nrows == 0 || m.ncols == 0 {
        return 0;
    }
    let lb = m.rank_lower_bound();
    if lb == m.nrows.min(m.ncols) {
        lb
    } else {
        m.rank()
    }
}

impl TruncationResolution {
    /// Builds `length` differentials. Generators of P_{k+1} are the kernel of
    /// d_k in degree N + k, which is everything when the resolution is linear;
    /// linearity is then checked one degree further up at every level.
    pub fn build(alg: &ReesAlgebra, n: u32, length: usize) -> Result<Self, SectionsError> {
        let gens = alg.dim(n as i64);
        let n = n as i64;
        let d1 = FreeMap {
            source: FreeModule::new(vec![n; gens]),
            target: FreeModule::new(vec![0]),
            shift: 0,
            images: (0..gens).map(|k| vec![(k, Rat::one())]).collect(),
        };
        let mut modules = vec![d1.target.clone(), d1.source.clone()];
        let mut maps = vec![d1];
        let mut linear = true;
        while maps.len() < length {
            let k = maps.len() as i64;
            let d = maps.last().unwrap();
            let kernel = d.matrix_at(alg, n + k)?.left_kernel();
            let next = FreeMap {
                source: FreeModule::new(vec![n + k; kernel.len()]),
                target: d.source.clone(),
                shift: 0,
                images: kernel,
            };
            // nothing new one degree up: rank d_k + rank d_{k+1} = dim P_k there
            let a = d.matrix_at(alg, n + k + 1)?;
            let b = next.matrix_at(alg, n + k + 1)?;
            let rows = d.source.dim(alg, n + k + 1);
            if a.rank_lower_bound() + b.rank_lower_bound() != rows && a.rank() + b.rank() != rows {
                linear = false;
            }
            modules.push(next.source.clone());
            maps.push(next);
        }
        Ok(TruncationResolution { truncation: n as u32, modules, maps, linear })
    }

    pub fn generator_degree(&self, k: usize) -> i64 {
        if k == 0 {
            0
        } else {
            self.truncation as i64 + k as i64 - 1
        }
    }
}

/// Chain map φ_k: S_k → T_k lifting φ_0, with `src[k]: S_{k+1} → S_k` and
/// `tgt[k]: T_{k+1} → T_k`.
pub(crate) fn lift_chain(
    alg: &ReesAlgebra,
    src: &[FreeMap],
    tgt: &[FreeMap],
    phi0: FreeMap,
    steps: usize,
) -> Result<Vec<FreeMap>, SectionsError> {
    let mut out = vec![phi0];
    for k in 1..steps {
        if k > src.len() || k > tgt.len() {
            break;
        }
        let (d_src, d_tgt) = (&src[k - 1], &tgt[k - 1]);
        let prev = out.last().unwrap();
        let shift = prev.shift;
        let mut prev_at: BTreeMap<i64, QMat> = BTreeMap::new();
        let mut solvers: BTreeMap<i64, Echelon<Rat>> = BTreeMap::new();
        let mut images = Vec::with_capacity(d_src.source.rank());
        for (g, &d) in d_src.source.degrees.iter().enumerate() {
            if !prev_at.contains_key(&d) {
                prev_at.insert(d, prev.matrix_at(alg, d)?);
            }
            let w = prev_at[&d].apply(&d_src.images[g]);
            let q = d + shift;
            if !solvers.contains_key(&q) {
                let m = d_tgt.matrix_at(alg, q)?;
                let mut e = Echelon::new(m.ncols, true);
                for r in m.rows {
                    e.insert(r);
                }
                solvers.insert(q, e);
            }
            images.push(solvers[&q].express(&w).ok_or(SectionsError::NotLiftable { step: k, generator: g })?);
        }
        out.push(FreeMap { source: d_src.source.clone(), target: d_tgt.source.clone(), shift, images });
    }
    Ok(out)
}

/// Hom(T, M)_j → Hom(S, M)_{j+shift}, f ↦ f ∘ φ.
pub(crate) fn pullback(m: &GradedModulePresentation, phi: &FreeMap, j: i64) -> Result<QMat, SectionsError> {
    let alg = m.algebra().clone();
    let hom_layout = |module: &FreeModule, jj: i64| -> Result<(Vec<usize>, usize), SectionsError> {
        let mut off = Vec::with_capacity(module.rank());
        let mut total = 0;
        for &d in &module.degrees {
            off.push(total);
            total += m.dim(d + jj)?;
        }
        Ok((off, total))
    };
    let (row_off, nrows) = hom_layout(&phi.target, j)?;
    let (col_off, ncols) = hom_layout(&phi.source, j + phi.shift)?;
    let mut rows: Vec<BTreeMap<usize, Rat>> = vec![BTreeMap::new(); nrows];
    let mut layouts: HashMap<i64, Vec<usize>> = HashMap::new();
    for (g, &dg) in phi.source.degrees.iter().enumerate() {
        let q = dg + phi.shift;
        let off = layouts.entry(q).or_insert_with(|| phi.target.layout(&alg, q).0);
        for (pos, c) in &phi.images[g] {
            let h = off.partition_point(|o| o <= pos) - 1;
            let u = pos - off[h];
            let k = q - phi.target.degrees[h];
            let e = phi.target.degrees[h] + j;
            let dm = m.dim(e)?;
            if dm == 0 {
                continue;
            }
            let table = m.action(k as u32, e)?;
            for mu in 0..dm {
                shifted(&table[u * dm + mu], col_off[g], c, &mut rows[row_off[h] + mu]);
            }
        }
    }
    let rows = rows
        .into_iter()
        .map(|r| r.into_iter().filter(|(_, x)| *x != Rat::from_integer(0.into())).collect())
        .collect();
    Ok(QMat::from_rows(ncols, rows))
}

/// Which derived functor a cell belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TorsionOrSections {
    /// R^kτ(M)_j = H^k Hom(P_•, M)_j.
    Torsion,
    /// R^kωπ(M)_j = Ext^k(Ũ_{≥N}, M)_j = H^{k+1} Hom(P_{≥1}, M)_j.
    Sections,
}

impl TorsionOrSections {
    fn position(self, k: usize) -> usize {
        match self {
            TorsionOrSections::Torsion => k,
            TorsionOrSections::Sections => k + 1,
        }
    }

    fn incoming(self, k: usize) -> Option<usize> {
        match (self, k) {
            (TorsionOrSections::Torsion, 0) | (TorsionOrSections::Sections, 0) => None,
            (TorsionOrSections::Torsion, k) => Some(k - 1),
            (TorsionOrSections::Sections, k) => Some(k),
        }
    }
}

/// Homology of one cell at a fixed truncation.
#[derive(Clone, Debug)]
pub struct CellData {
    pub rank: usize,
    pub position: usize,
    sub: Option<Arc<Subquotient>>,
}

/// Certificate that a cell has the same value at truncations N and N + 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Stabilization {
    pub truncation: u32,
    pub rank_next: usize,
    /// Rank of the comparison map Ext(Ũ/Ũ_{≥N}) → Ext(Ũ/Ũ_{≥N+1}) on the cell.
    pub transition_rank: usize,
    pub linear_resolutions: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CellStatus {
    Certified(Stabilization),
    /// Budget exhausted; the rank is the value at the last truncation tried.
    Inconclusive { reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell {
    pub functor: TorsionOrSections,
    pub k: usize,
    pub j: i64,
    pub rank: usize,
    pub status: CellStatus,
}

impl Cell {
    pub fn certified(&self) -> bool {
        matches!(self.status, CellStatus::Certified(_))
    }
}

/// Resolutions, comparison maps and cell homology for one module, cached
/// across truncations.
pub struct ExtEngine<'a> {
    pub module: &'a GradedModulePresentation,
    /// Largest cohomological degree needed; resolutions get kmax + 2 terms.
    pub kmax: usize,
    resolutions: BTreeMap<u32, Arc<TruncationResolution>>,
    transitions: BTreeMap<u32, Arc<Vec<FreeMap>>>,
    right_lifts: HashMap<(u32, u32, usize), Arc<Vec<FreeMap>>>,
    coboundaries: HashMap<(u32, usize, i64), Arc<QMat>>,
    cells: HashMap<(u32, TorsionOrSections, usize, i64), CellData>,
}

impl<'a> ExtEngine<'a> {
    pub fn new(module: &'a GradedModulePresentation, kmax: usize) -> Self {
        ExtEngine {
            module,
            kmax,
            resolutions: BTreeMap::new(),
            transitions: BTreeMap::new(),
            right_lifts: HashMap::new(),
            coboundaries: HashMap::new(),
            cells: HashMap::new(),
        }
    }

    fn alg(&self) -> Arc<ReesAlgebra> {
        self.module.algebra().clone()
    }

    pub fn resolution(&mut self, n: u32) -> Result<Arc<TruncationResolution>, SectionsError> {
        if let Some(r) = self.resolutions.get(&n) {
            return Ok(r.clone());
        }
        let r = Arc::new(TruncationResolution::build(&self.alg(), n, self.kmax + 2)?);
        self.resolutions.insert(n, r.clone());
        Ok(r)
    }

    /// φ_k: P^{N+1}_k → P^N_k lifting the identity of Ũ.
    fn transition(&mut self, n: u32) -> Result<Arc<Vec<FreeMap>>, SectionsError> {
        if let Some(t) = self.transitions.get(&n) {
            return Ok(t.clone());
        }
        let (src, tgt) = (self.resolution(n + 1)?, self.resolution(n)?);
        let id = FreeMap {
            source: FreeModule::new(vec![0]),
            target: FreeModule::new(vec![0]),
            shift: 0,
            images: vec![vec![(0, Rat::one())]],
        };
        let t = Arc::new(lift_chain(&self.alg(), &src.maps, &tgt.maps, id, self.kmax + 3)?);
        self.transitions.insert(n, t.clone());
        Ok(t)
    }

    /// δ^p: Hom(P_p, M)_j → Hom(P_{p+1}, M)_j.
    pub fn coboundary(&mut self, n: u32, p: usize, j: i64) -> Result<Arc<QMat>, SectionsError> {
        if let Some(m) = self.coboundaries.get(&(n, p, j)) {
            return Ok(m.clone());
        }
        let r = self.resolution(n)?;
        let m = Arc::new(pullback(self.module, &r.maps[p], j)?);
        self.coboundaries.insert((n, p, j), m.clone());
        Ok(m)
    }

    pub fn cochain_dim(&mut self, n: u32, p: usize, j: i64) -> Result<usize, SectionsError> {
        let r = self.resolution(n)?;
        Ok(r.modules[p].rank() * self.module.dim(r.generator_degree(p) + j)?)
    }

    pub fn cell(&mut self, n: u32, f: TorsionOrSections, k: usize, j: i64) -> Result<CellData, SectionsError> {
        if let Some(c) = self.cells.get(&(n, f, k, j)) {
            return Ok(c.clone());
        }
        if k > self.kmax {
            return Err(SectionsError::Malformed(format!("cohomological degree {k} above {}", self.kmax)));
        }
        let p = f.position(k);
        let dim = self.cochain_dim(n, p, j)?;
        let out = rank(self.coboundary(n, p, j)?.as_ref());
        let inc = match f.incoming(k) {
            Some(q) => rank(self.coboundary(n, q, j)?.as_ref()),
            None => 0,
        };
        let c = CellData { rank: dim - out - inc, position: p, sub: None };
        self.cells.insert((n, f, k, j), c.clone());
        Ok(c)
    }

    /// The cell as an explicit subquotient of Hom(P_p, M)_j.
    pub fn classes(&mut self, n: u32, f: TorsionOrSections, k: usize, j: i64) -> Result<Arc<Subquotient>, SectionsError> {
        let c = self.cell(n, f, k, j)?;
        if let Some(s) = c.sub {
            return Ok(s);
        }
        let dim = self.cochain_dim(n, c.position, j)?;
        let z = self.coboundary(n, c.position, j)?.left_kernel();
        let b = match f.incoming(k) {
            Some(q) => self.coboundary(n, q, j)?.rows.clone(),
            None => Vec::new(),
        };
        let s = Arc::new(Subquotient::new(dim, &b, &z));
        if s.dim() != c.rank {
            return Err(SectionsError::Malformed(format!("cell ({k}, {j}) rank {} vs classes {}", c.rank, s.dim())));
        }
        self.cells.get_mut(&(n, f, k, j)).unwrap().sub = Some(s.clone());
        Ok(s)
    }

    /// Compare truncations N and N + 1 on one cell.
    pub fn compare(&mut self, n: u32, f: TorsionOrSections, k: usize, j: i64) -> Result<Option<Stabilization>, SectionsError> {
        let a = self.cell(n, f, k, j)?;
        let b = self.cell(n + 1, f, k, j)?;
        let linear = self.resolution(n)?.linear && self.resolution(n + 1)?.linear;
        if a.rank != b.rank || !linear {
            return Ok(None);
        }
        if a.rank == 0 {
            return Ok(Some(Stabilization { truncation: n, rank_next: 0, transition_rank: 0, linear_resolutions: linear }));
        }
        let t = self.transition(n)?;
        let pb = pullback(self.module, &t[a.position], j)?;
        let (sa, sb) = (self.classes(n, f, k, j)?, self.classes(n + 1, f, k, j)?);
        let mut rows = Vec::with_capacity(sa.dim());
        for z in &sa.reps {
            let w = pb.apply(z);
            rows.push(sb.coords(&w).ok_or_else(|| SectionsError::Malformed("comparison left the cocycles".into()))?);
        }
        let tr = QMat::from_rows(sb.dim(), rows).rank();
        if tr != a.rank {
            return Ok(None);
        }
        Ok(Some(Stabilization { truncation: n, rank_next: b.rank, transition_rank: tr, linear_resolutions: linear }))
    }

    /// Smallest N in [start, budget] at which every requested cell agrees with
    /// N + 1 through an isomorphism. On exhaustion the cells are returned with
    /// their values at `budget`, flagged inconclusive.
    pub fn stabilize(
        &mut self,
        cells: &[(TorsionOrSections, usize, i64)],
        start: u32,
        budget: u32,
    ) -> Result<(Option<u32>, Vec<Cell>), SectionsError> {
        let mut n = start.max(1);
        loop {
            let mut certs = Vec::with_capacity(cells.len());
            let mut all = true;
            for &(f, k, j) in cells {
                let s = self.compare(n, f, k, j)?;
                all &= s.is_some();
                certs.push(s);
                if !all {
                    break;
                }
            }
            if all {
                let mut out = Vec::with_capacity(cells.len());
                for (&(f, k, j), s) in cells.iter().zip(certs) {
                    let rank = self.cell(n, f, k, j)?.rank;
                    out.push(Cell { functor: f, k, j, rank, status: CellStatus::Certified(s.unwrap()) });
                }
                return Ok((Some(n), out));
            }
            if n >= budget {
                let mut out = Vec::with_capacity(cells.len());
                for &(f, k, j) in cells {
                    let rank = self.cell(n, f, k, j)?.rank;
                    let reason = format!("truncations {start}..={budget} did not stabilize");
                    out.push(Cell { functor: f, k, j, rank, status: CellStatus::Inconclusive { reason } });
                }
                return Ok((None, out));
            }
            n += 1;
        }
    }

    /// Chain lift ψ_c: P_{c+1} → P_{c+1} (shift s) of right multiplication by
    /// the basis monomial `a` of Ũ_s on Ũ_{≥N}, for c = 0..steps.
    pub fn right_multiplication(&mut self, n: u32, s: u32, a: usize, steps: usize) -> Result<Vec<FreeMap>, SectionsError> {
        let alg = self.alg();
        let r = self.resolution(n)?;
        let nn = n as i64;
        let ds = alg.dim(s as i64);
        let table = alg.qmul_table(n, s)?;
        let d1 = r.maps[0].matrix_at(&alg, nn + s as i64)?;
        let mut ech = Echelon::new(d1.ncols, true);
        for row in d1.rows {
            ech.insert(row);
        }
        let mut images = Vec::with_capacity(r.modules[1].rank());
        for b in 0..r.modules[1].rank() {
            let w = &table[b * ds + a];
            images.push(ech.express(w).ok_or(SectionsError::NotLiftable { step: 0, generator: b })?);
        }
        let psi0 = FreeMap { source: r.modules[1].clone(), target: r.modules[1].clone(), shift: s as i64, images };
        lift_chain(&alg, &r.maps[1..], &r.maps[1..], psi0, steps)
    }

    /// a·ξ = ξ ∘ ψ^a as a matrix R^kωπ(M)_j → R^kωπ(M)_{j+s} in class
    /// coordinates, for `a` the basis monomial of Ũ_s.
    pub fn section_action(&mut self, n: u32, k: usize, s: u32, a: usize, j: i64) -> Result<QMat, SectionsError> {
        let f = TorsionOrSections::Sections;
        let src = self.classes(n, f, k, j)?;
        let tgt = self.classes(n, f, k, j + s as i64)?;
        if src.dim() == 0 || tgt.dim() == 0 {
            return Ok(QMat::zeros(src.dim(), tgt.dim()));
        }
        let psi = match self.right_lifts.get(&(n, s, a)) {
            Some(p) => p.clone(),
            None => {
                let p = Arc::new(self.right_multiplication(n, s, a, self.kmax + 1)?);
                self.right_lifts.insert((n, s, a), p.clone());
                p
            }
        };
        let map = psi.get(k).ok_or(SectionsError::NotLiftable { step: k, generator: a })?;
        let pb = pullback(self.module, map, j)?;
        let mut rows = Vec::with_capacity(src.dim());
        for z in &src.reps {
            rows.push(tgt.coords(&pb.apply(z)).ok_or_else(|| SectionsError::Malformed("action left the cocycles".into()))?);
        }
        Ok(QMat::from_rows(tgt.dim(), rows))
    }

    /// Values f(u) ∈ M_{m+j} of f ∈ Hom(Ũ_{≥N}, M)_j (a row of Hom(P_1, M)_j)
    /// on the basis of Ũ_m, m ≥ N: the matrix Hom(P_1, M)_j → ⊕_u M_{m+j}.
    pub fn evaluation(&mut self, n: u32, m: i64, j: i64) -> Result<QMat, SectionsError> {
        let alg = self.alg();
        let r = self.resolution(n)?;
        let d1 = r.maps[0].matrix_at(&alg, m)?;
        let mut ech = Echelon::new(d1.ncols, true);
        for row in d1.rows {
            ech.insert(row);
        }
        let du = alg.dim(m);
        let mut images = Vec::with_capacity(du);
        for u in 0..du {
            images.push(ech.express(&vec![(u, Rat::one())]).ok_or(SectionsError::NotLiftable { step: 0, generator: u })?);
        }
        let phi = FreeMap { source: FreeModule::new(vec![m; du]), target: r.modules[1].clone(), shift: 0, images };
        pullback(self.module, &phi, j)
    }
}
