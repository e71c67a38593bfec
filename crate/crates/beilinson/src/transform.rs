//! M ↦ RHom(T, πM) as E-modules, one per cohomological degree, its inverse
//! T ⊗_E − on projective resolutions, and the tail round trip.
//!
//! Twists are standard (M(s)_e = M_{e+s}). Component i of the transform is
//! [Rωπ M]_{−i}, i = 0..=n, so the summand at vertex l is Ũ(l), whose
//! transform is E·e_l.

use std::collections::BTreeMap;

use exactalg::{QMat, Rat, SparseVec};
use rees::resolution::{left_mul, FreeMap, FreeModule};
use sections::{Cell, CellStatus, ExtEngine, GradedModulePresentation, TorsionOrSections, TruncationPolicy};
use serde::{Deserialize, Serialize};

use crate::algebra::{add_scaled, finish, BeilinsonAlgebra};
use crate::emodule::{EModule, EModuleRecord, ModuleCheck, ProjectiveResolution};
use crate::tail::{homology_vanishes, tail_isomorphism, TailModule};
use crate::BeilinsonError;

#[derive(Clone, Debug)]
pub struct Transform {
    pub label: String,
    pub n: usize,
    /// Common truncation at which every cell of the window was certified.
    pub truncation: u32,
    pub cells: Vec<Cell>,
    /// modules[c] is built from R^cωπ(M), c = 0..=n.
    pub modules: Vec<EModule>,
    pub checks: Vec<ModuleCheck>,
}

impl Transform {
    pub fn nonzero_degrees(&self) -> Vec<usize> {
        self.modules.iter().filter(|m| !m.is_zero()).map(|m| m.cohomological_degree).collect()
    }

    /// Some higher R^cωπ(M) (c ≥ 1) is nonzero in the window.
    pub fn higher_cohomology(&self) -> bool {
        self.nonzero_degrees().iter().any(|c| *c > 0)
    }

    /// The only nonzero component, or the zero module in degree 0.
    pub fn single_degree(&self) -> Option<&EModule> {
        match self.nonzero_degrees().as_slice() {
            [] => Some(&self.modules[0]),
            [c] => Some(&self.modules[*c]),
            _ => None,
        }
    }

    pub fn records(&self) -> Vec<EModuleRecord> {
        self.modules.iter().map(|m| m.record()).collect()
    }
}

fn run_transform(
    e: &BeilinsonAlgebra,
    engine: &mut ExtEngine,
    policy: TruncationPolicy,
) -> Result<Transform, BeilinsonError> {
    let m = engine.module;
    let alg = m.algebra().clone();
    let n = e.n;
    let wanted: Vec<(TorsionOrSections, usize, i64)> = (0..=n)
        .flat_map(|c| (0..=n).map(move |i| (TorsionOrSections::Sections, c, -(i as i64))))
        .collect();
    let start = policy.start(m, -(n as i64));
    let budget = policy.budget(m, start, (-(n as i64), 0));
    let (trunc, cells) = engine.stabilize(&wanted, start, budget)?;
    let Some(trunc) = trunc else {
        let reason = cells
            .iter()
            .find_map(|c| match &c.status {
                CellStatus::Inconclusive { reason } => Some(reason.clone()),
                _ => None,
            })
            .unwrap_or_default();
        return Err(BeilinsonError::Inconclusive(reason));
    };
    let mut modules = Vec::with_capacity(n + 1);
    let mut checks = Vec::with_capacity(n + 1);
    for c in 0..=n {
        let mut module = EModule::zero(n, c);
        module.label = format!("R{c}ωπ({})", m.label);
        module.dims = (0..=n).map(|i| cells[c * (n + 1) + i].rank).collect();
        for i in 0..=n {
            for l in i + 1..=n {
                if module.dims[i] == 0 || module.dims[l] == 0 {
                    continue;
                }
                let s = (l - i) as u32;
                let mut mats = Vec::with_capacity(alg.dim(s as i64));
                for a in 0..alg.dim(s as i64) {
                    mats.push(engine.section_action(trunc, c, s, a, -(l as i64))?);
                }
                module.actions.insert((i, l), mats);
            }
        }
        checks.push(module.verify(e)?);
        modules.push(module);
    }
    Ok(Transform { label: m.label.clone(), n, truncation: trunc, cells, modules, checks })
}

/// [Rωπ M]_{−i} for i = 0..=n with the E-action from right multiplication on
/// Ũ_{≥N}, one module per cohomological degree.
pub fn transform(e: &BeilinsonAlgebra, m: &GradedModulePresentation, policy: TruncationPolicy) -> Result<Transform, BeilinsonError> {
    let mut engine = ExtEngine::new(m, e.n);
    run_transform(e, &mut engine, policy)
}

/// T ⊗_E F_• for a projective resolution F_• → P: the summand E·e_l becomes
/// Ũ(l), generated in degree −l.
#[derive(Clone, Debug)]
pub struct InverseTransform {
    pub resolution: ProjectiveResolution,
    pub terms: Vec<FreeModule>,
    /// maps[k − 1]: F_k → F_{k−1}.
    pub maps: Vec<FreeMap>,
    /// coker(F_1 → F_0).
    pub presentation: GradedModulePresentation,
    pub cohomological_degree: usize,
}

pub fn inverse_transform(e: &BeilinsonAlgebra, p: &EModule) -> Result<InverseTransform, BeilinsonError> {
    let alg = e.algebra().clone();
    let resolution = ProjectiveResolution::build(e, p)?;
    let terms: Vec<FreeModule> = resolution
        .generators
        .iter()
        .map(|g| FreeModule::new(g.iter().map(|l| -(*l as i64)).collect()))
        .collect();
    let maps: Vec<FreeMap> = (1..terms.len())
        .map(|k| FreeMap {
            source: terms[k].clone(),
            target: terms[k - 1].clone(),
            shift: 0,
            images: resolution.images[k].clone(),
        })
        .collect();
    let gens = terms.first().map(|t| t.degrees.clone()).unwrap_or_default();
    let rels = match maps.first() {
        Some(d) => d.source.degrees.iter().copied().zip(d.images.iter().cloned()).collect(),
        None => Vec::new(),
    };
    let label = format!("T⊗{}", p.label);
    let presentation = GradedModulePresentation::from_coordinates(alg, label, gens, rels)?;
    Ok(InverseTransform { resolution, terms, maps, presentation, cohomological_degree: p.cohomological_degree })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RoundTripMethod {
    /// Explicit map F_0 → M, u·g ↦ f_g(u), checked to kill relations and be
    /// bijective on the tail.
    Counit,
    /// Random element of the space of Ũ_1-compatible tail maps, checked to be
    /// invertible.
    IsomorphismSearch { solutions: usize },
    /// Both sides vanish on the tail.
    Zero,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundTripReport {
    pub label: String,
    pub n: usize,
    pub truncation: u32,
    pub nonzero_degrees: Vec<usize>,
    pub transform: Vec<EModuleRecord>,
    pub modules_verified: bool,
    /// Vertices of the generators of F_k.
    pub resolution: Vec<Vec<usize>>,
    pub tail: (i64, i64),
    pub module_dims: Vec<usize>,
    pub homology_dims: Vec<usize>,
    pub other_homology_vanishes: bool,
    pub method: Option<RoundTripMethod>,
    pub seed: u64,
    pub pass: bool,
    pub reason: Option<String>,
}

/// Tail settings: the comparison runs over [N, N + width] with
/// N = max generator degree + n + 2 unless `start` overrides it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailWindow {
    pub start: Option<i64>,
    pub width: i64,
}

impl Default for TailWindow {
    fn default() -> Self {
        TailWindow { start: None, width: 2 }
    }
}

/// transform → inverse_transform → compare with M on the tail.
pub fn roundtrip_check(
    e: &BeilinsonAlgebra,
    m: &GradedModulePresentation,
    policy: TruncationPolicy,
    tail: TailWindow,
    seed: u64,
) -> Result<RoundTripReport, BeilinsonError> {
    let alg = e.algebra().clone();
    let n = e.n;
    let mut engine = ExtEngine::new(m, n);
    let t = run_transform(e, &mut engine, policy)?;
    let mut report = RoundTripReport {
        label: m.label.clone(),
        n,
        truncation: t.truncation,
        nonzero_degrees: t.nonzero_degrees(),
        transform: t.records(),
        modules_verified: t.checks.iter().all(|c| c.pass()),
        resolution: Vec::new(),
        tail: (0, 0),
        module_dims: Vec::new(),
        homology_dims: Vec::new(),
        other_homology_vanishes: false,
        method: None,
        seed,
        pass: false,
        reason: None,
    };
    let Some(p) = t.single_degree() else {
        report.reason = Some(format!("transform lives in degrees {:?}", report.nonzero_degrees));
        return Ok(report);
    };
    let c = p.cohomological_degree;
    let inv = inverse_transform(e, p)?;
    report.resolution = inv.resolution.generators.clone();
    let gmax = m.generators.iter().copied().max().unwrap_or(0);
    let mut lo = tail.start.unwrap_or(gmax + n as i64 + 2);
    if c == 0 && !p.is_zero() {
        lo = lo.max(t.truncation as i64);
    }
    let hi = lo + tail.width;
    report.tail = (lo, hi);
    if let Some(x) = m.exact_through {
        if hi + 1 > x {
            report.reason = Some(format!("tail reaches {} beyond the presentation (exact through {x})", hi + 1));
            return Ok(report);
        }
    }
    let a = TailModule::from_presentation(m, lo, hi)?;
    report.module_dims = a.dims.clone();
    let mut others_vanish = true;
    for k in 0..inv.terms.len() {
        if k == c {
            continue;
        }
        others_vanish &= homology_vanishes(&alg, &inv.terms, &inv.maps, k, lo, hi)?;
    }
    report.other_homology_vanishes = others_vanish;
    let b = TailModule::from_homology(&alg, &inv.terms, &inv.maps, c, lo, hi)?;
    report.homology_dims = b.dims.clone();
    if p.is_zero() {
        report.method = Some(RoundTripMethod::Zero);
        report.pass = a.is_zero() && b.is_zero();
        if !report.pass {
            report.reason = Some("zero transform but nonzero tail".into());
        }
        return Ok(report);
    }
    let ok = if c == 0 {
        report.method = Some(RoundTripMethod::Counit);
        counit_is_iso(&mut engine, &t, &inv, lo, hi)?
    } else {
        let (solutions, iso) = tail_isomorphism(&a, &b, seed);
        report.method = Some(RoundTripMethod::IsomorphismSearch { solutions });
        iso
    };
    report.pass = ok && others_vanish && report.modules_verified && a.dims == b.dims;
    if !report.pass {
        report.reason = Some(if !ok {
            "no tail isomorphism".into()
        } else if !others_vanish {
            "homology outside the transform's degree".into()
        } else {
            "module checks failed".into()
        });
    }
    Ok(report)
}

/// Φ_e(u·g) = f_g(u) where f_g ∈ Hom(Ũ_{≥N}, M)_{−l_g} represents the class
/// picked by generator g. Checks Φ∘d_1 = 0, Φ_e onto M_e, dim H_0 = dim M
/// and Ũ_1-compatibility on [lo, hi].
fn counit_is_iso(
    engine: &mut ExtEngine,
    t: &Transform,
    inv: &InverseTransform,
    lo: i64,
    hi: i64,
) -> Result<bool, BeilinsonError> {
    let m = engine.module;
    let alg = m.algebra().clone();
    let n = t.truncation;
    let f0 = &inv.terms[0];
    let gens: Vec<usize> = inv.resolution.generators[0].clone();
    let mut forms = Vec::with_capacity(gens.len());
    for (g, &l) in gens.iter().enumerate() {
        let classes = engine.classes(n, TorsionOrSections::Sections, 0, -(l as i64))?;
        let mut acc = BTreeMap::new();
        for (mu, x) in &inv.resolution.images[0][g] {
            add_scaled(&mut acc, &classes.reps[*mu], x);
        }
        forms.push(finish(acc));
    }
    let mut phis = BTreeMap::new();
    for e in lo..=hi + 1 {
        let dm = m.dim(e)?;
        let (off, width) = f0.layout(&alg, e);
        let mut rows: Vec<SparseVec<Rat>> = vec![Vec::new(); width];
        for (g, &l) in gens.iter().enumerate() {
            let q = e + l as i64;
            let eval = engine.evaluation(n, q, -(l as i64))?;
            let v = eval.apply(&forms[g]);
            for u in 0..alg.dim(q) {
                rows[off[g] + u] =
                    v.iter().filter(|(i, _)| *i >= u * dm && *i < (u + 1) * dm).map(|(i, x)| (i - u * dm, x.clone())).collect();
            }
        }
        phis.insert(e, QMat::from_rows(dm, rows));
    }
    for e in lo..=hi {
        let phi = &phis[&e];
        let dm = m.dim(e)?;
        if let Some(d1) = inv.maps.first() {
            let dm1 = d1.matrix_at(&alg, e)?;
            if !dm1.mul(phi).is_zero() {
                return Ok(false);
            }
            let h0 = f0.dim(&alg, e) - dm1.rank();
            if h0 != dm {
                return Ok(false);
            }
        } else if f0.dim(&alg, e) != dm {
            return Ok(false);
        }
        if phi.rank() != dm {
            return Ok(false);
        }
        let next = &phis[&(e + 1)];
        let act = m.action(1, e)?;
        for u in 0..alg.dim(1) {
            for (r, row) in phi.rows.iter().enumerate() {
                let w = left_mul(&alg, f0, e, 1, u, &vec![(r, Rat::from_integer(1.into()))])?;
                let lhs = next.apply(&w);
                let mut acc = BTreeMap::new();
                for (mu, x) in row {
                    add_scaled(&mut acc, &act[u * dm + mu], x);
                }
                let rhs = finish(acc);
                if lhs != rhs {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}
