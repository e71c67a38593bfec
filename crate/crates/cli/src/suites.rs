//! One function per suite. Errors raised inside a computation become failing
//! (or inconclusive) checks of that suite; they never abort the run.

use std::sync::Arc;

use algebroid::{AlgebroidPresentation, Axiom};
use beilinson::{
    hom_dim, ideal_saturation_check, k_class, roundtrip_check, transform, BeilinsonAlgebra, BeilinsonError, KClassVector,
    RoundTripMethod, RoundTripReport, SaturationOptions, TailWindow,
};
use exactalg::{RankCertificate, RankStrategy};
use koszul::{
    diagonal_resolution, left_koszul, right_koszul, verify_resolution, ExactnessStrategy, GradedComplex, HomologyEntry,
    KoszulError,
};
use quaddual::{ext_algebra_check, frobenius_pairing, verify_dual_relations, QuadraticDual};
use rees::ReesAlgebra;
use sections::{
    derived_sections_window, gorenstein_verify, homogenize_ideal, parse_generators, tau_vanishing_verify, Cell,
    CellStatus, GradedModulePresentation, SectionsError, TruncationPolicy,
};

use crate::config::{IdealTarget, RunConfig, Strategy, Suite};
use crate::report::{Check, Record, SuiteReport};

const EVALUATION_POINTS: usize = 3;

pub struct Context {
    pub pres: AlgebroidPresentation,
    pub alg: Arc<ReesAlgebra>,
    pub config: RunConfig,
}

impl Context {
    fn n(&self) -> usize {
        self.alg.n()
    }

    fn policy(&self) -> TruncationPolicy {
        TruncationPolicy { n0: 1, extra_budget: self.config.window.truncation_budget }
    }

    fn twisted(&self, s: i64) -> Result<GradedModulePresentation, SectionsError> {
        GradedModulePresentation::free(self.alg.clone(), &[s])
    }

    fn record(&self, suite: Suite, item: impl Into<String>) -> Record {
        Record {
            suite,
            item: item.into(),
            position: None,
            internal_degree: None,
            rank: 0,
            expected: None,
            strategy: "exact".into(),
            certificate: None,
        }
    }
}

/// C(x + n, n) as a polynomial in x: the Hilbert polynomial of ℙⁿ.
fn hilbert(n: usize, x: i64) -> i64 {
    let mut num: i128 = 1;
    let mut den: i128 = 1;
    for i in 1..=n as i128 {
        num *= x as i128 + i;
        den *= i;
    }
    (num / den) as i64
}

fn sections_check(name: impl Into<String>, e: &SectionsError) -> Check {
    match e {
        SectionsError::BeyondPresentation { .. } => Check::inconclusive(name, e.to_string()),
        _ => Check::new(name, false, Some(e.to_string())),
    }
}

fn beilinson_check(name: impl Into<String>, e: &BeilinsonError) -> Check {
    match e {
        BeilinsonError::Inconclusive(reason) => Check::inconclusive(name, reason.clone()),
        BeilinsonError::Sections(s) => sections_check(name, s),
        _ => Check::new(name, false, Some(e.to_string())),
    }
}

fn cell_certificate(c: &Cell) -> String {
    match &c.status {
        CellStatus::Certified(s) => format!(
            "stable at N={} (rank {} at N+1, transition rank {}{})",
            s.truncation,
            s.rank_next,
            s.transition_rank,
            if s.linear_resolutions { "" } else { ", resolution not linear" }
        ),
        CellStatus::Inconclusive { reason } => format!("inconclusive: {reason}"),
    }
}

/// Pass when nothing is wrong, inconclusive when every cell at fault is an
/// uncertified one, fail otherwise.
fn cells_check(name: impl Into<String>, pass: bool, at_fault: &[&Cell], detail: String) -> Check {
    let name = name.into();
    if pass {
        return Check::new(name, true, None);
    }
    if !at_fault.is_empty() && at_fault.iter().all(|c| !c.certified()) {
        let open: Vec<String> = at_fault.iter().map(|c| format!("(k={}, j={})", c.k, c.j)).collect();
        Check::inconclusive(name, format!("truncation budget exhausted at {}", open.join(" ")))
    } else {
        Check::new(name, false, Some(detail))
    }
}

pub fn run_suite(ctx: &Context, suite: Suite) -> SuiteReport {
    match suite {
        Suite::Validate => validate(ctx),
        Suite::Pbw => pbw(ctx),
        Suite::Dual => dual(ctx),
        Suite::Koszul => koszul(ctx),
        Suite::Diagonal => diagonal(ctx),
        Suite::Gorenstein => gorenstein(ctx),
        Suite::Tau => tau(ctx),
        Suite::Beilinson => beilinson(ctx),
        Suite::Ktheory => ktheory(ctx),
        Suite::Ideals => ideals(ctx),
    }
}

fn validate(ctx: &Context) -> SuiteReport {
    let r = ctx.pres.validate();
    let checks = r
        .results
        .iter()
        .map(|a| {
            let name = match a.axiom {
                Axiom::Antisymmetry => "antisymmetry",
                Axiom::AnchorCompatibility => "anchor compatibility",
                Axiom::Jacobi => "jacobi",
            };
            let detail = a.counterexample.as_ref().map(|c| {
                format!("{} residual {}", c.join(", "), a.residual.clone().unwrap_or_default())
            });
            Check::new(name, a.pass, detail)
        })
        .collect();
    SuiteReport::from_checks(Suite::Validate, checks, Vec::new())
}

fn pbw(ctx: &Context) -> SuiteReport {
    let d = ctx.config.window.degree as u32;
    let r = ctx.alg.pbw_check(d);
    let records = r
        .ranks
        .iter()
        .zip(&r.expected_ranks)
        .enumerate()
        .map(|(i, (rank, exp))| Record {
            internal_degree: Some(i as i64),
            rank: *rank as i64,
            expected: Some(*exp as i64),
            strategy: "normal form".into(),
            ..ctx.record(Suite::Pbw, "dim U_i")
        })
        .collect();
    let checks = vec![
        Check::new("ranks", r.ranks == r.expected_ranks, None),
        Check::new(
            "products",
            r.pass,
            Some(format!(
                "{} pairs checked, {} with t-corrections{}",
                r.pairs_checked,
                r.products_with_corrections,
                r.first_failure.map(|f| format!(", first failure {f}")).unwrap_or_default()
            )),
        ),
    ];
    SuiteReport::from_checks(Suite::Pbw, checks, records)
}

fn dual(ctx: &Context) -> SuiteReport {
    let n1 = ctx.n() as i64 + 1;
    let dual = QuadraticDual::build(&ctx.pres);
    let mut records = Vec::new();
    let mut checks = Vec::new();
    let mut ranks_ok = true;
    for i in 0..=n1 + 1 {
        let (rank, exp) = (dual.rank(i), dual.expected_rank(i));
        ranks_ok &= rank == exp;
        records.push(Record {
            internal_degree: Some(i),
            rank: rank as i64,
            expected: Some(exp as i64),
            ..ctx.record(Suite::Dual, "rank of the dual")
        });
    }
    checks.push(Check::new("ranks", ranks_ok, None));
    for i in 0..=n1 {
        let name = format!("frobenius {i}");
        checks.push(match frobenius_pairing(&dual, i) {
            Ok(f) => Check::new(
                name,
                f.left_invertible && f.right_invertible && f.graded_symmetric,
                Some(format!("determinants {} and {}", f.left_determinant, f.right_determinant)),
            ),
            Err(e) => Check::new(name, false, Some(e.to_string())),
        });
    }
    let rel = verify_dual_relations(&dual);
    checks.push(Check::new(
        "dual relations",
        rel.pass && rel.residuals.is_empty(),
        Some(format!(
            "{} relations against {} elements, rank {} of {}, {} residuals",
            rel.relations_checked,
            rel.r_elements,
            rel.relation_rank,
            rel.expected_rank,
            rel.residuals.len()
        )),
    ));
    if ctx.alg.base_is_field() {
        match ext_algebra_check(&ctx.alg, &dual, n1 as usize) {
            Ok(r) => {
                for (k, (d, e)) in r.ext_dims.iter().zip(&r.dual_dims).enumerate() {
                    records.push(Record {
                        position: Some(k as i64),
                        internal_degree: Some(-(k as i64)),
                        rank: *d as i64,
                        expected: Some(*e as i64),
                        certificate: Some("minimal resolution".into()),
                        ..ctx.record(Suite::Dual, "dim Ext^k")
                    });
                }
                checks.push(Check::new("ext algebra", r.pass, r.failure));
            }
            Err(e) => checks.push(Check::new("ext algebra", false, Some(e.to_string()))),
        }
    }
    SuiteReport::from_checks(Suite::Dual, checks, records)
}

fn strategy_name(s: ExactnessStrategy) -> &'static str {
    match s {
        ExactnessStrategy::Field => "field",
        ExactnessStrategy::UnivariateSmith => "univariate smith",
        ExactnessStrategy::WeightGraded => "weight graded",
        ExactnessStrategy::FractionFieldOnly => "fraction field",
    }
}

fn homology_record(ctx: &Context, suite: Suite, item: &str, e: &HomologyEntry) -> Record {
    let mut certificate = e.certificate.map(|c| match c {
        RankCertificate::ModularSaturation => "modular rank saturates".to_string(),
        RankCertificate::ExactElimination => "exact elimination".to_string(),
    });
    if !e.torsion.is_empty() {
        certificate = Some(format!("torsion {}", e.torsion.join(", ")));
    }
    Record {
        item: match e.weight {
            Some(w) => format!("{item}, weight {w}"),
            None => item.to_string(),
        },
        position: Some(e.position as i64),
        internal_degree: Some(e.degree),
        rank: e.rank as i64,
        expected: Some(e.expected as i64),
        strategy: strategy_name(e.strategy).into(),
        certificate,
        ..ctx.record(suite, "")
    }
}

/// Homology ranks over the fraction field from boundary ranks at seeded
/// evaluation points. Torsion is not seen.
fn evaluation_homology(ctx: &Context, c: &GradedComplex, name: &str) -> Result<(bool, Vec<Record>), KoszulError> {
    let seed = ctx.config.seed;
    let strategy = RankStrategy::Evaluation { points: EVALUATION_POINTS, seed };
    let mut ok = true;
    let mut records = Vec::new();
    for p in c.min_twist()..=ctx.config.window.degree {
        let mut ranks = Vec::with_capacity(c.len());
        for i in 1..c.len() {
            ranks.push(c.boundary_matrix(i, p)?.rank(strategy)?.rank);
        }
        for i in 0..c.len() {
            let out = if i > 0 { ranks[i - 1] } else { 0 };
            let inc = ranks.get(i).copied().unwrap_or(0);
            let h = c.dim(i, p) - out - inc;
            let expected = match (&c.augmentation, i) {
                (Some(a), 0) => a.rank_in_degree(p),
                _ => 0,
            };
            ok &= h == expected;
            records.push(Record {
                position: Some(i as i64),
                internal_degree: Some(p),
                rank: h as i64,
                expected: Some(expected as i64),
                strategy: "evaluation".into(),
                certificate: Some(format!("{EVALUATION_POINTS} points, seed {seed}; torsion not checked")),
                ..ctx.record(Suite::Koszul, name)
            });
        }
    }
    Ok((ok, records))
}

fn koszul(ctx: &Context) -> SuiteReport {
    let dual = QuadraticDual::build(&ctx.pres);
    let mut checks = Vec::new();
    let mut records = Vec::new();
    let complexes = [("left", left_koszul(ctx.alg.clone(), &dual)), ("right", right_koszul(ctx.alg.clone(), &dual))];
    for (name, c) in complexes {
        let c = match c {
            Ok(c) => c,
            Err(e) => {
                checks.push(Check::new(format!("{name}: construction"), false, Some(e.to_string())));
                continue;
            }
        };
        if ctx.config.strategy == Strategy::Evaluation && !ctx.alg.base_is_field() {
            checks.push(Check::new(format!("{name}: d² = 0"), c.first_nonzero_square().is_none(), None));
            match evaluation_homology(ctx, &c, name) {
                Ok((ok, recs)) => {
                    checks.push(Check::new(format!("{name}: exact"), ok, None));
                    records.extend(recs);
                }
                Err(e) => checks.push(Check::new(format!("{name}: exact"), false, Some(e.to_string()))),
            }
            continue;
        }
        match verify_resolution(&c, ctx.config.window.degree) {
            Ok(r) => {
                checks.push(Check::new(format!("{name}: d² = 0"), r.d_squared_zero, None));
                let detail = (!r.failures.is_empty()).then(|| r.failures.iter().take(5).cloned().collect::<Vec<_>>().join("; "));
                checks.push(Check::new(format!("{name}: exact"), r.pass, detail));
                records.extend(r.entries.iter().map(|e| homology_record(ctx, Suite::Koszul, name, e)));
            }
            Err(e) => checks.push(Check::new(format!("{name}: exact"), false, Some(e.to_string()))),
        }
    }
    SuiteReport::from_checks(Suite::Koszul, checks, records)
}

fn diagonal(ctx: &Context) -> SuiteReport {
    let w = ctx.config.window;
    let dual = QuadraticDual::build(&ctx.pres);
    let d = match diagonal_resolution(ctx.alg.clone(), &dual, (w.p, w.q)) {
        Ok(d) => d,
        Err(e) => return SuiteReport::from_checks(Suite::Diagonal, vec![Check::new("construction", false, Some(e.to_string()))], Vec::new()),
    };
    let mut records = Vec::new();
    let mut bad = Vec::new();
    let mut cokernels_ok = true;
    for b in &d.bidegrees {
        let target = ctx.alg.dim(b.p + b.q);
        cokernels_ok &= b.homology.first() == Some(&target);
        if !b.pass {
            bad.push(format!("({}, {})", b.p, b.q));
        }
        for (i, h) in b.homology.iter().enumerate() {
            records.push(Record {
                position: Some(i as i64),
                internal_degree: Some(b.p + b.q),
                rank: *h as i64,
                expected: Some(if i == 0 { target as i64 } else { 0 }),
                certificate: Some(format!("terms {:?}", b.term_dims)),
                ..ctx.record(Suite::Diagonal, format!("p={} q={}", b.p, b.q))
            });
        }
    }
    let checks = vec![
        Check::new("top Ω vanishes", d.top_omega_vanishes, None),
        Check::new("exact in every bidegree", bad.is_empty(), (!bad.is_empty()).then(|| bad.join(" "))),
        Check::new("degree-0 cokernel is U^{p+q}", cokernels_ok, None),
    ];
    SuiteReport::from_checks(Suite::Diagonal, checks, records)
}

fn gorenstein(ctx: &Context) -> SuiteReport {
    let n1 = ctx.n() as i64 + 1;
    let dual = QuadraticDual::build(&ctx.pres);
    let r = match gorenstein_verify(ctx.alg.clone(), &dual, ctx.config.window.degree) {
        Ok(r) => r,
        Err(e) => return SuiteReport::from_checks(Suite::Gorenstein, vec![sections_check("dualized complex", &e)], Vec::new()),
    };
    let records = r.homology.entries.iter().map(|e| homology_record(ctx, Suite::Gorenstein, "dualized complex", e)).collect();
    let detail = (!r.homology.failures.is_empty()).then(|| r.homology.failures.iter().take(5).cloned().collect::<Vec<_>>().join("; "));
    let checks = vec![
        Check::new("line in degree -(n+1)", r.line_degree == -n1, Some(format!("line at {}", r.line_degree))),
        Check::new("concentrated at the end", r.pass && r.homology.nonzero_positions() == vec![0], detail),
    ];
    SuiteReport::from_checks(Suite::Gorenstein, checks, records)
}

fn cell_record(ctx: &Context, suite: Suite, item: &str, c: &Cell, expected: Option<i64>) -> Record {
    Record {
        position: Some(c.k as i64),
        internal_degree: Some(c.j),
        rank: c.rank as i64,
        expected,
        strategy: "truncation".into(),
        certificate: Some(cell_certificate(c)),
        ..ctx.record(suite, item)
    }
}

fn tau(ctx: &Context) -> SuiteReport {
    let n = ctx.n();
    let top = n as i64 + 1;
    let w = ctx.config.window;
    let policy = ctx.policy();
    let mut checks = Vec::new();
    let mut records = Vec::new();
    match tau_vanishing_verify(ctx.alg.clone(), w.degrees(n), w.k_max(n), policy) {
        Ok(r) => {
            let mut bad = Vec::new();
            for c in &r.cells {
                let expected = if c.k as i64 == top { ctx.alg.dim(-c.j - top) } else { 0 };
                if c.rank as i64 != expected as i64 || !c.certified() {
                    bad.push(c);
                }
                records.push(cell_record(ctx, Suite::Tau, "R^kτ(Ũ)", c, Some(expected as i64)));
            }
            let violating: Vec<&Cell> = r.cells.iter().filter(|c| r.violations.contains(&(c.k, c.j))).collect();
            let detail = format!("violations at {:?}", r.violations);
            checks.push(cells_check("vanishing pattern", r.violations.is_empty(), &violating, detail));
            let top_fault: Vec<&Cell> = bad.iter().copied().filter(|c| c.k as i64 == top).collect();
            checks.push(cells_check("top degree is the dual of Ũ", r.top_matches_dual, &top_fault, format!("{} mismatched cells", bad.len())));
        }
        Err(e) => checks.push(sections_check("vanishing pattern", &e)),
    }
    // Hom blocks between the transformed tilting summands, and higher Ext
    // between them as R^kωπ(Ũ) over [−n, n].
    match hom_blocks(ctx, &mut records) {
        Ok(c) => checks.push(c),
        Err(e) => checks.push(beilinson_check("hom blocks", &e)),
    }
    let u = ctx.twisted(0);
    match u.and_then(|u| derived_sections_window(&u, (-(n as i64), n as i64), n, policy)) {
        Ok(t) => {
            let higher: Vec<&Cell> = t.sections.iter().filter(|c| c.k >= 1).collect();
            for c in &higher {
                records.push(cell_record(ctx, Suite::Tau, "R^kωπ(Ũ)", c, Some(0)));
            }
            let ok = t.conclusive && higher.iter().all(|c| c.rank == 0 && c.certified());
            let mut fault: Vec<&Cell> = higher.iter().copied().filter(|c| c.rank != 0).collect();
            fault.extend(t.sections.iter().chain(&t.torsion).filter(|c| !c.certified()));
            checks.push(cells_check("higher Ext vanishes", ok, &fault, "nonzero higher sections".into()));
        }
        Err(e) => checks.push(sections_check("higher Ext vanishes", &e)),
    }
    SuiteReport::from_checks(Suite::Tau, checks, records)
}

fn hom_blocks(ctx: &Context, records: &mut Vec<Record>) -> Result<Check, BeilinsonError> {
    let n = ctx.n();
    let e = BeilinsonAlgebra::build(ctx.alg.clone())?;
    let mut q = Vec::with_capacity(n + 1);
    for l in 0..=n {
        let t = transform(&e, &ctx.twisted(l as i64)?, ctx.policy())?;
        if t.nonzero_degrees() != vec![0] {
            return Ok(Check::new("hom blocks", false, Some(format!("Ũ({l}) transforms into degrees {:?}", t.nonzero_degrees()))));
        }
        q.push(t.modules[0].clone());
    }
    let mut ok = true;
    for i in 0..=n {
        for j in 0..=n {
            let d = hom_dim(&q[i], &q[j]);
            let expected = if j >= i { ctx.alg.dim((j - i) as i64) } else { 0 };
            ok &= d == expected && e.block_dim(i, j) == expected;
            records.push(Record {
                position: Some(i as i64),
                internal_degree: Some(j as i64 - i as i64),
                rank: d as i64,
                expected: Some(expected as i64),
                ..ctx.record(Suite::Tau, format!("dim Hom(Q{i}, Q{j})"))
            });
        }
    }
    Ok(Check::new("hom blocks", ok, None))
}

fn method_certificate(r: &RoundTripReport) -> String {
    let method = match &r.method {
        Some(RoundTripMethod::Counit) => "counit".to_string(),
        Some(RoundTripMethod::IsomorphismSearch { solutions }) => {
            format!("isomorphism search over {solutions} solutions, seed {}", r.seed)
        }
        Some(RoundTripMethod::Zero) => "both sides vanish".to_string(),
        None => "none".to_string(),
    };
    format!("{method}; tail [{}, {}]; N={}", r.tail.0, r.tail.1, r.truncation)
}

fn roundtrip_records(ctx: &Context, label: &str, r: &RoundTripReport, records: &mut Vec<Record>) {
    for m in r.transform.iter().filter(|m| r.nonzero_degrees.contains(&m.cohomological_degree)) {
        for (i, d) in m.dims.iter().enumerate() {
            records.push(Record {
                position: Some(m.cohomological_degree as i64),
                internal_degree: Some(-(i as i64)),
                rank: *d as i64,
                strategy: "round trip".into(),
                certificate: Some(method_certificate(r)),
                ..ctx.record(Suite::Beilinson, format!("transform {label}"))
            });
        }
    }
}

fn homogenized(ctx: &Context, t: &IdealTarget) -> Result<GradedModulePresentation, SectionsError> {
    let gens: Vec<&str> = t.generators.iter().map(String::as_str).collect();
    let gens = parse_generators(&ctx.alg, &gens)?;
    Ok(homogenize_ideal(ctx.alg.clone(), &gens, t.top, t.depth, t.exact_through)?.presentation)
}

fn beilinson(ctx: &Context) -> SuiteReport {
    let e = match BeilinsonAlgebra::build(ctx.alg.clone()) {
        Ok(e) => e,
        Err(err) => return SuiteReport::from_checks(Suite::Beilinson, vec![beilinson_check("associativity", &err)], Vec::new()),
    };
    let mut checks = vec![Check::new(
        "associativity",
        e.report.failures == 0 && e.report.idempotents_ok,
        Some(format!("{} triples, total dimension {}", e.report.triples_checked, e.total_dim())),
    )];
    let mut records = Vec::new();
    let tail = TailWindow { start: None, width: ctx.config.window.tail };
    let mut targets: Vec<(String, Result<GradedModulePresentation, SectionsError>)> =
        ctx.config.targets.twists(ctx.n()).into_iter().map(|s| (format!("Ũ({s})"), ctx.twisted(s))).collect();
    for t in &ctx.config.targets.ideals {
        targets.push((format!("ideal {}", t.label()), homogenized(ctx, t)));
    }
    for (label, m) in targets {
        let name = format!("round trip {label}");
        let m = match m {
            Ok(m) => m,
            Err(err) => {
                checks.push(sections_check(name, &err));
                continue;
            }
        };
        match roundtrip_check(&e, &m, ctx.policy(), tail, ctx.config.seed) {
            Ok(r) => {
                roundtrip_records(ctx, &label, &r, &mut records);
                checks.push(Check::new(name, r.pass, r.reason.clone().or_else(|| Some(method_certificate(&r)))));
            }
            Err(err) => checks.push(beilinson_check(name, &err)),
        }
    }
    SuiteReport::from_checks(Suite::Beilinson, checks, records)
}

fn ktheory(ctx: &Context) -> SuiteReport {
    let n = ctx.n();
    let (lo, hi) = ctx.config.window.degrees(n);
    let policy = ctx.policy();
    let mut checks = Vec::new();
    let mut records = Vec::new();
    let e = match BeilinsonAlgebra::build(ctx.alg.clone()) {
        Ok(e) => Some(e),
        Err(err) => {
            checks.push(beilinson_check("algebra E", &err));
            None
        }
    };
    for s in ctx.config.targets.twists(n) {
        let label = format!("Ũ({s})");
        let m = match ctx.twisted(s) {
            Ok(m) => m,
            Err(err) => {
                checks.push(sections_check(format!("k_class {label}"), &err));
                continue;
            }
        };
        match k_class(&m, policy) {
            Ok((k, _)) => {
                for (j, c) in k.components.iter().enumerate() {
                    records.push(Record { position: Some(j as i64), rank: *c, ..ctx.record(Suite::Ktheory, format!("k_class {label}")) });
                }
                for i in 0..=n {
                    records.push(Record { position: Some(i as i64), rank: k.chern(i), ..ctx.record(Suite::Ktheory, format!("chern {label}")) });
                }
                if let Some(e) = &e {
                    let name = format!("k_class {label} is the class of its transform");
                    match transform(e, &m, policy) {
                        Ok(t) => {
                            let from_t = KClassVector::of_emodules(&t.modules);
                            checks.push(Check::new(name, from_t == k, Some(format!("{:?} vs {:?}", from_t.components, k.components))));
                        }
                        Err(err) => checks.push(beilinson_check(name, &err)),
                    }
                }
            }
            Err(err) => checks.push(beilinson_check(format!("k_class {label}"), &err)),
        }
        let name = format!("χ {label}");
        match derived_sections_window(&m, (lo, hi), n, policy) {
            Ok(t) if t.conclusive => {
                let mut ok = true;
                for j in lo..=hi {
                    let chi = t.euler_characteristic(j);
                    let expected = hilbert(n, s + j);
                    ok &= chi == expected;
                    records.push(Record {
                        internal_degree: Some(j),
                        rank: chi,
                        expected: Some(expected),
                        strategy: "truncation".into(),
                        ..ctx.record(Suite::Ktheory, name.clone())
                    });
                }
                checks.push(Check::new(name, ok, None));
            }
            Ok(_) => checks.push(Check::inconclusive(name, "sections did not stabilize within the truncation budget")),
            Err(err) => checks.push(sections_check(name, &err)),
        }
    }
    SuiteReport::from_checks(Suite::Ktheory, checks, records)
}

fn ideals(ctx: &Context) -> SuiteReport {
    let mut checks = Vec::new();
    let mut records = Vec::new();
    for t in &ctx.config.targets.ideals {
        let label = t.label();
        let name = format!("saturation {label}");
        let gens: Vec<&str> = t.generators.iter().map(String::as_str).collect();
        let options = SaturationOptions { top: t.top, depth: t.depth, exact_through: t.exact_through, ..SaturationOptions::default() };
        match ideal_saturation_check(ctx.alg.clone(), &gens, options, ctx.policy()) {
            Ok(r) => {
                for (e, d) in &r.ideal.dims {
                    records.push(Record {
                        internal_degree: Some(*e),
                        rank: *d as i64,
                        ..ctx.record(Suite::Ideals, format!("dim Ĩ_e {label}"))
                    });
                }
                for c in &r.torsion {
                    records.push(cell_record(ctx, Suite::Ideals, &format!("R^kτ(Ĩ) {label}"), c, Some(0)));
                }
                for c in r.sections.iter().filter(|c| c.k == 0) {
                    let expected = if c.j < 0 { Some(0) } else { r.ideal.dims.iter().find(|(e, _)| *e == c.j).map(|(_, d)| *d as i64) };
                    records.push(cell_record(ctx, Suite::Ideals, &format!("ωπ(Ĩ) {label}"), c, expected));
                }
                let mut fault: Vec<&Cell> = r.torsion.iter().chain(&r.sections).filter(|c| !c.certified()).collect();
                if !r.ideal.saturation_stable || !r.ideal.presentation_consistent || fault.is_empty() {
                    fault.clear();
                }
                let detail = format!(
                    "torsion free {}, sections match {}, saturation stable {}, presentation consistent {}",
                    r.torsion_free, r.sections_match, r.ideal.saturation_stable, r.ideal.presentation_consistent
                );
                checks.push(cells_check(name, r.pass, &fault, detail));
            }
            Err(err) => checks.push(beilinson_check(name, &err)),
        }
    }
    SuiteReport::from_checks(Suite::Ideals, checks, records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hilbert_polynomial_of_the_plane() {
        assert_eq!(hilbert(2, 0), 1);
        assert_eq!(hilbert(2, 2), 6);
        assert_eq!(hilbert(2, -1), 0);
        assert_eq!(hilbert(2, -3), 1);
        assert_eq!(hilbert(1, -3), -2);
    }
}
