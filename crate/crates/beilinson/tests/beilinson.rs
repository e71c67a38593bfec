use std::sync::Arc;

use algebroid::{abelian, sl2, AlgebroidPresentation};
use beilinson::*;
use rees::ReesAlgebra;
use sections::{derived_sections_window, parse_generators, homogenize_ideal, GradedModulePresentation, TruncationPolicy};

fn rees(p: AlgebroidPresentation) -> Arc<ReesAlgebra> {
    Arc::new(ReesAlgebra::new(p))
}

fn policy() -> TruncationPolicy {
    TruncationPolicy::default()
}

/// Number of monomials of degree d in m variables.
fn monomials(m: usize, d: usize) -> usize {
    fn go(m: usize, d: usize) -> usize {
        if m == 1 {
            return 1;
        }
        (0..=d).map(|k| go(m - 1, d - k)).sum()
    }
    go(m, d)
}

/// C(x, 2) as a polynomial in x: x(x − 1)/2, for any integer x.
fn poly_choose2(x: i64) -> i64 {
    x * (x - 1) / 2
}

fn twisted(a: &Arc<ReesAlgebra>, s: i64) -> GradedModulePresentation {
    GradedModulePresentation::free(a.clone(), &[s]).unwrap()
}

#[test]
fn kronecker_algebra_for_the_line() {
    let e = BeilinsonAlgebra::build(rees(abelian(1))).unwrap();
    assert_eq!(e.total_dim(), 4);
    assert_eq!(e.top_row(), vec![1, 2]);
    assert_eq!(e.block_dim(1, 1), 1);
    assert_eq!(e.report.failures, 0);
    assert!(e.report.idempotents_ok);
}

#[test]
fn sl2_blocks_count_monomials() {
    let a = rees(sl2());
    let e = BeilinsonAlgebra::build(a).unwrap();
    let expect: Vec<usize> = (0..4).map(|k| monomials(4, k)).collect();
    assert_eq!(e.top_row(), expect);
    assert_eq!(e.top_row(), vec![1, 4, 10, 20]);
    let total: usize = (0..4).flat_map(|i| (i..4).map(move |j| monomials(4, j - i))).sum();
    assert_eq!(e.total_dim(), total);
    assert!(e.report.triples_checked > 0 && e.report.failures == 0);
}

#[test]
fn transform_of_the_structure_sheaf() {
    for p in [abelian(1), abelian(2), sl2()] {
        let a = rees(p);
        let e = BeilinsonAlgebra::build(a.clone()).unwrap();
        let n = e.n;
        let t = transform(&e, &twisted(&a, 0), policy()).unwrap();
        let mut expect = vec![0; n + 1];
        expect[0] = 1;
        assert_eq!(t.modules[0].dims, expect);
        assert!(t.modules[0].actions.is_empty());
        assert_eq!(t.nonzero_degrees(), vec![0]);
        assert!(!t.higher_cohomology());
    }
}

#[test]
fn tilting_summands_go_to_projectives() {
    for p in [abelian(1), abelian(2), sl2()] {
        let a = rees(p);
        let e = BeilinsonAlgebra::build(a.clone()).unwrap();
        let n = e.n;
        for l in 0..=n {
            let t = transform(&e, &twisted(&a, l as i64), policy()).unwrap();
            assert_eq!(t.nonzero_degrees(), vec![0]);
            assert!(t.checks.iter().all(|c| c.pass()));
            let q = &t.modules[0];
            // components (U^l, U^{l−1}, …, U^0, 0, …)
            let dims: Vec<usize> = (0..=n).map(|i| if i <= l { monomials(n + 1, l - i) } else { 0 }).collect();
            assert_eq!(q.dims, dims, "Ũ({l})");
            let proj = EModule::projective(&e, l).unwrap();
            assert!(find_isomorphism(&proj, q, 7).is_some(), "Ũ({l}) vs Ee{l}");
        }
    }
}

#[test]
fn finite_length_modules_vanish() {
    let a = rees(abelian(2));
    let e = BeilinsonAlgebra::build(a.clone()).unwrap();
    for d in [-1, 0, 2] {
        let k = GradedModulePresentation::residue_field(a.clone(), d).unwrap();
        let t = transform(&e, &k, policy()).unwrap();
        assert!(t.modules.iter().all(|m| m.is_zero()), "ℚ[{d}]");
    }
}

#[test]
fn finite_junk_is_invisible() {
    let a = rees(abelian(1));
    let e = BeilinsonAlgebra::build(a.clone()).unwrap();
    let m = twisted(&a, 1);
    let junk = m.direct_sum(&GradedModulePresentation::residue_field(a.clone(), 0).unwrap()).unwrap();
    let (t1, t2) = (transform(&e, &m, policy()).unwrap(), transform(&e, &junk, policy()).unwrap());
    assert_eq!(t1.modules[0].dims, t2.modules[0].dims);
    assert!(find_isomorphism(&t1.modules[0], &t2.modules[0], 3).is_some());
    let r1 = roundtrip_check(&e, &m, policy(), TailWindow::default(), 1).unwrap();
    let r2 = roundtrip_check(&e, &junk, policy(), TailWindow::default(), 1).unwrap();
    assert!(r1.pass && r2.pass);
    let strip = |r: &RoundTripReport| r.transform.iter().map(|m| (m.dims.clone(), m.action_ranks.clone())).collect::<Vec<_>>();
    assert_eq!(strip(&r1), strip(&r2));
    assert_eq!(r1.resolution, r2.resolution);
}

#[test]
fn k_classes_on_the_projective_line() {
    let a = rees(abelian(1));
    let (k, _) = k_class(&twisted(&a, 0), policy()).unwrap();
    assert_eq!(k.components, vec![1, 0]);
    assert_eq!(k.chern(1), 1);
    let (k, _) = k_class(&twisted(&a, -1), policy()).unwrap();
    assert_eq!(k.components, vec![0, -1]);
    assert_eq!(k.chern(1), -1);
    assert_eq!(chern(&twisted(&a, -1), 1, policy()).unwrap(), -1);
}

#[test]
fn euler_characteristics_on_the_plane() {
    let a = rees(abelian(2));
    for i in 0..=2i64 {
        let t = derived_sections_window(&twisted(&a, -i), (-5, 2), 2, policy()).unwrap();
        assert!(t.conclusive);
        for j in -5..=2 {
            assert_eq!(t.euler_characteristic(j), poly_choose2(2 + j - i), "Ũ(−{i}), j = {j}");
        }
    }
}

#[test]
fn k_class_agrees_with_transform_and_is_additive() {
    let a = rees(abelian(2));
    let e = BeilinsonAlgebra::build(a.clone()).unwrap();
    for s in [-2, -1, 0, 1, 2] {
        let m = twisted(&a, s);
        let t = transform(&e, &m, policy()).unwrap();
        let (k, _) = k_class(&m, policy()).unwrap();
        assert_eq!(KClassVector::of_emodules(&t.modules), k, "Ũ({s})");
        for p in &t.modules {
            for cut in 0..2 {
                let (lo, hi) = (p.lower_part(cut), p.upper_part(cut));
                assert!(lo.verify(&e).unwrap().pass() && hi.verify(&e).unwrap().pass());
                let whole = KClassVector::of_emodules(std::slice::from_ref(p));
                let parts = KClassVector::of_emodules(&[lo]).add(&KClassVector::of_emodules(&[hi]));
                assert_eq!(whole, parts);
            }
        }
    }
}

#[test]
fn round_trips_on_tilting_summands() {
    for p in [abelian(1), abelian(2), sl2()] {
        let a = rees(p);
        let e = BeilinsonAlgebra::build(a.clone()).unwrap();
        for l in 0..=e.n as i64 {
            let r = roundtrip_check(&e, &twisted(&a, l), policy(), TailWindow::default(), 11).unwrap();
            assert!(r.pass, "Ũ({l}): {:?}", r.reason);
            assert_eq!(r.method, Some(RoundTripMethod::Counit));
            assert_eq!(r.resolution, vec![vec![l as usize]]);
        }
    }
}

#[test]
fn round_trips_on_negative_twists() {
    for p in [abelian(1), abelian(2), sl2()] {
        let a = rees(p);
        let e = BeilinsonAlgebra::build(a.clone()).unwrap();
        let n = e.n;
        for i in 1..=n as i64 {
            let r = roundtrip_check(&e, &twisted(&a, -i), policy(), TailWindow::default(), 5).unwrap();
            // these live in top cohomological degree only
            assert_eq!(r.nonzero_degrees, vec![n]);
            assert!(r.pass, "Ũ(−{i}): {:?}", r.reason);
            assert!(matches!(r.method, Some(RoundTripMethod::IsomorphismSearch { .. })));
        }
    }
}

#[test]
fn round_trips_on_homogenized_ideals() {
    let a = rees(abelian(1));
    let e = BeilinsonAlgebra::build(a.clone()).unwrap();
    for g in ["x", "x^2"] {
        let gens = parse_generators(&a, &[g]).unwrap();
        let ideal = homogenize_ideal(a.clone(), &gens, 4, 3, 20).unwrap();
        let r = roundtrip_check(&e, &ideal.presentation, policy(), TailWindow::default(), 2).unwrap();
        assert!(r.pass, "({g}): {:?}", r.reason);
        assert_eq!(r.nonzero_degrees, vec![1]);
    }
    let s = rees(sl2());
    let e = BeilinsonAlgebra::build(s.clone()).unwrap();
    let gens = parse_generators(&s, &["e", "h"]).unwrap();
    let ideal = homogenize_ideal(s, &gens, 5, 3, 14).unwrap();
    let r = roundtrip_check(&e, &ideal.presentation, policy(), TailWindow::default(), 2).unwrap();
    assert!(r.pass, "{:?}", r.reason);
    assert_eq!(r.nonzero_degrees, vec![2]);
    assert_eq!(r.transform[2].dims, vec![0, 0, 1, 2]);
}

#[test]
fn simple_at_the_last_vertex_comes_back_as_a_shifted_line() {
    let a = rees(abelian(1));
    let e = BeilinsonAlgebra::build(a.clone()).unwrap();
    let inv = inverse_transform(&e, &EModule::simple(1, 1)).unwrap();
    assert_eq!(inv.resolution.generators, vec![vec![1], vec![0, 0]]);
    let h0 = TailModule::from_homology(&a, &inv.terms, &inv.maps, 0, 3, 6).unwrap();
    let h1 = TailModule::from_homology(&a, &inv.terms, &inv.maps, 1, 3, 6).unwrap();
    assert!(h0.is_zero());
    let line = TailModule::from_presentation(&twisted(&a, -1), 3, 6).unwrap();
    let (solutions, iso) = tail_isomorphism(&h1, &line, 9);
    assert!(iso);
    assert_eq!(solutions, 1);
}

#[test]
fn projective_generator_goes_to_the_free_module() {
    let a = rees(sl2());
    let e = BeilinsonAlgebra::build(a.clone()).unwrap();
    let inv = inverse_transform(&e, &EModule::projective(&e, 0).unwrap()).unwrap();
    assert_eq!(inv.presentation.generators, vec![0]);
    assert!(inv.presentation.relations.is_empty());
    assert!(inv.maps.is_empty());
}

#[test]
fn hom_blocks_between_transformed_summands() {
    for p in [abelian(2), sl2()] {
        let a = rees(p);
        let e = BeilinsonAlgebra::build(a.clone()).unwrap();
        let n = e.n;
        let q: Vec<EModule> =
            (0..=n).map(|l| transform(&e, &twisted(&a, l as i64), policy()).unwrap().modules[0].clone()).collect();
        for i in 0..=n {
            for j in 0..=n {
                let expect = if j >= i { monomials(n + 1, j - i) } else { 0 };
                assert_eq!(hom_dim(&q[i], &q[j]), expect, "Hom(Q{i}, Q{j})");
                assert_eq!(e.block_dim(i, j), expect);
            }
        }
    }
}

#[test]
fn higher_sections_of_the_structure_sheaf_vanish_across_blocks() {
    for p in [abelian(1), abelian(2), sl2()] {
        let a = rees(p);
        let n = a.n() as i64;
        let t = derived_sections_window(&twisted(&a, 0), (-n, n), n as usize, policy()).unwrap();
        assert!(t.conclusive);
        for c in t.sections.iter().filter(|c| c.k >= 1) {
            assert_eq!(c.rank, 0, "R{}ωπ(Ũ)_{}", c.k, c.j);
        }
        for j in -n..=n {
            let expect = if j >= 0 { monomials(n as usize + 1, j as usize) } else { 0 };
            assert_eq!(t.sections_rank(0, j), Some(expect));
        }
    }
}

#[test]
fn saturation_of_listed_ideals() {
    let line = rees(abelian(1));
    let r = ideal_saturation_check(line.clone(), &["x"], SaturationOptions::default(), policy()).unwrap();
    assert!(r.pass, "{r:?}");
    let unit = ideal_saturation_check(line, &["1"], SaturationOptions::default(), policy()).unwrap();
    assert!(unit.pass);
    assert_eq!(unit.ideal.saturated_generators.len(), 1);
    let s = rees(sl2());
    let r = ideal_saturation_check(s.clone(), &["e", "h"], SaturationOptions::default(), policy()).unwrap();
    assert!(r.pass, "{r:?}");
    for (e, d) in &r.ideal.dims {
        assert_eq!(*d, s.dim(*e) - (*e as usize + 1));
    }
}

#[test]
fn point_base_is_required() {
    let a = rees(algebroid::weyl(1));
    assert_eq!(BeilinsonAlgebra::build(a).err(), Some(BeilinsonError::NeedsPointBase));
}
