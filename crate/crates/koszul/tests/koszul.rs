use std::sync::Arc;

use algebroid::{abelian, sl2, weyl, AlgebroidPresentation};
use exactalg::{binomial, int, BaseRing, Rat};
use koszul::*;
use quaddual::QuadraticDual;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rees::resolution::Resolution;
use rees::ReesAlgebra;

fn sl2_on_line() -> AlgebroidPresentation {
    let base = BaseRing::polynomial(["x"]);
    let mut p = sl2();
    p.base = base.clone();
    p.anchor = vec![
        vec![base.parse("1").unwrap()],
        vec![base.parse("-x^2").unwrap()],
        vec![base.parse("-2*x").unwrap()],
    ];
    assert!(p.validate().pass());
    p
}

fn setup(p: &AlgebroidPresentation) -> (Arc<ReesAlgebra>, QuadraticDual) {
    (Arc::new(ReesAlgebra::new(p.clone())), QuadraticDual::build(p))
}

fn left(p: &AlgebroidPresentation) -> GradedComplex {
    let (alg, dual) = setup(p);
    left_koszul(alg, &dual).unwrap()
}

fn right(p: &AlgebroidPresentation) -> GradedComplex {
    let (alg, dual) = setup(p);
    right_koszul(alg, &dual).unwrap()
}

#[test]
fn abelian_one_matches_the_classical_koszul_complex() {
    // ℚ[t,x]: 0 → S(−2) → S(−1)² → S, with dims C(2,i)·(p−i+1) in degree p
    let c = left(&abelian(1));
    assert_eq!(c.len(), 3);
    for p in 0..6 {
        for i in 0..3 {
            let expect = binomial(2, i as i64) * (p - i as i64 + 1).max(0);
            assert_eq!(c.dim(i, p) as i64, expect);
        }
    }
    // first boundary in degree 1 sends the two generators to t and x
    let d1 = c.boundary_qmat(1, 1).unwrap();
    assert_eq!(d1.rank(), 2);
    assert!(d1.rows.iter().all(|r| r.len() == 1 && r[0].1 == int(1)));
    // second boundary in degree 2 is ±(x ⊗ φ_t − t ⊗ φ_x)
    let d2 = c.boundary_qmat(2, 2).unwrap();
    assert_eq!(d2.nrows, 1);
    let row = &d2.rows[0];
    assert_eq!(row.len(), 2);
    assert_eq!(&row[0].1 + &row[1].1, int(0));
    assert!(row[0].1 == int(1) || row[0].1 == int(-1));
    // the two entries sit in different generator blocks
    let (off, _) = c.layout(1, 2);
    assert!(row[0].0 < off[1] && row[1].0 >= off[1]);
    let r = verify_resolution(&c, 8).unwrap();
    assert!(r.pass, "{:?}", r.failures);
}

#[test]
fn koszul_complexes_are_exact_on_point_examples() {
    for p in [abelian(1), abelian(2), sl2()] {
        for c in [left(&p), right(&p)] {
            let r = verify_resolution(&c, 8).unwrap();
            assert!(r.d_squared_zero);
            assert!(r.pass, "{}: {:?}", c.label, r.failures);
            assert_eq!(r.rank_at(0, 0), 1);
            for d in 1..=8 {
                assert_eq!(r.rank_at(0, d), 0);
            }
        }
    }
}

#[test]
fn weyl_complexes_are_exact_over_the_line() {
    for c in [left(&weyl(1)), right(&weyl(1))] {
        let r = verify_resolution(&c, 8).unwrap();
        assert_eq!(r.strategy, ExactnessStrategy::UnivariateSmith);
        assert!(r.pass, "{}: {:?}", c.label, r.failures);
    }
}

#[test]
fn weight_slices_agree_with_smith_strategy_on_weyl() {
    let c = left(&weyl(1));
    let r = verify_resolution_with(&c, 4, StrategyChoice::WeightGraded { span: 3 }).unwrap();
    assert_eq!(r.strategy, ExactnessStrategy::WeightGraded);
    assert!(r.pass, "{:?}", r.failures);
    // H⁰ in degree 0 is O = ℚ[x]: one dimension per weight ≥ 0
    assert!(r.entries.iter().any(|e| e.position == 0 && e.degree == 0 && e.weight == Some(2) && e.rank == 1));
}

#[test]
fn action_algebroid_complexes_are_exact() {
    let p = sl2_on_line();
    for c in [left(&p), right(&p)] {
        let r = verify_resolution(&c, 5).unwrap();
        assert!(r.pass, "{}: {:?}", c.label, r.failures);
    }
}

/// Right boundary at position i compared with (−1)^{i−1} times the left one;
/// returns the PBW monomials of the columns where they differ.
fn signed_differences(l: &GradedComplex, r: &GradedComplex, i: usize, d: i64) -> Vec<Vec<u32>> {
    let (a, b) = (l.boundary_matrix(i, d).unwrap(), r.boundary_matrix(i, d).unwrap());
    assert_eq!((a.rows, a.cols), (b.rows, b.cols));
    let sign = if i % 2 == 1 { int(1) } else { int(-1) };
    let (off, _) = l.layout(i - 1, d);
    let mut out = Vec::new();
    for row in 0..a.rows {
        for col in 0..a.cols {
            if a.entries[row][col] != b.entries[row][col].scale(&sign) {
                let h = off.partition_point(|o| *o <= col) - 1;
                let deg = d - l.terms[i - 1].generators[h].degree;
                out.push(l.algebra().graded_piece(deg as u32).basis[col - off[h]].clone());
            }
        }
    }
    out
}

#[test]
fn abelian_left_and_right_boundaries_agree_up_to_koszul_sign() {
    for p in [abelian(1), abelian(2)] {
        let (l, r) = (left(&p), right(&p));
        for d in 0..5 {
            for i in 1..l.len() {
                assert!(signed_differences(&l, &r, i, d).is_empty());
            }
        }
    }
}

#[test]
fn weyl_boundaries_have_constant_coefficients_and_agree_up_to_sign() {
    // t and ∂ commute and no functions enter the boundary coefficients, so no
    // straightening term survives
    let (l, r) = (left(&weyl(1)), right(&weyl(1)));
    for d in 0..7 {
        for i in 1..l.len() {
            assert!(l.boundary_matrix(i, d).unwrap().is_constant());
            assert!(signed_differences(&l, &r, i, d).is_empty());
        }
    }
}

#[test]
fn action_algebroid_first_boundaries_differ_by_t_terms() {
    let p = sl2_on_line();
    let (l, r) = (left(&p), right(&p));
    let mut seen = 0;
    for d in 1..4 {
        for m in signed_differences(&l, &r, 1, d) {
            assert!(m[0] > 0, "difference outside the t-part: {m:?}");
            seen += 1;
        }
    }
    assert!(seen > 0);
}

#[test]
fn hbar_family_has_constant_homology() {
    let profile = |hbar: i64| {
        let p = sl2().scaled(&int(hbar));
        let r = verify_resolution(&left(&p), 6).unwrap();
        r.entries.iter().map(|e| (e.position, e.degree, e.rank)).collect::<Vec<_>>()
    };
    let base = profile(1);
    assert_eq!(profile(0), base);
    assert_eq!(profile(2), base);
}

#[test]
fn localization_commutes_with_specialization() {
    let p = weyl(1);
    let c = left(&p);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..3 {
        let x = Rat::new(rng.gen_range(-50..50).into(), rng.gen_range(1..20).into());
        let pt = specialize(&p, std::slice::from_ref(&x));
        let s = left(&pt);
        for d in 0..5 {
            for i in 1..c.len() {
                let evaluated = c.boundary_matrix(i, d).unwrap().transpose().eval(std::slice::from_ref(&x));
                assert_eq!(evaluated, s.boundary_qmat(i, d).unwrap(), "degree {d} position {i}");
            }
        }
    }
}

#[test]
fn term_ranks_match_a_minimal_resolution() {
    // the Koszul complex is linear and minimal, so its ranks are the Betti
    // numbers of O computed by syzygies
    for p in [abelian(2), sl2()] {
        let (alg, dual) = setup(&p);
        let c = left_koszul(alg.clone(), &dual).unwrap();
        let res = Resolution::of_truncation(&alg, 1, c.len(), 6).unwrap();
        for (i, t) in c.terms.iter().enumerate() {
            assert_eq!(t.rank(), res.modules[i].rank());
            assert!(res.modules[i].degrees.iter().all(|&d| d == i as i64));
            assert!(t.generators.iter().all(|g| g.degree == i as i64));
        }
    }
}

#[test]
fn dropping_the_top_boundary_shows_homology_at_the_top() {
    let c = left(&weyl(1)).without_top_boundary();
    let r = verify_resolution(&c, 4).unwrap();
    assert!(!r.pass);
    assert!(r.nonzero_positions().contains(&2));
}

#[test]
fn bicomplex_ranks_and_commutation() {
    let (alg, dual) = setup(&abelian(1));
    let b = build_bicomplex(alg, &dual).unwrap();
    for k in 0..4i64 {
        assert_eq!(b.middle_rank(k) as i64, binomial(2, k));
    }
    let (alg, dual) = setup(&sl2());
    let b = build_bicomplex(alg, &dual).unwrap();
    assert_eq!(b.middle_rank(2), 6);
    assert_eq!(b.term_dim(1, 1, 2, 2), 4 * 6 * 4);
    let c = b.commutator(1, 1, 2, 2).unwrap();
    assert!(c.is_zero());
    assert_eq!(c.nrows, 96);
}

#[test]
fn bicomplex_of_polynomial_base_is_refused() {
    let (alg, dual) = setup(&weyl(1));
    assert_eq!(build_bicomplex(alg, &dual).unwrap_err(), KoszulError::NeedsPointBase);
}

#[test]
fn truncated_total_complex_and_euler_identity() {
    for p in [abelian(1), sl2()] {
        let (alg, dual) = setup(&p);
        let b = build_bicomplex(alg.clone(), &dual).unwrap();
        for pp in 0..=2 {
            for q in 0..=2 {
                let r = b.total_report(pp, q).unwrap();
                assert_eq!(r.euler_characteristic, alg.dim(pp + q) as i64);
                assert!(r.pass, "{r:?}");
            }
        }
    }
}

#[test]
fn diagonal_resolution_of_the_affine_plane_direction() {
    let (alg, dual) = setup(&abelian(1));
    let d = diagonal_resolution(alg, &dual, (4, 4)).unwrap();
    assert_eq!(d.bidegrees.len(), 25);
    assert!(d.pass, "{:?}", d.bidegrees.iter().filter(|b| !b.pass).collect::<Vec<_>>());
    let b22 = d.bidegrees.iter().find(|b| b.p == 2 && b.q == 2).unwrap();
    assert_eq!(b22.homology[0], 5);
    let b00 = d.bidegrees.iter().find(|b| b.p == 0 && b.q == 0).unwrap();
    assert_eq!(b00.term_dims[0], 1);
    assert_eq!(b00.homology, vec![1, 0, 0]);
    assert!(d.top_omega_vanishes);
}

#[test]
fn diagonal_resolution_of_sl2() {
    let (alg, dual) = setup(&sl2());
    let d = diagonal_resolution(alg, &dual, (3, 3)).unwrap();
    assert!(d.pass);
    for b in &d.bidegrees {
        assert_eq!(b.homology[0] as i64, binomial(3 + b.p + b.q, 3));
    }
}

#[test]
fn omega_modules() {
    let (alg, dual) = setup(&abelian(1));
    let o0 = omega_r(alg.clone(), &dual, 0, 4).unwrap();
    for q in 0..=4 {
        assert_eq!(o0.dim(q), alg.dim(q));
    }
    let o1 = omega_r(alg.clone(), &dual, 1, 6).unwrap();
    assert_eq!(o1.generator_degrees(), vec![2]);
    // Ω¹ ≅ Ũ(−2): dims 0, 0, 1, 2, 3, …
    for q in 0..=6 {
        assert_eq!(o1.dim(q), alg.dim(q - 2));
    }
    assert!(omega_r(alg.clone(), &dual, 2, 6).unwrap().is_zero());
    let l1 = omega_l(alg, &dual, 1, 6).unwrap();
    assert_eq!(l1.dims, o1.dims);
}

#[test]
fn dual_complex_of_abelian_one_is_a_shifted_line() {
    let c = left(&abelian(1));
    let mut d = c.dual();
    d.augmentation = Some(Augmentation { label: "ω".into(), lines: vec![(-2, 0)] });
    let r = verify_resolution(&d, 4).unwrap();
    assert!(r.pass, "{:?}", r.failures);
    assert_eq!(r.rank_at(0, -2), 1);
}
