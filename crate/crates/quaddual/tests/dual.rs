use algebroid::{abelian, sl2, weyl, AlgebroidPresentation};
use exactalg::{binomial, int, BaseRing, Poly, RankStrategy, RingMatrix};
use quaddual::{
    evaluate_on_r, ext_algebra_check, frobenius_pairing, l_exterior_derivative, lemma_relations, r_spanning_set,
    verify_dual_relations, verify_relations, DualRelation, JetBimodule, QuadraticDual,
};
use rees::{ReesAlgebra, ReesElement};

fn sl2_on_line() -> AlgebroidPresentation {
    let base = BaseRing::polynomial(["x"]);
    let mut p = sl2();
    p.base = base.clone();
    p.anchor = vec![
        vec![base.parse("1").unwrap()],
        vec![base.parse("-x^2").unwrap()],
        vec![base.parse("-2*x").unwrap()],
    ];
    p
}

fn examples() -> Vec<AlgebroidPresentation> {
    vec![abelian(1), abelian(2), weyl(1), sl2(), sl2_on_line()]
}

#[test]
fn exterior_derivative_examples() {
    let w = weyl(1);
    let m = l_exterior_derivative(&w, &[Poly::one()]);
    assert!(m[0][0].is_zero());
    for n in 1..4 {
        let a = abelian(n);
        let sigma: Vec<Poly> = (0..n).map(|k| Poly::from_int(k as i64 + 1)).collect();
        assert!(l_exterior_derivative(&a, &sigma).iter().flatten().all(|p| p.is_zero()));
    }
    // sl₂ with e < f < h; e* on (h ⊗ e) is −1
    let s = sl2();
    let m = l_exterior_derivative(&s, &[Poly::one(), Poly::zero(), Poly::zero()]);
    assert_eq!(m[2][0], Poly::from_int(-1));
    for a in 0..3 {
        for b in 0..3 {
            assert_eq!(m[a][b], -&m[b][a]);
        }
    }
}

#[test]
fn r_spanning_set_lies_in_the_kernel_of_multiplication() {
    // oracle: multiply out in the Rees algebra
    for p in examples() {
        let u = ReesAlgebra::new(p.clone());
        for (label, r) in r_spanning_set(&p) {
            let mut total = ReesElement::zero();
            for ((c, d), f) in &r {
                let prod = u.mul(&u.gen_element(*c), &u.gen_element(*d));
                total = total.add(&prod.scale_left(f));
            }
            assert!(total.is_zero(), "{label} does not vanish in U²");
        }
    }
}

#[test]
fn dual_relations_kill_r() {
    for p in examples() {
        let d = QuadraticDual::build(&p);
        let r = verify_dual_relations(&d);
        assert!(r.pass, "{:?}", r.residuals);
        assert!(r.residuals.is_empty());
        assert_eq!(r.relation_rank, binomial(p.rank() as i64 + 2, 2) as usize);
    }
}

#[test]
fn e_tensor_e_and_lemma_relations_vanish() {
    let p = sl2_on_line();
    let rs = r_spanning_set(&p);
    for rel in lemma_relations(&p) {
        for (_, r) in &rs {
            assert!(evaluate_on_r(&p, &rel.tensor, r).is_zero(), "{}", rel.label);
        }
    }
}

#[test]
fn injected_fault_is_reported() {
    let p = sl2();
    let mut rels = lemma_relations(&p);
    // σe + eσ − μ(σ) − σ∧σ'
    let k = rels.iter().position(|r| r.label.starts_with("e*⊗e")).unwrap();
    let mut t = rels[k].tensor.clone();
    *t.entry((1, 2)).or_insert_with(Poly::zero) = &t.get(&(1, 2)).cloned().unwrap_or_else(Poly::zero) - &Poly::one();
    *t.entry((2, 1)).or_insert_with(Poly::zero) = &t.get(&(2, 1)).cloned().unwrap_or_else(Poly::zero) + &Poly::one();
    rels[k] = DualRelation { label: "faulty".into(), tensor: t };
    let r = verify_relations(&p, &rels);
    assert!(!r.pass);
    assert!(r.residuals.iter().any(|(l, _, v)| l == "faulty" && v != "0"));
}

#[test]
fn wrong_mu_sign_in_the_table_is_caught() {
    // a dual built from a presentation with the bracket negated has μ of the
    // opposite sign; its relations must fail against the original R
    let p = sl2();
    let neg = p.scaled(&int(-1));
    let d = QuadraticDual::build(&neg);
    let r = verify_relations(&p, &d.degree_two_relations());
    assert!(!r.pass);
}

#[test]
fn weyl_dual_has_ranks_1_2_1() {
    let d = QuadraticDual::build(&weyl(1));
    assert_eq!((0..4).map(|i| d.rank(i)).collect::<Vec<_>>(), vec![1, 2, 1, 0]);
    let s = QuadraticDual::build(&sl2());
    assert_eq!((0..6).map(|i| s.rank(i)).collect::<Vec<_>>(), vec![1, 4, 6, 4, 1, 0]);
    for n in 1..4 {
        let a = QuadraticDual::build(&abelian(n));
        for i in 0..=n as i64 + 1 {
            assert_eq!(a.rank(i) as i64, binomial(n as i64 + 1, i));
        }
    }
}

#[test]
fn frobenius_pairings_are_perfect() {
    for p in examples() {
        let d = QuadraticDual::build(&p);
        let n1 = p.rank() as i64 + 1;
        for i in 0..=n1 {
            let f = frobenius_pairing(&d, i).unwrap();
            assert!(f.left_invertible && f.right_invertible);
            assert!(f.graded_symmetric, "degree {i}");
        }
        let f0 = frobenius_pairing(&d, 0).unwrap();
        assert_eq!(f0.matrix, vec![vec!["1".to_string()]]);
        assert!(frobenius_pairing(&d, n1 + 1).is_err());
    }
    let w = QuadraticDual::build(&weyl(1));
    let f = frobenius_pairing(&w, 1).unwrap();
    // basis {σ, e}: σ·σ = 0, σ·e = ω, e·σ = −ω, e·e = 0
    assert_eq!(f.matrix, vec![vec!["0".to_string(), "1".to_string()], vec!["-1".to_string(), "0".to_string()]]);
    let s = QuadraticDual::build(&sl2());
    let f = frobenius_pairing(&s, 2).unwrap();
    let raw = f.raw.unwrap();
    assert_eq!((raw.rows, raw.cols), (6, 6));
    assert_eq!(raw.rank(RankStrategy::ExactFractionField).unwrap().rank, 6);
}

#[test]
fn ext_algebra_matches_the_dual() {
    for (p, dims) in [(abelian(2), vec![1, 3, 3, 1, 0]), (sl2(), vec![1, 4, 6, 4, 1])] {
        let alg = ReesAlgebra::new(p.clone());
        let d = QuadraticDual::build(&p);
        let r = ext_algebra_check(&alg, &d, 4).unwrap();
        assert_eq!(r.ext_dims, dims);
        assert!(r.pass, "{r:?}");
        assert!(r.e_squared_vanishes);
        assert!(r.hom_boundary_vanishes);
    }
}

#[test]
fn ext_needs_point_base() {
    let alg = ReesAlgebra::new(weyl(1));
    let d = QuadraticDual::build(&weyl(1));
    assert!(ext_algebra_check(&alg, &d, 2).is_err());
}

#[test]
fn right_form_and_jets() {
    let p = sl2_on_line();
    let d = QuadraticDual::build(&p);
    let x = Poly::var(0);
    // x·σ_e·e in right form: σ_e e x + Σ σ_eσ_k τ_k(x)
    let a = quaddual::DualElement::term(x.clone(), quaddual::DualMono { mask: 1, e: true });
    let r = d.right_form(&a);
    assert_eq!(d.from_right_form(&r), a);
    assert!(r.terms.len() > 1);
    let alg = ReesAlgebra::new(p);
    assert!(JetBimodule::first_jet_sequence_holds(&alg).unwrap());
    let j2 = JetBimodule::new(&alg, 2);
    assert_eq!(j2.rank, 10);
    let l = j2.left_action(&alg, &x).unwrap();
    assert!(!l.is_constant());
    let _ = RingMatrix::identity(1);
}

#[test]
fn ext_orientation_is_recorded() {
    let alg = ReesAlgebra::new(sl2());
    let d = QuadraticDual::build(&sl2());
    let r = ext_algebra_check(&alg, &d, 4).unwrap();
    assert_eq!(r.orientation, Some(quaddual::Orientation::Same));
    assert!(!r.opposite_matches);
}
