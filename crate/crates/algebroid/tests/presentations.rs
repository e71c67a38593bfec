use algebroid::{builtin, sl2, AlgebroidPresentation, Axiom, Builtin, LieTable};
use exactalg::{int, rat, BaseRing, Poly};

/// sl₂ acting on the line by the vector fields ∂, −x²∂, −2x∂.
fn sl2_on_line() -> AlgebroidPresentation {
    let base = BaseRing::polynomial(["x"]);
    let mut p = sl2();
    p.base = base.clone();
    p.bracket = p.bracket.iter().map(|r| r.iter().map(|c| c.clone()).collect()).collect();
    p.anchor = vec![
        vec![base.parse("1").unwrap()],
        vec![base.parse("-x^2").unwrap()],
        vec![base.parse("-2*x").unwrap()],
    ];
    p
}

#[test]
fn corrupted_sl2_fails_jacobi_on_e_f_h() {
    let mut p = sl2();
    // only the (e, f) entry is changed; [f, e] keeps its original value
    p.bracket[0][1][2] = Poly::from_int(2);
    let r = p.validate();
    assert!(!r.pass());
    let jac = r.get(Axiom::Jacobi);
    assert!(!jac.pass);
    assert_eq!(jac.counterexample.as_deref(), Some(&["e".to_string(), "f".into(), "h".into()][..]));
    // hand expansion: [2h,h] + [2f,e] + [2e,f] with [f,e] = −h and [e,f] = 2h gives 2h
    assert_eq!(p.jacobiator(0, 1, 2), vec![Poly::zero(), Poly::zero(), Poly::from_int(2)]);
    assert!(!r.get(Axiom::Antisymmetry).pass);
}

#[test]
fn action_algebroid_validates() {
    let p = sl2_on_line();
    assert!(p.validate().pass());
    assert_eq!(p.weight_grading(), Some(vec![-1, 1, 0]));
}

#[test]
fn anchor_that_is_not_a_lie_map_is_rejected() {
    let mut p = sl2_on_line();
    p.anchor[1] = vec![p.base.parse("x^2").unwrap()];
    let r = p.validate();
    assert!(!r.get(Axiom::AnchorCompatibility).pass);
}

#[test]
fn hbar_family_stays_valid() {
    for b in [Builtin::LieAlgebra(LieTable::sl2()), Builtin::Weyl(1), Builtin::Abelian(3)] {
        let p = builtin(&b).unwrap();
        for h in [rat(1, 2), int(2), int(-3)] {
            assert!(p.scaled(&h).validate().pass());
        }
        let z = p.scaled(&int(0));
        assert!(z.bracket.iter().flatten().flatten().all(|c| c.is_zero()));
        assert!(z.anchor_is_zero());
    }
    assert!(sl2_on_line().scaled(&rat(3, 7)).validate().pass());
}

#[test]
fn jacobi_holds_on_every_ordered_triple_for_valid_tables() {
    let p = sl2_on_line();
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                assert!(p.jacobiator(i, j, k).iter().all(|c| c.is_zero()));
            }
        }
    }
}
