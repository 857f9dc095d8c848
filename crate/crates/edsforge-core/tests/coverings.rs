mod common;

use common::*;
use edsforge_core::coverings::*;
use std::sync::Arc;

use edsforge_core::symkernel::Rat;
use proptest::prelude::*;

#[test]
fn linear_covering_commutes() {
    let ch = heavenly(4);
    let c = covering(&ch, &lambda());
    let ext = extend_chart(&ch, &c, 3).unwrap();
    let rep = zero_curvature_check(&ext, &c, 1).unwrap();
    for k in &rep.checks {
        assert!(k.zero, "{}: {}", k.name, k.text);
    }
}

#[test]
fn nonlinear_covering_commutes() {
    let ch = heavenly(4);
    let c = covering(&ch, &fv(0, 0));
    let ext = extend_chart(&ch, &c, 3).unwrap();
    let rep = zero_curvature_check(&ext, &c, 1).unwrap();
    assert!(rep.passed(), "{:?}", rep.checks.iter().filter(|k| !k.zero).collect::<Vec<_>>());
}

#[test]
fn flow_lifts_parameter() {
    let ch = heavenly(4);
    let c0 = covering(&ch, &Rat::zero());
    let c1 = covering(&ch, &lambda());
    let ext = extend_chart(&ch, &c1, 3).unwrap();
    let z = Rat::zero;
    let o = Rat::one;
    // X = t ∂_z + x ∂_y
    let n = vec![vec![z(), z(), z(), z()], vec![z(), z(), z(), z()], vec![z(), o(), z(), z()], vec![o(), z(), z(), z()]];
    let p = PointTransform::linear_flow(&n, &lambda()).unwrap();
    let out = apply_point_transform(&ext, &c0, &p).unwrap();
    for (a, r) in &out.rules {
        assert_eq!(r, c1.rule(*a).unwrap(), "dir {}", a);
    }
    let g = BaseGenerator { xi: vec![z(), z(), Rat::var(ch.base()[1]), Rat::var(ch.base()[0])], phi: z() };
    assert!(symmetry_residual(&ch, &g).unwrap().is_zero());
    let (outcome, rep) = lift_obstruction(&ext, &c1, &g, 1).unwrap();
    assert!(!rep.checks.is_empty());
    assert!(matches!(outcome, LiftOutcome::Inconsistent { .. }));
    let gl = BaseGenerator { xi: vec![z(), z(), Rat::var(ch.base()[0]), Rat::var(ch.base()[1])], phi: z() };
    assert!(!symmetry_residual(&ch, &gl).unwrap().is_zero());
    let gt = BaseGenerator { xi: vec![o(), z(), z(), z()], phi: z() };
    let (outcome, _) = lift_obstruction(&ext, &c1, &gt, 1).unwrap();
    match outcome {
        LiftOutcome::Liftable(p) => assert!(p.is_zero()),
        _ => panic!("translation must lift"),
    }
}

fn poly_term(ch: &edsforge_core::jetspace::JetChart, c: i64, a: &str, b: &str) -> Rat {
    let mut t = Rat::from_int(c);
    for l in [a, b] {
        t = t.mul(&match l {
            "" => Rat::one(),
            "vy" => fv(1, 0),
            "vz" => fv(0, 1),
            "lam" => lambda(),
            j => jet(ch, j),
        });
    }
    t
}

fn letters() -> impl Strategy<Value = &'static str> {
    prop::sample::select(vec!["", "yy", "yz", "zz", "ty", "vy", "vz", "lam"])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn we_conversion_round_trips(
        rt in prop::collection::vec((-3i64..4, letters(), letters()), 1..4),
        rx in prop::collection::vec((-3i64..4, letters(), letters()), 1..4),
        scale in 1i64..5,
        by_jet in any::<bool>(),
    ) {
        let ch = heavenly(4);
        let sum = |ts: &[(i64, &str, &str)]| ts.iter().fold(Rat::zero(), |acc, (c, a, b)| acc.add(&poly_term(&ch, *c, a, b)));
        let mut c = covering(&ch, &lambda());
        c.rules = vec![(0, sum(&rt)), (1, sum(&rx))];
        let ext = extend_chart(&ch, &c, 2).unwrap();
        let cf = Arc::new(chart_coframe(&ext, 2, &[]).unwrap());
        let we = covering_to_we(&ext, &c, cf.clone()).unwrap();
        let mut a = Rat::from_int(scale);
        if by_jet {
            a = a.add(&jet(&ch, "yy").mul(&jet(&ch, "yy")));
        }
        let w = WeForm { coframe: cf, form: we.form.scale(&a) };
        let (back, side) = we_to_covering(&ext, &w, "back", &c.params).unwrap();
        prop_assert_eq!(back.rule(0), c.rule(0));
        prop_assert_eq!(back.rule(1), c.rule(1));
        prop_assert_eq!(side.is_empty(), !by_jet);
    }

    #[test]
    fn fibre_derivatives_commute(terms in prop::collection::vec((-3i64..4, letters(), letters()), 1..5)) {
        let ch = heavenly(4);
        let ext = extend_chart(&ch, &covering(&ch, &lambda()), 3).unwrap();
        let e = terms.iter().fold(Rat::zero(), |acc, (c, a, b)| acc.add(&poly_term(&ch, *c, a, b)));
        for (p, q) in [(2, 3), (0, 2), (1, 3), (0, 1)] {
            let pq = ext.total_derivative(q, &ext.total_derivative(p, &e).unwrap()).unwrap();
            let qp = ext.total_derivative(p, &ext.total_derivative(q, &e).unwrap()).unwrap();
            prop_assert_eq!(ext.reduce(&pq).unwrap(), ext.reduce(&qp).unwrap(), "directions {} {}", p, q);
        }
    }
}
