use edsforge_core::symkernel::{gcd, q, rank_q, solve_linear, Mono, Poly, Rat, Symbol, SymbolKind, Q};
use num_traits::{One, Zero};
use proptest::prelude::*;

type Terms = Vec<([u32; 3], i64)>;

fn syms() -> [Symbol; 3] {
    ["pa", "pb", "pc"].map(|n| Symbol::intern_any(n, SymbolKind::Parameter))
}

fn build(terms: &Terms) -> Poly {
    let s = syms();
    let terms = terms
        .iter()
        .map(|(e, c)| {
            let mut m = Mono::one();
            for k in 0..3 {
                if e[k] > 0 {
                    m = m.mul(&Mono::var(s[k], e[k]));
                }
            }
            (m, Q::from_integer((*c).into()))
        })
        .collect();
    Poly::from_terms(terms)
}

// Evaluates the term list itself, never a Poly.
fn terms_at(terms: &Terms, pt: &[Q; 3]) -> Q {
    let mut acc = Q::zero();
    for (e, c) in terms {
        let mut t = Q::from_integer((*c).into());
        for k in 0..3 {
            for _ in 0..e[k] {
                t *= &pt[k];
            }
        }
        acc += t;
    }
    acc
}

fn poly_at(p: &Poly, pt: &[Q; 3]) -> Q {
    let s = syms();
    let mut acc = Q::zero();
    for (m, c) in p.terms() {
        let mut t = c.clone();
        for (v, e) in m.factors() {
            let k = s.iter().position(|x| *x == v).unwrap();
            for _ in 0..e {
                t *= &pt[k];
            }
        }
        acc += t;
    }
    acc
}

fn rat_at(r: &Rat, pt: &[Q; 3]) -> Option<Q> {
    let d = poly_at(r.denom(), pt);
    if d.is_zero() {
        None
    } else {
        Some(poly_at(r.numer(), pt) / d)
    }
}

fn terms() -> impl Strategy<Value = Terms> {
    prop::collection::vec(([0u32..3, 0u32..3, 0u32..3], -6i64..7), 0..5)
}

fn point() -> impl Strategy<Value = [Q; 3]> {
    [(-7i64..8, 1i64..4), (-7i64..8, 1i64..4), (-7i64..8, 1i64..4)].prop_map(|v| v.map(|(n, d)| q(n, d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ring_operations_match_evaluation(a in terms(), b in terms(), pt in point()) {
        let (pa, pb) = (build(&a), build(&b));
        let (va, vb) = (terms_at(&a, &pt), terms_at(&b, &pt));
        prop_assert_eq!(poly_at(&pa.add(&pb), &pt), &va + &vb);
        prop_assert_eq!(poly_at(&pa.sub(&pb), &pt), &va - &vb);
        prop_assert_eq!(poly_at(&pa.mul(&pb), &pt), &va * &vb);
        prop_assert_eq!(poly_at(&pa.pow(3), &pt), &va * &va * &va);
    }

    #[test]
    fn polynomial_laws(a in terms(), b in terms(), c in terms()) {
        let (pa, pb, pc) = (build(&a), build(&b), build(&c));
        prop_assert_eq!(pa.mul(&pb), pb.mul(&pa));
        prop_assert_eq!(pa.mul(&pb.add(&pc)), pa.mul(&pb).add(&pa.mul(&pc)));
        prop_assert_eq!(pa.add(&pb).add(&pc), pa.add(&pb.add(&pc)));
        prop_assert!(pa.sub(&pa).is_zero());
    }

    #[test]
    fn derivative_matches_power_rule(a in terms(), k in 0usize..3) {
        let s = syms();
        let mut d: Terms = Vec::new();
        for (e, c) in &a {
            if e[k] > 0 {
                let mut e2 = *e;
                e2[k] -= 1;
                d.push((e2, c * e[k] as i64));
            }
        }
        prop_assert_eq!(build(&a).diff(s[k]), build(&d));
    }

    #[test]
    fn derivative_is_linear_and_leibniz(a in terms(), b in terms(), k in 0usize..3, c in -5i64..6) {
        let v = syms()[k];
        let (pa, pb) = (build(&a), build(&b));
        let cq = Q::from_integer(c.into());
        prop_assert_eq!(pa.scale(&cq).add(&pb).diff(v), pa.diff(v).scale(&cq).add(&pb.diff(v)));
        prop_assert_eq!(pa.mul(&pb).diff(v), pa.diff(v).mul(&pb).add(&pa.mul(&pb.diff(v))));
    }

    #[test]
    fn normalization_is_idempotent(a in terms(), b in terms()) {
        let pb = build(&b);
        prop_assume!(!pb.is_zero());
        let r = Rat::new(build(&a), pb).unwrap();
        let again = Rat::new(r.numer().clone(), r.denom().clone()).unwrap();
        prop_assert_eq!(&again, &r);
        prop_assert_eq!(again.numer(), r.numer());
    }

    #[test]
    fn linear_solve_matches_cramer(m in prop::collection::vec((-6i64..7, 1i64..4), 9), rhs in prop::collection::vec((-6i64..7, 1i64..4), 3)) {
        let a: Vec<Vec<Q>> = m.chunks(3).map(|r| r.iter().map(|&(n, d)| q(n, d)).collect()).collect();
        let b: Vec<Q> = rhs.iter().map(|&(n, d)| q(n, d)).collect();
        let det = |a: &[Vec<Q>]| {
            &a[0][0] * (&a[1][1] * &a[2][2] - &a[1][2] * &a[2][1]) - &a[0][1] * (&a[1][0] * &a[2][2] - &a[1][2] * &a[2][0])
                + &a[0][2] * (&a[1][0] * &a[2][1] - &a[1][1] * &a[2][0])
        };
        let d = det(&a);
        prop_assume!(!d.is_zero());
        let unknowns = ["ya", "yb", "yc"].map(|n| Symbol::intern_any(n, SymbolKind::Unknown));
        let eqs: Vec<Rat> = (0..3).map(|i| {
            let mut e = Rat::from_q(-b[i].clone());
            for k in 0..3 {
                e = e.add(&Rat::var(unknowns[k]).mul(&Rat::from_q(a[i][k].clone())));
            }
            e
        }).collect();
        let sol = solve_linear(&eqs, &unknowns).unwrap();
        for k in 0..3 {
            let mut ak = a.clone();
            for i in 0..3 {
                ak[i][k] = b[i].clone();
            }
            prop_assert_eq!(sol.value(unknowns[k]).cloned(), Some(Rat::from_q(det(&ak) / &d)));
        }
    }

    #[test]
    fn exact_division_recovers_factor(a in terms(), b in terms()) {
        let (pa, pb) = (build(&a), build(&b));
        prop_assume!(!pb.is_zero());
        prop_assert_eq!(pa.mul(&pb).div_exact(&pb), Some(pa));
    }

    #[test]
    fn gcd_contains_common_factor(a in terms(), b in terms(), g in terms()) {
        let (pa, pb, pg) = (build(&a), build(&b), build(&g));
        prop_assume!(!pg.is_zero() && !pa.is_zero() && !pb.is_zero());
        let h = gcd(&pa.mul(&pg), &pb.mul(&pg));
        prop_assert!(h.div_exact(&pg).is_some(), "gcd {:?} misses {:?}", h, pg);
        prop_assert!(pa.mul(&pg).div_exact(&h).is_some());
        prop_assert!(pb.mul(&pg).div_exact(&h).is_some());
    }

    #[test]
    fn rational_functions_are_canonical(a in terms(), b in terms(), g in terms(), pt in point()) {
        let (pa, pb, pg) = (build(&a), build(&b), build(&g));
        prop_assume!(!pb.is_zero() && !pg.is_zero());
        let r = Rat::new(pa.clone(), pb.clone()).unwrap();
        let r2 = Rat::new(pa.mul(&pg), pb.mul(&pg)).unwrap();
        prop_assert_eq!(&r, &r2);
        if let (Some(v), false) = (rat_at(&r, &pt), terms_at(&b, &pt).is_zero()) {
            prop_assert_eq!(v, terms_at(&a, &pt) / terms_at(&b, &pt));
        }
    }

    #[test]
    fn rational_field_operations(a in terms(), b in terms(), c in terms(), d in terms(), pt in point()) {
        let (pb, pd) = (build(&b), build(&d));
        prop_assume!(!pb.is_zero() && !pd.is_zero());
        let x = Rat::new(build(&a), pb).unwrap();
        let y = Rat::new(build(&c), pd).unwrap();
        let (vb, vd) = (terms_at(&b, &pt), terms_at(&d, &pt));
        prop_assume!(!vb.is_zero() && !vd.is_zero());
        let (vx, vy) = (terms_at(&a, &pt) / vb, terms_at(&c, &pt) / vd);
        prop_assert_eq!(rat_at(&x.add(&y), &pt), Some(&vx + &vy));
        prop_assert_eq!(rat_at(&x.mul(&y), &pt), Some(&vx * &vy));
        if !y.is_zero() && !vy.is_zero() {
            prop_assert_eq!(rat_at(&x.div(&y).unwrap(), &pt), Some(&vx / &vy));
        }
        prop_assert!(x.sub(&x).is_zero());
    }

    #[test]
    fn linear_solve_recovers_planted_solution(
        m in prop::collection::vec(prop::collection::vec(-4i64..5, 3), 3..6),
        x in [-5i64..6, -5i64..6, -5i64..6],
    ) {
        let unknowns = ["xa", "xb", "xc"].map(|n| Symbol::intern_any(n, SymbolKind::Unknown));
        let eqs: Vec<Rat> = m.iter().map(|row| {
            let mut e = Rat::from_int(-(row[0] * x[0] + row[1] * x[1] + row[2] * x[2]));
            for k in 0..3 {
                e = e.add(&Rat::var(unknowns[k]).scale(&q(row[k], 1)));
            }
            e
        }).collect();
        let sol = solve_linear(&eqs, &unknowns).unwrap();
        prop_assert!(sol.is_consistent());
        let qm: Vec<Vec<Q>> = m.iter().map(|r| r.iter().map(|&v| q(v, 1)).collect()).collect();
        if rank_q(qm) == 3 {
            for k in 0..3 {
                prop_assert_eq!(sol.value(unknowns[k]).cloned(), Some(Rat::from_int(x[k])));
            }
        }
        let mut bad = eqs.clone();
        bad.push(eqs[0].add(&Rat::one()));
        prop_assert!(!solve_linear(&bad, &unknowns).unwrap().is_consistent());
    }

    #[test]
    fn rank_of_product_is_bounded(k in 1usize..4, b in prop::collection::vec(-3i64..4, 20), c in prop::collection::vec(-3i64..4, 20)) {
        // (5×k)(k×4): rank ≤ k, and equal to k when the factors have full rank.
        let bm: Vec<Vec<Q>> = (0..5).map(|i| (0..k).map(|j| q(b[i * 4 + j], 1)).collect()).collect();
        let cm: Vec<Vec<Q>> = (0..k).map(|i| (0..4).map(|j| q(c[i * 4 + j], 1)).collect()).collect();
        let prod: Vec<Vec<Q>> = bm.iter().map(|r| (0..4).map(|j| (0..k).map(|t| &r[t] * &cm[t][j]).sum()).collect()).collect();
        let r = rank_q(prod);
        prop_assert!(r <= k);
        if rank_q(bm.clone()) == k && rank_q(cm.clone()) == k {
            prop_assert_eq!(r, k);
        }
    }
}

#[test]
fn ratio_is_reduced() {
    let [a, b, _] = syms();
    let (pa, pb) = (Poly::var(a), Poly::var(b));
    let r = Rat::new(pa.mul(&pa).sub(&pb.mul(&pb)), pa.sub(&pb)).unwrap();
    assert_eq!(r, Rat::from_poly(pa.add(&pb)));
    assert!(r.denom().is_one());
}

#[test]
fn division_by_zero_is_an_error() {
    assert!(Rat::one().div(&Rat::zero()).is_err());
    assert!(Rat::new(Poly::one(), Poly::zero()).is_err());
    assert_eq!(Rat::from_ratio(6, 4), Rat::from_q(q(3, 2)));
    assert!(Q::one() > Q::zero());
}
