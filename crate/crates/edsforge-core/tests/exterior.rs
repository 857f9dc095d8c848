use edsforge_core::exterior::{ideal_member_wedge, ideal_residual_lenient, Coframe, Form, Gen, Mode, ScalarRule, Slot};
use edsforge_core::symkernel::{Rat, Symbol, SymbolKind, Q};
use num_traits::Zero;
use proptest::prelude::*;

/// Two coordinates and the Maurer-Cartan forms of so(3).
struct Frame {
    cf: Coframe,
    x: [Symbol; 2],
    gens: Vec<Gen>,
}

fn frame() -> Frame {
    let mut cf = Coframe::new();
    let x = ["ex1", "ex2"].map(|n| Symbol::intern_any(n, SymbolKind::BaseVariable));
    let mut gens = vec![cf.add_coordinate(x[0]).unwrap(), cf.add_coordinate(x[1]).unwrap()];
    let e: Vec<Gen> = ["e1", "e2", "e3"].iter().map(|n| cf.add_abstract(n).unwrap()).collect();
    for k in 0..3 {
        let (a, b) = (e[(k + 1) % 3], e[(k + 2) % 3]);
        let rule = cf.g(a).wedge(&cf.g(b)).unwrap();
        cf.set_rule(e[k], rule).unwrap();
    }
    gens.extend(e);
    Frame { cf, x, gens }
}

/// Terms: coefficient, exponents of the coordinates, generator indices.
type Terms = Vec<(i64, [u32; 2], Vec<usize>)>;

fn coeff(f: &Frame, c: i64, e: [u32; 2]) -> Rat {
    let mut r = Rat::from_int(c);
    for k in 0..2 {
        for _ in 0..e[k] {
            r = r.mul(&Rat::var(f.x[k]));
        }
    }
    r
}

fn build(f: &Frame, terms: &Terms) -> Form {
    let mut out = f.cf.zero();
    for (c, e, gs) in terms {
        let mut t = f.cf.scalar(coeff(f, *c, *e));
        for &g in gs {
            t = t.wedge(&f.cf.g(f.gens[g])).unwrap();
        }
        out = out.add(&t).unwrap();
    }
    out
}

fn terms(deg: usize) -> impl Strategy<Value = Terms> {
    prop::collection::vec((-5i64..6, [0u32..3, 0u32..3], prop::collection::vec(0usize..5, deg..=deg)), 0..4)
}

fn rank(mut m: Vec<Vec<Q>>) -> usize {
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        for i in r + 1..m.len() {
            let f = &m[i][c] / &m[r][c];
            for k in c..cols {
                let v = &f * &m[r][k];
                m[i][k] -= v;
            }
        }
        r += 1;
    }
    r
}

const PAIRS: [(usize, usize); 10] = [(0, 1), (0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)];

/// Coefficients of `u ∧ w` on the ordered pairs.
fn wedge_coeffs(u: &[Q], w: &[Q]) -> Vec<Q> {
    PAIRS.iter().map(|&(p, q)| &u[p] * &w[q] - &u[q] * &w[p]).collect()
}

fn sign(p: usize) -> Rat {
    if p % 2 == 0 {
        Rat::one()
    } else {
        Rat::from_int(-1)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn d_squared_vanishes(p in 0usize..3, s in terms(2)) {
        let f = frame();
        let s: Terms = s.into_iter().map(|(c, e, g)| (c, e, g[..p].to_vec())).collect();
        let a = build(&f, &s);
        let da = f.cf.d(&a).unwrap();
        prop_assert!(f.cf.d(&da).unwrap().is_zero(), "d d {}", f.cf.render(&a));
    }

    #[test]
    fn leibniz_rule(p in 0usize..3, q in 0usize..3, s in terms(2), t in terms(2)) {
        let f = frame();
        let a = build(&f, &s.into_iter().map(|(c, e, g)| (c, e, g[..p].to_vec())).collect());
        let b = build(&f, &t.into_iter().map(|(c, e, g)| (c, e, g[..q].to_vec())).collect());
        let lhs = f.cf.d(&a.wedge(&b).unwrap()).unwrap();
        let rhs = f.cf.d(&a).unwrap().wedge(&b).unwrap().add(&a.wedge(&f.cf.d(&b).unwrap()).unwrap().scale(&sign(p))).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn graded_commutativity(p in 1usize..3, q in 1usize..3, s in terms(2), t in terms(2)) {
        let f = frame();
        let a = build(&f, &s.into_iter().map(|(c, e, g)| (c, e, g[..p].to_vec())).collect());
        let b = build(&f, &t.into_iter().map(|(c, e, g)| (c, e, g[..q].to_vec())).collect());
        prop_assert_eq!(a.wedge(&b).unwrap(), b.wedge(&a).unwrap().scale(&sign(p * q)));
    }

    #[test]
    fn wedge_is_associative_and_bilinear(s in terms(1), t in terms(1), u in terms(1), k in -4i64..5) {
        let f = frame();
        let (a, b, c) = (build(&f, &s), build(&f, &t), build(&f, &u));
        prop_assert_eq!(a.wedge(&b).unwrap().wedge(&c).unwrap(), a.wedge(&b.wedge(&c).unwrap()).unwrap());
        prop_assert_eq!(a.add(&b).unwrap().wedge(&c).unwrap(), a.wedge(&c).unwrap().add(&b.wedge(&c).unwrap()).unwrap());
        let r = Rat::from_int(k);
        prop_assert_eq!(a.scale(&r).wedge(&b).unwrap(), a.wedge(&b).unwrap().scale(&r));
        prop_assert!(a.wedge(&a).unwrap().is_zero());
    }

    #[test]
    fn d_of_a_function_is_its_gradient(s in terms(0)) {
        let f = frame();
        let a = build(&f, &s);
        let c = a.coeff(&[]);
        let mut grad = f.cf.zero();
        for k in 0..2 {
            // power rule on the term list
            let mut dk = Rat::zero();
            for (cc, e, _) in &s {
                if e[k] > 0 {
                    let mut e2 = *e;
                    e2[k] -= 1;
                    dk = dk.add(&coeff(&f, cc * e[k] as i64, e2));
                }
            }
            grad = grad.add(&f.cf.g(f.gens[k]).scale(&dk)).unwrap();
        }
        prop_assert_eq!(f.cf.d(&f.cf.scalar(c)).unwrap(), grad);
    }

    #[test]
    fn ideal_contains_its_combinations(
        gens in prop::collection::vec(prop::collection::vec(-3i64..4, 5), 1..4),
        alphas in prop::collection::vec(terms(1), 3),
    ) {
        let f = frame();
        let ls: Vec<Form> = gens.iter().map(|row| {
            let mut l = f.cf.zero();
            for (k, &c) in row.iter().enumerate() {
                l = l.add(&f.cf.g(f.gens[k]).scale(&Rat::from_int(c))).unwrap();
            }
            l
        }).filter(|l| !l.is_zero()).collect();
        prop_assume!(!ls.is_empty());
        let mut a = f.cf.zero();
        for (l, s) in ls.iter().zip(&alphas) {
            a = a.add(&build(&f, s).wedge(l).unwrap()).unwrap();
        }
        let r = ideal_residual_lenient(&f.cf, &a, &ls).unwrap();
        prop_assert!(r.member, "residual {}", f.cf.render(&r.residual));
        for l in &ls {
            prop_assert!(ideal_residual_lenient(&f.cf, l, &ls).unwrap().member);
        }
        // a 1-form outside the span
        let b = build(&f, &alphas[0]);
        let wedge_test = ideal_member_wedge(&f.cf, &b, &ls).unwrap();
        prop_assert_eq!(ideal_residual_lenient(&f.cf, &b, &ls).unwrap().member, wedge_test);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn basis_expansion_rebuilds(p in 0usize..4, s in terms(3)) {
        let f = frame();
        let a = build(&f, &s.into_iter().map(|(c, e, g)| (c, e, g[..p].to_vec())).collect());
        prop_assert_eq!(f.cf.rebuild(&f.cf.expand_in_basis(&a)).unwrap(), a);
    }

    /// Membership of a constant 2-form against brute-force solvability of
    /// `a = Σ α_i ∧ g_i` over Q.
    #[test]
    fn membership_agrees_with_linear_algebra(
        gens in prop::collection::vec(prop::collection::vec(-2i64..3, 5), 1..4),
        target in prop::collection::vec(-2i64..3, 10),
        alphas in prop::collection::vec(prop::collection::vec(-2i64..3, 5), 3),
        planted in any::<bool>(),
    ) {
        let f = frame();
        let qs = |v: &[i64]| v.iter().map(|&c| Q::from_integer(c.into())).collect::<Vec<Q>>();
        let one = |v: &[Q]| v.iter().enumerate().fold(f.cf.zero(), |acc, (k, c)| acc.add(&f.cf.g(f.gens[k]).scale(&Rat::from_q(c.clone()))).unwrap());
        let gv: Vec<Vec<Q>> = gens.iter().map(|g| qs(g)).filter(|g| g.iter().any(|c| !c.is_zero())).collect();
        prop_assume!(!gv.is_empty());
        let b: Vec<Q> = if planted {
            gv.iter().zip(&alphas).fold(vec![Q::zero(); 10], |acc, (g, al)| {
                acc.iter().zip(wedge_coeffs(&qs(al), g)).map(|(x, y)| x + y).collect()
            })
        } else {
            qs(&target)
        };
        let mut a = f.cf.zero();
        for (k, &(p, q)) in PAIRS.iter().enumerate() {
            a = a.add(&f.cf.g(f.gens[p]).wedge(&f.cf.g(f.gens[q])).unwrap().scale(&Rat::from_q(b[k].clone()))).unwrap();
        }
        // columns: e_k ∧ g_i for every basis k and generator i
        let mut cols: Vec<Vec<Q>> = Vec::new();
        for g in &gv {
            for k in 0..5 {
                let mut e = vec![Q::zero(); 5];
                e[k] = Q::from_integer(1.into());
                cols.push(wedge_coeffs(&e, g));
            }
        }
        let m: Vec<Vec<Q>> = (0..10).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect();
        let aug: Vec<Vec<Q>> = m.iter().zip(&b).map(|(row, x)| row.iter().cloned().chain([x.clone()]).collect()).collect();
        let brute = rank(m) == rank(aug);
        let ls: Vec<Form> = gv.iter().map(|g| one(g)).collect();
        let got = ideal_residual_lenient(&f.cf, &a, &ls).unwrap().member;
        prop_assert_eq!(got, brute);
        if planted {
            prop_assert!(got);
        }
    }
}

#[test]
fn structure_rules_are_applied() {
    let f = frame();
    let e = |n: &str| f.cf.named(n).unwrap();
    assert_eq!(f.cf.d(&e("e1")).unwrap(), e("e2").wedge(&e("e3")).unwrap());
    assert!(f.cf.d(&f.cf.g(f.gens[0])).unwrap().is_zero());
}

#[test]
fn unknown_differentials_become_slots() {
    let mut cf = Coframe::new();
    let a = cf.add_abstract("a").unwrap();
    let b = cf.add_abstract("b").unwrap();
    cf.set_rule(b, cf.zero()).unwrap();
    let w = Symbol::intern_any("wslot", SymbolKind::Invariant);
    cf.set_scalar(w, ScalarRule::Unknown);
    let f = cf.g(a).wedge(&cf.g(b)).unwrap().add(&cf.g(b).scale(&Rat::var(w))).unwrap();
    let r = cf.ext_d(&f, Mode::Partial).unwrap();
    assert!(r.known.is_zero());
    assert_eq!(r.slots[&Slot::Gen(a)], cf.g(b));
    assert_eq!(r.slots[&Slot::Scalar(w)], cf.g(b));
    assert!(cf.ext_d(&f, Mode::Full).is_err());
}

#[test]
fn mixing_coframes_is_rejected() {
    let (f, g) = (frame(), frame());
    assert!(f.cf.g(f.gens[0]).wedge(&g.cf.g(g.gens[0])).is_err());
}
