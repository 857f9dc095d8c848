mod common;

use edsforge_core::jetspace::{Counts, JetChart};
use edsforge_core::symkernel::{Mono, Poly, Rat, Q};
use proptest::prelude::*;

/// Counts of order ≤ 2 in two directions.
const LOW: [[u8; 2]; 6] = [[0, 0], [1, 0], [0, 1], [2, 0], [1, 1], [0, 2]];

fn free_chart() -> JetChart {
    JetChart::new(&["s", "w"], "f", 4, None, &[]).unwrap()
}

fn counts(c: [u8; 2]) -> Counts {
    c.iter().copied().collect()
}

/// Terms: coefficient, exponent of s, two jet indices into `LOW` (or none).
type Terms = Vec<(i64, u32, Vec<usize>)>;

fn build(ch: &JetChart, terms: &Terms) -> Poly {
    let s = ch.base()[0];
    let mut out = Poly::zero();
    for (c, e, js) in terms {
        let mut m = if *e > 0 { Mono::var(s, *e) } else { Mono::one() };
        for &j in js {
            m = m.mul(&Mono::var(ch.jet(&counts(LOW[j])).unwrap(), 1));
        }
        out = out.add(&Poly::from_terms(vec![(m, Q::from_integer((*c).into()))]));
    }
    out
}

/// ∂/∂x_a + Σ_J f_{J+a} ∂/∂f_J, term by term.
fn naive(ch: &JetChart, a: usize, p: &Poly) -> Poly {
    let mut out = p.diff(ch.base()[a]);
    for c in LOW.iter().chain([[3, 0], [2, 1], [1, 2], [0, 3]].iter()) {
        let Ok(j) = ch.jet(&counts(*c)) else { continue };
        let mut up = *c;
        up[a] += 1;
        let next = Poly::var(ch.jet(&counts(up)).unwrap());
        out = out.add(&p.diff(j).mul(&next));
    }
    out
}

fn terms() -> impl Strategy<Value = Terms> {
    prop::collection::vec((-4i64..5, 0u32..3, prop::collection::vec(0usize..6, 0..3)), 0..5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn total_derivative_matches_chain_rule(sp in terms(), a in 0usize..2) {
        let ch = free_chart();
        let p = build(&ch, &sp);
        let d = ch.total_derivative(a, &Rat::from_poly(p.clone())).unwrap();
        prop_assert_eq!(d, Rat::from_poly(naive(&ch, a, &p)));
    }

    #[test]
    fn total_derivatives_commute(sp in terms()) {
        let ch = free_chart();
        let e = Rat::from_poly(build(&ch, &sp));
        let ab = ch.total_derivative(1, &ch.total_derivative(0, &e).unwrap()).unwrap();
        let ba = ch.total_derivative(0, &ch.total_derivative(1, &e).unwrap()).unwrap();
        prop_assert_eq!(ab, ba);
    }

    #[test]
    fn total_derivatives_commute_on_the_equation(
        terms in prop::collection::vec((-3i64..4, prop::sample::select(vec!["", "t", "x", "y", "z", "ty", "yy", "yz", "zz"]), prop::sample::select(vec!["", "y", "z", "t"])), 1..4),
        dirs in (0usize..4, 0usize..4),
    ) {
        let ch = common::heavenly(4);
        let mut e = Rat::zero();
        for (c, a, b) in &terms {
            let mut t = Rat::from_int(*c);
            for l in [a, b] {
                if !l.is_empty() {
                    t = t.mul(&common::jet(&ch, l));
                }
            }
            e = e.add(&t);
        }
        let (a, b) = dirs;
        let ab = ch.total_derivative(b, &ch.total_derivative(a, &e).unwrap()).unwrap();
        let ba = ch.total_derivative(a, &ch.total_derivative(b, &e).unwrap()).unwrap();
        prop_assert_eq!(ch.reduce(&ab).unwrap(), ch.reduce(&ba).unwrap());
    }
}

fn mixed_terms() -> impl Strategy<Value = Vec<(i64, &'static str, &'static str)>> {
    let l = || prop::sample::select(vec!["", "t", "yy", "yz", "xz", "txz", "xzz", "xxz", "yxz", "xxzz"]);
    prop::collection::vec((-3i64..4, l(), l()), 1..4)
}

fn mixed(ch: &JetChart, ts: &[(i64, &str, &str)]) -> Rat {
    ts.iter().fold(Rat::zero(), |acc, (c, a, b)| {
        let mut t = Rat::from_int(*c);
        for l in [a, b] {
            if !l.is_empty() {
                t = t.mul(&common::jet(ch, l));
            }
        }
        acc.add(&t)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn reduction_is_an_idempotent_homomorphism(a in mixed_terms(), b in mixed_terms()) {
        let ch = common::heavenly(4);
        let (ea, eb) = (mixed(&ch, &a), mixed(&ch, &b));
        let (ra, rb) = (ch.reduce(&ea).unwrap(), ch.reduce(&eb).unwrap());
        prop_assert_eq!(ch.reduce(&ra).unwrap(), ra.clone());
        prop_assert_eq!(ch.reduce(&ea.mul(&eb)).unwrap(), ch.reduce(&ra.mul(&rb)).unwrap());
        prop_assert_eq!(ch.reduce(&ea.add(&eb)).unwrap(), ra.add(&rb));
        for v in ra.vars() {
            if let Some(c) = ch.jet_counts(v) {
                prop_assert!(ch.is_internal(c), "{} survived", v.name());
            }
        }
    }
}

#[test]
fn principal_jet_is_eliminated() {
    let ch = common::heavenly(3);
    let uxz = Rat::var(ch.jet_by_letters(&["x", "z"]).unwrap());
    let r = ch.reduce(&uxz).unwrap();
    let expect = common::jet(&ch, "ty").add(&common::jet(&ch, "yy").mul(&common::jet(&ch, "zz"))).sub(&common::jet(&ch, "yz").pow(2).unwrap());
    assert_eq!(r, expect);
    assert!(ch.total_derivative_named("q", &uxz).is_err());
}

#[test]
fn order_overflow_is_reported() {
    let ch = free_chart();
    let top = Rat::var(ch.jet(&counts([4, 0])).unwrap());
    assert!(ch.total_derivative(0, &top).is_err());
}
