use std::path::PathBuf;

use edsforge::{LoadOptions, Workspace};
use edsforge_core::eds_engine::{cartan_characters, solve_cases, CaseOutcome, PolySystem};
use edsforge_core::exterior::GenRule;
use edsforge_core::symkernel::{Poly, Symbol, SymbolKind, Q};
use num_traits::Zero;
use proptest::prelude::*;

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn rank(mut m: Vec<Vec<Q>>) -> usize {
    let cols = m.first().map_or(0, |r| r.len());
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = &m[i][c] / &m[r][c];
                for k in c..cols {
                    let v = &f * &m[r][k];
                    m[i][k] -= v;
                }
            }
        }
        r += 1;
    }
    r
}

/// Tableau rebuilt from the rules, characters at Vandermonde covectors,
/// prolongation dimension from the symmetry of `π^γ_{jk}`.
#[test]
fn cartan_characters_match_an_independent_tableau() {
    let ws = Workspace::load(&corpus("structure5.eds"), &LoadOptions::default()).unwrap();
    let set = &ws.structures["table"];
    let base: Vec<_> = ["xi1", "xi2", "xi3", "xi4"].iter().map(|b| set.cf.gen(b).unwrap()).collect();
    let (n, nf) = (base.len(), set.free.len());
    let mut tab: Vec<Vec<Vec<Q>>> = Vec::new();
    for (_, info) in set.cf.gens() {
        let GenRule::Formal(rule) = &info.rule else { continue };
        let mut row = vec![vec![Q::zero(); n]; nf];
        let mut any = false;
        for (m, c) in rule.terms() {
            if m.len() != 2 {
                continue;
            }
            for (fi, bi, sign) in [(0usize, 1usize, 1i64), (1, 0, -1)] {
                if let (Some(f), Some(b)) = (set.free.iter().position(|x| *x == m[fi]), base.iter().position(|x| *x == m[bi])) {
                    row[f][b] = c.constant_value().unwrap() * Q::from_integer(sign.into());
                    any = true;
                }
            }
        }
        if any {
            tab.push(row);
        }
    }
    let mut stacked: Vec<Vec<Q>> = Vec::new();
    let mut ranks = Vec::new();
    for k in 1..=n as i64 {
        let v: Vec<Q> = (0..n as u32).map(|j| Q::from_integer((k + 1).pow(j).into())).collect();
        for row in &tab {
            stacked.push(row.iter().map(|col| col.iter().zip(&v).map(|(a, b)| a * b).sum()).collect());
        }
        ranks.push(rank(stacked.clone()));
    }
    let s: Vec<usize> = ranks.iter().enumerate().map(|(i, r)| r - if i == 0 { 0 } else { ranks[i - 1] }).collect();
    assert_eq!(s, vec![16, 4, 0, 0]);
    let mut eqs = Vec::new();
    for row in &tab {
        for j in 0..n {
            for k in j + 1..n {
                let mut e = vec![Q::zero(); nf * n];
                for g in 0..nf {
                    e[g * n + k] += &row[g][j];
                    e[g * n + j] -= &row[g][k];
                }
                eqs.push(e);
            }
        }
    }
    let r2 = nf * n - rank(eqs);
    assert_eq!(r2, 24);
    let got = cartan_characters(&set.cf, &base, &set.free, 7).unwrap();
    assert_eq!((got.s, got.r2, got.involutive), (s, r2, true));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn cartan_characters_do_not_depend_on_the_seed(seed in any::<u64>()) {
        use std::sync::OnceLock;
        static WS: OnceLock<Workspace> = OnceLock::new();
        let ws = WS.get_or_init(|| Workspace::load(&corpus("structure5.eds"), &LoadOptions::default()).unwrap());
        let set = &ws.structures["table"];
        let base: Vec<_> = ["xi1", "xi2", "xi3", "xi4"].iter().map(|b| set.cf.gen(b).unwrap()).collect();
        let r = cartan_characters(&set.cf, &base, &set.free, seed).unwrap();
        prop_assert_eq!((r.s, r.r2, r.involutive), (vec![16, 4, 0, 0], 24, true));
    }
}

fn unknowns() -> Vec<Symbol> {
    ["ka", "kb", "kc"].iter().map(|n| Symbol::intern_any(n, SymbolKind::Unknown)).collect()
}

fn int(c: i64) -> Poly {
    Poly::constant(Q::from_integer(c.into()))
}

fn lin(row: &[i64], u: &[Symbol], rhs: i64) -> Poly {
    let mut p = int(-rhs);
    for (c, s) in row.iter().zip(u) {
        p = p.add(&Poly::var(*s).scale(&Q::from_integer((*c).into())));
    }
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn planted_solutions_survive_case_splitting(
        m in prop::collection::vec(prop::collection::vec(-3i64..4, 3), 1..4),
        x in [-3i64..4, -3i64..4, -3i64..4],
        quad in any::<bool>(),
    ) {
        let u = unknowns();
        let mut eqs: Vec<(Poly, String)> = m.iter().enumerate().map(|(i, r)| {
            let rhs = r.iter().zip(&x).map(|(a, b)| a * b).sum();
            (lin(r, &u, rhs), format!("e{}", i))
        }).collect();
        prop_assume!(!eqs[0].0.is_zero());
        if quad {
            // (ka − x₀)(kb − x₁) = 0 keeps the planted point
            let a = Poly::var(u[0]).sub(&int(x[0]));
            let b = Poly::var(u[1]).sub(&int(x[1]));
            eqs.push((a.mul(&b), "q".into()));
        }
        let tree = solve_cases(&PolySystem { equations: eqs.clone(), unknowns: u.clone(), nonzero_any: vec![] }, 10_000);
        // a planted point is never refuted; a quadratic may stay undecided
        prop_assert!(!tree.inconsistent());
        prop_assert!(quad || tree.branches.iter().any(|b| matches!(b.outcome, CaseOutcome::Consistent(_))), "{:?}", tree.render());
        // p₀ = 0 and p₀ + 1 = 0 together are contradictory
        let p0 = eqs[0].0.clone();
        eqs.push((p0.add(&Poly::one()), "bad".into()));
        let tree = solve_cases(&PolySystem { equations: eqs, unknowns: u, nonzero_any: vec![] }, 10_000);
        prop_assert!(tree.inconsistent(), "{:?}", tree.render());
    }
}

#[test]
fn required_nonzero_group_is_enforced() {
    let u = unknowns();
    let (a, b) = (Poly::var(u[0]), Poly::var(u[1]));
    let sys = PolySystem { equations: vec![(a.mul(&b), "ab".into()), (a.add(&b), "sum".into())], unknowns: u, nonzero_any: vec![("a or b".into(), vec![a, b])] };
    let tree = solve_cases(&sys, 1000);
    assert!(tree.inconsistent(), "{:?}", tree.render());
}
