//! Reduced Cartan characters and the degree of indeterminacy of a tableau.

use alloc::format;
use alloc::vec::Vec;

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use super::EngineError;
use crate::exterior::{Coframe, Gen, GenRule};
use crate::symkernel::{rank_q, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartanResult {
    /// s′₁ … s′ₙ.
    pub s: Vec<usize>,
    pub r2: usize,
    pub involutive: bool,
    /// Rules contributing rows to the tableau.
    pub rows: usize,
    /// Draws of covectors used before the ranks stabilized.
    pub draws: usize,
}

type Tableau = Vec<Vec<Vec<Q>>>; // [row][free][base]

fn tableau(cf: &Coframe, base: &[Gen], free: &[Gen]) -> Result<Tableau, EngineError> {
    let mut t: Tableau = Vec::new();
    for (_, info) in cf.gens() {
        let GenRule::Formal(rule) = &info.rule else { continue };
        let mut row = alloc::vec![alloc::vec![Q::from_integer(0.into()); base.len()]; free.len()];
        let mut any = false;
        for (m, c) in rule.terms() {
            let fi: Vec<usize> = m.iter().filter_map(|g| free.iter().position(|f| f == g)).collect();
            if fi.is_empty() {
                continue;
            }
            if m.len() != 2 || fi.len() != 1 {
                return Err(EngineError::Tableau(format!("free form not paired with a base form in d{}", info.name)));
            }
            let (pi_first, other) = if free.contains(&m[0]) { (true, m[1]) } else { (false, m[0]) };
            // terms against non-base forms vanish on integral elements
            let Some(j) = base.iter().position(|&b| b == other) else { continue };
            let v = c.constant_value().ok_or_else(|| EngineError::Tableau(format!("non-constant tableau entry in d{}", info.name)))?;
            row[fi[0]][j] = if pi_first { v } else { -v };
            any = true;
        }
        if any {
            t.push(row);
        }
    }
    Ok(t)
}

fn ranks(t: &Tableau, covs: &[Vec<Q>]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut rows: Vec<Vec<Q>> = Vec::new();
    for v in covs {
        for r in t {
            rows.push(r.iter().map(|col| col.iter().zip(v.iter()).map(|(a, b)| a * b).sum()).collect());
        }
        out.push(rank_q(rows.clone()));
    }
    out
}

fn draw(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<Q>> {
    (0..n).map(|_| (0..n).map(|_| Q::from_integer((((rng.next_u32() % 199) as i64) - 99).into())).collect()).collect()
}

/// Characters from rank increments at random covectors (redrawn until two
/// consecutive draws agree), `r⁽²⁾` as nullity of the prolongation system.
pub fn cartan_characters(cf: &Coframe, base: &[Gen], free: &[Gen], seed: u64) -> Result<CartanResult, EngineError> {
    let n = base.len();
    let t = tableau(cf, base, free)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen: Vec<Vec<usize>> = Vec::new();
    let mut accepted = None;
    let mut draws = 0;
    for _ in 0..6 {
        draws += 1;
        let r = ranks(&t, &draw(&mut rng, n));
        let dominates = seen.iter().all(|p| p.iter().zip(r.iter()).all(|(a, b)| a <= b));
        if seen.last() == Some(&r) && dominates {
            accepted = Some(r);
            break;
        }
        seen.push(r);
    }
    let acc = accepted.ok_or(EngineError::RetryExhausted)?;
    let mut s = Vec::new();
    let mut last = 0;
    for r in acc {
        s.push(r - last);
        last = r;
    }
    // prolongation: π^γ ↦ π^γ + z^γ_k ξ^k must keep every row
    let nf = free.len();
    let mut eqs: Vec<Vec<Q>> = Vec::new();
    for row in &t {
        for j in 0..n {
            for k in (j + 1)..n {
                let mut e = alloc::vec![Q::from_integer(0.into()); nf * n];
                for g in 0..nf {
                    e[g * n + k] += row[g][j].clone();
                    e[g * n + j] -= row[g][k].clone();
                }
                if e.iter().any(|x| *x != Q::from_integer(0.into())) {
                    eqs.push(e);
                }
            }
        }
    }
    let r2 = nf * n - rank_q(eqs);
    let weighted: usize = s.iter().enumerate().map(|(k, v)| (k + 1) * v).sum();
    Ok(CartanResult { s, r2, involutive: r2 == weighted, rows: t.len(), draws })
}
