//! Exact linear solving over rational functions by fraction-free elimination.

use alloc::string::String;
use alloc::vec::Vec;
use num_traits::{One, Zero};

use super::gcd::gcd;
use super::poly::Poly;
use super::rat::Rat;
use super::{print, SymError, Symbol, Q};

#[derive(Clone, Debug, PartialEq)]
pub enum Solution {
    /// Some combination of the equations reduces to `residue = 0` with a
    /// nonzero `residue` free of unknowns. `rows` lists the contributing inputs.
    Inconsistent { residue: Rat, rows: Vec<usize> },
    Unique(Vec<(Symbol, Rat)>),
    Parametric { bound: Vec<(Symbol, Rat)>, free: Vec<Symbol> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearResult {
    pub solution: Solution,
    /// Pivots assumed nonzero during elimination (non-constant ones only).
    pub side_conditions: Vec<Rat>,
}

impl LinearResult {
    pub fn is_consistent(&self) -> bool {
        !matches!(self.solution, Solution::Inconsistent { .. })
    }

    pub fn value(&self, s: Symbol) -> Option<&Rat> {
        match &self.solution {
            Solution::Unique(v) | Solution::Parametric { bound: v, .. } => v.iter().find(|(t, _)| *t == s).map(|(_, r)| r),
            Solution::Inconsistent { .. } => None,
        }
    }

    pub fn side_condition_texts(&self) -> Vec<String> {
        self.side_conditions.iter().map(|r| alloc::format!("{} != 0", print::rat_to_string(r))).collect()
    }
}

/// Splits an equation into polynomial coefficients of each unknown plus the
/// constant term (last entry).
fn to_row(eq: &Rat, unknowns: &[Symbol], idx: usize) -> Result<Vec<Poly>, SymError> {
    for u in unknowns {
        if eq.denom().contains_var(*u) {
            return Err(SymError::Nonlinear(idx));
        }
    }
    let n = unknowns.len();
    let mut buckets: Vec<Vec<(super::poly::Mono, Q)>> = (0..=n).map(|_| Vec::new()).collect();
    let uidx: Vec<u32> = unknowns.iter().map(|s| s.index()).collect();
    for (m, c) in eq.numer().terms() {
        let mut hit: Option<usize> = None;
        for &(v, e) in m.0.iter() {
            if let Some(j) = uidx.iter().position(|&u| u == v) {
                if e > 1 || hit.is_some() {
                    return Err(SymError::Nonlinear(idx));
                }
                hit = Some(j);
            }
        }
        match hit {
            Some(j) => buckets[j].push((m.without(uidx[j]), c.clone())),
            None => buckets[n].push((m.clone(), c.clone())),
        }
    }
    Ok(buckets.into_iter().map(Poly::from_terms).collect())
}

fn row_primitive(row: &mut [Poly]) -> Option<Poly> {
    let mut g = Poly::zero();
    let mut nz: Vec<usize> = (0..row.len()).filter(|&i| !row[i].is_zero()).collect();
    nz.sort_by_key(|&i| row[i].len());
    for &i in &nz {
        g = gcd(&g, &row[i]);
        if g.is_constant() {
            break;
        }
    }
    let removed = if !g.is_constant() && !g.is_zero() {
        for p in row.iter_mut() {
            if !p.is_zero() {
                *p = p.div_exact(&g).expect("row gcd divides");
            }
        }
        Some(g)
    } else {
        None
    };
    // numeric normalization
    let mut c = Q::zero();
    for p in row.iter().filter(|p| !p.is_zero()) {
        let pc = p.numeric_content();
        c = if c.is_zero() { pc } else { q_gcd(&c, &pc) };
    }
    if !c.is_one() && !c.is_zero() {
        let inv = Q::one() / c;
        for p in row.iter_mut() {
            *p = p.scale(&inv);
        }
    }
    removed
}

fn note(side: &mut Vec<Rat>, p: Poly) {
    let r = Rat::from_poly(p.primitive_numeric());
    if !side.contains(&r) {
        side.push(r);
    }
}

/// Solves linear equations (each `== 0`) in `unknowns`.
pub fn solve_linear(equations: &[Rat], unknowns: &[Symbol]) -> Result<LinearResult, SymError> {
    let n = unknowns.len();
    let mut rows: Vec<(Vec<Poly>, Vec<usize>)> = Vec::new();
    let mut side: Vec<Rat> = Vec::new();
    for (i, e) in equations.iter().enumerate() {
        let mut r = to_row(e, unknowns, i)?;
        if r[..n].iter().any(|p| !p.is_zero()) {
            if let Some(g) = row_primitive(&mut r) {
                note(&mut side, g);
            }
        }
        if r.iter().any(|p| !p.is_zero()) {
            rows.push((r, alloc::vec![i]));
        }
    }
    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, column)
    let mut next = 0usize;
    for col in 0..n {
        // choose pivot: constant entries first, then fewest terms
        let mut best: Option<usize> = None;
        for r in next..rows.len() {
            let p = &rows[r].0[col];
            if p.is_zero() {
                continue;
            }
            best = match best {
                None => Some(r),
                Some(b) => {
                    let q = &rows[b].0[col];
                    let key = |x: &Poly| (!x.is_constant(), x.len(), x.total_degree());
                    if key(p) < key(q) {
                        Some(r)
                    } else {
                        Some(b)
                    }
                }
            };
        }
        let Some(b) = best else { continue };
        rows.swap(next, b);
        let (prow, psrc) = rows[next].clone();
        let pv = prow[col].clone();
        if !pv.is_constant() {
            note(&mut side, pv.clone());
        }
        for r in 0..rows.len() {
            if r == next || rows[r].0[col].is_zero() {
                continue;
            }
            let a = rows[r].0[col].clone();
            let g = gcd(&a, &pv);
            let (fa, fp) = if g.is_one() {
                (a.clone(), pv.clone())
            } else {
                (a.div_exact(&g).unwrap(), pv.div_exact(&g).unwrap())
            };
            let row = &mut rows[r];
            for k in 0..=n {
                let t = row.0[k].mul(&fp).sub(&prow[k].mul(&fa));
                row.0[k] = t;
            }
            if row.0[..n].iter().any(|p| !p.is_zero()) {
                if let Some(g) = row_primitive(&mut row.0) {
                    note(&mut side, g);
                }
            }
            let mut src = row.1.clone();
            for s in &psrc {
                if !src.contains(s) {
                    src.push(*s);
                }
            }
            src.sort_unstable();
            row.1 = src;
        }
        pivots.push((next, col));
        next += 1;
    }
    // inconsistency: a row with zero unknown part and nonzero constant
    for r in next..rows.len() {
        let c = &rows[r].0[n];
        if !c.is_zero() {
            return Ok(LinearResult {
                solution: Solution::Inconsistent { residue: Rat::from_poly(c.clone()), rows: rows[r].1.clone() },
                side_conditions: side,
            });
        }
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|p| p.1).collect();
    let free: Vec<Symbol> = (0..n).filter(|c| !pivot_cols.contains(c)).map(|c| unknowns[c]).collect();
    let mut bound = Vec::new();
    for &(r, c) in &pivots {
        let row = &rows[r].0;
        let mut rhs = Rat::from_poly(row[n].neg());
        for k in 0..n {
            if k != c && !row[k].is_zero() {
                rhs = rhs.sub(&Rat::from_poly(row[k].mul(&Poly::var(unknowns[k]))));
            }
        }
        let val = rhs.div(&Rat::from_poly(row[c].clone()))?;
        bound.push((unknowns[c], val));
    }
    let solution = if free.is_empty() { Solution::Unique(bound) } else { Solution::Parametric { bound, free } };
    Ok(LinearResult { solution, side_conditions: side })
}

/// Rank of a numeric matrix.
pub fn rank_q(mut m: Vec<Vec<Q>>) -> usize {
    let rows = m.len();
    if rows == 0 {
        return 0;
    }
    let cols = m[0].len();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = Q::one() / &m[r][c];
        for k in c..cols {
            let t = &m[r][k] * &inv;
            m[r][k] = t;
        }
        for i in 0..rows {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for k in c..cols {
                    let t = &m[i][k] - &f * &m[r][k];
                    m[i][k] = t;
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

fn q_gcd(a: &Q, b: &Q) -> Q {
    use num_integer::Integer;
    let n = a.numer().gcd(b.numer());
    let d = a.denom().lcm(b.denom());
    Q::new(n, d)
}
