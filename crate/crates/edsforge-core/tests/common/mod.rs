#![allow(dead_code)]

use edsforge_core::coverings::Covering;
use edsforge_core::jetspace::JetChart;
use edsforge_core::symkernel::{Rat, Symbol};

pub fn jet(ch: &JetChart, letters: &str) -> Rat {
    let ls: Vec<String> = letters.chars().map(|c| c.to_string()).collect();
    let refs: Vec<&str> = ls.iter().map(|s| s.as_str()).collect();
    Rat::var(ch.jet_by_letters(&refs).unwrap())
}

/// `u_xz = u_ty + u_yy u_zz − u_yz²` on (t, x, y, z).
pub fn heavenly(order: usize) -> JetChart {
    let ch = JetChart::new(&["t", "x", "y", "z"], "u", order, None, &["lambda"]).unwrap();
    let rhs = jet(&ch, "ty").add(&jet(&ch, "yy").mul(&jet(&ch, "zz"))).sub(&jet(&ch, "yz").pow(2).unwrap());
    let p = ch.counts_of(&["x", "z"]).unwrap();
    ch.with_relation("heavenly", p, rhs).unwrap()
}

pub fn lambda() -> Rat {
    Rat::var(Symbol::lookup("lambda").unwrap())
}

pub fn fv(i: u8, j: u8) -> Rat {
    let name = if i == 0 && j == 0 { "v".to_string() } else { format!("v[{},{}]", i, j) };
    Rat::var(Symbol::intern_any(&name, edsforge_core::symkernel::SymbolKind::FibreJet))
}

/// Covering with parameter `l` (λ or v).
pub fn covering(ch: &JetChart, l: &Rat) -> Covering {
    let (uyy, uyz, uzz) = (jet(ch, "yy"), jet(ch, "yz"), jet(ch, "zz"));
    let (vy, vz) = (fv(1, 0), fv(0, 1));
    let f = uyz.add(l).mul(&vz).sub(&uzz.mul(&vy));
    let g = uyy.mul(&vz).sub(&uyz.sub(l).mul(&vy));
    Covering { name: "c".into(), fibre: "v".into(), params: l.vars().into_iter().filter(|s| s.name().as_ref() == "lambda").collect(), rules: vec![(0, f), (1, g)] }
}
