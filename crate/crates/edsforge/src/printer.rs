//! Canonical text form of documents. `parse(print(doc))` reproduces `doc`.

use std::fmt::Write;

use crate::ast::*;

fn level(e: &Expr) -> u8 {
    match e {
        Expr::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
        Expr::Bin(..) => 2,
        Expr::Neg(_) => 3,
        Expr::Pow(..) => 4,
        _ => 5,
    }
}

fn wrap(e: &Expr, min: u8, out: &mut String) {
    if level(e) < min {
        out.push('(');
        expr_into(e, out);
        out.push(')');
    } else {
        expr_into(e, out);
    }
}

fn expr_into(e: &Expr, out: &mut String) {
    match e {
        Expr::Int(s) | Expr::Name(s) => out.push_str(s),
        Expr::Jet(n, idx) => {
            let _ = write!(out, "{}[{}]", n, idx.join(","));
        }
        Expr::Neg(a) => {
            out.push('-');
            wrap(a, 3, out);
        }
        Expr::Bin(op, a, b) => {
            let (l, sym) = match op {
                BinOp::Add => (1, " + "),
                BinOp::Sub => (1, " - "),
                BinOp::Mul => (2, "*"),
                BinOp::Div => (2, "/"),
                BinOp::Wedge => (2, " /\\ "),
            };
            wrap(a, l, out);
            out.push_str(sym);
            wrap(b, l + 1, out);
        }
        Expr::Pow(a, k) => {
            wrap(a, 5, out);
            let _ = write!(out, "^{}", k);
        }
        Expr::Call(n, args) => {
            out.push_str(n);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                expr_into(a, out);
            }
            out.push(')');
        }
    }
}

pub fn expr_to_string(e: &Expr) -> String {
    let mut s = String::new();
    expr_into(e, &mut s);
    s
}

fn form_ref(r: &FormRef) -> String {
    format!("{}.{}", r.coframe, r.form)
}

fn we_end(w: &WeEnd) -> String {
    match w {
        WeEnd::Covering(c) => c.clone(),
        WeEnd::Form(r) => form_ref(r),
    }
}

pub fn task_to_string(kind: &TaskKind) -> String {
    let mut s = kind.keyword().to_string();
    match kind {
        TaskKind::VerifyCovering { covering, depth } => {
            let _ = write!(s, " {}", covering);
            if let Some(d) = depth {
                let _ = write!(s, " depth {}", d);
            }
        }
        TaskKind::VerifyStructure { coframe, structure } => {
            let _ = write!(s, " {} against {}", coframe, structure);
        }
        TaskKind::VerifyD2 { structure } => {
            let _ = write!(s, " {}", structure);
        }
        TaskKind::Cartan { structure, base, expect } => {
            let _ = write!(s, " {} base {}", structure, base.join(", "));
            if let Some((chars, r2)) = expect {
                let c: Vec<String> = chars.iter().map(|c| c.to_string()).collect();
                let _ = write!(s, " expect s {} r2 {}", c.join(", "), r2);
            }
        }
        TaskKind::WeConvert { from, to } => {
            let _ = write!(s, " {} to {}", we_end(from), we_end(to));
        }
        TaskKind::CieVerify { candidate, assume } => {
            let _ = write!(s, " {}", candidate);
            if !assume.is_empty() {
                let a: Vec<String> = assume.iter().map(|(n, e)| format!("{} = {}", n, expr_to_string(e))).collect();
                let _ = write!(s, " assume {}", a.join(", "));
            }
        }
        TaskKind::CieSearch { structure, zero, nodes } => {
            let _ = write!(s, " {}", structure);
            if !zero.is_empty() {
                let _ = write!(s, " zero {}", zero.join(", "));
            }
            if let Some(n) = nodes {
                let _ = write!(s, " nodes {}", n);
            }
        }
        TaskKind::LiftCheck { covering, generator, order, flow } => {
            let _ = write!(s, " {} by {} order {}", covering, generator, order);
            if let Some((c0, t)) = flow {
                let _ = write!(s, " flow {} time {}", c0, expr_to_string(t));
            }
        }
        TaskKind::Realize { candidate, omega, independent } => {
            let _ = write!(s, " {} with {}", candidate, form_ref(omega));
            if !independent.is_empty() {
                let _ = write!(s, " independent {}", independent.join(", "));
            }
        }
    }
    s
}

fn rules(out: &mut String, rules: &[(String, Expr)]) {
    for (n, e) in rules {
        let _ = writeln!(out, "  d {} = {};", n, expr_to_string(e));
    }
}

fn decl_into(d: &Decl, out: &mut String) {
    match d {
        Decl::Import(p) => {
            let _ = writeln!(out, "import \"{}\";", p);
        }
        Decl::Chart { name, base, dependent, order, params } => {
            let _ = writeln!(out, "chart {} {{", name);
            let _ = writeln!(out, "  base {};", base.join(", "));
            let _ = writeln!(out, "  dependent {};", dependent);
            let _ = writeln!(out, "  order {};", order);
            if !params.is_empty() {
                let _ = writeln!(out, "  params {};", params.join(", "));
            }
            out.push_str("}\n");
        }
        Decl::Relation { name, lhs, rhs } => {
            let _ = writeln!(out, "relation {}: {} = {};", name, expr_to_string(lhs), expr_to_string(rhs));
        }
        Decl::Covering { name, relation, fibre, along, params, rules } => {
            let _ = writeln!(out, "covering {} on {} {{", name, relation);
            let _ = writeln!(out, "  fibre {} along {}, {};", fibre, along.0, along.1);
            if !params.is_empty() {
                let _ = writeln!(out, "  params {};", params.join(", "));
            }
            for (dir, e) in rules {
                let _ = writeln!(out, "  rule {} = {};", dir, expr_to_string(e));
            }
            out.push_str("}\n");
        }
        Decl::Generator { name, relation, components } => {
            let _ = writeln!(out, "generator {} on {} {{", name, relation);
            for (dir, e) in components {
                let _ = writeln!(out, "  {} = {};", dir, expr_to_string(e));
            }
            out.push_str("}\n");
        }
        Decl::Coframe { name, relation, jet_order, fibre, coordinates, items } => {
            let _ = writeln!(out, "coframe {} on {} {{", name, relation);
            let _ = writeln!(out, "  jet_order {};", jet_order);
            if let Some(f) = fibre {
                let _ = writeln!(out, "  fibre {} along {}, {} order {};", f.name, f.along.0, f.along.1, f.order);
            }
            if !coordinates.is_empty() {
                let _ = writeln!(out, "  coordinates {};", coordinates.join(", "));
            }
            for it in items {
                match it {
                    CoframeItem::Let(n, e) => {
                        let _ = writeln!(out, "  let {} = {};", n, expr_to_string(e));
                    }
                    CoframeItem::Form(n, e) => {
                        let _ = writeln!(out, "  form {} = {};", n, expr_to_string(e));
                    }
                    CoframeItem::Identity(n, l, r) => {
                        let _ = writeln!(out, "  identity {}: {} = {};", n, expr_to_string(l), expr_to_string(r));
                    }
                }
            }
            out.push_str("}\n");
        }
        Decl::Structure { name, forms, free, rules: rs } => {
            let _ = writeln!(out, "structure {} {{", name);
            let _ = writeln!(out, "  forms {};", forms.join(", "));
            if !free.is_empty() {
                let _ = writeln!(out, "  free {};", free.join(", "));
            }
            rules(out, rs);
            out.push_str("}\n");
        }
        Decl::Candidate { name, base, forms, invariants, params, rules: rs } => {
            let _ = writeln!(out, "candidate {} extends {} {{", name, base);
            let _ = writeln!(out, "  forms {};", forms.join(", "));
            if !invariants.is_empty() {
                let _ = writeln!(out, "  invariants {};", invariants.join(", "));
            }
            if !params.is_empty() {
                let _ = writeln!(out, "  params {};", params.join(", "));
            }
            rules(out, rs);
            out.push_str("}\n");
        }
        Decl::Task { name, kind, expect_fail } => {
            let _ = write!(out, "task {}: {}", name, task_to_string(kind));
            if *expect_fail {
                out.push_str(" expect fail");
            }
            out.push_str(";\n");
        }
        Decl::Suite { name, tasks } => {
            let _ = writeln!(out, "suite {} {{ {} }}", name, tasks.join(", "));
        }
    }
}

pub fn print_document(doc: &Document) -> String {
    let mut out = format!("version {};\n", doc.version);
    for it in &doc.items {
        out.push('\n');
        decl_into(&it.decl, &mut out);
    }
    out
}
