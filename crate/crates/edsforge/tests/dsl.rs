use std::fs;
use std::path::PathBuf;

use edsforge::ast::{BinOp, Decl, Document, Expr, FormRef, Item, Span, TaskKind, WeEnd};
use edsforge::printer::{expr_to_string, print_document};
use edsforge::syntax::parse_expr;
use edsforge::{parse, LoadOptions, Workspace};
use proptest::prelude::*;

fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

fn ident() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9_]{0,5}".prop_map(|s| format!("n{}", s))
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0u32..200).prop_map(|k| Expr::Int(k.to_string())),
        ident().prop_map(Expr::Name),
        prop::collection::vec(prop::sample::select(vec!["t", "x", "y", "z"]), 1..4).prop_map(|v| Expr::Jet("u".into(), v.into_iter().map(String::from).collect())),
        (0u8..3, 0u8..3).prop_map(|(i, j)| Expr::Jet("v".into(), vec![i.to_string(), j.to_string()])),
    ];
    leaf.prop_recursive(4, 32, 3, |inner| {
        let op = prop::sample::select(vec![BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div, BinOp::Wedge]);
        prop_oneof![
            inner.clone().prop_map(|e| Expr::Neg(Box::new(e))),
            (op, inner.clone(), inner.clone()).prop_map(|(o, a, b)| Expr::Bin(o, Box::new(a), Box::new(b))),
            (inner.clone(), 1i64..5).prop_map(|(a, k)| Expr::Pow(Box::new(a), k)),
            inner.clone().prop_map(|a| Expr::Call("d".into(), vec![a])),
        ]
    })
}

fn names(n: usize) -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(ident(), 1..n)
}

fn form_ref() -> impl Strategy<Value = FormRef> {
    (ident(), ident()).prop_map(|(coframe, form)| FormRef { coframe, form })
}

fn task_kind() -> impl Strategy<Value = TaskKind> {
    prop_oneof![
        (ident(), prop::option::of(0u32..4)).prop_map(|(covering, depth)| TaskKind::VerifyCovering { covering, depth }),
        (ident(), ident()).prop_map(|(coframe, structure)| TaskKind::VerifyStructure { coframe, structure }),
        ident().prop_map(|structure| TaskKind::VerifyD2 { structure }),
        (ident(), names(5), prop::option::of((prop::collection::vec(0u32..30, 1..5), 0u32..50)))
            .prop_map(|(structure, base, expect)| TaskKind::Cartan { structure, base, expect }),
        (ident(), form_ref(), any::<bool>()).prop_map(|(c, f, dir)| {
            let (a, b) = (WeEnd::Covering(c), WeEnd::Form(f));
            if dir {
                TaskKind::WeConvert { from: a, to: b }
            } else {
                TaskKind::WeConvert { from: b, to: a }
            }
        }),
        (ident(), prop::collection::vec((ident(), expr()), 0..3)).prop_map(|(candidate, assume)| TaskKind::CieVerify { candidate, assume }),
        (ident(), prop::collection::vec(ident(), 0..4), prop::option::of(1u64..100_000)).prop_map(|(structure, zero, nodes)| TaskKind::CieSearch { structure, zero, nodes }),
        (ident(), ident(), 0u32..3, prop::option::of((ident(), expr())))
            .prop_map(|(covering, generator, order, flow)| TaskKind::LiftCheck { covering, generator, order, flow }),
        (ident(), form_ref(), prop::collection::vec(ident(), 0..3)).prop_map(|(candidate, omega, independent)| TaskKind::Realize { candidate, omega, independent }),
    ]
}

fn decl() -> impl Strategy<Value = Decl> {
    prop_oneof![
        "[a-z]{1,8}\\.eds".prop_map(Decl::Import),
        (names(5), ident(), 1u32..6, prop::collection::vec(ident(), 0..2))
            .prop_map(|(base, dependent, order, params)| Decl::Chart { name: String::new(), base, dependent, order, params }),
        (expr(), expr()).prop_map(|(lhs, rhs)| Decl::Relation { name: String::new(), lhs, rhs }),
        (ident(), ident(), ident(), ident(), prop::collection::vec(ident(), 0..2), prop::collection::vec((ident(), expr()), 0..3))
            .prop_map(|(relation, fibre, a, b, params, rules)| Decl::Covering { name: String::new(), relation, fibre, along: (a, b), params, rules }),
        (names(6), prop::collection::vec(ident(), 0..3), prop::collection::vec((ident(), expr()), 0..4))
            .prop_map(|(forms, free, rules)| Decl::Structure { name: String::new(), forms, free, rules }),
        (ident(), names(4), prop::collection::vec(ident(), 0..3), prop::collection::vec(ident(), 0..2), prop::collection::vec((ident(), expr()), 0..3))
            .prop_map(|(base, forms, invariants, params, rules)| Decl::Candidate { name: String::new(), base, forms, invariants, params, rules }),
        (task_kind(), any::<bool>()).prop_map(|(kind, expect_fail)| Decl::Task { name: String::new(), kind, expect_fail }),
        names(4).prop_map(|tasks| Decl::Suite { name: String::new(), tasks }),
    ]
}

/// Declarations get distinct names `d0`, `d1`, … so the document is valid.
fn document() -> impl Strategy<Value = Document> {
    prop::collection::vec(decl(), 0..6).prop_map(|ds| {
        let items = ds
            .into_iter()
            .enumerate()
            .map(|(i, mut d)| {
                let fresh = format!("d{}", i);
                match &mut d {
                    Decl::Import(_) => {}
                    Decl::Chart { name, .. }
                    | Decl::Relation { name, .. }
                    | Decl::Covering { name, .. }
                    | Decl::Generator { name, .. }
                    | Decl::Coframe { name, .. }
                    | Decl::Structure { name, .. }
                    | Decl::Candidate { name, .. }
                    | Decl::Task { name, .. }
                    | Decl::Suite { name, .. } => *name = fresh,
                }
                Item { span: Span::default(), decl: d }
            })
            .collect();
        Document { version: 1, items }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn expressions_round_trip(e in expr()) {
        let text = expr_to_string(&e);
        let back = parse_expr(&text).map_err(|err| TestCaseError::fail(format!("{}: {}", text, err)))?;
        prop_assert_eq!(expr_to_string(&back), text.clone());
        prop_assert_eq!(back, e, "{}", text);
    }

    #[test]
    fn documents_round_trip(doc in document()) {
        let text = print_document(&doc);
        let back = parse(&text).map_err(|err| TestCaseError::fail(format!("{}\n{}", err, text)))?;
        prop_assert!(back.same_structure(&doc), "{}", text);
        prop_assert_eq!(print_document(&back), text);
    }
}

#[test]
fn corpus_files_round_trip() {
    let mut seen = 0;
    for entry in fs::read_dir(corpus_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("eds") {
            continue;
        }
        let doc = parse(&fs::read_to_string(&path).unwrap()).unwrap();
        let text = print_document(&doc);
        let back = parse(&text).unwrap();
        assert!(back.same_structure(&doc), "{}", path.display());
        assert_eq!(print_document(&back), text);
        seen += 1;
    }
    assert!(seen >= 6);
}

#[test]
fn empty_input_is_an_empty_document() {
    for src in ["", "   \n", "# only a comment\n"] {
        let doc = parse(src).unwrap();
        assert!(doc.items.is_empty());
    }
}

#[test]
fn space_inside_jet_brackets_is_reported_at_the_space() {
    let src = "version 1;\nrelation r: u[x z] = 0;\n";
    let err = parse(src).unwrap_err();
    // line 2, column of the space after `x`
    assert_eq!((err.span.line, err.span.col), (2, 16), "{}", err);
    assert!(parse_expr("u[x z]").is_err());
    assert!(parse_expr("u[x,z]").is_ok());
}

#[test]
fn header_is_required() {
    assert!(parse("task a: verify-d2 s;").is_err());
    let err = parse("version 2;").unwrap_err();
    assert!(err.message.contains("version"));
}

#[test]
fn duplicate_names_are_rejected() {
    assert!(parse("version 1;\nsuite a { x }\nsuite a { y }\n").is_err());
}

#[test]
fn forward_references_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("fwd.eds");
    fs::write(&p, "version 1;\nsuite all { later }\ntask later: verify-d2 s;\n").unwrap();
    let err = Workspace::load(&p, &LoadOptions::default()).unwrap_err();
    assert!(err.to_string().contains("later"), "{}", err);
    fs::write(&p, "version 1;\ntask t: verify-d2 s;\nstructure s {\n  forms a;\n  d a = 0;\n}\n").unwrap();
    assert!(Workspace::load(&p, &LoadOptions::default()).is_err());
    fs::write(&p, "version 1;\nstructure s {\n  forms a;\n  d a = 0;\n}\ntask t: verify-d2 s;\nsuite all { t }\n").unwrap();
    Workspace::load(&p, &LoadOptions::default()).unwrap();
}
