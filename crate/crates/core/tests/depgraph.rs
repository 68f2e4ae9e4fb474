mod common;

use ckr_core::depgraph::{
    build_dep_graph, is_eval_disconnected, names, sides, Connectivity, EdgeKind, Expr, Vertex,
};
use ckr_core::kb::{parse_sckr, Axiom};
use common::*;

fn v(e: Expr, c: &str) -> Vertex {
    Vertex {
        expr: e,
        context: c.to_string(),
    }
}

fn n(s: &str) -> Expr {
    Expr::Name(s.to_string())
}

#[test]
fn fixtures_are_disconnected() {
    for (name, k) in all_fixtures() {
        assert!(is_eval_disconnected(&k).is_disconnected(), "{name}");
    }
}

#[test]
fn sides_of_complex_axioms() {
    let a = Axiom::SubEx("R".into(), "A".into(), "B".into());
    assert_eq!(
        sides(&a),
        vec![Expr::Exists("R".into(), "A".into()), n("B")]
    );
    let a = Axiom::SubEvalC("A".into(), "w".into(), "B".into());
    assert_eq!(
        names(&a),
        ["A", "B"].iter().map(|s| s.to_string()).collect()
    );
    assert!(names(&Axiom::SubClass("top".into(), "A".into()))
        .iter()
        .all(|s| s != "top"));
}

#[test]
fn graph_has_subexpression_cooccurrence_and_eval_edges() {
    let k = parse_sckr(
        "context a.\ncontext b.\na: exists R.A subClassOf B.\na: eval(C,b) subClassOf D.\n",
    )
    .unwrap();
    let g = build_dep_graph(&k);
    let ex = v(Expr::Exists("R".into(), "A".into()), "a");
    assert!(g
        .edges
        .contains(&(ex.clone(), v(n("A"), "a"), EdgeKind::Sub)));
    assert!(g
        .edges
        .contains(&(ex.clone(), v(n("B"), "a"), EdgeKind::CoOccur)));
    let ev = v(Expr::Eval("C".into(), "b".into()), "a");
    assert!(g
        .edges
        .contains(&(ev.clone(), v(n("C"), "b"), EdgeKind::Eval)));
    assert!(!g.has_edge(&v(n("A"), "a"), &v(n("B"), "a")));
}

#[test]
fn eval_into_another_defeasible_context_connects() {
    let text = "\
relation c.
context up.
context mid.
context low.
mid < up [c].
low < mid [c].
up: D[c](A subClassOf B).
mid: D[c](C subClassOf D).
mid: eval(A,up) subClassOf C.
low: A(x).
";
    let k = parse_sckr(text).unwrap();
    match is_eval_disconnected(&k) {
        Connectivity::Connected(path) => {
            assert!(path.len() >= 2);
            assert_ne!(path.first().unwrap().context, path.last().unwrap().context);
            let shown = Connectivity::Connected(path).to_string();
            assert!(shown.starts_with("CONNECTED: "));
        }
        Connectivity::Disconnected => panic!("expected a connection"),
    }
}

#[test]
fn shared_names_without_eval_stay_disconnected() {
    // Same names in two contexts, but nothing links the contexts.
    let text = "\
relation c.
context up.
context low.
low < up [c].
up: D[c](A subClassOf B).
low: D[c](A subClassOf B).
low: A(x).
";
    assert!(is_eval_disconnected(&parse_sckr(text).unwrap()).is_disconnected());
}
