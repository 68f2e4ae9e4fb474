mod common;

use ckr_core::kb::{
    compute_closures, parse_sckr, validate_normal_form, Axiom, ContextStructure, KbError, Relation,
};
use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn korg_parses_with_time_first() {
    let k = fixture("korg.ckr");
    let rels: Vec<&str> = k
        .structure
        .relations
        .iter()
        .map(|r| r.name.as_str())
        .collect();
    assert_eq!(rels, ["t", "c"]);
    assert_eq!(k.structure.contexts.len(), 9);
    assert_eq!(k.defeasible_axioms().count(), 4);
    assert!(k.vocabulary.concepts.contains("OS"));
    assert!(k.vocabulary.individuals.contains("i"));
    assert!(validate_normal_form(&k).is_empty());
}

#[test]
fn every_axiom_shape_parses() {
    let text = "\
relation r.
context a.
context b.
a: A(x).
a: R(x,y).
a: x = y.
a: x != y.
a: A subClassOf B.
a: {x} subClassOf B.
a: A and B subClassOf C.
a: exists R.A subClassOf B.
a: A subClassOf exists R.{y}.
a: A subClassOf forall R.B.
a: A subClassOf atmost1 R.
a: R subRoleOf S.
a: R o S subRoleOf T.
a: disjoint(R,S).
a: inverse(R,S).
a: irreflexive(R).
a: eval(A,b) subClassOf B.
a: eval(R,b) subRoleOf S.
";
    let k = parse_sckr(text).unwrap();
    let kinds: Vec<_> = k.kb("a").unwrap().strict.iter().map(Axiom::kind).collect();
    assert_eq!(kinds.len(), 18);
    assert!(k.has_eval());
    assert_eq!(parse_sckr(&k.to_string()).unwrap(), k);
}

#[test]
fn disjunction_is_parsed_but_not_normal_form() {
    let k = parse_sckr("context a.\na: A subClassOf B or C.\n").unwrap();
    let d = validate_normal_form(&k);
    assert_eq!(d.len(), 1);
    assert!(d[0].message.contains("disjunction"));
}

#[test]
fn defeasible_assertion_is_rejected_by_validation() {
    let k = parse_sckr("relation c.\ncontext a.\na: D[c](A(x)).\n").unwrap();
    assert_eq!(validate_normal_form(&k).len(), 1);
    let k = parse_sckr("relation c.\ncontext a.\ncontext b.\na: D[c](eval(A,b) subClassOf B).\n")
        .unwrap();
    assert!(validate_normal_form(&k)[0].message.contains("eval"));
}

#[test]
fn parse_errors_carry_positions() {
    match parse_sckr("context a.\na: A subClassOf .\n") {
        Err(KbError::Syntax { line, .. }) => assert_eq!(line, 2),
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        parse_sckr("context a.\na: D[z](A subClassOf B).\n"),
        Err(KbError::UnknownRelation { .. })
    ));
    assert!(matches!(
        parse_sckr("a < b [z].\n"),
        Err(KbError::UnknownRelation { .. })
    ));
    assert!(matches!(
        parse_sckr("relation c.\nrelation c.\n"),
        Err(KbError::DuplicateRelation { .. })
    ));
    assert!(matches!(
        parse_sckr("context a.\na: A(x).\na: R(A,x).\n"),
        Err(KbError::CategoryConflict { .. })
    ));
    assert!(matches!(
        parse_sckr("context a.\na: eval(A,nowhere) subClassOf B.\n"),
        Err(KbError::Undeclared { .. })
    ));
    assert!(matches!(
        parse_sckr("context a.\na: A(x) junk.\n"),
        Err(KbError::Syntax { .. })
    ));
}

#[test]
fn cycles_are_reported_with_the_cycle() {
    let k = parse_sckr("relation c.\na < b [c].\nb < d [c].\nd < a [c].\n").unwrap();
    match compute_closures(&k.structure) {
        Err(KbError::Cycle { relation, cycle }) => {
            assert_eq!(relation, "c");
            assert_eq!(cycle.first(), cycle.last());
            assert_eq!(cycle.len(), 4);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn cycle_across_two_relations_is_allowed() {
    let k = parse_sckr("relation r.\nrelation s.\na < b [r].\nb < a [s].\n").unwrap();
    let cl = compute_closures(&k.structure).unwrap();
    assert!(cl.is_preceq_star("a", "b") && cl.is_preceq_star("b", "a"));
    assert!(cl.is_preceq_except("r", "b", "a"));
    assert!(!cl.is_preceq_except("r", "a", "b"));
}

#[test]
fn priority_reorders_relations() {
    let k = fixture("korg.ckr")
        .with_priority(&["c".to_string()])
        .unwrap();
    assert_eq!(k.structure.relations[0].name, "c");
    assert!(matches!(
        fixture("korg.ckr").with_priority(&["x".to_string()]),
        Err(KbError::BadPriority(_))
    ));
}

#[test]
fn korg1_closure() {
    let k = fixture("korg1.ckr");
    let cl = compute_closures(&k.structure).unwrap();
    assert!(cl.is_prec("c", "c_local1", "c_world"));
    assert!(cl.is_prec("c", "c_local1", "c_branch2"));
    assert!(!cl.is_prec("c", "c_local2", "c_world"));
    assert!(!cl.is_prec("c", "c_world", "c_world"));
    let (c, l, w) = (
        cl.rel("c").unwrap(),
        cl.ctx("c_local1").unwrap(),
        cl.ctx("c_world").unwrap(),
    );
    // With one relation the only witness is the declaring context itself.
    assert_eq!(cl.witnesses(c, w, l), vec![w]);
}

fn reach(n: usize, edges: &[(usize, usize)], a: usize, b: usize, strict: bool) -> bool {
    let mut seen = vec![false; n];
    let mut stack: Vec<usize> = edges.iter().filter(|e| e.0 == a).map(|e| e.1).collect();
    if !strict {
        stack.push(a);
    }
    while let Some(v) = stack.pop() {
        if v == b {
            return true;
        }
        if !seen[v] {
            seen[v] = true;
            stack.extend(edges.iter().filter(|e| e.0 == v).map(|e| e.1));
        }
    }
    false
}

proptest! {
    #[test]
    fn dsl_round_trip(seed in any::<u64>(), eval in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape = random_shape(&mut rng, eval);
        let k = parse_sckr(&random_kb_text(&mut rng, &shape)).unwrap();
        let printed = k.to_string();
        let again = parse_sckr(&printed).unwrap();
        prop_assert_eq!(&again, &k);
        prop_assert_eq!(again.to_string(), printed);
    }

    #[test]
    fn closures_match_reachability(
        n in 2usize..6,
        raw in prop::collection::vec((0usize..6, 0usize..6, 0usize..2), 0..10),
    ) {
        // Edges only go from higher to lower index, so every relation is acyclic.
        let mut rels = [Vec::new(), Vec::new()];
        for (a, b, r) in raw {
            let (a, b) = (a % n, b % n);
            if a > b {
                rels[r].push((a, b));
            }
        }
        let name = |i: usize| format!("k{i}");
        let s = ContextStructure {
            contexts: (0..n).map(name).collect(),
            relations: rels
                .iter()
                .enumerate()
                .map(|(i, es)| Relation { name: format!("r{i}"), edges: es.iter().map(|&(a, b)| (name(a), name(b))).collect() })
                .collect(),
        };
        let cl = compute_closures(&s).unwrap();
        let all: Vec<_> = rels.concat();
        for a in 0..n {
            for b in 0..n {
                for r in 0..2 {
                    prop_assert_eq!(cl.prec[r][a][b], reach(n, &rels[r], a, b, true));
                    prop_assert_eq!(cl.preceq[r][a][b], reach(n, &rels[r], a, b, false));
                    prop_assert_eq!(cl.preceq_except[r][a][b], reach(n, &rels[1 - r], a, b, false));
                }
                prop_assert_eq!(cl.preceq_star[a][b], reach(n, &all, a, b, false));
            }
        }
    }
}
