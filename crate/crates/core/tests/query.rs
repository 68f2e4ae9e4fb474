mod common;

use std::collections::BTreeSet;

use ckr_core::kb::parse_sckr;
use ckr_core::query::{
    parse_aggregate, parse_bcq, parse_instance_query, AggFn, AggValue, ConsequenceMode, QTerm,
    QueryError, Reasoner,
};
use ckr_core::translator::CkrOptions;
use common::*;
use num_rational::BigRational;

fn reasoner(k: ckr_core::kb::Sckr) -> Reasoner {
    Reasoner::new(k, &CkrOptions::default()).unwrap()
}

fn num(n: i64) -> AggValue {
    AggValue::Number(BigRational::from_integer(n.into()))
}

fn shown(s: &BTreeSet<ckr_core::kb::Axiom>) -> Vec<String> {
    s.iter().map(|a| a.to_string()).collect()
}

#[test]
fn instance_queries_on_korg1() {
    let r = reasoner(fixture("korg1.ckr"));
    let q = |t: &str| r.c_entails(&parse_instance_query(t).unwrap()).unwrap();
    assert!(q("c_local1 : M(i)"));
    assert!(q("c_local1:S(i)"));
    assert!(!q("c_local1 : E(i)"));
    assert!(!q("c_world : S(i)"));
}

#[test]
fn instance_query_errors() {
    let r = reasoner(fixture("korg1.ckr"));
    let q = |t: &str| r.c_entails(&parse_instance_query(t).unwrap());
    assert!(matches!(
        q("nowhere : M(i)"),
        Err(QueryError::UnknownContext(_))
    ));
    assert!(matches!(
        q("c_local1 : Q(i)"),
        Err(QueryError::UnknownSymbol(_))
    ));
    assert!(matches!(
        q("c_local1 : i(i)"),
        Err(QueryError::WrongCategory(..))
    ));
    assert!(matches!(
        parse_instance_query("c_local1 : M(X)"),
        Err(QueryError::Syntax { .. })
    ));
    assert!(matches!(
        parse_instance_query("c_local1 M(i)"),
        Err(QueryError::Syntax { .. })
    ));
    assert!(matches!(
        parse_instance_query("c_local1 : M(i) extra"),
        Err(QueryError::Syntax { .. })
    ));
}

#[test]
fn korg_consequences() {
    let r = reasoner(fixture("korg.ckr"));
    let c = |ctx: &str| shown(&r.consequences(ctx, ConsequenceMode::Cautious).unwrap());
    assert_eq!(c("c_local_2019"), ["E(i)", "OS(i)", "S(i)"]);
    assert_eq!(c("c_local_2020"), ["R(i)", "RE(i)", "S(i)"]);
    assert_eq!(c("c_local_2021"), ["R(i)", "RE(i)", "S(i)"]);
}

#[test]
fn cautious_is_contained_in_brave() {
    let r = reasoner(parse_sckr(TWO_PREFERRED).unwrap());
    assert_eq!(r.preferred.len(), 2);
    let cautious = r.consequences("leaf", ConsequenceMode::Cautious).unwrap();
    let brave = r.consequences("leaf", ConsequenceMode::Brave).unwrap();
    assert_eq!(shown(&cautious), ["A(x)"]);
    assert_eq!(shown(&brave), ["A(x)", "B(x)", "C(x)"]);
    assert!(cautious.is_subset(&brave));
    assert!(!r
        .c_entails(&parse_instance_query("leaf : B(x)").unwrap())
        .unwrap());
}

#[test]
fn boolean_conjunctive_queries() {
    let r = reasoner(fixture("korg1.ckr"));
    let b = |t: &str| r.bcq_entails(&parse_bcq(t).unwrap()).unwrap();
    assert!(b("c_local1 : S(Y), c_local1 : M(Y)"));
    assert!(b("exists Y. c_local1 : S(Y), c_local1 : M(Y)"));
    assert!(!b("c_local1 : S(Y), c_local1 : E(Y)"));
    assert!(b("C : M(Y)"));
    assert!(!b("C : E(Y)"));
    assert!(b(""));
}

#[test]
fn bcq_over_roles() {
    let text = "\
context a.
a: R(x,y).
a: R(y,z).
a: A(z).
";
    let r = reasoner(parse_sckr(text).unwrap());
    let b = |t: &str| r.bcq_entails(&parse_bcq(t).unwrap()).unwrap();
    assert!(b("a : R(X,Y), a : R(Y,Z), a : A(Z)"));
    assert!(!b("a : R(X,Y), a : A(Y), a : R(Y,Z)"));
    assert!(!b("a : R(X,X)"));
    let atoms = parse_bcq("a : R(X,Y)").unwrap().atoms;
    let ans = r.certain_answers(&atoms, &["X".into()]).unwrap();
    assert_eq!(ans, [vec!["x".to_string()], vec!["y".to_string()]].into());
}

#[test]
fn aggregate_parsing() {
    let q = parse_aggregate("q(X, count(Y)) <- K X,Y. X : S(Y)").unwrap();
    assert_eq!(q.group, ["X"]);
    assert_eq!(q.func, AggFn::Count);
    assert_eq!(q.known, ["X", "Y"]);
    assert_eq!(q.body[0].context, QTerm::Var("X".into()));
    let q = parse_aggregate("q(count(Y)) :- c : S(Y)").unwrap();
    assert!(q.group.is_empty());
    assert_eq!(q.known, ["Y"]);
    assert!(matches!(
        parse_aggregate("q(X, count(Y)) <- c : S(Y)"),
        Err(QueryError::UnsafeVariable(_))
    ));
    assert!(matches!(
        parse_aggregate("q(X, count(Y)) <- K Y. X : S(Y)"),
        Err(QueryError::UnsafeVariable(_))
    ));
    assert!(matches!(
        parse_aggregate("q(avg(Y)) <- c : S(Y)"),
        Err(QueryError::UnsupportedAggregate(_))
    ));
}

#[test]
fn counts_on_fixtures() {
    let r = reasoner(fixture("korg1.ckr"));
    let rows = r
        .epistemic_aggregate(&parse_aggregate("q(count(Y)) <- c_local1 : S(Y)").unwrap())
        .unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].value, num(1));
    let rows = r
        .epistemic_aggregate(&parse_aggregate("q(count(Y)) <- c_local1 : E(Y)").unwrap())
        .unwrap();
    assert_eq!(rows[0].value, num(0));

    let r = reasoner(fixture("korg.ckr"));
    let rows = r
        .epistemic_aggregate(&parse_aggregate("q(X, count(Y)) <- K X,Y. X : S(Y)").unwrap())
        .unwrap();
    let got: Vec<(String, AggValue)> = rows
        .into_iter()
        .map(|r| (r.group[0].clone(), r.value))
        .collect();
    assert_eq!(
        got,
        [
            ("c_local_2019".to_string(), num(1)),
            ("c_local_2020".to_string(), num(1)),
            ("c_local_2021".to_string(), num(1))
        ]
    );
}

#[test]
fn numeric_aggregates() {
    let text = "\
context a.
a: pay(x,10).
a: pay(y,15).
a: pay(z,15).
a: A(x).
a: A(y).
";
    let r = reasoner(parse_sckr(text).unwrap());
    let agg = |t: &str| -> Vec<AggValue> {
        r.epistemic_aggregate(&parse_aggregate(t).unwrap())
            .unwrap()
            .into_iter()
            .map(|r| r.value)
            .collect()
    };
    assert_eq!(agg("q(sum(V)) <- a : pay(P,V)"), [num(40)]);
    assert_eq!(agg("q(count(V)) <- K V. a : pay(P,V)"), [num(2)]);
    assert_eq!(agg("q(countd(V)) <- a : pay(P,V)"), [num(2)]);
    assert_eq!(agg("q(min(V)) <- a : pay(P,V)"), [num(10)]);
    assert_eq!(agg("q(max(V)) <- a : pay(P,V), a : A(P)"), [num(15)]);
    assert!(agg("q(max(V)) <- a : pay(P,V), a : pay(V,P)").is_empty());
    let e = r.epistemic_aggregate(&parse_aggregate("q(sum(P)) <- a : pay(P,V)").unwrap());
    assert!(matches!(e, Err(QueryError::NotNumeric(_))));
}
