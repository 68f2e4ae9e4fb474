mod common;

use std::collections::BTreeSet;

use ckr_core::asp::syntax::parse_program;
use ckr_core::asp::{
    ground_program, solve_with_guess, stratification_domain, GroundAtom, GroundingOptions,
    SolveOptions,
};
use ckr_core::measures::{
    build_mu_all, build_mu_one, build_mu_opt, check_semiring_laws, overall_weight, parse_formula,
    AtomSet, Bool, Formula, MaxPlus, MeasureError, Nat, Powerset, RContext, ROne, Semiring,
    Tropical,
};
use ckr_core::translator::CkrError;
use common::*;
use num_bigint::BigUint;
use num_rational::BigRational;
use proptest::prelude::*;

/// Answer sets of `p :- not q. q :- not p. r(a). r(b) :- p.`
fn choice_sets() -> Vec<AtomSet> {
    let g = ground_program(
        &parse_program("p :- not q. q :- not p. r(a). r(b) :- p.").unwrap(),
        &GroundingOptions::default(),
    )
    .unwrap()
    .0;
    let (sets, _) =
        solve_with_guess(&g, &stratification_domain(&g), &SolveOptions::default()).unwrap();
    sets.iter()
        .map(|s| s.iter().map(|a| g.atom(*a).clone()).collect())
        .collect()
}

fn nat(n: u32) -> BigUint {
    BigUint::from(n)
}

fn rat(n: i64) -> Option<BigRational> {
    Some(BigRational::from_integer(n.into()))
}

#[test]
fn counting_and_weighting_answer_sets() {
    let sets = choice_sets();
    assert_eq!(sets.len(), 2);
    let f = parse_formula(&Nat, "1").unwrap();
    assert_eq!(overall_weight(&Nat, &f, &sets), nat(2));
    let f = parse_formula(&Nat, "3 * p + 5 * ~p").unwrap();
    assert_eq!(overall_weight(&Nat, &f, &sets), nat(8));
    let f = parse_formula(&Nat, "r(b)").unwrap();
    assert_eq!(overall_weight(&Nat, &f, &sets), nat(1));
}

#[test]
fn tropical_picks_the_cheapest_model() {
    let sets = choice_sets();
    let f = parse_formula(&Tropical, "3 * p + 5 * q").unwrap();
    assert_eq!(overall_weight(&Tropical, &f, &sets), rat(3));
    let f = parse_formula(&MaxPlus, "3 * p + 5 * q").unwrap();
    assert_eq!(overall_weight(&MaxPlus, &f, &sets), rat(5));
    assert_eq!(Tropical.parse("inf").unwrap(), None);
    assert_eq!(
        Tropical.parse("1/2").unwrap(),
        Some(BigRational::new(1.into(), 2.into()))
    );
    assert_eq!(
        Tropical.parse("-0.25").unwrap(),
        Some(BigRational::new((-1).into(), 4.into()))
    );
}

#[test]
fn bool_and_powerset() {
    let sets = choice_sets();
    let f = parse_formula(&Bool, "q * r(b)").unwrap();
    assert!(!overall_weight(&Bool, &f, &sets));
    let ps = Powerset {
        universe: ["x", "y"].iter().map(|s| s.to_string()).collect(),
    };
    let f = parse_formula(&ps, "[{x}] * p + [{y}] * q").unwrap();
    let want: BTreeSet<String> = ["x", "y"].iter().map(|s| s.to_string()).collect();
    assert_eq!(overall_weight(&ps, &f, &sets), want);
    assert!(parse_formula(&ps, "[{z}]").is_err());
}

#[test]
fn formula_syntax_errors() {
    assert!(matches!(
        parse_formula(&Nat, "p +"),
        Err(MeasureError::Syntax { .. })
    ));
    assert!(matches!(
        parse_formula(&Nat, "(p"),
        Err(MeasureError::Syntax { .. })
    ));
    assert!(matches!(
        parse_formula(&Nat, "p q"),
        Err(MeasureError::Syntax { .. })
    ));
    assert!(parse_formula(&Nat, "[abc]").is_err());
}

#[test]
fn guarded_constant() {
    let f = Formula::guarded(GroundAtom::consts("p", &[]), nat(7));
    assert_eq!(f.eval(&Nat, &|_| true), nat(7));
    assert_eq!(f.eval(&Nat, &|_| false), nat(1));
}

#[test]
fn model_count_on_fixtures() {
    for (name, k) in all_fixtures() {
        let sol = solve(&k);
        let w = overall_weight(&Nat, &Formula::Const(nat(1)), &sol.atom_sets());
        assert_eq!(w, nat(sol.models.len() as u32), "{name}");
    }
}

#[test]
fn mu_opt_on_korg1() {
    let k = fixture("korg1.ckr");
    let sol = solve(&k);
    let (ps, f) = build_mu_opt(&k, &sol.program).unwrap();
    let w = overall_weight(&ps, &f, &sol.atom_sets());
    assert_eq!(
        ps.render(&w),
        "{⟨S⊑E,i,c_local1,c⟩, ⟨S⊑M,i,c_local1,c⟩, ⟨S⊑R,i,c_local1,c⟩}"
    );
}

#[test]
fn mu_one_prefers_the_preferred_model() {
    let k = fixture("korg1.ckr");
    let sol = solve(&k);
    let (r, f) = build_mu_one(&k, &sol.program).unwrap();
    let (_, chi) = r.decode(&overall_weight(&r, &f, &sol.atom_sets())).unwrap();
    let local: Vec<String> = chi["c_local1"].keys().map(|a| a.to_string()).collect();
    assert_eq!(local, ["ovr(S⊑E,i,c_world)", "ovr(S⊑R,i,c_branch2)"]);
}

#[test]
fn mu_one_needs_a_single_relation() {
    let k = fixture("korg.ckr");
    let sol = solve(&k);
    assert!(matches!(
        ROne::new(&k, &sol.program),
        Err(CkrError::Measure(MeasureError::Unsupported(_)))
    ));
}

#[test]
fn mu_all_on_korg1() {
    let k = fixture("korg1.ckr");
    let sol = solve(&k);
    let mu = build_mu_all(&k, &sol.program).unwrap();
    let w = mu.overall_weight(&sol.atom_sets());
    for ((c, r), v) in mu.contexts.iter().zip(&mu.semiring.parts).zip(&w) {
        let shown = r.render(v);
        if c == "c_local1" {
            assert_eq!(
                shown,
                "{({M(i), S(i)}, {{ovr(S⊑E,i,c_world), ovr(S⊑R,i,c_branch2)}})}"
            );
        } else {
            assert_eq!(shown, "{(∅, {{}})}", "{c}");
        }
    }
}

#[test]
fn r_c_drops_dominated_pairs() {
    let k = fixture("korg1.ckr");
    let sol = solve(&k);
    let r = RContext::new(&k, &sol.program, "c_local1").unwrap();
    let f = r.formula(&k, &sol.program).unwrap();
    let per_model: Vec<_> = sol
        .atom_sets()
        .iter()
        .map(|s| f.eval(&r, &|a| s.contains(a)))
        .collect();
    let total = per_model.iter().fold(r.zero(), |acc, v| r.add(&acc, v));
    assert_eq!(total.len(), 1);
    for v in &per_model {
        assert!(r.add(v, &total) == total);
    }
}

fn ext() -> impl Strategy<Value = Option<BigRational>> {
    prop_oneof![
        Just(None),
        (-20i64..20, 1i64..5).prop_map(|(n, d)| Some(BigRational::new(n.into(), d.into())))
    ]
}

proptest! {
    #[test]
    fn nat_laws(xs in prop::collection::vec(0u32..50, 1..6)) {
        let v: Vec<BigUint> = xs.into_iter().map(BigUint::from).collect();
        prop_assert!(check_semiring_laws(&Nat, &v, usize::MAX).passed());
    }

    #[test]
    fn tropical_and_max_plus_laws(v in prop::collection::vec(ext(), 1..6)) {
        let r = check_semiring_laws(&Tropical, &v, usize::MAX);
        prop_assert!(r.passed(), "{:?}", r.failures);
        let r = check_semiring_laws(&MaxPlus, &v, usize::MAX);
        prop_assert!(r.passed(), "{:?}", r.failures);
    }

    #[test]
    fn powerset_laws(masks in prop::collection::vec(0u8..16, 1..6)) {
        let universe: BTreeSet<u8> = (0..4).collect();
        let ps = Powerset { universe: universe.clone() };
        let v: Vec<BTreeSet<u8>> = masks.iter().map(|m| universe.iter().filter(|i| m >> *i & 1 == 1).copied().collect()).collect();
        prop_assert!(check_semiring_laws(&ps, &v, usize::MAX).passed());
    }
}

#[test]
fn mu_opt_constants_parse_back() {
    let k = fixture("korg1.ckr");
    let sol = solve(&k);
    let (ps, _) = build_mu_opt(&k, &sol.program).unwrap();
    let v = ps
        .parse("{⟨S⊑E,i,c_local1,c⟩, ⟨S⊑R,i,c_local1,c⟩}")
        .unwrap();
    assert_eq!(v.len(), 2);
    assert_eq!(ps.parse(&ps.render(&ps.one())).unwrap(), ps.one());
}
