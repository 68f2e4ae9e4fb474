mod common;

use ckr_core::kb::{compute_closures, parse_sckr};
use ckr_core::preferences::{ClashMap, ClashSet, PrefError, Preferences, RelMode};
use ckr_core::translator::preferred_indices;
use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The three clash sets of K_org1 at c_local1, keyed by their pairs.
fn korg1_sets() -> (ckr_core::kb::OrderClosures, Vec<ClashSet>) {
    let k = fixture("korg1.ckr");
    let sol = solve(&k);
    let find = |pairs: [&str; 2]| -> ClashSet {
        sol.models
            .iter()
            .map(|m| m.clashes.get("c", "c_local1").clone())
            .find(|s| {
                let mut p: Vec<String> = s.iter().map(|a| a.pair()).collect();
                p.sort();
                let mut want: Vec<String> = pairs.iter().map(|s| s.to_string()).collect();
                want.sort();
                p == want
            })
            .unwrap()
    };
    let sets = vec![
        find(["⟨S⊑E,i⟩", "⟨S⊑R,i⟩"]),
        find(["⟨S⊑M,i⟩", "⟨S⊑R,i⟩"]),
        find(["⟨S⊑M,i⟩", "⟨S⊑E,i⟩"]),
    ];
    (compute_closures(&k.structure).unwrap(), sets)
}

#[test]
fn korg1_local_order() {
    let (cl, x) = korg1_sets();
    let p = Preferences::new(&cl);
    let strict = |a: usize, b: usize| p.local_strict("c", "c_local1", &x[a], &x[b]).unwrap();
    assert!(strict(0, 1));
    assert!(strict(0, 2));
    assert!(strict(2, 1));
    assert!(!strict(1, 0) && !strict(2, 0) && !strict(1, 2));
}

#[test]
fn local_preference_is_reflexive() {
    let (cl, x) = korg1_sets();
    let p = Preferences::new(&cl);
    for s in &x {
        assert!(p.local_gt("c", "c_local1", s, s).unwrap());
        assert!(!p.local_strict("c", "c_local1", s, s).unwrap());
    }
}

#[test]
fn assumption_outside_its_reach_is_rejected() {
    let (cl, x) = korg1_sets();
    let p = Preferences::new(&cl);
    let e = p.local_gt("c", "c_world", &x[0], &x[1]).unwrap_err();
    assert!(matches!(e, PrefError::Guard { .. }));
    assert!(matches!(
        p.local_gt("z", "c_local1", &x[0], &x[1]),
        Err(PrefError::UnknownRelation(_))
    ));
    assert!(matches!(
        p.local_gt("c", "nowhere", &x[0], &x[1]),
        Err(PrefError::UnknownContext(_))
    ));
}

#[test]
fn korg_preferred_model_wins_on_time() {
    let k = fixture("korg.ckr");
    let sol = solve(&k);
    let cl = compute_closures(&k.structure).unwrap();
    let p = Preferences::new(&cl);
    let pref = preferred_indices(&k, &sol.models, RelMode::Mp).unwrap();
    assert_eq!(pref.len(), 1);
    let best = &sol.models[pref[0]].clashes;
    let mut relations = Vec::new();
    for (i, m) in sol.models.iter().enumerate() {
        if i != pref[0] {
            let e = p
                .explain(best, &m.clashes, RelMode::Mp)
                .unwrap()
                .expect("preferred beats the rest");
            relations.push(e.relation);
        }
    }
    assert!(relations.iter().any(|r| r == "t"));
}

const CROSSED: &str = "\
relation t.
relation c.
context up_t.
context up_c.
context low.
low < up_t [t].
low < up_c [c].
up_t: D[t](A subClassOf B).
up_c: D[c](A subClassOf C).
low: B and C subClassOf bot.
low: A(x).
";

#[test]
fn priority_decides_between_relations() {
    let preferred_view = |k: ckr_core::kb::Sckr| -> Vec<String> {
        let sol = solve(&k);
        assert_eq!(sol.models.len(), 2);
        let pref = preferred_indices(&k, &sol.models, RelMode::Mp).unwrap();
        assert_eq!(pref.len(), 1);
        sol.models[pref[0]]
            .view("low")
            .iter()
            .map(|a| a.to_string())
            .collect()
    };
    let k = parse_sckr(CROSSED).unwrap();
    assert_eq!(preferred_view(k.clone()), ["A(x)", "B(x)"]);
    assert_eq!(
        preferred_view(k.with_priority(&["c".into()]).unwrap()),
        ["A(x)", "C(x)"]
    );
}

#[test]
fn empty_maps_are_not_preferred_over_each_other() {
    let k = parse_sckr("relation c.\ncontext a.\n").unwrap();
    let cl = compute_closures(&k.structure).unwrap();
    let p = Preferences::new(&cl);
    let e = ClashMap::default();
    assert!(!p.global_gt(&e, &e).unwrap());
    assert_eq!(p.preferred(&[&e, &e], RelMode::Mp).unwrap(), vec![0, 1]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn local_preference_is_transitive(seed in any::<u64>(), n in 3usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if let Some(cp) = random_clash_pool(&mut rng, n) {
            let p = Preferences::new(&cp.closures);
            for _ in 0..10 {
                let a = random_subset(&mut rng, &cp.pool);
                let b = random_subset(&mut rng, &cp.pool);
                let c = random_subset(&mut rng, &cp.pool);
                let gt = |x: &ClashSet, y: &ClashSet| p.local_gt(&cp.relation, &cp.context, x, y).unwrap();
                if gt(&a, &b) && gt(&b, &c) {
                    prop_assert!(gt(&a, &c));
                }
                // Strict part is asymmetric.
                let st = |x: &ClashSet, y: &ClashSet| p.local_strict(&cp.relation, &cp.context, x, y).unwrap();
                prop_assert!(!(st(&a, &b) && st(&b, &a)));
            }
        }
    }

    #[test]
    fn mp_and_pareto_agree_when_disconnected(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let shape = random_shape(&mut rng, false);
        let k = parse_sckr(&random_kb_text(&mut rng, &shape)).unwrap();
        let (prog, _) = ckr_core::translator::ground_ckr(&k, &Default::default()).unwrap();
        if let Oracle::AnswerSets(_) = oracle_answer_sets(&prog, 12) {
            let models = solve(&k).models;
            prop_assert_eq!(
                preferred_indices(&k, &models, RelMode::Mp).unwrap(),
                preferred_indices(&k, &models, RelMode::Pareto).unwrap()
            );
        }
    }
}
