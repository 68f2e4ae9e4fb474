use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn ckr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ckr"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn entails_exit_codes() {
    let korg = fixture("korg.ckr");
    let korg1 = fixture("korg1.ckr");
    assert_eq!(
        ckr(&["entails", &korg, "c_local_2021:R(i)"]).status.code(),
        Some(0)
    );
    assert_eq!(
        ckr(&["entails", &korg1, "c_local1 : E(i)"]).status.code(),
        Some(1)
    );
    assert_eq!(
        ckr(&["entails", &korg1, "nowhere : E(i)"]).status.code(),
        Some(2)
    );
    assert_eq!(
        ckr(&["entails", &korg1, "c_local1 E(i)"]).status.code(),
        Some(2)
    );
    assert_eq!(
        ckr(&["entails", "/nonexistent.ckr", "c : A(i)"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        ckr(&["entails", &korg1, "c_local1 : S(Y), c_local1 : M(Y)"])
            .status
            .code(),
        Some(0)
    );
}

#[test]
fn check_reports_disconnected() {
    let o = ckr(&["check", &fixture("korg1.ckr")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "OK");
    let o = ckr(&["check", "--eval-disconnected", &fixture("korg1.ckr")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("DISCONNECTED"));
}

#[test]
fn translate_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["korg", "korg1"] {
        let out = dir.path().join(format!("{name}.lp"));
        let o = ckr(&[
            "translate",
            &fixture(&format!("{name}.ckr")),
            "-o",
            out.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        let got = std::fs::read(&out).unwrap();
        let want = std::fs::read(fixture(&format!("golden/{name}.lp"))).unwrap();
        assert!(got == want, "{name}.lp differs");
    }
}

#[test]
fn models_marks_the_preferred_one() {
    let o = ckr(&["models", &fixture("korg1.ckr"), "--explain-pref"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let starred: Vec<&str> = text.lines().filter(|l| l.starts_with('*')).collect();
    assert_eq!(starred.len(), 1);
    assert!(starred[0].contains("⟨S⊑E,i⟩@c_world") && starred[0].contains("⟨S⊑R,i⟩@c_branch2"));
    assert_eq!(text.matches("beaten by model").count(), 2);
    assert!(text.contains("3 justified, 1 preferred"));
}

#[test]
fn query_and_json_output() {
    let o = ckr(&["query", &fixture("korg.ckr"), "c_local_2020"]);
    assert_eq!(stdout(&o).trim(), "{R(i), RE(i), S(i)}");
    let o = ckr(&[
        "--json",
        "entails",
        &fixture("korg1.ckr"),
        "c_local1 : M(i)",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"], true);
    assert_eq!(v["justified_models"], 3);
    assert_eq!(v["preferred_models"], 1);
    assert_eq!(v["query"], "c_local1 : M(i)");
}

#[test]
fn aggregate_json_rows() {
    let o = ckr(&[
        "--json",
        "aggregate",
        &fixture("korg.ckr"),
        "q(X, count(Y)) <- K X,Y. X : S(Y)",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(
        v["result"],
        serde_json::json!([
            ["c_local_2019", 1],
            ["c_local_2020", 1],
            ["c_local_2021", 1]
        ])
    );
}

#[test]
fn weights() {
    let korg1 = fixture("korg1.ckr");
    let o = ckr(&["weight", &korg1, "--semiring", "nat", "--formula", "1"]);
    assert_eq!(stdout(&o).trim(), "3");
    let o = ckr(&["weight", &korg1, "--builtin", "mu-opt"]);
    assert_eq!(
        stdout(&o).trim(),
        "{⟨S⊑E,i,c_local1,c⟩, ⟨S⊑M,i,c_local1,c⟩, ⟨S⊑R,i,c_local1,c⟩}"
    );
    let o = ckr(&["weight", &korg1, "--builtin", "mu-all"]);
    assert!(stdout(&o)
        .contains("c_local1: {({M(i), S(i)}, {{ovr(S⊑E,i,c_world), ovr(S⊑R,i,c_branch2)}})}"));
    let o = ckr(&["weight", &fixture("korg.ckr"), "--builtin", "mu-one"]);
    assert_eq!(o.status.code(), Some(2));
    let o = ckr(&["weight", &korg1, "--semiring", "nat", "--formula", "1 +"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn priority_flag() {
    let korg = fixture("korg.ckr");
    let o = ckr(&[
        "--relation-priority",
        "c,t",
        "entails",
        &korg,
        "c_local_2021:R(i)",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = ckr(&[
        "--relation-priority",
        "zzz",
        "entails",
        &korg,
        "c_local_2021:R(i)",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn connected_kb_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("linked.ckr");
    std::fs::write(
        &path,
        "relation c.\ncontext up.\ncontext mid.\nmid < up [c].\nup: D[c](A subClassOf B).\n\
         mid: D[c](C subClassOf D).\nmid: eval(A,up) subClassOf C.\nmid: A(x).\n",
    )
    .unwrap();
    let o = ckr(&["check", "--eval-disconnected", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("CONNECTED"));
    let o = ckr(&["entails", path.to_str().unwrap(), "mid : A(x)"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!o.stderr.is_empty());
}
