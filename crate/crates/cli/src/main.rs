//! `ckr`: command-line front end.
//!
//! Exit codes: 0 success or true, 1 false or unsatisfiable, 2 usage or input
//! error, 3 a grounding or solving cap was hit.

use std::path::PathBuf;
use std::process::ExitCode;

use ckr_core::depgraph::is_eval_disconnected;
use ckr_core::kb::{compute_closures, parse_sckr, validate_normal_form, Sckr};
use ckr_core::measures::{
    build_mu_all, build_mu_one, build_mu_opt, overall_weight, parse_formula, AtomSet, Bool,
    MaxPlus, Nat, Semiring, Tropical,
};
use ckr_core::preferences::{Preferences, RelMode};
use ckr_core::query::{
    parse_aggregate, parse_bcq, AggValue, ConsequenceMode, QueryError, Reasoner,
};
use ckr_core::translator::{emit_asp_text, solve_ckr, CkrError, CkrOptions};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

#[derive(Parser)]
#[command(
    name = "ckr",
    version,
    about = "Reasoner for simple contextualized knowledge repositories"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    /// Relation priority, most important first.
    #[arg(long, global = true, value_delimiter = ',')]
    relation_priority: Vec<String>,
    /// Use the pareto form of the relation-level preference.
    #[arg(long, global = true)]
    pareto: bool,
    /// Upper bound on evaluated solver guesses.
    #[arg(long, global = true)]
    max_guesses: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse and validate a KB.
    Check {
        file: PathBuf,
        /// Also test eval-disconnectedness.
        #[arg(long)]
        eval_disconnected: bool,
    },
    /// Print the logic program with the preference statements.
    Translate {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// List justified models, marking preferred ones with `*`.
    Models {
        file: PathBuf,
        /// Print every atom of each model.
        #[arg(long)]
        all: bool,
        /// Skip the preference filter.
        #[arg(long, conflicts_with = "preferred")]
        justified_only: bool,
        /// Only preferred models.
        #[arg(long)]
        preferred: bool,
        /// Say why each non-preferred model is beaten.
        #[arg(long)]
        explain_pref: bool,
    },
    /// `c : A(a)` or a conjunctive query; true if entailed.
    Entails { file: PathBuf, query: String },
    /// Cautious or brave consequences at a context.
    Query {
        file: PathBuf,
        context: String,
        #[arg(long, value_enum, default_value = "cautious")]
        mode: Mode,
    },
    /// Epistemic aggregate query.
    Aggregate { file: PathBuf, query: String },
    /// Overall weight of the justified models.
    Weight {
        file: PathBuf,
        #[arg(
            long,
            value_enum,
            required_unless_present = "builtin",
            requires = "formula"
        )]
        semiring: Option<SemiringName>,
        #[arg(long)]
        formula: Option<String>,
        #[arg(long, value_enum, conflicts_with = "semiring")]
        builtin: Option<Builtin>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Cautious,
    Brave,
}

#[derive(Clone, Copy, ValueEnum)]
enum SemiringName {
    Nat,
    Bool,
    Trop,
    Max,
}

#[derive(Clone, Copy, ValueEnum)]
#[allow(clippy::enum_variant_names)]
enum Builtin {
    MuOpt,
    MuOne,
    MuAll,
}

enum Failure {
    Input(String),
    Cap(String),
}

impl From<CkrError> for Failure {
    fn from(e: CkrError) -> Self {
        if e.is_cap() {
            Failure::Cap(e.to_string())
        } else {
            Failure::Input(e.to_string())
        }
    }
}

impl From<QueryError> for Failure {
    fn from(e: QueryError) -> Self {
        match e {
            QueryError::Ckr(e) => e.into(),
            other => Failure::Input(other.to_string()),
        }
    }
}

type Outcome = Result<bool, Failure>;

fn load(path: &PathBuf, g: &Global) -> Result<Sckr, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let k = parse_sckr(&text).map_err(|e| Failure::Input(format!("{}:{e}", path.display())))?;
    if g.relation_priority.is_empty() {
        Ok(k)
    } else {
        k.with_priority(&g.relation_priority)
            .map_err(|e| Failure::Input(e.to_string()))
    }
}

fn options(g: &Global) -> CkrOptions {
    let mut o = CkrOptions::default();
    if let Some(n) = g.max_guesses {
        o.solving.max_guesses = n;
    }
    o
}

fn mode(g: &Global) -> RelMode {
    if g.pareto {
        RelMode::Pareto
    } else {
        RelMode::Mp
    }
}

fn reasoner(path: &PathBuf, g: &Global) -> Result<Reasoner, Failure> {
    let r = Reasoner::with_mode(load(path, g)?, &options(g), mode(g))?;
    if !r.connectivity.is_disconnected() {
        eprintln!(
            "warning: not eval-disconnected, preference is the pairwise filter ({})",
            r.connectivity
        );
    }
    Ok(r)
}

fn report(g: &Global, r: &Reasoner, query: &str, result: Value, text: String) {
    if g.json {
        let v = json!({
            "query": query,
            "result": result,
            "preferred_models": r.preferred.len(),
            "justified_models": r.solution.models.len(),
        });
        println!("{}", serde_json::to_string_pretty(&v).expect("json"));
    } else {
        println!("{text}");
    }
}

fn check(g: &Global, file: &PathBuf, eval: bool) -> Outcome {
    let k = load(file, g)?;
    let diags = validate_normal_form(&k);
    for d in &diags {
        eprintln!("{}: {d}", file.display());
    }
    if !diags.is_empty() {
        return Err(Failure::Input(format!(
            "{} axioms not in normal form",
            diags.len()
        )));
    }
    compute_closures(&k.structure).map_err(|e| Failure::Input(e.to_string()))?;
    if !eval {
        if g.json {
            println!("{}", json!({"query": "check", "result": true}));
        } else {
            println!("OK");
        }
        return Ok(true);
    }
    let c = is_eval_disconnected(&k);
    if g.json {
        println!(
            "{}",
            json!({"query": "eval-disconnected", "result": c.is_disconnected(), "witness": c.to_string()})
        );
    } else {
        println!("{c}");
    }
    Ok(c.is_disconnected())
}

fn translate(g: &Global, file: &PathBuf, out: &Option<PathBuf>) -> Outcome {
    let text = emit_asp_text(&load(file, g)?)?;
    match out {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display())))?
        }
        None => print!("{text}"),
    }
    Ok(true)
}

fn models(
    g: &Global,
    file: &PathBuf,
    all: bool,
    justified_only: bool,
    preferred: bool,
    explain: bool,
) -> Outcome {
    let k = load(file, g)?;
    let sol = solve_ckr(&k, &options(g))?;
    let closures = compute_closures(&k.structure).map_err(|e| Failure::Input(e.to_string()))?;
    let prefs = Preferences::new(&closures);
    let maps: Vec<_> = sol.models.iter().map(|m| &m.clashes).collect();
    let pref: Vec<usize> = if justified_only {
        Vec::new()
    } else {
        prefs
            .preferred(&maps, mode(g))
            .map_err(|e| Failure::Input(e.to_string()))?
    };
    let mut listed = Vec::new();
    for (i, m) in sol.models.iter().enumerate() {
        let is_pref = pref.contains(&i);
        if preferred && !is_pref {
            continue;
        }
        let mut beaten_by = None;
        if explain && !is_pref && !justified_only {
            for &j in &pref {
                if let Some(e) = prefs
                    .explain(&sol.models[j].clashes, &m.clashes, mode(g))
                    .ok()
                    .flatten()
                {
                    beaten_by = Some((j, e));
                    break;
                }
            }
        }
        listed.push((i, is_pref, m, beaten_by));
    }
    if g.json {
        let items: Vec<Value> = listed
            .iter()
            .map(|(i, p, m, b)| {
                let mut v = json!({
                    "index": i + 1,
                    "preferred": p,
                    "clashes": m.clashes.entries().map(|(r, c, a)| json!({"relation": r, "context": c, "assumption": a.to_string()})).collect::<Vec<_>>(),
                });
                if all {
                    v["atoms"] = json!(sol.program.dump(&m.answer_set));
                }
                if let Some((j, e)) = b {
                    v["beaten_by"] = json!({"model": j + 1, "relation": e.relation, "context": e.context});
                }
                v
            })
            .collect();
        let v = json!({
            "query": "models",
            "result": items,
            "preferred_models": pref.len(),
            "justified_models": sol.models.len(),
        });
        println!("{}", serde_json::to_string_pretty(&v).expect("json"));
    } else {
        for (i, p, m, b) in &listed {
            println!(
                "{}Model {}: {}",
                if *p { "*" } else { " " },
                i + 1,
                m.clashes
            );
            if let Some((j, e)) = b {
                println!(
                    "    beaten by model {} on relation {} at {}",
                    j + 1,
                    e.relation,
                    e.context
                );
            }
            if all {
                println!("    {}", sol.program.dump(&m.answer_set));
            }
        }
        if justified_only {
            println!("{} justified", sol.models.len());
        } else {
            println!("{} justified, {} preferred", sol.models.len(), pref.len());
        }
    }
    Ok(!sol.models.is_empty())
}

fn entails(g: &Global, file: &PathBuf, query: &str) -> Outcome {
    let q = parse_bcq(query)?;
    let r = reasoner(file, g)?;
    let result = match q.atoms.as_slice() {
        [a] if a.ground().is_some() => r.c_entails(a)?,
        _ => r.bcq_entails(&q)?,
    };
    report(g, &r, query, json!(result), result.to_string());
    Ok(result)
}

fn consequences(g: &Global, file: &PathBuf, ctx: &str, m: Mode) -> Outcome {
    let r = reasoner(file, g)?;
    let cm = match m {
        Mode::Cautious => ConsequenceMode::Cautious,
        Mode::Brave => ConsequenceMode::Brave,
    };
    let set = r.consequences(ctx, cm)?;
    let items: Vec<String> = set.iter().map(|a| a.to_string()).collect();
    report(
        g,
        &r,
        ctx,
        json!(items),
        format!("{{{}}}", items.join(", ")),
    );
    Ok(true)
}

fn aggregate(g: &Global, file: &PathBuf, query: &str) -> Outcome {
    let q = parse_aggregate(query)?;
    let r = reasoner(file, g)?;
    let rows = r.epistemic_aggregate(&q)?;
    let table: Vec<Value> = rows
        .iter()
        .map(|row| {
            let mut cells: Vec<Value> = row.group.iter().map(|s| json!(s)).collect();
            cells.push(match &row.value {
                AggValue::Number(n) if n.is_integer() => n
                    .to_integer()
                    .to_string()
                    .parse::<i64>()
                    .map(|i| json!(i))
                    .unwrap_or_else(|_| json!(n.to_string())),
                v => json!(v.to_string()),
            });
            Value::Array(cells)
        })
        .collect();
    let text: Vec<String> = rows
        .iter()
        .map(|row| {
            let mut cells = row.group.clone();
            cells.push(row.value.to_string());
            cells.join("\t")
        })
        .collect();
    report(g, &r, query, Value::Array(table), text.join("\n"));
    Ok(true)
}

fn weigh<S: Semiring>(r: &S, formula: &str, sets: &[AtomSet]) -> Result<String, Failure> {
    let f = parse_formula(r, formula).map_err(|e| Failure::Input(e.to_string()))?;
    Ok(r.render(&overall_weight(r, &f, sets)))
}

fn weight(
    g: &Global,
    file: &PathBuf,
    semiring: Option<SemiringName>,
    formula: &Option<String>,
    builtin: Option<Builtin>,
) -> Outcome {
    let k = load(file, g)?;
    let sol = solve_ckr(&k, &options(g))?;
    let sets = sol.atom_sets();
    let (name, text) = match (builtin, semiring) {
        (Some(Builtin::MuOpt), _) => {
            let (r, f) = build_mu_opt(&k, &sol.program)?;
            ("mu_opt", r.render(&overall_weight(&r, &f, &sets)))
        }
        (Some(Builtin::MuOne), _) => {
            let (r, f) = build_mu_one(&k, &sol.program)?;
            ("mu_one", r.render(&overall_weight(&r, &f, &sets)))
        }
        (Some(Builtin::MuAll), _) => {
            let mu = build_mu_all(&k, &sol.program)?;
            let w = mu.overall_weight(&sets);
            let lines: Vec<String> = mu
                .contexts
                .iter()
                .zip(mu.semiring.parts.iter().zip(&w))
                .map(|(c, (r, v))| format!("{c}: {}", r.render(v)))
                .collect();
            ("mu_all", lines.join("\n"))
        }
        (None, Some(s)) => {
            let f = formula.as_deref().unwrap_or_default();
            let text = match s {
                SemiringName::Nat => weigh(&Nat, f, &sets)?,
                SemiringName::Bool => weigh(&Bool, f, &sets)?,
                SemiringName::Trop => weigh(&Tropical, f, &sets)?,
                SemiringName::Max => weigh(&MaxPlus, f, &sets)?,
            };
            ("formula", text)
        }
        (None, None) => return Err(Failure::Input("need --builtin or --semiring".into())),
    };
    if g.json {
        let v = json!({"query": name, "result": text, "justified_models": sol.models.len()});
        println!("{}", serde_json::to_string_pretty(&v).expect("json"));
    } else {
        println!("{text}");
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let outcome = match &cli.cmd {
        Cmd::Check {
            file,
            eval_disconnected,
        } => check(g, file, *eval_disconnected),
        Cmd::Translate { file, output } => translate(g, file, output),
        Cmd::Models {
            file,
            all,
            justified_only,
            preferred,
            explain_pref,
        } => models(g, file, *all, *justified_only, *preferred, *explain_pref),
        Cmd::Entails { file, query } => entails(g, file, query),
        Cmd::Query {
            file,
            context,
            mode,
        } => consequences(g, file, context, *mode),
        Cmd::Aggregate { file, query } => aggregate(g, file, query),
        Cmd::Weight {
            file,
            semiring,
            formula,
            builtin,
        } => weight(g, file, *semiring, formula, *builtin),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Cap(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
