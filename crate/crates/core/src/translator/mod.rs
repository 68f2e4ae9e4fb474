//! Compilation of an sCKR into the CKR program, its grounding, the
//! guess-and-check solver over overriding atoms, and clingo/asprin text.

mod templates;

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::asp::syntax::{parse_program, AtomPat, Program, Rule, TermPat};
use crate::asp::{
    ground_program, solve_with_guess, AspError, AtomId, GroundAtom, GroundProgram, GroundStats,
    GroundingOptions, Interpretation, SolveOptions, SolveStats, Term,
};
use crate::kb::{
    compute_closures, validate_normal_form, Axiom, AxiomKind, KbError, OrderClosures, Sckr, TOP,
};
use crate::preferences::{ClashMap, ClashingAssumption, PrefError, Preferences, RelMode};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CkrError {
    #[error(transparent)]
    Kb(#[from] KbError),
    #[error("not in normal form: {0}")]
    NotNormalForm(String),
    #[error("relations `{0}` and `{1}` map to the same constant")]
    RelationClash(String, String),
    #[error(transparent)]
    Asp(#[from] AspError),
    #[error(transparent)]
    Pref(#[from] PrefError),
    #[error("malformed overriding atom {0}")]
    BadOvr(String),
    #[error(transparent)]
    Measure(#[from] crate::measures::MeasureError),
}

impl CkrError {
    pub fn is_cap(&self) -> bool {
        matches!(self, CkrError::Asp(AspError::CapExceeded { .. }))
    }
}

/// Constant used for a relation in programs.
pub fn relation_constant(name: &str) -> &str {
    match name {
        "t" => "time",
        "c" => "covers",
        other => other,
    }
}

fn relation_constants(k: &Sckr) -> Result<BTreeMap<String, String>, CkrError> {
    let mut back: BTreeMap<String, String> = BTreeMap::new();
    for r in &k.structure.relations {
        let c = relation_constant(&r.name).to_string();
        if let Some(prev) = back.insert(c, r.name.clone()) {
            return Err(CkrError::RelationClash(prev, r.name.clone()));
        }
    }
    Ok(back)
}

/// Individuals that can be instances: those named in axioms, not contexts.
pub fn individuals(k: &Sckr) -> Vec<String> {
    k.vocabulary
        .individuals
        .iter()
        .filter(|i| !k.vocabulary.contexts.contains(*i))
        .cloned()
        .collect()
}

fn fact(tag: &str, pred: &str, args: &[&str]) -> Rule {
    Rule::fact(
        tag,
        AtomPat::new(pred, args.iter().map(|a| TermPat::c(*a)).collect()),
    )
}

fn strict_fact(a: &Axiom, c: &str) -> Option<Rule> {
    use Axiom::*;
    Some(match a {
        ClassAssertion(x, i) => fact("irl-inst1", "insta", &[i, x, c]),
        RoleAssertion(r, x, y) => fact("irl-triple", "triplea", &[x, r, y, c]),
        Eq(x, y) => fact("irl-eq", "eq", &[x, y, c, "main"]),
        Neq(..) => return None,
        NomSubClass(i, b) => fact("irl-inst3", "insta", &[i, b, c]),
        SubClass(x, y) => fact("irl-subc", "subClass", &[x, y, c]),
        SubConj(x, y, z) => fact("irl-subcnj", "subConj", &[x, y, z, c]),
        SubEx(r, x, y) => fact("irl-subex", "subEx", &[r, x, y, c]),
        SupEx(x, r, i) => fact("irl-supex", "supEx", &[x, r, i, c]),
        SupForall(x, r, y) => fact("irl-forall", "supForall", &[x, r, y, c]),
        SupLeqOne(x, r) => fact("irl-leqone", "supLeqOne", &[x, r, c]),
        SubRole(r, s) => fact("irl-subr", "subRole", &[r, s, c]),
        SubRChain(r, s, t) => fact("irl-subrc", "subRChain", &[r, s, t, c]),
        Dis(r, s) => fact("irl-dis", "dis", &[r, s, c]),
        Inv(r, s) => fact("irl-inv", "inv", &[r, s, c]),
        Irr(r) => fact("irl-irr", "irr", &[r, c]),
        SubEvalC(x, c1, y) => fact("ilc-subevalat", "subEval", &[x, c1, y, c]),
        SubEvalR(r, c1, s) => fact("ilc-subevalr", "subEvalR", &[r, c1, s, c]),
        Disjunction(..) => return None,
    })
}

fn defeasible_fact(a: &Axiom, c: &str, rel: &str) -> Option<Rule> {
    use Axiom::*;
    Some(match a {
        SubClass(x, y) => fact("id-subc", "def_subclass", &[x, y, c, rel]),
        SubConj(x, y, z) => fact("id-subcnj", "def_subcnj", &[x, y, z, c, rel]),
        SubEx(r, x, y) => fact("id-subex", "def_subex", &[r, x, y, c, rel]),
        SupEx(x, r, i) => fact("id-supex", "def_supex", &[x, r, i, c, rel]),
        SupForall(x, r, y) => fact("id-forall", "def_supforall", &[x, r, y, c, rel]),
        SupLeqOne(x, r) => fact("id-leqone", "def_supleqone", &[x, r, c, rel]),
        SubRole(r, s) => fact("id-subr", "def_subr", &[r, s, c, rel]),
        SubRChain(r, s, t) => fact("id-subrc", "def_subrc", &[r, s, t, c, rel]),
        Dis(r, s) => fact("id-dis", "def_dis", &[r, s, c, rel]),
        Inv(r, s) => fact("id-inv", "def_inv", &[r, s, c, rel]),
        Irr(r) => fact("id-irr", "def_irr", &[r, c, rel]),
        _ => return None,
    })
}

fn check(k: &Sckr) -> Result<OrderClosures, CkrError> {
    let diags = validate_normal_form(k);
    if let Some(d) = diags.first() {
        return Err(CkrError::NotNormalForm(d.to_string()));
    }
    relation_constants(k)?;
    Ok(compute_closures(&k.structure)?)
}

/// Input facts: global structure, then per-context vocabulary, strict and
/// defeasible axioms.
pub fn input_facts(k: &Sckr) -> Result<Program, CkrError> {
    let closures = check(k)?;
    let mut rules = Vec::new();
    for c in &k.structure.contexts {
        rules.push(fact("igl-ctx", "context", &[c]));
    }
    for r in &k.structure.relations {
        rules.push(fact("igl-rel", "relation", &[relation_constant(&r.name)]));
    }
    for (ri, r) in closures.relations.iter().enumerate() {
        let rc = relation_constant(r);
        for (a, ca) in closures.contexts.iter().enumerate() {
            for (b, cb) in closures.contexts.iter().enumerate() {
                if closures.prec[ri][a][b] {
                    rules.push(fact("igl-covers", "prec", &[ca, cb, rc]));
                }
            }
        }
    }
    let inds = individuals(k);
    for c in &k.structure.contexts {
        for i in &inds {
            rules.push(fact("irl-nom", "nom", &[i, c]));
        }
        for a in &k.vocabulary.concepts {
            rules.push(fact("irl-cls", "cls", &[a, c]));
        }
        for r in &k.vocabulary.roles {
            rules.push(fact("irl-rol", "rol", &[r, c]));
        }
    }
    for (c, a) in k.strict_axioms() {
        rules.extend(strict_fact(a, c));
    }
    for (c, d) in k.defeasible_axioms() {
        rules.extend(defeasible_fact(&d.body, c, relation_constant(&d.relation)));
    }
    Ok(Program { rules })
}

fn template_rules() -> Program {
    let text = [
        templates::GLOBAL,
        templates::RL,
        templates::EVAL,
        templates::OVR,
        templates::STRICT_INHERITANCE,
        templates::DEFEASIBLE_INHERITANCE,
        templates::PARALLEL_INHERITANCE,
        templates::TEST,
    ]
    .concat();
    parse_program(&text).expect("rule templates parse")
}

/// The CKR program: input facts followed by the deduction, overriding,
/// inheritance and test rules.
pub fn translate(k: &Sckr) -> Result<Program, CkrError> {
    let mut p = input_facts(k)?;
    p.rules.extend(template_rules().rules);
    Ok(p)
}

/// Clingo/asprin text: the program, the preparation rules, relation weights
/// and the preference statements.
pub fn emit_asp_text(k: &Sckr) -> Result<String, CkrError> {
    let mut out = translate(k)?.render();
    out.push_str(
        &parse_program(templates::PREP)
            .expect("prep rules parse")
            .render(),
    );
    let m = k.structure.relations.len();
    let weights = Program {
        rules: k
            .structure
            .relations
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let w = (m - i).to_string();
                fact("igl-weight", "rel_w", &[relation_constant(&r.name), &w])
            })
            .collect(),
    };
    out.push_str(&weights.render());
    out.push_str(templates::PREFERENCES);
    Ok(out)
}

#[derive(Clone, Debug, Default)]
pub struct CkrOptions {
    pub grounding: GroundingOptions,
    pub solving: SolveOptions,
}

pub fn ground_ckr(k: &Sckr, opts: &CkrOptions) -> Result<(GroundProgram, GroundStats), CkrError> {
    Ok(ground_program(&translate(k)?, &opts.grounding)?)
}

/// Ground `ovr` atoms: the possible overriding atoms.
pub fn ovr_domain(p: &GroundProgram) -> Vec<AtomId> {
    (0..p.base_size() as u32)
        .map(AtomId)
        .filter(|a| p.atom(*a).pred == "ovr")
        .collect()
}

fn instance_arity(kind: AxiomKind) -> usize {
    use AxiomKind::*;
    match kind {
        SupForall | SubRole | Dis | Inv => 2,
        SupLeqOne | SubRChain => 3,
        _ => 1,
    }
}

fn const_arg(a: &GroundAtom, i: usize) -> Result<String, CkrError> {
    a.args
        .get(i)
        .and_then(Term::as_const)
        .map(str::to_string)
        .ok_or_else(|| CkrError::BadOvr(a.to_string()))
}

/// Decodes `ovr(tag, instance…, operands…, declared, target, rel)` into the
/// target context and the assumption.
pub fn decode_ovr(
    a: &GroundAtom,
    relations: &BTreeMap<String, String>,
) -> Result<(String, ClashingAssumption), CkrError> {
    let bad = || CkrError::BadOvr(a.to_string());
    let kind = AxiomKind::from_ovr_tag(&const_arg(a, 0)?).ok_or_else(bad)?;
    let n = a.args.len();
    let inst = instance_arity(kind);
    if n < 1 + inst + 3 {
        return Err(bad());
    }
    let args: Vec<String> = (0..n).map(|i| const_arg(a, i)).collect::<Result<_, _>>()?;
    let instance = args[1..1 + inst].to_vec();
    let axiom = Axiom::from_parts(kind, &args[1 + inst..n - 3]).ok_or_else(bad)?;
    let relation = relations.get(&args[n - 1]).cloned().ok_or_else(bad)?;
    let target = args[n - 2].clone();
    Ok((
        target,
        ClashingAssumption {
            axiom,
            instance,
            declared_at: args[n - 3].clone(),
            relation,
        },
    ))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JustifiedModel {
    pub answer_set: Interpretation,
    pub clashes: ClashMap,
    /// Per context, the concept and role assertions derived in `main`,
    /// without `top`.
    pub views: BTreeMap<String, BTreeSet<Axiom>>,
}

impl JustifiedModel {
    pub fn view(&self, c: &str) -> &BTreeSet<Axiom> {
        static EMPTY: BTreeSet<Axiom> = BTreeSet::new();
        self.views.get(c).unwrap_or(&EMPTY)
    }

    pub fn holds(&self, c: &str, a: &Axiom) -> bool {
        self.view(c).contains(a)
    }
}

/// Reads the clash map and the per-context views off an answer set.
pub fn extract_model(
    k: &Sckr,
    p: &GroundProgram,
    answer_set: Interpretation,
) -> Result<JustifiedModel, CkrError> {
    let relations = relation_constants(k)?;
    let mut clashes = ClashMap::default();
    let mut views: BTreeMap<String, BTreeSet<Axiom>> = k
        .structure
        .contexts
        .iter()
        .map(|c| (c.clone(), BTreeSet::new()))
        .collect();
    let main = Term::constant("main");
    for &id in &answer_set {
        let a = p.atom(id);
        match (a.pred.as_str(), a.args.len()) {
            ("ovr", _) => {
                let (target, ca) = decode_ovr(a, &relations)?;
                clashes.insert(&target, ca);
            }
            ("instd", 4) if a.args[3] == main => {
                let x = const_arg(a, 0)?;
                let z = const_arg(a, 1)?;
                let c = const_arg(a, 2)?;
                if z != TOP {
                    views
                        .entry(c)
                        .or_default()
                        .insert(Axiom::ClassAssertion(z, x));
                }
            }
            ("tripled", 5) if a.args[4] == main => {
                let x = const_arg(a, 0)?;
                let r = const_arg(a, 1)?;
                let y = const_arg(a, 2)?;
                let c = const_arg(a, 3)?;
                views
                    .entry(c)
                    .or_default()
                    .insert(Axiom::RoleAssertion(r, x, y));
            }
            _ => {}
        }
    }
    Ok(JustifiedModel {
        answer_set,
        clashes,
        views,
    })
}

#[derive(Clone, Debug)]
pub struct CkrSolution {
    pub program: GroundProgram,
    pub models: Vec<JustifiedModel>,
    pub grounding: GroundStats,
    pub solving: SolveStats,
}

/// All justified models, i.e. the answer sets of the ground CKR program,
/// in answer-set order.
pub fn solve_ckr(k: &Sckr, opts: &CkrOptions) -> Result<CkrSolution, CkrError> {
    let (program, grounding) = ground_ckr(k, opts)?;
    let domain = ovr_domain(&program);
    let (sets, solving) = solve_with_guess(&program, &domain, &opts.solving)?;
    let models = sets
        .into_iter()
        .map(|s| extract_model(k, &program, s))
        .collect::<Result<_, _>>()?;
    Ok(CkrSolution {
        program,
        models,
        grounding,
        solving,
    })
}

/// Indices of the preferred models among `models`.
pub fn preferred_indices(
    k: &Sckr,
    models: &[JustifiedModel],
    mode: RelMode,
) -> Result<Vec<usize>, CkrError> {
    let closures = compute_closures(&k.structure)?;
    let prefs = Preferences::new(&closures);
    let maps: Vec<&ClashMap> = models.iter().map(|m| &m.clashes).collect();
    Ok(prefs.preferred(&maps, mode)?)
}

/// The preferred models under the MP lifting.
pub fn preferred_filter(
    k: &Sckr,
    models: &[JustifiedModel],
) -> Result<Vec<JustifiedModel>, CkrError> {
    Ok(preferred_indices(k, models, RelMode::Mp)?
        .into_iter()
        .map(|i| models[i].clone())
        .collect())
}

impl CkrSolution {
    /// Each justified model's answer set as ground atoms.
    pub fn atom_sets(&self) -> Vec<BTreeSet<GroundAtom>> {
        self.models
            .iter()
            .map(|m| {
                m.answer_set
                    .iter()
                    .map(|a| self.program.atom(*a).clone())
                    .collect()
            })
            .collect()
    }
}
