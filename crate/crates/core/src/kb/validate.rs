use std::fmt;

use super::{AxiomKind, Sckr};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub context: String,
    pub axiom: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.context, self.axiom, self.message)
    }
}

/// Reports every axiom outside the normal form. Empty means valid.
pub fn validate_normal_form(k: &Sckr) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for (c, a) in k.strict_axioms() {
        if a.kind() == AxiomKind::Disjunction {
            out.push(Diagnostic {
                context: c.to_string(),
                axiom: a.to_string(),
                message: "disjunction on the right-hand side is not in normal form".into(),
            });
        }
    }
    for (c, d) in k.defeasible_axioms() {
        let kind = d.body.kind();
        if kind.is_defeasible_shape() {
            continue;
        }
        let message = match kind {
            AxiomKind::SubEvalC | AxiomKind::SubEvalR => "eval axioms cannot be defeasible",
            AxiomKind::Disjunction => "disjunction on the right-hand side is not in normal form",
            _ => "assertions and (in)equalities cannot be defeasible",
        };
        out.push(Diagnostic {
            context: c.to_string(),
            axiom: d.to_string(),
            message: message.into(),
        });
    }
    out
}
