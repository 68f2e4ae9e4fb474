use std::collections::BTreeSet;
use std::fmt;

use super::{Category, Sckr};

/// Canonical DSL form. Declarations are emitted for every relation and
/// context, and for vocabulary symbols that no axiom mentions.
impl fmt::Display for Sckr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.structure.relations {
            writeln!(f, "relation {}.", r.name)?;
        }
        for c in &self.structure.contexts {
            writeln!(f, "context {c}.")?;
        }
        let mut used: BTreeSet<&str> = BTreeSet::new();
        for (_, a) in self.strict_axioms() {
            used.extend(a.symbols().into_iter().map(|(s, _)| s));
        }
        for (_, d) in self.defeasible_axioms() {
            used.extend(d.body.symbols().into_iter().map(|(s, _)| s));
        }
        let decls = [
            ("concept", Category::Concept, &self.vocabulary.concepts),
            ("role", Category::Role, &self.vocabulary.roles),
            (
                "individual",
                Category::Individual,
                &self.vocabulary.individuals,
            ),
        ];
        for (word, _, set) in decls {
            for s in set.iter().filter(|s| !used.contains(s.as_str())) {
                writeln!(f, "{word} {s}.")?;
            }
        }
        for r in &self.structure.relations {
            for (lo, hi) in &r.edges {
                writeln!(f, "{lo} < {hi} [{}].", r.name)?;
            }
        }
        for c in &self.structure.contexts {
            if let Some(kb) = self.kbs.get(c) {
                for a in &kb.strict {
                    writeln!(f, "{c}: {a}.")?;
                }
                for d in &kb.defeasible {
                    writeln!(f, "{c}: {d}.")?;
                }
            }
        }
        Ok(())
    }
}
