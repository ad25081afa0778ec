#![allow(dead_code)]

pub mod fixtures;
pub mod gen;

use std::collections::BTreeSet;

use semgraph::composer::{self, Instance, Lexicon, SyntaxConfig, Syntax};
use semgraph::resolver::{Constraint, Resolution, Resolver};
use semgraph::{Error, SynType};

pub fn lexicon() -> Lexicon {
    Lexicon::builtin()
}

/// Every (variant choice, syntactic reading) of a tagged sentence.
pub fn readings(sentence: &str, goal: &str, cfg: SyntaxConfig) -> Vec<(Vec<Instance>, Syntax)> {
    let lex = lexicon();
    let toks = composer::tokenize(sentence).unwrap();
    let variants = composer::instantiate(&lex, &toks).unwrap();
    let goal: SynType = goal.parse().unwrap();
    let mut out = Vec::new();
    for choice in composer::variant_choices(&variants) {
        for r in composer::parse_readings(&choice, &goal, cfg).unwrap() {
            out.push((choice.iter().map(|&i| i.clone()).collect(), r.syntax));
        }
    }
    out
}

pub fn resolver() -> Resolver {
    Resolver::new(lexicon().eventive_labels())
}

/// Violated binding statements, one set per syntactic reading, after
/// composing with the given co-reference script.
pub fn binding(sentence: &str, goal: &str, script: &[Resolution]) -> BTreeSet<BTreeSet<Constraint>> {
    let rs = readings(sentence, goal, SyntaxConfig::default());
    assert!(!rs.is_empty(), "no parse for {sentence}");
    let res = resolver();
    let out: BTreeSet<BTreeSet<Constraint>> = rs
        .iter()
        .filter_map(|(inst, syn)| {
            let refs: Vec<&Instance> = inst.iter().collect();
            // Variants the script does not cover (e.g. a split anaphor) are skipped.
            let c = match composer::compose(&refs, syn, script) {
                Err(Error::Unresolved(..)) => return None,
                other => other.unwrap(),
            };
            assert!(composer::validate(&c.graph, &res.forces).ok(), "{sentence} is uninterpretable");
            Some(res.binding(&c).iter().flat_map(|v| v.violated()).collect())
        })
        .collect();
    assert!(!out.is_empty(), "no reading of {sentence} fits the script");
    out
}
