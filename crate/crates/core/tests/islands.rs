mod common;

use std::collections::BTreeSet;

use common::readings;
use semgraph::composer::{self, Instance, SyntaxConfig};

/// For each reading: does the quantifier at token `q` scope over the
/// matrix clause headed by token `top` (its scope source 2 fused with the
/// clause's source 0)?
fn scopes(sentence: &str, q: usize, top: usize) -> Vec<bool> {
    readings(sentence, "s", SyntaxConfig::default())
        .iter()
        .map(|(inst, syn)| {
            let refs: Vec<&Instance> = inst.iter().collect();
            let c = composer::compose(&refs, syn, &[]).unwrap();
            c.partition.same((q, 2), (top, 0))
        })
        .collect()
}

fn kinds(v: &[bool]) -> BTreeSet<bool> {
    v.iter().copied().collect()
}

#[test]
fn unmarked_attitude_lets_the_quantifier_out() {
    let s = scopes("Joe/NNP thought/VBD every/DT dog/NN swam/VBD", 2, 1);
    assert_eq!(kinds(&s), [false, true].into());
}

#[test]
fn believe_is_an_island() {
    let s = scopes("Joe/NNP believed/VBD every/DT dog/NN swam/VBD", 2, 1);
    assert_eq!(s, vec![false]);
    let s = scopes("Joe/NNP believed/VBD that/IN every/DT dog/NN swam/VBD", 3, 1);
    assert!(!s.is_empty());
    assert!(s.iter().all(|w| !w));
}

#[test]
fn ensure_exempts_the_quantifier_key() {
    let s = scopes("Joe/NNP ensured/VBD every/DT dog/NN swam/VBD", 2, 1);
    assert_eq!(kinds(&s), [false, true].into());
}

#[test]
fn conditional_antecedent_is_an_island() {
    let s = scopes("if/IN every/DT dog/NN swam/VBD Joe/NNP sailed/VBD", 1, 0);
    assert_eq!(s, vec![false]);
}

#[test]
fn relative_clause_is_an_island() {
    let s = scopes("Joe/NNP saw/VBD a/DT dog/NN that/WDT every/DT boy/NN walked/VBD _/GAP", 5, 1);
    assert!(!s.is_empty());
    assert!(s.iter().all(|w| !w));
}
