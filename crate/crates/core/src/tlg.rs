//! Continuized type-logical grammar as a sequent calculus with holes and
//! powers, proved backwards. A proof's atom matches are read off its axioms,
//! so proofs that differ only in rule order collapse to one MatchSet.
//!
//! Two rulesets: `Full` (logical rules for all four connectives plus the two
//! structural rules relating `(Φ ∘ Ψ)^Δ` and `Φ Δ Ψ`) and `Fragment` (the
//! slash rules plus six composite rules that never build powers).

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::rc::Rc;
use std::str::FromStr;

use serde_json::json;

use crate::ccg::{self, pair, same_form, Match, MatchSet};
use crate::error::{Error, Result};
use crate::types::{parse_prefix, Connective, Frac, SynType};

/// Occurrence id reserved for the succedent of the goal sequent.
pub const GOAL: u32 = 0;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Type(SynType),
    Hole,
    /// `base ^ exponent`: the exponent plugs the base's hole.
    Power(Structure, Structure),
}

pub type Structure = Vec<Term>;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sequent {
    pub antecedent: Structure,
    pub succedent: SynType,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ruleset {
    Full,
    Fragment,
}

#[derive(Debug)]
pub struct Proof {
    pub rule: &'static str,
    pub sequent: Sequent,
    /// Pairs contributed by an axiom leaf.
    pub axiom: Vec<Match>,
    pub premises: Vec<Rc<Proof>>,
}

#[derive(Debug, Clone)]
pub struct TlgReading {
    pub matches: MatchSet,
    /// Antecedent occurrences identified with the goal's atoms.
    pub goal: Vec<u32>,
    pub proof: Rc<Proof>,
}

pub fn count_holes(s: &[Term]) -> usize {
    s.iter()
        .map(|t| match t {
            Term::Hole => 1,
            Term::Type(_) => 0,
            Term::Power(b, e) => count_holes(b) + count_holes(e),
        })
        .sum()
}

impl Sequent {
    pub fn new(antecedent: Structure, succedent: SynType) -> Self {
        Sequent { antecedent, succedent }
    }

    pub fn holes(&self) -> usize {
        count_holes(&self.antecedent)
    }

    /// Numbers antecedent atoms from 1 in surface order and marks the
    /// succedent's atoms as the goal.
    pub fn numbered(&self) -> Sequent {
        fn number(s: &[Term], next: &mut u32) -> Structure {
            s.iter()
                .map(|t| match t {
                    Term::Type(ty) => {
                        let mut ty = ty.clone();
                        *next = ty.number_occurrences(*next);
                        Term::Type(ty)
                    }
                    Term::Hole => Term::Hole,
                    Term::Power(b, e) => {
                        let b = number(b, next);
                        Term::Power(b, number(e, next))
                    }
                })
                .collect()
        }
        let mut next = 1;
        let antecedent = number(&self.antecedent, &mut next);
        let succedent = self.succedent.map_atoms(&mut |a| crate::types::Atom { occ: Some(GOAL), ..a.clone() });
        Sequent { antecedent, succedent }
    }
}

fn show_structure(s: &[Term], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    for (k, t) in s.iter().enumerate() {
        if k > 0 {
            write!(f, " ")?;
        }
        match t {
            Term::Type(ty) if ty.atoms().iter().all(|a| a.occ.is_some()) => write!(f, "{}", ccg::show_numbered(ty))?,
            Term::Type(ty) => write!(f, "{ty}")?,
            Term::Hole => write!(f, "o")?,
            Term::Power(b, e) => {
                write!(f, "(")?;
                show_structure(b, f)?;
                write!(f, ")^[")?;
                show_structure(e, f)?;
                write!(f, "]")?;
            }
        }
    }
    Ok(())
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        show_structure(&self.antecedent, f)?;
        let goal = &self.succedent;
        if goal.atoms().iter().all(|a| a.occ == Some(GOAL)) {
            write!(f, " -> {}", goal.bare())
        } else {
            write!(f, " -> {}", ccg::show_numbered(goal))
        }
    }
}

/// Text syntax: space-separated terms, `o` for a hole, `(Φ o Ψ)^[Δ]` for a
/// power, `->` before the succedent.
impl FromStr for Sequent {
    type Err = Error;

    fn from_str(text: &str) -> Result<Sequent> {
        let Some((lhs, rhs)) = text.split_once("->") else {
            return Err(Error::SequentSyntax(format!("missing `->` in `{text}`")));
        };
        let chars: Vec<char> = lhs.chars().collect();
        let mut pos = 0;
        let antecedent = parse_structure(&chars, &mut pos, None)?;
        let succedent = rhs.trim().parse()?;
        Ok(Sequent { antecedent, succedent })
    }
}

fn skip_ws(chars: &[char], pos: &mut usize) {
    while chars.get(*pos).is_some_and(|c| c.is_whitespace()) {
        *pos += 1;
    }
}

fn parse_structure(chars: &[char], pos: &mut usize, close: Option<char>) -> Result<Structure> {
    let mut out = Vec::new();
    loop {
        skip_ws(chars, pos);
        match chars.get(*pos) {
            None if close.is_none() => return Ok(out),
            None => return Err(Error::SequentSyntax(format!("expected `{}`", close.unwrap()))),
            Some(&c) if Some(c) == close => {
                *pos += 1;
                return Ok(out);
            }
            Some('o') => {
                *pos += 1;
                out.push(Term::Hole);
            }
            Some('(') => {
                // A power if the parenthesised structure is followed by `^[`.
                let save = *pos;
                *pos += 1;
                if let Ok(base) = parse_structure(chars, pos, Some(')')) {
                    skip_ws(chars, pos);
                    if chars.get(*pos) == Some(&'^') && chars.get(*pos + 1) == Some(&'[') {
                        *pos += 2;
                        let exp = parse_structure(chars, pos, Some(']'))?;
                        out.push(Term::Power(base, exp));
                        continue;
                    }
                }
                *pos = save;
                out.push(Term::Type(parse_type(chars, pos)?));
            }
            Some(_) => out.push(Term::Type(parse_type(chars, pos)?)),
        }
    }
}

fn parse_type(chars: &[char], pos: &mut usize) -> Result<SynType> {
    let rest: String = chars[*pos..].iter().collect();
    let (t, used) = parse_prefix(&rest)?;
    *pos += used;
    Ok(t)
}

/// One proof per MatchSet, in discovery order.
type Found = Vec<(MatchSet, Rc<Proof>)>;

struct Prover {
    ruleset: Ruleset,
    max_holes: usize,
}

/// A sequent of the search graph with its backward rule instances, whose
/// premises point at other nodes.
struct Node {
    sequent: Sequent,
    inferences: Vec<(&'static str, Vec<usize>)>,
    found: Found,
    seen: BTreeSet<MatchSet>,
}

fn ty(t: &SynType) -> Term {
    Term::Type(t.clone())
}

fn frac(t: &Term) -> Option<&Frac> {
    match t {
        Term::Type(x) => x.as_frac(),
        _ => None,
    }
}

/// Steps into nested structures: (term index, into exponent?).
type Path = Vec<(usize, bool)>;

fn substructures(s: &[Term], path: &mut Path, out: &mut Vec<Path>) {
    out.push(path.clone());
    for (k, t) in s.iter().enumerate() {
        if let Term::Power(b, e) = t {
            path.push((k, false));
            substructures(b, path, out);
            path.pop();
            path.push((k, true));
            substructures(e, path, out);
            path.pop();
        }
    }
}

fn get<'a>(s: &'a [Term], path: &[(usize, bool)]) -> &'a [Term] {
    match path.split_first() {
        None => s,
        Some((&(k, exp), rest)) => match &s[k] {
            Term::Power(b, e) => get(if exp { e } else { b }, rest),
            _ => unreachable!("path through a non-power"),
        },
    }
}

/// Replaces `range` of the structure at `path` with `with`.
fn splice(s: &[Term], path: &[(usize, bool)], range: std::ops::Range<usize>, with: Vec<Term>) -> Structure {
    match path.split_first() {
        None => {
            let mut out = s[..range.start].to_vec();
            out.extend(with);
            out.extend_from_slice(&s[range.end..]);
            out
        }
        Some((&(k, exp), rest)) => {
            let mut out = s.to_vec();
            if let Term::Power(b, e) = &s[k] {
                out[k] = if exp {
                    Term::Power(b.clone(), splice(e, rest, range, with))
                } else {
                    Term::Power(splice(b, rest, range, with), e.clone())
                };
            }
            out
        }
    }
}

/// Net atom count by polarity: antecedent atoms count up, succedent atoms
/// down, denominators flip the sign. Every rule preserves it, so a sequent
/// whose count is not zero for every atom name has no proof.
fn balanced(seq: &Sequent) -> bool {
    fn count(t: &SynType, sign: i32, acc: &mut [i32; 3]) {
        match t {
            SynType::Atom(a) => acc[a.name as usize] += sign,
            SynType::Frac(f) => {
                count(&f.num, sign, acc);
                count(&f.den, -sign, acc);
            }
        }
    }
    fn structure(s: &[Term], acc: &mut [i32; 3]) {
        for t in s {
            match t {
                Term::Type(ty) => count(ty, 1, acc),
                Term::Hole => {}
                Term::Power(b, e) => {
                    structure(b, acc);
                    structure(e, acc);
                }
            }
        }
    }
    let mut acc = [0; 3];
    structure(&seq.antecedent, &mut acc);
    count(&seq.succedent, -1, &mut acc);
    acc == [0; 3]
}

/// A rule instance read backwards: its name and premises.
struct Inference {
    rule: &'static str,
    premises: Vec<Sequent>,
}

impl Prover {
    /// The rules can cycle (∨ then ∧ restores a sequent), so the reachable
    /// sequents are collected first and their MatchSets grown to a fixpoint.
    fn prove(&self, goal: &Sequent) -> Found {
        let mut index: HashMap<Sequent, usize> = HashMap::new();
        let mut nodes: Vec<Node> = Vec::new();
        let mut intern = |seq: Sequent, nodes: &mut Vec<Node>| -> usize {
            *index.entry(seq.clone()).or_insert_with(|| {
                nodes.push(Node { sequent: seq, inferences: Vec::new(), found: Vec::new(), seen: BTreeSet::new() });
                nodes.len() - 1
            })
        };
        intern(goal.clone(), &mut nodes);
        let mut next = 0;
        while next < nodes.len() {
            let seq = nodes[next].sequent.clone();
            if seq.holes() <= self.max_holes && balanced(&seq) {
                if let [Term::Type(a)] = seq.antecedent.as_slice() {
                    if let Some(m) = ccg::rule_matches(a, &seq.succedent) {
                        let ms: MatchSet = m.iter().copied().collect();
                        let node = &mut nodes[next];
                        node.seen.insert(ms.clone());
                        node.found.push((ms, Rc::new(Proof { rule: "axiom", sequent: seq.clone(), axiom: m, premises: vec![] })));
                    }
                }
                let mut infs = Vec::new();
                for inf in self.inferences(&seq) {
                    if inf.premises.iter().all(|p| p.holes() <= self.max_holes && balanced(p)) {
                        let ids = inf.premises.into_iter().map(|p| intern(p, &mut nodes)).collect();
                        infs.push((inf.rule, ids));
                    }
                }
                nodes[next].inferences = infs;
            }
            next += 1;
        }

        let mut parents: Vec<Vec<usize>> = vec![Vec::new(); nodes.len()];
        for (n, node) in nodes.iter().enumerate() {
            for (_, ps) in &node.inferences {
                for &p in ps {
                    parents[p].push(n);
                }
            }
        }
        // Premises were discovered after their conclusions: start from the end.
        let mut queued = vec![true; nodes.len()];
        let mut work: Vec<usize> = (0..nodes.len()).collect();
        while let Some(n) = work.pop() {
            queued[n] = false;
            let mut grew = false;
            for k in 0..nodes[n].inferences.len() {
                let (rule, ref premises) = nodes[n].inferences[k];
                let mut partial: Vec<(MatchSet, Vec<Rc<Proof>>)> = vec![(MatchSet::new(), vec![])];
                for &p in premises {
                    let mut step = Vec::new();
                    for (ms, proofs) in &partial {
                        for (sm, sp) in &nodes[p].found {
                            let mut m = ms.clone();
                            m.extend(sm.iter().copied());
                            let mut ps = proofs.clone();
                            ps.push(sp.clone());
                            step.push((m, ps));
                        }
                    }
                    partial = step;
                    if partial.is_empty() {
                        break;
                    }
                }
                let node = &mut nodes[n];
                for (ms, premises) in partial {
                    if node.seen.insert(ms.clone()) {
                        node.found.push((ms, Rc::new(Proof { rule, sequent: node.sequent.clone(), axiom: vec![], premises })));
                        grew = true;
                    }
                }
            }
            if grew {
                for &q in &parents[n] {
                    if !queued[q] {
                        queued[q] = true;
                        work.push(q);
                    }
                }
            }
        }
        std::mem::take(&mut nodes[0].found)
    }

    fn inferences(&self, seq: &Sequent) -> Vec<Inference> {
        let mut out = Vec::new();
        let g = &seq.antecedent;
        let c = &seq.succedent;
        let full = self.ruleset == Ruleset::Full;

        // Right rules.
        if let Some(f) = c.as_frac() {
            match f.conn {
                Connective::Under if !g.is_empty() => {
                    let mut ante = vec![ty(&f.den)];
                    ante.extend(g.iter().cloned());
                    out.push(Inference { rule: "\\R", premises: vec![Sequent::new(ante, f.num.clone())] });
                }
                Connective::Over if !g.is_empty() => {
                    let mut ante = g.clone();
                    ante.push(ty(&f.den));
                    out.push(Inference { rule: "/R", premises: vec![Sequent::new(ante, f.num.clone())] });
                }
                Connective::Insert if full => {
                    let ante = vec![Term::Power(vec![ty(&f.den)], g.clone())];
                    out.push(Inference { rule: "↓R", premises: vec![Sequent::new(ante, f.num.clone())] });
                }
                Connective::Extract if full => {
                    let ante = vec![Term::Power(g.clone(), vec![ty(&f.den)])];
                    out.push(Inference { rule: "↑R", premises: vec![Sequent::new(ante, f.num.clone())] });
                }
                _ => {}
            }
            if !full {
                self.fragment_right(g, c, f, &mut out);
            }
        }

        // Left rules, anywhere in the antecedent.
        let mut paths = Vec::new();
        substructures(g, &mut Vec::new(), &mut paths);
        for path in paths {
            let s = get(g, &path);
            for (k, term) in s.iter().enumerate() {
                if let Some(f) = frac(term) {
                    match f.conn {
                        Connective::Under => {
                            for i in (0..k).rev() {
                                out.push(Inference {
                                    rule: "\\L",
                                    premises: vec![
                                        Sequent::new(s[i..k].to_vec(), f.den.clone()),
                                        Sequent::new(splice(g, &path, i..k + 1, vec![ty(&f.num)]), c.clone()),
                                    ],
                                });
                            }
                        }
                        Connective::Over => {
                            for j in k + 2..=s.len() {
                                out.push(Inference {
                                    rule: "/L",
                                    premises: vec![
                                        Sequent::new(s[k + 1..j].to_vec(), f.den.clone()),
                                        Sequent::new(splice(g, &path, k..j, vec![ty(&f.num)]), c.clone()),
                                    ],
                                });
                            }
                        }
                        Connective::Insert => {
                            // Both rulesets pick a context Φ _ Ψ around A↓B: the full
                            // calculus folds it into a power (∨), the fragment
                            // consumes it at once. The context must be hole-free, or
                            // plugging could fill a hole opened for another gap.
                            for i in 0..=k {
                                if count_holes(&s[i..k]) > 0 {
                                    continue;
                                }
                                for j in k + 1..=s.len() {
                                    if count_holes(&s[k + 1..j]) > 0 {
                                        break;
                                    }
                                    let mut base = s[i..k].to_vec();
                                    base.push(Term::Hole);
                                    base.extend_from_slice(&s[k + 1..j]);
                                    if full {
                                        let power = Term::Power(base, vec![term.clone()]);
                                        out.push(Inference {
                                            rule: "∨",
                                            premises: vec![Sequent::new(splice(g, &path, i..j, vec![power]), c.clone())],
                                        });
                                    } else {
                                        out.push(Inference {
                                            rule: "↓L∨",
                                            premises: vec![
                                                Sequent::new(base, f.den.clone()),
                                                Sequent::new(splice(g, &path, i..j, vec![ty(&f.num)]), c.clone()),
                                            ],
                                        });
                                    }
                                }
                            }
                        }
                        Connective::Extract => {}
                    }
                }
                if let Term::Power(base, exp) = term {
                    // ↓L: Γ[Φ^(A↓B)]
                    if let [Term::Type(t)] = exp.as_slice() {
                        if let Some(f) = t.as_frac().filter(|f| f.conn == Connective::Insert) {
                            out.push(Inference {
                                rule: "↓L",
                                premises: vec![
                                    Sequent::new(base.clone(), f.den.clone()),
                                    Sequent::new(splice(g, &path, k..k + 1, vec![ty(&f.num)]), c.clone()),
                                ],
                            });
                        }
                    }
                    // ↑L: Γ[(B↑A)^Φ]
                    if let [Term::Type(t)] = base.as_slice() {
                        if let Some(f) = t.as_frac().filter(|f| f.conn == Connective::Extract) {
                            out.push(Inference {
                                rule: "↑L",
                                premises: vec![
                                    Sequent::new(exp.clone(), f.den.clone()),
                                    Sequent::new(splice(g, &path, k..k + 1, vec![ty(&f.num)]), c.clone()),
                                ],
                            });
                        }
                    }
                    // ∧: plug a hole of the base with the exponent.
                    for (h, b) in base.iter().enumerate() {
                        if *b == Term::Hole {
                            let mut plugged = base[..h].to_vec();
                            plugged.extend(exp.iter().cloned());
                            plugged.extend_from_slice(&base[h + 1..]);
                            out.push(Inference {
                                rule: "∧",
                                premises: vec![Sequent::new(splice(g, &path, k..k + 1, plugged), c.clone())],
                            });
                        }
                    }
                }
            }
        }
        out
    }

    fn fragment_right(&self, g: &Structure, c: &SynType, f: &Frac, out: &mut Vec<Inference>) {
        let single = |g: &Structure| match g.as_slice() {
            [Term::Type(t)] => Some(t.clone()),
            _ => None,
        };
        match f.conn {
            Connective::Extract => {
                let (b, a) = (&f.num, &f.den);
                // ∧↑R: Φ A Ψ → B ⊢ Φ ∘ Ψ → B↑A
                for (h, t) in g.iter().enumerate() {
                    if *t == Term::Hole {
                        let mut ante = g[..h].to_vec();
                        ante.push(ty(a));
                        ante.extend_from_slice(&g[h + 1..]);
                        out.push(Inference { rule: "∧↑R", premises: vec![Sequent::new(ante, b.clone())] });
                    }
                }
                // ↓L↑R: Φ → A′, B′ → C′ ⊢ Φ → C′↑(A′↓B′)
                if let Some(inner) = a.as_frac().filter(|x| x.conn == Connective::Insert) {
                    out.push(Inference {
                        rule: "↓L↑R",
                        premises: vec![Sequent::new(g.clone(), inner.den.clone()), Sequent::new(vec![ty(&inner.num)], b.clone())],
                    });
                }
                // ↑L↑R: A → C, D → B ⊢ D↑C → B↑A
                if let Some(d_c) = single(g) {
                    if let Some(h) = d_c.as_frac().filter(|x| x.conn == Connective::Extract) {
                        out.push(Inference {
                            rule: "↑L↑R",
                            premises: vec![Sequent::new(vec![ty(a)], h.den.clone()), Sequent::new(vec![ty(&h.num)], b.clone())],
                        });
                    }
                }
            }
            Connective::Insert => {
                let (a, b) = (&f.den, &f.num);
                // ↑L↓R: Φ → A′, B′ → C ⊢ Φ → B′↑A′↓C
                if let Some(top) = a.as_frac().filter(|x| x.conn == Connective::Extract) {
                    out.push(Inference {
                        rule: "↑L↓R",
                        premises: vec![Sequent::new(g.clone(), top.den.clone()), Sequent::new(vec![ty(&top.num)], b.clone())],
                    });
                }
                // ↓L↓R: A → C, D → B ⊢ C↓D → A↓B
                if let Some(c_d) = single(g) {
                    if let Some(h) = c_d.as_frac().filter(|x| x.conn == Connective::Insert) {
                        out.push(Inference {
                            rule: "↓L↓R",
                            premises: vec![Sequent::new(vec![ty(a)], h.den.clone()), Sequent::new(vec![ty(&h.num)], b.clone())],
                        });
                    }
                }
            }
            _ => {}
        }
        let _ = c;
    }
}

/// All MatchSets proving `seq` (numbered here) with at most `max_holes`
/// holes in any sequent of the search.
pub fn prove(seq: &Sequent, max_holes: usize, ruleset: Ruleset) -> Result<Vec<TlgReading>> {
    if seq.holes() > max_holes {
        return Err(Error::SequentSyntax(format!("{} holes exceed the bound {max_holes}", seq.holes())));
    }
    let seq = seq.numbered();
    let found = Prover { ruleset, max_holes }.prove(&seq);
    Ok(found
        .iter()
        .map(|(ms, proof)| {
            let goal = ms.iter().filter(|p| p.0 == GOAL).map(|p| p.1).collect();
            let matches = ms.iter().copied().filter(|p| p.0 != GOAL).collect();
            TlgReading { matches, goal, proof: proof.clone() }
        })
        .collect())
}

/// Every pair of occurrences made equivalent by the matches.
pub fn closure(matches: &MatchSet) -> MatchSet {
    classes(matches)
        .iter()
        .flat_map(|c| {
            let v: Vec<u32> = c.iter().copied().collect();
            (0..v.len()).flat_map(move |i| (i + 1..v.len()).map({
                let v = v.clone();
                move |j| pair(v[i], v[j])
            }))
        })
        .collect()
}

/// Equivalence classes (of size ≥ 2) generated by the matches.
pub fn classes(matches: &MatchSet) -> Vec<BTreeSet<u32>> {
    let mut groups: Vec<BTreeSet<u32>> = Vec::new();
    for &(a, b) in matches {
        let hits: Vec<usize> = (0..groups.len()).filter(|&i| groups[i].contains(&a) || groups[i].contains(&b)).collect();
        let mut merged: BTreeSet<u32> = [a, b].into();
        for &i in hits.iter().rev() {
            merged.extend(groups.remove(i));
        }
        groups.push(merged);
    }
    groups.sort();
    groups
}

pub fn proof_json(p: &Proof) -> serde_json::Value {
    json!({
        "rule": p.rule,
        "sequent": p.sequent.to_string(),
        "matches": p.axiom.iter().map(|&(a, b)| json!([a, b])).collect::<Vec<_>>(),
        "premises": p.premises.iter().map(|q| proof_json(q)).collect::<Vec<_>>(),
    })
}

/// Plain-text proof tree, premises indented under their conclusion.
pub fn render_proof(p: &Proof) -> String {
    fn go(p: &Proof, indent: usize, out: &mut String) {
        out.push_str(&format!("{}{}   [{}]\n", "  ".repeat(indent), p.sequent, p.rule));
        for q in &p.premises {
            go(q, indent + 1, out);
        }
    }
    let mut out = String::new();
    go(p, 0, &mut out);
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Agreement {
    pub ccg: BTreeSet<MatchSet>,
    pub tlg: BTreeSet<MatchSet>,
}

impl Agreement {
    pub fn only_ccg(&self) -> BTreeSet<MatchSet> {
        self.ccg.difference(&self.tlg).cloned().collect()
    }

    pub fn only_tlg(&self) -> BTreeSet<MatchSet> {
        self.tlg.difference(&self.ccg).cloned().collect()
    }

    pub fn agrees(&self) -> bool {
        self.ccg == self.tlg
    }
}

/// Runs both engines on the same tokens; occurrence ids coincide because
/// both number atoms from 1 in surface order.
pub fn ccg_tlg_agreement(tokens: &[SynType], goal: &SynType, cfg: ccg::ParseConfig, max_holes: usize, ruleset: Ruleset) -> Result<Agreement> {
    let ccg_sets = ccg::parse(tokens, goal, cfg).readings.into_iter().map(|r| r.matches).collect();
    let tlg_sets = if tokens.is_empty() {
        BTreeSet::new()
    } else {
        let seq = Sequent::new(tokens.iter().map(ty).collect(), goal.clone());
        prove(&seq, max_holes, ruleset)?.into_iter().map(|r| r.matches).collect()
    };
    Ok(Agreement { ccg: ccg_sets, tlg: tlg_sets })
}

/// Tokens in the sequent are compared by shape only, so `same_form` is the
/// axiom test; exposed for callers that build sequents by hand.
pub fn is_axiom(seq: &Sequent) -> bool {
    matches!(seq.antecedent.as_slice(), [Term::Type(a)] if same_form(a, &seq.succedent))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(pairs: &[(u32, u32)]) -> MatchSet {
        pairs.iter().map(|&(a, b)| pair(a, b)).collect()
    }

    fn sets(seq: &str, ruleset: Ruleset) -> BTreeSet<MatchSet> {
        let seq: Sequent = seq.parse().unwrap();
        prove(&seq, 2, ruleset).unwrap().into_iter().map(|r| r.matches).collect()
    }

    #[test]
    fn a_boy_walked_a_dog() {
        let want: BTreeSet<MatchSet> = [ms(&[(1, 4), (2, 3), (6, 7), (8, 9)])].into();
        for rs in [Ruleset::Full, Ruleset::Fragment] {
            assert_eq!(sets("np/$n n np\\s/np np/$n n -> s", rs), want);
        }
    }

    #[test]
    fn hole_proves_identity_continuation() {
        for rs in [Ruleset::Full, Ruleset::Fragment] {
            assert_eq!(sets("o -> s^s", rs).len(), 1);
            assert_eq!(sets("o -> (np\\s)^(np\\s)", rs).len(), 1);
            assert!(sets("o -> s^np", rs).is_empty());
        }
    }

    #[test]
    fn relative_clause_with_a_hole() {
        // who — walked a dog → np\$np
        let want: BTreeSet<MatchSet> = [ms(&[(3, 6), (4, 5), (7, 8), (9, 10)])].into();
        for rs in [Ruleset::Full, Ruleset::Fragment] {
            let got = sets("np\\$np/(s^np) o np\\s/np np/$n n -> np\\$np", rs);
            assert_eq!(got, want, "{rs:?}");
        }
    }

    #[test]
    fn two_quantifiers_two_scopes() {
        for rs in [Ruleset::Full, Ruleset::Fragment] {
            let got = sets("s^np v s np\\s/np s^np v s -> s", rs);
            assert_eq!(got.len(), 2, "{rs:?} {got:?}");
        }
    }

    #[test]
    fn powers_parse_and_print() {
        let seq: Sequent = "(np o)^[np\\s] -> s".parse().unwrap();
        assert_eq!(seq.holes(), 1);
        assert!(matches!(&seq.antecedent[0], Term::Power(b, e) if b.len() == 2 && e.len() == 1));
        assert_eq!(sets("(np o)^[np\\s] -> s", Ruleset::Full), [ms(&[(1, 2)])].into());
    }

    #[test]
    fn hole_bound_prunes() {
        let seq: Sequent = "o o o -> s".parse().unwrap();
        assert!(prove(&seq, 2, Ruleset::Full).is_err());
    }

    #[test]
    fn closure_is_transitive() {
        let c = closure(&ms(&[(1, 2), (2, 3)]));
        assert_eq!(c, ms(&[(1, 2), (1, 3), (2, 3)]));
        assert!(closure(&MatchSet::new()).is_empty());
    }

    #[test]
    fn unprovable_is_empty() {
        assert!(sets("np np -> s", Ruleset::Full).is_empty());
    }
}
