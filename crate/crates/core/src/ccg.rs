//! Continuized CCG over depth-annotated types. A parse yields, for each
//! distinct way of deriving the goal, the set of atom matches canceled along
//! the way; that set is all syntax hands on to semantics.
//!
//! Rules: application, switched application, lowering, lifted lowering and
//! lifted application (over any application, recursively). No composition,
//! no type-raising. Connective tone plays no part in matching.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::rc::Rc;

use serde_json::json;

use crate::types::{Connective, Frac, KeySet, SynType};

/// An unordered pair of atom occurrences, stored with the smaller id first.
pub type Match = (u32, u32);
pub type MatchSet = BTreeSet<Match>;

pub fn pair(a: u32, b: u32) -> Match {
    (a.min(b), a.max(b))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    Lexical,
    Application,
    Switched,
    LiftedApplication,
    Lowering,
    LiftedLowering,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Lexical => "lex",
            Rule::Application => "app",
            Rule::Switched => "switch",
            Rule::LiftedApplication => "lift-app",
            Rule::Lowering => "lower",
            Rule::LiftedLowering => "lift-lower",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Derivation {
    pub rule: Rule,
    pub span: (usize, usize),
    pub ty: SynType,
    /// Matches produced by this step alone.
    pub matches: Vec<Match>,
    pub children: Vec<Rc<Derivation>>,
}

/// An atom occurrence in the input, located by token and by its path of
/// numerator (`N`) / denominator (`D`) steps into the token's type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AtomOccurrence {
    pub id: u32,
    pub token: usize,
    pub position: String,
    pub name: crate::types::AtomName,
    pub depth: Option<u32>,
}

impl fmt::Display for AtomOccurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.name, self.id)
    }
}

/// Numbers every atom of the token types from 1 in surface order (the
/// usual subscripting convention) and lists the occurrences.
pub fn number_tokens(types: &[SynType]) -> (Vec<SynType>, Vec<AtomOccurrence>) {
    let mut next = 1;
    let mut numbered = Vec::new();
    let mut occs = Vec::new();
    for (k, t) in types.iter().enumerate() {
        let mut t = t.clone();
        next = t.number_occurrences(next);
        locate(&t, k, String::new(), &mut occs);
        numbered.push(t);
    }
    occs.sort_by_key(|o| o.id);
    (numbered, occs)
}

fn locate(t: &SynType, token: usize, path: String, out: &mut Vec<AtomOccurrence>) {
    match t {
        SynType::Atom(a) => out.push(AtomOccurrence {
            id: a.occ.expect("numbered"),
            token,
            position: path,
            name: a.name,
            depth: a.depth,
        }),
        SynType::Frac(f) => {
            locate(&f.num, token, format!("{path}N"), out);
            locate(&f.den, token, format!("{path}D"), out);
        }
    }
}

/// Structural equality ignoring tone and all annotations.
pub fn same_form(a: &SynType, b: &SynType) -> bool {
    match (a, b) {
        (SynType::Atom(x), SynType::Atom(y)) => x.name == y.name,
        (SynType::Frac(x), SynType::Frac(y)) => x.conn == y.conn && same_form(&x.num, &y.num) && same_form(&x.den, &y.den),
        _ => false,
    }
}

/// m(A, A′), ignoring tone.
pub fn rule_matches(a: &SynType, b: &SynType) -> Option<Vec<Match>> {
    fn go(a: &SynType, b: &SynType, out: &mut Vec<Match>) -> bool {
        match (a, b) {
            (SynType::Atom(x), SynType::Atom(y)) if x.name == y.name => {
                out.push(pair(x.occ.unwrap_or(0), y.occ.unwrap_or(0)));
                true
            }
            (SynType::Frac(x), SynType::Frac(y)) if x.conn == y.conn => go(&x.num, &y.num, out) && go(&x.den, &y.den, out),
            _ => false,
        }
    }
    let mut out = Vec::new();
    go(a, b, &mut out).then_some(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Outcome of combining two types.
#[derive(Debug, Clone)]
pub struct Step {
    pub rule: Rule,
    pub ty: SynType,
    pub matches: Vec<Match>,
    /// δ on the functor's consumed argument, and which operand the functor was.
    pub island: Option<(Side, KeySet)>,
}

/// Why a lifted application was refused.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Blocked {
    pub matches: Vec<Match>,
}

fn with_num(f: &Frac, num: SynType) -> SynType {
    SynType::Frac(Box::new(Frac { num, ..f.clone() }))
}

/// The key of a tower's top layer, if any.
fn tower_key(t: &SynType) -> Option<String> {
    let (e, _, f) = t.tower_parts()?;
    e.key().or_else(|| f.key()).map(String::from)
}

/// Does δ `keys` trap a tower keyed `key`? An empty δ traps everything.
pub fn island_blocks(keys: &KeySet, key: Option<&str>) -> bool {
    keys.is_empty() || key.is_some_and(|k| keys.contains(k))
}

/// Plain and switched application of `left` to `right`.
fn base_applications(left: &SynType, right: &SynType, out: &mut Vec<Step>) {
    // A, A\B → B
    if let Some(f) = right.as_frac() {
        if f.conn == Connective::Under {
            if let Some(m) = rule_matches(left, &f.den) {
                out.push(Step { rule: Rule::Application, ty: f.num.clone(), matches: m, island: f.island.clone().map(|k| (Side::Right, k)) });
            }
        }
        // A, A\B/C → B/C
        if f.conn == Connective::Over {
            if let Some(inner) = f.num.as_frac().filter(|i| i.conn == Connective::Under) {
                if let Some(m) = rule_matches(left, &inner.den) {
                    out.push(Step {
                        rule: Rule::Switched,
                        ty: with_num(f, inner.num.clone()),
                        matches: m,
                        island: inner.island.clone().map(|k| (Side::Right, k)),
                    });
                }
            }
        }
    }
    if let Some(f) = left.as_frac() {
        // B/A, A → B
        if f.conn == Connective::Over {
            if let Some(m) = rule_matches(&f.den, right) {
                out.push(Step { rule: Rule::Application, ty: f.num.clone(), matches: m, island: f.island.clone().map(|k| (Side::Left, k)) });
            }
        }
        // C\(B/A), A → C\B
        if f.conn == Connective::Under {
            if let Some(inner) = f.num.as_frac().filter(|i| i.conn == Connective::Over) {
                if let Some(m) = rule_matches(&inner.den, right) {
                    out.push(Step {
                        rule: Rule::Switched,
                        ty: with_num(f, inner.num.clone()),
                        matches: m,
                        island: inner.island.clone().map(|k| (Side::Left, k)),
                    });
                }
            }
        }
    }
}

/// Every application (plain, switched, lifted) of `left` and `right`, plus
/// the lifted applications refused by an island.
pub fn applications(left: &SynType, right: &SynType, tower_bound: usize) -> (Vec<Step>, Vec<Blocked>) {
    let mut out = Vec::new();
    let mut blocked = Vec::new();
    base_applications(left, right, &mut out);
    // Tower on the right: B, E↑C↓F → E↑D↓F where B, C → D; H = B.
    for (tower, other, side) in [(right, left, Side::Right), (left, right, Side::Left)] {
        let Some((_, inner, _)) = tower.tower_parts() else { continue };
        let key = tower_key(tower);
        let (inner_steps, inner_blocked) = if side == Side::Right {
            applications(other, inner, tower_bound)
        } else {
            applications(inner, other, tower_bound)
        };
        blocked.extend(inner_blocked);
        let h_side = if side == Side::Right { Side::Left } else { Side::Right };
        for st in inner_steps {
            if let Some((s, keys)) = &st.island {
                if *s == h_side && island_blocks(keys, key.as_deref()) {
                    blocked.push(Blocked { matches: st.matches.clone() });
                    continue;
                }
            }
            let ty = rebuild_tower(tower, st.ty);
            if ty.tower_height() > tower_bound {
                continue;
            }
            out.push(Step { rule: Rule::LiftedApplication, ty, matches: st.matches, island: st.island });
        }
    }
    (out, blocked)
}

/// E↑B↓F with B replaced.
fn rebuild_tower(tower: &SynType, base: SynType) -> SynType {
    let f = tower.as_frac().unwrap();
    let top = f.den.as_frac().unwrap();
    let new_top = SynType::Frac(Box::new(Frac { den: base, ..top.clone() }));
    SynType::Frac(Box::new(Frac { den: new_top, ..f.clone() }))
}

/// Lowering and lifted lowering of `t`.
pub fn lowerings(t: &SynType) -> Vec<Step> {
    let mut out = Vec::new();
    if let Some((a1, a2, b)) = t.tower_parts() {
        // A↑A↓B → B
        if let Some(m) = rule_matches(a1, a2) {
            out.push(Step { rule: Rule::Lowering, ty: b.clone(), matches: m, island: None });
        }
        // E↑B↓F → E↑C↓F where B → C lowers.
        for st in lowerings(a2) {
            out.push(Step { rule: Rule::LiftedLowering, ty: rebuild_tower(t, st.ty), matches: st.matches, island: None });
        }
    }
    out
}

#[derive(Debug, Clone, Copy)]
pub struct ParseConfig {
    pub tower_bound: usize,
}

impl Default for ParseConfig {
    fn default() -> Self {
        ParseConfig { tower_bound: 3 }
    }
}

#[derive(Debug, Clone)]
pub struct Reading {
    pub matches: MatchSet,
    pub derivation: Rc<Derivation>,
}

impl Reading {
    /// The occurrence standing for the goal (the derivation's result atom).
    pub fn goal_occurrence(&self) -> Option<u32> {
        self.derivation.ty.as_atom().and_then(|a| a.occ)
    }
}

#[derive(Debug, Default)]
pub struct ParseOutcome {
    pub readings: Vec<Reading>,
    /// Lifted applications refused by islands anywhere in the chart.
    pub blocked: Vec<Blocked>,
    pub occurrences: Vec<AtomOccurrence>,
}

#[derive(Clone)]
struct Item {
    ty: SynType,
    matches: MatchSet,
    deriv: Rc<Derivation>,
}

/// All derivations of `goal` from `tokens`, one per distinct match set.
/// Token types should be depth-annotated; atoms are numbered here.
pub fn parse(tokens: &[SynType], goal: &SynType, cfg: ParseConfig) -> ParseOutcome {
    let (typed, occurrences) = number_tokens(tokens);
    let n = typed.len();
    if n == 0 {
        return ParseOutcome { occurrences, ..Default::default() };
    }
    let mut chart: Vec<Vec<Vec<Item>>> = vec![vec![Vec::new(); n + 1]; n + 1];
    let mut blocked = Vec::new();
    for (k, t) in typed.iter().enumerate() {
        let leaf = Item {
            ty: t.clone(),
            matches: MatchSet::new(),
            deriv: Rc::new(Derivation { rule: Rule::Lexical, span: (k, k + 1), ty: t.clone(), matches: vec![], children: vec![] }),
        };
        chart[k][k + 1] = close(vec![leaf], (k, k + 1));
    }
    for len in 2..=n {
        for i in 0..=n - len {
            let j = i + len;
            let mut items = Vec::new();
            for k in i + 1..j {
                for a in &chart[i][k] {
                    for b in &chart[k][j] {
                        let (steps, bl) = applications(&a.ty, &b.ty, cfg.tower_bound);
                        blocked.extend(bl);
                        for st in steps {
                            let mut matches = a.matches.clone();
                            matches.extend(b.matches.iter().copied());
                            matches.extend(st.matches.iter().copied());
                            items.push(Item {
                                ty: st.ty.clone(),
                                matches,
                                deriv: Rc::new(Derivation {
                                    rule: st.rule,
                                    span: (i, j),
                                    ty: st.ty,
                                    matches: st.matches,
                                    children: vec![a.deriv.clone(), b.deriv.clone()],
                                }),
                            });
                        }
                    }
                }
            }
            chart[i][j] = close(items, (i, j));
        }
    }
    let mut seen = HashSet::new();
    let mut readings = Vec::new();
    for it in &chart[0][n] {
        if same_form(&it.ty, goal) && seen.insert(it.matches.clone()) {
            readings.push(Reading { matches: it.matches.clone(), derivation: it.deriv.clone() });
        }
    }
    ParseOutcome { readings, blocked, occurrences }
}

/// Adds unary (lowering) closure and removes duplicates, keeping the first
/// derivation in canonical rule order.
fn close(mut items: Vec<Item>, span: (usize, usize)) -> Vec<Item> {
    items.sort_by_key(|it| it.deriv.rule);
    let mut out: Vec<Item> = Vec::new();
    let mut seen: HashSet<(SynType, MatchSet)> = HashSet::new();
    let mut queue = items;
    while !queue.is_empty() {
        let mut next = Vec::new();
        for it in queue {
            if !seen.insert((it.ty.clone(), it.matches.clone())) {
                continue;
            }
            for st in lowerings(&it.ty) {
                let mut matches = it.matches.clone();
                matches.extend(st.matches.iter().copied());
                next.push(Item {
                    ty: st.ty.clone(),
                    matches,
                    deriv: Rc::new(Derivation { rule: st.rule, span, ty: st.ty, matches: st.matches, children: vec![it.deriv.clone()] }),
                });
            }
            out.push(it);
        }
        queue = next;
    }
    out
}

/// Renders a match set with occurrence names, e.g. `(np1, np4)`.
pub fn show_matches(matches: &MatchSet, occs: &[AtomOccurrence]) -> String {
    let name = |id: u32| occs.iter().find(|o| o.id == id).map_or(format!("?{id}"), |o| o.to_string());
    matches.iter().map(|&(a, b)| format!("({}, {})", name(a), name(b))).collect::<Vec<_>>().join(", ")
}

/// Derivation as nested JSON.
pub fn derivation_json(d: &Derivation) -> serde_json::Value {
    json!({
        "rule": d.rule.name(),
        "span": [d.span.0, d.span.1],
        "type": show_numbered(&d.ty),
        "matches": d.matches.iter().map(|&(a, b)| json!([a, b])).collect::<Vec<_>>(),
        "children": d.children.iter().map(|c| derivation_json(c)).collect::<Vec<_>>(),
    })
}

/// A type with occurrence numbers as subscript-like suffixes: `np1\s2/np3`.
pub fn show_numbered(t: &SynType) -> String {
    let bare = t.map_atoms(&mut |a| crate::types::Atom { depth: None, ..a.clone() });
    let mut ids = bare.atoms().into_iter().map(|a| a.occ).collect::<Vec<_>>().into_iter();
    // Re-render atom by atom: Display prints atoms in the same surface order.
    let text = bare.to_string();
    let mut out = String::new();
    let chars: Vec<char> = text.chars().collect();
    let mut k = 0;
    while k < chars.len() {
        let rest: String = chars[k..].iter().collect();
        let atom_len = if rest.starts_with("np") {
            2
        } else if (rest.starts_with('s') || rest.starts_with('n')) && !rest.starts_with("np") {
            1
        } else {
            0
        };
        if atom_len > 0 && !prev_is_brace(&chars, k) {
            out.extend(&chars[k..k + atom_len]);
            if let Some(Some(id)) = ids.next() {
                out.push_str(&id.to_string());
            }
            k += atom_len;
        } else {
            out.push(chars[k]);
            k += 1;
        }
    }
    out
}

fn prev_is_brace(chars: &[char], k: usize) -> bool {
    // Inside `{...}` (keys and island sets) letters are not atoms.
    let before: String = chars[..k].iter().collect();
    before.rfind('{').is_some_and(|o| before.rfind('}').is_none_or(|c| c < o))
}

/// Horizontal-bar rendering: premises above a rule bar, result below.
pub fn render_derivation(d: &Derivation, words: &[String]) -> String {
    let block = render_block(d, words);
    block.lines.iter().map(|l| l.trim_end().to_string()).collect::<Vec<_>>().join("\n")
}

struct Block {
    lines: Vec<String>,
    width: usize,
}

fn pad(s: &str, width: usize) -> String {
    let len = s.chars().count();
    let left = (width.saturating_sub(len)) / 2;
    format!("{}{}{}", " ".repeat(left), s, " ".repeat(width.saturating_sub(len + left)))
}

fn render_block(d: &Derivation, words: &[String]) -> Block {
    let label = show_numbered(&d.ty);
    if d.rule == Rule::Lexical {
        let word = words.get(d.span.0).cloned().unwrap_or_default();
        let width = word.chars().count().max(label.chars().count());
        return Block { lines: vec![pad(&word, width), pad(&label, width)], width };
    }
    let kids: Vec<Block> = d.children.iter().map(|c| render_block(c, words)).collect();
    let height = kids.iter().map(|b| b.lines.len()).max().unwrap();
    let mut lines = vec![String::new(); height];
    let mut width = 0;
    for (n, kid) in kids.iter().enumerate() {
        let offset = height - kid.lines.len();
        for (row, line) in lines.iter_mut().enumerate() {
            if n > 0 {
                line.push_str("   ");
            }
            if row < offset {
                line.push_str(&" ".repeat(kid.width));
            } else {
                line.push_str(&kid.lines[row - offset]);
            }
        }
        width += kid.width + if n > 0 { 3 } else { 0 };
    }
    let tag = format!(" {}", d.rule.name());
    width = width.max(label.chars().count());
    let bar = if d.rule == Rule::Lowering || d.rule == Rule::LiftedLowering { "⇓" } else { "─" };
    let mut out: Vec<String> = lines.into_iter().map(|l| pad_right(&l, width)).collect();
    out.push(format!("{}{}", bar.repeat(width), tag));
    out.push(pad(&label, width));
    Block { lines: out, width }
}

fn pad_right(s: &str, width: usize) -> String {
    format!("{}{}", s, " ".repeat(width.saturating_sub(s.chars().count())))
}
