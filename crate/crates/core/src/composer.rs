//! From tagged tokens to one semgraph: lexicon lookup, fusing equivalence as
//! a partition of token sources, renaming, parallel composition, validation.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::ccg::{self, AtomOccurrence, MatchSet};
use crate::error::{Error, Result};
use crate::eval::{self, ForceRegistry};
use crate::graph::{EdgeLabel, EdgeRef, Semgraph, VertexId};
use crate::resolver::{Resolution, ResolveTo};
use crate::tlg::{self, Ruleset, Sequent, Term};
use crate::types::{self, SynType};

const BUILTIN: &str = include_str!("../data/lexicon.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnaphorClass {
    Reflexive,
    Pronoun,
}

/// A typed semgraph template. Vertices are named; `sources` maps names to
/// source labels, binary edges are `[from, label, to]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LexEntry {
    pub lemma: String,
    pub forms: Vec<String>,
    pub pos: Vec<String>,
    #[serde(rename = "type")]
    pub ty: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<String>,
    pub sources: BTreeMap<String, i64>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub unary: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub binary: Vec<(String, String, String)>,
    #[serde(default, skip_serializing_if = "is_false")]
    pub mod_sort_fix: bool,
    /// The lexical label of this entry names an event.
    #[serde(default, skip_serializing_if = "is_false")]
    pub eventive: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anaphor: Option<AnaphorClass>,
}

fn is_false(b: &bool) -> bool {
    !*b
}

impl LexEntry {
    pub fn sort(&self) -> usize {
        self.sources.values().filter(|&&s| s >= 0).count()
    }

    /// The depth-assigned type, reduced modulo the sort when flagged.
    pub fn syn_type(&self) -> Result<SynType> {
        let t = types::depth_assign(&self.ty.parse()?)?;
        if self.mod_sort_fix {
            types::mod_sort_fix(&t, self.sort() as i64)
        } else {
            Ok(t)
        }
    }

    fn vertex_names(&self) -> Vec<&str> {
        let mut names: Vec<&str> = self.sources.keys().map(String::as_str).collect();
        names.extend(self.unary.keys().map(String::as_str));
        for (a, _, b) in &self.binary {
            names.push(a);
            names.push(b);
        }
        let mut seen = BTreeSet::new();
        names.retain(|n| seen.insert(*n));
        names
    }

    pub fn graph(&self) -> Result<Semgraph> {
        let names = self.vertex_names();
        let id: HashMap<&str, VertexId> = names.iter().enumerate().map(|(i, &n)| (n, i as VertexId)).collect();
        let mut g = Semgraph::new();
        for i in 0..names.len() {
            g.insert_vertex(i as VertexId);
        }
        for (v, l) in &self.unary {
            g.add_unary(id[v.as_str()], l.parse()?)?;
        }
        for (a, l, b) in &self.binary {
            g.add_binary(id[a.as_str()], id[b.as_str()], l.parse()?)?;
        }
        for (v, &s) in &self.sources {
            g.set_source(id[v.as_str()], s)?;
        }
        Ok(g)
    }

    /// Sort agrees with the depths; negative sources only tail equality
    /// edges or take part in λ-edges.
    pub fn check(&self) -> Result<()> {
        let what = || format!("{} ({})", self.lemma, self.ty);
        let t = self.syn_type()?;
        let depths: BTreeSet<i64> = t.atoms().iter().filter_map(|a| a.depth).map(i64::from).collect();
        let nonneg: BTreeSet<i64> = self.sources.values().copied().filter(|&s| s >= 0).collect();
        if depths != nonneg {
            return Err(Error::Mismatch(what(), format!("depths {depths:?} vs sources {nonneg:?}")));
        }
        let g = self.graph()?;
        for (&v, &s) in g.sources() {
            if s >= 0 {
                continue;
            }
            let eq = g.out_binary(v).any(|(_, l)| *l == EdgeLabel::Equality);
            let lambda = g.out_binary(v).chain(g.in_binary(v)).any(|(_, l)| *l == EdgeLabel::Lambda);
            if !eq && !lambda {
                return Err(Error::Mismatch(what(), format!("negative source {s} is neither an anaphor nor a scope")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Lexicon {
    pub entries: Vec<LexEntry>,
}

impl Lexicon {
    pub fn builtin() -> Lexicon {
        Lexicon::from_json_str(BUILTIN).expect("builtin lexicon parses")
    }

    pub fn from_json_str(text: &str) -> Result<Lexicon> {
        Ok(Lexicon { entries: serde_json::from_str(text)? })
    }

    pub fn check(&self) -> Result<()> {
        self.entries.iter().try_for_each(LexEntry::check)
    }

    /// Entries for a form and tag, in lexicon order. Forms match
    /// case-insensitively.
    pub fn lookup(&self, form: &str, pos: &str) -> Vec<&LexEntry> {
        self.entries
            .iter()
            .filter(|e| e.pos.iter().any(|p| p == pos) && e.forms.iter().any(|f| f.eq_ignore_ascii_case(form)))
            .collect()
    }

    pub fn eventive_labels(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for e in self.entries.iter().filter(|e| e.eventive) {
            out.extend(e.unary.values().cloned());
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedToken {
    pub form: String,
    pub pos: String,
}

impl FromStr for TaggedToken {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.rsplit_once('/') {
            Some((form, pos)) if !form.is_empty() && !pos.is_empty() => {
                Ok(TaggedToken { form: form.to_string(), pos: pos.to_string() })
            }
            _ => Err(Error::LexiconMiss(format!("`{s}` is not form/POS"))),
        }
    }
}

impl fmt::Display for TaggedToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.form, self.pos)
    }
}

pub fn tokenize(sentence: &str) -> Result<Vec<TaggedToken>> {
    sentence.split_whitespace().map(str::parse).collect()
}

/// One lexical variant of one token.
#[derive(Debug, Clone)]
pub struct Instance {
    pub token: usize,
    pub form: String,
    pub entry: LexEntry,
    pub ty: SynType,
    pub graph: Semgraph,
}

impl Instance {
    pub fn new(token: usize, form: &str, entry: &LexEntry) -> Result<Instance> {
        Ok(Instance { token, form: form.to_string(), entry: entry.clone(), ty: entry.syn_type()?, graph: entry.graph()? })
    }

    pub fn anaphor(&self) -> Option<AnaphorClass> {
        self.entry.anaphor
    }
}

/// Every variant of every token, in lexicon order.
pub fn instantiate(lexicon: &Lexicon, tokens: &[TaggedToken]) -> Result<Vec<Vec<Instance>>> {
    tokens
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let found = lexicon.lookup(&t.form, &t.pos);
            if found.is_empty() {
                return Err(Error::LexiconMiss(format!("{t} (token {i})")));
            }
            found.into_iter().map(|e| Instance::new(i, &t.form, e)).collect()
        })
        .collect()
}

/// A template with its optional λ-edges already dropped.
fn without_optional_lambdas(g: &Semgraph) -> Semgraph {
    let mut out = g.clone();
    for (&v, &s) in g.sources() {
        if s < 0 && !g.out_binary(v).any(|(_, l)| *l == EdgeLabel::Equality) {
            out = drop_lambda_vertex(&out, v);
        }
    }
    out
}

fn drop_lambda_vertex(g: &Semgraph, v: VertexId) -> Semgraph {
    let mut cut: Vec<EdgeRef> = Vec::new();
    cut.extend(g.out_binary(v).filter(|(_, l)| **l == EdgeLabel::Lambda).map(|(w, _)| EdgeRef::Binary(v, w)));
    cut.extend(g.in_binary(v).filter(|(_, l)| **l == EdgeLabel::Lambda).map(|(u, _)| EdgeRef::Binary(u, v)));
    let mut out = g.remove_edges(&cut).expect("edges exist");
    let isolated = out.unary(v).is_none() && out.out_binary(v).next().is_none() && out.in_binary(v).next().is_none();
    if isolated {
        let keep = out.vertices().iter().copied().filter(|&w| w != v).collect();
        out = out.induced(&keep);
    } else {
        let _ = out.forget_source(v);
    }
    out
}

/// Variants worth parsing and composing: a variant is redundant when another
/// variant of the same type becomes isomorphic to it once its optional
/// λ-edges are dropped (the λ-less article against the λ-ful one).
pub fn distinct_variants(variants: &[Instance]) -> Vec<&Instance> {
    let mut out: Vec<&Instance> = Vec::new();
    for v in variants {
        let covered = variants.iter().any(|w| {
            !std::ptr::eq(v, w) && w.ty == v.ty && w.graph != v.graph && {
                let dropped = without_optional_lambdas(&w.graph);
                dropped.is_isomorphic(&v.graph) && !w.graph.is_isomorphic(&v.graph)
            }
        });
        if !covered {
            out.push(v);
        }
    }
    out
}

pub type SourceKey = (usize, i64);

/// Union-find over (token, source) keys. Roots are the least key of their
/// class, so the result does not depend on the order of unions.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Partition {
    parent: BTreeMap<SourceKey, SourceKey>,
}

impl Partition {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, k: SourceKey) {
        self.parent.entry(k).or_insert(k);
    }

    pub fn contains(&self, k: SourceKey) -> bool {
        self.parent.contains_key(&k)
    }

    pub fn find(&self, k: SourceKey) -> SourceKey {
        let mut k = k;
        while let Some(&p) = self.parent.get(&k) {
            if p == k {
                break;
            }
            k = p;
        }
        k
    }

    pub fn union(&mut self, a: SourceKey, b: SourceKey) {
        self.insert(a);
        self.insert(b);
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent.insert(hi, lo);
        }
    }

    pub fn same(&self, a: SourceKey, b: SourceKey) -> bool {
        self.contains(a) && self.contains(b) && self.find(a) == self.find(b)
    }

    /// Classes ordered by their least key.
    pub fn classes(&self) -> Vec<BTreeSet<SourceKey>> {
        let mut by_root: BTreeMap<SourceKey, BTreeSet<SourceKey>> = BTreeMap::new();
        for &k in self.parent.keys() {
            by_root.entry(self.find(k)).or_default().insert(k);
        }
        by_root.into_values().collect()
    }
}

pub fn build_partition(pairs: &[(SourceKey, SourceKey)]) -> Partition {
    let mut p = Partition::new();
    for &(a, b) in pairs {
        p.union(a, b);
    }
    p
}

/// The syntactic side of a reading: matches over numbered occurrences, and
/// the occurrence whose class becomes the root class.
#[derive(Debug, Clone)]
pub struct Syntax {
    pub matches: MatchSet,
    pub occurrences: Vec<AtomOccurrence>,
    pub root: Option<u32>,
}

impl Syntax {
    fn key(&self, occ: u32) -> Result<SourceKey> {
        let o = self
            .occurrences
            .iter()
            .find(|o| o.id == occ)
            .ok_or_else(|| Error::Mismatch(format!("occurrence {occ}"), "no such atom".into()))?;
        let d = o.depth.ok_or_else(|| Error::Mismatch(format!("occurrence {occ}"), "no depth".into()))?;
        Ok((o.token, i64::from(d)))
    }

    /// Atom matches as pairs of token sources.
    pub fn source_pairs(&self) -> Result<Vec<(SourceKey, SourceKey)>> {
        self.matches.iter().map(|&(a, b)| Ok((self.key(a)?, self.key(b)?))).collect()
    }

    pub fn root_key(&self) -> Result<Option<SourceKey>> {
        self.root.map(|r| self.key(r)).transpose()
    }
}

/// An anaphor's equality edge in the composed graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnaphorLink {
    pub token: usize,
    pub negative_source: i64,
    pub class: AnaphorClass,
    pub edge: (VertexId, VertexId),
}

#[derive(Debug, Clone)]
pub struct Composition {
    pub graph: Semgraph,
    pub partition: Partition,
    /// Where each surviving token source landed.
    pub vertex_of: BTreeMap<SourceKey, VertexId>,
    pub anaphors: Vec<AnaphorLink>,
    /// For edges whose head was a non-negative template source: the token
    /// and that source's depth, for obliqueness comparisons.
    pub edge_depths: BTreeMap<(VertexId, VertexId), (usize, u32)>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ComposeOptions {
    /// Drop unresolved anaphors instead of failing (trial compositions).
    pub lenient: bool,
}

/// Fuses one variant per token under the syntactic matches and the
/// resolution script.
pub fn compose(instances: &[&Instance], syntax: &Syntax, resolutions: &[Resolution]) -> Result<Composition> {
    compose_with(instances, syntax, resolutions, ComposeOptions::default())
}

pub fn compose_with(
    instances: &[&Instance],
    syntax: &Syntax,
    resolutions: &[Resolution],
    opts: ComposeOptions,
) -> Result<Composition> {
    let source = |t: usize, s: i64| instances.get(t).and_then(|i| i.graph.vertex_of_source(s));
    let mut partition = Partition::new();
    for inst in instances {
        for &s in inst.graph.sources().values() {
            partition.insert((inst.token, s));
        }
    }
    for (a, b) in syntax.source_pairs()? {
        if source(a.0, a.1).is_none() || source(b.0, b.1).is_none() {
            return Err(Error::Mismatch(format!("{a:?}"), format!("{b:?}")));
        }
        partition.union(a, b);
    }
    let mut resolved: BTreeSet<SourceKey> = BTreeSet::new();
    let mut dropped: BTreeSet<SourceKey> = BTreeSet::new();
    for r in resolutions {
        let from = (r.token_index, r.negative_source);
        if r.negative_source >= 0 || source(from.0, from.1).is_none() {
            return Err(Error::Unresolved(r.token_index, r.negative_source));
        }
        match r.resolve_to {
            ResolveTo::Drop(_) => {
                dropped.insert(from);
            }
            ResolveTo::Source { token_index, source: s } => {
                if s < 0 || source(token_index, s).is_none() {
                    return Err(Error::Unresolved(r.token_index, r.negative_source));
                }
                partition.union(from, (token_index, s));
                resolved.insert(from);
            }
        }
    }

    // Unresolved negative sources: optional λ-edges go, anaphors must resolve.
    let mut graphs: Vec<Semgraph> = Vec::with_capacity(instances.len());
    for inst in instances {
        let mut g = inst.graph.clone();
        for (&v, &s) in inst.graph.sources() {
            if s >= 0 || resolved.contains(&(inst.token, s)) {
                continue;
            }
            let anaphoric = inst.graph.out_binary(v).any(|(_, l)| *l == EdgeLabel::Equality);
            if anaphoric && (!opts.lenient || dropped.contains(&(inst.token, s))) {
                return Err(Error::Unresolved(inst.token, s));
            }
            if anaphoric {
                let keep = g.vertices().iter().copied().filter(|&w| w != v).collect();
                g = g.induced(&keep);
            } else {
                g = drop_lambda_vertex(&g, v);
            }
        }
        graphs.push(g);
    }

    let root = syntax.root_key()?;
    let classes = partition.classes();
    let mut class_id: HashMap<SourceKey, i64> = HashMap::new();
    let mut next = 1;
    for c in &classes {
        let id = if root.is_some_and(|r| c.contains(&r)) {
            0
        } else {
            next += 1;
            next - 1
        };
        for &k in c {
            class_id.insert(k, id);
        }
    }

    let mut renamed = Vec::with_capacity(graphs.len());
    for (inst, g) in instances.iter().zip(&graphs) {
        let mut h = g.clone();
        let old: Vec<(VertexId, i64)> = g.sources().iter().map(|(&v, &s)| (v, s)).collect();
        h.forget_all_sources();
        for (v, s) in old {
            h.set_source(v, class_id[&(inst.token, s)]).map_err(|_| {
                Error::CompositionConflict(format!("token {} fuses two of its own sources (at {s})", inst.token))
            })?;
        }
        renamed.push(h);
    }

    let mut graph = Semgraph::new();
    let mut maps: Vec<HashMap<VertexId, VertexId>> = Vec::new();
    for h in &renamed {
        let (g, m) = graph.parallel_compose_mapped(h)?;
        graph = g;
        maps.push(m);
    }

    let mut vertex_of = BTreeMap::new();
    let mut anaphors = Vec::new();
    let mut edge_depths = BTreeMap::new();
    for ((inst, g), m) in instances.iter().zip(&graphs).zip(&maps) {
        for (&v, &s) in g.sources() {
            vertex_of.insert((inst.token, s), m[&v]);
        }
        for ((a, b), _) in g.binary_edges() {
            if let Some(d) = inst.graph.source_of(b).filter(|&d| d >= 0) {
                edge_depths.entry((m[&a], m[&b])).or_insert((inst.token, d as u32));
            }
        }
        if let Some(class) = inst.anaphor() {
            for (&v, &s) in g.sources() {
                if s >= 0 {
                    continue;
                }
                for (w, l) in g.out_binary(v) {
                    if *l == EdgeLabel::Equality {
                        anaphors.push(AnaphorLink { token: inst.token, negative_source: s, class, edge: (m[&v], m[&w]) });
                    }
                }
            }
        }
    }
    let others: Vec<VertexId> = graph.sources().iter().filter(|(_, &l)| l != 0).map(|(&v, _)| v).collect();
    for v in others {
        graph.forget_source(v)?;
    }
    Ok(Composition { graph, partition, vertex_of, anaphors, edge_depths })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Validation {
    pub root: Option<VertexId>,
    pub diagnostics: Vec<String>,
}

impl Validation {
    pub fn ok(&self) -> bool {
        self.diagnostics.is_empty()
    }
}

/// Interpretability: a unique root reaching everything, and well-formed
/// quantification and coordination structures.
pub fn validate(g: &Semgraph, forces: &ForceRegistry) -> Validation {
    let mut diagnostics = Vec::new();
    let roots = g.find_roots();
    let root = g.unique_root();
    if roots.len() != 1 {
        diagnostics.push(format!("{} roots: {:?}", roots.len(), roots));
    } else if root.is_none() {
        let r = *roots.iter().next().unwrap();
        let missed: Vec<VertexId> = g.vertices().difference(&g.reachable_from(r)).copied().collect();
        diagnostics.push(format!("root {r} does not reach {missed:?}"));
    }
    if let Err(e) = eval::check_structures(g, forces) {
        diagnostics.push(e.to_string());
    }
    Validation { root, diagnostics }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Engine {
    Ccg,
    Tlg,
}

#[derive(Debug, Clone, Copy)]
pub struct SyntaxConfig {
    pub engine: Engine,
    pub tower_bound: usize,
    pub max_holes: usize,
    pub ruleset: Ruleset,
}

impl Default for SyntaxConfig {
    fn default() -> Self {
        SyntaxConfig { engine: Engine::Ccg, tower_bound: 3, max_holes: 2, ruleset: Ruleset::Full }
    }
}

/// A syntactic reading with its derivation rendered for display.
#[derive(Debug, Clone)]
pub struct ParsedReading {
    pub syntax: Syntax,
    pub derivation: String,
    pub derivation_json: serde_json::Value,
}

/// Syntactic readings of one choice of variants.
pub fn parse_readings(instances: &[&Instance], goal: &SynType, cfg: SyntaxConfig) -> Result<Vec<ParsedReading>> {
    let types: Vec<SynType> = instances.iter().map(|i| i.ty.clone()).collect();
    let (_, occurrences) = ccg::number_tokens(&types);
    let words: Vec<String> = instances.iter().map(|i| i.form.clone()).collect();
    match cfg.engine {
        Engine::Ccg => {
            let out = ccg::parse(&types, goal, ccg::ParseConfig { tower_bound: cfg.tower_bound });
            Ok(out
                .readings
                .iter()
                .map(|r| ParsedReading {
                    syntax: Syntax { matches: r.matches.clone(), occurrences: occurrences.clone(), root: r.goal_occurrence() },
                    derivation: ccg::render_derivation(&r.derivation, &words),
                    derivation_json: ccg::derivation_json(&r.derivation),
                })
                .collect())
        }
        Engine::Tlg => {
            if types.is_empty() {
                return Ok(Vec::new());
            }
            let seq = Sequent::new(types.into_iter().map(Term::Type).collect(), goal.clone());
            Ok(tlg::prove(&seq, cfg.max_holes, cfg.ruleset)?
                .iter()
                .map(|r| ParsedReading {
                    syntax: Syntax {
                        matches: r.matches.clone(),
                        occurrences: occurrences.clone(),
                        root: r.goal.first().copied(),
                    },
                    derivation: tlg::render_proof(&r.proof),
                    derivation_json: tlg::proof_json(&r.proof),
                })
                .collect())
        }
    }
}

/// Cartesian product of the distinct variants of each token.
pub fn variant_choices(variants: &[Vec<Instance>]) -> Vec<Vec<&Instance>> {
    let mut out: Vec<Vec<&Instance>> = vec![Vec::new()];
    for vs in variants {
        let options = distinct_variants(vs);
        out = out
            .into_iter()
            .flat_map(|prefix| {
                options.iter().map(move |&o| {
                    let mut p = prefix.clone();
                    p.push(o);
                    p
                })
            })
            .collect();
    }
    out
}
