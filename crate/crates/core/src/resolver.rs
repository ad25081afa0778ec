//! Non-syntactic resolution: candidates for anaphors (co-reference) and for
//! scoped indefinites and names (precedence), filtered by the path-based
//! binding statements and by interpretability.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::composer::{self, AnaphorClass, AnaphorLink, ComposeOptions, Composition, Instance, Syntax, Validation};
use crate::error::Result;
use crate::eval::ForceRegistry;
use crate::graph::{EdgeLabel, Path, Semgraph, VertexId};
use crate::types::AtomName;

/// Longest path considered on either side of a pair.
pub const PATH_CAP: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DropMarker {
    Drop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ResolveTo {
    Source { token_index: usize, source: i64 },
    Drop(DropMarker),
}

/// One line of a resolution script.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub token_index: usize,
    pub negative_source: i64,
    pub resolve_to: ResolveTo,
}

impl Resolution {
    pub fn to(token_index: usize, negative_source: i64, target: usize, source: i64) -> Self {
        Resolution { token_index, negative_source, resolve_to: ResolveTo::Source { token_index: target, source } }
    }

    pub fn drop(token_index: usize, negative_source: i64) -> Self {
        Resolution { token_index, negative_source, resolve_to: ResolveTo::Drop(DropMarker::Drop) }
    }

    fn request(&self) -> (usize, i64) {
        (self.token_index, self.negative_source)
    }
}

impl fmt::Display for Resolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.resolve_to {
            ResolveTo::Source { token_index, source } => {
                write!(f, "({}_{}, {}_{})", self.negative_source, self.token_index, source, token_index)
            }
            ResolveTo::Drop(_) => write!(f, "({}_{}, drop)", self.negative_source, self.token_index),
        }
    }
}

pub fn load_script(text: &str) -> Result<Vec<Resolution>> {
    Ok(serde_json::from_str(text)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RequestKind {
    Coreference,
    Precedence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ResolutionRequest {
    pub token_index: usize,
    pub negative_source: i64,
    pub kind: RequestKind,
}

/// Every negative source of the chosen variants; an equality tail asks for
/// co-reference, anything else for precedence.
pub fn requests(instances: &[&Instance]) -> Vec<ResolutionRequest> {
    let mut out = Vec::new();
    for inst in instances {
        for (&v, &s) in inst.graph.sources() {
            if s >= 0 {
                continue;
            }
            let kind = if inst.graph.out_binary(v).any(|(_, l)| *l == EdgeLabel::Equality) {
                RequestKind::Coreference
            } else {
                RequestKind::Precedence
            };
            out.push(ResolutionRequest { token_index: inst.token, negative_source: s, kind });
        }
    }
    out
}

/// Relative obliqueness of first edges. Lower rank is less oblique.
#[derive(Debug, Clone)]
pub struct ObliquenessOrder {
    ranks: BTreeMap<EdgeLabel, u32>,
}

impl Default for ObliquenessOrder {
    fn default() -> Self {
        // Scoping edges follow the depths of the quantifier entry: ι (3) is
        // less oblique than σ (2), which is less oblique than ρ (1).
        let ranks = [
            (EdgeLabel::theta("ag"), 0),
            (EdgeLabel::theta("th"), 1),
            (EdgeLabel::theta("goal"), 2),
            (EdgeLabel::Iota, 10),
            (EdgeLabel::Sigma, 11),
            (EdgeLabel::Rho, 12),
            (EdgeLabel::Kappa, 20),
            (EdgeLabel::Lambda, 20),
        ];
        ObliquenessOrder { ranks: ranks.into_iter().collect() }
    }
}

impl ObliquenessOrder {
    pub fn empty() -> Self {
        ObliquenessOrder { ranks: BTreeMap::new() }
    }

    pub fn set(&mut self, label: EdgeLabel, rank: u32) {
        self.ranks.insert(label, rank);
    }

    pub fn rank(&self, l: &EdgeLabel) -> Option<u32> {
        self.ranks.get(l).copied()
    }

    /// `Less` when `e1` is less oblique than `e2`. Distinct ranked labels use
    /// the registry; otherwise two edges from one lexical entry compare by
    /// the depth of their heads, a greater depth being less oblique. `None`
    /// when neither applies.
    pub fn compare(
        &self,
        g: &Semgraph,
        depths: &BTreeMap<(VertexId, VertexId), (usize, u32)>,
        e1: (VertexId, VertexId),
        e2: (VertexId, VertexId),
    ) -> Option<Ordering> {
        let (l1, l2) = (g.binary(e1.0, e1.1)?, g.binary(e2.0, e2.1)?);
        if l1 != l2 {
            if let (Some(r1), Some(r2)) = (self.rank(l1), self.rank(l2)) {
                return Some(r1.cmp(&r2));
            }
        }
        match (depths.get(&e1), depths.get(&e2)) {
            (Some(&(t1, d1)), Some(&(t2, d2))) if t1 == t2 && d1 != d2 => Some(d2.cmp(&d1)),
            _ => None,
        }
    }
}

/// What the binding statements need to know beyond the graph.
#[derive(Debug, Clone, Default)]
pub struct BindingContext {
    pub order: ObliquenessOrder,
    pub eventive: BTreeSet<String>,
    pub depths: BTreeMap<(VertexId, VertexId), (usize, u32)>,
}

pub fn classify_event(g: &Semgraph, v: VertexId, eventive: &BTreeSet<String>) -> bool {
    g.out_binary(v).any(|(_, l)| matches!(l, EdgeLabel::Thematic(_) | EdgeLabel::Kappa))
        || matches!(g.unary(v), Some(EdgeLabel::Lexical(n)) if eventive.contains(n))
}

/// Neither an event nor the dummy of a quantification or coordination.
pub fn is_individual(g: &Semgraph, v: VertexId, eventive: &BTreeSet<String>) -> bool {
    !classify_event(g, v, eventive)
        && !g.out_binary(v).any(|(_, l)| l.is_scoping() || matches!(l, EdgeLabel::Inclusion | EdgeLabel::Choice))
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PathPair {
    /// Ends in the anaphor's equality edge.
    pub pe: Path,
    pub pf: Path,
}

impl PathPair {
    pub fn start(&self) -> VertexId {
        self.pe.vertices[0]
    }

    pub fn end(&self) -> VertexId {
        *self.pe.vertices.last().unwrap()
    }
}

fn show_path(p: &Path) -> String {
    p.vertices.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("→")
}

impl fmt::Display for PathPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ∥ {}", show_path(&self.pe), show_path(&self.pf))
    }
}

/// Minimal pairs of parallel paths created by an equality edge: internally
/// vertex-disjoint, the first ending in the edge, the second not ending in
/// equality.
pub fn coref_path_pairs(g: &Semgraph, eq_edge: (VertexId, VertexId)) -> Vec<PathPair> {
    let (a, v) = eq_edge;
    if g.binary(a, v) != Some(&EdgeLabel::Equality) {
        return Vec::new();
    }
    let mut out = BTreeSet::new();
    for &u in g.vertices() {
        if u == v {
            continue;
        }
        let pes: Vec<Path> = if u == a {
            vec![Path { vertices: vec![a, v] }]
        } else {
            g.simple_paths(u, a, PATH_CAP - 1)
                .into_iter()
                .filter(|p| !p.vertices.contains(&v))
                .map(|mut p| {
                    p.vertices.push(v);
                    p
                })
                .collect()
        };
        if pes.is_empty() {
            continue;
        }
        let pfs: Vec<Path> = g
            .simple_paths(u, v, PATH_CAP)
            .into_iter()
            .filter(|p| {
                let (x, y) = p.last_edge();
                g.binary(x, y) != Some(&EdgeLabel::Equality)
            })
            .collect();
        for pe in &pes {
            let inner: BTreeSet<VertexId> = pe.vertices[1..pe.vertices.len() - 1].iter().copied().collect();
            for pf in &pfs {
                if pf.vertices[1..pf.vertices.len() - 1].iter().all(|w| !inner.contains(w)) {
                    out.insert(PathPair { pe: pe.clone(), pf: pf.clone() });
                }
            }
        }
    }
    out.into_iter().collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Constraint {
    Locality,
    Antilocality,
    Obliqueness,
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Constraint::Locality => "locality",
            Constraint::Antilocality => "antilocality",
            Constraint::Obliqueness => "obliqueness",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub constraint: Constraint,
    pub pair: PathPair,
}

/// Events on a pair other than its end vertex.
pub fn events_on(g: &Semgraph, pair: &PathPair, eventive: &BTreeSet<String>) -> usize {
    let v = pair.end();
    let on: BTreeSet<VertexId> = pair.pe.vertices.iter().chain(&pair.pf.vertices).copied().filter(|&w| w != v).collect();
    on.into_iter().filter(|&w| classify_event(g, w, eventive)).count()
}

/// The statements violated by one pair.
pub fn check_binding(g: &Semgraph, pair: &PathPair, class: AnaphorClass, ctx: &BindingContext) -> Vec<Constraint> {
    let mut out = Vec::new();
    let events = events_on(g, pair, &ctx.eventive);
    match class {
        AnaphorClass::Reflexive if events > 1 => out.push(Constraint::Locality),
        AnaphorClass::Pronoun if events < 2 => out.push(Constraint::Antilocality),
        _ => {}
    }
    let u = pair.start();
    if !is_individual(g, u, &ctx.eventive)
        && ctx.order.compare(g, &ctx.depths, pair.pe.first_edge(), pair.pf.first_edge()) == Some(Ordering::Greater)
    {
        out.push(Constraint::Obliqueness);
    }
    out
}

#[derive(Debug, Clone)]
pub struct BindingVerdict {
    pub link: AnaphorLink,
    pub pairs: Vec<PathPair>,
    pub violations: Vec<Violation>,
}

impl BindingVerdict {
    pub fn valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violated(&self) -> BTreeSet<Constraint> {
        self.violations.iter().map(|v| v.constraint).collect()
    }
}

pub fn check_anaphor(g: &Semgraph, link: &AnaphorLink, ctx: &BindingContext) -> BindingVerdict {
    let pairs = coref_path_pairs(g, link.edge);
    let violations = pairs
        .iter()
        .flat_map(|p| {
            check_binding(g, p, link.class, ctx).into_iter().map(|constraint| Violation { constraint, pair: p.clone() })
        })
        .collect();
    BindingVerdict { link: link.clone(), pairs, violations }
}

/// Shared state for trial compositions.
#[derive(Debug, Clone, Default)]
pub struct Resolver {
    pub order: ObliquenessOrder,
    pub eventive: BTreeSet<String>,
    pub forces: ForceRegistry,
}

impl Resolver {
    pub fn new(eventive: BTreeSet<String>) -> Self {
        Resolver { eventive, ..Default::default() }
    }

    fn context(&self, c: &Composition) -> BindingContext {
        BindingContext { order: self.order.clone(), eventive: self.eventive.clone(), depths: c.edge_depths.clone() }
    }

    pub fn binding(&self, c: &Composition) -> Vec<BindingVerdict> {
        let ctx = self.context(c);
        c.anaphors.iter().map(|l| check_anaphor(&c.graph, l, &ctx)).collect()
    }

    /// Candidates for one request, each trial-composed with `base` (minus
    /// any line for this request) and scored.
    pub fn enumerate_candidates(
        &self,
        request: &ResolutionRequest,
        instances: &[&Instance],
        syntax: &Syntax,
        base: &[Resolution],
    ) -> Vec<Candidate> {
        let key = (request.token_index, request.negative_source);
        let rest: Vec<Resolution> = base.iter().copied().filter(|r| r.request() != key).collect();
        let mut targets = Vec::new();
        if request.kind == RequestKind::Precedence {
            targets.push(ResolveTo::Drop(DropMarker::Drop));
        }
        for inst in instances.iter().filter(|i| i.token != request.token_index) {
            for s in candidate_sources(inst, request.kind) {
                targets.push(ResolveTo::Source { token_index: inst.token, source: s });
            }
        }
        targets
            .into_iter()
            .map(|target| {
                let mut script = rest.clone();
                script.push(Resolution { token_index: key.0, negative_source: key.1, resolve_to: target });
                let outcome = match composer::compose_with(instances, syntax, &script, ComposeOptions { lenient: true }) {
                    Err(e) => Outcome::Conflict(e.to_string()),
                    Ok(c) => match request.kind {
                        RequestKind::Coreference => {
                            let mine: Vec<BindingVerdict> = self
                                .binding(&c)
                                .into_iter()
                                .filter(|v| (v.link.token, v.link.negative_source) == key)
                                .collect();
                            let violated: BTreeSet<Constraint> = mine.iter().flat_map(|v| v.violated()).collect();
                            if violated.is_empty() {
                                Outcome::Accepted
                            } else {
                                Outcome::Binding(violated)
                            }
                        }
                        RequestKind::Precedence => {
                            let v = composer::validate(&c.graph, &self.forces);
                            if v.ok() {
                                Outcome::Accepted
                            } else {
                                Outcome::Invalid(v.diagnostics)
                            }
                        }
                    },
                };
                Candidate { target, outcome }
            })
            .collect()
    }

    /// Full readings for one syntactic reading: the cross product of the
    /// accepted candidates of every request, composed strictly, with
    /// binding and validity recorded. Lines in `fixed` are taken as given;
    /// with `scope_indefinites` false, open precedence requests are dropped.
    pub fn resolve(
        &self,
        instances: &[&Instance],
        syntax: &Syntax,
        fixed: &[Resolution],
        scope_indefinites: bool,
    ) -> Vec<ResolvedReading> {
        let reqs = requests(instances);
        let base: Vec<Resolution> = reqs
            .iter()
            .filter(|r| r.kind == RequestKind::Precedence && !scope_indefinites)
            .map(|r| Resolution::drop(r.token_index, r.negative_source))
            .filter(|d| !fixed.iter().any(|f| f.request() == d.request()))
            .chain(fixed.iter().copied())
            .collect();
        let mut options: Vec<Vec<Resolution>> = Vec::new();
        for r in &reqs {
            let key = (r.token_index, r.negative_source);
            if let Some(line) = base.iter().find(|b| b.request() == key) {
                options.push(vec![*line]);
                continue;
            }
            let accepted: Vec<Resolution> = self
                .enumerate_candidates(r, instances, syntax, &base)
                .into_iter()
                .filter(|c| r.kind == RequestKind::Coreference || c.outcome == Outcome::Accepted)
                .filter(|c| !matches!(c.outcome, Outcome::Conflict(_)))
                .map(|c| Resolution { token_index: key.0, negative_source: key.1, resolve_to: c.target })
                .collect();
            options.push(accepted);
        }
        let mut scripts: Vec<Vec<Resolution>> = vec![Vec::new()];
        for opts in &options {
            scripts = scripts
                .into_iter()
                .flat_map(|s| {
                    opts.iter().map(move |o| {
                        let mut s = s.clone();
                        s.push(*o);
                        s
                    })
                })
                .collect();
        }
        scripts
            .into_iter()
            .filter_map(|script| {
                let composition = composer::compose(instances, syntax, &script).ok()?;
                let validation = composer::validate(&composition.graph, &self.forces);
                let binding = self.binding(&composition);
                Some(ResolvedReading { resolutions: script, composition, validation, binding })
            })
            .collect()
    }
}

/// Sources a request may be resolved to: anything non-negative for
/// precedence; for co-reference, sources standing for a noun phrase.
fn candidate_sources(inst: &Instance, kind: RequestKind) -> Vec<i64> {
    let nonneg = inst.graph.sources().values().copied().filter(|&s| s >= 0);
    match kind {
        RequestKind::Precedence => nonneg.collect(),
        RequestKind::Coreference => {
            let np: BTreeSet<i64> = inst
                .ty
                .atoms()
                .iter()
                .filter(|a| a.name == AtomName::Np)
                .filter_map(|a| a.depth.map(i64::from))
                .collect();
            nonneg.filter(|s| np.contains(s)).collect()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Accepted,
    Binding(BTreeSet<Constraint>),
    Invalid(Vec<String>),
    Conflict(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    pub target: ResolveTo,
    pub outcome: Outcome,
}

#[derive(Debug, Clone)]
pub struct ResolvedReading {
    pub resolutions: Vec<Resolution>,
    pub composition: Composition,
    pub validation: Validation,
    pub binding: Vec<BindingVerdict>,
}

impl ResolvedReading {
    pub fn acceptable(&self) -> bool {
        self.validation.ok() && self.binding.iter().all(BindingVerdict::valid)
    }
}
