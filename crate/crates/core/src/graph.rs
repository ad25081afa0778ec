//! Semgraphs: simple directed graphs with labeled unary and binary edges and
//! integer source labels, plus the structural operations the rest of the
//! toolkit is built on (roots, induced subgraphs, parallel composition,
//! isomorphism).

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type VertexId = u32;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeLabel {
    Lexical(String),
    Thematic(String),
    Lambda,
    Equality,
    Cardinality,
    Membership,
    Rho,
    Iota,
    Sigma,
    Kappa,
    /// ⊂, conjunction.
    Inclusion,
    /// ⊇, disjunction.
    Choice,
    Force(String),
}

const KEYWORDS: [(&str, EdgeLabel); 10] = [
    ("lambda", EdgeLabel::Lambda),
    ("=", EdgeLabel::Equality),
    ("#", EdgeLabel::Cardinality),
    ("in", EdgeLabel::Membership),
    ("rho", EdgeLabel::Rho),
    ("iota", EdgeLabel::Iota),
    ("sigma", EdgeLabel::Sigma),
    ("kappa", EdgeLabel::Kappa),
    ("sub", EdgeLabel::Inclusion),
    ("sup", EdgeLabel::Choice),
];

impl EdgeLabel {
    pub fn lex(name: &str) -> Self {
        EdgeLabel::Lexical(name.to_string())
    }

    pub fn theta(name: &str) -> Self {
        EdgeLabel::Thematic(name.to_string())
    }

    pub fn force(name: &str) -> Self {
        EdgeLabel::Force(name.to_string())
    }

    /// ρ, ι or σ: the edges of a quantification structure.
    pub fn is_scoping(&self) -> bool {
        matches!(self, EdgeLabel::Rho | EdgeLabel::Iota | EdgeLabel::Sigma)
    }

    /// Notation used in DOT output and diagnostics.
    pub fn symbol(&self) -> String {
        match self {
            EdgeLabel::Lexical(n) | EdgeLabel::Thematic(n) | EdgeLabel::Force(n) => n.clone(),
            EdgeLabel::Lambda => "λ".into(),
            EdgeLabel::Equality => "=".into(),
            EdgeLabel::Cardinality => "#".into(),
            EdgeLabel::Membership => "∈".into(),
            EdgeLabel::Rho => "ρ".into(),
            EdgeLabel::Iota => "ι".into(),
            EdgeLabel::Sigma => "σ".into(),
            EdgeLabel::Kappa => "κ".into(),
            EdgeLabel::Inclusion => "⊂".into(),
            EdgeLabel::Choice => "⊇".into(),
        }
    }
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeLabel::Lexical(n) => {
                if n.contains(':') || KEYWORDS.iter().any(|(k, _)| k == n) {
                    write!(f, "lex:{n}")
                } else {
                    write!(f, "{n}")
                }
            }
            EdgeLabel::Thematic(n) => write!(f, "theta:{n}"),
            EdgeLabel::Force(n) => write!(f, "force:{n}"),
            other => {
                let (k, _) = KEYWORDS.iter().find(|(_, l)| l == other).unwrap();
                write!(f, "{k}")
            }
        }
    }
}

impl FromStr for EdgeLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some((_, l)) = KEYWORDS.iter().find(|(k, _)| *k == s) {
            return Ok(l.clone());
        }
        let named = |rest: &str, mk: fn(String) -> EdgeLabel| {
            if rest.is_empty() {
                Err(Error::BadLabel(s.to_string()))
            } else {
                Ok(mk(rest.to_string()))
            }
        };
        if let Some(rest) = s.strip_prefix("theta:") {
            named(rest, EdgeLabel::Thematic)
        } else if let Some(rest) = s.strip_prefix("force:") {
            named(rest, EdgeLabel::Force)
        } else if let Some(rest) = s.strip_prefix("lex:") {
            named(rest, EdgeLabel::Lexical)
        } else if s.is_empty() || s.contains(':') || s.chars().any(char::is_whitespace) {
            Err(Error::BadLabel(s.to_string()))
        } else {
            Ok(EdgeLabel::Lexical(s.to_string()))
        }
    }
}

impl Serialize for EdgeLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for EdgeLabel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Identifies an edge: unary edges by their vertex, binary edges by their
/// ordered endpoint pair (simplicity makes both unique).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgeRef {
    Unary(VertexId),
    Binary(VertexId, VertexId),
}

impl EdgeRef {
    pub fn tail(&self) -> VertexId {
        match *self {
            EdgeRef::Unary(v) | EdgeRef::Binary(v, _) => v,
        }
    }
}

impl fmt::Display for EdgeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeRef::Unary(v) => write!(f, "{v}"),
            EdgeRef::Binary(u, v) => write!(f, "{u}->{v}"),
        }
    }
}

/// A path a₀→a₁→…→aₙ, n ≥ 1, stored by its vertex sequence.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Path {
    pub vertices: Vec<VertexId>,
}

impl Path {
    pub fn len(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }

    pub fn first_edge(&self) -> (VertexId, VertexId) {
        (self.vertices[0], self.vertices[1])
    }

    pub fn last_edge(&self) -> (VertexId, VertexId) {
        let n = self.vertices.len();
        (self.vertices[n - 2], self.vertices[n - 1])
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Semgraph {
    vertices: BTreeSet<VertexId>,
    unary: BTreeMap<VertexId, EdgeLabel>,
    binary: BTreeMap<(VertexId, VertexId), EdgeLabel>,
    sources: BTreeMap<VertexId, i64>,
}

impl Semgraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self) -> VertexId {
        let id = self.vertices.last().map_or(0, |v| v + 1);
        self.vertices.insert(id);
        id
    }

    /// Inserts a vertex with a chosen id (no-op if present).
    pub fn insert_vertex(&mut self, id: VertexId) {
        self.vertices.insert(id);
    }

    fn check(&self, v: VertexId) -> Result<()> {
        if self.vertices.contains(&v) {
            Ok(())
        } else {
            Err(Error::InvalidVertex(v))
        }
    }

    pub fn add_unary(&mut self, v: VertexId, label: EdgeLabel) -> Result<()> {
        self.check(v)?;
        if let Some(old) = self.unary.get(&v) {
            return Err(Error::NotSimple(format!("vertex {v} already has unary edge {old}")));
        }
        self.unary.insert(v, label);
        Ok(())
    }

    pub fn add_binary(&mut self, from: VertexId, to: VertexId, label: EdgeLabel) -> Result<()> {
        self.check(from)?;
        self.check(to)?;
        if from == to {
            return Err(Error::NotSimple(format!("loop at {from}")));
        }
        if self.binary.contains_key(&(from, to)) {
            return Err(Error::NotSimple(format!("second edge {from}->{to}")));
        }
        self.binary.insert((from, to), label);
        Ok(())
    }

    pub fn set_source(&mut self, v: VertexId, label: i64) -> Result<()> {
        self.check(v)?;
        if self.sources.iter().any(|(&u, &l)| l == label && u != v) {
            return Err(Error::DuplicateSource(label));
        }
        self.sources.insert(v, label);
        Ok(())
    }

    pub fn vertices(&self) -> &BTreeSet<VertexId> {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    pub fn unary(&self, v: VertexId) -> Option<&EdgeLabel> {
        self.unary.get(&v)
    }

    pub fn binary(&self, from: VertexId, to: VertexId) -> Option<&EdgeLabel> {
        self.binary.get(&(from, to))
    }

    pub fn label(&self, e: EdgeRef) -> Option<&EdgeLabel> {
        match e {
            EdgeRef::Unary(v) => self.unary(v),
            EdgeRef::Binary(u, v) => self.binary(u, v),
        }
    }

    pub fn unary_edges(&self) -> impl Iterator<Item = (VertexId, &EdgeLabel)> {
        self.unary.iter().map(|(&v, l)| (v, l))
    }

    pub fn binary_edges(&self) -> impl Iterator<Item = ((VertexId, VertexId), &EdgeLabel)> {
        self.binary.iter().map(|(&e, l)| (e, l))
    }

    pub fn edge_refs(&self) -> Vec<EdgeRef> {
        self.unary
            .keys()
            .map(|&v| EdgeRef::Unary(v))
            .chain(self.binary.keys().map(|&(u, v)| EdgeRef::Binary(u, v)))
            .collect()
    }

    pub fn edge_count(&self) -> usize {
        self.unary.len() + self.binary.len()
    }

    pub fn sources(&self) -> &BTreeMap<VertexId, i64> {
        &self.sources
    }

    pub fn source_of(&self, v: VertexId) -> Option<i64> {
        self.sources.get(&v).copied()
    }

    pub fn vertex_of_source(&self, label: i64) -> Option<VertexId> {
        self.sources.iter().find(|(_, &l)| l == label).map(|(&v, _)| v)
    }

    /// Number of non-negative sources.
    pub fn sort(&self) -> usize {
        self.sources.values().filter(|&&l| l >= 0).count()
    }

    /// Binary out-neighbours with edge labels, in vertex order.
    pub fn out_binary(&self, v: VertexId) -> impl Iterator<Item = (VertexId, &EdgeLabel)> {
        self.binary.range((v, 0)..=(v, VertexId::MAX)).map(|(&(_, w), l)| (w, l))
    }

    pub fn in_binary(&self, v: VertexId) -> impl Iterator<Item = (VertexId, &EdgeLabel)> {
        self.binary.iter().filter(move |((_, w), _)| *w == v).map(|(&(u, _), l)| (u, l))
    }

    /// T(v): every unary and binary edge tailed by `v`.
    pub fn out_edges(&self, v: VertexId) -> Result<Vec<EdgeRef>> {
        self.check(v)?;
        let mut out: Vec<EdgeRef> = self.unary.get(&v).map(|_| EdgeRef::Unary(v)).into_iter().collect();
        out.extend(self.out_binary(v).map(|(w, _)| EdgeRef::Binary(v, w)));
        Ok(out)
    }

    /// G − F.
    pub fn remove_edges(&self, edges: &[EdgeRef]) -> Result<Semgraph> {
        let mut g = self.clone();
        for e in edges {
            let gone = match *e {
                EdgeRef::Unary(v) => g.unary.remove(&v).is_some(),
                EdgeRef::Binary(u, v) => g.binary.remove(&(u, v)).is_some(),
            };
            if !gone && self.label(*e).is_none() {
                return Err(Error::InvalidEdge(e.to_string()));
            }
        }
        Ok(g)
    }

    /// Subgraph induced by `keep`: every edge with all endpoints inside.
    pub fn induced(&self, keep: &BTreeSet<VertexId>) -> Semgraph {
        Semgraph {
            vertices: self.vertices.intersection(keep).copied().collect(),
            unary: self.unary.iter().filter(|(v, _)| keep.contains(v)).map(|(&v, l)| (v, l.clone())).collect(),
            binary: self
                .binary
                .iter()
                .filter(|((u, v), _)| keep.contains(u) && keep.contains(v))
                .map(|(&e, l)| (e, l.clone()))
                .collect(),
            sources: self.sources.iter().filter(|(v, _)| keep.contains(v)).map(|(&v, &l)| (v, l)).collect(),
        }
    }

    /// `u` together with every vertex reachable from it.
    pub fn reachable_from(&self, u: VertexId) -> BTreeSet<VertexId> {
        let mut seen = BTreeSet::from([u]);
        let mut stack = vec![u];
        while let Some(v) = stack.pop() {
            for (w, _) in self.out_binary(v) {
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen
    }

    /// G/u.
    pub fn reachable_subgraph(&self, u: VertexId) -> Result<Semgraph> {
        self.check(u)?;
        Ok(self.induced(&self.reachable_from(u)))
    }

    fn reaches(&self, from: VertexId, to: VertexId) -> bool {
        self.reachable_from(from).contains(&to)
    }

    /// Is there a simple cycle through both binary edges?
    fn share_cycle(&self, e: (VertexId, VertexId), e2: (VertexId, VertexId)) -> bool {
        // A simple cycle through e = a→b is a simple path b ⇝ a closed by e.
        fn dfs(g: &Semgraph, at: VertexId, goal: VertexId, want: (VertexId, VertexId), used: bool, seen: &mut BTreeSet<VertexId>) -> bool {
            if at == goal {
                return used;
            }
            for (w, _) in g.out_binary(at) {
                if seen.contains(&w) {
                    continue;
                }
                seen.insert(w);
                let hit = dfs(g, w, goal, want, used || (at, w) == want, seen);
                seen.remove(&w);
                if hit {
                    return true;
                }
            }
            false
        }
        let (a, b) = e;
        if e == e2 {
            return self.reaches(b, a);
        }
        let mut seen = BTreeSet::from([b]);
        dfs(self, b, a, e2, false, &mut seen)
    }

    /// Does binary edge `e` encycle binary edge `e2`?
    pub fn encycles(&self, e: (VertexId, VertexId), e2: (VertexId, VertexId)) -> Result<bool> {
        let label = self.binary(e.0, e.1).ok_or_else(|| Error::InvalidEdge(format!("{}->{}", e.0, e.1)))?;
        self.binary(e2.0, e2.1).ok_or_else(|| Error::InvalidEdge(format!("{}->{}", e2.0, e2.1)))?;
        if !self.share_cycle(e, e2) {
            return Ok(false);
        }
        let mut cut = vec![EdgeRef::Binary(e.0, e.1)];
        if *label == EdgeLabel::Equality {
            cut.extend(
                self.in_binary(e.1)
                    .filter(|(u, l)| **l == EdgeLabel::Equality && *u != e.0)
                    .map(|(u, _)| EdgeRef::Binary(u, e.1)),
            );
        }
        let rest = self.remove_edges(&cut)?;
        Ok(rest.binary(e2.0, e2.1).is_none() || !rest.reaches(e2.1, e2.0))
    }

    pub fn is_root(&self, v: VertexId) -> bool {
        let lambdas: Vec<VertexId> =
            self.out_binary(v).filter(|(_, l)| **l == EdgeLabel::Lambda).map(|(w, _)| w).collect();
        self.in_binary(v)
            .all(|(u, _)| lambdas.iter().any(|&w| self.encycles((u, v), (v, w)).unwrap_or(false)))
    }

    pub fn find_roots(&self) -> BTreeSet<VertexId> {
        self.vertices.iter().copied().filter(|&v| self.is_root(v)).collect()
    }

    /// The unique root, provided it reaches every vertex.
    pub fn unique_root(&self) -> Option<VertexId> {
        let roots = self.find_roots();
        if roots.len() != 1 {
            return None;
        }
        let r = *roots.iter().next().unwrap();
        (self.reachable_from(r).len() == self.vertices.len()).then_some(r)
    }

    pub fn rename_source(&mut self, v: VertexId, label: i64) -> Result<()> {
        if !self.sources.contains_key(&v) {
            return Err(Error::NotASource(v));
        }
        if self.sources.iter().any(|(&u, &l)| l == label && u != v) {
            return Err(Error::DuplicateSource(label));
        }
        self.sources.insert(v, label);
        Ok(())
    }

    pub fn forget_source(&mut self, v: VertexId) -> Result<()> {
        self.sources.remove(&v).map(|_| ()).ok_or(Error::NotASource(v))
    }

    pub fn forget_all_sources(&mut self) {
        self.sources.clear();
    }

    /// G ∥ H: disjoint union with namesake sources fused. Identical edges
    /// merge; differing labels on one vertex or ordered pair are a conflict.
    pub fn parallel_compose(&self, other: &Semgraph) -> Result<Semgraph> {
        self.parallel_compose_mapped(other).map(|(g, _)| g)
    }

    /// As `parallel_compose`, also returning where each vertex of `other`
    /// ended up. Fusion that would turn an edge into a loop is a conflict.
    pub fn parallel_compose_mapped(&self, other: &Semgraph) -> Result<(Semgraph, HashMap<VertexId, VertexId>)> {
        let mut g = self.clone();
        let mut next = g.vertices.last().map_or(0, |v| v + 1);
        let mut map = HashMap::new();
        for &v in &other.vertices {
            let target = match other.source_of(v).and_then(|s| g.vertex_of_source(s)) {
                Some(t) => t,
                None => {
                    next += 1;
                    g.vertices.insert(next - 1);
                    next - 1
                }
            };
            map.insert(v, target);
        }
        for (&v, &s) in &other.sources {
            g.sources.insert(map[&v], s);
        }
        for (&v, l) in &other.unary {
            let t = map[&v];
            match g.unary.get(&t) {
                Some(old) if old != l => {
                    return Err(Error::CompositionConflict(format!("vertex {t}: unary {old} vs {l}")))
                }
                _ => {
                    g.unary.insert(t, l.clone());
                }
            }
        }
        for (&(u, v), l) in &other.binary {
            let (a, b) = (map[&u], map[&v]);
            if a == b {
                return Err(Error::CompositionConflict(format!("edge {u}->{v} fuses into a loop at {a}")));
            }
            match g.binary.get(&(a, b)) {
                Some(old) if old != l => {
                    return Err(Error::CompositionConflict(format!("edge {a}->{b}: {old} vs {l}")))
                }
                _ => {
                    g.binary.insert((a, b), l.clone());
                }
            }
        }
        Ok((g, map))
    }

    /// Copy with vertices renumbered 0..n in ascending order.
    pub fn compact(&self) -> Semgraph {
        let map: HashMap<VertexId, VertexId> =
            self.vertices.iter().enumerate().map(|(i, &v)| (v, i as VertexId)).collect();
        self.relabel(&map)
    }

    /// Copy with every vertex id shifted by `offset`.
    pub fn shifted(&self, offset: VertexId) -> Semgraph {
        let map: HashMap<VertexId, VertexId> = self.vertices.iter().map(|&v| (v, v + offset)).collect();
        self.relabel(&map)
    }

    fn relabel(&self, map: &HashMap<VertexId, VertexId>) -> Semgraph {
        Semgraph {
            vertices: self.vertices.iter().map(|v| map[v]).collect(),
            unary: self.unary.iter().map(|(v, l)| (map[v], l.clone())).collect(),
            binary: self.binary.iter().map(|((u, v), l)| ((map[u], map[v]), l.clone())).collect(),
            sources: self.sources.iter().map(|(v, &l)| (map[v], l)).collect(),
        }
    }

    fn signature(&self, v: VertexId) -> (Option<&EdgeLabel>, Option<i64>, Vec<&EdgeLabel>, Vec<&EdgeLabel>) {
        let mut out: Vec<_> = self.out_binary(v).map(|(_, l)| l).collect();
        let mut inn: Vec<_> = self.in_binary(v).map(|(_, l)| l).collect();
        out.sort();
        inn.sort();
        (self.unary(v), self.source_of(v), out, inn)
    }

    /// Label- and source-preserving isomorphism, by backtracking.
    pub fn is_isomorphic(&self, other: &Semgraph) -> bool {
        if self.vertices.len() != other.vertices.len()
            || self.unary.len() != other.unary.len()
            || self.binary.len() != other.binary.len()
            || self.sources.len() != other.sources.len()
        {
            return false;
        }
        let sig_a: HashMap<VertexId, _> = self.vertices.iter().map(|&v| (v, self.signature(v))).collect();
        let sig_b: HashMap<VertexId, _> = other.vertices.iter().map(|&v| (v, other.signature(v))).collect();
        let mut candidates: Vec<(VertexId, Vec<VertexId>)> = self
            .vertices
            .iter()
            .map(|&v| (v, other.vertices.iter().copied().filter(|w| sig_b[w] == sig_a[&v]).collect()))
            .collect();
        if candidates.iter().any(|(_, c): &(VertexId, Vec<VertexId>)| c.is_empty()) {
            return false;
        }
        candidates.sort_by_key(|(_, c)| c.len());

        fn go(
            a: &Semgraph,
            b: &Semgraph,
            cands: &[(VertexId, Vec<VertexId>)],
            k: usize,
            map: &mut Vec<(VertexId, VertexId)>,
            used: &mut BTreeSet<VertexId>,
        ) -> bool {
            if k == cands.len() {
                return true;
            }
            let (v, ref options) = cands[k];
            for &w in options {
                if used.contains(&w) {
                    continue;
                }
                let fits = map
                    .iter()
                    .all(|&(x, y)| a.binary(v, x) == b.binary(w, y) && a.binary(x, v) == b.binary(y, w));
                if fits {
                    map.push((v, w));
                    used.insert(w);
                    if go(a, b, cands, k + 1, map, used) {
                        return true;
                    }
                    used.remove(&w);
                    map.pop();
                }
            }
            false
        }
        go(self, other, &candidates, 0, &mut Vec::new(), &mut BTreeSet::new())
    }

    /// Simple paths from `u` to `v` of length 1..=max_len. When u = v the
    /// paths are cycles through u.
    pub fn simple_paths(&self, u: VertexId, v: VertexId, max_len: usize) -> Vec<Path> {
        let mut out = Vec::new();
        let mut stack = vec![u];
        fn go(g: &Semgraph, goal: VertexId, max_len: usize, stack: &mut Vec<VertexId>, out: &mut Vec<Path>) {
            let at = *stack.last().unwrap();
            if stack.len() > max_len {
                return;
            }
            for (w, _) in g.out_binary(at) {
                if w == goal {
                    let mut vs = stack.clone();
                    vs.push(w);
                    out.push(Path { vertices: vs });
                } else if !stack.contains(&w) {
                    stack.push(w);
                    go(g, goal, max_len, stack, out);
                    stack.pop();
                }
            }
        }
        if self.contains(u) && self.contains(v) {
            go(self, v, max_len, &mut stack, &mut out);
        }
        out.sort();
        out
    }

    /// Unordered pairs of distinct simple paths from `u` to `v`.
    pub fn find_parallel_paths(&self, u: VertexId, v: VertexId, max_len: usize) -> Result<Vec<(Path, Path)>> {
        self.check(u)?;
        self.check(v)?;
        let paths = self.simple_paths(u, v, max_len);
        let mut out = Vec::new();
        for i in 0..paths.len() {
            for j in i + 1..paths.len() {
                out.push((paths[i].clone(), paths[j].clone()));
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(GraphJson::from(self)).expect("semgraph serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Semgraph> {
        let j: GraphJson = serde_json::from_value(value.clone())?;
        j.try_into()
    }

    pub fn from_json_str(text: &str) -> Result<Semgraph> {
        let j: GraphJson = serde_json::from_str(text)?;
        j.try_into()
    }

    /// Deterministic DOT rendering; unary edges become vertex annotations.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph semgraph {\n");
        for &v in &self.vertices {
            let mut label = format!("v{v}");
            if let Some(l) = self.unary(v) {
                label.push_str(&format!(": {}", l.symbol()));
            }
            if let Some(src) = self.source_of(v) {
                label.push_str(&format!(" [{src}]"));
            }
            s.push_str(&format!("  v{v} [label=\"{}\"];\n", label.replace('"', "\\\"")));
        }
        for ((u, v), l) in &self.binary {
            s.push_str(&format!("  v{u} -> v{v} [label=\"{}\"];\n", l.symbol().replace('"', "\\\"")));
        }
        s.push_str("}\n");
        s
    }
}

impl fmt::Display for Semgraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", serde_json::to_string(&GraphJson::from(self)).map_err(|_| fmt::Error)?)
    }
}

#[derive(Serialize, Deserialize)]
struct UnaryJson {
    v: VertexId,
    label: EdgeLabel,
}

#[derive(Serialize, Deserialize)]
struct BinaryJson {
    from: VertexId,
    to: VertexId,
    label: EdgeLabel,
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    vertices: Vec<VertexId>,
    #[serde(default)]
    unary: Vec<UnaryJson>,
    #[serde(default)]
    binary: Vec<BinaryJson>,
    #[serde(default)]
    sources: BTreeMap<VertexId, i64>,
}

impl From<&Semgraph> for GraphJson {
    fn from(g: &Semgraph) -> Self {
        GraphJson {
            vertices: g.vertices.iter().copied().collect(),
            unary: g.unary.iter().map(|(&v, l)| UnaryJson { v, label: l.clone() }).collect(),
            binary: g.binary.iter().map(|(&(from, to), l)| BinaryJson { from, to, label: l.clone() }).collect(),
            sources: g.sources.clone(),
        }
    }
}

impl TryFrom<GraphJson> for Semgraph {
    type Error = Error;

    fn try_from(j: GraphJson) -> Result<Semgraph> {
        let mut g = Semgraph::new();
        for v in j.vertices {
            g.insert_vertex(v);
        }
        for u in j.unary {
            g.add_unary(u.v, u.label)?;
        }
        for b in j.binary {
            g.add_binary(b.from, b.to, b.label)?;
        }
        for (v, s) in j.sources {
            g.set_source(v, s)?;
        }
        Ok(g)
    }
}

/// Small builder for hand-written graphs: vertices are named, binary edges
/// given as `(from, label, to)`.
#[derive(Default)]
pub struct GraphBuilder {
    g: Semgraph,
    names: BTreeMap<String, VertexId>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn v(&mut self, name: &str) -> VertexId {
        if let Some(&id) = self.names.get(name) {
            return id;
        }
        let id = self.g.add_vertex();
        self.names.insert(name.to_string(), id);
        id
    }

    pub fn unary(&mut self, name: &str, label: EdgeLabel) -> &mut Self {
        let v = self.v(name);
        self.g.add_unary(v, label).expect("builder: unary");
        self
    }

    pub fn lex(&mut self, name: &str, pred: &str) -> &mut Self {
        self.unary(name, EdgeLabel::lex(pred))
    }

    pub fn edge(&mut self, from: &str, label: EdgeLabel, to: &str) -> &mut Self {
        let (u, v) = (self.v(from), self.v(to));
        self.g.add_binary(u, v, label).expect("builder: binary");
        self
    }

    pub fn theta(&mut self, from: &str, rel: &str, to: &str) -> &mut Self {
        self.edge(from, EdgeLabel::theta(rel), to)
    }

    pub fn source(&mut self, name: &str, label: i64) -> &mut Self {
        let v = self.v(name);
        self.g.set_source(v, label).expect("builder: source");
        self
    }

    pub fn id(&self, name: &str) -> VertexId {
        self.names[name]
    }

    pub fn build(&self) -> Semgraph {
        self.g.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// A graph rooted at u whose cycle runs through v and w; `lifted` adds
    /// λ x→u, which moves the root to x.
    fn lambda_cycle(lifted: bool) -> GraphBuilder {
        let mut b = GraphBuilder::new();
        b.theta("u", "r", "v").edge("v", EdgeLabel::Lambda, "w").theta("w", "r", "v").theta("w", "s", "x");
        if lifted {
            b.edge("x", EdgeLabel::Lambda, "u");
        }
        b
    }

    #[test]
    fn lifting_moves_the_root() {
        let a = lambda_cycle(false);
        assert_eq!(a.build().find_roots(), BTreeSet::from([a.id("u")]));
        let b = lambda_cycle(true);
        assert_eq!(b.build().find_roots(), BTreeSet::from([b.id("x")]));
    }

    #[test]
    fn encycles_examples() {
        let b = lambda_cycle(true);
        let g = b.build();
        let (u, v, w, x) = (b.id("u"), b.id("v"), b.id("w"), b.id("x"));
        assert!(!g.encycles((u, v), (v, w)).unwrap());
        assert!(g.encycles((w, x), (x, u)).unwrap());
    }

    #[test]
    fn unlifted_graph_is_reachable_part_of_lifted() {
        let b = lambda_cycle(true);
        let g = b.build();
        let cut = g.remove_edges(&[EdgeRef::Binary(b.id("x"), b.id("u"))]).unwrap();
        let sub = cut.reachable_subgraph(b.id("u")).unwrap();
        assert!(sub.is_isomorphic(&lambda_cycle(false).build()));
    }

    #[test]
    fn equality_encycling_cuts_sibling_equalities() {
        // x = y and z = y; the cycle y → x → y closes through a λ.
        let mut b = GraphBuilder::new();
        b.edge("x", EdgeLabel::Equality, "y")
            .edge("z", EdgeLabel::Equality, "y")
            .edge("y", EdgeLabel::Lambda, "x")
            .edge("y", EdgeLabel::Lambda, "z");
        let g = b.build();
        let (x, y, z) = (b.id("x"), b.id("y"), b.id("z"));
        assert!(g.encycles((x, y), (y, x)).unwrap());
        assert!(g.encycles((x, y), (y, z)).is_ok_and(|r| !r));
    }

    #[test]
    fn simplicity_is_enforced() {
        let mut g = Semgraph::new();
        let a = g.add_vertex();
        let b = g.add_vertex();
        assert!(g.add_binary(a, a, EdgeLabel::Lambda).is_err());
        g.add_binary(a, b, EdgeLabel::Lambda).unwrap();
        assert!(g.add_binary(a, b, EdgeLabel::Equality).is_err());
        g.add_unary(a, EdgeLabel::lex("dog")).unwrap();
        assert!(g.add_unary(a, EdgeLabel::lex("cat")).is_err());
        g.set_source(a, 0).unwrap();
        assert_eq!(g.set_source(b, 0), Err(Error::DuplicateSource(0)));
        assert_eq!(g.out_edges(99), Err(Error::InvalidVertex(99)));
    }

    #[test]
    fn source_renaming_and_forgetting() {
        let mut g = Semgraph::new();
        let a = g.add_vertex();
        let b = g.add_vertex();
        g.set_source(a, 0).unwrap();
        g.set_source(b, -1).unwrap();
        assert_eq!(g.sort(), 1);
        let orig = g.clone();
        g.rename_source(a, 7).unwrap();
        g.rename_source(a, 0).unwrap();
        assert_eq!(g, orig);
        assert_eq!(g.rename_source(a, -1), Err(Error::DuplicateSource(-1)));
        g.forget_source(a).unwrap();
        assert_eq!(g.forget_source(a), Err(Error::NotASource(a)));
        g.forget_all_sources();
        assert_eq!(g.sort(), 0);
    }

    #[test]
    fn composition_fuses_namesakes_and_rejects_conflicts() {
        let mut b1 = GraphBuilder::new();
        b1.lex("e", "walk").theta("e", "ag", "x").source("e", 0).source("x", 1);
        let mut b2 = GraphBuilder::new();
        b2.lex("y", "dog").source("y", 1);
        let g = b1.build().parallel_compose(&b2.build()).unwrap();
        assert_eq!(g.vertex_count(), 2);
        let x = g.vertex_of_source(1).unwrap();
        assert_eq!(g.unary(x), Some(&EdgeLabel::lex("dog")));

        let mut b3 = GraphBuilder::new();
        b3.lex("y", "cat").source("y", 1);
        assert!(matches!(g.parallel_compose(&b3.build()), Err(Error::CompositionConflict(_))));
    }

    #[test]
    fn label_text_round_trip() {
        for l in [
            EdgeLabel::lex("walk"),
            EdgeLabel::lex("in"),
            EdgeLabel::theta("ag"),
            EdgeLabel::force("most"),
            EdgeLabel::Lambda,
            EdgeLabel::Choice,
        ] {
            assert_eq!(l.to_string().parse::<EdgeLabel>().unwrap(), l);
        }
        assert!("theta:".parse::<EdgeLabel>().is_err());
    }

    #[test]
    fn json_and_dot_are_stable() {
        let g = lambda_cycle(true).build();
        let back = Semgraph::from_json(&g.to_json()).unwrap();
        assert_eq!(back, g);
        assert_eq!(g.to_dot(), back.to_dot());
        assert!(g.to_dot().contains("v3 -> v0 [label=\"λ\"]"));
    }

    #[test]
    fn parallel_paths_of_a_diamond() {
        let mut b = GraphBuilder::new();
        b.theta("v", "ag", "x").edge("x", EdgeLabel::Equality, "y").theta("v", "th", "y");
        let g = b.build();
        let pairs = g.find_parallel_paths(b.id("v"), b.id("y"), 8).unwrap();
        assert_eq!(pairs.len(), 1);
        let (p, q) = &pairs[0];
        assert_eq!(p.len() + q.len(), 3);
    }
}
