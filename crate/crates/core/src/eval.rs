//! The semgraph interpreter: truth of a semgraph at a world of a finite model.
//!
//! Evaluation is a backtracking search for a valuation. Vertices are valued
//! lazily, when an edge constraint first needs them, and constraints that
//! determine a value (equality, thematic images, cardinality) propagate it
//! instead of enumerating. Clauses that quantify over extensions of the
//! current valuation (κ-edges, quantification, conjuncts) are postponed as
//! checks until the valuation at the current level is complete, and run as
//! independent searches.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::graph::{EdgeLabel, EdgeRef, Semgraph, VertexId};
use crate::model::{members, singleton, EntitySet, Modal, Model, WorldId};

pub type Valuation = BTreeMap<VertexId, EntitySet>;

/// How (viii.c) counts: by classes of iterator valuations agreeing on the
/// iterator, or by the valuations themselves (the unrevised definition).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Counting {
    Classes,
    Valuations,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Threshold {
    All,
    None,
    Most,
    LessThan(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ForceSpec {
    pub threshold: Threshold,
    /// Whether every valuation of a class must extend, or some.
    pub mode: Modal,
}

impl ForceSpec {
    pub fn holds(&self, satisfied: usize, total: usize) -> bool {
        match self.threshold {
            Threshold::All => satisfied == total,
            Threshold::None => satisfied == 0,
            Threshold::Most => 2 * satisfied > total,
            Threshold::LessThan(n) => total < n,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ForceRegistry {
    forces: HashMap<String, ForceSpec>,
}

impl Default for ForceRegistry {
    fn default() -> Self {
        let mut forces = HashMap::new();
        let some = |threshold| ForceSpec { threshold, mode: Modal::Some };
        for (names, t) in [
            (["all", "∀"], Threshold::All),
            (["no", "¬"], Threshold::None),
            (["most", "%"], Threshold::Most),
        ] {
            for n in names {
                forces.insert(n.to_string(), some(t));
            }
        }
        ForceRegistry { forces }
    }
}

impl ForceRegistry {
    /// Looks up a force; `lt<n>` names the bounded numeral "fewer than n".
    pub fn get(&self, name: &str) -> Option<ForceSpec> {
        if let Some(f) = self.forces.get(name) {
            return Some(*f);
        }
        let n = name.strip_prefix("lt")?.parse().ok()?;
        Some(ForceSpec { threshold: Threshold::LessThan(n), mode: Modal::Some })
    }

    pub fn insert(&mut self, name: &str, spec: ForceSpec) {
        self.forces.insert(name.to_string(), spec);
    }

    pub fn set_mode(&mut self, name: &str, mode: Modal) {
        if let Some(mut f) = self.get(name) {
            f.mode = mode;
            self.forces.insert(name.to_string(), f);
        }
    }
}

/// [x]: x and every vertex reached from x by a path free of ρ, ι, σ whose
/// last edge is λ or equality.
pub fn bracket(g: &Semgraph, x: VertexId) -> BTreeSet<VertexId> {
    let mut reach = BTreeSet::from([x]);
    let mut stack = vec![x];
    while let Some(v) = stack.pop() {
        for (w, l) in g.out_binary(v) {
            if !l.is_scoping() && reach.insert(w) {
                stack.push(w);
            }
        }
    }
    let mut out = BTreeSet::from([x]);
    for &u in &reach {
        out.extend(g.out_binary(u).filter(|(_, l)| matches!(l, EdgeLabel::Lambda | EdgeLabel::Equality)).map(|(w, _)| w));
    }
    out
}

/// T̄(x): T(x), except that a disjunct taking scope by a λ-edge contributes
/// only its λ-edges until the disjunction chooses it.
pub fn suspended_out_edges(g: &Semgraph, x: VertexId) -> Vec<EdgeRef> {
    let lambdas: Vec<EdgeRef> =
        g.out_binary(x).filter(|(_, l)| **l == EdgeLabel::Lambda).map(|(w, _)| EdgeRef::Binary(x, w)).collect();
    let disjunct = g.in_binary(x).any(|(_, l)| *l == EdgeLabel::Choice);
    if disjunct && !lambdas.is_empty() {
        lambdas
    } else {
        g.out_edges(x).unwrap_or_default()
    }
}

/// Quantification structure rooted at `q`: (force, restrictor, iterator, scope).
pub fn quantification_parts(g: &Semgraph, q: VertexId) -> Option<(String, VertexId, VertexId, VertexId)> {
    let find = |label: EdgeLabel| {
        let hits: Vec<VertexId> = g.out_binary(q).filter(|(_, l)| **l == label).map(|(w, _)| w).collect();
        (hits.len() == 1).then(|| hits[0])
    };
    let force = match g.unary(q)? {
        EdgeLabel::Force(f) => f.clone(),
        _ => return None,
    };
    Some((force, find(EdgeLabel::Rho)?, find(EdgeLabel::Iota)?, find(EdgeLabel::Sigma)?))
}

fn coordinates(g: &Semgraph, x: VertexId, label: &EdgeLabel) -> Vec<VertexId> {
    g.out_binary(x).filter(|(_, l)| *l == label).map(|(w, _)| w).collect()
}

/// Structural well-formedness of every quantification and coordination
/// structure, against a force registry.
pub fn check_structures(g: &Semgraph, forces: &ForceRegistry) -> Result<()> {
    for &v in g.vertices() {
        let has = |l: &EdgeLabel| g.out_binary(v).any(|(_, x)| x == l);
        if has(&EdgeLabel::Rho) || has(&EdgeLabel::Iota) || has(&EdgeLabel::Sigma) {
            let (force, ..) = quantification_parts(g, v).ok_or(Error::MalformedQuantification(v))?;
            forces.get(&force).ok_or(Error::MalformedQuantification(v))?;
        }
        let conj = coordinates(g, v, &EdgeLabel::Inclusion).len();
        let disj = coordinates(g, v, &EdgeLabel::Choice).len();
        if (conj > 0 && disj > 0) || conj == 1 || disj == 1 {
            return Err(Error::MalformedCoordination(v));
        }
    }
    Ok(())
}

type Eta = Rc<BTreeSet<VertexId>>;

#[derive(Clone)]
enum Goal {
    Visit { eta: Eta, graph: Rc<Semgraph>, root: VertexId },
    Unary { v: VertexId, label: EdgeLabel },
    Binary { from: VertexId, to: VertexId, label: EdgeLabel },
    Define(VertexId),
    Union { x: VertexId, parts: Vec<VertexId> },
}

#[derive(Clone)]
enum Check {
    Kappa { eta: Eta, graph: Rc<Semgraph>, tail: VertexId, head: VertexId },
    Quant { eta: Eta, graph: Rc<Semgraph>, force: String, r: VertexId, i: VertexId, s: VertexId },
    Extend { eta: Eta, graph: Rc<Semgraph>, root: VertexId },
}

fn subsets_of(set: EntitySet) -> impl Iterator<Item = EntitySet> {
    // Ascending enumeration of all submasks.
    let mut sub: Option<EntitySet> = Some(0);
    std::iter::from_fn(move || {
        let cur = sub?;
        sub = if cur == set { None } else { Some(((cur | !set).wrapping_add(1)) & set) };
        Some(cur)
    })
}

pub struct Evaluator<'m> {
    pub model: &'m Model,
    pub forces: ForceRegistry,
    pub counting: Counting,
}

impl<'m> Evaluator<'m> {
    pub fn new(model: &'m Model) -> Self {
        Evaluator { model, forces: ForceRegistry::default(), counting: Counting::Classes }
    }

    pub fn with_counting(mut self, counting: Counting) -> Self {
        self.counting = counting;
        self
    }

    /// w ⊨ G at the model's reference world.
    pub fn truth(&self, g: &Semgraph) -> Result<bool> {
        self.truth_at(self.model.reference_world, g)
    }

    pub fn truth_at(&self, w: WorldId, g: &Semgraph) -> Result<bool> {
        Ok(self.witness_at(w, g)?.is_some())
    }

    /// A valuation g with w, g ⊨∅ G, if any.
    pub fn witness_at(&self, w: WorldId, g: &Semgraph) -> Result<Option<Valuation>> {
        let root = self.interpretable_root(g)?;
        let mut found = None;
        let goal = Goal::Visit { eta: Rc::default(), graph: Rc::new(g.clone()), root };
        self.solve(w, Valuation::new(), vec![goal], Vec::new(), &mut |v| {
            found = Some(v.clone());
            true
        });
        Ok(found)
    }

    pub fn interpretable_root(&self, g: &Semgraph) -> Result<VertexId> {
        let root = g.unique_root().ok_or_else(|| {
            Error::Uninterpretable(format!("roots {:?} do not form a unique root reaching every vertex", g.find_roots()))
        })?;
        check_structures(g, &self.forces)?;
        Ok(root)
    }

    /// w, g ⊨η G rooted at `root`, for some completion of the partial `g`
    /// on vertices it leaves undefined.
    pub fn satisfies(&self, w: WorldId, eta: &BTreeSet<VertexId>, g: &Valuation, graph: &Semgraph, root: VertexId) -> bool {
        self.exists(w, g.clone(), Rc::new(eta.clone()), Rc::new(graph.clone()), root)
    }

    /// Maximality: x^g cannot be enlarged by any h satisfying the restrictor
    /// subgraph (h agreeing with g on visited vertices).
    pub fn maximal(&self, w: WorldId, g: &Valuation, x: VertexId, eta: &BTreeSet<VertexId>, restrictor: &Semgraph) -> bool {
        if eta.contains(&x) {
            return true;
        }
        let xv = g.get(&x).copied().unwrap_or(0);
        let eta_rc = Rc::new(eta.clone());
        let graph = Rc::new(restrictor.clone());
        let base: Valuation = g.iter().filter(|(v, _)| eta.contains(v) && **v != x).map(|(&v, &s)| (v, s)).collect();
        let rest = self.model.full_set() & !xv;
        subsets_of(rest).filter(|&extra| extra != 0).all(|extra| {
            let mut h = base.clone();
            h.insert(x, xv | extra);
            !self.exists(w, h, eta_rc.clone(), graph.clone(), x)
        })
    }

    /// Evaluates one edge under a valuation defined on its endpoints.
    pub fn eval_edge(&self, w: WorldId, g: &Valuation, graph: &Semgraph, e: EdgeRef) -> Result<bool> {
        let label = graph.label(e).ok_or_else(|| Error::InvalidEdge(e.to_string()))?;
        let get = |v: VertexId| g.get(&v).copied().ok_or(Error::UndefinedVertex(v));
        Ok(match e {
            EdgeRef::Unary(v) => match label {
                EdgeLabel::Lexical(p) => {
                    let xv = get(v)?;
                    xv != 0 && xv & !self.model.predicate(w, p) == 0
                }
                _ => true,
            },
            EdgeRef::Binary(x, y) => self.binary_holds(w, label, get(x)?, get(y)?),
        })
    }

    fn binary_holds(&self, w: WorldId, label: &EdgeLabel, x: EntitySet, y: EntitySet) -> bool {
        match label {
            EdgeLabel::Equality => x == y,
            EdgeLabel::Cardinality => Some(y) == self.cardinality(x),
            EdgeLabel::Membership => x.count_ones() == 1 && x & !y == 0,
            EdgeLabel::Thematic(r) => y == self.model.relation_image(w, r, x),
            _ => true,
        }
    }

    fn cardinality(&self, x: EntitySet) -> Option<EntitySet> {
        self.model.numeral_entity(x.count_ones() as i64).map(singleton)
    }

    fn exists(&self, w: WorldId, g: Valuation, eta: Eta, graph: Rc<Semgraph>, root: VertexId) -> bool {
        self.solve(w, g, vec![Goal::Visit { eta, graph, root }], Vec::new(), &mut |_| true)
    }

    fn all_solutions(&self, w: WorldId, g: Valuation, eta: Eta, graph: Rc<Semgraph>, root: VertexId) -> Vec<Valuation> {
        let mut out = BTreeSet::new();
        self.solve(w, g, vec![Goal::Visit { eta, graph, root }], Vec::new(), &mut |v| {
            out.insert(v.clone());
            false
        });
        out.into_iter().collect()
    }

    /// Depth-first search; `out` sees every complete valuation and returns
    /// true to stop. Returns true iff stopped.
    fn solve(
        &self,
        w: WorldId,
        mut g: Valuation,
        mut goals: Vec<Goal>,
        checks: Vec<Check>,
        out: &mut dyn FnMut(&Valuation) -> bool,
    ) -> bool {
        let Some(goal) = goals.pop() else {
            return checks.iter().all(|c| self.check(w, &g, c)) && out(&g);
        };
        let full = self.model.full_set();
        match goal {
            Goal::Define(v) => {
                if g.contains_key(&v) {
                    self.solve(w, g, goals, checks, out)
                } else {
                    self.branch(w, &g, v, &mut subsets_of(full), &goals, &checks, out)
                }
            }
            Goal::Unary { v, label } => {
                let EdgeLabel::Lexical(p) = &label else { return self.solve(w, g, goals, checks, out) };
                let ext = self.model.predicate(w, p);
                match g.get(&v) {
                    Some(&xv) => xv != 0 && xv & !ext == 0 && self.solve(w, g, goals, checks, out),
                    None => self.branch(w, &g, v, &mut subsets_of(ext).filter(|&s| s != 0), &goals, &checks, out),
                }
            }
            Goal::Binary { from, to, label } => {
                let (x, y) = (g.get(&from).copied(), g.get(&to).copied());
                match (x, y) {
                    (Some(a), Some(b)) => self.binary_holds(w, &label, a, b) && self.solve(w, g, goals, checks, out),
                    (Some(a), None) => {
                        let forced = match &label {
                            EdgeLabel::Equality => Some(a),
                            EdgeLabel::Thematic(r) => Some(self.model.relation_image(w, r, a)),
                            EdgeLabel::Cardinality => match self.cardinality(a) {
                                Some(c) => Some(c),
                                None => return false,
                            },
                            EdgeLabel::Membership => {
                                if a.count_ones() != 1 {
                                    return false;
                                }
                                let rest = full & !a;
                                return self.branch(w, &g, to, &mut subsets_of(rest).map(|s| s | a), &goals, &checks, out);
                            }
                            _ => None,
                        };
                        match forced {
                            Some(val) => {
                                g.insert(to, val);
                                self.solve(w, g, goals, checks, out)
                            }
                            None => self.solve(w, g, goals, checks, out),
                        }
                    }
                    (None, Some(b)) => {
                        let mut candidates: Box<dyn Iterator<Item = EntitySet>> = match &label {
                            EdgeLabel::Equality => Box::new(std::iter::once(b)),
                            EdgeLabel::Membership => Box::new(members(b).map(singleton)),
                            EdgeLabel::Cardinality => {
                                let n = self.model.numerals.iter().find(|(&e, _)| singleton(e) == b).map(|(_, &n)| n);
                                match n {
                                    Some(n) if n >= 0 => {
                                        Box::new(subsets_of(full).filter(move |s| s.count_ones() as i64 == n))
                                    }
                                    _ => return false,
                                }
                            }
                            EdgeLabel::Thematic(_) => Box::new(subsets_of(full)),
                            _ => return self.solve(w, g, goals, checks, out),
                        };
                        goals.push(Goal::Binary { from, to, label });
                        self.branch(w, &g, from, &mut candidates, &goals, &checks, out)
                    }
                    (None, None) => {
                        if matches!(label, EdgeLabel::Lambda) {
                            return self.solve(w, g, goals, checks, out);
                        }
                        goals.push(Goal::Binary { from, to, label });
                        self.branch(w, &g, from, &mut subsets_of(full), &goals, &checks, out)
                    }
                }
            }
            Goal::Union { x, parts } => {
                let xv = g[&x];
                // Value the parts one at a time within x, then check the union.
                match parts.iter().find(|p| !g.contains_key(p)) {
                    Some(&p) => {
                        goals.push(Goal::Union { x, parts });
                        self.branch(w, &g, p, &mut subsets_of(xv), &goals, &checks, out)
                    }
                    None => {
                        parts.iter().fold(0, |acc, p| acc | g[p]) == xv && self.solve(w, g, goals, checks, out)
                    }
                }
            }
            Goal::Visit { eta, graph, root } => self.visit(w, g, goals, checks, eta, graph, root, out),
        }
    }

    /// Continues the search once per candidate value of `v`.
    #[allow(clippy::too_many_arguments)]
    fn branch(
        &self,
        w: WorldId,
        g: &Valuation,
        v: VertexId,
        values: &mut dyn Iterator<Item = EntitySet>,
        goals: &[Goal],
        checks: &[Check],
        out: &mut dyn FnMut(&Valuation) -> bool,
    ) -> bool {
        for val in values {
            let mut h = g.clone();
            h.insert(v, val);
            if self.solve(w, h, goals.to_vec(), checks.to_vec(), out) {
                return true;
            }
        }
        false
    }

    #[allow(clippy::too_many_arguments)]
    fn visit(
        &self,
        w: WorldId,
        g: Valuation,
        mut goals: Vec<Goal>,
        mut checks: Vec<Check>,
        eta: Eta,
        graph: Rc<Semgraph>,
        x: VertexId,
        out: &mut dyn FnMut(&Valuation) -> bool,
    ) -> bool {
        if let Some((force, r, i, s)) = quantification_parts(&graph, x) {
            checks.push(Check::Quant { eta: eta.clone(), graph: graph.clone(), force, r, i, s });
            let restrictor = Rc::new(graph.reachable_subgraph(r).expect("restrictor in graph"));
            let with_r = |g: Valuation, goals: &Vec<Goal>, checks: &Vec<Check>, out: &mut dyn FnMut(&Valuation) -> bool| {
                let mut goals = goals.clone();
                if g[&r] != 0 {
                    goals.push(Goal::Visit { eta: eta.clone(), graph: restrictor.clone(), root: r });
                }
                self.solve(w, g, goals, checks.clone(), out)
            };
            if g.contains_key(&r) {
                return with_r(g, &goals, &checks, out);
            }
            for val in subsets_of(self.model.full_set()) {
                let mut h = g.clone();
                h.insert(r, val);
                if with_r(h, &goals, &checks, out) {
                    return true;
                }
            }
            return false;
        }
        let new_eta: Eta = Rc::new(eta.union(&bracket(&graph, x)).copied().collect());
        let conj = coordinates(&graph, x, &EdgeLabel::Inclusion);
        let disj = coordinates(&graph, x, &EdgeLabel::Choice);
        if !conj.is_empty() {
            let rest = graph.remove_edges(&graph.out_edges(x).unwrap()).unwrap();
            for &y in &conj {
                let sub = Rc::new(rest.reachable_subgraph(y).unwrap());
                checks.push(Check::Extend { eta: new_eta.clone(), graph: sub, root: y });
            }
            goals.push(Goal::Union { x, parts: conj });
            goals.push(Goal::Define(x));
            return self.solve(w, g, goals, checks, out);
        }
        if !disj.is_empty() {
            let rest = graph.remove_edges(&graph.out_edges(x).unwrap()).unwrap();
            for &y in &disj {
                let mut gs = goals.clone();
                gs.push(Goal::Visit { eta: new_eta.clone(), graph: Rc::new(rest.reachable_subgraph(y).unwrap()), root: y });
                gs.push(Goal::Binary { from: x, to: y, label: EdgeLabel::Equality });
                if self.solve(w, g.clone(), gs, checks.clone(), out) {
                    return true;
                }
            }
            return false;
        }
        let edges = suspended_out_edges(&graph, x);
        let rest = graph.remove_edges(&edges).unwrap();
        let mut visits = Vec::new();
        let mut constraints = Vec::new();
        for e in edges {
            match e {
                EdgeRef::Unary(v) => constraints.push(Goal::Unary { v, label: graph.unary(v).unwrap().clone() }),
                EdgeRef::Binary(a, b) => {
                    let label = graph.binary(a, b).unwrap().clone();
                    let sub = Rc::new(rest.reachable_subgraph(b).unwrap());
                    if label == EdgeLabel::Kappa {
                        constraints.push(Goal::Define(a));
                        checks.push(Check::Kappa { eta: new_eta.clone(), graph: sub, tail: a, head: b });
                    } else {
                        constraints.push(Goal::Binary { from: a, to: b, label });
                        visits.push(Goal::Visit { eta: new_eta.clone(), graph: sub, root: b });
                    }
                }
            }
        }
        // Stack order: constraints run before the visits they license.
        goals.extend(visits.into_iter().rev());
        goals.extend(constraints.into_iter().rev());
        self.solve(w, g, goals, checks, out)
    }

    fn check(&self, w: WorldId, g: &Valuation, c: &Check) -> bool {
        match c {
            Check::Extend { eta, graph, root } => self.exists(w, g.clone(), eta.clone(), graph.clone(), *root),
            Check::Kappa { eta, graph, tail, head } => members(g[tail]).all(|a| {
                let worlds = self.model.accessible(w, a);
                let ok = |&w2: &WorldId| self.exists(w2, g.clone(), eta.clone(), graph.clone(), *head);
                match self.model.force_of(a) {
                    Modal::All => worlds.iter().all(ok),
                    Modal::Some => worlds.iter().any(ok),
                }
            }),
            Check::Quant { eta, graph, force, r, i, s } => self.quantify(w, g, eta, graph, force, *r, *i, *s),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn quantify(&self, w: WorldId, g: &Valuation, eta: &Eta, graph: &Semgraph, force: &str, r: VertexId, i: VertexId, s: VertexId) -> bool {
        let spec = self.forces.get(force).expect("force checked up front");
        // (viii.a)
        let restrictor = graph.reachable_subgraph(r).unwrap();
        if !self.maximal(w, g, r, eta, &restrictor) {
            return false;
        }
        // (viii.b)
        let iter_g = graph.remove_edges(&graph.out_edges(r).unwrap()).unwrap().reachable_subgraph(i).unwrap();
        let scope_g = graph.remove_edges(&graph.out_edges(i).unwrap()).unwrap().reachable_subgraph(s).unwrap();
        let br = bracket(graph, r);
        let clash = iter_g
            .vertices()
            .iter()
            .chain(scope_g.vertices())
            .any(|v| !eta.contains(v) && !br.contains(v) && g.contains_key(v));
        if clash {
            return false;
        }
        // (viii.c)
        let eta_r: Eta = Rc::new(eta.union(&br).copied().collect());
        let eta_i: Eta = Rc::new(eta.union(&bracket(graph, i)).copied().collect());
        let iter_rc = Rc::new(iter_g);
        let scope_rc = Rc::new(scope_g);
        let sols = self.all_solutions(w, g.clone(), eta_r, iter_rc, i);
        let minimal: Vec<&Valuation> = sols
            .iter()
            .filter(|h| !sols.iter().any(|k| k != *h && k.len() < h.len() && k.iter().all(|(v, x)| h.get(v) == Some(x))))
            .collect();
        let extends = |h: &Valuation| self.exists(w, h.clone(), eta_i.clone(), scope_rc.clone(), s);
        match self.counting {
            Counting::Valuations => {
                let satisfied = minimal.iter().filter(|h| extends(h)).count();
                spec.holds(satisfied, minimal.len())
            }
            Counting::Classes => {
                let mut classes: BTreeMap<Option<EntitySet>, Vec<&Valuation>> = BTreeMap::new();
                for h in &minimal {
                    classes.entry(h.get(&i).copied()).or_default().push(h);
                }
                let satisfied = classes
                    .values()
                    .filter(|class| match spec.mode {
                        Modal::All => class.iter().all(|h| extends(h)),
                        Modal::Some => class.iter().any(|h| extends(h)),
                    })
                    .count();
                spec.holds(satisfied, classes.len())
            }
        }
    }
}
