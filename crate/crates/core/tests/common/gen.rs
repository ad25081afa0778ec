//! Random semgraphs and models, plus a brute-force reference interpreter for
//! graphs without quantification, coordination or intensional edges.

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

use semgraph::eval::{check_structures, ForceRegistry};
use semgraph::model::{EntitySet, Model};
use semgraph::{EdgeLabel, Semgraph, VertexId};

pub const PREDICATES: [&str; 3] = ["P", "Q", "R"];
pub const RELATIONS: [&str; 2] = ["ag", "th"];

fn plain_binary(rng: &mut StdRng) -> EdgeLabel {
    match rng.gen_range(0..6) {
        0 | 1 => EdgeLabel::theta(RELATIONS[rng.gen_range(0..2)]),
        2 => EdgeLabel::Equality,
        3 => EdgeLabel::Lambda,
        4 => EdgeLabel::Membership,
        _ => EdgeLabel::theta(RELATIONS[rng.gen_range(0..2)]),
    }
}

/// A uniquely rooted semgraph of at most `max_vertices` vertices using only
/// lexical, thematic, equality, λ and membership edges.
pub fn plain_graph(rng: &mut StdRng, max_vertices: usize) -> Semgraph {
    loop {
        let n = rng.gen_range(1..=max_vertices);
        let mut g = Semgraph::new();
        for _ in 0..n {
            g.add_vertex();
        }
        // A random tree from vertex 0 keeps everything reachable.
        for v in 1..n as VertexId {
            let parent = rng.gen_range(0..v);
            g.add_binary(parent, v, plain_binary(rng)).unwrap();
        }
        for _ in 0..rng.gen_range(0..=n) {
            let (a, b) = (rng.gen_range(0..n as VertexId), rng.gen_range(0..n as VertexId));
            let _ = g.add_binary(a, b, plain_binary(rng));
        }
        for v in 0..n as VertexId {
            if rng.gen_bool(0.5) {
                g.add_unary(v, EdgeLabel::lex(PREDICATES[rng.gen_range(0..3)])).unwrap();
            }
        }
        if g.unique_root().is_some() && check_structures(&g, &ForceRegistry::default()).is_ok() {
            return g;
        }
    }
}

/// A one-world model over `size` entities interpreting `PREDICATES` and
/// `RELATIONS` at random.
pub fn plain_model(rng: &mut StdRng, size: usize) -> Model {
    let names: Vec<String> = (0..size).map(|i| format!("e{i}")).collect();
    let mut m = Model::new(&names);
    let full: EntitySet = m.full_set();
    for p in PREDICATES {
        m.worlds[0].unary.insert(p.to_string(), rng.gen_range(0..=full));
    }
    for r in RELATIONS {
        for e in &names {
            if rng.gen_bool(0.6) {
                let set = rng.gen_range(1..=full);
                let who: Vec<&str> = names.iter().enumerate().filter(|(i, _)| set & (1 << i) != 0).map(|(_, n)| n.as_str()).collect();
                m.add_binary(0, r, e, &who).unwrap();
            }
        }
    }
    m
}

fn image(m: &Model, rel: &str, events: EntitySet) -> EntitySet {
    let Some(map) = m.worlds[0].binary.get(rel) else { return 0 };
    (0..m.domain_size()).filter(|e| events & (1 << e) != 0).filter_map(|e| map.get(&e)).fold(0, |a, s| a | s)
}

/// Edge clauses read straight off their definitions.
fn edge_holds(m: &Model, label: &EdgeLabel, x: EntitySet, y: EntitySet) -> bool {
    match label {
        EdgeLabel::Lambda => true,
        EdgeLabel::Equality => x == y,
        EdgeLabel::Membership => x.count_ones() == 1 && x & y == x,
        EdgeLabel::Thematic(r) => y == image(m, r, x),
        other => panic!("oracle does not handle {other:?}"),
    }
}

/// Is there a total valuation of every vertex satisfying every edge?
pub fn brute_force_truth(g: &Semgraph, m: &Model) -> bool {
    let verts: Vec<VertexId> = g.vertices().iter().copied().collect();
    let mut vals: Vec<Option<EntitySet>> = vec![None; verts.len()];
    let idx = |v: VertexId| verts.iter().position(|&u| u == v).unwrap();
    let unary: Vec<Option<EntitySet>> = verts
        .iter()
        .map(|&v| match g.unary(v) {
            Some(EdgeLabel::Lexical(p)) => Some(m.worlds[0].unary.get(p).copied().unwrap_or(0)),
            _ => None,
        })
        .collect();
    let edges: Vec<(usize, usize, EdgeLabel)> = g.binary_edges().map(|((a, b), l)| (idx(a), idx(b), l.clone())).collect();
    fn go(
        k: usize,
        vals: &mut Vec<Option<EntitySet>>,
        unary: &[Option<EntitySet>],
        edges: &[(usize, usize, EdgeLabel)],
        m: &Model,
    ) -> bool {
        if k == vals.len() {
            return true;
        }
        for val in 0..=m.full_set() {
            if let Some(ext) = unary[k] {
                if val == 0 || val & !ext != 0 {
                    continue;
                }
            }
            vals[k] = Some(val);
            let ok = edges.iter().all(|(a, b, l)| match (vals[*a], vals[*b]) {
                (Some(x), Some(y)) if *a == k || *b == k => edge_holds(m, l, x, y),
                _ => true,
            });
            if ok && go(k + 1, vals, unary, edges, m) {
                vals[k] = None;
                return true;
            }
        }
        vals[k] = None;
        false
    }
    go(0, &mut vals, &unary, &edges, m)
}

/// A graph with sources drawn from `0..labels`, for algebraic laws.
pub fn sourced_graph(rng: &mut StdRng, labels: i64) -> Semgraph {
    let n = rng.gen_range(1..=5);
    let mut g = Semgraph::new();
    for _ in 0..n {
        g.add_vertex();
    }
    let mut pool: Vec<i64> = (0..labels).collect();
    pool.shuffle(rng);
    for v in 0..n as VertexId {
        if rng.gen_bool(0.6) {
            if let Some(s) = pool.pop() {
                g.set_source(v, s).unwrap();
            }
        }
    }
    for _ in 0..rng.gen_range(0..=n + 1) {
        let (a, b) = (rng.gen_range(0..n as VertexId), rng.gen_range(0..n as VertexId));
        let label = match rng.gen_range(0..4) {
            0 => EdgeLabel::Lambda,
            1 => EdgeLabel::Equality,
            _ => EdgeLabel::theta(RELATIONS[rng.gen_range(0..2)]),
        };
        let _ = g.add_binary(a, b, label);
    }
    for v in 0..n as VertexId {
        if rng.gen_bool(0.3) {
            g.add_unary(v, EdgeLabel::lex(PREDICATES[rng.gen_range(0..2)])).unwrap();
        }
    }
    g
}

/// Edgeless graph carrying exactly the given sources.
pub fn all_source_identity(sources: impl IntoIterator<Item = i64>) -> Semgraph {
    let mut g = Semgraph::new();
    for s in sources {
        let v = g.add_vertex();
        g.set_source(v, s).unwrap();
    }
    g
}

/// Both fail, or both succeed with isomorphic results.
pub fn same_outcome(a: &semgraph::Result<Semgraph>, b: &semgraph::Result<Semgraph>) -> bool {
    match (a, b) {
        (Ok(x), Ok(y)) => x.is_isomorphic(y),
        (Err(_), Err(_)) => true,
        _ => false,
    }
}
