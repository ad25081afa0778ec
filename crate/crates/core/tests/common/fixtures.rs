//! Hand-built semgraphs for the worked examples, finite models around them,
//! and first-order restatements of their intended truth conditions.

use rand::rngs::StdRng;
use rand::Rng;

use semgraph::model::{members, EntitySet, Model, WorldId};
use semgraph::{EdgeLabel, GraphBuilder, Semgraph};

/// Every boy sailed.
pub fn every_boy_sailed() -> Semgraph {
    let mut b = GraphBuilder::new();
    b.unary("q", EdgeLabel::force("all"))
        .edge("q", EdgeLabel::Rho, "r")
        .edge("q", EdgeLabel::Iota, "i")
        .edge("q", EdgeLabel::Sigma, "s")
        .lex("r", "boy")
        .edge("i", EdgeLabel::Membership, "r")
        .lex("s", "sail")
        .theta("s", "ag", "i");
    b.build()
}

/// If a boy walks a dog, he feeds it: the walking is the iterator, drawn
/// from an anonymous restrictor.
pub fn donkey() -> Semgraph {
    let mut b = GraphBuilder::new();
    b.unary("q", EdgeLabel::force("all"))
        .edge("q", EdgeLabel::Rho, "z")
        .edge("q", EdgeLabel::Iota, "v1")
        .edge("q", EdgeLabel::Sigma, "v2")
        .edge("v1", EdgeLabel::Membership, "z")
        .lex("v1", "walk")
        .theta("v1", "ag", "x1")
        .theta("v1", "th", "y1")
        .lex("x1", "boy")
        .lex("y1", "dog")
        .edge("x1", EdgeLabel::Equality, "x2")
        .edge("y1", EdgeLabel::Equality, "y2")
        .lex("v2", "feed")
        .theta("v2", "ag", "x2")
        .theta("v2", "th", "y2");
    b.build()
}

/// Most boys who gazed at a star sailed.
pub fn most_stargazers_sailed() -> Semgraph {
    let mut b = GraphBuilder::new();
    b.unary("q", EdgeLabel::force("most"))
        .edge("q", EdgeLabel::Rho, "r")
        .edge("q", EdgeLabel::Iota, "i")
        .edge("q", EdgeLabel::Sigma, "s")
        .lex("r", "boy")
        .edge("i", EdgeLabel::Membership, "r")
        .edge("i", EdgeLabel::Lambda, "v")
        .lex("v", "gaze")
        .theta("v", "ag", "i")
        .theta("v", "th", "y")
        .lex("y", "star")
        .lex("s", "sail")
        .theta("s", "ag", "i");
    b.build()
}

/// One boy gazed at three stars and sailed; two others gazed at one star
/// each and stayed ashore.
pub fn proportion_model() -> Model {
    let mut m = Model::new(&["b1", "b2", "b3", "s1", "s2", "s3", "g1", "g2", "g3", "g4", "g5", "e"]);
    m.add_unary(0, "boy", &["b1", "b2", "b3"]).unwrap();
    m.add_unary(0, "star", &["s1", "s2", "s3"]).unwrap();
    m.add_unary(0, "gaze", &["g1", "g2", "g3", "g4", "g5"]).unwrap();
    for (g, who, what) in [("g1", "b1", "s1"), ("g2", "b1", "s2"), ("g3", "b1", "s3"), ("g4", "b2", "s1"), ("g5", "b3", "s2")] {
        m.add_binary(0, "ag", g, &[who]).unwrap();
        m.add_binary(0, "th", g, &[what]).unwrap();
    }
    m.add_unary(0, "sail", &["e"]).unwrap();
    m.add_binary(0, "ag", "e", &["b1"]).unwrap();
    m
}

/// Ben thought Joe walked a dog; `wide` adds the λ-edge scoping the dog
/// over the thinking.
pub fn thought_walked_a_dog(wide: bool) -> Semgraph {
    let mut b = GraphBuilder::new();
    b.lex("v1", "think")
        .theta("v1", "ag", "x")
        .lex("x", "Ben")
        .edge("v1", EdgeLabel::Kappa, "v2")
        .lex("v2", "walk")
        .theta("v2", "ag", "j")
        .lex("j", "Joe")
        .theta("v2", "th", "y")
        .lex("y", "dog");
    if wide {
        b.edge("y", EdgeLabel::Lambda, "v1");
    }
    b.build()
}

/// Every boy walked a dog.
pub fn every_boy_walked_a_dog(wide: bool) -> Semgraph {
    let mut b = GraphBuilder::new();
    b.unary("q", EdgeLabel::force("all"))
        .edge("q", EdgeLabel::Rho, "r")
        .edge("q", EdgeLabel::Iota, "i")
        .edge("q", EdgeLabel::Sigma, "s")
        .lex("r", "boy")
        .edge("i", EdgeLabel::Membership, "r")
        .lex("s", "walk")
        .theta("s", "ag", "i")
        .theta("s", "th", "y")
        .lex("y", "dog");
    if wide {
        b.edge("y", EdgeLabel::Lambda, "q");
    }
    b.build()
}

/// Joe walked and Ben fed a dog; each conjunct's theme equals the shared
/// object.
pub fn walked_and_fed_a_dog(wide: bool) -> Semgraph {
    let mut b = GraphBuilder::new();
    b.edge("c", EdgeLabel::Inclusion, "v1")
        .edge("c", EdgeLabel::Inclusion, "v2")
        .lex("v1", "walk")
        .theta("v1", "ag", "j")
        .lex("j", "Joe")
        .theta("v1", "th", "a")
        .edge("a", EdgeLabel::Equality, "y")
        .lex("v2", "feed")
        .theta("v2", "ag", "k")
        .lex("k", "Ben")
        .theta("v2", "th", "b")
        .edge("b", EdgeLabel::Equality, "y")
        .lex("y", "dog");
    if wide {
        b.edge("y", EdgeLabel::Lambda, "c");
    }
    b.build()
}

/// Joe didn't walk a dog and it barked (negation as "no" over an anonymous
/// restrictor).
pub fn didnt_walk_a_dog_and_it_barked(wide: bool) -> Semgraph {
    let mut b = GraphBuilder::new();
    b.edge("c", EdgeLabel::Inclusion, "q")
        .edge("c", EdgeLabel::Inclusion, "v")
        .unary("q", EdgeLabel::force("no"))
        .edge("q", EdgeLabel::Rho, "r")
        .edge("q", EdgeLabel::Iota, "i")
        .edge("q", EdgeLabel::Sigma, "s")
        .edge("i", EdgeLabel::Membership, "r")
        .lex("s", "walk")
        .theta("s", "ag", "j")
        .lex("j", "Joe")
        .theta("s", "th", "x")
        .lex("x", "dog")
        .edge("x", EdgeLabel::Equality, "z")
        .lex("v", "bark")
        .theta("v", "ag", "z");
    if wide {
        b.edge("x", EdgeLabel::Lambda, "c");
    }
    b.build()
}

/// Every graduate with most skills applied, with the continuation layer of
/// the universal placed above that of "most" (surface linking).
pub fn surface_linking() -> Semgraph {
    let mut b = GraphBuilder::new();
    b.unary("q1", EdgeLabel::force("all"))
        .edge("q1", EdgeLabel::Rho, "r1")
        .edge("q1", EdgeLabel::Iota, "i1")
        .edge("q1", EdgeLabel::Sigma, "q2")
        .lex("r1", "graduate")
        .edge("i1", EdgeLabel::Membership, "r1")
        .edge("i1", EdgeLabel::Lambda, "o")
        .lex("o", "with")
        .theta("o", "ag", "i1")
        .theta("o", "th", "i2")
        .unary("q2", EdgeLabel::force("most"))
        .edge("q2", EdgeLabel::Rho, "r2")
        .edge("q2", EdgeLabel::Iota, "i2")
        .edge("q2", EdgeLabel::Sigma, "a")
        .lex("r2", "skill")
        .edge("i2", EdgeLabel::Membership, "r2")
        .lex("a", "apply")
        .theta("a", "ag", "i1");
    b.build()
}

// ---------------------------------------------------------------------------
// Random models with individuals and events kept apart.

pub struct Sorted {
    pub model: Model,
    pub individuals: Vec<usize>,
    pub events: Vec<usize>,
}

/// `ni` individuals and `ne` events over `worlds` worlds. Individual and
/// event predicates get random extensions per world; every relation gives
/// each event at most one participant.
pub fn sorted_model(
    rng: &mut StdRng,
    ni: usize,
    ne: usize,
    worlds: usize,
    ind_preds: &[&str],
    ev_preds: &[&str],
    rels: &[&str],
) -> Sorted {
    let names: Vec<String> = (0..ni).map(|i| format!("x{i}")).chain((0..ne).map(|i| format!("e{i}"))).collect();
    let mut m = Model::new(&names);
    for w in 1..worlds {
        m.add_world(&format!("w{w}"));
    }
    let individuals: Vec<usize> = (0..ni).collect();
    let events: Vec<usize> = (ni..ni + ne).collect();
    for w in 0..worlds {
        for p in ind_preds {
            let set = individuals.iter().filter(|_| rng.gen_bool(0.5)).fold(0, |a, &e| a | 1 << e);
            m.worlds[w].unary.insert(p.to_string(), set);
        }
        for p in ev_preds {
            let set = events.iter().filter(|_| rng.gen_bool(0.6)).fold(0, |a, &e| a | 1 << e);
            m.worlds[w].unary.insert(p.to_string(), set);
        }
        for r in rels {
            for &e in &events {
                if rng.gen_bool(0.85) {
                    let who = individuals[rng.gen_range(0..ni)];
                    m.worlds[w].binary.entry(r.to_string()).or_default().insert(e, 1 << who);
                }
            }
        }
    }
    Sorted { model: m, individuals, events }
}

pub fn ext(m: &Model, w: WorldId, p: &str) -> EntitySet {
    m.predicate(w, p)
}

pub fn role(m: &Model, w: WorldId, r: &str, e: usize) -> EntitySet {
    m.relation_image(w, r, 1 << e)
}

pub fn has(set: EntitySet, e: usize) -> bool {
    set & (1 << e) != 0
}

/// Nonempty subsets of `set`.
pub fn nonempty_subsets(set: EntitySet) -> Vec<EntitySet> {
    let items: Vec<usize> = members(set).collect();
    (1..1u64 << items.len()).map(|bits| items.iter().enumerate().filter(|(k, _)| bits & (1 << k) != 0).fold(0, |a, (_, &e)| a | 1 << e)).collect()
}

/// ⋃ R(a) over a set of events.
pub fn image(m: &Model, w: WorldId, r: &str, events: EntitySet) -> EntitySet {
    m.relation_image(w, r, events)
}
