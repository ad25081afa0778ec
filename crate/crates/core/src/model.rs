//! Finite possible-worlds models. Entities are indexed `0..n` and entity sets
//! are bitmasks, so domains are capped at 64 entities.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Entity = usize;
pub type EntitySet = u64;
pub type WorldId = usize;

pub const MAX_DOMAIN: usize = 64;

/// Quantificational force of an intensional state over its accessible worlds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modal {
    All,
    Some,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct World {
    pub name: String,
    pub unary: HashMap<String, EntitySet>,
    /// relation → event → participants (never empty).
    pub binary: HashMap<String, HashMap<Entity, EntitySet>>,
    pub access: HashMap<Entity, Vec<WorldId>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    pub entities: Vec<String>,
    pub numerals: HashMap<Entity, i64>,
    pub worlds: Vec<World>,
    pub force: HashMap<Entity, Modal>,
    pub reference_world: WorldId,
}

pub fn members(set: EntitySet) -> impl Iterator<Item = Entity> {
    (0..MAX_DOMAIN).filter(move |&e| set & (1 << e) != 0)
}

pub fn singleton(e: Entity) -> EntitySet {
    1 << e
}

impl Model {
    /// A one-world model over the named entities with nothing in it.
    pub fn new<S: AsRef<str>>(entities: &[S]) -> Self {
        Model {
            entities: entities.iter().map(|e| e.as_ref().to_string()).collect(),
            numerals: HashMap::new(),
            worlds: vec![World { name: "w0".into(), ..World::default() }],
            force: HashMap::new(),
            reference_world: 0,
        }
    }

    pub fn domain_size(&self) -> usize {
        self.entities.len()
    }

    pub fn full_set(&self) -> EntitySet {
        if self.entities.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.entities.len()) - 1
        }
    }

    pub fn entity(&self, name: &str) -> Result<Entity> {
        self.entities
            .iter()
            .position(|e| e == name)
            .ok_or_else(|| Error::Model(format!("unknown entity `{name}`")))
    }

    pub fn world(&self, name: &str) -> Result<WorldId> {
        self.worlds
            .iter()
            .position(|w| w.name == name)
            .ok_or_else(|| Error::Model(format!("unknown world `{name}`")))
    }

    pub fn add_world(&mut self, name: &str) -> WorldId {
        self.worlds.push(World { name: name.to_string(), ..World::default() });
        self.worlds.len() - 1
    }

    pub fn set_of(&self, names: &[&str]) -> Result<EntitySet> {
        names.iter().try_fold(0, |acc, n| Ok(acc | singleton(self.entity(n)?)))
    }

    /// Adds entities to a predicate's extension at a world.
    pub fn add_unary(&mut self, w: WorldId, pred: &str, names: &[&str]) -> Result<()> {
        let set = self.set_of(names)?;
        *self.worlds[w].unary.entry(pred.to_string()).or_default() |= set;
        Ok(())
    }

    pub fn add_binary(&mut self, w: WorldId, rel: &str, event: &str, participants: &[&str]) -> Result<()> {
        let e = self.entity(event)?;
        let set = self.set_of(participants)?;
        if set == 0 {
            return Err(Error::Model(format!("{rel}({event}) must be nonempty")));
        }
        self.worlds[w].binary.entry(rel.to_string()).or_default().insert(e, set);
        Ok(())
    }

    pub fn add_access(&mut self, w: WorldId, state: &str, to: &[WorldId]) -> Result<()> {
        let e = self.entity(state)?;
        self.worlds[w].access.entry(e).or_default().extend_from_slice(to);
        Ok(())
    }

    pub fn set_numeral(&mut self, name: &str, value: i64) -> Result<()> {
        let e = self.entity(name)?;
        self.numerals.insert(e, value);
        Ok(())
    }

    /// P_w. A predicate named by an integer denotes its numeral entity.
    pub fn predicate(&self, w: WorldId, pred: &str) -> EntitySet {
        if let Some(&s) = self.worlds[w].unary.get(pred) {
            return s;
        }
        match pred.parse::<i64>() {
            Ok(n) => self.numeral_entity(n).map_or(0, singleton),
            Err(_) => 0,
        }
    }

    /// ⋃_{a ∈ events} R_w(a).
    pub fn relation_image(&self, w: WorldId, rel: &str, events: EntitySet) -> EntitySet {
        let Some(map) = self.worlds[w].binary.get(rel) else { return 0 };
        members(events).filter_map(|a| map.get(&a)).fold(0, |acc, s| acc | s)
    }

    pub fn numeral_entity(&self, n: i64) -> Option<Entity> {
        let mut found: Vec<Entity> = self.numerals.iter().filter(|(_, &v)| v == n).map(|(&e, _)| e).collect();
        found.sort();
        found.first().copied()
    }

    pub fn accessible(&self, w: WorldId, state: Entity) -> &[WorldId] {
        self.worlds[w].access.get(&state).map_or(&[], |v| v.as_slice())
    }

    pub fn force_of(&self, state: Entity) -> Modal {
        self.force.get(&state).copied().unwrap_or(Modal::All)
    }

    pub fn describe(&self, set: EntitySet) -> String {
        let names: Vec<&str> = members(set).map(|e| self.entities[e].as_str()).collect();
        format!("{{{}}}", names.join(","))
    }

    pub fn from_json_str(text: &str) -> Result<Model> {
        let j: ModelJson = serde_json::from_str(text)?;
        j.try_into()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let name = |e: &Entity| self.entities[*e].clone();
        let names = |s: EntitySet| members(s).map(|e| self.entities[e].clone()).collect::<Vec<_>>();
        let worlds = self
            .worlds
            .iter()
            .map(|w| {
                let wj = WorldJson {
                    unary: w.unary.iter().map(|(p, &s)| (p.clone(), names(s))).collect(),
                    binary: w
                        .binary
                        .iter()
                        .map(|(r, m)| (r.clone(), m.iter().map(|(e, &s)| (name(e), names(s))).collect()))
                        .collect(),
                    access: w
                        .access
                        .iter()
                        .map(|(e, ws)| (name(e), ws.iter().map(|&v| self.worlds[v].name.clone()).collect()))
                        .collect(),
                };
                (w.name.clone(), wj)
            })
            .collect();
        serde_json::to_value(ModelJson {
            domain: self.entities.clone(),
            numerals: self.numerals.iter().map(|(e, &n)| (name(e), n)).collect(),
            worlds,
            force: self.force.iter().map(|(e, &m)| (name(e), m)).collect(),
            reference_world: self.worlds[self.reference_world].name.clone(),
        })
        .expect("model serializes")
    }
}

#[derive(Serialize, Deserialize, Default)]
struct WorldJson {
    #[serde(default)]
    unary: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    binary: BTreeMap<String, BTreeMap<String, Vec<String>>>,
    #[serde(default)]
    access: BTreeMap<String, Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct ModelJson {
    domain: Vec<String>,
    #[serde(default)]
    numerals: BTreeMap<String, i64>,
    worlds: BTreeMap<String, WorldJson>,
    #[serde(default)]
    force: BTreeMap<String, Modal>,
    reference_world: String,
}

impl TryFrom<ModelJson> for Model {
    type Error = Error;

    fn try_from(j: ModelJson) -> Result<Model> {
        if j.domain.len() > MAX_DOMAIN {
            return Err(Error::Model(format!("domain larger than {MAX_DOMAIN}")));
        }
        let mut m = Model {
            entities: j.domain,
            numerals: HashMap::new(),
            worlds: Vec::new(),
            force: HashMap::new(),
            reference_world: 0,
        };
        for name in j.worlds.keys() {
            m.add_world(name);
        }
        for (n, v) in &j.numerals {
            m.set_numeral(n, *v)?;
        }
        for (wname, wj) in &j.worlds {
            let w = m.world(wname)?;
            for (p, es) in &wj.unary {
                let es: Vec<&str> = es.iter().map(String::as_str).collect();
                m.add_unary(w, p, &es)?;
            }
            for (r, events) in &wj.binary {
                for (e, ps) in events {
                    let ps: Vec<&str> = ps.iter().map(String::as_str).collect();
                    m.add_binary(w, r, e, &ps)?;
                }
            }
            for (e, ws) in &wj.access {
                let ws = ws.iter().map(|x| m.world(x)).collect::<Result<Vec<_>>>()?;
                m.add_access(w, e, &ws)?;
            }
        }
        for (e, f) in j.force {
            let e = m.entity(&e)?;
            m.force.insert(e, f);
        }
        m.reference_world = m.world(&j.reference_world)?;
        Ok(m)
    }
}
