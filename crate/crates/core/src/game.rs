//! Conversion/preference games and the change-of-mind relation.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::relation::Relation;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AgentId(pub String);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SituationId(pub String);

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for SituationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for AgentId {
    fn from(s: &str) -> Self {
        AgentId(s.to_owned())
    }
}

impl From<&str> for SituationId {
    fn from(s: &str) -> Self {
        SituationId(s.to_owned())
    }
}

/// A set of situations, ordered by name.
pub type SituationSet = BTreeSet<SituationId>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("game has no agents")]
    NoAgents,
    #[error("game has no situations")]
    NoSituations,
    #[error("empty agent name")]
    EmptyAgentName,
    #[error("empty situation name")]
    EmptySituationName,
    #[error("duplicate agent `{0}`")]
    DuplicateAgent(String),
    #[error("duplicate situation `{0}`")]
    DuplicateSituation(String),
    #[error("unknown agent `{0}`")]
    UnknownAgent(String),
    #[error(
        "unknown situation `{situation}` in {relation} pair ({from}, {to}) of agent `{agent}`"
    )]
    UnknownSituationInPair {
        relation: &'static str,
        agent: String,
        from: String,
        to: String,
        situation: String,
    },
    #[error("unknown situation `{0}`")]
    UnknownSituation(String),
    #[error("{relation} map is missing agent `{agent}`")]
    MissingAgentKey {
        relation: &'static str,
        agent: String,
    },
    #[error("{relation} map has undeclared agent `{agent}`")]
    ExtraAgentKey {
        relation: &'static str,
        agent: String,
    },
    #[error("{agents} agents but {conversion} conversion and {preference} preference relations")]
    RelationCount {
        agents: usize,
        conversion: usize,
        preference: usize,
    },
    #[error("games have different situation sets")]
    SituationMismatch,
}

/// Name-level description of a game: the form games are written and read in.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameSpec {
    pub agents: Vec<String>,
    pub situations: Vec<String>,
    pub conversion: BTreeMap<String, Vec<(String, String)>>,
    pub preference: BTreeMap<String, Vec<(String, String)>>,
}

/// A validated finite CP game.
///
/// Situations and agents are addressed by their position in declaration
/// order; relations hold those positions.
#[derive(Clone, Debug)]
pub struct CpGame {
    agents: Vec<AgentId>,
    situations: Vec<SituationId>,
    conversion: Vec<Relation>,
    preference: Vec<Relation>,
    situation_index: HashMap<SituationId, usize>,
}

impl CpGame {
    /// Validates names and relations. Duplicate pairs collapse; no closure is
    /// applied to any relation.
    pub fn build(spec: &GameSpec) -> Result<CpGame, GameError> {
        if spec.agents.is_empty() {
            return Err(GameError::NoAgents);
        }
        if spec.situations.is_empty() {
            return Err(GameError::NoSituations);
        }
        let mut agent_index = HashMap::new();
        for (i, a) in spec.agents.iter().enumerate() {
            if a.is_empty() {
                return Err(GameError::EmptyAgentName);
            }
            if agent_index.insert(a.as_str(), i).is_some() {
                return Err(GameError::DuplicateAgent(a.clone()));
            }
        }
        let mut situation_index = HashMap::new();
        for (i, s) in spec.situations.iter().enumerate() {
            if s.is_empty() {
                return Err(GameError::EmptySituationName);
            }
            if situation_index.insert(SituationId(s.clone()), i).is_some() {
                return Err(GameError::DuplicateSituation(s.clone()));
            }
        }

        let resolve = |relation: &'static str,
                       map: &BTreeMap<String, Vec<(String, String)>>|
         -> Result<Vec<Relation>, GameError> {
            for key in map.keys() {
                if !agent_index.contains_key(key.as_str()) {
                    return Err(GameError::ExtraAgentKey {
                        relation,
                        agent: key.clone(),
                    });
                }
            }
            let mut out = Vec::with_capacity(spec.agents.len());
            for agent in &spec.agents {
                let pairs = map.get(agent).ok_or_else(|| GameError::MissingAgentKey {
                    relation,
                    agent: agent.clone(),
                })?;
                let mut rel = Relation::new();
                for (from, to) in pairs {
                    let lookup = |name: &String| {
                        situation_index
                            .get(&SituationId(name.clone()))
                            .copied()
                            .ok_or_else(|| GameError::UnknownSituationInPair {
                                relation,
                                agent: agent.clone(),
                                from: from.clone(),
                                to: to.clone(),
                                situation: name.clone(),
                            })
                    };
                    rel.insert(lookup(from)?, lookup(to)?);
                }
                out.push(rel);
            }
            Ok(out)
        };
        let conversion = resolve("conversion", &spec.conversion)?;
        let preference = resolve("preference", &spec.preference)?;

        Ok(CpGame {
            agents: spec.agents.iter().map(|a| AgentId(a.clone())).collect(),
            situations: spec
                .situations
                .iter()
                .map(|s| SituationId(s.clone()))
                .collect(),
            conversion,
            preference,
            situation_index,
        })
    }

    /// Builds from index-level relations, one per agent in order. Used by
    /// generators that already hold situation indices.
    pub fn from_relations(
        agents: Vec<AgentId>,
        situations: Vec<SituationId>,
        conversion: Vec<Relation>,
        preference: Vec<Relation>,
    ) -> Result<CpGame, GameError> {
        let empty: BTreeMap<String, Vec<(String, String)>> =
            agents.iter().map(|a| (a.0.clone(), Vec::new())).collect();
        let mut game = CpGame::build(&GameSpec {
            agents: agents.iter().map(|a| a.0.clone()).collect(),
            situations: situations.iter().map(|s| s.0.clone()).collect(),
            conversion: empty.clone(),
            preference: empty,
        })?;
        if conversion.len() != agents.len() || preference.len() != agents.len() {
            return Err(GameError::RelationCount {
                agents: agents.len(),
                conversion: conversion.len(),
                preference: preference.len(),
            });
        }
        let n = situations.len();
        for rel in conversion.iter().chain(&preference) {
            if let Some((a, b)) = rel.iter().find(|&(a, b)| a >= n || b >= n) {
                return Err(GameError::UnknownSituation(format!("#{}", a.max(b))));
            }
        }
        game.conversion = conversion;
        game.preference = preference;
        Ok(game)
    }

    pub fn to_spec(&self) -> GameSpec {
        let named = |rels: &[Relation]| {
            self.agents
                .iter()
                .zip(rels)
                .map(|(a, r)| {
                    let pairs = r
                        .iter()
                        .map(|(x, y)| (self.situations[x].0.clone(), self.situations[y].0.clone()))
                        .collect();
                    (a.0.clone(), pairs)
                })
                .collect()
        };
        GameSpec {
            agents: self.agents.iter().map(|a| a.0.clone()).collect(),
            situations: self.situations.iter().map(|s| s.0.clone()).collect(),
            conversion: named(&self.conversion),
            preference: named(&self.preference),
        }
    }

    pub fn agents(&self) -> &[AgentId] {
        &self.agents
    }

    pub fn situations(&self) -> &[SituationId] {
        &self.situations
    }

    pub fn num_situations(&self) -> usize {
        self.situations.len()
    }

    pub fn situation_index(&self, s: &SituationId) -> Result<usize, GameError> {
        self.situation_index
            .get(s)
            .copied()
            .ok_or_else(|| GameError::UnknownSituation(s.0.clone()))
    }

    pub fn agent_index(&self, a: &AgentId) -> Result<usize, GameError> {
        self.agents
            .iter()
            .position(|x| x == a)
            .ok_or_else(|| GameError::UnknownAgent(a.0.clone()))
    }

    pub fn conversion(&self, agent: usize) -> &Relation {
        &self.conversion[agent]
    }

    pub fn preference(&self, agent: usize) -> &Relation {
        &self.preference[agent]
    }

    /// Replaces every preference relation by its transitive closure.
    pub fn with_transitive_preferences(&self) -> CpGame {
        CpGame {
            preference: self
                .preference
                .iter()
                .map(Relation::close_transitive)
                .collect(),
            ..self.clone()
        }
    }

    pub fn names_of(&self, members: impl IntoIterator<Item = usize>) -> SituationSet {
        members
            .into_iter()
            .map(|i| self.situations[i].clone())
            .collect()
    }

    pub fn indices_of<'a>(
        &self,
        set: impl IntoIterator<Item = &'a SituationId>,
    ) -> Result<Vec<usize>, GameError> {
        set.into_iter().map(|s| self.situation_index(s)).collect()
    }

    /// Change of mind of agent `a` by index: conversion ∩ preference.
    pub fn change_of_mind_of(&self, agent: usize) -> Relation {
        self.conversion[agent].intersection(&self.preference[agent])
    }

    pub fn change_of_mind_agent(&self, agent: &AgentId) -> Result<Relation, GameError> {
        Ok(self.change_of_mind_of(self.agent_index(agent)?))
    }

    /// Union of the agents' changes of mind.
    pub fn change_of_mind(&self) -> Relation {
        let mut com = Relation::new();
        for a in 0..self.agents.len() {
            com.extend(self.change_of_mind_of(a).iter());
        }
        com
    }

    /// True iff no agent can convert `s` into a situation it prefers,
    /// `s` itself included.
    pub fn is_abstract_nash(&self, s: &SituationId) -> Result<bool, GameError> {
        let i = self.situation_index(s)?;
        Ok(self.is_abstract_nash_ix(i))
    }

    pub fn is_abstract_nash_ix(&self, s: usize) -> bool {
        (0..self.agents.len()).all(|a| {
            self.conversion[a]
                .iter()
                .filter(|&(from, _)| from == s)
                .all(|(_, to)| !self.preference[a].contains(s, to))
        })
    }

    /// Whether two games over the same situations share their change of mind.
    pub fn com_equivalent(&self, other: &CpGame) -> Result<bool, GameError> {
        let mine: BTreeSet<_> = self.situations.iter().collect();
        let theirs: BTreeSet<_> = other.situations.iter().collect();
        if mine != theirs {
            return Err(GameError::SituationMismatch);
        }
        let named = |g: &CpGame| -> BTreeSet<(SituationId, SituationId)> {
            g.change_of_mind()
                .iter()
                .map(|(a, b)| (g.situations[a].clone(), g.situations[b].clone()))
                .collect()
        };
        Ok(named(self) == named(other))
    }
}

/// Free-function form of [`CpGame::build`].
pub fn build_game(spec: &GameSpec) -> Result<CpGame, GameError> {
    CpGame::build(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(v: &[(&str, &str)]) -> Vec<(String, String)> {
        v.iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    }

    fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn pd_spec() -> GameSpec {
        let sits = ["Q,Q", "Q,F", "F,Q", "F,F"];
        let conv_a = pairs(&[
            ("Q,Q", "F,Q"),
            ("F,Q", "Q,Q"),
            ("Q,F", "F,F"),
            ("F,F", "Q,F"),
        ]);
        let conv_b = pairs(&[
            ("Q,Q", "Q,F"),
            ("Q,F", "Q,Q"),
            ("F,Q", "F,F"),
            ("F,F", "F,Q"),
        ]);
        let pref_a = pairs(&[
            ("Q,F", "Q,Q"),
            ("Q,F", "F,Q"),
            ("Q,F", "F,F"),
            ("F,F", "Q,Q"),
            ("F,F", "F,Q"),
            ("Q,Q", "F,Q"),
        ]);
        let pref_b = pairs(&[
            ("F,Q", "Q,Q"),
            ("F,Q", "Q,F"),
            ("F,Q", "F,F"),
            ("F,F", "Q,Q"),
            ("F,F", "Q,F"),
            ("Q,Q", "Q,F"),
        ]);
        GameSpec {
            agents: strings(&["A", "B"]),
            situations: strings(&sits),
            conversion: [("A".to_string(), conv_a), ("B".to_string(), conv_b)].into(),
            preference: [("A".to_string(), pref_a), ("B".to_string(), pref_b)].into(),
        }
    }

    fn com_names(g: &CpGame, r: &Relation) -> BTreeSet<(String, String)> {
        r.iter()
            .map(|(a, b)| (g.situations()[a].0.clone(), g.situations()[b].0.clone()))
            .collect()
    }

    #[test]
    fn smallest_game_has_empty_com() {
        let spec = GameSpec {
            agents: strings(&["A", "B"]),
            situations: strings(&["s"]),
            conversion: [("A".into(), vec![]), ("B".into(), vec![])].into(),
            preference: [("A".into(), vec![]), ("B".into(), vec![])].into(),
        };
        let g = CpGame::build(&spec).unwrap();
        assert!(g.change_of_mind().is_empty());
        assert!(g.is_abstract_nash(&"s".into()).unwrap());
    }

    #[test]
    fn pd_change_of_mind() {
        let g = CpGame::build(&pd_spec()).unwrap();
        let com_a = g.change_of_mind_agent(&"A".into()).unwrap();
        assert!(com_a.contains(0, 2)); // (Q,Q) -> (F,Q)
        let expected: BTreeSet<(String, String)> = [
            ("Q,Q", "Q,F"),
            ("Q,Q", "F,Q"),
            ("F,Q", "F,F"),
            ("Q,F", "F,F"),
        ]
        .iter()
        .map(|(a, b)| (a.to_string(), b.to_string()))
        .collect();
        assert_eq!(com_names(&g, &g.change_of_mind()), expected);
        assert!(g.is_abstract_nash(&"F,F".into()).unwrap());
        assert!(!g.is_abstract_nash(&"Q,Q".into()).unwrap());
    }

    #[test]
    fn unknown_situation_in_pair() {
        let mut spec = pd_spec();
        spec.conversion
            .get_mut("A")
            .unwrap()
            .push(("X".into(), "Q,Q".into()));
        let err = CpGame::build(&spec).unwrap_err();
        assert!(
            matches!(err, GameError::UnknownSituationInPair { ref situation, .. } if situation == "X")
        );
        assert!(err.to_string().contains("unknown situation"));
    }

    #[test]
    fn validation_errors() {
        let mut spec = pd_spec();
        spec.agents.push("A".into());
        assert_eq!(
            CpGame::build(&spec).unwrap_err(),
            GameError::DuplicateAgent("A".into())
        );

        let mut spec = pd_spec();
        spec.situations.push("Q,Q".into());
        assert_eq!(
            CpGame::build(&spec).unwrap_err(),
            GameError::DuplicateSituation("Q,Q".into())
        );

        let mut spec = pd_spec();
        spec.preference.remove("B");
        assert!(matches!(
            CpGame::build(&spec).unwrap_err(),
            GameError::MissingAgentKey {
                relation: "preference",
                ..
            }
        ));

        let mut spec = pd_spec();
        spec.conversion.insert("Z".into(), vec![]);
        assert!(matches!(
            CpGame::build(&spec).unwrap_err(),
            GameError::ExtraAgentKey {
                relation: "conversion",
                ..
            }
        ));

        let mut spec = pd_spec();
        spec.situations.clear();
        assert_eq!(CpGame::build(&spec).unwrap_err(), GameError::NoSituations);

        let mut spec = pd_spec();
        spec.agents.clear();
        assert_eq!(CpGame::build(&spec).unwrap_err(), GameError::NoAgents);
    }

    #[test]
    fn duplicate_pairs_collapse_and_no_closure() {
        let mut spec = pd_spec();
        spec.preference
            .get_mut("A")
            .unwrap()
            .push(("Q,F".into(), "Q,Q".into()));
        let g = CpGame::build(&spec).unwrap();
        assert_eq!(g.preference(0).len(), 6);
        // (Q,Q)->(F,Q) and (F,Q)->(Q,Q) present, but no self pair was added.
        assert!(!g.conversion(0).contains(0, 0));
    }

    #[test]
    fn self_loop_disqualifies_abstract_nash() {
        let spec = GameSpec {
            agents: strings(&["A"]),
            situations: strings(&["s"]),
            conversion: [("A".into(), pairs(&[("s", "s")]))].into(),
            preference: [("A".into(), pairs(&[("s", "s")]))].into(),
        };
        let g = CpGame::build(&spec).unwrap();
        assert!(!g.is_abstract_nash(&"s".into()).unwrap());
    }

    #[test]
    fn empty_preference_means_empty_com() {
        let mut spec = pd_spec();
        spec.preference.insert("A".into(), vec![]);
        let g = CpGame::build(&spec).unwrap();
        assert!(g.change_of_mind_agent(&"A".into()).unwrap().is_empty());
        assert!(matches!(
            g.change_of_mind_agent(&"nobody".into()),
            Err(GameError::UnknownAgent(_))
        ));
    }

    #[test]
    fn com_equivalence_examples() {
        let g = CpGame::build(&pd_spec()).unwrap();
        assert!(g.com_equivalent(&g).unwrap());

        // Conversion grows by a pair absent from preference.
        let mut spec = pd_spec();
        spec.conversion
            .get_mut("A")
            .unwrap()
            .push(("F,F".into(), "Q,Q".into()));
        spec.preference
            .get_mut("A")
            .unwrap()
            .retain(|p| p != &("F,F".to_string(), "Q,Q".to_string()));
        let widened = CpGame::build(&spec).unwrap();
        assert!(g.com_equivalent(&widened).unwrap());

        // Both agents drop the preference (F,F) -> (Q,Q), which no conversion allows.
        let mut spec = pd_spec();
        for a in ["A", "B"] {
            spec.preference
                .get_mut(a)
                .unwrap()
                .retain(|p| p != &("F,F".to_string(), "Q,Q".to_string()));
        }
        let trimmed = CpGame::build(&spec).unwrap();
        assert_eq!(g.change_of_mind(), trimmed.change_of_mind());
        assert!(g.com_equivalent(&trimmed).unwrap());

        let mut spec = pd_spec();
        spec.situations.push("extra".into());
        let bigger = CpGame::build(&spec).unwrap();
        assert_eq!(g.com_equivalent(&bigger), Err(GameError::SituationMismatch));
    }

    #[test]
    fn spec_round_trip() {
        let spec = pd_spec();
        let g = CpGame::build(&spec).unwrap();
        let back = g.to_spec();
        for a in ["A", "B"] {
            let x: BTreeSet<_> = spec.conversion[a].iter().collect();
            let y: BTreeSet<_> = back.conversion[a].iter().collect();
            assert_eq!(x, y);
        }
        assert_eq!(back.situations, spec.situations);
    }
}
