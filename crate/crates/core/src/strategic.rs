//! Finite strategic games and their encoding as CP games.
//!
//! A profile is a choice of one strategy per player, named by joining the
//! strategy names with `,` in player order. Profiles are numbered in mixed
//! radix with the first player most significant.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use thiserror::Error;

use crate::game::{AgentId, CpGame, GameError, SituationId};
use crate::relation::Relation;

pub const DEFAULT_PROFILE_BOUND: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StrategicError {
    #[error("strategic game has no players")]
    NoPlayers,
    #[error("duplicate player `{0}`")]
    DuplicatePlayer(String),
    #[error("empty player name")]
    EmptyPlayerName,
    #[error("player `{0}` has no strategies")]
    NoStrategies(String),
    #[error("strategy map is missing player `{0}`")]
    MissingStrategies(String),
    #[error("strategy map has undeclared player `{0}`")]
    ExtraStrategies(String),
    #[error("player `{player}` declares strategy `{strategy}` twice")]
    DuplicateStrategy { player: String, strategy: String },
    #[error("strategy `{0}` is empty or contains `,`")]
    BadStrategyName(String),
    #[error("`{0}` is not a profile of this game")]
    UnknownProfile(String),
    #[error("no payoffs given for profile `{0}`")]
    MissingPayoff(String),
    #[error("profile `{profile}` has {got} payoffs, expected {expected}")]
    PayoffArity {
        profile: String,
        got: usize,
        expected: usize,
    },
    #[error("payoff for profile `{0}` is not a finite number")]
    NonFinitePayoff(String),
    #[error("preference map is missing player `{0}`")]
    MissingPreference(String),
    #[error("preference map has undeclared player `{0}`")]
    ExtraPreference(String),
    #[error("{size} profiles exceed the bound of {bound}")]
    TooLarge { size: usize, bound: usize },
    #[error(transparent)]
    Game(#[from] GameError),
}

#[derive(Clone, Debug)]
pub struct StrategicGame {
    players: Vec<AgentId>,
    strategies: Vec<Vec<String>>,
    /// Per player, over profile indices. `(p, q)` means the player prefers `q` to `p`.
    preference: Vec<Relation>,
    /// `payoffs[profile][player]`, when built from payoffs.
    payoffs: Option<Vec<Vec<f64>>>,
}

fn check_shape(
    players: &[String],
    strategies: &BTreeMap<String, Vec<String>>,
) -> Result<Vec<Vec<String>>, StrategicError> {
    if players.is_empty() {
        return Err(StrategicError::NoPlayers);
    }
    let mut seen = HashSet::new();
    for p in players {
        if p.is_empty() {
            return Err(StrategicError::EmptyPlayerName);
        }
        if !seen.insert(p.as_str()) {
            return Err(StrategicError::DuplicatePlayer(p.clone()));
        }
    }
    if let Some(extra) = strategies.keys().find(|k| !seen.contains(k.as_str())) {
        return Err(StrategicError::ExtraStrategies(extra.clone()));
    }
    let mut out = Vec::with_capacity(players.len());
    for p in players {
        let set = strategies
            .get(p)
            .ok_or_else(|| StrategicError::MissingStrategies(p.clone()))?;
        if set.is_empty() {
            return Err(StrategicError::NoStrategies(p.clone()));
        }
        let mut names = HashSet::new();
        for s in set {
            if s.is_empty() || s.contains(',') {
                return Err(StrategicError::BadStrategyName(s.clone()));
            }
            if !names.insert(s.as_str()) {
                return Err(StrategicError::DuplicateStrategy {
                    player: p.clone(),
                    strategy: s.clone(),
                });
            }
        }
        out.push(set.clone());
    }
    Ok(out)
}

fn product_size(strategies: &[Vec<String>]) -> Option<usize> {
    strategies
        .iter()
        .try_fold(1usize, |acc, s| acc.checked_mul(s.len()))
}

impl StrategicGame {
    /// Payoffs keyed by profile name. Player `a` prefers `q` to `p` iff its
    /// payoff at `q` is strictly higher; ties give no preference.
    pub fn from_payoffs(
        players: &[String],
        strategies: &BTreeMap<String, Vec<String>>,
        payoffs: &BTreeMap<String, Vec<f64>>,
    ) -> Result<Self, StrategicError> {
        let strategies = check_shape(players, strategies)?;
        let size = product_size(&strategies).unwrap_or(usize::MAX);
        if size > DEFAULT_PROFILE_BOUND {
            return Err(StrategicError::TooLarge {
                size,
                bound: DEFAULT_PROFILE_BOUND,
            });
        }
        let mut sg = StrategicGame {
            players: players.iter().map(|p| AgentId(p.clone())).collect(),
            strategies,
            preference: Vec::new(),
            payoffs: None,
        };
        let index = sg.profile_index_map();
        if let Some(unknown) = payoffs.keys().find(|k| !index.contains_key(k.as_str())) {
            return Err(StrategicError::UnknownProfile(unknown.clone()));
        }
        let mut table = Vec::with_capacity(size);
        for p in 0..size {
            let name = sg.profile_name(p);
            let row = payoffs
                .get(&name)
                .ok_or_else(|| StrategicError::MissingPayoff(name.clone()))?;
            if row.len() != players.len() {
                return Err(StrategicError::PayoffArity {
                    profile: name,
                    got: row.len(),
                    expected: players.len(),
                });
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(StrategicError::NonFinitePayoff(name));
            }
            table.push(row.clone());
        }
        sg.preference = (0..players.len())
            .map(|a| {
                let mut rel = Relation::new();
                for p in 0..size {
                    for q in 0..size {
                        if table[q][a] > table[p][a] {
                            rel.insert(p, q);
                        }
                    }
                }
                rel
            })
            .collect();
        sg.payoffs = Some(table);
        Ok(sg)
    }

    /// Preference pairs given directly over profile names.
    pub fn from_preference(
        players: &[String],
        strategies: &BTreeMap<String, Vec<String>>,
        preference: &BTreeMap<String, Vec<(String, String)>>,
    ) -> Result<Self, StrategicError> {
        let strategies = check_shape(players, strategies)?;
        if let Some(extra) = preference.keys().find(|k| !players.contains(k)) {
            return Err(StrategicError::ExtraPreference(extra.clone()));
        }
        let mut sg = StrategicGame {
            players: players.iter().map(|p| AgentId(p.clone())).collect(),
            strategies,
            preference: Vec::new(),
            payoffs: None,
        };
        let rels = players
            .iter()
            .map(|p| {
                let pairs = preference
                    .get(p)
                    .ok_or_else(|| StrategicError::MissingPreference(p.clone()))?;
                pairs
                    .iter()
                    .map(|(from, to)| Ok((sg.parse_profile(from)?, sg.parse_profile(to)?)))
                    .collect::<Result<Relation, StrategicError>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        sg.preference = rels;
        Ok(sg)
    }

    pub fn players(&self) -> &[AgentId] {
        &self.players
    }

    pub fn strategies(&self, player: usize) -> &[String] {
        &self.strategies[player]
    }

    pub fn preference(&self, player: usize) -> &Relation {
        &self.preference[player]
    }

    pub fn payoffs(&self) -> Option<&[Vec<f64>]> {
        self.payoffs.as_deref()
    }

    /// Copy with every preference replaced by its transitive closure.
    pub fn with_transitive_preferences(&self) -> StrategicGame {
        StrategicGame {
            preference: self
                .preference
                .iter()
                .map(Relation::close_transitive)
                .collect(),
            ..self.clone()
        }
    }

    /// Number of profiles, saturating at `usize::MAX`.
    pub fn num_profiles(&self) -> usize {
        product_size(&self.strategies).unwrap_or(usize::MAX)
    }

    fn radix(&self, player: usize) -> usize {
        self.strategies[player + 1..].iter().map(Vec::len).product()
    }

    /// Strategy index of each player at profile `p`.
    pub fn profile(&self, p: usize) -> Vec<usize> {
        (0..self.players.len())
            .map(|a| (p / self.radix(a)) % self.strategies[a].len())
            .collect()
    }

    pub fn profile_name(&self, p: usize) -> String {
        self.profile(p)
            .iter()
            .enumerate()
            .map(|(a, &s)| self.strategies[a][s].as_str())
            .collect::<Vec<_>>()
            .join(",")
    }

    fn profile_index_map(&self) -> HashMap<String, usize> {
        (0..self.num_profiles())
            .map(|p| (self.profile_name(p), p))
            .collect()
    }

    pub fn parse_profile(&self, name: &str) -> Result<usize, StrategicError> {
        let parts: Vec<&str> = name.split(',').collect();
        if parts.len() != self.players.len() {
            return Err(StrategicError::UnknownProfile(name.to_owned()));
        }
        parts.iter().enumerate().try_fold(0usize, |acc, (a, part)| {
            let s = self.strategies[a]
                .iter()
                .position(|x| x == part)
                .ok_or_else(|| StrategicError::UnknownProfile(name.to_owned()))?;
            Ok(acc + s * self.radix(a))
        })
    }

    /// `p` with player `a`'s strategy replaced by `s`.
    fn deviate(&self, p: usize, a: usize, s: usize) -> usize {
        let r = self.radix(a);
        let cur = (p / r) % self.strategies[a].len();
        p - cur * r + s * r
    }

    pub fn to_cp_game(&self) -> Result<CpGame, StrategicError> {
        self.to_cp_game_bounded(DEFAULT_PROFILE_BOUND)
    }

    /// Situations are all profiles; player `a` may convert a profile into any
    /// profile differing at most in coordinate `a` (itself included).
    pub fn to_cp_game_bounded(&self, bound: usize) -> Result<CpGame, StrategicError> {
        let size = self.num_profiles();
        if size > bound {
            return Err(StrategicError::TooLarge { size, bound });
        }
        let conversion = (0..self.players.len())
            .map(|a| {
                let mut rel = Relation::new();
                for p in 0..size {
                    for s in 0..self.strategies[a].len() {
                        rel.insert(p, self.deviate(p, a, s));
                    }
                }
                rel
            })
            .collect();
        let situations = (0..size)
            .map(|p| SituationId(self.profile_name(p)))
            .collect();
        Ok(CpGame::from_relations(
            self.players.clone(),
            situations,
            conversion,
            self.preference.clone(),
        )?)
    }

    /// Profiles where no player strictly prefers a unilateral deviation,
    /// checked on payoffs when present and on the preference otherwise.
    pub fn pure_nash(&self) -> BTreeSet<String> {
        (0..self.num_profiles())
            .filter(|&p| {
                (0..self.players.len()).all(|a| {
                    let own = self.profile(p)[a];
                    (0..self.strategies[a].len())
                        .filter(|&s| s != own)
                        .all(|s| {
                            let q = self.deviate(p, a, s);
                            match &self.payoffs {
                                Some(t) => t[q][a] <= t[p][a],
                                None => !self.preference[a].contains(p, q),
                            }
                        })
                })
            })
            .map(|p| self.profile_name(p))
            .collect()
    }
}
