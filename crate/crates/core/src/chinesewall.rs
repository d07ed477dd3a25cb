//! Chinese Wall access control as a CP game form.
//!
//! Situations record, per subject, the set of objects that subject has had
//! access to. A subject may add one object to its own set provided every
//! object it already holds belongs either to a different conflict-of-interest
//! class or to the same company. Reachability is explored from the state in
//! which nobody holds anything.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::game::{AgentId, CpGame, GameError, SituationId};
use crate::relation::Relation;

/// Objects are held in a `u64` bitmask.
pub const MAX_OBJECTS: usize = 64;
/// Largest `subjects × objects` for which the full game form is built.
pub const MAX_FORM_BITS: usize = 16;
pub const DEFAULT_MAX_STATES: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CwError {
    #[error("model has no {0}")]
    Empty(&'static str),
    #[error("duplicate {kind} `{name}`")]
    Duplicate { kind: &'static str, name: String },
    #[error("company `{company}` has unknown interest class `{class}`")]
    UnknownClass { company: String, class: String },
    #[error("object `{object}` has unknown company `{company}`")]
    UnknownCompany { object: String, company: String },
    #[error("unknown subject `{0}`")]
    UnknownSubject(String),
    #[error("{0} objects exceed the limit of {MAX_OBJECTS}")]
    TooManyObjects(usize),
    #[error("game form over {0} bits exceeds the limit of {MAX_FORM_BITS}")]
    FormTooLarge(usize),
    #[error("state does not match the model")]
    BadState,
    #[error(transparent)]
    Game(#[from] GameError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CwModel {
    subjects: Vec<String>,
    classes: Vec<String>,
    companies: Vec<String>,
    company_class: Vec<usize>,
    objects: Vec<String>,
    object_company: Vec<usize>,
}

/// One access set per subject, as a bitmask over object indices.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CwState {
    pub access: Vec<u64>,
}

/// Which grant rule drives the conversion relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GrantRule {
    ChineseWall,
    /// Any object may be granted. Only useful to check that the wall matters.
    Unrestricted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomModelParams {
    pub subjects: usize,
    pub classes: usize,
    pub companies: usize,
    pub objects: usize,
}

fn unique(kind: &'static str, names: &[String]) -> Result<HashMap<String, usize>, CwError> {
    if names.is_empty() {
        return Err(CwError::Empty(kind));
    }
    let mut map = HashMap::new();
    for (i, n) in names.iter().enumerate() {
        if map.insert(n.clone(), i).is_some() {
            return Err(CwError::Duplicate {
                kind,
                name: n.clone(),
            });
        }
    }
    Ok(map)
}

impl CwModel {
    /// `companies` maps company → interest class, `objects` maps object →
    /// company. Companies and objects are indexed in name order.
    pub fn new(
        subjects: Vec<String>,
        classes: Vec<String>,
        companies: &BTreeMap<String, String>,
        objects: &BTreeMap<String, String>,
    ) -> Result<CwModel, CwError> {
        unique("subjects", &subjects)?;
        let class_ix = unique("classes", &classes)?;
        if companies.is_empty() {
            return Err(CwError::Empty("companies"));
        }
        if objects.is_empty() {
            return Err(CwError::Empty("objects"));
        }
        if objects.len() > MAX_OBJECTS {
            return Err(CwError::TooManyObjects(objects.len()));
        }
        let company_names: Vec<String> = companies.keys().cloned().collect();
        let company_ix: HashMap<&str, usize> = company_names
            .iter()
            .enumerate()
            .map(|(i, c)| (c.as_str(), i))
            .collect();
        let company_class = companies
            .iter()
            .map(|(c, k)| {
                class_ix
                    .get(k)
                    .copied()
                    .ok_or_else(|| CwError::UnknownClass {
                        company: c.clone(),
                        class: k.clone(),
                    })
            })
            .collect::<Result<_, _>>()?;
        let object_company = objects
            .iter()
            .map(|(o, c)| {
                company_ix
                    .get(c.as_str())
                    .copied()
                    .ok_or_else(|| CwError::UnknownCompany {
                        object: o.clone(),
                        company: c.clone(),
                    })
            })
            .collect::<Result<_, _>>()?;
        Ok(CwModel {
            subjects,
            classes,
            companies: company_names,
            company_class,
            objects: objects.keys().cloned().collect(),
            object_company,
        })
    }

    /// Seed-deterministic model with uniformly drawn class and company
    /// assignments. Every count must be at least one.
    pub fn random(params: RandomModelParams, seed: u64) -> Result<CwModel, CwError> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let subjects = (0..params.subjects).map(|i| format!("p{i}")).collect();
        let classes: Vec<String> = (0..params.classes).map(|i| format!("class{i}")).collect();
        let companies: BTreeMap<String, String> = (0..params.companies)
            .map(|i| {
                let k = rng.gen_range(0..params.classes.max(1));
                (format!("co{i}"), format!("class{k}"))
            })
            .collect();
        let objects = (0..params.objects)
            .map(|i| {
                let c = rng.gen_range(0..params.companies.max(1));
                (format!("obj{i}"), format!("co{c}"))
            })
            .collect();
        CwModel::new(subjects, classes, &companies, &objects)
    }

    pub fn subjects(&self) -> &[String] {
        &self.subjects
    }

    pub fn classes(&self) -> &[String] {
        &self.classes
    }

    pub fn companies(&self) -> &[String] {
        &self.companies
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn company_of(&self, object: usize) -> usize {
        self.object_company[object]
    }

    pub fn class_of(&self, object: usize) -> usize {
        self.company_class[self.object_company[object]]
    }

    pub fn subject_index(&self, subject: &str) -> Result<usize, CwError> {
        self.subjects
            .iter()
            .position(|s| s == subject)
            .ok_or_else(|| CwError::UnknownSubject(subject.to_owned()))
    }

    pub fn empty_state(&self) -> CwState {
        CwState {
            access: vec![0; self.subjects.len()],
        }
    }

    fn check_state(&self, state: &CwState) -> Result<(), CwError> {
        let all = if self.objects.len() == 64 {
            u64::MAX
        } else {
            (1u64 << self.objects.len()) - 1
        };
        if state.access.len() != self.subjects.len() || state.access.iter().any(|m| m & !all != 0) {
            return Err(CwError::BadState);
        }
        Ok(())
    }

    /// `o` and `other` are compatible when they sit in different interest
    /// classes or belong to the same company.
    pub fn compatible(&self, o: usize, other: usize) -> bool {
        self.class_of(o) != self.class_of(other) || self.company_of(o) == self.company_of(other)
    }

    fn grant_allowed(&self, held: u64, o: usize, rule: GrantRule) -> bool {
        match rule {
            GrantRule::Unrestricted => true,
            GrantRule::ChineseWall => bits(held).all(|other| self.compatible(o, other)),
        }
    }

    /// Successors of `state` for subject `p`, self-loop included when some
    /// already-held object satisfies the grant condition.
    pub fn successors_ix(&self, state: &CwState, p: usize, rule: GrantRule) -> Vec<CwState> {
        let held = state.access[p];
        let mut out = Vec::new();
        let mut self_loop = false;
        for o in 0..self.objects.len() {
            if !self.grant_allowed(held, o, rule) {
                continue;
            }
            if held & (1 << o) != 0 {
                self_loop = true;
            } else {
                let mut next = state.clone();
                next.access[p] |= 1 << o;
                out.push(next);
            }
        }
        if self_loop {
            out.push(state.clone());
        }
        out
    }

    pub fn describe(&self, state: &CwState) -> String {
        let mut s = String::new();
        for (p, &mask) in state.access.iter().enumerate() {
            if p > 0 {
                s.push(';');
            }
            let held: Vec<&str> = bits(mask).map(|o| self.objects[o].as_str()).collect();
            let _ = write!(s, "{}:{{{}}}", self.subjects[p], held.join(","));
        }
        s
    }

    /// The full CP game over `⊗_p 2^O` with the wall as conversion and the
    /// supplied preference predicate `(subject, from, to)`.
    pub fn to_cp_game(
        &self,
        mut preference: impl FnMut(usize, &CwState, &CwState) -> bool,
    ) -> Result<CpGame, CwError> {
        let (np, no) = (self.subjects.len(), self.objects.len());
        let bits_total = np * no;
        if bits_total > MAX_FORM_BITS {
            return Err(CwError::FormTooLarge(bits_total));
        }
        let size = 1usize << bits_total;
        let per = (1u64 << no) - 1;
        let state_of = |i: usize| CwState {
            access: (0..np).map(|p| ((i as u64) >> (p * no)) & per).collect(),
        };
        let index_of = |s: &CwState| {
            s.access
                .iter()
                .enumerate()
                .fold(0usize, |acc, (p, &m)| acc | ((m as usize) << (p * no)))
        };
        let mut conversion = vec![Relation::new(); np];
        let mut prefs = vec![Relation::new(); np];
        for i in 0..size {
            let s = state_of(i);
            for p in 0..np {
                for t in self.successors_ix(&s, p, GrantRule::ChineseWall) {
                    conversion[p].insert(i, index_of(&t));
                }
                for j in 0..size {
                    if preference(p, &s, &state_of(j)) {
                        prefs[p].insert(i, j);
                    }
                }
            }
        }
        let situations = (0..size)
            .map(|i| SituationId(self.describe(&state_of(i))))
            .collect();
        let agents = self.subjects.iter().map(|s| AgentId(s.clone())).collect();
        Ok(CpGame::from_relations(
            agents, situations, conversion, prefs,
        )?)
    }
}

fn bits(mask: u64) -> impl Iterator<Item = usize> {
    (0..64).filter(move |&i| mask & (1 << i) != 0)
}

pub fn cw_successors(
    model: &CwModel,
    state: &CwState,
    subject: &str,
) -> Result<BTreeSet<CwState>, CwError> {
    model.check_state(state)?;
    let p = model.subject_index(subject)?;
    Ok(model
        .successors_ix(state, p, GrantRule::ChineseWall)
        .into_iter()
        .collect())
}

/// No subject holds objects of two distinct companies sharing an interest class.
pub fn nit(model: &CwModel, state: &CwState) -> bool {
    state
        .access
        .iter()
        .all(|&mask| bits(mask).all(|o1| bits(mask).all(|o2| model.compatible(o1, o2))))
}

/// Breadth-first exploration from the empty allocation.
#[derive(Clone, Debug)]
pub struct Exploration {
    /// In discovery order; `states[0]` is the empty allocation.
    pub states: Vec<CwState>,
    /// BFS tree: predecessor state index and the acting subject.
    pub parent: Vec<Option<(usize, usize)>>,
    /// Every non-loop transition examined, as `(from, to, subject)`.
    pub transitions: Vec<(usize, usize, usize)>,
    pub truncated: bool,
}

impl Exploration {
    /// Moves leading from the empty allocation to `states[target]`.
    pub fn path_to(&self, target: usize) -> Vec<(usize, CwState)> {
        let mut path = Vec::new();
        let mut cur = target;
        while let Some((prev, p)) = self.parent[cur] {
            path.push((p, self.states[cur].clone()));
            cur = prev;
        }
        path.reverse();
        path
    }
}

pub fn explore(model: &CwModel, max_states: usize, rule: GrantRule) -> Exploration {
    let start = model.empty_state();
    let mut index: HashMap<CwState, usize> = HashMap::from([(start.clone(), 0)]);
    let mut ex = Exploration {
        states: vec![start],
        parent: vec![None],
        transitions: Vec::new(),
        truncated: false,
    };
    let mut queue = VecDeque::from([0usize]);
    'bfs: while let Some(i) = queue.pop_front() {
        for p in 0..model.subjects.len() {
            let from = ex.states[i].clone();
            for next in model.successors_ix(&from, p, rule) {
                if next == from {
                    continue;
                }
                let j = match index.get(&next) {
                    Some(&j) => j,
                    None => {
                        if ex.states.len() >= max_states {
                            ex.truncated = true;
                            break 'bfs;
                        }
                        let j = ex.states.len();
                        index.insert(next.clone(), j);
                        ex.states.push(next);
                        ex.parent.push(Some((i, p)));
                        queue.push_back(j);
                        j
                    }
                };
                ex.transitions.push((i, j, p));
            }
        }
    }
    ex
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reachable {
    pub states: BTreeSet<CwState>,
    pub truncated: bool,
}

pub fn cw_reachable(model: &CwModel, max_states: usize) -> Reachable {
    let ex = explore(model, max_states.max(1), GrantRule::ChineseWall);
    Reachable {
        states: ex.states.into_iter().collect(),
        truncated: ex.truncated,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NitVerdict {
    /// Every reachable state has no insider trading.
    Holds { states: usize, transitions: usize },
    /// A reachable violating state and the moves `(subject, state)` reaching it.
    Violated {
        state: CwState,
        path: Vec<(usize, CwState)>,
    },
    /// The state budget ran out before a violation was found.
    Truncated { explored: usize },
}

pub fn verify_nit_theorem(model: &CwModel, max_states: usize) -> NitVerdict {
    verify_nit_theorem_with(model, max_states, GrantRule::ChineseWall)
}

/// Exploration uses conversion alone: any change of mind is a subset of
/// conversion, whatever the preferences.
pub fn verify_nit_theorem_with(model: &CwModel, max_states: usize, rule: GrantRule) -> NitVerdict {
    let ex = explore(model, max_states.max(1), rule);
    if let Some(bad) = ex.states.iter().position(|s| !nit(model, s)) {
        return NitVerdict::Violated {
            state: ex.states[bad].clone(),
            path: ex.path_to(bad),
        };
    }
    if ex.truncated {
        NitVerdict::Truncated {
            explored: ex.states.len(),
        }
    } else {
        NitVerdict::Holds {
            states: ex.states.len(),
            transitions: ex.transitions.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TransitionFault {
    /// The step did not grow exactly one subject's set by exactly one object.
    NotSingleGrant { from: usize, to: usize },
    /// `nit` held before the step and fails after it.
    NitBroken { from: usize, to: usize },
}

/// Checks every explored transition for single-object growth and for
/// preservation of `nit`.
pub fn check_transitions(model: &CwModel, ex: &Exploration) -> Vec<TransitionFault> {
    let mut faults = Vec::new();
    for &(from, to, p) in &ex.transitions {
        let (a, b) = (&ex.states[from], &ex.states[to]);
        let others_same = (0..a.access.len()).all(|q| q == p || a.access[q] == b.access[q]);
        let grown = b.access[p] & !a.access[p];
        let single = others_same && a.access[p] & !b.access[p] == 0 && grown.count_ones() == 1;
        if !single {
            faults.push(TransitionFault::NotSingleGrant { from, to });
        }
        if nit(model, a) && !nit(model, b) {
            faults.push(TransitionFault::NitBroken { from, to });
        }
    }
    faults
}

#[cfg(test)]
mod tests {
    use super::*;

    fn strings(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn map(v: &[(&str, &str)]) -> BTreeMap<String, String> {
        v.iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect()
    }

    fn banks() -> CwModel {
        // o1, o1b owned by B1; o2 by B2; both banks. o3 owned by an oil company.
        CwModel::new(
            strings(&["alice"]),
            strings(&["bank", "oil"]),
            &map(&[("B1", "bank"), ("B2", "bank"), ("X", "oil")]),
            &map(&[("o1", "B1"), ("o1b", "B1"), ("o2", "B2"), ("o3", "X")]),
        )
        .unwrap()
    }

    fn holding(model: &CwModel, objs: &[&str]) -> CwState {
        let mut s = model.empty_state();
        for o in objs {
            let i = model.objects().iter().position(|x| x == o).unwrap();
            s.access[0] |= 1 << i;
        }
        s
    }

    #[test]
    fn empty_state_grants_every_object() {
        let m = banks();
        let succ = cw_successors(&m, &m.empty_state(), "alice").unwrap();
        assert_eq!(succ.len(), m.objects().len());
    }

    #[test]
    fn wall_blocks_competing_bank() {
        let m = banks();
        let s = holding(&m, &["o1"]);
        let succ = cw_successors(&m, &s, "alice").unwrap();
        assert!(!succ.contains(&holding(&m, &["o1", "o2"])));
        assert!(succ.contains(&holding(&m, &["o1", "o1b"])));
        assert!(succ.contains(&holding(&m, &["o1", "o3"])));
        // Re-granting a held object is the formula's self-loop.
        assert!(succ.contains(&s));
        assert!(matches!(
            cw_successors(&m, &s, "mallory"),
            Err(CwError::UnknownSubject(_))
        ));
    }

    #[test]
    fn nit_examples() {
        let m = banks();
        assert!(nit(&m, &m.empty_state()));
        assert!(nit(&m, &holding(&m, &["o1", "o1b"])));
        assert!(!nit(&m, &holding(&m, &["o1", "o2"])));
    }

    #[test]
    fn single_object_model() {
        let m = CwModel::new(
            strings(&["p"]),
            strings(&["k"]),
            &map(&[("c", "k")]),
            &map(&[("o", "c")]),
        )
        .unwrap();
        let r = cw_reachable(&m, 100);
        assert_eq!(r.states.len(), 2);
        assert!(!r.truncated);
    }

    #[test]
    fn two_banks_one_subject() {
        let m = CwModel::new(
            strings(&["p"]),
            strings(&["bank"]),
            &map(&[("B1", "bank"), ("B2", "bank")]),
            &map(&[("o1", "B1"), ("o2", "B2")]),
        )
        .unwrap();
        let r = cw_reachable(&m, 100);
        assert_eq!(r.states.len(), 3);
        let both = CwState { access: vec![0b11] };
        assert!(!r.states.contains(&both));
    }

    #[test]
    fn two_subjects_two_classes_count() {
        // Per subject: the empty set, one of four singletons, or one object
        // from each class (2 × 2 pairs): 1 + 4 + 4 = 9 reachable sets, and
        // subjects are independent, so 81 of 256 allocations.
        let m = CwModel::new(
            strings(&["p", "q"]),
            strings(&["k1", "k2"]),
            &map(&[("a", "k1"), ("b", "k1"), ("c", "k2"), ("d", "k2")]),
            &map(&[("oa", "a"), ("ob", "b"), ("oc", "c"), ("od", "d")]),
        )
        .unwrap();
        let r = cw_reachable(&m, 10_000);
        assert_eq!(r.states.len(), 81);
        assert!(r.states.iter().all(|s| nit(&m, s)));
    }

    #[test]
    fn truncation_is_reported() {
        let m = banks();
        let r = cw_reachable(&m, 2);
        assert!(r.truncated);
        assert_eq!(r.states.len(), 2);
        assert_eq!(
            verify_nit_theorem(&m, 2),
            NitVerdict::Truncated { explored: 2 }
        );
    }

    #[test]
    fn unrestricted_rule_finds_witness() {
        let m = banks();
        match verify_nit_theorem_with(&m, 1000, GrantRule::Unrestricted) {
            NitVerdict::Violated { state, path } => {
                assert!(!nit(&m, &state));
                assert_eq!(path.last().unwrap().1, state);
                assert_eq!(path.len(), 2);
            }
            other => panic!("expected a witness, got {other:?}"),
        }
        assert!(matches!(
            verify_nit_theorem(&m, 1000),
            NitVerdict::Holds { .. }
        ));
    }

    #[test]
    fn one_class_per_company_reaches_everything() {
        let m = CwModel::new(
            strings(&["p", "q"]),
            strings(&["k1", "k2", "k3"]),
            &map(&[("a", "k1"), ("b", "k2"), ("c", "k3")]),
            &map(&[("o1", "a"), ("o2", "b"), ("o3", "c")]),
        )
        .unwrap();
        assert!(matches!(
            verify_nit_theorem(&m, 1000),
            NitVerdict::Holds { states: 64, .. }
        ));
    }

    #[test]
    fn transitions_are_single_grants() {
        let m = banks();
        let ex = explore(&m, 1000, GrantRule::ChineseWall);
        assert!(check_transitions(&m, &ex).is_empty());
        let bad = explore(&m, 1000, GrantRule::Unrestricted);
        assert!(check_transitions(&m, &bad)
            .iter()
            .any(|f| matches!(f, TransitionFault::NitBroken { .. })));
    }

    #[test]
    fn random_models_are_seed_deterministic() {
        let params = RandomModelParams {
            subjects: 3,
            classes: 2,
            companies: 3,
            objects: 4,
        };
        assert_eq!(CwModel::random(params, 7), CwModel::random(params, 7));
    }

    #[test]
    fn model_validation() {
        let err = CwModel::new(
            strings(&["p"]),
            strings(&["k"]),
            &map(&[("c", "nope")]),
            &map(&[("o", "c")]),
        )
        .unwrap_err();
        assert!(matches!(err, CwError::UnknownClass { .. }));
        let err = CwModel::new(
            strings(&["p"]),
            strings(&["k"]),
            &map(&[("c", "k")]),
            &map(&[("o", "zz")]),
        )
        .unwrap_err();
        assert!(matches!(err, CwError::UnknownCompany { .. }));
        let err = CwModel::new(vec![], strings(&["k"]), &map(&[]), &map(&[])).unwrap_err();
        assert_eq!(err, CwError::Empty("subjects"));
    }

    #[test]
    fn game_form_com_stays_inside_conversion() {
        let m = CwModel::new(
            strings(&["p", "q"]),
            strings(&["bank"]),
            &map(&[("B1", "bank"), ("B2", "bank")]),
            &map(&[("o1", "B1"), ("o2", "B2")]),
        )
        .unwrap();
        // Greedy preference: more objects is better.
        let g = m
            .to_cp_game(|p, a, b| b.access[p].count_ones() > a.access[p].count_ones())
            .unwrap();
        assert_eq!(g.num_situations(), 16);
        let com = g.change_of_mind();
        let conv = (0..2).fold(Relation::new(), |acc, p| acc.union(g.conversion(p)));
        assert!(com.is_subset(&conv));
    }
}
