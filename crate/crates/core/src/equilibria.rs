//! Strongly connected components of the change-of-mind graph and the CP
//! equilibria read off its condensation.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::game::{CpGame, SituationId, SituationSet};
use crate::relation::Relation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EquilibriaError {
    #[error("components do not partition the vertex set: {0}")]
    NotAPartition(String),
}

/// Directed graph on vertices `0..n` stored as sorted successor lists.
#[derive(Clone, Debug)]
pub struct ComGraph {
    succ: Vec<Vec<usize>>,
    edge_count: usize,
}

impl ComGraph {
    pub fn new(n: usize, edges: &Relation) -> Self {
        ComGraph {
            succ: edges.successors(n),
            edge_count: edges.len(),
        }
    }

    /// Change-of-mind graph of `game`.
    pub fn of_game(game: &CpGame) -> Self {
        ComGraph::new(game.num_situations(), &game.change_of_mind())
    }

    /// Builds directly from successor lists; duplicates are kept as given.
    pub fn from_successors(succ: Vec<Vec<usize>>) -> Self {
        let n = succ.len();
        assert!(
            succ.iter().flatten().all(|&v| v < n),
            "edge endpoint out of range"
        );
        let edge_count = succ.iter().map(Vec::len).sum();
        ComGraph { succ, edge_count }
    }

    pub fn num_vertices(&self) -> usize {
        self.succ.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edge_count
    }

    pub fn successors(&self, v: usize) -> &[usize] {
        &self.succ[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.succ[u].contains(&v)
    }
}

/// A strongly connected component. `members` is sorted ascending.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scc {
    pub index: usize,
    pub members: Vec<usize>,
}

/// Tarjan's algorithm with an explicit call stack.
///
/// Components come out in reverse topological order: every arc of the
/// condensation goes from a later component to an earlier one.
pub fn tarjan_scc(graph: &ComGraph) -> Vec<Scc> {
    const UNVISITED: usize = usize::MAX;
    let n = graph.num_vertices();
    let mut order = vec![UNVISITED; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    // (vertex, position of the next successor to visit)
    let mut call: Vec<(usize, usize)> = Vec::new();
    let mut next_order = 0;
    let mut out = Vec::new();

    for root in 0..n {
        if order[root] != UNVISITED {
            continue;
        }
        call.push((root, 0));
        order[root] = next_order;
        low[root] = next_order;
        next_order += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            let succ = graph.successors(v);
            if *pos < succ.len() {
                let w = succ[*pos];
                *pos += 1;
                if order[w] == UNVISITED {
                    order[w] = next_order;
                    low[w] = next_order;
                    next_order += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(order[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == order[v] {
                let mut members = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    members.push(w);
                    if w == v {
                        break;
                    }
                }
                members.sort_unstable();
                out.push(Scc {
                    index: out.len(),
                    members,
                });
            }
        }
    }
    out
}

/// The reduced graph: components plus the arcs between distinct components.
#[derive(Clone, Debug)]
pub struct Condensation {
    pub components: Vec<Scc>,
    pub arcs: BTreeSet<(usize, usize)>,
    component_of: Vec<usize>,
}

impl Condensation {
    pub fn component_of(&self, v: usize) -> usize {
        self.component_of[v]
    }

    /// Indices of components without outgoing arcs.
    pub fn sinks(&self) -> Vec<usize> {
        let mut has_out = vec![false; self.components.len()];
        for &(i, _) in &self.arcs {
            has_out[i] = true;
        }
        (0..self.components.len())
            .filter(|&i| !has_out[i])
            .collect()
    }

    /// Kahn's algorithm over the arcs; `None` if they contain a cycle.
    pub fn topological_order(&self) -> Option<Vec<usize>> {
        let k = self.components.len();
        let mut indeg = vec![0usize; k];
        let mut out = vec![Vec::new(); k];
        for &(i, j) in &self.arcs {
            indeg[j] += 1;
            out[i].push(j);
        }
        let mut ready: Vec<usize> = (0..k).filter(|&i| indeg[i] == 0).collect();
        let mut order = Vec::with_capacity(k);
        while let Some(i) = ready.pop() {
            order.push(i);
            for &j in &out[i] {
                indeg[j] -= 1;
                if indeg[j] == 0 {
                    ready.push(j);
                }
            }
        }
        (order.len() == k).then_some(order)
    }
}

/// Quotients `graph` by `sccs`, dropping self-arcs and merging duplicates.
pub fn condense(graph: &ComGraph, sccs: &[Scc]) -> Result<Condensation, EquilibriaError> {
    let n = graph.num_vertices();
    let mut component_of = vec![usize::MAX; n];
    for (ci, scc) in sccs.iter().enumerate() {
        if scc.members.is_empty() {
            return Err(EquilibriaError::NotAPartition(format!(
                "component {ci} is empty"
            )));
        }
        for &v in &scc.members {
            if v >= n {
                return Err(EquilibriaError::NotAPartition(format!(
                    "vertex {v} out of range"
                )));
            }
            if component_of[v] != usize::MAX {
                return Err(EquilibriaError::NotAPartition(format!(
                    "vertex {v} in more than one component"
                )));
            }
            component_of[v] = ci;
        }
    }
    if let Some(v) = component_of.iter().position(|&c| c == usize::MAX) {
        return Err(EquilibriaError::NotAPartition(format!(
            "vertex {v} not covered"
        )));
    }
    let mut arcs = BTreeSet::new();
    for u in 0..n {
        for &v in graph.successors(u) {
            let (cu, cv) = (component_of[u], component_of[v]);
            if cu != cv {
                arcs.insert((cu, cv));
            }
        }
    }
    let components = sccs
        .iter()
        .enumerate()
        .map(|(index, s)| Scc {
            index,
            members: s.members.clone(),
        })
        .collect();
    Ok(Condensation {
        components,
        arcs,
        component_of,
    })
}

/// Member index sets of the terminal components of `graph`.
pub fn terminal_components(graph: &ComGraph) -> Vec<Vec<usize>> {
    let sccs = tarjan_scc(graph);
    let cond = condense(graph, &sccs).expect("tarjan output is a partition");
    cond.sinks()
        .into_iter()
        .map(|i| cond.components[i].members.clone())
        .collect()
}

/// CP equilibria: the member sets of the sink components of the
/// condensation of the change-of-mind graph.
pub fn cp_equilibria(game: &CpGame) -> BTreeSet<SituationSet> {
    terminal_components(&ComGraph::of_game(game))
        .into_iter()
        .map(|m| game.names_of(m))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EquilibriumKind {
    AbstractNash,
    Dynamic,
}

impl EquilibriumKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EquilibriumKind::AbstractNash => "abstract_nash",
            EquilibriumKind::Dynamic => "dynamic",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Equilibrium {
    /// Sorted by name.
    pub members: Vec<SituationId>,
    pub kind: EquilibriumKind,
}

/// All CP equilibria of a game, sorted by smallest member name.
///
/// A singleton terminal component whose situation has a change-of-mind
/// self-loop is reported as dynamic, never as abstract Nash.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EquilibriumReport {
    pub equilibria: Vec<Equilibrium>,
}

impl EquilibriumReport {
    pub fn abstract_nash(&self) -> SituationSet {
        self.equilibria
            .iter()
            .filter(|e| e.kind == EquilibriumKind::AbstractNash)
            .map(|e| e.members[0].clone())
            .collect()
    }

    pub fn dynamic(&self) -> Vec<&Equilibrium> {
        self.equilibria
            .iter()
            .filter(|e| e.kind == EquilibriumKind::Dynamic)
            .collect()
    }

    pub fn member_sets(&self) -> BTreeSet<SituationSet> {
        self.equilibria
            .iter()
            .map(|e| e.members.iter().cloned().collect())
            .collect()
    }
}

pub fn classify(game: &CpGame) -> EquilibriumReport {
    let com = game.change_of_mind();
    let graph = ComGraph::new(game.num_situations(), &com);
    let mut equilibria: Vec<Equilibrium> = terminal_components(&graph)
        .into_iter()
        .map(|members| {
            let kind = if members.len() == 1 && !com.contains(members[0], members[0]) {
                EquilibriumKind::AbstractNash
            } else {
                EquilibriumKind::Dynamic
            };
            Equilibrium {
                members: game.names_of(members).into_iter().collect(),
                kind,
            }
        })
        .collect();
    equilibria.sort_by(|a, b| a.members.cmp(&b.members));
    EquilibriumReport { equilibria }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> ComGraph {
        ComGraph::new(n, &edges.iter().copied().collect())
    }

    fn reach(g: &ComGraph, from: usize) -> Vec<bool> {
        let mut seen = vec![false; g.num_vertices()];
        seen[from] = true;
        let mut todo = vec![from];
        while let Some(v) = todo.pop() {
            for &w in g.successors(v) {
                if !seen[w] {
                    seen[w] = true;
                    todo.push(w);
                }
            }
        }
        seen
    }

    // Mutual-reachability partition, quadratic in reachability queries.
    fn brute_partition(g: &ComGraph) -> BTreeSet<Vec<usize>> {
        let n = g.num_vertices();
        let r: Vec<Vec<bool>> = (0..n).map(|v| reach(g, v)).collect();
        (0..n)
            .map(|u| (0..n).filter(|&v| r[u][v] && r[v][u]).collect())
            .collect()
    }

    fn partition(sccs: &[Scc]) -> BTreeSet<Vec<usize>> {
        sccs.iter().map(|s| s.members.clone()).collect()
    }

    #[test]
    fn pd_graph_is_four_singletons() {
        // Q,Q=0 Q,F=1 F,Q=2 F,F=3
        let g = graph(4, &[(0, 1), (0, 2), (2, 3), (1, 3)]);
        let sccs = tarjan_scc(&g);
        assert_eq!(sccs.len(), 4);
        assert_eq!(partition(&sccs), brute_partition(&g));
        assert_eq!(terminal_components(&g), vec![vec![3]]);
    }

    #[test]
    fn four_cycle_is_one_component() {
        let g = graph(4, &[(0, 1), (1, 3), (3, 2), (2, 0)]);
        let sccs = tarjan_scc(&g);
        assert_eq!(partition(&sccs), [vec![0, 1, 2, 3]].into());
        let cond = condense(&g, &sccs).unwrap();
        assert_eq!(cond.components.len(), 1);
        assert!(cond.arcs.is_empty());
    }

    #[test]
    fn edgeless_graph_gives_singletons() {
        let g = graph(5, &[]);
        assert_eq!(tarjan_scc(&g).len(), 5);
        assert_eq!(terminal_components(&g).len(), 5);
    }

    #[test]
    fn long_chain_does_not_overflow() {
        let n = 200_000;
        let g = ComGraph::from_successors(
            (0..n)
                .map(|i| if i + 1 < n { vec![i + 1] } else { vec![] })
                .collect(),
        );
        let sccs = tarjan_scc(&g);
        assert_eq!(sccs.len(), n);
        assert_eq!(sccs[0].members, vec![n - 1]);
    }

    #[test]
    fn condense_rejects_non_partitions() {
        let g = graph(3, &[(0, 1)]);
        let overlap = [
            Scc {
                index: 0,
                members: vec![0, 1],
            },
            Scc {
                index: 1,
                members: vec![1, 2],
            },
        ];
        assert!(condense(&g, &overlap).is_err());
        let missing = [Scc {
            index: 0,
            members: vec![0, 1],
        }];
        assert!(condense(&g, &missing).is_err());
        let empty = [
            Scc {
                index: 0,
                members: vec![0, 1, 2],
            },
            Scc {
                index: 1,
                members: vec![],
            },
        ];
        assert!(condense(&g, &empty).is_err());
    }

    // The 13-vertex drawing with six components: three sources (one feeding
    // the red cycle directly, two feeding the green pair), the green pair
    // feeding both the red five-cycle block and the blue triangle.
    #[test]
    fn six_component_drawing() {
        let (brown, plain, dir, g1, g2) = (0, 1, 2, 3, 4);
        let (r1, r2, r3, r4, r5) = (5, 6, 7, 8, 9);
        let (b1, b2, b3) = (10, 11, 12);
        let edges = [
            (brown, g1),
            (plain, g2),
            (dir, r1),
            (g1, g2),
            (g1, r2),
            (g2, g1),
            (g2, b1),
            (r1, r5),
            (r2, r1),
            (r2, r3),
            (r3, r5),
            (r4, r1),
            (r5, r4),
            (r5, r2),
            (b1, b2),
            (b2, b3),
            (b3, b1),
        ];
        let g = graph(13, &edges);
        let sccs = tarjan_scc(&g);
        assert_eq!(partition(&sccs), brute_partition(&g));
        assert_eq!(sccs.len(), 6);
        let cond = condense(&g, &sccs).unwrap();
        assert_eq!(cond.arcs.len(), 5);
        assert!(cond.topological_order().is_some());
        let sinks: BTreeSet<Vec<usize>> = cond
            .sinks()
            .into_iter()
            .map(|i| cond.components[i].members.clone())
            .collect();
        assert_eq!(sinks, [vec![r1, r2, r3, r4, r5], vec![b1, b2, b3]].into());
    }

    fn arb_graph() -> impl Strategy<Value = ComGraph> {
        (1usize..=12).prop_flat_map(|n| {
            proptest::collection::vec((0..n, 0..n), 0..(n * n).min(60))
                .prop_map(move |e| ComGraph::new(n, &e.into_iter().collect()))
        })
    }

    proptest! {
        #[test]
        fn tarjan_matches_brute_force(g in arb_graph()) {
            prop_assert_eq!(partition(&tarjan_scc(&g)), brute_partition(&g));
        }

        #[test]
        fn condensation_is_acyclic_and_reverse_topological(g in arb_graph()) {
            let sccs = tarjan_scc(&g);
            let cond = condense(&g, &sccs).unwrap();
            prop_assert!(cond.topological_order().is_some());
            for &(i, j) in &cond.arcs {
                prop_assert!(i != j);
                prop_assert!(i > j, "arc {} -> {} not reverse topological", i, j);
            }
            for u in 0..g.num_vertices() {
                for &v in g.successors(u) {
                    let (cu, cv) = (cond.component_of(u), cond.component_of(v));
                    prop_assert_eq!(cu != cv, cond.arcs.contains(&(cu, cv)));
                }
            }
        }

        #[test]
        fn terminal_components_are_closed_and_strongly_connected(g in arb_graph()) {
            let terms = terminal_components(&g);
            prop_assert!(!terms.is_empty());
            for t in &terms {
                for &s in t {
                    prop_assert!(g.successors(s).iter().all(|w| t.contains(w)));
                    let r = reach(&g, s);
                    prop_assert!(t.iter().all(|&x| r[x]));
                }
            }
        }
    }
}
