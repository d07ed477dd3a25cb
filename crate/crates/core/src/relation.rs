//! Finite binary relations over situation indices.
//!
//! Conversion, preference and change of mind all share this carrier. Pairs
//! are stored extensionally; nothing is assumed about reflexivity,
//! transitivity or acyclicity.

use std::collections::BTreeSet;

/// A finite set of ordered pairs `(from, to)` of situation indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Relation {
    pairs: BTreeSet<(usize, usize)>,
}

impl Relation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, from: usize, to: usize) -> bool {
        self.pairs.insert((from, to))
    }

    pub fn remove(&mut self, from: usize, to: usize) -> bool {
        self.pairs.remove(&(from, to))
    }

    pub fn contains(&self, from: usize, to: usize) -> bool {
        self.pairs.contains(&(from, to))
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Pairs in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn intersection(&self, other: &Relation) -> Relation {
        self.pairs.intersection(&other.pairs).copied().collect()
    }

    pub fn union(&self, other: &Relation) -> Relation {
        self.pairs.union(&other.pairs).copied().collect()
    }

    pub fn is_subset(&self, other: &Relation) -> bool {
        self.pairs.is_subset(&other.pairs)
    }

    /// Largest endpoint plus one, or zero for the empty relation.
    pub fn support_size(&self) -> usize {
        self.iter().map(|(a, b)| a.max(b) + 1).max().unwrap_or(0)
    }

    /// Sorted successor lists for vertices `0..n`.
    ///
    /// Panics if an endpoint is `>= n`.
    pub fn successors(&self, n: usize) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); n];
        for (a, b) in self.iter() {
            assert!(a < n && b < n, "pair ({a}, {b}) outside 0..{n}");
            adj[a].push(b);
        }
        adj
    }

    /// Transitive closure (not reflexive). One BFS per source vertex.
    pub fn close_transitive(&self) -> Relation {
        let n = self.support_size();
        let adj = self.successors(n);
        let mut closed = Relation::new();
        let mut seen = vec![usize::MAX; n];
        let mut queue = Vec::new();
        for src in 0..n {
            if adj[src].is_empty() {
                continue;
            }
            queue.clear();
            queue.extend(adj[src].iter().copied());
            while let Some(v) = queue.pop() {
                if seen[v] == src {
                    continue;
                }
                seen[v] = src;
                closed.insert(src, v);
                queue.extend(adj[v].iter().copied().filter(|&w| seen[w] != src));
            }
        }
        closed
    }

    pub fn is_reflexive_on(&self, n: usize) -> bool {
        (0..n).all(|s| self.contains(s, s))
    }

    pub fn is_symmetric(&self) -> bool {
        self.iter().all(|(a, b)| self.contains(b, a))
    }

    pub fn is_transitive(&self) -> bool {
        let adj = self.successors(self.support_size());
        self.iter()
            .all(|(a, b)| adj[b].iter().all(|&c| self.contains(a, c)))
    }
}

impl FromIterator<(usize, usize)> for Relation {
    fn from_iter<I: IntoIterator<Item = (usize, usize)>>(iter: I) -> Self {
        Relation {
            pairs: iter.into_iter().collect(),
        }
    }
}

impl Extend<(usize, usize)> for Relation {
    fn extend<I: IntoIterator<Item = (usize, usize)>>(&mut self, iter: I) {
        self.pairs.extend(iter)
    }
}
