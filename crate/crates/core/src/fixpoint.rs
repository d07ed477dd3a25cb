//! The update function on sets of situations and an exhaustive check that
//! its least non-empty fixed points are exactly the CP equilibria.
//!
//! `update(C)` is everything reachable from `C` along zero or more
//! change-of-mind steps. The subset enumeration here never touches SCCs, so
//! it serves as an independent oracle for [`crate::equilibria`].

use std::collections::BTreeSet;

use thiserror::Error;

use crate::equilibria::cp_equilibria;
use crate::game::{CpGame, GameError, SituationSet};

/// Largest game the exhaustive enumeration accepts.
pub const EXHAUSTIVE_LIMIT: usize = 15;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FixpointError {
    #[error(transparent)]
    Game(#[from] GameError),
    #[error("{0} situations exceed the exhaustive limit of {EXHAUSTIVE_LIMIT}; use cp_equilibria")]
    TooLarge(usize),
}

/// Reflexive-transitive change-of-mind reachability of every situation.
fn reach_sets(game: &CpGame) -> Vec<Vec<bool>> {
    let n = game.num_situations();
    let succ = game.change_of_mind().successors(n);
    (0..n)
        .map(|src| {
            let mut seen = vec![false; n];
            seen[src] = true;
            let mut queue = std::collections::VecDeque::from([src]);
            while let Some(v) = queue.pop_front() {
                for &w in &succ[v] {
                    if !seen[w] {
                        seen[w] = true;
                        queue.push_back(w);
                    }
                }
            }
            seen
        })
        .collect()
}

pub fn update(game: &CpGame, c: &SituationSet) -> Result<SituationSet, FixpointError> {
    let idx = game.indices_of(c)?;
    let reach = reach_sets(game);
    let n = game.num_situations();
    let mut out = vec![false; n];
    for s in idx {
        for (t, &r) in reach[s].iter().enumerate() {
            out[t] |= r;
        }
    }
    Ok(game.names_of((0..n).filter(|&t| out[t])))
}

pub fn is_fixed_point(game: &CpGame, c: &SituationSet) -> Result<bool, FixpointError> {
    Ok(&update(game, c)? == c)
}

/// `update` tabulated over every subset, as bitmasks.
fn update_table(game: &CpGame) -> Vec<u32> {
    let n = game.num_situations();
    let reach: Vec<u32> = reach_sets(game)
        .into_iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|(_, &r)| r)
                .fold(0u32, |m, (t, _)| m | (1 << t))
        })
        .collect();
    let mut table = vec![0u32; 1 << n];
    for mask in 1usize..(1 << n) {
        let low = mask.trailing_zeros() as usize;
        table[mask] = table[mask & (mask - 1)] | reach[low];
    }
    table
}

/// Non-empty fixed points `C` such that no `C'` with `∅ ⊊ C' ⊊ C` has
/// `update(C') ⊆ C'`. Enumerates all `2^n` subsets.
pub fn least_nonempty_fixed_points(game: &CpGame) -> Result<BTreeSet<SituationSet>, FixpointError> {
    let n = game.num_situations();
    if n > EXHAUSTIVE_LIMIT {
        return Err(FixpointError::TooLarge(n));
    }
    let table = update_table(game);
    let mut out = BTreeSet::new();
    for c in 1u32..(1 << n) {
        if table[c as usize] != c {
            continue;
        }
        // Walk the proper non-empty submasks of c.
        let mut sub = (c - 1) & c;
        let mut least = true;
        while sub != 0 {
            if table[sub as usize] & !sub == 0 {
                least = false;
                break;
            }
            sub = (sub - 1) & c;
        }
        if least {
            out.insert(game.names_of((0..n).filter(|&i| c & (1 << i) != 0)));
        }
    }
    Ok(out)
}

pub fn verify_lemma_least_fp(game: &CpGame) -> Result<bool, FixpointError> {
    Ok(least_nonempty_fixed_points(game)? == cp_equilibria(game))
}
