//! Decision procedure shared by the coinductive relations on regular trees.

use std::collections::HashSet;
use std::hash::Hash;

/// Explores pairs reachable from `start`. `step` returns `None` when the
/// pair violates the local condition, otherwise the pairs it depends on.
/// Revisited pairs are assumed to hold, which yields the greatest fixpoint.
pub(crate) fn holds_coinductively<A, B>(start: (A, B), mut step: impl FnMut(A, B) -> Option<Vec<(A, B)>>) -> bool
where
    A: Copy + Eq + Hash,
    B: Copy + Eq + Hash,
{
    let mut seen = HashSet::new();
    let mut stack = vec![start];
    while let Some((a, b)) = stack.pop() {
        if !seen.insert((a, b)) {
            continue;
        }
        match step(a, b) {
            None => return false,
            Some(next) => stack.extend(next),
        }
    }
    true
}
