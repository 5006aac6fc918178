//! Closed-form `(r, s)`-excess robustness for complete graphs.
//!
//! In `K_n` every member of a size-`k` subset has excess `n - 2k + 1`, so a
//! subset's reachable set is either all of it or empty. A pair can only fail
//! when both reachable sets are empty, and that happens iff two disjoint
//! subsets of the smallest "unreachable" size fit in `n` agents. The
//! threshold `s` only matters through `s >= 1`.

use crate::graph::AgentId;

/// Smallest subset size `k >= 1` whose members have excess below `r` in `K_n`.
fn smallest_unreachable_size(n: usize, r: usize) -> usize {
    let slack = n as i64 + 1 - r as i64;
    if slack < 0 {
        1
    } else {
        (slack / 2 + 1) as usize
    }
}

pub fn complete_rs_certificate(n: usize, r: usize, s: usize) -> bool {
    complete_rs_violation(n, r, s).is_none()
}

/// A concrete violating pair in `K_n` (ids `0..k` and `k..2k`), if any.
pub fn complete_rs_violation(n: usize, r: usize, s: usize) -> Option<(Vec<AgentId>, Vec<AgentId>)> {
    if s == 0 || n < 2 {
        return None;
    }
    let k = smallest_unreachable_size(n, r);
    (2 * k <= n).then(|| ((0..k).collect(), (k..2 * k).collect()))
}
