//! Exhaustive scan over unordered pairs of disjoint nonempty subsets.
//!
//! Every subset is encoded as a bitmask. For each mask the size of its
//! `r`-excess reachable set is tabulated once (`2^n` entries), after which a
//! pair is decided in constant time. Pairs are enumerated as `(S1, S2)` with
//! the lowest agent of `S1 ∪ S2` in `S1`, which visits each unordered pair
//! once (about `3^n / 2` pairs).

use rayon::prelude::*;

use super::{
    reachable_set, Predicate, ReachabilityReport, RobustnessError, RobustnessWitness, Violation,
};
use crate::graph::{AgentId, Graph};

/// Exhaustive scans refuse graphs above this size even with `force`, since
/// the per-subset table alone needs `2^n` bytes.
pub const HARD_ENUMERATION_LIMIT: usize = 28;

/// Size cap for exhaustive enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationLimit {
    pub cap: usize,
    pub force: bool,
}

impl EnumerationLimit {
    pub const DEFAULT_CAP: usize = 15;

    pub fn with_cap(cap: usize) -> Self {
        Self { cap, force: false }
    }

    pub fn forced() -> Self {
        Self {
            cap: Self::DEFAULT_CAP,
            force: true,
        }
    }

    pub fn check(&self, n: usize) -> Result<(), RobustnessError> {
        let cap = if self.force {
            HARD_ENUMERATION_LIMIT
        } else {
            self.cap.min(HARD_ENUMERATION_LIMIT)
        };
        if n > cap {
            Err(RobustnessError::CapExceeded { n, cap })
        } else {
            Ok(())
        }
    }
}

impl Default for EnumerationLimit {
    fn default() -> Self {
        Self::with_cap(Self::DEFAULT_CAP)
    }
}

const FULL_BIT: u8 = 0x80;

/// `table[mask]` = `|X^r_S|` in the low bits, `FULL_BIT` when `X^r_S = S`.
fn reachability_table(g: &Graph, r: usize) -> Vec<u8> {
    let n = g.n();
    let nbr: Vec<u32> = (0..n)
        .map(|u| g.adj(u).iter().fold(0u32, |m, &v| m | 1 << v))
        .collect();
    let degree: Vec<i64> = (0..n).map(|u| g.adj(u).len() as i64).collect();
    let r = r as i64;
    (0u32..1 << n)
        .into_par_iter()
        .map(|mask| {
            let mut count = 0u8;
            let mut rest = mask;
            while rest != 0 {
                let u = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                let inside = i64::from((nbr[u] & mask).count_ones());
                if degree[u] - 2 * inside >= r {
                    count += 1;
                }
            }
            if mask != 0 && u32::from(count) == mask.count_ones() {
                count | FULL_BIT
            } else {
                count
            }
        })
        .collect()
}

fn mask_to_ids(mask: u32) -> Vec<AgentId> {
    (0..32).filter(|&u| mask >> u & 1 == 1).collect()
}

/// Finds the first violating pair for the `(r, s)` condition, scanning `S1`
/// masks in ascending order.
fn find_violation(g: &Graph, r: usize, s: usize) -> Option<(u32, u32)> {
    let n = g.n();
    if n < 2 {
        return None;
    }
    let table = reachability_table(g, r);
    let all = (1u32 << n) - 1;
    (1u32..=all).into_par_iter().find_map_first(|first| {
        let t1 = table[first as usize];
        let c1 = usize::from(t1 & !FULL_BIT);
        if t1 & FULL_BIT != 0 || c1 >= s {
            return None;
        }
        let lowest = first & first.wrapping_neg();
        let allowed = all & !first & !((lowest << 1) - 1);
        let mut second = allowed;
        while second != 0 {
            let t2 = table[second as usize];
            if t2 & FULL_BIT == 0 && c1 + usize::from(t2) < s {
                return Some((first, second));
            }
            second = (second - 1) & allowed;
        }
        None
    })
}

fn witness(
    g: &Graph,
    predicate: Predicate,
    r: usize,
    pair: Option<(u32, u32)>,
) -> Result<RobustnessWitness, RobustnessError> {
    let violation = match pair {
        None => None,
        Some((a, b)) => Some(Violation {
            first: reachable_set(g, &mask_to_ids(a), r)?,
            second: reachable_set(g, &mask_to_ids(b), r)?,
        }),
    };
    Ok(RobustnessWitness {
        predicate,
        violation,
    })
}

/// Exhaustive `(r, s)`-excess robustness check.
pub fn is_rs_excess_robust(
    g: &Graph,
    r: usize,
    s: usize,
    limit: EnumerationLimit,
) -> Result<RobustnessWitness, RobustnessError> {
    if s == 0 {
        return Err(RobustnessError::ZeroThreshold);
    }
    limit.check(g.n())?;
    let pair = find_violation(g, r, s);
    witness(g, Predicate::RsExcess { r, s }, r, pair)
}

/// Exhaustive `r`-excess robustness check. A pair fails exactly when both
/// reachable sets are empty, which is the `(r, 1)` condition.
pub fn is_r_excess_robust(
    g: &Graph,
    r: usize,
    limit: EnumerationLimit,
) -> Result<RobustnessWitness, RobustnessError> {
    limit.check(g.n())?;
    let pair = find_violation(g, r, 1);
    witness(g, Predicate::Excess { r }, r, pair)
}

/// Evaluation of the `(r, s)` clauses on one explicit pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairEvaluation {
    pub first: ReachabilityReport,
    pub second: ReachabilityReport,
    pub s: usize,
}

impl PairEvaluation {
    pub fn enough_reachable(&self) -> bool {
        self.first.reachable.len() + self.second.reachable.len() >= self.s
    }

    /// True when at least one clause holds for this pair.
    pub fn satisfied(&self) -> bool {
        self.enough_reachable() || self.first.is_full() || self.second.is_full()
    }
}

/// Evaluates the `(r, s)` clauses for a given disjoint pair.
pub fn evaluate_pair(
    g: &Graph,
    first: &[AgentId],
    second: &[AgentId],
    r: usize,
    s: usize,
) -> Result<PairEvaluation, RobustnessError> {
    let a = g.membership(first)?;
    if let Some(&u) = second.iter().find(|&&u| u < a.len() && a[u]) {
        return Err(crate::graph::GraphError::RepeatedAgent(u).into());
    }
    Ok(PairEvaluation {
        first: reachable_set(g, first, r)?,
        second: reachable_set(g, second, r)?,
        s,
    })
}

#[cfg(test)]
mod tests {
    use super::super::tests::arb_graph;
    use super::*;
    use proptest::prelude::*;

    /// Straightforward reference: label each agent 0 (unused), 1 (S1) or 2
    /// (S2) and evaluate every labeling with plain set arithmetic.
    fn reference(g: &Graph, r: usize, s: usize) -> bool {
        let n = g.n();
        let total = 3usize.pow(n as u32);
        for code in 0..total {
            let mut labels = vec![0u8; n];
            let mut c = code;
            for l in labels.iter_mut() {
                *l = (c % 3) as u8;
                c /= 3;
            }
            let s1: Vec<usize> = (0..n).filter(|&u| labels[u] == 1).collect();
            let s2: Vec<usize> = (0..n).filter(|&u| labels[u] == 2).collect();
            if s1.is_empty() || s2.is_empty() {
                continue;
            }
            let x = |set: &[usize]| {
                set.iter()
                    .filter(|&&u| {
                        let nb = g.neighbors(u).unwrap();
                        let inside = nb.iter().filter(|v| set.contains(v)).count() as i64;
                        let outside = nb.len() as i64 - inside;
                        outside - inside >= r as i64
                    })
                    .count()
            };
            let (x1, x2) = (x(&s1), x(&s2));
            if !(x1 + x2 >= s || x1 == s1.len() || x2 == s2.len()) {
                return false;
            }
        }
        true
    }

    fn two_triangles() -> Graph {
        Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap()
    }

    #[test]
    fn rs_examples() {
        let lim = EnumerationLimit::default();
        assert!(is_rs_excess_robust(&Graph::complete(9), 1, 2, lim)
            .unwrap()
            .verdict());
        assert!(is_rs_excess_robust(&Graph::empty(2), 0, 1, lim)
            .unwrap()
            .verdict());
        assert!(reference(&Graph::empty(2), 0, 1));
        assert!(reference(&Graph::complete(9), 1, 2));
    }

    #[test]
    fn r_examples() {
        let lim = EnumerationLimit::default();
        assert!(is_r_excess_robust(&Graph::complete(3), 0, lim)
            .unwrap()
            .verdict());
        assert!(is_r_excess_robust(&Graph::complete(1), 3, lim)
            .unwrap()
            .verdict());
        assert!(is_r_excess_robust(&Graph::empty(0), 3, lim)
            .unwrap()
            .verdict());

        let g = two_triangles();
        for u in 0..3 {
            assert_eq!(super::super::excess(&g, u, &[0, 1, 2]).unwrap(), -2);
        }
        let w = is_r_excess_robust(&g, 0, lim).unwrap();
        let v = w.violation.expect("two triangles are not 0-excess robust");
        assert!(v.first.reachable.is_empty() && v.second.reachable.is_empty());
        let eval = evaluate_pair(&g, &[0, 1, 2], &[3, 4, 5], 0, 1).unwrap();
        assert!(!eval.satisfied());
    }

    #[test]
    fn cap_is_enforced() {
        let g = Graph::complete(16);
        assert_eq!(
            is_rs_excess_robust(&g, 1, 1, EnumerationLimit::default()),
            Err(RobustnessError::CapExceeded { n: 16, cap: 15 })
        );
        assert!(
            is_rs_excess_robust(&Graph::complete(4), 1, 1, EnumerationLimit::with_cap(3)).is_err()
        );
        assert_eq!(
            EnumerationLimit::forced().check(29),
            Err(RobustnessError::CapExceeded {
                n: 29,
                cap: HARD_ENUMERATION_LIMIT
            })
        );
        assert!(EnumerationLimit::forced().check(16).is_ok());
        assert_eq!(
            is_rs_excess_robust(&Graph::complete(3), 1, 0, EnumerationLimit::default()),
            Err(RobustnessError::ZeroThreshold)
        );
    }

    #[test]
    fn evaluate_pair_rejects_overlap() {
        let g = Graph::complete(4);
        assert!(evaluate_pair(&g, &[0, 1], &[1, 2], 0, 1).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn agrees_with_reference(g in arb_graph(6), r in 0usize..3, s in 1usize..4) {
            let w = is_rs_excess_robust(&g, r, s, EnumerationLimit::default()).unwrap();
            prop_assert_eq!(w.verdict(), reference(&g, r, s));
            let w1 = is_r_excess_robust(&g, r, EnumerationLimit::default()).unwrap();
            prop_assert_eq!(w1.verdict(), reference(&g, r, 1));
        }

        #[test]
        fn witnesses_are_sound(g in arb_graph(8), r in 0usize..4, s in 1usize..5) {
            let w = is_rs_excess_robust(&g, r, s, EnumerationLimit::default()).unwrap();
            if let Some(v) = w.violation {
                prop_assert!(v.first.subset.iter().all(|u| !v.second.subset.contains(u)));
                let eval = evaluate_pair(&g, &v.first.subset, &v.second.subset, r, s).unwrap();
                prop_assert!(!eval.satisfied());
                prop_assert_eq!(eval.first, v.first);
            }
        }

        #[test]
        fn monotone_in_r_and_s(g in arb_graph(7), r in 0usize..4, s in 1usize..5) {
            let lim = EnumerationLimit::default();
            if is_rs_excess_robust(&g, r, s, lim).unwrap().verdict() {
                for r2 in 0..=r {
                    for s2 in 1..=s {
                        prop_assert!(is_rs_excess_robust(&g, r2, s2, lim).unwrap().verdict());
                    }
                }
            }
        }
    }
}
